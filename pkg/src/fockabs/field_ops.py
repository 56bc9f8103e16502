"""Plane-wave modes on a periodic box, wavepackets, and field-operator action.

A ``ModeBasis`` holds a finite momentum grid for a box with periodic
boundaries.  Mode wavefunctions are exp(i p.Q / hbar) / sqrt(V), so the box
volume plays the role a continuum normalization constant would.  Wavepackets
are unit-norm complex amplitude vectors over the modes, tagged with a spin
label.  ``field_annihilate`` applies the position-space field operator for a
fixed spin: the mode-function-weighted sum of slot annihilations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .fock_core import (
    FockState,
    SlotKey,
    Statistics,
    annihilate,
    create,
    superpose,
    vacuum,
    zero_state,
)

NORMALIZATION_TOLERANCE = 1e-10
_INTEGER_GRID_TOLERANCE = 1e-9
_ORTHONORMALITY_TOLERANCE = 1e-8


@dataclass(frozen=True)
class Position:
    """Point inside the box; build via ``ModeBasis.position`` so it is wrapped."""

    coords: tuple[float, ...]

    @property
    def dim(self) -> int:
        return len(self.coords)


@dataclass(frozen=True)
class ModeBasis:
    """Finite plane-wave basis on a periodic box.

    Each momentum component must be an integer multiple of 2*pi*hbar/L for
    its axis, which makes the mode set orthonormal under the box inner
    product; that is re-checked numerically at construction.
    """

    box_lengths: tuple[float, ...]
    momenta: tuple[tuple[float, ...], ...]
    hbar: float = 1.0
    mass: float = 1.0
    spins: tuple[int, ...] = (0, 1)

    def __post_init__(self) -> None:
        dim = len(self.box_lengths)
        if dim not in (1, 2, 3):
            raise ValueError(f"dim must be 1, 2 or 3, got {dim}")
        if any(length <= 0 for length in self.box_lengths):
            raise ValueError("box lengths must be positive")
        if self.hbar <= 0 or self.mass <= 0:
            raise ValueError("hbar and mass must be positive")
        if not self.momenta:
            raise ValueError("at least one mode is required")
        if len(self.spins) == 0:
            raise ValueError("spin label set must be nonempty")
        if len(set(self.spins)) != len(self.spins):
            raise ValueError("spin labels must be unique")
        if any((not isinstance(s, int)) or s < 0 for s in self.spins):
            raise ValueError("spin labels must be nonnegative integers")
        for p in self.momenta:
            if len(p) != dim:
                raise ValueError(f"momentum {p} does not match dim {dim}")
        numbers = self._mode_numbers()
        if len(set(numbers)) != len(numbers):
            raise ValueError("momentum vectors must be distinct")
        self._check_orthonormality(numbers)

    def _mode_numbers(self) -> tuple[tuple[int, ...], ...]:
        """Integer mode numbers n with p = 2*pi*hbar*n/L, validated per axis."""
        out = []
        for p in self.momenta:
            n_vec = []
            for ax, component in enumerate(p):
                ratio = component * self.box_lengths[ax] / (2 * math.pi * self.hbar)
                n = round(ratio)
                if abs(ratio - n) > _INTEGER_GRID_TOLERANCE:
                    raise ValueError(
                        f"momentum component {component} on axis {ax} is not an "
                        f"integer multiple of 2*pi*hbar/L"
                    )
                n_vec.append(n)
            out.append(tuple(n_vec))
        return tuple(out)

    def _check_orthonormality(self, numbers: tuple[tuple[int, ...], ...]) -> None:
        # Uniform grids make the plane-wave quadrature exact once the grid
        # resolves every mode-number difference.
        dim = len(self.box_lengths)
        grid_sizes = []
        for ax in range(dim):
            n_max = max(abs(n[ax]) for n in numbers)
            grid_sizes.append(2 * n_max + 3)
        for i, n_i in enumerate(numbers):
            for j in range(i, len(numbers)):
                val = 1.0 + 0.0j
                for ax in range(dim):
                    dn = numbers[j][ax] - n_i[ax]
                    pts = np.arange(grid_sizes[ax])
                    val *= np.exp(2j * np.pi * dn * pts / grid_sizes[ax]).mean()
                expected = 1.0 if i == j else 0.0
                if abs(val - expected) > _ORTHONORMALITY_TOLERANCE:
                    raise ValueError(
                        f"modes {i} and {j} fail the box orthonormality check"
                    )

    @classmethod
    def from_mode_numbers(
        cls,
        box_lengths: Sequence[float],
        mode_numbers: Sequence[Sequence[int]],
        hbar: float = 1.0,
        mass: float = 1.0,
        spins: Sequence[int] = (0, 1),
    ) -> "ModeBasis":
        lengths = tuple(float(length) for length in box_lengths)
        momenta = tuple(
            tuple(2 * math.pi * hbar * n / lengths[ax] for ax, n in enumerate(vec))
            for vec in mode_numbers
        )
        return cls(lengths, momenta, float(hbar), float(mass), tuple(spins))

    @classmethod
    def lowest_modes_1d(
        cls,
        count: int,
        length: float,
        hbar: float = 1.0,
        mass: float = 1.0,
        spins: Sequence[int] = (0, 1),
    ) -> "ModeBasis":
        """The ``count`` lowest 1D modes in the order 0, 1, -1, 2, -2, ..."""
        if count < 1:
            raise ValueError("count must be at least 1")
        numbers: list[tuple[int]] = [(0,)]
        k = 1
        while len(numbers) < count:
            numbers.append((k,))
            if len(numbers) < count:
                numbers.append((-k,))
            k += 1
        return cls.from_mode_numbers([length], numbers, hbar, mass, spins)

    @property
    def dim(self) -> int:
        return len(self.box_lengths)

    @property
    def n_modes(self) -> int:
        return len(self.momenta)

    @property
    def volume(self) -> float:
        return math.prod(self.box_lengths)

    def kinetic_energy(self, mode_index: int) -> float:
        """|p|^2 / 2m for one mode."""
        p = self.momenta[mode_index]
        return sum(c * c for c in p) / (2 * self.mass)

    def position(self, coords: Sequence[float]) -> Position:
        """Wrap coordinates into [0, L) per axis and return a Position."""
        if len(coords) != self.dim:
            raise ValueError(
                f"expected {self.dim} coordinates, got {len(coords)}"
            )
        wrapped = tuple(
            float(c) % self.box_lengths[ax] for ax, c in enumerate(coords)
        )
        return Position(wrapped)


@dataclass(frozen=True)
class Wavepacket:
    """Unit-norm amplitude vector over the basis modes, with a spin label."""

    basis: ModeBasis
    amplitudes: tuple[complex, ...]
    spin: int

    def __post_init__(self) -> None:
        if len(self.amplitudes) != self.basis.n_modes:
            raise ValueError(
                f"expected {self.basis.n_modes} amplitudes, "
                f"got {len(self.amplitudes)}"
            )
        if self.spin not in self.basis.spins:
            raise ValueError(f"spin {self.spin} not in basis spin set")
        norm_sq = sum(abs(a) ** 2 for a in self.amplitudes)
        if abs(norm_sq - 1.0) > NORMALIZATION_TOLERANCE:
            raise ValueError(
                f"wavepacket norm^2 = {norm_sq!r} is not 1 within "
                f"{NORMALIZATION_TOLERANCE}"
            )


def mode_wavefunction(basis: ModeBasis, mode_index: int, q: Position) -> complex:
    """Plane-wave value exp(i p.Q / hbar) / sqrt(V) for one mode."""
    if not 0 <= mode_index < basis.n_modes:
        raise IndexError(f"mode index {mode_index} out of range")
    if q.dim != basis.dim:
        raise ValueError(f"position dim {q.dim} does not match basis {basis.dim}")
    phase = sum(p * x for p, x in zip(basis.momenta[mode_index], q.coords))
    return complex(np.exp(1j * phase / basis.hbar) / math.sqrt(basis.volume))


def position_amplitude(packet: Wavepacket, q: Position) -> complex:
    """Position-space amplitude: the mode sum of amplitude * wavefunction."""
    values = np.array(
        [mode_wavefunction(packet.basis, i, q) for i in range(packet.basis.n_modes)]
    )
    return complex(np.dot(np.array(packet.amplitudes), values))


def overlap(f: Wavepacket, g: Wavepacket) -> complex:
    """Discrete momentum-space overlap <f|g>; spins are not compared."""
    if f.basis != g.basis:
        raise ValueError("wavepackets live on different bases")
    return complex(np.vdot(np.array(f.amplitudes), np.array(g.amplitudes)))


def mean_kinetic_energy(packet: Wavepacket) -> float:
    """Expectation of |p|^2 / 2m in the packet."""
    return sum(
        abs(a) ** 2 * packet.basis.kinetic_energy(i)
        for i, a in enumerate(packet.amplitudes)
    )


def apply_packet_creation(state: FockState, packet: Wavepacket) -> FockState:
    """Apply the packet creation operator sum_b f(b) adag_(b, spin)."""
    parts = [
        (amp, create(state, SlotKey(i, packet.spin)))
        for i, amp in enumerate(packet.amplitudes)
        if abs(amp) != 0.0
    ]
    if not parts:
        return zero_state(state.statistics)
    return superpose(parts)


def packet_state(packet: Wavepacket, statistics: Statistics) -> FockState:
    """One-particle state of the packet."""
    return apply_packet_creation(vacuum(statistics), packet)


def two_particle_state(
    packet_a: Wavepacket, packet_b: Wavepacket, statistics: Statistics
) -> FockState:
    """Two-particle product state: packet_b created first, then packet_a.

    For fermions with identical packets and equal spins this is the zero
    state (Pauli exclusion), not an error.
    """
    if packet_a.basis != packet_b.basis:
        raise ValueError("wavepackets live on different bases")
    return apply_packet_creation(
        apply_packet_creation(vacuum(statistics), packet_b), packet_a
    )


def field_annihilate(
    state: FockState, basis: ModeBasis, q: Position, spin: int
) -> FockState:
    """Apply the spin-selective field operator sum_q psi_q(Q) a_(q, spin)."""
    if spin not in basis.spins:
        raise ValueError(f"spin {spin} not in basis spin set")
    parts = [
        (mode_wavefunction(basis, i, q), annihilate(state, SlotKey(i, spin)))
        for i in range(basis.n_modes)
    ]
    return superpose(parts)


def uniform_grid(basis: ModeBasis, points_per_axis: int) -> tuple[list[Position], float]:
    """Uniform quadrature grid over the box and its per-point volume weight."""
    if points_per_axis < 1:
        raise ValueError("points_per_axis must be at least 1")
    axes = [
        np.linspace(0.0, length, points_per_axis, endpoint=False)
        for length in basis.box_lengths
    ]
    mesh = np.meshgrid(*axes, indexing="ij")
    coords = np.stack([m.ravel() for m in mesh], axis=-1)
    weight = basis.volume / coords.shape[0]
    return [Position(tuple(float(c) for c in row)) for row in coords], weight
