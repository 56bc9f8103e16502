"""Closed-form absorption rates at first and second perturbative order.

First order: a one-particle packet is absorbed at rate
``efficiency * |psi(Q)|^2`` when its spin matches the detector spin, which
is the position-space one-particle detection law.

Second order: two packets are absorbed through the medium channels.  The
amplitude is a coherent sum of two absorption orderings; each ordering
carries the product of both packet amplitudes at the detector position and
an energy denominator built from the kinetic energy of the packet absorbed
first minus the channel energy.  Bosonic orderings add, fermionic orderings
subtract, so identical fermionic packets cancel exactly while identical
bosonic packets give a rate proportional to |psi(Q)|^4.

The closed form factors one mean kinetic energy per packet out of each
ordering's mode sum (``energy_convention="mean"``).  With
``energy_convention="per_mode"`` the denominators stay inside the mode sums,
which reproduces the brute-force enumeration exactly; both conventions
coincide for sharp packets and for packets whose occupied modes share one
kinetic energy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fock_core import Statistics
from .field_ops import (
    ModeBasis,
    Position,
    Wavepacket,
    mean_kinetic_energy,
    mode_wavefunction,
    position_amplitude,
)
from .medium import MediumModel, channel_weight, efficiency_factor

MIN_FIT_DENSITY = 1e-12


class IndistinguishableFermionsError(ValueError):
    """Two fermions in exactly the same packet and spin are forbidden."""


@dataclass(frozen=True)
class TwoParticleInput:
    """Ordered packet pair (packet_b created first), detector spin, statistics."""

    packet_a: Wavepacket
    packet_b: Wavepacket
    detector_spin: int
    statistics: Statistics

    def __post_init__(self) -> None:
        if self.packet_a.basis != self.packet_b.basis:
            raise ValueError("packets live on different bases")
        if self.detector_spin not in self.packet_a.basis.spins:
            raise ValueError(
                f"detector spin {self.detector_spin} not in basis spin set"
            )
        if (
            self.statistics is Statistics.FERMI
            and self.packet_a.spin == self.packet_b.spin
            and self.packet_a.amplitudes == self.packet_b.amplitudes
        ):
            raise IndistinguishableFermionsError(
                "fermionic pair with identical packets and equal spins"
            )

    @property
    def basis(self) -> ModeBasis:
        return self.packet_a.basis


@dataclass(frozen=True)
class RateResult:
    """A transition rate at one detector position.

    ``terms`` is None at first order.  At second order it holds the two
    ordering amplitudes (packet_b absorbed first, packet_a absorbed first),
    excluding the coupling constant, so that
    value = (2 pi / hbar^2) |coupling|^(2 order) |sum(terms)|^2.
    """

    value: float
    order: int
    position: Position
    terms: tuple[complex, ...] | None = None


def rate_first_order(
    packet: Wavepacket, detector_spin: int, q: Position, model: MediumModel
) -> RateResult:
    """One-particle absorption rate efficiency * |psi(Q)|^2 at matching spin."""
    basis = packet.basis
    if detector_spin not in basis.spins:
        raise ValueError(f"detector spin {detector_spin} not in basis spin set")
    if packet.spin != detector_spin:
        return RateResult(0.0, 1, q)
    amp = position_amplitude(packet, q)
    value = efficiency_factor(model, basis.hbar) * abs(amp) ** 2
    return RateResult(value, 1, q)


def _ordering_amplitude(
    first_absorbed: Wavepacket,
    remaining_amp: complex,
    q: Position,
    model: MediumModel,
    convention: str,
) -> complex:
    """Channel-summed amplitude for one absorption ordering.

    The energy denominator uses the kinetic energy of the packet absorbed
    first: its mean over the packet, or the exact per-mode values.
    """
    basis = first_absorbed.basis
    if convention == "mean":
        psi = position_amplitude(first_absorbed, q)
        energy = mean_kinetic_energy(first_absorbed)
        weight = sum(
            channel_weight(ch, energy - ch.energy) for ch in model.channels
        )
        return psi * weight * remaining_amp
    if convention == "per_mode":
        total = 0.0 + 0.0j
        for ch in model.channels:
            for i, amp in enumerate(first_absorbed.amplitudes):
                if abs(amp) == 0.0:
                    continue
                energy = basis.kinetic_energy(i)
                total += (
                    amp
                    * mode_wavefunction(basis, i, q)
                    * channel_weight(ch, energy - ch.energy)
                )
        return total * remaining_amp
    raise ValueError(f"unknown energy convention {convention!r}")


def w_terms(
    inp: TwoParticleInput,
    q: Position,
    model: MediumModel,
    energy_convention: str = "mean",
) -> tuple[complex, complex]:
    """The two ordering amplitudes (packet_b first, packet_a first).

    Both carry Kronecker deltas forcing each packet spin to equal the
    detector spin; the packet_b-first term carries the statistics sign
    (+ bosons, - fermions) inherited from commuting the field operator
    through the first-created packet.
    """
    if not model.channels:
        raise ValueError("second-order rates require at least one medium channel")
    a, b = inp.packet_a, inp.packet_b
    spin_ok = a.spin == inp.detector_spin and b.spin == inp.detector_spin
    sign = 1.0 if inp.statistics is Statistics.BOSE else -1.0
    if not spin_ok:
        # Denominators are still validated: resonance is an input defect
        # regardless of the spin selection outcome.
        for packet in (a, b):
            _ordering_amplitude(packet, 1.0, q, model, energy_convention)
        return (0.0 + 0.0j, 0.0 + 0.0j)
    psi_a = position_amplitude(a, q)
    psi_b = position_amplitude(b, q)
    a_first = _ordering_amplitude(a, psi_b, q, model, energy_convention)
    b_first = sign * _ordering_amplitude(b, psi_a, q, model, energy_convention)
    return (b_first, a_first)


def rate_second_order(
    inp: TwoParticleInput, q: Position, model: MediumModel
) -> RateResult:
    """Two-particle absorption rate (2 pi / hbar^2)|coupling|^4 |sum of terms|^2."""
    terms = w_terms(inp, q, model, energy_convention="mean")
    hbar = inp.basis.hbar
    value = (
        2.0
        * math.pi
        / hbar**2
        * abs(model.coupling) ** 4
        * abs(sum(terms)) ** 2
    )
    return RateResult(value, 2, q, terms)


def log_log_slope(densities: list[float], rates: list[float]) -> float:
    """Least-squares slope of log(rate) against log(density).

    Points with density below MIN_FIT_DENSITY or nonpositive rate are
    excluded.  Raises if fewer than 3 points survive or if the surviving
    densities have no spread (a single plane wave gives a flat density).
    """
    if len(densities) != len(rates):
        raise ValueError("densities and rates must have equal length")
    pairs = [
        (d, r)
        for d, r in zip(densities, rates)
        if d > MIN_FIT_DENSITY and r > 0.0
    ]
    if len(pairs) < 3:
        raise ValueError(
            f"need at least 3 usable points for the fit, got {len(pairs)}"
        )
    log_d = np.log([d for d, _ in pairs])
    log_r = np.log([r for _, r in pairs])
    if np.ptp(log_d) < 1e-9:
        raise ValueError("density has no spread; the exponent is undetermined")
    slope, _ = np.polyfit(log_d, log_r, 1)
    return float(slope)


def proportionality_exponent(
    inp: TwoParticleInput, model: MediumModel, positions: list[Position]
) -> float:
    """Fit rate ~ density**k over positions and return k.

    For identical bosonic packets the second-order rate scales as the
    squared density, so the fit returns 2; the first-order rate run through
    the same fit returns 1.
    """
    rates = [rate_second_order(inp, q, model).value for q in positions]
    densities = [
        abs(position_amplitude(inp.packet_a, q)) ** 2 for q in positions
    ]
    return log_log_slope(densities, rates)
