"""Phenomenological absorbing-medium model.

The medium is characterized by complex matrix elements of its transition
operator rather than by internal dynamics: a first-order element for the
single-absorption final state, and per-channel (element_in, element_out,
energy) triples for the intermediate states reached while absorbing twice.
Channel energies are measured from the medium ground state at 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

RESONANCE_THRESHOLD = 1e-9

FIRST_ORDER_LABEL = "M1"


class ResonanceError(ValueError):
    """An energy denominator is too close to zero for perturbation theory."""


@dataclass(frozen=True)
class MediumChannel:
    """One intermediate medium state reachable by absorbing a particle.

    ``element_in`` is the matrix element from the ground state into the
    channel, ``element_out`` the one from the channel to the final state.
    """

    label: str
    element_in: complex
    element_out: complex
    energy: float


@dataclass(frozen=True)
class MediumModel:
    """Coupling constant plus the medium matrix elements.

    ``first_order_element`` is the single-absorption matrix element; it
    defaults to the first channel's ``element_in`` when channels exist.
    """

    coupling: complex
    channels: tuple[MediumChannel, ...] = ()
    first_order_element: complex | None = None

    def __post_init__(self) -> None:
        labels = [ch.label for ch in self.channels]
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate channel labels: {labels}")
        if FIRST_ORDER_LABEL in labels:
            raise ValueError(
                f"channel label {FIRST_ORDER_LABEL!r} is reserved for the "
                f"first-order final state"
            )
        energies = [ch.energy for ch in self.channels]
        if len(set(energies)) != len(energies):
            raise ValueError(
                f"degenerate channel energies are not supported: {energies}"
            )
        if self.first_order_element is None:
            if not self.channels:
                raise ValueError(
                    "first_order_element is required when no channels are given"
                )
            object.__setattr__(
                self, "first_order_element", self.channels[0].element_in
            )

    def element_for(self, label: str) -> complex:
        """Absorption matrix element for a named final or channel state."""
        if label == FIRST_ORDER_LABEL:
            assert self.first_order_element is not None
            return self.first_order_element
        for ch in self.channels:
            if ch.label == label:
                return ch.element_in
        raise ValueError(f"unknown medium label {label!r}")


def efficiency_factor(model: MediumModel, hbar: float) -> float:
    """First-order rate prefactor (2 pi / hbar^2) |coupling * element|^2."""
    if hbar <= 0:
        raise ValueError("hbar must be positive")
    assert model.first_order_element is not None
    return (
        2.0 * math.pi / hbar**2 * abs(model.coupling * model.first_order_element) ** 2
    )


def channel_weight(channel: MediumChannel, denominator: complex) -> complex:
    """Second-order channel factor element_out * element_in / denominator."""
    if abs(denominator) < RESONANCE_THRESHOLD:
        raise ResonanceError(
            f"energy denominator {denominator!r} for channel "
            f"{channel.label!r} is within {RESONANCE_THRESHOLD} of resonance"
        )
    return channel.element_out * channel.element_in / denominator
