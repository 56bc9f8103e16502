"""Absorption rates for beams of massive particles, from first principles.

The package builds sparse Fock states over a finite plane-wave basis,
applies ladder and field operators literally, and exposes closed-form
first- and second-order absorption rates together with a brute-force
enumeration oracle that validates them.
"""

from .fock_core import (
    DEFAULT_OCCUPATION_CAP,
    EMPTY_KET,
    FockState,
    OccupationKet,
    SlotKey,
    Statistics,
    annihilate,
    check_commutation,
    create,
    inner_product,
    superpose,
    vacuum,
    zero_state,
)
from .field_ops import (
    ModeBasis,
    Position,
    Wavepacket,
    apply_packet_creation,
    field_annihilate,
    mean_kinetic_energy,
    mode_wavefunction,
    overlap,
    packet_state,
    position_amplitude,
    two_particle_state,
    uniform_grid,
)
from .medium import (
    FIRST_ORDER_LABEL,
    MediumChannel,
    MediumModel,
    ResonanceError,
    channel_weight,
    efficiency_factor,
)
from .perturbation import (
    IndistinguishableFermionsError,
    RateResult,
    TwoParticleInput,
    log_log_slope,
    proportionality_exponent,
    rate_first_order,
    rate_second_order,
    w_terms,
)
from .oracle import (
    CompositeState,
    TrialRecord,
    VerificationReport,
    first_order_amplitude,
    ket_kinetic_energy,
    second_order_amplitude,
    single_absorption_vacuum_overlap,
    verify_closed_forms,
)
from .cli_io import (
    ConfigError,
    ExperimentConfig,
    RateRow,
    RateTable,
    emit_csv,
    parse_config,
    run_scan,
    serialize_config,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_OCCUPATION_CAP",
    "EMPTY_KET",
    "FIRST_ORDER_LABEL",
    "CompositeState",
    "ConfigError",
    "ExperimentConfig",
    "FockState",
    "IndistinguishableFermionsError",
    "MediumChannel",
    "MediumModel",
    "ModeBasis",
    "OccupationKet",
    "Position",
    "RateResult",
    "RateRow",
    "RateTable",
    "ResonanceError",
    "SlotKey",
    "Statistics",
    "TrialRecord",
    "TwoParticleInput",
    "VerificationReport",
    "Wavepacket",
    "annihilate",
    "apply_packet_creation",
    "channel_weight",
    "check_commutation",
    "create",
    "efficiency_factor",
    "emit_csv",
    "field_annihilate",
    "first_order_amplitude",
    "inner_product",
    "ket_kinetic_energy",
    "log_log_slope",
    "mean_kinetic_energy",
    "mode_wavefunction",
    "overlap",
    "packet_state",
    "parse_config",
    "position_amplitude",
    "proportionality_exponent",
    "rate_first_order",
    "rate_second_order",
    "run_scan",
    "second_order_amplitude",
    "serialize_config",
    "single_absorption_vacuum_overlap",
    "superpose",
    "two_particle_state",
    "uniform_grid",
    "vacuum",
    "verify_closed_forms",
    "w_terms",
    "zero_state",
]
