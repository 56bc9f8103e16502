"""Config-driven scans, CSV output, and the command-line entry point.

Configs are YAML documents with five sections: ``basis`` (box and momentum
grid), ``packets`` (named amplitude vectors with spins), ``medium``
(coupling and channel matrix elements), ``scan`` (detector positions) and
``run`` (order, statistics, packet names, detector spin).  Complex numbers
are written as ``[re, im]`` pairs; bare reals are accepted too.  The full
grammar is documented in the package README.

CSV output is deterministic byte for byte: fixed column order, reals
printed with 12 significant digits, newline-separated rows.
"""

from __future__ import annotations

import argparse
import math
import sys
import warnings
from dataclasses import dataclass, field as dataclass_field

import yaml

from .fock_core import Statistics
from .field_ops import ModeBasis, Wavepacket, position_amplitude
from .medium import MediumChannel, MediumModel, ResonanceError
from .oracle import verify_closed_forms
from .perturbation import (
    TwoParticleInput,
    log_log_slope,
    proportionality_exponent,
    rate_first_order,
    rate_second_order,
)

NORMALIZE_WARN_LIMIT = 1e-6
NORMALIZE_SILENT_LIMIT = 1e-12

_SECTIONS = ("basis", "packets", "medium", "scan", "run")


class ConfigError(ValueError):
    """A config file that cannot be used, with the offending key named."""


@dataclass(frozen=True)
class BasisSpec:
    box_lengths: tuple[float, ...]
    modes: tuple[tuple[int, ...], ...]
    hbar: float = 1.0
    mass: float = 1.0
    spins: tuple[int, ...] = (0, 1)


@dataclass(frozen=True)
class PacketSpec:
    spin: int
    amplitudes: tuple[complex, ...]


@dataclass(frozen=True)
class ChannelSpec:
    label: str
    element_in: complex
    element_out: complex
    energy: float


@dataclass(frozen=True)
class MediumSpec:
    coupling: complex
    channels: tuple[ChannelSpec, ...]
    first_order_element: complex | None = None


@dataclass(frozen=True)
class RunSpec:
    order: int
    statistics: Statistics
    packet_names: tuple[str, ...]
    detector_spin: int


@dataclass(frozen=True)
class ExperimentConfig:
    basis: BasisSpec
    packets: dict[str, PacketSpec]
    medium: MediumSpec
    positions: tuple[tuple[float, ...], ...]
    run: RunSpec


@dataclass(frozen=True)
class RateRow:
    position: tuple[float, ...]
    rate_order1: float
    rate_order2: float
    density_a: float
    density_b: float


@dataclass(frozen=True)
class RateTable:
    dim: int
    rows: tuple[RateRow, ...] = dataclass_field(default_factory=tuple)


# --------------------------------------------------------------------------
# parsing helpers
# --------------------------------------------------------------------------


def _require_map(value: object, path: str) -> dict:
    if not isinstance(value, dict):
        raise ConfigError(f"{path}: expected a mapping")
    return value


def _require_list(value: object, path: str) -> list:
    if not isinstance(value, list) or not value:
        raise ConfigError(f"{path}: expected a nonempty list")
    return value


def _pop(section: dict, key: str, path: str) -> object:
    if key not in section:
        raise ConfigError(f"{path}.{key}: missing required key")
    return section.pop(key)


def _no_leftovers(section: dict, path: str) -> None:
    if section:
        name = sorted(section)[0]
        raise ConfigError(f"{path}.{name}: unknown key")


def _as_float(value: object, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}: expected a real number, got {value!r}")
    return float(value)


def _as_int(value: object, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{path}: expected an integer, got {value!r}")
    return value


def _as_complex(value: object, path: str) -> complex:
    if isinstance(value, bool):
        raise ConfigError(f"{path}: expected a number, got {value!r}")
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, list) and len(value) == 2:
        return complex(
            _as_float(value[0], f"{path}[0]"), _as_float(value[1], f"{path}[1]")
        )
    if isinstance(value, str):
        try:
            return complex(value.replace(" ", ""))
        except ValueError as exc:
            raise ConfigError(f"{path}: cannot parse complex {value!r}") from exc
    raise ConfigError(
        f"{path}: expected a number, [re, im] pair or complex string"
    )


def _parse_basis(section: object) -> BasisSpec:
    data = dict(_require_map(section, "basis"))
    lengths = tuple(
        _as_float(v, f"basis.box_lengths[{i}]")
        for i, v in enumerate(_require_list(_pop(data, "box_lengths", "basis"), "basis.box_lengths"))
    )
    if not 1 <= len(lengths) <= 3:
        raise ConfigError("basis.box_lengths: need 1 to 3 axes")
    if any(length <= 0 for length in lengths):
        raise ConfigError("basis.box_lengths: lengths must be positive")
    has_modes = "modes" in data
    has_lowest = "lowest_modes" in data
    if has_modes == has_lowest:
        raise ConfigError("basis: give exactly one of 'modes' or 'lowest_modes'")
    if has_lowest:
        if len(lengths) != 1:
            raise ConfigError("basis.lowest_modes: only supported for 1D boxes")
        count = _as_int(data.pop("lowest_modes"), "basis.lowest_modes")
        if count < 1:
            raise ConfigError("basis.lowest_modes: must be at least 1")
        numbers: list[tuple[int, ...]] = [(0,)]
        k = 1
        while len(numbers) < count:
            numbers.append((k,))
            if len(numbers) < count:
                numbers.append((-k,))
            k += 1
        modes = tuple(numbers)
    else:
        raw_modes = _require_list(data.pop("modes"), "basis.modes")
        modes = []
        for i, vec in enumerate(raw_modes):
            vec_list = _require_list(vec, f"basis.modes[{i}]")
            if len(vec_list) != len(lengths):
                raise ConfigError(
                    f"basis.modes[{i}]: expected {len(lengths)} components"
                )
            modes.append(
                tuple(_as_int(n, f"basis.modes[{i}][{ax}]") for ax, n in enumerate(vec_list))
            )
        modes = tuple(modes)
    hbar = _as_float(data.pop("hbar", 1.0), "basis.hbar")
    mass = _as_float(data.pop("mass", 1.0), "basis.mass")
    raw_spins = data.pop("spins", [0, 1])
    spins = tuple(
        _as_int(s, f"basis.spins[{i}]")
        for i, s in enumerate(_require_list(raw_spins, "basis.spins"))
    )
    _no_leftovers(data, "basis")
    return BasisSpec(lengths, modes, hbar, mass, spins)


def _parse_packet(name: str, section: object, basis: BasisSpec) -> PacketSpec:
    path = f"packets.{name}"
    data = dict(_require_map(section, path))
    spin = _as_int(_pop(data, "spin", path), f"{path}.spin")
    if spin not in basis.spins:
        raise ConfigError(f"{path}.spin: {spin} not in basis spin set")
    raw = _require_list(_pop(data, "amplitudes", path), f"{path}.amplitudes")
    if len(raw) != len(basis.modes):
        raise ConfigError(
            f"{path}.amplitudes: expected {len(basis.modes)} entries, got {len(raw)}"
        )
    amps = [_as_complex(v, f"{path}.amplitudes[{i}]") for i, v in enumerate(raw)]
    norm_sq = sum(abs(a) ** 2 for a in amps)
    off = abs(norm_sq - 1.0)
    if off > NORMALIZE_WARN_LIMIT:
        raise ConfigError(
            f"{path}.amplitudes: norm^2 = {norm_sq!r} is too far from 1"
        )
    if off > NORMALIZE_SILENT_LIMIT:
        warnings.warn(
            f"packet {name!r}: amplitudes renormalized (norm^2 was {norm_sq!r})"
        )
        scale = 1.0 / math.sqrt(norm_sq)
        amps = [a * scale for a in amps]
    _no_leftovers(data, path)
    return PacketSpec(spin, tuple(amps))


def _parse_medium(section: object) -> MediumSpec:
    data = dict(_require_map(section, "medium"))
    coupling = _as_complex(_pop(data, "coupling", "medium"), "medium.coupling")
    channels = []
    for i, raw in enumerate(data.pop("channels", []) or []):
        path = f"medium.channels[{i}]"
        ch = dict(_require_map(raw, path))
        channels.append(
            ChannelSpec(
                label=str(_pop(ch, "label", path)),
                element_in=_as_complex(_pop(ch, "element_in", path), f"{path}.element_in"),
                element_out=_as_complex(_pop(ch, "element_out", path), f"{path}.element_out"),
                energy=_as_float(_pop(ch, "energy", path), f"{path}.energy"),
            )
        )
        _no_leftovers(ch, path)
    first = data.pop("first_order_element", None)
    if first is not None:
        first = _as_complex(first, "medium.first_order_element")
    if first is None and not channels:
        raise ConfigError(
            "medium.first_order_element: required when no channels are given"
        )
    _no_leftovers(data, "medium")
    return MediumSpec(coupling, tuple(channels), first)


def _parse_scan(section: object, dim: int) -> tuple[tuple[float, ...], ...]:
    data = dict(_require_map(section, "scan"))
    has_positions = "positions" in data
    has_range = "range" in data
    if has_positions == has_range:
        raise ConfigError("scan: give exactly one of 'positions' or 'range'")
    if has_positions:
        raw = _require_list(data.pop("positions"), "scan.positions")
        positions = []
        for i, vec in enumerate(raw):
            vec_list = _require_list(vec, f"scan.positions[{i}]")
            if len(vec_list) != dim:
                raise ConfigError(
                    f"scan.positions[{i}]: expected {dim} coordinates"
                )
            positions.append(
                tuple(_as_float(c, f"scan.positions[{i}][{ax}]") for ax, c in enumerate(vec_list))
            )
        result = tuple(positions)
    else:
        rng = dict(_require_map(data.pop("range"), "scan.range"))
        start = [
            _as_float(v, f"scan.range.start[{i}]")
            for i, v in enumerate(_require_list(_pop(rng, "start", "scan.range"), "scan.range.start"))
        ]
        stop = [
            _as_float(v, f"scan.range.stop[{i}]")
            for i, v in enumerate(_require_list(_pop(rng, "stop", "scan.range"), "scan.range.stop"))
        ]
        count = _as_int(_pop(rng, "count", "scan.range"), "scan.range.count")
        _no_leftovers(rng, "scan.range")
        if len(start) != dim or len(stop) != dim:
            raise ConfigError(f"scan.range: start/stop must have {dim} coordinates")
        if count < 1:
            raise ConfigError("scan.range.count: must be at least 1")
        # endpoint excluded: the box is periodic, so stop == start + L would
        # duplicate the first point
        result = tuple(
            tuple(
                start[ax] + (stop[ax] - start[ax]) * k / count for ax in range(dim)
            )
            for k in range(count)
        )
    _no_leftovers(data, "scan")
    return result


def _parse_run(section: object, packets: dict[str, PacketSpec], basis: BasisSpec) -> RunSpec:
    data = dict(_require_map(section, "run"))
    order = _as_int(_pop(data, "order", "run"), "run.order")
    if order not in (1, 2):
        raise ConfigError(f"run.order: must be 1 or 2, got {order}")
    stats_name = data.pop("statistics", "bose")
    try:
        statistics = Statistics(stats_name)
    except ValueError as exc:
        raise ConfigError(
            f"run.statistics: expected 'bose' or 'fermi', got {stats_name!r}"
        ) from exc
    raw_names = _require_list(_pop(data, "packets", "run"), "run.packets")
    names = tuple(str(n) for n in raw_names)
    if len(names) != order:
        raise ConfigError(
            f"run.packets: order {order} needs exactly {order} packet name(s)"
        )
    for name in names:
        if name not in packets:
            raise ConfigError(f"run.packets: undefined packet {name!r}")
    detector_spin = _as_int(
        _pop(data, "detector_spin", "run"), "run.detector_spin"
    )
    if detector_spin not in basis.spins:
        raise ConfigError(
            f"run.detector_spin: {detector_spin} not in basis spin set"
        )
    _no_leftovers(data, "run")
    return RunSpec(order, statistics, names, detector_spin)


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate a YAML experiment config."""
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        if mark is not None:
            raise ConfigError(
                f"syntax error at line {mark.line + 1}, column {mark.column + 1}: {exc}"
            ) from exc
        raise ConfigError(f"syntax error: {exc}") from exc
    top = dict(_require_map(raw, "config"))
    for section in _SECTIONS:
        if section not in top:
            raise ConfigError(f"{section}: missing required section")
    extra = set(top) - set(_SECTIONS)
    if extra:
        raise ConfigError(f"{sorted(extra)[0]}: unknown section")
    basis = _parse_basis(top["basis"])
    packet_section = _require_map(top["packets"], "packets")
    if not packet_section:
        raise ConfigError("packets: at least one packet is required")
    packets = {
        str(name): _parse_packet(str(name), spec, basis)
        for name, spec in packet_section.items()
    }
    medium = _parse_medium(top["medium"])
    positions = _parse_scan(top["scan"], len(basis.box_lengths))
    run = _parse_run(top["run"], packets, basis)
    if run.order == 2 and not medium.channels:
        raise ConfigError("medium.channels: required for an order-2 run")
    return ExperimentConfig(basis, packets, medium, positions, run)


# --------------------------------------------------------------------------
# serialization
# --------------------------------------------------------------------------


def _complex_pair(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def serialize_config(config: ExperimentConfig) -> str:
    """Render a config back to YAML; parse_config inverts this exactly."""
    doc = {
        "basis": {
            "box_lengths": list(config.basis.box_lengths),
            "modes": [list(vec) for vec in config.basis.modes],
            "hbar": config.basis.hbar,
            "mass": config.basis.mass,
            "spins": list(config.basis.spins),
        },
        "packets": {
            name: {
                "spin": spec.spin,
                "amplitudes": [_complex_pair(a) for a in spec.amplitudes],
            }
            for name, spec in config.packets.items()
        },
        "medium": {
            "coupling": _complex_pair(config.medium.coupling),
            "channels": [
                {
                    "label": ch.label,
                    "element_in": _complex_pair(ch.element_in),
                    "element_out": _complex_pair(ch.element_out),
                    "energy": ch.energy,
                }
                for ch in config.medium.channels
            ],
        },
        "scan": {"positions": [list(p) for p in config.positions]},
        "run": {
            "order": config.run.order,
            "statistics": config.run.statistics.value,
            "packets": list(config.run.packet_names),
            "detector_spin": config.run.detector_spin,
        },
    }
    if config.medium.first_order_element is not None:
        doc["medium"]["first_order_element"] = _complex_pair(
            config.medium.first_order_element
        )
    return yaml.safe_dump(doc, sort_keys=False)


# --------------------------------------------------------------------------
# scan execution
# --------------------------------------------------------------------------


def build_basis(config: ExperimentConfig) -> ModeBasis:
    spec = config.basis
    return ModeBasis.from_mode_numbers(
        spec.box_lengths, spec.modes, spec.hbar, spec.mass, spec.spins
    )


def build_model(config: ExperimentConfig) -> MediumModel:
    spec = config.medium
    channels = tuple(
        MediumChannel(ch.label, ch.element_in, ch.element_out, ch.energy)
        for ch in spec.channels
    )
    return MediumModel(spec.coupling, channels, spec.first_order_element)


def build_packet(config: ExperimentConfig, name: str, basis: ModeBasis) -> Wavepacket:
    spec = config.packets[name]
    return Wavepacket(basis, spec.amplitudes, spec.spin)


def run_scan(config: ExperimentConfig) -> RateTable:
    """Evaluate the configured rates at every scan position, in order.

    Order-1 runs fill the order-2 and second-density columns with 0.  The
    forbidden same-state fermionic pair is rejected before any position is
    evaluated.
    """
    basis = build_basis(config)
    model = build_model(config)
    run = config.run
    packet_a = build_packet(config, run.packet_names[0], basis)
    pair = None
    if run.order == 2:
        packet_b = build_packet(config, run.packet_names[1], basis)
        pair = TwoParticleInput(packet_a, packet_b, run.detector_spin, run.statistics)
    rows = []
    for coords in config.positions:
        q = basis.position(coords)
        try:
            first = rate_first_order(packet_a, run.detector_spin, q, model)
            density_a = abs(position_amplitude(packet_a, q)) ** 2
            if pair is None:
                second_value = 0.0
                density_b = 0.0
            else:
                second_value = rate_second_order(pair, q, model).value
                density_b = abs(position_amplitude(pair.packet_b, q)) ** 2
        except ResonanceError as exc:
            raise ResonanceError(f"at position {q.coords}: {exc}") from exc
        rows.append(
            RateRow(q.coords, first.value, second_value, density_a, density_b)
        )
    return RateTable(basis.dim, tuple(rows))


def emit_csv(table: RateTable) -> str:
    """Deterministic CSV: 12 significant digits, fixed columns, LF newlines."""
    header = [f"q{i}" for i in range(table.dim)]
    header += ["rate_order1", "rate_order2", "density_a", "density_b"]
    lines = [",".join(header)]
    for row in table.rows:
        cells = [f"{c:.12g}" for c in row.position]
        cells += [
            f"{row.rate_order1:.12g}",
            f"{row.rate_order2:.12g}",
            f"{row.density_a:.12g}",
            f"{row.density_b:.12g}",
        ]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# command line
# --------------------------------------------------------------------------


def _load_config(path: str) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_config(handle.read())


def _cmd_scan(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    csv_text = emit_csv(run_scan(config))
    if args.out is None:
        sys.stdout.write(csv_text)
    else:
        with open(args.out, "w", encoding="utf-8", newline="") as handle:
            handle.write(csv_text)
    return 0


def _cmd_verify(args: argparse.Namespace) -> int:
    report = verify_closed_forms(args.trials, tolerance=args.tol, seed=args.seed)
    for line in report.lines():
        print(line)
    return 0 if report.ok else 1


def _cmd_exponent(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    basis = build_basis(config)
    model = build_model(config)
    run = config.run
    positions = [basis.position(c) for c in config.positions]
    packet_a = build_packet(config, run.packet_names[0], basis)
    if run.order == 2:
        packet_b = build_packet(config, run.packet_names[1], basis)
        pair = TwoParticleInput(packet_a, packet_b, run.detector_spin, run.statistics)
        value = proportionality_exponent(pair, model, positions)
    else:
        rates = [
            rate_first_order(packet_a, run.detector_spin, q, model).value
            for q in positions
        ]
        densities = [abs(position_amplitude(packet_a, q)) ** 2 for q in positions]
        value = log_log_slope(densities, rates)
    print(f"order={run.order} exponent={value:.9f}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="fockabs",
        description="Absorption rates for massive-particle beams",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    scan = sub.add_parser("scan", help="evaluate rates over scan positions")
    scan.add_argument("--config", required=True, help="path to a YAML config")
    scan.add_argument("--out", default=None, help="CSV output path (default stdout)")
    scan.set_defaults(func=_cmd_scan)

    verify = sub.add_parser(
        "verify", help="compare closed forms against brute-force enumeration"
    )
    verify.add_argument("--trials", type=int, default=100)
    verify.add_argument("--seed", type=int, default=0)
    verify.add_argument("--tol", type=float, default=1e-10)
    verify.set_defaults(func=_cmd_verify)

    exponent = sub.add_parser(
        "exponent", help="fit the rate-versus-density exponent for a config"
    )
    exponent.add_argument("--config", required=True, help="path to a YAML config")
    exponent.set_defaults(func=_cmd_exponent)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
