"""Mode basis, wavepackets, and the position-space field operator."""

import math

import numpy as np
import pytest

from fockabs import (
    ModeBasis,
    Statistics,
    Wavepacket,
    apply_packet_creation,
    field_annihilate,
    inner_product,
    mean_kinetic_energy,
    mode_wavefunction,
    overlap,
    packet_state,
    position_amplitude,
    two_particle_state,
    uniform_grid,
    vacuum,
)

BOSE = Statistics.BOSE
FERMI = Statistics.FERMI
TWO_PI = 2 * math.pi


def cos_basis():
    # modes n = 0, 1, -1 on an L = 2*pi box
    return ModeBasis.lowest_modes_1d(3, TWO_PI)


def random_packet(rng, basis, spin=0):
    raw = rng.normal(size=basis.n_modes) + 1j * rng.normal(size=basis.n_modes)
    raw /= np.linalg.norm(raw)
    return Wavepacket(basis, tuple(raw), spin)


def test_basis_geometry():
    basis = cos_basis()
    assert basis.dim == 1
    assert basis.n_modes == 3
    assert abs(basis.volume - TWO_PI) < 1e-15
    # 0, +1, -1 ordering with p = n on the unit-hbar 2*pi box
    assert basis.momenta[0] == (0.0,)
    assert abs(basis.momenta[1][0] - 1.0) < 1e-15
    assert abs(basis.momenta[2][0] + 1.0) < 1e-15


def test_kinetic_energy_is_p_squared_over_2m():
    basis = ModeBasis.from_mode_numbers([TWO_PI], [[0], [2]], mass=0.5)
    assert basis.kinetic_energy(0) == 0.0
    assert abs(basis.kinetic_energy(1) - 4.0) < 1e-12


def test_basis_rejects_duplicate_momenta():
    with pytest.raises(ValueError):
        ModeBasis.from_mode_numbers([TWO_PI], [[1], [1]])


def test_basis_rejects_off_grid_momenta():
    with pytest.raises(ValueError):
        ModeBasis((TWO_PI,), ((0.5,),))


def test_basis_rejects_bad_shapes():
    with pytest.raises(ValueError):
        ModeBasis.from_mode_numbers([], [])
    with pytest.raises(ValueError):
        ModeBasis.from_mode_numbers([-1.0], [[0]])
    with pytest.raises(ValueError):
        ModeBasis.from_mode_numbers([TWO_PI], [[0]], spins=())


def test_position_wraps_into_box():
    basis = cos_basis()
    assert abs(basis.position((TWO_PI + 0.5,)).coords[0] - 0.5) < 1e-12
    assert abs(basis.position((-0.5,)).coords[0] - (TWO_PI - 0.5)) < 1e-12


def test_mode_wavefunction_frozen_values():
    basis = cos_basis()
    q0 = basis.position((1.7,))
    flat = mode_wavefunction(basis, 0, q0)
    assert abs(flat - 1 / math.sqrt(TWO_PI)) < 1e-15

    q_pi = basis.position((math.pi,))
    moving = mode_wavefunction(basis, 1, q_pi)
    assert abs(moving - (-1 / math.sqrt(TWO_PI))) < 1e-15


def test_mode_wavefunction_box_normalized_everywhere():
    basis = cos_basis()
    rng = np.random.default_rng(0)
    for _ in range(20):
        q = basis.position((float(rng.uniform(0, TWO_PI)),))
        for i in range(basis.n_modes):
            assert abs(abs(mode_wavefunction(basis, i, q)) ** 2 * basis.volume - 1.0) < 1e-12


def test_mode_wavefunction_index_error():
    with pytest.raises(IndexError):
        mode_wavefunction(cos_basis(), 3, cos_basis().position((0.0,)))


def test_cos_packet_amplitude():
    basis = cos_basis()
    w = 1 / math.sqrt(2)
    pkt = Wavepacket(basis, (0.0, w, w), 0)
    at0 = position_amplitude(pkt, basis.position((0.0,)))
    assert abs(at0 - 1 / math.sqrt(math.pi)) < 1e-12
    # node of cos at pi/2
    node = position_amplitude(pkt, basis.position((math.pi / 2,)))
    assert abs(node) < 1e-15
    probe = position_amplitude(pkt, basis.position((1.1,)))
    assert abs(probe - math.cos(1.1) / math.sqrt(math.pi)) < 1e-12


def test_single_mode_density_is_flat():
    basis = cos_basis()
    pkt = Wavepacket(basis, (0.0, 1.0, 0.0), 1)
    rng = np.random.default_rng(1)
    for _ in range(10):
        q = basis.position((float(rng.uniform(0, TWO_PI)),))
        assert abs(abs(position_amplitude(pkt, q)) ** 2 - 1 / basis.volume) < 1e-14


def test_density_quadrature_is_one():
    basis = cos_basis()
    rng = np.random.default_rng(2)
    positions, weight = uniform_grid(basis, 1024)
    for _ in range(5):
        pkt = random_packet(rng, basis)
        total = sum(abs(position_amplitude(pkt, q)) ** 2 for q in positions) * weight
        assert abs(total - 1.0) < 1e-8


def test_plane_wave_orthonormality_quadrature():
    basis = ModeBasis.from_mode_numbers([4.0], [[0], [1], [-1], [2], [-2], [3]])
    positions, weight = uniform_grid(basis, 64)
    for i in range(basis.n_modes):
        for j in range(basis.n_modes):
            acc = sum(
                mode_wavefunction(basis, i, q).conjugate()
                * mode_wavefunction(basis, j, q)
                for q in positions
            ) * weight
            want = 1.0 if i == j else 0.0
            assert abs(acc - want) < 1e-8


def test_uniform_grid_covers_volume():
    basis = cos_basis()
    positions, weight = uniform_grid(basis, 32)
    assert len(positions) == 32
    assert abs(weight * len(positions) - basis.volume) < 1e-12


def test_overlap_values():
    basis = ModeBasis.from_mode_numbers([TWO_PI], [[0], [1]])
    w = 1 / math.sqrt(2)
    f = Wavepacket(basis, (w, w), 0)
    g = Wavepacket(basis, (w, -w), 0)
    assert abs(overlap(f, f) - 1.0) < 1e-15
    assert abs(overlap(f, g)) < 1e-15
    sharp_a = Wavepacket(basis, (1.0, 0.0), 0)
    sharp_b = Wavepacket(basis, (0.0, 1.0), 0)
    assert overlap(sharp_a, sharp_b) == 0.0


def test_overlap_requires_same_basis():
    f = Wavepacket(cos_basis(), (1.0, 0.0, 0.0), 0)
    g = Wavepacket(ModeBasis.lowest_modes_1d(3, 4.0), (1.0, 0.0, 0.0), 0)
    with pytest.raises(ValueError):
        overlap(f, g)


def test_overlap_cauchy_schwarz():
    rng = np.random.default_rng(4)
    basis = cos_basis()
    for _ in range(20):
        f = random_packet(rng, basis)
        g = random_packet(rng, basis)
        assert abs(overlap(f, g)) <= 1.0 + 1e-12
        assert abs(overlap(f, f) - 1.0) < 1e-12


def test_wavepacket_normalization_gate():
    basis = ModeBasis.from_mode_numbers([TWO_PI], [[0], [1]])
    ok = math.sqrt(0.5 + 5e-12)
    Wavepacket(basis, (ok, math.sqrt(0.5)), 0)
    with pytest.raises(ValueError):
        Wavepacket(basis, (1.0, 0.1), 0)


def test_wavepacket_spin_must_be_declared():
    basis = cos_basis()
    with pytest.raises(ValueError):
        Wavepacket(basis, (1.0, 0.0, 0.0), 7)


def test_mean_kinetic_energy_values():
    basis = cos_basis()
    assert mean_kinetic_energy(Wavepacket(basis, (1.0, 0.0, 0.0), 0)) == 0.0
    w = 1 / math.sqrt(2)
    assert abs(mean_kinetic_energy(Wavepacket(basis, (0.0, w, w), 0)) - 0.5) < 1e-12
    assert abs(mean_kinetic_energy(Wavepacket(basis, (0.0, 1.0, 0.0), 0)) - 0.5) < 1e-12


def test_packet_state_norm_and_sharp_case():
    rng = np.random.default_rng(6)
    basis = cos_basis()
    sharp = packet_state(Wavepacket(basis, (0.0, 1.0, 0.0), 0), BOSE)
    assert len(sharp.terms) == 1
    assert abs(next(iter(sharp.terms.values())) - 1.0) < 1e-15
    for stats in (BOSE, FERMI):
        for _ in range(10):
            state = packet_state(random_packet(rng, basis), stats)
            assert abs(state.norm() - 1.0) < 1e-12


def test_two_particle_fermi_same_packet_is_zero():
    basis = cos_basis()
    pkt = Wavepacket(basis, (0.0, 1.0, 0.0), 0)
    assert two_particle_state(pkt, pkt, FERMI).is_zero()
    assert not two_particle_state(pkt, pkt, BOSE).is_zero()


def test_field_annihilate_kills_vacuum():
    basis = cos_basis()
    q = basis.position((0.3,))
    assert field_annihilate(vacuum(BOSE), basis, q, 0).is_zero()


def test_field_annihilate_rejects_unknown_spin():
    basis = cos_basis()
    with pytest.raises(ValueError):
        field_annihilate(vacuum(BOSE), basis, basis.position((0.0,)), 9)


def test_vacuum_projection_recovers_wavefunction():
    # <0| field(Q) |1_f> = psi_f(Q) at the packet spin, 0 at the other
    rng = np.random.default_rng(8)
    basis = cos_basis()
    for stats in (BOSE, FERMI):
        for _ in range(20):
            pkt = random_packet(rng, basis, spin=0)
            state = packet_state(pkt, stats)
            q = basis.position((float(rng.uniform(0, TWO_PI)),))
            proj = inner_product(
                vacuum(stats), field_annihilate(state, basis, q, 0)
            )
            assert abs(proj - position_amplitude(pkt, q)) < 1e-12
            crossed = inner_product(
                vacuum(stats), field_annihilate(state, basis, q, 1)
            )
            assert crossed == 0.0


def test_apply_packet_creation_matches_packet_state():
    rng = np.random.default_rng(10)
    basis = cos_basis()
    pkt = random_packet(rng, basis)
    built = apply_packet_creation(vacuum(BOSE), pkt)
    direct = packet_state(pkt, BOSE)
    keys = set(built.terms) | set(direct.terms)
    assert all(abs(built.terms.get(k, 0) - direct.terms.get(k, 0)) < 1e-12 for k in keys)
