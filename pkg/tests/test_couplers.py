"""Two-mode coupler algebra: parameterization, factored unitaries, oracles."""

import math

import numpy as np
import pytest

from fockloop import (
    AMPLIFIER,
    CONVERTER,
    CouplerAngles,
    CouplerParams,
    TruncationError,
    hamiltonian_oracle,
    inverse_params,
    params_from_angles,
    swap_modes,
    two_mode_unitary,
)
from fockloop.couplers import (
    displacement_from_pump,
    displacement_transport,
    generator_matrices,
    heisenberg_matrix,
)
from fockloop.fock import NUMBER, OperatorMatrix, TwoModeOperator, displacement_matrix, ladder

from conftest import BOTH_KINDS, interior_mask, random_angles, random_params


def constraint_residual(p: CouplerParams) -> float:
    sign = -1.0 if p.kind == AMPLIFIER else 1.0
    return abs(abs(p.trans) ** 2 + sign * abs(p.refl) ** 2 - 1.0)


@BOTH_KINDS
def test_zero_angles_give_identity_params(kind):
    p = params_from_angles(CouplerAngles(kind, (0.0, 0.0, 0.0, 0.0)))
    assert p.trans == pytest.approx(1.0)
    assert p.refl == pytest.approx(0.0)
    assert p.phase == pytest.approx(1.0)


def test_amplifier_pure_squeeze_angles():
    theta = 0.35
    p = params_from_angles(CouplerAngles(AMPLIFIER, (0.0, 0.0, 2 * theta, 0.0)))
    assert p.trans == pytest.approx(math.cosh(theta), abs=1e-14)
    assert p.refl == pytest.approx(-math.sinh(theta), abs=1e-14)
    assert p.phase == pytest.approx(1.0)


def test_converter_full_conversion_angles():
    p = params_from_angles(CouplerAngles(CONVERTER, (0.0, math.pi, 0.0, 0.0)))
    assert abs(p.trans) < 1e-15
    assert p.refl == pytest.approx(1j, abs=1e-15)


def test_amplifier_imaginary_angle_branch():
    # phi1^2 + phi2^2 < phi3^2 makes phi imaginary; the continuation stays real-analytic
    p = params_from_angles(CouplerAngles(AMPLIFIER, (0.4, 0.1, 0.2, 0.9)))
    assert constraint_residual(p) < 1e-12
    assert abs(abs(p.phase) - 1.0) < 1e-12


def test_amplifier_zero_angle_series_limit():
    # phi1^2 + phi2^2 = phi3^2 exactly: sinh(phi/2)/phi -> 1/2
    p = params_from_angles(CouplerAngles(AMPLIFIER, (0.0, 0.3, 0.4, 0.5)))
    assert p.trans == pytest.approx(1.0 + 0.25j, abs=1e-14)
    assert p.refl == pytest.approx(-(0.4 + 0.3j) / 2.0, abs=1e-14)


@BOTH_KINDS
def test_constraints_hold_over_random_angles(kind, rng):
    for scale in (0.3, 1.0, 3.0):
        for _ in range(70):
            p = params_from_angles(random_angles(rng, kind, scale))
            assert constraint_residual(p) < 1e-12
            assert abs(abs(p.phase) - 1.0) < 1e-12


def test_from_values_rejects_broken_constraint():
    with pytest.raises(ValueError):
        CouplerParams.from_values(AMPLIFIER, 1.2, 0.1, 1.0)
    with pytest.raises(ValueError):
        CouplerParams.from_values(CONVERTER, 0.8, 0.6001, 1.0)
    with pytest.raises(ValueError):
        CouplerParams.from_values(CONVERTER, 0.8, 0.6, 1.1)


def test_ordering_parameter():
    p = CouplerParams.from_values(AMPLIFIER, math.sqrt(1.5), math.sqrt(0.5), 1.0)
    assert p.ordering == pytest.approx((1.5 + 1.0) / 0.5)
    q = CouplerParams.from_values(CONVERTER, math.sqrt(0.8), math.sqrt(0.2), 1.0)
    assert q.ordering == pytest.approx(1.8 / 0.2)
    assert math.isinf(CouplerParams.identity(CONVERTER).ordering)


def test_direct_source_trans_bar_defaults_to_trans():
    p = CouplerParams.from_values(AMPLIFIER, math.sqrt(2.0) * 1j, 1.0, 1.0)
    assert p.trans_bar == p.trans
    assert p.source == "direct"


@BOTH_KINDS
def test_heisenberg_identity(kind):
    assert np.allclose(heisenberg_matrix(CouplerParams.identity(kind)), np.eye(2))


def test_heisenberg_metric_over_thousand_draws(rng):
    g = np.diag([1.0, -1.0])
    for _ in range(500):
        m = heisenberg_matrix(random_params(rng, AMPLIFIER, r2_max=4.0))
        assert np.max(np.abs(m @ g @ m.conj().T - g)) < 1e-12
    for _ in range(500):
        m = heisenberg_matrix(random_params(rng, CONVERTER, r2_max=1.0))
        assert np.max(np.abs(m @ m.conj().T - np.eye(2))) < 1e-12


@BOTH_KINDS
def test_inverse_params_matrix_level(kind, rng):
    for _ in range(50):
        p = random_params(rng, kind, r2_max=0.9)
        prod = heisenberg_matrix(inverse_params(p)) @ heisenberg_matrix(p)
        assert np.max(np.abs(prod - np.eye(2))) < 1e-12
        q = inverse_params(inverse_params(p))
        assert (q.trans, q.refl, q.phase) == (p.trans, p.refl, p.phase)


@BOTH_KINDS
def test_swap_modes_matrix_level(kind, rng):
    # swapping twice restores the original matrix
    for _ in range(50):
        p = random_params(rng, kind, r2_max=0.9)
        q = swap_modes(swap_modes(p))
        assert np.max(np.abs(heisenberg_matrix(q) - heisenberg_matrix(p))) < 1e-12


@BOTH_KINDS
def test_swap_modes_truncated_unitary(kind, rng):
    d = 12
    perm = np.arange(d * d).reshape(d, d).T.ravel()
    for _ in range(5):
        p = random_params(rng, kind, r2_max=0.02)
        u = two_mode_unitary(p, d, d).entries
        v = two_mode_unitary(swap_modes(p), d, d).entries
        swapped = u[np.ix_(perm, perm)]
        mask = interior_mask(d, d)
        ix = np.ix_(mask, mask)
        assert np.max(np.abs(v[ix] - swapped[ix])) < 1e-9


@BOTH_KINDS
def test_inverse_truncated_unitary(kind, rng):
    d = 12
    mask = interior_mask(d, d)
    ix = np.ix_(mask, mask)
    for _ in range(5):
        p = random_params(rng, kind, r2_max=0.005)
        u = two_mode_unitary(p, d, d).entries
        v = two_mode_unitary(inverse_params(p), d, d).entries
        assert np.max(np.abs((v @ u)[ix] - np.eye(d * d)[ix])) < 1e-8


@BOTH_KINDS
def test_factored_identity_params(kind):
    u = two_mode_unitary(CouplerParams.identity(kind), 6, 6)
    assert np.max(np.abs(u.entries - np.eye(36))) < 1e-12


@BOTH_KINDS
def test_conservation_commutator(kind, rng):
    d = 14
    sign = -1.0 if kind == AMPLIFIER else 1.0
    n_op = ladder(NUMBER, d)
    charge = TwoModeOperator.tensor(n_op, OperatorMatrix.identity(d)).entries
    charge = charge + sign * TwoModeOperator.tensor(OperatorMatrix.identity(d), n_op).entries
    mask = interior_mask(d, d)
    ix = np.ix_(mask, mask)
    for _ in range(5):
        u = two_mode_unitary(random_params(rng, kind, r2_max=0.4), d, d,
                             interior_guard=None).entries
        comm = u @ charge - charge @ u
        assert np.max(np.abs(comm[ix])) < 1e-10


def test_squeezed_vacuum_overlap(rng):
    for _ in range(10):
        p = random_params(rng, AMPLIFIER, r2_max=0.5)
        u = two_mode_unitary(p, 20, 20, interior_guard=None)
        assert abs(u.entries[0, 0]) == pytest.approx(1.0 / abs(p.trans), abs=1e-9)


def test_truncation_guard_trips_on_strong_squeezing():
    p = CouplerParams.from_values(AMPLIFIER, math.sqrt(3.0), math.sqrt(2.0), 1.0)
    with pytest.raises(TruncationError):
        two_mode_unitary(p, 8, 8)
    u = two_mode_unitary(p, 8, 8, interior_guard=None)
    assert np.max(u.col_deficit) > 1e-6


def test_col_deficit_reported_small_for_weak_coupling():
    p = CouplerParams.from_values(AMPLIFIER, math.sqrt(1.01), 0.1, 1.0)
    u = two_mode_unitary(p, 16, 16)
    mask = interior_mask(16, 16)
    assert np.max(u.col_deficit[mask]) < 1e-6


@BOTH_KINDS
def test_oracle_zero_angles_identity(kind):
    u = hamiltonian_oracle(CouplerAngles(kind, (0.0, 0.0, 0.0, 0.0)), 6, 6)
    assert np.max(np.abs(u.entries - np.eye(36))) < 1e-14


@BOTH_KINDS
def test_factored_matches_hamiltonian_oracle(kind):
    d = 24
    rng = np.random.default_rng(2)
    mask = interior_mask(d, d)
    ix = np.ix_(mask, mask)
    for _ in range(20):
        a = random_angles(rng, kind, 0.8)
        factored = two_mode_unitary(params_from_angles(a), d, d,
                                    interior_guard=None).entries
        oracle = hamiltonian_oracle(a, d, d).entries
        assert np.max(np.abs(factored[ix] - oracle[ix])) < 1e-8


@BOTH_KINDS
def test_generator_algebra(kind):
    d = 12
    sign = -1.0 if kind == AMPLIFIER else 1.0
    g = generator_matrices(CouplerAngles(kind, (0.0, 0.0, 0.0, 0.0)), d, d)
    mask = interior_mask(d, d)
    ix = np.ix_(mask, mask)

    def comm(i, j):
        return (g[i] @ g[j] - g[j] @ g[i])[ix]

    assert np.max(np.abs(comm(1, 2) - sign * 1j * g[3][ix])) < 1e-10
    assert np.max(np.abs(comm(2, 3) - 1j * g[1][ix])) < 1e-10
    assert np.max(np.abs(comm(3, 1) - 1j * g[2][ix])) < 1e-10
    for j in (1, 2, 3):
        assert np.max(np.abs(comm(0, j))) < 1e-10


@BOTH_KINDS
def test_displacement_transport_identity_and_zero(kind):
    ident = CouplerParams.identity(kind)
    assert displacement_transport(ident, 0.3 + 0.1j, -0.2j) == (0.3 + 0.1j, -0.2j)
    p = CouplerParams.from_values(
        kind, math.sqrt(1.25) if kind == AMPLIFIER else math.sqrt(0.75), 0.5, 1j
    )
    assert displacement_transport(p, 0.0, 0.0) == (0.0, 0.0)


@BOTH_KINDS
def test_displacement_transport_conjugation_oracle(kind, rng):
    d = 20
    mask = interior_mask(d, d)
    ix = np.ix_(mask, mask)
    for _ in range(5):
        p = random_params(rng, kind, r2_max=0.05)
        alpha = 0.3 * (rng.normal() + 1j * rng.normal())
        beta = 0.3 * (rng.normal() + 1j * rng.normal())
        ap, bp = displacement_transport(p, alpha, beta)
        u = two_mode_unitary(p, d, d, interior_guard=None).entries
        disp = TwoModeOperator.tensor(
            displacement_matrix(alpha, d), displacement_matrix(beta, d)
        ).entries
        disp_prime = TwoModeOperator.tensor(
            displacement_matrix(ap, d), displacement_matrix(bp, d)
        ).entries
        got = u @ disp @ u.conj().T
        assert np.max(np.abs(got[ix] - disp_prime[ix])) < 1e-8


def test_displacement_from_pump_landmarks():
    assert displacement_from_pump(1.0, 1.0, 1.0, 1.0, 0.0) == 0.0
    assert displacement_from_pump(1.0, 1.0, 1.0, 1.0, 2 * math.pi) == pytest.approx(
        0.0, abs=1e-15
    )
    assert displacement_from_pump(1.0, 1.0, 1.0, 1.0, math.pi) == pytest.approx(
        2.0, abs=1e-15
    )
    with pytest.raises(ValueError):
        displacement_from_pump(1.0, 1.0, 1.0, 0.0, 1.0)
