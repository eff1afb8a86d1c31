"""Network matrices: signature-preserving exponentials and 2x2 reductions."""

import math

import numpy as np
import pytest

from fockloop import (
    AMPLIFIER,
    CONVERTER,
    ModePartition,
    coupling_matrix,
    heisenberg_matrix,
    metric_deviation,
    params_from_angles,
    random_hermitian,
    two_mode_coupling,
)

from conftest import random_angles


def test_partition_validation_and_metric():
    part = ModePartition(2, 1)
    assert part.size == 3
    assert np.array_equal(np.diag(part.metric()), [1.0, 1.0, -1.0])
    with pytest.raises(ValueError):
        ModePartition(-1, 2)
    with pytest.raises(ValueError):
        ModePartition(0, 0)


def test_zero_generator_gives_identity():
    part = ModePartition(2, 2)
    mat = coupling_matrix(np.zeros((4, 4)), part)
    assert np.max(np.abs(mat - np.eye(4))) < 1e-14


def test_generator_must_be_hermitian_and_sized():
    part = ModePartition(1, 1)
    with pytest.raises(ValueError):
        coupling_matrix(np.array([[0.0, 1.0], [0.5, 0.0]]), part)
    with pytest.raises(ValueError):
        coupling_matrix(np.zeros((3, 3)), part)


def test_plain_partition_gives_unitary(rng):
    part = ModePartition(2, 0)
    mat = coupling_matrix(random_hermitian(2, rng), part)
    assert np.max(np.abs(mat @ mat.conj().T - np.eye(2))) < 1e-12


def test_mixed_two_mode_block_structure():
    h = 0.7 * np.exp(0.3j)
    gen = np.array([[0.0, h], [np.conj(h), 0.0]])
    mat = coupling_matrix(gen, ModePartition(1, 1))
    assert mat[0, 0] == pytest.approx(math.cosh(abs(h)), abs=1e-12)
    assert mat[1, 1] == pytest.approx(math.cosh(abs(h)), abs=1e-12)
    assert abs(mat[0, 1]) == pytest.approx(math.sinh(abs(h)), abs=1e-12)
    assert metric_deviation(mat, ModePartition(1, 1)) < 1e-12


@pytest.mark.parametrize("plain,conjugated", [(1, 1), (2, 1), (3, 3), (2, 0), (0, 1)])
def test_metric_preserved_for_random_networks(rng, plain, conjugated):
    part = ModePartition(plain, conjugated)
    for _ in range(10):
        mat = coupling_matrix(random_hermitian(part.size, rng), part)
        assert metric_deviation(mat, part) < 1e-10


def test_metric_deviation_landmarks(rng):
    part = ModePartition(2, 2)
    assert metric_deviation(np.eye(4), part) == 0.0
    scrambled = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    assert metric_deviation(scrambled, part) > 0.1


def test_group_closure(rng):
    part = ModePartition(2, 2)
    first = coupling_matrix(random_hermitian(4, rng), part)
    second = coupling_matrix(random_hermitian(4, rng), part)
    assert metric_deviation(first @ second, part) < 1e-9


def test_random_hermitian_is_hermitian(rng):
    h = random_hermitian(5, rng, scale=2.0)
    assert np.max(np.abs(h - h.conj().T)) == 0.0


@pytest.mark.parametrize("kind", [AMPLIFIER, CONVERTER])
def test_coupler_reduces_to_network_matrix(rng, kind):
    for _ in range(10):
        angles = random_angles(rng, kind, 1.0)
        gen, part = two_mode_coupling(angles)
        if kind == AMPLIFIER:
            assert (part.plain, part.conjugated) == (1, 1)
        else:
            assert (part.plain, part.conjugated) == (2, 0)
        want = heisenberg_matrix(params_from_angles(angles))
        got = coupling_matrix(gen, part)
        assert np.max(np.abs(got - want)) < 1e-9
