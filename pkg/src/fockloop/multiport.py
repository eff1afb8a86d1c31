"""Mode-mixing matrices for networks built from the two kinds of coupler.

A network coupling p amplified modes against q conjugated ones acts on the
mixed ladder vector (a_1 .. a_p, a_{p+1}^+ .. a_N^+) by the matrix exp(iGH),
where H is Hermitian and G carries the signature of the split.  Such matrices
preserve G rather than the identity, which is the network-level form of the
single-coupler constraints.  The module builds them, checks the invariant,
and reduces the four-angle couplers to their 2x2 network form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .couplers import AMPLIFIER, CouplerAngles

_HERMITIAN_TOL = 1e-12


@dataclass(frozen=True)
class ModePartition:
    """Split of a mode set into p plain and q conjugated modes."""

    plain: int
    conjugated: int

    def __post_init__(self) -> None:
        if self.plain < 0 or self.conjugated < 0 or self.size == 0:
            raise ValueError("partition needs a nonnegative split of at least one mode")

    @property
    def size(self) -> int:
        return self.plain + self.conjugated

    def metric(self) -> np.ndarray:
        return np.diag(
            np.concatenate(
                (np.ones(self.plain), -np.ones(self.conjugated))
            ).astype(complex)
        )


def coupling_matrix(hermitian: np.ndarray, partition: ModePartition) -> np.ndarray:
    """exp(iGH) for Hermitian H: the ladder-vector action of the network."""
    h = np.asarray(hermitian, dtype=complex)
    n = partition.size
    if h.shape != (n, n):
        raise ValueError(f"generator must be {n}x{n} for this partition")
    scale = 1.0 + float(np.max(np.abs(h)))
    if float(np.max(np.abs(h - h.conj().T))) > _HERMITIAN_TOL * scale:
        raise ValueError("generator must be Hermitian")
    return expm(1j * partition.metric() @ h)


def metric_deviation(matrix: np.ndarray, partition: ModePartition) -> float:
    """Largest entry of M G M+ - G; zero for an exact network matrix."""
    m = np.asarray(matrix, dtype=complex)
    g = partition.metric()
    return float(np.max(np.abs(m @ g @ m.conj().T - g)))


def random_hermitian(size: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    """Random Hermitian matrix with entries of the given scale, for sampling
    network draws."""
    raw = rng.normal(size=(size, size)) + 1j * rng.normal(size=(size, size))
    return scale * 0.5 * (raw + raw.conj().T)


def two_mode_coupling(angles: CouplerAngles) -> tuple[np.ndarray, ModePartition]:
    """Reduce a four-angle coupler to its 2x2 network generator.

    exp(iGH) of the returned pair reproduces the coupler's ladder matrix,
    including the overall phase, with the pair-producing coupler on the
    mixed (1,1) split and the converting coupler on the plain (2,0) one.
    """
    a0, a1, a2, a3 = angles.angles
    off = 0.5 * (a1 - 1j * a2)
    if angles.kind == AMPLIFIER:
        h = np.array(
            [[0.5 * (a0 + a3), off], [np.conj(off), 0.5 * (a3 - a0)]], dtype=complex
        )
        return h, ModePartition(1, 1)
    h = np.array(
        [[0.5 * (a0 + a3), off], [np.conj(off), 0.5 * (a0 - a3)]], dtype=complex
    )
    return h, ModePartition(2, 0)
