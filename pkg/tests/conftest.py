"""Shared oracles and draw helpers.

Every oracle here is deliberately independent of the implementation route it
checks: the matrix exponential is a scaled Taylor series (no
eigendecomposition), s-ordering is done by brute-force operator products and
permutation averages, and the detection probability is an explicitly
truncated double sum with a tail bound.
"""

from __future__ import annotations

import itertools
import math

import numpy as np
import pytest

from fockloop import (
    AMPLIFIER,
    CONVERTER,
    CouplerAngles,
    CouplerParams,
)
from fockloop.fock import ANNIHILATION, CREATION, ladder


def series_expi(h: np.ndarray, steps: int = 40) -> np.ndarray:
    """exp(iH) by scaling and squaring a plain Taylor series."""
    h = np.asarray(h, dtype=complex)
    norm = np.linalg.norm(h, ord=np.inf)
    squarings = max(0, int(math.ceil(math.log2(max(norm, 1e-30)))) + 1)
    x = 1j * h / (2**squarings)
    out = np.eye(h.shape[0], dtype=complex)
    term = np.eye(h.shape[0], dtype=complex)
    for k in range(1, steps + 1):
        term = term @ x / k
        out = out + term
    for _ in range(squarings):
        out = out @ out
    return out


def brute_ordered_monomial(m: int, n: int, s: float, cutoff: int) -> np.ndarray:
    """s-ordered ladder monomial at the landmark orderings, from scratch.

    s = 1 is the plain normal product, s = -1 the antinormal one, and s = 0
    the average over all distinct interleavings of the ladder factors.
    """
    cr = ladder(CREATION, cutoff).entries
    an = ladder(ANNIHILATION, cutoff).entries
    if s == 1.0:
        return np.linalg.matrix_power(cr, m) @ np.linalg.matrix_power(an, n)
    if s == -1.0:
        return np.linalg.matrix_power(an, n) @ np.linalg.matrix_power(cr, m)
    if s == 0.0:
        words = set(itertools.permutations("c" * m + "a" * n))
        acc = np.zeros((cutoff, cutoff), dtype=complex)
        for word in words:
            prod = np.eye(cutoff, dtype=complex)
            for letter in word:
                prod = prod @ (cr if letter == "c" else an)
            acc += prod
        return acc / len(words)
    raise ValueError(f"no brute-force construction for s = {s}")


def brute_bilinear_matrix(creation_coeffs, annihilation_coeffs, s: float,
                          cutoff: int) -> np.ndarray:
    """Brute-force counterpart of s_ordered_bilinear, evaluated as a matrix."""
    avec = np.asarray(creation_coeffs, dtype=complex)
    bvec = np.asarray(annihilation_coeffs, dtype=complex)
    out = np.zeros((cutoff, cutoff), dtype=complex)
    for m, am in enumerate(avec):
        for n, bn in enumerate(bvec):
            if am == 0 or bn == 0:
                continue
            out += am * bn * brute_ordered_monomial(m, n, s, cutoff)
    return out


def detection_double_sum(probs: np.ndarray, r2: float, eta_d: float, k: int,
                         extra: int = 4000) -> float:
    """Detection probability as the raw double sum over the amplified photon
    number, truncated far beyond the support with a geometric tail bound."""
    z = 1.0 / (1.0 + r2)
    total = 0.0
    for low, p_low in enumerate(probs):
        if p_low == 0:
            continue
        acc = 0.0
        for m in range(low + k, low + k + extra):
            gain = math.comb(m, low) * (z ** (low + 1)) * ((1.0 - z) ** (m - low))
            click = (
                math.comb(m - low, k)
                * (eta_d**k)
                * ((1.0 - eta_d) ** (m - low - k))
                if m - low >= k
                else 0.0
            )
            acc += gain * click
        total += float(p_low) * acc
    return total


def random_angles(rng: np.random.Generator, kind: str, scale: float) -> CouplerAngles:
    return CouplerAngles(kind, tuple(rng.uniform(-scale, scale, size=4)))


def random_params(rng: np.random.Generator, kind: str, r2_max: float,
                  r2_min: float = 0.0) -> CouplerParams:
    """Draw magnitudes satisfying the constraint exactly, phases uniformly.

    A nonzero floor keeps 1/R-sized displacement arguments bounded in tests
    that exercise the displaced operators.
    """
    r2 = rng.uniform(r2_min, r2_max)
    ph_t, ph_r, ph_p = np.exp(1j * rng.uniform(-np.pi, np.pi, size=3))
    if kind == AMPLIFIER:
        trans = math.sqrt(1.0 + r2) * ph_t
    else:
        trans = math.sqrt(1.0 - r2) * ph_t
    return CouplerParams.from_values(kind, trans, math.sqrt(r2) * ph_r, ph_p)


def interior_mask(d1: int, d2: int) -> np.ndarray:
    """Flattened-joint-index mask for total photon number <= min(d1, d2)/2."""
    n1 = np.arange(d1)[:, None]
    n2 = np.arange(d2)[None, :]
    return ((n1 + n2) <= min(d1, d2) // 2).ravel()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260814)


BOTH_KINDS = pytest.mark.parametrize("kind", [AMPLIFIER, CONVERTER])
