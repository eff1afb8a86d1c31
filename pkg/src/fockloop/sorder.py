"""Conversion of s-ordered ladder monomials into normal-ordered polynomials.

The one-parameter ordering family interpolates normal (s = 1), symmetric
(s = 0), and antinormal (s = -1) products.  The reordering rule is a finite
binomial sum, so everything here is exact polynomial bookkeeping in floating
complex coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import CoefficientOverflowError
from .fock import ANNIHILATION, CREATION, OperatorMatrix, ladder

_OVERFLOW_GUARD = 1e300


@dataclass(frozen=True)
class NormalPoly:
    """Sparse ladder polynomial: (creation power, annihilation power) -> coefficient.

    Stored coefficients are nonzero; the zero polynomial has no terms.
    """

    terms: dict[tuple[int, int], complex] = field(default_factory=dict)

    def __post_init__(self) -> None:
        clean = {}
        for (n, m), c in self.terms.items():
            if n < 0 or m < 0:
                raise ValueError(f"negative ladder power in key {(n, m)}")
            c = complex(c)
            if c != 0:
                clean[(int(n), int(m))] = c
        object.__setattr__(self, "terms", clean)

    @classmethod
    def constant(cls, value: complex) -> "NormalPoly":
        return cls({(0, 0): value})

    def coefficient(self, n: int, m: int) -> complex:
        return self.terms.get((n, m), 0.0 + 0.0j)

    def scaled(self, factor: complex) -> "NormalPoly":
        return NormalPoly({k: factor * c for k, c in self.terms.items()})

    def plus(self, other: "NormalPoly") -> "NormalPoly":
        merged = dict(self.terms)
        for k, c in other.terms.items():
            merged[k] = merged.get(k, 0.0) + c
        return NormalPoly(merged)

    def max_degree(self) -> tuple[int, int]:
        if not self.terms:
            return (0, 0)
        return (
            max(n for n, _ in self.terms),
            max(m for _, m in self.terms),
        )


def reorder_monomial(m: int, n: int, s: float, t: float) -> NormalPoly:
    """Expand the s-ordered monomial with m creations and n annihilations
    into t-ordered monomials.

    The result is a genuine normal-ordered polynomial when t = 1; for other t
    the keys denote t-ordered monomials under the same (creation, annihilation)
    power convention.
    """
    if m < 0 or n < 0:
        raise ValueError("ladder powers must be nonnegative")
    x = (t - s) / 2.0
    terms: dict[tuple[int, int], complex] = {(m, n): 1.0 + 0.0j}
    coef = 1.0 + 0.0j
    for k in range(1, min(m, n) + 1):
        # k! C(m,k) C(n,k) x^k, grown one balanced factor at a time
        factor = (m - k + 1) * (n - k + 1) * x / k
        if abs(coef) > _OVERFLOW_GUARD / max(abs(factor), 1.0):
            raise CoefficientOverflowError(
                f"reordering coefficient overflow at k = {k} for powers ({m}, {n})"
            )
        coef *= factor
        if coef != 0:
            terms[(m - k, n - k)] = coef
    return NormalPoly(terms)


def s_ordered_bilinear(creation_coeffs, annihilation_coeffs, s: float) -> NormalPoly:
    """Normal-ordered form of an s-ordered product of two ladder series.

    ``creation_coeffs[n]`` multiplies the n-th creation power and
    ``annihilation_coeffs[m]`` the m-th annihilation power; each cross term is
    reordered to normal order (t = 1) and accumulated.  Intermediate products
    are built factor by factor so that the usual cancellation between large
    reordering coefficients and small series coefficients happens before
    anything can overflow; a guard trips at 1e300 regardless.
    """
    avec = np.asarray(creation_coeffs, dtype=complex).ravel()
    bvec = np.asarray(annihilation_coeffs, dtype=complex).ravel()
    x = (1.0 - s) / 2.0
    acc: dict[tuple[int, int], complex] = {}
    for n, an in enumerate(avec):
        if an == 0:
            continue
        for m, bm in enumerate(bvec):
            if bm == 0:
                continue
            term = complex(an * bm)
            key = (n, m)
            acc[key] = acc.get(key, 0.0) + term
            for k in range(1, min(n, m) + 1):
                factor = (n - k + 1) * (m - k + 1) * x / k
                if abs(term) > _OVERFLOW_GUARD / max(abs(factor), 1.0):
                    raise CoefficientOverflowError(
                        f"bilinear reordering overflow at powers ({n}, {m}), k = {k}"
                    )
                term *= factor
                key = (n - k, m - k)
                acc[key] = acc.get(key, 0.0) + term
    return NormalPoly(acc)


def normal_poly_to_matrix(p: NormalPoly, cutoff: int) -> OperatorMatrix:
    """Evaluate a normal-ordered polynomial as a truncated matrix.

    Terms whose creation or annihilation power reaches the cutoff vanish
    identically on the truncated space and are skipped.
    """
    max_n, max_m = p.max_degree()
    max_n = min(max_n, cutoff - 1)
    max_m = min(max_m, cutoff - 1)
    create = ladder(CREATION, cutoff).entries
    annih = ladder(ANNIHILATION, cutoff).entries
    create_pows = [np.eye(cutoff, dtype=complex)]
    annih_pows = [np.eye(cutoff, dtype=complex)]
    for _ in range(max_n):
        create_pows.append(create_pows[-1] @ create)
    for _ in range(max_m):
        annih_pows.append(annih_pows[-1] @ annih)
    out = np.zeros((cutoff, cutoff), dtype=complex)
    for (n, m), c in sorted(p.terms.items()):
        if n >= cutoff or m >= cutoff:
            continue
        out += c * (create_pows[n] @ annih_pows[m])
    return OperatorMatrix(out)
