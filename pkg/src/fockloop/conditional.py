"""Non-unitary conditional operators for idler-state preparation and detection.

Feeding the idler port of a two-mode coupler with a state |F> and detecting
a state |G> behind it leaves the signal mode transformed by the non-unitary
operator Y = <G| U |F>.  Both idler states are written as polynomials in the
idler creation operator: F_m multiplies the m-th creation power.  The module
builds Y two independent ways: a closed form through the s-ordering engine
and a brute-force contraction of the full two-mode unitary, which acts as
the oracle in the test suite.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .couplers import (
    AMPLIFIER,
    CouplerAngles,
    CouplerParams,
    hamiltonian_oracle,
    two_mode_unitary,
)
from .errors import TruncationError, TruncationWarning, ZeroProbabilityError, DegenerateCouplerError
from .fock import CREATION, FockVector, OperatorMatrix, displacement_matrix, ladder
from .sorder import s_ordered_bilinear, normal_poly_to_matrix

_DEGENERATE_REFL = 1e-15
_ZERO_PROBABILITY = 1e-14


@dataclass(frozen=True)
class PolynomialState:
    """State written as sum_m coeffs[m] * (creation)^m acting on vacuum."""

    coeffs: np.ndarray
    tail: float = 0.0

    def __post_init__(self) -> None:
        arr = np.asarray(self.coeffs, dtype=complex)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("coefficients must form a nonempty 1-d sequence")
        object.__setattr__(self, "coeffs", arr.copy())
        self.coeffs.setflags(write=False)

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    @classmethod
    def fock(cls, n: int) -> "PolynomialState":
        coeffs = np.zeros(n + 1, dtype=complex)
        coeffs[n] = 1.0 / math.sqrt(math.factorial(n))
        return cls(coeffs, 0.0)

    @classmethod
    def coherent(cls, alpha: complex, degree: int | None = None) -> "PolynomialState":
        """Coherent state cut at the given polynomial degree.

        The cut tail norm is stored on the result and a warning fires when it
        reaches 1e-10; the default degree keeps it far below that.
        """
        alpha = complex(alpha)
        if degree is None:
            degree = max(24, int(math.ceil(abs(alpha) ** 2 + 12.0 * abs(alpha) + 24)))
        m = np.arange(degree + 1)
        log_fact = np.cumsum(np.concatenate(([0.0], np.log(np.arange(1, degree + 1)))))
        if alpha == 0:
            coeffs = np.where(m == 0, 1.0 + 0.0j, 0.0)
            return cls(coeffs, 0.0)
        coeffs = np.exp(
            -abs(alpha) ** 2 / 2.0
            + m * (math.log(abs(alpha)) + 1j * np.angle(alpha))
            - log_fact
        )
        amps_sq = np.exp(-abs(alpha) ** 2 + 2.0 * m * math.log(abs(alpha)) - log_fact)
        tail = max(0.0, 1.0 - float(amps_sq.sum()))
        if tail >= 1e-10:
            warnings.warn(
                f"coherent polynomial cut at degree {degree} loses tail norm {tail:.3e}",
                TruncationWarning,
                stacklevel=2,
            )
        return cls(coeffs, tail)

    def to_fock_vector(self, cutoff: int) -> FockVector:
        amps = np.zeros(cutoff, dtype=complex)
        top = min(self.degree, cutoff - 1)
        m = np.arange(top + 1)
        log_fact = np.cumsum(np.concatenate(([0.0], np.log(np.arange(1, top + 1)))))
        amps[: top + 1] = self.coeffs[: top + 1] * np.exp(0.5 * log_fact)
        return FockVector(amps)

    def norm_sq(self) -> float:
        m = np.arange(self.degree + 1)
        log_fact = np.cumsum(np.concatenate(([0.0], np.log(np.arange(1, self.degree + 1)))))
        return float(np.sum(np.abs(self.coeffs) ** 2 * np.exp(log_fact)))


@dataclass(frozen=True)
class ConditionalOperator:
    """Signal-mode operator produced by idler preparation and detection.

    ``idler_in`` and ``idler_out`` record the construction; after an idler
    displacement they describe the undisplaced core.
    """

    matrix: OperatorMatrix
    params: CouplerParams
    idler_in: PolynomialState
    idler_out: PolynomialState

    @property
    def cutoff(self) -> int:
        return self.matrix.cutoff


def _diag_vector(base: complex, sign: int, cutoff: int) -> np.ndarray:
    return np.power(complex(base), sign * np.arange(cutoff))


def _degenerate_conditional(p: CouplerParams, fin: PolynomialState,
                            gout: PolynomialState, cutoff: int) -> np.ndarray:
    """No-coupling limit: the coupler only dresses the idler with phases, so
    Y collapses to an overlap-weighted diagonal power operator."""
    t, ph = p.trans, p.phase
    top = min(fin.degree, gout.degree)
    n = np.arange(top + 1)
    log_fact = np.cumsum(np.concatenate(([0.0], np.log(np.arange(1, top + 1)))))
    if p.kind == AMPLIFIER:
        base = ph * np.conj(t)
    else:
        base = np.conj(ph) * t
    weights = (
        np.conj(gout.coeffs[: top + 1])
        * fin.coeffs[: top + 1]
        * np.exp(log_fact)
        * np.power(base, -n)
    )
    scalar = complex(weights.sum())
    if p.kind == AMPLIFIER:
        diag = scalar / np.conj(p.trans_bar) * _diag_vector(np.conj(ph * t), -1, cutoff)
    else:
        diag = scalar * _diag_vector(ph * t, +1, cutoff)
    return np.diag(diag)


def conditional_operator(p: CouplerParams, idler_in: PolynomialState,
                         idler_out: PolynomialState, cutoff: int) -> ConditionalOperator:
    """Closed-form conditional operator via the s-ordering engine."""
    t, r, ph = p.trans, p.refl, p.phase
    if abs(r) < _DEGENERATE_REFL:
        mat = _degenerate_conditional(p, idler_in, idler_out, cutoff)
        return ConditionalOperator(OperatorMatrix(mat), p, idler_in, idler_out)

    if p.kind == AMPLIFIER:
        creation_side = np.conj(idler_out.coeffs) * np.power(-r / np.conj(t), np.arange(idler_out.degree + 1))
        annih_side = idler_in.coeffs * np.power(np.conj(ph) * np.conj(r), np.arange(idler_in.degree + 1))
    else:
        creation_side = idler_in.coeffs * np.power(ph * r, np.arange(idler_in.degree + 1))
        annih_side = np.conj(idler_out.coeffs) * np.power(-np.conj(r) / t, np.arange(idler_out.degree + 1))

    poly = s_ordered_bilinear(creation_side, annih_side, p.ordering)
    mat = normal_poly_to_matrix(poly, cutoff).entries
    if p.kind == AMPLIFIER:
        mat = mat @ np.diag(_diag_vector(np.conj(ph * t), -1, cutoff))
        mat = mat / np.conj(p.trans_bar)
    else:
        mat = mat @ np.diag(_diag_vector(ph * t, +1, cutoff))
    return ConditionalOperator(OperatorMatrix(mat), p, idler_in, idler_out)


def oracle_conditional(coupler: CouplerParams | CouplerAngles, idler_in: PolynomialState,
                       idler_out: PolynomialState, cutoff: int,
                       idler_cutoff: int | None = None,
                       idler_displacements: tuple[complex, complex] | None = None) -> OperatorMatrix:
    """Brute-force conditional operator: build the full two-mode unitary and
    contract the idler factor with the prepared and detected states.

    ``idler_displacements`` optionally displaces |F> and <G| in the idler
    space before contracting (used to cross-check displaced operators).
    Displaced idlers have support on every Fock level, so prefer angle
    couplers here: the exponential route is unitary at any box shape, while
    the factored route feeds untrusted high-number sectors and the tail
    guard will reject.
    """
    if idler_cutoff is None:
        idler_cutoff = 2 * cutoff
    if isinstance(coupler, CouplerAngles):
        u = hamiltonian_oracle(coupler, cutoff, idler_cutoff)
    else:
        u = two_mode_unitary(coupler, cutoff, idler_cutoff)
    fvec = idler_in.to_fock_vector(idler_cutoff).amps
    gvec = idler_out.to_fock_vector(idler_cutoff).amps
    if idler_displacements is not None:
        d_in, d_out = idler_displacements
        fvec = displacement_matrix(d_in, idler_cutoff).entries @ fvec
        gvec = displacement_matrix(d_out, idler_cutoff).entries @ gvec

    u4 = u.as_four_index()
    # signal column j with idler input f: amplitudes over (signal out i, idler out m)
    spread = np.einsum("imjn,n->imj", u4, fvec)
    interior = np.arange(cutoff) <= cutoff // 2
    col = spread[:, :, interior]
    col_norm = np.sum(np.abs(col) ** 2, axis=(0, 1))
    top = np.sum(np.abs(col[:, idler_cutoff - 2 :, :]) ** 2, axis=(0, 1))
    with np.errstate(invalid="ignore", divide="ignore"):
        frac = np.where(col_norm > 0, top / col_norm, 0.0)
    worst = float(np.max(frac))
    if worst > 1e-8:
        raise TruncationError(
            f"idler tail mass {worst:.3e} at idler cutoff {idler_cutoff}; increase it"
        )
    return OperatorMatrix(np.einsum("m,imj->ij", gvec.conj(), spread))


def conditional_transform(y: ConditionalOperator | OperatorMatrix, state):
    """Apply a conditional operator and renormalize.

    Returns (state, probability); the probability is physical when the idler
    states used to build Y are normalized.
    """
    mat = y.matrix.entries if isinstance(y, ConditionalOperator) else y.entries
    if isinstance(state, FockVector):
        out = mat @ state.amps
        prob = float(np.sum(np.abs(out) ** 2))
        if prob < _ZERO_PROBABILITY:
            raise ZeroProbabilityError(f"conditioning probability {prob:.3e} is negligible")
        return FockVector(out / math.sqrt(prob)), prob
    if isinstance(state, OperatorMatrix):
        out = mat @ state.entries @ mat.conj().T
        prob = float(np.trace(out).real)
        if prob < _ZERO_PROBABILITY:
            raise ZeroProbabilityError(f"conditioning probability {prob:.3e} is negligible")
        return OperatorMatrix(out / prob), prob
    raise TypeError(f"unsupported state type {type(state).__name__}")


def photon_add_operator(p: CouplerParams, idler_drive: complex, cutoff: int) -> ConditionalOperator:
    """Displaced photon adding: coherent idler in, one photon detected.

    Assembled directly from displacement, diagonal power, and creation
    matrices; equals the closed form built from the coherent/single-photon
    idler polynomials.
    """
    t, r, ph = p.trans, p.refl, p.phase
    if p.kind != AMPLIFIER:
        raise ValueError("photon adding is defined for the amplifier kind")
    if abs(r) < _DEGENERATE_REFL:
        raise DegenerateCouplerError("photon adding needs a nonzero pair coupling")
    idler_drive = complex(idler_drive)
    shift_in = -np.conj(t) * np.conj(idler_drive) / np.conj(r)
    shift_out = ph * np.conj(idler_drive) / np.conj(r)
    scalar = -r * np.conj(ph) / np.conj(p.trans_bar)
    # The factor product mixes through rows above the target box; assembling
    # on a padded box and cropping keeps the returned block exact.
    pad = cutoff + 8 + int(math.ceil(4.0 * max(abs(shift_in), abs(shift_out)) ** 2))
    mat = (
        scalar
        * displacement_matrix(shift_out, pad).entries
        @ np.diag(_diag_vector(np.conj(ph * t), -1, pad))
        @ ladder(CREATION, pad).entries
        @ displacement_matrix(shift_in, pad).entries
    )[:cutoff, :cutoff]
    return ConditionalOperator(
        OperatorMatrix(mat),
        p,
        PolynomialState.coherent(idler_drive),
        PolynomialState.fock(1),
    )


def displaced_conditional(p: CouplerParams, y: ConditionalOperator,
                          idler_in_shift: complex, idler_out_shift: complex) -> ConditionalOperator:
    """Equivalent of displacing the idler input and detected states: signal
    displacements wrap the undisplaced operator."""
    t, r, ph = p.trans, p.refl, p.phase
    if abs(r) < _DEGENERATE_REFL:
        raise DegenerateCouplerError("idler displacement transport needs a nonzero coupling")
    alpha = complex(idler_in_shift)
    beta = complex(idler_out_shift)
    if p.kind == AMPLIFIER:
        left = (ph * np.conj(alpha) - t * np.conj(beta)) / np.conj(r)
        right = (np.conj(ph) * np.conj(beta) - np.conj(t) * np.conj(alpha)) / np.conj(r)
    else:
        left = (ph * alpha - t * beta) / np.conj(r)
        right = (np.conj(ph) * beta - np.conj(t) * alpha) / np.conj(r)
    cutoff = y.cutoff
    mat = (
        displacement_matrix(left, cutoff).entries
        @ y.matrix.entries
        @ displacement_matrix(right, cutoff).entries
    )
    return replace(y, matrix=OperatorMatrix(mat))
