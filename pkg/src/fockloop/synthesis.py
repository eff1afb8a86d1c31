"""State engineering by repeated displaced photon adding.

A degree-N Fock superposition is fixed, up to phase and normalization, by the
N zeros of its overlap with coherent states.  Turning those zeros into a
schedule of coherent idler drives, one per photon-adding trip, prepares the
target from vacuum with a probability given in closed form.  The module also
covers the two-level special case and the plain Fock-state ladder with its
probability optimum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .conditional import photon_add_operator
from .couplers import CouplerParams
from .errors import DegenerateCouplerError, DegenerateTargetError, TruncationError
from .fock import FockVector

_LEADING_TOL = 1e-12


@dataclass(frozen=True)
class QubitDesign:
    """Probability-optimal two-level design for amplitude ratio |q|."""

    refl_mag: float
    alpha_mag: float
    probability: float


@dataclass(frozen=True)
class SynthesisPlan:
    """Everything needed to run one synthesis: target, zeros, drives, probability."""

    target: FockVector
    betas: np.ndarray
    alphas: np.ndarray
    params: CouplerParams
    probability: float

    @property
    def degree(self) -> int:
        return self.betas.size


def qubit_design(q: complex) -> QubitDesign:
    """Optimal coupler reflectance and idler drive for |0> + q|1> (normalized).

    Maximizes the success probability of the single-trip preparation over the
    coupler reflectance; the drive magnitude is tied to |R| by the zero of the
    target.
    """
    qmag = abs(complex(q))
    if qmag == 0:
        raise ValueError("amplitude ratio q must be nonzero")
    u = 1.0 / qmag**2
    r2 = (math.sqrt((u + 1.0) ** 2 + 4.0 * u) - (u + 1.0)) / (2.0 * u)
    alpha_mag = math.sqrt(r2) / qmag
    t2 = 1.0 + r2
    prob = (r2 + alpha_mag**2) / t2**2 * math.exp(-(alpha_mag**2))
    return QubitDesign(math.sqrt(r2), alpha_mag, prob)


def q_function_zeros(target: FockVector) -> np.ndarray:
    """Coherent-amplitude zeros of a finite Fock superposition.

    The conjugated zeros are the roots of the polynomial with coefficients
    amps[n]/sqrt(n!), found as companion-matrix eigenvalues and returned in
    ascending modulus (ties broken by phase) so schedules are reproducible.
    """
    amps = target.amps
    norm = float(np.linalg.norm(amps))
    if norm == 0.0:
        raise DegenerateTargetError("target state is zero")
    sig = np.abs(amps) > _LEADING_TOL * norm
    if not sig.any():
        raise DegenerateTargetError("target has no numerically significant amplitude")
    deg = int(np.flatnonzero(sig)[-1])
    if deg == 0:
        return np.zeros(0, dtype=complex)
    n = np.arange(deg + 1)
    log_fact = np.cumsum(np.concatenate(([0.0], np.log(np.arange(1, deg + 1)))))
    coeffs = amps[: deg + 1] * np.exp(-0.5 * log_fact)
    roots = np.roots(coeffs[::-1])
    order = np.lexsort((np.angle(roots), np.abs(roots)))
    return np.conj(roots[order])


def idler_schedule(betas, p: CouplerParams) -> np.ndarray:
    """Coherent idler drives, one per trip, that move the running state's
    zeros through the prescribed sequence."""
    t, r, ph = p.trans, p.refl, p.phase
    if abs(r) == 0:
        raise DegenerateCouplerError("scheduling needs a nonzero pair coupling")
    betas = np.asarray(betas, dtype=complex).ravel()
    n_trips = betas.size
    bstar_ext = np.concatenate((np.conj(betas), [0.0]))
    pt = ph * t
    alphas = np.zeros(n_trips, dtype=complex)
    for k in range(1, n_trips + 1):
        tail = 0.0 + 0.0j
        for ell in range(k, n_trips + 1):
            tail += abs(t) ** (2 * ell) * (bstar_ext[ell - 1] - bstar_ext[ell])
        alphas[k - 1] = ph * r * pt ** (-k) * np.conj(pt) ** (-n_trips) * tail
    return alphas


def inverse_schedule(alphas, p: CouplerParams) -> np.ndarray:
    """Recover the zero sequence realized by a given drive schedule."""
    t, r, ph = p.trans, p.refl, p.phase
    if abs(r) == 0:
        raise DegenerateCouplerError("scheduling needs a nonzero pair coupling")
    alphas = np.asarray(alphas, dtype=complex).ravel()
    n_trips = alphas.size
    astar_ext = np.concatenate((np.conj(alphas), [0.0]))
    pt = ph * t
    betas = np.zeros(n_trips, dtype=complex)
    for k in range(1, n_trips + 1):
        tail = 0.0 + 0.0j
        for ell in range(k, n_trips + 1):
            tail += (ph * astar_ext[ell - 1] - np.conj(t) * astar_ext[ell]) / pt**ell
        betas[k - 1] = pt**n_trips / np.conj(r) * tail
    return betas


def synth_product(p: CouplerParams, alphas, cutoff: int) -> tuple[FockVector, float]:
    """Run the photon-adding product on vacuum.

    Returns the normalized output and the success probability (squared norm of
    the unnormalized result).
    """
    alphas = np.asarray(alphas, dtype=complex).ravel()
    n_trips = alphas.size
    if n_trips > cutoff // 2:
        raise ValueError(f"{n_trips} trips need a cutoff of at least {2 * n_trips}")
    vec = np.zeros(cutoff, dtype=complex)
    vec[0] = 1.0
    for drive in alphas:
        op = photon_add_operator(p, drive, cutoff)
        vec = op.matrix.entries @ vec
    prob = float(np.sum(np.abs(vec) ** 2))
    if prob > 0:
        tail = float(np.sum(np.abs(vec[cutoff - 2 :]) ** 2)) / prob
        if tail > 1e-9:
            raise TruncationError(f"synthesis output leaks tail mass {tail:.3e}")
    state = FockVector(vec / math.sqrt(prob)) if prob > 0 else FockVector(vec)
    return state, prob


def synthesis_probability(target: FockVector, alphas, p: CouplerParams) -> float:
    """Closed-form success probability of a full synthesis run.

    ``target`` must be normalized; its leading amplitude enters through the
    normalization of the zero-factored polynomial.
    """
    alphas = np.asarray(alphas, dtype=complex).ravel()
    n_trips = alphas.size
    amps = target.amps / math.sqrt(target.norm_sq())
    if n_trips >= amps.size or abs(amps[n_trips]) < _LEADING_TOL:
        raise DegenerateTargetError("target degree does not match the schedule length")
    lead = abs(amps[n_trips]) ** 2
    r2 = abs(p.refl) ** 2
    t2 = abs(p.trans) ** 2
    return (
        math.factorial(n_trips)
        / lead
        * r2**n_trips
        * t2 ** (-n_trips * (n_trips + 3) / 2.0)
        * math.exp(-float(np.sum(np.abs(alphas) ** 2)))
    )


def plan_synthesis(target: FockVector, p: CouplerParams) -> SynthesisPlan:
    """Plan a full synthesis: zeros, drive schedule, and closed-form probability."""
    amps = np.asarray(target.amps, dtype=complex)
    normalized = FockVector(amps / np.linalg.norm(amps))
    betas = q_function_zeros(normalized)
    deg = betas.size
    # residual check: the factored polynomial must vanish at each zero
    if deg > 0:
        n = np.arange(deg + 1)
        log_fact = np.cumsum(np.concatenate(([0.0], np.log(np.arange(1, deg + 1)))))
        coeffs = normalized.amps[: deg + 1] * np.exp(-0.5 * log_fact)
        coeffs = coeffs / np.max(np.abs(coeffs))
        vals = np.polyval(coeffs[::-1], np.conj(betas))
        if np.max(np.abs(vals)) > 1e-8:
            raise DegenerateTargetError("zero refinement failed for the target polynomial")
    alphas = idler_schedule(betas, p)
    prob = synthesis_probability(normalized, alphas, p)
    return SynthesisPlan(normalized, betas, alphas, p, prob)


def fock_probability(n: int, r2: float) -> float:
    """Success probability of preparing |n> with n undriven photon-adding trips."""
    if n < 0:
        raise ValueError("photon number must be nonnegative")
    if r2 <= 0:
        raise ValueError("reflectance must be positive")
    return math.factorial(n) * r2**n * (1.0 + r2) ** (-n * (n + 3) / 2.0)


def optimal_r2(n: int) -> float:
    """Reflectance maximizing fock_probability at fixed n."""
    return 2.0 / (n + 1.0)


def fock_asymptote(n: int) -> float:
    """Large-n envelope a*exp(-b*n) of the optimized Fock preparation probability."""
    a = math.sqrt(2.0 * math.pi) / math.e
    b = 2.0 - math.log(2.0)
    return a * math.exp(-b * n)
