"""Photon-number feedback loop on diagonal states.

A signal mode circulates through an amplifying coupler whose idler starts in
vacuum and is photon-counted after every pass.  For Fock-diagonal signal
states the whole loop closes on the diagonal: amplification smears photon
number by a negative-binomial kernel, counting k idler photons reweights by a
binomial in the detector efficiency, and the return path applies binomial
loss.  Detection probabilities have a closed form that stays exact when the
stored state is truncated, which is what makes honest tail accounting
possible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammaln

from .errors import TruncationError, UnreachableThresholdError, ZeroProbabilityError
from .fock import DensityDiagonal, mandel_q

_LEAK_TOL = 1e-9
_EXACT_COMB_LIMIT = 60


def binomial_weight(k: int, n: int, z: float) -> float:
    """C(n,k) z^k (1-z)^(n-k), computed jointly in log space for large n."""
    if k < 0 or k > n:
        return 0.0
    if z == 0.0:
        return 1.0 if k == 0 else 0.0
    if z == 1.0:
        return 1.0 if k == n else 0.0
    if n <= _EXACT_COMB_LIMIT:
        return math.comb(n, k) * z**k * (1.0 - z) ** (n - k)
    log_c = gammaln(n + 1.0) - gammaln(k + 1.0) - gammaln(n - k + 1.0)
    return float(math.exp(log_c + k * math.log(z) + (n - k) * math.log1p(-z)))


@lru_cache(maxsize=None)
def _amplify_kernel(cutoff: int, r2: float) -> np.ndarray:
    z = 1.0 / (1.0 + r2)
    mat = np.zeros((cutoff, cutoff))
    for low in range(cutoff):
        for m in range(low, cutoff):
            mat[m, low] = binomial_weight(low, m, z) * z
    mat.flags.writeable = False
    return mat


@lru_cache(maxsize=None)
def _detect_kernel(cutoff: int, r2: float, eta_d: float, k: int) -> np.ndarray:
    z = 1.0 / (1.0 + r2)
    mat = np.zeros((cutoff, cutoff))
    for low in range(cutoff):
        for m in range(low + k, cutoff):
            mat[m, low] = (
                binomial_weight(low, m, z) * z * binomial_weight(k, m - low, eta_d)
            )
    mat.flags.writeable = False
    return mat


@lru_cache(maxsize=None)
def _loss_kernel(cutoff: int, eta: float) -> np.ndarray:
    mat = np.zeros((cutoff, cutoff))
    for low in range(cutoff):
        for m in range(low + 1):
            mat[m, low] = binomial_weight(m, low, eta)
    mat.flags.writeable = False
    return mat


def _log_detection_matrix(cutoff: int, k_values: np.ndarray, r2: float, eta_d: float):
    """log P(k | input n) for every input level below the cutoff.

    P(k|n) = C(n+k,k) z^(n+1) (eta_d (1-z))^k / (1 - (1-eta_d)(1-z))^(n+k+1)
    with z = 1/(1+r2); the full resummation over output levels, so it is
    independent of the cutoff.
    """
    z = 1.0 / (1.0 + r2)
    a = eta_d * (1.0 - z)
    b = 1.0 - (1.0 - eta_d) * (1.0 - z)
    n = np.arange(cutoff, dtype=float)[:, None]
    k = np.asarray(k_values, dtype=float)[None, :]
    log_c = gammaln(n + k + 1.0) - gammaln(k + 1.0) - gammaln(n + 1.0)
    if a > 0.0:
        k_term = k * math.log(a)
    else:
        k_term = np.where(k == 0.0, 0.0, -math.inf)
    return log_c + (n + 1.0) * math.log(z) + k_term - (n + k + 1.0) * math.log(b)


def detection_probability(rho: DensityDiagonal, r2: float, eta_d: float, k: int) -> float:
    """Exact probability of counting k idler photons after one amplification."""
    logp = _log_detection_matrix(rho.cutoff, np.array([k]), r2, eta_d)[:, 0]
    weights = rho.probs / rho.trace
    return float(weights @ np.exp(logp))


def detection_distribution(
    rho: DensityDiagonal, r2: float, eta_d: float, k_max: int
) -> np.ndarray:
    """Probabilities of counting 0..k_max idler photons, from the closed form."""
    logp = _log_detection_matrix(rho.cutoff, np.arange(k_max + 1), r2, eta_d)
    weights = rho.probs / rho.trace
    return weights @ np.exp(logp)


def amplify_channel(rho: DensityDiagonal, r2: float) -> DensityDiagonal:
    """One amplification pass with the idler traced out.  Trace is preserved
    up to the mass pushed past the cutoff, which stays in the trace field."""
    probs = _amplify_kernel(rho.cutoff, r2) @ rho.probs
    return DensityDiagonal.from_probs(probs)


def loss_channel(rho: DensityDiagonal, eta: float) -> DensityDiagonal:
    """Binomial loss of transmissivity eta.  Exactly trace preserving."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"transmissivity must lie in [0, 1], got {eta}")
    probs = _loss_kernel(rho.cutoff, eta) @ rho.probs
    return DensityDiagonal.from_probs(probs)


def amplify_and_detect(
    rho: DensityDiagonal, r2: float, eta_d: float, k: int
) -> tuple[DensityDiagonal, float, float]:
    """Amplify once and condition on counting k idler photons.

    Returns the renormalized signal state, the outcome probability from the
    cutoff-independent closed form, and the fraction of that probability the
    truncated state actually captured.  A capture deficit above 1e-9 raises
    TruncationError rather than silently renormalizing it away.
    """
    if k < 0:
        raise ValueError("photon count must be nonnegative")
    weights = rho.probs / rho.trace
    prob = detection_probability(rho, r2, eta_d, k)
    if prob <= 0.0:
        raise ZeroProbabilityError(f"counting {k} photons has zero probability")
    unnormalized = _detect_kernel(rho.cutoff, r2, eta_d, k) @ weights
    captured = float(unnormalized.sum()) / prob
    if 1.0 - captured > _LEAK_TOL:
        raise TruncationError(
            f"cutoff {rho.cutoff} captures only {captured:.12f} "
            f"of the k={k} outcome; raise the cutoff"
        )
    state = DensityDiagonal.from_probs(unnormalized / unnormalized.sum())
    return state, prob, captured


@dataclass(frozen=True)
class FeedbackConfig:
    """Loop parameters: coupler reflectance, detector and return efficiencies,
    the photon-number target, the stored cutoff, and an optional explicit
    trip schedule overriding the threshold rule."""

    r2: float
    eta_d: float
    eta_f: float
    target_n: int
    cutoff: int
    trips: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        if self.r2 < 0.0:
            raise ValueError("reflectance must be nonnegative")
        if not 0.0 <= self.eta_d <= 1.0:
            raise ValueError("detector efficiency must lie in [0, 1]")
        if not 0.0 < self.eta_f <= 1.0:
            raise ValueError("feedback efficiency must lie in (0, 1]")
        if self.target_n < 1:
            raise ValueError("target photon number must be at least 1")
        if self.cutoff < 2 * self.target_n:
            raise ValueError("cutoff must be at least twice the target")
        if self.trips is not None:
            trips = tuple(int(t) for t in self.trips)
            if len(trips) != self.target_n:
                raise ValueError("explicit schedule must list one trip per photon")
            if any(t < 1 for t in trips) or any(
                b <= a for a, b in zip(trips, trips[1:])
            ):
                raise ValueError("explicit schedule must be strictly increasing")
            object.__setattr__(self, "trips", trips)


@dataclass(frozen=True)
class TraceRecord:
    """One loop pass: trip index, idler count conditioned on, its closed-form
    probability, the captured fraction of that outcome, and the signal mean
    after the return loss."""

    trip: int
    detected: int
    probability: float
    trace: float
    mean: float


@dataclass(frozen=True)
class FockRunResult:
    """Full transcript of a conditioned feedback run."""

    config: FeedbackConfig
    schedule: tuple[int, ...]
    records: tuple[TraceRecord, ...]
    state: DensityDiagonal
    state_before_last_loss: DensityDiagonal
    success_probability: float

    @property
    def total_trips(self) -> int:
        return self.schedule[-1]

    @property
    def mandel(self) -> float:
        return mandel_q(self.state)

    @property
    def mandel_before_last_loss(self) -> float:
        return mandel_q(self.state_before_last_loss)


def unconditional_mean(
    n_trips: int, r2: float, eta_f: float, initial_mean: float = 0.0
) -> float:
    """Signal mean after n unconditioned round trips (amplify, then loss)."""
    if n_trips < 0:
        raise ValueError("trip count must be nonnegative")
    d = eta_f * (1.0 + r2) - 1.0
    if n_trips == 0:
        return initial_mean
    if d == 0.0:
        return initial_mean + eta_f * r2 * n_trips
    growth = n_trips * math.log1p(d)
    return initial_mean * math.exp(growth) + eta_f * r2 * math.expm1(growth) / d


def steady_state_mean(r2: float, eta_f: float) -> float:
    """Fixed point of the unconditioned round trip; infinite when gain wins."""
    d = eta_f * (1.0 + r2) - 1.0
    if d >= 0.0:
        return math.inf
    return eta_f * r2 / (-d)


def detection_schedule(config: FeedbackConfig) -> tuple[int, ...]:
    """Trip numbers at which the expected detector signal first exceeds each
    integer up to the target.

    Threshold m is crossed at the smallest N with
    eta_d * eta_f * mean(N) > m, where mean(N) is the unconditioned signal
    mean after N round trips from vacuum.
    """
    if config.trips is not None:
        return config.trips
    scale = config.eta_d * config.eta_f
    if scale == 0.0 or config.r2 == 0.0:
        raise UnreachableThresholdError("detector signal never grows")
    limit = steady_state_mean(config.r2, config.eta_f)
    if scale * limit <= config.target_n:
        raise UnreachableThresholdError(
            f"detector signal saturates at {scale * limit:.6g}, "
            f"below the target {config.target_n}"
        )

    def crossed(n: int, m: int) -> bool:
        return scale * unconditional_mean(n, config.r2, config.eta_f) > m

    schedule = []
    lo = 0
    for m in range(1, config.target_n + 1):
        hi = max(lo, 1)
        while not crossed(hi, m):
            hi *= 2
        low = lo
        while hi - low > 1:
            mid = (low + hi) // 2
            if crossed(mid, m):
                hi = mid
            else:
                low = mid
        schedule.append(hi)
        lo = hi
    return tuple(schedule)


def round_trip(
    rho: DensityDiagonal, config: FeedbackConfig, k: int
) -> tuple[DensityDiagonal, float, float]:
    """Amplify, condition on k idler counts, then apply the return loss."""
    state, prob, captured = amplify_and_detect(rho, config.r2, config.eta_d, k)
    return loss_channel(state, config.eta_f), prob, captured


def simulate_fock_run(config: FeedbackConfig) -> FockRunResult:
    """Run the conditioned loop: one idler photon at each scheduled trip,
    none everywhere else, starting from vacuum."""
    schedule = detection_schedule(config)
    scheduled = set(schedule)
    state = DensityDiagonal.vacuum(config.cutoff)
    records = []
    success = 1.0
    before_last_loss = state
    for trip in range(1, schedule[-1] + 1):
        k = 1 if trip in scheduled else 0
        detected, prob, captured = amplify_and_detect(
            state, config.r2, config.eta_d, k
        )
        if trip == schedule[-1]:
            before_last_loss = detected
        state = loss_channel(detected, config.eta_f)
        success *= prob
        records.append(TraceRecord(trip, k, prob, captured, state.mean()))
    return FockRunResult(
        config=config,
        schedule=schedule,
        records=tuple(records),
        state=state,
        state_before_last_loss=before_last_loss,
        success_probability=success,
    )


def required_feedback_efficiency(target_n: int, r2: float) -> float:
    """Rough quality bar for the loop: the efficiency at which one photon
    survives the expected target_n / r2 round trips with probability 1/2."""
    if target_n < 1:
        raise ValueError("target photon number must be at least 1")
    if r2 <= 0.0:
        raise ValueError("reflectance must be positive")
    return 2.0 ** (-r2 / target_n)
