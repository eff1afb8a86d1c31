"""States, operators, and elementary observables in a truncated Fock basis.

Every object carries an explicit cutoff ``D`` and lives on the span of
|0>, ..., |D-1>.  Constructors that can leave probability beyond the cutoff
report it (return value or :class:`TruncationWarning`); nothing here hides
truncation loss silently.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import TruncationWarning, ZeroMeanError
from .linalg import expi_hermitian

CREATION = "creation"
ANNIHILATION = "annihilation"
NUMBER = "number"


def _read_only(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class FockVector:
    """Pure state with amplitude ``amps[n]`` on the number state |n>."""

    amps: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.amps, dtype=complex)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("amplitudes must form a nonempty 1-d sequence")
        if not np.all(np.isfinite(arr.view(float))):
            raise ValueError("amplitudes must be finite")
        object.__setattr__(self, "amps", _read_only(arr))

    @property
    def cutoff(self) -> int:
        return self.amps.size

    @classmethod
    def fock(cls, n: int, cutoff: int) -> "FockVector":
        if not 0 <= n < cutoff:
            raise ValueError(f"fock index {n} outside cutoff {cutoff}")
        amps = np.zeros(cutoff, dtype=complex)
        amps[n] = 1.0
        return cls(amps)

    @classmethod
    def vacuum(cls, cutoff: int) -> "FockVector":
        return cls.fock(0, cutoff)

    @classmethod
    def coherent(cls, alpha: complex, cutoff: int) -> "FockVector":
        """Truncated coherent state; warns when the cut tail exceeds 1e-8."""
        n = np.arange(cutoff)
        log_fact = np.cumsum(np.concatenate(([0.0], np.log(np.arange(1, cutoff)))))
        mag = np.exp(-abs(alpha) ** 2 / 2 + n * np.log(abs(alpha)) - log_fact / 2) \
            if alpha != 0 else np.where(n == 0, 1.0, 0.0)
        phase = np.exp(1j * n * np.angle(alpha)) if alpha != 0 else np.ones(cutoff)
        vec = cls(mag * phase)
        tail = 1.0 - vec.norm_sq()
        if tail > 1e-8:
            warnings.warn(
                f"coherent state loses tail mass {tail:.3e} at cutoff {cutoff}",
                TruncationWarning,
                stacklevel=2,
            )
        return vec

    @classmethod
    def normalized(cls, amps) -> "FockVector":
        vec = cls(amps)
        norm = math.sqrt(vec.norm_sq())
        if norm <= 0.0:
            raise ValueError("cannot normalize the zero vector")
        return cls(vec.amps / norm)

    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.amps) ** 2))

    def overlap(self, other: "FockVector") -> complex:
        """Inner product <self|other> over the shared span."""
        m = min(self.cutoff, other.cutoff)
        return complex(np.vdot(self.amps[:m], other.amps[:m]))

    def tail_mass(self, start: int) -> float:
        """Probability carried by |n> with n >= start."""
        return float(np.sum(np.abs(self.amps[start:]) ** 2))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amps) ** 2


@dataclass(frozen=True)
class DensityDiagonal:
    """Fock-diagonal mixture; ``trace`` is tracked explicitly so that
    sub-normalized intermediate states remain representable."""

    probs: np.ndarray
    trace: float

    def __post_init__(self) -> None:
        arr = np.asarray(self.probs, dtype=float)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("probabilities must form a nonempty 1-d sequence")
        if np.any(arr < -1e-12):
            raise ValueError("probabilities must be nonnegative")
        arr = np.clip(arr, 0.0, None)
        total = float(arr.sum())
        if abs(total - self.trace) > 1e-12 * max(1.0, abs(self.trace)):
            raise ValueError(
                f"sum of probabilities {total!r} disagrees with trace {self.trace!r}"
            )
        object.__setattr__(self, "probs", _read_only(arr))
        object.__setattr__(self, "trace", total)

    @property
    def cutoff(self) -> int:
        return self.probs.size

    @classmethod
    def from_probs(cls, probs) -> "DensityDiagonal":
        arr = np.asarray(probs, dtype=float)
        return cls(arr, float(np.clip(arr, 0.0, None).sum()))

    @classmethod
    def vacuum(cls, cutoff: int) -> "DensityDiagonal":
        probs = np.zeros(cutoff)
        probs[0] = 1.0
        return cls(probs, 1.0)

    @classmethod
    def from_vector(cls, vec: FockVector) -> "DensityDiagonal":
        return cls.from_probs(vec.probabilities())

    def normalized(self) -> "DensityDiagonal":
        if self.trace <= 0.0:
            raise ValueError("cannot normalize a zero-trace state")
        return DensityDiagonal(self.probs / self.trace, 1.0)

    def mean(self) -> float:
        p = self.probs / self.trace
        return float(np.arange(self.cutoff) @ p)

    def variance(self) -> float:
        p = self.probs / self.trace
        n = np.arange(self.cutoff)
        m = float(n @ p)
        return float((n - m) ** 2 @ p)


@dataclass(frozen=True)
class OperatorMatrix:
    """General operator on the truncated single-mode space."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.entries, dtype=complex)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.size == 0:
            raise ValueError("operator entries must form a square matrix")
        object.__setattr__(self, "entries", _read_only(arr))

    @property
    def cutoff(self) -> int:
        return self.entries.shape[0]

    @classmethod
    def identity(cls, cutoff: int) -> "OperatorMatrix":
        return cls(np.eye(cutoff, dtype=complex))

    def adjoint(self) -> "OperatorMatrix":
        return OperatorMatrix(self.entries.conj().T)

    def __matmul__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        return OperatorMatrix(self.entries @ other.entries)

    def apply(self, vec: FockVector) -> FockVector:
        if vec.cutoff != self.cutoff:
            raise ValueError("cutoff mismatch between operator and state")
        return FockVector(self.entries @ vec.amps)


@dataclass(frozen=True)
class TwoModeOperator:
    """Operator over the product basis |n1> (x) |n2>, index n1*D2 + n2."""

    entries: np.ndarray
    dims: tuple[int, int]
    col_deficit: np.ndarray | None = None

    def __post_init__(self) -> None:
        d1, d2 = self.dims
        arr = np.asarray(self.entries, dtype=complex)
        if arr.shape != (d1 * d2, d1 * d2):
            raise ValueError(f"entries shape {arr.shape} does not match dims {self.dims}")
        object.__setattr__(self, "entries", _read_only(arr))
        object.__setattr__(self, "dims", (int(d1), int(d2)))
        if self.col_deficit is not None:
            object.__setattr__(self, "col_deficit", _read_only(np.asarray(self.col_deficit, dtype=float)))

    @classmethod
    def tensor(cls, a: OperatorMatrix, b: OperatorMatrix) -> "TwoModeOperator":
        return cls(np.kron(a.entries, b.entries), (a.cutoff, b.cutoff))

    def as_four_index(self) -> np.ndarray:
        d1, d2 = self.dims
        return self.entries.reshape(d1, d2, d1, d2)

    def __matmul__(self, other: "TwoModeOperator") -> "TwoModeOperator":
        if self.dims != other.dims:
            raise ValueError("dimension mismatch")
        return TwoModeOperator(self.entries @ other.entries, self.dims)

    def adjoint(self) -> "TwoModeOperator":
        return TwoModeOperator(self.entries.conj().T, self.dims)


def ladder(kind: str, cutoff: int) -> OperatorMatrix:
    """Matrix of the annihilation, creation, or number operator."""
    if cutoff < 1:
        raise ValueError("cutoff must be positive")
    if kind == ANNIHILATION:
        m = np.diag(np.sqrt(np.arange(1, cutoff, dtype=float)), k=1).astype(complex)
    elif kind == CREATION:
        m = np.diag(np.sqrt(np.arange(1, cutoff, dtype=float)), k=-1).astype(complex)
    elif kind == NUMBER:
        m = np.diag(np.arange(cutoff, dtype=float)).astype(complex)
    else:
        raise ValueError(f"unknown ladder kind {kind!r}")
    return OperatorMatrix(m)


def displacement_matrix(alpha: complex, cutoff: int) -> OperatorMatrix:
    """Truncated displacement operator exp(alpha*a^dag - alpha^* a).

    Built as the exponential of the (Hermitian-generated) truncated argument,
    so the result is exactly unitary on the truncated space.
    """
    alpha = complex(alpha)
    if abs(alpha) ** 2 > cutoff / 4:
        warnings.warn(
            f"displacement |alpha|^2 = {abs(alpha)**2:.3g} exceeds cutoff/4 = {cutoff/4:.3g}; "
            "displaced-vacuum tail is not negligible",
            TruncationWarning,
            stacklevel=2,
        )
    if alpha == 0:
        return OperatorMatrix.identity(cutoff)
    a = ladder(ANNIHILATION, cutoff).entries
    gen = -1j * (alpha * a.conj().T - np.conj(alpha) * a)
    return OperatorMatrix(expi_hermitian(gen))


def mandel_q(rho: DensityDiagonal) -> float:
    """Mandel parameter <(dn)^2>/<n> - 1; negative values are sub-Poissonian."""
    if rho.trace <= 0.0:
        raise ValueError("state has no weight")
    mean = rho.mean()
    if mean <= 0.0:
        raise ZeroMeanError("Mandel Q is undefined for zero mean photon number")
    return rho.variance() / mean - 1.0


def thermal_diagonal(mean: float, cutoff: int) -> DensityDiagonal:
    """Geometric photon-number mixture of the given mean, renormalized on the cutoff."""
    if mean < 0.0:
        raise ValueError("mean must be nonnegative")
    if mean == 0.0:
        return DensityDiagonal.vacuum(cutoff)
    n = np.arange(cutoff)
    logp = n * math.log(mean / (mean + 1.0)) - math.log(mean + 1.0)
    probs = np.exp(logp)
    probs /= probs.sum()
    return DensityDiagonal(probs, 1.0)


def kerr_phase(state, theta: float):
    """Kerr-type phase: |n> picks up exp(i*theta*n).  Diagonal mixtures are blind to it."""
    if isinstance(state, FockVector):
        n = np.arange(state.cutoff)
        return FockVector(state.amps * np.exp(1j * theta * n))
    if isinstance(state, DensityDiagonal):
        return state
    raise TypeError(f"unsupported state type {type(state).__name__}")


def fidelity(a: FockVector, b: FockVector) -> float:
    """|<a|b>|^2; meaningful for normalized inputs."""
    return abs(a.overlap(b)) ** 2
