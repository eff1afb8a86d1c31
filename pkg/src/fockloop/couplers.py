"""Two-mode coupler algebra for pair amplifiers and frequency converters.

An amplifier couples signal and idler through pair creation and obeys
|T|^2 - |R|^2 = 1; a converter exchanges photons between the modes and obeys
|T|^2 + |R|^2 = 1.  Both are described by three complex numbers (T, R, P) or,
equivalently, by four real angles that parameterize the generating quadratic
Hamiltonian.  The module provides both descriptions, the 2x2 Heisenberg
matrices, the factored truncated unitaries, and an independent brute-force
unitary built by exponentiating the generators, which serves as the oracle
for everything downstream.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import DegenerateCouplerError, TruncationError
from .fock import ANNIHILATION, CREATION, NUMBER, TwoModeOperator, ladder
from .linalg import expi_hermitian

AMPLIFIER = "amplifier"
CONVERTER = "converter"
_KINDS = (AMPLIFIER, CONVERTER)

SOURCE_ANGLES = "angles"
SOURCE_DIRECT = "direct"


def _even_series(w: float, kind: str) -> float:
    """cosh(sqrt(w)/2) or sinh(sqrt(w)/2)/sqrt(w) as entire functions of w.

    Evaluating through the series keeps the w <= 0 branch exact with no
    explicit case split; terms are added until they drop below 1e-18.
    """
    total = 1.0 if kind == "cosh" else 0.5
    term = total
    k = 0
    while True:
        k += 1
        if kind == "cosh":
            term *= w / (4.0 * (2 * k) * (2 * k - 1))
        else:
            term *= w / (4.0 * (2 * k) * (2 * k + 1))
        total += term
        if abs(term) < 1e-18:
            return total


@dataclass(frozen=True)
class CouplerAngles:
    """Four-angle description (a0, a1, a2, a3) of a coupler Hamiltonian."""

    kind: str
    angles: tuple[float, float, float, float]

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ValueError(f"unknown coupler kind {self.kind!r}")
        vals = tuple(float(a) for a in self.angles)
        if len(vals) != 4 or not all(math.isfinite(a) for a in vals):
            raise ValueError("expected four finite angles")
        object.__setattr__(self, "angles", vals)

    @classmethod
    def amplifier(cls, a0: float, a1: float, a2: float, a3: float) -> "CouplerAngles":
        return cls(AMPLIFIER, (a0, a1, a2, a3))

    @classmethod
    def converter(cls, a0: float, a1: float, a2: float, a3: float) -> "CouplerAngles":
        return cls(CONVERTER, (a0, a1, a2, a3))

    @classmethod
    def amplifier_from_pump(
        cls, omega_signal: float, omega_idler: float, coupling: float,
        pump: complex, t: float,
    ) -> "CouplerAngles":
        """Angles of a pair amplifier driven by a classical pump for time t."""
        pump = complex(pump)
        return cls.amplifier(
            -(omega_signal - omega_idler) * t,
            -2.0 * pump.real * coupling * t,
            2.0 * pump.imag * coupling * t,
            -(omega_signal + omega_idler) * t,
        )

    @classmethod
    def converter_from_pump(
        cls, omega_signal: float, omega_idler: float, coupling: float,
        pump: complex, t: float,
    ) -> "CouplerAngles":
        """Angles of a frequency converter driven by a classical pump for time t."""
        pump = complex(pump)
        return cls.converter(
            -(omega_signal + omega_idler) * t,
            -2.0 * pump.real * coupling * t,
            -2.0 * pump.imag * coupling * t,
            -(omega_signal - omega_idler) * t,
        )


@dataclass(frozen=True)
class CouplerParams:
    """Complex coupler parameters: transmittance, reflectance, and overall phase.

    ``trans_bar`` carries the extra half-angle phase that is only defined when
    the parameters come from angles; for direct construction it equals
    ``trans``.  ``ordering`` is the operator-ordering parameter used by the
    conditional-operator closed forms (infinite when ``refl`` vanishes).
    """

    kind: str
    trans: complex
    refl: complex
    phase: complex
    trans_bar: complex
    source: str = SOURCE_DIRECT

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ValueError(f"unknown coupler kind {self.kind!r}")
        for name in ("trans", "refl", "phase", "trans_bar"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        sign = -1.0 if self.kind == AMPLIFIER else 1.0
        budget = abs(self.trans) ** 2 + sign * abs(self.refl) ** 2
        if abs(budget - 1.0) > 1e-12:
            raise ValueError(
                f"{self.kind} parameters violate |T|^2 {'-' if sign < 0 else '+'} |R|^2 = 1 "
                f"(got {budget!r})"
            )
        if abs(abs(self.phase) - 1.0) > 1e-12:
            raise ValueError(f"phase parameter must be unimodular (got |P| = {abs(self.phase)!r})")
        if abs(abs(self.trans_bar) - abs(self.trans)) > 1e-12:
            raise ValueError("trans_bar must carry the modulus of trans")

    @classmethod
    def from_values(cls, kind: str, trans: complex, refl: complex, phase: complex) -> "CouplerParams":
        return cls(kind, trans, refl, phase, trans, SOURCE_DIRECT)

    @classmethod
    def identity(cls, kind: str) -> "CouplerParams":
        return cls.from_values(kind, 1.0, 0.0, 1.0)

    @property
    def ordering(self) -> float:
        """Ordering parameter >= 1; infinite in the no-coupling limit."""
        r2 = abs(self.refl) ** 2
        if r2 == 0.0:
            return math.inf
        if self.kind == AMPLIFIER:
            return 1.0 + 2.0 / r2
        return 1.0 + 2.0 * abs(self.trans) ** 2 / r2


def params_from_angles(a: CouplerAngles) -> CouplerParams:
    """Integrate the four-angle description into (T, R, P) coupler parameters."""
    a0, a1, a2, a3 = a.angles
    if a.kind == AMPLIFIER:
        w = a1 * a1 + a2 * a2 - a3 * a3
        refl_sign = -1.0
    else:
        w = -(a1 * a1 + a2 * a2 + a3 * a3)
        refl_sign = 1.0
    ch = _even_series(w, "cosh")
    sh = _even_series(w, "sinh")
    trans = complex(ch, a3 * sh)
    refl = refl_sign * complex(a2, a1) * sh
    phase = cmath.exp(0.5j * a0)
    trans_bar = trans * cmath.exp(-0.5j * a3)
    return CouplerParams(a.kind, trans, refl, phase, trans_bar, SOURCE_ANGLES)


def heisenberg_matrix(p: CouplerParams) -> np.ndarray:
    """2x2 mode-operator transformation matrix.

    Acts on (a, b^dag) for the amplifier and on (a, c) for the converter.
    """
    t, r, ph = p.trans, p.refl, p.phase
    if p.kind == AMPLIFIER:
        m = np.array([[t, -r], [-np.conj(r), np.conj(t)]])
    else:
        m = np.array([[t, r], [-np.conj(r), np.conj(t)]])
    return ph * m


def inverse_params(p: CouplerParams) -> CouplerParams:
    """Parameters of the inverse coupler."""
    return replace(
        p,
        trans=np.conj(p.trans),
        refl=-p.refl,
        phase=np.conj(p.phase),
        trans_bar=np.conj(p.trans_bar),
    )


def swap_modes(p: CouplerParams) -> CouplerParams:
    """Parameters after interchanging the signal and idler modes."""
    if p.kind == AMPLIFIER:
        return replace(p, phase=np.conj(p.phase))
    return replace(
        p,
        trans=np.conj(p.trans),
        refl=-np.conj(p.refl),
        trans_bar=np.conj(p.trans_bar),
    )


def _pair_exponential(coef: complex, left: np.ndarray, right: np.ndarray,
                      dims: tuple[int, int]) -> np.ndarray:
    """exp(coef * left (x) right) for nilpotent ladder products, by exact series."""
    d1, d2 = dims
    n = d1 * d2
    out = np.eye(n, dtype=complex)
    if coef == 0:
        return out
    step = np.kron(left, right)
    term = np.eye(n, dtype=complex)
    for j in range(1, min(d1, d2) + 1):
        term = (coef / j) * (term @ step)
        if not term.any():
            break
        out += term
    return out


def _diag_power(base: complex, exponent_sign: int, cutoff: int) -> np.ndarray:
    """Diagonal matrix base**(sign*n) over n = 0..cutoff-1."""
    if base == 0:
        raise DegenerateCouplerError("zero base in diagonal power operator")
    n = np.arange(cutoff)
    return np.power(complex(base), exponent_sign * n)


def two_mode_unitary(p: CouplerParams, d1: int, d2: int,
                     interior_guard: float | None = 1e-6) -> TwoModeOperator:
    """Truncated coupler unitary from the factored normal-ordered product.

    Matrix elements inside the box are exact for the amplifier; converter
    columns are exact while the total photon number fits the box.  Column-norm
    deficits (mass pushed past the cutoff) are attached to the result, and
    interior columns exceeding ``interior_guard`` raise a TruncationError.
    Pass None to skip the guard and inspect the deficits yourself.
    """
    if d1 < 1 or d2 < 1:
        raise ValueError("cutoffs must be positive")
    t, r, ph = p.trans, p.refl, p.phase
    create1 = ladder(CREATION, d1).entries
    create2 = ladder(CREATION, d2).entries
    annih1 = ladder(ANNIHILATION, d1).entries
    annih2 = ladder(ANNIHILATION, d2).entries
    eye1 = np.eye(d1, dtype=complex)
    eye2 = np.eye(d2, dtype=complex)

    if p.kind == AMPLIFIER:
        left_diag = np.kron(np.diag(_diag_power(np.conj(ph * t), -1, d1)), eye2)
        pair_up = _pair_exponential(-np.conj(ph) * r, create1, create2, (d1, d2))
        pair_down = _pair_exponential(ph * np.conj(r), annih1, annih2, (d1, d2))
        right_diag = np.kron(eye1, np.diag(_diag_power(ph * np.conj(t), -1, d2)))
        u = (1.0 / np.conj(p.trans_bar)) * left_diag @ pair_up @ pair_down @ right_diag
    else:
        if abs(t) < 1e-8:
            raise DegenerateCouplerError(
                "factored converter product needs |T| >= 1e-8; "
                "use the generator exponential for full conversion"
            )
        left_diag = np.kron(np.diag(_diag_power(ph * t, +1, d1)), eye2)
        pair_up = _pair_exponential(-ph * np.conj(r), annih1, create2, (d1, d2))
        pair_down = _pair_exponential(np.conj(ph) * r, create1, annih2, (d1, d2))
        right_diag = np.kron(eye1, np.diag(_diag_power(np.conj(ph) * t, -1, d2)))
        u = left_diag @ pair_up @ pair_down @ right_diag

    norms = np.sum(np.abs(u) ** 2, axis=0)
    deficit = 1.0 - norms
    if interior_guard is not None:
        n1, n2 = np.divmod(np.arange(d1 * d2), d2)
        interior = n1 + n2 <= min(d1, d2) // 2
        worst = float(np.max(np.abs(deficit[interior])))
        if worst > interior_guard:
            raise TruncationError(
                f"interior column norm deficit {worst:.3e} exceeds "
                f"{interior_guard:.1e}; increase the cutoff"
            )
    return TwoModeOperator(u, (d1, d2), col_deficit=deficit)


def _two_mode_generator(a: CouplerAngles, d1: int, d2: int) -> np.ndarray:
    a0, a1, a2, a3 = a.angles
    create1 = ladder(CREATION, d1).entries
    create2 = ladder(CREATION, d2).entries
    annih1 = ladder(ANNIHILATION, d1).entries
    annih2 = ladder(ANNIHILATION, d2).entries
    num1 = ladder(NUMBER, d1).entries
    num2 = ladder(NUMBER, d2).entries
    eye1 = np.eye(d1, dtype=complex)
    eye2 = np.eye(d2, dtype=complex)
    if a.kind == AMPLIFIER:
        up = np.kron(create1, create2)
        down = np.kron(annih1, annih2)
        g0 = 0.5 * (np.kron(num1 + eye1, eye2) - np.kron(eye1, num2))
        g3 = 0.5 * (np.kron(num1 + eye1, eye2) + np.kron(eye1, num2))
    else:
        up = np.kron(create1, annih2)
        down = np.kron(annih1, create2)
        g0 = 0.5 * (np.kron(num1, eye2) + np.kron(eye1, num2))
        g3 = 0.5 * (np.kron(num1, eye2) - np.kron(eye1, num2))
    g1 = 0.5 * (up + down)
    g2 = -0.5j * (up - down)
    return a0 * g0 + a1 * g1 + a2 * g2 + a3 * g3


def generator_matrices(a: CouplerAngles, d1: int, d2: int) -> list[np.ndarray]:
    """The four truncated generator matrices for the given coupler kind."""
    out = []
    for j in range(4):
        angles = [0.0] * 4
        angles[j] = 1.0
        out.append(_two_mode_generator(CouplerAngles(a.kind, tuple(angles)), d1, d2))
    return out


def hamiltonian_oracle(a: CouplerAngles, d1: int, d2: int) -> TwoModeOperator:
    """Brute-force coupler unitary: exponential of the truncated generator.

    Independent of the factored form; elements are trustworthy on rows and
    columns whose total photon number stays well inside the box.
    """
    gen = _two_mode_generator(a, d1, d2)
    u = expi_hermitian(gen)
    if a.kind == AMPLIFIER:
        a0, _, _, a3 = a.angles
        u = cmath.exp(-0.5j * (a0 + a3)) * u
    return TwoModeOperator(u, (d1, d2))


def displacement_transport(p: CouplerParams, alpha: complex, beta: complex) -> tuple[complex, complex]:
    """Coherent displacements after pushing them through the coupler."""
    t, r, ph = p.trans, p.refl, p.phase
    alpha = complex(alpha)
    beta = complex(beta)
    if p.kind == AMPLIFIER:
        out1 = ph * (t * alpha - r * np.conj(beta))
        out2 = np.conj(ph) * (-r * np.conj(alpha) + t * beta)
    else:
        out1 = ph * (t * alpha + r * beta)
        out2 = ph * (-np.conj(r) * alpha + np.conj(t) * beta)
    return complex(out1), complex(out2)


def displacement_from_pump(beta: complex, gamma: complex, coupling: float,
                           omega: float, t: float) -> complex:
    """Effective signal displacement of a doubly pumped interaction of duration t."""
    if omega == 0:
        raise ValueError("carrier frequency must be nonzero")
    drive = 1j * coupling * beta * np.conj(gamma) / omega * (1.0 - cmath.exp(-1j * omega * t))
    return complex(1j * np.conj(drive))
