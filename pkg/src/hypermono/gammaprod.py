"""Reciprocal gamma, balanced gamma products, and their shift-parameter jets.

The balanced product

    G(s) = 1 / (prod_i Gamma(s - alpha_i + 1) * prod_i Gamma(-s + beta_i + 1))

is entire, and its Taylor jets in the shift parameter t (normalized by
powers of 2*pi*i) supply the coefficients of every local solution series.
Reciprocal gamma is a Lanczos rational approximation for Re s >= 1/2 and
the reflection 1/Gamma(s) = sin(pi s)/pi * Gamma(1-s) otherwise, so the
zeros at non-positive integers come out exact.

An optional extended-precision mode (about 30 significant digits, via
mpmath) can be switched on for oracle comparisons that want headroom; the
results are rounded back to complex128 on return.
"""

from __future__ import annotations

import cmath
import math
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
import scipy.special as sp

from . import _taylor as tj
from .exponents import ExponentData, Index
from .report import VerificationReport

__all__ = [
    "Jet",
    "reciprocal_gamma",
    "gamma",
    "balanced_gamma",
    "balanced_gamma_jet",
    "gamma_identity_residual",
    "stirling_bound_check",
    "pw_growth_check",
    "set_precision",
    "get_precision",
    "precision_context",
]

# Lanczos g = 607/128, 15 terms (Godfrey's coefficients); relative error
# of Gamma is a few ulp on the half-plane Re z >= 1/2.
_LANCZOS_G = 607.0 / 128.0
_LANCZOS_C = (
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
)

_PRECISION = "double"
_EXTENDED_DPS = 30


def set_precision(mode: str) -> None:
    global _PRECISION
    if mode not in ("double", "extended"):
        raise ValueError(f"precision must be 'double' or 'extended', got {mode!r}")
    _PRECISION = mode


def get_precision() -> str:
    return _PRECISION


@contextmanager
def precision_context(mode: str):
    old = get_precision()
    set_precision(mode)
    try:
        yield
    finally:
        set_precision(old)


def _sinpi(z: complex) -> complex:
    # reduce the real part first so near-integer arguments keep full
    # relative accuracy
    k = round(z.real)
    f = z - k
    s = cmath.sin(math.pi * f)
    return -s if k % 2 else s


def _lanczos_gamma(z: complex) -> complex:
    # valid for Re z >= 0.5
    acc = _LANCZOS_C[0]
    for k in range(1, len(_LANCZOS_C)):
        acc += _LANCZOS_C[k] / (z - 1 + k)
    t = z + (_LANCZOS_G - 0.5)
    return math.sqrt(2 * math.pi) * t ** (z - 0.5) * cmath.exp(-t) * acc


def reciprocal_gamma(s: complex) -> complex:
    """Entire function 1/Gamma(s); exact zeros at s = 0, -1, -2, ..."""
    s = complex(s)
    if get_precision() == "extended":
        import mpmath as mp

        with mp.workdps(_EXTENDED_DPS):
            return complex(mp.rgamma(mp.mpc(s.real, s.imag)))
    if s.imag == 0.0 and s.real == round(s.real) and s.real <= 0:
        return 0j
    if s.real >= 0.5:
        return 1.0 / _lanczos_gamma(s)
    return _sinpi(s) / math.pi * _lanczos_gamma(1.0 - s)


def gamma(s: complex) -> complex:
    """Gamma(s) from the same Lanczos kernel (poles raise ZeroDivisionError)."""
    r = reciprocal_gamma(s)
    if r == 0:
        raise ZeroDivisionError(f"Gamma pole at s={s}")
    return 1.0 / r


def balanced_gamma(data: ExponentData, s: complex) -> complex:
    """The entire product of 2n reciprocal gamma factors at s."""
    s = complex(s)
    if get_precision() == "extended":
        import mpmath as mp

        with mp.workdps(_EXTENDED_DPS):
            sm = mp.mpc(s.real, s.imag)
            acc = mp.mpc(1)
            for a in data.alpha:
                acc *= mp.rgamma(sm - _to_mp(a) + 1)
            for b in data.beta:
                acc *= mp.rgamma(-sm + _to_mp(b) + 1)
            return complex(acc)
    acc = 1.0 + 0.0j
    for a in data.alpha:
        acc *= reciprocal_gamma(s - float(a) + 1.0)
    for b in data.beta:
        acc *= reciprocal_gamma(-s + float(b) + 1.0)
    return acc


def _to_mp(x):
    import mpmath as mp

    if isinstance(x, Fraction):
        return mp.mpf(x.numerator) / mp.mpf(x.denominator)
    return mp.mpf(x)


# --- jets ------------------------------------------------------------------

@dataclass(frozen=True)
class Jet:
    """Normalized jet: coefficients[r] = (d/(2 pi i dt))**r F(t) at t0."""

    t0: float
    order: int
    coefficients: tuple[complex, ...]

    def __post_init__(self):
        if len(self.coefficients) != self.order + 1:
            raise ValueError("coefficient count must be order+1")

    @property
    def value(self) -> complex:
        return self.coefficients[0]


@lru_cache(maxsize=32)
def _cot_derivative_poly(k: int) -> tuple[float, ...]:
    """Coefficients (ascending in c = cot(pi y)) of d^k/dy^k cot(pi y)."""
    coeffs = [0.0, 1.0]  # P_0(c) = c
    for _ in range(k):
        # P' in c, then multiply by dc/dy = -pi (1 + c^2)
        deriv = [i * coeffs[i] for i in range(1, len(coeffs))]
        nxt = [0.0] * (len(deriv) + 2)
        for i, d in enumerate(deriv):
            nxt[i] += -math.pi * d
            nxt[i + 2] += -math.pi * d
        coeffs = nxt
    return tuple(coeffs)


def _polygamma_real(k: int, x: float) -> float:
    """psi^(k)(x) for real non-pole x.

    scipy's polygamma needs positive arguments; moderate arguments are
    shifted up by the recurrence, and very negative ones go through the
    reflection psi^(k)(x) = (-1)^k psi^(k)(1-x) - pi d^k cot(pi x)/dx^k,
    which keeps the cost independent of |x|.
    """
    if x == round(x) and x <= 0:
        raise ValueError(f"polygamma pole at {x}")
    if x < -8.0:
        c = 1.0 / math.tan(math.pi * (x - round(x)))
        poly = _cot_derivative_poly(k)
        cot_deriv = 0.0
        for coef in reversed(poly):
            cot_deriv = cot_deriv * c + coef
        return (-1.0) ** k * _polygamma_real(k, 1.0 - x) - math.pi * cot_deriv
    corr = 0.0
    while x < 8.0:
        # psi^(k)(x) = psi^(k)(x+1) - (-1)**k k! x**-(k+1)
        corr -= (-1.0) ** k * math.factorial(k) * x ** (-(k + 1))
        x += 1.0
    if k == 0:
        return float(sp.psi(x)) + corr
    return float(sp.polygamma(k, x)) + corr


def _exact_value(x) -> tuple[float, int | None]:
    """Float value of x plus its integer value when x is exactly integral."""
    if isinstance(x, Fraction):
        if x.denominator == 1:
            return float(x), int(x)
        return float(x), None
    xf = float(x)
    r = round(xf)
    if abs(xf - r) <= 1e-9:
        return xf, r
    return xf, None


def _loggamma_jet_real(x: float, order: int) -> np.ndarray:
    """Taylor jet of log Gamma(x + tau) at real non-pole x.

    The constant term is a complex log: magnitude from lgamma, imaginary
    part pi when Gamma(x) < 0, so that exponentiating restores the sign.
    """
    out = np.zeros(order + 1, dtype=complex)
    mag = math.lgamma(x)
    if x > 0 or _sinpi(complex(x)).real > 0:
        out[0] = mag
    else:
        out[0] = complex(mag, math.pi)
    for q in range(1, order + 1):
        out[q] = _polygamma_real(q - 1, x) / math.factorial(q)
    return out


def balanced_gamma_jet(data: ExponentData, t0: Index, order: int, l: int) -> Jet:
    """Normalized jet of t -> G(l + t) at t = t0.

    Assembled in log space: regular reciprocal-gamma factors contribute
    -log Gamma jets built from polygamma values (so the magnitudes of the
    2n factors, which individually overflow double range for |l| in the
    hundreds, cancel before exponentiation), while factors sitting at a
    zero contribute an exact sin(pi tau)/pi jet times a log Gamma jet via
    the reflection formula.  No finite differences anywhere.
    """
    if order < 0:
        raise ValueError("order must be >= 0")
    if get_precision() == "extended":
        return _balanced_gamma_jet_mp(data, t0, order, l)

    flip = np.array([(-1.0) ** q for q in range(order + 1)])
    log_acc = np.zeros(order + 1, dtype=complex)
    zero_jets = []
    for a in data.alpha:
        x = l + t0 - a + 1 if _same_kind(t0, a) else l + float(t0) - float(a) + 1.0
        xf, xint = _exact_value(x)
        if xint is not None and xint <= 0:
            # 1/Gamma(m+tau) = (-1)^m sin(pi tau)/pi * Gamma(1-m-tau)
            sj = tj.tsin_pi_over_pi(order)
            zero_jets.append(sj if xint % 2 == 0 else -sj)
            log_acc += _loggamma_jet_real(float(1 - xint), order) * flip
        else:
            log_acc -= _loggamma_jet_real(xf, order)
    for b in data.beta:
        y = -l - t0 + b + 1 if _same_kind(t0, b) else -l - float(t0) + float(b) + 1.0
        yf, yint = _exact_value(y)
        if yint is not None and yint <= 0:
            # 1/Gamma(m-tau) = -(-1)^m sin(pi tau)/pi * Gamma(1-m+tau)
            sj = tj.tsin_pi_over_pi(order)
            zero_jets.append(-sj if yint % 2 == 0 else sj)
            log_acc += _loggamma_jet_real(float(1 - yint), order)
        else:
            log_acc -= _loggamma_jet_real(yf, order) * flip
    acc = tj.texp(log_acc)
    for zj in zero_jets:
        acc = tj.tmul(acc, zj)
    coeffs = tj.to_normalized(acc)
    return Jet(t0=float(t0), order=order, coefficients=tuple(coeffs))


def _balanced_gamma_jet_mp(data: ExponentData, t0: Index, order: int, l: int) -> Jet:
    import mpmath as mp

    with mp.workdps(_EXTENDED_DPS):
        t0m = _to_mp(t0)

        def G(t):
            acc = mp.mpc(1)
            for a in data.alpha:
                acc *= mp.rgamma(l + t0m + t - _to_mp(a) + 1)
            for b in data.beta:
                acc *= mp.rgamma(-l - t0m - t + _to_mp(b) + 1)
            return acc

        taylor = mp.taylor(G, mp.mpf(0), order)
        coeffs = tj.to_normalized(np.array([complex(c) for c in taylor]))
    return Jet(t0=float(t0), order=order, coefficients=tuple(coeffs))


def _same_kind(a, b) -> bool:
    return isinstance(a, Fraction) and isinstance(b, Fraction)


# --- identities and growth -------------------------------------------------

def gamma_identity_residual(data: ExponentData, s: complex) -> float:
    """Relative residual of G(s) prod(s - alpha_i) = G(s-1) prod(beta_i - s + 1)."""
    s = complex(s)
    lhs = balanced_gamma(data, s)
    for a in data.alpha:
        lhs *= s - float(a)
    rhs = balanced_gamma(data, s - 1)
    for b in data.beta:
        rhs *= -(s - 1) + float(b)
    return abs(lhs - rhs) / (abs(lhs) + abs(rhs) + 1e-300)


def stirling_bound_check(s_grid, C: float) -> VerificationReport:
    """Ratio of |1/Gamma| to the (1+|s|)^(1/2-Re s) e^(arg s Im s + Re s) bound.

    The grid should avoid the negative real axis, where arg is ambiguous.
    """
    if C <= 0:
        raise ValueError("C must be positive")
    grid = [complex(s) for s in s_grid]
    if not grid:
        raise ValueError("grid must be nonempty")
    worst = 0.0
    worst_s = grid[0]
    for s in grid:
        ratio = _stirling_ratio(s)
        if ratio > worst:
            worst = ratio
            worst_s = s
    report = VerificationReport()
    report.add(
        "stirling_bound",
        passed=bool(np.isfinite(worst) and worst <= C),
        residual=worst,
        C=C,
        worst_point=[worst_s.real, worst_s.imag],
        grid_size=len(grid),
    )
    return report


def _stirling_ratio(s: complex) -> float:
    val = abs(reciprocal_gamma(s))
    arg = math.atan2(s.imag, s.real)
    bound = (1.0 + abs(s)) ** (0.5 - s.real) * math.exp(arg * s.imag + s.real)
    return val / bound


def pw_growth_check(data: ExponentData, ymax: float = 40.0,
                    slope_bound: float | None = None) -> VerificationReport:
    """Growth of log|G(iy)| along the imaginary axis.

    The product of 2n reciprocal gammas grows like exp(pi n |y|) times a
    power of |y|; the check reports the largest finite-difference slope on
    |y| <= ymax and compares it with pi*n plus a small margin.
    """
    n = data.n
    if slope_bound is None:
        slope_bound = math.pi * n + 0.05
    ys = np.arange(1.0, ymax + 1e-9, 0.5)
    logs = np.array([math.log(abs(balanced_gamma(data, 1j * y))) for y in ys])
    slopes = np.diff(logs) / np.diff(ys)
    max_slope = float(slopes.max())
    # normalized excess over pi*n stays bounded above
    excess = (logs - math.pi * n * ys) / np.log1p(ys)
    report = VerificationReport()
    report.add(
        "pw_slope",
        passed=max_slope <= slope_bound,
        residual=max_slope,
        slope_bound=slope_bound,
        pi_n=math.pi * n,
        max_normalized_excess=float(excess.max()),
    )
    return report
