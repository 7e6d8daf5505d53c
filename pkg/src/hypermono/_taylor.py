"""Truncated Taylor (jet) arithmetic on plain coefficient arrays.

Coefficients are ordinary Taylor coefficients a_k of sum a_k tau**k,
stored as 1-d complex ndarrays of length order+1.  Conversion to the
normalized (d/(2 pi i dt))**r convention happens at module boundaries.
"""

from __future__ import annotations

import math

import numpy as np


def tconst(c, order: int) -> np.ndarray:
    out = np.zeros(order + 1, dtype=complex)
    out[0] = c
    return out


def tlinear(c0, c1, order: int) -> np.ndarray:
    """Jet of c0 + c1*tau."""
    out = np.zeros(order + 1, dtype=complex)
    out[0] = c0
    if order >= 1:
        out[1] = c1
    return out


def tmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    order = len(a) - 1
    out = np.zeros(order + 1, dtype=complex)
    for k in range(order + 1):
        out[k] = np.dot(a[: k + 1], b[k::-1])
    return out


def tpow_int(a: np.ndarray, k: int) -> np.ndarray:
    order = len(a) - 1
    out = tconst(1.0, order)
    for _ in range(k):
        out = tmul(out, a)
    return out


def texp(a: np.ndarray) -> np.ndarray:
    """exp of a jet; uses g' = a' g so no series truncation error."""
    order = len(a) - 1
    out = np.zeros(order + 1, dtype=complex)
    out[0] = np.exp(a[0])
    for k in range(1, order + 1):
        acc = 0.0 + 0.0j
        for j in range(1, k + 1):
            acc += j * a[j] * out[k - j]
        out[k] = acc / k
    return out


def tsin_pi_over_pi(order: int) -> np.ndarray:
    """Jet of sin(pi tau)/pi at tau = 0."""
    out = np.zeros(order + 1, dtype=complex)
    for j in range(0, (order - 1) // 2 + 1 if order >= 1 else 0):
        k = 2 * j + 1
        out[k] = (-1) ** j * math.pi ** (2 * j) / math.factorial(k)
    return out


def to_normalized(taylor: np.ndarray) -> np.ndarray:
    """Taylor a_r  ->  normalized c_r = r! a_r / (2 pi i)**r."""
    order = len(taylor) - 1
    scale = np.array(
        [math.factorial(r) / (2j * math.pi) ** r for r in range(order + 1)],
        dtype=complex,
    )
    return taylor * scale


def from_normalized(coeffs: np.ndarray) -> np.ndarray:
    order = len(coeffs) - 1
    scale = np.array(
        [(2j * math.pi) ** r / math.factorial(r) for r in range(order + 1)],
        dtype=complex,
    )
    return np.asarray(coeffs, dtype=complex) * scale
