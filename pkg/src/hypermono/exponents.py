"""Validation and multiplicity grouping of hypergeometric index tuples.

The two index tuples alpha and beta determine everything downstream: the
operator, the gamma product, and the matrices.  Indices are kept as exact
``Fraction`` values whenever they parse as rationals, so that congruence
mod 1 (which decides resonance and grouping) is tested exactly; decimal
inputs fall back to a 1e-12 tolerance on fractional parts.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

Index = Union[Fraction, float]

#: absolute tolerance on fractional parts when grouping decimal inputs
GROUP_TOL = 1e-12


class LengthMismatchError(ValueError):
    """alpha and beta must have the same positive length."""


class ResonantPairError(ValueError):
    """Some alpha_i and beta_j coincide mod 1, so the operator is reducible."""

    def __init__(self, i: int, j: int, alpha_i, beta_j):
        self.i = i
        self.j = j
        super().__init__(
            f"alpha[{i}]={alpha_i} and beta[{j}]={beta_j} differ by an integer"
        )


def parse_index(text: str) -> Index:
    """Parse a single index given as 'p/q', an integer, or a decimal."""
    text = text.strip()
    try:
        return Fraction(text)
    except ValueError:
        pass
    return float(text)


def parse_index_list(text: str) -> tuple[Index, ...]:
    """Parse a comma-separated index list such as '0,1/2,-0.25'."""
    parts = [p for p in text.split(",") if p.strip()]
    if not parts:
        raise ValueError(f"empty index list: {text!r}")
    return tuple(parse_index(p) for p in parts)


def _frac_part(x: Index) -> Index:
    return x - math.floor(x)


def _is_integer(x: Index) -> bool:
    if isinstance(x, Fraction):
        return x.denominator == 1
    d = x - round(x)
    return abs(d) <= GROUP_TOL


@dataclass(frozen=True)
class ExponentData:
    """Validated index tuples together with n and lambda = (-1)**n."""

    alpha: tuple[Index, ...]
    beta: tuple[Index, ...]
    n: int
    lam: complex

    def alpha_floats(self) -> list[float]:
        return [float(a) for a in self.alpha]

    def beta_floats(self) -> list[float]:
        return [float(b) for b in self.beta]

    def describe(self) -> dict:
        return {
            "alpha": [str(a) for a in self.alpha],
            "beta": [str(b) for b in self.beta],
            "n": self.n,
            "lambda": [self.lam.real, self.lam.imag],
        }


@dataclass(frozen=True)
class MultiplicityStructure:
    """Distinct exponentials with multiplicities and chosen representatives.

    ``values[j]`` is the exponential exp(2*pi*i*rep), ``multiplicities[j]``
    how many indices share it, and ``representatives[j]`` the index chosen
    for it (minimal for the alpha side, maximal for the beta side).  Values
    are ordered by ascending representative, which fixes the row indexing
    of every matrix built from this structure.  Structures made directly
    from raw values (see :meth:`from_values`) carry no representatives.
    """

    values: tuple[complex, ...]
    multiplicities: tuple[int, ...]
    representatives: tuple[Index, ...] | None
    side: str

    def __post_init__(self):
        if len(set(self.values)) != len(self.values):
            raise ValueError("values must be pairwise distinct")
        if any(v == 0 for v in self.values):
            raise ValueError("values must be non-zero")
        if any(m < 1 for m in self.multiplicities):
            raise ValueError("multiplicities must be positive")

    @property
    def n(self) -> int:
        return sum(self.multiplicities)

    @property
    def n_values(self) -> int:
        return len(self.values)

    def pair_indices(self) -> tuple[tuple[int, int], ...]:
        """(j, r) row labels, j 1-based, r = 0..m_j-1, in matrix order."""
        out = []
        for j, m in enumerate(self.multiplicities, start=1):
            out.extend((j, r) for r in range(m))
        return tuple(out)

    @classmethod
    def from_values(cls, values: Sequence[complex],
                    multiplicities: Sequence[int] | None = None,
                    side: str = "values") -> "MultiplicityStructure":
        """Build a structure from raw distinct values (CLI cyclic checks)."""
        vals = tuple(complex(v) for v in values)
        mults = tuple(multiplicities) if multiplicities else (1,) * len(vals)
        if len(mults) != len(vals):
            raise ValueError("multiplicities and values length mismatch")
        return cls(values=vals, multiplicities=mults,
                   representatives=None, side=side)


def raw_exponent_data(alpha: Sequence[Index],
                      beta: Sequence[Index]) -> ExponentData:
    """Build ExponentData without the irreducibility check.

    Kernel-level Fourier identities hold for any real indices; only the
    monodromy and local-basis layers need alpha_i - beta_j never integral.
    """
    alpha = tuple(alpha)
    beta = tuple(beta)
    if not alpha or not beta or len(alpha) != len(beta):
        raise LengthMismatchError(
            f"need equal nonempty tuples, got {len(alpha)} and {len(beta)}"
        )
    n = len(alpha)
    return ExponentData(alpha=alpha, beta=beta, n=n, lam=complex((-1) ** n))


def validate_irreducible(alpha: Sequence[Index],
                         beta: Sequence[Index]) -> ExponentData:
    """Check lengths and the no-resonance condition alpha_i - beta_j not in Z.

    Exact rational inputs are checked exactly; decimals with tolerance
    ``GROUP_TOL`` on the fractional part of the difference.
    """
    alpha = tuple(alpha)
    beta = tuple(beta)
    if not alpha or not beta or len(alpha) != len(beta):
        raise LengthMismatchError(
            f"need equal nonempty tuples, got {len(alpha)} and {len(beta)}"
        )
    for x in (*alpha, *beta):
        if isinstance(x, complex):
            raise TypeError("indices must be real (rational or decimal)")
    for i, a in enumerate(alpha):
        for j, b in enumerate(beta):
            if _is_integer(a - b):
                raise ResonantPairError(i, j, a, b)
    return raw_exponent_data(alpha, beta)


def group_exponents(data: ExponentData, side: str) -> MultiplicityStructure:
    """Group one side's indices by their exponential exp(2*pi*i*x).

    Indices congruent mod 1 share an exponential.  The representative is
    the member with minimal value on the alpha side and maximal on the
    beta side; groups are ordered by ascending representative.
    """
    if side not in ("alpha", "beta"):
        raise ValueError(f"side must be 'alpha' or 'beta', got {side!r}")
    xs = data.alpha if side == "alpha" else data.beta

    # each group: [fractional key, list of members]
    groups: list[list] = []
    for x in xs:
        f = _frac_part(x)
        placed = False
        for g in groups:
            key = g[0]
            if isinstance(key, Fraction) and isinstance(f, Fraction):
                same = key == f
            else:
                d = abs(float(key) - float(f))
                same = min(d, 1.0 - d) <= GROUP_TOL
            if same:
                g[1].append(x)
                placed = True
                break
        if not placed:
            groups.append([f, [x]])

    pick = min if side == "alpha" else max
    entries = []
    for key, members in groups:
        rep = pick(members)
        entries.append((rep, len(members), cmath.exp(2j * math.pi * float(key))))
    entries.sort(key=lambda e: float(e[0]))

    return MultiplicityStructure(
        values=tuple(e[2] for e in entries),
        multiplicities=tuple(e[1] for e in entries),
        representatives=tuple(e[0] for e in entries),
        side=side,
    )
