"""Shared configurations and small oracles for the test suite."""

from fractions import Fraction as F

import numpy as np
import pytest

from hypermono.exponents import validate_irreducible

# Ten rational configurations, n = 1..4, exponents in [0, 1), including
# resonant members (repeated alpha values).  All keep (beta - alpha)
# pairable positive where the smooth circle kernel is needed.
SUITE = [
    ((F(0),), (F(1, 2),)),
    ((F(1, 4),), (F(3, 4),)),
    ((F(0), F(0)), (F(1, 4), F(1, 2))),          # resonant, m = 2 at A = 1
    ((F(0), F(1, 2)), (F(1, 4), F(3, 4))),
    ((F(1, 3), F(2, 3)), (F(1, 4), F(1, 2))),
    ((F(0), F(1, 3), F(2, 3)), (F(1, 4), F(1, 2), F(3, 4))),
    ((F(0), F(0), F(1, 2)), (F(1, 4), F(1, 3), F(3, 4))),   # resonant
    ((F(1, 5), F(2, 5), F(3, 5)), (F(1, 6), F(1, 2), F(5, 6))),
    ((F(0), F(1, 4), F(1, 2), F(3, 4)), (F(1, 8), F(3, 8), F(5, 8), F(7, 8))),
    ((F(0), F(0), F(1, 3), F(2, 3)), (F(1, 8), F(1, 4), F(5, 8), F(3, 4))),  # resonant
]


def suite_data():
    return [validate_irreducible(a, b) for a, b in SUITE]


@pytest.fixture(scope="session")
def suite():
    return suite_data()


def exact_exponentials(xs):
    """exp(2 pi i x) for each index, with multiplicity, as a sorted list."""
    return [np.exp(2j * np.pi * float(x)) for x in xs]


def random_unit_structure(rng, n_max=6, min_gap=0.06):
    """Random distinct unit-circle values with multiplicities summing <= n_max."""
    from hypermono.exponents import MultiplicityStructure

    while True:
        k = rng.integers(1, 4)
        angles = np.sort(rng.uniform(0.0, 1.0, size=k))
        gaps = np.diff(np.concatenate([angles, [angles[0] + 1.0]]))
        if np.all(gaps > min_gap):
            break
    values = np.exp(2j * np.pi * angles)
    room = n_max - k
    mults = np.ones(k, dtype=int)
    for _ in range(rng.integers(0, room + 1)):
        mults[rng.integers(0, k)] += 1
    return MultiplicityStructure.from_values(values, mults.tolist())
