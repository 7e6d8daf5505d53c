"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines.
The configuration suite lives in conftest.SUITE: ten rational
configurations with n = 1..4 including resonant members.
"""

import cmath
import math
import time
from fractions import Fraction as F

import numpy as np
import pytest

from hypermono.circle_solutions import ft_residuals
from hypermono.exponents import (
    MultiplicityStructure,
    raw_exponent_data,
    validate_irreducible,
)
from hypermono.gammaprod import (
    gamma_identity_residual,
    pw_growth_check,
    stirling_bound_check,
)
from hypermono.matrices import (
    char_poly,
    companion_data,
    cyclic_conjugate,
    poly_from_roots,
)
from hypermono.monodromy import (
    monodromy_matrices,
    pseudoreflection_check,
    replication_identity_check,
)
from hypermono.ode_oracle import (
    PathSpec,
    arc,
    companion_system,
    compare_invariants,
    loop_monodromy,
    transport,
)

from conftest import random_unit_structure


def _report(num, label, passed, detail):
    print(f"[{'PASS' if passed else 'FAIL'}] criterion {num}: {label} ({detail})")
    assert passed, f"criterion {num}: {label}: {detail}"


def test_criterion_1_eigenvalue_theorem(suite):
    t0 = time.time()
    worst = 0.0
    for data in suite:
        res = monodromy_matrices(data, "f")
        p0 = poly_from_roots(
            [np.exp(2j * np.pi * float(a)) for a in data.alpha], [1] * data.n
        )
        pinf = poly_from_roots(
            [np.exp(-2j * np.pi * float(b)) for b in data.beta], [1] * data.n
        )
        worst = max(worst, float(np.max(np.abs(char_poly(res.m0) - p0))))
        worst = max(worst, float(np.max(np.abs(char_poly(res.minf) - pinf))))
    elapsed = time.time() - t0
    _report(1, "local eigenvalue structure", worst <= 1e-9 and elapsed < 10.0,
            f"max charpoly deviation {worst:.2e}, {elapsed:.2f}s")


def test_criterion_2_oracle_agreement(suite):
    t0 = time.time()
    worst = 0.0
    for data in suite:
        sys = companion_system(data)
        m0 = loop_monodromy(sys, data, 0)
        ml = loop_monodromy(sys, data, "lambda")
        report = compare_invariants(monodromy_matrices(data, "A"), (m0, ml), tol=1e-6)
        assert report.passed, (data.alpha, report.to_jsonable())
        worst = max(worst, report.max_residual())
    elapsed = time.time() - t0
    _report(2, "ODE transport agreement", worst <= 1e-6 and elapsed < 120.0,
            f"max invariant residual {worst:.2e}, {elapsed:.1f}s")


def test_criterion_3_pseudoreflection(suite):
    ok = True
    worst = 0.0
    for data in suite:
        report = pseudoreflection_check(monodromy_matrices(data, "f"))
        ok = ok and report.passed
        worst = max(worst, report.max_residual())
    _report(3, "rank(Mlambda - I) = 1", ok,
            f"max second singular-value ratio {worst:.2e}")


def test_criterion_4_cyclic_form():
    rng = np.random.default_rng(2024)
    worst_off = worst_poly = worst_col = 0.0
    for _ in range(50):
        ms = random_unit_structure(rng, n_max=6)
        l = int(rng.integers(-3, 4))
        C = cyclic_conjugate(ms, l).entries
        n = ms.n
        pattern = np.zeros((n, n), dtype=complex)
        pattern[:, 0] = C[:, 0]
        pattern[np.arange(n - 1), np.arange(1, n)] = 1.0
        scale = max(1.0, float(np.max(np.abs(C))))
        worst_off = max(worst_off, float(np.max(np.abs(C - pattern))) / scale)
        P = poly_from_roots(ms.values, ms.multiplicities)
        worst_poly = max(worst_poly, float(np.max(np.abs(char_poly(C) - P))))
        worst_col = max(
            worst_col, float(np.max(np.abs(C[:, 0] - companion_data(ms, l)))) / scale
        )
    anchor = cyclic_conjugate(MultiplicityStructure.from_values([2.0, 3.0]), 1).entries
    anchor_ok = np.allclose(anchor, [[5, 1], [-6, 0]], atol=1e-10)
    ok = worst_off <= 1e-9 and worst_poly <= 1e-8 and worst_col <= 1e-9 and anchor_ok
    _report(4, "cyclic conjugation form", ok,
            f"off-pattern {worst_off:.2e}, charpoly {worst_poly:.2e}, "
            f"companion {worst_col:.2e}, anchor {'ok' if anchor_ok else 'BAD'}")


def test_criterion_5_fourier_identity():
    data1 = raw_exponent_data((F(0),), (F(1),))
    res1 = ft_residuals(data1, [-3, -2, -1, 0, 1, 2, 3, 1j, -1j])
    anchor = res1[3]
    data2 = validate_irreducible((F(0), F(1, 2)), (F(3, 4), F(5, 4)))
    res2 = ft_residuals(data2, [-1, 0, 1, 1j])
    data3 = validate_irreducible(
        (F(0), F(1, 3), F(2, 3)), (F(1, 2), F(3, 4), F(5, 4))
    )
    res3 = ft_residuals(data3, [0, 1])
    ok = max(res1) <= 1e-8 and max(res2) <= 1e-6 and max(res3) <= 1e-6
    _report(5, "Fourier transform of the kernel", ok,
            f"n=1 {max(res1):.2e} (anchor {anchor:.2e}), "
            f"n=2 {max(res2):.2e}, n=3 {max(res3):.2e}")


def test_criterion_6_functional_identity(suite):
    rng = np.random.default_rng(99)
    worst = 0.0
    for data in suite:
        for _ in range(100):
            s = complex(rng.uniform(-5, 5), rng.uniform(-5, 5))
            worst = max(worst, gamma_identity_residual(data, s))
    _report(6, "gamma functional identity", worst <= 1e-10,
            f"max residual {worst:.2e} over 1000 points")


def test_criterion_7_replication_identity():
    worst = 0.0
    ok = True
    for alphas, betas in [
        ((F(0), F(1, 2)), (F(1, 4), F(3, 4))),       # non-resonant
        ((F(0), F(0)), (F(1, 4), F(1, 2))),          # resonant
    ]:
        data = validate_irreducible(alphas, betas)
        report = replication_identity_check(data, tol=1e-5, sides=("A", "B"))
        ok = ok and report.passed
        worst = max(worst, report.max_residual())
    _report(7, "replication identity on the circle", ok and worst <= 1e-5,
            f"max residual {worst:.2e} over 2 configs x 2 sides x 5 phi")


def test_criterion_8_resonant_jordan_block():
    data = validate_irreducible((F(0), F(0)), (F(1, 4), F(1, 2)))
    worst_sq = 0.0
    min_first = np.inf
    for basis in ("A", "f"):
        M0 = monodromy_matrices(data, basis).m0.entries
        N = M0 - np.eye(2)
        worst_sq = max(worst_sq, float(np.max(np.abs(N @ N))))
        min_first = min(min_first, float(np.max(np.abs(N))))
    ok = worst_sq <= 1e-9 and min_first > 1e-9
    _report(8, "resonant single 2-block", ok,
            f"|(M0-I)^2| {worst_sq:.2e}, |M0-I| {min_first:.2e}")


def test_criterion_9_growth_bounds(suite):
    xs = np.arange(-20, 21, dtype=float)
    grid = [complex(x, y) for x in xs for y in xs if not (y == 0 and x <= 0)]
    stirling = stirling_bound_check(grid, C=5.0)
    max_ratio = stirling.checks["stirling_bound"].residual
    ok = stirling.passed
    worst_slope_excess = -np.inf
    for data in suite:
        rep = pw_growth_check(data, ymax=40.0)
        ok = ok and rep.passed
        worst_slope_excess = max(
            worst_slope_excess,
            rep.checks["pw_slope"].residual - math.pi * data.n,
        )
    _report(9, "reciprocal-gamma growth bounds", ok,
            f"max bound ratio {max_ratio:.3f}, "
            f"max slope excess over pi*n {worst_slope_excess:+.3f} (allowed +0.05)")


def test_criterion_10_n1_closed_form():
    data = validate_irreducible((F(0),), (F(1, 2),))
    res = monodromy_matrices(data, "A")
    dev = max(
        abs(res.m0.entries[0, 0] - 1.0),
        abs(res.mlambda.entries[0, 0] + 1.0),
        abs(res.minf.entries[0, 0] + 1.0),
    )
    # oracle transport of sqrt(1+z) around lambda = -1
    sys = companion_system(data)
    Y0 = np.array([[cmath.sqrt(0.5)]])
    path = PathSpec(
        pieces=(arc(-1.0, 0.5, 0.0, 2 * math.pi, (0.0 + 0j, -1.0 + 0j)),), base=-0.5
    )
    Y1 = transport(sys, path, Y0)
    oracle_dev = abs(Y1[0, 0] / Y0[0, 0] + 1.0)
    ok = dev <= 1e-10 and oracle_dev <= 1e-8
    _report(10, "n=1 closed-form pipeline", ok,
            f"matrix deviation {dev:.2e}, transport deviation {oracle_dev:.2e}")
