"""Acceptance criteria, one test per criterion.

Each test records a single PASS/FAIL line (shown in the pytest terminal
summary, or printed when this file is run as a script).
"""

import json
import math
import time
from dataclasses import replace

import numpy as np
import pytest

from arcsynth.boundary import DEFAULT_QUAD, CircleArc, arc_complement, localized_outer_eval, sigma_arc_eval
from arcsynth.pipeline import VerifyConfig
from arcsynth.rational import ComplexPoly, RationalFn
from arcsynth.sweep import dumps, run_sweep
from arcsynth.synthesis import SynthesisConfig, assemble_pair, assemble_S, diagonal_embedding
from arcsynth.verification import (
    BoundaryGrid,
    entry_bound_residual,
    exterior_witness_agreement,
    full_grids,
    proposition1_ratio_residual,
    psd_residual,
    unitarity_residual,
)

RESULTS = []

HALF = CircleArc(0, math.pi)
FULL = CircleArc.full()
Z2 = RationalFn.from_coeffs([0, 0.5])
INTERIOR = VerifyConfig().interior_points()


def record(n: int, ok: bool, detail: str):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


def radial(arc, n, rho=DEFAULT_QUAD.rho):
    return BoundaryGrid.on(arc, n, rho).points()


def random_outer(rng, k_zeros=2, k_poles=2):
    zs = rng.uniform(1.2, 3, k_zeros) * np.exp(1j * rng.uniform(0, 2 * np.pi, k_zeros))
    ps = rng.uniform(1.2, 3, k_poles) * np.exp(1j * rng.uniform(0, 2 * np.pi, k_poles))
    o = RationalFn(ComplexPoly.from_roots(zs), ComplexPoly.from_roots(ps))
    c = complex(o(0.0))
    return o * (abs(c) / c)  # o(0) > 0


def random_arc(rng):
    a = rng.uniform(0, 2 * np.pi)
    return CircleArc(a, a + rng.uniform(0.2, 1.8) * np.pi)


def test_criterion_1_closed_form_full_circle():
    t0 = time.perf_counter()
    S = assemble_S(Z2, FULL)
    z = np.concatenate([radial(FULL, 64), 0.9 * INTERIOR])
    got = S.evaluate(z)
    r3 = math.sqrt(3) / 2
    want = np.empty_like(got)
    want[:, 0, 0], want[:, 0, 1], want[:, 1, 0], want[:, 1, 1] = -0.5, r3, r3 * z, z / 2
    err = float(np.max(np.abs(got - want)))
    unit = unitarity_residual(S, BoundaryGrid.on(FULL))
    dt = time.perf_counter() - t0
    record(1, err <= 1e-8 and unit <= 1e-6 and dt < 1,
           f"entry error {err:.2e} (<= 1e-8), unitarity {unit:.2e} (<= 1e-6), {dt:.2f}s (< 1s)")


def test_criterion_2_local_case():
    t0 = time.perf_counter()
    quad = replace(DEFAULT_QUAD, rho=1 - 1e-5)
    S = assemble_S(Z2, HALF, SynthesisConfig(quad=quad))
    sig0 = complex(sigma_arc_eval(Z2, HALF, 0.0, quad))
    sig_err = abs(sig0 - 0.75 ** 0.25)
    grids = full_grids(HALF, 512, quad.rho, quad.endpoint_margin)
    unit = unitarity_residual(S, grids[0], quad)
    bound = entry_bound_residual(S, grids, INTERIOR, quad)
    dt = time.perf_counter() - t0
    record(2, sig_err <= 1e-8 and unit <= 1e-3 and bound <= 1e-3 and dt < 5,
           f"|sigma(0) - (3/4)^(1/4)| {sig_err:.2e}, unitarity {unit:.2e} at rho=1-1e-5, "
           f"entry bound {bound:.2e}, {dt:.2f}s (< 5s)")


def test_criterion_3_theorem2():
    t0 = time.perf_counter()
    _, V, _ = assemble_pair(Z2, HALF, SynthesisConfig(eps=0.25))
    grids = full_grids(HALF)
    unit = unitarity_residual(V, grids[0])
    psd = psd_residual(V, grids[1], 0.25, Z2)
    dt = time.perf_counter() - t0
    record(3, unit <= 1e-3 and psd <= 1e-3 and dt < 10,
           f"V unitarity {unit:.2e}, psd incl. w11 >= 7/9 and det margins {psd:.2e}, {dt:.2f}s (< 10s)")


def test_criterion_4_blaschke_branch():
    t0 = time.perf_counter()
    s = RationalFn.from_coeffs([-0.5, 1], [1, -0.5])
    D = diagonal_embedding(s)
    unit = unitarity_residual(D, BoundaryGrid.on(FULL))
    dt = time.perf_counter() - t0
    record(4, unit <= 1e-10 and dt < 1, f"diagonal embedding unitarity {unit:.2e} (<= 1e-10), {dt:.2f}s")


def test_criterion_5_exterior_witness():
    w1 = exterior_witness_agreement(assemble_S(Z2, FULL), BoundaryGrid.on(FULL))
    quad = replace(DEFAULT_QUAD, rho=1 - 1e-5)
    S2 = assemble_S(Z2, HALF, SynthesisConfig(quad=quad))
    w2 = exterior_witness_agreement(S2, BoundaryGrid.on(HALF, rho=quad.rho), quad)
    _, V, _ = assemble_pair(Z2, HALF)
    w3 = exterior_witness_agreement(V, BoundaryGrid.on(HALF))
    record(5, w1 <= 1e-5 and w2 <= 1e-3 and w3 <= 1e-3,
           f"case 1 {w1:.2e} (<= 1e-5), case 2 {w2:.2e}, case 3 {w3:.2e} (<= 1e-3)")


def test_criterion_6_factorization_identity():
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(10):
        o = random_outer(rng)
        arc = random_arc(rng)
        z = np.sqrt(rng.uniform(0, 0.9, 20)) * np.exp(1j * rng.uniform(0, 2 * np.pi, 20))
        prod = localized_outer_eval(o, arc, z) * localized_outer_eval(o, arc_complement(arc), z)
        worst = max(worst, float(np.max(np.abs(prod - o(z)))))
    record(6, worst <= 1e-6, f"max |O(.,arc) O(.,arc') - O| over 10 outers x 20 points {worst:.2e} (<= 1e-6)")


def test_criterion_7_proposition1_ratio():
    rng = np.random.default_rng(77)
    worst = 0.0
    for _ in range(10):
        o = random_outer(rng)
        k = int(rng.integers(1, 4))
        b = RationalFn.blaschke(list(0.9 * np.sqrt(rng.uniform(0, 1, k)) * np.exp(1j * rng.uniform(0, 6.3, k))))
        arc = random_arc(rng)
        worst = max(worst, proposition1_ratio_residual(b * o, o, arc, BoundaryGrid.on(arc)))
    record(7, worst <= 1e-6, f"max ratio residual over 10 pairs (b*o, o) {worst:.2e} (<= 1e-6)")


@pytest.fixture(scope="module")
def sweep_runs():
    t0 = time.perf_counter()
    first = run_sweep(42, 50)
    dt = time.perf_counter() - t0
    second = run_sweep(42, 50)
    return first, second, dt


def test_criterion_8_property_sweep(sweep_runs):
    first, second, dt = sweep_runs
    worst = max(first["max_residuals"].values())
    same = dumps(first) == dumps(second)
    record(8, first["verdict"] == "pass" and worst <= 1e-3 and same and dt < 60,
           f"seed 42, 50 cases ({first['branches']['diagonal']} Blaschke): max residual {worst:.2e}, "
           f"byte-identical rerun {same}, {dt:.1f}s (< 60s)")


def test_criterion_9_necessity(sweep_runs):
    first, _, _ = sweep_runs
    margins = [c["residuals"]["theorem2"]["necessity"] for c in first["cases"]
               if c["branch"] == "darlington"]
    worst = -max(margins)
    record(9, worst >= -1e-3, f"min over swept V of 1-|s|^2-|v12|^2 >= {worst:.2e} (>= -1e-3), "
                              f"{len(margins)} cases")


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q"]))
