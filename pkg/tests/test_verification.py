import math

import numpy as np
import pytest

from arcsynth.boundary import CircleArc, arc_complement
from arcsynth.errors import (
    CertificationError,
    DomainError,
    HypothesisViolatedError,
    WitnessSingularError,
)
from arcsynth.pipeline import VerifyConfig, reverify, run
from arcsynth.rational import ComplexPoly, RationalFn
from arcsynth.synthesis import AnalyticElement, MatrixFn2, assemble_pair, assemble_S, diagonal_embedding
from arcsynth.verification import (
    BoundaryGrid,
    Check,
    Report,
    entry_bound_residual,
    exterior_witness_agreement,
    full_grids,
    make_report,
    necessity_margin,
    proposition1_ratio_residual,
    psd_residual,
    unitarity_residual,
)

from conftest import schur_from

HALF = CircleArc(0, math.pi)
FULL = CircleArc.full()
Z = RationalFn.from_coeffs([0, 1])
Z2 = RationalFn.from_coeffs([0, 0.5])
BLASCHKE = RationalFn.from_coeffs([-0.5, 1], [1, -0.5])


def rational_matrix(*entries):
    e = [AnalyticElement.rational(f if isinstance(f, RationalFn) else RationalFn.constant(f))
         for f in entries]
    return MatrixFn2(((e[0], e[1]), (e[2], e[3])))


SWAP = rational_matrix(0, 1, 1, 0)


# -- grids -------------------------------------------------------------------------

def test_grid_stays_inside_margins():
    arc = CircleArc(1.0, 2.5)
    g = BoundaryGrid.on(arc, 100, endpoint_margin=0.01)
    assert g.angles.min() > 1.0 + 0.01 * 1.5 and g.angles.max() < 2.5 - 0.01 * 1.5
    assert len(full_grids(arc)) == 2 and len(full_grids(FULL)) == 1
    with pytest.raises(DomainError):
        BoundaryGrid.on(arc, 8)


# -- unitarity -----------------------------------------------------------------

def test_unitarity_examples():
    g = BoundaryGrid.on(FULL, 128)
    assert unitarity_residual(SWAP, g) == 0
    assert unitarity_residual(assemble_S(Z2, FULL), g) <= 1e-6
    assert unitarity_residual(rational_matrix(0.5, 0, 0, 1), g) == pytest.approx(0.75)


# -- entry bound ---------------------------------------------------------------------

def test_entry_bound_examples():
    interior = [0, 0.5j, -0.7]
    S = assemble_S(Z2, HALF)
    assert entry_bound_residual(S, full_grids(HALF), interior) <= 1e-3
    assert entry_bound_residual(rational_matrix(Z * 2, 0, 0, 0), BoundaryGrid.on(FULL), interior) == \
        pytest.approx(1.0)
    D = diagonal_embedding(BLASCHKE)
    assert entry_bound_residual(D, BoundaryGrid.on(FULL), interior) <= 1e-10


def test_entry_bound_rejects_non_smirnov_entry():
    bad = rational_matrix(RationalFn.from_coeffs([0.1], [-0.5, 1]), 0, 0, 0)
    with pytest.raises(CertificationError):
        entry_bound_residual(bad, BoundaryGrid.on(FULL))


# -- psd and necessity -----------------------------------------------------------------

def test_psd_examples():
    _, V, _ = assemble_pair(Z2, HALF)
    comp = BoundaryGrid.on(arc_complement(HALF))
    assert psd_residual(V, comp, 0.25, Z2) <= 1e-3
    assert psd_residual(rational_matrix(0, 0, 0, 0), comp, 0.25, RationalFn.constant(0)) == 0


def test_psd_detects_necessity_violation():
    # |v12|^2 = 0.81 > 1 - |s|^2 = 0.75 everywhere
    V = rational_matrix(0, 0.9, 0, Z2)
    comp = BoundaryGrid.on(arc_complement(HALF))
    assert psd_residual(V, comp, 0.25, Z2) > 0
    assert necessity_margin(V, [comp], Z2) == pytest.approx(0.75 - 0.81)


@pytest.mark.parametrize("zi, zo, po", [([0.3 + 0.2j], [1.6 - 0.4j], [-1.4 + 0.9j]),
                                         ([], [2.0], [1.5j]),
                                         ([0.6, -0.2j], [], [3.0])])
def test_necessity_on_assembled_V(zi, zo, po):
    s = schur_from(zi, zo, po, scale=0.85)
    arc = CircleArc(0.7, 2.9)
    _, V, _ = assemble_pair(s, arc)
    assert necessity_margin(V, full_grids(arc), s) >= -1e-3


# -- exterior witness ------------------------------------------------------------------

def test_witness_examples():
    assert exterior_witness_agreement(SWAP, BoundaryGrid.on(FULL)) <= 1e-12
    assert exterior_witness_agreement(assemble_S(Z2, FULL), BoundaryGrid.on(FULL)) <= 1e-5
    S = assemble_S(Z2, HALF)
    assert exterior_witness_agreement(S, BoundaryGrid.on(HALF)) <= 1e-3


def test_witness_is_local():
    S = assemble_S(Z2, HALF)
    off = exterior_witness_agreement(S, BoundaryGrid.on(arc_complement(HALF), 128))
    assert off > 0.1  # no continuation across the complementary arc


def test_witness_singular():
    with pytest.raises(WitnessSingularError):
        exterior_witness_agreement(rational_matrix(1, 0, 0, 0), BoundaryGrid.on(FULL))


# -- Proposition 1 ratio -----------------------------------------------------------------

def test_ratio_examples():
    o = RationalFn.from_coeffs([2 / 3, -1 / 3])
    g = BoundaryGrid.on(HALF)
    assert proposition1_ratio_residual(Z * o, o, HALF, g) <= 1e-6
    assert proposition1_ratio_residual(o, o, HALF, g) <= 1e-12
    b = RationalFn.blaschke([0.4 - 0.3j, -0.5])
    assert proposition1_ratio_residual(b * o, o, HALF, g) <= 1e-6


def test_ratio_checks_hypothesis():
    o = RationalFn.from_coeffs([2 / 3, -1 / 3])
    with pytest.raises(HypothesisViolatedError):
        proposition1_ratio_residual(o * 0.5, o, HALF, BoundaryGrid.on(HALF))


# -- reports -------------------------------------------------------------------------

def test_report_examples():
    assert make_report({"unitarity": (1e-7, 1e-3)}).verdict == "pass"
    assert make_report({"unitarity": (0.5, 1e-3)}).verdict == "fail"
    rep = make_report({"a": (1e-7, 1e-3), "b": Check(0.5, 1e-3)})
    assert rep.verdict == "fail"
    assert rep.checks["a"].passed and not rep.checks["b"].passed
    with pytest.raises(DomainError):
        make_report({})


def test_report_json_round_trip():
    rep = make_report({"x": (0.25, 1.0), "y": (2.0, 1.0)}, {"k": 1}, {"c": 2}, {"v": 3.5})
    back = Report.from_json(rep.to_json())
    assert back.to_json() == rep.to_json()
    assert "a.e." in rep.to_dict()["notes"][0]


def test_report_determinism():
    a = run(Z2, HALF, theorems=(1, 2))
    b = run(Z2, HALF, theorems=(1, 2))
    for th in (1, 2):
        assert a.reports[th].to_json() == b.reports[th].to_json()


# -- pipeline ------------------------------------------------------------------------

def test_run_values_and_branches():
    out = run(Z2, HALF)
    assert out.branch == "darlington"
    assert out.reports[1].values["sigma_arc_at_0"] == pytest.approx(0.9306049, abs=1e-7)
    assert out.reports[2].values["r_at_0"] == pytest.approx(0.4653025, abs=1e-7)
    assert all(r.passed for r in out.reports.values())
    out = run(BLASCHKE, HALF)
    assert out.branch == "diagonal" and out.reports[1].passed


def test_reverify_matches():
    cfg = VerifyConfig(n_grid=128)
    out = run(Z2, CircleArc(0.3, 2.0), verify=cfg)
    for th in (1, 2):
        M = MatrixFn2.from_dict(out.matrices[th].to_dict())
        again = reverify(M, verify=cfg)
        for name, c in out.reports[th].checks.items():
            assert again.checks[name].value == pytest.approx(c.value, abs=1e-9)
