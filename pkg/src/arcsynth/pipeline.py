"""End-to-end runs: synthesize S or V for one problem and certify it."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .boundary import DEFAULT_QUAD, CircleArc, QuadratureConfig, arc_complement, log_integral
from .errors import NotSchurError
from .rational import RationalFn, certify_schur
from .synthesis import (
    DEFAULT_SYNTH,
    EvalCache,
    MatrixFn2,
    SynthesisConfig,
    assemble_pair,
    diagonal_embedding,
)
from .verification import (
    AE_NOTE,
    DEFAULT_TOL,
    BoundaryGrid,
    Report,
    entry_bound_residual,
    exterior_witness_agreement,
    full_grids,
    make_report,
    necessity_margin,
    psd_residual,
    unitarity_residual,
)

BLASCHKE_TOL = 1e-10


@dataclass(frozen=True)
class VerifyConfig:
    n_grid: int = 512
    tol: float = DEFAULT_TOL
    n_interior: int = 16

    def interior_points(self) -> np.ndarray:
        k = np.arange(self.n_interior)
        radii = np.array([0.3, 0.6, 0.85, 0.95])[k % 4]
        return radii * np.exp(1j * (0.7 + 2 * math.pi * k / self.n_interior))


@dataclass
class Outcome:
    """Matrices and reports of one problem; `branch` is 'darlington' or 'diagonal'."""

    branch: str
    reports: dict = field(default_factory=dict)
    matrices: dict = field(default_factory=dict)


def config_echo(synth: SynthesisConfig, verify: VerifyConfig) -> dict:
    return {"eps": synth.eps, "cert_tol": synth.cert_tol, "quad": asdict(synth.quad),
            "grid": verify.n_grid, "tol": verify.tol, "interior_points": verify.n_interior}


def problem_echo(s: RationalFn, arc: CircleArc) -> dict:
    return {"s": s.reduced().to_dict(), "arc": arc.to_dict(), "arc_measure": arc.measure}


def verify_theorem1(S: MatrixFn2, arc: CircleArc, quad: QuadratureConfig, verify: VerifyConfig,
                    cache: Optional[EvalCache] = None) -> dict:
    cache = EvalCache() if cache is None else cache
    grids = full_grids(arc, verify.n_grid, quad.rho, quad.endpoint_margin)
    return {
        "unitarity_on_arc": (unitarity_residual(S, grids[0], quad, cache), verify.tol),
        "entry_bound": (entry_bound_residual(S, grids, verify.interior_points(), quad, cache),
                        verify.tol),
        "exterior_witness_on_arc": (exterior_witness_agreement(S, grids[0], quad, cache), verify.tol),
    }


def verify_theorem2(V: MatrixFn2, s: RationalFn, arc: CircleArc, eps: float, quad: QuadratureConfig,
                    verify: VerifyConfig, cache: Optional[EvalCache] = None) -> dict:
    cache = EvalCache() if cache is None else cache
    grids = full_grids(arc, verify.n_grid, quad.rho, quad.endpoint_margin)
    checks = {
        "unitarity_on_arc": (unitarity_residual(V, grids[0], quad, cache), verify.tol),
        "entry_bound": (entry_bound_residual(V, grids, verify.interior_points(), quad, cache),
                        verify.tol),
        "necessity": (max(0.0, -necessity_margin(V, grids, s, quad, cache)), verify.tol),
    }
    if len(grids) > 1:
        checks["psd_on_complement"] = (psd_residual(V, grids[1], eps, s, quad, cache), verify.tol)
    return checks


def verify_diagonal(D: MatrixFn2, verify: VerifyConfig) -> dict:
    grid = BoundaryGrid.on(CircleArc.full(), verify.n_grid)
    return {
        "unitarity_full_circle": (unitarity_residual(D, grid), BLASCHKE_TOL),
        "entry_bound": (entry_bound_residual(D, grid, verify.interior_points()), BLASCHKE_TOL),
    }


def run(s: RationalFn, arc: CircleArc, synth: SynthesisConfig = DEFAULT_SYNTH,
        verify: VerifyConfig = VerifyConfig(), theorems=(1, 2)) -> Outcome:
    """Synthesize and certify; finite Blaschke inputs go to the diagonal embedding."""
    s = s.reduced()
    cert = certify_schur(s, synth.cert_tol)
    if not cert.is_schur:
        raise NotSchurError(f"not a Schur function (sup |s| = {cert.sup_bound:.6g})")
    echo = problem_echo(s, arc)
    cfg = config_echo(synth, verify)
    if cert.is_finite_blaschke:
        D = diagonal_embedding(s, cert_tol=synth.cert_tol)
        out = Outcome("diagonal")
        rep = make_report(verify_diagonal(D, verify), echo, cfg,
                          {"branch": "diagonal", "sup_bound": cert.sup_bound},
                          (AE_NOTE, "finite Blaschke input: diagonal embedding diag(z, s)"))
        for th in theorems:
            out.matrices[th] = D
            out.reports[th] = rep
        return out

    quad = synth.quad
    S, V, r = assemble_pair(s, arc, synth)
    cache = EvalCache()
    out = Outcome("darlington")
    comp = arc_complement(arc)
    values = {
        "branch": "darlington",
        "sup_bound": cert.sup_bound,
        "sigma_arc_at_0": float(S[0, 1].evaluate(0.0, quad).real),
        "log_integral_arc": log_integral(s, arc, quad),
        "log_integral_full_circle": log_integral(s, CircleArc.full(), quad),
    }
    dets = S.evaluate(verify.interior_points(), quad, cache)
    values["min_abs_det_interior"] = float(np.min(np.abs(np.linalg.det(dets))))
    if 1 in theorems:
        out.matrices[1] = S
        out.reports[1] = make_report(verify_theorem1(S, arc, quad, verify, cache), echo, cfg,
                                     dict(values, theorem=1))
    if 2 in theorems:
        out.matrices[2] = V
        v2 = dict(values, theorem=2, r_at_0=float(r.evaluate(0.0, quad).real),
                  complement_measure=comp.measure if comp is not None else 0.0)
        out.reports[2] = make_report(verify_theorem2(V, s, arc, synth.eps, quad, verify, cache),
                                     echo, cfg, v2)
    return out


def reverify(M: MatrixFn2, synth: SynthesisConfig = DEFAULT_SYNTH,
             verify: VerifyConfig = VerifyConfig()) -> Report:
    """Recompute the residual checks of a deserialized matrix descriptor."""
    meta = M.meta
    s = RationalFn.from_dict(meta["s"])
    if meta.get("branch") == "diagonal":
        return make_report(verify_diagonal(M, verify))
    arc = CircleArc.from_dict(meta["arc"])
    if meta.get("theorem") == 2:
        eps = float(meta.get("eps", synth.eps))
        return make_report(verify_theorem2(M, s, arc, eps, synth.quad, verify))
    return make_report(verify_theorem1(M, arc, synth.quad, verify))
