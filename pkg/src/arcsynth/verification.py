"""Numerical certification of the boundary identities and matrix inequalities.

Boundary values are probed radially at ``rho * e^{i theta}`` on grids that
stay a fixed fraction of the arc length away from its endpoints; purely
rational matrices are evaluated on the circle itself.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .boundary import DEFAULT_QUAD, TWO_PI, CircleArc, QuadratureConfig, arc_complement, ratio_weight
from .errors import (
    CertificationError,
    DomainError,
    HypothesisViolatedError,
    WitnessSingularError,
    ZeroFunctionError,
)
from .rational import POLE_PROXIMITY, RationalFn, inner_outer
from .synthesis import AnalyticElement, EvalCache, ExpFactor, MatrixFn2

DEFAULT_TOL = 1e-3
TIGHT_TOL = 1e-6

AE_NOTE = ("a.e. identities certified on margin-trimmed grids at radial proxy points only; "
           "arc endpoints are excluded")


@dataclass(frozen=True, eq=False)
class BoundaryGrid:
    arc: CircleArc
    n_samples: int
    rho: float
    endpoint_margin: float  # fraction of the arc length
    angles: np.ndarray = field(repr=False)

    @classmethod
    def on(cls, arc: CircleArc, n_samples: int = 512, rho: float = DEFAULT_QUAD.rho,
           endpoint_margin: float = DEFAULT_QUAD.endpoint_margin) -> "BoundaryGrid":
        if n_samples < 16:
            raise DomainError("a boundary grid needs at least 16 samples")
        if arc.is_full:
            angles = TWO_PI * (np.arange(n_samples) + 0.5) / n_samples
        else:
            pad = endpoint_margin * arc.length
            width = arc.length - 2 * pad
            angles = arc.alpha + pad + width * (np.arange(n_samples) + 0.5) / n_samples
        return cls(arc, n_samples, rho, endpoint_margin, angles)

    def points(self, radius: Optional[float] = None) -> np.ndarray:
        return (self.rho if radius is None else radius) * np.exp(1j * self.angles)

    def points_for(self, M: MatrixFn2) -> np.ndarray:
        """Rational matrices are continuous on the closed disk: probe them on the circle."""
        return self.points(1.0 if M.is_rational else None)


def full_grids(arc: CircleArc, n_samples: int = 512, rho: float = DEFAULT_QUAD.rho,
               endpoint_margin: float = DEFAULT_QUAD.endpoint_margin) -> list[BoundaryGrid]:
    """Grids covering the arc and its complement."""
    grids = [BoundaryGrid.on(arc, n_samples, rho, endpoint_margin)]
    comp = arc_complement(arc)
    if comp is not None:
        grids.append(BoundaryGrid.on(comp, n_samples, rho, endpoint_margin))
    return grids


def _gram_defect(M: np.ndarray) -> np.ndarray:
    """M^* M - I for a stack of 2x2 matrices."""
    return np.conj(np.swapaxes(M, -1, -2)) @ M - np.eye(2)


def unitarity_samples(M: MatrixFn2, grid: BoundaryGrid, cfg: QuadratureConfig = DEFAULT_QUAD,
                      cache: Optional[EvalCache] = None) -> np.ndarray:
    """Per-sample max_ij |(M^*M - I)_ij|."""
    vals = M.evaluate(grid.points_for(M), cfg, cache)
    return np.max(np.abs(_gram_defect(vals)), axis=(-2, -1))


def unitarity_residual(M: MatrixFn2, grid: BoundaryGrid, cfg: QuadratureConfig = DEFAULT_QUAD,
                       cache: Optional[EvalCache] = None) -> float:
    """max over samples of max_ij |(M^*M - I)_ij|."""
    return float(np.max(unitarity_samples(M, grid, cfg, cache)))


def _check_smirnov(M: MatrixFn2):
    for row in M.entries:
        for e in row:
            for p in e.rational_part.poles:
                if abs(p) <= 1 + POLE_PROXIMITY:
                    raise CertificationError(
                        f"entry {e.label or '?'} has a pole at {complex(p)!r} in the closed disk")


def entry_bound_residual(M: MatrixFn2, full_grid, interior_points: Sequence[complex] = (),
                         cfg: QuadratureConfig = DEFAULT_QUAD,
                         cache: Optional[EvalCache] = None) -> float:
    """max(|entry| - 1, 0) over boundary samples and interior points.

    Only meaningful for Smirnov-class entries (rational part analytic on the
    closed disk, exponential factors outer), where boundary moduli bound
    the entry inside the disk; that structure is checked first.
    """
    _check_smirnov(M)
    grids = [full_grid] if isinstance(full_grid, BoundaryGrid) else list(full_grid)
    worst = 0.0
    for grid in grids:
        vals = M.evaluate(grid.points_for(M), cfg, cache)
        worst = max(worst, float(np.max(np.abs(vals))) - 1)
    pts = np.asarray(list(interior_points), dtype=complex)
    if pts.size:
        vals = M.evaluate(pts, cfg, cache)
        worst = max(worst, float(np.max(np.abs(vals))) - 1)
    return max(worst, 0.0)


def psd_parts(V: MatrixFn2, grid: BoundaryGrid, eps: float, s: RationalFn,
              cfg: QuadratureConfig = DEFAULT_QUAD, cache: Optional[EvalCache] = None) -> dict:
    """Per-sample pieces of the contractivity argument on the complementary arc."""
    vals = V.evaluate(grid.points_for(V), cfg, cache)
    W = -_gram_defect(vals)
    w11 = W[:, 0, 0].real
    w22 = W[:, 1, 1].real
    half_tr = (w11 + w22) / 2
    det = (w11 * w22 - np.abs(W[:, 0, 1]) ** 2)
    lam_min = half_tr - np.sqrt(np.maximum(half_tr ** 2 - det, 0.0))
    defect = 1 - np.abs(s(grid.points(1.0))) ** 2
    det_tilde = (7 / 9) * (1 - eps ** 2) * defect - np.abs(W[:, 1, 0]) ** 2
    return {"lambda_min": lam_min, "w11": w11, "w22": w22, "det_tilde": det_tilde,
            "defect": defect}


def psd_residual(V: MatrixFn2, grid: BoundaryGrid, eps: float, s: RationalFn,
                 cfg: QuadratureConfig = DEFAULT_QUAD, cache: Optional[EvalCache] = None) -> float:
    """Largest violation of: I - V^*V >= 0, w11 >= 7/9, det W~ >= (2/9)(1 - |s|^2)."""
    p = psd_parts(V, grid, eps, s, cfg, cache)
    viol = max(float(np.max(-p["lambda_min"])),
               float(np.max(7 / 9 - p["w11"])),
               float(np.max((2 / 9) * p["defect"] - p["det_tilde"])))
    return max(viol, 0.0)


def necessity_margin(V: MatrixFn2, grids: Iterable[BoundaryGrid], s: RationalFn,
                     cfg: QuadratureConfig = DEFAULT_QUAD, cache: Optional[EvalCache] = None) -> float:
    """min over samples of 1 - |s|^2 - |v12|^2 (nonnegative for contractive V)."""
    worst = math.inf
    for grid in grids:
        z = grid.points_for(V)
        v12 = V[0, 1].evaluate(z, cfg, cache)
        sv = s(grid.points(1.0))
        worst = min(worst, float(np.min(1 - np.abs(sv) ** 2 - np.abs(v12) ** 2)))
    return worst


def exterior_witness(S: MatrixFn2, zeta, cfg: QuadratureConfig = DEFAULT_QUAD,
                     cache: Optional[EvalCache] = None) -> np.ndarray:
    """U(zeta) = (S^{-1})^*(1/conj zeta) for |zeta| > 1, from the adjugate formula."""
    zeta = np.asarray(zeta, dtype=complex)
    inside = 1 / np.conj(zeta)
    A = S.evaluate(inside, cfg, cache)
    det = A[..., 0, 0] * A[..., 1, 1] - A[..., 0, 1] * A[..., 1, 0]
    small = np.abs(det) < 1e-12
    if np.any(small):
        k = int(np.argmax(small))
        raise WitnessSingularError(complex(inside.reshape(-1)[k]), float(np.abs(det).reshape(-1)[k]))
    cd = np.conj(det)
    U = np.empty_like(A)
    U[..., 0, 0] = np.conj(A[..., 1, 1]) / cd
    U[..., 0, 1] = -np.conj(A[..., 1, 0]) / cd
    U[..., 1, 0] = -np.conj(A[..., 0, 1]) / cd
    U[..., 1, 1] = np.conj(A[..., 0, 0]) / cd
    return U


def exterior_witness_agreement(S: MatrixFn2, grid: BoundaryGrid, cfg: QuadratureConfig = DEFAULT_QUAD,
                               cache: Optional[EvalCache] = None) -> float:
    """max entrywise |U(t/rho) - S(rho t)| over the grid."""
    rho = 1.0 if S.is_rational else grid.rho
    inner_pts = grid.points(rho)
    outer_pts = grid.points(1 / rho)
    U = exterior_witness(S, outer_pts, cfg, cache)
    vals = S.evaluate(inner_pts, cfg, cache)
    return float(np.max(np.abs(U - vals)))


def proposition1_ratio(s1: RationalFn, s2: RationalFn, arc: CircleArc) -> AnalyticElement:
    """a = s2/s1 = I2 O2(., arc') / (I1 O1(., arc')) when |s1| = |s2| on the arc."""
    if s1.reduced().is_zero or s2.reduced().is_zero:
        raise ZeroFunctionError("ratio test needs nonzero functions")
    i1, o1 = inner_outer(s1)
    i2, o2 = inner_outer(s2)
    comp = arc_complement(arc)
    factors = ()
    w = ratio_weight(o2, o1, "O2/O1(comp)")
    if comp is not None and w.constant != 0.0:
        factors = ((ExpFactor(w, comp, "O2/O1(comp)"), 1),)
    return AnalyticElement(i2 / i1, factors, "a")


def proposition1_ratio_residual(s1: RationalFn, s2: RationalFn, arc: CircleArc, grid: BoundaryGrid,
                                cfg: QuadratureConfig = DEFAULT_QUAD) -> float:
    """max ||a(t)| - 1| over the grid, after checking |s1| = |s2| there."""
    t = grid.points(1.0)
    gap = float(np.max(np.abs(np.abs(s1(t)) - np.abs(s2(t)))))
    if gap > 1e-6:
        raise HypothesisViolatedError(f"|s1| and |s2| differ by {gap:.3e} on the arc")
    a = proposition1_ratio(s1, s2, arc)
    z = t if a.is_rational else grid.points()
    return float(np.max(np.abs(np.abs(a.evaluate(z, cfg)) - 1)))


# ---------------------------------------------------------------------------
# reports

@dataclass(frozen=True)
class Check:
    value: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.value <= self.tolerance)

    def to_dict(self) -> dict:
        return {"value": self.value, "tolerance": self.tolerance, "pass": self.passed}


@dataclass(frozen=True)
class Report:
    checks: dict
    input: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)
    values: dict = field(default_factory=dict)
    notes: tuple = ()

    @property
    def verdict(self) -> str:
        return "pass" if all(c.passed for c in self.checks.values()) else "fail"

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_dict(self) -> dict:
        return {
            "input": self.input,
            "config": self.config,
            "checks": {k: self.checks[k].to_dict() for k in sorted(self.checks)},
            "values": self.values,
            "notes": list(self.notes),
            "verdict": self.verdict,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "Report":
        checks = {k: Check(float(v["value"]), float(v["tolerance"]))
                  for k, v in data["checks"].items()}
        return cls(checks, data.get("input", {}), data.get("config", {}),
                   data.get("values", {}), tuple(data.get("notes", ())))

    @classmethod
    def from_json(cls, text: str) -> "Report":
        return cls.from_dict(json.loads(text))


def make_report(checks: Mapping, input: Optional[dict] = None, config: Optional[dict] = None,
                values: Optional[dict] = None, notes: Sequence[str] = (AE_NOTE,)) -> Report:
    """Build a report from {name: (value, tolerance)} or {name: Check}."""
    if not checks:
        raise DomainError("a report needs at least one check")
    normalized = {}
    for name in sorted(checks):
        c = checks[name]
        normalized[name] = c if isinstance(c, Check) else Check(float(c[0]), float(c[1]))
    return Report(normalized, input or {}, config or {}, values or {}, tuple(notes))
