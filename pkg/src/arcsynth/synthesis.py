"""Assembly of the 2x2 embeddings S (unitary on the arc) and V (also contractive).

Entries are `AnalyticElement`s: a rational function times a product of
exponentials of arc Schwarz integrals.  Factor objects are shared between
entries (and between S and V) so an evaluation cache keyed on factor
identity computes each quadrature once per point set.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .boundary import (
    DEFAULT_QUAD,
    CircleArc,
    LogWeight,
    QuadratureConfig,
    arc_complement,
    check_eps,
    defect_weight,
    modulus_weight,
    ratio_weight,
    schwarz_exponent,
    two_level_weight,
    weight_from_tag,
)
from .errors import BlaschkeInputError, NotSchurError, WrongBranchError, ZeroFunctionError
from .rational import (
    RationalFn,
    SchurCertificate,
    certify_schur,
    inner_outer,
    nevanlinna_split,
    para_conjugate,
)

Z = RationalFn.from_coeffs([0, 1])
ONE = RationalFn.constant(1.0)


@dataclass(frozen=True, eq=False)
class ExpFactor:
    """exp(schwarz_exponent(weight, arc, .)): an outer function, modulus w**(1/2) on arc."""

    weight: LogWeight
    arc: CircleArc
    label: str = ""

    def exponent(self, z, cfg: QuadratureConfig = DEFAULT_QUAD):
        return schwarz_exponent(self.weight, self.arc, z, cfg)

    def to_dict(self) -> dict:
        return {"label": self.label, "arc": self.arc.to_dict(),
                "measure": self.arc.measure, "weight": self.weight.tag}

    @classmethod
    def from_dict(cls, data: dict) -> "ExpFactor":
        arc = data["arc"]
        return cls(weight_from_tag(data["weight"], data.get("label", "")),
                   CircleArc(arc["alpha"], arc["beta"], data.get("measure", float("nan"))),
                   data.get("label", ""))


class EvalCache(dict):
    """Exponent values keyed by (factor identity, point-set digest)."""

    @staticmethod
    def digest(z: np.ndarray) -> str:
        return hashlib.sha1(np.ascontiguousarray(z, dtype=complex).tobytes()).hexdigest()


@dataclass(frozen=True, eq=False)
class AnalyticElement:
    rational_part: RationalFn
    exp_factors: tuple = ()  # of (ExpFactor, sign) with sign in {+1, -1}
    label: str = ""

    def __post_init__(self):
        for _, sign in self.exp_factors:
            if sign not in (1, -1):
                raise ValueError("exponential factor signs must be +1 or -1")

    @classmethod
    def rational(cls, f: RationalFn, label: str = "") -> "AnalyticElement":
        return cls(f.reduced(), (), label)

    @property
    def is_rational(self) -> bool:
        return not self.exp_factors

    @property
    def is_zero(self) -> bool:
        return self.rational_part.is_zero

    def __mul__(self, other) -> "AnalyticElement":
        if isinstance(other, AnalyticElement):
            if self.is_zero or other.is_zero:
                return AnalyticElement.rational(RationalFn.constant(0.0))
            return AnalyticElement(self.rational_part * other.rational_part,
                                   self.exp_factors + other.exp_factors)
        return AnalyticElement(self.rational_part * other, self.exp_factors, self.label)

    __rmul__ = __mul__

    def __neg__(self) -> "AnalyticElement":
        return AnalyticElement(-self.rational_part, self.exp_factors, self.label)

    def evaluate(self, z, cfg: QuadratureConfig = DEFAULT_QUAD, cache: Optional[EvalCache] = None):
        z = np.asarray(z, dtype=complex)
        if self.is_zero:
            return np.zeros(z.shape, dtype=complex)
        value = np.asarray(self.rational_part(z), dtype=complex)
        if not self.exp_factors:
            return value
        expo = np.zeros(z.shape, dtype=complex)
        key = EvalCache.digest(z) if cache is not None else None
        for factor, sign in self.exp_factors:
            if cache is not None:
                k = (id(factor), key)
                if k not in cache:
                    cache[k] = factor.exponent(z, cfg)
                e = cache[k]
            else:
                e = factor.exponent(z, cfg)
            expo = expo + sign * e
        return value * np.exp(expo)

    def __call__(self, z, cfg: QuadratureConfig = DEFAULT_QUAD):
        return self.evaluate(z, cfg)

    def to_dict(self, factor_ids: dict) -> dict:
        return {"label": self.label, "rational": self.rational_part.to_dict(),
                "factors": [[factor_ids[id(f)], sign] for f, sign in self.exp_factors]}


@dataclass(frozen=True, eq=False)
class MatrixFn2:
    entries: tuple  # ((a11, a12), (a21, a22))
    meta: dict = field(default_factory=dict)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    @property
    def is_rational(self) -> bool:
        return all(e.is_rational for row in self.entries for e in row)

    def factors(self) -> list:
        seen, out = set(), []
        for row in self.entries:
            for e in row:
                for f, _ in e.exp_factors:
                    if id(f) not in seen:
                        seen.add(id(f))
                        out.append(f)
        return out

    def evaluate(self, z, cfg: QuadratureConfig = DEFAULT_QUAD,
                 cache: Optional[EvalCache] = None) -> np.ndarray:
        """Values as an array of shape z.shape + (2, 2)."""
        z = np.asarray(z, dtype=complex)
        cache = EvalCache() if cache is None else cache
        out = np.empty(z.shape + (2, 2), dtype=complex)
        for i in range(2):
            for j in range(2):
                out[..., i, j] = self.entries[i][j].evaluate(z, cfg, cache)
        return out

    def to_dict(self) -> dict:
        factors = self.factors()
        ids = {id(f): k for k, f in enumerate(factors)}
        return {
            "meta": self.meta,
            "factors": [f.to_dict() for f in factors],
            "entries": [[e.to_dict(ids) for e in row] for row in self.entries],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MatrixFn2":
        factors = [ExpFactor.from_dict(f) for f in data["factors"]]
        rows = []
        for row in data["entries"]:
            rows.append(tuple(
                AnalyticElement(RationalFn.from_dict(e["rational"]),
                                tuple((factors[k], int(sign)) for k, sign in e["factors"]),
                                e.get("label", ""))
                for e in row))
        return cls(tuple(rows), dict(data.get("meta", {})))


@dataclass(frozen=True)
class SynthesisConfig:
    eps: float = 0.25
    quad: QuadratureConfig = DEFAULT_QUAD
    cert_tol: float = 1e-9

    def __post_init__(self):
        check_eps(self.eps)


DEFAULT_SYNTH = SynthesisConfig()


# ---------------------------------------------------------------------------
# Theorem 1 ingredients

def _certified(s: RationalFn, cert_tol: float) -> SchurCertificate:
    cert = certify_schur(s, cert_tol)
    if not cert.is_schur:
        raise NotSchurError(f"not a Schur function (sup |s| = {cert.sup_bound:.6g})")
    return cert


def build_pseudocontinuation(s: RationalFn) -> RationalFn:
    """For rational s the continuation across any arc is s itself, read on |z| > 1."""
    return s.reduced()


def build_g_h(s: RationalFn) -> tuple[RationalFn, RationalFn]:
    """g = conj(s~(1/conj z)) and h = 1 - g s."""
    s_tilde = build_pseudocontinuation(s)
    g = para_conjugate(s_tilde)
    h = (ONE - g * s).reduced()
    return g, h


@dataclass(frozen=True)
class _Parts:
    """Nevanlinna/inner-outer pieces of g and h; None marks the empty product."""

    i_g1: RationalFn
    o_g1: Optional[RationalFn]
    i_g2: RationalFn
    o_g2: Optional[RationalFn]
    i_h1: RationalFn
    o_h1: RationalFn
    i_h2: RationalFn
    o_h2: RationalFn


def _split(f: RationalFn):
    f1, f2 = nevanlinna_split(f)
    i1, o1 = inner_outer(f1)
    i2, o2 = inner_outer(f2)
    return i1, o1, i2, o2


def _parts(g: RationalFn, h: RationalFn) -> _Parts:
    if h.is_zero:
        raise BlaschkeInputError("h = 1 - g s vanishes: s is a finite Blaschke product")
    i_h1, o_h1, i_h2, o_h2 = _split(h)
    if g.is_zero:
        return _Parts(ONE, None, ONE, None, i_h1, o_h1, i_h2, o_h2)
    i_g1, o_g1, i_g2, o_g2 = _split(g)
    return _Parts(i_g1, o_g1, i_g2, o_g2, i_h1, o_h1, i_h2, o_h2)


def _localized(o: Optional[RationalFn], arc: Optional[CircleArc], label: str):
    """[(ExpFactor, +1)] for O(., arc), or [] for an empty product."""
    if o is None or arc is None:
        return []
    w = modulus_weight(o, label=label)
    if w.constant == 0.0:
        return []
    return [(ExpFactor(w, arc, label), 1)]


def _localized_ratio(o1: Optional[RationalFn], o2: Optional[RationalFn],
                     arc: CircleArc, label: str):
    if o1 is None and o2 is None:
        return []
    w = ratio_weight(o1 if o1 is not None else ONE, o2 if o2 is not None else ONE, label)
    if w.constant == 0.0:
        return []
    return [(ExpFactor(w, arc, label), 1)]


class _Factory:
    """Builds and shares the exponential factors of one synthesis problem."""

    def __init__(self, s: RationalFn, arc: CircleArc, cfg: SynthesisConfig):
        self.s = s.reduced()
        self.arc = arc
        self.comp = arc_complement(arc)
        self.cfg = cfg
        self.g, self.h = build_g_h(self.s)
        self.parts = _parts(self.g, self.h)
        self._cache: dict = {}

    def _once(self, key, make):
        if key not in self._cache:
            self._cache[key] = make()
        return self._cache[key]

    def sigma(self, arc: Optional[CircleArc], label: str):
        if arc is None:
            return []

        def make():
            w = defect_weight(self.s, label)
            return [] if w.constant == 0.0 else [(ExpFactor(w, arc, label), 1)]
        return self._once(("sigma", label), make)

    def localized(self, name: str, which: str):
        arc = self.arc if which == "arc" else self.comp
        return self._once(("loc", name, which),
                          lambda: _localized(getattr(self.parts, name), arc,
                                             f"{name.upper()}({which})"))

    def ratio(self, num: str, den: str):
        return self._once(("ratio", num, den),
                          lambda: _localized_ratio(getattr(self.parts, num),
                                                   getattr(self.parts, den), self.arc,
                                                   f"{num.upper()}/{den.upper()}(arc)"))

    def two_level(self):
        if self.comp is None:
            return []
        return self._once("e", lambda: [(ExpFactor(two_level_weight(self.cfg.eps), self.comp,
                                                   "e"), 1)])


def build_p(g: RationalFn, h: RationalFn, arc: CircleArc) -> AnalyticElement:
    """p = I_g2 I_h2 O_g2(., arc') O_h2(., arc'); unimodular on the arc."""
    parts = _parts(g, h)
    comp = arc_complement(arc)
    factors = _localized(parts.o_g2, comp, "O_G2(comp)") + _localized(parts.o_h2, comp, "O_H2(comp)")
    return AnalyticElement(parts.i_g2 * parts.i_h2, tuple(factors), "p")


def _first_column(fac: _Factory) -> tuple[AnalyticElement, AnalyticElement]:
    P = fac.parts
    sigma = fac.sigma(fac.arc, "sigma(arc)")
    if fac.g.is_zero:
        s11 = AnalyticElement.rational(RationalFn.constant(0.0), "s11")
    else:
        s11 = AnalyticElement(
            -(P.i_g1 * P.i_h2),
            tuple(fac.localized("o_g1", "comp") + fac.localized("o_h2", "comp")
                  + fac.ratio("o_g1", "o_g2")),
            "s11")
    s21 = AnalyticElement(
        P.i_g2 * P.i_h1,
        tuple(fac.localized("o_g2", "comp") + fac.localized("o_h1", "comp")
              + fac.ratio("o_h1", "o_h2") + [(f, -1) for f, _ in sigma]),
        "s21")
    return s11, s21


def build_first_column(s: RationalFn, g: RationalFn, h: RationalFn, arc: CircleArc,
                       cfg: SynthesisConfig = DEFAULT_SYNTH):
    """s11 = -p g and s21 = p h / sigma_arc, in Smirnov form."""
    fac = _Factory(s, arc, cfg)
    return _first_column(fac)


def _matrix_S(fac: _Factory) -> MatrixFn2:
    s11, s21 = _first_column(fac)
    s12 = AnalyticElement(ONE, tuple(fac.sigma(fac.arc, "sigma(arc)")), "s12")
    s22 = AnalyticElement.rational(fac.s, "s22")
    return MatrixFn2(((s11, s12), (s21, s22)))


def _check_branch(s: RationalFn, cfg: SynthesisConfig):
    cert = _certified(s, cfg.cert_tol)
    if cert.is_finite_blaschke:
        raise BlaschkeInputError("s is a finite Blaschke product; use diagonal_embedding")
    return cert


def _meta(s: RationalFn, arc: CircleArc, theorem: int, branch: str, eps=None) -> dict:
    meta = {"theorem": theorem, "branch": branch, "s": s.reduced().to_dict(),
            "arc": arc.to_dict(), "arc_measure": arc.measure}
    if eps is not None:
        meta["eps"] = eps
    return meta


def assemble_S(s: RationalFn, arc: CircleArc, cfg: SynthesisConfig = DEFAULT_SYNTH) -> MatrixFn2:
    """[[s11, sigma_arc], [s21, s]], unitary on the arc with Schur entries."""
    _check_branch(s, cfg)
    fac = _Factory(s, arc, cfg)
    S = _matrix_S(fac)
    return MatrixFn2(S.entries, _meta(s, arc, 1, "darlington"))


def diagonal_embedding(s: RationalFn, inner_choice: RationalFn = Z,
                       cert_tol: float = 1e-9) -> MatrixFn2:
    """diag(inner_choice, s) for a finite Blaschke product s."""
    if not _certified(s, cert_tol).is_finite_blaschke:
        raise WrongBranchError("diagonal embedding needs a finite Blaschke product")
    if not _certified(inner_choice, cert_tol).is_finite_blaschke:
        raise WrongBranchError("inner_choice must be a finite Blaschke product")
    zero = AnalyticElement.rational(RationalFn.constant(0.0))
    return MatrixFn2(((AnalyticElement.rational(inner_choice, "s11"), zero),
                      (zero, AnalyticElement.rational(s, "s22"))),
                     {"branch": "diagonal", "s": s.reduced().to_dict()})


def build_r(s: RationalFn, arc: CircleArc, cfg: SynthesisConfig = DEFAULT_SYNTH) -> AnalyticElement:
    """r = e * sigma_{arc'}; unimodular on the arc, |r|^2 = eps^2 (1 - |s|^2) off it."""
    fac = _Factory(s, arc, cfg)
    return _r(fac)


def _r(fac: _Factory) -> AnalyticElement:
    return AnalyticElement(ONE, tuple(fac.two_level() + fac.sigma(fac.comp, "sigma(comp)")), "r")


def assemble_V(s: RationalFn, arc: CircleArc, cfg: SynthesisConfig = DEFAULT_SYNTH) -> MatrixFn2:
    """diag(r, 1) S diag(r, 1) = [[r^2 s11, r s12], [r s21, s]]."""
    return assemble_pair(s, arc, cfg)[1]


def assemble_pair(s: RationalFn, arc: CircleArc, cfg: SynthesisConfig = DEFAULT_SYNTH):
    """S and V built from one shared factor set (so evaluation caches are reused)."""
    _check_branch(s, cfg)
    fac = _Factory(s, arc, cfg)
    S = _matrix_S(fac)
    r = _r(fac)
    rr = r.exp_factors
    (s11, s12), (s21, s22) = S.entries
    v11 = s11 if s11.is_zero else AnalyticElement(s11.rational_part, s11.exp_factors + rr + rr, "v11")
    V = MatrixFn2(((v11, AnalyticElement(ONE, s12.exp_factors + rr, "v12")),
                   (AnalyticElement(s21.rational_part, s21.exp_factors + rr, "v21"), s22)),
                  _meta(s, arc, 2, "darlington", cfg.eps))
    return MatrixFn2(S.entries, _meta(s, arc, 1, "darlington")), V, r
