"""Arcs, Schwarz integrals over arcs, and arc-localized outer functions.

All exponents here follow one convention::

    schwarz_exponent(w, arc, z) = 1/2 * int_arc (t+z)/(t-z) log w(t) dm(t)

with m the normalized arc-length measure, so ``exp`` of it has boundary
modulus ``w**(1/2)`` on the arc and 1 off it.  An outer factor O localized
to an arc therefore uses the weight ``w = |O|**2``.

Near-boundary evaluation points whose angle lies inside the arc are handled
by subtracting the local model
``f(t0) + f'(t0) sin(theta - theta0) + f''(t0) (1 - cos(theta - theta0))``
from ``f = log w``; the model has a closed-form Schwarz integral and the
remainder vanishes to third order at t0, so it carries no structure at the
scale of the kernel peak.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import DivergenceError, DomainError, KernelPoleError, NotSchurError
from .rational import RationalFn, UNIT_TOL, certify_schur, para_conjugate

TWO_PI = 2 * math.pi

# Kronrod 21-point rule with embedded 10-point Gauss rule on [-1, 1].
_XGK = np.array([
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0])
_WGK = np.array([
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077600525937130, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821])
_WG = np.array([
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338])
GK_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
GK_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
G_WEIGHTS = np.zeros(21)
G_WEIGHTS[1:10:2] = _WG
G_WEIGHTS[11:20:2] = _WG[::-1]


# ---------------------------------------------------------------------------
# arcs

@dataclass(frozen=True)
class CircleArc:
    """Open arc {e^{i theta}: alpha < theta < beta}."""

    alpha: float
    beta: float
    measure: float = field(default=float("nan"), compare=False)

    def __post_init__(self):
        length = self.beta - self.alpha
        if not (0 < length <= TWO_PI + 1e-12):
            raise DomainError(f"need alpha < beta <= alpha + 2*pi, got ({self.alpha}, {self.beta})")
        if math.isnan(self.measure):
            object.__setattr__(self, "measure", min(1.0, length / TWO_PI))

    @classmethod
    def full(cls) -> "CircleArc":
        return cls(0.0, TWO_PI, 1.0)

    @property
    def length(self) -> float:
        return self.beta - self.alpha

    @property
    def is_full(self) -> bool:
        return self.measure >= 1.0

    def contains(self, theta, closed: bool = False):
        """Whether angles lie in the arc (mod 2*pi)."""
        if self.is_full:
            return np.ones(np.shape(theta), dtype=bool)
        rel = np.mod(np.asarray(theta, dtype=float) - self.alpha, TWO_PI)
        if closed:
            return (rel <= self.length) | np.isclose(rel, TWO_PI, rtol=0, atol=1e-14)
        return (rel > 0) & (rel < self.length)

    def to_dict(self) -> dict:
        return {"alpha": self.alpha, "beta": self.beta}

    @classmethod
    def from_dict(cls, data: dict) -> "CircleArc":
        return cls(float(data["alpha"]), float(data["beta"]))


def arc_complement(arc: CircleArc) -> Optional[CircleArc]:
    """The arc (beta, alpha + 2 pi); ``None`` stands for the empty complement of the circle."""
    if arc.is_full:
        return None
    return CircleArc(arc.beta, arc.alpha + TWO_PI, 1.0 - arc.measure)


# ---------------------------------------------------------------------------
# weights and configuration

@dataclass(frozen=True, eq=False)
class LogWeight:
    """A boundary function theta -> log w(e^{i theta}).

    `derivative` (d/dtheta) is optional; a central difference is used when
    missing.  `constant` marks weights whose log is a known constant so that
    closed forms can replace quadrature.
    """

    evaluator: Callable[[np.ndarray], np.ndarray]
    singular_points: tuple = ()
    derivative: Optional[Callable[[np.ndarray], np.ndarray]] = None
    constant: Optional[float] = None
    label: str = ""
    tag: Optional[dict] = None

    def __call__(self, theta):
        return self.evaluator(np.asarray(theta, dtype=float))

    def slope(self, theta):
        theta = np.asarray(theta, dtype=float)
        if self.derivative is not None:
            return self.derivative(theta)
        h = 1e-6
        return (self.evaluator(theta + h) - self.evaluator(theta - h)) / (2 * h)

    def curvature(self, theta):
        theta = np.asarray(theta, dtype=float)
        if self.constant is not None:
            return np.zeros(theta.shape)
        if self.derivative is not None:
            h = 1e-5
            return (self.derivative(theta + h) - self.derivative(theta - h)) / (2 * h)
        h = 1e-4
        return (self.evaluator(theta + h) - 2 * self.evaluator(theta)
                + self.evaluator(theta - h)) / (h * h)

    @classmethod
    def const(cls, value: float, label: str = "") -> "LogWeight":
        value = float(value)
        return cls(lambda th: np.full(np.shape(th), value), (),
                   lambda th: np.zeros(np.shape(th)), value, label,
                   {"kind": "constant", "value": value})


def _boundary_angles(points: Sequence[complex]) -> tuple:
    return tuple(sorted(float(np.mod(np.angle(p), TWO_PI))
                        for p in points if abs(abs(p) - 1) <= UNIT_TOL))


def modulus_weight(f: RationalFn, power: float = 2.0, label: str = "") -> LogWeight:
    """log |f(t)|**power; constant when f is constant."""
    f = f.reduced()
    if f.is_zero:
        raise DomainError("log-modulus of the zero function")
    if f.is_constant:
        return LogWeight.const(power * math.log(abs(complex(f(0.0)))), label)
    singular = _boundary_angles(list(f.zeros) + list(f.poles))
    tag = {"kind": "modulus", "f": f.to_dict(), "power": power}

    def ev(th):
        return power * np.log(np.abs(f(np.exp(1j * th))))

    def der(th):
        t = np.exp(1j * th)
        return power * np.real(1j * t * f.derivative_at(t) / f(t))

    return LogWeight(ev, singular, der, None, label, tag)


def ratio_weight(f1: RationalFn, f2: RationalFn, label: str = "") -> LogWeight:
    """log |f1/f2|**2 as a single weight."""
    w1, w2 = modulus_weight(f1), modulus_weight(f2)
    if w1.constant is not None and w2.constant is not None:
        return LogWeight.const(w1.constant - w2.constant, label)
    singular = tuple(sorted(set(w1.singular_points) | set(w2.singular_points)))
    return LogWeight(lambda th: w1(th) - w2(th), singular,
                     lambda th: w1.slope(th) - w2.slope(th), None, label,
                     {"kind": "ratio", "f1": f1.to_dict(), "f2": f2.to_dict()})


def _unimodular_angles(s: RationalFn, n: int = 4096) -> tuple:
    """Angles where |s| touches 1 (isolated singularities of log(1 - |s|^2))."""
    theta = TWO_PI * np.arange(n) / n
    defect = 1 - np.abs(s(np.exp(1j * theta))) ** 2
    h = TWO_PI / n
    local_min = (defect <= np.roll(defect, 1)) & (defect <= np.roll(defect, -1)) & (defect < 1e-3)
    idx = np.flatnonzero(local_min)
    if idx.size == 0:
        return ()
    neg = lambda th: -(1 - np.abs(s(np.exp(1j * th))) ** 2)
    lo, hi = theta[idx] - h, theta[idx] + h
    g = (np.sqrt(5) - 1) / 2
    a, b = lo.copy(), hi.copy()
    for _ in range(80):
        c = b - g * (b - a)
        d = a + g * (b - a)
        left = neg(c) > neg(d)
        b = np.where(left, d, b)
        a = np.where(left, a, c)
    best = (a + b) / 2
    # golden search only pins a quadratic extremum to ~sqrt(eps); finish by
    # bisection on the sign of d|s|^2/dtheta, which has a simple zero there
    def slope(th):
        t = np.exp(1j * th)
        return np.real(np.conj(s(t)) * 1j * t * s.derivative_at(t))

    lo, hi = best - h, best + h
    bracket = (slope(lo) > 0) & (slope(hi) < 0)
    for _ in range(60):
        mid = (lo + hi) / 2
        up = slope(mid) > 0
        lo = np.where(up, mid, lo)
        hi = np.where(up, hi, mid)
    best = np.where(bracket, (lo + hi) / 2, best)
    keep = -neg(best) < 1e-9
    return tuple(sorted(float(np.mod(x, TWO_PI)) for x in best[keep]))


def defect_weight(s: RationalFn, label: str = "1-|s|^2") -> LogWeight:
    """log(1 - |s(t)|^2)."""
    s = s.reduced()
    if s.is_zero:
        return LogWeight.const(0.0, label)
    if s.is_constant:
        c = abs(complex(s(0.0)))
        if c >= 1:
            raise DivergenceError("1 - |s|^2 vanishes identically")
        return LogWeight.const(math.log1p(-c * c), label)

    # On the circle 1 - |s|^2 = h(t) with h = 1 - s* s rational.  Evaluating
    # log|h| from its factored form keeps full relative accuracy next to the
    # points where |s| touches 1, where 1 - |s|^2 itself cancels to zero.
    h = (RationalFn.constant(1.0) - para_conjugate(s) * s).reduced()
    if h.is_zero:
        raise DivergenceError("1 - |s|^2 vanishes identically")
    zeros = np.asarray(h.zeros, dtype=complex)
    poles = np.asarray(h.poles, dtype=complex)
    log_c = math.log(abs(h.num.lead))

    def ev(th):
        t = np.exp(1j * np.asarray(th, dtype=float))[..., None]
        with np.errstate(divide="ignore"):
            return (log_c + np.sum(np.log(np.abs(t - zeros)), axis=-1)
                    - np.sum(np.log(np.abs(t - poles)), axis=-1))

    def der(th):
        t = np.exp(1j * np.asarray(th, dtype=float))[..., None]
        return (np.sum(np.real(1j * t / (t - zeros)), axis=-1)
                - np.sum(np.real(1j * t / (t - poles)), axis=-1))

    on_circle = [z for z in zeros if abs(abs(z) - 1) <= 1e-6]
    singular = tuple(sorted({round(float(np.mod(np.angle(z), TWO_PI)), 15) for z in on_circle}))
    return LogWeight(ev, singular or _unimodular_angles(s), der, None, label,
                     {"kind": "defect", "s": s.to_dict()})


def weight_from_tag(tag: dict, label: str = "") -> LogWeight:
    """Rebuild a weight from its serialized tag."""
    kind = tag["kind"]
    if kind == "constant":
        return LogWeight.const(tag["value"], label)
    if kind == "modulus":
        return modulus_weight(RationalFn.from_dict(tag["f"]), tag.get("power", 2.0), label)
    if kind == "ratio":
        return ratio_weight(RationalFn.from_dict(tag["f1"]), RationalFn.from_dict(tag["f2"]), label)
    if kind == "defect":
        return defect_weight(RationalFn.from_dict(tag["s"]), label)
    raise ValueError(f"unknown weight kind {kind!r}")


@dataclass(frozen=True)
class QuadratureConfig:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_subdivisions: int = 4000
    endpoint_margin: float = 1e-3  # fraction of arc length
    rho: float = 1 - 1e-8

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise DomainError("rel_tol must be positive")
        if not 0 < self.endpoint_margin < 0.25:
            raise DomainError("endpoint_margin must lie in (0, 1/4)")
        if not 0.9 < self.rho < 1:
            raise DomainError("rho must lie in (0.9, 1)")


DEFAULT_QUAD = QuadratureConfig()


# ---------------------------------------------------------------------------
# closed-form arc integrals

def _log_increment(arc: CircleArc, z: np.ndarray):
    """int_arc dt/(t - z) along the arc, plus the endpoint values t_a, t_b."""
    ta, tb = np.exp(1j * arc.alpha), np.exp(1j * arc.beta)
    if arc.is_full:
        return np.full(z.shape, 2j * math.pi), ta, tb
    da, db = ta - z, tb - z
    delta = np.mod(np.angle(db / da), TWO_PI)
    return np.log(np.abs(db)) - np.log(np.abs(da)) + 1j * delta, ta, tb


def arc_kernel_integral(arc: CircleArc, z) -> np.ndarray:
    """int_arc (t+z)/(t-z) dm(t): harmonic measure of the arc plus i times its conjugate."""
    z = np.asarray(z, dtype=complex)
    if arc.is_full:
        return np.ones(z.shape, dtype=complex)
    inc, _, _ = _log_increment(arc, z)
    return inc / (1j * math.pi) - arc.length / TWO_PI


def _trig_kernel_integrals(arc: CircleArc, z: np.ndarray, t0: np.ndarray):
    """int_arc (t+z)/(t-z) g(theta) dm(t) for g = sin(theta - theta0) and 1 - cos(theta - theta0).

    Uses the integrals of t and 1/t against the kernel; valid for |z| away from 0.
    """
    inc, ta, tb = _log_increment(arc, z)
    j_plus = ((tb - ta) + 2 * z * inc) / (2j * math.pi)
    j_minus = (-(2 / z) * 1j * arc.length + (1 / tb - 1 / ta) + (2 / z) * inc) / (2j * math.pi)
    sine = (j_plus / t0 - t0 * j_minus) / 2j
    one_minus_cos = arc_kernel_integral(arc, z) - (j_plus / t0 + t0 * j_minus) / 2
    return sine, one_minus_cos


# ---------------------------------------------------------------------------
# adaptive Gauss-Kronrod over an arc, vectorized across evaluation points

def _initial_panels(arc: CircleArc, singular: Sequence[float], max_len: float = 0.5):
    cuts = [arc.alpha, arc.beta]
    for s in singular:
        rel = (s - arc.alpha) % TWO_PI
        if 0 < rel < arc.length:
            cuts.append(arc.alpha + rel)
    cuts = np.unique(np.array(cuts))
    lo, hi = [], []
    for a, b in zip(cuts[:-1], cuts[1:]):
        k = max(1, int(math.ceil((b - a) / max_len)))
        edges = np.linspace(a, b, k + 1)
        lo.extend(edges[:-1])
        hi.extend(edges[1:])
    return np.array(lo), np.array(hi)


def _gk_panels(lo, hi, integrand):
    half = (hi - lo) / 2
    mid = (hi + lo) / 2
    vals = integrand(mid[:, None] + half[:, None] * GK_NODES[None, :])
    if not np.all(np.isfinite(vals)):
        raise DivergenceError("log-weight is not finite on a set of positive measure")
    kron = np.einsum("opk,k->op", vals, GK_WEIGHTS) * half
    gauss = np.einsum("opk,k->op", vals, G_WEIGHTS) * half
    return kron, np.abs(kron - gauss)


def _adaptive_gk(arc: CircleArc, singular, integrand, n_out: int, cfg: QuadratureConfig):
    """Integrate integrand(theta[P, 21]) -> array[n_out, P, 21] over the arc (d theta).

    Global error control: stop once the summed Kronrod-Gauss differences are
    within max(abs_tol, rel_tol*|I|) for every output; otherwise bisect the
    panels carrying more than their even share of the error.  (A per-panel
    length-share rule never accepts the panel touching a log singularity,
    whose error is itself proportional to its length.)
    """
    lo, hi = _initial_panels(arc, singular)
    kron, err = _gk_panels(lo, hi, integrand)
    n_panels = len(lo)
    while True:
        total = kron.sum(axis=1)
        tol = np.maximum(cfg.abs_tol, cfg.rel_tol * np.abs(total))
        e = np.max(err / tol[:, None], axis=0)
        if e.sum() <= 1:
            return total
        split = (e > 0.5 / len(e)) & (hi - lo > 1e-14)
        if not split.any():
            return total  # remaining error sits on panels at the resolution limit
        if n_panels + int(split.sum()) > cfg.max_subdivisions:
            if float((hi - lo)[split].min()) < 1e-12:
                raise DivergenceError("adaptive refinement did not converge")
            return total
        mid = (lo[split] + hi[split]) / 2
        new_lo = np.concatenate([lo[split], mid])
        new_hi = np.concatenate([mid, hi[split]])
        k_new, e_new = _gk_panels(new_lo, new_hi, integrand)
        keep = ~split
        lo = np.concatenate([lo[keep], new_lo])
        hi = np.concatenate([hi[keep], new_hi])
        kron = np.concatenate([kron[:, keep], k_new], axis=1)
        err = np.concatenate([err[:, keep], e_new], axis=1)
        n_panels += int(split.sum())


def _check_admissible(arc: CircleArc, z: np.ndarray):
    on = (np.abs(z) >= 1 - 1e-15) & arc.contains(np.angle(z), closed=True)
    if np.any(on):
        raise KernelPoleError(complex(z[np.argmax(on)]))


def schwarz_exponent(w: LogWeight, arc: CircleArc, z, cfg: QuadratureConfig = DEFAULT_QUAD,
                     force_quadrature: bool = False, chunk: int = 512):
    """1/2 int_arc (t+z)/(t-z) log w(t) dm(t), vectorized over z."""
    z_in = np.asarray(z, dtype=complex)
    zf = z_in.reshape(-1)
    _check_admissible(arc, zf)
    if w.constant is not None and not force_quadrature:
        out = 0.5 * w.constant * arc_kernel_integral(arc, zf)
        return out.reshape(z_in.shape) if z_in.ndim else complex(out[0])
    out = np.empty(zf.shape, dtype=complex)
    for start in range(0, zf.size, chunk):
        out[start:start + chunk] = _schwarz_block(w, arc, zf[start:start + chunk], cfg)
    return out.reshape(z_in.shape) if z_in.ndim else complex(out[0])


def _schwarz_block(w: LogWeight, arc: CircleArc, z: np.ndarray, cfg: QuadratureConfig):
    r = np.abs(z)
    theta0 = np.angle(z)
    sub = (r > 0.5) & arc.contains(theta0)
    f0 = np.zeros(z.shape)
    f1 = np.zeros(z.shape)
    f2 = np.zeros(z.shape)
    if np.any(sub):
        f0[sub] = w(theta0[sub])
        f1[sub] = w.slope(theta0[sub])
        f2[sub] = w.curvature(theta0[sub])
        sub &= np.isfinite(f0) & np.isfinite(f1) & np.isfinite(f2)
        f0[~sub] = f1[~sub] = f2[~sub] = 0.0
    zc = z[:, None, None]
    th0 = theta0[:, None, None]
    a0 = f0[:, None, None]
    a1 = f1[:, None, None]
    a2 = f2[:, None, None]

    def integrand(theta):
        t = np.exp(1j * theta)[None]
        f = w(theta)[None]
        d = theta[None] - th0
        resid = f - a0 - a1 * np.sin(d) - a2 * (1 - np.cos(d))
        return (t + zc) / (t - zc) * resid / TWO_PI

    total = _adaptive_gk(arc, w.singular_points, integrand, z.size, cfg)
    closed = np.zeros(z.shape, dtype=complex)
    if np.any(sub):
        zs = z[sub]
        sine, cosine = _trig_kernel_integrals(arc, zs, zs / np.abs(zs))
        closed[sub] = f0[sub] * arc_kernel_integral(arc, zs) + f1[sub] * sine + f2[sub] * cosine
    return 0.5 * (total + closed)


def log_integral_weight(w: LogWeight, arc: CircleArc, cfg: QuadratureConfig = DEFAULT_QUAD) -> float:
    """int_arc log w dm."""
    if w.constant is not None:
        return w.constant * arc.measure
    total = _adaptive_gk(arc, w.singular_points,
                         lambda th: w(th)[None].astype(complex) / TWO_PI, 1, cfg)
    return float(total[0].real)


# ---------------------------------------------------------------------------
# the specific outer functions

def localized_outer_eval(O: RationalFn, arc: Optional[CircleArc], z,
                         cfg: QuadratureConfig = DEFAULT_QUAD):
    """O(z, arc): outer function with modulus |O| on the arc and 1 elsewhere."""
    if arc is None:
        return np.ones(np.shape(z), dtype=complex) if np.ndim(z) else 1.0 + 0j
    return np.exp(schwarz_exponent(modulus_weight(O), arc, z, cfg))


def _require_non_blaschke(s: RationalFn):
    cert = certify_schur(s)
    if not cert.is_schur:
        raise NotSchurError("not a Schur function")
    if cert.is_finite_blaschke:
        raise DivergenceError("1 - |s|^2 vanishes identically (finite Blaschke product)")


def sigma_arc_eval(s: RationalFn, arc: Optional[CircleArc], z,
                   cfg: QuadratureConfig = DEFAULT_QUAD):
    """sigma_arc(z) = exp(1/2 int_arc (t+z)/(t-z) log(1 - |s|^2) dm)."""
    _require_non_blaschke(s)
    if arc is None:
        return np.ones(np.shape(z), dtype=complex) if np.ndim(z) else 1.0 + 0j
    return np.exp(schwarz_exponent(defect_weight(s), arc, z, cfg))


def log_integral(s: RationalFn, arc: CircleArc, cfg: QuadratureConfig = DEFAULT_QUAD) -> float:
    """int_arc log(1 - |s|^2) dm; -inf for finite Blaschke products."""
    cert = certify_schur(s)
    if not cert.is_schur:
        raise NotSchurError("not a Schur function")
    if cert.is_finite_blaschke:
        return -math.inf
    return log_integral_weight(defect_weight(s), arc, cfg)


def check_eps(eps: float):
    if not 0 < eps < 1 / 3:
        raise DomainError(f"eps must lie in (0, 1/3), got {eps}")


def two_level_weight(eps: float) -> LogWeight:
    check_eps(eps)
    return LogWeight.const(2 * math.log(eps), "eps^2")


def two_level_outer_eval(arc: CircleArc, eps: float, z, cfg: QuadratureConfig = DEFAULT_QUAD):
    """Outer e with |e| = 1 on the arc and |e| = eps on its complement."""
    w = two_level_weight(eps)
    comp = arc_complement(arc)
    if comp is None:
        return np.ones(np.shape(z), dtype=complex) if np.ndim(z) else 1.0 + 0j
    return np.exp(schwarz_exponent(w, comp, z, cfg))
