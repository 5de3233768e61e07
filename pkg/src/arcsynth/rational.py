"""Complex polynomials and rational functions on the unit disk.

Coefficients are stored in ascending order of degree.  Everything here is
immutable; derived quantities (roots, poles) are computed lazily and cached.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DegenerateInputError,
    NotAnalyticError,
    PoleProximityError,
    ZeroFunctionError,
)

_EPS = np.finfo(float).eps

CLUSTER_RADIUS = 1e-8
POLE_PROXIMITY = 1e-12
UNIT_TOL = 1e-10  # zeros with | |a| - 1 | below this count as boundary zeros


def _as_coeffs(values) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(values, dtype=complex)).copy()
    if arr.ndim != 1:
        raise ValueError("coefficients must be one-dimensional")
    nz = np.flatnonzero(arr)
    if nz.size == 0:
        return np.zeros(1, dtype=complex)
    return arr[: nz[-1] + 1]


NEGLIGIBLE_LEAD = 1e-13


def _trim_negligible(p: "ComplexPoly") -> "ComplexPoly":
    """Drop leading coefficients below 1e-13 of the largest one (roots beyond ~1e13)."""
    c = p.coeffs
    big = np.flatnonzero(np.abs(c) > NEGLIGIBLE_LEAD * np.max(np.abs(c)))
    if big.size == 0 or big[-1] == len(c) - 1:
        return p
    return ComplexPoly(c[: big[-1] + 1])


@dataclass(frozen=True, eq=False)
class ComplexPoly:
    coeffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _as_coeffs(self.coeffs))
        self.coeffs.setflags(write=False)

    @classmethod
    def constant(cls, c: complex) -> "ComplexPoly":
        return cls([c])

    @classmethod
    def monomial(cls, k: int, c: complex = 1.0) -> "ComplexPoly":
        coeffs = np.zeros(k + 1, dtype=complex)
        coeffs[k] = c
        return cls(coeffs)

    @classmethod
    def from_roots(cls, roots: Iterable[complex], lead: complex = 1.0) -> "ComplexPoly":
        coeffs = np.array([lead], dtype=complex)
        for r in roots:
            # multiply by (z - r), ascending order
            coeffs = np.concatenate([[0], coeffs]) - r * np.concatenate([coeffs, [0]])
        return cls(coeffs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return self.degree == 0 and self.coeffs[0] == 0

    @property
    def lead(self) -> complex:
        return complex(self.coeffs[-1])

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        acc = np.full(z.shape, self.coeffs[-1], dtype=complex)
        for c in self.coeffs[-2::-1]:
            acc = acc * z + c
        return acc if acc.ndim else complex(acc)

    def derivative(self) -> "ComplexPoly":
        if self.degree == 0:
            return ComplexPoly([0])
        return ComplexPoly(self.coeffs[1:] * np.arange(1, len(self.coeffs)))

    def _padded(self, other: "ComplexPoly"):
        n = max(len(self.coeffs), len(other.coeffs))
        a = np.zeros(n, dtype=complex)
        b = np.zeros(n, dtype=complex)
        a[: len(self.coeffs)] = self.coeffs
        b[: len(other.coeffs)] = other.coeffs
        return a, b

    def __add__(self, other: "ComplexPoly") -> "ComplexPoly":
        a, b = self._padded(other)
        out = a + b
        # cancellation noise would otherwise survive as a spurious top coefficient
        out[np.abs(out) <= 8 * _EPS * (np.abs(a) + np.abs(b))] = 0
        return ComplexPoly(out)

    def __neg__(self) -> "ComplexPoly":
        return ComplexPoly(-self.coeffs)

    def __sub__(self, other: "ComplexPoly") -> "ComplexPoly":
        return self + (-other)

    def __mul__(self, other) -> "ComplexPoly":
        if isinstance(other, ComplexPoly):
            return ComplexPoly(np.convolve(self.coeffs, other.coeffs))
        return ComplexPoly(self.coeffs * complex(other))

    __rmul__ = __mul__

    def shift(self, k: int) -> "ComplexPoly":
        """Multiply by z**k."""
        if k == 0 or self.is_zero:
            return self
        return ComplexPoly(np.concatenate([np.zeros(k, dtype=complex), self.coeffs]))

    def reflect(self, n: int | None = None) -> "ComplexPoly":
        """Return z**n * conj(p(1/conj z)), i.e. the conjugate-reversed coefficients."""
        n = self.degree if n is None else n
        padded = np.zeros(n + 1, dtype=complex)
        padded[: len(self.coeffs)] = self.coeffs
        return ComplexPoly(np.conj(padded[::-1]))

    def deflate(self, root: complex) -> "ComplexPoly":
        """Quotient of synthetic division by (z - root); the remainder is dropped.

        Roots outside the unit disk are divided out from the constant term
        upwards, which keeps the recurrence stable for large roots.
        """
        if abs(root) > 1:
            a = self.coeffs
            out = np.empty(len(a) - 1, dtype=complex)
            prev = 0j
            for i in range(len(out)):
                prev = (prev - a[i]) / root
                out[i] = prev
            return ComplexPoly(out)
        desc = self.coeffs[::-1]
        out = np.empty(len(desc) - 1, dtype=complex)
        acc = 0j
        for i, c in enumerate(desc[:-1]):
            acc = acc * root + c
            out[i] = acc
        return ComplexPoly(out[::-1])

    def allclose(self, other: "ComplexPoly", atol: float = 1e-12) -> bool:
        a, b = self._padded(other)
        return bool(np.all(np.abs(a - b) <= atol))

    def to_pairs(self) -> list[list[float]]:
        return [[float(c.real), float(c.imag)] for c in self.coeffs]

    @classmethod
    def from_pairs(cls, pairs: Sequence[Sequence[float]]) -> "ComplexPoly":
        return cls([complex(re, im) for re, im in pairs])

    def __repr__(self) -> str:
        return f"ComplexPoly({np.round(self.coeffs, 12).tolist()})"


def _cluster(roots: np.ndarray, radius: float = CLUSTER_RADIUS) -> np.ndarray:
    """Replace every cluster of roots closer than `radius` by its centroid."""
    roots = np.array(roots, dtype=complex)
    n = len(roots)
    seen = np.zeros(n, dtype=bool)
    for i in range(n):
        if seen[i]:
            continue
        members = np.flatnonzero((np.abs(roots - roots[i]) <= radius) & ~seen)
        seen[members] = True
        roots[members] = roots[members].mean()
    return roots


def _abs_scale(p: ComplexPoly, z: complex) -> float:
    """sum |a_i| |z|^i, the natural size of p(z) for rounding purposes."""
    return float(np.sum(np.abs(p.coeffs) * abs(z) ** np.arange(len(p.coeffs))))


def _is_multiple_root(p: ComplexPoly, c: complex, k: int, rel: float = 1e-9) -> bool:
    d = p
    for _ in range(k):
        if abs(d(c)) > rel * _abs_scale(d, c):
            return False
        d = d.derivative()
    return True


def _merge_multiple(p: ComplexPoly, roots: np.ndarray, radius: float = 1e-2) -> np.ndarray:
    """Collapse eigenvalue clouds around a k-fold root onto their centroid.

    A k-fold root comes back from the companion matrix as k points spread by
    about eps**(1/k), but their mean is accurate to rounding level; the merge
    is kept only if p and its first k-1 derivatives vanish there.
    """
    roots = np.array(roots, dtype=complex)
    used = np.zeros(len(roots), dtype=bool)
    for i in range(len(roots)):
        if used[i]:
            continue
        near = np.zeros(len(roots), dtype=bool)
        near[i] = True
        grown = True
        while grown:  # connected component of the "closer than radius" graph
            d = np.min(np.abs(roots[:, None] - roots[near][None, :]), axis=1)
            new = ~used & ~near & (d <= radius * np.maximum(1.0, np.abs(roots)))
            grown = bool(new.any())
            near |= new
        members = np.flatnonzero(near)
        used[members] = True
        if len(members) > 1:
            c = roots[members].mean()
            if _is_multiple_root(p, c, len(members)):
                roots[members] = c
    return roots


def poly_roots(p: ComplexPoly) -> np.ndarray:
    """All roots of `p`, repeated according to multiplicity.

    Companion-matrix eigenvalues (numpy), guarded Newton polishing (a step
    is kept only where it lowers the residual), then multiple-root merging.
    Exact zeros at the origin are split off first so that z**k factors come
    back exactly.
    """
    if p.is_zero:
        raise DegenerateInputError("roots of the zero polynomial are undefined")
    coeffs = p.coeffs
    k = int(np.flatnonzero(coeffs)[0])
    rest = coeffs[k:]
    roots = np.zeros(k, dtype=complex)
    if len(rest) > 1:
        q = ComplexPoly(rest)
        r = _merge_multiple(q, np.roots(rest[::-1]).astype(complex))
        simple = np.array([np.count_nonzero(r == x) == 1 for x in r])
        dq = q.derivative()
        with np.errstate(all="ignore"):
            for _ in range(3):
                val = q(r)
                cand = r - val / dq(r)
                better = simple & np.isfinite(cand) & (np.abs(q(cand)) < np.abs(val))
                r = np.where(better, cand, r)
        roots = np.concatenate([roots, _cluster(r)])
    return roots


def root_residual_bound(p: ComplexPoly, root: complex) -> float:
    return 1e-10 * (1 + abs(root)) ** p.degree * float(np.max(np.abs(p.coeffs)))


def _blaschke_parts(zeros: Sequence[complex]) -> tuple[ComplexPoly, ComplexPoly]:
    """Numerator/denominator of prod (z - a)/(1 - conj(a) z); a = 0 gives z."""
    num = ComplexPoly.from_roots(zeros)
    den = ComplexPoly([1])
    for a in zeros:
        den = den * ComplexPoly([1, -np.conj(a)])
    return num, den


@dataclass(frozen=True, eq=False)
class RationalFn:
    num: ComplexPoly
    den: ComplexPoly = ComplexPoly([1])
    normalized: bool = False

    def __post_init__(self):
        if self.den.is_zero:
            raise DegenerateInputError("denominator is identically zero")

    # -- constructors -------------------------------------------------
    @classmethod
    def from_coeffs(cls, num, den=(1,)) -> "RationalFn":
        return cls(ComplexPoly(num), ComplexPoly(den)).reduced()

    @classmethod
    def constant(cls, c: complex) -> "RationalFn":
        return cls(ComplexPoly([c]), ComplexPoly([1]), normalized=True)

    @classmethod
    def blaschke(cls, zeros: Sequence[complex], unimodular: complex = 1.0) -> "RationalFn":
        num, den = _blaschke_parts(list(zeros))
        return cls(num * unimodular, den).reduced()

    # -- basic properties -------------------------------------------
    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    @cached_property
    def poles(self) -> np.ndarray:
        if self.den.degree == 0:
            return np.zeros(0, dtype=complex)
        return poly_roots(self.den)

    @cached_property
    def zeros(self) -> np.ndarray:
        if self.num.is_zero or self.num.degree == 0:
            return np.zeros(0, dtype=complex)
        return poly_roots(self.num)

    @property
    def is_constant(self) -> bool:
        return self.num.degree == 0 and self.den.degree == 0

    def reduced(self) -> "RationalFn":
        """Cancel common roots of num and den and make den monic."""
        if self.normalized:
            return self
        num, den = _trim_negligible(self.num), _trim_negligible(self.den)
        if num.is_zero:
            return RationalFn(ComplexPoly([0]), ComplexPoly([1]), normalized=True)
        if num.degree > 0 and den.degree > 0:
            zs = list(poly_roots(num))
            ps = list(poly_roots(den))
            common = []
            for p in ps:
                if not zs:
                    break
                dist = np.abs(np.asarray(zs) - p)
                j = int(np.argmin(dist))
                if dist[j] <= CLUSTER_RADIUS * max(1.0, abs(p)):
                    common.append((zs.pop(j), p))
            for z0, p0 in common:
                num = num.deflate(z0)
                den = den.deflate(p0)
        lead = den.lead
        return RationalFn(num * (1 / lead), den * (1 / lead), normalized=True)

    # -- evaluation ----------------------------------------------------
    def __call__(self, z):
        return rf_eval(self, z)

    def derivative_at(self, z):
        z = np.asarray(z, dtype=complex)
        n, d = self.num(z), self.den(z)
        return (self.num.derivative()(z) * d - n * self.den.derivative()(z)) / (d * d)

    # -- arithmetic ------------------------------------------------------
    def __mul__(self, other) -> "RationalFn":
        if isinstance(other, RationalFn):
            return RationalFn(self.num * other.num, self.den * other.den).reduced()
        return RationalFn(self.num * other, self.den, normalized=self.normalized)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "RationalFn":
        if isinstance(other, RationalFn):
            if other.is_zero:
                raise ZeroFunctionError("division by the zero function")
            return RationalFn(self.num * other.den, self.den * other.num).reduced()
        return RationalFn(self.num * (1 / complex(other)), self.den, normalized=self.normalized)

    def __add__(self, other) -> "RationalFn":
        if not isinstance(other, RationalFn):
            other = RationalFn.constant(other)
        return RationalFn(self.num * other.den + other.num * self.den,
                          self.den * other.den).reduced()

    __radd__ = __add__

    def __neg__(self) -> "RationalFn":
        return RationalFn(-self.num, self.den, normalized=self.normalized)

    def __sub__(self, other) -> "RationalFn":
        if not isinstance(other, RationalFn):
            other = RationalFn.constant(other)
        return self + (-other)

    def __rsub__(self, other) -> "RationalFn":
        return (-self) + other

    def allclose(self, other: "RationalFn", atol: float = 1e-12) -> bool:
        a, b = self.reduced(), other.reduced()
        return a.num.allclose(b.num, atol) and a.den.allclose(b.den, atol)

    def max_boundary_error(self, other: "RationalFn", n: int = 256) -> float:
        t = np.exp(2j * np.pi * np.arange(n) / n)
        return float(np.max(np.abs(self(t) - other(t))))

    def to_dict(self) -> dict:
        return {"num": self.num.to_pairs(), "den": self.den.to_pairs()}

    @classmethod
    def from_dict(cls, data: dict) -> "RationalFn":
        return cls(ComplexPoly.from_pairs(data["num"]),
                   ComplexPoly.from_pairs(data.get("den", [[1.0, 0.0]]))).reduced()

    def __repr__(self) -> str:
        return f"RationalFn(num={self.num!r}, den={self.den!r})"


def rf_eval(f: RationalFn, z):
    """num(z)/den(z), refusing points within 1e-12 of a pole."""
    z_arr = np.asarray(z, dtype=complex)
    if f.den.degree > 0:
        poles = f.poles
        dist = np.abs(z_arr[..., None] - poles)
        bad = dist <= POLE_PROXIMITY
        if np.any(bad):
            idx = np.argwhere(bad)[0]
            raise PoleProximityError(complex(poles[idx[-1]]), complex(z_arr[tuple(idx[:-1])]))
    out = f.num(z_arr) / f.den(z_arr)
    return out


def para_conjugate(f: RationalFn) -> RationalFn:
    """f#(z) = conj(f(1/conj z)); equals conj(f) on the unit circle."""
    f = f.reduced()
    if f.is_zero:
        return f
    n, d = f.num.degree, f.den.degree
    num, den = f.num.reflect(), f.den.reflect()
    if d >= n:
        num = num.shift(d - n)
    else:
        den = den.shift(n - d)
    return RationalFn(num, den).reduced()


# ---------------------------------------------------------------------------
# boundary sup and Schur certification

def _golden_max(fun, lo: np.ndarray, hi: np.ndarray, iters: int = 60):
    """Vectorized golden-section maximization of fun on each [lo, hi]."""
    g = (np.sqrt(5) - 1) / 2
    a, b = lo.copy(), hi.copy()
    c = b - g * (b - a)
    d = a + g * (b - a)
    fc, fd = fun(c), fun(d)
    for _ in range(iters):
        left = fc > fd
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        new_c = b - g * (b - a)
        new_d = a + g * (b - a)
        c_next = np.where(left, new_c, d)
        d_next = np.where(left, c, new_d)
        fc_next = np.where(left, fun(new_c), fd)
        fd_next = np.where(left, fc, fun(new_d))
        c, d, fc, fd = c_next, d_next, fc_next, fd_next
    return np.maximum(fc, fd)


def boundary_sup(f: RationalFn, n: int = 4096, threshold: float | None = None) -> float:
    """Max of |f| on the unit circle.

    Grid maximum plus local golden-section refinement around every sample
    whose value, inflated by the Lipschitz gap, could exceed `threshold`
    (default: the grid maximum).
    """
    theta = 2 * np.pi * np.arange(n) / n
    t = np.exp(1j * theta)
    mod = np.abs(f(t))
    h = 2 * np.pi / n
    lip = 1.5 * float(np.max(np.abs(f.derivative_at(t)))) if not f.is_constant else 0.0
    gap = lip * h / 2
    top = float(mod.max())
    thr = top if threshold is None else min(threshold, top)
    cand = np.flatnonzero(mod + gap >= thr)
    if cand.size == 0 or gap == 0:
        return top
    refined = _golden_max(lambda th: np.abs(f(np.exp(1j * th))),
                          theta[cand] - h, theta[cand] + h)
    return max(top, float(refined.max()))


@dataclass(frozen=True)
class SchurCertificate:
    sup_bound: float
    is_schur: bool
    is_finite_blaschke: bool
    log_integrable_full_circle: bool


def certify_schur(f: RationalFn, cert_tol: float = 1e-9, n: int = 4096) -> SchurCertificate:
    f = f.reduced()
    for p in f.poles:
        if abs(p) <= 1 + POLE_PROXIMITY:
            raise NotAnalyticError(complex(p))
    sup = boundary_sup(f, n, threshold=1 - 10 * cert_tol)
    t = np.exp(2j * np.pi * np.arange(n) / n)
    dev = float(np.max(np.abs(np.abs(f(t)) - 1)))
    is_schur = sup <= 1 + cert_tol
    blaschke = is_schur and dev <= cert_tol
    return SchurCertificate(sup_bound=sup, is_schur=is_schur,
                            is_finite_blaschke=blaschke,
                            log_integrable_full_circle=not blaschke)


# ---------------------------------------------------------------------------
# factorizations

def inner_outer(f: RationalFn) -> tuple[RationalFn, RationalFn]:
    """Split f = inner * outer.

    inner collects every zero in the open disk as Blaschke factors (z for a
    zero at the origin); zeros on the circle stay in the outer factor.  The
    unimodular constant is moved onto the inner factor so that outer(0) > 0.
    """
    f = f.reduced()
    if f.is_zero:
        raise ZeroFunctionError("inner-outer factorization of the zero function")
    interior = [complex(a) for a in f.zeros if abs(a) < 1 - UNIT_TOL]
    num = f.num
    for a in interior:
        num = num.deflate(a) * ComplexPoly([1, -np.conj(a)])
    outer = RationalFn(_trim_negligible(num), f.den, normalized=True)
    o0 = complex(outer(0.0))
    c = o0 / abs(o0)
    outer = outer / c
    b_num, b_den = _blaschke_parts(interior)
    inner = RationalFn(b_num * c, b_den).reduced()
    return inner, outer


def nevanlinna_split(g: RationalFn) -> tuple[RationalFn, RationalFn]:
    """Write g = g1/g2 with g1, g2 Schur and g2's inner part carrying the disk poles.

    g2 = B * D_out / c where B is the Blaschke product over the poles of g in
    the open disk and D_out = prod(1 - z/b) over the remaining poles; c >= 1
    is the smallest scale making both g1 and g2 contractive on the circle.
    """
    g = g.reduced()
    if g.is_zero:
        raise ZeroFunctionError("Nevanlinna split of the zero function")
    poles = [complex(p) for p in g.poles]
    inside = [p for p in poles if abs(p) < 1 - UNIT_TOL]
    outside = [p for p in poles if abs(p) >= 1 - UNIT_TOL]
    b_num, b_den = _blaschke_parts(inside)
    d_out = ComplexPoly([1])
    scale = g.den.lead
    for b in outside:
        d_out = d_out * ComplexPoly([1, -1 / b])
        scale *= -b
    g2_raw = RationalFn(b_num * d_out, b_den).reduced()
    g1_raw = RationalFn(g.num * (1 / scale), b_den).reduced()
    c = max(1.0, boundary_sup(g1_raw), boundary_sup(RationalFn(d_out, ComplexPoly([1]))))
    if c > 1.0:
        c *= 1 + 1e-12
    return g1_raw / c, g2_raw / c
