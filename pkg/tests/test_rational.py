import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from arcsynth.errors import NotAnalyticError, PoleProximityError, ZeroFunctionError
from arcsynth.rational import (
    ComplexPoly,
    RationalFn,
    boundary_sup,
    certify_schur,
    inner_outer,
    nevanlinna_split,
    para_conjugate,
    poly_roots,
)

Z = RationalFn.from_coeffs([0, 1])
T = np.exp(1j * np.linspace(0, 2 * np.pi, 97))

cplx = st.complex_numbers(max_magnitude=2.5, allow_nan=False, allow_infinity=False)


def _sorted(r):
    return np.array(sorted(np.asarray(r), key=lambda x: (round(x.real, 6), x.imag)))


def test_roots_simple():
    r = poly_roots(ComplexPoly([2, -7, 3]))
    assert np.allclose(_sorted(r), [1 / 3, 2])


def test_roots_at_origin_are_exact():
    r = poly_roots(ComplexPoly([0, 0, 1]))
    assert np.all(r == 0) and len(r) == 2


@given(st.lists(cplx, min_size=1, max_size=5))
@settings(max_examples=60, deadline=None)
def test_roots_reproduce_polynomial(roots):
    p = ComplexPoly.from_roots(roots)
    r = poly_roots(p)
    assert len(r) == len(roots)
    q = ComplexPoly.from_roots(r)
    pts = 0.9 * T
    assert np.max(np.abs(p(pts) - q(pts))) <= 1e-6 * max(1.0, np.max(np.abs(p(pts))))


def test_reduced_cancels_common_roots():
    f = RationalFn(ComplexPoly.from_roots([0.5, 2.0]), ComplexPoly.from_roots([0.5, -3.0]))
    g = f.reduced()
    assert g.den.degree == 1 and g.num.degree == 1
    assert np.allclose(f(T), g(T))


def test_evaluation_refuses_pole():
    f = RationalFn.from_coeffs([1], [-0.5, 1])
    with pytest.raises(PoleProximityError):
        f(0.5)


def test_arithmetic_matches_pointwise():
    f = RationalFn.from_coeffs([1, 2j], [3, 1])
    g = RationalFn.from_coeffs([0.5, 0, 1], [1, -0.25])
    for op in (lambda a, b: a + b, lambda a, b: a - b, lambda a, b: a * b, lambda a, b: a / b):
        assert np.allclose(op(f, g)(T), op(f(T), g(T)))


def test_para_conjugate_example():
    assert para_conjugate(Z * 0.5).allclose(RationalFn.from_coeffs([0.5], [0, 1]))


@given(st.lists(cplx, min_size=0, max_size=3), st.lists(cplx, min_size=0, max_size=3), cplx)
@settings(max_examples=60, deadline=None)
def test_para_conjugate_involution_and_boundary(zs, ps, c):
    ps = [p for p in ps if abs(abs(p) - 1) > 0.05 and abs(p) > 0.05]
    if abs(c) < 1e-3:
        c = 1.0
    f = RationalFn(ComplexPoly.from_roots(zs, c), ComplexPoly.from_roots(ps)).reduced()
    fs = para_conjugate(f)
    assert para_conjugate(fs).max_boundary_error(f) <= 1e-8 * max(1.0, boundary_sup(f))
    # on the circle f*(t) = conj f(t)
    t = np.exp(1j * np.linspace(0.1, 6.2, 41))
    assert np.allclose(fs(t), np.conj(f(t)), atol=1e-8 * max(1.0, boundary_sup(f)))


def test_certify_examples():
    c = certify_schur(Z * 0.5)
    assert c.is_schur and not c.is_finite_blaschke and abs(c.sup_bound - 0.5) < 1e-9
    b = certify_schur(RationalFn.from_coeffs([-0.5, 1], [1, -0.5]))
    assert b.is_schur and b.is_finite_blaschke
    assert not certify_schur(Z * 2).is_schur
    with pytest.raises(NotAnalyticError):
        certify_schur(RationalFn.from_coeffs([1], [-0.5, 1]))


def test_boundary_sup_against_dense_sampling():
    f = RationalFn(ComplexPoly.from_roots([1.3j, 0.2]), ComplexPoly.from_roots([1.05 + 0.1j, -2]))
    dense = np.max(np.abs(f(np.exp(1j * np.linspace(0, 2 * np.pi, 400001)))))
    assert boundary_sup(f) >= dense - 1e-9
    assert boundary_sup(f) <= dense * (1 + 1e-7)


def test_inner_outer_example():
    f = RationalFn(ComplexPoly([0, 2 / 3, -1 / 3]))
    inner, outer = inner_outer(f)
    assert inner.allclose(Z)
    assert outer.allclose(RationalFn.from_coeffs([2 / 3, -1 / 3]))


@given(st.lists(st.complex_numbers(max_magnitude=0.95), min_size=0, max_size=3),
       st.lists(st.complex_numbers(min_magnitude=1.1, max_magnitude=3), min_size=0, max_size=2))
@settings(max_examples=60, deadline=None)
def test_inner_outer_properties(zin, zout):
    f = RationalFn(ComplexPoly.from_roots(list(zin) + list(zout)), ComplexPoly.from_roots([2.5, -1.7j]))
    inner, outer = inner_outer(f)
    assert np.allclose((inner * outer)(T), f(T), atol=1e-8)
    assert np.allclose(np.abs(inner(T)), 1, atol=1e-8)
    assert abs(outer(0).imag) < 1e-12 and outer(0).real > 0
    assert all(abs(z) > 1 for z in outer.zeros)


def test_inner_outer_zero_raises():
    with pytest.raises(ZeroFunctionError):
        inner_outer(RationalFn.constant(0))


def test_nevanlinna_split_examples():
    g1, g2 = nevanlinna_split(RationalFn.from_coeffs([0.5], [0, 1]))
    assert g1.allclose(RationalFn.constant(0.5)) and g2.allclose(Z)
    g = RationalFn.from_coeffs([0.25], [1, -0.5])
    g1, g2 = nevanlinna_split(g)
    assert np.allclose((g1 / g2)(T), g(T))
    assert certify_schur(g1).is_schur and certify_schur(g2).is_schur
    g1, g2 = nevanlinna_split(Z * 0.5)
    assert np.allclose((g1 / g2)(T), 0.5 * T)


@given(st.lists(st.complex_numbers(min_magnitude=0.1, max_magnitude=0.9), min_size=1, max_size=3),
       st.lists(st.complex_numbers(min_magnitude=1.2, max_magnitude=3), min_size=0, max_size=3))
@settings(max_examples=50, deadline=None)
def test_nevanlinna_split_properties(poles, zeros):
    g = RationalFn(ComplexPoly.from_roots(zeros), ComplexPoly.from_roots(poles)).reduced()
    g1, g2 = nevanlinna_split(g)
    assert np.allclose((g1 / g2)(T), g(T), rtol=1e-7, atol=1e-9)
    for f in (g1, g2):
        cert = certify_schur(f)
        assert cert.is_schur
        assert all(abs(p) > 1 for p in f.poles)


def test_round_trip_dict():
    f = RationalFn.from_coeffs([1 + 2j, 0.5], [3, -1j, 0.25])
    g = RationalFn.from_dict(f.to_dict())
    assert g.allclose(f.reduced())
