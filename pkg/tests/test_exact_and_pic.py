from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from snc_smooth.curves import ORIGIN, CurveGeometry, EllipticPoint, RationalPoint
from snc_smooth.exact import GaussianRational as Q
from snc_smooth.exact import kernel_basis, mat_vec, rank, to_fraction
from snc_smooth.pic import (
    LineBundleClass,
    MixedGeometry,
    NotAnAutomorphism,
    apply_twist,
    divisor_class,
    is_trivial,
    lattice_action,
    tensor,
)

fractions = st.builds(Fraction, st.integers(-60, 60), st.integers(1, 12))
gaussians = st.builds(Q, fractions, fractions)
points = st.builds(EllipticPoint, fractions, fractions)
SQUARE = CurveGeometry.elliptic(Q(0, 1))
GENERIC = CurveGeometry.elliptic(Q(Fraction(1, 5), Fraction(3, 2)))


def classes(geometry):
    return st.builds(lambda d, p: LineBundleClass(geometry, d, p), st.integers(-20, 20), points)


def test_to_fraction_rejects_floats_and_bools():
    assert to_fraction("3/6") == Fraction(1, 2)
    with pytest.raises(TypeError):
        to_fraction(0.5)
    with pytest.raises(TypeError):
        to_fraction(True)


@given(gaussians, gaussians, gaussians)
def test_gaussian_field_laws(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert a * b == b * a
    if b:
        assert (a / b) * b == a
    assert (a * b).conjugate() == a.conjugate() * b.conjugate()


def test_i_powers_cycle():
    i = Q.i_power(1)
    assert i * i == Q(-1) and Q.i_power(4) == Q(1) and Q.i_power(-1) == Q(0, -1)


@settings(max_examples=60)
@given(st.lists(st.lists(st.integers(-3, 3), min_size=4, max_size=4), min_size=1, max_size=5))
def test_exact_rank_matches_float_rank_and_kernel_is_kernel(rows):
    exact = [[Q(x) for x in r] for r in rows]
    assert rank(exact, 4) == np.linalg.matrix_rank(np.array(rows, dtype=float))
    basis = kernel_basis(exact, 4)
    assert len(basis) == 4 - rank(exact, 4)
    for v in basis:
        assert all(not x for x in mat_vec(exact, v))


@given(points, points, points)
def test_elliptic_group_laws(p, q, r):
    assert (p + q) + r == p + (q + r)
    assert p + q == q + p
    assert p + ORIGIN == p and (p - p).is_zero()


@given(points)
def test_halves_are_all_square_roots(p):
    halves = p.halves()
    assert len(set(halves)) == 4
    assert all(h * 2 == p for h in halves)


@given(classes(SQUARE), classes(SQUARE), classes(SQUARE))
def test_tensor_is_an_abelian_group(a, b, c):
    assert tensor(tensor(a, b), c) == tensor(a, tensor(b, c))
    assert tensor(a, b) == tensor(b, a)
    assert is_trivial(tensor(a, -a))


def test_tensor_refuses_mixed_curves():
    with pytest.raises(MixedGeometry):
        tensor(LineBundleClass(SQUARE, 1), LineBundleClass(GENERIC, 1))


def test_divisor_class_sums_points():
    p, q = EllipticPoint(Fraction(1, 3), 0), EllipticPoint(0, Fraction(1, 4))
    c = divisor_class(SQUARE, [p, q])
    assert c.degree == 2 and c.jacobian_point == p + q
    line = CurveGeometry.rational()
    assert divisor_class(line, [RationalPoint("a"), RationalPoint("b")]).degree == 2


@pytest.mark.parametrize("k", range(4))
def test_i_power_twists_are_lattice_automorphisms(k):
    p, q, r, s = lattice_action(SQUARE, Q.i_power(k))
    assert p * s - q * r == 1


def test_multiplication_by_i_is_not_an_automorphism_of_a_generic_lattice():
    with pytest.raises(NotAnAutomorphism):
        lattice_action(GENERIC, Q(0, 1))


@given(classes(SQUARE), classes(SQUARE), st.integers(0, 3))
def test_twist_is_a_homomorphism(a, b, k):
    u = Q.i_power(k)
    assert apply_twist(tensor(a, b), u) == tensor(apply_twist(a, u), apply_twist(b, u))


def test_twist_by_i_rotates_the_jacobian():
    c = LineBundleClass(SQUARE, 0, EllipticPoint(Fraction(1, 4), 0))
    assert apply_twist(c, Q(0, 1)).jacobian_point == EllipticPoint(0, Fraction(1, 4))
    assert apply_twist(apply_twist(c, Q(0, 1)), Q(0, -1)) == c
