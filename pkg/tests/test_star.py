from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qpainleve import expr as E
from qpainleve.coeff import ModularPoint, modular_eval
from qpainleve.algebra import alpha, build, build_modular, cyc, defining_relations, equal_elem, f
from qpainleve.star import NotInvertible, commutator, partial, star_inv


@pytest.fixture(scope="module")
def K4():
    return build("K_l", 4, 3)


def gens(A, n):
    return [A.generator(f"f{i}") for i in range(n)]


def test_adjacent_and_distant_products(K4):
    f0, f1, f2 = gens(K4, 3)
    x0, x1, x2 = (K4.dom.var(n) for n in ("f0", "f1", "f2"))
    p = f0 * f1
    assert p.coeffs[0] == x0 * x1
    assert p.coeffs[1] == K4.dom.const(Fraction(1, 2))
    assert all(c.is_zero() for c in p.coeffs[2:])
    q = f0 * f2
    assert q.coeffs[0] == x0 * x2 and all(c.is_zero() for c in q.coeffs[1:])
    assert (f0 * f2).equals(f2 * f0)
    assert not (f1 * f0).residual_orders(p - K4.hbar())


def test_unit(K4):
    a = K4.eval(f(0) * f(1) * f(3) + 3 * f(2))
    assert (K4.one() * a).equals(a)
    assert (a * K4.one()).equals(a)


def test_commutators(K4):
    f0, f1, f2, f3 = gens(K4, 4)
    assert commutator(f1, f0).equals(-K4.hbar())
    assert commutator(f2, f1 + f3).is_zero()
    assert commutator(K4.generator("f4"), f0).equals(K4.hbar())
    a = K4.eval(f(0) * f(1) + f(2))
    assert commutator(a, a).is_zero()


def test_inverse_of_coordinate_is_exact(K4):
    inv = star_inv(K4.generator("f0"))
    assert inv.classical() == 1 / K4.dom.var("f0")
    assert all(c.is_zero() for c in inv.coeffs[1:])


def test_inverse_geometric_series(K4):
    f1 = K4.generator("f1")
    h = K4.hbar()
    inv = star_inv(K4.one() + h * f1)
    want = K4.one() - h * f1 + h * h * f1 * f1 - h * h * h * f1 * f1 * f1
    assert not inv.residual_orders(want)


def test_inverse_property(K4):
    a = K4.eval(f(0) * f(1) + f(2) * f(0) + alpha(1))
    assert not (star_inv(a) * a).residual_orders(K4.one())
    assert not (a * star_inv(a)).residual_orders(K4.one())


def test_zero_is_not_invertible(K4):
    with pytest.raises((NotInvertible, ZeroDivisionError)):
        star_inv(K4.zero())


def test_partial_derivatives(K4):
    f0, f1, f2 = gens(K4, 3)
    assert partial("f1", f1).equals(K4.one())
    assert partial("f1", f0 * f1 * f2).equals(f0 * f2)
    a, b = K4.eval(f(0) * f(1) + f(3)), K4.eval(f(1) * f(2) * f(1))
    lhs = partial("f1", a * b)
    rhs = partial("f1", a) * b + a * partial("f1", b)
    assert not lhs.residual_orders(rhs)


@pytest.mark.parametrize("l", [1, 2, 3, 4, 5])
def test_defining_relations_hold(l):
    A = build("K_1" if l == 1 else "K_l", l, 3)
    for label, lhs, rhs in defining_relations(A):
        assert not A.eval(lhs).residual_orders(A.eval(rhs)), label


def test_relation_examples():
    K4 = build("K_l", 4, 3)
    assert commutator(K4.generator("f4"), K4.generator("f0")).equals(K4.hbar())
    K1 = build("K_1", 1, 3)
    assert commutator(K1.generator("f1"), K1.generator("f0")).equals(
        K1.hbar() * K1.generator("f2").scale(2))
    x = K1.eval(f(0) + f(1) + f(2) * f(2))
    assert commutator(x, K1.generator("f2")).is_zero()
    assert commutator(x, K1.generator("f1")).is_zero()
    A2 = build("A_l", 2, 3)
    assert commutator(A2.generator("u0"), A2.generator("f0")).equals(A2.hbar())
    assert commutator(A2.generator("f2"), A2.generator("u0")).equals(A2.hbar())


def test_equal_elem(K4):
    assert equal_elem(f(0) * f(1), f(1) * f(0) + E.central("h"), K4) == []
    assert equal_elem(f(0) * f(1), f(1) * f(0), K4) == [1]


def test_modular_instances_agree_with_exact():
    A = build("K_l", 3, 3)
    B = build_modular("K_l", 3, 3, seed=5)
    e = E.inv(f(0)) * f(1) * f(0) + alpha(2) * f(3)
    ex, md = A.eval(e), B.eval(e)
    pt = {n: 1000 + 7 * i for i, n in enumerate(A.coords)}
    point = ModularPoint(B.dom.modulus, {**pt, **B.dom.values})
    for k in range(4):
        assert modular_eval(ex.coeff(k), point) == modular_eval(md.coeff(k), point)


# -- properties ---------------------------------------------------------------

_K3 = build("K_l", 3, 3)
_leaf = st.sampled_from([f(0), f(1), f(2), f(3), alpha(0), E.central("h")])


@st.composite
def polys(draw):
    terms = []
    for _ in range(draw(st.integers(1, 3))):
        word = draw(st.lists(_leaf, min_size=1, max_size=3))
        terms.append(draw(st.integers(-3, 3)) * E.mul(*word))
    return E.add(*terms)


@settings(max_examples=25, deadline=None)
@given(polys(), polys(), polys())
def test_star_product_is_associative(a, b, c):
    A = _K3
    x, y, z = A.eval(a), A.eval(b), A.eval(c)
    assert not ((x * y) * z).residual_orders(x * (y * z))


@settings(max_examples=25, deadline=None)
@given(polys(), polys(), st.integers(0, 3))
def test_partial_is_a_derivation(a, b, i):
    A = _K3
    x, y = A.eval(a), A.eval(b)
    name = f"f{i}"
    assert not partial(name, x * y).residual_orders(partial(name, x) * y + x * partial(name, y))


@settings(max_examples=25, deadline=None)
@given(polys(), polys())
def test_commutator_is_antisymmetric_and_hbar_divisible(a, b):
    A = _K3
    c = commutator(A.eval(a), A.eval(b))
    assert (c + commutator(A.eval(b), A.eval(a))).is_zero()
    assert c.coeffs[0].is_zero()


def test_cyc():
    assert cyc(5, 4) == 0 and cyc(-1, 4) == 4
