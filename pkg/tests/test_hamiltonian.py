from fractions import Fraction

import pytest

from qpainleve import expr as E
from qpainleve.algebra import alpha, build, f
from qpainleve.hamiltonian import (
    PRINTED_H0,
    build_H0,
    built_h0_json,
    canonical_algebra,
    canonical_map,
    derive,
    h0_expr,
    printed_h0_expr,
    printed_h0_json,
    theorem1_rhs,
    verify_conservation,
    verify_h0_printed,
    verify_heisenberg,
    verify_theorem1,
)
from qpainleve.roots import (
    IndexSubset,
    NotProper,
    Undefined,
    chi,
    enumerate_S,
    fK_expr,
    fundamental_weight,
    monomial_fK,
)
from qpainleve.star import commutator


# -- roots --------------------------------------------------------------------


def test_fundamental_weights():
    assert all(c == 0 for c in fundamental_weight(0, 3).coeffs)
    w1 = fundamental_weight(1, 2)
    assert (w1.coefficient(1), w1.coefficient(2)) == (Fraction(2, 3), Fraction(1, 3))
    d = fundamental_weight(1, 2) - fundamental_weight(2, 2)
    assert (d.coefficient(1), d.coefficient(2)) == (Fraction(1, 3), Fraction(-1, 3))
    with pytest.raises(ValueError):
        fundamental_weight(4, 3)


def test_chi():
    assert chi(IndexSubset(2, (1,))) == fundamental_weight(1, 2)
    assert chi(IndexSubset(3, (1, 2))) == fundamental_weight(1, 3) - fundamental_weight(2, 3)
    full = IndexSubset(2, (1, 2))
    assert chi(full) == fundamental_weight(1, 2) - fundamental_weight(2, 2)
    with pytest.raises(NotProper):
        chi(IndexSubset(2, (0, 1, 2)))


def test_enumerate_S():
    assert [K.elements for K in enumerate_S(1, 2)] == [(0,), (1,), (2,)]
    windows = sorted(K.elements for K in enumerate_S(3, 4))
    assert windows == sorted(tuple(sorted({i, (i + 1) % 5, (i + 2) % 5})) for i in range(5))
    pairs = {K.elements for K in enumerate_S(2, 5)}
    assert len(pairs) == 9
    assert {(0, 3), (1, 4), (2, 5)} <= pairs


def test_fK():
    A = build("K_l", 5, 3)
    assert fK_expr(IndexSubset(5, (1,))) == f(1)
    prod = monomial_fK(IndexSubset(5, (0, 1)), A)
    assert prod.equals(A.generator("f0") * A.generator("f1"))
    m = monomial_fK(IndexSubset(5, (0, 3)), A)
    assert m.equals(A.generator("f3") * A.generator("f0"))
    with pytest.raises(Undefined):
        fK_expr(IndexSubset(2, (0, 1, 2)))


# -- H_0 and the flow -----------------------------------------------------------


def test_h0_l1():
    A = build("K_1", 1, 3)
    want = E.mul(f(0), f(1)) * Fraction(1, 2) + E.mul(f(1), f(0)) * Fraction(1, 2) + alpha(1) * f(2)
    assert build_H0(A).equals(A.eval(want))


@pytest.mark.parametrize("l", sorted(PRINTED_H0))
def test_h0_matches_displayed_examples(l):
    rep = verify_h0_printed(l)
    assert rep.passed, rep.failures
    assert built_h0_json(l) == printed_h0_json(l)


def test_h0_printed_detects_wrong_coefficient():
    A = build("K_l", 2, 3)
    wrong = printed_h0_expr(2) + E.const(Fraction(1, 3)) * f(0)
    assert build_H0(A).residual_orders(A.eval(wrong)) == [0]


def test_flow_examples():
    A = build("K_1", 1, 3)
    d = derive(A)
    assert d["f2"].equals(A.eval(f(1) - f(0)))
    assert d["f0"].equals(A.eval(f(0) * f(2) + f(2) * f(0) + alpha(0)))
    B = build("K_l", 2, 3)
    d = derive(B)
    assert d["f0"].equals(B.eval(f(0) * f(1) - f(2) * f(0) + alpha(0)))
    assert d["f0"].equals(B.eval(theorem1_rhs(0, 2)))


@pytest.mark.parametrize("l", [1, 2, 3, 4, 5])
def test_theorem1(l):
    rep = verify_theorem1(build("K_1" if l == 1 else "K_l", l, 3))
    assert rep.passed, rep.failures
    assert any(e.label == "da1" for e in rep.entries)


def test_theorem1_detects_wrong_sign():
    A = build("K_l", 2, 3)
    d = derive(A)
    wrong = A.eval(f(1) * f(0) - f(2) * f(0) + alpha(0))
    assert d["f0"].residual_orders(wrong) == [1]


@pytest.mark.parametrize("l", [1, 2, 3, 4])
def test_conservation(l):
    rep = verify_conservation(build("K_1" if l == 1 else "K_l", l, 3))
    assert rep.passed, rep.failures


def test_canonical_map_examples():
    fwd, inv = canonical_map(4)
    assert fwd["p2"] == f(1) + f(3)
    A = canonical_algebra(4)
    assert A.eval(inv["f3"]).equals(A.eval(E.gen("p2") - E.gen("p1")))
    _, inv3 = canonical_map(3)
    C = canonical_algebra(3)
    want = E.central("x0") - E.inv(E.central("x0")) * E.gen("q1")
    assert C.eval(inv3["f0"]).equals(C.eval(want))
    assert commutator(A.generator("p1"), A.generator("q1")).equals(A.hbar())


@pytest.mark.parametrize("l", [1, 2, 3])
def test_heisenberg(l):
    rep = verify_heisenberg(build("K_1" if l == 1 else "K_l", l, 3))
    assert rep.passed, rep.failures
