from fractions import Fraction

import pytest

from qpainleve import expr as E
from qpainleve.algebra import alpha, build, f
from qpainleve.hamiltonian import h0_expr, k_expr
from qpainleve.report import run_suite
from qpainleve.weyl import (
    apply,
    cartan,
    demazure,
    fit_odd_coefficient,
    hamiltonian_j,
    parse_word,
    verify_equivariance,
    verify_group_relations,
    verify_H_differences,
    verify_H_transformation,
)


def test_action_on_roots():
    assert apply(["s1"], alpha(0), 2) == alpha(0) + alpha(1)
    assert apply(["s0"], alpha(1), 1) == alpha(1) + 2 * alpha(0)
    assert apply(["pi"], f(2), 2) == f(0)
    assert cartan(1, 0, 2) == -1 and cartan(0, 1, 1) == -2 and cartan(2, 2, 2) == 2


def test_words():
    assert parse_word("s0 s1 pi") == ["s0", "s1", "pi"]
    A = build("K_l", 2, 3)
    lhs = A.eval(apply(parse_word("s0 s1 s0"), f(2), 2))
    rhs = A.eval(apply(parse_word("s1 s0 s1"), f(2), 2))
    assert not lhs.residual_orders(rhs)


def test_s0_squared_on_l1():
    A = build("K_1", 1, 3)
    assert A.eval(apply(["s0", "s0"], f(1), 1)).equals(A.generator("f1"))


def test_pi_order_on_l4():
    assert apply(["pi"] * 5, f(2), 4) == f(2)


def test_demazure():
    A = build("K_l", 3, 3)
    assert A.eval(demazure(1, alpha(1), 3)).equals(A.scalar(-2))
    assert A.eval(demazure(1, f(1), 3)).is_zero()
    inv_f1 = A.eval(E.inv(f(1)))
    assert A.eval(demazure(1, f(2), 3)).equals(inv_f1)
    assert A.eval(demazure(1, f(0), 3)).equals(-inv_f1)


def test_h_transformation_examples():
    A = build("K_l", 2, 3)
    H0 = A.eval(h0_expr(2))
    assert (A.eval(apply(["s1"], h0_expr(2), 2)) - H0).is_zero()
    got = A.eval(apply(["s0"], h0_expr(2), 2)) - H0
    assert got.equals(A.eval(k_expr(2) * alpha(0) * E.inv(f(0))))
    B = build("K_l", 3, 3)
    H1 = hamiltonian_j(1, 3)
    got = B.eval(apply(["s1"], H1, 3)) - B.eval(H1)
    x1 = f(1) + f(3)
    assert got.equals(B.eval(k_expr(3) * alpha(1) * E.inv(f(1)) * x1))


@pytest.mark.parametrize("l", [1, 2, 3])
def test_group_relations(l):
    rep = verify_group_relations(l, trials=2)
    assert rep.passed, rep.failures[:3]
    assert rep.bound < 1e-30


def test_braids_absent_for_l1():
    rep = verify_group_relations(1, which=[")^3"], trials=1)
    assert rep.entries == [] and rep.notes


def test_wrong_relation_fails():
    # s0 s1 is not an involution for l=2
    def identities(A):
        g = f(2)
        yield "(s0 s1)^2 = 1", A.eval(apply(["s0", "s1", "s0", "s1"], g, 2)), A.eval(g)

    rep = run_suite("negative", {}, "K_l", 2, 3, identities, trials=1)
    assert not rep.passed


@pytest.mark.parametrize("l", [1, 2, 3])
def test_h_transformation(l):
    rep = verify_H_transformation(l, trials=2)
    assert rep.passed, rep.failures[:3]


@pytest.mark.parametrize("l", [1, 2])
def test_equivariance(l):
    rep = verify_equivariance(l, trials=2)
    assert rep.passed, rep.failures[:3]


def test_equivariance_examples():
    A = build("K_l", 2, 3)
    from qpainleve.hamiltonian import apply_flow

    lhs = A.eval(apply(["pi"], apply_flow(f(0), 2), 2))
    assert lhs.equals(A.eval(apply_flow(f(1), 2)))
    lhs = A.eval(apply(["s1"], apply_flow(alpha(0), 2), 2))
    assert lhs.is_zero()


def test_h_differences_even():
    rep = verify_H_differences(4, 0)
    assert rep.passed
    A = build("K_l", 2, 3)
    total = A.zero()
    for j in range(3):
        total = total + A.eval(hamiltonian_j(j + 1, 2)) - A.eval(hamiltonian_j(j, 2))
    assert total.is_zero()


def test_h_differences_odd_reports_fitted_coefficient():
    rep = verify_H_differences(3, 0)
    assert rep.passed
    assert rep.params["fitted"] == "1/4" and rep.params["printed"] == "1/3"
    assert any("printed form leaves residual" in n for n in rep.notes)
    assert fit_odd_coefficient(build("K_l", 5, 3), 1) == Fraction(1, 3)
