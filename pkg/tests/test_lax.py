import pytest

from qpainleve import expr as E
from qpainleve.algebra import alpha, build, f
from qpainleve.lax import (
    Z,
    ZMatrix,
    build_B,
    build_L,
    compatibility_residual,
    flow_dt,
    gauge_action,
    gauge_identities,
    gauge_matrix,
    solve_u,
    verify_gauge,
    verify_odd_chain,
    verify_residual,
    z_dz,
)
from qpainleve.star import commutator


def test_matrix_entries():
    A = build("A_l", 2, 3)
    L, B = build_L(A), build_B(A)
    assert L[2, 0].equals(A.eval(Z * f(0)))
    assert L[2, 1].equals(A.eval(Z))
    assert B[2, 2].equals(A.generator("u0"))
    A1 = build("A_l", 1, 3)
    assert build_L(A1)[0, 1].equals(A1.eval(f(1) + Z))


def test_flow_examples():
    A1 = build("A_l", 1, 3)
    assert flow_dt(A1)["f2"].equals(A1.eval(f(1) - f(0)))
    A = build("A_l", 2, 3)
    d = flow_dt(A)
    u = solve_u(A)
    want = -(u["u0"] * A.generator("f0")) + A.generator("f0") * u["u1"] + A.eval(alpha(0))
    assert not d["f0"].residual_orders(want)


def test_u_relations():
    A = build("A_l", 2, 3)
    u = solve_u(A)
    assert not (u["u2"] - u["u0"]).residual_orders(A.eval(f(1) - f(0)))
    assert commutator(u["u1"], A.generator("f1")).equals(A.hbar())
    A4 = build("A_l", 4, 3)
    total = A4.zero()
    for i in range(5):
        total = total + A4.generator(f"f{i}") - A4.generator(f"f{(i + 1) % 5}")
    assert total.is_zero()


@pytest.mark.parametrize("l", [1, 2])
def test_residual_vanishes(l):
    A = build("A_l", l, 3)
    R = compatibility_residual(A)
    assert all(R[i, j].is_zero() for i in range(R.n) for j in range(R.n))


@pytest.mark.parametrize("l", [1, 2, 3, 4])
def test_verify_residual(l):
    rep = verify_residual(l, mode="modular", trials=1)
    assert rep.passed, rep.failures[:3]


def test_residual_detects_a_wrong_flow():
    A = build("A_l", 2, 3)
    L, B = build_L(A), build_B(A)
    # drop the d_t L term: zero curvature must fail
    R = B.map(z_dz) + L * B - B * L
    assert any(not R[i, j].is_zero() for i in range(R.n) for j in range(R.n))


def test_odd_chain_l3():
    rep = verify_odd_chain(3)
    assert rep.passed, rep.failures[:3]
    assert any("differs" in n for n in rep.notes)


@pytest.mark.parametrize("l", [2, 3])
def test_gauge(l):
    rep = verify_gauge(l, trials=1)
    assert rep.passed, rep.failures[:3]


def test_gauge_read_off_l2():
    A = build("A_l", 2, 3)
    WL = gauge_action("s1", A)
    assert WL[1, 2].equals(A.eval(f(2) + alpha(1) * E.inv(f(1))))
    read = {label: (lhs, rhs) for label, lhs, rhs in gauge_identities(2)(A)}
    lhs, rhs = read["pi: a0"]
    assert lhs.equals(rhs) and rhs.equals(A.eval(alpha(1)))
    lhs, rhs = read["s2: a2"]
    assert lhs.equals(rhs) and rhs.equals(A.eval(-alpha(2)))


def test_wrong_gauge_fails():
    A = build("A_l", 2, 3)
    G, Gi = gauge_matrix("s1", 2)
    G[1][0], Gi[1][0] = Gi[1][0], G[1][0]  # sign-flipped G
    Gm, Gim = ZMatrix.from_exprs(A, G), ZMatrix.from_exprs(A, Gi)
    WL = Gm * build_L(A) * Gim + Gm * Gim.map(z_dz)
    assert not WL[1, 2].equals(A.eval(f(2) + alpha(1) * E.inv(f(1))))
