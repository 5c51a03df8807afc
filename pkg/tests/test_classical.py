import pytest

from qpainleve.algebra import build, f
from qpainleve.classical import (
    CLASSICAL_SUITES,
    commutative_twin,
    poisson,
    verify_classical_flow,
    verify_classical_suite,
)
from qpainleve.hamiltonian import h0_expr, theorem1_rhs
from qpainleve.star import commutator


def test_twin_is_commutative():
    A = build("K_l", 3, 3)
    C = commutative_twin(A)
    assert commutator(C.generator("f0"), C.generator("f1")).is_zero()
    assert not commutator(A.generator("f0"), A.generator("f1")).is_zero()
    x = A.eval(f(0) * f(1) * f(2))
    assert C.eval(f(0) * f(1) * f(2)).classical() == x.classical()


def test_poisson_on_coordinates():
    A = build("K_l", 4, 3)
    C = commutative_twin(A)
    g = [C.generator(f"f{i}").classical() for i in range(5)]
    assert poisson(A.pairing, g[0], g[1]) == A.dom.const(1)
    assert poisson(A.pairing, g[1], g[0]) == A.dom.const(-1)
    assert poisson(A.pairing, g[0], g[2]).is_zero()
    assert poisson(A.pairing, g[4], g[0]) == A.dom.const(1)


def test_poisson_matches_leading_commutator():
    A = build("K_l", 3, 3)
    a, b = A.eval(f(0) * f(1) + f(2)), A.eval(f(1) * f(2) * f(3))
    c = commutator(a, b)
    assert c.coeffs[1] == poisson(A.pairing, a.classical(), b.classical())


@pytest.mark.parametrize("l", [1, 2, 3, 4, 5])
def test_classical_flow(l):
    rep = verify_classical_flow(l)
    assert rep.passed, rep.failures[:3]


def test_classical_flow_wrong_orientation_fails():
    # the transposed bracket is the time-reversed flow
    A = build("K_l", 2, 3)
    C = commutative_twin(A)
    H0 = C.eval(h0_expr(2)).classical()
    f0 = C.generator("f0").classical()
    k = C.central_value("k").classical()
    flipped = poisson(A.pairing, f0, H0) + k
    assert flipped != C.eval(theorem1_rhs(0, 2)).classical()


@pytest.mark.parametrize("name,l", [
    ("weyl.relations", 2),
    ("weyl.h-transform", 2),
    ("weyl.equivariance", 2),
    ("lax.residual", 2),
    ("lax.gauge", 2),
    ("discrete.system2", 2),
])
def test_classical_suites(name, l):
    rep = verify_classical_suite(name, l, trials=1)
    assert rep.passed, rep.failures[:3]
    assert any(e.label.endswith("reduces") for e in rep.entries)


def test_suite_registry():
    assert set(CLASSICAL_SUITES) == {
        "weyl.relations", "weyl.h-transform", "weyl.equivariance", "lax.residual",
        "lax.gauge", "discrete.translations", "discrete.system2"}
