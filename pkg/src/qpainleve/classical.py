"""The hbar -> 0 regression: quantum identities against their commutative counterparts.

A *commutative twin* of an algebra shares its coefficient domain and
generators but has a zero pairing, so its products are ordinary commutative
products and every hbar term drops out. Each suite is evaluated twice, once
in the algebra and once in its twin, and two things are checked per identity:

* the identity holds in the twin (the classical statement), and
* the hbar^0 coefficient of each side in the algebra equals the twin's value.

For the flow itself the twin has no commutator to offer, so the classical
flow is computed independently as a Poisson bracket with ``RatFn.diff``.
"""

from __future__ import annotations

from fractions import Fraction

from .algebra import AlgebraSpec, build, build_modular
from .coeff import DEFAULT_PRIME, RatFn
from .report import CheckReport, _lam_degree
from .star import Pairing, StarElem

__all__ = [
    "CLASSICAL_SUITES",
    "commutative_twin",
    "poisson",
    "verify_classical_flow",
    "verify_classical_suite",
]


def commutative_twin(A: AlgebraSpec) -> AlgebraSpec:
    """Same presentation and domain with all commutators set to zero.

    Generators that ``A`` realizes as installed elements rather than by
    expressions (the odd-l Lax entries u_i) are carried over at hbar = 0.
    """
    C = AlgebraSpec(A.kind, A.l, A.dom, Pairing(A.coords), A.order, A.gen_exprs,
                    A.centrals, A.derived, A.constraints)
    for name, val in A._gen_cache.items():
        if name not in A.coords and name not in A.gen_exprs:
            C._gen_cache[name] = StarElem(C, (val.classical(),), val.exact)
    return C


def poisson(pairing: Pairing, a: RatFn, b: RatFn) -> RatFn:
    """``{a, b} = sum_ij pairing[i][j] d_i a d_j b``."""
    coords = pairing.coords
    out = a.dom.zero()
    grads_a = {c: a.diff(c) for c in coords}
    grads_b = {c: b.diff(c) for c in coords}
    for i, j, v in pairing.nonzero():
        da, db = grads_a[coords[i]], grads_b[coords[j]]
        if not da.is_zero() and not db.is_zero():
            out = out + a.dom.const(v) * da * db
    return out


def _instances(kind: str, l: int, K: int, mode: str, trials: int, prime, seed):
    if mode == "exact":
        yield build(kind, l, K), False
        return
    for t in range(trials):
        yield build_modular(kind, l, K, prime=prime or DEFAULT_PRIME, seed=seed + t,
                            line=(t == 0)), t == 0


def _start(name: str, l: int, K: int, mode: str, trials: int, prime) -> CheckReport:
    rep = CheckReport(f"classical.{name}", {"l": l, "K": K}, mode)
    if mode == "modular":
        rep.prime, rep.trials = prime or DEFAULT_PRIME, trials
    return rep


def _record(rep: CheckReport, status: dict, order: list, label: str, ok: bool, text: str) -> None:
    if label not in status:
        status[label] = ""
        order.append(label)
    if not ok and not status[label]:
        status[label] = text or "mismatch"


def verify_classical_suite(name: str, l: int, K: int = 3, *, mode: str = "modular",
                           trials: int = 3, prime: int | None = None, seed: int = 0) -> CheckReport:
    """Re-run the identity suite ``name`` at hbar = 0 (see :data:`CLASSICAL_SUITES`)."""
    kind_of, make = CLASSICAL_SUITES[name]
    rep = _start(name, l, K, mode, trials, prime)
    status: dict[str, str] = {}
    order: list[str] = []
    with rep.timed():
        for A, measure in _instances(kind_of(l), l, K, mode, trials, prime, seed):
            C = commutative_twin(A)
            if rep.algebra is None:
                rep.algebra = A.descriptor()
            for gen in make(l):
                for (label, ql, qr), (_, cl, cr) in zip(gen(A), gen(C)):
                    a, b = cl.classical(), cr.classical()
                    if measure:
                        rep.max_degree = max(rep.max_degree, _lam_degree(cl) + _lam_degree(cr))
                    _record(rep, status, order, f"{label} at hbar=0", a == b, repr(a - b)[:300])
                    same = ql.classical() == a and qr.classical() == b
                    _record(rep, status, order, f"{label} reduces", same,
                            "hbar^0 part differs from the commutative computation")
        for label in order:
            rep.check(label, not status[label], status[label])
    return rep


def verify_classical_flow(l: int, K: int = 3, *, mode: str = "exact", trials: int = 3,
                          prime: int | None = None, seed: int = 0) -> CheckReport:
    """The closed flow at hbar = 0 equals the Poisson flow of the classical H_0.

    Also checks that the hbar^0 part of the quantum derivation is that Poisson
    flow, i.e. that ``[H_0, a]/hbar`` reduces to ``{H_0, a}``.
    """
    from .hamiltonian import _fgens, derive, h0_expr, theorem1_rhs, x0_expr

    kind = "K_1" if l == 1 else "K_l"
    rep = _start("flow", l, K, mode, trials, prime)
    status: dict[str, str] = {}
    order: list[str] = []
    with rep.timed():
        for A, _ in _instances(kind, l, K, mode, trials, prime, seed):
            C = commutative_twin(A)
            if rep.algebra is None:
                rep.algebra = A.descriptor()
            H0 = C.eval(h0_expr(l)).classical()
            k = C.central_value("k").classical()
            quantum = derive(A)
            for name in _fgens(A):
                i = int(name[1:])
                fi = C.generator(name).classical()
                val = poisson(A.pairing, H0, fi)
                if l % 2 == 1 and l > 1:
                    val = val + k * fi * C.dom.const(Fraction(-1 if i % 2 == 0 else 1, 2))
                    if i == 0:
                        val = val + k * C.eval(x0_expr(l)).classical()
                elif i == 0:
                    val = val + k
                rhs = C.eval(theorem1_rhs(i, l)).classical()
                _record(rep, status, order, f"{{H0,{name}}} = closed form at hbar=0", val == rhs,
                        repr(val - rhs)[:300])
                _record(rep, status, order, f"d{name} reduces to the Poisson flow",
                        quantum[name].classical() == val, "hbar^0 part differs")
        for label in order:
            rep.check(label, not status[label], status[label])
    return rep


def _weyl(l):
    from .weyl import equivariance_identities, group_relation_identities, h_transformation_identities
    return group_relation_identities, h_transformation_identities, equivariance_identities


def _kind(l: int) -> str:
    return "K_1" if l == 1 else "K_l"


def _lax_kind(l: int) -> str:
    from .lax import _lax_kind as lk
    return lk(l)


def _suite_relations(l):
    return [_weyl(l)[0](l)]


def _suite_h(l):
    return [_weyl(l)[1](l)]


def _suite_equiv(l):
    return [_weyl(l)[2](l)]


def _suite_lax(l):
    from .lax import residual_identities
    return [residual_identities(l)]


def _suite_gauge(l):
    from .lax import gauge_identities
    return [gauge_identities(l)]


def _suite_translations(l):
    from .discrete import _alpha_identities, _f_identities
    return [_alpha_identities(l), _f_identities(l)]


def _suite_system2(l):
    from .discrete import _system2_identities
    return [_system2_identities(2)]


# suite name -> (algebra kind for l, identity generators for l)
CLASSICAL_SUITES = {
    "weyl.relations": (_kind, _suite_relations),
    "weyl.h-transform": (_kind, _suite_h),
    "weyl.equivariance": (_kind, _suite_equiv),
    "lax.residual": (_lax_kind, _suite_lax),
    "lax.gauge": (lambda l: "A_l", _suite_gauge),
    "discrete.translations": (lambda l: "K_l", _suite_translations),
    "discrete.system2": (lambda l: "K_l", _suite_system2),
}
