"""Continuous limits of the discrete system.

An embedding ``Psi`` sends K_l into F_l(eps). Transporting ``T_1`` and the
reflections ``r_i`` through ``Psi`` gives an action on F_l(eps); the
eps-linear part of ``T_1 - 1`` is a derivation of F_l. For odd l it is the
quantum A_{l-1} system, for l=2 it yields the quantum second Painleve equation.

All eps dependence is kept exact (eps is never specialized); series
coefficients are read off by substituting eps = 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from . import expr as E
from .algebra import AlgebraSpec, alpha, build, build_modular, cyc, defining_relations, f
from .coeff import DEFAULT_PRIME
from .discrete import _update, symmetry_words
from .expr import Expr
from .report import CheckReport, _lam_degree
from .star import StarElem, star_mul
from .weyl import apply, cartan, orientation

__all__ = [
    "Embedding",
    "EpsSeries",
    "EpsDivisibilityError",
    "commutation_gap_l2",
    "conind_expr",
    "eps_expand",
    "limit_derivation",
    "psi_l2",
    "psi_odd",
    "qp2_rules",
    "theorem_2n_rhs",
    "verify_lemma_psi",
    "verify_limit_theorems",
    "verify_partial1",
]

EPS = E.central("eps")
T = E.central("t")


class EpsDivisibilityError(ArithmeticError):
    """``T_1(phi) - phi`` has a nonzero eps^0 part."""


# ---------------------------------------------------------------------
# eps series
# ---------------------------------------------------------------------


def _eps_split(x: StarElem) -> tuple[StarElem, StarElem]:
    """``x = x0 + eps * rest`` with ``x0`` free of eps."""
    dom = x.space.dom
    inv_eps = dom.var("eps").inverse()
    lead, rest = [], []
    for c in x.coeffs:
        c0 = c.subs({"eps": 0})
        lead.append(c0)
        rest.append((c - c0) * inv_eps)
    return x.space.elem(lead, x.exact), x.space.elem(rest, x.exact)


def eps_expand(x: StarElem, order: int) -> list[StarElem]:
    """Coefficients of eps^0..eps^order (x must be regular at eps = 0)."""
    out = []
    for _ in range(order + 1):
        c, x = _eps_split(x)
        out.append(c)
    return out


@dataclass
class EpsSeries:
    """Truncated power series in the central parameter eps over an F-algebra."""

    coeffs: list[StarElem]
    order: int

    @classmethod
    def from_elem(cls, x: StarElem, order: int) -> EpsSeries:
        return cls(eps_expand(x, order), order)

    def coefficient(self, j: int) -> StarElem:
        return self.coeffs[j]

    def __add__(self, other: EpsSeries) -> EpsSeries:
        n = min(self.order, other.order)
        return EpsSeries([a + b for a, b in zip(self.coeffs[: n + 1], other.coeffs[: n + 1])], n)

    def __sub__(self, other: EpsSeries) -> EpsSeries:
        n = min(self.order, other.order)
        return EpsSeries([a - b for a, b in zip(self.coeffs[: n + 1], other.coeffs[: n + 1])], n)

    def __mul__(self, other: EpsSeries) -> EpsSeries:
        n = min(self.order, other.order)
        out = []
        for m in range(n + 1):
            acc = self.coeffs[0].space.zero()
            for i in range(m + 1):
                acc = acc + star_mul(self.coeffs[i], other.coeffs[m - i])
            out.append(acc)
        return EpsSeries(out, n)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def to_json_obj(self) -> dict:
        return {"order": self.order, "coeffs": [c.to_json_obj() for c in self.coeffs]}


# ---------------------------------------------------------------------
# embeddings
# ---------------------------------------------------------------------


@dataclass
class Embedding:
    """Images of the K_l generators, roots and h in F_l(eps)."""

    l: int
    images: dict[str, Expr] = field(default_factory=dict)

    def apply(self, e: Expr) -> Expr:
        return E.substitute(e, self.images)


def psi_odd(l: int) -> Embedding:
    if l < 3 or l % 2 == 0:
        raise ValueError("psi_odd needs odd l >= 3")
    phi = [E.gen(f"phi{i}") for i in range(l + 1)]
    b = [E.central(f"b{i}") for i in range(l + 1)]
    im = {"f0": 1 + EPS * phi[0], "f1": 1 + EPS * phi[1],
          "a0": -1 + EPS * T + EPS ** 2 * b[0], "a1": 1 - EPS * T + EPS ** 2 * b[1],
          "h": EPS ** 2 * E.central("h")}
    for i in range(2, l + 1):
        im[f"f{i}"] = EPS * phi[i]
        im[f"a{i}"] = EPS ** 2 * b[i]
    return Embedding(l, im)


def psi_l2() -> Embedding:
    psi, p0, p1 = E.gen("psi"), E.gen("phi0"), E.gen("phi1")
    b = [E.central(f"b{i}") for i in range(3)]
    return Embedding(2, {
        "f0": 1 + EPS * psi + EPS ** 2 * p0,
        "f1": 1 - EPS * psi + EPS ** 2 * p1,
        "f2": -(EPS ** 2) * (p0 + p1),
        "a0": -1 + EPS ** 2 * T + EPS ** 3 * b[0],
        "a1": 1 - EPS ** 2 * T + EPS ** 3 * b[1],
        "a2": EPS ** 3 * b[2],
        "h": EPS ** 3 * E.central("h"),
    })


def embedding(l: int) -> Embedding:
    return psi_l2() if l == 2 else psi_odd(l)


def _F(l: int, K: int, mode: str, seed: int, prime: int | None, line: bool = True) -> AlgebraSpec:
    if mode == "exact":
        return build("F_l", l, K)
    return build_modular("F_l", l, K, prime=prime or DEFAULT_PRIME, seed=seed, line=line)


def expand(A: AlgebraSpec, e: Expr) -> Expr:
    """Rewrite derived generators and centrals down to coordinates and free centrals."""
    table = dict(A.gen_exprs)
    table.update(A.derived)
    table.pop("k", None)
    for _ in range(4):
        nxt = E.substitute(e, table)
        if nxt is e:
            return e
        e = nxt
    return e


# ---------------------------------------------------------------------
# transported actions
# ---------------------------------------------------------------------


def _word_images(word: list[str], l: int) -> dict[str, Expr]:
    return {n: apply(word, (E.gen(n) if n[0] == "f" else E.central(n)), l)
            for n in [f"f{i}" for i in range(l + 1)] + [f"a{i}" for i in range(l + 1)]}


def transported(l: int, kimg: Mapping[str, Expr], psi_image: Expr | None = None,
                t_image: Expr = T) -> dict[str, Expr]:
    """Images of the F coordinates and centrals from K_l images ``kimg``.

    For l=2 the image of psi must be supplied (it is part of the definition
    of the action); phi_0 and phi_1 are then read off f_0 and f_1.
    """
    P = embedding(l)
    pk = {n: P.apply(e) for n, e in kimg.items()}
    inv_eps = E.inv(EPS)
    out: dict[str, Expr] = {"t": t_image}
    if l == 2:
        out["psi"] = psi_image
        out["phi0"] = (pk["f0"] - 1 - EPS * psi_image) * inv_eps ** 2
        out["phi1"] = (pk["f1"] - 1 + EPS * psi_image) * inv_eps ** 2
        out["b0"] = (pk["a0"] + 1 - EPS ** 2 * t_image) * inv_eps ** 3
        out["b1"] = (pk["a1"] - 1 + EPS ** 2 * t_image) * inv_eps ** 3
        out["b2"] = pk["a2"] * inv_eps ** 3
        return out
    out["phi0"] = (pk["f0"] - 1) * inv_eps
    out["phi1"] = (pk["f1"] - 1) * inv_eps
    out["b0"] = (pk["a0"] + 1 - EPS * t_image) * inv_eps ** 2
    out["b1"] = (pk["a1"] - 1 + EPS * t_image) * inv_eps ** 2
    for i in range(2, l + 1):
        out[f"phi{i}"] = pk[f"f{i}"] * inv_eps
        out[f"b{i}"] = pk[f"a{i}"] * inv_eps ** 2
    return out


def t1_psi_l2() -> Expr:
    psi, p0, p1 = E.gen("psi"), E.gen("phi0"), E.gen("phi1")
    return psi + EPS * (2 * (p0 + p1) - psi * psi + T)


def t1_images(l: int) -> dict[str, Expr]:
    G = _update(l)
    return transported(l, G, t1_psi_l2() if l == 2 else None, T + EPS)


def r_words(l: int) -> list[list[str]]:
    return symmetry_words(l)


def r_psi_l2(i: int) -> Expr:
    psi, p0, p1 = E.gen("psi"), E.gen("phi0"), E.gen("phi1")
    b = [E.central(f"b{j}") for j in range(3)]
    if i == 0:
        return psi - (b[0] + b[1]) * E.inv(p0 + p1 + T - psi * psi)
    return psi - b[2] * E.inv(p0 + p1)


def r_images(i: int, l: int) -> dict[str, Expr]:
    word = r_words(l)[i]
    return transported(l, _word_images(word, l), r_psi_l2(i) if l == 2 else None, T)


def act(A: AlgebraSpec, images: Mapping[str, Expr], e: Expr) -> Expr:
    """Apply a transported automorphism to an F expression."""
    return E.substitute(expand(A, e), images)


def limit_derivation(A: AlgebraSpec, e: Expr, images: Mapping[str, Expr] | None = None) -> StarElem:
    """``((T_1(e) - e) / eps)`` at eps = 0, after checking divisibility by eps."""
    images = images if images is not None else t1_images(A.l)
    diff = A.eval(act(A, images, e)) - A.eval(e)
    c0, rest = _eps_split(diff)
    if not c0.is_zero():
        raise EpsDivisibilityError(f"T_1({e}) - {e} has eps^0 part {c0!r}")
    return _eps_split(rest)[0]


# ---------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------


def _psi_gen(i: int, l: int) -> Expr:
    return E.gen(f"psi{cyc(i, l - 1)}")


def theorem_2n_rhs(i: int, l: int) -> Expr:
    """``psi_i (sum psi_{i+2r-1}) - (sum psi_{i+2r}) psi_i + gamma_i`` (indices mod l)."""
    n = (l - 1) // 2
    p = _psi_gen(i, l)
    odd = E.add(*(_psi_gen(i + 2 * r - 1, l) for r in range(1, n + 1)))
    even = E.add(*(_psi_gen(i + 2 * r, l) for r in range(1, n + 1)))
    return p * odd - even * p + E.central(f"g{cyc(i, l - 1)}")


def r_psi_closed(i: int, j: int, l: int) -> Expr:
    """eps^0 part of ``r_i(psi_j)``: ``psi_j + (gamma_i / psi_i) u_ij``."""
    m = l - 1
    u = orientation(i, j, m)
    p = _psi_gen(j, l)
    if not u:
        return p
    return p + u * E.central(f"g{i}") * E.inv(_psi_gen(i, l))


def r_gamma_closed(i: int, l: int) -> dict[str, Expr]:
    m = l - 1
    return {f"g{j}": E.central(f"g{j}") - cartan(i, j, m) * E.central(f"g{i}") for j in range(l)}


def conind_expr(i: int, l: int) -> Expr:
    """Claimed eps-linear coefficient of ``Psi pi s_l ... s_{i+1}(f_i)``."""
    phi = [E.gen(f"phi{j}") for j in range(l + 1)]
    terms = [(-1) ** (j - i - 1) * phi[j] for j in range(i + 1, l + 1)]
    terms.append((-1) ** (l - i) * phi[0])
    if i % 2 == 0:
        terms.append(-T)
    return E.add(*terms)


def qp2_rules() -> dict[str, Expr]:
    """Derivation of F_2 on its generators."""
    psi, p0, p1 = E.gen("psi"), E.gen("phi0"), E.gen("phi1")
    b0, b2 = E.central("b0"), E.central("b2")
    return {
        "psi": 2 * (p0 + p1) - psi * psi + T,
        "phi0": psi * p1 + p1 * psi + psi ** 3 - T * psi + b0 - b2,
        "phi1": psi * p0 + p0 * psi - psi ** 3 + T * psi - b0,
        "t": E.ONE,
    }


def _printed_r0_phi(which: int) -> Expr:
    psi, p0, p1 = E.gen("psi"), E.gen("phi0"), E.gen("phi1")
    b0, b1 = E.central("b0"), E.central("b1")
    D = E.inv(p0 + p1 + T - psi * psi)
    c = (b0 + b1) * D
    if which == 0:
        return p0 - D * psi * (b0 + b1) + D * (b0 + psi * p1 - p0 * psi) * c
    return p1 - c * psi + D * (b1 + psi * p0 - p1 * psi) * c


R_BETA_L2 = {
    0: {"b0": -E.central("b1"), "b1": -E.central("b0"), "b2": 2 - E.central("b2")},
    1: {"b0": E.central("b0") + E.central("b2"), "b1": E.central("b1") + E.central("b2"),
        "b2": -E.central("b2")},
}


# ---------------------------------------------------------------------
# checks
# ---------------------------------------------------------------------


def _report(name: str, l: int, K: int, mode: str, prime, seed) -> CheckReport:
    rep = CheckReport(name, {"l": l, "K": K}, mode)
    if mode == "modular":
        rep.prime, rep.trials = prime or DEFAULT_PRIME, 1
    return rep


def _cmp(rep: CheckReport, label: str, a: StarElem, b: StarElem) -> None:
    if rep.mode == "modular":
        # one instance on a random parameter line: degree in lam_ bounds the false-pass odds
        rep.max_degree = max(rep.max_degree, _lam_degree(a) + _lam_degree(b))
    d = a - b
    rep.add(label, a.residual_orders(b), "" if d.is_zero() else repr(d)[:300])


def verify_lemma_psi(l: int, K: int = 3, *, E_order: int = 3, mode: str = "exact",
                     prime: int | None = None, seed: int = 0) -> CheckReport:
    """``Psi`` preserves the K_l relations (exactly in eps) and the stated images."""
    rep = _report("climit.lemma-psi", l, K, mode, prime, seed)
    with rep.timed():
        A = _F(l, K, mode, seed, prime)
        rep.algebra = A.descriptor()
        P = embedding(l)
        AK = build("K_l", l, 1)
        for label, lhs, rhs in defining_relations(AK):
            _cmp(rep, f"Psi({label})", A.eval(P.apply(lhs)), A.eval(P.apply(rhs)))
        # the eps expansion of a sample relation, order by order
        lhs = A.eval(P.apply(E.comm(f(1), f(2))))
        ser = EpsSeries.from_elem(lhs, E_order)
        want = EpsSeries.from_elem(A.eval(P.apply(E.central("h"))), E_order)
        for j in range(E_order + 1):
            _cmp(rep, f"Psi([f1,f2]) at eps^{j}", ser.coefficient(j), want.coefficient(j))
        if l == 2:
            _cmp(rep, "Psi(f0+f1+f2) = 2", A.eval(P.apply(f(0) + f(1) + f(2))), A.scalar(2))
            _cmp(rep, "Psi(k) = eps^3", A.eval(P.apply(alpha(0) + alpha(1) + alpha(2))),
                 A.eval(EPS ** 3))
            _cmp(rep, "Psi([f2,f0]) = eps^3 h", A.eval(P.apply(E.comm(f(2), f(0)))),
                 A.eval(EPS ** 3 * E.central("h")))
            rep.notes.append("[f0,f2] maps to -eps^3 h, matching [f2,f0] = h in K_2")
        else:
            _cmp(rep, "Psi(a0+a1) = eps^2 (b0+b1)", A.eval(P.apply(alpha(0) + alpha(1))),
                 A.eval(EPS ** 2 * (E.central("b0") + E.central("b1"))))
            _cmp(rep, "Psi(f0+f2+...) = 1", A.eval(P.apply(E.add(*(f(i) for i in range(0, l + 1, 2))))),
                 A.one())
            _cmp(rep, "Psi(f1+f3+...) = 1", A.eval(P.apply(E.add(*(f(i) for i in range(1, l + 1, 2))))),
                 A.one())
    return rep


def _f_gens(A: AlgebraSpec) -> list[str]:
    if A.l == 2:
        return ["psi", "phi0", "phi1"]
    return [f"phi{i}" for i in range(A.l + 1)] + [f"psi{i}" for i in range(A.l)]


def verify_partial1(l: int, K: int = 3, *, mode: str = "exact", prime: int | None = None,
                    seed: int = 0) -> CheckReport:
    """Divisibility of ``T_1(phi) - phi`` by eps, and regularity of the r_i images."""
    rep = _report("climit.partial1", l, K, mode, prime, seed)
    with rep.timed():
        A = _F(l, K, mode, seed, prime)
        rep.algebra = A.descriptor()
        imgs = t1_images(l)
        for g in _f_gens(A):
            x = A.eval(act(A, imgs, E.gen(g))) - A.generator(g)
            c0, _ = _eps_split(x)
            rep.add(f"T1({g}) - {g} = O(eps)", c0.residual_orders(A.zero()),
                    "" if c0.is_zero() else repr(c0)[:300])
        for nm in [c for c in A.centrals if c.startswith("b")]:
            _cmp(rep, f"T1({nm}) = {nm}", A.eval(imgs[nm]), A.eval(E.central(nm)))
        for i in range(l):
            ri = r_images(i, l)
            for g in _f_gens(A):
                try:
                    x = A.eval(act(A, ri, E.gen(g)))
                    _eps_split(x)
                    rep.check(f"r{i}({g}) regular at eps=0", True)
                except ZeroDivisionError as exc:
                    rep.check(f"r{i}({g}) regular at eps=0", False, str(exc))
    return rep


def _eps0(A: AlgebraSpec, e: Expr) -> StarElem:
    return _eps_split(A.eval(e))[0]


def verify_limit_theorems(l: int, K: int = 3, *, mode: str = "exact",
                          prime: int | None = None, seed: int = 0) -> CheckReport:
    if l == 2:
        return _verify_qp2(K, mode, prime, seed)
    if l < 3 or l % 2 == 0:
        raise ValueError("continuous limits are taken for l = 2 and odd l >= 3")
    return _verify_a2n(l, K, mode, prime, seed)


def _r_gamma_from_beta(A: AlgebraSpec, ri: Mapping[str, Expr], l: int) -> dict[str, Expr]:
    return {g: E.substitute(expand(A, E.central(g)), ri) for g in (f"g{j}" for j in range(l))}


def _verify_a2n(l: int, K: int, mode: str, prime, seed) -> CheckReport:
    rep = _report("climit.theorem-a2n", l, K, mode, prime, seed)
    n = (l - 1) // 2
    with rep.timed():
        A = _F(l, K, mode, seed, prime)
        rep.algebra = A.descriptor()
        imgs = t1_images(l)
        # (a) the limit flow on psi
        rules = {}
        for i in range(l):
            d = limit_derivation(A, E.gen(f"psi{i}"), imgs)
            _cmp(rep, f"d psi{i} = closed form", d, A.eval(theorem_2n_rhs(i, l)))
            rules[f"psi{i}"] = theorem_2n_rhs(i, l)
        d_even = A.zero()
        d_odd = A.zero()
        for i in range(l + 1):
            d = limit_derivation(A, E.gen(f"phi{i}"), imgs)
            if i % 2 == 0:
                d_even = d_even + d
            else:
                d_odd = d_odd + d
        _cmp(rep, "d(phi0+phi2+...) = 0", d_even, A.zero())
        _cmp(rep, "d(phi1+phi3+...) = 0", d_odd, A.zero())
        _cmp(rep, "d t = 1", limit_derivation(A, T, imgs), A.one())
        # (d) the inductive formula and the proof coefficients
        for i in range(1, l):
            word = ["pi"] + [f"s{j}" for j in range(l, i, -1)]
            x = A.eval(embedding(l).apply(apply(word, f(i), l)))
            c = eps_expand(x, 1)
            _cmp(rep, f"conind i={i} eps^0", c[0], A.one())
            _cmp(rep, f"conind i={i} eps^1", c[1], A.eval(conind_expr(i, l)))
        for i in range(1, l):
            lhs = apply(translation_word(l), f(i + 1), l)
            tail = ["pi"] + [f"s{j}" for j in range(l, i + 1, -1)]
            rhs = apply(tail, f(i + 1), l) + apply(tail + [f"s{i + 1}"], alpha(i) * E.inv(f(i)), l)
            _cmp(rep, f"concom i={i}", A.eval(embedding(l).apply(lhs)), A.eval(embedding(l).apply(rhs)))
        _replay_ab(rep, A, l)
        # r_i on F: eps^0 images and equivariance
        for i in range(l):
            ri = r_images(i, l)
            for j in range(l):
                got = _eps0(A, act(A, ri, E.gen(f"psi{j}")))
                _cmp(rep, f"r{i}(psi{j}) at eps^0", got, A.eval(r_psi_closed(i, j, l)))
            rg = _r_gamma_from_beta(A, ri, l)
            for g, want in r_gamma_closed(i, l).items():
                _cmp(rep, f"r{i}({g})", A.eval(rg[g]), A.eval(want))
        _cmp(rep, f"r0(b0) = -b1", A.eval(r_images(0, l)["b0"]), A.eval(-E.central("b1")))
        _cmp(rep, f"r{l - 1}(b0) = b0 + b{l}", A.eval(r_images(l - 1, l)["b0"]),
             A.eval(E.central("b0") + E.central(f"b{l}")))
        for i in range(l):
            rimg = {f"psi{j}": r_psi_closed(i, j, l) for j in range(l)}
            rimg.update(r_gamma_closed(i, l))
            for j in range(l):
                lhs = E.derive(rimg[f"psi{j}"], rules)
                rhs = E.substitute(rules[f"psi{j}"], rimg)
                _cmp(rep, f"r{i} d = d r{i} on psi{j}", A.eval(lhs), A.eval(rhs))
    rep.notes.append(f"l={l}: limit flow is the A_{2 * n} system in psi_0..psi_{l - 1}")
    return rep


def translation_word(l: int) -> list[str]:
    return ["pi"] + [f"s{j}" for j in range(l, 0, -1)]


def _replay_ab(rep: CheckReport, A: AlgebraSpec, l: int) -> None:
    """Replay the eps^1, eps^2 bookkeeping with a_i, b_i from the series."""
    P = embedding(l)
    a: dict[int, StarElem] = {}
    b: dict[int, StarElem] = {}
    for i in range(1, l + 1):
        word = ["pi"] + [f"s{j}" for j in range(l, i, -1)]
        c = eps_expand(A.eval(P.apply(apply(word, f(i), l))), 2)
        a[i], b[i] = c[1], c[2]
    t = A.eval(T)
    beta = [A.eval(E.central(f"b{j}")) for j in range(l + 1)]
    for i in range(1, l):
        tail = sum((beta[j] for j in list(range(i + 2, l + 1)) + [0]), A.zero())
        want_b = star_mul(t, a[i + 1]) - (tail + b[i + 1] - star_mul(a[i + 1], a[i + 1]))
        _cmp(rep, f"b{i} recursion", b[i], want_b)
        x = eps_expand(A.eval(P.apply(apply(translation_word(l), f(i + 1), l))), 2)
        _cmp(rep, f"Psi T1(f{i + 1}) eps^1", x[1], a[i + 1] + a[i] + t)
        want2 = (beta[i + 1] + star_mul(a[i + 1], a[i + 1]) - star_mul(a[i], a[i])
                 + star_mul(t, a[i + 1] - a[i]))
        _cmp(rep, f"Psi T1(f{i + 1}) eps^2", x[2], want2)


def _verify_qp2(K: int, mode: str, prime, seed) -> CheckReport:
    rep = _report("climit.qp2", 2, K, mode, prime, seed)
    with rep.timed():
        A = _F(2, K, mode, seed, prime)
        rep.algebra = A.descriptor()
        imgs = t1_images(2)
        rules = qp2_rules()
        for g in ("psi", "phi0", "phi1"):
            d = limit_derivation(A, E.gen(g), imgs)
            _cmp(rep, f"d {g} = closed form", d, A.eval(rules[g]))
        second = E.derive(rules["psi"], rules)
        psi = E.gen("psi")
        target = 2 * psi ** 3 - 2 * T * psi - 2 * E.central("b2") + 1
        _cmp(rep, "d^2 psi = 2 psi^3 - 2 t psi - 2 b2 + 1", A.eval(second), A.eval(target))
        cl = A.eval(second) - A.eval(target)
        rep.check("classical part of qp2", cl.coeff(0).is_zero())
        # the reflections
        r_closed = {}
        for i in range(2):
            ri = r_images(i, 2)
            closed = {"psi": r_psi_l2(i), "t": T}
            closed.update(R_BETA_L2[i])
            if i == 0:
                closed["phi0"], closed["phi1"] = _printed_r0_phi(0), _printed_r0_phi(1)
            else:
                closed["phi0"], closed["phi1"] = E.gen("phi0"), E.gen("phi1")
            for g in ("phi0", "phi1"):
                _cmp(rep, f"r{i}({g}) at eps^0", _eps0(A, act(A, ri, E.gen(g))), A.eval(closed[g]))
            for nm in ("b0", "b1", "b2"):
                _cmp(rep, f"r{i}({nm})", A.eval(act(A, ri, E.central(nm))), A.eval(closed[nm]))
            r_closed[i] = closed
        sums = {"phi0+phi1": E.gen("phi0") + E.gen("phi1")}
        for i in range(2):
            for g in ("psi", "phi0", "phi1"):
                lhs = E.derive(r_closed[i][g], rules)
                rhs = E.substitute(rules[g], r_closed[i])
                _cmp(rep, f"r{i} d = d r{i} on {g}", A.eval(lhs), A.eval(rhs))
            for label, x in sums.items():
                lhs = E.derive(E.substitute(x, r_closed[i]), rules)
                rhs = E.substitute(E.derive(x, rules), r_closed[i])
                _cmp(rep, f"r{i} d = d r{i} on {label}", A.eval(lhs), A.eval(rhs))
    return rep


def commutation_gap_l2(order: int = 2, *, seed: int = 0) -> dict[str, int | None]:
    """First eps order at which ``T_1 r_i(psi)`` and ``r_i T_1(psi)`` differ (l=2).

    ``None`` means they agree through ``order``. Evaluated at hbar^1 on a
    modular instance (eps stays symbolic).
    """
    A = _F(2, 1, "modular", seed, None, line=False)
    imgs = t1_images(2)
    x = E.gen("psi")
    out: dict[str, int | None] = {}
    for i in range(2):
        ri = r_images(i, 2)
        gap = A.eval(act(A, imgs, act(A, ri, x))) - A.eval(act(A, ri, act(A, imgs, x)))
        ser = eps_expand(gap, order)
        out[f"r{i}"] = next((j for j, c in enumerate(ser) if not c.is_zero()), None)
    return out
