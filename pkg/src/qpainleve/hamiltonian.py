"""Hamiltonians H_0, the derivation they generate, and canonical coordinates."""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping

from . import expr as E
from .algebra import AlgebraSpec, H, alpha, build, cyc, f
from .coeff import Domain
from .expr import Expr
from .report import CheckReport
from .roots import chi, enumerate_S, fK_expr, fundamental_weight
from .star import Pairing, StarElem, commutator, partial

__all__ = [
    "BadAlgebra",
    "ModelError",
    "PRINTED_H0",
    "build_H0",
    "built_h0_json",
    "canonical_algebra",
    "canonical_map",
    "derive",
    "flow_rules",
    "h0_expr",
    "k_expr",
    "printed_h0_expr",
    "printed_h0_json",
    "theorem1_rhs",
    "verify_conservation",
    "verify_h0_printed",
    "verify_heisenberg",
    "verify_theorem1",
    "x0_expr",
    "x1_expr",
]


class BadAlgebra(ValueError):
    pass


class ModelError(ArithmeticError):
    """A commutator with H_0 was not divisible by hbar."""


def k_expr(l: int) -> Expr:
    return E.add(*(alpha(i) for i in range(l + 1)))


def x0_expr(l: int) -> Expr:
    return E.add(*(f(i) for i in range(0, l + 1, 2)))


def x1_expr(l: int) -> Expr:
    return E.add(*(f(i) for i in range(1, l + 1, 2)))


def _odd_constant(l: int) -> Expr:
    w = fundamental_weight(1, l).scale(0)
    for i in range(1, l + 1):
        wi = fundamental_weight(i, l)
        w = w + (wi if i % 2 == 1 else -wi)
    # central, so squaring is commutative
    e = w.to_expr()
    return e * e


def h0_expr(l: int) -> Expr:
    """H_0 as an expression in the f's, alpha's and h."""
    if l == 1:
        return Fraction(1, 2) * (f(0) * f(1) + f(1) * f(0)) + alpha(1) * f(2)

    def linear_part(d):
        return E.add(*(chi(K.complement()).to_expr() * fK_expr(K) for K in enumerate_S(d, l)))

    if l % 2 == 0:
        if l == 2:
            return f(0) * f(1) * f(2) + H * f(1) + linear_part(1)
        return E.add(*(fK_expr(K) for K in enumerate_S(3, l))) + linear_part(1)
    if l == 3:
        return f(0) * f(1) * f(2) * f(3) + H * f(1) * f(2) + linear_part(2) + _odd_constant(l)
    return E.add(*(fK_expr(K) for K in enumerate_S(4, l))) + linear_part(2) + _odd_constant(l)


def build_H0(A: AlgebraSpec) -> StarElem:
    if A.kind not in ("K_l", "K_1"):
        raise BadAlgebra(f"H_0 lives in K_l or K_1, not {A.kind}")
    return A.eval(h0_expr(A.l))


def theorem1_rhs(i: int, l: int) -> Expr:
    """Closed form of the flow on f_i."""
    if l == 1:
        return {
            0: f(0) * f(2) + f(2) * f(0) + alpha(0),
            1: -(f(1) * f(2)) - f(2) * f(1) + alpha(1),
            2: f(1) - f(0),
        }[i]
    n = l // 2
    fi = f(i)
    if l % 2 == 0:
        odd = E.add(*(f(cyc(i + 2 * r - 1, l)) for r in range(1, n + 1)))
        even = E.add(*(f(cyc(i + 2 * r, l)) for r in range(1, n + 1)))
        return fi * odd - even * fi + alpha(i)
    pairs_a = E.add(*(f(cyc(i + 2 * r - 1, l)) * f(cyc(i + 2 * s, l))
                      for r in range(1, n + 1) for s in range(r, n + 1)))
    pairs_b = E.add(*(f(cyc(i + 2 * r, l)) * f(cyc(i + 2 * s + 1, l))
                      for r in range(1, n + 1) for s in range(r, n + 1)))
    coef = k_expr(l) / 2 - E.add(*(alpha(cyc(i + 2 * r, l)) for r in range(1, n + 1)))
    tail = alpha(i) * E.add(*(f(cyc(i + 2 * r, l)) for r in range(1, n + 1)))
    return fi * pairs_a - pairs_b * fi + coef * fi + tail


def flow_rules(l: int) -> dict[str, Expr]:
    """Leaf images of the derivation (alphas and h are constants)."""
    rules = {f"f{i}": theorem1_rhs(i, l) for i in range(l + 1 if l > 1 else 3)}
    if l == 1:
        rules["x"] = k_expr(1)
    return rules


def apply_flow(e: Expr, l: int, memo: dict | None = None) -> Expr:
    return E.derive(e, flow_rules(l), memo)


def _fgens(A: AlgebraSpec) -> list[str]:
    return [f"f{i}" for i in range(3 if A.l == 1 else A.l + 1)]


def derive(A: AlgebraSpec, Hm: StarElem | None = None) -> dict[str, StarElem]:
    """Values of the derivation on each f_i, computed from commutators with H."""
    if Hm is None:
        Hm = build_H0(A)
    l = A.l
    k = A.central_value("k")
    out = {}
    for name in _fgens(A):
        i = int(name[1:])
        c = commutator(Hm, A.generator(name))
        try:
            val = c.shift_down()
        except ValueError as exc:
            raise ModelError(f"[H, {name}] is not divisible by hbar") from exc
        if l % 2 == 1 and l > 1:
            sign = -1 if i % 2 == 0 else 1
            val = val + (k * A.generator(name)).scale(Fraction(sign, 2))
            if i == 0:
                val = val + k * A.eval(x0_expr(l))
        elif i == 0:
            val = val + k
        out[name] = val
    return out


def extra_derivation(A: AlgebraSpec, a: StarElem) -> StarElem:
    """The non-inner part of the flow, acting on an element of K_l or K_1."""
    l = A.l
    k = A.central_value("k")
    if l == 1:
        return k * StarElem(A, tuple(c.diff("x") for c in a.coeffs), a.exact)
    if l % 2 == 0:
        return k * partial("f0", a)
    out = A.zero()
    for i in range(l + 1):
        sign = -1 if i % 2 == 0 else 1
        out = out + (A.symbol(f"f{i}") * partial(f"f{i}", a)).scale(Fraction(sign, 2))
    out = out + A.eval(x0_expr(l)) * partial("f0", a)
    return k * out


def verify_theorem1(A: AlgebraSpec) -> CheckReport:
    rep = CheckReport("theorem1", {"l": A.l, "K": A.order}, "exact" if A.dom.exact else "modular")
    rep.algebra = A.descriptor()
    with rep.timed():
        flow = derive(A)
        for name, val in flow.items():
            rhs = A.eval(theorem1_rhs(int(name[1:]), A.l))
            rep.add(f"d{name}", val.residual_orders(rhs), repr(val - rhs))
            rep.check(f"d{name} exact", val.exact)
        for i in range(A.l + 1):
            dz = A.eval(E.derive(alpha(i), flow_rules(A.l)))
            rep.add(f"da{i}", dz.residual_orders(A.zero()))
    return rep


def verify_conservation(A: AlgebraSpec) -> CheckReport:
    l = A.l
    rep = CheckReport("conservation", {"l": l, "K": A.order}, "exact" if A.dom.exact else "modular")
    rep.algebra = A.descriptor()
    k = k_expr(l)
    with rep.timed():
        checks = []
        if l == 1:
            checks.append(("d(f0+f1+f2^2)=k", f(0) + f(1) + f(2) * f(2), k))
        elif l % 2 == 0:
            checks.append(("d(sum f)=k", E.add(*(f(i) for i in range(l + 1))), k))
        else:
            x0, x1 = x0_expr(l), x1_expr(l)
            checks.append(("d(x0)=(k/2)x0", x0, k / 2 * x0))
            checks.append(("d(x1)=(k/2)x1", x1, k / 2 * x1))
            for i in range(l + 1):
                ft = x0 * f(i) if i % 2 == 0 else E.inv(x0) * f(i)
                lhs = A.eval(apply_flow(ft, l))
                inner = commutator(build_H0(A), A.eval(ft)).shift_down()
                rhs = inner + (A.eval(k * x0 * x0) if i == 0 else A.zero())
                rep.add(f"d(ft{i}) = [H0,ft{i}]/h + delta k x0^2", lhs.residual_orders(rhs),
                        repr(lhs - rhs))
                if i == 0:
                    # without the factor k the identity holds only on k = 1
                    bare = inner + A.eval(x0 * x0)
                    gap = lhs - bare
                    rep.notes.append(f"inhomogeneity without k leaves residual {gap!r}"
                                     if not gap.is_zero() else "inhomogeneity without k also holds")
        for label, lhs, rhs in checks:
            a = A.eval(apply_flow(lhs, l))
            b = A.eval(rhs)
            rep.add(label, a.residual_orders(b), repr(a - b))
    return rep


# ---------------------------------------------------------------------
# canonical coordinates
# ---------------------------------------------------------------------


def canonical_names(l: int) -> tuple[list[str], list[str], list[str]]:
    if l == 1:
        return ["q"], ["p"], ["x"]
    n = l // 2
    qs = [f"q{i}" for i in range(1, n + 1)]
    ps = [f"p{i}" for i in range(1, n + 1)]
    return qs, ps, (["x"] if l % 2 == 0 else ["x0", "x1"])


def canonical_map(l: int) -> tuple[dict[str, Expr], dict[str, Expr]]:
    """``(forward, inverse)``: canonical coordinates in f's, and f's in canonical coordinates."""
    if l == 1:
        q, p, x = E.gen("q"), E.gen("p"), E.gen("x")
        fwd = {"q": f(1), "p": f(2), "x": f(0) + f(1) + f(2) * f(2)}
        inv = {"f0": x - q - p * p, "f1": q, "f2": p}
        return fwd, inv
    n = l // 2
    q = {i: E.gen(f"q{i}") for i in range(1, n + 1)}
    p = {i: E.gen(f"p{i}") for i in range(1, n + 1)}
    p[0] = E.ZERO
    fwd: dict[str, Expr] = {}
    inv: dict[str, Expr] = {}
    if l % 2 == 0:
        for i in range(1, n + 1):
            fwd[f"q{i}"] = f(2 * i)
            fwd[f"p{i}"] = E.add(*(f(2 * r - 1) for r in range(1, i + 1)))
        fwd["x"] = E.add(*(f(r) for r in range(l + 1)))
        inv["f0"] = E.gen("x") - E.add(*q.values()) - p[n]
        for i in range(1, n + 1):
            inv[f"f{2 * i - 1}"] = p[i] - p[i - 1]
            inv[f"f{2 * i}"] = q[i]
        return fwd, inv
    x0, x1 = E.gen("x0"), E.gen("x1")
    X0 = x0_expr(l)
    for i in range(1, n + 1):
        fwd[f"q{i}"] = X0 * f(2 * i)
        fwd[f"p{i}"] = E.inv(X0) * E.add(*(f(2 * r - 1) for r in range(1, i + 1)))
    fwd["x0"] = X0
    fwd["x1"] = x1_expr(l)
    inv["f0"] = x0 - E.inv(x0) * E.add(*q.values())
    for i in range(1, n + 1):
        inv[f"f{2 * i - 1}"] = x0 * (p[i] - p[i - 1])
        inv[f"f{2 * i}"] = E.inv(x0) * q[i]
    # the last odd generator follows from x1 = f1 + f3 + ... + f_l
    inv[f"f{l}"] = x1 - x0 * p[n]
    return fwd, inv


def canonical_algebra(l: int, K: int = 3, *, modulus=None, values=None) -> AlgebraSpec:
    """Star space on (q; p) with x (or x0, x1) and the alphas central."""
    qs, ps, xs = canonical_names(l)
    coords = qs + ps
    centrals = [f"a{i}" for i in range(l + 1)] + xs
    pairing = Pairing(coords, {(pn, qn): 1 for pn, qn in zip(ps, qs)})
    dom = Domain(coords + centrals, modulus=modulus, values=values)
    gens = {name: E.central(name) for name in xs}
    derived = {"k": k_expr(l)}
    return AlgebraSpec("canonical", l, dom, pairing, K, gens, centrals, derived)


def verify_heisenberg(A: AlgebraSpec) -> CheckReport:
    """Heisenberg form of the flow in canonical coordinates."""
    l = A.l
    rep = CheckReport("heisenberg", {"l": l, "K": A.order}, "exact" if A.dom.exact else "modular")
    rep.algebra = A.descriptor()
    fwd, inv = canonical_map(l)
    qs, ps, xs = canonical_names(l)
    values = A.dom.values or None
    C = canonical_algebra(l, A.order, modulus=A.dom.modulus,
                          values={k: v for k, v in (values or {}).items() if k.startswith("a")} or None)
    with rep.timed():
        # round trip f -> (q;p;x) -> f inside K_l
        for name, e in inv.items():
            back = A.eval(E.substitute(e, fwd))
            rep.add(f"roundtrip {name}", back.residual_orders(A.generator(name)))
        # canonical relations, evaluated through the forward map
        can = {nm: A.eval(fwd[nm]) for nm in qs + ps + xs}
        for a in qs + ps + xs:
            for b in qs + ps + xs:
                if a >= b:
                    continue
                want = A.zero()
                if a.startswith("p") and b.startswith("q") and a[1:] == b[1:]:
                    want = A.hbar()
                rep.add(f"[{a},{b}]", commutator(can[a], can[b]).residual_orders(want))
        # Heisenberg equations in the canonical algebra
        Hqp = E.substitute(h0_expr(l), inv)
        Hc = C.eval(Hqp)
        rules = flow_rules(l)
        for nm in qs + ps:
            pushed = E.substitute(E.derive(fwd[nm], rules), inv)
            lhs = C.eval(pushed)
            rhs = commutator(Hc, C.symbol(nm)).shift_down()
            rep.add(f"d{nm} = [H,{nm}]/h", lhs.residual_orders(rhs), repr(lhs - rhs))
        k = k_expr(l)
        for nm in xs:
            pushed = C.eval(E.substitute(E.derive(fwd[nm], rules), inv))
            want = C.eval(k) if l % 2 == 0 or l == 1 else C.eval(k / 2 * E.central(nm))
            rep.add(f"d{nm}", pushed.residual_orders(want), repr(pushed - want))
    return rep


# ---------------------------------------------------------------------
# printed Hamiltonians (fixture source)
# ---------------------------------------------------------------------

# Term lists transcribed from the displayed examples: (word, {symbol: coeff}).
# "h" marks an hbar coefficient, "1" a pure number; a word of () is a constant.
PRINTED_H0: Mapping[int, list] = {
    2: [
        ((0, 1, 2), {"1": 1}),
        ((1,), {"h": 1}),
        ((0,), {"a1": Fraction(1, 3), "a2": Fraction(-1, 3)}),
        ((1,), {"a1": Fraction(1, 3), "a2": Fraction(2, 3)}),
        ((2,), {"a1": Fraction(-2, 3), "a2": Fraction(-1, 3)}),
    ],
    3: [
        ((0, 1, 2, 3), {"1": 1}),
        ((1, 2), {"h": 1}),
        ((0, 1), {"a1": Fraction(1, 4), "a2": Fraction(2, 4), "a3": Fraction(-1, 4)}),
        ((1, 2), {"a1": Fraction(1, 4), "a2": Fraction(2, 4), "a3": Fraction(3, 4)}),
        ((2, 3), {"a1": Fraction(-3, 4), "a2": Fraction(-2, 4), "a3": Fraction(-1, 4)}),
        ((3, 0), {"a1": Fraction(1, 4), "a2": Fraction(-2, 4), "a3": Fraction(-1, 4)}),
        ((), {"sq": ({"a1": Fraction(1, 2), "a3": Fraction(1, 2)})}),
    ],
    4: [
        ((0, 1, 2), {"1": 1}),
        ((1, 2, 3), {"1": 1}),
        ((2, 3, 4), {"1": 1}),
        ((3, 4, 0), {"1": 1}),
        ((4, 0, 1), {"1": 1}),
        ((0,), {"a1": Fraction(2, 5), "a2": Fraction(-1, 5), "a3": Fraction(1, 5), "a4": Fraction(-2, 5)}),
        ((1,), {"a1": Fraction(2, 5), "a2": Fraction(4, 5), "a3": Fraction(1, 5), "a4": Fraction(3, 5)}),
        ((2,), {"a1": Fraction(-3, 5), "a2": Fraction(-1, 5), "a3": Fraction(1, 5), "a4": Fraction(-2, 5)}),
        ((3,), {"a1": Fraction(2, 5), "a2": Fraction(-1, 5), "a3": Fraction(1, 5), "a4": Fraction(3, 5)}),
        ((4,), {"a1": Fraction(-3, 5), "a2": Fraction(-1, 5), "a3": Fraction(-4, 5), "a4": Fraction(-2, 5)}),
    ],
    5: [
        ((0, 1, 2, 3), {"1": 1}),
        ((1, 2, 3, 4), {"1": 1}),
        ((2, 3, 4, 5), {"1": 1}),
        ((3, 4, 5, 0), {"1": 1}),
        ((4, 5, 0, 1), {"1": 1}),
        ((5, 0, 1, 2), {"1": 1}),
        ((0, 1), {"a1": Fraction(1, 3), "a2": Fraction(2, 3), "a4": Fraction(1, 3), "a5": Fraction(-1, 3)}),
        ((1, 2), {"a1": Fraction(1, 3), "a2": Fraction(2, 3), "a3": Fraction(3, 3), "a4": Fraction(1, 3),
                  "a5": Fraction(2, 3)}),
        ((2, 3), {"a1": Fraction(-2, 3), "a2": Fraction(-1, 3), "a4": Fraction(1, 3), "a5": Fraction(-1, 3)}),
        ((3, 4), {"a1": Fraction(1, 3), "a2": Fraction(-1, 3), "a4": Fraction(1, 3), "a5": Fraction(2, 3)}),
        ((4, 5), {"a1": Fraction(-2, 3), "a2": Fraction(-1, 3), "a3": Fraction(-3, 3), "a4": Fraction(-2, 3),
                  "a5": Fraction(-1, 3)}),
        ((5, 0), {"a1": Fraction(1, 3), "a2": Fraction(-1, 3), "a4": Fraction(-2, 3), "a5": Fraction(-1, 3)}),
        ((0, 3), {"a1": Fraction(1, 3), "a2": Fraction(-1, 3), "a4": Fraction(1, 3), "a5": Fraction(-1, 3)}),
        ((1, 4), {"a1": Fraction(1, 3), "a2": Fraction(2, 3), "a4": Fraction(1, 3), "a5": Fraction(2, 3)}),
        ((2, 5), {"a1": Fraction(-2, 3), "a2": Fraction(-1, 3), "a4": Fraction(-2, 3), "a5": Fraction(-1, 3)}),
        ((), {"sq": ({"a1": Fraction(1, 2), "a3": Fraction(1, 2), "a5": Fraction(1, 2)})}),
    ],
}


def printed_h0_expr(l: int) -> Expr:
    terms = []
    for word, coeff in PRINTED_H0[l]:
        mono = E.mul(*(f(i) for i in word)) if word else E.ONE
        if "sq" in coeff:
            lin = E.add(*(c * E.central(s) for s, c in coeff["sq"].items()))
            terms.append(lin * lin)
            continue
        c = E.add(*((v if s == "1" else v * (H if s == "h" else E.central(s))) for s, v in coeff.items()))
        terms.append(c * mono)
    return E.add(*terms)


def _h0_json(A: AlgebraSpec, el: StarElem) -> dict:
    return {"l": A.l, "symbols": list(A.dom.symbols), "hamiltonian": el.to_json_obj()}


def printed_h0_json(l: int) -> dict:
    """Normalized serialization of a printed Hamiltonian (fixture content)."""
    A = build("K_l", l, 3)
    return _h0_json(A, A.eval(printed_h0_expr(l)))


def built_h0_json(l: int) -> dict:
    """Normalized serialization of the Hamiltonian built from its definition."""
    A = build("K_l", l, 3)
    return _h0_json(A, build_H0(A))


def verify_h0_printed(l: int) -> CheckReport:
    """Built H_0 against the displayed example, term by term after normalization."""
    if l not in PRINTED_H0:
        raise ValueError(f"no displayed Hamiltonian for l={l}")
    rep = CheckReport("h0.printed", {"l": l, "K": 3}, "exact")
    with rep.timed():
        A = build("K_l", l, 3)
        rep.algebra = A.descriptor()
        built, printed = build_H0(A), A.eval(printed_h0_expr(l))
        rep.add("H0 = displayed form", built.residual_orders(printed), repr(built - printed))
        rep.check("serializations agree", _h0_json(A, built) == _h0_json(A, printed))
    return rep
