"""Presented algebras K_l, K_1, A_l and F_l as star-product instances.

Each :class:`AlgebraSpec` picks independent coordinates with a constant
pairing, expresses the remaining generators through central linear
constraints (coordinate elimination), and evaluates :class:`~qpainleve.expr.Expr`
trees homomorphically into :class:`~qpainleve.star.StarElem` values.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Iterable, Mapping

import sympy

from . import expr as E
from .coeff import DEFAULT_PRIME, Domain
from .expr import Expr
from .star import NotInvertible, Pairing, StarElem, StarSpace, star_inv, star_mul

__all__ = [
    "AlgebraSpec",
    "ConstructionFailure",
    "build",
    "build_modular",
    "cyc",
    "equal_elem",
    "eval_expr",
    "f",
    "alpha",
]


class ConstructionFailure(RuntimeError):
    """The requested presentation has no constant-pairing realization."""

    def __init__(self, message: str, system=None):
        super().__init__(message)
        self.system = system


def cyc(i: int, l: int) -> int:
    """Residue of ``i`` in Z/(l+1)Z."""
    return i % (l + 1)


def f(i: int) -> Expr:
    return E.gen(f"f{i}")


def alpha(i: int) -> Expr:
    return E.central(f"a{i}")


H = E.central("h")

# symbols that stay polynomial variables even in modular mode
_KEEP_SYMBOLIC = {"eps", "z"}


class AlgebraSpec(StarSpace):
    """A presented algebra realized as a star-product space."""

    def __init__(self, name: str, l: int, dom: Domain, pairing: Pairing, order: int,
                 generators: Mapping[str, Expr], centrals: Iterable[str],
                 derived: Mapping[str, Expr] | None = None,
                 constraints: Iterable[str] = ()):
        super().__init__(f"{name}(l={l})", dom, pairing, order)
        self.kind = name
        self.l = l
        self.gen_exprs = dict(generators)
        self.centrals = tuple(centrals)
        self.derived = dict(derived or {})
        self.constraints = tuple(constraints)
        self._gen_cache: dict[str, StarElem] = {}
        self._eval_cache: dict[Expr, StarElem] = {}

    # -- leaves ----------------------------------------------------------
    def generator(self, name: str) -> StarElem:
        hit = self._gen_cache.get(name)
        if hit is not None:
            return hit
        if name in self.coords:
            val = self.symbol(name)
        elif name in self.gen_exprs:
            val = self.eval(self.gen_exprs[name])
        else:
            raise KeyError(f"{name!r} is not a generator of {self.name}")
        self._gen_cache[name] = val
        return val

    def central_value(self, name: str) -> StarElem:
        if name == "h":
            return self.hbar()
        if name in self.derived:
            return self.eval(self.derived[name])
        if name in self.centrals:
            return self.symbol(name)
        raise KeyError(f"{name!r} is not a central symbol of {self.name}")

    def has(self, name: str) -> bool:
        return (name in self.coords or name in self.gen_exprs or name in self.derived
                or name in self.centrals or name == "h")

    # -- evaluation --------------------------------------------------------
    def eval(self, e: Expr) -> StarElem:
        return eval_expr(e, self)

    def descriptor(self) -> dict:
        d = super().descriptor()
        d.update({
            "kind": self.kind,
            "l": self.l,
            "centrals": list(self.centrals),
            "constraints": list(self.constraints),
            "domain": self.dom.descriptor(),
        })
        return d


def eval_expr(e: Expr, A: AlgebraSpec) -> StarElem:
    """Homomorphic evaluation (sums, ordered star products, star inverses)."""
    cache = A._eval_cache
    if e in cache:
        return cache[e]
    stack = [e]
    while stack:
        node = stack[-1]
        if node in cache:
            stack.pop()
            continue
        k = node.kind
        if k == "gen":
            cache[node] = A.generator(node.data)
            stack.pop()
            continue
        if k == "central":
            cache[node] = A.central_value(node.data)
            stack.pop()
            continue
        if k == "const":
            cache[node] = A.scalar(node.data)
            stack.pop()
            continue
        pending = [a for a in node.args if a not in cache]
        if pending:
            stack.extend(pending)
            continue
        stack.pop()
        vals = [cache[a] for a in node.args]
        if k == "sum":
            out = vals[0]
            for v in vals[1:]:
                out = out + v
        elif k == "prod":
            out = vals[0]
            for v in vals[1:]:
                out = star_mul(out, v)
        elif k == "inv":
            try:
                out = star_inv(vals[0])
            except (NotInvertible, ZeroDivisionError) as exc:
                raise NotInvertible(f"cannot invert {node.args[0]}") from exc
        else:
            out = vals[0] ** node.data
        cache[node] = out
    return cache[e]


def equal_elem(a: Expr, b: Expr, A: AlgebraSpec) -> list[int]:
    """hbar orders at which ``a`` and ``b`` differ in ``A`` (empty list = equal)."""
    return A.eval(a).residual_orders(A.eval(b))


# ---------------------------------------------------------------------
# construction
# ---------------------------------------------------------------------


def _domain(symbols: list[str], modulus, values) -> Domain:
    return Domain(symbols, modulus=modulus, values=values)


def _linear_sum(names: Iterable[str]) -> Expr:
    return E.add(*(E.gen(n) for n in names))


def _build_K(l: int, K: int, modulus, values) -> AlgebraSpec:
    coords = [f"f{i}" for i in range(l + 1)]
    centrals = [f"a{i}" for i in range(l + 1)]
    pairing = Pairing(coords, {(f"f{i}", f"f{cyc(i + 1, l)}"): 1 for i in range(l + 1)})
    dom = _domain(coords + centrals, modulus, values)
    derived = {"k": E.add(*(alpha(i) for i in range(l + 1)))}
    return AlgebraSpec("K_l", l, dom, pairing, K, {}, centrals, derived)


def _build_K1(K: int, modulus, values) -> AlgebraSpec:
    coords = ["q", "p"]
    centrals = ["a0", "a1", "x"]
    pairing = Pairing(coords, {("p", "q"): 1})
    dom = _domain(coords + centrals, modulus, values)
    q, p, x = E.gen("q"), E.gen("p"), E.central("x")
    gens = {"f1": q, "f2": p, "f0": x - q - p * p}
    derived = {"k": alpha(0) + alpha(1)}
    return AlgebraSpec("K_1", 1, dom, pairing, K, gens, centrals, derived,
                       ["f0 = x - q - p*p (x central)"])


def _eps_alphas(l: int) -> dict[str, Expr]:
    e = [E.central(f"e{i}") for i in range(l + 1)]
    out = {"a0": 1 - e[1] + e[0]}
    for i in range(1, l + 1):
        out[f"a{i}"] = e[i] - e[cyc(i + 1, l)]
    out["k"] = E.add(*(out[f"a{i}"] for i in range(l + 1)))
    return out


def solve_pairing(coords: list[str], known: Mapping[tuple[str, str], Fraction],
                  unknown_pairs: list[tuple[str, str]], linear: Mapping[str, Mapping[str, Fraction]],
                  conditions: list[tuple[str, str, Fraction]]):
    """Solve for unknown pairing entries given bracket conditions.

    ``linear[name]`` is the coordinate expansion (constant parts dropped) of a
    linear element; each condition ``(X, Y, v)`` demands ``[X, Y] = v*hbar``.
    Returns ``{pair: value}``; free unknowns are set to zero.
    """
    syms = sympy.symbols(f"c0:{len(unknown_pairs)}")
    lookup = {}
    for s, (a, b) in zip(syms, unknown_pairs):
        lookup[(a, b)] = s
        lookup[(b, a)] = -s

    def entry(a, b):
        if a == b:
            return 0
        if (a, b) in lookup:
            return lookup[(a, b)]
        if (a, b) in known:
            return sympy.Rational(known[(a, b)])
        if (b, a) in known:
            return -sympy.Rational(known[(b, a)])
        return 0

    eqs = []
    labels = []
    for X, Y, v in conditions:
        lx, ly = linear[X], linear[Y]
        expr = sum((sympy.Rational(cx) * sympy.Rational(cy) * entry(a, b)
                    for a, cx in lx.items() for b, cy in ly.items()), sympy.Integer(0))
        eqs.append(sympy.expand(expr - sympy.Rational(v)))
        labels.append(f"[{X},{Y}] = {v}h")
    sol = sympy.linsolve(eqs, syms)
    if not sol:
        raise ConstructionFailure("pairing system is inconsistent", list(zip(labels, eqs)))
    (values,) = tuple(sol)
    subs0 = {s: 0 for s in syms}
    out = {}
    for s, pair, val in zip(syms, unknown_pairs, values):
        out[pair] = Fraction(str(sympy.nsimplify(val.subs(subs0))))
    return out


def _chain_u(l: int, base: Mapping[int, dict[str, Fraction]],
             fvec: Mapping[int, dict[str, Fraction]]) -> dict[int, dict[str, Fraction]]:
    """Propagate ``u_{i+2} = u_i - f_i + f_{i+1}`` from the seeded ``u``'s."""
    u = dict(base)
    changed = True
    while changed:
        changed = False
        for i in list(u):
            j = cyc(i + 2, l)
            vec = dict(u[i])
            for name, c in fvec[i].items():
                vec[name] = vec.get(name, 0) - c
            for name, c in fvec[cyc(i + 1, l)].items():
                vec[name] = vec.get(name, 0) + c
            vec = {k: v for k, v in vec.items() if v}
            if j not in u:
                u[j] = vec
                changed = True
            elif u[j] != vec:
                raise ConstructionFailure(f"chain for u_{j} is inconsistent")
    return u


def _build_A_even(l: int, K: int, modulus, values) -> AlgebraSpec:
    indep = [f"f{i}" for i in range(l)]
    coords = indep + ["u0"]
    centrals = [f"e{i}" for i in range(l + 1)] + ["t", "z"]
    fvec = {i: {f"f{i}": Fraction(1)} for i in range(l)}
    fvec[l] = {n: Fraction(-1) for n in indep}  # f_l = t - sum (constant part dropped)
    uvec = _chain_u(l, {0: {"u0": Fraction(1)}}, fvec)
    known = {(f"f{i}", f"f{i + 1}"): Fraction(1) for i in range(l - 1)}
    linear = {f"f{i}": fvec[i] for i in range(l + 1)}
    linear.update({f"u{i}": uvec[i] for i in range(l + 1)})
    conditions = []
    for i in range(l + 1):
        conditions.append((f"u{i}", f"f{i}", Fraction(1)))
        conditions.append((f"f{i}", f"u{cyc(i + 1, l)}", Fraction(1)))
    unknown = [("u0", n) for n in indep]
    sol = solve_pairing(coords, known, unknown, linear, conditions)
    pairing = Pairing(coords, {**known, **sol})
    dom = _domain(coords + centrals, modulus, values)
    t = E.central("t")
    gens = {f"f{l}": t - _linear_sum(indep)}
    for i in range(1, l + 1):
        gens[f"u{i}"] = _u_expr(i, l)
    derived = _eps_alphas(l)
    return AlgebraSpec("A_l", l, dom, pairing, K, gens, centrals, derived,
                       [f"f{l} = t - sum f_i", "u_{i+2} = u_i - f_i + f_{i+1}"])


def _u_expr(i: int, l: int) -> Expr:
    """``u_i`` through the chain starting at ``u_0`` (or ``u_1`` for odd ``l``)."""
    if (l + 1) % 2 == 1:
        start, steps = 0, None
        # smallest number of +2 steps from 0 reaching i
        for s in range(l + 1):
            if cyc(2 * s, l) == i:
                steps = s
                break
    else:
        start = i % 2
        steps = (i - start) // 2
    out = E.gen(f"u{start}")
    j = start
    for _ in range(steps):
        out = out - f(j) + f(cyc(j + 1, l))
        j = cyc(j + 2, l)
    return out


def _build_A1(K: int, modulus, values) -> AlgebraSpec:
    coords = ["q", "p", "u1"]
    centrals = ["x", "e0", "e1", "t", "z"]
    # [u1, q] = h and u1 commuting with p and x; u2 = u1 - 2 f2 is forced by the
    # z-linear entries of the compatibility condition
    pairing = Pairing(coords, {("p", "q"): 1, ("u1", "q"): 1})
    dom = _domain(coords + centrals, modulus, values)
    q, p, x = E.gen("q"), E.gen("p"), E.central("x")
    gens = {"f1": q, "f2": p, "f0": x - q - p * p, "u2": E.gen("u1") - 2 * p}
    e0, e1 = E.central("e0"), E.central("e1")
    derived = {"a0": 1 - e1 + e0, "a1": e1 - e0, "k": E.const(1)}
    return AlgebraSpec("A_1", 1, dom, pairing, K, gens, centrals, derived,
                       ["f0 = x - q - p*p", "u2 = u1 - 2 f2"])


def _build_F_odd(l: int, K: int, modulus, values) -> AlgebraSpec:
    n = (l - 1) // 2
    coords = [f"phi{i}" for i in range(l - 1)]
    centrals = ["t", "eps"] + [f"b{i}" for i in range(l)]
    pairing = Pairing(coords, {(f"phi{i}", f"phi{i + 1}"): 1 for i in range(l - 2)})
    dom = _domain(coords + centrals, modulus, values)
    # the central sums vanish; phi_{2n} and phi_{2n+1} are eliminated
    gens = {
        f"phi{2 * n}": -_linear_sum(f"phi{2 * r}" for r in range(n)),
        f"phi{2 * n + 1}": -_linear_sum(f"phi{2 * r + 1}" for r in range(n)),
    }
    gens["psi0"] = E.gen("phi0") + E.gen("phi1") + E.central("t")
    for i in range(1, l):
        gens[f"psi{i}"] = E.gen(f"phi{i + 1}")
    b = [E.central(f"b{i}") for i in range(l)]
    derived = {f"b{l}": 1 - E.add(*b), "g0": b[0] + b[1]}
    for i in range(1, l):
        derived[f"g{i}"] = E.central(f"b{i + 1}")
    return AlgebraSpec("F_l", l, dom, pairing, K, gens, centrals, derived,
                       ["phi{2n} = -(phi0 + ... + phi{2n-2})", "phi{2n+1} = -(phi1 + ... + phi{2n-1})",
                        f"b{l} = 1 - sum b_i"])


def _build_F2(K: int, modulus, values) -> AlgebraSpec:
    coords = ["psi", "phi0", "phi1"]
    centrals = ["t", "eps", "b0", "b1"]
    pairing = Pairing(coords, {("psi", "phi0"): Fraction(1, 2), ("psi", "phi1"): Fraction(1, 2)})
    dom = _domain(coords + centrals, modulus, values)
    derived = {"b2": 1 - E.central("b0") - E.central("b1")}
    return AlgebraSpec("F_2", 2, dom, pairing, K, {}, centrals, derived, ["b2 = 1 - b0 - b1"])


def build(name: str, l: int, K: int = 3, *, modulus: int | None = None,
          values: Mapping | None = None) -> AlgebraSpec:
    """Construct one of the presented algebras.

    ``name`` is ``"K_l"``, ``"K_1"``, ``"A_l"`` or ``"F_l"`` (``F_l`` with
    ``l=2`` gives the algebra used for the second Painleve limit).
    """
    if l < 1 or K < 1:
        raise ValueError("need l >= 1 and K >= 1")
    key = name.replace("_", "").upper()
    if key in ("KL", "K") and l >= 2:
        A = _build_K(l, K, modulus, values)
    elif key in ("K1", "KL", "K") and l == 1:
        A = _build_K1(K, modulus, values)
    elif key in ("AL", "A"):
        if l == 1:
            A = _build_A1(K, modulus, values)
        elif l % 2 == 0:
            A = _build_A_even(l, K, modulus, values)
        else:
            from .lax import build_A_odd  # the odd case is a Lax-specific model
            A = build_A_odd(l, K, modulus, values)
    elif key in ("FL", "F", "F2"):
        if l == 2:
            A = _build_F2(K, modulus, values)
        elif l % 2 == 1 and l >= 3:
            A = _build_F_odd(l, K, modulus, values)
        else:
            raise ValueError("F_l exists for l = 2 and odd l >= 3")
    else:
        raise ValueError(f"unknown algebra {name!r} for l={l}")
    failures = [lab for lab, lhs, rhs in defining_relations(A) if A.eval(lhs).residual_orders(A.eval(rhs))]
    if failures:
        raise ConstructionFailure(f"{A.name}: relations fail: {failures}")
    return A


def central_symbols(name: str, l: int) -> list[str]:
    """Symbols a modular instance specializes (everything central except eps, z)."""
    A = build(name, l, 1)
    return [s for s in A.dom.symbols if s not in A.coords and s not in _KEEP_SYMBOLIC]


def build_modular(name: str, l: int, K: int = 3, *, prime: int = DEFAULT_PRIME,
                  seed: int = 0, line: bool = False) -> AlgebraSpec:
    """Instance with central parameters specialized to random residues.

    With ``line=True`` each parameter becomes ``a + b*lam_`` for random
    ``a, b`` so that parameter degrees can be measured in ``lam_``.
    """
    rng = random.Random(seed)
    values = {}
    for s in central_symbols(name, l):
        if line:
            values[s] = (rng.randrange(1, prime), rng.randrange(1, prime))
        else:
            values[s] = rng.randrange(1, prime)
    return build(name, l, K, modulus=prime, values=values)


# ---------------------------------------------------------------------
# defining relations
# ---------------------------------------------------------------------


def defining_relations(A: AlgebraSpec) -> list[tuple[str, Expr, Expr]]:
    l = A.l
    rels = []
    kind = A.kind
    if kind in ("K_l", "A_l") and l >= 2:
        for i in range(l + 1):
            j = cyc(i + 1, l)
            rels.append((f"[f{i},f{j}]=h", E.comm(f(i), f(j)), H))
            for m in range(i + 1, l + 1):
                if m not in (cyc(i + 1, l), cyc(i - 1, l)):
                    rels.append((f"[f{i},f{m}]=0", E.comm(f(i), f(m)), E.ZERO))
    if kind in ("K_1", "A_1"):
        rels += [
            ("[f1,f0]=2hf2", E.comm(f(1), f(0)), 2 * H * f(2)),
            ("[f0,f2]=h", E.comm(f(0), f(2)), H),
            ("[f2,f1]=h", E.comm(f(2), f(1)), H),
        ]
    if kind == "A_l" and l >= 2 and l % 2 == 0:
        for i in range(l + 1):
            u_i, u_next = E.gen(f"u{i}"), E.gen(f"u{cyc(i + 1, l)}")
            rels.append((f"[f{i},u{cyc(i + 1, l)}]=h", E.comm(f(i), u_next), H))
            rels.append((f"[u{i},f{i}]=h", E.comm(u_i, f(i)), H))
            rels.append((f"f{i}-f{cyc(i + 1, l)}=u{i}-u{cyc(i + 2, l)}",
                         f(i) - f(cyc(i + 1, l)), u_i - E.gen(f"u{cyc(i + 2, l)}")))
        rels.append(("sum f = t", E.add(*(f(i) for i in range(l + 1))), E.central("t")))
    if kind == "A_1":
        u1, u2 = E.gen("u1"), E.gen("u2")
        rels += [
            ("[f0,u1]=h", E.comm(f(0), u1), H),
            ("[u2,f0]=h", E.comm(u2, f(0)), H),
            ("[u1,f1]=h", E.comm(u1, f(1)), H),
            ("[f1,u2]=h", E.comm(f(1), u2), H),
            ("[u1,f2]=0", E.comm(u1, f(2)), E.ZERO),
            ("[u2,f2]=0", E.comm(u2, f(2)), E.ZERO),
        ]
    if kind == "F_l":
        phi = [E.gen(f"phi{i}") for i in range(l + 1)]
        for i in range(l + 1):
            j = cyc(i + 1, l)
            rels.append((f"[phi{i},phi{j}]=h", E.comm(phi[i], phi[j]), H))
            for m in range(i + 1, l + 1):
                if m not in (cyc(i + 1, l), cyc(i - 1, l)):
                    rels.append((f"[phi{i},phi{m}]=0", E.comm(phi[i], phi[m]), E.ZERO))
        rels.append(("sum phi_even = 0", E.add(*phi[0::2]), E.ZERO))
        rels.append(("sum phi_odd = 0", E.add(*phi[1::2]), E.ZERO))
        rels.append(("sum b = 1", E.add(*(E.central(f"b{i}") for i in range(l + 1))), E.ONE))
    if kind == "F_2":
        psi, p0, p1 = E.gen("psi"), E.gen("phi0"), E.gen("phi1")
        rels += [
            ("[psi,phi0]=h/2", E.comm(psi, p0), H / 2),
            ("[psi,phi1]=h/2", E.comm(psi, p1), H / 2),
            ("[phi0,phi1]=0", E.comm(p0, p1), E.ZERO),
            ("sum b = 1", E.central("b0") + E.central("b1") + E.central("b2"), E.ONE),
        ]
    return rels
