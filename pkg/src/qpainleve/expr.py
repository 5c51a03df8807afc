"""Hash-consed expression trees over named generators.

Nodes are interned: two structurally equal trees are the same object, so
memoized evaluation and substitution work on the shared DAG rather than on
the (exponentially larger) unfolded tree.
"""

from __future__ import annotations

import weakref
from fractions import Fraction
from typing import Callable, Mapping

__all__ = [
    "Expr",
    "central",
    "comm",
    "const",
    "derive",
    "gen",
    "inv",
    "mul",
    "power",
    "add",
    "substitute",
    "to_expr",
]

_INTERN: "weakref.WeakValueDictionary[tuple, Expr]" = weakref.WeakValueDictionary()


class Expr:
    """Immutable node: ``gen``, ``central``, ``const``, ``sum``, ``prod``, ``inv`` or ``pow``."""

    __slots__ = ("kind", "data", "args", "size", "__weakref__")

    def __init__(self, kind: str, data, args: tuple):
        self.kind = kind
        self.data = data
        self.args = args
        self.size = 1 + sum(a.size for a in args)

    # arithmetic sugar; products keep operand order
    def __add__(self, other):
        return add(self, to_expr(other))

    def __radd__(self, other):
        return add(to_expr(other), self)

    def __sub__(self, other):
        return add(self, -to_expr(other))

    def __rsub__(self, other):
        return add(to_expr(other), -self)

    def __neg__(self):
        return mul(const(-1), self)

    def __mul__(self, other):
        return mul(self, to_expr(other))

    def __rmul__(self, other):
        return mul(to_expr(other), self)

    def __truediv__(self, other):
        return mul(self, inv(to_expr(other)))

    def __rtruediv__(self, other):
        return mul(to_expr(other), inv(self))

    def __pow__(self, n: int):
        return power(self, n)

    def __repr__(self):
        return f"Expr({self})"

    def __str__(self):
        k = self.kind
        if k in ("gen", "central"):
            return self.data
        if k == "const":
            return str(self.data)
        if k == "sum":
            return "(" + " + ".join(str(a) for a in self.args) + ")"
        if k == "prod":
            return "*".join(str(a) for a in self.args)
        if k == "inv":
            return f"inv({self.args[0]})"
        return f"({self.args[0]})^{self.data}"


def _node(kind: str, data, args: tuple = ()) -> Expr:
    key = (kind, data, args)
    hit = _INTERN.get(key)
    if hit is not None:
        return hit
    node = Expr(kind, data, args)
    _INTERN[key] = node
    return node


def gen(name: str) -> Expr:
    return _node("gen", name)


def central(name: str) -> Expr:
    return _node("central", name)


def const(value) -> Expr:
    return _node("const", Fraction(value))


ZERO = const(0)
ONE = const(1)


def to_expr(x) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, (int, Fraction)):
        return const(x)
    raise TypeError(f"cannot convert {type(x).__name__} to Expr")


def add(*xs) -> Expr:
    terms = []
    c = Fraction(0)
    for x in xs:
        x = to_expr(x)
        if x.kind == "sum":
            for a in x.args:
                if a.kind == "const":
                    c += a.data
                else:
                    terms.append(a)
        elif x.kind == "const":
            c += x.data
        else:
            terms.append(x)
    if c:
        terms.append(const(c))
    if not terms:
        return ZERO
    if len(terms) == 1:
        return terms[0]
    return _node("sum", None, tuple(terms))


def mul(*xs) -> Expr:
    factors = []
    c = Fraction(1)
    for x in xs:
        x = to_expr(x)
        if x.kind == "prod":
            for a in x.args:
                if a.kind == "const":
                    c *= a.data
                else:
                    factors.append(a)
        elif x.kind == "const":
            c *= x.data
        else:
            factors.append(x)
    if c == 0:
        return ZERO
    if not factors:
        return const(c)
    if c != 1:
        factors.insert(0, const(c))
    if len(factors) == 1:
        return factors[0]
    return _node("prod", None, tuple(factors))


def inv(x) -> Expr:
    x = to_expr(x)
    if x.kind == "const":
        if x.data == 0:
            raise ZeroDivisionError("inverse of constant zero")
        return const(1 / x.data)
    if x.kind == "inv":
        return x.args[0]
    return _node("inv", None, (x,))


def power(x, n: int) -> Expr:
    x = to_expr(x)
    if n == 0:
        return ONE
    if n == 1:
        return x
    if n < 0:
        return power(inv(x), -n)
    if x.kind == "const":
        return const(x.data**n)
    return _node("pow", n, (x,))


def comm(a, b) -> Expr:
    a, b = to_expr(a), to_expr(b)
    return a * b - b * a


def substitute(e: Expr, images: Mapping[str, Expr], memo: dict | None = None) -> Expr:
    """Replace ``gen``/``central`` leaves named in ``images``; other leaves stay."""
    if memo is None:
        memo = {}
    stack = [e]
    while stack:
        node = stack[-1]
        if node in memo:
            stack.pop()
            continue
        if node.kind in ("gen", "central"):
            memo[node] = images.get(node.data, node)
            stack.pop()
            continue
        if node.kind == "const":
            memo[node] = node
            stack.pop()
            continue
        pending = [a for a in node.args if a not in memo]
        if pending:
            stack.extend(pending)
            continue
        stack.pop()
        args = [memo[a] for a in node.args]
        memo[node] = _rebuild(node, args)
    return memo[e]


def _rebuild(node: Expr, args: list) -> Expr:
    k = node.kind
    if k == "sum":
        return add(*args)
    if k == "prod":
        return mul(*args)
    if k == "inv":
        return inv(args[0])
    if k == "pow":
        return power(args[0], node.data)
    raise ValueError(k)


def derive(e: Expr, rules: Mapping[str, Expr] | Callable[[Expr], Expr],
           memo: dict | None = None) -> Expr:
    """Extend a derivation from leaves to the whole tree.

    ``rules`` maps leaf names to their images; leaves not listed go to zero.
    Products use the ordered Leibniz rule and ``d(inv a) = -inv(a) d(a) inv(a)``.
    """
    if memo is None:
        memo = {}
    lookup = rules if callable(rules) else (lambda n: rules.get(n.data, ZERO))
    stack = [e]
    while stack:
        node = stack[-1]
        if node in memo:
            stack.pop()
            continue
        k = node.kind
        if k in ("gen", "central"):
            memo[node] = lookup(node)
            stack.pop()
            continue
        if k == "const":
            memo[node] = ZERO
            stack.pop()
            continue
        pending = [a for a in node.args if a not in memo]
        if pending:
            stack.extend(pending)
            continue
        stack.pop()
        if k == "sum":
            memo[node] = add(*(memo[a] for a in node.args))
        elif k == "prod":
            parts = []
            for i, a in enumerate(node.args):
                d = memo[a]
                if d is ZERO:
                    continue
                parts.append(mul(*node.args[:i], d, *node.args[i + 1:]))
            memo[node] = add(*parts)
        elif k == "inv":
            a = node.args[0]
            d = memo[a]
            memo[node] = ZERO if d is ZERO else -mul(node, d, node)
        else:
            a = node.args[0]
            d = memo[a]
            n = node.data
            if d is ZERO:
                memo[node] = ZERO
            else:
                memo[node] = add(*(mul(power(a, i), d, power(a, n - 1 - i)) for i in range(n)))
    return memo[e]


def leaves(e: Expr) -> set[str]:
    seen = set()
    out = set()
    stack = [e]
    while stack:
        node = stack.pop()
        if node in seen:
            continue
        seen.add(node)
        if node.kind in ("gen", "central"):
            out.add(node.data)
        stack.extend(node.args)
    return out
