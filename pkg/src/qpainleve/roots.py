"""Weights, index subsets and the monomials entering H_0."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from . import expr as E
from .algebra import AlgebraSpec, cyc
from .expr import Expr
from .star import StarElem, commutator

__all__ = [
    "IndexSubset",
    "NotProper",
    "Undefined",
    "WeightExpr",
    "chi",
    "enumerate_S",
    "fK_expr",
    "fundamental_weight",
    "monomial_fK",
]


class NotProper(ValueError):
    """chi is only defined on proper subsets of the index set."""


class Undefined(ValueError):
    """f_K is not defined for K of size l+1."""


@dataclass(frozen=True)
class WeightExpr:
    """Rational linear combination of alpha_1..alpha_l."""

    l: int
    coeffs: tuple[Fraction, ...]  # index r-1 holds the alpha_r coefficient

    @classmethod
    def zero(cls, l: int) -> WeightExpr:
        return cls(l, (Fraction(0),) * l)

    def __add__(self, other: WeightExpr) -> WeightExpr:
        return WeightExpr(self.l, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> WeightExpr:
        return WeightExpr(self.l, tuple(-a for a in self.coeffs))

    def __sub__(self, other: WeightExpr) -> WeightExpr:
        return self + (-other)

    def scale(self, c) -> WeightExpr:
        c = Fraction(c)
        return WeightExpr(self.l, tuple(c * a for a in self.coeffs))

    def coefficient(self, r: int) -> Fraction:
        return self.coeffs[r - 1]

    def to_expr(self) -> Expr:
        return E.add(*(c * E.central(f"a{r}") for r, c in enumerate(self.coeffs, 1) if c))

    def __str__(self) -> str:
        parts = [f"{c}*a{r}" for r, c in enumerate(self.coeffs, 1) if c]
        return " + ".join(parts) or "0"


def fundamental_weight(i: int, l: int) -> WeightExpr:
    if not 0 <= i <= l:
        raise ValueError(f"weight index {i} out of range for l={l}")
    if i == 0:
        return WeightExpr.zero(l)
    return WeightExpr(l, tuple(Fraction(min(i, r)) - Fraction(i * r, l + 1) for r in range(1, l + 1)))


@dataclass(frozen=True)
class IndexSubset:
    """Subset of Z/(l+1)Z with its cyclic connected components."""

    l: int
    elements: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(sorted({cyc(e, self.l) for e in self.elements})))

    def __len__(self):
        return len(self.elements)

    def complement(self) -> IndexSubset:
        s = set(self.elements)
        return IndexSubset(self.l, tuple(i for i in range(self.l + 1) if i not in s))

    def components(self) -> list[tuple[int, int]]:
        """``(start, length)`` pairs in ascending start order.

        A component starts at the element whose cyclic predecessor is absent.
        """
        s = set(self.elements)
        if len(s) == self.l + 1:
            raise NotProper("the full index set has no component start")
        out = []
        for i in self.elements:
            if cyc(i - 1, self.l) in s:
                continue
            m = 1
            while cyc(i + m, self.l) in s:
                m += 1
            out.append((i, m))
        return out


def chi(C: IndexSubset) -> WeightExpr:
    l = C.l
    out = WeightExpr.zero(l)
    for start, m in C.components():
        for j in range(m):
            w = fundamental_weight(cyc(start + j, l), l)
            out = out + (w if j % 2 == 0 else -w)
    return out


def enumerate_S(d: int, l: int) -> list[IndexSubset]:
    if not 1 <= d <= l + 1:
        raise ValueError(f"d={d} out of range for l={l}")
    out = []
    for combo in combinations(range(l + 1), d):
        K = IndexSubset(l, combo)
        comp = K.complement()
        if len(comp) == 0 or all(m % 2 == 0 for _, m in comp.components()):
            out.append(K)
    return out


def fK_expr(K: IndexSubset) -> Expr:
    if len(K) == K.l + 1:
        raise Undefined("f_K is not defined for |K| = l+1")
    factors = []
    for start, m in K.components():
        factors.extend(E.gen(f"f{cyc(start + j, K.l)}") for j in range(m))
    return E.mul(*factors)


def monomial_fK(K: IndexSubset, A: AlgebraSpec) -> StarElem:
    if len(K) == K.l + 1:
        raise Undefined("f_K is not defined for |K| = l+1")
    blocks = [A.eval(E.mul(*(E.gen(f"f{cyc(s + j, K.l)}") for j in range(m))))
              for s, m in K.components()]
    for a in range(len(blocks)):
        for b in range(a + 1, len(blocks)):
            if not commutator(blocks[a], blocks[b]).is_zero():
                raise AssertionError(f"components of {K.elements} do not commute")
    return A.eval(fK_expr(K))
