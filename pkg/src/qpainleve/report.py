"""Named verification outcomes."""

from __future__ import annotations

import json
import time
from contextlib import contextmanager
from dataclasses import dataclass, field

from .coeff import failure_bound

__all__ = ["CheckReport", "Entry", "combine", "run_suite"]


@dataclass
class Entry:
    """One identity: a label, pass flag, and the residual description on failure."""

    label: str
    passed: bool
    residual: str = ""
    orders: list[int] = field(default_factory=list)

    def to_json_obj(self) -> dict:
        d = {"label": self.label, "passed": self.passed}
        if not self.passed:
            d["residual"] = self.residual
            d["orders"] = self.orders
        return d


@dataclass
class CheckReport:
    name: str
    params: dict = field(default_factory=dict)
    mode: str = "exact"
    entries: list[Entry] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    algebra: dict | None = None
    elapsed: float = 0.0
    max_degree: int = 0
    trials: int = 0
    prime: int | None = None
    skipped: str | None = None

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)

    @property
    def status(self) -> str:
        if self.skipped is not None:
            return "skipped"
        return "pass" if self.passed else "fail"

    @property
    def failures(self) -> list[Entry]:
        return [e for e in self.entries if not e.passed]

    @property
    def bound(self) -> float:
        """Per-identity false-pass probability (0 for exact mode)."""
        if self.mode != "modular" or not self.prime:
            return 0.0
        return failure_bound(max(self.max_degree, 1), self.prime, max(self.trials, 1))

    def add(self, label: str, residual_orders: list[int], residual: str = "") -> Entry:
        e = Entry(label, not residual_orders, residual, list(residual_orders))
        self.entries.append(e)
        return e

    def check(self, label: str, ok: bool, residual: str = "") -> Entry:
        e = Entry(label, bool(ok), residual)
        self.entries.append(e)
        return e

    def merge(self, other: CheckReport, prefix: str = "") -> None:
        for e in other.entries:
            self.entries.append(Entry(prefix + e.label, e.passed, e.residual, e.orders))
        self.notes.extend(other.notes)
        self.max_degree = max(self.max_degree, other.max_degree)
        self.trials = max(self.trials, other.trials)
        self.prime = self.prime or other.prime

    @contextmanager
    def timed(self):
        t0 = time.perf_counter()
        try:
            yield self
        finally:
            self.elapsed += time.perf_counter() - t0

    def summary_line(self) -> str:
        status = self.status.upper()
        if self.skipped is not None:
            return f"{status} {self.name} {self.params}: {self.skipped}"
        n, bad = len(self.entries), len(self.failures)
        extra = f", bound {self.bound:.1e}" if self.mode == "modular" else ""
        return f"{status} {self.name} {self.params} [{self.mode}] {n - bad}/{n} ({self.elapsed:.2f}s{extra})"

    def to_json_obj(self) -> dict:
        return {
            "name": self.name,
            "params": self.params,
            "mode": self.mode,
            "status": self.status,
            "passed": self.passed,
            "entries": [e.to_json_obj() for e in self.entries],
            "notes": self.notes,
            "algebra": self.algebra,
            "elapsed": round(self.elapsed, 4),
            "trials": self.trials,
            "prime": self.prime,
            "failure_bound": self.bound,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), indent=2, sort_keys=True)


def combine(reports: list[CheckReport]) -> CheckReport:
    """Merge repeated runs of one check: an entry passes only if it passed every run."""
    first = reports[0]
    out = CheckReport(first.name, dict(first.params), first.mode, algebra=first.algebra,
                      prime=first.prime)
    seen: dict[str, Entry] = {}
    for rep in reports:
        out.elapsed += rep.elapsed
        out.trials += max(rep.trials, 1)
        out.max_degree = max(out.max_degree, rep.max_degree)
        for note in rep.notes:
            if note not in out.notes:
                out.notes.append(note)
        for e in rep.entries:
            cur = seen.get(e.label)
            if cur is None:
                seen[e.label] = Entry(e.label, e.passed, e.residual, list(e.orders))
                out.entries.append(seen[e.label])
            elif cur.passed and not e.passed:
                cur.passed, cur.residual, cur.orders = False, e.residual, list(e.orders)
    return out


def _lam_degree(elem) -> int:
    from .coeff import LINE_VAR

    deg = 0
    for c in elem.coeffs:
        if LINE_VAR in c.dom.free:
            deg = max(deg, int(c.degree_in(LINE_VAR)))
    return deg


def run_suite(name: str, params: dict, kind: str, l: int, K: int, identities, *,
              mode: str = "modular", trials: int = 3, prime: int | None = None,
              seed: int = 0) -> CheckReport:
    """Evaluate ``identities(A)`` (yielding ``(label, lhs, rhs)``) on fresh instances.

    Exact mode uses one symbolic instance. Modular mode uses ``trials``
    instances with independently drawn parameter residues; the first uses a
    random line through parameter space so that the parameter degree of each
    identity can be bounded for the reported failure probability.
    """
    from .algebra import build, build_modular
    from .coeff import DEFAULT_PRIME

    rep = CheckReport(name, dict(params), mode)
    with rep.timed():
        if mode == "exact":
            A = build(kind, l, K)
            rep.algebra = A.descriptor()
            for label, lhs, rhs in identities(A):
                rep.add(label, lhs.residual_orders(rhs), _residual_text(lhs, rhs))
            return rep
        if mode != "modular":
            raise ValueError(f"unknown mode {mode!r}")
        prime = prime or DEFAULT_PRIME
        rep.prime, rep.trials = prime, trials
        status: dict[str, list[int]] = {}
        order: list[str] = []
        for t in range(trials):
            A = build_modular(kind, l, K, prime=prime, seed=seed + t, line=(t == 0))
            if t == 0:
                rep.algebra = A.descriptor()
            for label, lhs, rhs in identities(A):
                if label not in status:
                    status[label] = []
                    order.append(label)
                if t == 0:
                    rep.max_degree = max(rep.max_degree, _lam_degree(lhs) + _lam_degree(rhs))
                bad = lhs.residual_orders(rhs)
                for k in bad:
                    if k not in status[label]:
                        status[label].append(k)
        for label in order:
            rep.add(label, sorted(status[label]), "nonzero residual at hbar orders "
                    + ",".join(map(str, sorted(status[label]))) if status[label] else "")
    return rep


def _residual_text(lhs, rhs) -> str:
    try:
        diff = lhs - rhs
    except Exception as exc:  # pragma: no cover - mismatch only on engine bugs
        return f"cannot subtract: {exc}"
    text = repr(diff)
    return text if len(text) < 400 else text[:400] + "..."
