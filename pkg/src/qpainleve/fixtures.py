"""Stored serializations of the displayed Hamiltonians H_0 (l = 2..5).

Each ``h0_l{l}.json`` holds the normalized JSON of the printed example.
``verify`` rebuilds H_0 from its definition and compares term by term;
``regenerate`` rewrites the files from the printed term lists.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .hamiltonian import PRINTED_H0, built_h0_json, printed_h0_json

__all__ = ["FIXTURE_LS", "FixtureResult", "default_dir", "fixture_path", "regenerate",
           "term_diff", "verify"]

FIXTURE_LS = tuple(sorted(PRINTED_H0))


def default_dir() -> Path:
    """``fixtures/`` next to the source tree, else under the working directory."""
    here = Path(__file__).resolve().parents[2] / "fixtures"
    return here if here.is_dir() else Path.cwd() / "fixtures"


def fixture_path(directory: Path | str, l: int) -> Path:
    return Path(directory) / f"h0_l{l}.json"


def dumps(obj: dict) -> str:
    return json.dumps(obj, indent=1, sort_keys=True) + "\n"


def _monomial(symbols: list[str], exps: list[int]) -> str:
    parts = [s if e == 1 else f"{s}^{e}" for s, e in zip(symbols, exps) if e]
    return "*".join(parts) or "1"


def _term_map(data: dict) -> dict[tuple, Fraction]:
    out = {}
    for k, c in enumerate(data["hamiltonian"]["coeffs"]):
        for part in ("num", "den"):
            for exps, coeff in c[part]:
                out[(k, part, tuple(exps))] = Fraction(coeff)
    return out


def term_diff(stored: dict, fresh: dict) -> list[str]:
    """Human-readable differences between two H_0 serializations (empty if equal)."""
    lines = []
    if stored.get("symbols") != fresh.get("symbols"):
        return [f"symbol registry differs: {stored.get('symbols')} vs {fresh.get('symbols')}"]
    meta = ("algebra", "order", "exact")
    for key in meta:
        if stored["hamiltonian"].get(key) != fresh["hamiltonian"].get(key):
            lines.append(f"{key}: stored {stored['hamiltonian'].get(key)!r}, "
                         f"built {fresh['hamiltonian'].get(key)!r}")
    a, b = _term_map(stored), _term_map(fresh)
    syms = fresh["symbols"]
    for key in sorted(set(a) | set(b)):
        if a.get(key) != b.get(key):
            k, part, exps = key
            lines.append(f"hbar^{k} {part} {_monomial(syms, list(exps))}: "
                         f"stored {a.get(key, 0)}, built {b.get(key, 0)}")
    return lines


@dataclass
class FixtureResult:
    l: int
    path: Path
    passed: bool
    diff: list[str] = field(default_factory=list)

    def to_json_obj(self) -> dict:
        return {"fixture": self.path.name, "l": self.l, "passed": self.passed, "diff": self.diff}


def verify(directory: Path | str | None = None, ls=FIXTURE_LS) -> list[FixtureResult]:
    directory = Path(directory) if directory is not None else default_dir()
    if not directory.is_dir():
        raise FileNotFoundError(f"fixture directory {directory} not found")
    out = []
    for l in ls:
        path = fixture_path(directory, l)
        if not path.exists():
            out.append(FixtureResult(l, path, False, ["missing fixture file"]))
            continue
        stored = json.loads(path.read_text())
        fresh = built_h0_json(l)
        diff = term_diff(stored, fresh)
        if not diff and path.read_text() != dumps(fresh):
            diff = ["file is not in canonical form (run regenerate)"]
        out.append(FixtureResult(l, path, not diff, diff))
    return out


def regenerate(directory: Path | str | None = None, ls=FIXTURE_LS, *, confirm: bool = False) -> list[Path]:
    """Rewrite the fixture files. Refuses to touch anything unless ``confirm``."""
    if not confirm:
        raise PermissionError("regenerate rewrites fixture files; pass confirm=True")
    directory = Path(directory) if directory is not None else default_dir()
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for l in ls:
        path = fixture_path(directory, l)
        path.write_text(dumps(printed_h0_json(l)))
        paths.append(path)
    return paths
