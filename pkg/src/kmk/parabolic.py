"""Parabolic structure constants and positivity scans.

Two independent routes produce d^w_{u,v}(P) for u, v, w in W^P:

* ``parabolic_constants_cosets`` sums Borel constants over the cosets
  uW_P x vW_P;
* ``parabolic_constants_pullback`` expands the product of pulled-back classes
  Phi_u = sum_{u' in uW_P} phi^{u'} and checks the remainder vanishes.

``positivity_scan`` runs the first (with the second as a shadow) and checks
the sign alternation of every constant in the x-variables.
"""

from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

from .engine import ConstantTable, LocalizationEngine
from .errors import KMKError, NonClearingEntry, NonZeroRemainder, NotInPolynomialSubring
from .ring import (SCHEMA_VERSION, RTElement, RTFraction, Verdict, XPolynomial,
                   from_x_polynomial, sign_verdict, to_x_polynomial)
from .rootdatum import build_realization, load_gcm, parabolic_type
from .weyl import WeylElement, WeylGroup

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

__all__ = [
    "parabolic_constants_cosets", "parabolic_constants_pullback",
    "ScanConfig", "ScanEntry", "ScanReport", "positivity_scan", "sign_bookkeeping",
]


def _require_WP(W: WeylGroup, Y: frozenset[int], *ws: WeylElement) -> None:
    for w in ws:
        if not W.in_WP(w, Y):
            raise ValueError(f"{W.format(w)} is not a minimal coset representative")


def _parabolic_points(engine: LocalizationEngine, Y: frozenset[int], L: int) -> list[WeylElement]:
    return [w for w in engine.elements(L) if engine.W.in_WP(w, Y)]


def parabolic_constants_cosets(engine: LocalizationEngine, u: WeylElement, v: WeylElement,
                               Y: Iterable[int], L: int) -> ConstantTable:
    """d^w_{u,v}(P) = sum over u' in uW_P, v' in vW_P of d^w_{u',v'}(B)."""
    W = engine.W
    Y = frozenset(Y)
    _require_WP(W, Y, u, v)
    if not Y:
        return replace(engine.product_constants(u, v, L), route="coset-sum")
    cap = L + W.longest_length(Y)
    targets = _parabolic_points(engine, Y, L)
    entries: dict[WeylElement, RTElement] = {}
    for u2 in W.coset(u, Y):
        for v2 in W.coset(v, Y):
            table = engine.product_constants(u2, v2, cap)
            for w in targets:
                d = table.entries.get(w)
                if d is not None:
                    entries[w] = entries[w] + d if w in entries else d
    entries = {w: d for w, d in entries.items() if not d.is_zero()}
    return ConstantTable(u, v, Y, L, entries, "coset-sum")


def parabolic_constants_pullback(engine: LocalizationEngine, u: WeylElement, v: WeylElement,
                                 Y: Iterable[int], L: int) -> ConstantTable:
    """Expand Phi_u Phi_v in {Phi_w : w in W^P}, checking every point of length <= L."""
    W = engine.W
    Y = frozenset(Y)
    _require_WP(W, Y, u, v)
    cosets: dict[WeylElement, list[WeylElement]] = {}

    def Phi(a: WeylElement, x: WeylElement) -> RTElement:
        if a not in cosets:
            cosets[a] = W.coset(a, Y)
        col = engine.phi_column(x)
        total = RTElement.zero(W.n)
        for a2 in cosets[a]:
            val = col.get(a2)
            if val is not None:
                total = total + val
        return total

    def remainder(x: WeylElement, entries: Mapping[WeylElement, RTElement]) -> RTElement:
        r = Phi(u, x) * Phi(v, x)
        for w, d in entries.items():
            r = r - d * Phi(w, x)
        return r

    entries: dict[WeylElement, RTElement] = {}
    for w in _parabolic_points(engine, Y, L):
        rhs = remainder(w, entries)
        if rhs.is_zero():
            continue
        den: dict[tuple[int, ...], int] = {}
        for r in W.inversion_set(w):
            mu = tuple(-c for c in r.coords)
            den[mu] = den.get(mu, 0) + 1
        try:
            entries[w] = RTFraction(rhs, den).clear()
        except NonClearingEntry as exc:
            raise NonClearingEntry(f"pullback d^{W.format(w)} does not clear: {exc}") from None
    for x in engine.elements(L):
        if not remainder(x, entries).is_zero():
            raise NonZeroRemainder(f"pullback expansion leaves a remainder at {W.format(x)}")
    return ConstantTable(u, v, Y, L, entries, "pullback")


def sign_bookkeeping(xp: XPolynomial, lu: int, lv: int, lw: int, verdict: Verdict) -> bool:
    """c(j) = (-1)^|j| d(j) satisfies (-1)^{|j|+lw-lu-lv} c(j) >= 0 exactly when the verdict passes."""
    ok = all((-1) ** (sum(j) + lw - lu - lv) * ((-1) ** sum(j) * d) >= 0 for j, d in xp.terms.items())
    return ok == verdict.passed


# -- scans ---------------------------------------------------------------------------

@dataclass
class ScanConfig:
    """What to scan; ``Y`` and ``pairs`` use node labels and word strings."""

    type: str
    max_length: int
    Y: tuple[int, ...] = ()
    pairs: list[tuple[str, str]] | None = None  # None means all pairs in W^P
    route: str = "coset-sum"
    shadow: bool | None = None  # default: on when max_length <= 6
    output: str | None = None
    format: str = "text"

    @classmethod
    def from_mapping(cls, data: Mapping) -> "ScanConfig":
        known = {"type", "max_length", "Y", "parabolic", "pairs", "route", "shadow", "output", "format"}
        extra = set(data) - known
        if extra:
            raise ValueError(f"unknown scan config keys: {sorted(extra)}")
        if "type" not in data or "max_length" not in data:
            raise ValueError("scan config needs 'type' and 'max_length'")
        Y = data.get("Y", data.get("parabolic", ()))
        pairs = data.get("pairs")
        if pairs is not None and pairs != "all":
            pairs = [(str(p[0]), str(p[1])) for p in pairs]
        else:
            pairs = None
        route = data.get("route", "coset-sum")
        if route not in ("coset-sum", "pullback"):
            raise ValueError(f"unknown route {route!r}")
        return cls(
            type=str(data["type"]), max_length=int(data["max_length"]),
            Y=tuple(int(y) for y in Y), pairs=pairs, route=route,
            shadow=data.get("shadow"), output=data.get("output"),
            format=data.get("format", "text"),
        )

    @classmethod
    def from_toml(cls, path: str | Path) -> "ScanConfig":
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
        return cls.from_mapping(data.get("scan", data))


@dataclass
class ScanEntry:
    u: WeylElement
    v: WeylElement
    w: WeylElement
    d: RTElement | None
    xp: XPolynomial | None
    verdict: Verdict | None
    roundtrip: bool
    bookkeeping: bool
    error: str | None = None

    @property
    def passed(self) -> bool:
        return self.error is None and bool(self.verdict) and self.roundtrip and self.bookkeeping

    def sort_key(self) -> tuple:
        return (self.u.sort_key(), self.v.sort_key(), self.w.sort_key())


@dataclass
class ScanReport:
    config: ScanConfig
    labels: tuple[int, ...]
    entries: list[ScanEntry]
    pair_errors: list[tuple[WeylElement, WeylElement, str]] = field(default_factory=list)
    route_mismatches: list[tuple[WeylElement, WeylElement, WeylElement]] = field(default_factory=list)
    stats: dict = field(default_factory=dict)  # timing lives here, never in the JSON

    @property
    def failures(self) -> list[ScanEntry]:
        return [e for e in self.entries if not e.passed]

    @property
    def passed(self) -> bool:
        return not self.failures and not self.route_mismatches and not self.pair_errors

    def _fmt(self, w: WeylElement) -> str:
        return w.group.format(w)

    def inputs(self) -> dict:
        c = self.config
        return {
            "type": c.type,
            "Y": list(c.Y),
            "max_length": c.max_length,
            "route": c.route,
            "pairs": "all" if c.pairs is None else [list(p) for p in c.pairs],
        }

    def summary(self) -> dict:
        return {
            "pairs": self.stats.get("pairs", 0),
            "interval_size": self.stats.get("interval_size", 0),
            "entries": len(self.entries),
            "failures": len(self.failures),
            "route_mismatches": len(self.route_mismatches),
            "errors": len(self.pair_errors),
            "shadow": self.stats.get("shadow", False),
            "passed": self.passed,
        }

    def entry_json(self, e: ScanEntry) -> dict:
        verdict = None
        if e.verdict is not None:
            verdict = {
                "pass": e.passed,
                "parity": e.verdict.parity,
                "witness": list(e.verdict.witness) if e.verdict.witness is not None else None,
                "coefficient": e.verdict.coefficient,
                "roundtrip": e.roundtrip,
            }
        out = {
            "u": self._fmt(e.u), "v": self._fmt(e.v), "w": self._fmt(e.w),
            "d_rt": e.d.format(self.labels) if e.d is not None else None,
            "d_x": e.xp.format(self.labels) if e.xp is not None else None,
            "d_rt_terms": e.d.to_json()["terms"] if e.d is not None else None,
            "d_x_terms": e.xp.to_json()["terms"] if e.xp is not None else None,
            "verdict": verdict,
        }
        if e.error:
            out["error"] = e.error
        return out

    def to_json(self) -> dict:
        return {
            "version": SCHEMA_VERSION,
            "inputs": self.inputs(),
            "entries": [self.entry_json(e) for e in self.entries],
            "route_mismatches": [[self._fmt(a) for a in t] for t in self.route_mismatches],
            "errors": [[self._fmt(u), self._fmt(v), msg] for u, v, msg in self.pair_errors],
            "summary": self.summary(),
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["u", "v", "w", "d_rt", "d_x", "pass", "parity", "witness", "coefficient"])
        for e in self.entries:
            v = e.verdict
            wr.writerow([
                self._fmt(e.u), self._fmt(e.v), self._fmt(e.w),
                e.d.format(self.labels) if e.d is not None else "",
                e.xp.format(self.labels) if e.xp is not None else "",
                int(e.passed), v.parity if v else "",
                " ".join(map(str, v.witness)) if v and v.witness is not None else "",
                v.coefficient if v and v.coefficient is not None else "",
            ])
        return buf.getvalue()

    def to_text(self) -> str:
        lines = []
        for e in self.entries:
            status = "ok  " if e.passed else "FAIL"
            d = e.d.format(self.labels) if e.d is not None else "?"
            lines.append(f"{status} d^{self._fmt(e.w)}_{{{self._fmt(e.u)},{self._fmt(e.v)}}} = {d}")
            if not e.passed:
                if e.error:
                    lines.append(f"     error: {e.error}")
                elif e.verdict is not None and not e.verdict.passed:
                    lines.append(f"     witness x^{e.verdict.witness} has coefficient {e.verdict.coefficient}")
        for t in self.route_mismatches:
            lines.append("MISMATCH routes disagree at " + ", ".join(self._fmt(a) for a in t))
        for u, v, msg in self.pair_errors:
            lines.append(f"ERROR ({self._fmt(u)}, {self._fmt(v)}): {msg}")
        s = self.summary()
        lines.append(
            f"{s['entries']} constants over {s['pairs']} pairs, {s['failures']} failures, "
            f"{s['route_mismatches']} route mismatches: {'PASS' if s['passed'] else 'FAIL'}")
        return "\n".join(lines) + "\n"


Tamper = Callable[[WeylElement, WeylElement, WeylElement, RTElement], RTElement]


def _check_constant(u, v, w, d: RTElement) -> ScanEntry:
    try:
        xp = to_x_polynomial(d)
    except NotInPolynomialSubring as exc:
        return ScanEntry(u, v, w, d, None, None, False, False, error=str(exc))
    verdict = sign_verdict(xp, u.length, v.length, w.length)
    roundtrip = from_x_polynomial(xp) == d
    book = sign_bookkeeping(xp, u.length, v.length, w.length, verdict)
    return ScanEntry(u, v, w, d, xp, verdict, roundtrip, book)


def positivity_scan(cfg: ScanConfig, engine: LocalizationEngine | None = None,
                    tamper: Tamper | None = None) -> ScanReport:
    """Check the sign alternation of every nonzero d^w_{u,v}(P) in the configured range.

    ``tamper`` (for harness self-tests) may rewrite a constant before it is checked.
    Failures are collected in the report, never raised.
    """
    start = time.perf_counter()
    gcm = load_gcm(cfg.type)
    if engine is None:
        engine = LocalizationEngine(WeylGroup(build_realization(gcm)))
    W = engine.W
    Y = gcm.indices(cfg.Y)
    parabolic_type(W.rd, Y)  # raises LeviNotFiniteType
    L = cfg.max_length
    points = _parabolic_points(engine, Y, L)
    if cfg.pairs is None:
        pairs = [(u, v) for k, u in enumerate(points) for v in points[k:]]
    else:
        pairs = []
        for a, b in cfg.pairs:
            u, v = W.parse(a), W.parse(b)
            _require_WP(W, Y, u, v)
            pairs.append((u, v))
    shadow = cfg.shadow if cfg.shadow is not None else L <= 6
    primary, other = parabolic_constants_cosets, parabolic_constants_pullback
    if cfg.route == "pullback":
        primary, other = other, primary

    entries: list[ScanEntry] = []
    errors = []
    mismatches = []
    for u, v in pairs:
        try:
            table = primary(engine, u, v, Y, L)
            if shadow:
                check = other(engine, u, v, Y, L)
                for w in sorted(set(table.entries) | set(check.entries), key=WeylElement.sort_key):
                    if table.get(w) != check.get(w):
                        mismatches.append((u, v, w))
        except KMKError as exc:
            errors.append((u, v, f"{type(exc).__name__}: {exc}"))
            continue
        for w, d in table.ordered():
            if tamper is not None:
                d = tamper(u, v, w, d)
            entries.append(_check_constant(u, v, w, d))
    entries.sort(key=ScanEntry.sort_key)
    key = lambda t: tuple(x.sort_key() for x in t[:3] if isinstance(x, WeylElement))
    mismatches.sort(key=key)
    errors.sort(key=key)
    stats = {
        "pairs": len(pairs),
        "interval_size": len(points),
        "shadow": shadow,
        "seconds": time.perf_counter() - start,
    }
    return ScanReport(cfg, gcm.labels, entries, errors, mismatches, stats)
