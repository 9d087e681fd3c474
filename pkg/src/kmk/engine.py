"""
Fixed-point localization of the ideal-sheaf basis.

Conventions (checked by ``verify_conventions`` before any table is emitted):

* Demazure generator ``y_i = a_i d_e + b_i d_{s_i}`` in the twisted group
  algebra ``d_x f = (x.f) d_x``, with ``a_i = 1/(1-e^{-a_i})`` and
  ``b_i = -e^{-a_i}/(1-e^{-a_i})``; as an operator
  ``D_i f = (f - e^{-a_i} s_i f)/(1 - e^{-a_i})``.
* ``y_v = sum_x c[x, v] d_x`` along a reduced word of v.
* The restriction of the ideal-sheaf class at a fixed point is
  ``phi^w(x) = iota(C^{-1}[w, x])``, iota negating exponents.

On the rank-1 flag variety these give ``phi^e = (1, e^{-a})`` and
``phi^s = (0, 1-e^{-a})``:

>>> from kmk.rootdatum import build_realization, preset
>>> from kmk.weyl import WeylGroup
>>> eng = LocalizationEngine(WeylGroup(build_realization(preset("A1"))))
>>> s = eng.W.s(0)
>>> [eng.phi_value(eng.W.e, x).format() for x in (eng.W.e, s)]
['1', 'e^{-a1}']
>>> [eng.phi_value(s, x).format() for x in (eng.W.e, s)]
['0', '1-e^{-a1}']
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping

from .errors import (DictionaryPinFailure, NonClearingEntry, NotAReflection,
                     NotFiniteType, ResidueNotPolynomial)
from .ring import RTElement, RTFraction
from .rootdatum import build_realization, preset
from .weyl import BruhatInterval, WeylElement, WeylGroup

__all__ = [
    "ENGINE_VERSION", "CONVENTIONS", "convention_fingerprint",
    "TwistedElement", "demazure_generator",
    "GKMFunction", "ConstantTable", "LocalizationEngine",
    "thin_structure_sheaf", "ab_pairing", "positive_roots",
    "duality_oracle", "rank_one_pin", "verify_conventions", "ensure_conventions",
    "reflection_pairs", "gkm_divisible",
]

ENGINE_VERSION = "1.0"

CONVENTIONS = {
    "demazure": "D_i f = (f - e^{-a_i} s_i f)/(1 - e^{-a_i})",
    "twist": "d_x f = (x.f) d_x",
    "dictionary": "phi^w(x) = iota((C^{-1})[w,x])",
    "pairing_denominator": "prod_{b>0} (1 - e^{x b})",
    "x_variables": "x_i = e^{-a_i} - 1",
}


def convention_fingerprint() -> str:
    blob = json.dumps({"engine": ENGINE_VERSION, **CONVENTIONS}, sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _root_binomials(roots, negate: bool = False) -> RTElement:
    """prod (1 - e^{+-beta})."""
    roots = list(roots)
    n = len(roots[0]) if roots else None
    out = None
    for b in roots:
        mu = tuple(-x for x in b) if negate else tuple(b)
        out = RTElement.binomial(mu) if out is None else out.times_binomial(mu)
    return out


class TwistedElement:
    """sum_x c_x d_x with d_x f = (x.f) d_x."""

    def __init__(self, group: WeylGroup, support: Mapping[WeylElement, RTFraction] | None = None):
        self.group = group
        self.support: dict[WeylElement, RTFraction] = {}
        for x, c in (support or {}).items():
            c = RTFraction.lift(c)
            if not c.is_zero():
                self.support[x] = c

    def __add__(self, other: "TwistedElement") -> "TwistedElement":
        out = dict(self.support)
        for x, c in other.support.items():
            out[x] = out[x] + c if x in out else c
        return TwistedElement(self.group, out)

    def __mul__(self, other: "TwistedElement") -> "TwistedElement":
        W = self.group
        out: dict[WeylElement, RTFraction] = {}
        for x, f in self.support.items():
            for y, g in other.support.items():
                xy = W.mul(x, y)
                term = f * g.act(x.matrix)
                out[xy] = out[xy] + term if xy in out else term
        return TwistedElement(W, {x: c.reduce() for x, c in out.items()})

    def apply(self, f) -> RTFraction:
        """Act on f in Q(T) as the operator sum_x c_x (x.f)."""
        f = RTFraction.lift(f)
        total = RTFraction.zero(self.group.n)
        for x, c in self.support.items():
            total = total + c * f.act(x.matrix)
        return total.reduce()

    def __eq__(self, other):
        if not isinstance(other, TwistedElement):
            return NotImplemented
        keys = set(self.support) | set(other.support)
        zero = RTFraction.zero(self.group.n)
        return all(self.support.get(k, zero) == other.support.get(k, zero) for k in keys)

    __hash__ = None


def _gen_coeffs(n: int, i: int) -> tuple[RTFraction, RTFraction]:
    neg = tuple(-int(k == i) for k in range(n))
    a = RTFraction.binomial_inverse(neg)
    b = RTFraction(-RTElement.monomial(neg), {neg: 1})
    return a, b


def demazure_generator(W: WeylGroup, i: int) -> TwistedElement:
    a, b = _gen_coeffs(W.n, i)
    return TwistedElement(W, {W.e: a, W.s(i): b})


@dataclass
class GKMFunction:
    """A localized class: fixed point -> value, over a finite set of points."""

    label: WeylElement | None
    kind: str  # "phi" | "psi" | "thin" | "generic"
    values: dict[WeylElement, RTElement]

    def __call__(self, x: WeylElement) -> RTElement:
        return self.values[x]

    def __mul__(self, other: "GKMFunction") -> "GKMFunction":
        keys = [x for x in self.values if x in other.values]
        return GKMFunction(None, "generic", {x: self.values[x] * other.values[x] for x in keys})

    def __add__(self, other: "GKMFunction") -> "GKMFunction":
        keys = [x for x in self.values if x in other.values]
        return GKMFunction(None, "generic", {x: self.values[x] + other.values[x] for x in keys})

    def __sub__(self, other: "GKMFunction") -> "GKMFunction":
        keys = [x for x in self.values if x in other.values]
        return GKMFunction(None, "generic", {x: self.values[x] - other.values[x] for x in keys})

    def __eq__(self, other):
        if not isinstance(other, GKMFunction):
            return NotImplemented
        return self.values.keys() == other.values.keys() and all(
            self.values[x] == other.values[x] for x in self.values)

    __hash__ = None

    def support(self) -> list[WeylElement]:
        return [x for x, v in self.values.items() if not v.is_zero()]


@dataclass
class ConstantTable:
    """Structure constants d^w_{u,v} for all w of length <= L (nonzero ones only)."""

    u: WeylElement
    v: WeylElement
    Y: frozenset[int]
    L: int
    entries: dict[WeylElement, RTElement]
    route: str  # "borel" | "coset-sum" | "pullback"

    def get(self, w: WeylElement) -> RTElement:
        hit = self.entries.get(w)
        return hit if hit is not None else RTElement.zero(self.u.group.n)

    def ordered(self) -> list[tuple[WeylElement, RTElement]]:
        return sorted(self.entries.items(), key=lambda kv: kv[0].sort_key())

    def same_entries(self, other: "ConstantTable", L: int | None = None) -> bool:
        L = min(self.L, other.L) if L is None else L
        ws = {w for w in self.entries if w.length <= L} | {w for w in other.entries if w.length <= L}
        return all(self.get(w) == other.get(w) for w in ws)


class LocalizationEngine:
    """C-matrix columns, the phi restriction table and Borel structure constants.

    Everything is memoized per Weyl element, so asking for a larger length
    cap only computes the new columns.
    """

    def __init__(self, W: WeylGroup, check_conventions: bool = True):
        if check_conventions:
            ensure_conventions()
        self.W = W
        self.n = W.n
        self._interval: BruhatInterval | None = None
        self._cols: dict[WeylElement, dict[WeylElement, RTFraction]] = {W.e: {W.e: RTFraction.one(W.n)}}
        self._phi: dict[WeylElement, dict[WeylElement, RTElement]] = {}
        self._consts: dict[tuple[WeylElement, WeylElement], tuple[int, dict[WeylElement, RTElement]]] = {}
        self._gen = [_gen_coeffs(W.n, i) for i in range(W.n)]

    # -- intervals -----------------------------------------------------------------

    def interval(self, L: int) -> BruhatInterval:
        if self._interval is None or self._interval.bound < L:
            self._interval = self.W.enumerate_interval(L)
        return self._interval

    def below(self, x: WeylElement) -> list[WeylElement]:
        return self.interval(x.length).below(x)

    def elements(self, L: int) -> list[WeylElement]:
        return [w for w in self.interval(L).elements if w.length <= L]

    # -- C matrix ------------------------------------------------------------------

    def _right_multiply(self, col: Mapping[WeylElement, RTFraction], i: int) -> dict[WeylElement, RTFraction]:
        W = self.W
        a, b = self._gen[i]
        out: dict[WeylElement, RTFraction] = {}
        for x, f in col.items():
            xs = W.right_mul_simple(x, i)
            t1 = f * a.act(x.matrix)
            t2 = f * b.act(x.matrix)
            out[x] = out[x] + t1 if x in out else t1
            out[xs] = out[xs] + t2 if xs in out else t2
        return {x: c.reduce() for x, c in out.items() if not c.is_zero()}

    def c_column(self, v: WeylElement) -> dict[WeylElement, RTFraction]:
        """Coefficients c[x, v] of y_v = sum_x c[x, v] d_x."""
        hit = self._cols.get(v)
        if hit is not None:
            return hit
        i = v.word[-1]
        parent = self.W.right_mul_simple(v, i)
        col = self._right_multiply(self.c_column(parent), i)
        col = {x: c for x, c in col.items() if not c.is_zero()}
        self._cols[v] = col
        return col

    def c_column_from_word(self, word: Iterable[int]) -> dict[WeylElement, RTFraction]:
        col = {self.W.e: RTFraction.one(self.n)}
        for i in word:
            col = self._right_multiply(col, i)
        return col

    def c_matrix(self, L: int) -> dict[tuple[WeylElement, WeylElement], RTFraction]:
        out = {}
        for v in self.elements(L):
            for x, c in self.c_column(v).items():
                out[(x, v)] = c
        return out

    # -- phi table -----------------------------------------------------------------

    def phi_column(self, x: WeylElement) -> dict[WeylElement, RTElement]:
        """phi^w(x) for every w <= x, by back-substitution in column x of C^{-1}."""
        hit = self._phi.get(x)
        if hit is not None:
            return hit
        W = self.W
        below = self.below(x)
        inv = {}
        top = _root_binomials([r.coords for r in W.inversion_set(x)])
        inv[x] = top if top is not None else RTElement.one(self.n)
        for u in reversed(below[:-1]):
            acc = RTFraction.zero(self.n)
            for v, d in inv.items():
                c = self.c_column(v).get(u)
                if c is not None:
                    acc = acc + c * d
            if acc.is_zero():
                continue
            # 1/c[u,u] = prod_{beta in Inv(u)} (1 - e^beta)
            for r in W.inversion_set(u):
                acc = _times_binomial(acc, r.coords)
            try:
                inv[u] = (-acc).clear()
            except NonClearingEntry as exc:
                raise NonClearingEntry(f"C^-1[{u},{x}] is not in R(T): {exc}") from None
        col = {w: inv[w].iota() for w in below if w in inv}
        self._phi[x] = col
        return col

    def phi_value(self, w: WeylElement, x: WeylElement) -> RTElement:
        return self.phi_column(x).get(w) or RTElement.zero(self.n)

    def phi_function(self, w: WeylElement, L: int) -> GKMFunction:
        return GKMFunction(w, "phi", {x: self.phi_value(w, x) for x in self.elements(L)})

    def phi_table(self, L: int) -> dict[WeylElement, GKMFunction]:
        return {w: self.phi_function(w, L) for w in self.elements(L)}

    def upper_set_class(self, S: Iterable[WeylElement], L: int) -> GKMFunction:
        """Class of the union of X^s, s in S: the sum of phi^v over the upper set."""
        S = list(S)
        W = self.W
        values = {}
        for x in self.elements(L):
            col = self.phi_column(x)
            tot = RTElement.zero(self.n)
            for v, val in col.items():
                if any(W.bruhat_leq(s, v) for s in S):
                    tot = tot + val
            values[x] = tot
        label = S[0] if len(S) == 1 else None
        return GKMFunction(label, "psi" if len(S) == 1 else "generic", values)

    def psi_function(self, w: WeylElement, L: int) -> GKMFunction:
        return self.upper_set_class([w], L)

    # -- structure constants ---------------------------------------------------------

    def product_constants(self, u: WeylElement, v: WeylElement, L: int) -> ConstantTable:
        """d^w_{u,v}(B) for l(w) <= L via the triangular solve in Bruhat order."""
        if u.length > L or v.length > L:
            raise ValueError("l(u), l(v) must not exceed the length cap")
        key = (u, v) if u.sort_key() <= v.sort_key() else (v, u)
        done, entries = self._consts.get(key, (-1, {}))
        if done < L:
            entries = dict(entries)
            W = self.W
            for x in self.elements(L):
                if x.length <= done:
                    continue
                if not (W.bruhat_leq(u, x) and W.bruhat_leq(v, x)):
                    continue
                col = self.phi_column(x)
                rhs = col.get(u, RTElement.zero(self.n)) * col.get(v, RTElement.zero(self.n))
                for w, d in entries.items():
                    if w != x and w in col:
                        rhs = rhs - d * col[w]
                if rhs.is_zero():
                    continue
                frac = RTFraction(rhs, _count(tuple(-c for c in r.coords) for r in W.inversion_set(x)))
                try:
                    d = frac.clear()
                except NonClearingEntry as exc:
                    raise NonClearingEntry(f"d^{x}_{{{u},{v}}} does not clear: {exc}") from None
                if not d.is_zero():
                    entries[x] = d
            self._consts[key] = (L, entries)
        return ConstantTable(u, v, frozenset(), L,
                             {w: d for w, d in entries.items() if w.length <= L}, "borel")


def _count(mus) -> dict:
    out: dict = {}
    for mu in mus:
        out[mu] = out.get(mu, 0) + 1
    return out


def _times_binomial(f: RTFraction, mu) -> RTFraction:
    """f * (1 - e^mu), cancelling against a matching denominator factor when present."""
    mu = tuple(mu)
    probe = RTFraction(RTElement.one(len(mu)), {mu: 1})
    canon = next(iter(probe.den))
    k = f.den.get(canon, 0)
    if k:
        den = dict(f.den)
        if k == 1:
            del den[canon]
        else:
            den[canon] = k - 1
        if canon == mu:
            return RTFraction._raw(f.num, den)
        # mu = -canon: 1 - e^{-c} = -e^{-c} (1 - e^{c})
        return RTFraction._raw(-f.num.shift(tuple(-x for x in canon)), den)
    return RTFraction._raw(f.num.times_binomial(mu), dict(f.den))


# -- finite-type oracle ----------------------------------------------------------------

def _full_group(W: WeylGroup) -> list[WeylElement]:
    if not W.rd.is_finite:
        raise NotFiniteType("the duality oracle needs a finite Weyl group")
    levels = W.elements_up_to(10 ** 6)
    return [w for lev in levels for w in lev]


def positive_roots(W: WeylGroup) -> list[tuple[int, ...]]:
    elems = _full_group(W)
    w0 = elems[-1]
    return [r.coords for r in W.inversion_set(w0)]


def thin_structure_sheaf(W: WeylGroup, w: WeylElement, _memo: dict | None = None) -> GKMFunction:
    """Localization of the structure sheaf of the Schubert variety X_w (finite type).

    h_e(x) = [x = e] prod_{b>0} (1 - e^b);  h_{ws_i} = Dhat_i h_w for ws_i > w with
    (Dhat_i h)(x) = h(x)/(1 - e^{x a_i}) + h(x s_i)/(1 - e^{-x a_i}).
    """
    elems = _full_group(W)
    memo = _memo if _memo is not None else {}
    if w in memo:
        return memo[w]
    n = W.n
    if w.length == 0:
        top = _root_binomials(positive_roots(W)) or RTElement.one(n)
        vals = {x: (top if x == W.e else RTElement.zero(n)) for x in elems}
        res = GKMFunction(w, "thin", vals)
        memo[w] = res
        return res
    i = w.word[-1]
    prev = thin_structure_sheaf(W, W.right_mul_simple(w, i), memo)
    vals = {}
    for x in elems:
        xa = x(W.simple_root(i))
        f = RTFraction(prev.values[x], {xa: 1}) + RTFraction(
            prev.values[W.right_mul_simple(x, i)], {tuple(-c for c in xa): 1})
        try:
            vals[x] = f.clear()
        except NonClearingEntry as exc:
            raise NonClearingEntry(f"thin class of {w} at {x}: {exc}") from None
    res = GKMFunction(w, "thin", vals)
    memo[w] = res
    return res


def ab_pairing(W: WeylGroup, S: GKMFunction, F: GKMFunction) -> RTElement:
    """sum_x S(x) F(x) / prod_{b>0} (1 - e^{x b}), which must be in R(T)."""
    roots = positive_roots(W)
    total = RTFraction.zero(W.n)
    for x, fx in F.values.items():
        if fx.is_zero():
            continue
        sx = S.values.get(x)
        if sx is None or sx.is_zero():
            continue
        total = total + RTFraction(sx * fx, _count(x(b) for b in roots))
    try:
        return total.clear()
    except NonClearingEntry as exc:
        raise ResidueNotPolynomial(str(exc)) from None


def duality_oracle(W: WeylGroup, engine: LocalizationEngine | None = None) -> list[tuple[WeylElement, WeylElement, RTElement]]:
    """Pairings <phi^u, [O_{X_v}]> that differ from delta_{u,v} (empty list = pass)."""
    engine = engine or LocalizationEngine(W, check_conventions=False)
    elems = _full_group(W)
    L = elems[-1].length
    memo: dict = {}
    bad = []
    for u in elems:
        phi_u = engine.phi_function(u, L)
        for v in elems:
            val = ab_pairing(W, phi_u, thin_structure_sheaf(W, v, memo))
            want = RTElement.one(W.n) if u == v else RTElement.zero(W.n)
            if val != want:
                bad.append((u, v, val))
    return bad


def rank_one_pin(engine: LocalizationEngine | None = None) -> list[str]:
    """Compare the rank-1 phi table with its hand-derived values (empty list = pass)."""
    if engine is None:
        engine = LocalizationEngine(WeylGroup(build_realization(preset("A1"))), check_conventions=False)
    W = engine.W
    e, s = W.e, W.s(0)
    one = RTElement.one(1)
    q = RTElement.monomial((-1,))
    want = {
        (e, e): one, (e, s): q,
        (s, e): RTElement.zero(1), (s, s): one - q,
    }
    problems = []
    for (w, x), val in want.items():
        got = engine.phi_value(w, x)
        if got != val:
            problems.append(f"phi^{w}({x}) = {got.format()}, expected {val.format()}")
    return problems


@lru_cache(maxsize=None)
def verify_conventions(types: tuple[str, ...] = ("A1", "A2")) -> tuple[str, ...]:
    """Run the rank-1 pin and the duality oracle; return failure messages."""
    problems = list(rank_one_pin())
    for name in types:
        W = WeylGroup(build_realization(preset(name)))
        for u, v, val in duality_oracle(W):
            problems.append(f"{name}: <phi^{u}, O_X_{v}> = {val.format()}")
    return tuple(problems)


def ensure_conventions() -> None:
    problems = verify_conventions()
    if problems:
        raise DictionaryPinFailure("; ".join(problems))


# -- GKM condition -------------------------------------------------------------------

def reflection_pairs(W: WeylGroup, points: Iterable[WeylElement]) -> list[tuple[WeylElement, WeylElement, tuple[int, ...]]]:
    """Pairs (x, y = s_beta x) among ``points`` with l(x) < l(y), plus beta."""
    pts = sorted(points, key=WeylElement.sort_key)
    out = []
    for a, x in enumerate(pts):
        for y in pts[a + 1:]:
            if (y.length - x.length) % 2 == 0:
                continue
            try:
                beta = W.reflection_root(W.mul(y, W.inverse(x)))
            except NotAReflection:
                continue
            out.append((x, y, beta.coords))
    return out


def gkm_divisible(W: WeylGroup, f: GKMFunction, pairs=None) -> list[tuple[WeylElement, WeylElement]]:
    """Edges where f(x) - f(s_beta x) is not divisible by (1 - e^beta) (empty = pass)."""
    pairs = reflection_pairs(W, f.values) if pairs is None else pairs
    bad = []
    for x, y, beta in pairs:
        diff = f.values[x] - f.values[y]
        if diff.divide_binomial(beta) is None:
            bad.append((x, y))
    return bad
