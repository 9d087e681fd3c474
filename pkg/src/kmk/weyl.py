"""
Weyl group arithmetic for symmetrizable Kac-Moody root data.

An element is identified by the integer matrix of its action on the root
lattice (columns are the images of the simple roots). That action is
faithful, so matrices serve as hash keys; the ShortLex-minimal reduced word
is recovered greedily from left descents.

>>> from kmk.rootdatum import build_realization, preset
>>> W = WeylGroup(build_realization(preset("A2")))
>>> W.parse("s1*s2*s1") == W.parse("s2*s1*s2")
True
>>> print(W.parse("s2*s1*s2"))
s1*s2*s1
>>> W.parse("s1*s1") == W.e
True
>>> [str(w) for w in W.enumerate_interval(2, Y=W.rd.gcm.indices([2]))]
['e', 's1', 's2*s1']
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from math import gcd
from typing import Iterable, Iterator, Sequence

from .errors import IntervalTooLarge, NotAReflection
from .rootdatum import RootDatum

__all__ = ["WeylElement", "WeylGroup", "BruhatInterval", "RealRoot", "DEFAULT_ELEMENT_CAP"]

Matrix = tuple[tuple[int, ...], ...]
Vector = tuple[int, ...]

DEFAULT_ELEMENT_CAP = 20000


def _matmul(a: Matrix, b: Matrix) -> Matrix:
    cols = list(zip(*b))
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in cols) for row in a)


def _matvec(a: Matrix, v: Sequence[int]) -> Vector:
    return tuple(sum(x * y for x, y in zip(row, v)) for row in a)


def _is_negative(v: Sequence[int]) -> bool:
    # v is a real root, so one nonzero coordinate decides the sign
    for x in v:
        if x:
            return x < 0
    return False


@dataclass(frozen=True, eq=False)
class WeylElement:
    word: tuple[int, ...]
    matrix: Matrix
    inverse_matrix: Matrix = field(repr=False)
    group: "WeylGroup" = field(repr=False)

    def __eq__(self, other):
        if not isinstance(other, WeylElement):
            return NotImplemented
        return self.matrix == other.matrix

    def __hash__(self):
        return hash(self.matrix)

    def __len__(self):
        return len(self.word)

    @property
    def length(self) -> int:
        return len(self.word)

    def __mul__(self, other: "WeylElement") -> "WeylElement":
        return self.group.mul(self, other)

    def inverse(self) -> "WeylElement":
        return self.group.inverse(self)

    def __call__(self, root: Sequence[int]) -> Vector:
        """Act on a root-lattice vector."""
        return _matvec(self.matrix, root)

    def __str__(self):
        return self.group.format(self)

    def sort_key(self) -> tuple:
        return (len(self.word), self.word)


@dataclass(frozen=True)
class RealRoot:
    coords: Vector

    @property
    def positive(self) -> bool:
        return not _is_negative(self.coords)

    def __neg__(self):
        return RealRoot(tuple(-x for x in self.coords))


class WeylGroup:
    """The Weyl group of a root datum, with memoized Bruhat comparisons."""

    def __init__(self, rd: RootDatum, element_cap: int = DEFAULT_ELEMENT_CAP):
        self.rd = rd
        self.gcm = rd.gcm
        self.n = rd.n
        self.element_cap = element_cap
        a = self.gcm.entries
        n = self.n
        self._simple = tuple(
            tuple(tuple((1 if r == j else 0) - (a[i][j] if r == i else 0) for j in range(n))
                  for r in range(n))
            for i in range(n)
        )
        ident = tuple(tuple(int(r == c) for c in range(n)) for r in range(n))
        self._interned: dict[Matrix, WeylElement] = {}
        self.e = self._element(ident, ident)
        self.simple_reflections = tuple(self._element(s, s) for s in self._simple)
        self._leq_memo: dict[tuple[WeylElement, WeylElement], bool] = {}

    # -- construction ---------------------------------------------------------

    def _element(self, m: Matrix, minv: Matrix) -> WeylElement:
        hit = self._interned.get(m)
        if hit is not None:
            return hit
        word = []
        cur, cur_inv = m, minv
        while True:
            # smallest left descent: w^{-1} alpha_i < 0
            cols = list(zip(*cur_inv))
            i = next((k for k in range(self.n) if _is_negative(cols[k])), None)
            if i is None:
                break
            word.append(i)
            cur = _matmul(self._simple[i], cur)
            cur_inv = _matmul(cur_inv, self._simple[i])
        el = WeylElement(tuple(word), m, minv, self)
        self._interned[m] = el
        return el

    def canonicalize(self, word: Iterable[int]) -> WeylElement:
        word = list(word)
        n = self.n
        m = self.e.matrix
        for i in word:
            if not 0 <= i < n:
                raise ValueError(f"simple reflection index {i} out of range")
            m = _matmul(m, self._simple[i])
        minv = self.e.matrix
        for i in reversed(word):
            minv = _matmul(minv, self._simple[i])
        return self._element(m, minv)

    def s(self, i: int) -> WeylElement:
        return self.simple_reflections[i]

    def mul(self, u: WeylElement, v: WeylElement) -> WeylElement:
        return self._element(_matmul(u.matrix, v.matrix), _matmul(v.inverse_matrix, u.inverse_matrix))

    def inverse(self, w: WeylElement) -> WeylElement:
        return self._element(w.inverse_matrix, w.matrix)

    def right_mul_simple(self, w: WeylElement, i: int) -> WeylElement:
        s = self._simple[i]
        return self._element(_matmul(w.matrix, s), _matmul(s, w.inverse_matrix))

    def left_mul_simple(self, i: int, w: WeylElement) -> WeylElement:
        s = self._simple[i]
        return self._element(_matmul(s, w.matrix), _matmul(w.inverse_matrix, s))

    # -- parsing and printing ---------------------------------------------------

    _token = re.compile(r"s_?\{?(-?\d+)\}?")

    def parse(self, text: str) -> WeylElement:
        """Parse ``"e"``, ``"s1*s0*s1"``, ``"s1 s2"`` (node labels, not indices)."""
        t = text.strip()
        if t in ("", "e", "1", "id"):
            return self.e
        parts = [p for p in re.split(r"[*\s,.]+", t) if p]
        word = []
        for p in parts:
            m = self._token.fullmatch(p)
            if not m:
                raise ValueError(f"cannot parse Weyl word {text!r}")
            word.append(self.gcm.index(int(m.group(1))))
        return self.canonicalize(word)

    def format(self, w: WeylElement) -> str:
        if not w.word:
            return "e"
        return "*".join(f"s{self.gcm.labels[i]}" for i in w.word)

    # -- descents, action, roots -----------------------------------------------

    def is_right_descent(self, w: WeylElement, i: int) -> bool:
        return _is_negative(tuple(row[i] for row in w.matrix))

    def is_left_descent(self, w: WeylElement, i: int) -> bool:
        return _is_negative(tuple(row[i] for row in w.inverse_matrix))

    def simple_root(self, i: int) -> Vector:
        return tuple(int(k == i) for k in range(self.n))

    def act(self, w: WeylElement, root: Sequence[int]) -> Vector:
        return _matvec(w.matrix, root)

    def act_weight(self, w: WeylElement, weight: Sequence[int]) -> Vector:
        """Action on the weight lattice of the realization."""
        lam = tuple(weight)
        for i in reversed(w.word):
            lam = self.rd.reflect_weight(i, lam)
        return lam

    def coroot_pairing(self, root: Sequence[int], i: int) -> int:
        """<beta, alpha_i^v> for a root-lattice vector beta."""
        return sum(b * self.gcm.entries[i][j] for j, b in enumerate(root))

    def inversion_set(self, w: WeylElement) -> list[RealRoot]:
        """Positive roots made negative by w^{-1}, in reduced-word order."""
        out = []
        prefix = self.e.matrix
        for i in w.word:
            out.append(RealRoot(tuple(row[i] for row in prefix)))
            prefix = _matmul(prefix, self._simple[i])
        return out

    def reflection(self, beta: Sequence[int]) -> WeylElement:
        """The reflection s_beta of a positive real root."""
        beta = tuple(beta)
        if _is_negative(beta):
            beta = tuple(-x for x in beta)
        path = []
        cur = beta
        while sum(cur) != 1 or any(x < 0 for x in cur):
            if any(x < 0 for x in cur) or not any(cur):
                raise NotAReflection(f"{beta} is not a positive real root")
            i = next((k for k in range(self.n) if self.coroot_pairing(cur, k) > 0), None)
            if i is None:
                raise NotAReflection(f"{beta} is not a real root")
            c = self.coroot_pairing(cur, i)
            cur = tuple(x - (c if k == i else 0) for k, x in enumerate(cur))
            path.append(i)
        m = cur.index(1)
        return self.canonicalize(path + [m] + path[::-1])

    def reflection_root(self, t: WeylElement) -> RealRoot:
        """The positive real root beta with t = s_beta."""
        for j in range(self.n):
            col = tuple(row[j] for row in t.matrix)
            diff = tuple(int(k == j) - x for k, x in enumerate(col))
            if not any(diff):
                continue
            g = 0
            for x in diff:
                g = gcd(g, x)
            beta = tuple(x // g for x in diff)
            if _is_negative(beta):
                beta = tuple(-x for x in beta)
            if any(x < 0 for x in beta):
                raise NotAReflection(f"{t} moves alpha_{j} off a root line")
            if self.reflection(beta) != t:
                raise NotAReflection(f"{t} is not a reflection")
            return RealRoot(beta)
        raise NotAReflection("the identity is not a reflection")

    # -- Bruhat order -------------------------------------------------------------

    def bruhat_leq(self, u: WeylElement, v: WeylElement) -> bool:
        if u.length > v.length:
            return False
        if u.length == v.length:
            return u == v
        if u.length == 0:
            return True
        key = (u, v)
        hit = self._leq_memo.get(key)
        if hit is not None:
            return hit
        i = v.word[0]
        sv = self.left_mul_simple(i, v)
        if self.is_left_descent(u, i):
            res = self.bruhat_leq(self.left_mul_simple(i, u), sv)
        else:
            res = self.bruhat_leq(u, sv)
        self._leq_memo[key] = res
        return res

    # -- parabolic structure ------------------------------------------------------

    def in_WP(self, w: WeylElement, Y: Iterable[int]) -> bool:
        return not any(self.is_right_descent(w, i) for i in Y)

    def min_coset_rep(self, w: WeylElement, Y: Iterable[int]) -> WeylElement:
        Y = sorted(Y)
        while True:
            i = next((k for k in Y if self.is_right_descent(w, k)), None)
            if i is None:
                return w
            w = self.right_mul_simple(w, i)

    def parabolic_subgroup(self, Y: Iterable[int]) -> list[WeylElement]:
        Y = sorted(Y)
        seen = {self.e}
        frontier = [self.e]
        while frontier:
            nxt = []
            for w in frontier:
                for i in Y:
                    x = self.right_mul_simple(w, i)
                    if x not in seen:
                        seen.add(x)
                        nxt.append(x)
                        if len(seen) > self.element_cap:
                            raise IntervalTooLarge("parabolic subgroup exceeds element cap")
            frontier = nxt
        return sorted(seen, key=WeylElement.sort_key)

    def longest_length(self, Y: Iterable[int]) -> int:
        return max(w.length for w in self.parabolic_subgroup(Y))

    def coset(self, u: WeylElement, Y: Iterable[int]) -> list[WeylElement]:
        return sorted((self.mul(u, x) for x in self.parabolic_subgroup(Y)), key=WeylElement.sort_key)

    # -- intervals ----------------------------------------------------------------

    def elements_up_to(self, L: int) -> list[list[WeylElement]]:
        """Elements grouped by length 0..L (BFS over right multiplication)."""
        if L < 0:
            raise ValueError("length cap must be nonnegative")
        levels = [[self.e]]
        total = 1
        for _ in range(L):
            seen = set()
            nxt = []
            for w in levels[-1]:
                for i in range(self.n):
                    if not self.is_right_descent(w, i):
                        x = self.right_mul_simple(w, i)
                        if x not in seen:
                            seen.add(x)
                            nxt.append(x)
            total += len(nxt)
            if total > self.element_cap:
                raise IntervalTooLarge(f"more than {self.element_cap} elements of length <= {L}")
            if not nxt:
                break
            levels.append(sorted(nxt, key=WeylElement.sort_key))
        return levels

    def enumerate_interval(self, L: int, Y: Iterable[int] | None = None) -> "BruhatInterval":
        levels = self.elements_up_to(L)
        elems = [w for lev in levels for w in lev]
        Yset = frozenset(Y) if Y is not None else frozenset()
        if Yset:
            elems = [w for w in elems if self.in_WP(w, Yset)]
        return BruhatInterval(self, L, Yset, elems)

    def covers_in_WP(self, w: WeylElement, Y: Iterable[int] = (),
                     interval: "BruhatInterval | None" = None) -> list[tuple[WeylElement, RealRoot]]:
        """Upper covers v of w inside W^P, each with beta such that s_beta w = v."""
        Y = frozenset(Y)
        if interval is None or interval.bound < w.length + 1:
            interval = self.enumerate_interval(w.length + 1, Y)
        out = []
        for v in interval.elements:
            if v.length == w.length + 1 and self.in_WP(v, Y) and self.bruhat_leq(w, v):
                t = self.mul(v, self.inverse(w))
                out.append((v, self.reflection_root(t)))
        return out

    def reduced_words(self, w: WeylElement) -> list[tuple[int, ...]]:
        """All reduced words of w (exponential; for tests on small elements)."""
        if not w.word:
            return [()]
        out = []
        for i in range(self.n):
            if self.is_left_descent(w, i):
                for rest in self.reduced_words(self.left_mul_simple(i, w)):
                    out.append((i,) + rest)
        return out


@dataclass
class BruhatInterval:
    """Elements of length <= bound (optionally only those in W^P), Bruhat-ordered."""

    group: WeylGroup
    bound: int
    Y: frozenset[int]
    elements: list[WeylElement]
    index: dict[WeylElement, int] = field(init=False, repr=False)
    _below: dict[WeylElement, list[WeylElement]] = field(init=False, repr=False, default_factory=dict)

    def __post_init__(self):
        self.index = {w: k for k, w in enumerate(self.elements)}

    def __len__(self):
        return len(self.elements)

    def __iter__(self) -> Iterator[WeylElement]:
        return iter(self.elements)

    def __contains__(self, w) -> bool:
        return w in self.index

    def leq(self, u: WeylElement, v: WeylElement) -> bool:
        return self.group.bruhat_leq(u, v)

    def below(self, x: WeylElement) -> list[WeylElement]:
        """Interval elements y <= x, in increasing (length, word) order."""
        hit = self._below.get(x)
        if hit is None:
            hit = [y for y in self.elements if y.length <= x.length and self.group.bruhat_leq(y, x)]
            self._below[x] = hit
        return hit

    def above(self, x: WeylElement) -> list[WeylElement]:
        return [y for y in self.elements if y.length >= x.length and self.group.bruhat_leq(x, y)]

    def covers(self, w: WeylElement) -> list[WeylElement]:
        return [v for v in self.elements if v.length == w.length + 1 and self.group.bruhat_leq(w, v)]
