"""
Exact arithmetic in R(T) = Z[e^{+-alpha_1}, ..., e^{+-alpha_n}].

``RTElement`` is a Laurent polynomial keyed by root-lattice exponent vectors.
``RTFraction`` keeps its denominator as a multiset of binomials
``(1 - e^mu)^k``; each ``mu`` is stored with its first nonzero coordinate
positive, the unit ``-e^mu`` produced by flipping an orientation being moved
into the numerator. ``XPolynomial`` is the expansion in ``x_i = e^{-alpha_i} - 1``.

>>> a = RTElement.monomial((1,))
>>> (a * a.iota()) == RTElement.one(1)
True
>>> f = RTFraction.binomial_inverse((1,)) + RTFraction(a.iota(), {(-1,): 1})
>>> f.is_zero()
True
>>> d = RTElement.one(1) - RTElement.monomial((-1,))
>>> print(d.format((1,)))
1-e^{-a1}
>>> print(to_x_polynomial(d).format())
-x1
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import NonClearingEntry, NotInPolynomialSubring

__all__ = [
    "RTElement", "RTFraction", "XPolynomial", "Verdict",
    "to_x_polynomial", "from_x_polynomial", "sign_verdict", "involution_iota",
    "SCHEMA_VERSION",
]

SCHEMA_VERSION = 1

Exp = tuple[int, ...]


def _orient(mu: Exp) -> tuple[Exp, bool]:
    """Return (canonical mu, flipped?)."""
    for x in mu:
        if x:
            if x > 0:
                return mu, False
            return tuple(-y for y in mu), True
    raise ValueError("binomial exponent must be nonzero")


def _matvec(m, v: Exp) -> Exp:
    return tuple(sum(a * b for a, b in zip(row, v)) for row in m)


class RTElement:
    """Finite sum of integer multiples of characters e^lambda."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Mapping[Exp, int] | None = None):
        self.n = n
        self.terms: dict[Exp, int] = {}
        if terms:
            for k, c in terms.items():
                if c:
                    self.terms[tuple(k)] = int(c)

    @classmethod
    def _raw(cls, n: int, terms: dict[Exp, int]) -> "RTElement":
        out = cls.__new__(cls)
        out.n = n
        out.terms = terms
        return out

    @classmethod
    def zero(cls, n: int) -> "RTElement":
        return cls._raw(n, {})

    @classmethod
    def one(cls, n: int) -> "RTElement":
        return cls._raw(n, {(0,) * n: 1})

    @classmethod
    def monomial(cls, exp: Sequence[int], coeff: int = 1) -> "RTElement":
        exp = tuple(exp)
        return cls._raw(len(exp), {exp: coeff} if coeff else {})

    @classmethod
    def binomial(cls, mu: Sequence[int]) -> "RTElement":
        """1 - e^mu."""
        mu = tuple(mu)
        n = len(mu)
        return cls.one(n) - cls.monomial(mu)

    # -- ring operations ---------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, int):
            other = RTElement.one(self.n) * other
        if not isinstance(other, RTElement):
            return NotImplemented
        t = dict(self.terms)
        for k, c in other.terms.items():
            v = t.get(k, 0) + c
            if v:
                t[k] = v
            else:
                t.pop(k, None)
        return RTElement._raw(self.n, t)

    __radd__ = __add__

    def __neg__(self):
        return RTElement._raw(self.n, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, int):
            other = RTElement.one(self.n) * other
        if not isinstance(other, RTElement):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            if not other:
                return RTElement.zero(self.n)
            return RTElement._raw(self.n, {k: c * other for k, c in self.terms.items()})
        if not isinstance(other, RTElement):
            return NotImplemented
        t: dict[Exp, int] = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                k = tuple(a + b for a, b in zip(k1, k2))
                v = t.get(k, 0) + c1 * c2
                if v:
                    t[k] = v
                else:
                    del t[k]
        return RTElement._raw(self.n, t)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __pow__(self, k: int):
        out = RTElement.one(self.n)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, int):
            other = RTElement.one(self.n) * other
        if not isinstance(other, RTElement):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def shift(self, mu: Exp) -> "RTElement":
        """Multiply by the monomial e^mu."""
        return RTElement._raw(self.n, {tuple(a + b for a, b in zip(k, mu)): c for k, c in self.terms.items()})

    def times_binomial(self, mu: Exp, k: int = 1) -> "RTElement":
        """Multiply by (1 - e^mu)^k."""
        out = self
        for _ in range(k):
            out = out - out.shift(mu)
        return out

    def divide_binomial(self, mu: Exp) -> "RTElement | None":
        """Exact quotient by (1 - e^mu), or None when it does not divide.

        Terms split into lines lambda + Z*mu; on each line the quotient is
        the running prefix sum, and divisibility means the line sums to 0.
        """
        if not self.terms:
            return self
        mu, flipped = _orient(tuple(mu))
        if flipped:
            # 1 - e^{-m} = -e^{-m} (1 - e^{m})
            q = self.divide_binomial(mu)
            return None if q is None else -q.shift(mu)
        p = next(i for i, x in enumerate(mu) if x)
        step = mu[p]
        lines: dict[Exp, dict[int, int]] = {}
        for lam, c in self.terms.items():
            t = lam[p] // step
            rep = tuple(a - t * b for a, b in zip(lam, mu))
            lines.setdefault(rep, {})[t] = c
        if any(sum(line.values()) for line in lines.values()):
            return None
        q: dict[Exp, int] = {}
        for rep, line in lines.items():
            acc = 0
            ts = sorted(line)
            for t, nxt in zip(ts, ts[1:]):
                acc += line[t]
                if acc:
                    for s in range(t, nxt):
                        q[tuple(a + s * b for a, b in zip(rep, mu))] = acc
        return RTElement._raw(self.n, q)

    def act(self, matrix) -> "RTElement":
        """Apply a linear map (Weyl group action) to every exponent."""
        return RTElement._raw(self.n, {_matvec(matrix, k): c for k, c in self.terms.items()})

    def iota(self) -> "RTElement":
        return RTElement._raw(self.n, {tuple(-x for x in k): c for k, c in self.terms.items()})

    def in_negative_subring(self) -> bool:
        """True iff every exponent is a nonpositive combination of simple roots."""
        return all(all(x <= 0 for x in k) for k in self.terms)

    # -- I/O ---------------------------------------------------------------------

    def sorted_terms(self) -> list[tuple[Exp, int]]:
        return sorted(self.terms.items(), key=lambda kc: (-sum(kc[0]), tuple(-x for x in kc[0])))

    def format(self, labels: Sequence[int] | None = None) -> str:
        if not self.terms:
            return "0"
        labels = labels or tuple(range(1, self.n + 1))
        out = []
        for k, c in self.sorted_terms():
            mono = _format_exponent(k, labels)
            if not mono:
                body = str(abs(c))
            elif abs(c) == 1:
                body = f"e^{{{mono}}}"
            else:
                body = f"{abs(c)}*e^{{{mono}}}"
            sign = "-" if c < 0 else ("+" if out else "")
            out.append(sign + body)
        return "".join(out)

    def __repr__(self):
        return f"RTElement({self.format()})"

    def to_json(self) -> dict:
        return {
            "version": SCHEMA_VERSION,
            "rank": self.n,
            "terms": [[list(k), c] for k, c in sorted(self.terms.items())],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "RTElement":
        if data.get("version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema version {data.get('version')!r}")
        return cls(int(data["rank"]), {tuple(k): c for k, c in data["terms"]})


def _format_exponent(k: Exp, labels: Sequence[int]) -> str:
    parts = []
    for x, lab in zip(k, labels):
        if not x:
            continue
        sign = "-" if x < 0 else ("+" if parts else "")
        mag = "" if abs(x) == 1 else str(abs(x))
        parts.append(f"{sign}{mag}a{lab}")
    return "".join(parts)


class RTFraction:
    """numerator / prod_mu (1 - e^mu)^k, mu canonically oriented.

    Arithmetic never reduces automatically; call ``reduce`` (cancel every
    binomial that divides the numerator) or ``clear`` (reduce and demand an
    RTElement) when a normal form is needed.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: RTElement, den: Mapping[Exp, int] | None = None):
        self.num = num
        self.den: dict[Exp, int] = {}
        if den:
            for mu, k in den.items():
                if k < 0:
                    raise ValueError("negative binomial multiplicity")
                if not k:
                    continue
                mu, flipped = _orient(tuple(mu))
                if flipped:
                    # 1/(1-e^{-m}) = -e^{m}/(1-e^{m})
                    self.num = self.num.shift(tuple(x * k for x in mu)) * (-1) ** k
                self.den[mu] = self.den.get(mu, 0) + k

    @classmethod
    def _raw(cls, num: RTElement, den: dict[Exp, int]) -> "RTFraction":
        out = cls.__new__(cls)
        out.num = num
        out.den = den
        return out

    @property
    def n(self) -> int:
        return self.num.n

    @classmethod
    def zero(cls, n: int) -> "RTFraction":
        return cls._raw(RTElement.zero(n), {})

    @classmethod
    def one(cls, n: int) -> "RTFraction":
        return cls._raw(RTElement.one(n), {})

    @classmethod
    def binomial_inverse(cls, mu: Sequence[int], k: int = 1) -> "RTFraction":
        """1 / (1 - e^mu)^k."""
        mu = tuple(mu)
        return cls(RTElement.one(len(mu)), {mu: k})

    @classmethod
    def lift(cls, x) -> "RTFraction":
        if isinstance(x, RTFraction):
            return x
        if isinstance(x, RTElement):
            return cls._raw(x, {})
        raise TypeError(f"cannot lift {type(x).__name__} to RTFraction")

    def _coerce(self, other):
        if isinstance(other, RTFraction):
            return other
        if isinstance(other, RTElement):
            return RTFraction._raw(other, {})
        if isinstance(other, int):
            return RTFraction._raw(RTElement.one(self.n) * other, {})
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if not other.num.terms:
            return self
        if not self.num.terms:
            return other
        den = dict(self.den)
        for mu, k in other.den.items():
            if den.get(mu, 0) < k:
                den[mu] = k
        a, b = self.num, other.num
        for mu, k in den.items():
            if k > self.den.get(mu, 0):
                a = a.times_binomial(mu, k - self.den.get(mu, 0))
            if k > other.den.get(mu, 0):
                b = b.times_binomial(mu, k - other.den.get(mu, 0))
        return RTFraction._raw(a + b, den)

    __radd__ = __add__

    def __neg__(self):
        return RTFraction._raw(-self.num, dict(self.den))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        num = self.num * other.num
        if not num.terms:
            return RTFraction.zero(self.n)
        den = dict(self.den)
        for mu, k in other.den.items():
            den[mu] = den.get(mu, 0) + k
        return RTFraction._raw(num, den)

    __rmul__ = __mul__

    def divide_by_binomials(self, factors: Iterable[Sequence[int]]) -> "RTFraction":
        """Divide by prod (1 - e^mu) over ``factors``."""
        out = RTFraction._raw(self.num, dict(self.den))
        for mu in factors:
            out = out * RTFraction.binomial_inverse(mu)
        return out

    def is_zero(self) -> bool:
        return not self.num.terms

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def act(self, matrix) -> "RTFraction":
        num = self.num.act(matrix)
        return RTFraction(num, {_matvec(matrix, mu): k for mu, k in self.den.items()})

    def iota(self) -> "RTFraction":
        return RTFraction(self.num.iota(), {tuple(-x for x in mu): k for mu, k in self.den.items()})

    def reduce(self) -> "RTFraction":
        num = self.num
        if not num.terms:
            return RTFraction.zero(self.n)
        den = {}
        for mu, k in sorted(self.den.items()):
            while k:
                q = num.divide_binomial(mu)
                if q is None:
                    break
                num = q
                k -= 1
            if k:
                den[mu] = k
        return RTFraction._raw(num, den)

    def clear(self) -> RTElement:
        """Return the value as an RTElement or raise NonClearingEntry."""
        r = self.reduce()
        if r.den:
            raise NonClearingEntry(f"denominator {r.format_denominator()} does not cancel")
        return r.num

    def is_polynomial(self) -> bool:
        return not self.reduce().den

    def denominator_roots(self) -> list[Exp]:
        return sorted(self.den)

    def format_denominator(self, labels=None) -> str:
        if not self.den:
            return "1"
        labels = labels or tuple(range(1, self.n + 1))
        parts = []
        for mu, k in sorted(self.den.items()):
            b = f"(1-e^{{{_format_exponent(mu, labels)}}})"
            parts.append(b if k == 1 else f"{b}^{k}")
        return "*".join(parts)

    def format(self, labels=None) -> str:
        if not self.den:
            return self.num.format(labels)
        return f"({self.num.format(labels)})/({self.format_denominator(labels)})"

    def __repr__(self):
        return f"RTFraction({self.format()})"


def involution_iota(a):
    """Exponent negation e^lambda -> e^{-lambda}."""
    return a.iota()


@dataclass
class XPolynomial:
    """sum_j d(j) x^j with x_i = e^{-alpha_i} - 1."""

    n: int
    terms: dict[Exp, int] = field(default_factory=dict)

    def format(self, labels: Sequence[int] | None = None) -> str:
        if not self.terms:
            return "0"
        labels = labels or tuple(range(1, self.n + 1))
        out = []
        for j, c in sorted(self.terms.items(), key=lambda jc: (sum(jc[0]), tuple(-x for x in jc[0]))):
            mono = "*".join(
                f"x{lab}" if e == 1 else f"x{lab}^{e}" for e, lab in zip(j, labels) if e
            )
            if not mono:
                body = str(abs(c))
            elif abs(c) == 1:
                body = mono
            else:
                body = f"{abs(c)}*{mono}"
            sign = "-" if c < 0 else ("+" if out else "")
            out.append(sign + body)
        return "".join(out)

    def to_json(self) -> dict:
        return {
            "version": SCHEMA_VERSION,
            "rank": self.n,
            "terms": [[list(j), c] for j, c in sorted(self.terms.items())],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "XPolynomial":
        if data.get("version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema version {data.get('version')!r}")
        return cls(int(data["rank"]), {tuple(j): c for j, c in data["terms"]})


def _taylor_shift(coeffs: Mapping[int, int], sign: int) -> dict[int, int]:
    """Coefficients of p(sign + x) given p(q) = sum c_k q^k.

    Horner's rule on a Kronecker-packed big integer: one bigint operation per
    degree instead of a quadratic loop over binomial coefficients.
    """
    top = max(coeffs)
    bits = sum(abs(c) for c in coeffs.values()).bit_length() + top + 2
    packed = 0
    for k in range(top, -1, -1):
        packed = (packed << bits) + sign * packed + coeffs.get(k, 0)
    half, full = 1 << (bits - 1), 1 << bits
    out = {}
    for t in range(top + 1):
        digit = packed & (full - 1)
        if digit >= half:
            digit -= full
        if digit:
            out[t] = digit
        packed = (packed - digit) >> bits
    return out


def _substitute(terms: Mapping[Exp, int], sign: int) -> dict[Exp, int]:
    """Replace each variable q_i by sign + x_i, one coordinate at a time."""
    cur = dict(terms)
    n = len(next(iter(cur))) if cur else 0
    for i in range(n):
        groups: dict[Exp, dict[int, int]] = {}
        for k, c in cur.items():
            groups.setdefault(k[:i] + k[i + 1:], {})[k[i]] = c
        cur = {}
        for rest, poly in groups.items():
            for t, c in _taylor_shift(poly, sign).items():
                cur[rest[:i] + (t,) + rest[i:]] = c
    return cur


def to_x_polynomial(d: RTElement) -> XPolynomial:
    """Rewrite d in the variables x_i = e^{-alpha_i} - 1 (e^{-alpha_i} = 1 + x_i)."""
    if not d.in_negative_subring():
        bad = next(k for k in d.terms if any(x > 0 for x in k))
        raise NotInPolynomialSubring(f"exponent {bad} has a positive coordinate")
    q = {tuple(-x for x in lam): c for lam, c in d.terms.items()}
    return XPolynomial(d.n, _substitute(q, 1))


def from_x_polynomial(xp: XPolynomial) -> RTElement:
    """Back-substitute x_i = e^{-alpha_i} - 1."""
    q = _substitute(xp.terms, -1)
    return RTElement._raw(xp.n, {tuple(-x for x in k): c for k, c in q.items()})


@dataclass(frozen=True)
class Verdict:
    passed: bool
    parity: int
    witness: Exp | None = None
    coefficient: int | None = None

    def __bool__(self):
        return self.passed


def sign_verdict(xp: XPolynomial, lu: int, lv: int, lw: int) -> Verdict:
    """Check that (-1)^(lu+lv+lw) * xp has nonnegative coefficients."""
    parity = (lu + lv + lw) % 2
    sign = -1 if parity else 1
    for j in sorted(xp.terms):
        c = xp.terms[j]
        if sign * c < 0:
            return Verdict(False, parity, j, c)
    return Verdict(True, parity)
