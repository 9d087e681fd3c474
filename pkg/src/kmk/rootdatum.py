"""
Generalized Cartan matrices and their minimal realizations.

Node indices are 0-based everywhere inside the library. Each GCM also carries
``labels`` used for printing and parsing (``s1``, ``a0`` ...): finite presets
label their nodes 1..n, affine presets 0..n-1 with 0 the affine node.

>>> gcm = preset("A2")
>>> rd = build_realization(gcm)
>>> rd.dim_h, rd.rho
(2, (1, 1))
>>> rd.cartan_pairing() == gcm.entries
True
>>> aff = build_realization(preset("affine:A1"))
>>> aff.dim_h, aff.simple_roots
(3, ((2, -2, 0), (-2, 2, 1)))
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Sequence

from .errors import LeviNotFiniteType, NotGCM, NotSymmetrizable

__all__ = [
    "GCM", "RootDatum", "ParabolicType",
    "validate_gcm", "build_realization", "parabolic_type",
    "is_finite_type", "preset", "load_gcm", "PRESETS",
]

Vector = tuple[int, ...]


@dataclass(frozen=True)
class GCM:
    entries: tuple[tuple[int, ...], ...]
    symmetrizer: tuple[int, ...]
    labels: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.entries)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i][j]

    def index(self, label: int) -> int:
        try:
            return self.labels.index(int(label))
        except ValueError:
            raise ValueError(f"no node labelled {label}; labels are {self.labels}") from None

    def indices(self, labels: Iterable[int]) -> frozenset[int]:
        return frozenset(self.index(lab) for lab in labels)

    def symmetrized(self, subset: Iterable[int] | None = None) -> list[list[int]]:
        """Return ``d_i a_ij`` restricted to ``subset`` (a symmetric matrix)."""
        idx = sorted(range(self.n) if subset is None else subset)
        return [[self.symmetrizer[i] * self.entries[i][j] for j in idx] for i in idx]


def validate_gcm(matrix: Sequence[Sequence[int]], labels: Sequence[int] | None = None) -> GCM:
    """Check the GCM axioms and find a positive integral symmetrizer.

    >>> validate_gcm([[2, -1], [-1, 2]]).symmetrizer
    (1, 1)
    >>> validate_gcm([[2, -1], [-2, 2]]).symmetrizer
    (2, 1)
    """
    rows = [list(r) for r in matrix]
    n = len(rows)
    if n == 0 or any(len(r) != n for r in rows):
        raise NotGCM("matrix must be square and nonempty")
    for r in rows:
        for x in r:
            if isinstance(x, bool) or int(x) != x:
                raise NotGCM(f"non-integer entry {x!r}")
    a = [[int(x) for x in r] for r in rows]
    for i in range(n):
        if a[i][i] != 2:
            raise NotGCM(f"diagonal entry a[{i}][{i}] = {a[i][i]} != 2")
        for j in range(n):
            if i == j:
                continue
            if a[i][j] > 0:
                raise NotGCM(f"positive off-diagonal entry a[{i}][{j}] = {a[i][j]}")
            if (a[i][j] == 0) != (a[j][i] == 0):
                raise NotGCM(f"a[{i}][{j}] and a[{j}][{i}] must vanish together")

    # d_i a_ij = d_j a_ji, propagated along the Dynkin graph
    d: list[Fraction | None] = [None] * n
    for start in range(n):
        if d[start] is not None:
            continue
        d[start] = Fraction(1)
        stack = [start]
        while stack:
            i = stack.pop()
            for j in range(n):
                if j == i or a[i][j] == 0:
                    continue
                want = d[i] * a[i][j] / a[j][i]
                if d[j] is None:
                    d[j] = want
                    stack.append(j)
                elif d[j] != want:
                    raise NotSymmetrizable(f"no symmetrizer: cycle through nodes {i}, {j}")
    den = lcm(*(x.denominator for x in d))
    ints = [int(x * den) for x in d]
    g = gcd(*ints)
    sym = tuple(x // g for x in ints)

    if labels is None:
        labels = tuple(range(1, n + 1))
    labels = tuple(int(x) for x in labels)
    if len(labels) != n or len(set(labels)) != n:
        raise ValueError("labels must be n distinct integers")
    return GCM(tuple(tuple(r) for r in a), sym, labels)


def _leading_minors_positive(m: list[list[int]]) -> bool:
    # Sylvester's criterion by exact Gaussian elimination: all pivots > 0
    a = [[Fraction(x) for x in row] for row in m]
    k = len(a)
    for p in range(k):
        if a[p][p] <= 0:
            return False
        for r in range(p + 1, k):
            f = a[r][p] / a[p][p]
            if f:
                for c in range(p, k):
                    a[r][c] -= f * a[p][c]
    return True


def is_finite_type(gcm: GCM, subset: Iterable[int] | None = None) -> bool:
    """True iff the principal submatrix on ``subset`` is of finite type."""
    return _leading_minors_positive(gcm.symmetrized(subset))


def _independent_columns(a: tuple[tuple[int, ...], ...]) -> list[int]:
    """Greedy maximal linearly independent set of columns, in index order."""
    n = len(a)
    basis: list[list[Fraction]] = []  # echelon rows, each with a pivot position
    pivots: list[int] = []
    chosen = []
    for j in range(n):
        v = [Fraction(a[i][j]) for i in range(n)]
        for row, p in zip(basis, pivots):
            if v[p]:
                f = v[p] / row[p]
                v = [x - f * y for x, y in zip(v, row)]
        nz = next((i for i, x in enumerate(v) if x), None)
        if nz is not None:
            basis.append(v)
            pivots.append(nz)
            chosen.append(j)
    return chosen


@dataclass(frozen=True)
class RootDatum:
    """Minimal realization of a GCM.

    A weight is stored as its vector of pairings with the basis
    ``(alpha_1^v, ..., alpha_n^v, d_1, ..., d_{n-r})`` of the Cartan
    subalgebra; coroot ``alpha_i^v`` is therefore the i-th unit vector and the
    pairing is the dot product.
    """

    gcm: GCM
    dim_h: int
    simple_roots: tuple[Vector, ...]
    simple_coroots: tuple[Vector, ...]
    fundamental_weights: tuple[Vector, ...]
    rho: Vector
    _complement: tuple[int, ...] = field(default=(), repr=False)

    @property
    def n(self) -> int:
        return self.gcm.n

    @property
    def labels(self) -> tuple[int, ...]:
        return self.gcm.labels

    @property
    def is_finite(self) -> bool:
        return is_finite_type(self.gcm)

    @staticmethod
    def pair(weight: Sequence[int], coweight: Sequence[int]) -> int:
        return sum(x * y for x, y in zip(weight, coweight))

    def cartan_pairing(self) -> tuple[tuple[int, ...], ...]:
        """Matrix of <alpha_j, alpha_i^v>, row i and column j."""
        return tuple(
            tuple(self.pair(self.simple_roots[j], self.simple_coroots[i]) for j in range(self.n))
            for i in range(self.n)
        )

    def root_to_weight(self, coords: Sequence[int]) -> Vector:
        """Image of ``sum c_j alpha_j`` in weight coordinates."""
        out = [0] * self.dim_h
        for c, alpha in zip(coords, self.simple_roots):
            if c:
                for k, x in enumerate(alpha):
                    out[k] += c * x
        return tuple(out)

    def reflect_weight(self, i: int, weight: Sequence[int]) -> Vector:
        """s_i(lambda) = lambda - <lambda, alpha_i^v> alpha_i."""
        c = self.pair(weight, self.simple_coroots[i])
        if not c:
            return tuple(weight)
        return tuple(x - c * y for x, y in zip(weight, self.simple_roots[i]))

    def with_weight_shift(self, shifts: Sequence[Sequence[int]]) -> "RootDatum":
        """Alternative fundamental weights ``varpi_i + z_i`` with ``<z_i, alpha_j^v> = 0``.

        ``shifts[i]`` gives the ``d``-coordinates of ``z_i``. The realization
        pins the fundamental weights only up to such vectors.
        """
        extra = self.dim_h - self.n
        fws = []
        for w, z in zip(self.fundamental_weights, shifts):
            z = tuple(int(t) for t in z)
            if len(z) != extra:
                raise ValueError(f"shift must have {extra} entries")
            fws.append(w[: self.n] + tuple(a + b for a, b in zip(w[self.n:], z)))
        rho = tuple(sum(col) for col in zip(*fws))
        return RootDatum(self.gcm, self.dim_h, self.simple_roots, self.simple_coroots,
                         tuple(fws), rho, self._complement)


def build_realization(gcm: GCM) -> RootDatum:
    n = gcm.n
    indep = _independent_columns(gcm.entries)
    complement = tuple(j for j in range(n) if j not in indep)
    dim_h = n + len(complement)
    roots = []
    for j in range(n):
        col = tuple(gcm.entries[i][j] for i in range(n))
        tail = tuple(1 if j == c else 0 for c in complement)
        roots.append(col + tail)
    coroots = tuple(tuple(1 if k == i else 0 for k in range(dim_h)) for i in range(n))
    fws = coroots  # <varpi_i, alpha_j^v> = delta_ij and <varpi_i, d_k> = 0
    rho = tuple(1 if k < n else 0 for k in range(dim_h))
    return RootDatum(gcm, dim_h, tuple(roots), coroots, fws, rho, complement)


@dataclass(frozen=True)
class ParabolicType:
    """Finite-type parabolic subset ``Y`` with its distinguished weights.

    ``rho_sup_Y`` is half the sum of the positive Levi roots and may be
    half-integral, so it is kept as Fractions next to the integral
    ``two_rho_sup_Y``.
    """

    Y: frozenset[int]
    rho_Y: Vector
    rho_hat_Y: Vector
    two_rho_sup_Y: Vector
    levi_positive_roots: tuple[Vector, ...]

    @property
    def rho_sup_Y(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(x, 2) for x in self.two_rho_sup_Y)


def _levi_positive_roots(gcm: GCM, Y: frozenset[int]) -> list[Vector]:
    n = gcm.n
    simple = [tuple(1 if k == i else 0 for k in range(n)) for i in sorted(Y)]
    seen = set(simple)
    todo = list(simple)
    while todo:
        r = todo.pop()
        for i in Y:
            c = sum(r[j] * gcm.entries[i][j] for j in range(n))
            if c:
                s = list(r)
                s[i] -= c
                s = tuple(s)
                if s not in seen:
                    seen.add(s)
                    todo.append(s)
    return sorted(r for r in seen if all(x >= 0 for x in r))


def parabolic_type(rd: RootDatum, Y: Iterable[int]) -> ParabolicType:
    Y = frozenset(int(i) for i in Y)
    if any(not 0 <= i < rd.n for i in Y):
        raise ValueError(f"parabolic index out of range: {sorted(Y)}")
    if not is_finite_type(rd.gcm, Y):
        labels = sorted(rd.labels[i] for i in Y)
        raise LeviNotFiniteType(f"Levi subset {labels} is not of finite type")
    rho_Y = tuple(sum(rd.fundamental_weights[i][k] for i in Y) for k in range(rd.dim_h))
    rho_hat = tuple(a - b for a, b in zip(rd.rho, rho_Y))
    pos = _levi_positive_roots(rd.gcm, Y)
    two_rho_sup = [0] * rd.dim_h
    for r in pos:
        for k, x in enumerate(rd.root_to_weight(r)):
            two_rho_sup[k] += x
    return ParabolicType(Y, rho_Y, rho_hat, tuple(two_rho_sup), tuple(pos))


PRESETS: dict[str, tuple[list[list[int]], tuple[int, ...]]] = {
    "A1": ([[2]], (1,)),
    "A2": ([[2, -1], [-1, 2]], (1, 2)),
    "A3": ([[2, -1, 0], [-1, 2, -1], [0, -1, 2]], (1, 2, 3)),
    "B2": ([[2, -1], [-2, 2]], (1, 2)),
    "G2": ([[2, -3], [-1, 2]], (1, 2)),
    "affine:A1": ([[2, -2], [-2, 2]], (0, 1)),
    "affine:A2": ([[2, -1, -1], [-1, 2, -1], [-1, -1, 2]], (0, 1, 2)),
}


def preset(name: str) -> GCM:
    """Look up a named GCM; ``hyperbolic:a,b,c,d`` builds a rank-2 matrix."""
    if name in PRESETS:
        m, labels = PRESETS[name]
        return validate_gcm(m, labels)
    if name.startswith("hyperbolic:"):
        vals = [int(x) for x in name.split(":", 1)[1].split(",")]
        if len(vals) != 4:
            raise ValueError("hyperbolic preset takes four comma-separated entries")
        return validate_gcm([vals[:2], vals[2:]], (1, 2))
    raise ValueError(f"unknown GCM preset {name!r}; known: {sorted(PRESETS)} or hyperbolic:a,b,c,d")


def load_gcm(spec: str) -> GCM:
    """Parse a preset name or a JSON matrix (``[[2,-1],[-1,2]]``)."""
    s = spec.strip()
    if s.startswith("["):
        return validate_gcm(json.loads(s))
    return preset(s)
