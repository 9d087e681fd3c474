"""Boundary divisor coefficients and the dualizing-sheaf descriptor of X^w_P.

For a cover v of w in W^P with v = s_beta w the coefficient is
m_{w,v} = 1 - <w rho_Y, beta^v>.  The pairing is read off from
lambda - s_beta lambda = <lambda, beta^v> beta, so no coroot is built.

>>> from kmk.rootdatum import build_realization, preset
>>> from kmk.weyl import WeylGroup
>>> W = WeylGroup(build_realization(preset("affine:A1")))
>>> Y = frozenset({1})
>>> [m_coefficient(W, W.parse(w), W.parse(v), Y)
...  for w, v in [("e", "s0"), ("s0", "s1*s0"), ("s1*s0", "s0*s1*s0")]]
[1, 0, -1]
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import NotACover
from .rootdatum import RootDatum, parabolic_type
from .weyl import RealRoot, WeylElement, WeylGroup

__all__ = [
    "coroot_pairing_by_reflection", "m_coefficient",
    "DualizingDescriptor", "dualizing_descriptor",
    "BoundaryCheck", "boundary_weight_check",
]

Vector = tuple[int, ...]


def _sub(a: Sequence[int], b: Sequence[int]) -> Vector:
    return tuple(x - y for x, y in zip(a, b))


def _add(a: Sequence[int], b: Sequence[int]) -> Vector:
    return tuple(x + y for x, y in zip(a, b))


def coroot_pairing_by_reflection(W: WeylGroup, weight: Sequence[int], beta: Sequence[int]) -> int:
    """<lambda, beta^v> from lambda - s_beta(lambda) = <lambda, beta^v> beta."""
    s_beta = W.reflection(beta)
    diff = _sub(weight, W.act_weight(s_beta, weight))
    root = W.rd.root_to_weight(beta)
    k = next((i for i, x in enumerate(root) if x), None)
    if k is None or diff[k] % root[k]:
        raise ArithmeticError(f"lambda - s_beta lambda is not an integral multiple of {tuple(beta)}")
    c = diff[k] // root[k]
    if any(d != c * r for d, r in zip(diff, root)):
        raise ArithmeticError(f"lambda - s_beta lambda is not proportional to {tuple(beta)}")
    return c


def _cover_root(W: WeylGroup, w: WeylElement, v: WeylElement, Y: frozenset[int]) -> RealRoot:
    for cand, beta in W.covers_in_WP(w, Y):
        if cand == v:
            return beta
    raise NotACover(f"{W.format(v)} does not cover {W.format(w)} in W^P")


def m_coefficient(W: WeylGroup, w: WeylElement, v: WeylElement, Y: Iterable[int]) -> int:
    """m^P_{w,v} = 1 - <w rho_Y, beta^v> for a cover v = s_beta w in W^P."""
    Y = frozenset(Y)
    beta = _cover_root(W, w, v, Y)
    rho_Y = parabolic_type(W.rd, Y).rho_Y
    return 1 - coroot_pairing_by_reflection(W, W.act_weight(w, rho_Y), beta.coords)


@dataclass(frozen=True)
class DualizingDescriptor:
    """omega of X^w_P ~ C_{rho - w rho_Y} (x) xi-hat^w_P (x) L^P(2 rho^Y - rho - rho_Y).

    ``divisor`` lists (v, beta, m_{w,v}) over the covers v = s_beta w in W^P.
    2 rho^Y is the (integral) sum of the positive Levi roots.
    """

    w: WeylElement
    Y: frozenset[int]
    character: Vector
    divisor: tuple[tuple[WeylElement, RealRoot, int], ...]
    bundle_weight: Vector
    rho: Vector
    fundamental_weights: tuple[Vector, ...]

    def to_json(self) -> dict:
        W = self.w.group
        labels = W.gcm.labels
        return {
            "version": 1,
            "w": W.format(self.w),
            "Y": sorted(labels[i] for i in self.Y),
            "character": list(self.character),
            "divisor": [
                {"v": W.format(v), "beta": list(b.coords), "beta_text": _root_text(b.coords, labels), "m": m}
                for v, b, m in self.divisor
            ],
            "bundle_weight": list(self.bundle_weight),
            "realization": {
                "rho": list(self.rho),
                "fundamental_weights": [list(f) for f in self.fundamental_weights],
            },
        }

    def to_text(self) -> str:
        W = self.w.group
        labels = W.gcm.labels
        lines = [
            f"w = {W.format(self.w)}, Y = {{{', '.join(str(labels[i]) for i in sorted(self.Y))}}}",
            f"character rho - w rho_Y = {list(self.character)}",
            "divisor:" if self.divisor else "divisor: (empty)",
        ]
        for v, b, m in self.divisor:
            lines.append(f"  {W.format(v)}  beta = {_root_text(b.coords, labels)}  m = {m}")
        lines.append(f"bundle weight 2 rho^Y - rho - rho_Y = {list(self.bundle_weight)}")
        lines.append(f"rho used = {list(self.rho)}")
        return "\n".join(lines) + "\n"


def _root_text(coords: Sequence[int], labels: Sequence[int]) -> str:
    parts = []
    for c, lab in zip(coords, labels):
        if not c:
            continue
        body = f"a{lab}" if abs(c) == 1 else f"{abs(c)}*a{lab}"
        parts.append(("-" if c < 0 else ("+" if parts else "")) + body)
    return "".join(parts) or "0"


def dualizing_descriptor(W: WeylGroup, w: WeylElement, Y: Iterable[int]) -> DualizingDescriptor:
    Y = frozenset(Y)
    if not W.in_WP(w, Y):
        raise ValueError(f"{W.format(w)} is not a minimal coset representative")
    rd = W.rd
    pt = parabolic_type(rd, Y)
    w_rho_Y = W.act_weight(w, pt.rho_Y)
    divisor = []
    for v, beta in W.covers_in_WP(w, Y):
        m = 1 - coroot_pairing_by_reflection(W, w_rho_Y, beta.coords)
        divisor.append((v, beta, m))
    divisor.sort(key=lambda t: t[0].sort_key())
    bundle = _sub(_sub(pt.two_rho_sup_Y, rd.rho), pt.rho_Y)
    return DualizingDescriptor(
        w, Y, _sub(rd.rho, w_rho_Y), tuple(divisor), bundle, rd.rho, rd.fundamental_weights)


@dataclass(frozen=True)
class BoundaryCheck:
    w: WeylElement
    inversion_sum: Vector
    rho_minus_w_rho: Vector
    cancellation: Vector

    @property
    def passed(self) -> bool:
        return self.inversion_sum == self.rho_minus_w_rho and not any(self.cancellation)


def boundary_weight_check(W: WeylGroup, w: WeylElement, Y: Iterable[int]) -> BoundaryCheck:
    """Tangent-weight bookkeeping at w: sum of Inv(w) equals rho - w rho, and the
    weights -rho + w rho_Y + (rho - w rho) - w(-rho_hat_Y) cancel."""
    Y = frozenset(Y)
    rd: RootDatum = W.rd
    pt = parabolic_type(rd, Y)
    inv_sum = tuple(0 for _ in range(rd.dim_h))
    for r in W.inversion_set(w):
        inv_sum = _add(inv_sum, rd.root_to_weight(r.coords))
    rho_minus = _sub(rd.rho, W.act_weight(w, rd.rho))
    neg_rho_hat = tuple(-x for x in pt.rho_hat_Y)
    total = _sub(_add(_add(tuple(-x for x in rd.rho), W.act_weight(w, pt.rho_Y)), rho_minus),
                 W.act_weight(w, neg_rho_hat))
    return BoundaryCheck(w, inv_sum, rho_minus, total)
