import pytest
from hypothesis import given, strategies as st

from kmk.dualizing import (boundary_weight_check, coroot_pairing_by_reflection,
                           dualizing_descriptor, m_coefficient)
from kmk.errors import NotACover
from kmk.rootdatum import parabolic_type
from kmk.weyl import WeylGroup

from support import group


def test_affine_a1_reference_values():
    W = group("affine:A1")
    Y = W.gcm.indices([1])
    cases = [("e", "s0", 1), ("s0", "s1*s0", 0), ("s1*s0", "s0*s1*s0", -1)]
    for w, v, m in cases:
        assert m_coefficient(W, W.parse(w), W.parse(v), Y) == m


def test_affine_standard_maximal_parabolic_first_cover():
    # the cover e -> s0 always has m = 1 since rho_Y pairs to 0 with alpha_0^v
    for name in ("affine:A1", "affine:A2"):
        W = group(name)
        Y = frozenset(range(1, W.n))
        d = dualizing_descriptor(W, W.e, Y)
        assert [(W.format(v), m) for v, _, m in d.divisor] == [("s0", 1)]


def test_a2_descriptor_at_identity():
    W = group("A2")
    d = dualizing_descriptor(W, W.e, {1})
    assert [(W.format(v), b.coords, m) for v, b, m in d.divisor] == [("s1", (1, 0), 1)]


def test_descriptor_text_and_json():
    W = group("affine:A1")
    d = dualizing_descriptor(W, W.parse("s0"), {1})
    js = d.to_json()
    assert js["divisor"] == [{"v": "s1*s0", "beta": [0, 1], "beta_text": "a1", "m": 0}]
    assert "m = 0" in d.to_text()
    assert js["realization"]["rho"] == list(W.rd.rho)


@pytest.mark.parametrize("name,L", [("A2", 3), ("B2", 4), ("G2", 6), ("affine:A1", 5), ("affine:A2", 3),
                                    ("hyperbolic:2,-3,-3,2", 5)])
def test_empty_parabolic_gives_all_ones(name, L):
    W = group(name)
    for w in W.enumerate_interval(L):
        d = dualizing_descriptor(W, w, ())
        assert d.divisor or W.rd.is_finite  # the longest element has no covers
        assert all(m == 1 for _, _, m in d.divisor)
        assert d.character == tuple(W.rd.rho)


def coroot_pairing_by_transport(W: WeylGroup, lam, beta):
    """<lam, (x a_i)^v> = <x^{-1} lam, a_i^v>: a second way to pair with a coroot."""
    for x in W.enumerate_interval(8):
        for i in range(W.n):
            if W.act(x, W.simple_root(i)) == tuple(beta):
                return W.act_weight(W.inverse(x), lam)[i]
    raise AssertionError("root not reached")


@pytest.mark.parametrize("name,Y", [("affine:A1", {1}), ("affine:A2", {1, 2}), ("B2", {0}), ("G2", {1})])
def test_pairing_by_reflection_matches_transport(name, Y):
    W = group(name)
    rho_Y = parabolic_type(W.rd, Y).rho_Y
    for w in W.enumerate_interval(4, Y):
        for v, beta in W.covers_in_WP(w, Y):
            lam = W.act_weight(w, rho_Y)
            assert coroot_pairing_by_reflection(W, lam, beta.coords) == \
                coroot_pairing_by_transport(W, lam, beta.coords)


def test_simple_root_pairing_is_the_coordinate():
    W = group("affine:A2")
    lam = (3, -2, 5, 7)
    for i in range(W.n):
        assert coroot_pairing_by_reflection(W, lam, W.simple_root(i)) == lam[i]


def test_not_a_cover():
    W = group("affine:A1")
    with pytest.raises(NotACover):
        m_coefficient(W, W.e, W.parse("s1*s0"), {1})


@given(st.lists(st.integers(-5, 5), min_size=3, max_size=3))
def test_choice_independence(shift):
    """Moving each fundamental weight by a vector killed by all coroots leaves every m unchanged."""
    base = group("affine:A2")
    rd = base.rd
    extra = rd.dim_h - rd.n
    shifted = WeylGroup(rd.with_weight_shift([[s] * extra for s in shift]))
    for Y in ({1}, {1, 2}, {0}):
        for w in base.enumerate_interval(3, Y):
            w2 = shifted.canonicalize(w.word)
            d1 = dualizing_descriptor(base, w, Y)
            d2 = dualizing_descriptor(shifted, w2, Y)
            assert [m for *_, m in d1.divisor] == [m for *_, m in d2.divisor]


@pytest.mark.parametrize("name,Y,L", [("A2", {1}, 3), ("affine:A1", {1}, 6), ("affine:A2", {1, 2}, 4),
                                      ("B2", (), 4)])
def test_boundary_weight_check(name, Y, L):
    W = group(name)
    for w in W.enumerate_interval(L, Y):
        rec = boundary_weight_check(W, w, Y)
        assert rec.passed, w


def test_boundary_simple_reflection():
    W = group("A2")
    rec = boundary_weight_check(W, W.s(0), ())
    assert rec.inversion_sum == W.rd.simple_roots[0] == rec.rho_minus_w_rho


def test_bundle_weight_kills_levi_coroots():
    for name, Y in [("A2", {1}), ("B2", {0}), ("affine:A1", {1}), ("affine:A2", {1, 2})]:
        W = group(name)
        d = dualizing_descriptor(W, W.e, Y)
        assert all(d.bundle_weight[i] == 0 for i in Y)
