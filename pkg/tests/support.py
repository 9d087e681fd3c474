"""Shared groups and engines for the test session."""

from kmk.engine import LocalizationEngine
from kmk.rootdatum import build_realization, load_gcm
from kmk.weyl import WeylGroup

HYPERBOLIC = "hyperbolic:2,-3,-3,2"

_groups: dict[str, WeylGroup] = {}
_engines: dict[str, LocalizationEngine] = {}


def group(name: str) -> WeylGroup:
    if name not in _groups:
        _groups[name] = WeylGroup(build_realization(load_gcm(name)))
    return _groups[name]


def engine(name: str) -> LocalizationEngine:
    """One engine per type for the whole session, so phi columns are shared."""
    if name not in _engines:
        _engines[name] = LocalizationEngine(group(name))
    return _engines[name]


def full_group(W: WeylGroup):
    return [w for level in W.elements_up_to(10 ** 6) for w in level]
