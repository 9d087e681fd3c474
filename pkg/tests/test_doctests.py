import doctest
import importlib

import pytest

MODULES = ["errors", "rootdatum", "weyl", "ring", "engine", "parabolic", "dualizing", "cache", "cli"]


@pytest.mark.parametrize("name", MODULES)
def test_module_doctests(name):
    mod = importlib.import_module(f"kmk.{name}")
    result = doctest.testmod(mod, optionflags=doctest.NORMALIZE_WHITESPACE)
    assert result.failed == 0
