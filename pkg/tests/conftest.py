import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "kmk", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture],
)
settings.load_profile("kmk")


@pytest.fixture(autouse=True)
def _isolated_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("KMK_CACHE_DIR", str(tmp_path / "kmk-cache"))
