import io
import json
import subprocess
import sys
import warnings

import pytest

from kmk import cache, cli
from kmk.engine import LocalizationEngine
from kmk.parabolic import positivity_scan as real_scan
from kmk.rootdatum import preset

from support import group


def run(*argv):
    out = io.StringIO()
    code = cli.main(list(argv), out=out)
    return code, out.getvalue()


def test_selftest():
    code, text = run("selftest")
    assert code == 0
    assert "selftest PASSED" in text
    assert text.count("pass") >= 6


def test_dualizing_affine_a1_value():
    code, text = run("dualizing", "--type", "affine:A1", "--parabolic", "1", "--w", "s0", "--format", "json")
    assert code == 0
    data = json.loads(text)
    assert [(d["v"], d["beta_text"], d["m"]) for d in data["divisor"]] == [("s1*s0", "a1", 0)]
    assert data["boundary_weight_check"] is True


def test_dualizing_text():
    code, text = run("dualizing", "--type", "affine:A1", "--parabolic", "1", "--w", "s1*s0")
    assert code == 0 and "m = -1" in text


def test_constants_rank_one():
    code, text = run("constants", "--type", "A1", "--u", "s1", "--v", "s1", "--max-length", "1", "--format", "json")
    assert code == 0
    data = json.loads(text)
    [entry] = data["entries"]
    assert entry["w"] == "s1" and entry["d_rt"] == "1-e^{-a1}" and entry["verdict"]["pass"]
    assert data["summary"]["passed"]


def test_constants_output_is_byte_identical():
    argv = ["constants", "--type", "affine:A1", "--parabolic", "1", "--u", "s0", "--v", "s0",
            "--max-length", "4", "--format", "json"]
    first = run(*argv)
    second = run(*argv)  # served from the cache this time
    third = run(*argv, "--no-cache")
    assert first == second == third


def test_constants_csv_and_text():
    code, text = run("constants", "--type", "A2", "--u", "s1", "--v", "s2", "--max-length", "3", "--format", "csv")
    assert code == 0 and text.splitlines()[0].startswith("u,v,w")
    code, text = run("constants", "--type", "A2", "--u", "s1", "--v", "s2", "--max-length", "3", "--route", "both")
    assert code == 0 and "PASS" in text


def test_roots_and_weyl():
    code, text = run("roots", "--type", "B2", "--parabolic", "1", "--format", "json")
    data = json.loads(text)
    assert code == 0 and data["symmetrizer"] == [2, 1] and data["parabolic"]["Y"] == [1]
    code, text = run("weyl", "--type", "affine:A1", "--max-length", "3", "--format", "json")
    assert code == 0 and len(json.loads(text)["elements"]) == 7
    code, text = run("weyl", "--type", "A2", "--element", "s1*s2", "--format", "json")
    assert json.loads(text)["inversion_set"] == [[1, 0], [1, 1]]
    assert run("roots", "--type", "A2", "--format", "csv")[0] == 0
    assert run("weyl", "--type", "A2", "--max-length", "2")[0] == 0


@pytest.mark.parametrize("argv", [
    ["bogus"],
    ["dualizing", "--type", "nope", "--w", "e"],
    ["dualizing", "--type", "A2", "--parabolic", "1", "--w", "s1"],
    ["constants", "--type", "A2", "--u", "s1", "--v", "q7", "--max-length", "2"],
    ["constants", "--type", "A2", "--u", "s1*s2", "--v", "e", "--max-length", "1"],
    ["roots", "--type", "[[2,1],[1,2]]"],
    ["dualizing", "--type", "affine:A1", "--parabolic", "0,1", "--w", "e"],
    ["scan", "--config", "/nonexistent.toml"],
    [],
])
def test_usage_errors_exit_one(argv, capsys):
    assert run(*argv)[0] == 1


def test_scan_command(tmp_path):
    cfg = tmp_path / "scan.toml"
    cfg.write_text('[scan]\ntype = "B2"\nY = [2]\nmax_length = 4\n')
    code, text = run("scan", "--config", str(cfg), "--format", "json")
    assert code == 0 and json.loads(text)["summary"]["passed"]
    out = tmp_path / "report.csv"
    code, text = run("scan", "--config", str(cfg), "--format", "csv", "--output", str(out))
    assert code == 0 and out.read_text().startswith("u,v,w")


def test_scan_exit_code_two_on_failure(tmp_path, monkeypatch):
    def corrupted(cfg, engine=None, tamper=None):
        return real_scan(cfg, engine=engine, tamper=lambda u, v, w, d: -d)

    monkeypatch.setattr(cli, "positivity_scan", corrupted)
    cfg = tmp_path / "scan.toml"
    cfg.write_text('type = "A2"\nmax_length = 2\n')
    code, text = run("scan", "--config", str(cfg))
    assert code == 2 and "FAIL" in text


def test_verified_gate(monkeypatch, capsys):
    assert run("--verified", "dualizing", "--type", "affine:A1", "--parabolic", "1", "--w", "e")[0] == 0
    monkeypatch.setattr(cli, "run_selftest", lambda: (False, ["forced"]))
    assert run("--verified", "dualizing", "--type", "affine:A1", "--parabolic", "1", "--w", "e")[0] == 2


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "kmk.cli", "dualizing", "--type", "affine:A1",
                           "--parabolic", "1", "--w", "e", "--format", "json"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["divisor"][0]["m"] == 1


# -- cache ---------------------------------------------------------------------------

def test_cache_put_get(tmp_path):
    key = cache.cache_key(preset("A2"), 3)
    payload = {"rank": 2, "columns": [], "elements": 0}
    assert cache.cache_put(key, payload, tmp_path)
    assert cache.cache_get(key, tmp_path) == payload
    assert cache.cache_get("0" * 64, tmp_path) is None


def test_cache_key_depends_on_inputs():
    g = preset("A2")
    assert cache.cache_key(g, 3) != cache.cache_key(g, 4)
    assert cache.cache_key(g, 3) != cache.cache_key(preset("B2"), 3)
    assert cache.cache_key(g, 3) != cache.cache_key(g, 3, fingerprint="other")


def test_cache_fingerprint_mismatch_is_a_miss(tmp_path, monkeypatch):
    key = cache.cache_key(preset("A2"), 3)
    cache.cache_put(key, {"rank": 2, "columns": []}, tmp_path)
    monkeypatch.setattr(cache, "convention_fingerprint", lambda: "different")
    assert cache.cache_get(key, tmp_path) is None


def test_corrupt_cache_entry_is_evicted(tmp_path):
    key = cache.cache_key(preset("A2"), 3)
    path = tmp_path / f"{key}.kmk"
    path.write_text("{not json")
    with pytest.warns(RuntimeWarning):
        assert cache.cache_get(key, tmp_path) is None
    assert not path.exists()


def test_engine_round_trip_through_cache(tmp_path):
    W = group("affine:A1")
    eng = LocalizationEngine(W)
    for x in eng.elements(4):
        eng.phi_column(x)
    assert cache.store_engine_cache(eng, 4, tmp_path)
    fresh = LocalizationEngine(W)
    assert cache.load_engine_cache(fresh, 4, tmp_path)
    assert fresh._phi.keys() == eng._phi.keys()
    assert all(fresh._phi[x] == eng._phi[x] for x in eng._phi)


def test_inconsistent_payload_is_evicted(tmp_path):
    W = group("A2")
    eng = LocalizationEngine(W)
    key = cache.cache_key(W.gcm, 3)
    cache.cache_put(key, {"rank": 5, "columns": []}, tmp_path)
    with warnings.catch_warnings(record=True):
        warnings.simplefilter("always")
        assert not cache.load_engine_cache(eng, 3, tmp_path)
    assert not (tmp_path / f"{key}.kmk").exists()


def test_unwritable_cache_degrades(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.warns(RuntimeWarning):
        assert not cache.cache_put("k", {}, blocker / "sub")
