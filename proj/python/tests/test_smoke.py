import math
import os

import pytest

import xyflow


def test_kernel_flat_at_large_time():
    k = xyflow.kernel(0.3, 2.0, 50.0)
    assert abs(k.value - 1.0) < 1e-12
    assert k.trunc_error <= 1e-12


def test_log_kernel_matches_kernel():
    for t in (0.05, 0.3, 2.0):
        k = xyflow.kernel(1.0, 4.0, t, 1e-14)
        lk = xyflow.log_kernel(1.0, 4.0, t, 1e-14)
        assert abs(math.log(k.value) - lk.value) < 1e-10


def test_expansion_coefficients():
    e = xyflow.expansion(2.0)
    h = math.exp(-2.0)
    assert e.c1 == pytest.approx(-2 * h)
    assert e.c2 == pytest.approx(-2 * h * h)
    assert e.c3 == pytest.approx(-8 / 3 * h**3)
    with pytest.raises(ValueError):
        xyflow.expansion(0.5)


def test_sampler_mean_resultant():
    t = 0.7
    xs = xyflow.sample_steps(0.0, t, 200000, seed=3)
    c = sum(math.cos(x) for x in xs) / len(xs)
    assert abs(c - math.exp(-t)) < 0.01


def test_energies():
    assert xyflow.initial_energy([0.0] * 16, 2, 4, 1.0, 1.0) == pytest.approx(-48.0)
    x = [0.1 * i for i in range(8)]
    y = [math.pi] * 8
    e = xyflow.dynamical_energy(x, y, 1, 8, 2.0, 1.0, 0.1, 2.0)
    r = [2 * math.pi - a for a in x]
    assert xyflow.dynamical_energy(r, y, 1, 8, 2.0, 1.0, 0.1, 2.0) == pytest.approx(e, abs=1e-10)
    with pytest.raises(ValueError):
        xyflow.initial_energy([0.0] * 3, 2, 4)


def test_degenerate_pair_and_window():
    r = xyflow.find_maximizers(0.2, math.log(10.0))
    assert r["degenerate"]
    assert r["maximizers"][0] == pytest.approx(math.pi / 2, abs=1e-9)
    assert r["maximizers"][1] == pytest.approx(3 * math.pi / 2, abs=1e-9)
    w = xyflow.transition_window(1.0, 0.2)
    cf = xyflow.closed_form_window(0.2)
    assert w is not None and cf is not None
    assert w[0] == pytest.approx(cf[0], abs=1e-4)
    assert w[1] == pytest.approx(cf[1], abs=1e-4)


def test_run_chain_is_reproducible():
    a = xyflow.run_chain(2, 4, 1.0, 1.0, 0.1, 1.0, sweeps=200, burn_in=50, seed=11)
    b = xyflow.run_chain(2, 4, 1.0, 1.0, 0.1, 1.0, sweeps=200, burn_in=50, seed=11)
    assert a["m_sin"] == b["m_sin"]
    assert len(a["energy"]) == 150
    assert 0.0 < a["acceptance"] <= 1.0


def test_probe_flat_at_large_time():
    f, err = xyflow.conditional_density(1, 1.0, 1.0, 0.2, 50.0, sweeps=400, burn_in=100, seed=1)
    assert max(abs(v - 1.0) for v in f) < 1e-6
    oracle = xyflow.oracle_density(1.0, 1.0, 0.2, 50.0)
    assert xyflow.tv_distance([1.0] * len(oracle), oracle) < 1e-6


def test_config_round_trip_and_run(tmp_path):
    text = "[experiment]\nkind=window\nseed=4\n[model]\nbeta=1\nh=0.2\nt=2\n"
    canon = xyflow.canonical_config(text)
    assert xyflow.canonical_config(canon) == canon
    assert len(xyflow.config_hash(text)) == 16
    code, artifacts, _ = xyflow.run(text, str(tmp_path))
    assert code == 0
    assert "window.csv" in artifacts
    assert os.path.exists(tmp_path / "manifest.csv")


def test_config_error_lists_line():
    with pytest.raises(xyflow.ConfigError, match="line 4"):
        xyflow.canonical_config("[experiment]\nkind=window\nseed=1\nbeta = -1\n")
