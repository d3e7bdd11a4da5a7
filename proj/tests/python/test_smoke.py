import json
import math

import pytest

import isingmdp as im


def test_energy_examples():
    minus = im.SpinConfiguration.all_minus(4)
    assert im.hamiltonian(minus) == pytest.approx(-56)
    assert im.hamiltonian(im.SpinConfiguration.all_plus(4)) == pytest.approx(-72)
    assert im.hamiltonian(minus.flip(0, 0)) == pytest.approx(-41)


def test_classification_and_relaxation():
    sigma = im.stripe_pair(32, 13, 13)
    assert im.is_robust(sigma)
    assert im.classify_x(sigma) == (13, 13)
    assert im.relax(sigma, seed=3) == sigma
    lone = im.SpinConfiguration.all_minus(8).flip(2, 2)
    assert im.relax(lone, kappa=100000) == im.SpinConfiguration.all_minus(8)


def test_downhill_fractions():
    sigma = im.stripe_pair(12, 5, 3).flip(4, 1)
    dist = im.downhill_absorption(sigma)
    by_state = {}
    for config, frac, _ in dist:
        by_state.setdefault(im.classify_x(config), []).append(frac)
    assert by_state[(5, 3)] == ["5/9"]
    assert sum(p for _, _, p in dist) == pytest.approx(1.0)


def test_values_and_crossing():
    values = im.family_values(32, "x.a1", 0.5)
    assert values["2,0"] == pytest.approx(6 / 7, abs=1e-12)
    assert values["2,2"] == pytest.approx(im.analytic_value_x(2, 2, 0.5), abs=1e-12)
    assert im.lambda_crossing() == pytest.approx(15 / 17, abs=1e-4)
    moments = im.hitting_time_moments(32, "x.a1")
    assert moments["2,0"] == pytest.approx((4 / 3, 8 / 9))


def test_kernel_rows_match():
    rows = im.verify_kernel(12)
    assert rows and all(r["match"] for r in rows)


def test_simulate_is_reproducible():
    config = json.dumps({"n": 16, "start_state": [5, 5], "replications": 30, "master_seed": 4})
    a = im.simulate(config, "x.a1")
    b = im.simulate(config, "x.a1")
    assert a == b
    assert all(t is not None and t > 0 for t in a)
    assert not math.isnan(sum(a) / len(a))


def test_config_errors():
    with pytest.raises(im.ConfigError):
        im.simulate(json.dumps({"n": 2}), "x.a1")
    with pytest.raises(ValueError):
        im.simulate("{}", "x.a9")


def test_run_command(tmp_path):
    config = json.dumps({"n": 12, "output_dir": str(tmp_path)})
    code, outputs, log = im.run_command("verify-kernel", config)
    assert code == 0
    assert "kernel_report.csv" in outputs
    assert (tmp_path / "manifest.json").exists()
