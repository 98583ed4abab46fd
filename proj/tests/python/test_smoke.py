import json
import math
import os

import numpy as np
import pytest

import bergerflow as bf


def test_cap_is_in_class_g():
    s = bf.initial_state("cap_cylinder", n_nodes=512, x_max=10, a=0.0)
    assert len(s) == 512
    assert s.x.shape == (512,)
    v = bf.validate_class(s)
    assert v["verdict"] == "G"
    assert v["smooth_at_origin"]
    assert v["sup_b"] == pytest.approx(1.0, rel=1e-6)


def test_flat_is_g_inf_and_has_no_curvature():
    s = bf.initial_state("flat", n_nodes=256, x_max=5)
    assert bf.validate_class(s)["verdict"] == "G_inf"
    cf = bf.curvature_field(s)
    assert np.max(np.abs(cf.R)) < 1e-8


def test_unit_cylinder_curvatures():
    s = bf.initial_state("cylinder", n_nodes=128, x_max=4, r=1.0)
    assert s.inner == "mirror"
    cf = bf.curvature_field(s)
    np.testing.assert_allclose(cf.k12, 1.0, atol=1e-10)
    np.testing.assert_allclose(cf.k13, 1.0, atol=1e-10)
    np.testing.assert_allclose(cf.k01, 0.0, atol=1e-10)
    np.testing.assert_allclose(cf.R, 6.0, atol=1e-9)


def test_unknown_family_parameter():
    with pytest.raises(bf.InvalidArgument):
        bf.initial_state("flat", n_nodes=64, bogus=1.0)
    with pytest.raises(ValueError):
        bf.initial_state("no_such_family")


def test_flow_advances_and_monitors():
    f = bf.Flow(bf.initial_state("cap_cylinder", n_nodes=256, x_max=8, a=0.0))
    f.step(50)
    assert f.steps == 50
    assert f.time > 0.0
    report = bf.monitor_report(f.state)
    assert report["min_bs"] > -1e-6
    assert report["sup_b"] <= 1.0 + 1e-6


def test_cylinder_series_gives_quarter():
    t = np.linspace(0.0, 0.2499, 400)
    rm = 1.0 / (1.0 - 4.0 * t)
    b2 = 1.0 - 4.0 * t
    e = bf.estimate_T(t, rm, b2)
    assert e["singular"]
    assert e["T_est"] == pytest.approx(0.25, rel=1e-3)
    with pytest.raises(ValueError):
        bf.estimate_T([0.0, 1.0], [1.0], [1.0, 2.0])


def test_bryant_profile_shape():
    p = bf.bryant_profile(sigma_max=10.0)
    assert p.residual < 1e-8
    assert p.phi[0] == pytest.approx(0.0, abs=1e-12)
    assert p.dphi[0] == pytest.approx(1.0, abs=1e-9)
    assert np.all(np.diff(p.phi) > 0)
    assert p.phi_at(5.0) == pytest.approx(float(np.interp(5.0, p.sigma, p.phi)), rel=1e-3)


def test_cylinder_profile_constant():
    p = bf.cylinder_profile(radius=math.sqrt(6.0), sigma_max=3.0)
    np.testing.assert_allclose(p.phi, math.sqrt(6.0))


def test_config_errors_raise():
    bf.validate_config("[initial]\nfamily = flat\n")
    with pytest.raises(bf.ConfigError):
        bf.validate_config("[grid]\nn_nodes = 4\n")
    with pytest.raises(bf.ConfigError):
        bf.validate_config("[nowhere]\nkey = 1\n")


def test_short_run_writes_outputs(tmp_path):
    text = "\n".join([
        "[initial]", "family = flat",
        "[grid]", "n_nodes = 64", "x_max = 4",
        "[run]", "t_max = 0.01",
        "[snapshots]", "every_dt = 0.005",
    ]) + "\n"
    out = tmp_path / "run"
    r = bf.run(text, str(out))
    assert r["exit_code"] == 0
    assert r["termination"] == "t_max"
    assert r["class"] == "G_inf"
    assert r["t_final"] == pytest.approx(0.01, rel=1e-9)
    assert all(r["monitor"].values())
    assert os.path.exists(r["timeseries"])
    a = bf.analyze(str(out))
    assert not a["estimate"]["singular"]
    assert len(a["frames"]) >= 1
