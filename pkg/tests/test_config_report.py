import json

import numpy as np
import pytest

from eigenmp.config import ConfigError, build_domain, build_operator, load_config
from eigenmp.operators import eval_jet, jet
from eigenmp.report import Report, emit


INI = """
[common]
operator = zoo:neg_u_xx
domain = interval 0 1
h = 0.01
rng_seed = 3

[mu1]
eps_list = 0.2 0.1 0.05
tol = 0.05
"""


def test_ini_config_parses_and_resolves(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text(INI)
    cfg = load_config(path)
    merged = cfg.resolve("mu1")
    assert merged["operator"] == "zoo:neg_u_xx"
    assert merged["eps_list"] == [0.2, 0.1, 0.05]
    assert merged["tol"] == 0.05
    assert merged["rng_seed"] == 3
    # command sections fall back to common + defaults
    assert cfg.resolve("eigen")["h"] == 0.01
    assert cfg.resolve("eigen")["lambda_cap"] == 30.0


def test_json_config_equivalent(tmp_path):
    data = {"common": {"operator": "zoo:neg_u_xx", "domain": "interval 0 1", "h": 0.01},
            "mu1": {"eps_list": [0.2, 0.1], "tol": 0.05}}
    path = tmp_path / "run.json"
    path.write_text(json.dumps(data))
    cfg = load_config(path)
    assert cfg.resolve("mu1")["eps_list"] == [0.2, 0.1]


def test_unknown_keys_and_sections_rejected(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("[common]\nopertor = zoo:neg_u_xx\n")
    with pytest.raises(ConfigError, match="unknown key"):
        load_config(path)
    path.write_text("[mystery]\nh = 0.1\n")
    with pytest.raises(ConfigError, match="unknown config section"):
        load_config(path)


def test_nonpositive_values_rejected(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("[common]\nh = -0.1\n")
    with pytest.raises(ConfigError, match="positive"):
        load_config(path)


def test_build_domain_descriptors():
    assert build_domain("interval 0 1").shape == "interval"
    assert build_domain("rectangle 0 1 0 2").params == (0.0, 1.0, 0.0, 2.0)
    assert build_domain("disk 0 0 1.5").params[-1] == 1.5
    with pytest.raises(ConfigError):
        build_domain("triangle 0 1 2")


def test_build_linear_operator_from_expressions():
    spec, dom = build_operator(
        {"operator": "linear", "domain": "interval 0 1", "b1": "2*x", "c": "0"}
    )
    # F[u] = -2xu': at (x=0.5, p=1): -1
    assert eval_jet(spec, jet([0.5], 0.0, [1.0], [[0.0]])) == pytest.approx(-1.0)
    spec2, _ = build_operator(
        {"operator": "linear", "domain": "rectangle 0 1 0 1", "a1": "1", "a2": "abs(x)^2"}
    )
    val = eval_jet(spec2, jet([0.5, 0.5], 0.0, [0.0, 0.0], np.diag([1.0, 1.0])))
    assert val == pytest.approx(-(1.0 + 0.25))


def test_build_operator_rejects_bad_requests():
    with pytest.raises(ConfigError):
        build_operator({"operator": "linear"})  # no domain
    with pytest.raises(ConfigError):
        build_operator({"operator": "mystery"})
    with pytest.raises(KeyError):
        build_operator({"operator": "zoo:nope"})


def test_report_round_trip_and_determinism(tmp_path):
    def make():
        rep = Report(command="eigen", seed=1, backend="python")
        rep.add({"type": "eigen", "method": "blowup", "domain": "interval 0 1",
                 "h": 0.01, "eps": None, "lambda_lo": 1 / 3, "lambda_hi": 0.34,
                 "iterations": 12})
        rep.add({"type": "mp", "holds": False, "max_positive_part": np.float64(0.5),
                 "iterations": 7, "decided": "stalled"})
        return rep

    out1, out2 = tmp_path / "a", tmp_path / "b"
    emit(make(), out1)
    emit(make(), out2)
    j1 = (out1 / "report.json").read_bytes()
    assert j1 == (out2 / "report.json").read_bytes()
    assert (out1 / "eigen.csv").read_bytes() == (out2 / "eigen.csv").read_bytes()
    # loss-free: records survive the JSON round trip
    loaded = json.loads(j1)
    rep = make()
    assert loaded["records"] == rep.as_dict()["records"]
    # numpy scalars were coerced to plain floats
    assert isinstance(loaded["records"][1]["max_positive_part"], float)
    header = (out1 / "eigen.csv").read_text().splitlines()[0]
    assert header == "method,domain,h,eps,lambda_lo,lambda_hi,iterations"
