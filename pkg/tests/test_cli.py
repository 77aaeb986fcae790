import json

import pytest

from diagramlab.cli import main
from diagramlab.config import (
    ConfigError,
    RunConfig,
    build_context,
    config_echo,
    context_from_echo,
    parse_config,
)

SMALL = """
seed = 7
engine.seed_count = 2
engine.seed_max_support = 3
engine.target_window = 2
engine.working_window = 30
lab.p = 3
lab.f = 2
audit.n_max = 5
"""


def write_cfg(tmp_path, text=SMALL, name="run.cfg"):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return str(p)


# -- config parsing ----------------------------------------------------------------


def test_parse_config_defaults_and_overrides():
    cfg = parse_config(SMALL)
    assert cfg.seed == 7
    assert cfg.seed_count == 2
    assert cfg.p == 5 and cfg.f == 3 and cfg.m == 2
    assert cfg.resolved_working_window() == 30


def test_parse_config_rejects_unknown_key():
    with pytest.raises(ConfigError):
        parse_config("no.such.key = 1")


def test_parse_config_rejects_bad_window():
    with pytest.raises(ConfigError):
        parse_config("engine.working_window = 2\nengine.target_window = 4")


def test_parse_config_lambda_overrides():
    cfg = parse_config("lambda.value.0 = 2,0,0,0,0,0\nlambda.value.-3 = 1,1,0,0,0,0")
    assert cfg.lambda_overrides[0] == (2, 0, 0, 0, 0, 0)
    assert cfg.lambda_overrides[-3] == (1, 1, 0, 0, 0, 0)


def test_default_working_window_margin():
    cfg = RunConfig()
    assert cfg.resolved_working_window() == 4 + 6 * 8


def test_echo_roundtrip():
    cfg = parse_config(SMALL)
    ctx = build_context(cfg)
    echo = config_echo(ctx)
    rebuilt = context_from_echo(echo)
    assert rebuilt.registry.characters() == ctx.registry.characters()
    assert rebuilt.lam.mode == ctx.lam.mode
    for i in range(-5, 6):
        assert rebuilt.lam.at(i) == ctx.lam.at(i)
    assert rebuilt.mu == ctx.mu


def test_context_from_echo_rejects_garbage():
    with pytest.raises(ConfigError):
        context_from_echo({"p": 5})


# -- commands -----------------------------------------------------------------------


def test_cli_verify_combinatorics(tmp_path):
    rc = main(["verify-combinatorics", "--config", write_cfg(tmp_path),
               "--out", str(tmp_path / "out")])
    assert rc == 0
    assert (tmp_path / "out" / "combinatorics_report.json").exists()
    assert (tmp_path / "out" / "combinatorics_orbits.png").exists()
    assert (tmp_path / "out" / "combinatorics_weights.csv").exists()
    rep = json.loads((tmp_path / "out" / "combinatorics_report.json").read_text())
    orbits = rep["sections"]["delta_orbits"]["orbits"]
    assert orbits[0] == [[], [0], [0, 2], [0, 1, 2], [1, 2], [1]]


def test_cli_verify_combinatorics_small_p_fails(tmp_path):
    cfg = write_cfg(tmp_path, "field.p = 3\nfield.r = 1,1,1\n")
    rc = main(["verify-combinatorics", "--config", cfg, "--out", str(tmp_path / "o")])
    assert rc == 4
    rep = json.loads((tmp_path / "o" / "combinatorics_report.json").read_text())
    assert not rep["sections"]["genericity"]["passed"]


def test_cli_audit(tmp_path):
    rc = main(["audit", "--config", write_cfg(tmp_path), "--out", str(tmp_path / "out")])
    assert rc == 0
    rep = json.loads((tmp_path / "out" / "audit_report.json").read_text())
    g = rep["sections"]["growth"]
    assert g["verdict"] == "nonadmissible"
    assert g["slope"] == 234
    assert g["rows"][0] == {"N": 1, "bound": 234}
    assert (tmp_path / "out" / "audit_growth.csv").exists()
    assert (tmp_path / "out" / "audit_growth.png").exists()


def test_cli_certify_and_replay(tmp_path):
    cfgp = write_cfg(tmp_path)
    out = tmp_path / "out"
    rc = main(["certify", "--config", cfgp, "--out", str(out)])
    assert rc == 0
    cert = json.loads((out / "certificate.json").read_text())
    assert cert["verdict"]["status"] == "certified"
    rc = main(["replay", str(out / "certificate.json"), "--out", str(out)])
    assert rc == 0
    rep = json.loads((out / "replay_report.json").read_text())
    assert rep["sections"]["replay"]["verified"] is True


def test_cli_replay_detects_tamper(tmp_path):
    cfgp = write_cfg(tmp_path)
    out = tmp_path / "out"
    assert main(["certify", "--config", cfgp, "--out", str(out)]) == 0
    cert = json.loads((out / "certificate.json").read_text())
    step = next(s for s in cert["runs"][0]["trace"] if s[0] != "seed")
    step[1][2][0][1] = (step[1][2][0][1] % 7) + 1
    bad = tmp_path / "tampered.json"
    bad.write_text(json.dumps(cert))
    assert main(["replay", str(bad), "--out", str(out)]) == 5


def test_cli_replay_detects_config_tamper(tmp_path):
    cfgp = write_cfg(tmp_path)
    out = tmp_path / "out"
    assert main(["certify", "--config", cfgp, "--out", str(out)]) == 0
    cert = json.loads((out / "certificate.json").read_text())
    # alter one lambda value in the echoed config
    key = next(iter(cert["config"]["lambda"]["values"]))
    coeffs = cert["config"]["lambda"]["values"][key]
    coeffs[0] = (coeffs[0] + 1) % 5
    bad = tmp_path / "begone.json"
    bad.write_text(json.dumps(cert))
    assert main(["replay", str(bad), "--out", str(out)]) == 5


def test_cli_replay_malformed_file(tmp_path):
    bad = tmp_path / "nope.json"
    bad.write_text("{not json")
    assert main(["replay", str(bad), "--out", str(tmp_path)]) == 5


def test_cli_certify_degenerate_exit_3(tmp_path):
    cfgp = write_cfg(tmp_path, SMALL + "lambda.mode = degenerate\n")
    rc = main(["certify", "--config", cfgp, "--out", str(tmp_path / "out")])
    assert rc == 3
    rep = json.loads((tmp_path / "out" / "certify_report.json").read_text())
    assert rep["sections"]["verdict"]["status"] == "not-certified"


def test_cli_verify_finite_small(tmp_path):
    rc = main(["verify-finite", "--config", write_cfg(tmp_path),
               "--out", str(tmp_path / "out")])
    assert rc == 0
    oracle = json.loads((tmp_path / "out" / "finite_oracle_table.json").read_text())
    assert oracle["q"] == 9
    assert len(oracle["entries"]) == 64
    rep = json.loads((tmp_path / "out" / "finite_report.json").read_text())
    assert rep["sections"]["sweep"]["finding_count"] == 0


def test_cli_verify_finite_disabled(tmp_path):
    cfgp = write_cfg(tmp_path, SMALL + "lab.enabled = false\n")
    rc = main(["verify-finite", "--config", cfgp, "--out", str(tmp_path / "out")])
    assert rc == 0
    rep = json.loads((tmp_path / "out" / "finite_report.json").read_text())
    assert "skipped" in rep["sections"]["lab"]


def test_cli_determinism(tmp_path):
    cfgp = write_cfg(tmp_path)
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert main(["certify", "--config", cfgp, "--out", str(out1)]) == 0
    assert main(["certify", "--config", cfgp, "--out", str(out2)]) == 0
    assert (out1 / "certificate.json").read_bytes() == (out2 / "certificate.json").read_bytes()
    assert (out1 / "certify_report.json").read_bytes() == (out2 / "certify_report.json").read_bytes()


def test_cli_seed_flag_changes_battery(tmp_path):
    cfgp = write_cfg(tmp_path)
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert main(["certify", "--config", cfgp, "--out", str(out1), "--seed", "1"]) == 0
    assert main(["certify", "--config", cfgp, "--out", str(out2), "--seed", "2"]) == 0
    c1 = json.loads((out1 / "certificate.json").read_text())
    c2 = json.loads((out2 / "certificate.json").read_text())
    assert c1["digest"] != c2["digest"]


def test_cli_json_flag(tmp_path, capsys):
    rc = main(["audit", "--config", write_cfg(tmp_path),
               "--out", str(tmp_path / "out"), "--json"])
    assert rc == 0
    out = capsys.readouterr().out
    parsed = json.loads(out)
    assert parsed["command"] == "audit"
