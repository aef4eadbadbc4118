import json
from fractions import Fraction as F

import numpy as np
import pytest

from hamkit import ConfigError
from hamkit.cli import EXAMPLE_CONFIG, exit_status, main, run
from hamkit.config import parse_config

from conftest import quartic

CUSTOM = """\
[problem]
variant = symmetric

[kernel]
name = lidstone-table
t1 = 0
t2 = 1
k = 1
lower = 0, 0, 0, -1/6; 0, 1/3, 0, 1/6; 0, -1/2; 0, 1/6
upper = 0; 0, 1/3, -1/2, 1/6; 0; -1/6, 1/6

[split]
f_up = 1
f_down = 1/2

[params]
b = 1
c = 1/4
"""


def write(tmp_path, text, name="problem.ini"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_example_config_parses():
    cfg = parse_config(EXAMPLE_CONFIG)
    assert cfg.variant == "symmetric"
    assert cfg.kernel.builtin == "lidstone"
    assert cfg.params == {"a": 0, "b": 1, "c": F(1, 4), "d": 0}
    assert isinstance(cfg.params["c"], F)


@pytest.mark.parametrize("text", [EXAMPLE_CONFIG, CUSTOM])
def test_round_trip(text):
    cfg = parse_config(text)
    again = parse_config(cfg.to_ini())
    assert again == cfg
    assert parse_config(again.to_ini()) == again


def test_report_embeds_config():
    cfg = parse_config(EXAMPLE_CONFIG)
    report = run("certify", cfg)
    assert parse_config(report["config"]) == cfg


def test_custom_kernel_matches_builtin():
    cfg = parse_config(CUSTOM)
    report = run("solve", cfg)
    assert report["kernel"] == "lidstone-table"
    assert report["certificate"]["thresholds"]["I2_exact"] == "5/384"
    assert report["solution"]["converged"]
    builtin = run("solve", cfg.replace(kernel=parse_config(EXAMPLE_CONFIG).kernel))
    assert report["solution"]["residual"] == pytest.approx(builtin["solution"]["residual"], abs=1e-15)
    assert report["validation"]["functionals"] == pytest.approx(builtin["validation"]["functionals"], abs=1e-15)


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("[split]\nf_up = 1\n", "f_up and f_down"),
        ("[split]\nf_up = 1 +\nf_down = 0\n", "f_up"),
        ("[split]\nf_up = y\nf_down = 0\n", "f_up"),
        ("[split]\nf_up = 1\nf_down = 0\n[bogus]\nq = 1\n", "unknown section"),
        ("[split]\nf_up = 1\nf_down = 0\nextra = 2\n", "unknown keys"),
        ("[problem]\nvariant = odd\n[split]\nf_up = 1\nf_down = 0\n", "variant"),
        ("[kernel]\nbuiltin = nope\n[split]\nf_up = 1\nf_down = 0\n", "builtin"),
        ("[kernel]\nbuiltin = lidstone\nlower = 1\n[split]\nf_up = 1\nf_down = 0\n", "not both"),
        ("[kernel]\nlower = 1\n[split]\nf_up = 1\nf_down = 0\n", "both lower and upper"),
        ("[kernel]\nlower = 1\nupper = 2\n[split]\nf_up = 1\nf_down = 0\n", "crease"),
        ("[split]\nf_up = 1\nf_down = 0\n[params]\nb = 1\n", "at least b and c"),
        ("[split]\nf_up = 1\nf_down = 0\n[params]\nb = 1\nc = 1/0\n", "cannot parse"),
        ("[split]\nf_up = 1\nf_down = 0\n[solver]\ngrid_points = many\n", "integer"),
        ("[split]\nf_up = 1\nf_down = 0\n[solver]\ndamping = 2\n", "damping"),
        ("not an ini", "malformed"),
    ],
)
def test_config_errors(text, fragment):
    with pytest.raises(ConfigError, match=fragment):
        parse_config(text)


def test_config_error_exit_code(tmp_path, capsys):
    path = write(tmp_path, "[split]\nf_up = exp(x\nf_down = 0\n")
    assert main(["certify", "--config", path]) == 2
    err = capsys.readouterr().err
    assert "line 1, column" in err or "column" in err
    assert main(["certify", "--config", str(tmp_path / "missing.ini")]) == 2
    assert main(["certify"]) == 2
    assert main(["reproduce", "--config", path]) == 2


def test_certify_example_passes(tmp_path):
    assert main(["certify", "--config", write(tmp_path, EXAMPLE_CONFIG)]) == 0


def test_certify_large_up_part_fails(tmp_path):
    text = EXAMPLE_CONFIG.replace("f_up = 1 + x/2", "f_up = 100")
    out = tmp_path / "out"
    assert main(["certify", "--config", write(tmp_path, text), "--out", str(out)]) == 1
    report = json.loads((out / "report.json").read_text())
    cert = report["certificate"]
    assert not cert["satisfied"]
    assert cert["margins"]["m2"] == pytest.approx(1 - 100 * 5 / 384)
    assert cert["bounds"]["cond2_upper"] == "384/5"


def test_hypotheses_on_lidstone(tmp_path):
    out = tmp_path / "h"
    code = main(["hypotheses", "--config", write(tmp_path, EXAMPLE_CONFIG), "--out", str(out), "--grid", "41"])
    assert code == 0
    report = json.loads((out / "report.json").read_text())
    hyps = report["hypotheses"]
    for name in ("H1", "H3", "H4i", "H4ii", "H5", "gprop"):
        assert hyps[name]["passed"], name
    assert not hyps["H2"]["passed"]
    assert hyps["H2"]["witness"] is not None and hyps["H2"]["grid_size"] == 41
    assert "H2" in (out / "report.txt").read_text()


def test_hypotheses_general_variant_fails(tmp_path):
    text = EXAMPLE_CONFIG.replace("variant = symmetric", "variant = general")
    assert main(["hypotheses", "--config", write(tmp_path, text), "--grid", "21"]) == 1


def test_search_when_params_absent():
    text = EXAMPLE_CONFIG.split("[params]")[0]
    report = run("certify", parse_config(text))
    assert report["search"]["found"]
    assert report["certificate"]["satisfied"]
    assert report["exit_status"] == 0


def test_invalid_split_not_certified():
    text = EXAMPLE_CONFIG.replace("f_down = 1/(1+x)", "f_down = x")
    report = run("certify", parse_config(text))
    assert report["certificate"] is None
    assert not report["split_check"]["passed"]
    assert report["exit_status"] == 1


def test_solve_writes_tables(tmp_path):
    out = tmp_path / "s"
    text = EXAMPLE_CONFIG.replace("f_up = 1 + x/2", "f_up = 1").replace("f_down = 1/(1+x)", "f_down = 1/2")
    assert main(["solve", "--config", write(tmp_path, text), "--out", str(out), "--grid", "65"]) == 0
    assert {p.name for p in out.iterdir()} == {"report.json", "report.txt", "solution.tsv", "residuals.tsv"}
    table = np.loadtxt(out / "solution.tsv")
    assert table.shape == (65, 2)
    assert np.max(np.abs(table[:, 1] - 1.5 * quartic(table[:, 0]))) <= 1e-15
    residuals = np.loadtxt(out / "residuals.tsv", ndmin=2)
    assert residuals[-1, 1] <= 1e-10


def test_strictness_flag(tmp_path):
    path = write(tmp_path, EXAMPLE_CONFIG)
    assert main(["certify", "--config", path, "--strictness-eps", "0.01"]) == 1
    assert main(["certify", "--config", path, "--strictness-eps", "0.001"]) == 0


def test_exit_status_pure():
    report = run("certify", parse_config(EXAMPLE_CONFIG))
    copy = json.loads(json.dumps(report))
    assert exit_status(copy) == exit_status(copy) == report["exit_status"] == 0
    copy["certificate"]["satisfied"] = False
    assert exit_status(copy) == 1
    with pytest.raises(ValueError):
        exit_status({"command": "other"})


def test_reproduce(tmp_path, capsys):
    out = tmp_path / "r"
    assert main(["reproduce", "--out", str(out)]) == 0
    text = capsys.readouterr().out
    for value in ("5/384", "277/49152", "497/98304", "384/5", "12288/277"):
        assert value in text
    report = json.loads((out / "report.json").read_text())
    assert all(c["passed"] for c in report["reproduction"].values())
    assert report["certificate"]["satisfied"] and report["solution"]["converged"]
