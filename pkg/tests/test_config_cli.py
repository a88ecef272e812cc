import csv
import json
import os

import pytest

from elasto_coinv import cli
from elasto_coinv.config import ConfigError, builtin_examples, load_config, resolve_config_path


def test_builtin_examples():
    names = builtin_examples()
    assert {"ex1_bean", "ex2_peanut", "ex2_starfish", "ex3_circle"} <= set(names)


def test_list_examples(capsys):
    assert cli.main(["--list-examples"]) == 0
    out = capsys.readouterr().out.split()
    assert "ex3_circle" in out and "ex1_bean" in out


def test_examples_resolve_from_any_directory_prefix():
    assert resolve_config_path("examples/ex3_circle.cfg").endswith("ex3_circle.cfg")
    with pytest.raises(ConfigError):
        resolve_config_path("no_such_example")


@pytest.mark.parametrize("name", ["ex1_bean", "ex1_bean_exterior", "ex2_peanut", "ex2_starfish", "ex3_circle"])
def test_shipped_configs_match_examples(example_config, name):
    from elasto_coinv.synth import EXAMPLES

    spec = example_config(name).spec
    ref = EXAMPLES[name]
    for field in ("geometry", "geometry_radius", "omega", "field_mode", "impedance", "target", "boundary_radius", "init_radius", "chi0"):
        assert getattr(spec, field) == getattr(ref, field), field
    if spec.field_mode == "point_source":
        assert spec.source == ref.source and spec.scale == ref.scale


def test_overrides(example_config):
    cfg = example_config("ex3_circle", "noise.delta=0.05", "inversion.normal_mode=frozen", "geometry.known_stop=pi")
    assert cfg.spec.noise == 0.05
    assert cfg.inversion.normal_mode == "frozen"
    assert "delta = 0.05" in cfg.to_ini()


@pytest.mark.parametrize(
    "text, overrides",
    [
        ("[bogus]\nx = 1\n", ()),
        ("[material]\nstiffness = 3\n", ()),
        ("[material]\nomega = fast\n", ()),
        ("not an ini file", ()),
        ("", ("noise.delta",)),
        ("", ("nosuch.key=1",)),
        ("", ("geometry.curve=kite",)),
        ("", ("source.position=1",)),
        ("", ("impedance.clamp=maybe",)),
        ("", ("inversion.normal_mode=sideways",)),
    ],
)
def test_config_errors(text, overrides):
    with pytest.raises(ConfigError):
        load_config(text=text, overrides=overrides)


def test_run_config_error_exit_code(tmp_path):
    code, summary = cli.run_experiment("ex3_circle", tmp_path, ["material.omega=x"])
    assert code == cli.EXIT_CONFIG
    assert (tmp_path / "FAILED").exists()
    assert cli.main(["run", "--config", "no_such_example", "--out", str(tmp_path / "b")]) == cli.EXIT_CONFIG


def test_morozov_failure_exit_code(tmp_path):
    # vanishing data: no discrepancy level lies below the data norm
    code, summary = cli.run_experiment("ex3_circle", tmp_path, ["target.g=0"])
    assert code == cli.EXIT_MOROZOV
    assert summary["status"] == "morozov_failure"
    assert (tmp_path / "FAILED").exists()


def test_geometry_error_exit_code(tmp_path):
    code, _ = cli.run_experiment("ex3_circle", tmp_path, ["cauchy.boundary_radius=1.0"])
    assert code == cli.EXIT_GEOMETRY


def test_nonconvergence_writes_partial_artifacts(tmp_path):
    code, summary = cli.run_experiment("ex3_circle", tmp_path, ["inversion.max_iter=3"])
    assert code == cli.EXIT_NOT_CONVERGED
    assert (tmp_path / "FAILED").exists()
    assert summary["steps"] == 3
    with open(tmp_path / "history.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0][:4] == ["n", "E_n", "residual_norm", "alpha_reused"]
    assert len(rows) == 5


def test_diverged_iterate_exit_code(tmp_path):
    code, summary = cli.run_experiment("ex3_circle", tmp_path, ["inversion.init_radius=7.5"])
    assert code == cli.EXIT_NOT_CONVERGED
    assert summary["status"] == "diverged"


@pytest.fixture(scope="module")
def ex3_artifacts(tmp_path_factory):
    out = tmp_path_factory.mktemp("ex3")
    code = cli.main(["run", "--config", "ex3_circle", "--noise", "0.01", "--seed", "7", "--out", str(out)])
    return code, out


def test_run_artifacts(ex3_artifacts):
    code, out = ex3_artifacts
    assert code == cli.EXIT_OK
    for name in ("config.echo", "summary.json", "history.csv", "boundary.csv", "impedance.csv",
                 "boundary.svg", "impedance.svg", "convergence.svg"):
        assert (out / name).exists(), name
    assert not (out / "FAILED").exists()
    summary = json.loads((out / "summary.json").read_text())
    assert summary["status"] == "converged"
    assert 20 <= summary["steps"] <= 150
    assert 1e-7 <= summary["alpha"] <= 1e-3
    assert (out / "boundary.svg").read_text().startswith("<svg")


def test_csv_schemas(ex3_artifacts):
    _, out = ex3_artifacts
    with open(out / "boundary.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["theta", "r_true", "r_init", "r_reconstructed"]
    assert all(float(r[3]) > 0 for r in rows[1:])
    assert all("e" in v for v in rows[1])
    with open(out / "impedance.csv") as fh:
        head = next(csv.reader(fh))
    assert head == ["theta", "chi_true", "chi_reconstructed"]
    with open(out / "history.csv") as fh:
        head = next(csv.reader(fh))
    assert head[4:6] == ["a0", "a1"] and head[-1].startswith("chi")


def test_sweep_empty_lists(tmp_path):
    with pytest.raises(ConfigError):
        cli.sweep("ex3_circle", [], [0], tmp_path)
    with pytest.raises(ConfigError):
        cli.sweep("ex3_circle", [0.0], [], tmp_path)
    assert cli.main(["sweep", "--config", "ex3_circle", "--noise", "", "--out", str(tmp_path)]) == cli.EXIT_CONFIG


def test_sweep_noise_free_seed_independent(tmp_path):
    rows = cli.sweep("ex3_circle", [0.0], [1, 2], tmp_path, overrides=["inversion.max_iter=5"])
    assert len(rows) == 2
    keep = [k for k in cli.SWEEP_COLUMNS if k != "seed"]
    assert [rows[0][k] for k in keep] == [rows[1][k] for k in keep]
    with open(tmp_path / "sweep.csv") as fh:
        table = list(csv.reader(fh))
    assert table[0] == cli.SWEEP_COLUMNS and len(table) == 3
    assert os.path.isdir(tmp_path / "noise0_seed1")


def test_sweep_records_failures(tmp_path):
    rows = cli.sweep("ex3_circle", [0.0, 0.01], [0], tmp_path, overrides=["target.g=0"])
    assert [r["exit_code"] for r in rows] == [cli.EXIT_MOROZOV, cli.EXIT_MOROZOV]
