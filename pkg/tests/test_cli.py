import json
from pathlib import Path

import numpy as np
import pytest

from dissipation_lab import cli
from dissipation_lab.output import read_csv

CONFIGS = Path(__file__).resolve().parent.parent / "configs"
SCENARIO_FILES = ["classical", "langevin", "quantum", "phase", "spectral", "doubling"]


@pytest.fixture
def outdir(tmp_path, monkeypatch):
    out = tmp_path / "out"
    monkeypatch.setenv(cli.OUTPUT_ENV, str(out))
    return out


def write_cfg(tmp_path, text):
    path = tmp_path / "cfg.ini"
    path.write_text(text)
    return str(path)


def test_list_scenarios(capsys):
    assert cli.main(["list-scenarios"]) == 0
    out = capsys.readouterr().out
    for name in SCENARIO_FILES + ["acceptance"]:
        assert name in out


def test_unknown_key_exit_1(tmp_path, outdir, capsys):
    cfg = write_cfg(tmp_path, "[scenario]\nname = classical\n[params]\ngamma_typo = 0.2\n")
    assert cli.main(["run", cfg]) == 1
    assert "gamma_typo" in capsys.readouterr().err


def test_unknown_section_and_bad_values(tmp_path, outdir, capsys):
    assert cli.main(["run", write_cfg(tmp_path, "[scenario]\nname = classical\n[extras]\na = 1\n")]) == 1
    assert "extras" in capsys.readouterr().err
    assert cli.main(["run", write_cfg(tmp_path, "[scenario]\nname = classical\n[params]\nm = heavy\n")]) == 1
    assert "m" in capsys.readouterr().err
    assert cli.main(["run", write_cfg(tmp_path, "[scenario]\nname = nonsense\n")]) == 1
    assert cli.main(["run", str(tmp_path / "missing.ini")]) == 1


def test_validation_failure_exit_1(tmp_path, outdir, capsys):
    cfg = write_cfg(tmp_path, "[scenario]\nname = classical\n[params]\ngamma = 5\n")
    assert cli.main(["run", cfg]) == 1
    assert "gamma" in capsys.readouterr().err


def test_numeric_failure_exit_2(tmp_path, outdir, capsys):
    cfg = write_cfg(tmp_path, "[scenario]\nname = quantum\n[numerics]\nr_max = 4\n"
                              "t_end = 13\ndt = 0.05\n")
    assert cli.main(["run", cfg]) == 2
    assert "r_max" in capsys.readouterr().err


@pytest.mark.parametrize("name", SCENARIO_FILES)
def test_shipped_configs_run(name, outdir):
    assert cli.main(["run", str(CONFIGS / f"{name}.ini")]) == 0
    files = sorted(outdir.iterdir())
    assert files
    for f in files:
        first = f.read_text().splitlines()[0]
        if f.suffix == ".csv":
            assert first.startswith("# producer=dissipation_lab.") and "config_sha256=" in first
        else:
            meta = json.loads(f.read_text())["_meta"]
            assert meta["producer"].startswith("dissipation_lab.") and len(meta["config_sha256"]) == 64


def test_classical_drift(outdir):
    assert cli.main(["run", str(CONFIGS / "classical.ini")]) == 0
    header, data = read_csv(outdir / "classical_observables.csv")
    for col in ("C", "J2"):
        v = data[:, header.index(col)]
        assert np.max(np.abs(v - v[0])) / abs(v[0]) < 1e-8


@pytest.mark.parametrize("name", ["classical", "langevin", "doubling"])
def test_byte_identical_rerun(name, tmp_path, monkeypatch):
    contents = []
    for run in ("a", "b"):
        out = tmp_path / run
        monkeypatch.setenv(cli.OUTPUT_ENV, str(out))
        assert cli.main(["run", str(CONFIGS / f"{name}.ini")]) == 0
        contents.append({f.name: f.read_bytes() for f in sorted(out.iterdir())})
    assert contents[0] == contents[1]


def test_config_hash_tracks_content(tmp_path):
    a = cli.parse_config_text("[scenario]\nname = classical\n")
    b = cli.parse_config_text("[scenario]\nname = classical\n[params]\ngamma = 0.3\n")
    c = cli.parse_config_text("[scenario]\nname = classical\n[output]\ndirectory = elsewhere\n")
    assert a.config_hash != b.config_hash
    assert a.config_hash == c.config_hash


def test_output_env_override(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv(cli.OUTPUT_ENV, raising=False)
    cfg = cli.parse_config_text("[scenario]\nname = spectral\n[output]\ndirectory = here\n")
    assert cfg.output_dir == tmp_path / "here"
    monkeypatch.setenv(cli.OUTPUT_ENV, str(tmp_path / "there"))
    cfg = cli.parse_config_text("[scenario]\nname = spectral\n[output]\ndirectory = here\n")
    assert cfg.output_dir == tmp_path / "there"
    assert cli.execute(cfg) == 0
    assert (tmp_path / "there" / "spectral.json").exists()


def test_spectral_json_content(outdir):
    assert cli.main(["run", str(CONFIGS / "spectral.ini")]) == 0
    rep = json.loads((outdir / "spectral.json").read_text())
    assert {"f0", "f2", "f4", "terms", "total"} <= set(rep)


def test_phase_reads_vertex_csv(outdir):
    assert cli.main(["run", str(CONFIGS / "phase.ini")]) == 0
    rep = json.loads((outdir / "phase.json").read_text())
    assert set(rep) >= {"area", "L2", "theta"}
    assert rep["theta"] == rep["area"] / rep["L2"]


def test_doubling_csv_columns(outdir):
    assert cli.main(["run", str(CONFIGS / "doubling.ini")]) == 0
    header, data = read_csv(outdir / "overlaps.csv")
    assert header == ["theta", "N", "overlap"]
    assert np.all((data[:, 2] >= 0) & (data[:, 2] <= 1))
