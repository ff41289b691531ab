import csv

import pytest

from mrpgtco.cli import EXIT_CONFIG, EXIT_IO, main, parse_seeds
from mrpgtco.config import ConfigError

SMALL = """
node_count = 20
initial_energy = 0.01
k_override = 3
pso_pop = 8
pso_iter = 8
"""


@pytest.fixture
def cfg(tmp_path):
    path = tmp_path / "small.cfg"
    path.write_text(SMALL)
    return path


def rows(path):
    with open(path) as f:
        return list(csv.reader(line for line in f if not line.startswith("#")))


def test_parse_seeds():
    assert parse_seeds("1-3,7") == [1, 2, 3, 7]
    with pytest.raises(ConfigError):
        parse_seeds("a-b")
    with pytest.raises(ConfigError):
        parse_seeds(",")


def test_run_single_seed(cfg, tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["run", "--config", str(cfg), "--out", str(out)]) == 0
    files = sorted(p.name for p in out.iterdir())
    assert files == ["series_MRP-GTCO_seed1.csv", "summary.csv"]
    assert "FDN=" in capsys.readouterr().out


def test_malformed_config_writes_nothing(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("node_count = lots\n")
    out = tmp_path / "out"
    assert main(["run", "--config", str(bad), "--out", str(out)]) == EXIT_CONFIG
    assert not out.exists()
    assert main(["run", "--config", str(tmp_path / "missing.cfg"), "--out", str(out)]) == EXIT_CONFIG
    assert main(["run", "--seeds", "x", "--out", str(out)]) == EXIT_CONFIG
    assert not out.exists()


def test_unwritable_output(cfg, tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert main(["run", "--config", str(cfg), "--out", str(blocker / "sub")]) == EXIT_IO


def test_summary_has_row_per_seed_and_median(cfg, tmp_path):
    out = tmp_path / "out"
    assert main(["run", "--config", str(cfg), "--out", str(out), "--seeds", "1-5", "--protocol", "lgca"]) == 0
    table = rows(out / "summary.csv")
    assert table[0][:2] == ["protocol", "seed"]
    assert [r[1] for r in table[1:]] == ["1", "2", "3", "4", "5", "median"]


def test_reruns_are_byte_identical(cfg, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    args = ["compare", "--config", str(cfg), "--seeds", "1-2", "--protocol", "mrp-gtco,rleach"]
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b), "--jobs", "2"]) == 0
    names = sorted(p.name for p in a.iterdir())
    assert names == sorted(p.name for p in b.iterdir())
    for name in names:
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_protocol_order_does_not_matter(cfg, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["compare", "--config", str(cfg), "--out", str(a), "--protocol", "lgca,ecagt"]) == 0
    assert main(["compare", "--config", str(cfg), "--out", str(b), "--protocol", "ecagt,lgca,ecagt"]) == 0
    for p in a.iterdir():
        assert p.read_bytes() == (b / p.name).read_bytes()


def test_compare_needs_two_protocols(cfg, tmp_path):
    assert main(["compare", "--config", str(cfg), "--out", str(tmp_path / "o"),
                 "--protocol", "lgca"]) == EXIT_CONFIG


def test_output_dir_from_environment(cfg, tmp_path, monkeypatch):
    target = tmp_path / "env"
    monkeypatch.setenv("MRPGTCO_OUT", str(target))
    assert main(["run", "--config", str(cfg), "--protocol", "rleach"]) == 0
    assert (target / "summary.csv").exists()


def test_sweep_writes_tables(cfg, tmp_path):
    out = tmp_path / "out"
    assert main(["sweep", "--config", str(cfg), "--out", str(out), "--axis", "lambda1",
                 "--values", "0.2,0.8", "--seeds", "1-2"]) == 0
    table = rows(out / "sweep_lambda1.csv")
    assert len(table) == 3
    per_seed = rows(out / "sweep_lambda1_per_seed.csv")
    assert len(per_seed) == 5
    assert main(["sweep", "--config", str(cfg), "--out", str(out), "--axis", "lambda1",
                 "--values", "1.5"]) == EXIT_CONFIG
