import json

from rotorlab import cli


def run_cli(*argv):
    return cli.main(list(argv))


def test_graph_export_and_analyze_import(tmp_path):
    gfile = tmp_path / "cycle9.txt"
    assert run_cli("graph", "--family", "cycle", "--size", "9",
                   "--out", str(gfile)) == 0
    text = gfile.read_text()
    assert text.splitlines()[0] == "9 9"

    out = tmp_path / "bounds.json"
    assert run_cli("analyze", "--graph-file", str(gfile),
                   "--out", str(out)) == 0
    payload = json.loads(out.read_text())
    assert payload["n"] == 9
    assert payload["edge_cover_bound"] == 3 * payload["max_k"]


def test_analyze_lazy_family(tmp_path):
    out = tmp_path / "b.json"
    assert run_cli("analyze", "--family", "star", "--size", "6", "--lazy",
                   "--out", str(out)) == 0
    payload = json.loads(out.read_text())
    assert payload["kind"] == "lazy"
    assert payload["sym_divergence_k_bound"] is not None


def test_analyze_matrix_dump(tmp_path):
    mdir = tmp_path / "mats"
    assert run_cli("analyze", "--family", "cycle", "--size", "5",
                   "--matrices-dir", str(mdir)) == 0
    assert (mdir / "P.txt").exists() and (mdir / "H.txt").exists()


def test_scaling_csv_and_reproducibility(tmp_path):
    out1 = tmp_path / "a.csv"
    out2 = tmp_path / "b.csv"
    args = ("scaling", "--family", "cycle", "--builder", "cycle_inward",
            "--sizes", "9,17,33", "--seed", "5")
    assert run_cli(*args, "--out", str(out1)) == 0
    assert run_cli(*args, "--out", str(out2)) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_scaling_json_fits(tmp_path):
    out = tmp_path / "r.json"
    assert run_cli("scaling", "--family", "torus", "--builder", "torus_origin",
                   "--sizes", "3,5,7", "--format", "json",
                   "--out", str(out)) == 0
    payload = json.loads(out.read_text())
    assert payload["fits"]["vertex"]["r2"] > 0.98
    assert [row["vertex_cover_steps"] for row in payload["rows"]] == [16, 80, 224]


def test_exact_quick_passes(capsys):
    assert run_cli("exact", "--quick") == 0
    out = capsys.readouterr().out
    assert "PASS" in out


def test_short_term_cli():
    assert run_cli("short-term", "--family", "complete", "--size", "16",
                   "--builder", "canonical", "--horizons", "10,50") == 0


def test_fuzz_cli():
    assert run_cli("fuzz", "--cases", "10", "--seed", "3", "--max-n", "12") == 0


def test_fuzz_cli_writes_bundles_on_failure(tmp_path, monkeypatch):
    from rotorlab import experiments

    fake = experiments.FuzzResult(
        cases=1, violations=[{"kind": "balance", "details": {}, "seed": 1,
                              "start": 0, "graph": "2 1\n0 1 1\n",
                              "config": "0 1 : 1\n1 1 : 0\n"}],
        max_concentration_residual=0.0,
        max_lazy_concentration_residual=0.0,
        edge_cover_vs_bound_margin=1.0)
    monkeypatch.setattr(experiments, "run_fuzz", lambda **kw: fake)
    out = tmp_path / "replays.json"
    assert run_cli("fuzz", "--cases", "1", "--out", str(out)) == 1
    bundles = json.loads(out.read_text())
    assert bundles[0]["kind"] == "balance"


def test_bad_family_errors():
    assert run_cli("scaling", "--family", "nonsense", "--builder", "canonical",
                   "--sizes", "4,5,6") == 2


def test_builder_family_mismatch_errors():
    assert run_cli("scaling", "--family", "complete", "--builder",
                   "torus_origin", "--sizes", "4,6,8") == 2


def test_missing_size_errors():
    assert run_cli("short-term", "--builder", "canonical") == 2
