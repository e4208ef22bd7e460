import json
from fractions import Fraction

import pytest

from pbpsamp.bp import accept_prob_exact, parity_program, read_program, write_program
from pbpsamp.cli import main
from pbpsamp.report import ExperimentReport, display, rational, run_id
from pbpsamp.scenario import ConfigError, bundled_scenarios, run_scenario, substream


def test_report_formatting():
    assert rational(Fraction(2, 4)) == "1/2"
    assert rational(0) == "0/1"
    assert display(Fraction(1, 3)) == "0.333333"
    assert run_id({"b": 1, "a": 2}) == run_id({"a": 2, "b": 1})


def test_substreams_are_independent():
    assert substream(1, "graph") != substream(1, "hitter")
    assert substream(1, "graph", 0) == substream(1, "graph", 0)


def test_bundled_names():
    assert {"cycle4", "lemma-suite", "corpus"} <= set(bundled_scenarios())


def test_cycle4_scenario():
    r = run_scenario("cycle4")
    assert r.passed
    row = r.rows[0]
    assert row["exact"] == row["estimate"] == "1/2"
    assert row["error"] == "0/1"


def test_lemma_suite_scenario():
    from pbpsamp.scenario import load_config

    cfg = {**load_config("lemma-suite"), "injectivity_n": 3, "trials": 20}
    r = run_scenario(cfg)
    assert r.passed, r.to_csv()
    assert r.schema == "lemma-suite/v1"
    assert r.to_csv().splitlines()[0] == "index,check,passed,checked,violations,detail"


def test_bad_epsilon_is_config_error():
    cfg = {"name": "bad", "n": 2, "epsilon": "2", "target": {"graph": {"kind": "cycle", "vertices": 4}}}
    with pytest.raises(ConfigError):
        run_scenario(cfg)
    with pytest.raises(ConfigError):
        run_scenario({**cfg, "epsilon": "one half"})


def test_report_round_trip(tmp_path):
    r = run_scenario("cycle4")
    paths = r.write(tmp_path, ndjson=True)
    back = ExperimentReport.read(paths["json"])
    assert back.to_csv() == r.to_csv()
    assert paths["ndjson"].read_text().count("\n") == len(r.rows)
    header = paths["csv"].read_text().splitlines()[0].split(",")
    assert header[:5] == ["index", "target", "n", "vertices", "exact"]


def _small_corpus(seed):
    return {
        "name": "mini",
        "a": 1,
        "epsilon": "1/4",
        "seed": seed,
        "inner": {"kind": "random", "size": 24, "search_seeds": 10},
        "hitter": {"kind": "greedy"},
        "corpus": {"count": 4, "vertices": [8, 24], "n": [3, 5]},
    }


def test_same_seed_same_csv():
    assert run_scenario(_small_corpus(3)).to_csv() == run_scenario(_small_corpus(3)).to_csv()
    assert run_scenario(_small_corpus(3)).to_csv() != run_scenario(_small_corpus(4)).to_csv()


def test_undersized_hitter_fails_gate():
    cfg = {
        "name": "weak",
        "n": 4,
        "a": 1,
        "epsilon": "1/4",
        "seed": 0,
        "hitter": {"kind": "random", "size": 1},
        "inner": {"kind": "full"},
        "target": {"graph": {"kind": "random", "vertices": 6}, "u": 0, "v": 0},
    }
    r = run_scenario(cfg)
    assert not r.rows[0]["gate_hitter"]
    assert not r.passed


# -- command line ------------------------------------------------------------------


def test_cli_exact_prob(tmp_path, capsys):
    write_program(tmp_path / "p.json", parity_program(3))
    assert main(["exact-prob", str(tmp_path / "p.json")]) == 0
    assert capsys.readouterr().out.strip() == "1/2"


def test_cli_usage_errors(tmp_path, capsys):
    assert main([]) == 2
    assert main(["exact-prob", str(tmp_path / "missing.json")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"name": "bad", "n": 2, "epsilon": "2", "target": {"graph": {"kind": "cycle", "vertices": 4}}}))
    assert main(["sample", "--config", str(bad), "--out", str(tmp_path)]) == 2
    assert main(["adversary", "prefix-match", "--hitter", str(bad)]) == 2


def test_cli_pipeline(tmp_path, capsys):
    g, b, h, bh, w = (str(tmp_path / f) for f in ("g.json", "b.json", "H.txt", "bh.json", "w.json"))
    assert main(["gen-graph", "--vertices", "10", "--seed", "5", "--out", g]) == 0
    assert main(["graph-to-bp", g, "--u", "1", "--v", "4", "--n", "5", "--check", "--out", b]) == 0
    assert main(["build-hitter", "--program", b, "--epsilon", "1/20", "--out", h]) == 0
    assert main(["verify", "hitter", "--queries", h, "--program", b, "--restrictions", "--epsilon", "1/20"]) == 0
    assert main(["hit-program", b, "--hitter", h, "--out", bh]) == 0
    assert read_program(bh).n == 5
    small = tmp_path / "small.txt"
    small.write_text("11000\n01100\n")
    assert main(["adversary", "parity", "--hitter", str(small), "--out", w]) == 0
    verdict = json.loads((tmp_path / "w.json.verdict.json").read_text())
    assert verdict["ok"] and verdict["probability"] == "1/2"
    assert main(["verify", "sampler", "--queries", str(small), "--program", w, "--epsilon", "1/4"]) == 1


def test_cli_sample_and_report(tmp_path, capsys):
    assert main(["sample", "cycle4", "--out", str(tmp_path), "--ndjson"]) == 0
    assert (tmp_path / "cycle4.ndjson").exists()
    assert main(["report", str(tmp_path / "cycle4.json"), "--format", "csv", "--out", str(tmp_path / "again.csv")]) == 0
    assert (tmp_path / "again.csv").read_text() == (tmp_path / "cycle4.csv").read_text()


def test_cli_config_defaults(tmp_path, capsys):
    cfg = tmp_path / "h.json"
    cfg.write_text(json.dumps({"method": "random", "n": 4, "size": 3}))
    assert main(["build-hitter", "--config", str(cfg), "--seed", "2"]) == 0
    assert len(capsys.readouterr().out.split()) <= 3
    cfg.write_text(json.dumps({"bogus": 1}))
    assert main(["build-hitter", "--config", str(cfg)]) == 2


def test_cli_budget_env(monkeypatch, capsys):
    monkeypatch.setenv("PBPSAMP_ENUM_BUDGET", "10")
    assert main(["build-hitter", "--family", "4,2,1", "--epsilon", "1/4"]) == 2
    assert "budget" in capsys.readouterr().err


def test_program_file_target(tmp_path):
    from pbpsamp.graphs import graph_to_bp, random_consistent_graph

    B = graph_to_bp(random_consistent_graph(12, 2, 4), 0, 3, 5)
    write_program(tmp_path / "b.json", B)
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({
        "name": "file-target", "n": 5, "a": 1, "epsilon": "1/4",
        "target": {"bp": "b.json"}, "hitter": {"kind": "greedy"},
        "inner": {"kind": "random", "size": 30, "search_seeds": 20},
    }))
    assert main(["sample", "--config", str(cfg), "--out", str(tmp_path / "out")]) == 0
    report = ExperimentReport.read(tmp_path / "out" / "file-target.json")
    assert report.rows[0]["exact"] == rational(accept_prob_exact(B).value)
    bad = {**json.loads(cfg.read_text()), "n": 4}
    cfg.write_text(json.dumps(bad))
    assert main(["sample", "--config", str(cfg), "--out", str(tmp_path / "out")]) == 2
