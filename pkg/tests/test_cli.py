import csv
import json

import numpy as np
import pytest

from egorank.cli import derive_seed, main, parse_int_list
from egorank.errors import ConfigError

SMALL_SBM = {"sizes": [40, 40, 40], "p_in": 0.25, "p_out": 0.02, "rng_seed": 1}


@pytest.fixture
def sbm_files(tmp_path):
    cfg = tmp_path / "sbm.json"
    cfg.write_text(json.dumps(SMALL_SBM))
    data = tmp_path / "data"
    assert main(["gen", "--sbm", str(cfg), "--out", str(data)]) == 0
    return cfg, data


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_gen_outputs(sbm_files):
    _, data = sbm_files
    assert (data / "edges.txt").stat().st_size > 0
    labels = (data / "labels.tsv").read_text().splitlines()
    assert len(labels) == 120 and labels[0] == "0\tc0"
    assert (data / "id_map.tsv").read_text().splitlines()[5] == "5\t5"


def test_extract(sbm_files, tmp_path):
    _, data = sbm_files
    out = tmp_path / "view"
    assert main(["extract", "--edges", str(data / "edges.txt"), "--observer", "0", "--out", str(out)]) == 0
    nodes = _rows(out / "view_nodes.csv")
    assert nodes[0]["node"] == "0" and nodes[0]["level"] == "0"
    assert all(int(n["visible_degree"]) <= int(n["true_degree"]) for n in nodes)


def test_rank_json(sbm_files, tmp_path):
    _, data = sbm_files
    out = tmp_path / "rank"
    args = ["rank", "--edges", str(data / "edges.txt"), "--labels", str(data / "labels.tsv"),
            "--observer", "0", "--method", "ppr_push", "--strategy", "observer_plus_top", "--k", "3",
            "--out", str(out)]
    assert main(args) == 0
    doc = json.loads((out / "scores_ppr_push.json").read_text())
    scores = [s["score"] for s in doc["scores"]]
    assert scores == sorted(scores, reverse=True)
    assert "0" not in {s["node"] for s in doc["scores"]}


def test_classify_prior(sbm_files, tmp_path):
    _, data = sbm_files
    out = tmp_path / "cls"
    args = ["classify", "--edges", str(data / "edges.txt"), "--labels", str(data / "labels.tsv"),
            "--observer", "0", "--scope", "level1", "--prior", "0.5", "--ev-nodes", "0", "--out", str(out)]
    assert main(args) == 0
    doc = json.loads((out / "prediction.json").read_text())
    cm = doc["confusion"]
    assert cm["a"] + cm["b"] + cm["c"] + cm["d"] == len(doc["predictions"])
    assert set(doc["metrics"]) == {"accuracy", "tpr", "fpr"}


def test_compare(sbm_files, tmp_path):
    _, data = sbm_files
    out = tmp_path / "cmp"
    args = ["compare", "--edges", str(data / "edges.txt"), "--labels", str(data / "labels.tsv"),
            "--observer", "0", "--out", str(out)]
    assert main(args) == 0
    summary = json.loads((out / "auc.json").read_text())
    assert set(summary["auc"]) == {"common", "adamic_adar", "pagerank_escape", "ppr"}
    for m in summary["auc"]:
        rows = _rows(out / f"roc_{m}.csv")
        assert (rows[0]["fpr"], rows[0]["tpr"]) == ("0.0", "0.0")
    a = summary["auc"]
    expected = (a["ppr"] - a["pagerank_escape"]) / (a["pagerank_escape"] - 0.5)
    assert summary["relative_improvement_ppr_over_pagerank_escape"] == pytest.approx(expected)


def test_compare_single_class_is_data_error(sbm_files, tmp_path):
    _, data = sbm_files
    same = tmp_path / "same.tsv"
    same.write_text("".join(f"{i}\tU\n" for i in range(120)))
    args = ["compare", "--edges", str(data / "edges.txt"), "--labels", str(same), "--observer", "0",
            "--out", str(tmp_path / "x")]
    assert main(args) == 3


def test_sweep_single_cell(sbm_files, tmp_path):
    cfg, _ = sbm_files
    out = tmp_path / "sweep"
    assert main(["sweep-ev", "--sbm", str(cfg), "--k", "1", "--rounds", "1", "--out", str(out)]) == 0
    rows = _rows(out / "sweep_ev.csv")
    assert sorted(r["scope"] for r in rows) == ["level1", "within2"]
    assert rows[0]["seed"] == str(derive_seed(0, 0, 1, 0))


def test_sweep_skips_unreachable_k(sbm_files, tmp_path):
    cfg, _ = sbm_files
    out = tmp_path / "sweep"
    args = ["sweep-ev", "--sbm", str(cfg), "--strategy", "high_degree_positive", "--k", "1,500",
            "--out", str(out)]
    assert main(args) == 0
    assert {r["k"] for r in _rows(out / "sweep_ev.csv")} == {"1"}
    skipped = json.loads((out / "sweep_ev.json").read_text())["skipped"]
    assert skipped[0]["k"] == 500


def test_sweep_is_byte_identical(sbm_files, tmp_path):
    cfg, _ = sbm_files
    outs = [tmp_path / "a", tmp_path / "b"]
    for out in outs:
        main(["sweep-ev", "--sbm", str(cfg), "--k", "1:4", "--rounds", "3", "--seed", "9", "--out", str(out)])
    for name in ("sweep_ev.csv", "sweep_ev_mean.csv"):
        assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()


def test_convergence(sbm_files, tmp_path):
    cfg, _ = sbm_files
    outs = [tmp_path / "a", tmp_path / "b"]
    for out in outs:
        assert main(["convergence", "--sbm", str(cfg), "--epsilon", "1e-2,1e-4,1e-6,1e-8,1e-10",
                     "--out", str(out)]) == 0
    rows = _rows(outs[0] / "convergence.csv")
    power = {float(r["epsilon"]): r for r in rows if r["solver"] == "power"}
    assert float(power[1e-10]["l1_error"]) == 0.0
    for r in rows:
        if r["solver"] == "push":
            assert float(r["l1_error"]) <= float(r["error_bound"]) + 1e-9
    # error shrinks geometrically with the tolerance for both solvers
    for solver in ("power", "push"):
        errs = [float(r["l1_error"]) for r in rows if r["solver"] == solver and float(r["epsilon"]) <= 1e-4]
        errs = [e for e in errs if e > 0]
        assert all(b < a / 10 for a, b in zip(errs, errs[1:]))
    # identical apart from wall-clock time
    strip = [[{k: v for k, v in r.items() if k != "wall_time_ms"} for r in _rows(o / "convergence.csv")]
             for o in outs]
    assert strip[0] == strip[1]


@pytest.mark.parametrize("argv,code", [
    (["compare", "--alpha", "1.5"], 2),
    (["compare", "--edges", "/no/such/file", "--observer", "a"], 2),
    (["compare", "--rounds", "0"], 2),
    (["sweep-ev", "--strategy", "psychic"], 2),
])
def test_config_errors(argv, code, tmp_path):
    assert main(argv + ["--out", str(tmp_path)]) == code


def test_data_error_exit_code(tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("a b\nc\n")
    assert main(["extract", "--edges", str(bad), "--observer", "a", "--out", str(tmp_path)]) == 3


def test_argparse_error_exit_code():
    with pytest.raises(SystemExit) as err:
        main(["compare", "--hops", "two"])
    assert err.value.code == 2


def test_parse_int_list():
    assert parse_int_list("3", []) == [3]
    assert parse_int_list("2:5", []) == [2, 3, 4, 5]
    assert parse_int_list("1,7", []) == [1, 7]
    with pytest.raises(ConfigError):
        parse_int_list("0", [])


def test_derive_seed_independent_cells():
    seeds = {derive_seed(1, s, k, r) for s in range(3) for k in range(10) for r in range(10)}
    assert len(seeds) == 300
    assert derive_seed(1, 2, 3) == derive_seed(1, 2, 3)
