import json
from importlib import resources

import jsonschema
import pytest

from polyunzip.cli import main, parse_duration

SCHEMA = json.loads(resources.files("polyunzip.schema").joinpath("report.schema.json").read_text())


def run(capsys, *argv):
    code = main([*argv, "--json"])
    out = json.loads(capsys.readouterr().out)
    jsonschema.validate(out, SCHEMA)
    assert out["exit_code"] == code
    return code, out


def test_validate_shapes(capsys):
    code, out = run(capsys, "validate", "--shape", "P44")
    assert code == 0 and out["result"] == "valid" and out["cubes"] == 44
    code, out = run(capsys, "validate", "--shape", "P222")
    assert out["genus"] == 0 and out["euler_characteristic"] == 2


def test_validate_errors(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"cubes": [[0, 0, 0], [1, 1, 0]]}))
    code, out = run(capsys, "validate", str(bad))
    assert code == 4 and out["error"]["kind"] == "NonManifoldEdge"
    assert out["error"]["category"] == "validation"
    broken = tmp_path / "broken.json"
    broken.write_text("{")
    code, out = run(capsys, "validate", str(broken))
    assert code == 4 and out["error"]["category"] == "parse"
    code, out = run(capsys, "validate", str(tmp_path / "missing.json"))
    assert code == 4 and out["error"]["category"] == "io"
    code, out = run(capsys, "info", "--shape", "P99")
    assert code == 4 and out["error"]["kind"] == "UnknownShape"


@pytest.mark.parametrize("shape, flats, imbalance, tree", [
    ("P14", 3, 2, False), ("P44", 0, 2, False), ("P6", 0, 0, True), ("P222", 18, 2, False),
])
def test_info(capsys, shape, flats, imbalance, tree):
    code, out = run(capsys, "info", "--shape", shape)
    assert code == 0
    assert out["flat_vertices"] == flats
    assert out["parity"]["imbalance"] == imbalance
    assert out["dual_tree"] is tree
    assert (out["obstruction"] is not None) == (imbalance > 1)


def test_info_from_file(capsys, tmp_path):
    f = tmp_path / "l.json"
    f.write_text(json.dumps({"name": "L", "cubes": [[0, 0, 0], [1, 0, 0], [1, 1, 0]]}))
    code, out = run(capsys, "info", "--input", str(f))
    assert code == 0 and out["input"]["file"] == str(f) and out["cubes"] == 3


def test_ham_commands(capsys):
    code, out = run(capsys, "ham-path", "--shape", "P6")
    assert code == 0 and out["result"] == "found" and len(out["path"]) == 32
    code, out = run(capsys, "ham-path", "--shape", "P44")
    assert out["result"] == "absent" and out["certificate"]["imbalance"] == 2
    code, out = run(capsys, "ham-cycle", "--shape", "Domino")
    assert out["result"] == "found" and out["closed"] and len(out["path"]) == 12


def test_budget_exit_code(capsys):
    code, out = run(capsys, "ham-path", "--shape", "P14", "--no-parity", "--max-expansions", "100")
    assert code == 3 and out["result"] == "budget"


def test_zipper(capsys):
    code, out = run(capsys, "zipper", "--shape", "P14")
    assert out["result"] == "absent" and len(out["cases"]) == 8
    code, out = run(capsys, "zipper", "--shape", "P14", "--strategy", "DirectDFS")
    assert out["result"] == "absent"
    code, out = run(capsys, "zipper", "--shape", "P222")
    assert code == 4 and out["error"]["kind"] == "TooManyFlatVertices"


def test_unfold_command(capsys, tmp_path):
    code, out = run(capsys, "zipper-net", "--shape", "P6")
    cut = tmp_path / "cut.json"
    cut.write_text(json.dumps({"cut": out["cut"]}))
    svg, fold = tmp_path / "n.svg", tmp_path / "n.fold"
    code, out = run(capsys, "unfold", "--shape", "P6", "--cut", str(cut),
                    "--svg", str(svg), "--fold", str(fold))
    assert code == 0 and out["result"] == "nonoverlapping"
    assert svg.read_text().startswith("<svg")
    assert "edges_assignment" in json.loads(fold.read_text())
    assert out["artifacts"] == [str(svg), str(fold)]


def test_unfold_bad_cut(capsys, tmp_path):
    cut = tmp_path / "cut.json"
    cut.write_text("[[0, 1]]")
    code, out = run(capsys, "unfold", "--shape", "Cube", "--cut", str(cut))
    assert code == 4 and out["error"]["kind"].startswith("InvalidCut")


def test_search_net_is_reproducible(capsys):
    code, a = run(capsys, "search-net", "--shape", "P14", "--seed", "7")
    code, b = run(capsys, "search-net", "--shape", "P14", "--seed", "7")
    assert code == 0 and a["result"] == "found"
    assert a["payload_digest"] == b["payload_digest"]
    assert a["config"]["seed"] == 7


def test_env_overrides(capsys, monkeypatch):
    monkeypatch.setenv("POLYUNZIP_BUDGET", "90s")
    monkeypatch.setenv("POLYUNZIP_THREADS", "2")
    code, out = run(capsys, "info", "--shape", "Cube")
    assert out["config"]["time_budget"] == 90 and out["config"]["threads"] == 2
    code, out = run(capsys, "info", "--shape", "Cube", "--budget", "2m", "--threads", "1")
    assert out["config"]["time_budget"] == 120 and out["config"]["threads"] == 1


def test_parse_duration():
    assert parse_duration("600s") == 600
    assert parse_duration("10m") == 600
    assert parse_duration("1h") == 3600
    assert parse_duration("250ms") == 0.25
    assert parse_duration("5") == 5
    with pytest.raises(Exception):
        parse_duration("soon")


@pytest.mark.parametrize("claim", ["lemma2", "lemma4", "lemma5", "theorem1", "theorem2",
                                   "p6-zipper-net", "p14-net"])
def test_reproduce(capsys, claim):
    code, out = run(capsys, "reproduce", claim)
    assert code == 0 and out["result"] == "holds", out


def test_reproduce_tower(capsys):
    code, out = run(capsys, "reproduce", "tower", "--k", "3")
    assert code == 0
    assert out["details"]["cubes"] == 62 and out["details"]["new_flat_vertices"] == 0
    assert out["input"]["k"] == 3


def test_reproduce_writes_net(capsys, tmp_path):
    svg = tmp_path / "p14.svg"
    code, out = run(capsys, "reproduce", "p14-net", "--svg", str(svg))
    assert svg.exists() and out["artifacts"] == [str(svg)]


def test_failed_claim_exit_code(capsys, monkeypatch):
    import polyunzip.cli as cli
    from polyunzip.reproduce import ClaimResult
    monkeypatch.setattr(cli, "run_claim", lambda c, cfg, k=1: ClaimResult(c, False, "x"))
    code, out = run(capsys, "reproduce", "lemma4")
    assert code == 2 and out["result"] == "fails"


def test_plain_output(capsys):
    assert main(["info", "--shape", "P14"]) == 0
    line = capsys.readouterr().out
    assert "flat=3" in line and "imbalance=2" in line


def test_report_file(capsys, tmp_path):
    path = tmp_path / "r.json"
    assert main(["info", "--shape", "Cube", "--report", str(path)]) == 0
    jsonschema.validate(json.loads(path.read_text()), SCHEMA)
