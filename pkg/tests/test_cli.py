import json

import pytest

from main import main
from services.quiverrep import SOURCE_RULE_WARNING


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_solve_json(capsys, jobs_dir):
    code, out, _ = run(capsys, "solve", "--job", str(jobs_dir / "a2_id_4.job"))
    assert code == 0
    payload = json.loads(out)
    assert set(payload) == {"job_echo", "result", "warnings", "genericity_assumptions"}
    assert payload["job_echo"]["sign_rule"] == "product"
    result = payload["result"]
    assert result["free"] == ["{1,3,7,8}", "{1,4,7,8}", "{2,3,7,8}", "{2,4,7,8}"]
    assert ["{3,4,5,8}", "D{1,4,7,8}"] in result["fset"]
    assert ["{3,4,5,7}", "D{1,3,7,8}"] in result["fset"]
    assert ["{3,4,7,8}", "1"] in result["fset"]
    assert result["residual"] == []
    assert any("4 free symbol(s)" in w for w in payload["warnings"])
    assert SOURCE_RULE_WARNING not in payload["warnings"]


def test_source_rule_is_flagged_in_every_envelope(capsys, jobs_dir, tmp_path):
    job = tmp_path / "source.job"
    text = (jobs_dir / "a2_id_4.job").read_text(encoding="utf-8")
    job.write_text(text.replace("I = {3,4,7,8}\n", "I = {3,4,7,8}\nsign_rule = source\n"), encoding="utf-8")
    for argv in (("solve",), ("relations",), ("arrange",), ("stats", "--format", "json")):
        code, out, _ = run(capsys, *argv, "--job", str(job))
        assert code == 0
        payload = json.loads(out)
        assert payload["job_echo"]["sign_rule"] == "source"
        assert payload["warnings"][0] == SOURCE_RULE_WARNING


def test_solve_latex(capsys, jobs_dir):
    code, out, _ = run(capsys, "solve", "--job", str(jobs_dir / "a2_id_2.job"), "--format", "latex")
    assert code == 0
    assert r"\Delta_{\{2,4\}} = 1" in out


def test_relations_json(capsys, jobs_dir):
    code, out, _ = run(capsys, "relations", "--job", str(jobs_dir / "a2_quantum.job"))
    assert code == 0
    result = json.loads(out)["result"]
    assert result["counts"]["quiver"] == 1
    assert result["counts"]["pluecker"] == 1
    assert result["counts"]["components"] == 1


def test_stats_sweep_csv(capsys, jobs_dir):
    code, out, _ = run(capsys, "stats", "--sweep", "2..4", "--job", str(jobs_dir / "a2_id_6.job"))
    assert code == 0
    assert out == "i,plus,minus,ratio\n2,4,0,inf\n4,12,0,inf\n"


@pytest.mark.slow
def test_stats_csv(capsys, jobs_dir):
    code, out, _ = run(capsys, "stats", "--job", str(jobs_dir / "a2_id_6.job"))
    assert code == 0
    assert out.splitlines() == ["i,plus,minus,ratio,zeros", "6,24,0,inf,120"]


def test_stats_json(capsys, jobs_dir):
    code, out, _ = run(capsys, "stats", "--job", str(jobs_dir / "a2_id_4.job"), "--format", "json")
    assert code == 0
    result = json.loads(out)["result"]
    assert result["row"] == {"i": 4, "plus": 10, "minus": 2, "ratio": "5.000000"}
    assert result["fset"] == {"zeros": 0, "positives": 7, "negatives": 2}


def test_stats_rejects_latex(capsys, jobs_dir):
    code, _, err = run(capsys, "stats", "--job", str(jobs_dir / "a2_id_4.job"), "--format", "latex")
    assert code == 1
    assert any(line.startswith("error validation") for line in err.splitlines())


def test_arrange_json(capsys, jobs_dir):
    code, out, _ = run(capsys, "arrange", "--job", str(jobs_dir / "a3_id_2.job"))
    assert code == 0
    cells = json.loads(out)["result"]["cells"]
    assert [1, 2, "D{1,4,6}"] in cells
    assert [2, 2, "1"] in cells
    assert not any(r == 1 and c == 4 for r, c, _ in cells)


def test_arrange_keep_inadmissible(capsys, jobs_dir):
    code, out, _ = run(capsys, "arrange", "--job", str(jobs_dir / "a3_id_2.job"), "--keep-inadmissible")
    assert code == 0
    cells = json.loads(out)["result"]["cells"]
    assert [1, 4, "D{1,2,6}"] in cells


def test_invariant_h_basis(capsys, jobs_dir):
    code, out, _ = run(capsys, "invariant", "--job", str(jobs_dir / "a2_quantum.job"),
                       "--mode", "P", "--basis", "h")
    assert code == 0
    terms = json.loads(out)["result"]["terms"]
    assert ["D{1,3}", [1]] in terms


def test_path_dot(capsys, jobs_dir):
    code, out, _ = run(capsys, "path", "G", "--job", str(jobs_dir / "circulant_6x6.job"), "--format", "dot")
    assert code == 0
    assert out.startswith("digraph pluq {")
    assert '  1 -> 2 [label="G4@0:0"];' in out
    assert '  4 -> 5 [label="G6@3:0"];' in out


def test_unknown_path(capsys, jobs_dir):
    code, _, err = run(capsys, "path", "Nope", "--job", str(jobs_dir / "circulant_6x6.job"), "--format", "dot")
    assert code == 1
    assert "unknown path 'Nope'" in err


def test_check_basis(capsys):
    code, out, _ = run(capsys, "check", "basis", "--sizes", "2,4")
    assert code == 0
    result = json.loads(out)["result"]
    assert result["size"] == 2
    assert 1 <= result["rank"] <= 2


def test_inconsistent_job_exit_code(capsys, tmp_path):
    job = tmp_path / "bad.job"
    job.write_text(
        "[quiver]\nvertices = 2\narrow v = 1 -> 2\n"
        "[representation]\nv = identity\n"
        "[grassmannian]\ndims = 2, 2\ne = 1, 1\n"
        "[solve]\npin = {1,4}: 1; {2,3}: 2\n",
        encoding="utf-8")
    code, _, err = run(capsys, "solve", "--job", str(job))
    assert code == 2
    assert any(line.startswith("error inconsistent") for line in err.splitlines())


def test_parse_error_exit_code(capsys, tmp_path):
    job = tmp_path / "broken.job"
    job.write_text("[quiver]\nvertices = x\n", encoding="utf-8")
    code, _, err = run(capsys, "solve", "--job", str(job))
    assert code == 1
    assert any(line.startswith("error parse: 2:12") for line in err.splitlines())


def test_missing_job(capsys):
    code, _, err = run(capsys, "solve")
    assert code == 1
    assert "needs --job" in err


def test_out_file(capsys, jobs_dir, tmp_path):
    target = tmp_path / "sweep.csv"
    code, out, _ = run(capsys, "stats", "--sweep", "2", "--out", str(target))
    assert code == 0
    assert out == ""
    assert target.read_text(encoding="utf-8").startswith("i,plus,minus,ratio\n2,")


def test_no_command(capsys):
    code, _, err = run(capsys)
    assert code == 1
    assert "usage" in err
