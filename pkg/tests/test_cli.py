import json
import os
from pathlib import Path

import pytest

from newton_motivic.cli import main, EXIT_OK, EXIT_INPUT
from newton_motivic.report import Report
from newton_motivic.utils import BUDGET_ENV

from .conftest import PROBLEMS, problem_path

GOLDEN = Path(__file__).resolve().parent / "golden"
REGEN_GOLDEN_ENV = "NEWTON_MOTIVIC_REGEN_GOLDEN"


def run(capsys, *argv):
    code = main([*argv, "--json"])
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_newton_counts_compact_faces(capsys):
    code, report = run(capsys, "newton", problem_path("three_vertex.json"))
    assert code == EXIT_OK
    assert report["command"] == "newton"
    assert report["result"]["compact_face_count"] == 5
    assert report["diagnostics"] == []


def test_newton_rejects_empty_support(capsys):
    code, report = run(capsys, "newton", problem_path("empty.json"))
    assert code == EXIT_INPUT
    assert "empty support" in report["diagnostics"][0]


def test_missing_file_is_an_input_error(capsys, tmp_path):
    code, report = run(capsys, "newton", str(tmp_path / "missing.json"))
    assert code == EXIT_INPUT
    assert "cannot read" in report["diagnostics"][0]


def test_syntax_error_reports_position(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"dims": [1, 1],\n "terms": [[[1, 1], 1]\n', encoding="utf-8")
    code, report = run(capsys, "newton", str(bad))
    assert code == EXIT_INPUT
    assert "line" in report["diagnostics"][0]


def test_fan_with_reference_notes(capsys):
    code, report = run(capsys, "fan", problem_path("three_vertex.json"), "--bound", "6", "--paper-diff")
    assert code == EXIT_OK
    assert report["result"]["coverage"]["problem_count"] == 0
    assert report["result"]["normal_fan"]["ok"]
    assert any("σ_{P1P2,{1}} listed" in d for d in report["diagnostics"])


def test_fan_single_vertex_reference_agrees(capsys):
    code, report = run(capsys, "fan", problem_path("single_vertex.json"), "--bound", "4", "--paper-diff")
    assert code == EXIT_OK
    assert report["result"]["cell_count"] == 4
    assert any("cell list agrees" in d for d in report["diagnostics"])


def test_fan_reference_notes_name_their_limit(capsys):
    code, report = run(capsys, "fan", problem_path("xy_z2.json"), "--bound", "4", "--paper-diff")
    assert code == EXIT_OK
    assert any("no reference cell list" in d for d in report["diagnostics"])


def test_fan_needs_second_block(capsys):
    code, report = run(capsys, "fan", problem_path("no_second_block.json"))
    assert code == EXIT_INPUT
    assert "n2" in report["diagnostics"][0]


def test_milnor_at_origin_realization(capsys):
    code, report = run(capsys, "milnor", problem_path("z2.json"), "--at-origin", "--q-list", "7")
    assert code == EXIT_OK
    assert report["result"]["mode"] == "at-origin"
    assert report["oracle"]["realize"]["7"] == {"1": "2", "2": "2", "3": "0", "4": "2", "5": "0", "6": "0"}


def test_milnor_at_origin_with_non_monic_face(capsys):
    # 默认 q 表含 3，整除 z^2 的系数
    code, report = run(capsys, "milnor", problem_path("xy_3z2.json"), "--at-origin")
    assert code == EXIT_OK, report["diagnostics"]
    assert sorted(report["oracle"]["realize"], key=int) == ["2", "3", "5", "7", "11"]
    assert "1/3" not in report["result"]["text"]


def test_milnor_pullback_defaults_to_first_block(capsys):
    code, report = run(capsys, "milnor", problem_path("xy.json"), "--q-list", "3")
    assert code == EXIT_OK
    assert report["result"]["n1"] == 1
    assert report["result"]["path"] == "vertex-positive"
    assert report["result"]["pushforward"]["terms"] == []


def test_vanishing_exit_codes(capsys):
    code, report = run(capsys, "vanishing", problem_path("xy.json"))
    assert code == EXIT_OK
    assert report["result"]["status"] == "Vanishes"

    code, report = run(capsys, "vanishing", problem_path("unbalanced_x2y.json"))
    assert code == EXIT_INPUT
    assert report["result"]["status"] == "HypothesisFail"


def test_conjecture_exit_codes(capsys):
    code, report = run(capsys, "conjecture", problem_path("xyz.json"))
    assert code == EXIT_OK
    assert report["result"]["status"] == "symbolic-equal"

    code, report = run(capsys, "conjecture", problem_path("unbalanced_x2y.json"))
    assert code == EXIT_INPUT


def test_conjecture_realizations_agree(capsys):
    code, report = run(capsys, "conjecture", problem_path("xy_z2.json"), "--q-list", "3,5")
    assert code == EXIT_OK
    for q in ("3", "5"):
        sides = report["oracle"]["realize"][q]
        assert sides["lhs"] == sides["rhs"]


def test_oracle_jets(capsys):
    code, report = run(capsys, "oracle", "jets", problem_path("xy.json"), "--a", "1,1", "--m", "2", "--q", "3")
    assert code == EXIT_OK
    assert report["result"]["total"] == 36
    assert report["result"]["formula"] == {"1": "18", "2": "18"}


def test_oracle_jets_needs_order(capsys):
    code, _ = run(capsys, "oracle", "jets", problem_path("xy.json"), "--m", "2")
    assert code == EXIT_INPUT


def test_oracle_count(capsys):
    code, report = run(capsys, "oracle", "count", problem_path("z2.json"), "--q", "7")
    assert code == EXIT_OK
    assert report["result"]["counts"]["1"] == "2"
    assert report["result"]["zero"] == 0


def test_oracle_series(capsys):
    code, report = run(capsys, "oracle", "series", problem_path("cone_half_quadrant.json"), "--K", "6")
    assert code == EXIT_OK
    assert report["result"]["closed_form_agrees"]
    assert report["result"]["coefficients"][1] == {"num": [[-2, "1"]], "den": [[0, "1"]]}


def test_oracle_zeta(capsys):
    code, report = run(capsys, "oracle", "zeta", problem_path("xy.json"), "--m", "2", "--q", "2")
    assert code == EXIT_OK
    assert report["result"]["jets"] == report["result"]["zeta_coefficient"] == {"1": "8"}


def test_usage_error_exits_with_input_code():
    with pytest.raises(SystemExit) as info:
        main(["oracle", "bogus", "x.json"])
    assert info.value.code == EXIT_INPUT


def test_json_output_is_deterministic(capsys):
    argv = ["fan", problem_path("three_vertex.json"), "--bound", "4", "--json"]
    main(argv)
    first = capsys.readouterr().out
    main(argv)
    assert capsys.readouterr().out == first


def test_text_report(capsys):
    assert main(["newton", problem_path("xy.json")]) == EXIT_OK
    out = capsys.readouterr().out
    assert "newton-motivic newton" in out
    assert "exit code: 0" in out


# === 冻结的输出 ===

def _frozen_output(capsys, monkeypatch, *argv):
    """在 problems/ 下用相对路径运行，报告中的 source 与机器无关"""
    monkeypatch.chdir(PROBLEMS)
    monkeypatch.delenv(BUDGET_ENV, raising=False)
    code = main(list(argv))
    return code, capsys.readouterr().out


def _check_golden(name, text):
    # 首次通过的运行写入 golden 文件，之后逐字节比较；设置 NEWTON_MOTIVIC_REGEN_GOLDEN 重新生成
    path = GOLDEN / name
    if os.environ.get(REGEN_GOLDEN_ENV) or not path.exists():
        GOLDEN.mkdir(exist_ok=True)
        path.write_bytes(text.encode("utf-8"))
        pytest.skip(f"wrote {path.name}")
    assert text.encode("utf-8") == path.read_bytes()


@pytest.mark.parametrize("problem, golden", [
    ("three_vertex.json", "milnor_three_vertex.json"),
    ("xy_z2.json", "milnor_xy_z2.json"),
])
def test_milnor_matches_golden(capsys, monkeypatch, problem, golden):
    code, out = _frozen_output(capsys, monkeypatch, "milnor", problem, "--json")
    assert code == EXIT_OK
    _check_golden(golden, out)


# === 两种报告形式 ===

def _leaf_lines(value, key=None):
    """JSON 报告中每个标量 (或空容器) 在文本报告里应出现的行"""
    if isinstance(value, dict) and value:
        for k, item in value.items():
            yield from _leaf_lines(item, k)
    elif isinstance(value, list) and value:
        for item in value:
            if isinstance(item, dict):
                yield from _leaf_lines(item)
            else:
                yield f"- {json.dumps(item, ensure_ascii=False)}"
    elif key is not None:
        yield f"{key}: {json.dumps(value, ensure_ascii=False)}"


@pytest.mark.parametrize("argv", [
    ("milnor", "xy_z2.json", "--q-list", "3,5"),
    ("fan", "three_vertex.json", "--bound", "4", "--paper-diff"),
])
def test_json_and_text_reports_carry_the_same_content(capsys, monkeypatch, argv):
    code_json, machine = _frozen_output(capsys, monkeypatch, *argv, "--json")
    code_text, human = _frozen_output(capsys, monkeypatch, *argv)
    assert code_json == code_text
    report = Report.model_validate(json.loads(machine))
    # JSON 读回后渲染的文本与直接输出的文本一致
    assert report.to_text() + "\n" == human
    text_lines = {line.strip() for line in human.splitlines()}
    for key, value in report.hypotheses.items():
        assert f"{key}: {value}" in text_lines
    for section in (report.result, report.oracle):
        for line in _leaf_lines(section):
            assert line in text_lines, line
    for d in report.diagnostics:
        assert f"- {d}" in text_lines
    assert f"exit code: {report.exit_code}" in text_lines
