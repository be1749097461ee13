import json

import pytest

from traceseries.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_series_p2(capsys):
    code, out, _ = run(capsys, "series", "--config", '{"blocks": [1, 1]}')
    assert code == 0
    assert out.strip() == "(1) / ((1 - t(1,1,1))*(1 - t(2,2,1))*(1 - t(1,2,1)*t(2,1,1)))"


def test_series_q3_is_deterministic(capsys):
    cfg = '{"blocks": [1, 1, 1], "kind": "mixed"}'
    _, first, _ = run(capsys, "series", "--config", cfg)
    _, second, _ = run(capsys, "series", "--config", cfg)
    assert first == second and first.startswith("(-3*t(1,2,1)*t(1,3,1)*t(2,1,1)")
    assert first.strip().endswith("+ 3) / ((1 - t(1,1,1))*(1 - t(2,2,1))*(1 - t(3,3,1))"
                                  "*(1 - t(1,2,1)*t(2,1,1))*(1 - t(1,3,1)*t(3,1,1))*(1 - t(2,3,1)*t(3,2,1))"
                                  "*(1 - t(1,2,1)*t(2,3,1)*t(3,1,1))*(1 - t(1,3,1)*t(2,1,1)*t(3,2,1)))")


def test_series_repeat_truncated(capsys):
    code, out, _ = run(capsys, "series", "--config", '{"repeat": [2, 3, 1]}', "--degree", "4")
    assert code == 0
    assert out.strip() == "75*t(1,1,1)^4 + 29*t(1,1,1)^3 + 12*t(1,1,1)^2 + 3*t(1,1,1) + 1 + O(deg 5)"


def test_series_json(capsys, tmp_path):
    path = tmp_path / "job.json"
    path.write_text('{"blocks": [2], "kind": "mixed"}')
    code, out, _ = run(capsys, "series", "--config", str(path), "--output", "json")
    assert code == 0
    data = json.loads(out)
    assert data["variables"] == ["t(1,1,1)"]


def test_oracle_method(capsys):
    code, out, _ = run(capsys, "series", "--config", '{"blocks": [2]}', "--method", "oracle", "--degree", "2")
    assert out.strip() == "2*t(1,1,1)^2 + t(1,1,1) + 1 + O(deg 3)"


@pytest.mark.parametrize("cfg", ['{"blocks": [0]}', '{"blocks": [1], "kind": "weird"}', "{not json", "missing.json",
                                 '{"blocks": [1], "colour": 1}'])
def test_config_errors(capsys, cfg):
    code, _, err = run(capsys, "series", "--config", cfg)
    assert code == 2
    assert err.startswith("traceseries.cli:")


def test_connectivity_exit_code(capsys):
    code, _, err = run(capsys, "series", "--config", '{"blocks": [1, 1], "generics": {"1,2": 1}}', "--method", "tree")
    assert code == 3
    assert "traceseries.quiver" in err


def test_residual_exit_code(capsys, monkeypatch):
    from traceseries import molien
    monkeypatch.setattr(molien, "cycle_denominator", lambda integrand: {})
    code, _, err = run(capsys, "series", "--config", '{"blocks": [1, 1]}', "--method", "reconstruct")
    assert code == 4
    assert "traceseries.molien" in err


def test_flows(capsys):
    assert run(capsys, "flows", "[[0,1],[1,0]]")[1].strip() == "1"
    assert run(capsys, "flows", "[[0,1],[0,0]]")[1].strip() == "0"
    code, out, _ = run(capsys, "flows", "[[0,1,0],[0,0,1],[1,0,0]]", "--monomial")
    assert out.splitlines() == ["1", "t(1,2,1)*t(2,3,1)*t(3,1,1) : 1"]
    assert run(capsys, "flows", "[[0,1],[1]]")[0] == 2


def test_schur(capsys):
    code, out, _ = run(capsys, "schur", "(2,1)", "--vars", "2", "--plus", "2")
    assert out.splitlines() == ["t(1,1,1)^2*t(1,1,2) + t(1,1,1)*t(1,1,2)^2", "plus: (3,1) (2,2)"]
    code, out, _ = run(capsys, "schur", "(2)", "--vars", "1", "--boxtimes", "2")
    assert out.strip() == "3*t(1,1,1)^2"
    assert run(capsys, "schur", "(1,2)")[0] == 2


def test_decompose(capsys):
    code, out, _ = run(capsys, "decompose", "--config", '{"blocks": [2], "generics": 2}', "--degree", "2")
    assert code == 0
    # tr(XY) = tr(YX): nothing antisymmetric in degree 2
    assert out.splitlines() == ["(()) : 1", "((1)) : 1", "((2)) : 2"]


def test_verify_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["verify", "--suite", ""])
    assert exc.value.code == 2


def test_verify_json(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "paper", "--output", "json")
    data = json.loads(out)
    assert [r["criterion"] for r in data] == ["1", "2", "3", "4", "9", "11", "13"]
    assert code == (0 if all(r["passed"] for r in data) else 5)


def test_jobs_must_be_positive():
    with pytest.raises(SystemExit):
        main(["series", "--jobs", "0"])
