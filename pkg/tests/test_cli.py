import json

import pytest

from cubicurve.cli import build_parser, main
from cubicurve.finder import series_guess
from cubicurve.solver import solutions_for_kneading
from cubicurve.util import read_json


def _run(capsys: pytest.CaptureFixture[str], *argv: str) -> tuple[int, dict | list]:
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out) if out else None


def test_no_command(capsys: pytest.CaptureFixture[str]) -> None:
    assert main([]) == 2
    assert "usage: cubicurve" in capsys.readouterr().err


def test_version(capsys: pytest.CaptureFixture[str]) -> None:
    with pytest.raises(SystemExit):
        build_parser().parse_args(["--version"])
    assert "cubicurve" in capsys.readouterr().out


def test_euler(capsys: pytest.CaptureFixture[str]) -> None:
    code, doc = _run(capsys, "euler", "-p", "4")
    assert code == 0
    assert doc["d"] == 24
    assert doc["N"] == 20
    assert doc["chi_compact"] == -28


def test_grid_check(capsys: pytest.CaptureFixture[str]) -> None:
    code, doc = _run(capsys, "grid-check", "--depths", "inf,0,1,1")
    assert code == 0
    assert doc["passed"]
    assert doc["depths"] == [None, 0, 1, 1]
    assert doc["orders"] == ["0", "1", "1"]
    assert (doc["mu"], doc["nu"]) == (1, 3)


def test_grid_check_failure(capsys: pytest.CaptureFixture[str]) -> None:
    code, doc = _run(capsys, "grid-check", "--depths", "inf,1,1,0")
    assert code == 0
    assert not doc["passed"]
    assert "R3" in doc["report"]


def test_grid_check_needs_input(capsys: pytest.CaptureFixture[str]) -> None:
    assert main(["grid-check"]) == 2
    assert "needs --depths" in capsys.readouterr().err


def test_solve_series(capsys: pytest.CaptureFixture[str]) -> None:
    code, doc = _run(capsys, "solve-series", "--kneading", "100")
    assert code == 0
    assert len(doc) == 2
    assert {r["kneading"] for r in doc} == {"100"}


def test_solve_series_with_signs(capsys: pytest.CaptureFixture[str]) -> None:
    code, doc = _run(capsys, "solve-series", "--kneading", "1000", "--signs", "+-", "--trunc", "12")
    assert code == 0
    assert len(doc) == 1
    assert doc[0]["kneading"] == "1000"


@pytest.mark.parametrize(
    "argv,match",
    [
        # case 1
        (["-p", "4", "--signs", "+-"], "--signs needs --kneading"),
        # case 2
        (["--kneading", "1000", "--signs", "+"], "expected 2 signs"),
        # case 3
        (["--kneading", "1000", "--signs", "+x"], "expected a string of"),
        # case 4
        (["--kneading", "000", "--signs", "++"], "omit --signs"),
    ],
)
def test_solve_series_invalid_signs(capsys: pytest.CaptureFixture[str], argv: list[str], match: str) -> None:
    assert main(["solve-series", *argv]) == 2
    assert match in capsys.readouterr().err


def test_period_or_kneading_required(capsys: pytest.CaptureFixture[str]) -> None:
    assert main(["solve-series"]) == 2
    assert "needs -p or --kneading" in capsys.readouterr().err


def test_centers(capsys: pytest.CaptureFixture[str]) -> None:
    code, doc = _run(capsys, "centers", "-r", "3")
    assert code == 0
    assert len(doc) == 3
    assert "airplane" in {c["nickname"] for c in doc}


def test_converges(capsys: pytest.CaptureFixture[str]) -> None:
    (s,) = solutions_for_kneading("10")
    v0 = series_guess(s, 10)
    code, doc = _run(capsys, "find-v", "-a", "10,0", "--kneading", "10", f"--v0={v0.real},{v0.imag}")
    assert code == 0
    assert doc["status"] == "converged"
    assert doc["kneading"] == "10"


def test_small_a(capsys: pytest.CaptureFixture[str]) -> None:
    assert main(["find-v", "-a", "0.5,0", "--kneading", "10", "--v0", "1,0"]) == 2
    assert "at least 1" in capsys.readouterr().err


def test_period_mismatch(capsys: pytest.CaptureFixture[str]) -> None:
    assert main(["find-v", "-p", "3", "-a", "10", "--kneading", "10", "--v0", "1"]) == 2
    assert "has period 2, not 3" in capsys.readouterr().err


def test_not_converged(capsys: pytest.CaptureFixture[str]) -> None:
    code, doc = _run(
        capsys, "find-v", "-a", "10", "--kneading", "110", "--v0", "9", "--tol", "0", "--max-sweeps", "1"
    )
    assert code == 1
    assert doc["status"] == "not-converged"


def test_real_components(capsys: pytest.CaptureFixture[str]) -> None:
    code, doc = _run(capsys, "real-components", "-p", "4", "--mod-involution")
    assert code == 0
    assert doc["count"] == 10
    assert [piece["edges"] for piece in doc["graph"]] == [2, 8]


def test_output_via_fsspec(capsys: pytest.CaptureFixture[str]) -> None:
    path = "memory://cubicurve-tests/cli/components.json"
    assert main(["real-components", "-p", "3", "-o", path]) == 0
    assert capsys.readouterr().out == ""
    doc = read_json(path)
    assert doc["count"] == len(doc["components"])


def test_reproduce_quadratic(capsys: pytest.CaptureFixture[str]) -> None:
    code, doc = _run(capsys, "reproduce-tables", "--which", "quadratic", "--max-p", "3")
    assert code == 0
    assert [row["name"] for row in doc["quadratic"]] == ["z^2", "basilica", "airplane", "rabbit"]


def test_render(capsys: pytest.CaptureFixture[str]) -> None:
    image = "memory://cubicurve-tests/cli/render.ppm"
    code, doc = _run(
        capsys, "render", "-p", "1", "--a", "10", "--v", "10", "--size", "2x2", "--scale", "1e-3", "--image", image
    )
    assert code == 0
    assert doc["image"] == image
    assert (doc["width"], doc["height"]) == (2, 2)


def test_invalid_config(capsys: pytest.CaptureFixture[str]) -> None:
    assert main(["euler", "-p", "2", "--threads", "0"]) == 2
    assert "threads must be at least one" in capsys.readouterr().err


def test_a_min_from_environment(
    capsys: pytest.CaptureFixture[str], caplog: pytest.LogCaptureFixture, monkeypatch: pytest.MonkeyPatch
) -> None:
    monkeypatch.setenv("CUBICURVE_A_MIN", "100")
    code, doc = _run(capsys, "enumerate-regions", "-p", "2")
    assert code == 0
    assert len(doc) == 2
    assert "below the recommended minimum 100.0" in caplog.text
