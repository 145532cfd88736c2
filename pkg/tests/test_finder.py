import numpy as np
import pytest

from cubicurve.dynamics import CubicMap, classify, fiber_roots, u_values
from cubicurve.errors import NotConverged, WrongKneading
from cubicurve.finder import (
    CONVERGED,
    NOT_CONVERGED,
    WRONG_KNEADING,
    FinderConfig,
    FinderResult,
    find_v,
    find_v_trials,
    psi_step,
    series_guess,
)
from cubicurve.solver import KneadingSequence, SolutionVector, solutions_for_kneading


def test_solution_is_fixed() -> None:
    a = 10.0
    for v in fiber_roots(3, a):
        F = CubicMap(a, v)
        sigma = classify(F, 3).kneading
        w = u_values(F, 3) + [0j]
        xi = 1 / (3 * a)
        for j in range(1, 3):
            new = psi_step(j, w[0], w[j - 1], w[j], xi, sigma.sigma(j))
            assert new == pytest.approx(w[j - 1], rel=1e-9)


def test_psi_step_escaping_bit() -> None:
    assert psi_step(1, 1, 1, 3, 0.5, 1) == pytest.approx(1.5)


def test_psi_step_principal_root() -> None:
    # the ratio under the root is 1, resp. 4
    assert psi_step(2, 0, 2, 4, 1, 0) == pytest.approx(2)
    assert psi_step(2, 0, 2, 16, 1, 0) == pytest.approx(4)


@pytest.mark.parametrize(
    "args",
    [
        # case 1: w_j = 0
        (1, 0, 0, 0, 0.1, 1),
        # case 2: w_j = 1 under the root
        (1, 1, 1, 0, 0.1, 0),
    ],
)
def test_psi_step_division_by_zero(args: tuple) -> None:
    with pytest.raises(ZeroDivisionError):
        psi_step(*args)


def test_config_properties() -> None:
    cfg = FinderConfig(10, "100")
    assert cfg.p == 3
    assert cfg.xi == pytest.approx(1 / 30)
    assert cfg.kneading == KneadingSequence.parse("100")


def test_config_a_too_small() -> None:
    with pytest.raises(ValueError, match="at least 1"):
        FinderConfig(0.5, "10")


def test_config_small_a_warns() -> None:
    with pytest.warns(UserWarning, match="small"):
        FinderConfig(2.0, "10")


def test_config_sweep_budget() -> None:
    with pytest.raises(ValueError, match="max_sweeps"):
        FinderConfig(10, "10", max_sweeps=0)


def test_find_v_period_one() -> None:
    result = find_v(FinderConfig(5, "0"), 0)
    assert result.ok
    assert result.v == 5


@pytest.mark.parametrize("kneading", ["10", "010", "100", "110"])
def test_seeded_from_series(kneading: str) -> None:
    a = 10.0
    roots = fiber_roots(len(kneading), a)
    for s in solutions_for_kneading(kneading):
        result = find_v(FinderConfig(a, kneading), series_guess(s, a))
        assert result.status == CONVERGED, result.detail
        assert str(result.kneading) == kneading
        assert np.min(np.abs(roots - result.v)) < 1e-9 * a


def test_series_guess_is_close(solutions: dict[int, list[SolutionVector]]) -> None:
    a = 10.0
    roots = fiber_roots(3, a)
    for s in solutions[3]:
        assert np.min(np.abs(roots - series_guess(s, a))) < 1e-6


def test_budget_exhausted() -> None:
    (s,) = solutions_for_kneading("110")
    result = find_v(FinderConfig(10, "110", max_sweeps=1, tol=0), series_guess(s, 10) + 0.5)
    assert result.status == NOT_CONVERGED
    with pytest.raises(NotConverged, match="sweep budget"):
        result.raise_for_status()


def test_wrong_kneading_raises() -> None:
    result = FinderResult(10, 1, WRONG_KNEADING, 3, 0.0, KneadingSequence.parse("100"), "converged to 100")
    assert not result.ok
    with pytest.raises(WrongKneading, match="converged to 100"):
        result.raise_for_status()


def test_converged_result_passes() -> None:
    result = FinderResult(10, 1, CONVERGED, 3, 0.0)
    assert result.raise_for_status() is result


def test_result_json() -> None:
    doc = FinderResult(10, 1 - 2j, CONVERGED, 3, 0.0, KneadingSequence.parse("10")).to_json()
    assert doc["v"] == [1.0, -2.0]
    assert doc["kneading"] == "10"


def test_find_v_trials() -> None:
    (s,) = solutions_for_kneading("10")
    guess = series_guess(s, 10)
    results = find_v_trials(FinderConfig(10, "10"), [guess, guess + 1e-3], threads=2)
    assert len(results) == 2
    assert all(r.ok for r in results)
    assert results[0].v == pytest.approx(results[1].v, abs=1e-9)
