import math
from fractions import Fraction

import numpy as np
import pytest

from cubicurve.errors import Inconsistent, NotPowerOfTwo
from cubicurve.grid import (
    GridReport,
    MarkedGrid,
    RegionDescriptor,
    grid_from_orders,
    lemma_partial_sums,
    mod_level,
    multiplicity,
    ord_from_grid,
    orbit_pseudometric,
    render_ascii,
    validate_rules,
    winding_number,
)
from tests.util import pick

inf = math.inf
F = Fraction


@pytest.mark.parametrize(
    "depths,kneading,orders",
    [
        # case 1: three marked columns below a single escape
        ((inf, 0, 1, 1), "1000", [F(0), F(1), F(1)]),
        # case 2: a half-integral order
        ((inf, 1, 0, 2), "0100", [F(1), F(0), F(3, 2)]),
        # case 3: period six primitive grid
        ((inf, 1, 0, 2, 1, 0), "010010", [F(1), F(0), F(3, 2), F(1), F(0)]),
        # case 4: a deeper primitive column
        ((inf, 0, 1, 3, 0, 1), "100100", [F(0), F(1), F(5, 2), F(0), F(1)]),
        # case 5: satellite of the 100 grid, where a_3 returns to every level
        ((inf, 0, 1, inf, 0, 1), "100100", [F(0), F(1), F(5), F(0), F(1)]),
    ],
)
def test_ord_from_grid(depths: tuple, kneading: str, orders: list[Fraction]) -> None:
    grid = MarkedGrid(depths)
    assert str(grid.kneading) == kneading
    assert [ord_from_grid(grid, j) for j in range(1, grid.p)] == orders


def test_trivial_grid_orders_sum_to_two() -> None:
    grid = MarkedGrid((inf, inf, inf))
    assert grid.period == 1
    assert str(grid.kneading) == "000"
    assert ord_from_grid(grid, 1) == 2
    assert winding_number(grid, 1) == -1


def test_ord_from_grid_rejects_column_zero() -> None:
    with pytest.raises(ValueError, match="column index"):
        ord_from_grid(MarkedGrid((inf, 0, 1, 1)), 0)


@pytest.mark.parametrize(
    "depths,levels",
    [
        # case 1
        ((inf, 0, 1, 1), [F(1), F(1), F(1, 2)]),
        # case 2
        ((inf, 1, 0, 2), [F(1), F(1, 2), F(1)]),
    ],
)
def test_mod_level(depths: tuple, levels: list[Fraction]) -> None:
    grid = MarkedGrid(depths)
    assert [mod_level(grid, ell) for ell in range(1, len(levels) + 1)] == levels


def test_mod_level_starts_at_one() -> None:
    with pytest.raises(ValueError, match="at least 1"):
        mod_level(MarkedGrid((inf, 0)), 0)


def test_grid_period() -> None:
    assert MarkedGrid((inf, 0, 1, 1)).period == 4
    assert MarkedGrid((inf, 0, 1, inf, 0, 1)).period == 3


def test_from_depths_accepts_none() -> None:
    grid = MarkedGrid.from_depths([None, 0, 1, 1])
    assert grid == MarkedGrid((inf, 0, 1, 1))
    assert grid.to_json() == [None, 0, 1, 1]


@pytest.mark.parametrize(
    "depths,match",
    [
        # case 1
        ((0, 1), "column zero"),
        # case 2
        ((inf, -1), "non-negative"),
        # case 3
        ((inf, 0, inf, 0, 1), "does not divide"),
        # case 4
        ((), "at least one column"),
    ],
)
def test_invalid_grid(depths: tuple, match: str) -> None:
    with pytest.raises(ValueError, match=match):
        MarkedGrid(depths)


def test_matrix() -> None:
    m = MarkedGrid((inf, 0, 1, 1)).matrix(3)
    np.testing.assert_array_equal(m, [[1, 1, 1, 1], [1, 0, 1, 1], [1, 0, 0, 0]])


def test_marked_wraps_columns() -> None:
    grid = MarkedGrid((inf, 0, 1, 1))
    assert grid.marked(5, 4)
    assert not grid.marked(1, 5)


@pytest.mark.parametrize(
    "depths",
    [
        (inf, 0, 1, 1),
        (inf, 1, 0, 2),
        (inf, 1, 0, 2, 1, 0),
        (inf, 0, 1, inf, 0, 1),
        (inf, inf),
    ],
)
def test_legal_grids_pass(depths: tuple) -> None:
    report = validate_rules(MarkedGrid(depths))
    assert report.passed
    assert str(report) == "PASS"


def test_rule_three() -> None:
    report = validate_rules(MarkedGrid((inf, 1, 1, 0)))
    assert (report.rule, report.level, report.column) == ("R3", 1, 1)
    assert not report.passed


def test_rule_two() -> None:
    report = validate_rules(MarkedGrid((inf, 2, 0, 0)))
    assert (report.rule, report.level, report.column) == ("R2", 2, 1)
    assert str(report).startswith("FAIL R2 at level 2, column 1")


def test_rule_one_from_matrix() -> None:
    report = validate_rules([[1, 1], [1, 0], [0, 0]])
    assert report.rule == "R1"
    assert report.column == 0


def test_rule_one_gap() -> None:
    report = validate_rules([[1, 1], [1, 0], [1, 1]])
    assert (report.rule, report.level, report.column) == ("R1", 2, 1)


def test_matrix_input() -> None:
    assert validate_rules([[1, 1, 1, 1], [1, 0, 1, 1], [1, 0, 0, 0]]) == GridReport()


@pytest.mark.parametrize(
    "orders,kneading,depths",
    [
        # case 1
        ([F(0), F(1), F(1)], "1000", (inf, 0, 1, 1)),
        # case 2
        ([F(1), F(0), F(3, 2)], "0100", (inf, 1, 0, 2)),
        # case 3
        ([F(2), F(2)], "000", (inf, inf, inf)),
        # case 4
        ([F(0), F(1), F(5), F(0), F(1)], "100100", (inf, 0, 1, inf, 0, 1)),
    ],
)
def test_grid_from_orders(orders: list, kneading: str, depths: tuple) -> None:
    assert grid_from_orders(orders, kneading) == MarkedGrid(depths)


def test_order_between_level_sums() -> None:
    with pytest.raises(Inconsistent, match="strictly between"):
        grid_from_orders([F(0), F(1, 2)], "100")


def test_order_against_kneading() -> None:
    with pytest.raises(Inconsistent):
        grid_from_orders([F(0), F(1), F(1)], "0100")


def test_orders_wrong_length() -> None:
    with pytest.raises(ValueError, match="expected 3 orders"):
        grid_from_orders([F(0)], "1000")


def test_multiplicity() -> None:
    assert multiplicity([F(1), F(0), F(3, 2)]) == 2
    assert multiplicity([F(0), inf]) == 1


def test_multiplicity_not_power_of_two() -> None:
    with pytest.raises(NotPowerOfTwo):
        multiplicity([F(1, 3)])


@pytest.mark.parametrize(
    "depths,mu,nu",
    [
        # case 1
        ((inf, 0, 1, 1), 1, 3),
        # case 2
        ((inf, 1, 0, 2), 2, 5),
        # case 3
        ((inf, 0), 1, 1),
        # case 4
        ((inf, 1, 0, 2, 1, 0), 2, 11),
    ],
)
def test_winding_number(depths: tuple, mu: int, nu: int) -> None:
    assert winding_number(MarkedGrid(depths), mu) == nu


def test_partial_sums() -> None:
    sums = lemma_partial_sums([F(0), F(1), F(1)], n=4)
    assert sums == [F(2), F(3), F(4)]
    assert all(s > 0 for s in sums)


def test_render_ascii() -> None:
    text = render_ascii(MarkedGrid((inf, 0, 1, 1)), levels=3)
    assert text.splitlines() == ["o-o-o-o", "|   | |", "o . o o", "|", "o . . ."]


# the two pseudometrics of the 1000 regions
ORBIT_METRIC_S = [
    [F(0), F(1), F(1, 2), F(1, 2)],
    [F(1), F(0), F(1), F(1)],
    [F(1, 2), F(1), F(0), F(1, 2)],
    [F(1, 2), F(1), F(1, 2), F(0)],
]
ORBIT_METRIC_T = [
    [F(0), F(1), F(1, 2), F(1, 2)],
    [F(1), F(0), F(1), F(1)],
    [F(1, 2), F(1), F(0), F(1, 4)],
    [F(1, 2), F(1), F(1, 4), F(0)],
]


def test_two_variants_of_1000(regions: dict[int, list[RegionDescriptor]]) -> None:
    matrices = [orbit_pseudometric(r) for r in pick(regions[4], "1000")]
    assert len(matrices) == 4
    assert sum(m == ORBIT_METRIC_S for m in matrices) == 2
    assert sum(m == ORBIT_METRIC_T for m in matrices) == 2


def test_pseudometric_needs_series(regions: dict[int, list[RegionDescriptor]]) -> None:
    region = regions[3][0]
    bare = RegionDescriptor(region.p, region.kneading, region.grid, region.monomials, region.mu, region.nu)
    with pytest.raises(ValueError, match="solved series"):
        orbit_pseudometric(bare)
