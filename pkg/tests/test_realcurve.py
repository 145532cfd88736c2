from collections import Counter

import pytest

from cubicurve.realcurve import (
    STAR,
    BimodalModel,
    component_graph,
    enumerate_components,
    model_from_ordering,
    resolve_star,
    star_kneading,
    turning_points,
)


def _stars(models: list[BimodalModel]) -> Counter:
    return Counter(star_kneading(m) for m in models)


@pytest.mark.parametrize("orientation", ["+", "-"])
def test_period_four_counts(orientation: str) -> None:
    assert len(enumerate_components(4, orientation)) == 10
    assert len(enumerate_components(4, orientation, mod_involution=True)) == 5


def test_period_four_real() -> None:
    models = enumerate_components(4, "+", mod_involution=True)
    assert _stars(models) == Counter({f"{STAR}000": 2, f"11{STAR}0": 1, f"1{STAR}00": 1, f"10{STAR}0": 1})


def test_period_four_imaginary() -> None:
    models = enumerate_components(4, "-", mod_involution=True)
    assert _stars(models) == Counter({f"0{STAR}10": 2, f"0{STAR}00": 2, f"1{STAR}10": 1})


def test_both_orientations() -> None:
    assert len(enumerate_components(4, mod_involution=True)) == 10
    assert len(enumerate_components(4)) == 20


def test_components_period_one() -> None:
    models = enumerate_components(1)
    assert [m.orientation for m in models] == ["+", "-"]
    assert all(m.kind == "A" and star_kneading(m) == "0" for m in models)


def test_components_period_two() -> None:
    real = enumerate_components(2, "+")
    assert [m.marked for m in real] == [0, 1]
    assert all(star_kneading(m) == f"{STAR}0" for m in real)
    (imaginary,) = enumerate_components(2, "-")
    assert imaginary.kind == "A"
    assert imaginary.free is None
    assert len(enumerate_components(2, "+", mod_involution=True)) == 1


@pytest.mark.parametrize("p,orientation", [(0, "+"), (3, "x")])
def test_components_invalid_arguments(p: int, orientation: str) -> None:
    with pytest.raises(ValueError):
        enumerate_components(p, orientation)


def test_involution_is_an_involution() -> None:
    for m in enumerate_components(4):
        assert m.involution().involution() == m
        assert star_kneading(m.involution()) == star_kneading(m)


def test_orbit_starts_at_marked_point() -> None:
    for m in enumerate_components(4):
        orbit = m.orbit()
        assert orbit[0] == m.marked
        assert sorted(orbit) == list(range(4))


def test_not_a_cycle() -> None:
    with pytest.raises(ValueError, match="not a cyclic permutation"):
        BimodalModel(3, (0, 2, 1), "+", 1)


def test_not_bimodal() -> None:
    # 0 -> 2 -> 3 -> 1 -> 0 zigzags
    assert turning_points((2, 0, 3, 1), "+") == [0, 1, 2, 3]
    with pytest.raises(ValueError, match="not bimodal"):
        BimodalModel(4, (2, 0, 3, 1), "+", 0)


def test_marked_must_turn() -> None:
    with pytest.raises(ValueError, match="is not a turning point"):
        BimodalModel(4, (1, 3, 0, 2), "+", 0)


def test_model_json() -> None:
    doc = model_from_ordering("a1<a0").to_json()
    assert doc == {
        "p": 2,
        "perm": [1, 0],
        "orientation": "+",
        "marked": 1,
        "type": "B",
        "star_kneading": f"{STAR}0",
    }


def test_model_from_ordering() -> None:
    model = model_from_ordering("a1<a2=â0<a4<a0<a3")
    assert model.p == 5
    assert model.marked == 3
    assert model.free == 1
    assert star_kneading(model) == f"1{STAR}000"
    assert resolve_star(star_kneading(model)) == ("10000", "11000")


def test_resolve_without_star() -> None:
    assert resolve_star("100") == ("100", "100")


@pytest.mark.parametrize("sequence", [f"{STAR}{STAR}0", f"00{STAR}"])
def test_resolve_invalid(sequence: str) -> None:
    with pytest.raises(ValueError):
        resolve_star(sequence)


def test_endpoints_are_kneading_neighbours() -> None:
    for m in enumerate_components(4):
        x, y = resolve_star(star_kneading(m))
        assert sum(b1 != b2 for b1, b2 in zip(x, y)) == 1


@pytest.mark.parametrize("order", ["a0<a0", "a1<b0", "a0<a2"])
def test_model_bad_ordering(order: str) -> None:
    with pytest.raises(ValueError):
        model_from_ordering(order)


def test_component_graph() -> None:
    pieces = component_graph(enumerate_components(4, mod_involution=True))
    assert pieces == [
        (frozenset({"0010", "0110"}), 2),
        (frozenset({"0000", "1000", "1100", "1110", "1010", "0100"}), 8),
    ]
