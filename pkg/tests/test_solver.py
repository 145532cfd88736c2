from fractions import Fraction

import pytest

from cubicurve.errors import InconsistentSeed, NotACenter, SeedRejected
from cubicurve.series import Monomial, PuiseuxSeries, xi_power
from cubicurve.solver import (
    KneadingSequence,
    SolutionVector,
    all_kneadings,
    dual_solution,
    error_vector,
    galois_orbit,
    is_self_dual,
    is_solved,
    primitive_solution,
    refine_diagonal,
    same_region,
    satellite_monomials,
    satellite_solutions,
    seed_from_monomials,
    solutions_for_kneading,
    solve_graded,
    solve_trivial_kneading,
    star,
    symmetry,
)

TRUNC = 12
ONE = Monomial(1.0, Fraction(0))


def interior(*series: PuiseuxSeries) -> SolutionVector:
    return SolutionVector.from_interior(list(series), TRUNC)


def test_kneading_parse() -> None:
    k = KneadingSequence.parse("1000")
    assert k.p == 4
    assert k.sigma(1) == 1
    assert k.zero_count() == 2
    assert str(k) == "1000"
    assert KneadingSequence.parse(k) is k


@pytest.mark.parametrize(
    "text,match",
    [
        # case 1: the final bit is always zero
        ("11", "final kneading bit"),
        # case 2
        ("10a", "bit string"),
        # case 3
        ("", "bit string"),
    ],
)
def test_kneading_invalid(text: str, match: str) -> None:
    with pytest.raises(ValueError, match=match):
        KneadingSequence.parse(text)


def test_kneading_trivial() -> None:
    assert KneadingSequence.parse("000").is_trivial
    assert not KneadingSequence.parse("010").is_trivial


def test_all_kneadings() -> None:
    assert [str(k) for k in all_kneadings(3)] == ["000", "010", "100", "110"]


def test_star_escaping_bit() -> None:
    assert star(ONE, 1) == ONE


def test_star_staying_bit() -> None:
    assert star(Monomial(2.0, Fraction(1)), 0) == Monomial(-4.0, Fraction(1))


def test_star_escaping_bit_needs_one() -> None:
    with pytest.raises(InconsistentSeed):
        star(Monomial(2.0, Fraction(1)), 1)


@pytest.mark.parametrize(
    "p,expected",
    [
        # case 1
        (1, {"0": 1}),
        # case 2
        (2, {"00": 1, "10": 1}),
        # case 3
        (3, {"000": 3, "010": 2, "100": 2, "110": 1}),
        # case 4
        (4, {"0000": 6, "1000": 4, "0100": 2, "1100": 2, "0010": 2, "1010": 1, "0110": 2, "1110": 1}),
    ],
)
def test_region_counts(solutions: dict[int, list[SolutionVector]], p: int, expected: dict[str, int]) -> None:
    found: dict[str, int] = {}
    for s in solutions[p]:
        found[str(s.kneading)] = found.get(str(s.kneading), 0) + 1
    assert found == expected


def test_every_solution_is_solved(solutions: dict[int, list[SolutionVector]]) -> None:
    for p in range(2, 5):
        for s in solutions[p]:
            assert is_solved(s), f"residual orders too low for {s.kneading}"
            assert not s.has_vanishing_entry()


@pytest.mark.parametrize(
    "kneading,terms",
    [
        # case 1: u_1 = 1 - xi**2 + ...
        ("10", [{0: 1, 2: -1}]),
        # case 2
        ("110", [{0: 1, 4: -1}, {0: 1, 2: -1}]),
    ],
)
def test_primitive_series(kneading: str, terms: list[dict[int, float]]) -> None:
    (s,) = solutions_for_kneading(kneading)
    for j, expected in enumerate(terms, start=1):
        for exp, coeff in expected.items():
            assert s.series(j).coefficient(exp) == pytest.approx(coeff, abs=1e-9)


def test_two_roots_of_100() -> None:
    sols = solutions_for_kneading("100")
    assert len(sols) == 2
    leads = sorted(s.m[1].coeff.real for s in sols)
    assert leads == pytest.approx([-1.0, 1.0])
    assert all(s.m[1].exp == 1 for s in sols)


def test_error_vector_vanishes(solutions: dict[int, list[SolutionVector]]) -> None:
    s = solutions[3][-1]
    for e in error_vector(s):
        assert e.ord(s.tolerance()) >= s.trunc - 2


def test_error_vector_of_catalan_truncation() -> None:
    # u_1 solves u**2 - u + xi**2 = 0; the next coefficient is -5
    w = interior(PuiseuxSeries.from_terms({0: 1.0, 2: -1.0, 4: -1.0, 6: -2.0}, TRUNC))
    (e,) = error_vector(w)
    assert e.ord(w.tolerance()) == 8
    assert e.coefficient(8) == pytest.approx(-5.0)


def test_refine_diagonal_period_two() -> None:
    w = interior(PuiseuxSeries.constant(1.0, TRUNC))
    once = refine_diagonal(w)
    assert once.series(1).allclose(PuiseuxSeries.from_terms({0: 1.0, 2: -1.0}, TRUNC))
    twice = refine_diagonal(once)
    assert twice.series(1).allclose(PuiseuxSeries.from_terms({0: 1.0, 2: -1.0, 4: -1.0}, TRUNC))
    assert twice.m == once.m == (ONE,)


def test_refine_diagonal_needs_low_orders() -> None:
    w = interior(xi_power(2, TRUNC))
    with pytest.raises(SeedRejected, match="below 2"):
        refine_diagonal(w)


def test_refine_diagonal_needs_residual_margin() -> None:
    # E_1 starts at xi**2, not above 2 * ord(m_1)
    w = interior(xi_power(1, TRUNC, coeff=0.5))
    with pytest.raises(SeedRejected, match="E_1") as excinfo:
        refine_diagonal(w)
    assert excinfo.value.index == 1


def test_seed_rejected_on_kneading_mismatch() -> None:
    m = [Monomial(1.0, Fraction(1)), Monomial(2.0, Fraction(1))]
    with pytest.raises(SeedRejected) as excinfo:
        seed_from_monomials(m, "010")
    assert excinfo.value.index == 2


def test_seed_needs_one_monomial_per_interior_index() -> None:
    with pytest.raises(ValueError, match="expected 3 monomials"):
        seed_from_monomials([ONE], "1110")


def test_seed_of_1110() -> None:
    seed = seed_from_monomials([ONE, ONE, ONE], "1110")
    assert seed.series(1).allclose(PuiseuxSeries.constant(1.0, TRUNC))
    assert seed.series(2).allclose(PuiseuxSeries.constant(1.0, TRUNC))
    assert seed.series(3).allclose(PuiseuxSeries.from_terms({0: 1.0, 2: -1.0}, TRUNC))

    solved = solve_graded(seed)
    assert is_solved(solved)
    assert solved.m == seed.m
    (expected,) = solutions_for_kneading("1110")
    assert same_region(solved, expected)


def test_graded_solve_of_10() -> None:
    solved = solve_graded(seed_from_monomials([ONE], "10"))
    assert [solved.series(1).coefficient(k) for k in (0, 2, 4, 6, 8)] == pytest.approx([1, -1, -1, -2, -5])


def test_graded_solve_keeps_a_solution(solutions: dict[int, list[SolutionVector]]) -> None:
    for s in solutions[3]:
        if not s.kneading.is_trivial:
            assert solve_graded(s).allclose(s)


def test_signs_select_the_region_of_1000() -> None:
    first = primitive_solution("1000", (1, -1))
    second = primitive_solution("1000", (1, 1))
    assert first is not None and second is not None
    assert not same_region(first, second)
    for s in (first, second):
        assert str(s.kneading) == "1000"
        reseeded = solve_graded(seed_from_monomials(s.m, "1000"))
        assert same_region(reseeded, s)


def test_primitive_solution_needs_one_sign_per_zero() -> None:
    with pytest.raises(ValueError, match="expected 2 signs"):
        primitive_solution("1000", [1])


def test_trivial_kneading_basilica() -> None:
    s = solve_trivial_kneading(-1.0, 2)
    assert s.m[0] == Monomial(1.0, Fraction(2))
    assert is_solved(s)


def test_trivial_kneading_even_powers_only() -> None:
    s = solve_trivial_kneading(-1.7548776662466927, 3)
    for w in s.interior:
        assert all(k % 2 == 0 for k in w.terms())


def test_trivial_kneading_not_a_center() -> None:
    with pytest.raises(NotACenter):
        solve_trivial_kneading(0.5, 2)


def test_satellite_monomials() -> None:
    (base,) = solutions_for_kneading("10")
    m = satellite_monomials(base, [-1.0])
    assert len(m) == 3
    assert m[0].is_one() and m[2].is_one()
    assert m[1].exp == 4
    assert m[1].coeff == pytest.approx(1.0)


def test_satellite_solutions_of_1010() -> None:
    (s,) = satellite_solutions("1010")
    assert is_solved(s)
    assert str(s.kneading) == "1010"
    assert s.m[1].exp == 4
    assert s.m[1].coeff == pytest.approx(1.0)
    assert satellite_solutions("1000") == []


def test_galois_ramified_region() -> None:
    s = solutions_for_kneading("0100")[0]
    assert s.mu == 2
    orbit = galois_orbit(s)
    assert len(orbit) == 2
    assert same_region(orbit[0], orbit[1])


def test_galois_distinct_regions() -> None:
    a, b = solutions_for_kneading("100")
    assert not same_region(a, b)


def test_unique_region_is_self_dual() -> None:
    (s,) = solutions_for_kneading("110")
    assert is_self_dual(s)
    assert same_region(dual_solution(dual_solution(s)), s)
    assert symmetry(s) == "±"


def test_json_round_trip() -> None:
    s = solutions_for_kneading("0100")[0]
    assert SolutionVector.from_json(s.to_json()).allclose(s)
