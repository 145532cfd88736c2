import numpy as np
import pytest

from cubicurve.errors import NotACenter
from cubicurve.quadratic import QuadraticCenter, center_count, centers, critical_orbit, psi_eval

AIRPLANE = -1.7548776662466927
RABBIT = -0.12256116687665362 + 0.7448617666197442j


@pytest.mark.parametrize("r,count", [(1, 1), (2, 1), (3, 3), (4, 6), (5, 15)])
def test_center_count(r: int, count: int) -> None:
    assert center_count(r) == count
    assert len(centers(r)) == count


def test_centers_are_sorted_and_distinct() -> None:
    cs = [q.c for q in centers(4)]
    assert cs == sorted(cs, key=lambda c: (round(c.real, 9), round(c.imag, 9)))
    assert len({round(c.real, 6) + 1j * round(c.imag, 6) for c in cs}) == len(cs)


def test_centers_deterministic() -> None:
    assert [q.c for q in centers(5, seed=3)] == pytest.approx([q.c for q in centers(5, seed=0)], abs=1e-10)


def test_critical_orbit() -> None:
    assert critical_orbit(-1, 2) == [0, -1]
    assert critical_orbit(1j, 3) == [0, 1j, -1 + 1j]


def test_psi_eval() -> None:
    # psi_4(X1, X2, X3) = X1 X2 X3 + X2 X3 + X3 + 1
    x1, x2, x3 = 2.0, -1.0, 3j
    assert psi_eval([]) == 1
    assert psi_eval([x1, x2, x3]) == pytest.approx(x1 * x2 * x3 + x2 * x3 + x3 + 1)


def test_validates_period() -> None:
    q = QuadraticCenter.from_parameter(AIRPLANE, 3)
    assert q.orbit[0] == 0
    assert q.nickname == "airplane"


def test_rejects_non_center() -> None:
    with pytest.raises(NotACenter, match="misses zero"):
        QuadraticCenter.from_parameter(0.1, 3)


def test_rejects_lower_period() -> None:
    with pytest.raises(NotACenter, match="period 2"):
        QuadraticCenter.from_parameter(-1.0, 4)


def test_nickname_of_conjugate() -> None:
    assert QuadraticCenter.from_parameter(np.conj(RABBIT), 3).nickname == "rabbit"
    assert QuadraticCenter.from_parameter(0.0, 1).nickname == "z^2"


@pytest.mark.parametrize(
    "c,r,psi",
    [
        # case 1: z**2
        (0j, 1, 1),
        # case 2: basilica
        (-1 + 0j, 2, -1),
        # case 3: airplane
        (AIRPLANE, 3, -5.649),
        # case 4: rabbit
        (RABBIT, 3, -1.675 - 1.125j),
    ],
)
def test_center_psi(c: complex, r: int, psi: complex) -> None:
    assert QuadraticCenter.from_parameter(c, r).psi() == pytest.approx(psi, abs=2e-3)


def test_centers_invalid_period() -> None:
    with pytest.raises(ValueError, match="positive"):
        centers(0)
