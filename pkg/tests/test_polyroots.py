import numpy as np
import pytest
from numpy.polynomial import polynomial as P

from cubicurve.errors import RootFindingStalled
from cubicurve.polyroots import aberth, min_separation, newton_polish


def _sorted(z: np.ndarray) -> np.ndarray:
    return np.array(sorted(z, key=lambda w: (round(w.real, 8), round(w.imag, 8))))


@pytest.mark.parametrize(
    "roots",
    [
        # case 1
        [1.0, 2.0, 3.0],
        # case 2: complex pair
        [1j, -1j, 0.5],
        # case 3: roots of unity
        list(np.exp(2j * np.pi * np.arange(7) / 7)),
    ],
)
def test_aberth(roots: list[complex]) -> None:
    found = aberth(P.polyfromroots(roots))
    np.testing.assert_allclose(_sorted(found), _sorted(np.array(roots, dtype=complex)), atol=1e-9)


def test_aberth_linear_and_constant() -> None:
    np.testing.assert_allclose(aberth([2.0, -4.0]), [0.5])
    assert aberth([3.0]).size == 0


def test_aberth_with_custom_step() -> None:
    # (z - 1)(z + 2), evaluated without the coefficients
    def step(z: np.ndarray):
        return (z - 1) * (z + 2), 2 * z + 1

    found = aberth([-2.0, 1.0, 1.0], step=step)
    np.testing.assert_allclose(_sorted(found), [-2.0, 1.0], atol=1e-10)


def test_aberth_seed_reproducible() -> None:
    coeffs = P.polyfromroots([1, 2, 3, 4j])
    np.testing.assert_array_equal(aberth(coeffs, seed=5), aberth(coeffs, seed=5))


def test_newton_polish() -> None:
    def step(z: np.ndarray):
        return z * z - 2, 2 * z

    polished = newton_polish(np.array([1.4, -1.5]), step)
    np.testing.assert_allclose(polished, [np.sqrt(2), -np.sqrt(2)], rtol=1e-12)


def test_newton_polish_stalls() -> None:
    # z**2 + 1 has no real roots, so a real start never settles
    def step(z: np.ndarray):
        return z * z + 1, 2 * z

    with pytest.raises(RootFindingStalled, match="stalled"):
        newton_polish(np.array([0.5]), step, max_iter=10)


def test_min_separation() -> None:
    assert min_separation(np.array([0, 1, 3 + 0j])) == pytest.approx(1.0)
    assert min_separation(np.array([1j])) == float("inf")
