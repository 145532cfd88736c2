"""Simultaneous polynomial root finding, followed by problem specific Newton polishing."""

from __future__ import annotations

import logging
from collections.abc import Callable

import numpy as np
import numpy.typing as npt
from numpy.polynomial import polynomial as P

from cubicurve.errors import RootFindingStalled

logger = logging.getLogger("cubicurve")

NewtonStep = Callable[[npt.NDArray[np.complex128]], tuple[npt.NDArray[np.complex128], npt.NDArray[np.complex128]]]


def _root_radius(coeffs: npt.NDArray[np.complex128]) -> float:
    # Fujiwara bound on the root moduli of a monic polynomial
    n = len(coeffs) - 1
    lead = coeffs[-1]
    ratios = [abs(coeffs[n - k] / lead) ** (1.0 / k) for k in range(1, n + 1)]
    ratios[-1] = ratios[-1] / 2 ** (1.0 / n)
    return 2.0 * max(max(ratios), 1e-12)


def aberth(
    coeffs: npt.ArrayLike,
    *,
    seed: int = 0,
    tol: float = 1e-13,
    max_iter: int = 1000,
    start: npt.NDArray[np.complex128] | None = None,
    step: NewtonStep | None = None,
) -> npt.NDArray[np.complex128]:
    """
    Approximate all roots of a polynomial by the Aberth-Ehrlich simultaneous iteration.

    Parameters
    ----------
    coeffs: npt.ArrayLike
        Coefficients, lowest degree first (the ``numpy.polynomial`` convention).
    seed: int
        Seed for the random rotation of the initial circle of guesses.
    tol: float
        Relative step size below which the iteration stops.
    max_iter: int
        Iteration budget.
    start: npt.NDArray[np.complex128] | None
        Initial approximations, one per root. Defaults to a randomly rotated circle enclosing all roots.
    step: NewtonStep | None
        Evaluates ``(value, derivative)`` of the polynomial by other means than its coefficients,
        for example by a recurrence that stays accurate near clustered roots.

    Returns
    -------
    npt.NDArray[np.complex128]
        The approximate roots, in no particular order.
    """
    c = P.polytrim(np.asarray(coeffs, dtype=np.complex128))
    n = len(c) - 1
    if n < 1:
        return np.zeros(0, dtype=np.complex128)
    if n == 1 and step is None:
        return np.array([-c[0] / c[1]], dtype=np.complex128)

    dc = P.polyder(c)
    if start is None:
        rng = np.random.default_rng(seed)
        radius = _root_radius(c)
        angles = 2 * np.pi * (np.arange(n) + rng.uniform(0.1, 0.4)) / n
        z = radius * np.exp(1j * angles) * (1 + 0.01 * rng.standard_normal(n))
    else:
        z = np.array(start, dtype=np.complex128)

    for it in range(max_iter):
        if step is None:
            pz = P.polyval(z, c)
            dpz = P.polyval(z, dc)
        else:
            pz, dpz = step(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = pz / dpz
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, 1.0)
            inv = 1.0 / diff
            np.fill_diagonal(inv, 0.0)
            delta = ratio / (1.0 - ratio * inv.sum(axis=1))
        delta = np.where(np.isfinite(delta), delta, 0.0)
        z = z - delta
        if np.max(np.abs(delta)) <= tol * max(1.0, float(np.max(np.abs(z)))):
            logger.debug(f"Aberth iteration converged after {it + 1} steps (degree {n})")
            break
    else:
        logger.debug(f"Aberth iteration used its full budget of {max_iter} steps (degree {n})")
    return z


def newton_polish(
    z: npt.NDArray[np.complex128],
    step: NewtonStep,
    *,
    tol: float = 1e-12,
    max_iter: int = 50,
) -> npt.NDArray[np.complex128]:
    """
    Polish approximate roots with a vectorized Newton iteration.

    Parameters
    ----------
    z: npt.NDArray[np.complex128]
        Starting points.
    step: NewtonStep
        Maps points to ``(value, derivative)`` arrays of the function whose zeros are sought.
    tol: float
        Relative step size at which a point counts as converged.
    max_iter: int
        Iteration budget.

    Returns
    -------
    npt.NDArray[np.complex128]
        The polished roots.

    Raises
    ------
    RootFindingStalled
        If some point is still moving after the budget is spent.
    """
    z = np.array(z, dtype=np.complex128)
    scale = max(1.0, float(np.max(np.abs(z)))) if z.size else 1.0
    for _ in range(max_iter):
        value, deriv = step(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            dz = np.where(deriv != 0, value / deriv, 0.0)
        z = z - dz
        if np.all(np.abs(dz) <= tol * scale):
            return z
    worst = float(np.max(np.abs(dz))) if z.size else 0.0
    raise RootFindingStalled(f"Newton polishing stalled, last step {worst:.3e} at scale {scale:.3e}")


def min_separation(z: npt.NDArray[np.complex128]) -> float:
    """Smallest pairwise distance between the given points (``inf`` for fewer than two)."""
    if len(z) < 2:
        return float("inf")
    d = np.abs(z[:, None] - z[None, :])
    np.fill_diagonal(d, np.inf)
    return float(d.min())
