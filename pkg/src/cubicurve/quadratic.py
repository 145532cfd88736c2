"""
Centers of hyperbolic components of the Mandelbrot set, and the psi polynomials.

The center of a period ``r`` component is a parameter ``c`` for which the critical orbit
``0 -> c -> c**2 + c -> ...`` of ``z**2 + c`` returns to zero after exactly ``r`` steps.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import numpy.typing as npt
from numpy.polynomial import polynomial as P

from cubicurve.errors import NotACenter, RootFindingStalled
from cubicurve.polyroots import aberth, min_separation, newton_polish

logger = logging.getLogger("cubicurve")

CENTER_TOL = 1e-10
PERIOD_TOL = 1e-8

# nicknames of the centers with critical value in the closed upper half-plane
NICKNAMES: dict[int, dict[str, complex]] = {
    1: {"z^2": 0j},
    2: {"basilica": -1 + 0j},
    3: {"rabbit": -0.12256 + 0.74486j, "airplane": -1.75488 + 0j},
    4: {
        "kokopelli": -0.15652 + 1.03225j,
        "(1/4)-rabbit": 0.28227 + 0.53006j,
        "worm": -1.94080 + 0j,
        "double-basilica": -1.31070 + 0j,
    },
}


@dataclass(frozen=True)
class QuadraticCenter:
    """
    A center ``c`` of period ``r`` together with its critical orbit ``0, c_1, ..., c_{r-1}``.

    ``orbit[0]`` is the critical point zero and ``orbit[j]`` is ``c_j``.
    """

    c: complex
    r: int
    orbit: tuple[complex, ...]

    @classmethod
    def from_parameter(cls, c: complex, r: int) -> QuadraticCenter:
        """
        Validate ``c`` as a center of exact period ``r`` and record its critical orbit.

        Parameters
        ----------
        c: complex
            Candidate center.
        r: int
            Expected period.

        Returns
        -------
        QuadraticCenter
            The validated center.

        Raises
        ------
        NotACenter
            If the critical orbit does not return to zero at step ``r``, or returns earlier.
        """
        orbit = critical_orbit(c, r)
        scale = max(1.0, max(abs(z) for z in orbit))
        last = orbit[-1] ** 2 + c
        if abs(last) > 1e-8 * scale:
            raise NotACenter(f"critical orbit of z^2 + ({c:.6g}) misses zero at step {r} by {abs(last):.2e}")
        for s in range(1, r):
            if abs(orbit[s]) < PERIOD_TOL * scale:
                raise NotACenter(f"{c:.6g} is a center of period {s}, not {r}")
        return cls(complex(c), r, tuple(orbit))

    @property
    def nickname(self) -> str | None:
        for name, c in NICKNAMES.get(self.r, {}).items():
            if abs(c - self.c) < 1e-4 or abs(c.conjugate() - self.c) < 1e-4:
                return name
        return None

    def psi(self) -> complex:
        """``psi_r(2c_1, ..., 2c_{r-1})``, the limit of ``a/t`` at the matching trivial kneading ideal point."""
        return psi_eval([2 * z for z in self.orbit[1:]])


def critical_orbit(c: complex, r: int) -> list[complex]:
    """The first ``r`` points ``0, c, c**2 + c, ...`` of the critical orbit."""
    orbit = [0j]
    for _ in range(r - 1):
        orbit.append(orbit[-1] ** 2 + c)
    return orbit


def psi_eval(xs: Sequence[complex]) -> complex:
    """
    Evaluate ``psi_{j+1}(X_1, ..., X_j)`` by the recursion ``psi_{j+1} = psi_j * X_j + 1``, ``psi_1 = 1``.

    Parameters
    ----------
    xs: Sequence[complex]
        The arguments ``X_1, ..., X_j``.

    Returns
    -------
    complex
        The value, which equals ``X_1...X_j + X_2...X_j + ... + X_j + 1``.
    """
    value = 1 + 0j
    for x in xs:
        value = value * x + 1
    return value


@lru_cache(maxsize=16)
def _gleason_coeffs(r: int) -> tuple[complex, ...]:
    # P_1(c) = c, P_{k+1}(c) = P_k(c)**2 + c; the period r centers are among the roots of P_r
    poly = np.array([0.0, 1.0])
    for _ in range(r - 1):
        poly = P.polyadd(P.polymul(poly, poly), [0.0, 1.0])
    return tuple(complex(x) for x in poly)


def _newton_step(r: int):
    def step(c: npt.NDArray[np.complex128]):
        z = np.zeros_like(c)
        dz = np.zeros_like(c)
        for _ in range(r):
            dz = 2 * z * dz + 1
            z = z * z + c
        return z, dz

    return step


@lru_cache(maxsize=16)
def centers(r: int, seed: int = 0) -> tuple[QuadraticCenter, ...]:
    """
    All centers of period exactly ``r``.

    Parameters
    ----------
    r: int
        The period, at least one.
    seed: int
        Seed for the root finder's initial guesses.

    Returns
    -------
    tuple[QuadraticCenter, ...]
        The centers, sorted by real part, then imaginary part.

    Raises
    ------
    ValueError
        If ``r`` is not positive.
    RootFindingStalled
        If polishing fails or the root finder returns coincident roots.
    """
    if r < 1:
        raise ValueError(f"period must be positive, got {r}")
    if r == 1:
        return (QuadraticCenter(0j, 1, (0j,)),)

    coeffs = np.array(_gleason_coeffs(r))
    roots = newton_polish(aberth(coeffs, seed=seed), _newton_step(r), tol=1e-14)
    if min_separation(roots) < 1e-9:
        raise RootFindingStalled(f"coincident roots among the period {r} centers")

    found = []
    for c in roots:
        try:
            found.append(QuadraticCenter.from_parameter(complex(c), r))
        except NotACenter:
            continue
    found.sort(key=lambda q: (round(q.c.real, 9), round(q.c.imag, 9)))
    logger.debug(f"Found {len(found)} centers of period {r}")
    return tuple(found)


def center_count(r: int) -> int:
    """Number of period ``r`` centers, ``2**(r-1)`` minus the counts of all proper divisors."""
    return 2 ** (r - 1) - sum(center_count(s) for s in range(1, r) if r % s == 0)
