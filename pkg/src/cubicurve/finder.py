"""
Fixed point search for the marked critical value ``v`` of a map with prescribed ``a`` and kneading.

The unknowns are ``w_j = u_j = (a - a_j)/(3a)`` for ``0 < j < p``. Each sweep replaces ``w_{p-1}``, then
``w_{p-2}``, down to ``w_1``, by the value that solves the recurrence residual ``E_j = 0`` for that entry
alone. There is no convergence theory, so outcomes are reported rather than raised.
"""

from __future__ import annotations

import cmath
import logging
import math
import warnings
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from cubicurve import _kernels
from cubicurve.dynamics import CubicMap, classify, u_values
from cubicurve.errors import AmbiguousKneading, NotConverged, OrbitOverflow, WrongKneading
from cubicurve.solver import KneadingSequence, SolutionVector

logger = logging.getLogger("cubicurve")

WARN_BELOW = 3.0
DAMPING = 0.5
UNDAMP_AFTER = 3

CONVERGED = "converged"
NOT_CONVERGED = "not-converged"
WRONG_KNEADING = "wrong-kneading"
FAILED = "failed"


@dataclass(frozen=True)
class FinderConfig:
    """
    Target and budget of a fixed point search.

    Parameters
    ----------
    a: complex
        The marked critical point, ``|a| >= 1``. Values below 3 are accepted with a warning.
    kneading: KneadingSequence | str
        The requested kneading sequence; its length is the period.
    tol: float
        Sweeps stop once no entry moves by more than this.
    max_sweeps: int
        Sweep budget.
    """

    a: complex
    kneading: KneadingSequence
    tol: float = 1e-12
    max_sweeps: int = 500

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", complex(self.a))
        object.__setattr__(self, "kneading", KneadingSequence.parse(self.kneading))
        if abs(self.a) < 1:
            raise ValueError(f"|a| must be at least 1, got {abs(self.a):.4g}")
        if abs(self.a) < WARN_BELOW:
            warnings.warn(
                f"|a| = {abs(self.a):.4g} is small; the fixed point iteration may converge to another region",
                stacklevel=3,
            )
        if self.max_sweeps < 1:
            raise ValueError(f"max_sweeps must be positive, got {self.max_sweeps}")

    @property
    def p(self) -> int:
        return self.kneading.p

    @property
    def xi(self) -> complex:
        return 1 / (3 * self.a)


@dataclass(frozen=True)
class FinderResult:
    """
    Outcome of ``find_v``.

    ``status`` is one of ``"converged"``, ``"not-converged"``, ``"wrong-kneading"`` and ``"failed"``.
    ``kneading`` is the kneading sequence of the final map when it could be determined.
    """

    a: complex
    v: complex
    status: str
    sweeps: int
    residual: float
    kneading: KneadingSequence | None = None
    detail: str = field(default="", compare=False)

    @property
    def ok(self) -> bool:
        return self.status == CONVERGED

    def raise_for_status(self) -> FinderResult:
        if self.status == WRONG_KNEADING:
            raise WrongKneading(f"a = {self.a:.6g}, v = {self.v:.9g}: {self.detail}")
        if self.status != CONVERGED:
            raise NotConverged(f"{self.status} after {self.sweeps} sweeps: {self.detail}")
        return self

    def to_json(self) -> dict:
        return {
            "a": [self.a.real, self.a.imag],
            "v": [self.v.real, self.v.imag],
            "status": self.status,
            "sweeps": self.sweeps,
            "residual": self.residual,
            "kneading": None if self.kneading is None else str(self.kneading),
            "detail": self.detail,
        }


def psi_step(j: int, w1: complex, wj: complex, wj1: complex, xi: complex, sigma_j: int) -> complex:
    """
    The value of ``w_j`` that solves ``xi**2 (w_{j+1} - w_1) = w_j**2 (w_j - 1)`` near the current one.

    For ``sigma_j = 1`` this is ``1 + xi**2 (w_{j+1} - w_1) / w_j**2``. For ``sigma_j = 0`` it is
    ``w_j * sqrt(xi**2 (w_{j+1} - w_1) / (w_j**2 (w_j - 1)))``, with the principal square root, which
    takes values in the right half-plane.

    Raises
    ------
    ZeroDivisionError
        If ``w_j`` vanishes, or equals one when ``sigma_j = 0``.
    """
    num = xi * xi * (wj1 - w1)
    if wj == 0 or (sigma_j == 0 and wj == 1):
        raise ZeroDivisionError(f"division by zero in the update of w_{j}")
    if sigma_j:
        return 1 + num / (wj * wj)
    return wj * cmath.sqrt(num / (wj * wj * (wj - 1)))


def _residual(w: Sequence[complex], xi: complex) -> float:
    p = len(w) + 1
    ext = list(w) + [0j]
    return max(abs(xi * xi * (ext[j] - ext[0]) - ext[j - 1] ** 2 * (ext[j - 1] - 1)) for j in range(1, p))


def _sweep(w: list[complex], cfg: FinderConfig, damping: float) -> float:
    p = cfg.p
    biggest = 0.0
    for j in range(p - 1, 0, -1):
        wj1 = w[j] if j < p - 1 else 0j
        target = psi_step(j, w[0], w[j - 1], wj1, cfg.xi, cfg.kneading.sigma(j))
        delta = target - w[j - 1]
        biggest = max(biggest, abs(delta))
        w[j - 1] += damping * delta
    return biggest


def find_v(cfg: FinderConfig, v0: complex) -> FinderResult:
    """
    Search for ``v`` with ``F_{a,v}`` of period ``p`` and the requested kneading sequence.

    Parameters
    ----------
    cfg: FinderConfig
        The target ``a``, kneading sequence and budget.
    v0: complex
        Starting value; the initial ``w`` are read off the critical orbit of ``F_{a,v0}``.

    Returns
    -------
    FinderResult
        The final map and a status. A converged ``v`` is polished by Newton's method on
        ``Phi_p(a, .) = 0`` and then classified.
    """
    a, p = cfg.a, cfg.p
    if p == 1:
        return FinderResult(a, a, CONVERGED, 0, 0.0, cfg.kneading)
    try:
        w = u_values(CubicMap(a, v0), p)
    except OrbitOverflow as e:
        return FinderResult(a, complex(v0), FAILED, 0, math.inf, detail=str(e))

    damping, residual, shrinking = 1.0, math.inf, 0
    for sweep in range(1, cfg.max_sweeps + 1):
        try:
            moved = _sweep(w, cfg, damping)
        except ZeroDivisionError as e:
            return FinderResult(a, a * (1 - 3 * w[0]), FAILED, sweep, math.inf, detail=str(e))
        if not all(cmath.isfinite(z) for z in w):
            return FinderResult(a, complex(v0), FAILED, sweep, math.inf, detail="iteration diverged")

        new_residual = _residual(w, cfg.xi)
        if new_residual > residual:
            damping, shrinking = DAMPING, 0
        else:
            shrinking += 1
            if shrinking >= UNDAMP_AFTER:
                damping = 1.0
        residual = new_residual
        logger.debug(f"Sweep {sweep}: largest update {moved:.3e}, residual {residual:.3e}")
        if moved < cfg.tol:
            break
    else:
        v = a * (1 - 3 * w[0])
        return FinderResult(a, v, NOT_CONVERGED, cfg.max_sweeps, residual, detail="sweep budget exhausted")

    v, _ = _kernels.newton_v(a, a * (1 - 3 * w[0]), p, 20)
    phi_value = abs(_kernels.phi_partials(a, v, p)[0])
    try:
        found = classify(CubicMap(a, v), p, a_min=WARN_BELOW)
    except AmbiguousKneading as e:
        return FinderResult(a, v, FAILED, sweep, phi_value, detail=str(e))
    if found.marked_period != p:
        return FinderResult(
            a, v, WRONG_KNEADING, sweep, phi_value, detail=f"the marked point has period {found.marked_period}"
        )
    if found.kneading is None:
        return FinderResult(a, v, WRONG_KNEADING, sweep, phi_value, detail="the free critical orbit is bounded")
    if found.kneading != cfg.kneading:
        logger.info(f"Converged to kneading {found.kneading} instead of {cfg.kneading}")
        return FinderResult(
            a, v, WRONG_KNEADING, sweep, phi_value, found.kneading, f"converged to kneading {found.kneading}"
        )
    return FinderResult(a, v, CONVERGED, sweep, phi_value, found.kneading)


def series_guess(solution: SolutionVector, a: complex) -> complex:
    """``v = a (1 - 3 u_1)`` from a solved series, evaluated with the principal root ``xi**(1/mu)``."""
    a = complex(a)
    root = (1 / (3 * a)) ** (1 / solution.mu)
    return a * (1 - 3 * solution.series(1).evaluate(root))


def find_v_trials(cfg: FinderConfig, starts: Sequence[complex], threads: int | None = None) -> list[FinderResult]:
    """Run ``find_v`` from several independent starting values."""
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda v0: find_v(cfg, v0), starts))
