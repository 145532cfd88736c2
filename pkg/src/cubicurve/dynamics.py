"""
Numerical dynamics of the cubic maps ``F(z) = z**3 - 3 a**2 z + 2 a**3 + v``.

The critical points are ``a`` (marked, of period ``p`` on ``S_p``) and ``-a`` (free). This module evaluates
orbits, Green's function and the Boettcher coordinate, classifies critical orbits, and works with the fiber
of ``S_p`` over a fixed value of ``a``.
"""

from __future__ import annotations

import logging
import math
import os
from collections import Counter
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import numpy.typing as npt
from numpy.polynomial import polynomial as P

from cubicurve import _kernels
from cubicurve.errors import (
    AmbiguousKneading,
    NotEscaping,
    OrbitOverflow,
    OrdRoundingAmbiguous,
    RootFindingStalled,
    UnmatchedRoot,
)
from cubicurve.grid import (
    RegionDescriptor,
    center_from_monomials,
    grid_from_orders,
    multiplicity,
    ord_from_grid,
    winding_number,
)
from cubicurve.polyroots import aberth, min_separation
from cubicurve.quadratic import centers
from cubicurve.series import Monomial
from cubicurve.solver import KneadingSequence

logger = logging.getLogger("cubicurve")

ESCAPE_BUDGET = 500
GREEN_BUDGET = 200
PERIOD_TOL = 1e-9
AMBIGUITY_RATIO = 1e-3
A_MIN = 8.0
FIBER_RADIUS = 10.0
MAX_FIBER_PERIOD = 5
MONODROMY_STEPS = 1024
ORD_TOL = 0.05
ORDER_RADII = 10
MAX_DENOMINATOR = 16


@dataclass(frozen=True)
class CubicMap:
    """The map ``F_{a,v}``, with marked critical point ``a`` and marked critical value ``v = F(a)``."""

    a: complex
    v: complex

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", complex(self.a))
        object.__setattr__(self, "v", complex(self.v))

    def __call__(self, z: complex) -> complex:
        return evaluate(self, z)

    @property
    def free_critical_point(self) -> complex:
        return -self.a

    @property
    def cocritical_point(self) -> complex:
        """``2a``, the second preimage of ``F(-a)``."""
        return 2 * self.a

    def dual(self) -> CubicMap:
        """The image ``(-a, -v)`` under the canonical involution."""
        return CubicMap(-self.a, -self.v)

    def critical_orbit(self, n: int) -> list[complex]:
        """``a_0 = a, a_1 = v, ..., a_n``."""
        return orbit(self, self.a, n)


def evaluate(F: CubicMap, z: complex) -> complex:
    """
    ``F(z) = (z - a)**2 (z + 2a) + v``.

    Raises
    ------
    OrbitOverflow
        If the value exceeds ``1e150`` in modulus, which counts as escaped.
    """
    w = _kernels.cubic(F.a, F.v, complex(z))
    if not abs(w) <= _kernels.OVERFLOW:
        raise OrbitOverflow(f"|F({z:.6g})| exceeds {_kernels.OVERFLOW:.0e}")
    return w


def orbit(F: CubicMap, z: complex, n: int) -> list[complex]:
    """The ``n + 1`` points ``z, F(z), ..., F^n(z)``."""
    out = [complex(z)]
    for _ in range(n):
        out.append(evaluate(F, out[-1]))
    return out


def escape_time(F: CubicMap, z: complex, budget: int = ESCAPE_BUDGET) -> int | None:
    """First ``n`` with ``|F^n(z)| > max(1e3, 10|a|)**3``, or ``None`` if the orbit stays bounded."""
    n = _kernels.escape_time(F.a, F.v, complex(z), budget)
    return None if n < 0 else n


def green(F: CubicMap, z: complex, budget: int = GREEN_BUDGET) -> float:
    """Green's function ``G_F(z) = lim 3**-n log|F^n(z)|``; zero on the filled Julia set."""
    return float(_kernels.green(F.a, F.v, complex(z), budget))


def bottcher_cocritical(F: CubicMap, budget: int = ESCAPE_BUDGET) -> complex:
    """
    The Boettcher coordinate ``B(F) = B_F(2a)`` of the co-critical point.

    Parameters
    ----------
    F: CubicMap
        A map whose free critical point escapes.
    budget: int
        Iteration budget.

    Returns
    -------
    complex
        ``B_F(2a)``, normalized by ``B_F(z) ~ z`` at infinity, of modulus ``exp(G_F(2a)) > 1``.

    Raises
    ------
    NotEscaping
        If the orbit of ``-a`` stays bounded within the budget.
    """
    if escape_time(F, -F.a, budget) is None:
        raise NotEscaping(f"the free critical orbit of a = {F.a:.6g}, v = {F.v:.6g} does not escape")
    b = complex(_kernels.bottcher(F.a, F.v, F.cocritical_point, budget))
    if math.isnan(b.real):
        raise NotEscaping(f"Boettcher iteration of 2a did not settle for a = {F.a:.6g}")
    return b


@dataclass(frozen=True)
class OrbitClassification:
    """
    Summary of both critical orbits of a map.

    Parameters
    ----------
    marked_period: int | None
        Least ``n <= p`` with ``F^n(a) = a``, or ``None``.
    free_escapes: bool
        Whether the orbit of ``-a`` escapes.
    escape_time: int | None
        Escape time of ``-a``.
    kneading: KneadingSequence | None
        Kneading sequence of the marked orbit, present when ``-a`` escapes and ``a`` has period ``p``.
    """

    marked_period: int | None
    free_escapes: bool
    escape_time: int | None
    kneading: KneadingSequence | None = None


def marked_period(F: CubicMap, p: int, tol: float = PERIOD_TOL) -> int | None:
    scale = max(1.0, abs(F.a))
    for n, z in enumerate(F.critical_orbit(p)[1:], start=1):
        if abs(z - F.a) < tol * scale:
            return n
    return None


def _kneading_bits(F: CubicMap, p: int) -> KneadingSequence:
    bits = []
    a = F.a
    for j, z in enumerate(F.critical_orbit(p)[1:], start=1):
        near, far = abs(z - a), abs(z + 2 * a)
        if abs(near - far) < AMBIGUITY_RATIO * max(near, far):
            raise AmbiguousKneading(
                f"a_{j} = {z:.6g} is nearly equidistant from a and -2a (hint: use a larger |a|)"
            )
        bits.append(0 if near < far else 1)
    return KneadingSequence(tuple(bits))


def classify(F: CubicMap, p: int, a_min: float = A_MIN, budget: int = ESCAPE_BUDGET) -> OrbitClassification:
    """
    Classify the marked and free critical orbits of ``F``.

    The kneading bit ``sigma_j`` is zero when ``a_j`` is closer to ``a`` than to ``-2a``.

    Parameters
    ----------
    F: CubicMap
        The map.
    p: int
        The expected period of the marked critical point.
    a_min: float
        Smallest ``|a|`` for which the distance test is known to be reliable; smaller values are
        classified anyway, with a logged warning.
    budget: int
        Escape iteration budget.

    Returns
    -------
    OrbitClassification
        The classification.

    Raises
    ------
    AmbiguousKneading
        If some ``a_j`` is nearly equidistant from ``a`` and ``-2a``.
    """
    if abs(F.a) < a_min:
        logger.warning(f"Classifying at |a| = {abs(F.a):.3g} below the recommended minimum {a_min}")
    try:
        period = marked_period(F, p)
    except OrbitOverflow:
        period = None
    n = escape_time(F, -F.a, budget)
    kneading = None
    if n is not None and period == p:
        kneading = _kneading_bits(F, p)
    return OrbitClassification(period, n is not None, n, kneading)


def polish(F: CubicMap, p: int, max_iter: int = 40) -> CubicMap:
    """Move ``v`` onto ``Phi_p(a, v) = 0`` by Newton's method at fixed ``a``."""
    v, ok = _kernels.newton_v(F.a, F.v, p, max_iter)
    if not ok:
        raise RootFindingStalled(f"Newton's method for v did not converge from {F.v:.6g}")
    return CubicMap(F.a, v)


def phi(F: CubicMap, p: int) -> complex:
    """``Phi_p(a, v) = F^p(a) - a``."""
    return complex(_kernels.phi_partials(F.a, F.v, p)[0])


def fiber_polynomial(p: int, a_hat: complex) -> npt.NDArray[np.complex128]:
    """
    Coefficients of ``Phi_p(a_hat, a_hat * w)`` in ``w``, lowest degree first, scaled to be monic.

    ``a_{j+1} = a_j**3 - 3 a_hat**2 a_j + 2 a_hat**3 + v`` is composed ``p`` times starting from ``a_1 = v``.
    """
    a = complex(a_hat)
    v = np.array([0, a], dtype=np.complex128)
    z = v
    for _ in range(p - 1):
        z = P.polyadd(P.polyadd(P.polypow(z, 3), -3 * a * a * z), P.polyadd([2 * a**3], v))
    coeffs = P.polysub(z, [a])
    return coeffs / coeffs[-1]


def _fiber_step(p: int, a: complex):
    def step(v: npt.NDArray[np.complex128]):
        z = np.full_like(v, a)
        dz = np.zeros_like(v)
        for _ in range(p):
            dz = 3 * (z * z - a * a) * dz + 1
            z = z * z * z - 3 * a * a * z + 2 * a**3 + v
        return z - a, dz

    return step


def all_fiber_roots(p: int, a_hat: complex, seed: int = 0) -> npt.NDArray[np.complex128]:
    """
    All ``3**(p-1)`` roots ``v`` of ``Phi_p(a_hat, v)``, lower periods included.

    Parameters
    ----------
    p: int
        The period, between one and five.
    a_hat: complex
        The fixed value of ``a``.
    seed: int
        Seed for the root finder's initial guesses.

    Returns
    -------
    npt.NDArray[np.complex128]
        The roots, sorted by real part, then imaginary part.

    Raises
    ------
    RootFindingStalled
        If some root does not satisfy ``|Phi_p| < 1e-8 |a|``, or two roots coincide.
    """
    if not 1 <= p <= MAX_FIBER_PERIOD:
        raise ValueError(f"fiber enumeration supports 1 <= p <= {MAX_FIBER_PERIOD}, got {p}")
    a = complex(a_hat)
    if p == 1:
        return np.array([a])

    coeffs = fiber_polynomial(p, a)
    w = aberth(coeffs, seed=seed)
    step = _fiber_step(p, a)
    v = aberth(coeffs, start=a * w, step=step, tol=1e-15, max_iter=200)
    v = np.array([_kernels.newton_v(a, complex(x), p, 40)[0] for x in v])

    residual = np.abs(step(v)[0])
    if residual.max() > 1e-8 * abs(a):
        raise RootFindingStalled(f"fiber root residual {residual.max():.3e} exceeds 1e-8 |a| at p={p}")
    if min_separation(v) < 1e-13 * max(1.0, abs(a)):
        raise RootFindingStalled(f"coincident fiber roots at p={p}, a={a:.6g}")
    order = np.lexsort((np.round(v.imag, 10), np.round(v.real, 10)))
    logger.debug(f"Found {len(v)} fiber roots at p={p}, a={a:.6g}")
    return v[order]


def fiber_roots(p: int, a_hat: complex = FIBER_RADIUS, seed: int = 0) -> npt.NDArray[np.complex128]:
    """The roots of ``Phi_p(a_hat, .)`` for which ``a`` has exact period ``p``; there are ``d_p`` of them."""
    roots = all_fiber_roots(p, a_hat, seed)
    exact = [v for v in roots if marked_period(CubicMap(a_hat, v), p) == p]
    return np.array(exact, dtype=np.complex128)


def _max_workers(threads: int | None) -> int:
    return threads or os.cpu_count() or 1


def fiber_kneading_counts(
    p: int, a_hat: complex = FIBER_RADIUS, seed: int = 0, threads: int | None = None
) -> Counter[str]:
    """
    Kneading sequences of all ``3**(p-1)`` fiber points, counted.

    A root of lower period ``n`` contributes its kneading sequence repeated to length ``p``, so each
    sequence ``sigma`` is counted ``2**(number of zeros among sigma_1, ..., sigma_{p-1})`` times.
    """

    def kneading_of(v: complex) -> str:
        F = CubicMap(a_hat, v)
        if escape_time(F, -F.a) is None:
            raise NotEscaping(f"fiber point v = {v:.6g} is not in an escape region (hint: use a larger |a|)")
        return str(_kneading_bits(F, p))

    roots = all_fiber_roots(p, a_hat, seed)
    with ThreadPoolExecutor(max_workers=_max_workers(threads)) as pool:
        return Counter(pool.map(kneading_of, roots))


def _match(values: Sequence[complex], targets: npt.NDArray[np.complex128], scale: float) -> list[int]:
    out = []
    for z in values:
        d = np.abs(targets - z)
        k = int(np.argmin(d))
        if d[k] > 1e-6 * scale:
            raise UnmatchedRoot(f"continued point {z:.9g} is {d[k]:.2e} from the nearest fiber root")
        out.append(k)
    if len(set(out)) != len(out):
        raise UnmatchedRoot("two continued points landed on the same fiber root")
    return out


def _circle(a_hat: complex, steps: int, turns: float) -> npt.NDArray[np.complex128]:
    k = np.arange(int(steps * turns) + 1)
    return complex(a_hat) * np.exp(2j * np.pi * k / steps)


def _continue_all(p: int, path: npt.NDArray[np.complex128], roots: Sequence[complex]) -> list[complex]:
    out = []
    for v in roots:
        w, ok = _kernels.track(p, path, complex(v))
        if not ok:
            raise UnmatchedRoot(f"lost the fiber point v = {v:.9g} during continuation")
        out.append(complex(w))
    return out


def monodromy(
    p: int,
    a_hat: complex,
    roots: npt.NDArray[np.complex128] | None = None,
    steps: int = MONODROMY_STEPS,
) -> list[int]:
    """
    The permutation of fiber roots obtained by continuing once around the circle ``|a| = |a_hat|``.

    Parameters
    ----------
    p: int
        The period.
    a_hat: complex
        Base point of the loop.
    roots: npt.NDArray[np.complex128] | None
        The fiber roots over ``a_hat``; computed with ``fiber_roots`` when omitted.
    steps: int
        Number of continuation steps per turn.

    Returns
    -------
    list[int]
        ``perm[k]`` is the index of the root reached from ``roots[k]``. Its cycles are the escape
        regions meeting the fiber, and the cycle lengths their multiplicities.

    Raises
    ------
    UnmatchedRoot
        If some continued point is lost or does not return to a fiber root.
    """
    if roots is None:
        roots = fiber_roots(p, a_hat)
    ends = _continue_all(p, _circle(a_hat, steps, 1.0), roots)
    return _match(ends, np.asarray(roots), abs(a_hat))


def cycles(perm: Sequence[int]) -> list[list[int]]:
    seen: set[int] = set()
    out = []
    for start in range(len(perm)):
        if start in seen:
            continue
        cycle = []
        k = start
        while k not in seen:
            seen.add(k)
            cycle.append(k)
            k = perm[k]
        out.append(cycle)
    return out


def u_values(F: CubicMap, p: int) -> list[complex]:
    """``u_j = (a - a_j)/(3a)`` for ``0 < j < p``."""
    a = F.a
    return [(a - z) / (3 * a) for z in F.critical_orbit(p - 1)[1:]]


def _round_order(estimate: float, mu: int) -> Fraction:
    denominator = mu if mu & (mu - 1) == 0 and mu <= MAX_DENOMINATOR else MAX_DENOMINATOR
    q = Fraction(round(estimate * denominator), denominator)
    if abs(estimate - q) > ORD_TOL:
        raise OrdRoundingAmbiguous(f"order estimate {estimate:.4f} is not within {ORD_TOL} of {q}")
    return q


def _estimate_monomials(u: npt.NDArray[np.complex128], radii: npt.NDArray[np.float64], mu: int) -> list[Monomial]:
    # u[k, j-1] is u_j over a = radii[k]. The order is the slope of log|u_j| against log(xi), fitted
    # together with the first correction in s = xi**(1/mu); the coefficient is extrapolated to s = 0.
    if len(radii) < 3:
        raise ValueError(f"order estimates need at least three radii, got {len(radii)}")
    xi = 1 / (3 * radii)
    s = xi ** (1 / mu)
    slope_fit = np.column_stack([np.log(xi), np.ones_like(xi), s])
    coeff_fit = np.column_stack([np.ones_like(s), s, s**2]).astype(np.complex128)
    out = []
    for w in u.T:
        slope = np.linalg.lstsq(slope_fit, np.log(np.abs(w)), rcond=None)[0][0]
        q = _round_order(float(slope), mu)
        c = np.linalg.lstsq(coeff_fit, w / xi ** float(q), rcond=None)[0][0]
        out.append(Monomial(complex(c), q))
    return out


def _nearest_center(estimate: complex, r: int, seed: int) -> complex:
    if r == 1:
        return 0j
    found = min((q.c for q in centers(r, seed)), key=lambda c: abs(c - estimate))
    logger.debug(f"Estimated center {estimate:.6g} snapped to the period {r} center {found:.9g}")
    return found


def enumerate_regions(
    p: int,
    radii: tuple[float, float] = (10.0, 40.0),
    steps: int = MONODROMY_STEPS,
    seed: int = 0,
    threads: int | None = None,
    a_min: float = A_MIN,
    budget: int = ESCAPE_BUDGET,
) -> list[RegionDescriptor]:
    """
    Find the escape regions of ``S_p`` from the fibers over real values of ``a``.

    Fiber roots over ``R1`` are continued to ``R2`` through ``ORDER_RADII`` geometric knots. The
    monodromy around ``|a| = R2`` groups the roots into regions. The order of ``u_j`` is fitted to
    ``|u_j|`` over all knots and rounded to a multiple of ``1/mu``; the rounded orders must agree with
    the orders read back from the resulting marked grid. Satellite and trivial-kneading regions get
    the associated quadratic center nearest to the one estimated from the leading monomials.

    Parameters
    ----------
    p: int
        The period.
    radii: tuple[float, float]
        The radii ``R1 < R2``.
    steps: int
        Continuation steps per turn of the monodromy loop.
    seed: int
        Seed for the root finders.
    threads: int | None
        Worker threads for the per-region work.
    a_min: float
        Passed to ``classify``, which warns when ``R2`` is smaller.
    budget: int
        Escape iteration budget for ``classify``.

    Returns
    -------
    list[RegionDescriptor]
        One descriptor per region, sorted by kneading sequence, with estimated leading monomials and
        sample fiber points over ``R2``. They carry no solved series.

    Raises
    ------
    UnmatchedRoot
        If continuation between the radii loses a root.
    OrdRoundingAmbiguous
        If some fitted slope is not close to a multiple of ``1/mu``, or the rounded orders do not
        come from a marked grid.
    """
    r1, r2 = (float(r) for r in radii)
    if not 0 < r1 < r2:
        raise ValueError(f"radii must satisfy 0 < R1 < R2, got {radii}")
    inner = fiber_roots(p, r1, seed)
    outer = fiber_roots(p, r2, seed)
    if len(inner) != len(outer):
        raise UnmatchedRoot(f"{len(inner)} fiber roots at R1 but {len(outer)} at R2")

    knots = np.geomspace(r1, r2, ORDER_RADII)
    stages = [np.asarray(inner)]
    for x, y in zip(knots, knots[1:]):
        segment = np.geomspace(x, y, 33).astype(np.complex128)
        stages.append(np.array(_continue_all(p, segment, stages[-1])))
    radial = _match(stages[-1], outer, r2)
    from_outer = {k: i for i, k in enumerate(radial)}

    perm = monodromy(p, r2, outer, steps)
    half = _continue_all(p, _circle(r2, steps, 0.5), outer)
    dual_of = _match([-w for w in half], outer, r2)
    conj_of = _match([np.conj(w) for w in outer], outer, r2)
    minus_of = _match([-np.conj(w) for w in half], outer, r2)

    def describe(cycle: list[int]) -> RegionDescriptor:
        mu = len(cycle)
        head = cycle[0]
        kneading = classify(CubicMap(r2, outer[head]), p, a_min=a_min, budget=budget).kneading
        if kneading is None:
            raise NotEscaping(f"fiber point v = {outer[head]:.6g} over R2 = {r2} is not in an escape region")
        track = [stage[from_outer[head]] for stage in stages[:-1]] + [outer[head]]
        u = np.array([u_values(CubicMap(a, v), p) for a, v in zip(knots, track)], dtype=np.complex128)
        monomials = _estimate_monomials(u.reshape(len(knots), p - 1), knots, mu)
        orders = [m.exp for m in monomials]
        if multiplicity(orders) != mu:
            logger.warning(f"Kneading {kneading}: orders give multiplicity {multiplicity(orders)}, cycle has {mu}")
        grid = grid_from_orders(orders, kneading)
        if p > 1 and [ord_from_grid(grid, j) for j in range(1, p)] != orders:
            raise OrdRoundingAmbiguous(
                f"estimated orders {list(map(str, orders))} of kneading {kneading} do not match the grid {grid}"
            )
        estimate, r = center_from_monomials(monomials, kneading, grid)
        members = set(cycle)
        plus, minus = conj_of[head] in members, minus_of[head] in members
        return RegionDescriptor(
            p=p,
            kneading=kneading,
            grid=grid,
            monomials=tuple(monomials),
            mu=mu,
            nu=winding_number(grid, mu),
            quad_center=_nearest_center(estimate, r, seed),
            r=r,
            self_dual=dual_of[head] in members,
            sym={(True, True): "±", (True, False): "+", (False, True): "−"}.get((plus, minus), ""),
            samples=tuple((complex(r2), complex(outer[k])) for k in cycle),
        )

    with ThreadPoolExecutor(max_workers=_max_workers(threads)) as pool:
        regions = list(pool.map(describe, cycles(perm)))
    regions.sort(key=lambda r: (str(r.kneading), r.samples[0][1].real, r.samples[0][1].imag))
    logger.info(f"Found {len(regions)} escape regions of period {p} from {len(outer)} fiber points")
    return regions
