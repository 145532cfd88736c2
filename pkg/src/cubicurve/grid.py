"""
Critical marked grids and the invariants derived from them.

A marked grid of period ``p`` is stored as the depth vector ``L_0(a_k)``, ``0 <= k < p``: grid point
``(l, k)`` is marked iff ``l <= L_0(a_k)``. Column zero is marked at every level, encoded as ``math.inf``.
All level sums are exact ``Fraction`` arithmetic, since the denominators are powers of two.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Any

import numpy as np
import numpy.typing as npt

from cubicurve.errors import Inconsistent, LevelAmbiguous, NotPowerOfTwo
from cubicurve.series import Monomial
from cubicurve.solver import (
    KneadingSequence,
    SolutionVector,
    is_self_dual,
    star,
    symmetry,
)

logger = logging.getLogger("cubicurve")

Depth = int | float  # ``math.inf`` for a column marked at every level


@dataclass(frozen=True)
class MarkedGrid:
    """
    A critical marked grid, given by its column depths.

    Parameters
    ----------
    depth: tuple[Depth, ...]
        ``depth[k]`` is ``L_0(a_k)``; ``depth[0]`` must be ``math.inf``.
    """

    depth: tuple[Depth, ...]

    def __post_init__(self) -> None:
        depth = tuple(math.inf if d is None or d == math.inf else int(d) for d in self.depth)
        object.__setattr__(self, "depth", depth)
        if not depth:
            raise ValueError("a marked grid needs at least one column")
        if depth[0] != math.inf:
            raise ValueError(f"column zero must be marked at every level, got depth {depth[0]}")
        if any(d < 0 for d in depth):
            raise ValueError(f"depths must be non-negative, got {depth}")
        if self.p % self.period:
            raise ValueError(f"grid period {self.period} does not divide {self.p}")

    @classmethod
    def from_depths(cls, depths: Sequence[Depth | None]) -> MarkedGrid:
        return cls(tuple(math.inf if d is None else d for d in depths))

    @property
    def p(self) -> int:
        return len(self.depth)

    @property
    def period(self) -> int:
        """The grid period ``n``: the least ``n > 0`` with ``L_0(a_n)`` infinite."""
        for n in range(1, self.p):
            if self.depth[n] == math.inf:
                return n
        return self.p

    @property
    def max_finite_depth(self) -> int:
        return int(max((d for d in self.depth if d != math.inf), default=0))

    def column_depth(self, k: int) -> Depth:
        return self.depth[k % self.p]

    def marked(self, ell: int, k: int) -> bool:
        """``M(ell, k)``, with the column index taken modulo ``p``."""
        return ell <= self.depth[k % self.p]

    @property
    def kneading(self) -> KneadingSequence:
        """``sigma_j = 1 - M(1, j)`` for ``1 <= j <= p``."""
        return KneadingSequence(tuple(0 if self.marked(1, j) else 1 for j in range(1, self.p + 1)))

    def matrix(self, levels: int) -> npt.NDArray[np.int8]:
        """The top ``levels`` rows of ``M`` as a ``levels x p`` array of zeros and ones."""
        out = np.zeros((levels, self.p), dtype=np.int8)
        for k in range(self.p):
            out[: int(min(levels, self.depth[k] + 1)), k] = 1
        return out

    def to_json(self) -> list[int | None]:
        return [None if d == math.inf else int(d) for d in self.depth]

    def __str__(self) -> str:
        return "(" + ", ".join("inf" if d == math.inf else str(d) for d in self.depth) + ")"


def _marked_count(grid: MarkedGrid, ell: int, column: int) -> int:
    # number of t < ell whose piece F^t(P_ell(a_column)) contains the critical point
    return sum(1 for t in range(ell) if grid.marked(ell - t, column + t))


def _level_mod(k: int) -> Fraction:
    return Fraction(2, 2**k)


def mod_level(grid: MarkedGrid, ell: int) -> Fraction:
    """
    The normalized annulus modulus ``MOD_ell = 1/2**(k-1)``.

    Parameters
    ----------
    grid: MarkedGrid
        The critical marked grid.
    ell: int
        The level, at least one.

    Returns
    -------
    Fraction
        ``1/2**(k-1)`` with ``k`` the number of ``0 <= i < ell`` for which ``M(ell - i, i) = 1``.
    """
    if ell < 1:
        raise ValueError(f"level must be at least 1, got {ell}")
    return _level_mod(_marked_count(grid, ell, 0))


@lru_cache(maxsize=1024)
def _infinite_level_sum(grid: MarkedGrid, column: int) -> Fraction:
    # Past the deepest finite column, the marked count grows by a fixed c > 0 every p levels,
    # so the tail is a geometric series in 2**-c.
    p = grid.p
    first = grid.max_finite_depth + 1
    horizon = first + 7 * p + 1
    ks = [0] + [_marked_count(grid, ell, column) for ell in range(1, horizon + 1)]
    for start in range(first, first + 4 * p):
        c = ks[start + p] - ks[start]
        if c > 0 and all(ks[ell + p] - ks[ell] == c for ell in range(start, start + 2 * p)):
            head = sum((_level_mod(ks[ell]) for ell in range(1, start)), Fraction(0))
            block = sum((_level_mod(ks[ell]) for ell in range(start, start + p)), Fraction(0))
            return head + block / (1 - Fraction(1, 2**c))
    raise Inconsistent(f"no periodic marking pattern below column {column} of grid {grid}")


def _level_sum(grid: MarkedGrid, column: int, levels: Depth) -> Fraction:
    if levels == math.inf:
        return _infinite_level_sum(grid, column % grid.p)
    return sum(
        (_level_mod(_marked_count(grid, ell, column)) for ell in range(1, int(levels) + 1)),
        Fraction(0),
    )


def ord_from_grid(grid: MarkedGrid, j: int) -> Fraction:
    """
    The order of ``u_j`` as the sum of ``MOD_ell`` over the marked levels of column ``j``.

    Parameters
    ----------
    grid: MarkedGrid
        The critical marked grid.
    j: int
        Column index, ``0 < j < p``.

    Returns
    -------
    Fraction
        ``MOD_1 + ... + MOD_L`` with ``L = L_0(a_j)``; for an infinite column, the value of the
        convergent infinite sum.

    Raises
    ------
    Inconsistent
        If the marking pattern of an infinite column never becomes periodic.
    """
    if not 0 < j < grid.p:
        raise ValueError(f"column index must satisfy 0 < j < {grid.p}, got {j}")
    return _level_sum(grid, 0, grid.depth[j])


def multiplicity(orders: Sequence[Fraction | float]) -> int:
    """
    The least common denominator of the finite orders.

    Raises
    ------
    NotPowerOfTwo
        If the denominator is not a power of two, which no legal grid produces.
    """
    mu = math.lcm(1, *(Fraction(q).denominator for q in orders if q != math.inf))
    if mu & (mu - 1):
        raise NotPowerOfTwo(f"multiplicity {mu} of orders {list(map(str, orders))} is not a power of two")
    return mu


def winding_number(grid: MarkedGrid, mu: int) -> int:
    """
    The winding number ``nu = (2n - 3 - ord(m_1 ... m_{n-1})) mu``, or ``-1`` for the trivial kneading.

    Parameters
    ----------
    grid: MarkedGrid
        The critical marked grid, of grid period ``n``.
    mu: int
        The multiplicity of the region.

    Returns
    -------
    int
        The winding number.
    """
    n = grid.period
    if n == 1:
        return -1
    q = sum((ord_from_grid(grid, j) for j in range(1, n)), Fraction(0))
    nu = (2 * n - 3 - q) * mu
    if nu.denominator != 1:
        raise NotPowerOfTwo(f"winding number {nu} is not an integer for multiplicity {mu}")
    return int(nu)


def lemma_partial_sums(orders: Sequence[Fraction], n: int | None = None) -> list[Fraction]:
    """
    Partial sums ``sum_{j <= k} (2 - ord m_j)`` for ``k = 1, ..., len(orders)``.

    Every partial sum is non-negative, and it vanishes exactly when the grid period ``n`` divides ``k``.
    ``n`` is only used to check that property; a violation is logged.
    """
    out: list[Fraction] = []
    total = Fraction(0)
    for k, q in enumerate(orders, start=1):
        total += 2 - Fraction(q)
        out.append(total)
        if n is not None and (total < 0 or (total == 0) != (k % n == 0)):
            logger.warning(f"Partial sum {total} at k={k} breaks the grid period {n} pattern")
    return out


@dataclass(frozen=True)
class GridReport:
    """Outcome of checking the four grid rules; ``rule`` is ``None`` when all of them hold."""

    rule: str | None = None
    level: int | None = None
    column: int | None = None
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.rule is None

    def __str__(self) -> str:
        if self.passed:
            return "PASS"
        return f"FAIL {self.rule} at level {self.level}, column {self.column}: {self.detail}"


def _check_matrix(matrix: npt.NDArray[np.int_]) -> tuple[GridReport | None, MarkedGrid | None]:
    levels, p = matrix.shape
    for k in range(p):
        if matrix[0, k] != 1:
            return GridReport("R1", 0, k, "the top row must be marked"), None
        for ell in range(1, levels):
            if matrix[ell, k] > matrix[ell - 1, k]:
                return GridReport("R1", ell, k, "marked below an unmarked point"), None
    depths: list[Depth] = []
    for k in range(p):
        marked = int(matrix[:, k].sum())
        depths.append(math.inf if marked == levels else marked - 1)
    if depths[0] != math.inf:
        return GridReport("R1", int(depths[0]) + 1, 0, "column zero must be marked at every level"), None
    try:
        return None, MarkedGrid(tuple(depths))
    except ValueError as e:
        return GridReport("period", None, None, str(e)), None


def _check_r2(grid: MarkedGrid, window: int) -> GridReport | None:
    for k in range(1, grid.p):
        for ell in range(1, int(min(grid.depth[k], window)) + 1):
            for i in range(ell + 1):
                if grid.marked(ell - i, k + i) != grid.marked(ell - i, i):
                    return GridReport(
                        "R2", ell, k, f"M({ell - i}, {k + i}) differs from M({ell - i}, {i})"
                    )
    return None


def _check_r3(grid: MarkedGrid) -> GridReport | None:
    L = grid.column_depth
    for m in range(1, grid.p):
        ell = L(m)
        if ell == math.inf:
            continue
        for k in range(1, int(ell) + 1):
            if not all(L(i) < ell - i for i in range(1, k)) or not L(k) > ell - k:
                continue
            if L(m + k) != ell - k:
                return GridReport("R3", int(ell), m, f"expected L_0(a_{m + k}) = {ell - k}, got {L(m + k)}")
    return None


def _check_r4(grid: MarkedGrid) -> GridReport | None:
    L = grid.column_depth
    for k in range(1, grid.p):
        ell = L(k)
        if ell == math.inf or ell < 1:
            continue
        ell = int(ell)
        if L(ell) != 0 or not all(L(k + i) < ell - i for i in range(1, ell)):
            continue
        if L(ell + k) < 1:
            return GridReport("R4", ell, k, f"expected a_{ell + k} in the critical level one piece")
    return None


def validate_rules(grid: MarkedGrid | npt.ArrayLike, levels: int | None = None) -> GridReport:
    """
    Check the four grid rules.

    Parameters
    ----------
    grid: MarkedGrid | npt.ArrayLike
        A marked grid, or the top rows of a zero-one matrix ``M[ell][k]`` with ``p`` columns.
    levels: int | None
        Number of levels to inspect for rule two; by default enough to cover every finite column
        and two full periods below it.

    Returns
    -------
    GridReport
        The first violated rule and its position, or a passing report.
    """
    if not isinstance(grid, MarkedGrid):
        report, parsed = _check_matrix(np.asarray(grid, dtype=int))
        if parsed is None:
            return report
        grid = parsed
    window = levels or grid.max_finite_depth + 2 * grid.p + 1
    for report in (_check_r2(grid, window), _check_r3(grid), _check_r4(grid)):
        if report is not None:
            return report
    return GridReport()


def grid_from_orders(orders: Sequence[Fraction | float], kneading: KneadingSequence | str) -> MarkedGrid:
    """
    Rebuild the marked grid from the orders ``ord(u_1), ..., ord(u_{p-1})``.

    Levels are filled top down: ``M(ell, k) = 1`` iff ``MOD_1 + ... + MOD_ell <= ord(u_k)``, where each
    ``MOD_ell`` only depends on levels that are already filled.

    Parameters
    ----------
    orders: Sequence[Fraction | float]
        The orders of ``u_1, ..., u_{p-1}``.
    kneading: KneadingSequence | str
        The kneading sequence, which fixes level one.

    Returns
    -------
    MarkedGrid
        The grid, which reproduces ``orders`` through ``ord_from_grid``.

    Raises
    ------
    Inconsistent
        If some order is not a level sum of the grid so built, or contradicts the kneading sequence.
    """
    kneading = KneadingSequence.parse(kneading)
    p = kneading.p
    if len(orders) != p - 1:
        raise ValueError(f"expected {p - 1} orders for period {p}, got {len(orders)}")
    ords: list[Fraction | float] = [math.inf] + [q if q == math.inf else Fraction(q) for q in orders]

    sums = [Fraction(0)]
    depths: list[Depth | None] = [math.inf] + [None] * (p - 1)

    def is_marked(level: int, col: int) -> bool:
        return col % p == 0 or sums[level] <= ords[col % p]

    for ell in range(1, 4 * p + 1):
        k = sum(1 for t in range(ell) if is_marked(ell - t, t))
        sums.append(sums[-1] + _level_mod(k))
        for j in range(1, p):
            if depths[j] is None and sums[ell] > ords[j]:
                if sums[ell - 1] != ords[j]:
                    raise Inconsistent(
                        f"ord(u_{j}) = {ords[j]} lies strictly between the level sums "
                        f"{sums[ell - 1]} and {sums[ell]}"
                    )
                depths[j] = ell - 1
        if all(d is not None for d in depths):
            break

    try:
        grid = MarkedGrid(tuple(math.inf if d is None else d for d in depths))
    except ValueError as e:
        raise Inconsistent(f"orders {[str(q) for q in orders]} give no legal grid: {e}") from e

    for j in range(1, p):
        if grid.marked(1, j) != (kneading.sigma(j) == 0):
            raise Inconsistent(f"ord(u_{j}) = {ords[j]} contradicts kneading bit {kneading.sigma(j)}")
        if ord_from_grid(grid, j) != ords[j]:
            raise Inconsistent(f"ord(u_{j}) = {ords[j]} is not reproduced by the grid {grid}")
    return grid


def render_ascii(grid: MarkedGrid, levels: int = 4, columns: int | None = None) -> str:
    """
    Draw the top of a marked grid.

    Marked points are ``o``, unmarked points ``.``, marked points of consecutive levels in one column
    are joined by ``|``, and the top row by ``-``.
    """
    columns = columns or grid.p
    rows = ["-".join("o" for _ in range(columns))]
    for ell in range(1, levels):
        rows.append(" ".join("|" if grid.marked(ell, k) else " " for k in range(columns)).rstrip())
        rows.append(" ".join("o" if grid.marked(ell, k) else "." for k in range(columns)))
    return "\n".join(rows)


def center_from_monomials(
    monomials: Sequence[Monomial], kneading: KneadingSequence, grid: MarkedGrid
) -> tuple[complex, int]:
    """
    The critical value ``c_1`` and period ``r = p/n`` of the associated quadratic map.

    For ``r > 1`` the leading monomial ``m_n`` equals ``c_1 * lam`` with
    ``lam = -xi**(2n) / (m_1* ... m_{n-1}*)``; primitive regions are associated with ``z**2``.

    Parameters
    ----------
    monomials: Sequence[Monomial]
        The leading monomials ``m_1, ..., m_{p-1}``.
    kneading: KneadingSequence
        The kneading sequence of the region.
    grid: MarkedGrid
        The marked grid of the region, whose period is ``n``.

    Returns
    -------
    tuple[complex, int]
        ``c_1`` and ``r``. For numerically estimated monomials, ``c_1`` is an estimate as well.

    Raises
    ------
    Inconsistent
        If ``ord(m_n)`` differs from the order of ``lam``.
    """
    n = grid.period
    r = grid.p // n
    if r == 1:
        return 0j, 1
    prod = Monomial(1.0, Fraction(0))
    for j in range(1, n):
        prod = prod * star(monomials[j - 1], kneading.sigma(j))
    lam = Monomial(-1.0, Fraction(2 * n)) / prod
    if monomials[n - 1].exp != lam.exp:
        raise Inconsistent(f"ord(m_{n}) = {monomials[n - 1].exp} does not match the satellite order {lam.exp}")
    return monomials[n - 1].coeff / lam.coeff, r


def associated_center(solution: SolutionVector, grid: MarkedGrid) -> tuple[complex, int]:
    """The critical value ``c_1`` and period ``r`` of the quadratic map associated with a solution."""
    return center_from_monomials(solution.m, solution.kneading, grid)


@dataclass(frozen=True, eq=False)
class RegionDescriptor:
    """Everything known about one escape region: its series, grid and the derived invariants."""

    p: int
    kneading: KneadingSequence
    grid: MarkedGrid
    monomials: tuple[Monomial, ...]
    mu: int
    nu: int
    series: SolutionVector | None = None
    quad_center: complex | None = None
    r: int = 1
    self_dual: bool = False
    sym: str = ""
    # fiber points (a, v) of the region, for numerically enumerated regions
    samples: tuple[tuple[complex, complex], ...] = ()

    @property
    def orders(self) -> tuple[Fraction, ...]:
        return tuple(m.exp for m in self.monomials)

    def to_json(self) -> dict[str, Any]:
        center = None if self.quad_center is None else [self.quad_center.real, self.quad_center.imag]
        return {
            "p": self.p,
            "kneading": str(self.kneading),
            "depths": self.grid.to_json(),
            "monomials": [m.to_json() for m in self.monomials],
            "mu": self.mu,
            "nu": self.nu,
            "trunc": None if self.series is None else self.series.trunc,
            "series": None if self.series is None else [w.to_json() for w in self.series.interior],
            "quad_center": center,
            "r": self.r,
            "self_dual": self.self_dual,
            "sym": self.sym,
            "samples": [[a.real, a.imag, v.real, v.imag] for a, v in self.samples],
        }

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> RegionDescriptor:
        series = None
        if data.get("series") is not None:
            series = SolutionVector.from_json({"u": data["series"], "trunc": data["trunc"]})
        center = data.get("quad_center")
        return cls(
            p=int(data["p"]),
            kneading=KneadingSequence.parse(data["kneading"]),
            grid=MarkedGrid.from_depths(data["depths"]),
            monomials=tuple(Monomial.from_json(m) for m in data["monomials"]),
            mu=int(data["mu"]),
            nu=int(data["nu"]),
            series=series,
            quad_center=None if center is None else complex(*center),
            r=int(data.get("r", 1)),
            self_dual=bool(data["self_dual"]),
            sym=data.get("sym", ""),
            samples=tuple((complex(ar, ai), complex(vr, vi)) for ar, ai, vr, vi in data.get("samples", [])),
        )


def describe_region(solution: SolutionVector, quad_center: complex | None = None) -> RegionDescriptor:
    """
    Assemble the region descriptor of a solved series vector.

    Parameters
    ----------
    solution: SolutionVector
        A solution of exact period ``p``.
    quad_center: complex | None
        The critical value ``c_1`` of the associated quadratic map; recovered from the leading
        monomials when omitted.

    Returns
    -------
    RegionDescriptor
        The descriptor, with grid, multiplicity and winding number derived from the orders.
    """
    if solution.p == 1:
        grid = MarkedGrid((math.inf,))
        return RegionDescriptor(1, grid.kneading, grid, (), 1, -1, solution, 0j, 1, True, "±")

    monomials = solution.m
    orders = tuple(m.exp for m in monomials)
    kneading = solution.kneading
    grid = grid_from_orders(orders, kneading)
    mu = multiplicity(orders)
    nu = winding_number(grid, mu)
    center, r = associated_center(solution, grid)
    if quad_center is not None:
        center = quad_center
    return RegionDescriptor(
        p=solution.p,
        kneading=kneading,
        grid=grid,
        monomials=monomials,
        mu=mu,
        nu=nu,
        series=solution,
        quad_center=center,
        r=r,
        self_dual=is_self_dual(solution),
        sym=symmetry(solution),
    )


def _column_level(grid: MarkedGrid, column: int, q: Fraction | float) -> Depth:
    # the level L with MOD_1 + ... + MOD_L = q in the column of a_column
    total = _infinite_level_sum(grid, column % grid.p)
    if q == total:
        return math.inf
    if q > total:
        raise LevelAmbiguous(f"order {q} exceeds the full level sum {total} of column {column}")
    partial = Fraction(0)
    ell = 0
    while partial < q:
        ell += 1
        partial += _level_mod(_marked_count(grid, ell, column))
    if partial != q:
        raise LevelAmbiguous(f"order {q} falls between the level sums of column {column}")
    return ell


def orbit_pseudometric(region: RegionDescriptor) -> list[list[Fraction]]:
    """
    The puzzle pseudometric ``d(a_i, a_j) = 2**-L`` on the critical orbit.

    ``L`` is read off from ``ord(u_i - u_j)`` by matching it against the annulus level sums in the column
    of ``a_i`` for ``i < j``, and the matrix is filled symmetrically.

    Parameters
    ----------
    region: RegionDescriptor
        The region, with its solved series.

    Returns
    -------
    list[list[Fraction]]
        The ``p x p`` distance matrix; an infinite common level gives distance zero.

    Raises
    ------
    LevelAmbiguous
        If some order is not one of the level sums, or a difference vanishes to the working precision.
    """
    p = region.p
    s = region.series
    if s is None:
        raise ValueError("the pseudometric needs a region with solved series")
    tol = s.tolerance()
    d = [[Fraction(0)] * p for _ in range(p)]
    for i in range(p):
        for j in range(i + 1, p):
            ui = s.series(p) if i == 0 else s.series(i)
            diff = ui - s.series(j)
            q = diff.ord(tol)
            if q == math.inf:
                raise LevelAmbiguous(f"u_{i} - u_{j} vanishes to the working truncation {s.trunc}")
            level = _column_level(region.grid, i, q)
            dist = Fraction(0) if level == math.inf else Fraction(1, 2 ** int(level))
            d[i][j] = d[j][i] = dist
    return d
