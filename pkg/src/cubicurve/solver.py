"""
Puiseux series solutions of the fundamental system of an escape region.

For a map of period ``p`` with ``xi = 1/(3a)`` and ``u_j = (a - a_j)/(3a)``, the escape region is determined
by series ``u_1, ..., u_{p-1}`` (with ``u_p = 0``) that solve

    E_j(u) = xi**2 * (u_{j+1} - u_1) - u_j**2 * (u_j - 1) = 0,    0 < j < p.

Solutions are built from leading monomial seeds, from quadratic centers (trivial kneading), or from a
base region and a quadratic center (satellites), and are refined with a graded Newton iteration.
"""

from __future__ import annotations

import cmath
import itertools
import logging
import math
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Any

import numpy as np

from cubicurve.errors import (
    InconsistentSeed,
    NoProgress,
    SeedRejected,
    SingularSystem,
    ZeroSeries,
)
from cubicurve.quadratic import QuadraticCenter, centers
from cubicurve.series import Monomial, PuiseuxSeries, xi_power

logger = logging.getLogger("cubicurve")

DEFAULT_TRUNC = 12
RESIDUAL_TOL = 1e-9


@dataclass(frozen=True)
class KneadingSequence:
    """A kneading sequence ``sigma_1 ... sigma_p`` of zeros and ones, whose final bit is zero."""

    bits: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.bits:
            raise ValueError("kneading sequence must not be empty")
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError(f"kneading bits must be 0 or 1, got {self.bits}")
        if self.bits[-1] != 0:
            raise ValueError(f"the final kneading bit must be zero (hint: invalid sequence {self})")

    @classmethod
    def parse(cls, text: str | KneadingSequence) -> KneadingSequence:
        if isinstance(text, KneadingSequence):
            return text
        text = text.strip()
        if not text or set(text) - {"0", "1"}:
            raise ValueError(f"kneading sequence must be a bit string (hint: invalid sequence {text!r})")
        return cls(tuple(int(c) for c in text))

    @property
    def p(self) -> int:
        return len(self.bits)

    @property
    def is_trivial(self) -> bool:
        return not any(self.bits)

    def sigma(self, j: int) -> int:
        """Bit ``sigma_j`` for ``1 <= j <= p``."""
        return self.bits[j - 1]

    def zero_count(self) -> int:
        """Number of interior zero bits, the exponent of the counting law."""
        return sum(1 - b for b in self.bits[:-1])

    def __str__(self) -> str:
        return "".join(map(str, self.bits))


@dataclass(frozen=True, eq=False)
class SolutionVector:
    """
    Series ``u_1, ..., u_p`` over a common ramification ``mu``, with ``u_p`` the zero series.

    Parameters
    ----------
    p: int
        The period.
    u: tuple[PuiseuxSeries, ...]
        The ``p`` series; ``u[j - 1]`` is ``u_j``.
    mu: int
        The ambient ramification.
    trunc: int
        Truncation as an integral power of ``xi``.
    """

    p: int
    u: tuple[PuiseuxSeries, ...]
    mu: int
    trunc: int

    def __post_init__(self) -> None:
        if len(self.u) != self.p:
            raise ValueError(f"expected {self.p} series, got {len(self.u)}")
        if not self.u[-1].is_zero():
            raise ValueError("the last series u_p must vanish")

    @classmethod
    def from_interior(cls, interior: Sequence[PuiseuxSeries], trunc: int) -> SolutionVector:
        p = len(interior) + 1
        mu = math.lcm(1, *(w.mu for w in interior))
        u = tuple(w.rescale(mu) for w in interior) + (PuiseuxSeries.zero(trunc * mu, mu),)
        return cls(p, u, mu, trunc)

    @property
    def interior(self) -> tuple[PuiseuxSeries, ...]:
        return self.u[:-1]

    def series(self, j: int) -> PuiseuxSeries:
        """``u_j`` for ``1 <= j <= p``."""
        return self.u[j - 1]

    def scale(self) -> float:
        return max([1.0] + [w.scale_magnitude() for w in self.interior])

    def tolerance(self) -> float:
        return RESIDUAL_TOL * self.scale()

    @property
    def m(self) -> tuple[Monomial, ...]:
        """Leading monomials ``m_1, ..., m_{p-1}``."""
        tol = self.tolerance()
        return tuple(w.leading_monomial(tol) for w in self.interior)

    @property
    def orders(self) -> tuple[Fraction, ...]:
        return tuple(m.exp for m in self.m)

    @property
    def kneading(self) -> KneadingSequence:
        bits = []
        for w in self.interior:
            c = w.coefficient(0)
            bits.append(1 if abs(c - 1) < 1e-6 else 0)
        return KneadingSequence(tuple(bits) + (0,))

    def has_vanishing_entry(self) -> bool:
        """Whether some interior ``u_j`` vanishes, i.e. the marked point has a smaller period."""
        tol = self.tolerance()
        return any(w.is_zero(tol) for w in self.interior)

    def map_series(self, fn) -> SolutionVector:
        return SolutionVector(self.p, tuple(fn(w) for w in self.u), self.mu, self.trunc)

    def truncated(self, trunc: int) -> SolutionVector:
        return SolutionVector(
            self.p, tuple(w.truncate(trunc) for w in self.u), self.mu, min(trunc, self.trunc)
        )

    def allclose(self, other: SolutionVector, tol: float = 1e-7) -> bool:
        if self.p != other.p:
            return False
        scale = max(self.scale(), other.scale())
        return all((x - y).is_zero(tol * scale) for x, y in zip(self.interior, other.interior))

    def to_json(self) -> dict[str, Any]:
        return {
            "p": self.p,
            "mu": self.mu,
            "trunc": self.trunc,
            "u": [w.to_json() for w in self.interior],
        }

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> SolutionVector:
        interior = [PuiseuxSeries.from_json(d) for d in data["u"]]
        return cls.from_interior(interior, int(data["trunc"]))


def _interior_plus_zero(w: SolutionVector) -> list[PuiseuxSeries]:
    return list(w.interior) + [PuiseuxSeries.zero(w.u[0].trunc + 4 * w.mu, w.mu)]


def error_vector(w: SolutionVector) -> list[PuiseuxSeries]:
    """
    Residuals ``E_j(w) = xi**2 * (w_{j+1} - w_1) - w_j**2 * (w_j - 1)`` for ``0 < j < p``.

    Parameters
    ----------
    w: SolutionVector
        The approximate solution.

    Returns
    -------
    list[PuiseuxSeries]
        The ``p - 1`` residual series.
    """
    if w.p == 1:
        return []
    xi2 = Monomial(1.0, Fraction(2))
    full = _interior_plus_zero(w)
    w1 = full[0]
    out = []
    for j in range(w.p - 1):
        wj = full[j]
        out.append((full[j + 1] - w1).mul_monomial(xi2) - wj * wj * (wj - 1.0))
    return out


def residual_orders(w: SolutionVector) -> list[Fraction | float]:
    tol = w.tolerance()
    return [e.ord(tol) for e in error_vector(w)]


def is_solved(w: SolutionVector) -> bool:
    """Whether every residual has order at least ``trunc - 2``."""
    return all(q >= w.trunc - 2 for q in residual_orders(w))


def star(m: Monomial, sigma: int) -> Monomial:
    """
    The linearization weight ``m* = (3 sigma - 2) m``.

    Parameters
    ----------
    m: Monomial
        A leading monomial.
    sigma: int
        The kneading bit at the same position.

    Returns
    -------
    Monomial
        ``m`` itself when ``sigma`` is one, otherwise ``-2 m``.

    Raises
    ------
    InconsistentSeed
        If ``sigma`` is one but ``m`` is not the constant one.
    """
    if sigma == 1:
        if not m.is_one():
            raise InconsistentSeed(f"kneading bit 1 requires leading monomial 1, got {m}")
        return m
    return m.scale(-2.0)


def refine_diagonal(w: SolutionVector) -> SolutionVector:
    """
    One diagonal refinement step ``w_j -> w_j + [E_j]_g / m_j*`` at the lowest residual grade ``g``.

    Parameters
    ----------
    w: SolutionVector
        An approximate solution with every ``ord(m_j) < 2`` whose residuals have order above
        ``2 * max ord(m_j)``.

    Returns
    -------
    SolutionVector
        The refined vector, with the same leading monomials and a strictly larger residual order.

    Raises
    ------
    SeedRejected
        If the preconditions on monomial or residual orders fail.
    """
    if w.p == 1:
        return w
    m = w.m
    sigma = w.kneading
    if any(mj.exp >= 2 for mj in m):
        raise SeedRejected("diagonal refinement requires every leading order below 2")
    bound = 2 * max(mj.exp for mj in m)
    errors = error_vector(w)
    tol = w.tolerance()
    orders = [e.ord(tol) for e in errors]
    for j, q in enumerate(orders, start=1):
        if q <= bound:
            raise SeedRejected(f"residual E_{j} has order {q}, need more than {bound}", index=j)
    g = min(orders)
    if g == math.inf:
        return w

    mstar = [star(mj, sigma.sigma(j)) for j, mj in enumerate(m, start=1)]
    refined = []
    for wj, e, ms in zip(w.interior, errors, mstar):
        c = e.coefficient(g) if e.ord(tol) == g else 0
        if c:
            wj = wj + xi_power(g, wj.trunc, wj.mu, c).div_monomial(ms).truncate(wj.precision)
        refined.append(wj)
    return SolutionVector.from_interior(refined, w.trunc)


def seed_from_monomials(
    m: Sequence[Monomial], sigma: KneadingSequence | str, trunc: int = DEFAULT_TRUNC
) -> SolutionVector:
    """
    Two-term seed vector for a leading monomial vector.

    Parameters
    ----------
    m: Sequence[Monomial]
        Leading monomials ``m_1, ..., m_{p-1}``.
    sigma: KneadingSequence | str
        The kneading sequence.
    trunc: int
        Truncation as an integral power of ``xi``.

    Returns
    -------
    SolutionVector
        The seed ``w_j = 1 + xi**2 (m_{j+1} - m_1)`` where ``sigma_j = 1`` and ``w_j = m_j`` elsewhere.

    Raises
    ------
    SeedRejected
        If a monomial contradicts its kneading bit, or the residual congruence fails at some index.
    """
    sigma = KneadingSequence.parse(sigma)
    p = sigma.p
    if len(m) != p - 1:
        raise ValueError(f"expected {p - 1} monomials for period {p}, got {len(m)}")
    for j, mj in enumerate(m, start=1):
        try:
            star(mj, sigma.sigma(j))
        except InconsistentSeed as e:
            raise SeedRejected(str(e), index=j) from e
        if sigma.sigma(j) == 0 and mj.exp < 1:
            raise SeedRejected(f"m_{j} = {mj} must have order at least 1 for kneading bit 0", index=j)

    mu = math.lcm(1, *(mj.exp.denominator for mj in m))
    K = trunc * mu
    mono = [PuiseuxSeries.from_monomial(mj, K, mu) for mj in m] + [PuiseuxSeries.zero(K, mu)]
    xi2 = Monomial(1.0, Fraction(2))
    seed = []
    for j in range(p - 1):
        if sigma.bits[j] == 1:
            seed.append((mono[j + 1] - mono[0]).mul_monomial(xi2) + 1.0)
        else:
            seed.append(mono[j])
    w = SolutionVector.from_interior([s.truncate(trunc) for s in seed], trunc)

    bound = 2 * max((mj.exp for mj in m), default=Fraction(0))
    tol = w.tolerance()
    for j, e in enumerate(error_vector(w), start=1):
        if e.ord(tol) <= bound:
            raise SeedRejected(
                f"seed residual E_{j} has order {e.ord(tol)}, need more than {bound}", index=j
            )
    return w


def _graded_margin(orders: Iterable[Fraction]) -> int:
    return 2 * sum(max(1, math.ceil(q)) for q in orders) + 4


def solve_graded(
    seed: SolutionVector, trunc: int | None = None, max_iter: int = 40
) -> SolutionVector:
    """
    Complete a seed to a full solution by graded Newton iteration with fixed leading monomials.

    Each iteration solves the linearization
    ``E_j(w + d) ~ E_j(w) + xi**2 (d_{j+1} - d_1) - (3 w_j**2 - 2 w_j) d_j``
    for the coefficients of ``d`` above the leading term of every ``w_j``.

    Parameters
    ----------
    seed: SolutionVector
        A seed whose residuals vanish at the grade of its leading monomials.
    trunc: int | None
        Truncation of the result, defaults to the seed's.
    max_iter: int
        Newton iteration budget.

    Returns
    -------
    SolutionVector
        A solution whose residuals have order at least ``trunc - 2``.

    Raises
    ------
    SingularSystem
        If the linearization is inconsistent and the iteration makes no progress.
    NoProgress
        If the residual order stalls for three consecutive iterations.
    """
    trunc = seed.trunc if trunc is None else trunc
    p = seed.p
    if p == 1:
        return SolutionVector(1, (PuiseuxSeries.zero(trunc, 1),), 1, trunc)

    m = seed.m
    mu = math.lcm(seed.mu, *(mj.exp.denominator for mj in m))
    K_int = (trunc + _graded_margin(mj.exp for mj in m)) * mu
    lead_idx = [int(mj.exp * mu) for mj in m]
    w = []
    for s in seed.interior:
        s = s.rescale(mu).truncate(Fraction(K_int, mu))
        # unknown coefficients above the seed's precision start out as zero
        w.append(PuiseuxSeries(mu, min(s.start, K_int), s.coeffs, K_int))

    columns = [(j, k) for j in range(p - 1) for k in range(lead_idx[j] + 1, K_int)]
    col_index = {c: i for i, c in enumerate(columns)}
    n_rows = (p - 1) * K_int
    two = 2 * mu

    stalls = 0
    best = -math.inf
    for it in range(max_iter):
        current = SolutionVector.from_interior(w, trunc)
        tol = current.tolerance()
        errors = error_vector(current)
        rhs = np.zeros(n_rows, dtype=np.complex128)
        for j, e in enumerate(errors):
            e = e.rescale(mu) if e.mu != mu else e
            for k, c in e.terms().items():
                if 0 <= k < K_int:
                    rhs[j * K_int + k] = -c
        residual = float(np.max(np.abs(rhs))) if rhs.size else 0.0
        if residual <= tol:
            logger.debug(f"Graded Newton converged after {it} iteration(s)")
            break

        nz = np.flatnonzero(np.abs(rhs) > tol)
        level = min(int(i % K_int) for i in nz)
        if level > best:
            best, stalls = level, 0
        else:
            stalls += 1
            if stalls >= 3:
                raise NoProgress(f"residual order stalled at xi^{Fraction(level, mu)}")

        J = np.zeros((n_rows, len(columns)), dtype=np.complex128)
        for j in range(p - 1):
            wj = w[j]
            D = (wj * wj).scale(3.0) - wj.scale(2.0)
            dterms = sorted((k, c) for k, c in D.terms().items() if k < K_int)
            for k in range(lead_idx[j] + 1, K_int):
                col = col_index[(j, k)]
                for i, c in dterms:
                    if k + i < K_int:
                        J[j * K_int + k + i, col] -= c
                if k + two < K_int:
                    if j >= 1:
                        J[(j - 1) * K_int + k + two, col] += 1.0
                    else:
                        for jj in range(p - 1):
                            J[jj * K_int + k + two, col] -= 1.0

        x, *_ = np.linalg.lstsq(J, rhs, rcond=None)
        mismatch = float(np.linalg.norm(J @ x - rhs))
        if mismatch > 1e-6 * max(float(np.linalg.norm(rhs)), 1e-300) and stalls > 0:
            raise SingularSystem(f"graded linearization is inconsistent (mismatch {mismatch:.3e})")

        for j in range(p - 1):
            terms = {k: x[col_index[(j, k)]] for k in range(lead_idx[j] + 1, K_int)}
            w[j] = w[j] + PuiseuxSeries.from_terms(terms, K_int, mu)
    else:
        raise NoProgress(f"graded Newton did not converge within {max_iter} iterations")

    return SolutionVector.from_interior([s.truncate(trunc) for s in w], trunc)


def solve_trivial_kneading(c1: complex, p: int, trunc: int = DEFAULT_TRUNC) -> SolutionVector:
    """
    The unique solution with ``u_j = -xi**2 c_j + ...`` attached to a quadratic center ``c1``.

    The correction at each even order ``xi**(2n)`` solves the linear system
    ``x_{j+1} - x_1 - 2 c_j x_j = -[E_j]_{2n+2}`` with ``x_p = 0``.

    Parameters
    ----------
    c1: complex
        Center of a period ``p`` hyperbolic component of the Mandelbrot set.
    p: int
        The period.
    trunc: int
        Truncation as an integral power of ``xi``.

    Returns
    -------
    SolutionVector
        The solution, which contains even powers of ``xi`` only.

    Raises
    ------
    NotACenter
        If ``c1`` is not a center of exact period ``p``.
    SingularSystem
        If a stage system is numerically singular.
    """
    center = QuadraticCenter.from_parameter(c1, p)
    if p == 1:
        return SolutionVector(1, (PuiseuxSeries.zero(trunc, 1),), 1, trunc)

    c = center.orbit  # c[0] = 0, c[j] = c_j
    K = trunc + 4
    w = [PuiseuxSeries.from_terms({2: -c[j]}, K) for j in range(1, p)]

    A = np.zeros((p - 1, p - 1), dtype=np.complex128)
    for j in range(p - 1):
        if j + 1 < p - 1:
            A[j, j + 1] += 1.0
        A[j, 0] -= 1.0
        A[j, j] -= 2 * c[j + 1]
    if np.linalg.cond(A) > 1e12:
        raise SingularSystem(f"stage system for center {c1:.6g} is singular")

    for n in range(2, (trunc - 1) // 2 + 1):
        errors = error_vector(SolutionVector.from_interior(w, K))
        b = np.array([-e.coefficient(2 * n + 2) for e in errors])
        x = np.linalg.solve(A, b)
        w = [wj + PuiseuxSeries.from_terms({2 * n: xj}, K) for wj, xj in zip(w, x)]

    return SolutionVector.from_interior([wj.truncate(trunc) for wj in w], trunc)


def satellite_monomials(base: SolutionVector, c_orbit: Sequence[complex]) -> list[Monomial]:
    """
    Leading monomials of the satellite of ``base`` attached to a period ``r`` quadratic center.

    Parameters
    ----------
    base: SolutionVector
        A solved region of grid period ``n`` (its own period).
    c_orbit: Sequence[complex]
        The critical orbit ``c_1, ..., c_{r-1}`` of the quadratic center.

    Returns
    -------
    list[Monomial]
        ``m_1, ..., m_{p-1}`` for ``p = n r``: ``m_{ni+j} = m_j`` and ``m_{ni} = c_i * lam``
        with ``lam = -xi**(2n) / (m_1* ... m_{n-1}*)``.
    """
    n = base.p
    r = len(c_orbit) + 1
    m = base.m
    sigma = base.kneading
    prod = Monomial(1.0, Fraction(0))
    for j, mj in enumerate(m, start=1):
        prod = prod * star(mj, sigma.sigma(j))
    lam = Monomial(-1.0, Fraction(2 * n)) / prod

    out: list[Monomial] = []
    for i in range(r):
        if i > 0:
            out.append(lam.scale(c_orbit[i - 1]))
        out.extend(m)
    return out


def solve_satellite(
    base: SolutionVector, center: QuadraticCenter, trunc: int = DEFAULT_TRUNC
) -> SolutionVector:
    """Solve the satellite of ``base`` attached to ``center``, seeded with the base series."""
    r = center.r
    if r == 1:
        return base
    n = base.p
    m = satellite_monomials(base, center.orbit[1:])
    mu = math.lcm(base.mu, *(mj.exp.denominator for mj in m))
    K = trunc * mu
    seed = []
    for idx in range(1, n * r):
        if idx % n == 0:
            seed.append(PuiseuxSeries.from_monomial(m[idx - 1], K, mu))
        else:
            seed.append(base.series(idx % n).rescale(mu).truncate(trunc))
    return solve_graded(SolutionVector.from_interior(seed, trunc), trunc)


def galois_orbit(s: SolutionVector) -> list[SolutionVector]:
    """
    All Galois conjugates ``xi**(1/mu) -> alpha * xi**(1/mu)`` of a solution, without repetitions.

    Parameters
    ----------
    s: SolutionVector
        A solution over its ambient ramification.

    Returns
    -------
    list[SolutionVector]
        The conjugates, starting with ``s`` itself.
    """
    orbit = [s]
    for k in range(1, s.mu):
        alpha = cmath.exp(2j * math.pi * k / s.mu)
        conj = s.map_series(lambda w, alpha=alpha: w.galois(alpha))
        if not any(conj.allclose(t) for t in orbit):
            orbit.append(conj)
    return orbit


def same_region(s: SolutionVector, t: SolutionVector) -> bool:
    """Whether two solutions are Galois conjugate, i.e. describe the same escape region."""
    if s.p != t.p:
        return False
    return any(g.allclose(t) for g in galois_orbit(s))


def dual_solution(s: SolutionVector) -> SolutionVector:
    """The image of a solution under the canonical involution ``(a, v) -> (-a, -v)``."""
    return s.map_series(lambda w: w.dual())


def is_self_dual(s: SolutionVector) -> bool:
    return same_region(s, dual_solution(s))


def symmetry(s: SolutionVector) -> str:
    """
    Invariance of the region under the two anti-holomorphic involutions.

    Returns
    -------
    str
        ``"±"`` if invariant under complex conjugation and under its composition with the canonical
        involution, ``"+"`` or ``"−"`` if only under one of them, and ``""`` otherwise.
    """
    conj = s.map_series(lambda w: w.conjugate())
    plus = same_region(s, conj)
    minus = same_region(s, dual_solution(conj))
    return {(True, True): "±", (True, False): "+", (False, True): "−"}.get((plus, minus), "")


def _sweep(
    sigma: KneadingSequence, signs: Sequence[int], trunc: int, max_sweeps: int | None = None
) -> list[PuiseuxSeries] | None:
    # series analogue of the Gauss-Seidel fixed point iteration for v, run from j = p-1 down to 1
    p = sigma.p
    xi = Monomial(1.0, Fraction(1))
    xi2 = Monomial(1.0, Fraction(2))
    w: list[PuiseuxSeries] = [PuiseuxSeries.constant(float(b), trunc) for b in sigma.bits[:-1]]
    zero = PuiseuxSeries.zero(trunc)
    sign_of = dict(zip([j for j in range(p - 1) if sigma.bits[j] == 0], signs))
    budget = max_sweeps or 8 * trunc + 16
    for sweep in range(budget):
        previous = list(w)
        for j in range(p - 2, -1, -1):
            nxt = w[j + 1] if j + 1 < p - 1 else zero
            try:
                if sigma.bits[j] == 1:
                    w[j] = 1.0 + (nxt - w[0]).mul_monomial(xi2) / (w[j] * w[j])
                else:
                    num = w[0] - nxt
                    if num.is_zero(1e-12):
                        continue
                    root = (num / (1.0 - w[j])).sqrt()
                    w[j] = root.mul_monomial(xi).scale(sign_of[j])
            except ZeroSeries:
                return None
            w[j] = w[j].truncate(trunc)
        if all(a.allclose(b, 1e-11) for a, b in zip(w, previous)) and sweep > 0:
            return w
    return None


def primitive_solution(
    sigma: KneadingSequence | str, signs: Sequence[int], trunc: int = DEFAULT_TRUNC
) -> SolutionVector | None:
    """
    Solve for the region reached by one choice of square root sign at each zero bit of ``sigma``.

    Parameters
    ----------
    sigma: KneadingSequence | str
        The kneading sequence.
    signs: Sequence[int]
        One sign (``+1`` or ``-1``) per interior zero bit, in order of increasing index.
    trunc: int
        Truncation as an integral power of ``xi``.

    Returns
    -------
    SolutionVector | None
        The polished solution, or ``None`` if the sweep does not settle on a solution of exact period
        ``p`` with the requested kneading sequence.
    """
    sigma = KneadingSequence.parse(sigma)
    if sigma.zero_count() != len(signs):
        raise ValueError(f"expected {sigma.zero_count()} signs for {sigma}, got {len(signs)}")
    if sigma.p == 1:
        return SolutionVector(1, (PuiseuxSeries.zero(trunc, 1),), 1, trunc)
    w = _sweep(sigma, signs, trunc)
    if w is None:
        return None
    candidate = SolutionVector.from_interior(w, trunc)
    if candidate.has_vanishing_entry() or str(candidate.kneading) != str(sigma):
        return None
    try:
        solved = solve_graded(candidate, trunc)
    except (NoProgress, SingularSystem) as e:
        logger.debug(f"Discarding candidate for {sigma} with signs {tuple(signs)}: {e}")
        return None
    return solved


def dedupe_regions(solutions: Iterable[SolutionVector]) -> list[SolutionVector]:
    out: list[SolutionVector] = []
    for s in solutions:
        if not any(same_region(s, t) for t in out):
            out.append(s)
    return out


def primitive_solutions(sigma: KneadingSequence | str, trunc: int = DEFAULT_TRUNC) -> list[SolutionVector]:
    """
    Regions of grid period ``p`` with kneading ``sigma``, one representative per Galois class.

    Trivial kneading sequences have no primitive regions; their regions come from quadratic centers.
    """
    sigma = KneadingSequence.parse(sigma)
    if sigma.is_trivial and sigma.p > 1:
        return []
    found = []
    for signs in itertools.product((1, -1), repeat=sigma.zero_count()):
        s = primitive_solution(sigma, signs, trunc)
        if s is not None:
            found.append(s)
    return dedupe_regions(found)


def _divisors(p: int) -> Iterator[int]:
    return (n for n in range(1, p) if p % n == 0)


def satellite_solutions(sigma: KneadingSequence | str, trunc: int = DEFAULT_TRUNC) -> list[SolutionVector]:
    """Satellite regions (grid period ``n < p``, nontrivial base kneading) with kneading ``sigma``."""
    sigma = KneadingSequence.parse(sigma)
    p = sigma.p
    out = []
    for n in _divisors(p):
        base_bits = sigma.bits[:n]
        if sigma.bits != base_bits * (p // n) or not any(base_bits):
            continue
        for base in primitive_solutions(KneadingSequence(base_bits), trunc):
            for center in centers(p // n):
                out.append(solve_satellite(base, center, trunc))
    return dedupe_regions(out)


@lru_cache(maxsize=256)
def _solutions_cached(sigma: str, trunc: int) -> tuple[SolutionVector, ...]:
    kneading = KneadingSequence.parse(sigma)
    if kneading.is_trivial:
        sols = [solve_trivial_kneading(c.c, kneading.p, trunc) for c in centers(kneading.p)]
    else:
        sols = primitive_solutions(kneading, trunc) + satellite_solutions(kneading, trunc)
    logger.info(f"Kneading {sigma}: {len(sols)} region(s)")
    return tuple(dedupe_regions(sols))


def solutions_for_kneading(sigma: KneadingSequence | str, trunc: int = DEFAULT_TRUNC) -> list[SolutionVector]:
    """
    One solution per escape region of exact period ``p`` with the given kneading sequence.

    Parameters
    ----------
    sigma: KneadingSequence | str
        The kneading sequence.
    trunc: int
        Truncation as an integral power of ``xi``.

    Returns
    -------
    list[SolutionVector]
        Trivial kneading regions, primitive regions and satellites, one per Galois class.
    """
    return list(_solutions_cached(str(KneadingSequence.parse(sigma)), trunc))


def all_kneadings(p: int) -> list[KneadingSequence]:
    """The ``2**(p-1)`` kneading sequences of period ``p``, in lexicographic order."""
    return [KneadingSequence(bits + (0,)) for bits in itertools.product((0, 1), repeat=p - 1)]


def all_solutions(p: int, trunc: int = DEFAULT_TRUNC) -> list[SolutionVector]:
    """One solution per escape region of ``S_p``, over all kneading sequences."""
    return [s for k in all_kneadings(p) for s in solutions_for_kneading(k, trunc)]
