"""
Truncated Puiseux series in one indeterminate ``xi`` with complex floating point coefficients.

A series ``sum c_k xi**(k/mu)`` is stored densely: ``coeffs[i]`` is the coefficient of ``xi**((start + i)/mu)``,
and the series is only known modulo ``xi**(trunc/mu)``. Values are immutable, so they can be shared freely
between threads.
"""

from __future__ import annotations

import cmath
import math
from collections.abc import Mapping
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

import numpy as np
import numpy.typing as npt

from cubicurve.errors import ZeroSeries

# coefficients below this fraction of the largest magnitude are numerical noise
ZERO_TOL = 1e-12

Order = Fraction | float  # ``math.inf`` for the zero series


@dataclass(frozen=True)
class Monomial:
    """A nonzero term ``coeff * xi**exp``."""

    coeff: complex
    exp: Fraction

    def __post_init__(self) -> None:
        if self.coeff == 0:
            raise ValueError("monomial coefficient must be nonzero")
        object.__setattr__(self, "coeff", complex(self.coeff))
        object.__setattr__(self, "exp", Fraction(self.exp))

    def __mul__(self, other: Monomial) -> Monomial:
        return Monomial(self.coeff * other.coeff, self.exp + other.exp)

    def __truediv__(self, other: Monomial) -> Monomial:
        return Monomial(self.coeff / other.coeff, self.exp - other.exp)

    def scale(self, c: complex) -> Monomial:
        return Monomial(self.coeff * c, self.exp)

    def is_one(self, tol: float = 1e-9) -> bool:
        return self.exp == 0 and abs(self.coeff - 1) < tol

    def to_json(self) -> list[Any]:
        return [self.coeff.real, self.coeff.imag, self.exp.numerator, self.exp.denominator]

    @classmethod
    def from_json(cls, data: list[Any]) -> Monomial:
        re, im, num, den = data
        return cls(complex(re, im), Fraction(num, den))


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


@dataclass(frozen=True, eq=False)
class PuiseuxSeries:
    """
    A truncated series in ``xi**(1/mu)``.

    Parameters
    ----------
    mu: int
        Ramification: exponents are multiples of ``1/mu``.
    start: int
        Exponent index (in units of ``1/mu``) of ``coeffs[0]``.
    coeffs: npt.NDArray[np.complex128]
        Dense coefficients for exponent indices ``start, start + 1, ..., trunc - 1``.
    trunc: int
        Exponent index at which the series is truncated.
    """

    mu: int
    start: int
    coeffs: npt.NDArray[np.complex128]
    trunc: int

    def __post_init__(self) -> None:
        if self.mu < 1:
            raise ValueError(f"ramification must be positive, got {self.mu}")
        c = np.array(self.coeffs, dtype=np.complex128)
        size = max(self.trunc - self.start, 0)
        if len(c) < size:
            c = np.concatenate([c, np.zeros(size - len(c), dtype=np.complex128)])
        c = c[:size]
        if c.size:
            mags = np.abs(c)
            c[mags <= ZERO_TOL * mags.max()] = 0.0
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    # constructors

    @classmethod
    def zero(cls, trunc: int, mu: int = 1) -> PuiseuxSeries:
        return cls(mu, trunc, np.zeros(0, dtype=np.complex128), trunc)

    @classmethod
    def from_terms(cls, terms: Mapping[int, complex], trunc: int, mu: int = 1) -> PuiseuxSeries:
        """Build a series from ``{k: c}`` meaning ``c * xi**(k/mu)``; terms at or beyond ``trunc`` are dropped."""
        kept = {k: complex(c) for k, c in terms.items() if k < trunc and c != 0}
        if not kept:
            return cls.zero(trunc, mu)
        start = min(kept)
        coeffs = np.zeros(trunc - start, dtype=np.complex128)
        for k, c in kept.items():
            coeffs[k - start] = c
        return cls(mu, start, coeffs, trunc)

    @classmethod
    def constant(cls, c: complex, trunc: int, mu: int = 1) -> PuiseuxSeries:
        return cls.from_terms({0: c}, trunc, mu)

    @classmethod
    def from_monomial(cls, m: Monomial, trunc: int, mu: int = 1) -> PuiseuxSeries:
        new_mu = _lcm(mu, m.exp.denominator)
        k = m.exp * new_mu
        return cls.from_terms({int(k): m.coeff}, trunc * (new_mu // mu), new_mu)

    # inspection

    def terms(self) -> dict[int, complex]:
        """Nonzero coefficients keyed by exponent index."""
        return {self.start + int(i): complex(self.coeffs[i]) for i in np.flatnonzero(self.coeffs)}

    def coefficient(self, exp: Fraction | int) -> complex:
        """Coefficient of ``xi**exp``; zero when the exponent is not representable."""
        k = Fraction(exp) * self.mu
        if k.denominator != 1 or not self.start <= k < self.trunc:
            return 0j
        return complex(self.coeffs[int(k) - self.start])

    def is_zero(self, tol: float = 0.0) -> bool:
        return self.ord_index(tol) is None

    def ord_index(self, tol: float = 0.0) -> int | None:
        nz = np.flatnonzero(np.abs(self.coeffs) > tol)
        if not nz.size:
            return None
        return self.start + int(nz[0])

    def ord(self, tol: float = 0.0) -> Order:
        """
        Least exponent with a nonzero coefficient, or ``math.inf`` for the zero series.

        Parameters
        ----------
        tol: float
            Coefficients with magnitude at most ``tol`` count as zero.

        Returns
        -------
        Order
            The order as an exact fraction.
        """
        k = self.ord_index(tol)
        return math.inf if k is None else Fraction(k, self.mu)

    def leading_monomial(self, tol: float = 0.0) -> Monomial:
        k = self.ord_index(tol)
        if k is None:
            raise ZeroSeries("the zero series has no leading monomial")
        return Monomial(complex(self.coeffs[k - self.start]), Fraction(k, self.mu))

    def norm(self) -> float:
        """Non-archimedean norm ``exp(-ord)``."""
        q = self.ord()
        return 0.0 if q == math.inf else math.exp(-q)

    def scale_magnitude(self) -> float:
        return float(np.abs(self.coeffs).max()) if self.coeffs.size else 0.0

    @property
    def precision(self) -> Fraction:
        """The truncation order as an exponent of ``xi``."""
        return Fraction(self.trunc, self.mu)

    # ramification

    def rescale(self, mu: int) -> PuiseuxSeries:
        """Re-express the series over ``xi**(1/mu)``, where ``mu`` is a multiple of the current one."""
        if mu == self.mu:
            return self
        if mu % self.mu:
            raise ValueError(f"cannot rescale ramification {self.mu} to {mu}")
        f = mu // self.mu
        coeffs = np.zeros(len(self.coeffs) * f, dtype=np.complex128)
        coeffs[::f] = self.coeffs
        return PuiseuxSeries(mu, self.start * f, coeffs, self.trunc * f)

    def reduced(self) -> PuiseuxSeries:
        """Rewrite over the smallest ramification that still represents every term exactly."""
        terms = self.terms()
        g = self.mu
        for k in terms:
            g = math.gcd(g, k)
        if g <= 1:
            return self
        return PuiseuxSeries.from_terms(
            {k // g: c for k, c in terms.items()}, self.trunc // g, self.mu // g
        )

    # ring operations

    def _aligned(self, other: PuiseuxSeries) -> tuple[PuiseuxSeries, PuiseuxSeries]:
        mu = _lcm(self.mu, other.mu)
        return self.rescale(mu), other.rescale(mu)

    def __add__(self, other: PuiseuxSeries | complex) -> PuiseuxSeries:
        if not isinstance(other, PuiseuxSeries):
            other = PuiseuxSeries.constant(other, self.trunc, self.mu)
        x, y = self._aligned(other)
        trunc = min(x.trunc, y.trunc)
        start = min(x.start, y.start, trunc)
        out = np.zeros(trunc - start, dtype=np.complex128)
        for s in (x, y):
            n = max(min(s.trunc, trunc) - s.start, 0)
            out[s.start - start : s.start - start + n] += s.coeffs[:n]
        return PuiseuxSeries(x.mu, start, out, trunc)

    __radd__ = __add__

    def __neg__(self) -> PuiseuxSeries:
        return PuiseuxSeries(self.mu, self.start, -self.coeffs, self.trunc)

    def __sub__(self, other: PuiseuxSeries | complex) -> PuiseuxSeries:
        if not isinstance(other, PuiseuxSeries):
            other = PuiseuxSeries.constant(other, self.trunc, self.mu)
        return self + (-other)

    def __rsub__(self, other: complex) -> PuiseuxSeries:
        return (-self) + other

    def scale(self, c: complex) -> PuiseuxSeries:
        return PuiseuxSeries(self.mu, self.start, self.coeffs * c, self.trunc)

    def __mul__(self, other: PuiseuxSeries | complex) -> PuiseuxSeries:
        if not isinstance(other, PuiseuxSeries):
            return self.scale(other)
        x, y = self._aligned(other)
        kx, ky = x.ord_index(), y.ord_index()
        if kx is None and ky is None:
            return PuiseuxSeries.zero(x.trunc + y.trunc, x.mu)
        if kx is None:
            return PuiseuxSeries.zero(x.trunc + ky, x.mu)
        if ky is None:
            return PuiseuxSeries.zero(y.trunc + kx, x.mu)
        trunc = min(x.trunc + ky, y.trunc + kx)
        xc = x.coeffs[kx - x.start :]
        yc = y.coeffs[ky - y.start :]
        start = kx + ky
        prod = np.convolve(xc, yc)[: max(trunc - start, 0)]
        return PuiseuxSeries(x.mu, start, prod, trunc)

    __rmul__ = __mul__

    def pow_int(self, n: int) -> PuiseuxSeries:
        if n < 0:
            return self.inverse().pow_int(-n)
        if n == 0:
            return PuiseuxSeries.constant(1.0, self.trunc, self.mu)
        result = self
        for _ in range(n - 1):
            result = result * self
        return result

    def mul_monomial(self, m: Monomial) -> PuiseuxSeries:
        x = self.rescale(_lcm(self.mu, m.exp.denominator))
        shift = int(m.exp * x.mu)
        return PuiseuxSeries(x.mu, x.start + shift, x.coeffs * m.coeff, x.trunc + shift)

    def div_monomial(self, m: Monomial) -> PuiseuxSeries:
        """Divide by ``m``: shift exponents by ``-m.exp`` and scale by ``1/m.coeff``."""
        return self.mul_monomial(Monomial(1 / m.coeff, -m.exp))

    def truncate(self, q: Fraction | int) -> PuiseuxSeries:
        """Drop every term of exponent ``>= q``."""
        k = math.ceil(Fraction(q) * self.mu)
        if k >= self.trunc:
            return self
        if k <= self.start:
            return PuiseuxSeries.zero(k, self.mu)
        return PuiseuxSeries(self.mu, self.start, self.coeffs[: k - self.start], k)

    def _normalized_tail(self) -> tuple[int, complex, npt.NDArray[np.complex128]]:
        k = self.ord_index()
        if k is None:
            raise ZeroSeries("cannot invert or take roots of the zero series")
        tail = np.asarray(self.coeffs[k - self.start :])
        lead = complex(tail[0])
        return k, lead, tail / lead

    def inverse(self) -> PuiseuxSeries:
        """Multiplicative inverse of a series with nonzero leading term."""
        k, lead, b = self._normalized_tail()
        n = len(b)
        r = np.zeros(n, dtype=np.complex128)
        r[0] = 1.0
        for i in range(1, n):
            r[i] = -np.dot(b[1 : i + 1], r[i - 1 :: -1][:i])
        return PuiseuxSeries(self.mu, -k, r / lead, -k + n)

    def sqrt(self) -> PuiseuxSeries:
        """
        Square root with the principal branch on the leading coefficient.

        The ramification doubles when the leading exponent index is odd.

        Returns
        -------
        PuiseuxSeries
            A series ``s`` with ``s * s`` equal to this series to its precision.
        """
        x = self
        k = x.ord_index()
        if k is not None and k % 2:
            x = x.rescale(2 * x.mu)
        k, lead, b = x._normalized_tail()
        n = len(b)
        s = np.zeros(n, dtype=np.complex128)
        s[0] = 1.0
        for i in range(1, n):
            s[i] = (b[i] - np.dot(s[1:i], s[i - 1 : 0 : -1])) / 2
        half = k // 2
        return PuiseuxSeries(x.mu, half, s * cmath.sqrt(lead), half + n)

    def __truediv__(self, other: PuiseuxSeries | complex) -> PuiseuxSeries:
        if not isinstance(other, PuiseuxSeries):
            return self.scale(1 / other)
        return self * other.inverse()

    # automorphisms

    def galois(self, alpha: complex) -> PuiseuxSeries:
        """Apply ``xi**(1/mu) -> alpha * xi**(1/mu)``."""
        powers = alpha ** np.arange(self.start, self.trunc, dtype=float)
        return PuiseuxSeries(self.mu, self.start, self.coeffs * powers, self.trunc)

    def dual(self) -> PuiseuxSeries:
        """The canonical involution, lifted as ``xi**(1/mu) -> exp(i*pi/mu) * xi**(1/mu)``."""
        return self.galois(cmath.exp(1j * math.pi / self.mu))

    def conjugate(self) -> PuiseuxSeries:
        return PuiseuxSeries(self.mu, self.start, np.conj(self.coeffs), self.trunc)

    # numerics

    def evaluate(self, root: complex) -> complex:
        """Sum the series at ``xi**(1/mu) = root``."""
        if not self.coeffs.size:
            return 0j
        k = np.arange(self.start, self.trunc, dtype=float)
        return complex(np.sum(self.coeffs * np.power(complex(root), k)))

    def allclose(self, other: PuiseuxSeries, tol: float = 1e-9) -> bool:
        """Coefficientwise comparison up to the common precision."""
        diff = self - other
        return diff.is_zero(tol * max(1.0, self.scale_magnitude()))

    def to_json(self) -> dict[str, Any]:
        return {
            "mu": self.mu,
            "terms": [[k, c.real, c.imag] for k, c in sorted(self.terms().items())],
            "trunc": self.trunc,
        }

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> PuiseuxSeries:
        terms = {int(k): complex(re, im) for k, re, im in data["terms"]}
        return cls.from_terms(terms, int(data["trunc"]), int(data["mu"]))

    def __repr__(self) -> str:
        body = " + ".join(f"({c:.6g})*xi^({Fraction(k, self.mu)})" for k, c in sorted(self.terms().items()))
        return f"PuiseuxSeries({body or '0'} + O(xi^({self.precision})))"


def xi_power(exp: Fraction | int, trunc: int, mu: int = 1, coeff: complex = 1.0) -> PuiseuxSeries:
    """The series ``coeff * xi**exp`` known to ``trunc`` (in units of ``1/mu``)."""
    return PuiseuxSeries.from_monomial(Monomial(coeff, Fraction(exp)), trunc, mu)
