"""
The canonical parameter ``t`` on ``S_p``, t-plane renderings, and the topology of the curve.

On ``S_p = {Phi_p(a, v) = 0}`` the form ``dt = da / (dPhi/dv)`` is holomorphic and nowhere zero. Its
integral curves are the Hamiltonian flow ``da/dt = dPhi/dv``, ``dv/dt = -dPhi/da``.
"""

from __future__ import annotations

import cmath
import logging
import math
import os
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Any

import fsspec
import numpy as np
import numpy.typing as npt

from cubicurve import _kernels
from cubicurve.dynamics import ESCAPE_BUDGET, CubicMap, all_fiber_roots, marked_period
from cubicurve.errors import RootFindingStalled, SheetMismatch, StepCollapse
from cubicurve.grid import RegionDescriptor
from cubicurve.quadratic import critical_orbit, psi_eval
from cubicurve.solver import star

logger = logging.getLogger("cubicurve")

CURVE_TOL = 1e-9
STEPS_PER_UNIT = 512
RESIDUE_SAMPLES = 4096
GENUS_CAVEAT = "assuming S_p is connected"

BOUNDED = -1
FAILED = -2

# escape times cycle through these colors; bounded orbits are black, failed flows magenta
PALETTE: tuple[tuple[int, int, int], ...] = (
    (66, 30, 15),
    (25, 7, 26),
    (9, 1, 47),
    (4, 4, 73),
    (0, 7, 100),
    (12, 44, 138),
    (24, 82, 177),
    (57, 125, 209),
    (134, 181, 229),
    (211, 236, 248),
    (241, 233, 191),
    (248, 201, 95),
    (255, 170, 0),
    (204, 128, 0),
    (153, 87, 0),
    (106, 52, 3),
)
BOUNDED_COLOR = (0, 0, 0)
FAILED_COLOR = (255, 0, 255)


@dataclass(frozen=True)
class CurvePoint:
    """A point ``(a, v)`` of ``S_p``, within ``1e-9 max(1, |a|)`` of ``Phi_p = 0``."""

    a: complex
    v: complex
    p: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", complex(self.a))
        object.__setattr__(self, "v", complex(self.v))
        residual = abs(_kernels.phi_partials(self.a, self.v, self.p)[0])
        if residual > CURVE_TOL * max(1.0, abs(self.a)):
            raise ValueError(f"({self.a:.6g}, {self.v:.6g}) is not on S_{self.p}: |Phi| = {residual:.2e}")

    @classmethod
    def project(cls, a: complex, v: complex, p: int) -> CurvePoint:
        """Project ``(a, v)`` onto the curve by minimum norm Newton steps."""
        a, v, ok = _kernels.project(complex(a), complex(v), p, 1e-12, 50)
        if not ok:
            raise RootFindingStalled(f"could not project ({a:.6g}, {v:.6g}) onto S_{p}")
        return cls(a, v, p)

    @property
    def map(self) -> CubicMap:
        return CubicMap(self.a, self.v)

    def to_json(self) -> dict[str, Any]:
        return {"p": self.p, "a": [self.a.real, self.a.imag], "v": [self.v.real, self.v.imag]}

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> CurvePoint:
        return cls.project(complex(*data["a"]), complex(*data["v"]), int(data["p"]))


def partials(pt: CurvePoint) -> tuple[complex, complex]:
    """
    ``(dPhi/da, dPhi/dv)`` at a curve point.

    ``dPhi/dv`` is ``Y_p`` from ``Y_1 = 1``, ``Y_{j+1} = X_j Y_j + 1`` with ``X_j = 3 (a_j**2 - a**2)``.
    """
    _, pa, pv = _kernels.phi_partials(pt.a, pt.v, pt.p)
    return complex(pa), complex(pv)


def flow(base: CurvePoint, t_target: complex, steps: int | None = None) -> CurvePoint:
    """
    Follow the Hamiltonian flow from ``base`` along the segment from ``t = 0`` to ``t_target``.

    Parameters
    ----------
    base: CurvePoint
        Start point.
    t_target: complex
        Target value of the local parameter ``t``, with ``t(base) = 0``.
    steps: int | None
        Runge-Kutta steps; by default 512 per unit of ``|t_target|``.

    Returns
    -------
    CurvePoint
        The end point, projected onto the curve.

    Raises
    ------
    StepCollapse
        If both partial derivatives vanish along the way, or a step cannot be projected back.
    """
    t_target = complex(t_target)
    if t_target == 0:
        return base
    steps = steps or max(1, math.ceil(abs(t_target) * STEPS_PER_UNIT))
    a, v, status = _kernels.flow_segment(base.a, base.v, base.p, t_target, steps)
    if status == _kernels.FLOW_COLLAPSE:
        raise StepCollapse(f"both partials of Phi_{base.p} vanish near a = {a:.6g}, v = {v:.6g}")
    if status != _kernels.FLOW_OK:
        raise StepCollapse(f"flow step could not be projected onto S_{base.p} near a = {a:.6g}")
    return CurvePoint(a, v, base.p)


@dataclass(frozen=True, eq=False)
class TPlaneImage:
    """
    Escape-time raster over a rectangle of the ``t`` plane.

    ``pixels[y, x]`` is the escape time of ``-a`` at the pixel's curve point, ``BOUNDED`` if the free orbit
    stays bounded for the whole budget, or ``FAILED`` where the flow broke down. Row zero is the top.
    """

    width: int
    height: int
    center: complex
    scale: float
    pixels: npt.NDArray[np.int32]
    base: CurvePoint

    def t_at(self, x: int, y: int) -> complex:
        dx = x - (self.width - 1) / 2
        dy = (self.height - 1) / 2 - y
        return self.center + self.scale * complex(dx, dy)

    def rgb(self) -> npt.NDArray[np.uint8]:
        palette = np.array(PALETTE, dtype=np.uint8)
        out = palette[np.maximum(self.pixels, 0) % len(PALETTE)]
        out[self.pixels == BOUNDED] = BOUNDED_COLOR
        out[self.pixels == FAILED] = FAILED_COLOR
        return out

    def metadata(self) -> dict[str, Any]:
        return {
            "width": self.width,
            "height": self.height,
            "center": [self.center.real, self.center.imag],
            "scale": self.scale,
            "base": self.base.to_json(),
        }


def render(
    base: CurvePoint,
    width: int,
    height: int,
    center: complex = 0j,
    scale: float = 0.002,
    budget: int = ESCAPE_BUDGET,
    threads: int | None = None,
) -> TPlaneImage:
    """
    Render the t-plane picture around ``base``.

    Every pixel is reached by flowing from ``base`` along a straight segment in ``t``, so pixels are
    independent and rows are computed in parallel.

    Parameters
    ----------
    base: CurvePoint
        The point with ``t = 0``.
    width: int
        Image width in pixels.
    height: int
        Image height in pixels.
    center: complex
        The value of ``t`` at the image center.
    scale: float
        ``t`` units per pixel.
    budget: int
        Escape iteration budget.
    threads: int | None
        Worker threads.

    Returns
    -------
    TPlaneImage
        The raster, with the base point recorded for reproducibility.
    """
    if width < 1 or height < 1:
        raise ValueError(f"image size must be positive, got {width}x{height}")
    image = TPlaneImage(width, height, complex(center), float(scale), np.empty((height, width), np.int32), base)

    def row(y: int) -> None:
        ts = np.array([image.t_at(x, y) for x in range(width)], dtype=np.complex128)
        _kernels.render_row(base.a, base.v, base.p, ts, float(STEPS_PER_UNIT), budget, image.pixels[y])

    with ThreadPoolExecutor(max_workers=threads or os.cpu_count() or 1) as pool:
        list(pool.map(row, range(height)))
    failed = int((image.pixels == FAILED).sum())
    if failed:
        logger.warning(f"Flow failed for {failed} of {width * height} pixels")
    return image


def write_ppm(image: TPlaneImage, path: str) -> None:
    """Write a binary PPM (P6, maxval 255) to a local path or any fsspec URL."""
    header = f"P6\n# base {image.base.to_json()}\n{image.width} {image.height}\n255\n".encode("ascii")
    with fsspec.open(path, "wb") as f:
        f.write(header)
        f.write(np.ascontiguousarray(image.rgb()).tobytes())


def read_ppm(path: str) -> npt.NDArray[np.uint8]:
    """Read back the pixels of a binary PPM written by ``write_ppm`` as a ``height x width x 3`` array."""
    with fsspec.open(path, "rb") as f:
        data = f.read()
    tokens: list[bytes] = []
    pos = 0
    while len(tokens) < 4:
        if data[pos : pos + 1] == b"#":
            pos = data.index(b"\n", pos) + 1
            continue
        end = pos
        while data[end : end + 1] not in (b" ", b"\n", b"\t", b"\r"):
            end += 1
        if end > pos:
            tokens.append(data[pos:end])
        pos = end + 1
    if tokens[0] != b"P6":
        raise ValueError(f"not a binary PPM file: {path!r}")
    width, height = int(tokens[1]), int(tokens[2])
    return np.frombuffer(data[pos : pos + 3 * width * height], dtype=np.uint8).reshape(height, width, 3)


def sample_point(region: RegionDescriptor, R: float) -> CurvePoint:
    """
    A point of the region over ``a = R``.

    Uses a stored fiber sample when one lies over ``R``; otherwise evaluates ``v = a (1 - 3 u_1)`` from the
    solved series at the positive root ``xi**(1/mu)`` and polishes ``v`` by Newton's method.
    """
    for a, v in region.samples:
        if abs(a - R) < 1e-12 * R:
            return CurvePoint(a, v, region.p)
    if region.series is None:
        raise ValueError("the region has neither a solved series nor a fiber sample over this radius")
    a = complex(R)
    if region.p == 1:
        return CurvePoint(a, a, 1)
    s = region.series
    root = (1 / (3 * R)) ** (1 / s.mu)
    v0 = a * (1 - 3 * s.series(1).evaluate(root))
    v, ok = _kernels.newton_v(a, v0, region.p, 60)
    if not ok or marked_period(CubicMap(a, v), region.p) != region.p:
        raise RootFindingStalled(f"Newton's method from the series value v = {v0:.9g} failed at R = {R}")
    return CurvePoint(a, v, region.p)


def residue_at_ideal(region: RegionDescriptor, R: float = 40.0, samples: int = RESIDUE_SAMPLES) -> complex:
    """
    ``(1/2 pi i)`` times the integral of ``dt = da / Y_p`` around the ideal point of a region.

    The circle ``|a| = R`` is traversed ``mu`` times, continuing the fiber point, which is exactly one
    loop around the ideal point.

    Parameters
    ----------
    region: RegionDescriptor
        The region.
    R: float
        Radius of the loop.
    samples: int
        Quadrature nodes per turn.

    Returns
    -------
    complex
        The residue, which vanishes for every region.

    Raises
    ------
    SheetMismatch
        If the continued point closes up after fewer or more than ``mu`` turns.
    """
    start = sample_point(region, R)
    p = region.p
    a, v = start.a, start.v
    total = 0j
    dtheta = 2 * math.pi / samples
    for turn in range(1, region.mu + 1):
        for k in range(samples):
            _, _, yp = _kernels.phi_partials(a, v, p)
            total += 1j * a / yp * dtheta
            a_next = start.a * cmath.exp(1j * dtheta * (k + 1))
            v, ok = _kernels.track(p, np.array([a, a_next]), v)
            if not ok:
                raise SheetMismatch(f"lost the fiber point during turn {turn} around R = {R}")
            a = a_next
        closed = abs(v - start.v) < 1e-6 * R
        if closed != (turn == region.mu):
            raise SheetMismatch(f"the fiber point {'closed up' if closed else 'is still open'} after {turn} turn(s), mu = {region.mu}")
        a = start.a
    return total / (2j * math.pi)


@dataclass(frozen=True)
class TLeading:
    """
    Leading behavior of ``t`` at an ideal point.

    For ``kind == "monomial"``, ``t ~ coeff * xi**exp`` with ``exp = nu/mu``. For ``kind == "pole"``
    (trivial kneading), ``t ~ coeff * a``.
    """

    kind: str
    coeff: complex
    exp: Fraction


def t_leading(region: RegionDescriptor) -> TLeading:
    """
    The leading term of ``t`` at the ideal point of ``region``.

    Integrates ``da/dt ~ psi_r(2c_1, ..., 2c_{r-1}) (m_1* ... m_{n-1}*) / xi**(2n-2)``, which gives
    ``t ~ beta xi**e`` with ``e = 2n - 3 - ord(m_1 ... m_{n-1})`` and ``beta = -1/(3 psi_r B e)``, where
    ``B`` is the coefficient of ``m_1* ... m_{n-1}*``.
    """
    c = region.quad_center if region.quad_center is not None else 0j
    r = region.r
    psi = psi_eval([2 * z for z in critical_orbit(c, r)[1:]])
    n = region.grid.period
    if n == 1:
        return TLeading("pole", 1 / psi, Fraction(-1))
    B = 1 + 0j
    q = Fraction(0)
    for j in range(1, n):
        m = star(region.monomials[j - 1], region.kneading.sigma(j))
        B *= m.coeff
        q += m.exp
    e = 2 * n - 3 - q
    return TLeading("monomial", -1 / (3 * psi * B * e), e)


@lru_cache(maxsize=None)
def degree(p: int) -> int:
    """``d_p``, the degree of ``S_p``, from ``sum_{n | p} d_n = 3**(p-1)``."""
    if p < 1:
        raise ValueError(f"period must be positive, got {p}")
    return 3 ** (p - 1) - sum(degree(n) for n in range(1, p) if p % n == 0)


def euler_affine(p: int) -> int:
    """``chi(S_p) = (2 - p) d_p``."""
    return (2 - p) * degree(p)


def euler_compact(p: int, ideal_points: int) -> int:
    """``chi`` of the smooth compactification, adding ``N_p`` ideal points to the affine curve."""
    return ideal_points + euler_affine(p)


def euler_from_windings(regions: Sequence[RegionDescriptor]) -> int:
    """``chi = sum over regions of (1 - nu)``, each region counted once."""
    return sum(1 - r.nu for r in regions)


def euler_mod_involution(chi: int, fixed_ideal_points: int) -> Fraction:
    """Euler characteristic of the quotient by the canonical involution, whose only fixed points are ideal."""
    return Fraction(chi + fixed_ideal_points, 2)


def genus_if_connected(chi: int | Fraction) -> tuple[Fraction, str]:
    """``g = 1 - chi/2``, valid only if the curve is connected; returned together with that caveat."""
    return 1 - Fraction(chi) / 2, GENUS_CAVEAT


def sym_product_check(p: int, a_hat: complex, j: int, a_hat2: complex | None = None) -> tuple[complex, complex]:
    """
    ``prod_k (a - F^j_{a,v_k}(a))`` over the ``d_p`` fiber points, at two values of ``a``.

    The product is a nonzero constant on ``S_p``, conjecturally one; both values are returned so that the
    caller can compare them.
    """
    if not 0 < j < p:
        raise ValueError(f"orbit index must satisfy 0 < j < {p}, got {j}")

    def product(a: complex) -> complex:
        out = 1 + 0j
        for v in all_fiber_roots(p, a):
            F = CubicMap(a, v)
            if marked_period(F, p) == p:
                out *= a - F.critical_orbit(j)[-1]
        return out

    other = a_hat2 if a_hat2 is not None else 1.5 * a_hat
    first, second = product(complex(a_hat)), product(complex(other))
    logger.info(f"Fiber product for p={p}, j={j}: {first:.9g} and {second:.9g}")
    return first, second
