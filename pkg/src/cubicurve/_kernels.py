"""
Compiled inner loops for orbits of ``F(z) = z**3 - 3 a**2 z + 2 a**3 + v``.

Every kernel is a nopython function that releases the GIL, so callers may fan out over a thread pool.
"""

import cmath
import math

import numba
import numpy as np

OVERFLOW = 1e150
# escaped orbits are iterated until |z| passes this bound before Green and Boettcher values are read off
_FAR = 1e50

FLOW_OK = 0
FLOW_COLLAPSE = 1
FLOW_PROJECTION = 2

jit = numba.njit(cache=True, nogil=True)


@jit
def cubic(a: complex, v: complex, z: complex) -> complex:
    return z * z * z - 3.0 * a * a * z + 2.0 * a * a * a + v


@jit
def escape_radius(a: complex) -> float:
    return max(1e3, 10.0 * abs(a)) ** 3


@jit
def escape_time(a: complex, v: complex, z: complex, budget: int) -> int:
    """Index of the first iterate beyond the escape radius, or ``-1`` if the orbit stays bounded."""
    radius = escape_radius(a)
    for n in range(budget + 1):
        if abs(z) > radius:
            return n
        z = cubic(a, v, z)
    return -1


@jit
def green(a: complex, v: complex, z: complex, budget: int) -> float:
    radius = escape_radius(a)
    for n in range(budget + 1):
        r = abs(z)
        if r > _FAR:
            return math.log(r) / 3.0**n
        if n == budget and r <= radius:
            return 0.0
        z = cubic(a, v, z)
    return 0.0


@jit
def bottcher(a: complex, v: complex, z: complex, budget: int) -> complex:
    # log B(z) = log z + sum_n 3**-(n+1) Log(z_{n+1} / z_n**3), every ratio close to one
    if z == 0:
        return complex(np.nan, np.nan)
    log_b = cmath.log(z)
    weight = 1.0
    for _ in range(budget):
        if abs(z) > _FAR:
            return cmath.exp(log_b)
        w = cubic(a, v, z)
        if w == 0:
            return complex(np.nan, np.nan)
        weight /= 3.0
        log_b += weight * cmath.log(w / (z * z * z))
        z = w
    return complex(np.nan, np.nan)


@jit
def phi_partials(a: complex, v: complex, p: int) -> tuple[complex, complex, complex]:
    """
    ``Phi_p(a, v) = F^p(a) - a`` with its partial derivatives.

    ``dPhi/dv`` follows ``Y_{j+1} = X_j Y_j + 1`` with ``X_j = 3 (a_j**2 - a**2)``; ``dPhi/da`` adds the
    explicit term ``6 a**2 - 6 a a_j`` at every step and subtracts one for the trailing ``-a``.
    """
    z = a
    dz_da = 1.0 + 0j
    dz_dv = 0j
    for _ in range(p):
        x = 3.0 * (z * z - a * a)
        dz_da = x * dz_da + 6.0 * a * a - 6.0 * a * z
        dz_dv = x * dz_dv + 1.0
        z = cubic(a, v, z)
    return z - a, dz_da - 1.0, dz_dv


@jit
def project(a: complex, v: complex, p: int, tol: float, max_iter: int) -> tuple[complex, complex, bool]:
    """Minimum norm Newton steps back onto ``Phi_p = 0``."""
    scale = max(1.0, abs(a))
    for _ in range(max_iter):
        phi, pa, pv = phi_partials(a, v, p)
        if abs(phi) <= tol * scale:
            return a, v, True
        g = abs(pa) ** 2 + abs(pv) ** 2
        if g == 0.0:
            return a, v, False
        a = a - phi * pa.conjugate() / g
        v = v - phi * pv.conjugate() / g
    phi, pa, pv = phi_partials(a, v, p)
    return a, v, abs(phi) <= tol * scale


@jit
def _hamiltonian(a: complex, v: complex, p: int) -> tuple[complex, complex, float]:
    _, pa, pv = phi_partials(a, v, p)
    return pv, -pa, max(abs(pa), abs(pv))


@jit
def flow_segment(a: complex, v: complex, p: int, dt: complex, steps: int) -> tuple[complex, complex, int]:
    """
    Integrate ``da/dt = dPhi/dv``, ``dv/dt = -dPhi/da`` over ``t -> t + dt`` by classical Runge-Kutta.

    Each step is projected back onto the curve. A step that fails to project is retried as two halves,
    up to four times.
    """
    h = dt / steps
    done = 0
    while done < steps:
        sub = 1
        ok = False
        a_try = a
        v_try = v
        while sub <= 16:
            a_try = a
            v_try = v
            hs = h / sub
            ok = True
            for _ in range(sub):
                k1a, k1v, n1 = _hamiltonian(a_try, v_try, p)
                if n1 < 1e-12:
                    return a_try, v_try, FLOW_COLLAPSE
                k2a, k2v, _ = _hamiltonian(a_try + 0.5 * hs * k1a, v_try + 0.5 * hs * k1v, p)
                k3a, k3v, _ = _hamiltonian(a_try + 0.5 * hs * k2a, v_try + 0.5 * hs * k2v, p)
                k4a, k4v, _ = _hamiltonian(a_try + hs * k3a, v_try + hs * k3v, p)
                a_try = a_try + hs * (k1a + 2.0 * k2a + 2.0 * k3a + k4a) / 6.0
                v_try = v_try + hs * (k1v + 2.0 * k2v + 2.0 * k3v + k4v) / 6.0
                a_try, v_try, ok = project(a_try, v_try, p, 1e-10, 8)
                if not ok:
                    break
            if ok:
                break
            sub *= 2
        if not ok:
            return a, v, FLOW_PROJECTION
        a = a_try
        v = v_try
        done += 1
    return a, v, FLOW_OK


@jit
def render_row(
    a0: complex,
    v0: complex,
    p: int,
    ts: np.ndarray,
    steps_per_unit: float,
    budget: int,
    out: np.ndarray,
) -> None:
    """Flow from the base point to every ``t`` in ``ts`` and store the escape time of ``-a`` (``-1`` bounded, ``-2`` failed)."""
    for i in range(ts.shape[0]):
        t = ts[i]
        steps = max(1, int(math.ceil(abs(t) * steps_per_unit)))
        a, v, status = flow_segment(a0, v0, p, t, steps)
        if status != FLOW_OK:
            out[i] = -2
        else:
            out[i] = escape_time(a, v, -a, budget)


@jit
def newton_v(a: complex, v: complex, p: int, max_iter: int) -> tuple[complex, bool]:
    """Newton's method for ``Phi_p(a, .) = 0`` at fixed ``a``."""
    scale = max(1.0, abs(v))
    dv = 0j
    for _ in range(max_iter):
        phi, _, pv = phi_partials(a, v, p)
        if pv == 0:
            return v, False
        dv = phi / pv
        v = v - dv
        if abs(dv) <= 1e-14 * scale:
            return v, True
    return v, abs(dv) <= 1e-10 * scale


@jit
def track(p: int, path: np.ndarray, v: complex) -> tuple[complex, bool]:
    """
    Continue the fiber point ``v`` over ``path[0]`` along the polygonal path ``path`` of ``a`` values.

    Each step predicts with the tangent ``dv/da = -dPhi/da / dPhi/dv`` and corrects with Newton. A step
    whose correction is not small against the predicted move is split in halves, at most ten times.
    """
    a = path[0]
    for k in range(1, path.shape[0]):
        target = path[k]
        pieces = 1
        while True:
            a_cur = a
            v_cur = v
            ok = True
            h = (target - a) / pieces
            for _ in range(pieces):
                _, pa, pv = phi_partials(a_cur, v_cur, p)
                if pv == 0:
                    ok = False
                    break
                v_pred = v_cur - h * pa / pv
                a_cur = a_cur + h
                v_new, converged = newton_v(a_cur, v_pred, p, 40)
                tol = 0.1 * abs(v_pred - v_cur) + 1e-12 * max(1.0, abs(v_new))
                if not converged or abs(v_new - v_pred) > tol:
                    ok = False
                    break
                v_cur = v_new
            if ok:
                break
            pieces *= 2
            if pieces > 1024:
                return v, False
        a = target
        v = v_cur
    return v, True
