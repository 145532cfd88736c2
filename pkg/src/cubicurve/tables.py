"""Reproduction of the reference tables: primitive orbits, nontrivial kneading invariants, quadratic centers and Euler data."""

from __future__ import annotations

import logging
from collections.abc import Callable
from fractions import Fraction
from typing import Any

from cubicurve.errors import LevelAmbiguous
from cubicurve.geometry import degree, euler_affine, euler_compact, genus_if_connected, t_leading
from cubicurve.grid import RegionDescriptor, describe_region, orbit_pseudometric
from cubicurve.quadratic import centers
from cubicurve.series import Monomial
from cubicurve.solver import (
    DEFAULT_TRUNC,
    SolutionVector,
    all_kneadings,
    all_solutions,
    primitive_solutions,
    solutions_for_kneading,
)

logger = logging.getLogger("cubicurve")

VARIANT_LABELS = "stuvw"


def _exact(x: Fraction) -> int | float:
    return int(x) if x.denominator == 1 else float(x)


def _leading_terms(s: SolutionVector, j: int, count: int = 2) -> list[list[Any]]:
    w = s.series(j)
    tol = s.tolerance()
    items = sorted((k, c) for k, c in w.terms().items() if abs(c) > tol)
    return [Monomial(c, Fraction(k, w.mu)).to_json() for k, c in items[:count]]


def _variant_key(region: RegionDescriptor) -> tuple[Fraction, ...]:
    try:
        matrix = orbit_pseudometric(region)
    except LevelAmbiguous:
        return ()
    return tuple(-d for row in matrix for d in row)


def _grouped(kneading_regions: list[RegionDescriptor]) -> list[tuple[str, list[RegionDescriptor]]]:
    # regions sharing a kneading sequence are told apart by the pseudometric of their orbits
    groups: dict[tuple[Fraction, ...], list[RegionDescriptor]] = {}
    for region in kneading_regions:
        groups.setdefault(_variant_key(region), []).append(region)
    keys = sorted(groups)
    out = []
    for i, key in enumerate(keys):
        label = str(kneading_regions[0].kneading)
        if len(keys) > 1:
            label += VARIANT_LABELS[i]
        out.append((label, groups[key]))
    return out


def primitive_table(max_p: int = 4, trunc: int = DEFAULT_TRUNC) -> list[dict[str, Any]]:
    """Leading two terms of every ``u_j`` for the primitive regions of periods 2 through ``max_p``."""
    rows = []
    for p in range(2, max_p + 1):
        for kneading in all_kneadings(p):
            regions = [describe_region(s) for s in primitive_solutions(kneading, trunc)]
            if not regions:
                continue
            for label, members in _grouped(regions):
                s = members[0].series
                rows.append(
                    {
                        "kneading": label,
                        "p": p,
                        "u": [_leading_terms(s, j) for j in range(1, p)],
                        "count": len(members),
                        "mu": members[0].mu,
                    }
                )
    return rows


def nontrivial_table(max_p: int = 4, trunc: int = DEFAULT_TRUNC) -> list[dict[str, Any]]:
    """Leading monomials, ``t`` asymptotics, winding numbers and symmetries of regions with nontrivial kneading."""
    rows = []
    for p in range(2, max_p + 1):
        for kneading in all_kneadings(p):
            if kneading.is_trivial:
                continue
            regions = [describe_region(s) for s in solutions_for_kneading(kneading, trunc)]
            for label, members in _grouped(regions):
                head = members[0]
                lead = t_leading(head)
                rows.append(
                    {
                        "kneading": label,
                        "p": p,
                        "m": [m.to_json() for m in head.monomials],
                        "t": Monomial(lead.coeff, lead.exp).to_json(),
                        "nu": head.nu,
                        "mu": head.mu,
                        "count": len(members),
                        "sym": head.sym,
                    }
                )
    return rows


def quadratic_table(max_r: int = 4) -> list[dict[str, Any]]:
    """The named centers of period at most ``max_r`` with the limit ``psi`` of ``a/t``."""
    rows = []
    for r in range(1, max_r + 1):
        for center in centers(r):
            # one row per conjugate pair, the member in the upper half-plane
            if center.nickname is None or center.c.imag < -1e-12:
                continue
            psi = center.psi()
            rows.append(
                {
                    "name": center.nickname,
                    "r": r,
                    "c": [center.c.real, center.c.imag],
                    "psi": [psi.real, psi.imag],
                }
            )
    return rows


def euler_row(p: int, ideal_points: int | None = None, trunc: int = DEFAULT_TRUNC) -> dict[str, Any]:
    """
    Degree and Euler characteristics of ``S_p``.

    The number of ideal points ``N_p`` is counted from the solved series unless given.
    """
    n = ideal_points if ideal_points is not None else len(all_solutions(p, trunc))
    chi = euler_compact(p, n)
    genus, caveat = genus_if_connected(chi)
    return {
        "p": p,
        "d": degree(p),
        "chi_affine": euler_affine(p),
        "N": n,
        "chi_compact": chi,
        "genus_if_connected": _exact(genus),
        "caveat": caveat,
    }


def euler_table(max_p: int = 4, trunc: int = DEFAULT_TRUNC) -> list[dict[str, Any]]:
    return [euler_row(p, trunc=trunc) for p in range(1, max_p + 1)]


TABLES: dict[str, Callable[..., list[dict[str, Any]]]] = {
    "primitive": primitive_table,
    "nontrivial": nontrivial_table,
    "quadratic": lambda max_p=4, trunc=DEFAULT_TRUNC: quadratic_table(max_p),
    "euler": euler_table,
}


def reproduce(which: str, max_p: int = 4, trunc: int = DEFAULT_TRUNC) -> list[dict[str, Any]]:
    """Rows of one table by name."""
    try:
        build = TABLES[which]
    except KeyError:
        raise ValueError(f"unknown table {which!r} (hint: choose from {sorted(TABLES)})") from None
    logger.info(f"Reproducing the {which} table up to period {max_p}")
    return build(max_p=max_p, trunc=trunc)
