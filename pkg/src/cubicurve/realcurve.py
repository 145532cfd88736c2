"""
Components of the real and pure-imaginary loci of ``S_p`` through piecewise linear bimodal models.

A model is a cyclic permutation ``f`` of the positions ``0 < 1 < ... < p-1`` of the marked orbit on the
line, extended piecewise linearly with outer slope ``> 1`` (orientation ``+``, real maps) or ``< -1``
(orientation ``-``, pure-imaginary maps). The extension must have exactly one local maximum and one local
minimum, both on the orbit; one of them is the marked critical point. Each model corresponds to one
component of the locus, a path between two ideal points whose kneading sequences differ in one entry.
"""

from __future__ import annotations

import itertools
import logging
import re
from collections.abc import Iterable
from dataclasses import dataclass

from cubicurve.solver import KneadingSequence

logger = logging.getLogger("cubicurve")

STAR = "★"
ORIENTATIONS = ("+", "-")


def _slope_signs(perm: tuple[int, ...], orientation: str) -> list[int]:
    outer = 1 if orientation == "+" else -1
    inner = [1 if perm[i + 1] > perm[i] else -1 for i in range(len(perm) - 1)]
    return [outer, *inner, outer]


def turning_points(perm: tuple[int, ...], orientation: str) -> list[int]:
    """Positions where the piecewise linear extension changes direction."""
    signs = _slope_signs(perm, orientation)
    return [i for i in range(len(perm)) if signs[i] != signs[i + 1]]


def _is_cyclic(perm: tuple[int, ...]) -> bool:
    seen, k = set(), 0
    for _ in perm:
        seen.add(k)
        k = perm[k]
    return k == 0 and len(seen) == len(perm)


@dataclass(frozen=True, order=True)
class BimodalModel:
    """
    A piecewise linear model of a real (``+``) or pure-imaginary (``-``) center of period ``p``.

    Parameters
    ----------
    p: int
        The period.
    perm: tuple[int, ...]
        ``f(0), ..., f(p-1)``, a single ``p``-cycle.
    orientation: str
        ``"+"`` or ``"-"``, the sign of the outer slopes.
    marked: int | None
        Position of the marked critical point among the two turning points, or ``None`` for the
        components of Type A, where both critical points share a Fatou component (only ``p <= 2``).
    """

    p: int
    perm: tuple[int, ...]
    orientation: str
    marked: int | None

    def __post_init__(self) -> None:
        object.__setattr__(self, "perm", tuple(self.perm))
        if self.orientation not in ORIENTATIONS:
            raise ValueError(f"orientation must be '+' or '-', got {self.orientation!r}")
        if sorted(self.perm) != list(range(self.p)) or not _is_cyclic(self.perm):
            raise ValueError(f"{self.perm} is not a cyclic permutation of 0..{self.p - 1}")
        turns = turning_points(self.perm, self.orientation)
        if self.marked is None:
            if self.p > 2 or turns:
                raise ValueError(f"{self.perm} ({self.orientation}) is not a Type A model")
            return
        if len(turns) != 2:
            raise ValueError(f"{self.perm} ({self.orientation}) is not bimodal: turning points {turns}")
        if self.marked not in turns:
            raise ValueError(f"the marked point {self.marked} is not a turning point of {self.perm}")

    @property
    def kind(self) -> str:
        return "A" if self.marked is None else "B"

    @property
    def free(self) -> int | None:
        """Position of the free critical point."""
        if self.marked is None:
            return None
        return next(t for t in turning_points(self.perm, self.orientation) if t != self.marked)

    def orbit(self) -> list[int]:
        """Positions of ``a_0, a_1, ..., a_{p-1}``."""
        k = 0 if self.marked is None else self.marked
        out = []
        for _ in range(self.p):
            out.append(k)
            k = self.perm[k]
        return out

    def involution(self) -> BimodalModel:
        """The model of the dual map, ``z -> -z`` reversing the line."""
        q = self.p - 1
        perm = tuple(q - self.perm[q - i] for i in range(self.p))
        marked = None if self.marked is None else q - self.marked
        return BimodalModel(self.p, perm, self.orientation, marked)

    def canonical(self) -> BimodalModel:
        """The smaller of the model and its dual."""
        return min(self, self.involution())

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "perm": list(self.perm),
            "orientation": self.orientation,
            "marked": self.marked,
            "type": self.kind,
            "star_kneading": star_kneading(self),
        }


def _cycles(p: int) -> Iterable[tuple[int, ...]]:
    for rest in itertools.permutations(range(1, p)):
        cycle = (0, *rest)
        perm = [0] * p
        for i, k in enumerate(cycle):
            perm[k] = cycle[(i + 1) % p]
        yield tuple(perm)


def enumerate_components(p: int, orientation: str = "both", mod_involution: bool = False) -> list[BimodalModel]:
    """
    All models of period ``p``, one per component of the real or pure-imaginary locus.

    Parameters
    ----------
    p: int
        The period.
    orientation: str
        ``"+"``, ``"-"`` or ``"both"``.
    mod_involution: bool
        Count components up to the canonical involution, keeping one model per dual pair.

    Returns
    -------
    list[BimodalModel]
        The models, sorted.
    """
    if p < 1:
        raise ValueError(f"period must be positive, got {p}")
    if orientation not in (*ORIENTATIONS, "both"):
        raise ValueError(f"orientation must be '+', '-' or 'both', got {orientation!r}")
    wanted = ORIENTATIONS if orientation == "both" else (orientation,)
    models: set[BimodalModel] = set()
    for sign in wanted:
        if p == 1:
            models.add(BimodalModel(1, (0,), sign, None))
            continue
        for perm in _cycles(p):
            turns = turning_points(perm, sign)
            if not turns and p == 2:
                models.add(BimodalModel(p, perm, sign, None))
            elif len(turns) == 2:
                models.update(BimodalModel(p, perm, sign, t) for t in turns)
    if mod_involution:
        models = {m.canonical() for m in models}
    out = sorted(models)
    logger.debug(f"Period {p}, orientation {orientation}: {len(out)} component(s)")
    return out


def star_kneading(model: BimodalModel) -> str:
    """
    Addresses of ``a_1, ..., a_p``: ``0`` on the side of the free critical point that holds the marked
    one, ``1`` on the other side, and a single ``★`` for the free critical point itself.
    """
    if model.p == 1:
        return "0"
    if model.marked is None:
        return STAR + "0"
    free = model.free
    side = model.marked < free
    out = []
    for k in model.orbit()[1:] + [model.marked]:
        if k == free:
            out.append(STAR)
        else:
            out.append("0" if (k < free) == side else "1")
    return "".join(out)


def resolve_star(sequence: str) -> tuple[str, str]:
    """The two kneading sequences obtained by replacing ``★`` with ``0`` and with ``1``."""
    if sequence.count(STAR) > 1:
        raise ValueError(f"at most one {STAR} allowed, got {sequence!r}")
    zero, one = sequence.replace(STAR, "0"), sequence.replace(STAR, "1")
    for s in (zero, one):
        KneadingSequence.parse(s)
    return zero, one


def component_graph(models: Iterable[BimodalModel]) -> list[tuple[frozenset[str], int]]:
    """
    Connected pieces of the graph with endpoint kneadings as vertices and components as edges.

    Returns
    -------
    list[tuple[frozenset[str], int]]
        Vertex set and edge count of each piece, smallest piece first.
    """
    parent: dict[str, str] = {}

    def find(x: str) -> str:
        parent.setdefault(x, x)
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    edges: list[tuple[str, str]] = []
    for m in models:
        x, y = resolve_star(star_kneading(m))
        edges.append((x, y))
        parent[find(x)] = find(y)
    pieces: dict[str, tuple[set[str], int]] = {}
    for x, y in edges:
        vertices, count = pieces.get(find(x), (set(), 0))
        vertices.update((x, y))
        pieces[find(x)] = (vertices, count + 1)
    return sorted(((frozenset(v), n) for v, n in pieces.values()), key=lambda item: (item[1], sorted(item[0])))


def model_from_ordering(order: str, orientation: str = "+") -> BimodalModel:
    """
    Build a model from the left-to-right order of the marked orbit, such as ``"a1<a2=â0<a4<a0<a3"``.

    Annotations after ``=`` are ignored. ``a0`` is the marked critical point.
    """
    names = [part.split("=")[0].strip() for part in order.split("<")]
    indices = []
    for name in names:
        match = re.fullmatch(r"a(\d+)", name)
        if match is None:
            raise ValueError(f"cannot parse orbit point {name!r} in {order!r}")
        indices.append(int(match.group(1)))
    p = len(indices)
    if sorted(indices) != list(range(p)):
        raise ValueError(f"{order!r} must list each of a0..a{p - 1} once")
    position = {j: pos for pos, j in enumerate(indices)}
    perm = [0] * p
    for j in range(p):
        perm[position[j]] = position[(j + 1) % p]
    return BimodalModel(p, tuple(perm), orientation, position[0])
