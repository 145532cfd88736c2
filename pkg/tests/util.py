import random
from collections.abc import Iterable

from cubicurve.dynamics import fiber_roots
from cubicurve.geometry import CurvePoint
from cubicurve.grid import RegionDescriptor


def pick(regions: Iterable[RegionDescriptor], kneading: str) -> list[RegionDescriptor]:
    """The regions with the given kneading sequence."""
    return [r for r in regions if str(r.kneading) == kneading]


def counts_by_kneading(regions: Iterable[RegionDescriptor]) -> dict[str, int]:
    out: dict[str, int] = {}
    for r in regions:
        out[str(r.kneading)] = out.get(str(r.kneading), 0) + 1
    return out


class RandomCurvePoints:
    """Draws points of ``S_p`` over random values of ``a`` in an annulus."""

    def __init__(self, p: int, r_min: float = 4.0, r_max: float = 12.0, seed: int = 0):
        self.p = p
        self.r_min = r_min
        self.r_max = r_max
        self.rng = random.Random(seed)

    def make(self) -> CurvePoint:
        radius = self.rng.uniform(self.r_min, self.r_max)
        a = complex(radius * self.rng.uniform(0.6, 1.0), radius * self.rng.uniform(-0.4, 0.4))
        roots = fiber_roots(self.p, a)
        return CurvePoint(a, complex(self.rng.choice(list(roots))), self.p)

    def sample(self, n: int) -> list[CurvePoint]:
        return [self.make() for _ in range(n)]
