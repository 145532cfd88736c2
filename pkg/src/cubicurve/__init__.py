"""cubicurve computes the escape regions of the cubic parameter curves S_p from their Puiseux series."""

from importlib.metadata import PackageNotFoundError, version

from .dynamics import CubicMap, classify, enumerate_regions
from .grid import MarkedGrid, RegionDescriptor, describe_region, validate_rules
from .series import Monomial, PuiseuxSeries
from .solver import KneadingSequence, SolutionVector, all_solutions, solutions_for_kneading

try:
    __version__ = version("cubicurve")
except PackageNotFoundError:
    # package is not installed
    __version__ = "0.0.0"
