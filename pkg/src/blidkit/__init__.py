"""Bounded, locally-identity maps and the verification workflows built on them.

A blid map ``H`` equals the identity near 0 and is globally bounded.  It
replaces bump functions in spaces without smooth bumps: composing a germ with
``H`` produces a global representative of the germ.
"""

from .bump import BumpFunction, PlaneBump
from .function_space import CqElement, FrechetMetric, GridInterval, SeminormFamily, SpaceKind

__version__ = "0.1.0"

__all__ = [
    "BumpFunction", "PlaneBump", "CqElement", "FrechetMetric", "GridInterval",
    "SeminormFamily", "SpaceKind", "__version__",
]
