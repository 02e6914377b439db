"""Building bodies with a prescribed set of facial dimensions.

``build_pattern`` realizes any strictly increasing sequence of positive
integers (d_1, ..., d_k) as a compact convex body in R^{d_k} whose faces
have exactly the dimensions {0, d_1, ..., d_k}: base cases up to dimension
two are a point, a segment, a disk and a triangle, a single entry d_k >= 3
is a ball, and longer sequences sum a unit ball with the zero-padded
realization of the truncated sequence.  ``catalog`` holds the fixed
low-dimensional fixtures used throughout the tests and demos.
"""

from __future__ import annotations

import numpy as np

from .bodies import Ball, ConvexBody, Embed, Sum, VPolytope


def validate_pattern(dims) -> tuple[int, ...]:
    """Check a facial dimension pattern: strictly increasing positive ints."""
    out = []
    for d in dims:
        i = int(d)
        if i != d:
            raise ValueError(f"pattern entries must be integers, got {d!r}")
        out.append(i)
    if any(d < 1 for d in out):
        raise ValueError(f"pattern entries must be >= 1, got {tuple(out)}")
    if any(b <= a for a, b in zip(out, out[1:])):
        raise ValueError(f"pattern must be strictly increasing, got {tuple(out)}")
    return tuple(out)


def build_pattern(dims) -> ConvexBody:
    """A body in R^{d_k} whose facial dimension set is exactly {0} | dims.

    The empty pattern is realized by a single point (in R^1, since every
    body in this algebra needs a positive ambient dimension).
    """
    d = validate_pattern(dims)
    if not d:
        return VPolytope([[0.0]])
    top = d[-1]
    if d == (1,):
        return VPolytope([[0.0], [1.0]])
    if d == (2,):
        return Ball(2, np.zeros(2), 1.0)
    if d == (1, 2):
        return VPolytope([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    if len(d) == 1:  # top >= 3
        return Ball(top, np.zeros(top), 1.0)
    inner = build_pattern(d[:-1])
    return Sum(Ball(top, np.zeros(top), 1.0), Embed(inner, top))


_CIRCLE_SIDES = 64


def _catalog_bodies() -> dict[str, ConvexBody]:
    theta = 2.0 * np.pi * np.arange(_CIRCLE_SIDES) / _CIRCLE_SIDES
    ring = np.column_stack([np.cos(theta), np.sin(theta), np.zeros_like(theta)])
    poles = np.array([[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]])
    return {
        "point": VPolytope([[0.0]]),
        "segment": VPolytope([[0.0], [1.0]]),
        "disk": Ball(2, np.zeros(2), 1.0),
        "triangle": VPolytope([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]),
        "ball3": Ball(3, np.zeros(3), 1.0),
        "tetrahedron": VPolytope(
            [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
        ),
        # polytopal stand-in for the hull of a circle and two points; its
        # smooth original has pattern (1, 3) but the 64-gon version is a
        # mesh/export fixture, not a pattern fixture
        "hull-circle-two-points": VPolytope(np.vstack([ring, poles])),
        "stadium2d": Sum(
            Ball(2, np.zeros(2), 1.0), VPolytope([[0.0, 0.0], [2.0, 0.0]])
        ),
        "square-plus-disk": Sum(
            Ball(2, np.zeros(2), 1.0),
            VPolytope([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]),
        ),
    }


CATALOG_NAMES = tuple(sorted(_catalog_bodies()))

# fixtures with a known exact facial dimension set (the 64-gon is excluded:
# it only approximates its smooth original)
CATALOG_PATTERNS: dict[str, tuple[int, ...]] = {
    "point": (0,),
    "segment": (0, 1),
    "disk": (0, 2),
    "triangle": (0, 1, 2),
    "ball3": (0, 3),
    "tetrahedron": (0, 1, 2, 3),
    "stadium2d": (0, 1, 2),
    "square-plus-disk": (0, 1, 2),
}


def catalog(name: str) -> ConvexBody:
    """A named fixture body; see CATALOG_NAMES for the options."""
    bodies = _catalog_bodies()
    if name not in bodies:
        raise ValueError(f"unknown catalog body {name!r}; options: {', '.join(CATALOG_NAMES)}")
    return bodies[name]
