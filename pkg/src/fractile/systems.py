"""Bundled example systems used by the test suite, docs, and CLI fixtures."""

from __future__ import annotations

import math

import numpy as np

from .geometry import Region
from .ifs import Contraction, IfsSystem

SQRT3 = math.sqrt(3.0)


def gasket() -> IfsSystem:
    """Three half-scale maps on the triangle (0,0), (1,0), (1/2, sqrt3/2)."""
    return IfsSystem(2, (
        Contraction.similitude_2d(0.5, translation=(0.0, 0.0)),
        Contraction.similitude_2d(0.5, translation=(0.5, 0.0)),
        Contraction.similitude_2d(0.5, translation=(0.25, SQRT3 / 4)),
    ), label="gasket")


def carpet() -> IfsSystem:
    """Eight third-scale maps on the unit square, center cell omitted."""
    cells = [(i, j) for j in range(3) for i in range(3) if (i, j) != (1, 1)]
    return IfsSystem(2, tuple(
        Contraction.similitude_2d(1 / 3, translation=(i / 3, j / 3))
        for i, j in cells), label="carpet")


def cantor() -> IfsSystem:
    """Middle-thirds set on [0, 1]."""
    return IfsSystem(1, (
        Contraction.similitude_1d(1 / 3, translation=0.0),
        Contraction.similitude_1d(1 / 3, translation=2 / 3),
    ), label="cantor")


def koch() -> IfsSystem:
    """Quarter maps of the classic curve from (0,0) to (1,0)."""
    return IfsSystem(2, (
        Contraction.similitude_2d(1 / 3, translation=(0.0, 0.0)),
        Contraction.similitude_2d(1 / 3, theta=math.pi / 3, translation=(1 / 3, 0.0)),
        Contraction.similitude_2d(1 / 3, theta=-math.pi / 3,
                                  translation=(0.5, SQRT3 / 6)),
        Contraction.similitude_2d(1 / 3, translation=(2 / 3, 0.0)),
    ), label="koch")


def line_system() -> IfsSystem:
    """Three maps on the line whose hull images overlap even though an open
    set made of two gaps is feasible: x/3, x/3 + 2/3, x/9 + 1/9."""
    return IfsSystem(1, (
        Contraction.similitude_1d(1 / 3, translation=0.0),
        Contraction.similitude_1d(1 / 3, translation=2 / 3),
        Contraction.similitude_1d(1 / 9, translation=1 / 9),
    ), label="line-system")


def line_system_open_set() -> Region:
    return Region.from_intervals([[0.0, 1 / 3], [2 / 3, 1.0]])


def rotation_system() -> IfsSystem:
    """Three maps of ratio 1/sqrt(3), each a clockwise quarter turn.  The
    attractor is a plane-filling rep-tile with fractal boundary (digit set
    {0, 1, 2w} over the Eisenstein integers, base i*sqrt(3)), so the images
    of its convex hull overlap while the interior of the attractor itself is
    a feasible open set."""
    r = 1.0 / SQRT3
    t = -math.pi / 2
    return IfsSystem(2, (
        Contraction.similitude_2d(r, theta=t, translation=(0.0, 0.0)),
        Contraction.similitude_2d(r, theta=t, translation=(0.0, -1 / SQRT3)),
        Contraction.similitude_2d(r, theta=t, translation=(1.0, 1 / SQRT3)),
    ), label="rotation-system")


def modified_gasket() -> IfsSystem:
    """Gasket on the centered triangle (-1/2,0), (1/2,0), (0, sqrt3/2) plus a
    fourth map (quarter scale, half turn) landing exactly in the largest hole
    of the first map's image."""
    return IfsSystem(2, (
        Contraction.similitude_2d(0.5, translation=(0.25, 0.0)),
        Contraction.similitude_2d(0.5, translation=(-0.25, 0.0)),
        Contraction.similitude_2d(0.5, translation=(0.0, SQRT3 / 4)),
        Contraction.similitude_2d(0.25, theta=math.pi,
                                  translation=(0.25, SQRT3 / 8)),
    ), label="modified-gasket")


def square_system() -> IfsSystem:
    """Four half-scale corner maps: the attractor is the full unit square."""
    return IfsSystem(2, (
        Contraction.similitude_2d(0.5, translation=(0.0, 0.0)),
        Contraction.similitude_2d(0.5, translation=(0.5, 0.0)),
        Contraction.similitude_2d(0.5, translation=(0.0, 0.5)),
        Contraction.similitude_2d(0.5, translation=(0.5, 0.5)),
    ), label="square")


BUILTIN = {
    "gasket": gasket,
    "carpet": carpet,
    "cantor": cantor,
    "koch": koch,
    "line-system": line_system,
    "rotation-system": rotation_system,
    "modified-gasket": modified_gasket,
    "square": square_system,
}
