"""Contractive function systems: maps, words, attractor approximation.

Systems live in dimension 1 or 2.  Each map is either a similitude
(ratio, orthogonal part, translation) or a general affine contraction;
similitude-only operations (Moran dimension, zeta functions) reject affine
systems while the geometric operations work for both.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import QhullError, ConvexHull

from .errors import (BudgetExceededError, FractileError, GeometryError,
                     UnsupportedSystemError)
from .geometry import PointCloud, Region

SIMILITUDE = "similitude"
AFFINE = "affine"


class ConvergenceError(FractileError):
    """Iteration failed to reach its stopping bound; carries the last iterate."""

    def __init__(self, message: str, last=None):
        self.last = last
        super().__init__(message)


@dataclass(frozen=True, eq=False)
class Contraction:
    """Affine contraction x -> linear @ x + offset.

    For similitudes ``linear`` equals ratio times an orthogonal matrix and
    ``ratio`` is set; general affine maps carry ``ratio=None`` and must have
    all singular values strictly inside (0, 1).
    """

    kind: str
    linear: np.ndarray
    offset: np.ndarray
    ratio: float | None = None

    def __post_init__(self):
        lin = np.atleast_2d(np.asarray(self.linear, dtype=float))
        off = np.asarray(self.offset, dtype=float).reshape(-1)
        object.__setattr__(self, "linear", lin)
        object.__setattr__(self, "offset", off)
        d = lin.shape[0]
        if lin.shape != (d, d) or off.shape != (d,) or d not in (1, 2):
            raise GeometryError("contraction must be 1x1 or 2x2 with matching offset")
        if self.kind == SIMILITUDE:
            r = self.ratio
            if r is None or not (0.0 < r < 1.0):
                raise GeometryError(f"similitude ratio {r!r} outside (0,1)")
            # linear part must be ratio times an orthogonal matrix
            err = np.abs(lin @ lin.T - (r * r) * np.eye(d)).max()
            if err > 1e-9 * max(r * r, 1.0):
                raise GeometryError("similitude linear part is not r*orthogonal")
        elif self.kind == AFFINE:
            sv = np.linalg.svd(lin, compute_uv=False)
            if sv.max() >= 1.0 or sv.min() <= 0.0:
                raise GeometryError(
                    f"affine map not strictly contractive (singular values {sv})")
        else:
            raise GeometryError(f"unknown contraction kind {self.kind!r}")

    # -- constructors --------------------------------------------------

    @classmethod
    def similitude_2d(cls, r: float, theta: float = 0.0, reflect: bool = False,
                      translation=(0.0, 0.0)) -> "Contraction":
        c, s = math.cos(theta), math.sin(theta)
        rot = np.array([[c, -s], [s, c]])
        if reflect:
            rot = rot @ np.array([[1.0, 0.0], [0.0, -1.0]])
        return cls(SIMILITUDE, r * rot, np.asarray(translation, dtype=float), r)

    @classmethod
    def similitude_1d(cls, r: float, sign: int = 1, translation: float = 0.0) -> "Contraction":
        if sign not in (1, -1):
            raise GeometryError("sign flag must be +1 or -1")
        return cls(SIMILITUDE, np.array([[sign * r]]), np.array([translation]), r)

    @classmethod
    def affine_map(cls, matrix, translation) -> "Contraction":
        return cls(AFFINE, np.asarray(matrix, dtype=float),
                   np.asarray(translation, dtype=float))

    # -- behaviour -------------------------------------------------------

    @property
    def dim(self) -> int:
        return self.linear.shape[0]

    @property
    def contraction_factor(self) -> float:
        if self.ratio is not None:
            return self.ratio
        return float(np.linalg.svd(self.linear, compute_uv=False).max())

    @property
    def abs_det(self) -> float:
        return abs(float(np.linalg.det(self.linear)))

    def apply(self, points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        single = pts.ndim == 1
        pts = pts.reshape(-1, self.dim)
        out = pts @ self.linear.T + self.offset
        return out[0] if single else out

    def compose_with(self, other: "Contraction") -> "Contraction":
        """self after other: x -> self(other(x))."""
        if self.dim != other.dim:
            raise GeometryError("mixed dimensions")
        lin = self.linear @ other.linear
        off = self.linear @ other.offset + self.offset
        if self.kind == SIMILITUDE and other.kind == SIMILITUDE:
            return Contraction(SIMILITUDE, lin, off, self.ratio * other.ratio)
        return Contraction(AFFINE, lin, off)

    def fixed_point(self) -> np.ndarray:
        d = self.dim
        return np.linalg.solve(np.eye(d) - self.linear, self.offset)

    def transform_region(self, region: Region) -> Region:
        return region.transform(self.linear, self.offset)


def identity_map(dim: int) -> Contraction:
    """Identity composite of the empty word.  Not itself a contraction, so it
    bypasses the constructor checks on purpose."""
    obj = object.__new__(Contraction)
    object.__setattr__(obj, "kind", SIMILITUDE)
    object.__setattr__(obj, "linear", np.eye(dim))
    object.__setattr__(obj, "offset", np.zeros(dim))
    object.__setattr__(obj, "ratio", 1.0)
    return obj


@dataclass(frozen=True)
class Word:
    """Finite index sequence over {1..N} (1-based); empty word allowed."""

    indices: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "indices", tuple(int(i) for i in self.indices))

    @classmethod
    def parse(cls, text: str) -> "Word":
        text = text.strip()
        if not text:
            return cls(())
        if all(ch.isdigit() for ch in text):
            return cls(tuple(int(ch) for ch in text))
        return cls(tuple(int(tok) for tok in text.replace(",", " ").split()))

    def __len__(self) -> int:
        return len(self.indices)

    def __str__(self) -> str:
        return "".join(str(i) for i in self.indices) if self.indices else "-"

    def concat(self, other: "Word") -> "Word":
        return Word(self.indices + other.indices)


@dataclass(frozen=True, eq=False)
class IfsSystem:
    """Ordered list of contractions sharing one ambient dimension."""

    dim: int
    maps: tuple[Contraction, ...]
    label: str = ""
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "maps", tuple(self.maps))
        if len(self.maps) < 2:
            raise GeometryError("a system needs at least two maps")
        if self.dim not in (1, 2) or any(m.dim != self.dim for m in self.maps):
            raise GeometryError("all maps must share the declared dimension 1 or 2")

    @property
    def n_maps(self) -> int:
        return len(self.maps)

    @property
    def is_similitude(self) -> bool:
        return all(m.kind == SIMILITUDE for m in self.maps)

    @property
    def ratios(self) -> tuple[float, ...]:
        if not self.is_similitude:
            raise UnsupportedSystemError("ratios undefined for affine maps")
        return tuple(m.ratio for m in self.maps)

    @property
    def r_max(self) -> float:
        return max(m.contraction_factor for m in self.maps)

    @property
    def r_min(self) -> float:
        return min(m.contraction_factor for m in self.maps)

    def map_region(self, region: Region) -> Region:
        from .geometry import union_all
        return union_all([m.transform_region(region) for m in self.maps])


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def compose(system: IfsSystem, word: Word) -> Contraction:
    """Composite map of a word, left to right; empty word gives the identity."""
    for i in word.indices:
        if not (1 <= i <= system.n_maps):
            raise GeometryError(f"word index {i} out of range 1..{system.n_maps}")
    out = identity_map(system.dim)
    for i in word.indices:
        out = out.compose_with(system.maps[i - 1])
    return out


def word_ratio(system: IfsSystem, word: Word) -> float:
    """Product of the scaling ratios along the word."""
    r = 1.0
    for i in word.indices:
        m = system.maps[i - 1]
        if m.ratio is None:
            raise UnsupportedSystemError("ratio product undefined for affine maps")
        r *= m.ratio
    return r


def attractor_points(system: IfsSystem, depth: int, seed=None,
                     budget: int = 4_000_000) -> PointCloud:
    """All depth-fold images of the seed, one per word of that length,
    in word-lexicographic order.  err is the Hausdorff bound
    r_max^depth * diam(hull estimate)."""
    if depth < 0:
        raise GeometryError("depth must be >= 0")
    if system.n_maps ** depth > budget:
        raise BudgetExceededError(
            f"{system.n_maps}^{depth} points exceed budget {budget}")
    if seed is None:
        seed = system.maps[0].fixed_point()
    pts = np.asarray(seed, dtype=float).reshape(1, system.dim)
    if not np.isfinite(pts).all():
        raise GeometryError("seed must be finite")
    for _ in range(depth):
        pts = np.vstack([m.apply(pts) for m in system.maps])
    diam = attractor_hull(system).diameter()
    return PointCloud(pts, err=system.r_max ** depth * diam)


def attractor_cloud(system: IfsSystem, err: float,
                    budget: int = 4_000_000) -> PointCloud:
    """Cloud at the shallowest depth whose guaranteed error is <= err."""
    diam = attractor_hull(system).diameter()
    if diam == 0:
        return attractor_points(system, 0)
    depth = 0
    while system.r_max ** depth * diam > err:
        depth += 1
        if system.n_maps ** depth > budget:
            depth -= 1
            break
    return attractor_points(system, depth, budget=budget)


def attractor_hull(system: IfsSystem, tol: float = 1e-12,
                   max_iter: int = 500) -> Region:
    """Convex hull of the attractor, within Hausdorff distance tol.

    Monotone iteration from below: the hull of the fixed points is grown by
    hull(union of map images) until the per-step change drops under the
    geometric-series stopping bound tol*(1-r_max)/r_max.
    """
    key = ("hull", tol)
    if key in system._cache:
        return system._cache[key]
    rmax = system.r_max
    stop = tol * (1.0 - rmax) / rmax
    verts = np.vstack([m.fixed_point() for m in system.maps])
    if system.dim == 1:
        lo, hi = float(verts.min()), float(verts.max())
        for _ in range(max_iter):
            ends = np.array([[m.apply(np.array([lo]))[0], m.apply(np.array([hi]))[0]]
                             for m in system.maps])
            nlo, nhi = min(lo, float(ends.min())), max(hi, float(ends.max()))
            delta = max(lo - nlo, nhi - hi)
            lo, hi = nlo, nhi
            if delta < stop:
                region = Region(1, intervals=[[lo, hi]])
                system._cache[key] = region
                return region
        raise ConvergenceError("hull iteration did not converge",
                               last=Region(1, intervals=[[lo, hi]]))
    import shapely
    from shapely.geometry import Polygon
    # fixed points may be collinear (e.g. pure-rotation systems); enrich the
    # seed with map images (still attractor points) until it spans the plane
    for _ in range(12):
        try:
            verts = _hull_prune(verts)
            break
        except GeometryError:
            verts = np.vstack([verts] + [m.apply(verts) for m in system.maps])
    else:
        raise GeometryError(
            "degenerate hull: the attractor appears lower-dimensional than "
            "the declared ambient dimension")
    poly = None
    for _ in range(max_iter):
        images = np.vstack([m.apply(verts) for m in system.maps])
        new_verts = _hull_prune(np.vstack([verts, images]))
        new_poly = Polygon(new_verts)
        if poly is not None:
            delta = float(np.max(shapely.distance(shapely.points(new_verts), poly)))
            if delta < stop:
                region = Region(2, geom=new_poly)
                system._cache[key] = region
                return region
        verts, poly = new_verts, new_poly
    raise ConvergenceError("hull iteration did not converge",
                           last=Region(2, geom=poly))


def _hull_prune(points: np.ndarray) -> np.ndarray:
    try:
        hull = ConvexHull(points)
    except QhullError as exc:
        raise GeometryError(
            "degenerate hull: the attractor appears lower-dimensional than the "
            "declared ambient dimension") from exc
    return points[hull.vertices]


def similarity_dimension(system: IfsSystem, tol: float = 1e-13) -> float:
    """Unique s >= 0 with sum r_j^s = 1, by bisection plus Newton polish.
    The map s -> sum r_j^s is strictly decreasing, so the root is unique."""
    rs = np.asarray(system.ratios)

    def f(s: float) -> float:
        return float(np.sum(rs ** s)) - 1.0

    lo, hi = 0.0, 1.0
    while f(hi) > 0:
        hi *= 2.0
        if hi > 1e6:
            raise FractileError("Moran bisection failed to bracket")
    for _ in range(200):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if f(mid) > 0:
            lo = mid
        else:
            hi = mid
    s = 0.5 * (lo + hi)
    for _ in range(4):  # polish the residual well below the bisection width
        fs = f(s)
        dfs = float(np.sum(rs ** s * np.log(rs)))
        if dfs == 0:
            break
        step = fs / dfs
        s -= step
        if abs(step) < 1e-16:
            break
    return s


def words_with_ratio_above(system: IfsSystem, threshold: float,
                           budget: int = 20_000_000):
    """Yield (indices, r_w) for every word with r_w > threshold, in
    depth-first lexicographic order.  Requires a similitude system."""
    if not system.is_similitude:
        raise UnsupportedSystemError("word enumeration by ratio needs similitudes")
    rs = system.ratios
    n = system.n_maps
    count = 0
    stack: list[tuple[tuple[int, ...], float]] = [((), 1.0)]
    while stack:
        indices, r = stack.pop()
        if r <= threshold:
            continue
        count += 1
        if count > budget:
            raise BudgetExceededError(f"word enumeration exceeded {budget}")
        yield indices, r
        for j in range(n, 0, -1):  # reversed so the stack pops lexicographically
            stack.append((indices + (j,), r * rs[j - 1]))
