"""Region algebra for ambient dimension 1 and 2.

Regions are closed sets with piecewise-linear boundary: a union of disjoint
polygons-with-holes (d=2, backed by shapely/GEOS) or a union of disjoint
closed intervals (d=1, a dedicated exact backend).  Every boolean operation
returns the closed regularization of the pointwise result: the closure of
the interior, with measure-zero slivers stripped.

The grid oracle at the bottom of the module is the package's independent
numerical route to parallel-set volumes; it counts cell centers against a
Euclidean distance transform and quantifies its own error from the count of
cells in the undecidable band.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import shapely
import shapely.affinity
from scipy import ndimage
from scipy.optimize import linprog
from scipy.spatial import cKDTree
from shapely.geometry import MultiPolygon, Polygon
from shapely.geometry.polygon import orient

from .errors import BudgetExceededError, GeometryError

_GAP_EPS = 1e-12  # d=1 intervals closer than this are merged

# notes about silently dropped degenerate pieces end up here (bounded length)
_OP_LOG: list[str] = []
_OP_LOG_CAP = 200


def _log(note: str) -> None:
    if len(_OP_LOG) < _OP_LOG_CAP:
        _OP_LOG.append(note)


def operation_log() -> list[str]:
    """Notes recorded by regularization (dropped slivers etc.)."""
    return list(_OP_LOG)


def clear_operation_log() -> None:
    _OP_LOG.clear()


@dataclass(frozen=True)
class Tolerance:
    """Explicit tolerances carried by every set predicate."""

    coord_eps: float = 1e-9
    area_eps: float = 1e-10
    sample_step: float = 1e-3

    def __post_init__(self):
        if min(self.coord_eps, self.area_eps, self.sample_step) <= 0:
            raise ValueError("tolerances must be strictly positive")


DEFAULT_TOL = Tolerance()


@dataclass(frozen=True)
class PointCloud:
    """Finite point set with a guaranteed Hausdorff-distance bound ``err``
    to the (typically fractal) set it approximates."""

    points: np.ndarray  # (n, d)
    err: float = 0.0

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        object.__setattr__(self, "points", pts)
        if not np.isfinite(pts).all():
            raise GeometryError("point cloud contains non-finite coordinates")

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return len(self.points)


# ---------------------------------------------------------------------------
# interval backend (d=1)
# ---------------------------------------------------------------------------

def _iv_normalize(iv: np.ndarray, area_eps: float) -> np.ndarray:
    """Sort, merge near-touching intervals, drop slivers."""
    if iv.size == 0:
        return np.zeros((0, 2))
    iv = iv[np.argsort(iv[:, 0])]
    out: list[list[float]] = []
    for lo, hi in iv:
        if hi - lo <= _GAP_EPS:
            continue
        if out and lo <= out[-1][1] + _GAP_EPS:
            out[-1][1] = max(out[-1][1], hi)
        else:
            out.append([lo, hi])
    kept = [p for p in out if p[1] - p[0] > area_eps]
    if len(kept) != len(out):
        _log(f"dropped {len(out) - len(kept)} interval sliver(s) below area_eps")
    return np.array(kept, dtype=float).reshape(-1, 2)


def _iv_complement_within(iv: np.ndarray, lo: float, hi: float) -> np.ndarray:
    out = []
    cur = lo
    for a, b in iv:
        a, b = max(a, lo), min(b, hi)
        if a > cur:
            out.append([cur, a])
        cur = max(cur, b)
    if cur < hi:
        out.append([cur, hi])
    return np.array(out, dtype=float).reshape(-1, 2)


def _iv_intersect(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = []
    i = j = 0
    while i < len(a) and j < len(b):
        lo = max(a[i, 0], b[j, 0])
        hi = min(a[i, 1], b[j, 1])
        if hi > lo:
            out.append([lo, hi])
        if a[i, 1] < b[j, 1]:
            i += 1
        else:
            j += 1
    return np.array(out, dtype=float).reshape(-1, 2)


# ---------------------------------------------------------------------------
# Region
# ---------------------------------------------------------------------------

def _collect_polys(geom) -> list[Polygon]:
    if geom.is_empty:
        return []
    t = geom.geom_type
    if t == "Polygon":
        return [geom]
    if t in ("MultiPolygon", "GeometryCollection"):
        out: list[Polygon] = []
        for g in geom.geoms:
            out.extend(_collect_polys(g))
        return out
    return []  # points/lines are measure zero


def _regularize_geom(geom, area_eps: float) -> MultiPolygon:
    if geom is None or geom.is_empty:
        return MultiPolygon([])
    if not geom.is_valid:
        geom = shapely.make_valid(geom)
    polys = _collect_polys(geom)
    if not polys:
        return MultiPolygon([])
    merged = shapely.unary_union(polys)
    faces: list[Polygon] = []
    dropped = 0
    for poly in _collect_polys(merged):
        if poly.area <= area_eps:
            dropped += 1
            continue
        holes = []
        for ring in poly.interiors:
            if Polygon(ring).area > area_eps:
                holes.append(ring)
            else:
                dropped += 1
        faces.append(Polygon(poly.exterior, holes))
    if dropped:
        _log(f"dropped {dropped} degenerate ring(s) below area_eps")
    return MultiPolygon(faces)


class Region:
    """Closed region with piecewise-linear boundary in dimension 1 or 2.

    Instances are immutable; all operations return new regions.  The d=2
    payload is a shapely MultiPolygon kept in regularized form.
    """

    __slots__ = ("dim", "_geom", "_iv")

    def __init__(self, dim: int, *, geom=None, intervals=None,
                 area_eps: float = DEFAULT_TOL.area_eps, _raw: bool = False):
        if dim not in (1, 2):
            raise GeometryError(f"unsupported dimension {dim}")
        self.dim = dim
        if dim == 2:
            self._iv = None
            self._geom = geom if _raw else _regularize_geom(
                geom if geom is not None else MultiPolygon([]), area_eps)
        else:
            self._geom = None
            iv = np.asarray(intervals if intervals is not None else [],
                            dtype=float).reshape(-1, 2)
            self._iv = iv if _raw else _iv_normalize(iv, area_eps)

    # -- constructors ------------------------------------------------------

    @classmethod
    def empty(cls, dim: int) -> "Region":
        return cls(dim, geom=MultiPolygon([])) if dim == 2 else cls(1, intervals=[])

    @classmethod
    def from_polygon(cls, points, holes=()) -> "Region":
        return cls(2, geom=Polygon(points, holes))

    @classmethod
    def from_shapely(cls, geom) -> "Region":
        return cls(2, geom=geom)

    @classmethod
    def from_intervals(cls, intervals) -> "Region":
        return cls(1, intervals=intervals)

    @classmethod
    def from_box(cls, x0: float, y0: float, x1: float, y1: float) -> "Region":
        return cls(2, geom=shapely.geometry.box(x0, y0, x1, y1))

    # -- basic queries -----------------------------------------------------

    @property
    def geom(self) -> MultiPolygon:
        if self.dim != 2:
            raise GeometryError("no polygon payload on a 1-d region")
        return self._geom

    @property
    def intervals(self) -> np.ndarray:
        if self.dim != 1:
            raise GeometryError("no interval payload on a 2-d region")
        return self._iv

    @property
    def is_empty(self) -> bool:
        return self._geom.is_empty if self.dim == 2 else len(self._iv) == 0

    def measure(self) -> float:
        """Lebesgue measure (area for d=2, total length for d=1)."""
        if self.dim == 2:
            return float(self._geom.area)
        return float(np.sum(self._iv[:, 1] - self._iv[:, 0])) if len(self._iv) else 0.0

    def boundary_length(self) -> float:
        """Total boundary measure: perimeter (d=2) or endpoint count (d=1)."""
        if self.dim == 2:
            return float(self._geom.length)
        return float(2 * len(self._iv))

    def bounds(self) -> tuple[float, ...]:
        if self.is_empty:
            raise GeometryError("empty region has no bounds")
        if self.dim == 2:
            return tuple(self._geom.bounds)
        return (float(self._iv[0, 0]), float(self._iv[-1, 1]))

    def diameter(self) -> float:
        if self.is_empty:
            return 0.0
        if self.dim == 1:
            lo, hi = self.bounds()
            return hi - lo
        pts = _hull_vertices_of_geom(self._geom)
        d2 = np.max(np.sum((pts[:, None, :] - pts[None, :, :]) ** 2, axis=-1))
        return math.sqrt(float(d2))

    def vertices(self) -> np.ndarray:
        """All boundary vertices, (n, d)."""
        if self.dim == 1:
            return self._iv.reshape(-1, 1).copy()
        chunks = []
        for poly in self._geom.geoms:
            chunks.append(np.asarray(poly.exterior.coords)[:-1])
            for ring in poly.interiors:
                chunks.append(np.asarray(ring.coords)[:-1])
        return np.vstack(chunks) if chunks else np.zeros((0, 2))

    def contains_points(self, pts: np.ndarray, slack: float = 0.0) -> np.ndarray:
        """Boolean mask: point within ``slack`` of the region."""
        pts = np.asarray(pts, dtype=float).reshape(-1, self.dim)
        if self.is_empty:
            return np.zeros(len(pts), dtype=bool)
        if self.dim == 1:
            x = pts[:, 0]
            ok = np.zeros(len(x), dtype=bool)
            for lo, hi in self._iv:
                ok |= (x >= lo - slack) & (x <= hi + slack)
            return ok
        target = self._geom if slack == 0.0 else self._geom.buffer(slack)
        return shapely.contains_xy(target, pts[:, 0], pts[:, 1]) | shapely.intersects_xy(
            target, pts[:, 0], pts[:, 1])

    def contains_region(self, other: "Region", tol: Tolerance = DEFAULT_TOL) -> bool:
        """Set containment up to coord_eps dilation and area_eps leakage."""
        if self.dim != other.dim:
            raise GeometryError("mixed dimensions")
        if other.is_empty:
            return True
        if self.dim == 1:
            fat = np.column_stack([self._iv[:, 0] - tol.coord_eps,
                                   self._iv[:, 1] + tol.coord_eps])
            leak = _iv_normalize(
                _iv_setdiff(other._iv, fat), 0.0)
            leak_len = float(np.sum(leak[:, 1] - leak[:, 0])) if len(leak) else 0.0
            return leak_len <= tol.area_eps
        fat = self._geom.buffer(tol.coord_eps)
        return float(other._geom.difference(fat).area) <= tol.area_eps

    # -- transforms --------------------------------------------------------

    def transform(self, linear: np.ndarray, offset: np.ndarray) -> "Region":
        """Image under the affine map x -> linear @ x + offset."""
        if self.dim == 1:
            a = float(np.asarray(linear).reshape(())) if np.asarray(linear).size == 1 \
                else float(np.asarray(linear)[0, 0])
            b = float(np.asarray(offset).reshape(-1)[0])
            iv = self._iv * a + b
            iv = np.sort(iv, axis=1)
            return Region(1, intervals=iv)
        a, b, c, d = (float(linear[0, 0]), float(linear[0, 1]),
                      float(linear[1, 0]), float(linear[1, 1]))
        ox, oy = float(offset[0]), float(offset[1])
        geom = shapely.affinity.affine_transform(self._geom, [a, b, c, d, ox, oy])
        return Region(2, geom=geom)

    def dilate(self, eps: float, quad_segs: int = 32) -> "Region":
        if eps < 0:
            raise GeometryError("negative dilation")
        if eps == 0 or self.is_empty:
            return self
        if self.dim == 1:
            iv = np.column_stack([self._iv[:, 0] - eps, self._iv[:, 1] + eps])
            return Region(1, intervals=iv)
        return Region(2, geom=self._geom.buffer(eps, quad_segs=quad_segs))

    def hull(self) -> "Region":
        if self.is_empty:
            return Region.empty(self.dim)
        if self.dim == 1:
            lo, hi = self.bounds()
            return Region(1, intervals=[[lo, hi]])
        return Region(2, geom=self._geom.convex_hull)

    def faces(self) -> list[Polygon]:
        return list(self._geom.geoms)

    # -- misc --------------------------------------------------------------

    def __repr__(self) -> str:
        kind = "intervals" if self.dim == 1 else "faces"
        n = len(self._iv) if self.dim == 1 else len(self._geom.geoms)
        return f"Region(d={self.dim}, {n} {kind}, measure={self.measure():.6g})"


def _iv_setdiff(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if len(a) == 0:
        return np.zeros((0, 2))
    if len(b) == 0:
        return a.copy()
    lo = min(a[0, 0], b[0, 0]) - 1.0
    hi = max(a[-1, 1], b[-1, 1]) + 1.0
    return _iv_intersect(a, _iv_complement_within(b, lo, hi))


def _hull_vertices_of_geom(geom) -> np.ndarray:
    hull = geom.convex_hull
    if hull.geom_type == "Polygon":
        return np.asarray(hull.exterior.coords)[:-1]
    if hull.geom_type == "LineString":
        return np.asarray(hull.coords)
    return np.asarray([[hull.x, hull.y]])


# ---------------------------------------------------------------------------
# boolean operations and components
# ---------------------------------------------------------------------------

def boolean(a: Region, b: Region, op: str, tol: Tolerance = DEFAULT_TOL) -> Region:
    """Regularized union/intersection/difference of two regions."""
    if a.dim != b.dim:
        raise GeometryError("mixed dimensions in boolean op")
    if op not in ("union", "intersection", "difference"):
        raise GeometryError(f"unknown boolean op {op!r}")
    if a.dim == 1:
        x, y = a.intervals, b.intervals
        if op == "union":
            iv = np.vstack([x, y]) if len(x) or len(y) else np.zeros((0, 2))
        elif op == "intersection":
            iv = _iv_intersect(x, y)
        else:
            iv = _iv_setdiff(x, y)
        return Region(1, intervals=iv, area_eps=tol.area_eps)
    ga, gb = a.geom, b.geom
    if op == "union":
        out = ga.union(gb)
    elif op == "intersection":
        out = ga.intersection(gb)
    else:
        out = ga.difference(gb)
    return Region(2, geom=out, area_eps=tol.area_eps)


def union_all(regions: list[Region], tol: Tolerance = DEFAULT_TOL) -> Region:
    if not regions:
        raise GeometryError("union of nothing (dimension unknown)")
    dim = regions[0].dim
    if any(r.dim != dim for r in regions):
        raise GeometryError("mixed dimensions in union")
    if dim == 1:
        iv = np.vstack([r.intervals for r in regions])
        return Region(1, intervals=iv, area_eps=tol.area_eps)
    geom = shapely.unary_union([r.geom for r in regions])
    return Region(2, geom=geom, area_eps=tol.area_eps)


def connected_components(r: Region, tol: Tolerance = DEFAULT_TOL) -> list[Region]:
    """Path-connected pieces of the interior, in deterministic order.

    Order: lexicographic by each piece's lowest-leftmost boundary vertex
    (min over vertices of the (y, x) pair for d=2; by left endpoint for d=1).
    """
    if r.is_empty:
        return []
    if r.dim == 1:
        return [Region(1, intervals=[iv], _raw=True) for iv in r.intervals]
    comps = [Region(2, geom=p, area_eps=tol.area_eps) for p in r.geom.geoms]

    def anchor(c: Region):
        v = c.vertices()
        order = np.lexsort((v[:, 0], v[:, 1]))
        best = v[order[0]]
        return (float(best[1]), float(best[0]))

    comps.sort(key=anchor)
    return comps


# ---------------------------------------------------------------------------
# erosion and tube volumes
# ---------------------------------------------------------------------------

def _erosion_quad_segs(eps: float, coord_eps: float) -> int:
    # chord sagitta of the vertex arcs <= coord_eps, capped to keep rings small
    if eps <= 0:
        return 8
    c = max(1.0 - coord_eps / eps, -1.0)
    theta = 2.0 * math.acos(min(c, 1.0)) if c < 1.0 else math.pi / 2
    if theta <= 0:
        return 64
    return int(min(64, max(8, math.ceil((math.pi / 2) / theta))))


def erode(r: Region, eps: float, tol: Tolerance = DEFAULT_TOL) -> Region:
    """Inward offset: the set of points of ``r`` at distance >= eps from the
    complement.  Empty once eps reaches the inradius."""
    if eps < 0:
        raise GeometryError("negative erosion radius")
    if eps == 0 or r.is_empty:
        return r
    if r.dim == 1:
        iv = np.column_stack([r.intervals[:, 0] + eps, r.intervals[:, 1] - eps])
        iv = iv[iv[:, 1] - iv[:, 0] > 0]
        return Region(1, intervals=iv, _raw=True)
    q = _erosion_quad_segs(eps, tol.coord_eps)
    return Region(2, geom=r.geom.buffer(-eps, quad_segs=q), area_eps=tol.area_eps)


def inner_tube_volume(r: Region, eps: float, tol: Tolerance = DEFAULT_TOL) -> float:
    """Measure of the inner eps-parallel set of ``r`` (points of the closure
    within eps of the complement); saturates at measure(r) once eps reaches
    the inradius."""
    if eps < 0:
        raise GeometryError("negative eps")
    if eps == 0:
        return 0.0
    return r.measure() - erode(r, eps, tol).measure()


def outer_tube_volume_convex(r: Region, eps: float, tol: Tolerance = DEFAULT_TOL) -> float:
    """Exterior eps-parallel volume of a convex region (interior excluded):
    perimeter*eps + pi*eps^2 in the plane, 2*eps on the line."""
    if eps < 0:
        raise GeometryError("negative eps")
    if r.is_empty:
        raise GeometryError("empty region")
    if r.dim == 1:
        if len(r.intervals) > 1:
            raise GeometryError("non-convex 1-d region; use the exact interval "
                                "routine or the grid oracle")
        return 2.0 * eps
    slack = max(tol.area_eps, r.boundary_length() * tol.coord_eps)
    if boolean(r.hull(), r, "difference", tol).measure() > slack:
        raise GeometryError("non-convex region; use the grid oracle")
    return r.boundary_length() * eps + math.pi * eps * eps


def outer_parallel_measure_1d(r: Region, eps: float) -> float:
    """Exact exterior eps-parallel length for any union of intervals."""
    if r.dim != 1:
        raise GeometryError("1-d regions only")
    if eps < 0:
        raise GeometryError("negative eps")
    return r.dilate(eps).measure() - r.measure()


def inradius(r: Region, rel_tol: float = 1e-9, tol: Tolerance = DEFAULT_TOL) -> float:
    """Supremal radius of a ball inside ``r``, by bisection on erosion
    emptiness (d=2) or from the longest interval (d=1)."""
    if r.is_empty:
        return 0.0
    if r.dim == 1:
        return float(np.max(r.intervals[:, 1] - r.intervals[:, 0])) / 2.0
    hi = r.diameter() / 2.0
    lo = 0.0
    target = max(hi * rel_tol, 1e-15)
    while hi - lo > target:
        mid = 0.5 * (lo + hi)
        if erode(r, mid, tol).is_empty:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def convex_inradius(points: np.ndarray) -> float:
    """Chebyshev radius of a convex polygon (LP over inward halfplanes)."""
    pts = np.asarray(points, dtype=float)
    n = len(pts)
    rows, rhs = [], []
    # CCW orientation assumed; normalize if the signed area is negative
    area2 = float(np.sum(pts[:, 0] * np.roll(pts[:, 1], -1)
                         - np.roll(pts[:, 0], -1) * pts[:, 1]))
    if area2 < 0:
        pts = pts[::-1]
    for i in range(n):
        p, q = pts[i], pts[(i + 1) % n]
        e = q - p
        nrm = math.hypot(e[0], e[1])
        if nrm == 0:
            continue
        # inward normal of a CCW edge
        nx, ny = -e[1] / nrm, e[0] / nrm
        # n . x >= n . p + t  ->  -n . x + t <= -n . p
        rows.append([-nx, -ny, 1.0])
        rhs.append(-(nx * p[0] + ny * p[1]))
    res = linprog(c=[0.0, 0.0, -1.0], A_ub=rows, b_ub=rhs,
                  bounds=[(None, None), (None, None), (0, None)], method="highs")
    if not res.success:
        raise GeometryError("inradius LP failed")
    cx, cy, rho = res.x
    # tighten: radius is the min distance from the center to the edge lines
    dists = [rhs[i] - (rows[i][0] * cx + rows[i][1] * cy) for i in range(len(rows))]
    return float(min(dists))


def convex_eroded_area(points: np.ndarray, eps: float) -> float:
    """Exact area of a convex polygon eroded by ``eps``: successive clipping
    against every edge line pushed inward.  Independent of the GEOS path."""
    pts = [tuple(map(float, p)) for p in np.asarray(points, dtype=float)]
    area2 = sum(pts[i][0] * pts[(i + 1) % len(pts)][1]
                - pts[(i + 1) % len(pts)][0] * pts[i][1] for i in range(len(pts)))
    if area2 < 0:
        pts = pts[::-1]
    edges = []
    for i in range(len(pts)):
        p, q = pts[i], pts[(i + 1) % len(pts)]
        ex, ey = q[0] - p[0], q[1] - p[1]
        nrm = math.hypot(ex, ey)
        if nrm == 0:
            continue
        nx, ny = -ey / nrm, ex / nrm  # inward unit normal
        edges.append((nx, ny, nx * p[0] + ny * p[1] + eps))
    poly = pts
    for nx, ny, c in edges:
        if not poly:
            return 0.0
        clipped = []
        m = len(poly)
        for i in range(m):
            a, b = poly[i], poly[(i + 1) % m]
            fa = nx * a[0] + ny * a[1] - c
            fb = nx * b[0] + ny * b[1] - c
            if fa >= 0:
                clipped.append(a)
            if (fa > 0 > fb) or (fa < 0 < fb):
                t = fa / (fa - fb)
                clipped.append((a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])))
        poly = clipped
    if len(poly) < 3:
        return 0.0
    s = sum(poly[i][0] * poly[(i + 1) % len(poly)][1]
            - poly[(i + 1) % len(poly)][0] * poly[i][1] for i in range(len(poly)))
    return abs(s) / 2.0


# ---------------------------------------------------------------------------
# sampling and Hausdorff distance
# ---------------------------------------------------------------------------

def boundary_sample(r: Region, step: float) -> PointCloud:
    """Points along every boundary ring at arc-length spacing <= step,
    vertices always included.  For intervals: the endpoints."""
    if step <= 0:
        raise GeometryError("step must be positive")
    if r.is_empty:
        return PointCloud(np.zeros((0, r.dim)))
    if r.dim == 1:
        return PointCloud(r.intervals.reshape(-1, 1).copy())
    chunks = []
    for poly in r.geom.geoms:
        rings = [poly.exterior] + list(poly.interiors)
        for ring in rings:
            coords = np.asarray(ring.coords)
            for i in range(len(coords) - 1):
                a, b = coords[i], coords[i + 1]
                seg = math.hypot(b[0] - a[0], b[1] - a[1])
                n = max(1, math.ceil(seg / step))
                ts = np.arange(n) / n
                chunks.append(a[None, :] + ts[:, None] * (b - a)[None, :])
    return PointCloud(np.vstack(chunks))


def interior_sample(r: Region, approx_count: int = 400) -> np.ndarray:
    """Grid points in the interior of ``r`` (roughly approx_count of them)."""
    if r.is_empty:
        return np.zeros((0, r.dim))
    if r.dim == 1:
        out = []
        total = r.measure()
        for lo, hi in r.intervals:
            n = max(1, int(round(approx_count * (hi - lo) / total)))
            out.append(lo + (np.arange(n) + 0.5) * (hi - lo) / n)
        return np.concatenate(out).reshape(-1, 1)
    x0, y0, x1, y1 = r.bounds()
    bbox_area = (x1 - x0) * (y1 - y0)
    step = math.sqrt(bbox_area / max(approx_count, 1))
    for _ in range(8):
        xs = np.arange(x0 + step / 2, x1, step)
        ys = np.arange(y0 + step / 2, y1, step)
        xx, yy = np.meshgrid(xs, ys)
        pts = np.column_stack([xx.ravel(), yy.ravel()])
        keep = shapely.contains_xy(r.geom, pts[:, 0], pts[:, 1])
        if keep.sum() >= min(approx_count, 4) or step < 1e-12:
            return pts[keep]
        step /= 2
    return pts[keep]


def _as_points(obj, tol: Tolerance) -> tuple[np.ndarray, float]:
    if isinstance(obj, PointCloud):
        return obj.points, obj.err
    if isinstance(obj, Region):
        pc = boundary_sample(obj, tol.sample_step)
        return pc.points, tol.sample_step
    arr = np.asarray(obj, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    return arr, 0.0


def hausdorff_distance(a, b, tol: Tolerance = DEFAULT_TOL) -> float:
    """Symmetric Hausdorff distance between clouds and/or region boundaries.

    Exact for finite clouds; boundary-sampled (error <= sample_step) when a
    region is passed.
    """
    pa, _ = _as_points(a, tol)
    pb, _ = _as_points(b, tol)
    if len(pa) == 0 or len(pb) == 0:
        raise GeometryError("empty input to hausdorff_distance")
    if pa.shape[1] != pb.shape[1]:
        raise GeometryError("mixed dimensions")
    d_ab = cKDTree(pb).query(pa)[0].max()
    d_ba = cKDTree(pa).query(pb)[0].max()
    return float(max(d_ab, d_ba))


def distances_to_cloud(points: np.ndarray, cloud: PointCloud) -> np.ndarray:
    if len(cloud) == 0:
        raise GeometryError("empty cloud")
    return cKDTree(cloud.points).query(np.asarray(points, dtype=float))[0]


# ---------------------------------------------------------------------------
# grid oracle
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GridVolume:
    volume: float
    error_bar: float
    cell: float
    status: str = "ok"


class GridOracle:
    """Distance-grid evaluator shared across several eps queries.

    Marks the target points on a regular grid, computes one Euclidean
    distance transform, and answers volume-of-{x : d(x, target) <= eps}
    queries restricted to the inside/outside of a window region.  The error
    bar for a query is the total measure of cells whose classification could
    flip within the quantization slack, plus a perimeter-width strip for the
    window test.  Deterministic for fixed inputs.
    """

    def __init__(self, targets: np.ndarray, cell: float, *,
                 target_err: float = 0.0,
                 window: Region | None = None, side: str = "both",
                 eps_max: float | None = None,
                 max_cells: float = 2.6e8):
        targets = np.asarray(targets, dtype=float)
        if targets.ndim == 1:
            targets = targets.reshape(-1, 1)
        if len(targets) == 0:
            raise GeometryError("empty grid target")
        if cell <= 0:
            raise GeometryError("cell must be positive")
        if side not in ("both", "inside", "outside"):
            raise GeometryError(f"bad side {side!r}")
        if side != "both" and window is None:
            raise GeometryError("side constraint requires a window region")
        self.dim = targets.shape[1]
        self.cell = float(cell)
        self.side = side
        self._window = window

        pad = (eps_max if eps_max is not None else 0.0) + 4 * cell
        lo = targets.min(axis=0)
        hi = targets.max(axis=0)
        if window is not None:
            b = window.bounds()
            wlo = np.array(b[: self.dim]) if self.dim == 1 else np.array(b[:2])
            whi = np.array(b[self.dim:]) if self.dim == 1 else np.array(b[2:])
            if side == "inside":
                lo, hi = np.minimum(lo, wlo), np.maximum(hi, whi)
        lo = lo - pad
        hi = hi + pad
        counts = tuple(max(1, int(math.ceil((hi[k] - lo[k]) / cell)))
                       for k in range(self.dim))
        shape = counts if self.dim == 1 else (counts[1], counts[0])  # rows = y
        ncells = float(np.prod(shape))
        if ncells > max_cells:
            raise BudgetExceededError(
                f"grid of {ncells:.3g} cells exceeds budget {max_cells:.3g}")
        self._lo = lo
        self._counts = counts
        self._shape = shape

        mark = np.ones(shape, dtype=bool)
        idx = tuple(
            np.clip(((targets[:, k] - lo[k]) / cell).astype(int), 0, counts[k] - 1)
            for k in range(self.dim))
        if self.dim == 1:
            mark[idx[0]] = False
        else:
            mark[idx[1], idx[0]] = False
        edt = ndimage.distance_transform_edt(mark, sampling=cell)
        self._edt = edt.astype(np.float32)
        del mark

        # quantization slack: target point -> marked center, plus center offset
        h = cell * math.sqrt(self.dim) / 2.0
        self._slack = 2.0 * h + target_err

        self._inside = None
        self._window_bar = 0.0
        if window is not None and side != "both":
            self._inside = self._window_mask()
            self._window_bar = window.boundary_length() * (2.0 * h) if self.dim == 2 \
                else 2 * len(window.intervals) * (2.0 * h)

    def _window_mask(self) -> np.ndarray:
        if self.dim == 1:
            n = self._counts[0]
            xs = self._lo[0] + (np.arange(n) + 0.5) * self.cell
            return self._window.contains_points(xs.reshape(-1, 1))
        nx, ny = self._counts
        xs = self._lo[0] + (np.arange(nx) + 0.5) * self.cell
        ys = self._lo[1] + (np.arange(ny) + 0.5) * self.cell
        out = np.empty((ny, nx), dtype=bool)
        geom = self._window.geom
        chunk = max(1, int(4e6 // max(nx, 1)))
        for r0 in range(0, ny, chunk):
            r1 = min(ny, r0 + chunk)
            yy = np.repeat(ys[r0:r1], nx)
            xx = np.tile(xs, r1 - r0)
            out[r0:r1] = shapely.contains_xy(geom, xx, yy).reshape(r1 - r0, nx)
        return out

    def selection(self, eps: float) -> np.ndarray:
        sel = self._edt <= eps
        if self._inside is not None:
            sel &= self._inside if self.side == "inside" else ~self._inside
        return sel

    def volume(self, eps: float) -> GridVolume:
        if eps < 0:
            raise GeometryError("negative eps")
        cellmeas = self.cell ** self.dim
        vol = float(self.selection(eps).sum()) * cellmeas
        band = float((np.abs(self._edt - eps) <= self._slack).sum()) * cellmeas
        bar = band + self._window_bar
        status = "ok" if self.cell <= eps / 4 else "coarse-cell"
        return GridVolume(vol, bar, self.cell, status)


def grid_tube_volume(target, eps: float, cell: float,
                     window: Region | None = None, side: str = "both",
                     tol: Tolerance = DEFAULT_TOL) -> GridVolume:
    """One-shot grid estimate of the eps-parallel volume of ``target``
    (a point cloud, region boundary, or raw point array), optionally
    restricted to the inside/outside of ``window``."""
    if isinstance(target, Region):
        pts, err = boundary_sample(target, min(cell, tol.sample_step)).points, 0.0
    else:
        pts, err = _as_points(target, tol)
    oracle = GridOracle(pts, cell, target_err=err, window=window, side=side,
                        eps_max=eps)
    return oracle.volume(eps)


# ---------------------------------------------------------------------------
# plain-text geometry documents
# ---------------------------------------------------------------------------

def _fmt_float(x: float) -> str:
    return format(float(x), ".17g")


def region_to_text(r: Region) -> str:
    """Serialize a region: one ring per line as comma-separated "x y" pairs
    (outer rings counterclockwise, holes clockwise); "lo hi" lines for d=1."""
    lines: list[str] = []
    if r.dim == 1:
        for lo, hi in r.intervals:
            lines.append(f"{_fmt_float(lo)} {_fmt_float(hi)}")
    else:
        for poly in r.geom.geoms:
            poly = orient(poly)  # exterior CCW, holes CW
            rings = [poly.exterior] + list(poly.interiors)
            for ring in rings:
                coords = list(ring.coords)[:-1]
                lines.append(", ".join(f"{_fmt_float(x)} {_fmt_float(y)}"
                                       for x, y in coords))
    return "\n".join(lines) + ("\n" if lines else "")


def region_from_text(text: str, dim: int | None = None) -> Region:
    """Parse the plain-text geometry document format written by
    :func:`region_to_text`.  Lines starting with '#' or a letter (tile
    headers) are skipped.  Ring role is recovered from orientation."""
    rings: list[np.ndarray] = []
    intervals: list[list[float]] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#") or line[0].isalpha():
            continue
        if "," in line:
            pts = []
            for pair in line.split(","):
                xy = pair.split()
                if len(xy) != 2:
                    raise GeometryError(f"bad ring vertex {pair!r}")
                pts.append([float(xy[0]), float(xy[1])])
            rings.append(np.asarray(pts))
        else:
            xy = line.split()
            if len(xy) != 2:
                raise GeometryError(f"bad interval line {line!r}")
            intervals.append([float(xy[0]), float(xy[1])])
    if rings and intervals:
        raise GeometryError("document mixes rings and intervals")
    if intervals or dim == 1:
        return Region(1, intervals=intervals)
    if not rings:
        return Region.empty(dim or 2)
    outers = []
    holes = []
    for ring in rings:
        x, y = ring[:, 0], ring[:, 1]
        area2 = float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))
        (outers if area2 >= 0 else holes).append(ring)
    polys = [Polygon(o) for o in outers]
    assigned: list[list[np.ndarray]] = [[] for _ in polys]
    for hole in holes:
        probe = shapely.geometry.Point(hole.mean(axis=0))
        candidates = [i for i, p in enumerate(polys) if p.contains(probe)]
        if not candidates:
            raise GeometryError("hole ring outside every outer ring")
        best = min(candidates, key=lambda i: polys[i].area)
        assigned[best].append(hole)
    return Region(2, geom=MultiPolygon(
        [Polygon(o.exterior, [h for h in hs]) for o, hs in zip(polys, assigned)]))
