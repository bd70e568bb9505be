"""Envelope construction and the parallel-set compatibility report.

The envelope of a compact set is the complement of the unbounded component
of its complement: what the set looks like from far away.  A tiling of the
closure of a feasible open set K describes the parallel sets of the
attractor exactly when the boundary of K sits inside the attractor; this
module decides that condition and its equivalent reformulations
numerically, with witnesses, and classifies the obstruction when no
suitable open set can exist.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import geometry as geo
from . import tiling as tl
from .errors import BudgetExceededError, GeometryError
from .geometry import DEFAULT_TOL, GridOracle, PointCloud, Region, Tolerance
from .ifs import IfsSystem, attractor_cloud, attractor_hull
from .verdict import Verdict

CONDITION_LABELS = (
    ("i", "tiling-boundary-is-attractor"),
    ("ii", "base-boundary-in-attractor"),
    ("iii", "cover-remainder-boundary-in-attractor"),
    ("iv", "generator-boundaries-in-attractor"),
    ("v", "inner-parallel-volumes-match"),
    ("vi", "outer-parallel-volumes-match"),
    ("a", "envelope-equals-hull"),
    ("b", "envelope-convex"),
)


@dataclass(frozen=True)
class Envelope:
    """Depth-n over-approximation of the envelope: the n-fold hull cover with
    every enclosed hole filled.  Contains the true envelope, within the
    stated Hausdorff guarantee."""

    region: Region
    depth: int
    guarantee: float

    def measure(self) -> float:
        return self.region.measure()


@dataclass(frozen=True)
class Witness:
    point: np.ndarray
    distance: float
    eta: float


@dataclass(frozen=True)
class CompatReport:
    system_label: str
    conditions: dict[str, Verdict]
    eps_samples: tuple[float, ...]
    consistent: bool
    all_hold: bool
    notes: tuple[str, ...] = ()

    def verdict(self, key: str) -> Verdict:
        return self.conditions[key]

    def to_json(self) -> str:
        payload = {
            "system": self.system_label,
            "eps_samples": list(self.eps_samples),
            "consistent": self.consistent,
            "all_hold": self.all_hold,
            "conditions": {},
            "notes": list(self.notes),
        }
        for key, label in CONDITION_LABELS:
            v = self.conditions[key]
            payload["conditions"][key] = {
                "label": label,
                "status": v.status,
                "tolerance": v.tolerance,
                "margin": v.margin,
                "reason": v.reason,
                "witness": _jsonable(v.witness),
            }
        return json.dumps(payload, indent=2, sort_keys=True)

    def describe(self) -> str:
        lines = [f"compatibility report for {self.system_label}"]
        for key, label in CONDITION_LABELS:
            v = self.conditions[key]
            lines.append(f"  ({key}) {label}: {v.describe()}")
        lines.append(f"  consistent: {'yes' if self.consistent else 'no'}; "
                     f"all hold: {'yes' if self.all_hold else 'no'}")
        lines.extend(f"  note: {n}" for n in self.notes)
        return "\n".join(lines)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, Witness):
        return {"point": obj.point.tolist(), "distance": obj.distance, "eta": obj.eta}
    if isinstance(obj, Verdict):
        return {"status": obj.status, "reason": obj.reason}
    return obj


# ---------------------------------------------------------------------------
# envelope
# ---------------------------------------------------------------------------

def envelope(system: IfsSystem, depth: int, budget: int = 250_000,
             tol: Tolerance = DEFAULT_TOL) -> Envelope:
    """Fill the holes of the depth-n hull cover.

    The cover contains the attractor, so discarding every hole ring (the
    bounded complement components) yields a certified over-approximation of
    the envelope.  On the line the two unbounded complement components are
    the outer rays, so the envelope is the spanned interval.
    """
    if depth < 1:
        raise GeometryError("depth must be >= 1")
    if system.n_maps ** depth > budget:
        raise BudgetExceededError(f"{system.n_maps}^{depth} cover pieces exceed budget")
    hull = attractor_hull(system)
    cover = _hull_cover(system, depth, tol)
    guarantee = system.r_max ** depth * hull.diameter()
    if system.dim == 1:
        lo, hi = cover.bounds()
        return Envelope(Region(1, intervals=[[lo, hi]]), depth, guarantee)
    return Envelope(_fill_enclosed_holes(cover, tol), depth, guarantee)


def _hull_cover(system: IfsSystem, depth: int, tol: Tolerance) -> Region:
    """k-fold image of the hull, cached incrementally per system."""
    key = ("hull-cover", tol.area_eps)
    covers = system._cache.setdefault(key, [attractor_hull(system)])
    while len(covers) <= depth:
        covers.append(system.map_region(covers[-1]))
    return covers[depth]


def _fill_enclosed_holes(cover: Region, tol: Tolerance) -> Region:
    """Complement of the unbounded complement component of a 2-d cover.

    Pieces of the cover may touch only at single points, so enclosed holes
    need not appear as interior rings; instead the complement is carved out
    of a margin box and the faces reaching that box are removed.
    """
    x0, y0, x1, y1 = cover.bounds()
    margin = 0.25 * max(x1 - x0, y1 - y0) + 1.0
    frame = Region.from_box(x0 - margin, y0 - margin, x1 + margin, y1 + margin)
    complement = geo.boolean(frame, cover, "difference", tol)
    rim = frame.geom.boundary
    unbounded = [f for f in complement.faces() if f.distance(rim) < margin / 2]
    from shapely import unary_union
    filled = frame.geom.difference(unary_union(unbounded))
    return Region(2, geom=filled, area_eps=tol.area_eps)


def envelope_convex(system: IfsSystem, depth: int, rel_tol: float = 1e-6,
                    tol: Tolerance = DEFAULT_TOL) -> Verdict:
    """Convexity of the envelope; equivalent to the envelope being the full
    convex hull."""
    env = envelope(system, depth, tol=tol)
    gap = geo.boolean(env.region.hull(), env.region, "difference", tol).measure()
    thresh = max(tol.area_eps, rel_tol * env.region.hull().measure())
    if gap <= thresh:
        return Verdict.holds(thresh, thresh - gap, "envelope is convex",
                             hull_gap=gap, depth=depth)
    return Verdict.violated(thresh, gap - thresh, "envelope is not convex",
                            hull_gap=gap, depth=depth)


# ---------------------------------------------------------------------------
# boundary-subset checks
# ---------------------------------------------------------------------------

def check_boundary_subset(boundary_of: Region, system: IfsSystem,
                          eta: float | None = None,
                          cloud: PointCloud | None = None,
                          step: float | None = None) -> Verdict:
    """Is the boundary of the region inside the attractor?

    Samples the boundary and measures worst distance to an attractor cloud.
    holds: max distance <= eta.  violated: a witness beyond 3*eta.  The band
    between is inconclusive, and eta must exceed the certifiable floor
    (cloud error + sample step).
    """
    scale = attractor_hull(system).diameter()
    if cloud is None:
        cloud = attractor_cloud(system, err=(eta / 6 if eta else scale * 2e-3))
    if step is None:
        step = max(cloud.err, scale * 1e-4)
    floor = cloud.err + step
    if eta is None:
        eta = 3.0 * floor
    if eta <= floor:
        return Verdict.inconclusive(
            f"eta={eta:.3g} at or below certifiable floor {floor:.3g}", eta)
    samples = geo.boundary_sample(boundary_of, step)
    dists = geo.distances_to_cloud(samples.points, cloud)
    imax = int(np.argmax(dists))
    dmax = float(dists[imax])
    witness = Witness(samples.points[imax], dmax, eta)
    if dmax <= eta:
        return Verdict.holds(eta, eta - dmax, "boundary lies on the attractor",
                             max_distance=dmax)
    if dmax > 3.0 * eta:
        return Verdict.violated(eta, dmax - eta, "boundary point far from attractor",
                                witness=witness, max_distance=dmax)
    return Verdict.inconclusive(
        f"worst distance {dmax:.3g} in the uncertain band (eta={eta:.3g})",
        eta, witness=witness)


# ---------------------------------------------------------------------------
# the compatibility report
# ---------------------------------------------------------------------------

def _volume_match_verdict(pairs, label: str) -> Verdict:
    """Combine per-eps (lhs, rhs, bar) comparisons into one verdict."""
    worst_excess = -math.inf
    worst = None
    for eps, lhs, rhs, bar in pairs:
        delta = abs(lhs - rhs)
        excess = delta - bar
        if excess > worst_excess:
            worst_excess = excess
            worst = (eps, lhs, rhs, bar, delta)
    eps, lhs, rhs, bar, delta = worst
    info = {"eps": eps, "lhs": lhs, "rhs": rhs, "bar": bar, "delta": delta,
            "samples": [(e, l, r, b) for e, l, r, b in pairs]}
    if worst_excess <= 0:
        return Verdict.holds(bar, -worst_excess, f"{label} volumes agree", **info)
    if delta > 3.0 * bar:
        return Verdict.violated(bar, worst_excess, f"{label} volumes disagree", **info)
    return Verdict.inconclusive(f"{label} difference inside the error band",
                                bar, **info)


def compatibility_report(system: IfsSystem, open_set: Region,
                         eps_samples=None, tol: Tolerance = DEFAULT_TOL,
                         cloud_err: float | None = None,
                         cell_div: int = 20,
                         envelope_depth: int | None = None) -> CompatReport:
    """Evaluate the eight equivalent compatibility conditions for the tiling
    of cl(open_set) and flag whether their verdicts agree."""
    feas = tl.check_feasible(system, open_set, tol)
    if not feas.is_holds:
        raise GeometryError(f"open set not feasible: {feas.describe()}")
    ntc = tl.check_nontrivial(system, open_set, tol)
    if not ntc.is_holds:
        raise GeometryError("trivial system: nothing to tile")

    K = open_set
    hull = attractor_hull(system)
    scale = hull.diameter()
    if eps_samples is None:
        eps_samples = tuple(scale * f for f in (0.04, 0.08, 0.16))
    eps_samples = tuple(sorted(float(e) for e in eps_samples))
    if not eps_samples or eps_samples[0] <= 0 or eps_samples[-1] >= scale:
        raise GeometryError("eps samples must lie in (0, diam hull)")

    if cloud_err is None:
        cloud_err = min(scale * 1e-3, eps_samples[0] / 20)
    cloud = attractor_cloud(system, err=cloud_err)
    step = max(cloud.err, scale * 2e-4)
    eta = 3.0 * (cloud.err + step)

    gens = tl.generators(system, K, tol)
    conditions: dict[str, Verdict] = {}
    notes: list[str] = []

    # (ii) boundary of the base set
    conditions["ii"] = check_boundary_subset(K, system, eta, cloud, step)

    # (iii) boundary of base minus first-level cover
    remainder = geo.boolean(K, system.map_region(K), "difference", tol)
    conditions["iii"] = check_boundary_subset(remainder, system, eta, cloud, step)

    # (iv) generator boundaries, worst generator reported
    worst_v = None
    for q, gen in enumerate(gens):
        v = check_boundary_subset(gen, system, eta, cloud, step)
        v = Verdict(v.status, v.tolerance, v.margin, v.reason,
                    dict(v.witness, generator=q))
        if worst_v is None or _condition_rank(v) > _condition_rank(worst_v):
            worst_v = v
    conditions["iv"] = worst_v

    # tile boundary targets shared by (i) and the volume checks
    cell = eps_samples[0] / cell_div
    min_gd = min(g.diameter() for g in gens)
    min_diam = cell / 2
    spacing = min(step, cell)
    tile_pts = tl.tile_boundary_points(system, gens, min_diam=min_diam,
                                       spacing=spacing)
    bd_k = geo.boundary_sample(K, spacing).points
    # a tile below min_diam sits within this distance of the attractor
    missing_slack = min_diam * scale / min_gd

    # (i) two-sided comparison of the tiling boundary with the attractor
    d_tiles_to_f = float(np.max(geo.distances_to_cloud(tile_pts, cloud)))
    bd_t_cloud = PointCloud(np.vstack([tile_pts, bd_k, cloud.points]),
                            err=max(missing_slack, cloud.err))
    d_f_to_bdt = float(np.max(geo.distances_to_cloud(cloud.points, bd_t_cloud)))
    dmax_i = max(d_tiles_to_f, d_f_to_bdt)
    if dmax_i <= eta:
        conditions["i"] = Verdict.holds(eta, eta - dmax_i,
                                        "tiling boundary matches the attractor",
                                        max_distance=dmax_i)
    elif dmax_i > 3 * eta:
        conditions["i"] = Verdict.violated(eta, dmax_i - eta,
                                           "tiling boundary leaves the attractor",
                                           max_distance=dmax_i)
    else:
        conditions["i"] = Verdict.inconclusive(
            f"boundary distance {dmax_i:.3g} in the uncertain band", eta)

    # (v) inner volumes: eps-neighborhood of F inside K vs inner tube of the tiling
    eps_max = eps_samples[-1]
    t_targets = np.vstack([tile_pts, bd_k, cloud.points])
    oracle_t = GridOracle(t_targets, cell, target_err=max(missing_slack, cloud.err),
                          window=K, side="inside", eps_max=eps_max)
    oracle_fk = GridOracle(cloud.points, cell, target_err=cloud.err,
                           window=K, side="inside", eps_max=eps_max)
    pairs_v = []
    for eps in eps_samples:
        gv_t = oracle_t.volume(eps)
        gv_f = oracle_fk.volume(eps)
        pairs_v.append((eps, gv_f.volume, gv_t.volume,
                        gv_f.error_bar + gv_t.error_bar))
    conditions["v"] = _volume_match_verdict(pairs_v, "inner parallel")

    # (vi) outer volumes: eps-neighborhood of F outside K vs outer tube of K
    oracle_fo = GridOracle(cloud.points, cell, target_err=cloud.err,
                           window=K, side="outside", eps_max=eps_max)
    pairs_vi = []
    for eps in eps_samples:
        gv_f = oracle_fo.volume(eps)
        if system.dim == 1:
            outer = geo.outer_parallel_measure_1d(K, eps)
            bar = gv_f.error_bar
        else:
            try:
                outer = geo.outer_tube_volume_convex(K, eps, tol)
                bar = gv_f.error_bar
            except GeometryError:
                gv_k = GridOracle(bd_k, cell, window=K, side="outside",
                                  eps_max=eps_max).volume(eps)
                outer, bar = gv_k.volume, gv_f.error_bar + gv_k.error_bar
        pairs_vi.append((eps, gv_f.volume, outer, bar))
    conditions["vi"] = _volume_match_verdict(pairs_vi, "outer parallel")

    # (a), (b): envelope against the hull
    if envelope_depth is None:
        envelope_depth = _auto_envelope_depth(system)
    env = envelope(system, envelope_depth, tol=tol)
    sym = (geo.boolean(hull, env.region, "difference", tol).measure()
           + geo.boolean(env.region, hull, "difference", tol).measure())
    thresh_a = 1e-6 * hull.measure()
    if sym <= thresh_a:
        conditions["a"] = Verdict.holds(thresh_a, thresh_a - sym,
                                        "envelope equals the hull", symdiff=sym)
    else:
        conditions["a"] = Verdict.violated(thresh_a, sym - thresh_a,
                                           "envelope differs from the hull",
                                           symdiff=sym)
    conditions["b"] = envelope_convex(system, envelope_depth, tol=tol)

    decided = all(v.decided for v in conditions.values())
    values = {v.is_holds for v in conditions.values() if v.decided}
    consistent = decided and len(values) == 1
    all_hold = consistent and True in values
    if not decided:
        notes.append("some conditions are inconclusive at this resolution")
    elif not consistent:
        notes.append("verdicts disagree: the equivalence expected between the "
                     "conditions failed at this tolerance")
    return CompatReport(system.label or "system", conditions, eps_samples,
                        consistent, all_hold, tuple(notes))


def _condition_rank(v: Verdict) -> int:
    return {"holds": 0, "inconclusive": 1, "violated": 2}[v.status]


def _auto_envelope_depth(system: IfsSystem, budget: int = 2_000) -> int:
    depth = 1
    while system.n_maps ** (depth + 1) <= budget:
        depth += 1
    return max(1, min(depth, 8))


# ---------------------------------------------------------------------------
# obstruction classification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ObstructionReport:
    connected_complement: Verdict
    advice: str
    depths: tuple[int, int]
    envelope_measures: tuple[float, float]
    int_envelope_feasible: Verdict | None = None

    def describe(self) -> str:
        lines = [f"complement connected: {self.connected_complement.describe()}",
                 f"envelope measure at depths {self.depths}: "
                 f"{self.envelope_measures[0]:.6g} -> {self.envelope_measures[1]:.6g}",
                 f"advice: {self.advice}"]
        if self.int_envelope_feasible is not None:
            lines.append("interior-of-envelope feasible: "
                         f"{self.int_envelope_feasible.describe()}")
        return "\n".join(lines)


def obstruction_classifier(system: IfsSystem, depth: int | None = None,
                           tol: Tolerance = DEFAULT_TOL) -> ObstructionReport:
    """Estimate whether the attractor's complement is connected by watching
    the envelope measure shrink with depth.  A connected complement rules
    out every feasible open set for the parallel-set decomposition; a fat
    envelope suggests trying its interior, whose feasibility is then checked
    directly."""
    if depth is None:
        depth = max(1, _auto_envelope_depth(system, budget=4_096) - 2)
    d2 = depth + 2
    e1 = envelope(system, depth, tol=tol)
    e2 = envelope(system, d2, tol=tol)
    m1, m2 = e1.measure(), e2.measure()
    hull_measure = attractor_hull(system).measure()
    if m2 <= 1e-9 * hull_measure or (m1 > 0 and m2 <= 0.75 * m1):
        verdict = Verdict.holds(0.75, reason="envelope measure decays with depth",
                                ratio=(m2 / m1 if m1 else 0.0))
        advice = ("complement appears connected: no feasible open set can make "
                  "the parallel sets of the attractor match the tiling's")
        return ObstructionReport(verdict, advice, (depth, d2), (m1, m2))
    if m2 >= 0.98 * m1:
        verdict = Verdict.violated(0.98, reason="envelope measure stays positive",
                                   ratio=m2 / m1)
        feas = tl.check_feasible(system, e2.region, tol)
        if feas.is_holds:
            advice = ("complement disconnected; the interior of the envelope is "
                      "a feasible open set, tile that")
        else:
            pair = feas.witness.get("pair")
            advice = ("complement disconnected but the interior of the envelope "
                      f"is not feasible ({feas.reason}"
                      + (f", pair {pair}" if pair else "") + ")")
        return ObstructionReport(verdict, advice, (depth, d2), (m1, m2), feas)
    verdict = Verdict.inconclusive(
        f"envelope measures {m1:.4g} -> {m2:.4g} neither stable nor clearly decaying")
    return ObstructionReport(verdict, "increase depth to classify", (depth, d2),
                             (m1, m2))
