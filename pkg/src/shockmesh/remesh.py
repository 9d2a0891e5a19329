"""Mesh reconstruction around solution extremes and solution transfer.

After equidistribution proposes a new mesh, any new node that landed in an
old interval flanked by a strict interior extreme gets a proximity score.
Scores of 1 or more mean the node sits close enough to the extreme that the
next evolution step could re-amplify the oscillation, so such nodes are
nudged toward the non-extreme end of their interval until every score drops
below 1. The corrected mesh then receives the old solution by linear
interpolation, which clips new values near extremes and cannot increase
total variation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import GridSolution, Mesh, detect_extremes
from .monitor import (
    EstimatorParams,
    build_monitor,
    discrete_curvature,
    equidistribute,
    regularize_curvature,
)

__all__ = [
    "RemeshError",
    "GuardConvergenceError",
    "ExtremeGuardParams",
    "ExtremeGuardReport",
    "piecewise_linear_sample",
    "extreme_proximity_scores",
    "enforce_extreme_guard",
    "interpolate_update",
    "interpolation_smoothing_residual",
    "extreme_clipping_residuals",
    "remesh_step",
]


class RemeshError(RuntimeError):
    """Mesh reconstruction produced an unusable mesh."""


class GuardConvergenceError(RemeshError):
    """Node corrections failed to bring all proximity scores below 1."""


@dataclass(frozen=True)
class ExtremeGuardParams:
    """Configuration of the extreme-proximity guard.

    ``growth_constant`` is the per-step amplification constant of the
    evolution scheme in use; it sets how wide the guarded sliver around an
    extreme is. ``nudge_factor`` is the relative step of a single correction
    and ``max_rounds`` bounds the correction sweeps before giving up.
    """

    growth_constant: float
    nudge_factor: float = 0.2
    max_rounds: int = 50

    def __post_init__(self):
        if not (np.isfinite(self.growth_constant) and self.growth_constant >= 0.0):
            raise ValueError("growth_constant must be non-negative and finite")
        if not (np.isfinite(self.nudge_factor) and 0.0 < self.nudge_factor < 1.0):
            raise ValueError("nudge_factor must lie in (0, 1)")
        if self.max_rounds < 1:
            raise ValueError("max_rounds must be at least 1")


@dataclass(frozen=True)
class ExtremeGuardReport:
    """Outcome of one guard enforcement: final scores and effort spent."""

    scores: np.ndarray
    rounds: int
    corrections: int

    @property
    def max_score(self) -> float:
        return float(self.scores.max()) if self.scores.size else 0.0

    @property
    def mean_score(self) -> float:
        return float(self.scores.mean()) if self.scores.size else 0.0


def piecewise_linear_sample(
    xs: np.ndarray, ys: np.ndarray, x_new: np.ndarray
) -> np.ndarray:
    """Sample the piecewise-linear interpolant of (xs, ys) at x_new.

    Query points that coincide with a knot return that knot's value
    bitwise, and every sampled value is clipped to the range of its
    segment's endpoint values, so interpolation can never overshoot the
    local data. Queries must lie inside [xs[0], xs[-1]].
    """
    x_new = np.asarray(x_new, dtype=np.float64)
    idx = np.searchsorted(xs, x_new, side="right") - 1
    idx = np.clip(idx, 0, xs.size - 2)
    gap = xs[idx + 1] - xs[idx]
    t = (x_new - xs[idx]) / gap
    out = ys[idx] + t * (ys[idx + 1] - ys[idx])
    lo = np.minimum(ys[idx], ys[idx + 1])
    hi = np.maximum(ys[idx], ys[idx + 1])
    out = np.minimum(np.maximum(out, lo), hi)
    exact_left = x_new == xs[idx]
    if np.any(exact_left):
        out = np.where(exact_left, ys[idx], out)
    exact_right = x_new == xs[idx + 1]
    if np.any(exact_right):
        out = np.where(exact_right, ys[idx + 1], out)
    return out


@dataclass(frozen=True)
class _GuardScan:
    """Per-affected-node geometry of one scoring pass.

    ``indices`` address the proposed node array; ``near``/``far`` are the
    violated (nearer) extreme endpoint and the opposite end of the hosting
    old interval; ``dual`` flags intervals whose both ends are extremes;
    ``dest_width`` is the width of the old interval on the other side of
    ``far`` (meaningful only where ``dual``).
    """

    indices: np.ndarray
    cells: np.ndarray
    scores: np.ndarray
    near: np.ndarray
    far: np.ndarray
    width: np.ndarray
    dual: np.ndarray
    dest_width: np.ndarray

    @classmethod
    def empty(cls) -> "_GuardScan":
        none = np.empty(0)
        ints = np.empty(0, dtype=np.intp)
        return cls(
            ints, ints, none, none, none, none,
            np.empty(0, dtype=bool), none,
        )


def _scan_guarded(
    old: GridSolution, proposed_nodes: np.ndarray, growth_constant: float
) -> _GuardScan:
    """Score interior proposed nodes that landed next to an old extreme."""
    x_old = old.mesh.nodes
    extreme = np.zeros(x_old.size, dtype=bool)
    for i, _kind in detect_extremes(old.values):
        extreme[i] = True
    if not extreme.any():
        return _GuardScan.empty()

    x_new = proposed_nodes[1:-1]
    cell = np.searchsorted(x_old, x_new, side="right") - 1
    cell = np.clip(cell, 0, x_old.size - 2)
    left_ext = extreme[cell]
    right_ext = extreme[cell + 1]
    affected = left_ext | right_ext
    if not affected.any():
        return _GuardScan.empty()

    sel = np.flatnonzero(affected)
    cell = cell[sel]
    xj = x_new[sel]
    xl = x_old[cell]
    xr = x_old[cell + 1]
    width = xr - xl
    factor = 1.0 + 3.0 * growth_constant
    # Score against each flanking extreme: distance to the interval end
    # opposite that extreme, relative to the interval width. The larger
    # score (the nearer extreme) governs.
    score_from_left = np.where(left_ext[sel], (xr - xj) / width * factor, -np.inf)
    score_from_right = np.where(right_ext[sel], (xj - xl) / width * factor, -np.inf)
    use_left = score_from_left >= score_from_right
    scores = np.where(use_left, score_from_left, score_from_right)
    near = np.where(use_left, xl, xr)
    far = np.where(use_left, xr, xl)
    dual = left_ext[sel] & right_ext[sel]
    # Width of the interval a dual-interval node escapes into; the far end
    # of a dual interval is an interior node, so the neighbour exists.
    dest_right = x_old[np.minimum(cell + 2, x_old.size - 1)] - xr
    dest_left = xl - x_old[np.maximum(cell - 1, 0)]
    dest_width = np.where(use_left, dest_right, dest_left)
    return _GuardScan(sel + 1, cell, scores, near, far, width, dual, dest_width)


def extreme_proximity_scores(
    old: GridSolution, proposed: Mesh, growth_constant: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Proximity scores of new interior nodes to flanking old extremes.

    A node in an old interval with a strict extreme at one end scores
    (1 + 3 * growth_constant) times its relative distance from the
    non-extreme end: 1 + 3C on top of the extreme, 0 at the far end. When
    both ends are extremes the larger score wins. Returns the indices of
    the affected proposed nodes, the indices of the old intervals hosting
    them, and their scores; a score below 1 means the node is safely
    inside the far sliver of its interval.
    """
    if growth_constant < 0.0:
        raise ValueError("growth_constant must be non-negative")
    scan = _scan_guarded(old, proposed.nodes, growth_constant)
    return scan.indices, scan.cells, scan.scores


def enforce_extreme_guard(
    old: GridSolution, proposed: Mesh, params: ExtremeGuardParams
) -> tuple[Mesh, ExtremeGuardReport]:
    """Nudge proposed nodes away from old extremes until all scores < 1.

    Each round moves every offending node away from the extreme it scored
    against. In an interval with one extreme end, the step is
    ``nudge_factor`` times the node's current distance from that extreme,
    so distances grow geometrically; the distance is floored at half the
    interval width, because equidistribution parks nodes arbitrarily close
    to the extreme and an unfloored multiplicative step can then need far
    more rounds than any practical cap (the floor is inactive for nodes
    beyond the midpoint, where the plain geometric growth takes over). An
    interval flanked by extremes on both ends admits no safe interior
    position once 1 + 3 * growth_constant reaches 2, and the geometric
    step merely shuttles nodes around the midpoint there, so such nodes
    instead hop past the far end into the neighbouring interval (entry
    depth a ``nudge_factor``-scale fraction of that interval), from where
    the geometric rule can proceed.

    A geometric move that would reach or cross the far interval end is
    capped at the midpoint toward that end: the compliant sliver always
    lies inside the interval, and overshooting into the neighbouring old
    interval can put the node next to a different extreme and restart the
    correction march there. Moves past a domain endpoint are likewise
    capped at the midpoint between the node and that endpoint. If a round
    breaks the mesh ordering the coordinates are sorted before rescoring;
    sorting that still leaves duplicate coordinates is fatal.
    """
    nodes = proposed.nodes.copy()
    a = nodes[0]
    b = nodes[-1]
    eps = params.nudge_factor
    corrections = 0
    for rounds in range(params.max_rounds + 1):
        scan = _scan_guarded(old, nodes, params.growth_constant)
        if scan.scores.size == 0 or scan.scores.max() < 1.0:
            return Mesh(nodes), ExtremeGuardReport(scan.scores, rounds, corrections)
        if rounds == params.max_rounds:
            raise GuardConvergenceError(
                f"proximity scores still reach {scan.scores.max():.6g} "
                f"after {params.max_rounds} correction rounds"
            )
        bad = scan.scores >= 1.0
        idx = scan.indices[bad]
        xj = nodes[idx]
        near = scan.near[bad]
        far = scan.far[bad]
        width = scan.width[bad]
        direction = np.sign(far - near)
        span = np.abs(xj - near)
        step = eps * np.maximum(span, 0.5 * width)
        moved = xj + direction * step
        # The compliant sliver always lies inside the hosting interval (a
        # node at the far end scores 0), so a geometric step never profits
        # from crossing it; overshooting into the next old interval can
        # restart the march against a different extreme there. Cap such
        # moves at the midpoint toward the far end; each capped round
        # halves the remaining gap, so the score still decays geometrically.
        overshoot = direction * (moved - far) >= 0.0
        moved = np.where(overshoot, 0.5 * (xj + far), moved)
        dual = scan.dual[bad]
        if np.any(dual):
            # Entry depth shrinks with the node's distance from the nearer
            # extreme, keeping simultaneous hoppers distinct.
            depth = eps * scan.dest_width[bad] * (1.0 - 0.5 * span / width)
            moved = np.where(dual, far + direction * depth, moved)
        moved = np.where(moved >= b, 0.5 * (xj + b), moved)
        moved = np.where(moved <= a, 0.5 * (xj + a), moved)
        nodes[idx] = moved
        corrections += int(idx.size)
        if not np.all(np.diff(nodes) > 0.0):
            nodes.sort()
            if np.any(np.diff(nodes) == 0.0):
                raise RemeshError("corrections collapsed two nodes onto one point")
    raise AssertionError("unreachable")


def interpolate_update(old: GridSolution, new_mesh: Mesh) -> GridSolution:
    """Transfer the solution to a new mesh by linear interpolation.

    Both meshes must span the same closed interval. Values at coinciding
    nodes are preserved bitwise and each transferred value stays within the
    range of its source segment, so the transfer never raises the maximum,
    lowers the minimum, or increases total variation.
    """
    if new_mesh.a != old.mesh.a or new_mesh.b != old.mesh.b:
        raise ValueError("new mesh must span the same interval as the old mesh")
    values = piecewise_linear_sample(old.mesh.nodes, old.values, new_mesh.nodes)
    return GridSolution(new_mesh, values)


def interpolation_smoothing_residual(
    old: GridSolution, i: int, new_left: float, new_right: float
) -> tuple[float, float, float]:
    """Two routes to the transferred profile's height above old node i.

    When the interval around old node i keeps no new node, the transferred
    piecewise-linear profile evaluated at x_i equals the old value plus a
    weighted jump of one-sided slopes; the weight is the harmonic-type
    product of the two offsets. Returns (sampled, closed_form, residual);
    the two routes are exact up to roundoff and the residual is their
    absolute difference.

    ``new_left`` and ``new_right`` are the new nodes bracketing x_i, with
    x_{i-1} <= new_left <= x_i <= new_right <= x_{i+1} and
    new_left < new_right.
    """
    x = old.mesh.nodes
    u = old.values
    if not 1 <= i <= x.size - 2:
        raise ValueError("i must be an interior node index")
    if not (x[i - 1] <= new_left <= x[i] <= new_right <= x[i + 1]):
        raise ValueError("bracketing nodes must straddle x_i within its intervals")
    if not new_left < new_right:
        raise ValueError("bracketing nodes must be distinct")
    left_val, right_val = piecewise_linear_sample(
        x, u, np.array([new_left, new_right])
    )
    t = (x[i] - new_left) / (new_right - new_left)
    sampled = float(left_val + t * (right_val - left_val))

    offset_left = x[i] - new_left
    offset_right = new_right - x[i]
    slope_left = (u[i] - u[i - 1]) / (x[i] - x[i - 1])
    slope_right = (u[i + 1] - u[i]) / (x[i + 1] - x[i])
    weight = offset_left * offset_right / (offset_left + offset_right)
    closed_form = float(u[i] + weight * (slope_right - slope_left))
    return sampled, closed_form, abs(sampled - closed_form)


def extreme_clipping_residuals(
    old: GridSolution, new: GridSolution
) -> list[tuple[float, float]]:
    """Observed vs allowed oscillation size at each clipped old extreme.

    For every strict interior extreme of the old solution, find the new
    node nearest to it. If that node lies in one of the two old intervals
    adjacent to the extreme, linear interpolation pins its value exactly:
    the remaining departure from the far interval end's value is the
    relative distance to that far end times the old departure. Returns
    (observed, allowed) pairs; extremes whose nearest new node escaped both
    adjacent intervals are skipped.
    """
    x_old = old.mesh.nodes
    u_old = old.values
    x_new = new.mesh.nodes
    u_new = new.values
    out: list[tuple[float, float]] = []
    for i, _kind in detect_extremes(u_old):
        j = int(np.argmin(np.abs(x_new - x_old[i])))
        xj = x_new[j]
        if xj >= x_old[i]:
            far = i + 1
            width = x_old[far] - x_old[i]
            dist = xj - x_old[i]
        else:
            far = i - 1
            width = x_old[i] - x_old[far]
            dist = x_old[i] - xj
        if dist > width:
            continue
        allowed = (1.0 - dist / width) * abs(u_old[i] - u_old[far])
        observed = abs(u_new[j] - u_old[far])
        out.append((float(observed), float(allowed)))
    return out


def remesh_step(
    old: GridSolution,
    estimator: EstimatorParams,
    guard: ExtremeGuardParams,
) -> tuple[GridSolution, ExtremeGuardReport]:
    """One full mesh reconstruction plus solution transfer.

    Pipeline: curvature scores -> regularization -> cumulative monitor ->
    equidistribution with the same node count -> extreme-guard enforcement
    -> linear transfer of the solution onto the corrected mesh.
    """
    scores = regularize_curvature(discrete_curvature(old), estimator)
    monitor = build_monitor(old.mesh, scores)
    proposed = equidistribute(monitor, len(old.mesh))
    corrected, report = enforce_extreme_guard(old, proposed, guard)
    return interpolate_update(old, corrected), report
