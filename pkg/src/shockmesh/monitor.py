"""Curvature-driven monitor construction and mesh equidistribution.

The reconstruction pipeline scores every node with a discrete curvature of
the piecewise-linear solution graph, floors and flattens the scores so the
monitor stays positive and less spiky, integrates them into a cumulative
monitor, and places the new nodes so that all monitor increments between
consecutive nodes are equal.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import GridSolution, Mesh, _as_float_array

__all__ = [
    "EstimatorParams",
    "MonitorTable",
    "discrete_curvature",
    "regularize_curvature",
    "build_monitor",
    "equidistribute",
]


@dataclass(frozen=True)
class EstimatorParams:
    """Regularization knobs for the curvature scores.

    ``floor`` keeps the monitor strictly positive on flat data; ``power``
    (in (0, 1]) flattens the score distribution, trading cluster sharpness
    for coverage.

    ``relative_floor`` additionally floors every score at that fraction of
    the largest score, which caps the mesh density contrast at roughly
    ``(1 / relative_floor) ** power``. Without the cap, near-flat regions
    carry almost no monitor mass, so on data with one sharp feature every
    remesh shrinks the cluster by another factor of the node count. The
    cell widths, and with them the stable time step, then collapse
    geometrically and the integration stalls at a fixed time. Set it to
    zero to disable the cap.
    """

    floor: float = 1e-15
    power: float = 0.9
    relative_floor: float = 0.02

    def __post_init__(self):
        if not (np.isfinite(self.floor) and self.floor > 0.0):
            raise ValueError("floor must be a positive finite number")
        if not (np.isfinite(self.power) and 0.0 < self.power <= 1.0):
            raise ValueError("power must lie in (0, 1]")
        if not (np.isfinite(self.relative_floor) and 0.0 <= self.relative_floor < 1.0):
            raise ValueError("relative_floor must lie in [0, 1)")


def discrete_curvature(solution: GridSolution) -> np.ndarray:
    """Graph curvature of the piecewise-linear interpolant at every node.

    For an interior node the score is the slope change across the node,
    normalized by the local spacing and by the secant lengths of the three
    segments involved, so steep but straight faces score near zero while
    corners score highest. Endpoints copy their nearest interior score.
    """
    x = solution.mesh.nodes
    u = solution.values
    if x.size < 3:
        raise ValueError("curvature needs at least three nodes")
    span = x[2:] - x[:-2]
    slope_left = (u[1:-1] - u[:-2]) / (x[1:-1] - x[:-2])
    slope_right = (u[2:] - u[1:-1]) / (x[2:] - x[1:-1])
    slope_chord = (u[2:] - u[:-2]) / span
    denom = np.sqrt(
        (1.0 + slope_left**2) * (1.0 + slope_right**2) * (1.0 + slope_chord**2)
    )
    interior = (2.0 / span) * np.abs(slope_left - slope_right) / denom
    scores = np.empty_like(u)
    scores[1:-1] = interior
    scores[0] = interior[0]
    scores[-1] = interior[-1]
    return scores


def regularize_curvature(scores: np.ndarray, params: EstimatorParams) -> np.ndarray:
    """Apply the positivity floor, then the flattening power, in that order.

    The relative floor (fraction of the peak score) is applied together
    with the absolute one, before the power, so uniform score vectors stay
    uniform and the flattening acts on the already-capped contrast.
    """
    arr = _as_float_array(scores, "scores")
    arr = np.maximum(arr, params.floor)
    if params.relative_floor > 0.0 and arr.size:
        arr = np.maximum(arr, params.relative_floor * arr.max())
    return arr ** params.power


@dataclass(frozen=True)
class MonitorTable:
    """Cumulative integral of the piecewise-linear score interpolant.

    ``cumulative[0]`` is exactly zero and the table is strictly increasing,
    so it can be inverted for node placement.
    """

    nodes: np.ndarray
    cumulative: np.ndarray

    def __post_init__(self):
        nodes = _as_float_array(self.nodes, "nodes")
        cumulative = _as_float_array(self.cumulative, "cumulative")
        if nodes.size != cumulative.size:
            raise ValueError("nodes and cumulative must have equal length")
        if nodes.size < 2:
            raise ValueError("monitor needs at least two nodes")
        if cumulative[0] != 0.0:
            raise ValueError("cumulative must start at exactly 0")
        if not np.all(np.diff(cumulative) > 0.0):
            raise ValueError("cumulative must be strictly increasing")
        if not np.all(np.diff(nodes) > 0.0):
            raise ValueError("monitor nodes must be strictly increasing")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "cumulative", cumulative)

    @property
    def total(self) -> float:
        return float(self.cumulative[-1])

    def value_at(self, x: np.ndarray) -> np.ndarray:
        """Evaluate the monitor at arbitrary positions inside the domain."""
        return np.interp(np.asarray(x, dtype=np.float64), self.nodes, self.cumulative)


def build_monitor(
    mesh: Mesh, scores: np.ndarray, mass_floor: float = 1e-9
) -> MonitorTable:
    """Integrate positive node scores with the trapezoid rule.

    Each segment additionally receives ``mass_floor`` times the mean mass
    density, spread in proportion to its width. Without that extra mass, a
    hot spot (corner curvature saturates near 2 per unit jump) can make
    far-field masses smaller than one float ulp of the running total,
    stalling the cumulative table. Spreading it by width adds the same
    scalar to every score, so score-proportional masses stay proportional
    and constant data still yields an exactly uniform mesh on any input
    mesh.
    """
    arr = _as_float_array(scores, "scores")
    if arr.size != len(mesh):
        raise ValueError("score count must match mesh size")
    if not np.all(arr > 0.0):
        raise ValueError("monitor scores must be strictly positive")
    if not 0.0 <= mass_floor < 1.0:
        raise ValueError("mass_floor must lie in [0, 1)")
    segment_mass = 0.5 * mesh.gaps * (arr[:-1] + arr[1:])
    if mass_floor > 0.0:
        density = segment_mass.sum() / (mesh.b - mesh.a)
        segment_mass = segment_mass + (mass_floor * density) * mesh.gaps
    cumulative = np.empty(arr.size)
    cumulative[0] = 0.0
    np.cumsum(segment_mass, out=cumulative[1:])
    return MonitorTable(mesh.nodes, cumulative)


def equidistribute(monitor: MonitorTable, n: int) -> Mesh:
    """Place ``n`` nodes so that consecutive monitor increments are equal.

    Endpoints are pinned to the monitor's domain ends. Interior nodes are
    found by inverting the piecewise-linear cumulative table at the target
    levels k * total / (n - 1); a level that hits a table breakpoint exactly
    yields that breakpoint's coordinate exactly.
    """
    if n < 2:
        raise ValueError("need at least two nodes")
    cum = monitor.cumulative
    src = monitor.nodes
    levels = (monitor.total / (n - 1)) * np.arange(1, n - 1, dtype=np.float64)
    seg = np.searchsorted(cum, levels, side="right") - 1
    seg = np.clip(seg, 0, src.size - 2)
    left_mass = cum[seg]
    t = (levels - left_mass) / (cum[seg + 1] - left_mass)
    interior = src[seg] + t * (src[seg + 1] - src[seg])
    interior = np.minimum(np.maximum(interior, src[seg]), src[seg + 1])
    nodes = np.empty(n)
    nodes[0] = src[0]
    nodes[-1] = src[-1]
    nodes[1:-1] = interior
    return Mesh(nodes)
