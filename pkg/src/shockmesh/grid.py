"""Meshes, nodal solutions, cell geometry and test problems.

Everything downstream works on a 1-D mesh of strictly increasing nodes with
one solution value per node. Cell geometry (widths of the finite-volume cells
implied by a mesh) is derived, never stored as a second solution layout.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = [
    "Mesh",
    "GridSolution",
    "CellGeometry",
    "Problem",
    "transport_problem",
    "burgers_problem",
    "validate_flux_convexity",
    "make_jump_initial",
    "total_variation",
    "detect_extremes",
]


def _as_float_array(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be a 1-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite")
    return arr


@dataclass(frozen=True)
class Mesh:
    """Strictly increasing node coordinates spanning [a, b]."""

    nodes: np.ndarray

    def __post_init__(self):
        nodes = _as_float_array(self.nodes, "nodes")
        if nodes.size < 2:
            raise ValueError("a mesh needs at least two nodes")
        if not np.all(np.diff(nodes) > 0.0):
            raise ValueError("mesh nodes must be strictly increasing")
        object.__setattr__(self, "nodes", nodes)

    @property
    def a(self) -> float:
        return float(self.nodes[0])

    @property
    def b(self) -> float:
        return float(self.nodes[-1])

    @property
    def gaps(self) -> np.ndarray:
        """Distances between consecutive nodes, length N-1."""
        return np.diff(self.nodes)

    def __len__(self) -> int:
        return self.nodes.size

    @classmethod
    def uniform(cls, n: int, a: float = 0.0, b: float = 1.0) -> "Mesh":
        if n < 2:
            raise ValueError("n must be at least 2")
        if not b > a:
            raise ValueError("b must exceed a")
        return cls(np.linspace(a, b, n))


@dataclass(frozen=True)
class GridSolution:
    """One solution value per mesh node."""

    mesh: Mesh
    values: np.ndarray

    def __post_init__(self):
        values = _as_float_array(self.values, "values")
        if values.size != len(self.mesh):
            raise ValueError(
                f"values length {values.size} does not match mesh size {len(self.mesh)}"
            )
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class CellGeometry:
    """Finite-volume cells: interfaces, their widths and centers.

    Centers sit at interface midpoints by construction, so consecutive
    centers are always half a width-sum apart. Built from a mesh via
    :meth:`from_mesh`, which places interfaces at node midpoints and extends
    one half-gap beyond each endpoint. That extension makes a uniform mesh
    produce exactly uniform cells, which the schemes rely on to reduce to
    their classical uniform-mesh stencils without roundoff.
    """

    interfaces: np.ndarray

    def __post_init__(self):
        interfaces = _as_float_array(self.interfaces, "interfaces")
        if interfaces.size < 2:
            raise ValueError("cell geometry needs at least two interfaces")
        if not np.all(np.diff(interfaces) > 0.0):
            raise ValueError("cell interfaces must be strictly increasing")
        object.__setattr__(self, "interfaces", interfaces)

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.interfaces)

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.interfaces[:-1] + self.interfaces[1:])

    @classmethod
    def from_mesh(cls, mesh: Mesh) -> "CellGeometry":
        nodes = mesh.nodes
        gaps = mesh.gaps
        interfaces = np.empty(nodes.size + 1)
        interfaces[1:-1] = 0.5 * (nodes[:-1] + nodes[1:])
        interfaces[0] = nodes[0] - 0.5 * gaps[0]
        interfaces[-1] = nodes[-1] + 0.5 * gaps[-1]
        return cls(interfaces)


@dataclass(frozen=True)
class Problem:
    """Scalar conservation law u_t + f(u)_x = 0.

    ``flux`` and ``dflux`` must accept and return numpy arrays. The flux is
    assumed convex and smooth on the range of the data; that is a caller
    contract, spot-checked by :func:`validate_flux_convexity`.
    """

    name: str
    flux: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    dflux: Callable[[np.ndarray], np.ndarray] = field(repr=False)


def transport_problem() -> Problem:
    """Linear transport, f(u) = u."""
    return Problem(
        name="transport",
        flux=lambda u: np.asarray(u, dtype=np.float64),
        dflux=lambda u: np.ones_like(np.asarray(u, dtype=np.float64)),
    )


def burgers_problem() -> Problem:
    """Burgers equation, f(u) = u^2 / 2."""
    return Problem(
        name="burgers",
        flux=lambda u: 0.5 * np.square(np.asarray(u, dtype=np.float64)),
        dflux=lambda u: np.asarray(u, dtype=np.float64),
    )


def validate_flux_convexity(
    problem: Problem, lo: float, hi: float, samples: int = 33, tol: float = 1e-12
) -> None:
    """Spot-check that f' is nondecreasing on [lo, hi].

    Raises ValueError when a sampled derivative decreases by more than
    ``tol`` times the derivative scale. A constant derivative (linear flux)
    passes.
    """
    if not hi >= lo:
        raise ValueError("empty sampling range")
    probe = np.linspace(lo, hi, samples)
    slopes = np.asarray(problem.dflux(probe), dtype=np.float64)
    scale = max(float(np.max(np.abs(slopes))), 1.0)
    if np.any(np.diff(slopes) < -tol * scale):
        raise ValueError(f"flux of problem '{problem.name}' is not convex on [{lo}, {hi}]")


def make_jump_initial(
    mesh: Mesh, x0: float, high: float = 1.0, low: float = 0.0
) -> GridSolution:
    """Step profile: ``high`` at nodes with x <= x0, ``low`` beyond."""
    if not (mesh.a < x0 < mesh.b):
        raise ValueError(f"jump position {x0} outside the open domain ({mesh.a}, {mesh.b})")
    values = np.where(mesh.nodes <= x0, float(high), float(low))
    return GridSolution(mesh, values)


def total_variation(values: np.ndarray) -> float:
    """Sum of absolute differences of consecutive values."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.size < 2:
        return 0.0
    return float(np.sum(np.abs(np.diff(arr))))


def detect_extremes(values: np.ndarray) -> list[tuple[int, str]]:
    """Indices of strict interior extremes, in increasing index order.

    A node is a strict maximum when its value exceeds both neighbors, a
    strict minimum when both neighbors exceed it. Plateau edges are not
    extremes. Endpoints are never reported.
    """
    arr = np.asarray(values, dtype=np.float64)
    if arr.size < 3:
        return []
    left = arr[:-2]
    mid = arr[1:-1]
    right = arr[2:]
    is_max = (mid > left) & (mid > right)
    is_min = (mid < left) & (mid < right)
    out: list[tuple[int, str]] = []
    for idx in np.nonzero(is_max | is_min)[0]:
        out.append((int(idx) + 1, "max" if is_max[idx] else "min"))
    return out
