"""Overlapping grid coverings of a point cloud.

Each axis is cut into k closed cells of width R/k + eps whose consecutive
overlaps have width exactly eps.  Because coordinate projections are
1-Lipschitz, any vertex set of diameter <= eps fits inside some cell on every
axis (a Lebesgue-number property), which is what makes simplex assignment
total.  Non-adjacent cells must be disjoint, which requires R/k > eps and is
enforced at construction from k = 3 on (two cells have no non-adjacent pair).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .core import ConsistencyError, PointCloud


class Sel(NamedTuple):
    """Per-axis region selector: the whole axis, one cell, or one overlap."""

    kind: str  # "full" | "cell" | "overlap"
    j: int


FULL = Sel("full", -1)


def cell(j: int) -> Sel:
    return Sel("cell", j)


def overlap(j: int) -> Sel:
    return Sel("overlap", j)


Box = tuple  # tuple[Sel, ...], one selector per axis


def full_box(dim: int) -> Box:
    return tuple(FULL for _ in range(dim))


def is_leaf(box: Box) -> bool:
    return all(s.kind != "full" for s in box)


def choose_k(parallel: int, dim: int, extent: float, eps: float):
    """Pick the per-axis cell count from a parallelism budget.

    Returns (k, eps_capped).  k is the largest integer whose dim-th power is
    below the parallelism budget, clamped so that cells stay wider than the
    overlap (extent/k > eps, needed for non-adjacent cells to be disjoint);
    eps_capped reports whether the clamp was what limited k.
    """
    if parallel < 1 or dim < 1:
        raise ValueError("parallel and dim must be >= 1")
    if extent <= 0 or eps <= 0:
        raise ValueError("extent and eps must be positive")
    k_par = 0
    while (k_par + 1) ** dim < parallel:  # largest k with k**dim < parallel
        k_par += 1
    # Largest k with extent/k > eps; integer search around the float quotient
    # so borderline divisions cannot push k over the constraint.
    k_eps = max(0, int(math.floor(extent / eps)))
    while k_eps >= 1 and not extent / k_eps > eps:
        k_eps -= 1
    while extent / (k_eps + 1) > eps:
        k_eps += 1
    k = max(1, min(k_par, k_eps))
    return k, k_eps < k_par


@dataclass(frozen=True)
class AxisIntervals:
    """Cell and overlap intervals along one coordinate axis."""

    axis: int
    origin: float  # minimal coordinate value on this axis
    extent: float  # shared range length R
    k: int
    eps: float
    cells: tuple       # k closed intervals [origin + j*R/k, origin + (j+1)*R/k + eps]
    overlaps: tuple    # k-1 closed intervals of width exactly eps

    def interval(self, sel: Sel):
        """The coordinate interval selected by sel, or None for the full axis."""
        if sel.kind == "full":
            return None
        if sel.kind == "cell":
            return self.cells[sel.j]
        if sel.kind == "overlap":
            return self.overlaps[sel.j]
        raise ValueError(f"unknown selector kind {sel.kind!r}")

    def assign(self, lo: float, hi: float) -> int:
        """Lowest cell index whose interval contains [lo, hi].

        Total for spans of width <= eps inside [origin, origin + extent];
        anything else means the caller violated the diameter precondition.
        """
        for j, (a, b) in enumerate(self.cells):
            if a <= lo and hi <= b:
                return j
        raise ConsistencyError(
            f"span [{lo}, {hi}] fits no cell on axis {self.axis}; "
            f"diameter precondition violated"
        )


def _build_axis(axis: int, a: float, extent: float, k: int, eps: float) -> AxisIntervals:
    if k < 1:
        raise ValueError("cell count must be >= 1")
    if k == 1:
        return AxisIntervals(axis, a, extent, 1, eps, ((a, a + extent + eps),), ())
    if k >= 3 and not extent / k > eps:
        # With only two cells there are no non-adjacent pairs, so any width
        # works; from three cells on, disjointness needs extent/k > eps.
        raise ValueError(
            f"cell count {k} too large on axis {axis}: cell width {extent / k} "
            f"must exceed eps={eps} for non-adjacent cells to stay disjoint"
        )
    w = extent / k
    cells = tuple((a + j * w, a + (j + 1) * w + eps) for j in range(k))
    overlaps = tuple((a + (j + 1) * w, a + (j + 1) * w + eps) for j in range(k - 1))
    # Guard the float endpoints themselves: cell j+2 must start strictly after
    # cell j ends, or the path-nerve hypothesis silently breaks downstream.
    for j in range(k - 2):
        if not cells[j + 2][0] > cells[j][1]:
            raise ConsistencyError(
                f"axis {axis}: cells {j} and {j + 2} touch after rounding; "
                f"reduce k or eps"
            )
    return AxisIntervals(axis, a, extent, k, eps, cells, overlaps)


@dataclass
class GridCovering:
    """Per-axis interval structure for one cloud at one top scale."""

    eps: float
    axes: tuple  # tuple[AxisIntervals, ...]
    extent: float
    _point_cache: dict = field(default_factory=dict, repr=False)

    @property
    def dim(self) -> int:
        return len(self.axes)

    @property
    def k_per_axis(self):
        return tuple(ax.k for ax in self.axes)

    def leaf_count(self) -> int:
        n = 1
        for ax in self.axes:
            n *= 2 * ax.k - 1
        return n

    def points_in_box(self, cloud: PointCloud, box: Box) -> np.ndarray:
        """Sorted global indices of cloud points inside a box (closed intervals)."""
        key = box
        cached = self._point_cache.get(key)
        if cached is not None:
            return cached
        mask = np.ones(cloud.n, dtype=bool)
        for ax, sel in zip(self.axes, box):
            iv = ax.interval(sel)
            if iv is None:
                continue
            col = cloud.coords[:, ax.axis]
            mask &= (col >= iv[0]) & (col <= iv[1])
        idx = np.nonzero(mask)[0]
        idx.setflags(write=False)
        self._point_cache[key] = idx
        return idx


def build_covering(cloud: PointCloud, eps: float, k) -> GridCovering:
    """Build the grid covering for a cloud at top scale eps.

    k is a single cell count applied to every axis or a per-axis sequence.
    A cloud with zero spread degenerates to k = 1 everywhere.
    """
    if cloud.n == 0:
        raise ValueError("cannot cover an empty cloud")
    if eps <= 0:
        raise ValueError("eps must be positive")
    mins, maxs = cloud.axis_ranges()
    extent = float((maxs - mins).max())  # one shared R across axes
    if isinstance(k, int):
        ks = [k] * cloud.dim
    else:
        ks = [int(v) for v in k]
        if len(ks) != cloud.dim:
            raise ValueError(f"expected {cloud.dim} cell counts, got {len(ks)}")
    if extent == 0.0:
        ks = [1] * cloud.dim
    axes = tuple(
        _build_axis(i, float(mins[i]), extent, ks[i], eps) for i in range(cloud.dim)
    )
    return GridCovering(eps=eps, axes=axes, extent=extent)


def assign_simplex(covering: GridCovering, axis: int, simplex, cloud: PointCloud) -> int:
    """Lowest cell on one axis containing every vertex of the simplex.

    Requires the simplex diameter <= the covering's eps; totality then follows
    from the Lebesgue property of the cells.
    """
    xs = cloud.coords[list(simplex), axis]
    return covering.axes[axis].assign(float(xs.min()), float(xs.max()))


class AxisSplit(NamedTuple):
    axis: int
    pieces: tuple    # k boxes, cell selectors ascending
    overlaps: tuple  # k-1 boxes, overlap selectors ascending


def split_axis(box: Box, covering: GridCovering):
    """Split a box along its first full axis; None when the box is a leaf.

    The pieces set that axis to each cell in order, the overlap boxes to each
    consecutive overlap; all other selectors are inherited unchanged.
    """
    for i, sel in enumerate(box):
        if sel.kind == "full":
            k = covering.axes[i].k
            pieces = tuple(box[:i] + (cell(j),) + box[i + 1:] for j in range(k))
            inters = tuple(box[:i] + (overlap(j),) + box[i + 1:] for j in range(k - 1))
            return AxisSplit(axis=i, pieces=pieces, overlaps=inters)
    return None
