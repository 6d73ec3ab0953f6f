"""Rips complex enumeration for a region of a point cloud.

A vertex set spans a simplex exactly when its diameter is at most the scale,
i.e. the complex is the clique complex of the scale-neighborhood graph, so
enumeration runs by extending each q-simplex with vertices adjacent to all of
its vertices and larger than its maximum (each simplex generated once, in
lexicographic order).
"""

from __future__ import annotations

from .core import Chain, PointCloud

DEFAULT_BUDGET = 10_000_000


class BudgetExceededError(RuntimeError):
    """Simplex enumeration crossed the configured budget."""

    def __init__(self, budget: int, region_size: int):
        super().__init__(
            f"simplex budget {budget} exceeded while enumerating a region "
            f"of {region_size} points; raise the budget or lower the scale"
        )
        self.budget = budget
        self.region_size = region_size


class RipsComplex:
    """All simplices of diameter <= scale on a region, up to max_dim.

    simplices[q] is the lexicographically sorted list of q-simplices (tuples
    of global point indices); diameters[q] aligns with it.
    """

    __slots__ = ("points", "scale", "max_dim", "simplices", "diameters", "index")

    def __init__(self, points, scale, max_dim, simplices, diameters):
        self.points = points
        self.scale = scale
        self.max_dim = max_dim
        self.simplices = simplices
        self.diameters = diameters
        self.index = [
            {s: i for i, s in enumerate(level)} for level in simplices
        ]

    def count(self, q: int) -> int:
        if q < 0 or q > self.max_dim:
            return 0
        return len(self.simplices[q])

    def total(self) -> int:
        return sum(len(level) for level in self.simplices)

    def has_simplex(self, simplex) -> bool:
        q = len(simplex) - 1
        return 0 <= q <= self.max_dim and tuple(simplex) in self.index[q]

    def column_of_chain(self, chain: Chain) -> dict:
        """Chain as a sparse coefficient vector over this complex's basis."""
        q = chain.dim
        if chain.is_zero():
            return {}
        idx = self.index[q]
        col = {}
        for s, c in chain.terms.items():
            row = idx.get(s)
            if row is None:
                raise ValueError(f"simplex {s} is not in this complex")
            col[row] = c
        return col

    def chain_of_column(self, col: dict, q: int, p: int) -> Chain:
        level = self.simplices[q]
        return Chain(q, p, {level[r]: c for r, c in col.items()})


def enumerate_complex(
    points,
    cloud: PointCloud,
    scale: float,
    max_dim: int,
    budget: int = DEFAULT_BUDGET,
) -> RipsComplex:
    """Enumerate the Rips complex of a point-index set at one scale.

    Membership uses the closed condition (pairwise distances <= scale).
    Raises BudgetExceededError when the total simplex count passes budget.
    """
    if max_dim < 0:
        raise ValueError("max_dim must be >= 0")
    pts = sorted(int(i) for i in points)
    n = len(pts)
    simplices = [[] for _ in range(max_dim + 1)]
    diameters = [[] for _ in range(max_dim + 1)]
    if n == 0:
        return RipsComplex(tuple(), scale, max_dim, simplices, diameters)

    D = cloud.pairwise(pts)
    local = {g: i for i, g in enumerate(pts)}

    simplices[0] = [(g,) for g in pts]
    diameters[0] = [0.0] * n
    count = n
    if count > budget:
        raise BudgetExceededError(budget, n)

    if max_dim >= 1:
        # Neighbors above each vertex, ascending; drives the clique expansion.
        nbrs_above = {}
        for i, g in enumerate(pts):
            row = D[i]
            nbrs_above[g] = [pts[j] for j in range(i + 1, n) if row[j] <= scale]

        prev = [((g,), 0.0, nbrs_above[g]) for g in pts]
        for q in range(1, max_dim + 1):
            cur = []
            for verts, diam, cands in prev:
                li = [local[v] for v in verts]
                for w in cands:
                    lw = local[w]
                    d = diam
                    for v in li:
                        dv = D[v][lw]
                        if dv > d:
                            d = dv
                    s = verts + (w,)
                    simplices[q].append(s)
                    diameters[q].append(float(d))
                    count += 1
                    if count > budget:
                        raise BudgetExceededError(budget, n)
                    if q < max_dim:
                        ext = [u for u in cands if u > w and D[lw][local[u]] <= scale]
                        cur.append((s, float(d), ext))
            prev = cur

    return RipsComplex(tuple(pts), scale, max_dim, simplices, diameters)


def boundary_matrix(cx: RipsComplex, q: int, p: int):
    """Sparse boundary matrix from q-simplices to (q-1)-simplices over Z/p.

    Returns (nrows, columns) where columns[j] maps row index -> coefficient;
    column j holds the alternating-sign faces of the j-th q-simplex.
    """
    if q < 1 or q > cx.max_dim:
        raise ValueError(f"boundary dimension {q} out of range 1..{cx.max_dim}")
    rows = cx.index[q - 1]
    columns = []
    minus = (p - 1) % p
    for s in cx.simplices[q]:
        col = {}
        for i in range(len(s)):
            face = s[:i] + s[i + 1:]
            coeff = 1 if i % 2 == 0 else minus
            if coeff:
                col[rows[face]] = coeff
        columns.append(col)
    return len(cx.simplices[q - 1]), columns
