"""Exact homology linear algebra over Z/p.

Column reduction (R = D*V with V invertible upper-triangular) drives three
things: Betti numbers of a region at a fixed scale, membership queries
(express a cycle in the homology basis / produce an explicit bounding chain),
and the direct filtration barcode used as an independent check on the
divide-and-conquer path.

Columns are sparse dicts {row: coeff}; over Z/2 they are packed into Python
ints (bit r = row r), which makes column addition a single XOR.
"""

from __future__ import annotations

from typing import NamedTuple

from .core import Chain, ConsistencyError, PointCloud, PrimeField, chain_boundary
from .rips import DEFAULT_BUDGET, boundary_matrix, enumerate_complex


# ---------------------------------------------------------------------------
# Column representations


class _BitOps:
    """Columns as int bitsets; valid only for p = 2."""

    @staticmethod
    def from_dict(col):
        v = 0
        for r in col:
            v |= 1 << r
        return v

    @staticmethod
    def to_dict(col):
        out = {}
        r = 0
        while col:
            if col & 1:
                out[r] = 1
            col >>= 1
            r += 1
        return out

    @staticmethod
    def is_zero(col):
        return col == 0

    @staticmethod
    def low(col):
        return col.bit_length() - 1

    @staticmethod
    def get(col, row):
        return (col >> row) & 1

    @staticmethod
    def axpy(dst, src, c):
        return dst ^ src if c & 1 else dst

    @staticmethod
    def unit(row):
        return 1 << row

    @staticmethod
    def copy(col):
        return col

    zero = 0


class _DictOps:
    """Columns as {row: nonzero residue} dicts, any prime p."""

    def __init__(self, field: PrimeField):
        self.field = field

    @staticmethod
    def from_dict(col):
        return dict(col)

    @staticmethod
    def to_dict(col):
        return dict(col)

    @staticmethod
    def is_zero(col):
        return not col

    @staticmethod
    def low(col):
        return max(col)

    @staticmethod
    def get(col, row):
        return col.get(row, 0)

    def axpy(self, dst, src, c):
        p = self.field.p
        c %= p
        if c == 0:
            return dst
        for r, v in src.items():
            nv = (dst.get(r, 0) + c * v) % p
            if nv:
                dst[r] = nv
            else:
                dst.pop(r, None)
        return dst

    @staticmethod
    def unit(row):
        return {row: 1}

    @staticmethod
    def copy(col):
        return dict(col)

    @property
    def zero(self):
        return {}


def _ops_for(field: PrimeField):
    return _BitOps() if field.p == 2 else _DictOps(field)


# ---------------------------------------------------------------------------
# Reduction


class ReducedPair:
    """Result of left-to-right column reduction: R = D*V exactly over Z/p.

    V is invertible upper-triangular; distinct nonzero columns of R have
    distinct lowest nonzero rows, recorded in pivots (low row -> column).
    """

    __slots__ = ("nrows", "ncols", "field", "ops", "r", "v", "pivots")

    def __init__(self, nrows, ncols, field, ops, r, v, pivots):
        self.nrows = nrows
        self.ncols = ncols
        self.field = field
        self.ops = ops
        self.r = r
        self.v = v
        self.pivots = pivots

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def r_dict(self, j) -> dict:
        return self.ops.to_dict(self.r[j])

    def v_dict(self, j) -> dict:
        return self.ops.to_dict(self.v[j])


def reduce_columns(nrows, columns, field: PrimeField, keep_v: bool = True) -> ReducedPair:
    """Left-to-right column reduction of a sparse matrix over Z/p.

    columns is a list of {row: coeff} dicts.  While a column shares its lowest
    nonzero row with an earlier column, the appropriate multiple of that
    earlier column is subtracted; V records the operations.  Deterministic
    given the column order.
    """
    ops = _ops_for(field)
    p = field.p
    R = [ops.from_dict(c) for c in columns]
    V = [ops.unit(j) for j in range(len(columns))] if keep_v else None
    pivots = {}
    for j in range(len(columns)):
        col = R[j]
        vcol = V[j] if keep_v else None
        while not ops.is_zero(col):
            l = ops.low(col)
            k = pivots.get(l)
            if k is None:
                pivots[l] = j
                break
            c = (-ops.get(col, l) * field.inv(ops.get(R[k], l))) % p
            col = ops.axpy(col, R[k], c)
            if keep_v:
                vcol = ops.axpy(vcol, V[k], c)
        R[j] = col
        if keep_v:
            V[j] = vcol
    return ReducedPair(nrows, len(columns), field, ops, R, V, pivots)


# ---------------------------------------------------------------------------
# Leaf homology solver


class _TableEntry(NamedTuple):
    col: object          # reduced column (ops representation), nonzero
    kind: str            # "boundary" | "rep"
    payload: object      # boundary: preimage column over (n+1)-simplices; rep: basis index


class LeafSolver:
    """Homology of one region at one scale, answered by direct reduction.

    For each dimension n <= n_max the solver holds an elimination table whose
    column space is exactly the cycle space Z_n: the reduced image of the
    (n+1)-boundary (with preimages) plus an echelon set of homology
    representatives.  betti(n) = dim Z_n - rank d_{n+1}; coords() expresses a
    cycle in the representative basis; bound() returns an explicit preimage
    under the boundary map whenever the class vanishes.
    """

    def __init__(self, points, cloud: PointCloud, scale: float, n_max: int,
                 field: PrimeField, budget: int = DEFAULT_BUDGET):
        self.cloud = cloud
        self.scale = scale
        self.n_max = n_max
        self.field = field
        self.complex = enumerate_complex(points, cloud, scale, n_max + 1, budget)
        self.points = self.complex.points
        self.point_set = frozenset(self.points)
        self._ops = _ops_for(field)
        self._tables = []   # per dimension: {low row: _TableEntry}
        self._reps = []     # per dimension: list of rep columns (ops repr)
        self.rank_d = {}    # boundary-map ranks, by source dimension
        self._build()

    # -- construction

    def _build(self):
        cx = self.complex
        field = self.field
        ops = self._ops
        reduced = {}
        for q in range(1, self.n_max + 2):
            if cx.count(q) == 0:
                reduced[q] = None
                self.rank_d[q] = 0
                continue
            nrows, cols = boundary_matrix(cx, q, field.p)
            reduced[q] = reduce_columns(nrows, cols, field, keep_v=True)
            self.rank_d[q] = reduced[q].rank

        for n in range(0, self.n_max + 1):
            table = {}
            red_next = reduced.get(n + 1)
            if red_next is not None:
                for l, j in red_next.pivots.items():
                    table[l] = _TableEntry(red_next.r[j], "boundary", red_next.v[j])

            # Candidate cycle basis of Z_n: kernel columns of d_n (all unit
            # columns when n = 0, where the boundary map is zero).
            candidates = []
            if n == 0:
                candidates = [ops.unit(j) for j in range(cx.count(0))]
            else:
                red_this = reduced.get(n)
                if red_this is not None:
                    candidates = [
                        red_this.v[j]
                        for j in range(red_this.ncols)
                        if ops.is_zero(red_this.r[j])
                    ]

            reps = []
            p = field.p
            for cand in candidates:
                col = ops.copy(cand)  # candidates alias V columns; never mutate those
                while not ops.is_zero(col):
                    l = ops.low(col)
                    e = table.get(l)
                    if e is None:
                        table[l] = _TableEntry(col, "rep", len(reps))
                        reps.append(col)
                        break
                    c = (-ops.get(col, l) * field.inv(ops.get(e.col, l))) % p
                    col = ops.axpy(col, e.col, c)
            self._tables.append(table)
            self._reps.append(reps)

            n_cycles = cx.count(n) - (self.rank_d.get(n, 0) if n >= 1 else 0)
            if len(reps) != n_cycles - self.rank_d.get(n + 1, 0):
                raise ConsistencyError(
                    f"homology basis size mismatch at dimension {n}: "
                    f"{len(reps)} reps vs {n_cycles - self.rank_d.get(n + 1, 0)} expected"
                )

    # -- queries

    def betti(self, n: int) -> int:
        if n < 0 or n > self.n_max:
            return 0
        return len(self._reps[n])

    def representatives(self, n: int):
        """Cycle chains whose classes form the homology basis at dimension n."""
        if n < 0 or n > self.n_max:
            return []
        cx = self.complex
        p = self.field.p
        return [cx.chain_of_column(self._ops.to_dict(c), n, p) for c in self._reps[n]]

    def _eliminate(self, z: Chain, n: int):
        """Express a cycle as (rep coordinates, boundary preimage column)."""
        ops = self._ops
        p = self.field.p
        if z.is_zero():
            return [0] * len(self._reps[n]), ops.zero
        if z.dim != n:
            raise ValueError(f"chain dimension {z.dim} does not match query dimension {n}")
        col = ops.from_dict(self.complex.column_of_chain(z))
        table = self._tables[n]
        coords = [0] * len(self._reps[n])
        w = ops.zero
        while not ops.is_zero(col):
            l = ops.low(col)
            e = table.get(l)
            if e is None:
                raise ValueError(
                    f"chain is not a cycle of this region's complex (unmatched row {l} "
                    f"at dimension {n})"
                )
            c = (ops.get(col, l) * self.field.inv(ops.get(e.col, l))) % p
            col = ops.axpy(col, e.col, (-c) % p)
            if e.kind == "boundary":
                w = ops.axpy(w, e.payload, c)
            else:
                coords[e.payload] = (coords[e.payload] + c) % p
        return coords, w

    def coords(self, z: Chain, n: int):
        """Coordinates of a cycle's class in the homology basis (length betti(n))."""
        if n < 0 or n > self.n_max:
            if z.is_zero():
                return ()
            raise ValueError(f"dimension {n} out of range")
        c, _ = self._eliminate(z, n)
        return tuple(c)

    def bound(self, z: Chain, n: int):
        """A chain w with boundary exactly z, or None when [z] != 0.

        The returned chain is re-checked against z before being returned.
        """
        if z.is_zero():
            return Chain.zero(n + 1, self.field.p)
        if n < 0 or n > self.n_max:
            raise ValueError(f"dimension {n} out of range")
        coords, w = self._eliminate(z, n)
        if any(coords):
            return None
        chain = self.complex.chain_of_column(self._ops.to_dict(w), n + 1, self.field.p)
        if chain_boundary(chain) != z:
            raise ConsistencyError("bound() produced a chain whose boundary differs from z")
        return chain

    def betti_all(self):
        return [self.betti(n) for n in range(self.n_max + 1)]


def build_leaf(points, cloud, scale, n_max, field, budget: int = DEFAULT_BUDGET) -> LeafSolver:
    """Region solver over its Rips complex at the given scale."""
    if isinstance(field, int):
        field = PrimeField(field)
    return LeafSolver(points, cloud, scale, n_max, field, budget)


# ---------------------------------------------------------------------------
# Direct persistence oracle


class Bar(NamedTuple):
    dim: int
    birth: float
    death: object  # float, or None for a class alive at the top scale


def persistence_barcode(points, cloud, eps_max, n_max, field,
                        budget: int = DEFAULT_BUDGET, clearing: bool = False):
    """Barcode of the scale-filtered Rips complex up to eps_max.

    Simplices enter at their diameter; ties are ordered by dimension then
    lexicographic vertex order, so faces always precede cofaces.  Pivots of
    the reduced boundary matrix give (birth, death) pairs; unpaired cycles of
    dimension <= n_max become open bars.  Zero-length pairs are dropped.

    With clearing enabled, dimensions are reduced top-down and any column
    whose simplex was already captured as a pivot row one dimension up is
    skipped (it is guaranteed to reduce to zero); the bars are identical.
    """
    if isinstance(field, int):
        field = PrimeField(field)
    cx = enumerate_complex(points, cloud, eps_max, n_max + 1, budget)

    entries = []
    for q in range(cx.max_dim + 1):
        level = cx.simplices[q]
        diams = cx.diameters[q]
        for i, s in enumerate(level):
            entries.append((diams[i], q, s))
    entries.sort()
    pos = {s: i for i, (_, _, s) in enumerate(entries)}

    minus = field.p - 1

    def column_for(s, q):
        col = {}
        for i in range(len(s)):
            face = s[:i] + s[i + 1:]
            col[pos[face]] = 1 if i % 2 == 0 else minus
        return col

    pivots = {}     # global row position -> global column position
    zero_cols = set()
    if not clearing:
        columns = [column_for(s, q) if q >= 1 else {} for _, q, s in entries]
        red = reduce_columns(len(entries), columns, field, keep_v=False)
        pivots = dict(red.pivots)
        zero_cols = {j for j in range(len(entries)) if red.ops.is_zero(red.r[j])}
    else:
        cleared = set()
        for q in range(cx.max_dim, 0, -1):
            block = [(pos[s], s) for _, qq, s in entries if qq == q]
            block.sort()
            cols = [{} if p0 in cleared else column_for(s, q) for p0, s in block]
            red = reduce_columns(len(entries), cols, field, keep_v=False)
            for l, j in red.pivots.items():
                pivots[l] = block[j][0]
                cleared.add(l)
            for j, (p0, _) in enumerate(block):
                if red.ops.is_zero(red.r[j]) and p0 not in cleared:
                    zero_cols.add(p0)
        zero_cols.update(p0 for p0, (_, q, _) in enumerate(entries) if q == 0)

    bars = []
    dead_rows = set(pivots)
    for l, j in pivots.items():
        birth_diam, birth_dim, _ = entries[l]
        death_diam = entries[j][0]
        if death_diam > birth_diam:
            bars.append(Bar(birth_dim, birth_diam, death_diam))
    for j, (diam, q, _) in enumerate(entries):
        if q <= n_max and j not in dead_rows and j in zero_cols:
            bars.append(Bar(q, diam, None))
    bars.sort(key=lambda b: (b.dim, b.birth, -1.0 if b.death is None else b.death))
    return bars


def betti_at_scale(bars, n: int, scale: float) -> int:
    """Number of dimension-n bars alive at the given scale."""
    return sum(
        1 for b in bars if b.dim == n and b.birth <= scale and (b.death is None or b.death > scale)
    )
