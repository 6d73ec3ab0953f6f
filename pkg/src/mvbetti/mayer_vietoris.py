"""Homology of a union from homology of path-ordered pieces and overlaps.

Given pieces X_0..X_{K-1} covering a region, with X_a and X_b disjoint unless
|a - b| <= 1 and every scale-sized simplex contained in some piece, the chain
map sending an overlap chain c_k to (c_k in X_k, -c_k in X_{k+1}) sits in a
short exact sequence with the inclusion-sum onto the union.  The induced map
on homology

    f_n : (+)_k H_n(X_k intersect X_{k+1})  ->  (+)_k H_n(X_k)

determines the union's homology as coker(f_n) (+) ker(f_{n-1}).  This module
builds the f matrices from child solvers, extracts kernel and cokernel bases
exactly over Z/p, constructs an explicit union cycle for every kernel basis
vector (the connecting-map lift), and answers coords()/bound() on the union
by the standard chain-level chase, so a node composes with further nodes
exactly like a leaf solver.

All chains use global point indices, so inclusions are literal identities.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import Chain, ConsistencyError, chain_boundary
from .reduction import PrimeField, reduce_columns


def _offsets(sizes):
    off = [0]
    for s in sizes:
        off.append(off[-1] + s)
    return off


def _dict_axpy(dst: dict, src: dict, c: int, p: int) -> dict:
    c %= p
    if c:
        for r, v in src.items():
            nv = (dst.get(r, 0) + c * v) % p
            if nv:
                dst[r] = nv
            else:
                dst.pop(r, None)
    return dst


def _combo_chain(solver, n: int, coeffs, p: int) -> Chain:
    """Linear combination of a solver's representatives at dimension n."""
    out = Chain.zero(n, p)
    if not coeffs:
        return out
    reps = solver.representatives(n)
    for b, c in coeffs.items():
        out = out + reps[b].scaled(c)
    return out


def induced_map(inter, piece, n: int, sign: int, field: PrimeField):
    """Matrix of the inclusion-induced map H_n(inter) -> H_n(piece), scaled by sign.

    Columns are sparse {row: coeff}; column b is sign * coords_piece(rep_b).
    Chains carry global indices, so "inclusion" is the identity on simplices.
    """
    if isinstance(field, int):
        field = PrimeField(field)
    cols = []
    for rep in inter.representatives(n):
        try:
            co = piece.coords(rep, n)
        except ValueError as exc:
            raise ConsistencyError(
                f"overlap representative is not a cycle of its piece: {exc}"
            ) from exc
        col = {}
        for i, c in enumerate(co):
            v = (sign * c) % field.p
            if v:
                col[i] = v
        cols.append(col)
    return cols


@dataclass
class FMatrix:
    """Block matrix of f_n over the flattened piece/overlap homology bases.

    Rows run over the pieces' bases (block k at row_offsets[k]); columns over
    the overlaps' bases.  Column (k, b) holds +coords in piece k and -coords
    in piece k+1 of overlap k's representative b.
    """

    n: int
    nrows: int
    columns: list
    row_offsets: list
    col_offsets: list

    @property
    def ncols(self) -> int:
        return len(self.columns)


def build_f(pieces, inters, n: int, field) -> FMatrix:
    """Assemble f_n from child solvers along the path covering."""
    if isinstance(field, int):
        field = PrimeField(field)
    row_off = _offsets([pc.betti(n) for pc in pieces])
    col_off = _offsets([it.betti(n) for it in inters])
    columns = [None] * col_off[-1]
    for k, inter in enumerate(inters):
        plus = induced_map(inter, pieces[k], n, +1, field)
        minus = induced_map(inter, pieces[k + 1], n, -1, field)
        for b in range(inter.betti(n)):
            col = {row_off[k] + r: c for r, c in plus[b].items()}
            col.update({row_off[k + 1] + r: c for r, c in minus[b].items()})
            columns[col_off[k] + b] = col
    return FMatrix(n=n, nrows=row_off[-1], columns=columns,
                   row_offsets=row_off, col_offsets=col_off)


class _FStructure:
    """Reduced form of one f_n: image echelon, cokernel rows, kernel basis."""

    __slots__ = ("fmat", "rank", "red", "coker_rows", "kernel_cols", "kernel_table")

    def __init__(self, fmat: FMatrix, field: PrimeField):
        self.fmat = fmat
        red = reduce_columns(fmat.nrows, fmat.columns, field, keep_v=True)
        self.red = red
        self.rank = red.rank
        pivot_rows = set(red.pivots)
        self.coker_rows = [r for r in range(fmat.nrows) if r not in pivot_rows]
        # Echelonized nullspace: a second reduction of the kernel columns of V
        # yields columns with distinct lowest rows, so membership tests in the
        # kernel are a straight elimination.
        ops = red.ops
        raw_kernel = [ops.to_dict(red.v[j]) for j in range(red.ncols)
                      if ops.is_zero(red.r[j])]
        if raw_kernel:
            kred = reduce_columns(fmat.ncols, raw_kernel, field, keep_v=False)
            self.kernel_cols = [kred.ops.to_dict(kred.r[j]) for j in range(kred.ncols)]
            self.kernel_table = {max(c): i for i, c in enumerate(self.kernel_cols)}
            if len(self.kernel_table) != len(self.kernel_cols):
                raise ConsistencyError("kernel echelon basis has colliding pivots")
        else:
            self.kernel_cols = []
            self.kernel_table = {}

    def project_coker(self, t: dict, field: PrimeField, want_membership: bool = False):
        """Reduce a target vector mod im(f): cokernel coordinates, and optionally
        the source combination y with f(y) = t when the projection is zero.

        Eliminating at the largest pivot row present only introduces entries
        at smaller rows, so the sweep terminates with support on cokernel rows.
        """
        ops = self.red.ops
        p = field.p
        working = dict(t)
        y = {}
        while True:
            hit = [r for r in working if r in self.red.pivots]
            if not hit:
                break
            l = max(hit)
            j = self.red.pivots[l]
            rj = ops.to_dict(self.red.r[j])
            c = (working[l] * field.inv(rj[l])) % p
            _dict_axpy(working, rj, -c, p)
            if want_membership:
                _dict_axpy(y, ops.to_dict(self.red.v[j]), c, p)
        coords = tuple(working.get(r, 0) for r in self.coker_rows)
        if want_membership:
            return coords, y
        return coords

    def kernel_coords(self, u: dict, field: PrimeField):
        """Coordinates of a kernel vector in the echelon kernel basis."""
        p = field.p
        working = dict(u)
        out = [0] * len(self.kernel_cols)
        while working:
            l = max(working)
            i = self.kernel_table.get(l)
            if i is None:
                raise ConsistencyError(
                    "connecting-map image landed outside ker(f); exactness violated"
                )
            kc = self.kernel_cols[i]
            c = (working[l] * field.inv(kc[l])) % p
            out[i] = (out[i] + c) % p
            _dict_axpy(working, kc, -c, p)
        return out


class MVNodeSolver:
    """Union solver assembled from path-ordered piece and overlap solvers.

    Exposes the same surface as a leaf solver (betti / representatives /
    coords / bound over the union region), so nodes stack across split axes.
    The stored basis lists cokernel classes first (one lifted piece
    representative per non-pivot row of f_n, ascending) and kernel classes
    second (one connecting lift per echelon kernel vector of f_{n-1}).
    """

    def __init__(self, pieces, inters, n_max: int, field: PrimeField, scale: float):
        if len(inters) != max(len(pieces) - 1, 0):
            raise ValueError(
                f"expected {max(len(pieces) - 1, 0)} overlap solvers for "
                f"{len(pieces)} pieces, got {len(inters)}"
            )
        self.pieces = list(pieces)
        self.inters = list(inters)
        self.n_max = n_max
        self.field = field
        self.scale = scale
        self.p = field.p

        seen = set()
        for pc in self.pieces:
            seen.update(pc.point_set)
        self.points = tuple(sorted(seen))
        self.point_set = frozenset(seen)
        for k, it in enumerate(self.inters):
            expect = self.pieces[k].point_set & self.pieces[k + 1].point_set
            if it.point_set != expect:
                raise ConsistencyError(
                    f"overlap solver {k} covers {sorted(it.point_set)} but the "
                    f"pieces intersect in {sorted(expect)}"
                )

        self._f = []        # _FStructure per dimension 0..n_max
        self._lifts = []    # per dimension n: lifts for ker f_n (cycles of dim n+1)
        self.rank_f = {}
        self._build()

    # -- construction -----------------------------------------------------

    def _build(self):
        field = self.field
        for n in range(self.n_max + 1):
            fs = _FStructure(build_f(self.pieces, self.inters, n, field), field)
            self._f.append(fs)
            self.rank_f[n] = fs.rank
            # Splitting-formula bookkeeping must agree with rank-nullity on
            # both sides; a mismatch means the reduction lost columns.
            if len(fs.coker_rows) != fs.fmat.nrows - fs.rank:
                raise ConsistencyError(f"cokernel dimension mismatch at n={n}")
            if len(fs.kernel_cols) != fs.fmat.ncols - fs.rank:
                raise ConsistencyError(f"kernel dimension mismatch at n={n}")

        for n in range(self.n_max):
            self._lifts.append([self._connecting_lift(u, n)
                                for u in self._f[n].kernel_cols])

    def _inter_combo(self, k: int, n: int, coeffs: dict) -> Chain:
        return _combo_chain(self.inters[k], n, coeffs, self.p)

    def _slice_source(self, fs: _FStructure, u: dict):
        """Split a flattened overlap-basis vector into per-overlap coefficient dicts."""
        off = fs.fmat.col_offsets
        per = [dict() for _ in self.inters]
        for r, c in u.items():
            k = 0
            while off[k + 1] <= r:
                k += 1
            per[k][r - off[k]] = c
        return per

    def _connecting_lift(self, u: dict, n: int) -> Chain:
        """Union (n+1)-cycle hitting kernel vector u of f_n under the connecting map.

        With r_k the overlap-k cycle named by u, each difference r_k - r_{k-1}
        is null-homologous in piece k precisely because f(u) = 0; summing the
        piece-level bounding chains telescopes into a cycle of the union.
        """
        fs = self._f[n]
        per = self._slice_source(fs, u)
        r_chains = [self._inter_combo(k, n, per[k]) for k in range(len(self.inters))]
        lift = Chain.zero(n + 1, self.p)
        prev = Chain.zero(n, self.p)
        for k, piece in enumerate(self.pieces):
            r_k = r_chains[k] if k < len(r_chains) else Chain.zero(n, self.p)
            t_k = r_k - prev
            s_k = piece.bound(t_k, n)
            if s_k is None:
                raise ConsistencyError(
                    f"kernel difference chain fails to bound in piece {k}; "
                    f"f-matrix and piece solvers disagree"
                )
            lift = lift + s_k
            prev = r_k
        if not chain_boundary(lift).is_zero():
            raise ConsistencyError("connecting lift is not a cycle")
        return lift

    # -- solver surface ---------------------------------------------------

    def betti(self, n: int) -> int:
        if n < 0 or n > self.n_max:
            return 0
        coker = len(self._f[n].coker_rows)
        kernel = len(self._f[n - 1].kernel_cols) if n >= 1 else 0
        return coker + kernel

    def representatives(self, n: int):
        if n < 0 or n > self.n_max:
            return []
        out = []
        fs = self._f[n]
        for r in fs.coker_rows:
            k = 0
            while fs.fmat.row_offsets[k + 1] <= r:
                k += 1
            out.append(self.pieces[k].representatives(n)[r - fs.fmat.row_offsets[k]])
        if n >= 1:
            out.extend(self._lifts[n - 1])
        return out

    def _split(self, z: Chain):
        """Assign each simplex to the lowest piece containing all its vertices."""
        parts = [dict() for _ in self.pieces]
        for s, c in z.terms.items():
            for k, piece in enumerate(self.pieces):
                ok = True
                for v in s:
                    if v not in piece.point_set:
                        ok = False
                        break
                if ok:
                    parts[k][s] = c
                    break
            else:
                for v in s:
                    if v not in self.point_set:
                        raise ValueError(f"simplex {s} lies outside this region")
                raise ConsistencyError(
                    f"simplex {s} fits no piece; Lebesgue property violated "
                    f"(diameter precondition or covering bug)"
                )
        return [Chain(z.dim, self.p, t) for t in parts]

    def _chase(self, z: Chain, n: int):
        """Run the exact-sequence chase; returns (kernel coords, xi chains, fs_n)."""
        field = self.field
        K = len(self.pieces)
        fs_n = self._f[n]

        zs = self._split(z)
        kappa = []
        if n >= 1:
            omegas = self._partial_boundaries(zs)
            u = {}
            fs_prev = self._f[n - 1]
            for k, om in enumerate(omegas):
                co = self._inter_coords(k, om, n - 1)
                for i, c in enumerate(co):
                    if c:
                        u[fs_prev.fmat.col_offsets[k] + i] = c
            kappa = fs_prev.kernel_coords(u, field)
            if any(kappa):
                zz = z
                for i, c in enumerate(kappa):
                    if c:
                        zz = zz - self._lifts[n - 1][i].scaled(c)
                zs = self._split(zz)
                omegas = self._partial_boundaries(zs)
            vs = []
            for k, om in enumerate(omegas):
                try:
                    v = self.inters[k].bound(om, n - 1)
                except ValueError as exc:
                    raise ConsistencyError(
                        f"partial boundary escaped overlap {k}: {exc}"
                    ) from exc
                if v is None:
                    raise ConsistencyError(
                        f"partial boundary is non-bounding in overlap {k} after "
                        f"kernel correction; exactness violated"
                    )
                vs.append(v)
        else:
            vs = [Chain.zero(0, self.p) for _ in range(max(K - 1, 0))]

        xis = []
        for k in range(K):
            xi = zs[k]
            if k >= 1 and not vs[k - 1].is_zero():
                xi = xi + vs[k - 1]
            if k < K - 1 and not vs[k].is_zero():
                xi = xi - vs[k]
            xis.append(xi)
        return list(kappa), xis, fs_n

    def _partial_boundaries(self, zs):
        acc = Chain.zero(zs[0].dim - 1 if zs else -1, self.p)
        out = []
        for k in range(len(zs) - 1):
            acc = acc + chain_boundary(zs[k])
            out.append(acc)
        return out

    def _inter_coords(self, k: int, om: Chain, n: int):
        try:
            return self.inters[k].coords(om, n)
        except ValueError as exc:
            raise ConsistencyError(
                f"partial boundary escaped overlap {k}: {exc}"
            ) from exc

    def _piece_target_vector(self, xis, n: int, fs_n):
        t = {}
        for k, xi in enumerate(xis):
            try:
                co = self.pieces[k].coords(xi, n)
            except ValueError as exc:
                raise ConsistencyError(
                    f"corrected piece chain is not a cycle in piece {k}: {exc}"
                ) from exc
            for i, c in enumerate(co):
                if c:
                    t[fs_n.fmat.row_offsets[k] + i] = c
        return t

    def coords(self, z: Chain, n: int):
        """Coordinates of a union cycle's class: cokernel block then kernel block."""
        if n < 0 or n > self.n_max:
            if z.is_zero():
                return ()
            raise ValueError(f"dimension {n} out of range")
        if z.is_zero():
            return (0,) * self.betti(n)
        if z.dim != n:
            raise ValueError(f"chain dimension {z.dim} does not match query dimension {n}")
        if not chain_boundary(z).is_zero():
            raise ValueError("chain is not a cycle")
        kappa, xis, fs_n = self._chase(z, n)
        t = self._piece_target_vector(xis, n, fs_n)
        coker = fs_n.project_coker(t, self.field)
        return tuple(coker) + tuple(kappa)

    def bound(self, z: Chain, n: int):
        """A union chain w with boundary exactly z, or None when [z] != 0."""
        if z.is_zero():
            return Chain.zero(n + 1, self.p)
        if n < 0 or n > self.n_max:
            raise ValueError(f"dimension {n} out of range")
        if z.dim != n:
            raise ValueError(f"chain dimension {z.dim} does not match query dimension {n}")
        if not chain_boundary(z).is_zero():
            raise ValueError("chain is not a cycle")
        kappa, xis, fs_n = self._chase(z, n)
        if any(kappa):
            return None
        t = self._piece_target_vector(xis, n, fs_n)
        coker, y = fs_n.project_coker(t, self.field, want_membership=True)
        if any(coker):
            return None
        per = self._slice_source(fs_n, y)
        rho = [self._inter_combo(k, n, per[k]) for k in range(len(self.inters))]
        w = Chain.zero(n + 1, self.p)
        prev = Chain.zero(n, self.p)
        for k, piece in enumerate(self.pieces):
            rho_k = rho[k] if k < len(rho) else Chain.zero(n, self.p)
            eta = xis[k] - rho_k + prev
            b_k = piece.bound(eta, n)
            if b_k is None:
                raise ConsistencyError(
                    f"membership combination fails to bound in piece {k}"
                )
            w = w + b_k
            prev = rho_k
        if chain_boundary(w) != z:
            raise ConsistencyError("union bound() produced a chain whose boundary differs from z")
        return w

    def betti_all(self):
        return [self.betti(n) for n in range(self.n_max + 1)]


def assemble(pieces, inters, n_max: int, field, scale: float) -> MVNodeSolver:
    """Build the union solver for path-ordered pieces and their overlaps."""
    if isinstance(field, int):
        field = PrimeField(field)
    return MVNodeSolver(pieces, inters, n_max, field, scale)
