"""Sparse exact matrices over LaurentHalf or Q(zeta_r), with field elimination for the latter."""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .cyclotomic import ONE, ZERO, CyclotomicField, CycNum, LaurentHalf, invert


class LaurentRing:
    """Marker ring for matrices over LaurentHalf."""

    zero = ZERO
    one = ONE
    is_field = False

    def __repr__(self):
        return "LaurentRing()"


LAURENT = LaurentRing()

Vector = dict  # sparse column: {row index: nonzero entry}


def ring_of(x) -> LaurentRing | CyclotomicField:
    if isinstance(x, CycNum):
        return x.field
    return LAURENT


def _axpy(y: Vector, c, x: Vector) -> None:
    """y += c * x, in place, dropping zeros."""
    for k, v in x.items():
        t = y.get(k)
        t = c * v if t is None else t + c * v
        if t:
            y[k] = t
        else:
            y.pop(k, None)


class ExactMatrix:
    """Column-sparse exact matrix; entries are LaurentHalf or CycNum, zeros never stored."""

    __slots__ = ("nrows", "ncols", "cols", "ring")

    def __init__(self, nrows: int, ncols: int, cols: Sequence[Vector] | None = None, ring=LAURENT):
        self.nrows = nrows
        self.ncols = ncols
        self.ring = ring
        if cols is None:
            self.cols = tuple({} for _ in range(ncols))
        else:
            if len(cols) != ncols:
                raise ValueError("column count mismatch")
            self.cols = tuple({i: v for i, v in c.items() if v} for c in cols)

    # construction ---------------------------------------------------------

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], ring=None, ncols: int | None = None) -> "ExactMatrix":
        nrows = len(rows)
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        if ring is None:
            ring = LAURENT
            for row in rows:
                for v in row:
                    if isinstance(v, CycNum):
                        ring = v.field
                        break
        cols = [dict() for _ in range(ncols)]
        for i, row in enumerate(rows):
            if len(row) != ncols:
                raise ValueError("ragged rows")
            for j, v in enumerate(row):
                v = _coerce_entry(v, ring)
                if v:
                    cols[j][i] = v
        return cls(nrows, ncols, cols, ring)

    @classmethod
    def from_columns(cls, nrows: int, cols: Sequence[Vector], ring) -> "ExactMatrix":
        return cls(nrows, len(cols), list(cols), ring)

    @classmethod
    def identity(cls, n: int, ring=LAURENT) -> "ExactMatrix":
        return cls(n, n, [{j: ring.one} for j in range(n)], ring)

    @classmethod
    def zeros(cls, nrows: int, ncols: int, ring=LAURENT) -> "ExactMatrix":
        return cls(nrows, ncols, None, ring)

    @classmethod
    def diagonal(cls, values: Sequence, ring=LAURENT) -> "ExactMatrix":
        return cls(len(values), len(values), [{j: _coerce_entry(v, ring)} for j, v in enumerate(values)], ring)

    # access ---------------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def __getitem__(self, ij: tuple[int, int]):
        i, j = ij
        return self.cols[j].get(i, self.ring.zero)

    def column(self, j: int) -> Vector:
        return dict(self.cols[j])

    def to_rows(self) -> list[list]:
        rows = [[self.ring.zero] * self.ncols for _ in range(self.nrows)]
        for j, col in enumerate(self.cols):
            for i, v in col.items():
                rows[i][j] = v
        return rows

    def nnz(self) -> int:
        return sum(len(c) for c in self.cols)

    def is_zero(self) -> bool:
        return not any(self.cols)

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return self.shape == other.shape and all(a == b for a, b in zip(self.cols, other.cols))

    def __repr__(self):
        return f"ExactMatrix({self.nrows}x{self.ncols}, ring={self.ring!r}, nnz={self.nnz()})"

    # arithmetic -----------------------------------------------------------

    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._check_same(other)
        cols = []
        for a, b in zip(self.cols, other.cols):
            c = dict(a)
            _axpy(c, self.ring.one, b)
            cols.append(c)
        return ExactMatrix(self.nrows, self.ncols, cols, self.ring)

    def __sub__(self, other: "ExactMatrix") -> "ExactMatrix":
        return self + (-other)

    def __neg__(self) -> "ExactMatrix":
        return ExactMatrix(self.nrows, self.ncols, [{i: -v for i, v in c.items()} for c in self.cols], self.ring)

    def scale(self, c) -> "ExactMatrix":
        c = _coerce_entry(c, self.ring)
        return ExactMatrix(self.nrows, self.ncols, [{i: c * v for i, v in col.items()} for col in self.cols], self.ring)

    def _check_same(self, other: "ExactMatrix"):
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")

    def apply(self, v: Vector) -> Vector:
        out: Vector = {}
        for k, c in v.items():
            col = self.cols[k]
            if col:
                _axpy(out, c, col)
        return out

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.ncols != other.nrows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        return ExactMatrix(self.nrows, other.ncols, [self.apply(c) for c in other.cols], self.ring)

    def transpose(self) -> "ExactMatrix":
        cols: list[Vector] = [dict() for _ in range(self.nrows)]
        for j, col in enumerate(self.cols):
            for i, v in col.items():
                cols[i][j] = v
        return ExactMatrix(self.ncols, self.nrows, cols, self.ring)

    @property
    def T(self) -> "ExactMatrix":
        return self.transpose()

    def map(self, f: Callable, ring=None) -> "ExactMatrix":
        """Entrywise image under a ring map (e.g. specialization)."""
        ring = self.ring if ring is None else ring
        return ExactMatrix(self.nrows, self.ncols, [{i: f(v) for i, v in c.items()} for c in self.cols], ring)

    def conj(self) -> "ExactMatrix":
        return self.map(lambda v: v.conj() if isinstance(v, CycNum) else v.bar())

    def conj_transpose(self) -> "ExactMatrix":
        return self.conj().transpose()

    @property
    def H(self) -> "ExactMatrix":
        return self.conj_transpose()

    def hstack(self, *others: "ExactMatrix") -> "ExactMatrix":
        cols = list(self.cols)
        for o in others:
            if o.nrows != self.nrows:
                raise ValueError("row mismatch in hstack")
            cols.extend(o.cols)
        return ExactMatrix(self.nrows, len(cols), cols, self.ring)

    def select_columns(self, idx: Iterable[int]) -> "ExactMatrix":
        cols = [self.cols[j] for j in idx]
        return ExactMatrix(self.nrows, len(cols), cols, self.ring)

    def embed(self, k: int = 1):
        """Complex numpy array under the k-th embedding of Q(zeta_r)."""
        import numpy as np

        out = np.zeros((self.nrows, self.ncols), dtype=complex)
        for j, col in enumerate(self.cols):
            for i, v in col.items():
                out[i, j] = v.embed(k)
        return out

    def to_json(self) -> list[list[dict]]:
        return [[v.to_json() if isinstance(v, CycNum) else str(v) for v in row] for row in self.to_rows()]

    # field elimination ------------------------------------------------------

    def _require_field(self):
        if not isinstance(self.ring, CyclotomicField):
            raise TypeError("elimination requires entries in Q(zeta_r); specialize first")

    def kernel(self) -> "ExactMatrix":
        """Basis of {x : Ax = 0}, normalized to the identity on the free coordinates."""
        self._require_field()
        ech = RowEchelon(self.ncols)
        for row in self.transpose().cols:
            ech.insert(row)
        return ech.kernel_basis(self.ring)

    def rank(self) -> int:
        self._require_field()
        if self.nrows < self.ncols:
            ech = RowEchelon(self.nrows)
            for col in self.cols:
                ech.insert(dict(col))
        else:
            ech = RowEchelon(self.ncols)
            for row in self.transpose().cols:
                ech.insert(row)
        return ech.rank

    def column_echelon(self) -> tuple["ExactMatrix", list[int]]:
        """Reduced column echelon form of the column span (pivot = first nonzero row)."""
        self._require_field()
        ech = ColumnEchelon()
        for col in self.cols:
            ech.insert(dict(col))
        basis, pivots = ech.reduced()
        return ExactMatrix(self.nrows, len(basis), basis, self.ring), pivots

    def solve(self, rhs: "ExactMatrix") -> "ExactMatrix":
        """Some X with self @ X = rhs; raises ValueError when inconsistent."""
        self._require_field()
        n = self.ncols
        aug = self.hstack(rhs).transpose().cols  # rows of [A | B]
        ech = RowEchelon(n + rhs.ncols, pivot_limit=n)
        for row in aug:
            ech.insert(row)
        return ech.particular_solution(rhs.ncols, self.ring)

    def inverse(self) -> "ExactMatrix":
        if self.nrows != self.ncols:
            raise ValueError("inverse of a non-square matrix")
        X = self.solve(ExactMatrix.identity(self.nrows, self.ring))
        if self @ X != ExactMatrix.identity(self.nrows, self.ring):
            raise ValueError("matrix is singular")
        return X


def _coerce_entry(v, ring):
    if isinstance(v, (LaurentHalf, CycNum)):
        return v
    if ring is LAURENT or isinstance(ring, LaurentRing):
        return LaurentHalf(v)
    return ring.from_int(v)


class RowEchelon:
    """Incremental sparse row echelon form.

    Each stored row has a pivot equal to its largest column index (among
    columns < pivot_limit), normalized to 1, with other entries at smaller
    columns. Inserting a row reduces it against existing pivots from the top.
    """

    def __init__(self, ncols: int, pivot_limit: int | None = None):
        self.ncols = ncols
        self.limit = ncols if pivot_limit is None else pivot_limit
        self.rows: dict[int, Vector] = {}
        self.inconsistent: list[Vector] = []

    @property
    def rank(self) -> int:
        return len(self.rows)

    def insert(self, row: Vector) -> int | None:
        row = {k: v for k, v in row.items() if v}
        limit = self.limit
        while True:
            keys = [k for k in row if k < limit]
            if not keys:
                if row:
                    self.inconsistent.append(row)
                return None
            p = max(keys)
            prow = self.rows.get(p)
            if prow is None:
                inv = invert(row[p])
                self.rows[p] = {k: v * inv for k, v in row.items()}
                self.rows[p][p] = row[p].field.one
                return p
            c = row.pop(p)
            for k, v in prow.items():
                if k == p:
                    continue
                t = row.get(k)
                t = -(c * v) if t is None else t - c * v
                if t:
                    row[k] = t
                else:
                    row.pop(k, None)

    def kernel_basis(self, field: CyclotomicField) -> ExactMatrix:
        pivots = sorted(self.rows)
        pset = set(pivots)
        free = [j for j in range(self.ncols) if j not in pset]
        # x_p = -sum_{j<p} row_p[j] x_j; solve in increasing pivot order
        basis = []
        for f in free:
            x: Vector = {f: field.one}
            for p in pivots:
                if p < f:
                    continue
                acc = None
                for k, v in self.rows[p].items():
                    if k != p:
                        xv = x.get(k)
                        if xv is not None:
                            acc = v * xv if acc is None else acc + v * xv
                if acc:
                    x[p] = -acc
            basis.append(x)
        return ExactMatrix(self.ncols, len(basis), basis, field)

    def particular_solution(self, nrhs: int, field: CyclotomicField) -> ExactMatrix:
        if self.inconsistent:
            raise ValueError("linear system has no solution")
        n = self.limit
        pivots = sorted(self.rows)
        sols = []
        for t in range(nrhs):
            x: Vector = {}
            for p in pivots:
                row = self.rows[p]
                acc = row.get(n + t)
                for k, v in row.items():
                    if k < p:
                        xv = x.get(k)
                        if xv is not None:
                            acc = -(v * xv) if acc is None else acc - v * xv
                if acc:
                    x[p] = acc
            sols.append(x)
        return ExactMatrix(n, nrhs, sols, field)


class ColumnEchelon:
    """Incremental column echelon form with pivot = smallest row index."""

    def __init__(self):
        self.vecs: dict[int, Vector] = {}

    @property
    def rank(self) -> int:
        return len(self.vecs)

    def reduce(self, v: Vector) -> Vector:
        v = {k: x for k, x in v.items() if x}
        heap = [k for k in v if k in self.vecs]
        heapq.heapify(heap)
        while heap:
            p = heapq.heappop(heap)
            c = v.get(p)
            if c is None:
                continue
            for k, x in self.vecs[p].items():
                had = k in v
                t = v.get(k)
                t = -(c * x) if t is None else t - c * x
                if t:
                    v[k] = t
                    if not had and k in self.vecs:
                        heapq.heappush(heap, k)
                else:
                    v.pop(k, None)
        return v

    def insert(self, v: Vector) -> int | None:
        v = self.reduce(v)
        if not v:
            return None
        p = min(v)
        inv = invert(v[p])
        self.vecs[p] = {k: x * inv for k, x in v.items()}
        return p

    def reduced(self) -> tuple[list[Vector], list[int]]:
        """Fully reduced basis sorted by pivot row, and the pivot rows."""
        pivots = sorted(self.vecs)
        done: dict[int, Vector] = {}
        for p in reversed(pivots):
            v = dict(self.vecs[p])
            for q in sorted(k for k in v if k in done and k != p):
                c = v.get(q)
                if c:
                    _axpy(v, -c, done[q])
            done[p] = v
        return [done[p] for p in pivots], pivots


@dataclass
class Quotient:
    """Quotient of a coordinate space by a subspace U given by spanning vectors.

    A vector's class is represented by its normal form modulo U. Basis
    vectors of U are kept with pivot = largest index, and the quotient
    coordinates are the entries of the normal form at non-pivot indices.
    """

    dim_ambient: int
    field: CyclotomicField
    rows: dict[int, Vector]

    @classmethod
    def build(cls, dim_ambient: int, field: CyclotomicField, spanning: Iterable[Vector]) -> "Quotient":
        ech = RowEchelon(dim_ambient)
        for v in spanning:
            ech.insert(dict(v))
        return cls(dim_ambient, field, ech.rows)

    @property
    def free(self) -> list[int]:
        return [j for j in range(self.dim_ambient) if j not in self.rows]

    @property
    def dim(self) -> int:
        return self.dim_ambient - len(self.rows)

    def normal_form(self, v: Vector) -> Vector:
        v = {k: x for k, x in v.items() if x}
        heap = [-k for k in v if k in self.rows]
        heapq.heapify(heap)
        while heap:
            p = -heapq.heappop(heap)
            c = v.pop(p, None)
            if c is None:
                continue
            for k, x in self.rows[p].items():
                if k == p:
                    continue
                had = k in v
                t = v.get(k)
                t = -(c * x) if t is None else t - c * x
                if t:
                    v[k] = t
                    if not had and k in self.rows:
                        heapq.heappush(heap, -k)
                else:
                    v.pop(k, None)
        return v

    def project(self, v: Vector) -> Vector:
        """Quotient coordinates, indexed by position in self.free."""
        nf = self.normal_form(v)
        index = {j: i for i, j in enumerate(self.free)}
        return {index[k]: x for k, x in nf.items()}

    def matrix(self) -> ExactMatrix:
        """The surjection onto the quotient as a (dim x dim_ambient) matrix."""
        cols = [self.project({j: self.field.one}) for j in range(self.dim_ambient)]
        return ExactMatrix(self.dim, self.dim_ambient, cols, self.field)


def coordinates_in_echelon(basis: ExactMatrix, pivots: Sequence[int], v: Vector) -> Vector:
    """Coefficients of v in a reduced column echelon basis; ValueError if v is outside the span."""
    coeffs = {j: v[p] for j, p in enumerate(pivots) if v.get(p)}
    rest = dict(v)
    for j, c in coeffs.items():
        _axpy(rest, -c, basis.cols[j])
    if rest:
        raise ValueError("vector is not in the span of the basis")
    return coeffs
