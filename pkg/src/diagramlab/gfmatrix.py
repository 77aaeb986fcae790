"""Dense linear algebra over small finite fields, table-driven.

Element codes index precomputed add/mul tables (numpy arrays), so row
operations vectorize; naive cubic products are plenty at desk scale
(dimensions up to q+1 with q <= 125).  Echelon forms are fully reduced
and serve as the canonical representation of subspaces.
"""

from __future__ import annotations

import numpy as np

from .gf import FieldDescriptor

# Tables are q x q; keep q modest.
_TABLE_FIELD_LIMIT = 512


class GFTable:
    """Add/mul/inverse tables for a field of small order."""

    def __init__(self, field: FieldDescriptor):
        q = field.order
        if q > _TABLE_FIELD_LIMIT:
            raise ValueError(f"field order {q} too large for dense tables")
        self.field = field
        self.q = q
        add = np.zeros((q, q), dtype=np.int16)
        mul = np.zeros((q, q), dtype=np.int16)
        for a in range(q):
            for b in range(a, q):
                s = field.add_codes(a, b)
                add[a, b] = s
                add[b, a] = s
                m = field.mul_codes(a, b)
                mul[a, b] = m
                mul[b, a] = m
        self.ADD = add
        self.MUL = mul
        self.NEG = np.array([field.neg_code(a) for a in range(q)], dtype=np.int16)
        self.SUB = add[:, self.NEG]
        inv = np.zeros(q, dtype=np.int16)
        for a in range(1, q):
            inv[a] = field.inv_code(a)
        self.INV = inv
        field._ensure_tables()
        self.gen_code = field._gen_code
        self._log = field._log

    def log(self, code: int) -> int:
        """Discrete log base the canonical generator."""
        if code == 0:
            raise ZeroDivisionError("log of zero")
        return self._log[code]

    def pow_code(self, a: int, e: int) -> int:
        return self.field.pow_code(a, e)

    def vec(self, values) -> np.ndarray:
        return np.asarray(values, dtype=np.int16)

    def zeros(self, n: int) -> np.ndarray:
        return np.zeros(n, dtype=np.int16)

    def add_vec(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        return self.ADD[u, v]

    def sub_vec(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        return self.SUB[u, v]

    def scale_vec(self, c: int, v: np.ndarray) -> np.ndarray:
        return self.MUL[c][v]


class DenseMatrix:
    """Row-major matrix over a tabled field; rows/cols are plain numpy views."""

    __slots__ = ("table", "data")

    def __init__(self, table: GFTable, data: np.ndarray):
        self.table = table
        self.data = np.asarray(data, dtype=np.int16)

    @classmethod
    def zeros(cls, table: GFTable, rows: int, cols: int) -> "DenseMatrix":
        return cls(table, np.zeros((rows, cols), dtype=np.int16))

    @classmethod
    def identity(cls, table: GFTable, n: int) -> "DenseMatrix":
        m = np.zeros((n, n), dtype=np.int16)
        one = table.field.encode((1,))
        np.fill_diagonal(m, one)
        return cls(table, m)

    @classmethod
    def from_rows(cls, table: GFTable, rows) -> "DenseMatrix":
        return cls(table, np.array(rows, dtype=np.int16))

    @property
    def shape(self):
        return self.data.shape

    def copy(self) -> "DenseMatrix":
        return DenseMatrix(self.table, self.data.copy())

    def __eq__(self, other):
        return isinstance(other, DenseMatrix) and np.array_equal(self.data, other.data)

    def __hash__(self):  # pragma: no cover - matrices are not dict keys in practice
        return hash(self.data.tobytes())

    def matvec(self, v: np.ndarray) -> np.ndarray:
        t = self.table
        prods = t.MUL[self.data, v[None, :]]
        acc = np.zeros(self.data.shape[0], dtype=np.int16)
        for k in range(self.data.shape[1]):
            acc = t.ADD[acc, prods[:, k]]
        return acc

    def matmul(self, other: "DenseMatrix") -> "DenseMatrix":
        t = self.table
        n, k = self.data.shape
        k2, m = other.data.shape
        if k != k2:
            raise ValueError("shape mismatch")
        out = np.zeros((n, m), dtype=np.int16)
        for j in range(k):
            out = t.ADD[out, t.MUL[self.data[:, j:j + 1], other.data[j:j + 1, :]]]
        return DenseMatrix(t, out)

    def __matmul__(self, other):
        return self.matmul(other)

    def add(self, other: "DenseMatrix") -> "DenseMatrix":
        return DenseMatrix(self.table, self.table.ADD[self.data, other.data])

    def sub(self, other: "DenseMatrix") -> "DenseMatrix":
        return DenseMatrix(self.table, self.table.SUB[self.data, other.data])

    def power(self, e: int) -> "DenseMatrix":
        if e < 0:
            raise ValueError("negative matrix power")
        acc = DenseMatrix.identity(self.table, self.data.shape[0])
        base = self
        while e:
            if e & 1:
                acc = acc @ base
            base = base @ base
            e >>= 1
        return acc

    # -- echelon machinery ----------------------------------------------------

    def rref(self) -> tuple["DenseMatrix", list[int]]:
        """Reduced row echelon form with its pivot columns."""
        t = self.table
        a = self.data.copy()
        rows, cols = a.shape
        pivots: list[int] = []
        r = 0
        for c in range(cols):
            if r >= rows:
                break
            hits = np.nonzero(a[r:, c])[0]
            if hits.size == 0:
                continue
            p = hits[0] + r
            if p != r:
                a[[r, p]] = a[[p, r]]
            a[r] = t.MUL[t.INV[a[r, c]]][a[r]]
            for i in range(rows):
                if i != r and a[i, c]:
                    a[i] = t.SUB[a[i], t.MUL[a[i, c]][a[r]]]
            pivots.append(c)
            r += 1
        return DenseMatrix(t, a[:r]), pivots

    def rank(self) -> int:
        return len(self.rref()[1])

    def kernel(self) -> "DenseMatrix":
        """Row basis of the right nullspace (vectors v with A v = 0)."""
        t = self.table
        R, pivots = self.rref()
        cols = self.data.shape[1]
        one = t.field.encode((1,))
        free = [c for c in range(cols) if c not in pivots]
        rows = []
        for fc in free:
            v = np.zeros(cols, dtype=np.int16)
            v[fc] = one
            for i, pc in enumerate(pivots):
                v[pc] = t.NEG[R.data[i, fc]]
            rows.append(v)
        if not rows:
            return DenseMatrix(t, np.zeros((0, cols), dtype=np.int16))
        return DenseMatrix.from_rows(t, rows)

    def inverse(self) -> "DenseMatrix":
        t = self.table
        n, m = self.data.shape
        if n != m:
            raise ValueError("only square matrices invert")
        aug = np.hstack([self.data, DenseMatrix.identity(t, n).data])
        R, pivots = DenseMatrix(t, aug).rref()
        if pivots[:n] != list(range(n)):
            raise ValueError("matrix is singular")
        return DenseMatrix(t, R.data[:, n:])


class EchelonBasis:
    """Incrementally built reduced echelon basis of a subspace (row space)."""

    def __init__(self, table: GFTable, ambient_dim: int):
        self.table = table
        self.ambient = ambient_dim
        self.pivots: dict[int, np.ndarray] = {}

    @property
    def dim(self) -> int:
        return len(self.pivots)

    def reduce(self, v: np.ndarray) -> np.ndarray:
        t = self.table
        v = v.copy()
        for p in sorted(self.pivots):
            c = v[p]
            if c:
                v = t.SUB[v, t.MUL[c][self.pivots[p]]]
        return v

    def insert(self, v: np.ndarray) -> bool:
        """Reduce and insert; True if the vector enlarged the space."""
        t = self.table
        v = self.reduce(v)
        hits = np.nonzero(v)[0]
        if hits.size == 0:
            return False
        p = int(hits[0])
        v = t.MUL[t.INV[v[p]]][v]
        # keep full reduction: clear column p from existing rows
        for q, row in self.pivots.items():
            c = row[p]
            if c:
                self.pivots[q] = t.SUB[row, t.MUL[c][v]]
        self.pivots[p] = v
        return True

    def contains(self, v: np.ndarray) -> bool:
        return not np.any(self.reduce(v))

    def coords(self, v: np.ndarray) -> np.ndarray | None:
        """Coordinates of v in basis-matrix row order, or None if outside."""
        t = self.table
        v = v.copy()
        out = []
        for p in sorted(self.pivots):
            c = v[p]
            out.append(c)
            if c:
                v = t.SUB[v, t.MUL[c][self.pivots[p]]]
        if np.any(v):
            return None
        return np.array(out, dtype=np.int16)

    def matrix(self) -> DenseMatrix:
        rows = [self.pivots[p] for p in sorted(self.pivots)]
        if not rows:
            return DenseMatrix(self.table, np.zeros((0, self.ambient), dtype=np.int16))
        return DenseMatrix.from_rows(self.table, rows)
