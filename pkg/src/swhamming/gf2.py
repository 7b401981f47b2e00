"""Exact dense linear algebra over GF(2).

Values are immutable after construction: every operation returns fresh
objects, so matrices, vectors and subspaces can be shared freely across
threads.  Rows are packed 64 bits per uint64 word (see ``_kernels``);
elimination costs O(rows * cols^2 / 64).

Subspaces are kept as reduced-row-echelon bases with no zero rows, which
makes subspace equality a bit-exact comparison.  The zero-dimensional
subspace is a 0 x n basis and is accepted everywhere.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from ._kernels import matmul_packed, matvec_packed, nwords, pack_bits, rref_in_place, unpack_bits
from .errors import MalformedFileError, SingularMatrixError


def _mask_tail(data: np.ndarray, cols: int) -> None:
    # keep bits at or beyond `cols` zero
    if not data.size or not cols & 63:
        return
    m = (1 << (cols & 63)) - 1
    if data.ndim == 1:
        tail = int(data[-1])
        if tail & ~m:
            data[-1] = np.uint64(tail & m)
    else:
        um = np.uint64(m)
        if np.any(data[..., -1] & ~um):
            data[..., -1] &= um


class BitVector:
    """A length-n vector over GF(2), packed into uint64 words."""

    __slots__ = ("n", "_w")

    def __init__(self, n: int, words: np.ndarray):
        self.n = n
        w = np.ascontiguousarray(words, dtype=np.uint64)
        _mask_tail(w, n)
        w.flags.writeable = False
        self._w = w

    @classmethod
    def zeros(cls, n: int) -> BitVector:
        return cls(n, np.zeros(nwords(n), dtype=np.uint64))

    @classmethod
    def from_bits(cls, bits) -> BitVector:
        if isinstance(bits, np.ndarray):
            arr = (bits & 1).astype(np.uint8, copy=False)
        else:
            arr = np.fromiter((int(b) & 1 for b in bits), dtype=np.uint8)
        return cls(len(arr), pack_bits(arr[None, :])[0])

    @classmethod
    def unit(cls, n: int, p: int) -> BitVector:
        if not 0 <= p < n:
            raise IndexError(f"unit position {p} out of range for length {n}")
        w = np.zeros(nwords(n), dtype=np.uint64)
        w[p >> 6] = np.uint64(1) << np.uint64(p & 63)
        return cls(n, w)

    @property
    def words(self) -> np.ndarray:
        return self._w

    def bit(self, p: int) -> int:
        return int((self._w[p >> 6] >> np.uint64(p & 63)) & np.uint64(1))

    def weight(self) -> int:
        return int(np.bitwise_count(self._w).sum())

    def is_zero(self) -> bool:
        return not self._w.any()

    def to_array(self) -> np.ndarray:
        return unpack_bits(self._w[None, :], self.n)[0]

    def to01(self) -> str:
        return "".join("1" if b else "0" for b in self.to_array())

    def tobytes(self) -> bytes:
        return self._w.tobytes()

    def __add__(self, other: BitVector) -> BitVector:
        if self.n != other.n:
            raise ValueError(f"length mismatch: {self.n} vs {other.n}")
        return BitVector(self.n, self._w ^ other._w)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, BitVector)
            and self.n == other.n
            and np.array_equal(self._w, other._w)
        )

    def __hash__(self) -> int:
        return hash((self.n, self._w.tobytes()))

    def __len__(self) -> int:
        return self.n

    def __repr__(self) -> str:
        return f"BitVector({self.to01()!r})"


class BitMatrix:
    """A rows x cols matrix over GF(2) with word-packed rows."""

    __slots__ = ("rows", "cols", "_data")

    def __init__(self, rows: int, cols: int, data: np.ndarray):
        self.rows = rows
        self.cols = cols
        d = np.ascontiguousarray(data, dtype=np.uint64)
        if d.shape != (rows, nwords(cols)):
            raise ValueError(f"bad packed shape {d.shape} for {rows}x{cols}")
        _mask_tail(d, cols)
        d.flags.writeable = False
        self._data = d

    @classmethod
    def zeros(cls, rows: int, cols: int) -> BitMatrix:
        return cls(rows, cols, np.zeros((rows, nwords(cols)), dtype=np.uint64))

    @classmethod
    def identity(cls, n: int) -> BitMatrix:
        bits = np.eye(n, dtype=np.uint8)
        return cls(n, n, pack_bits(bits))

    @classmethod
    def from_bits(cls, bits) -> BitMatrix:
        arr = np.asarray(bits, dtype=np.uint8)
        if arr.ndim != 2:
            raise ValueError("expected a 2-D 0/1 array")
        return cls(arr.shape[0], arr.shape[1], pack_bits(arr))

    @classmethod
    def from_rows(cls, rows: Sequence[BitVector], cols: int | None = None) -> BitMatrix:
        if not rows:
            if cols is None:
                raise ValueError("cols required for an empty row list")
            return cls.zeros(0, cols)
        n = rows[0].n
        if cols is not None and cols != n:
            raise ValueError("cols disagrees with row length")
        data = np.stack([r.words for r in rows])
        return cls(len(rows), n, data)

    @property
    def data(self) -> np.ndarray:
        return self._data

    def row(self, i: int) -> BitVector:
        return BitVector(self.cols, self._data[i])

    def get(self, i: int, j: int) -> int:
        return int((self._data[i, j >> 6] >> np.uint64(j & 63)) & np.uint64(1))

    def column(self, j: int) -> BitVector:
        bits = ((self._data[:, j >> 6] >> np.uint64(j & 63)) & np.uint64(1)).astype(np.uint8)
        return BitVector(self.rows, pack_bits(bits[None, :])[0])

    def column_bytes(self, j: int) -> bytes:
        """Unpacked bits of column j as a hashable key."""
        bits = (self._data[:, j >> 6] >> np.uint64(j & 63)) & np.uint64(1)
        return bits.astype(np.uint8).tobytes()

    def take_rows(self, start: int, stop: int) -> BitMatrix:
        return BitMatrix(stop - start, self.cols, self._data[start:stop].copy())

    def take_cols(self, start: int, stop: int) -> BitMatrix:
        bits = self.to_array()[:, start:stop]
        return BitMatrix.from_bits(bits)

    def transpose(self) -> BitMatrix:
        return BitMatrix.from_bits(self.to_array().T)

    def to_array(self) -> np.ndarray:
        return unpack_bits(self._data, self.cols)

    def is_zero(self) -> bool:
        return not self._data.any()

    def __add__(self, other: BitMatrix) -> BitMatrix:
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")
        return BitMatrix(self.rows, self.cols, self._data ^ other._data)

    def __matmul__(self, other):
        if isinstance(other, BitVector):
            return mat_vec(self, other)
        if self.cols != other.rows:
            raise ValueError(f"inner dims {self.cols} vs {other.rows}")
        return BitMatrix(self.rows, other.cols, matmul_packed(self._data, self.cols, other._data))

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, BitMatrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and np.array_equal(self._data, other._data)
        )

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self._data.tobytes()))

    def __repr__(self) -> str:
        body = ",".join(self.row(i).to01() for i in range(min(self.rows, 8)))
        tail = ",..." if self.rows > 8 else ""
        return f"BitMatrix({self.rows}x{self.cols}:[{body}{tail}])"


def vstack(mats: Sequence[BitMatrix]) -> BitMatrix:
    mats = [m for m in mats]
    if not mats:
        raise ValueError("nothing to stack")
    cols = mats[0].cols
    if any(m.cols != cols for m in mats):
        raise ValueError("column counts differ")
    data = np.concatenate([m.data for m in mats], axis=0)
    return BitMatrix(sum(m.rows for m in mats), cols, data.copy())


def hstack(mats: Sequence[BitMatrix]) -> BitMatrix:
    mats = [m for m in mats]
    if not mats:
        raise ValueError("nothing to stack")
    rows = mats[0].rows
    if any(m.rows != rows for m in mats):
        raise ValueError("row counts differ")
    bits = np.concatenate([m.to_array() for m in mats], axis=1)
    return BitMatrix.from_bits(bits)


def mat_vec(M: BitMatrix, v: BitVector) -> BitVector:
    if M.cols != v.n:
        raise ValueError(f"dims {M.rows}x{M.cols} vs length {v.n}")
    return BitVector(M.rows, matvec_packed(M.data, v.words))


def _vec_to_int(v: BitVector) -> int:
    return int.from_bytes(v.words.tobytes(), "little")


def _int_to_vec(val: int, n: int) -> BitVector:
    w = nwords(n)
    if w == 0:
        return BitVector(0, np.zeros(0, dtype=np.uint64))
    buf = val.to_bytes(w * 8, "little")
    return BitVector(n, np.frombuffer(buf, dtype=np.uint64).copy())


def concat(vectors: Sequence[BitVector]) -> BitVector:
    val = 0
    off = 0
    for v in vectors:
        val |= _vec_to_int(v) << off
        off += v.n
    return _int_to_vec(val, off)


def split(v: BitVector, sizes: Sequence[int]) -> list[BitVector]:
    if sum(sizes) != v.n:
        raise ValueError("sizes do not sum to vector length")
    val = _vec_to_int(v)
    out = []
    for s in sizes:
        out.append(_int_to_vec(val & ((1 << s) - 1), s))
        val >>= s
    return out


# ---------------------------------------------------------------------------
# elimination-based operations
# ---------------------------------------------------------------------------


def rref(M: BitMatrix) -> tuple[BitMatrix, list[int]]:
    """Reduced row echelon form and ordered pivot columns; row space preserved."""
    data = M.data.copy()
    pivots = rref_in_place(data, M.cols)
    return BitMatrix(M.rows, M.cols, data), [int(p) for p in pivots]


def rank(M: BitMatrix) -> int:
    data = M.data.copy()
    return len(rref_in_place(data, M.cols))


def rref_augmented(left: BitMatrix, right: BitMatrix) -> tuple[BitMatrix, list[int]]:
    """RREF of [left | right] with pivots restricted to the left block."""
    aug = hstack([left, right])
    data = aug.data.copy()
    pivots = rref_in_place(data, left.cols)
    return BitMatrix(aug.rows, aug.cols, data), [int(p) for p in pivots]


def invert(M: BitMatrix) -> BitMatrix:
    """Inverse of a square matrix; raises SingularMatrixError when rank < n."""
    if M.rows != M.cols:
        raise ValueError(f"not square: {M.rows}x{M.cols}")
    n = M.rows
    red, pivots = rref_augmented(M, BitMatrix.identity(n))
    if len(pivots) != n:
        raise SingularMatrixError(f"matrix of rank {len(pivots)} < {n}")
    return red.take_cols(n, 2 * n)


def solve(A: BitMatrix, y: BitVector) -> BitVector | None:
    """One particular solution x of A x = y, or None when y is outside the
    column space.  The full solution set is x + null_space(A)."""
    if A.rows != y.n:
        raise ValueError("dimension mismatch")
    red, pivots = rref_augmented(A, BitMatrix.from_rows([y]).transpose())
    ycol = A.cols
    rk = len(pivots)
    for i in range(rk, A.rows):
        if red.get(i, ycol):
            return None
    x = np.zeros(A.cols, dtype=np.uint8)
    for i, p in enumerate(pivots):
        if red.get(i, ycol):
            x[p] = 1
    return BitVector(A.cols, pack_bits(x[None, :])[0])


class Subspace:
    """A subspace of GF(2)^n held as a canonical RREF basis with no zero rows.

    Canonical form makes equality bit-exact: two Subspace values compare
    equal iff they are the same subspace.
    """

    __slots__ = ("n", "basis")

    def __init__(self, n: int, basis: BitMatrix, *, _canonical: bool = False):
        if basis.cols != n:
            raise ValueError("basis width disagrees with ambient dimension")
        if not _canonical:
            basis = row_basis(basis)
        self.n = n
        self.basis = basis

    @classmethod
    def zero(cls, n: int) -> Subspace:
        return cls(n, BitMatrix.zeros(0, n), _canonical=True)

    @classmethod
    def full(cls, n: int) -> Subspace:
        return cls(n, BitMatrix.identity(n), _canonical=True)

    @classmethod
    def spanned_by(cls, vectors: Sequence[BitVector], n: int | None = None) -> Subspace:
        if not vectors:
            if n is None:
                raise ValueError("ambient dimension required for empty span")
            return cls.zero(n)
        return cls(vectors[0].n, BitMatrix.from_rows(vectors))

    @property
    def dim(self) -> int:
        return self.basis.rows

    def contains(self, v: BitVector) -> bool:
        return subspace_contains(self, v)

    def contains_subspace(self, other: Subspace) -> bool:
        return all(self.contains(other.basis.row(i)) for i in range(other.dim))

    def vectors(self):
        """Iterate all 2^dim members (small subspaces only)."""
        basis_rows = [self.basis.row(i) for i in range(self.dim)]
        for mask in range(1 << self.dim):
            v = BitVector.zeros(self.n)
            m = mask
            i = 0
            while m:
                if m & 1:
                    v = v + basis_rows[i]
                m >>= 1
                i += 1
            yield v

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Subspace) and self.n == other.n and self.basis == other.basis

    def __hash__(self) -> int:
        return hash((self.n, self.basis))

    def __repr__(self) -> str:
        return f"Subspace(n={self.n}, dim={self.dim})"


def row_basis(M: BitMatrix) -> BitMatrix:
    """Canonical full-row-rank matrix with the same row space: the nonzero
    rows of rref(M)."""
    data = M.data.copy()
    pivots = rref_in_place(data, M.cols)
    return BitMatrix(len(pivots), M.cols, data[: len(pivots)].copy())


def row_basis_transforms(A: BitMatrix, B: BitMatrix) -> tuple[BitMatrix, BitMatrix]:
    """Given a row basis matrix B of A, return (C, D) with A = C B and B = D A.

    C is unique; D is one valid choice (free coefficients set to zero).
    Raises ValueError when B is not full row rank or the row spaces differ.
    """
    if A.cols != B.cols:
        raise ValueError("width mismatch")
    C = _express_rows(A, B)
    if C is None:
        raise ValueError("row(A) is not contained in row(B)")
    if rank(B) != B.rows:
        raise ValueError("B is not full row rank")
    D = _express_rows(B, A)
    if D is None:
        raise ValueError("row(B) is not contained in row(A)")
    return C, D


def _express_rows(A: BitMatrix, B: BitMatrix) -> BitMatrix | None:
    """Coefficient matrix X with A = X B, or None if some row of A is
    outside row(B).  Solves B^T x = a^T for all rows of A at once."""
    red, pivots = rref_augmented(B.transpose(), A.transpose())
    rk = len(pivots)
    for i in range(rk, B.cols):
        for j in range(A.rows):
            if red.get(i, B.rows + j):
                return None
    xt = np.zeros((B.rows, A.rows), dtype=np.uint8)
    tail = red.take_cols(B.rows, B.rows + A.rows).to_array()
    for i, p in enumerate(pivots):
        xt[p] = tail[i]
    return BitMatrix.from_bits(xt.T)


def null_space(M: BitMatrix) -> Subspace:
    """Kernel {x : M x = 0} as a canonical subspace of GF(2)^cols."""
    red, pivots = rref(M)
    n = M.cols
    free = [c for c in range(n) if c not in set(pivots)]
    if not free:
        return Subspace.zero(n)
    bits = np.zeros((len(free), n), dtype=np.uint8)
    arr = red.to_array()
    for k, f in enumerate(free):
        bits[k, f] = 1
        for i, p in enumerate(pivots):
            bits[k, p] = arr[i, f]
    return Subspace(n, BitMatrix.from_bits(bits))


def matrix_with_null_space(N: Subspace) -> BitMatrix:
    """Deterministic surjective (n - dim N) x n matrix H with null(H) = N.

    Uses duality: row(H) must be the orthogonal complement of N, which is
    the kernel of N's basis matrix.  For N = {0} this yields the identity.
    """
    return null_space(N.basis).basis


def subspace_contains(A: Subspace, v: BitVector) -> bool:
    if A.n != v.n:
        raise ValueError("ambient dimension mismatch")
    w = v.words.copy()
    basis = A.basis
    for i in range(basis.rows):
        # basis is RREF: leading bit of row i sits at its pivot column
        data = basis.data[i]
        p = _leading_bit(data)
        if (w[p >> 6] >> np.uint64(p & 63)) & np.uint64(1):
            w ^= data
    return not w.any()


def _leading_bit(words: np.ndarray) -> int:
    for k, wd in enumerate(words):
        if wd:
            return (k << 6) + int(wd & (~wd + np.uint64(1))).bit_length() - 1
    raise ValueError("zero row has no leading bit")


def subspace_sum(A: Subspace, B: Subspace) -> Subspace:
    if A.n != B.n:
        raise ValueError("ambient dimension mismatch")
    if A.dim == 0:
        return B
    if B.dim == 0:
        return A
    return Subspace(A.n, vstack([A.basis, B.basis]))


def subspace_intersect(A: Subspace, B: Subspace) -> Subspace:
    """Zassenhaus: row reduce [[A|A],[B|0]]; rows with zero left half carry an
    intersection basis in the right half."""
    if A.n != B.n:
        raise ValueError("ambient dimension mismatch")
    n = A.n
    if A.dim == 0 or B.dim == 0:
        return Subspace.zero(n)
    top = hstack([A.basis, A.basis])
    bot = hstack([B.basis, BitMatrix.zeros(B.dim, n)])
    red, pivots = rref(vstack([top, bot]))
    left_rank = sum(1 for p in pivots if p < n)
    arr = red.to_array()
    gens = arr[left_rank : len(pivots), n:]
    if gens.size == 0:
        return Subspace.zero(n)
    return Subspace(n, BitMatrix.from_bits(gens))


def complement(A: Subspace, within: Subspace) -> Subspace:
    """Deterministic B with A + B = within and A intersect B = {0}.

    Extends A's basis greedily by rows of within's basis (for the full
    space, that is extension by standard basis vectors).  Raises ValueError
    when A is not contained in within.
    """
    if A.n != within.n:
        raise ValueError("ambient dimension mismatch")
    if not within.contains_subspace(A):
        raise ValueError("A is not a subspace of `within`")
    reducer = A.basis.data.copy()
    kept: list[BitVector] = []
    for i in range(within.dim):
        cand = within.basis.row(i)
        w = cand.words.copy()
        for rrow in reducer:
            p = _leading_bit(rrow) if rrow.any() else None
            if p is not None and (w[p >> 6] >> np.uint64(p & 63)) & np.uint64(1):
                w ^= rrow
        if w.any():
            kept.append(cand)
            stacked = np.concatenate([reducer, w[None, :]])
            rref_in_place(stacked, A.n)
            reducer = stacked
    return Subspace.spanned_by(kept, A.n)


# ---------------------------------------------------------------------------
# text format: first line "rows cols", then rows lines over {0,1}
# ---------------------------------------------------------------------------


def format_matrix(M: BitMatrix) -> str:
    lines = [f"{M.rows} {M.cols}"]
    arr = M.to_array()
    for i in range(M.rows):
        lines.append("".join("1" if b else "0" for b in arr[i]))
    return "\n".join(lines) + "\n"


def parse_matrix(lines: Iterable[str]) -> BitMatrix:
    it = iter(lines)
    try:
        header = next(it).split()
        rows, cols = int(header[0]), int(header[1])
    except (StopIteration, IndexError, ValueError) as exc:
        raise MalformedFileError("expected 'rows cols' header") from exc
    bits = np.zeros((rows, cols), dtype=np.uint8)
    for i in range(rows):
        try:
            line = next(it).strip()
        except StopIteration as exc:
            raise MalformedFileError(f"matrix body ended after {i} of {rows} rows") from exc
        if len(line) != cols or set(line) - {"0", "1"}:
            raise MalformedFileError(f"bad matrix row {i}: {line!r}")
        bits[i] = [c == "1" for c in line]
    return BitMatrix.from_bits(bits)


# ---------------------------------------------------------------------------
# randomized constructions (seeded; used by tests and sampled verification)
# ---------------------------------------------------------------------------


def random_matrix(rows: int, cols: int, rng: np.random.Generator) -> BitMatrix:
    return BitMatrix.from_bits(rng.integers(0, 2, size=(rows, cols), dtype=np.uint8))


def random_invertible(n: int, rng: np.random.Generator) -> BitMatrix:
    while True:
        M = random_matrix(n, n, rng)
        if rank(M) == n:
            return M


def random_subspace(n: int, dim: int, rng: np.random.Generator) -> Subspace:
    if dim > n:
        raise ValueError("dim exceeds ambient dimension")
    while True:
        M = random_matrix(dim, n, rng)
        if rank(M) == dim:
            return Subspace(n, M)


def random_subspace_of(space: Subspace, dim: int, rng: np.random.Generator) -> Subspace:
    """Random dim-dimensional subspace of `space`."""
    if dim > space.dim:
        raise ValueError("dim exceeds dim of the containing space")
    if dim == 0:
        return Subspace.zero(space.n)
    while True:
        coeff = random_matrix(dim, space.dim, rng)
        if rank(coeff) == dim:
            return Subspace(space.n, coeff @ space.basis)
