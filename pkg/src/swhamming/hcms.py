"""Hamming-code construction for s > 2 sources.

A sum-zero partition P = [Q_1 ... Q_s] of an (M-n)-bit Hamming matrix,
together with a completion T making R = [Q_1; ...; Q_{s-1}; T] invertible,
yields coding matrices [G_i; Q_i] (G_i any row partition of T) that compress
the s-terminal Hamming sources perfectly.  The decoder works algebraically:
the Q-parts of the syndromes sum to P applied to the stacked deviation
vector, which is zero or a unique column of P; after correcting for the
deviation, the common block is recovered through R^{-1}.

The explicit partition for (n, M) = (21, 27) is embedded as data and
re-verified on every construction; all larger block lengths are built by
lifting a verified partition, doubling the Hamming matrix height by two
rows per step.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    BudgetExceededError,
    HeightNegativeError,
    NotHammingPartitionError,
    RNotInvertibleError,
    SyndromeNotDecodableError,
)
from .gf2 import (
    BitMatrix,
    BitVector,
    concat,
    hstack,
    invert,
    mat_vec,
    rank,
    rref,
    split,
    vstack,
)
from .codec import SwCode, SyndromeTuple, make_code
from .errors import SingularMatrixError
from .sources import SourceTuple, perfect_params_for_a

DEFAULT_MAX_A = 7


def hamming_matrix(m: int) -> BitMatrix:
    """The m x (2^m - 1) matrix whose columns are all nonzero m-bit vectors,
    in ascending integer value with row 0 as the most significant bit."""
    if m < 1:
        raise ValueError("m must be positive")
    if m > 24:
        raise BudgetExceededError(f"2^{m} - 1 columns is beyond the supported size")
    vals = np.arange(1, 1 << m, dtype=np.int64)
    bits = np.zeros((m, vals.size), dtype=np.uint8)
    for i in range(m):
        bits[i] = (vals >> (m - 1 - i)) & 1
    return BitMatrix.from_bits(bits)


def _column_values(M: BitMatrix) -> np.ndarray:
    """Integer value of every column, row 0 as MSB."""
    arr = M.to_array()
    weights = (np.int64(1) << np.arange(M.rows - 1, -1, -1)).astype(object)
    return arr.T.astype(object) @ weights


def is_hamming_partition(Q: Sequence[BitMatrix]) -> bool:
    """True iff [Q_1 ... Q_s] has exactly the 2^(M-n)-1 distinct nonzero
    columns (any order) and the blocks sum to zero."""
    try:
        validate_partition(Q)
    except NotHammingPartitionError:
        return False
    return True


def validate_partition(Q: Sequence[BitMatrix]) -> None:
    if len(Q) < 2:
        raise NotHammingPartitionError("a partition needs at least two blocks")
    mn = Q[0].rows
    n = Q[0].cols
    if any(B.rows != mn or B.cols != n for B in Q):
        raise NotHammingPartitionError("blocks have unequal shapes")
    if len(Q) * n != (1 << mn) - 1:
        raise NotHammingPartitionError(
            f"{len(Q)} blocks of {n} columns cannot partition a {mn}-bit Hamming matrix"
        )
    acc = Q[0]
    for B in Q[1:]:
        acc = acc + B
    if not acc.is_zero():
        raise NotHammingPartitionError("blocks do not sum to zero")
    vals = sorted(_column_values(hstack(Q)))
    if vals != list(range(1, (1 << mn))):
        raise NotHammingPartitionError("columns are not the distinct nonzero vectors")


@dataclass(frozen=True)
class HcmsBundle:
    """Construction witness: the partition, completion, and induced code."""

    s: int
    n: int
    M: int
    P: BitMatrix
    Q: tuple[BitMatrix, ...]
    T: BitMatrix
    G: tuple[BitMatrix, ...]
    R: BitMatrix
    R_inv: BitMatrix
    code: SwCode
    _col_index: dict[bytes, int] = field(repr=False)

    @property
    def g_split(self) -> tuple[int, ...]:
        return tuple(Gi.rows for Gi in self.G)

    def locate_column(self, sigma: BitVector) -> int:
        """Index of the column of P equal to sigma."""
        try:
            return self._col_index[sigma.tobytes()]
        except KeyError:
            raise SyndromeNotDecodableError(
                "syndrome component sum is not a column of the Hamming matrix"
            )


def _column_index(P: BitMatrix) -> dict[bytes, int]:
    idx: dict[bytes, int] = {}
    arr = P.to_array()
    words = BitMatrix.from_bits(arr.T)  # row j = column j of P, packed
    for j in range(P.cols):
        idx[words.row(j).tobytes()] = j
    return idx


def _default_completion(Q: Sequence[BitMatrix], n: int, t_rows: int) -> BitMatrix:
    """Standard-basis rows at the non-pivot columns of [Q_1; ...; Q_(s-1)].

    When the stack pivots on its first (s-1)(M-n) columns this is exactly
    [0 | I]; either way the resulting R is invertible whenever any
    completion is."""
    stack = vstack(Q[: len(Q) - 1])
    _, pivots = rref(stack)
    if len(pivots) < stack.rows:
        raise RNotInvertibleError(
            "[Q_1; ...; Q_(s-1)] is row deficient; no completion can work"
        )
    non_pivots = [c for c in range(n) if c not in set(pivots)]
    bits = np.zeros((t_rows, n), dtype=np.uint8)
    for i, c in enumerate(non_pivots):
        bits[i, c] = 1
    return BitMatrix.from_bits(bits)


def default_g_split(total: int, s: int) -> tuple[int, ...]:
    """Row split of T that is as equal as possible, earlier terminals larger."""
    base, extra = divmod(total, s)
    return tuple(base + 1 if i < extra else base for i in range(s))


def hcms_from_parts(
    Q: Sequence[BitMatrix],
    T: BitMatrix | None = None,
    g_split: Sequence[int] | None = None,
) -> HcmsBundle:
    """Validate a partition and completion and assemble the code.

    Raises NotHammingPartition when the partition conditions fail,
    HeightNegative when (s-1)(M-n) > n, and RNotInvertible when the
    completion does not make R invertible.
    """
    s = len(Q)
    if s <= 2:
        raise ValueError("construction requires more than two terminals")
    validate_partition(Q)
    mn = Q[0].rows
    n = Q[0].cols
    M = n + mn
    t_rows = n - (s - 1) * mn
    if t_rows < 0:
        raise HeightNegativeError(
            f"completion height n - (s-1)(M-n) = {t_rows} is negative"
        )
    if T is None:
        T = _default_completion(Q, n, t_rows)
    if T.rows != t_rows or T.cols != n:
        raise ValueError(f"T must be {t_rows}x{n}, got {T.rows}x{T.cols}")
    R = vstack([*Q[: s - 1], T])
    try:
        R_inv = invert(R)
    except SingularMatrixError as exc:
        raise RNotInvertibleError("[Q_1; ...; Q_(s-1); T] is singular") from exc
    if g_split is None:
        g_split = default_g_split(t_rows, s)
    g_split = tuple(int(g) for g in g_split)
    if len(g_split) != s or any(g < 0 for g in g_split) or sum(g_split) != t_rows:
        raise ValueError(f"row split {g_split} does not partition {t_rows} rows")
    G = []
    off = 0
    for g in g_split:
        G.append(T.take_rows(off, off + g))
        off += g
    mats = tuple(vstack([Gi, Qi]) for Gi, Qi in zip(G, Q))
    code = make_code(mats)
    P = hstack(Q)
    return HcmsBundle(
        s=s,
        n=n,
        M=M,
        P=P,
        Q=tuple(Q),
        T=T,
        G=tuple(G),
        R=R,
        R_inv=R_inv,
        code=code,
        _col_index=_column_index(P),
    )


# ---------------------------------------------------------------------------
# the embedded base partition for n = 21
# ---------------------------------------------------------------------------

_A3_Q1 = """\
100000100001110110000
010000110000100000111
001000011000011101011
000100001100010011110
000010000110101101111
000001000011001001101"""

_A3_Q2 = """\
000101101111010001111
100010110111101111000
010001111011100000101
101000111101011100111
010100111110001011011
001010011111110101110"""

_A3_Q3 = """\
100101001110100111111
110010000111001111111
011001100011111101110
101100110001001111001
010110111000100110100
001011011100111100011"""

_A3_K = """\
000101
100010
010001
101000
010100
001010"""


def _from_lines(text: str) -> BitMatrix:
    return BitMatrix.from_bits([[int(c) for c in row] for row in text.splitlines()])


def a3_partition() -> tuple[BitMatrix, BitMatrix, BitMatrix]:
    """The verified base partition for n = 21: sum-zero blocks of a 6-bit
    Hamming matrix with [Q_1; Q_2] pivoting on the first 12 columns.

    The data is embedded as text; every call re-runs the structural
    self-checks so a corrupted transcription fails fast.
    """
    Q1, Q2, Q3 = (_from_lines(t) for t in (_A3_Q1, _A3_Q2, _A3_Q3))
    K = _from_lines(_A3_K)
    validate_partition((Q1, Q2, Q3))
    _, pivots = rref(vstack([Q1, Q2]))
    if pivots != list(range(12)):
        raise AssertionError("embedded partition lost the pivot property")
    U = Q1.take_cols(0, 12)
    V = Q2.take_cols(0, 12)
    ZI = hstack([BitMatrix.zeros(6, 6), BitMatrix.identity(6)])
    if V != ZI + (K @ U):
        raise AssertionError("embedded partition fails V = [0|I] + K U")
    return Q1, Q2, Q3


def hcms_a3(g_split: Sequence[int] | None = None) -> HcmsBundle:
    """The explicit (n, M) = (21, 27) bundle with T = [0 | I_9]."""
    return hcms_from_parts(a3_partition(), g_split=g_split)


# ---------------------------------------------------------------------------
# lifting a partition from 2k to 2(k+1) rows
# ---------------------------------------------------------------------------

_TAG_U = (1, 0)
_TAG_V = (0, 1)
_TAG_W = (1, 1)
# tag combos pinned to the four head positions after the zero-tagged block
# (groups 0..3); the last two re-pair columns across blocks, legal because
# each block still uses every tag once per group and position sums stay
# zero, and chosen so the tag block of [A+; B+] is invertible
_HEAD_COMBOS = (
    (_TAG_V, _TAG_W, _TAG_U),
    (_TAG_W, _TAG_U, _TAG_V),
    (_TAG_W, _TAG_V, _TAG_U),
    (_TAG_U, _TAG_W, _TAG_V),
)


def check_lift_precondition(A: BitMatrix, B: BitMatrix, C: BitMatrix) -> int:
    """Validate the induction invariant and return k (half the row count)."""
    validate_partition((A, B, C))
    if A.rows % 2:
        raise ValueError("partition height must be even")
    k = A.rows // 2
    _, pivots = rref(vstack([A, B]))
    if pivots != list(range(4 * k)):
        raise ValueError("[A; B] must pivot exactly on the first 4k columns")
    return k


def lift_partition(
    A: BitMatrix, B: BitMatrix, C: BitMatrix
) -> tuple[BitMatrix, BitMatrix, BitMatrix]:
    """Lift a sum-zero 2k-bit partition to a 2(k+1)-bit one.

    Each original column is copied four times with two-bit tags 0, u, v, w
    appended (cyclically rotated across the three blocks so position sums
    stay zero), plus one lone tagged zero column per block.  Columns are
    then rearranged, independently within each block but keeping position
    sums zero, so the first 4(k+1) columns of [A+; B+] carry the pivots:
    the first 4k groups zero-tagged, then groups 0..3 with an invertible
    4x4 tag block.  Remaining positions follow in ascending A-column order.
    """
    k = check_lift_precondition(A, B, C)
    n = A.cols
    arrs = [M.to_array() for M in (A, B, C)]

    def col(block: int, j: int, tag: tuple[int, int]) -> tuple[int, ...]:
        return tuple(arrs[block][:, j]) + tag

    head: list[tuple] = []
    used: dict[int, list] = {j: [] for j in range(n)}
    for j in range(4 * k):
        head.append((col(0, j, (0, 0)), col(1, j, (0, 0)), col(2, j, (0, 0))))
        used[j].append(((0, 0), (0, 0), (0, 0)))
    for j, combo in enumerate(_HEAD_COMBOS):
        head.append((col(0, j, combo[0]), col(1, j, combo[1]), col(2, j, combo[2])))
        used[j].append(combo)

    tail: list[tuple] = [
        (
            (0,) * (2 * k) + _TAG_U,
            (0,) * (2 * k) + _TAG_V,
            (0,) * (2 * k) + _TAG_W,
        )
    ]
    for j in range(n):
        remaining_tags = [
            [t for t in (_TAG_U, _TAG_V, _TAG_W, (0, 0)) if t not in
             [u[b] for u in used[j]]]
            for b in range(3)
        ]
        tail.extend(_pair_remaining(col, j, remaining_tags))

    tail.sort(key=lambda trip: trip[0])
    triples = head + tail

    mats = []
    for b in range(3):
        bits = np.array([trip[b] for trip in triples], dtype=np.uint8).T
        mats.append(BitMatrix.from_bits(bits))
    out = tuple(mats)
    check_lift_precondition(*out)
    return out


def _pair_remaining(col, j: int, remaining: list[list[tuple[int, int]]]):
    """First-fit pairing of group j's leftover tags into zero-sum triples.

    The leftover configurations are fixed by the head arrangement (six
    cases) and first-fit completes all of them; a stranded tag would be a
    bug, not bad input."""
    out = []
    a_tags, b_tags, c_tags = (list(r) for r in remaining)
    while a_tags:
        ta = a_tags.pop(0)
        for tb in b_tags:
            tc = (ta[0] ^ tb[0], ta[1] ^ tb[1])
            if tc in c_tags:
                out.append((col(0, j, ta), col(1, j, tb), col(2, j, tc)))
                b_tags.remove(tb)
                c_tags.remove(tc)
                break
        else:
            raise AssertionError(f"could not pair leftover tags of group {j}")
    return out


def hcms_for_a(
    a: int,
    g_split: Sequence[int] | None = None,
    max_a: int = DEFAULT_MAX_A,
) -> HcmsBundle:
    """Bundle at parameter a >= 3 (n = (2^(2a)-1)/3, M = n + 2a), built from
    the embedded n = 21 partition by repeated lifting, completed with
    T = [0 | I_(n-4a)]."""
    if a < 3:
        raise HeightNegativeError(
            f"no construction exists for a = {a}: n - 2(M - n) < 0"
        )
    if a > max_a:
        raise BudgetExceededError(f"a = {a} exceeds the configured limit {max_a}")
    part = a3_partition()
    for _ in range(a - 3):
        part = lift_partition(*part)
    bundle = hcms_from_parts(part, g_split=g_split)
    assert (bundle.n, bundle.M) == perfect_params_for_a(a)
    return bundle


# ---------------------------------------------------------------------------
# algebraic decoding
# ---------------------------------------------------------------------------


def hcms_decode(bundle: HcmsBundle, y: SyndromeTuple) -> SourceTuple:
    """Invert the encoding on the Hamming-source set.

    The Q-parts of all syndromes sum to P applied to the stacked deviation
    pattern; zero means no deviation, anything else must match a unique
    column of P, identifying the deviating terminal and position.  After
    removing the deviation's contribution, the stacked syndrome equals R b
    and the common block b follows through R^{-1}.
    """
    s, n, mn = bundle.s, bundle.n, bundle.M - bundle.n
    code = bundle.code
    if len(y) != s or any(v.n != mi for v, mi in zip(y, code.m)):
        raise ValueError("syndrome tuple does not match the bundle")
    g_parts = []
    q_parts = []
    for i, v in enumerate(y):
        g, q = split(v, [bundle.G[i].rows, mn])
        g_parts.append(g)
        q_parts.append(q)
    sigma = q_parts[0]
    for q in q_parts[1:]:
        sigma = sigma + q

    term = pos = None
    if not sigma.is_zero():
        j = bundle.locate_column(sigma)
        term, pos = divmod(j, n)
        corrected = y[term] + code.matrices[term].column(pos)
        g_parts[term], q_parts[term] = split(corrected, [bundle.G[term].rows, mn])

    stacked = concat(q_parts[: s - 1] + g_parts)
    b = mat_vec(bundle.R_inv, stacked)
    if term is None:
        return tuple(b for _ in range(s))
    e = BitVector.unit(n, pos)
    return tuple(b + e if i == term else b for i in range(s))


# ---------------------------------------------------------------------------
# bounded randomized partition search for other terminal counts
# ---------------------------------------------------------------------------


def random_sum_zero_partition(
    s: int, mn: int, rng: np.random.Generator, tries: int = 200
) -> tuple[BitMatrix, ...] | None:
    """Try to partition the mn-bit Hamming matrix into s sum-zero blocks
    whose first s-1 blocks stack to a full-row-rank matrix.

    This is a bounded randomized search only; returning None proves
    nothing about existence.
    """
    total = (1 << mn) - 1
    if total % s:
        return None
    n = total // s
    if (s - 1) * mn > n:
        return None
    for _ in range(tries):
        groups = _random_zero_sum_groups(s, mn, rng)
        if groups is None:
            continue
        Q = tuple(
            BitMatrix.from_bits(
                [[(val >> (mn - 1 - r)) & 1 for val in block] for r in range(mn)]
            )
            for block in groups
        )
        stack = vstack(Q[: s - 1])
        if rank(stack) == (s - 1) * mn:
            return Q
    return None


def _random_zero_sum_groups(s: int, mn: int, rng: np.random.Generator):
    """Randomly arrange all nonzero mn-bit values into position tuples of s
    distinct values XOR-ing to zero."""
    pool = set(range(1, 1 << mn))
    n = len(pool) // s
    blocks: list[list[int]] = [[] for _ in range(s)]
    for _ in range(n):
        placed = False
        for _attempt in range(64):
            chosen = list(rng.choice(sorted(pool), size=s - 1, replace=False))
            last = 0
            for v in chosen:
                last ^= int(v)
            if last and last in pool and last not in chosen:
                for b, v in enumerate([*chosen, last]):
                    blocks[b].append(int(v))
                    pool.discard(int(v))
                placed = True
                break
        if not placed:
            return None
    return blocks
