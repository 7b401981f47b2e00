"""Syndrome-based encoding plus exact compressibility and perfectness checks.

A code is an s-tuple of coding matrices; terminal i transmits y_i = H_i x_i.
The code compresses the Hamming-source set S iff no two distinct members of
S share a syndrome tuple.  Injectivity is decided algebraically: it fails
iff some nonzero member of the sumset S+S lies componentwise in the null
spaces.  Every S+S member has the form (c + u_1, ..., c + u_s) where the
u-pattern is one of five families (all zero; one u_i of weight 1; one u_i
of weight 2; weight-1 deviations at two distinct terminals, possibly at the
same position), so the whole decision reduces to a stacked elimination
followed by O(s n) hash probes - no enumeration of S.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    BudgetExceededError,
    MalformedFileError,
    NotInImageError,
    ParamsNotPerfectError,
)
from .gf2 import (
    BitMatrix,
    BitVector,
    Subspace,
    concat,
    format_matrix,
    mat_vec,
    matrix_with_null_space,
    null_space,
    parse_matrix,
    rank,
    rref_augmented,
    vstack,
)
from .sources import (
    SourceParams,
    SourceTuple,
    enumerate_hamming_sources,
    hamming_source_size,
    is_hamming_member,
    is_perfect_params,
)

SyndromeTuple = tuple[BitVector, ...]

DEFAULT_TABLE_BUDGET = 1 << 24
DEFAULT_SEARCH_BUDGET = 1 << 20


@dataclass(frozen=True)
class SwCode:
    """s coding matrices H_i of size m_i x n."""

    params: SourceParams
    matrices: tuple[BitMatrix, ...]

    def __post_init__(self):
        if len(self.matrices) != self.params.s:
            raise ValueError("one matrix per terminal required")
        for H, mi in zip(self.matrices, self.params.m):
            if H.rows != mi or H.cols != self.params.n:
                raise ValueError(
                    f"matrix {H.rows}x{H.cols} disagrees with params "
                    f"({mi}x{self.params.n})"
                )

    @property
    def s(self) -> int:
        return self.params.s

    @property
    def n(self) -> int:
        return self.params.n

    @property
    def m(self) -> tuple[int, ...]:
        return self.params.m


def make_code(matrices: Sequence[BitMatrix]) -> SwCode:
    """Wrap coding matrices in an SwCode, inferring the parameters."""
    mats = tuple(matrices)
    if not mats:
        raise ValueError("no matrices")
    n = mats[0].cols
    return SwCode(SourceParams(len(mats), n, tuple(H.rows for H in mats)), mats)


def encode(code: SwCode, x: SourceTuple) -> SyndromeTuple:
    """y_i = H_i x_i for each terminal."""
    if len(x) != code.s or any(v.n != code.n for v in x):
        raise ValueError("source tuple does not match code dimensions")
    return tuple(mat_vec(H, v) for H, v in zip(code.matrices, x))


def syndrome_key(y: SyndromeTuple) -> bytes:
    return b"".join(v.tobytes() for v in y)


# ---------------------------------------------------------------------------
# compressibility
# ---------------------------------------------------------------------------


def find_collision(code: SwCode) -> tuple[SourceTuple, SourceTuple] | None:
    """Two distinct members of S with equal syndromes, or None.

    Stacks A = [H_1; ...; H_s] and eliminates [A | I] once.  If rank(A) < n
    the common null vector is an immediate collision.  Otherwise a u-pattern
    (c + u_i in null H_i for all i) is solvable iff the bottom M - n
    transform rows annihilate its right-hand side, and those checker values
    are linear in the pattern, so each single-column value is precomputed
    and collisions reduce to equal hash keys.
    """
    mats = code.matrices
    s, n = code.s, code.n
    A = vstack(mats)
    Mtot = A.rows
    aug, pivots = rref_augmented(A, BitMatrix.identity(Mtot))
    r = len(pivots)
    if r < n:
        x = null_space(A).basis.row(0)
        pair = (tuple(x for _ in range(s)), tuple(BitVector.zeros(n) for _ in range(s)))
        return _validate_pair(code, *pair)

    E = aug.take_cols(n, n + Mtot)
    Etop = E.take_rows(0, n)
    F = E.take_rows(n, Mtot)
    offsets = np.cumsum([0, *code.m])

    checker_cols: list[np.ndarray] = []
    for i, H in enumerate(mats):
        Fi = F.take_cols(int(offsets[i]), int(offsets[i + 1]))
        Wi = Fi @ H
        checker_cols.append(np.ascontiguousarray(Wi.to_array().T))

    zero_key = bytes(Mtot - n)
    seen: dict[bytes, tuple[int, int]] = {}
    for i in range(s):
        cols = checker_cols[i]
        for p in range(n):
            key = cols[p].tobytes()
            if key == zero_key:
                return _collision_from_pattern(code, Etop, i, p, None, None)
            prev = seen.get(key)
            if prev is None:
                seen[key] = (i, p)
                continue
            i0, p0 = prev
            if s == 2 and i0 != i and p0 == p:
                # both terminals deviating at one position: skip when the
                # unique solution c = e_p would make the S+S witness zero
                c = _particular_solution(code, Etop, i0, p0, i, p)
                if c == BitVector.unit(n, p):
                    continue
            return _collision_from_pattern(code, Etop, i0, p0, i, p)
    return None


def _pattern_rhs(code: SwCode, i: int, p: int, j: int | None, q: int | None) -> BitVector:
    parts = [BitVector.zeros(mi) for mi in code.m]
    parts[i] = parts[i] + code.matrices[i].column(p)
    if j is not None:
        parts[j] = parts[j] + code.matrices[j].column(q)
    return concat(parts)


def _particular_solution(
    code: SwCode, Etop: BitMatrix, i: int, p: int, j: int | None, q: int | None
) -> BitVector:
    return mat_vec(Etop, _pattern_rhs(code, i, p, j, q))


def _collision_from_pattern(
    code: SwCode, Etop: BitMatrix, i0: int, p0: int, i1: int | None, p1: int | None
):
    """Build the colliding S-member pair for a solvable u-pattern."""
    n, s = code.n, code.s
    c = _particular_solution(code, Etop, i0, p0, i1, p1)
    zero = BitVector.zeros(n)
    if i1 is None:
        # single weight-1 deviation at (i0, p0)
        a = tuple(c for _ in range(s))
        b = tuple(BitVector.unit(n, p0) if k == i0 else zero for k in range(s))
    else:
        # u splits as e_p0 at i0 on one side, e_p1 at i1 on the other
        # (i0 == i1 is the weight-2 family, i0 != i1 the two-terminal one)
        a = tuple(c + BitVector.unit(n, p0) if k == i0 else c for k in range(s))
        b = tuple(BitVector.unit(n, p1) if k == i1 else zero for k in range(s))
    return _validate_pair(code, a, b)


def _validate_pair(code: SwCode, a: SourceTuple, b: SourceTuple):
    # counterexamples are self-validating: in S, distinct, equal syndromes
    assert is_hamming_member(a) and is_hamming_member(b)
    assert a != b
    assert encode(code, a) == encode(code, b)
    return a, b


def is_compressible(code: SwCode) -> bool:
    """True iff the encoding map restricted to S is injective."""
    return find_collision(code) is None


def brute_force_collision(
    code: SwCode, budget: int = 1 << 16
) -> tuple[SourceTuple, SourceTuple] | None:
    """Oracle: pairwise syndrome comparison over an explicit enumeration of S."""
    seen: dict[bytes, SourceTuple] = {}
    for x in enumerate_hamming_sources(code.s, code.n, budget=budget):
        key = syndrome_key(encode(code, x))
        prev = seen.get(key)
        if prev is not None:
            return prev, x
        seen[key] = x
    return None


def is_perfect(code: SwCode) -> bool:
    """Compressible, every matrix surjective, and the image over all inputs
    (then all 2^M syndrome tuples) has exactly |S| elements: the packing
    bound holds with equality and no transmitted bit is redundant."""
    if any(rank(H) != H.rows for H in code.matrices):
        return False
    if (1 << sum(code.m)) != hamming_source_size(code.s, code.n):
        return False
    return is_compressible(code)


# ---------------------------------------------------------------------------
# table decoding
# ---------------------------------------------------------------------------


class DecodeTable:
    """Exhaustive syndrome table for a compressible code.

    Under the Hamming-source prior, the most probable explanation of a
    syndrome tuple is any member of S producing it; compressibility makes
    that member unique.
    """

    def __init__(self, code: SwCode, budget: int = DEFAULT_TABLE_BUDGET):
        size = hamming_source_size(code.s, code.n)
        if size > budget:
            raise BudgetExceededError(
                f"|S| = {size} exceeds decode-table budget {budget}"
            )
        self.code = code
        table: dict[bytes, SourceTuple] = {}
        for x in enumerate_hamming_sources(code.s, code.n, budget=budget):
            key = syndrome_key(encode(code, x))
            if key in table:
                raise ValueError("code is not compressible; table is ambiguous")
            table[key] = x
        self._table = table

    def decode(self, y: SyndromeTuple) -> SourceTuple:
        if len(y) != self.code.s or any(v.n != mi for v, mi in zip(y, self.code.m)):
            raise ValueError("syndrome tuple does not match code dimensions")
        try:
            return self._table[syndrome_key(y)]
        except KeyError:
            raise NotInImageError("syndrome tuple is not produced by any member of S")


# ---------------------------------------------------------------------------
# exhaustive search for perfect null-space profiles (three terminals)
# ---------------------------------------------------------------------------


def gaussian_binomial(n: int, k: int) -> int:
    """Number of k-dimensional subspaces of GF(2)^n."""
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= (1 << (n - i)) - 1
        den *= (1 << (k - i)) - 1
    return num // den


def admissible_null_spaces(n: int, d: int) -> list[Subspace]:
    """All d-dimensional subspaces of GF(2)^n whose nonzero vectors all have
    weight >= 3.  A coding-matrix null space containing a weight-1 or
    weight-2 vector immediately collides two members of S, so only these
    subspaces can appear in a compressing profile."""
    if d == 0:
        return [Subspace.zero(n)]
    out: list[Subspace] = []
    for pivots in itertools.combinations(range(n), d):
        pivset = set(pivots)
        free = [
            (i, j)
            for i in range(d)
            for j in range(n)
            if j > pivots[i] and j not in pivset
        ]
        for assignment in itertools.product((0, 1), repeat=len(free)):
            rows = [1 << pivots[i] for i in range(d)]
            for (i, j), bit in zip(free, assignment):
                if bit:
                    rows[i] |= 1 << j
            if _min_weight_at_least_3(rows, d):
                bits = np.zeros((d, n), dtype=np.uint8)
                for i, rv in enumerate(rows):
                    for j in range(n):
                        bits[i, j] = (rv >> j) & 1
                out.append(Subspace(n, BitMatrix.from_bits(bits)))
    return out


def _min_weight_at_least_3(rows: list[int], d: int) -> bool:
    span = [0]
    for r in rows:
        span += [v ^ r for v in span]
    return all(v.bit_count() >= 3 for v in span[1:])


@dataclass
class SearchResult:
    """Outcome of a perfect-profile search at fixed (n, M)."""

    n: int
    M: int
    assignments_considered: int = 0
    assignments_admissible: list[tuple[int, ...]] = field(default_factory=list)
    candidate_counts: dict[int, int] = field(default_factory=dict)
    triples_tested: int = 0
    profiles: list[tuple[Subspace, ...]] = field(default_factory=list)


def _test_profile(n: int, mats: Sequence[BitMatrix]) -> bool:
    code = make_code(mats)
    return is_compressible(code)


def search_perfect_null_spaces(
    n: int,
    M: int,
    *,
    s: int = 3,
    budget: int = DEFAULT_SEARCH_BUDGET,
    jobs: int = 1,
) -> SearchResult:
    """Enumerate all admissible null-space triples for a perfect (3, n, M)
    code and keep the ones whose induced codes compress S.

    Null-space dimensions follow from the full-rank requirement, d_i =
    n - m_i, over all row splits m_1 + m_2 + m_3 = M.  Candidate subspaces
    are pruned by the weight-1/weight-2 exclusion before any code is
    tested; compressibility depends only on the null spaces, so each triple
    is tested once through the coset-intersection criterion.
    """
    if s != 3:
        raise ValueError("profile search is implemented for s = 3")
    if not is_perfect_params(3, n, M):
        raise ParamsNotPerfectError(f"2^{n}(3*{n}+1) != 2^{M}: no perfect code can exist")
    result = SearchResult(n=n, M=M)

    cands: dict[int, list[Subspace]] = {}
    assignments = []
    for m1 in range(1, n + 1):
        for m2 in range(1, n + 1):
            m3 = M - m1 - m2
            if not 1 <= m3 <= n:
                continue
            result.assignments_considered += 1
            dims = (n - m1, n - m2, n - m3)
            ok = True
            for d in dims:
                if d not in cands:
                    cands[d] = admissible_null_spaces(n, d)
                    result.candidate_counts[d] = len(cands[d])
                if not cands[d]:
                    ok = False
            if ok:
                assignments.append(dims)
                result.assignments_admissible.append((m1, m2, m3))

    total = sum(
        len(cands[d1]) * len(cands[d2]) * len(cands[d3]) for d1, d2, d3 in assignments
    )
    if total > budget:
        raise BudgetExceededError(f"{total} admissible triples exceed budget {budget}")

    mat_cache = {
        d: [matrix_with_null_space(N) for N in cands[d]] for d in cands if cands[d]
    }

    for dims in assignments:
        lists = [cands[d] for d in dims]
        mlists = [mat_cache[d] for d in dims]
        sizes = [len(l) for l in lists]
        indices = range(sizes[0] * sizes[1] * sizes[2])
        if jobs > 1:
            passing = _search_parallel(n, dims, mlists, sizes, jobs)
        else:
            passing = [
                idx
                for idx in indices
                if _test_profile(n, _triple_at(mlists, sizes, idx))
            ]
        result.triples_tested += sizes[0] * sizes[1] * sizes[2]
        for idx in sorted(passing):
            a, rem = divmod(idx, sizes[1] * sizes[2])
            b, c = divmod(rem, sizes[2])
            result.profiles.append((lists[0][a], lists[1][b], lists[2][c]))
    return result


def _triple_at(mlists, sizes, idx):
    a, rem = divmod(idx, sizes[1] * sizes[2])
    b, c = divmod(rem, sizes[2])
    return (mlists[0][a], mlists[1][b], mlists[2][c])


def _search_chunk(args):
    n, mlists, sizes, start, stop = args
    return [
        idx
        for idx in range(start, stop)
        if _test_profile(n, _triple_at(mlists, sizes, idx))
    ]


def _search_parallel(n, dims, mlists, sizes, jobs):
    from concurrent.futures import ProcessPoolExecutor

    total = sizes[0] * sizes[1] * sizes[2]
    step = max(1, -(-total // jobs))
    chunks = [
        (n, mlists, sizes, lo, min(lo + step, total)) for lo in range(0, total, step)
    ]
    passing: list[int] = []
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        for part in pool.map(_search_chunk, chunks):
            passing.extend(part)
    return passing


# ---------------------------------------------------------------------------
# plain code files: "s n", "m_1 ... m_s", then the s matrices
# ---------------------------------------------------------------------------


def format_code(code: SwCode) -> str:
    head = f"{code.s} {code.n}\n" + " ".join(str(mi) for mi in code.m) + "\n"
    return head + "".join(format_matrix(H) for H in code.matrices)


def parse_code(lines: Iterable[str]) -> SwCode:
    it = iter(lines)
    try:
        s, n = (int(t) for t in next(it).split())
        m = tuple(int(t) for t in next(it).split())
    except (StopIteration, ValueError) as exc:
        raise MalformedFileError("expected 's n' and 'm_1 ... m_s' header lines") from exc
    if len(m) != s:
        raise MalformedFileError(f"expected {s} syndrome lengths, got {len(m)}")
    mats = []
    for mi in m:
        H = parse_matrix(it)
        if H.rows != mi or H.cols != n:
            raise MalformedFileError(
                f"matrix {H.rows}x{H.cols} disagrees with header ({mi}x{n})"
            )
        mats.append(H)
    return SwCode(SourceParams(s, n, m), tuple(mats))


def format_syndromes(groups: Sequence[SyndromeTuple]) -> str:
    blocks = ["\n".join(v.to01() for v in y) for y in groups]
    return "\n\n".join(blocks) + "\n"


def iter_syndromes(lines, m: Sequence[int]):
    """Parse syndrome tuples one blank-line separated group at a time."""
    from .sources import iter_bit_groups

    for group in iter_bit_groups(lines):
        if len(group) != len(m):
            raise MalformedFileError(f"expected {len(m)} syndrome lines per tuple")
        vecs = []
        for ln, mi in zip(group, m):
            if len(ln) != mi:
                raise MalformedFileError(f"bad syndrome line {ln!r} (expected {mi} bits)")
            vecs.append(BitVector.from_bits(int(c) for c in ln))
        yield tuple(vecs)


def parse_syndromes(text: str, m: Sequence[int]) -> list[SyndromeTuple]:
    return list(iter_syndromes(text.splitlines(), m))
