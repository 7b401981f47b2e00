"""Null-space equivalence machinery.

Whether a code compresses the Hamming sources depends only on the tuple of
its null spaces (its profile): the sumset criterion in :mod:`codec`
references nothing else.  Shifting a common subspace K between terminals'
null spaces preserves compressibility and perfectness, which induces the
equivalence relation under which every perfect code reduces to the
row-basis relaxed construction: normalize the profile, fold the s
terminals into an equivalent 2-source pair, read off the sum-zero
partition from its combined null space, and reassemble.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codec import SwCode, is_perfect, make_code
from .errors import DecompositionInvalidError, NotPerfectError
from .gf2 import (
    BitMatrix,
    Subspace,
    complement,
    matrix_with_null_space,
    null_space,
    row_basis,
    subspace_intersect,
    subspace_sum,
    vstack,
)
from .ghcms import GhcmsBundle, degenerate_two_source, ghcms_build
from .hcms import _column_values
from .sources import hamming_source_size

__all__ = [
    "NullProfile",
    "profile",
    "matrix_with_null_space",
    "shift_null_space",
    "two_source_reduce",
    "residual_intersections",
    "normalize_profile",
    "lift_to_two_source",
    "reduce_to_ghcms",
    "reduce_with_report",
    "ReduceReport",
    "code_from_profile",
]

NullProfile = tuple[Subspace, ...]


def profile(code: SwCode) -> NullProfile:
    """The s-tuple of null spaces; the invariant of the equivalence class."""
    return tuple(null_space(H) for H in code.matrices)


def code_from_profile(spaces: NullProfile) -> SwCode:
    """Surjective matrices realizing the given null spaces."""
    return make_code([matrix_with_null_space(N) for N in spaces])


def shift_null_space(
    code: SwCode,
    K: Subspace,
    from_r: int,
    to_d: int,
    residual: Subspace | None = None,
) -> SwCode:
    """Move the common subspace K out of terminal to_d's null space and into
    terminal from_r's.

    Requires K inside every null space except from_r's, and K disjoint from
    from_r's.  The part of null(H_to_d) left behind defaults to the
    canonical complement of K; pass ``residual`` to pick it explicitly
    (the exact inverse of a previous shift passes the original null space).
    Compressibility and perfectness are preserved; all output matrices are
    surjective.
    """
    s = code.s
    if not (0 <= from_r < s and 0 <= to_d < s):
        raise IndexError("terminal index out of range")
    prof = list(profile(code))
    for i in range(s):
        if i == from_r:
            if subspace_intersect(K, prof[i]).dim != 0:
                raise DecompositionInvalidError(
                    f"K meets null space {i} nontrivially; K + N_{i} is not direct"
                )
        elif not prof[i].contains_subspace(K):
            raise DecompositionInvalidError(f"K is not contained in null space {i}")

    if from_r != to_d:
        if residual is None:
            residual = complement(K, prof[to_d])
        else:
            if subspace_intersect(K, residual).dim != 0 or subspace_sum(
                K, residual
            ) != prof[to_d]:
                raise DecompositionInvalidError(
                    "residual does not complement K inside null space "
                    f"{to_d}"
                )
        prof[from_r] = subspace_sum(prof[from_r], K)
        prof[to_d] = residual
    return code_from_profile(tuple(prof))


def two_source_reduce(code: SwCode) -> tuple[BitMatrix, BitMatrix]:
    """Normal form of a perfect 2-source code: shift the whole null space of
    terminal 1 into terminal 2, leaving an invertible matrix (the identity)
    and a full-rank matrix whose columns are nonzero and pairwise distinct,
    i.e. a column permutation of the Hamming matrix with 2^m = n + 1."""
    if code.s != 2:
        raise ValueError("reduction applies to 2-source codes")
    if not is_perfect(code):
        raise NotPerfectError("input code is not a perfect compression")
    n = code.n
    n1, n2 = profile(code)
    combined = subspace_sum(n1, n2)
    assert combined.dim == n1.dim + n2.dim, "null spaces of a compressing code meet in 0"
    H2 = matrix_with_null_space(combined)
    assert (1 << H2.rows) == n + 1
    cols = {H2.column_bytes(j) for j in range(n)}
    assert len(cols) == n and bytes(H2.rows) not in cols, (
        "columns of the reduced matrix must be nonzero and distinct"
    )
    return BitMatrix.identity(n), H2


def residual_intersections(code: SwCode) -> list[Subspace]:
    """R_i = the intersection of every null space except the i-th, for
    i < s.  These are the parts normalization moves into terminal i."""
    prof = profile(code)
    s = code.s
    out = []
    for i in range(s - 1):
        acc = None
        for j in range(s):
            if j == i:
                continue
            acc = prof[j] if acc is None else subspace_intersect(acc, prof[j])
        out.append(acc)
    return out


def normalize_profile(code: SwCode) -> SwCode:
    """Equivalent perfect code in which, for every i < s, the null spaces of
    all terminals except i intersect in {0}.

    Moves each residual intersection R_i from the last terminal's null
    space into terminal i's; the last terminal keeps a complement of their
    direct sum.
    """
    if not is_perfect(code):
        raise NotPerfectError("input code is not a perfect compression")
    s = code.s
    prof = list(profile(code))
    residuals = residual_intersections(code)
    D = Subspace.zero(code.n)
    for R in residuals:
        D = subspace_sum(D, R)
    assert D.dim == sum(R.dim for R in residuals), "residuals must sum directly"
    assert prof[s - 1].contains_subspace(D)
    new_prof = []
    for i in range(s - 1):
        merged = subspace_sum(prof[i], residuals[i])
        assert merged.dim == prof[i].dim + residuals[i].dim
        new_prof.append(merged)
    new_prof.append(complement(D, prof[s - 1]))
    out = code_from_profile(tuple(new_prof))
    for i in range(s - 1):
        acc = None
        for j in range(s):
            if j == i:
                continue
            acc = new_prof[j] if acc is None else subspace_intersect(acc, new_prof[j])
        assert acc.dim == 0, "normalization must leave all-but-one intersections trivial"
    return out


def lift_to_two_source(code: SwCode) -> SwCode:
    """Fold a perfect (s, n, M) code, s > 2, into a perfect
    (2, sn, M + (s-1)n) code: one terminal sends consecutive block
    differences, the other the blockwise syndromes."""
    if code.s < 3:
        raise ValueError("folding is defined for s > 2 (a 2-source code already is one)")
    if not is_perfect(code):
        raise NotPerfectError("input code is not a perfect compression")
    s, n = code.s, code.n
    X = np.zeros(((s - 1) * n, s * n), dtype=np.uint8)
    eye = np.eye(n, dtype=np.uint8)
    for k in range(s - 1):
        X[k * n : (k + 1) * n, k * n : (k + 1) * n] = eye
        X[k * n : (k + 1) * n, (k + 1) * n : (k + 2) * n] = eye
    Mtot = sum(code.m)
    J = np.zeros((Mtot, s * n), dtype=np.uint8)
    ro = 0
    for i, H in enumerate(code.matrices):
        J[ro : ro + H.rows, i * n : (i + 1) * n] = H.to_array()
        ro += H.rows
    out = make_code([BitMatrix.from_bits(X), BitMatrix.from_bits(J)])
    assert is_perfect(out), "the folded pair must be perfect"
    return out


@dataclass
class ReduceReport:
    """Trace of the universality reduction for human-readable reports."""

    input_profile_dims: tuple[int, ...]
    residual_dims: tuple[int, ...] = ()
    normalized_profile_dims: tuple[int, ...] = ()
    tail_intersection_dim: int | None = None
    hamming_permutation: tuple[int, ...] = ()
    output_rates: tuple[int, ...] = ()
    perfect: bool = False


def reduce_to_ghcms(code: SwCode) -> GhcmsBundle:
    """Constructive universality: an equivalent relaxed bundle whose code has
    the normalized input's null profile, terminal by terminal."""
    bundle, _ = reduce_with_report(code)
    return bundle


def reduce_with_report(code: SwCode) -> tuple[GhcmsBundle, ReduceReport]:
    s, n = code.s, code.n
    report = ReduceReport(
        input_profile_dims=tuple(N.dim for N in profile(code)),
    )

    if s == 2:
        _, H2 = two_source_reduce(code)
        bundle = degenerate_two_source(H2)
        report.normalized_profile_dims = tuple(N.dim for N in profile(bundle.code))
        report.residual_dims = (profile(code)[1].dim,)
        report.hamming_permutation = tuple(int(v) for v in np.argsort(_column_values(H2)))
        report.output_rates = bundle.code.m
        report.perfect = bundle.perfect
        return bundle, report

    residuals = residual_intersections(code)
    report.residual_dims = tuple(R.dim for R in residuals)
    norm = normalize_profile(code)
    norm_prof = profile(norm)
    report.normalized_profile_dims = tuple(N.dim for N in norm_prof)
    tail = norm_prof[0]
    for N in norm_prof[1 : s - 1]:
        tail = subspace_intersect(tail, N)
    report.tail_intersection_dim = tail.dim

    lifted = lift_to_two_source(norm)
    null_x = null_space(lifted.matrices[0])
    null_j = null_space(lifted.matrices[1])
    combined = subspace_sum(null_x, null_j)
    assert combined.dim == null_x.dim + null_j.dim
    P = matrix_with_null_space(combined)
    Mtot = sum(norm.m)
    assert P.rows == Mtot - n
    cols = {P.column_bytes(j) for j in range(P.cols)}
    assert len(cols) == P.cols and bytes(P.rows) not in cols
    report.hamming_permutation = tuple(int(v) for v in np.argsort(_column_values(P)))

    Q = tuple(P.take_cols(i * n, (i + 1) * n) for i in range(s))
    zsum = Q[0]
    for B in Q[1:]:
        zsum = zsum + B
    assert zsum.is_zero()
    for j in range(s - 1):
        assert null_space(Q[j]) == norm_prof[j], f"block {j} must inherit null space"
    Y = row_basis(vstack(Q[: s - 1]))
    null_y = null_space(Y)
    assert null_space(Q[s - 1]) == subspace_sum(norm_prof[s - 1], null_y)

    A = complement(subspace_sum(norm_prof[s - 1], null_y), Subspace.full(n))
    T = matrix_with_null_space(subspace_sum(norm_prof[s - 1], A))
    g_split = (0,) * (s - 1) + (T.rows,)
    bundle = ghcms_build(Q, g_split=g_split, T=T)

    out_prof = profile(bundle.code)
    assert out_prof == norm_prof, "output profile must equal the normalized input's"
    report.output_rates = bundle.code.m
    report.perfect = bundle.perfect
    assert bundle.perfect and (1 << sum(bundle.code.m)) == hamming_source_size(s, n)
    return bundle, report
