"""Command-line surface: params, gen, encode, decode, verify, search, reduce.

All outputs are byte-deterministic given flags and --seed.  Failures print
``error=<TOKEN> <message>`` on stderr and exit nonzero.  HCMS_BUDGET
overrides enumeration and table budgets; HCMS_BACKEND picks the kernel
backend.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import bundleio, codec, equiv, ghcms, hcms, sources
from .errors import NotPerfectError, SwError
from .gf2 import format_matrix, null_space, rank


def _kv(pairs) -> str:
    return " ".join(f"{k}={v}" for k, v in pairs)


def _intlist(vals) -> str:
    return ",".join(str(v) for v in vals)


# ---------------------------------------------------------------------------
# params
# ---------------------------------------------------------------------------


def cmd_params(args) -> int:
    avals = list(range(1, args.scan + 1)) if args.scan else [args.a]
    rows = []
    for a in avals:
        n, M = sources.perfect_params_for_a(a)
        rows.append((a, n, M, M - n, 3 * n - 2 * M))
    if args.kv:
        for a, n, M, d, c in rows:
            line = _kv([("a", a), ("n", n), ("M", M), ("M-n", d), ("3n-2M", c)])
            if args.cuvw:
                opts = sources.feasible_cuvw(n, M)
                line += " cuvw=" + "|".join(_intlist(r) for r in opts)
            print(line)
    else:
        print(f"{'a':>3} {'n':>6} {'M':>6} {'M-n':>6} {'3n-2M':>7}")
        for a, n, M, d, c in rows:
            print(f"{a:>3} {n:>6} {M:>6} {d:>6} {c:>7}")
            if args.cuvw:
                opts = sources.feasible_cuvw(n, M)
                print("      c,u,v,w: " + "  ".join("(" + _intlist(r) + ")" for r in opts))
    return 0


# ---------------------------------------------------------------------------
# gen
# ---------------------------------------------------------------------------


def cmd_gen(args) -> int:
    if args.trivial:
        P = hcms.hamming_matrix(2)
        Q = tuple(P.take_cols(j, j + 1) for j in range(3))
        bundle = ghcms.ghcms_build(Q)
        kind = "ghcms"
    else:
        split = [int(t) for t in args.split.split(",")] if args.split else None
        bundle = hcms.hcms_for_a(args.a, g_split=split, max_a=args.max_a)
        kind = "hcms"
    if not codec.is_perfect(bundle.code):
        raise NotPerfectError("generated bundle failed the perfectness check")
    bundleio.write_bundle(args.output, bundle)
    print(
        _kv(
            [
                ("written", args.output),
                ("kind", kind),
                ("s", bundle.s),
                ("n", bundle.n),
                ("M", bundle.M),
                ("m", _intlist(bundle.code.m)),
            ]
        )
    )
    return 0


# ---------------------------------------------------------------------------
# encode / decode
# ---------------------------------------------------------------------------


def _write_groups(path, groups) -> int:
    """Stream blank-line separated bit groups to a file; returns the count."""
    count = 0
    with open(path, "w") as fh:
        for vectors in groups:
            if count:
                fh.write("\n")
            for v in vectors:
                fh.write(v.to01() + "\n")
            count += 1
    return count


def cmd_encode(args) -> int:
    parsed = bundleio.read_file(args.bundle)
    code = parsed.code
    with open(args.input) as fh:
        count = _write_groups(
            args.output,
            (codec.encode(code, x) for x in sources.iter_tuples(fh)),
        )
    print(_kv([("encoded", count), ("written", args.output)]))
    return 0


def _decoder_for(parsed: bundleio.ParsedFile):
    if parsed.kind == "hcms":
        bundle = bundleio.build_hcms(parsed)
        return lambda y: hcms.hcms_decode(bundle, y), "algebraic"
    if parsed.kind == "ghcms":
        bundle = bundleio.build_ghcms(parsed)
        return lambda y: ghcms.ghcms_decode(bundle, y), "algebraic"
    budget = sources.env_budget(codec.DEFAULT_TABLE_BUDGET)
    table = codec.DecodeTable(parsed.code, budget=budget)
    return table.decode, "table"


def cmd_decode(args) -> int:
    parsed = bundleio.read_file(args.bundle)
    decoder, path_name = _decoder_for(parsed)
    with open(args.input) as fh:
        count = _write_groups(
            args.output,
            (decoder(y) for y in codec.iter_syndromes(fh, parsed.code.m)),
        )
    print(_kv([("decoded", count), ("path", path_name), ("written", args.output)]))
    return 0


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def cmd_verify(args) -> int:
    parsed = bundleio.read_file(args.bundle)
    code = parsed.code
    print(
        _kv(
            [
                ("kind", parsed.kind),
                ("s", code.s),
                ("n", code.n),
                ("M", sum(code.m)),
                ("ranks", _intlist(rank(H) for H in code.matrices)),
                ("null_dims", _intlist(null_space(H).dim for H in code.matrices)),
            ]
        )
    )
    collision = codec.find_collision(code)
    compressible = collision is None
    perfect = compressible and codec.is_perfect(code)
    print(_kv([("compressible", str(compressible).lower()), ("perfect", str(perfect).lower())]))
    if collision is not None:
        a, b = collision
        print("counterexample (two members of S with equal syndromes):")
        for label, t in (("first", a), ("second", b)):
            print(f"  {label}: " + " ".join(v.to01() for v in t))

    ok = perfect
    if args.roundtrip and compressible:
        decoder, path_name = _decoder_for(parsed)
        rng = np.random.default_rng(args.seed)
        failures = 0
        for _ in range(args.roundtrip):
            x = sources.random_member(code.s, code.n, rng)
            if decoder(codec.encode(code, x)) != x:
                failures += 1
        print(
            _kv(
                [
                    ("roundtrip", f"{args.roundtrip - failures}/{args.roundtrip}"),
                    ("path", path_name),
                    ("seed", args.seed),
                ]
            )
        )
        ok = ok and failures == 0
    if not ok:
        print("error=NOT_PERFECT verification failed", file=sys.stderr)
        return 1
    return 0


# ---------------------------------------------------------------------------
# search
# ---------------------------------------------------------------------------


def cmd_search(args) -> int:
    # explicit flag wins; otherwise HCMS_BUDGET overrides the default
    budget = args.budget if args.budget is not None else sources.env_budget(
        codec.DEFAULT_SEARCH_BUDGET
    )
    result = codec.search_perfect_null_spaces(
        args.n, args.M, s=args.s, budget=budget, jobs=args.jobs
    )
    print(
        _kv(
            [
                ("n", result.n),
                ("M", result.M),
                ("assignments_considered", result.assignments_considered),
                ("assignments_admissible", len(result.assignments_admissible)),
            ]
        )
    )
    for d in sorted(result.candidate_counts):
        print(_kv([("dim", d), ("admissible_subspaces", result.candidate_counts[d])]))
    print(
        _kv(
            [
                ("triples_tested", result.triples_tested),
                ("found", len(result.profiles)),
            ]
        )
    )
    if not result.profiles:
        print("none exists")
    else:
        for k, prof in enumerate(result.profiles):
            print(f"profile {k}: dims=" + _intlist(N.dim for N in prof))
            if not args.kv:
                for i, N in enumerate(prof):
                    print(f"  null space {i} basis:")
                    body = format_matrix(N.basis).rstrip("\n").replace("\n", "\n    ")
                    print("    " + body)
    return 0


# ---------------------------------------------------------------------------
# reduce
# ---------------------------------------------------------------------------


def cmd_reduce(args) -> int:
    parsed = bundleio.read_file(args.bundle)
    bundle, report = equiv.reduce_with_report(parsed.code)
    bundleio.write_bundle(args.output, bundle)
    print(_kv([("written", args.output), ("kind", "ghcms"), ("s", bundle.s), ("n", bundle.n)]))
    print(_kv([("input_null_dims", _intlist(report.input_profile_dims))]))
    print(_kv([("moved_residual_dims", _intlist(report.residual_dims))]))
    print(_kv([("normalized_null_dims", _intlist(report.normalized_profile_dims))]))
    if report.tail_intersection_dim is not None:
        # intersection over all but the last terminal; reported, not asserted
        print(_kv([("tail_intersection_dim", report.tail_intersection_dim)]))
    print(_kv([("output_rates", _intlist(report.output_rates))]))
    print(_kv([("perfect", str(report.perfect).lower())]))
    if not args.kv:
        print("hamming_column_permutation=" + _intlist(report.hamming_permutation))
    return 0


# ---------------------------------------------------------------------------
# wiring
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="swhamming",
        description="Syndrome-based Slepian-Wolf codes for Hamming-correlated sources",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("params", help="perfect-parameter tables for three sources")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--a", type=int, help="single parameter value")
    g.add_argument("--scan", type=int, help="list a = 1..SCAN")
    p.add_argument("--cuvw", action="store_true", help="include feasible (c,u,v,w) rows")
    p.add_argument("--kv", action="store_true", help="key=value output")
    p.set_defaults(func=cmd_params)

    p = sub.add_parser("gen", help="generate a construction bundle")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--a", type=int, help="construction parameter (>= 3)")
    g.add_argument("--trivial", action="store_true", help="the three length-1 sources bundle")
    p.add_argument("--split", help="comma-separated row split of T, e.g. 3,3,3")
    p.add_argument("--max-a", type=int, default=hcms.DEFAULT_MAX_A)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("encode", help="encode source tuples block-wise")
    p.add_argument("bundle")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="decode syndrome tuples")
    p.add_argument("bundle")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("verify", help="compressibility / perfectness report")
    p.add_argument("bundle")
    p.add_argument("--kv", action="store_true")
    p.add_argument("--roundtrip", type=int, default=0, help="sampled decode round-trips")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("search", help="exhaustive perfect-profile search (s = 3)")
    p.add_argument("--s", type=int, default=3)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--kv", action="store_true")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("reduce", help="reduce a perfect code to the relaxed bundle form")
    p.add_argument("bundle")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--kv", action="store_true")
    p.set_defaults(func=cmd_reduce)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SwError as exc:
        print(f"error={exc.token} {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error=IO {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
