"""CLI behavior: subcommands, file round trips, exit codes, determinism."""

from __future__ import annotations

import pytest

from swhamming import bundleio, cli, codec, gf2, hcms, sources


def run(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_params_scan_table(capsys):
    code, out, _ = run(capsys, "params", "--scan", "5", "--kv")
    assert code == 0
    rows = [dict(tok.split("=") for tok in line.split()) for line in out.splitlines()]
    got = [(int(r["a"]), int(r["n"]), int(r["M"]), int(r["M-n"]), int(r["3n-2M"])) for r in rows]
    assert got == [
        (1, 1, 3, 2, -3),
        (2, 5, 9, 4, -3),
        (3, 21, 27, 6, 9),
        (4, 85, 93, 8, 69),
        (5, 341, 351, 10, 321),
    ]


def test_params_cuvw(capsys):
    code, out, _ = run(capsys, "params", "--a", "3", "--cuvw")
    assert code == 0 and "(12,4,4,4)" in out
    code, out, _ = run(capsys, "params", "--a", "1", "--cuvw", "--kv")
    assert code == 0 and "cuvw=0,0,0,0" in out


def test_gen_and_verify_trivial(tmp_path, capsys):
    path = tmp_path / "trivial.txt"
    code, out, _ = run(capsys, "gen", "--trivial", "-o", str(path))
    assert code == 0 and "kind=ghcms" in out
    code, out, _ = run(capsys, "verify", str(path))
    assert code == 0
    assert "compressible=true perfect=true" in out


def test_gen_a3_roundtrip_files(tmp_path, capsys, rng):
    bundle_path = tmp_path / "a3.txt"
    code, out, _ = run(capsys, "gen", "--a", "3", "--split", "3,3,3", "-o", str(bundle_path))
    assert code == 0 and "m=9,9,9" in out

    tuples = [sources.random_member(3, 21, rng) for _ in range(5)]
    src = tmp_path / "src.txt"
    src.write_text(sources.format_tuples(tuples))
    synd = tmp_path / "synd.txt"
    back = tmp_path / "back.txt"
    code, out, _ = run(capsys, "encode", str(bundle_path), "--input", str(src), "--output", str(synd))
    assert code == 0
    code, out, _ = run(capsys, "decode", str(bundle_path), "--input", str(synd), "--output", str(back))
    assert code == 0 and "path=algebraic" in out
    assert back.read_text() == src.read_text()


@pytest.mark.parametrize("gen_args,s,n", [
    (("--trivial",), 3, 1),
    (("--a", "3"), 3, 21),
    (("--a", "4"), 3, 85),
])
def test_file_roundtrip_three_sizes(tmp_path, capsys, rng, gen_args, s, n):
    bundle_path = tmp_path / "bundle.txt"
    assert run(capsys, "gen", *gen_args, "-o", str(bundle_path))[0] == 0
    tuples = [sources.random_member(s, n, rng) for _ in range(3)]
    src = tmp_path / "src.txt"
    src.write_text(sources.format_tuples(tuples))
    synd = tmp_path / "synd.txt"
    back = tmp_path / "back.txt"
    assert run(capsys, "encode", str(bundle_path), "--input", str(src), "--output", str(synd))[0] == 0
    assert run(capsys, "decode", str(bundle_path), "--input", str(synd), "--output", str(back))[0] == 0
    assert back.read_text() == src.read_text()


def test_decode_table_path(tmp_path, capsys, rng, pair_n7):
    code_path = tmp_path / "pair.txt"
    bundleio.write_code_file(code_path, pair_n7)
    tuples = [sources.random_member(2, 7, rng) for _ in range(3)]
    src = tmp_path / "src.txt"
    src.write_text(sources.format_tuples(tuples))
    synd = tmp_path / "synd.txt"
    back = tmp_path / "back.txt"
    assert run(capsys, "encode", str(code_path), "--input", str(src), "--output", str(synd))[0] == 0
    code, out, _ = run(capsys, "decode", str(code_path), "--input", str(synd), "--output", str(back))
    assert code == 0 and "path=table" in out
    assert back.read_text() == src.read_text()


def test_decode_table_budget_env(tmp_path, capsys, monkeypatch, pair_n7):
    code_path = tmp_path / "pair.txt"
    bundleio.write_code_file(code_path, pair_n7)
    synd = tmp_path / "synd.txt"
    synd.write_text(codec.format_syndromes(
        [codec.encode(pair_n7, sources.member_at(2, 7, 0))]
    ))
    monkeypatch.setenv("HCMS_BUDGET", "16")
    code, _, err = run(capsys, "decode", str(code_path), "--input", str(synd), "--output", str(tmp_path / "o.txt"))
    assert code == 2 and "error=BUDGET_EXCEEDED" in err


def test_gen_rejects_small_a(tmp_path, capsys):
    code, _, err = run(capsys, "gen", "--a", "2", "-o", str(tmp_path / "x.txt"))
    assert code == 2
    assert "error=HEIGHT_NEGATIVE" in err


def test_verify_sabotaged_bundle(tmp_path, capsys):
    path = tmp_path / "a3.txt"
    assert run(capsys, "gen", "--a", "3", "-o", str(path))[0] == 0
    lines = path.read_text().splitlines()
    # line 3 is the first row of the first coding matrix
    row = list(lines[3])
    row[7] = "1" if row[7] == "0" else "0"
    lines[3] = "".join(row)
    bad = tmp_path / "bad.txt"
    bad.write_text("\n".join(lines) + "\n")
    code, out, err = run(capsys, "verify", str(bad))
    assert code == 1
    assert "perfect=false" in out
    assert "counterexample" in out
    assert "error=NOT_PERFECT" in err


def test_verify_roundtrip_flag(tmp_path, capsys):
    path = tmp_path / "a3.txt"
    assert run(capsys, "gen", "--a", "3", "-o", str(path))[0] == 0
    code, out, _ = run(capsys, "verify", str(path), "--roundtrip", "10", "--seed", "7")
    assert code == 0 and "roundtrip=10/10" in out


def test_search_outputs(capsys):
    code, out, _ = run(capsys, "search", "--n", "5", "--M", "9")
    assert code == 0
    assert "triples_tested=3375" in out and "found=0" in out and "none exists" in out
    code, out, _ = run(capsys, "search", "--n", "1", "--M", "3")
    assert code == 0 and "found=1" in out and "dims=0,0,0" in out
    code, _, err = run(capsys, "search", "--n", "4", "--M", "8")
    assert code == 2 and "error=PARAMS_NOT_PERFECT" in err


def test_reduce_flow(tmp_path, capsys):
    src = tmp_path / "a3.txt"
    out_path = tmp_path / "reduced.txt"
    assert run(capsys, "gen", "--a", "3", "-o", str(src))[0] == 0
    code, out, _ = run(capsys, "reduce", str(src), "-o", str(out_path), "--kv")
    assert code == 0
    assert "input_null_dims=12,12,12" in out
    assert "perfect=true" in out
    code, out, _ = run(capsys, "verify", str(out_path))
    assert code == 0 and "perfect=true" in out


def test_malformed_file(tmp_path, capsys):
    bad = tmp_path / "junk.txt"
    bad.write_text("this is not a bundle\n")
    code, _, err = run(capsys, "verify", str(bad))
    assert code == 2 and "error=MALFORMED_FILE" in err


def test_outputs_deterministic(tmp_path, capsys):
    a = tmp_path / "one.txt"
    b = tmp_path / "two.txt"
    run(capsys, "gen", "--a", "3", "-o", str(a))
    run(capsys, "gen", "--a", "3", "-o", str(b))
    assert a.read_bytes() == b.read_bytes()
    out1 = run(capsys, "search", "--n", "5", "--M", "9", "--kv")[1]
    out2 = run(capsys, "search", "--n", "5", "--M", "9", "--kv")[1]
    assert out1 == out2


def test_bundle_file_roundtrip(tmp_path, bundle_a3):
    path = tmp_path / "bundle.txt"
    bundleio.write_bundle(path, bundle_a3)
    loaded = bundleio.load_bundle(path)
    assert loaded.code == bundle_a3.code
    assert loaded.Q == bundle_a3.Q
    assert loaded.R_inv == bundle_a3.R_inv


def test_ghcms_bundle_file_roundtrip(tmp_path):
    P = hcms.hamming_matrix(2)
    Q = tuple(P.take_cols(j, j + 1) for j in range(3))
    from swhamming import ghcms as ghcms_mod

    bundle = ghcms_mod.ghcms_build(Q)
    path = tmp_path / "ghcms.txt"
    bundleio.write_bundle(path, bundle)
    loaded = bundleio.load_bundle(path)
    assert loaded.code == bundle.code
    assert loaded.C == bundle.C
    assert loaded.E == bundle.E
    x = tuple(gf2.BitVector.from_bits([1]) for _ in range(3))
    y = codec.encode(loaded.code, x)
    assert ghcms_mod.ghcms_decode(loaded, y) == x


def test_search_jobs_flag(capsys):
    code, out, _ = run(capsys, "search", "--n", "1", "--M", "3", "--jobs", "2")
    assert code == 0 and "found=1" in out
