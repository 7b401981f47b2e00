"""Backend interchangeability: numba and numpy kernels must agree bit-for-bit."""

from __future__ import annotations

import numpy as np
import pytest

from swhamming import _kernels, gf2

pytestmark = pytest.mark.skipif(
    "numba" not in _kernels.available_backends(), reason="numba not installed"
)


@pytest.fixture()
def restore_backend():
    before = _kernels.get_backend()
    yield
    _kernels.set_backend(before)


def test_pack_unpack_roundtrip(rng):
    for cols in (1, 63, 64, 65, 128, 341):
        bits = rng.integers(0, 2, size=(5, cols), dtype=np.uint8)
        packed = _kernels.pack_bits(bits)
        assert packed.shape == (5, _kernels.nwords(cols))
        assert np.array_equal(_kernels.unpack_bits(packed, cols), bits)


def test_backends_agree_on_rref(rng, restore_backend):
    for _ in range(40):
        rows = int(rng.integers(1, 20))
        cols = int(rng.integers(1, 200))
        M = gf2.random_matrix(rows, cols, rng)
        _kernels.set_backend("numba")
        r_nb, p_nb = gf2.rref(M)
        _kernels.set_backend("numpy")
        r_np, p_np = gf2.rref(M)
        assert r_nb == r_np and p_nb == p_np


def test_backends_agree_on_matmul_matvec(rng, restore_backend):
    for _ in range(40):
        r, k, c = (int(rng.integers(1, 90)) for _ in range(3))
        A = gf2.random_matrix(r, k, rng)
        B = gf2.random_matrix(k, c, rng)
        x = gf2.random_matrix(1, k, rng).row(0)
        _kernels.set_backend("numba")
        ab_nb, ax_nb = A @ B, gf2.mat_vec(A, x)
        _kernels.set_backend("numpy")
        assert A @ B == ab_nb
        assert gf2.mat_vec(A, x) == ax_nb


def test_backend_selection(restore_backend):
    _kernels.set_backend("numpy")
    assert _kernels.get_backend() == "numpy"
    _kernels.set_backend("numba")
    assert _kernels.get_backend() == "numba"
    with pytest.raises(ValueError):
        _kernels.set_backend("fortran")
