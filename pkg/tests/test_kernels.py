import math
import os
import subprocess
import sys

import numpy as np
import pytest

from epihorizon import kernels
from epihorizon.lhv_bell import HiddenVariableModel, chsh, expectations


@pytest.fixture
def rng():
    return np.random.default_rng(17)


def random_psis(rng, n):
    psis = rng.normal(size=(n, 4)) + 1j * rng.normal(size=(n, 4))
    return psis / np.linalg.norm(psis, axis=1, keepdims=True)


def test_chsh_batch_backends_agree(rng):
    psis = random_psis(rng, 2000)
    thetas = rng.uniform(-math.pi, math.pi, size=(2000, 4))
    a = kernels.chsh_batch_numba(psis, thetas)
    b = kernels.chsh_batch_numpy(psis, thetas)
    assert np.allclose(a, b, atol=1e-12, rtol=0)


def test_grid_max_backends_agree(rng):
    grid = np.linspace(0, 2 * math.pi, 400, endpoint=False)
    for psi in random_psis(rng, 5):
        va, ia, ja = kernels.chsh_grid_max_numba(psi, 0.0, math.pi / 2, grid)
        vb, ib, jb = kernels.chsh_grid_max_numpy(psi, 0.0, math.pi / 2, grid, chunk=37)
        assert abs(va - vb) < 1e-12
        assert (ia, ja) == (ib, jb)


def test_lhv_numerators_backends_agree_and_match_exact(rng):
    w = rng.integers(0, 1000, size=(500, 16))
    w[:, 0] += 1
    a = kernels.lhv_numerators_numba(w)
    b = kernels.lhv_numerators_numpy(w)
    assert np.array_equal(a, b)
    for row, nums in zip(w[:20], a[:20]):
        m = HiddenVariableModel.from_weights(row)
        d = m.denominator
        assert [e * d for e in expectations(m).as_tuple()] == list(nums[:4])
        assert chsh(m) * d == nums[4]


def test_env_flag_selects_numpy_backend():
    env = dict(os.environ, EPIHORIZON_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", "from epihorizon import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
