"""Hot numeric loops, in numba and pure numpy.

Each kernel exists as ``<name>_numba`` and ``<name>_numpy`` with identical
semantics; the public ``<name>`` is bound to the numba version unless numba is
missing or ``EPIHORIZON_DISABLE_NUMBA`` is set to a true value.

Measurement settings are angles ``theta`` in the x-z plane; the observable is
``cos(theta) Z + sin(theta) X``, so 0 is the z basis and pi/2 the x basis.
Two-qubit amplitudes are in the z basis, ordered ``(++, +-, -+, --)``.
"""
from __future__ import annotations

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

DISABLED = os.environ.get("EPIHORIZON_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes", "on")
USE_NUMBA = numba is not None and not DISABLED


def _njit(fn):
    if numba is None:
        return fn
    return numba.njit(cache=True, nogil=True)(fn)


# --- two-qubit correlators --------------------------------------------------

def _correlator_py(psi, ta, tb):
    ca, sa = np.cos(ta), np.sin(ta)
    cb, sb = np.cos(tb), np.sin(tb)
    # (sigma_a (x) sigma_b) psi, sigma(t) = [[c, s], [s, -c]]
    p0, p1, p2, p3 = psi[0], psi[1], psi[2], psi[3]
    # apply sigma_b on the second qubit
    q0 = cb * p0 + sb * p1
    q1 = sb * p0 - cb * p1
    q2 = cb * p2 + sb * p3
    q3 = sb * p2 - cb * p3
    # then sigma_a on the first
    r0 = ca * q0 + sa * q2
    r2 = sa * q0 - ca * q2
    r1 = ca * q1 + sa * q3
    r3 = sa * q1 - ca * q3
    return (np.conj(p0) * r0 + np.conj(p1) * r1 + np.conj(p2) * r2 + np.conj(p3) * r3).real


_correlator_nb = _njit(_correlator_py)


@_njit
def _chsh_batch_nb(psis, thetas):
    n = psis.shape[0]
    out = np.empty(n)
    for i in range(n):
        psi = psis[i]
        a1, a2, b1, b2 = thetas[i, 0], thetas[i, 1], thetas[i, 2], thetas[i, 3]
        out[i] = (_correlator_nb(psi, a1, b1) + _correlator_nb(psi, a1, b2)
                  + _correlator_nb(psi, a2, b1) - _correlator_nb(psi, a2, b2))
    return out


def chsh_batch_numba(psis, thetas):
    """CHSH value per row; ``thetas`` columns are (a1, a2, b1, b2)."""
    return _chsh_batch_nb(np.ascontiguousarray(psis, dtype=np.complex128),
                          np.ascontiguousarray(thetas, dtype=np.float64))


def _sigma(t):
    c, s = np.cos(t), np.sin(t)
    return np.stack([np.stack([c, s], -1), np.stack([s, -c], -1)], -2)


def _correlators_np(psis, ta, tb):
    psi = psis.reshape(-1, 2, 2)
    phi = np.einsum("nik,njl,nkl->nij", _sigma(ta), _sigma(tb), psi)
    return np.einsum("nij,nij->n", psi.conj(), phi).real


def chsh_batch_numpy(psis, thetas):
    psis = np.asarray(psis, dtype=np.complex128)
    thetas = np.asarray(thetas, dtype=np.float64)
    a1, a2, b1, b2 = thetas.T
    return (_correlators_np(psis, a1, b1) + _correlators_np(psis, a1, b2)
            + _correlators_np(psis, a2, b1) - _correlators_np(psis, a2, b2))


# --- exhaustive CHSH scan over B settings -----------------------------------

@_njit
def _grid_max_nb(psi, ta1, ta2, grid):
    g = grid.shape[0]
    u = np.empty(g)
    v = np.empty(g)
    for k in range(g):
        e1 = _correlator_nb(psi, ta1, grid[k])
        e2 = _correlator_nb(psi, ta2, grid[k])
        u[k] = e1 + e2
        v[k] = e1 - e2
    best = -np.inf
    bi = 0
    bj = 0
    for i in range(g):
        ui = u[i]
        for j in range(g):
            val = ui + v[j]
            if val > best:
                best = val
                bi = i
                bj = j
    return best, bi, bj


def chsh_grid_max_numba(psi, ta1, ta2, grid):
    """Largest CHSH over every (b1, b2) pair drawn from ``grid``.

    Returns ``(value, i, j)`` with ``b1 = grid[i]``, ``b2 = grid[j]``.
    """
    best, i, j = _grid_max_nb(np.ascontiguousarray(psi, dtype=np.complex128),
                              float(ta1), float(ta2),
                              np.ascontiguousarray(grid, dtype=np.float64))
    return float(best), int(i), int(j)


def chsh_grid_max_numpy(psi, ta1, ta2, grid, chunk=512):
    psi = np.asarray(psi, dtype=np.complex128)
    grid = np.asarray(grid, dtype=np.float64)
    g = grid.shape[0]
    psis = np.broadcast_to(psi, (g, 4))
    e1 = _correlators_np(psis, np.full(g, float(ta1)), grid)
    e2 = _correlators_np(psis, np.full(g, float(ta2)), grid)
    u, v = e1 + e2, e1 - e2
    best, bi, bj = -np.inf, 0, 0
    for start in range(0, g, chunk):
        block = u[start:start + chunk, None] + v[None, :]
        k = int(np.argmax(block))
        val = block.flat[k]
        if val > best:
            best, bi, bj = float(val), start + k // g, k % g
    return best, bi, bj


# --- batched exact LHV expectations -----------------------------------------

def _lhv_signs():
    import itertools
    lams = np.array(list(itertools.product((1, -1), repeat=4)), dtype=np.int64)
    xa, za, xb, zb = lams.T
    return np.stack([xa * xb, xa * zb, za * xb, za * zb], axis=1)  # (16, 4)


LHV_SIGNS = _lhv_signs()


@_njit
def _lhv_nb(weights, signs):
    n = weights.shape[0]
    out = np.zeros((n, 5), dtype=np.int64)
    for r in range(n):
        for i in range(16):
            w = weights[r, i]
            for k in range(4):
                out[r, k] += signs[i, k] * w
        out[r, 4] = out[r, 0] + out[r, 1] + out[r, 2] - out[r, 3]
    return out


def lhv_numerators_numba(weights):
    """Integer numerators of the four expectations and CHSH, per weight row.

    Divide by the row sum of ``weights`` for the exact values.
    """
    return _lhv_nb(np.ascontiguousarray(weights, dtype=np.int64), LHV_SIGNS)


def lhv_numerators_numpy(weights):
    e = np.asarray(weights, dtype=np.int64) @ LHV_SIGNS
    return np.column_stack([e, e[:, 0] + e[:, 1] + e[:, 2] - e[:, 3]])


if USE_NUMBA:
    chsh_batch = chsh_batch_numba
    chsh_grid_max = chsh_grid_max_numba
    lhv_numerators = lhv_numerators_numba
    BACKEND = "numba"
else:
    chsh_batch = chsh_batch_numpy
    chsh_grid_max = chsh_grid_max_numpy
    lhv_numerators = lhv_numerators_numpy
    BACKEND = "numpy"
