"""Compiled fixed-step RK4 kernel for ``i dU/dt = H(t) U``."""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def _apply(h, u, out, scale):
    n = u.shape[0]
    for i in range(n):
        for j in range(n):
            acc = 0j
            for k in range(n):
                acc += h[i, k] * u[k, j]
            out[i, j] = scale * acc


@njit(cache=True, nogil=True)
def rk4_chunk(u, samples, step):
    """Advance ``u`` in place through ``(len(samples) - 1) // 2`` steps.

    ``samples[2 s]``, ``samples[2 s + 1]`` and ``samples[2 s + 2]`` hold the
    Hamiltonian at the start, middle and end of step ``s``.
    """
    n = u.shape[0]
    k1 = np.empty_like(u)
    k2 = np.empty_like(u)
    k3 = np.empty_like(u)
    k4 = np.empty_like(u)
    tmp = np.empty_like(u)
    m = -1j
    for s in range((samples.shape[0] - 1) // 2):
        _apply(samples[2 * s], u, k1, m)
        for i in range(n):
            for j in range(n):
                tmp[i, j] = u[i, j] + 0.5 * step * k1[i, j]
        _apply(samples[2 * s + 1], tmp, k2, m)
        for i in range(n):
            for j in range(n):
                tmp[i, j] = u[i, j] + 0.5 * step * k2[i, j]
        _apply(samples[2 * s + 1], tmp, k3, m)
        for i in range(n):
            for j in range(n):
                tmp[i, j] = u[i, j] + step * k3[i, j]
        _apply(samples[2 * s + 2], tmp, k4, m)
        for i in range(n):
            for j in range(n):
                u[i, j] += step / 6.0 * (k1[i, j] + 2.0 * k2[i, j] + 2.0 * k3[i, j] + k4[i, j])
