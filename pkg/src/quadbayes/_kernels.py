"""Compiled per-pixel state kernels.

Encoder and decoder must evolve identical doubles, so every coding-
probability expression lives here exactly once, with a fixed bottom-up
evaluation order along the pixel's block path.  No fastmath: LLVM must
not reassociate or fuse these expressions.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def fill_path(t, d_max, path_idx):
    # path_idx[d] = flat index of the depth-d block containing pixel t
    width = 1 << d_max
    row = t // width
    col = t % width
    path_idx[0] = 0
    off = 0
    lvl_width = 1
    z = 0
    for d in range(1, d_max + 1):
        off += lvl_width
        lvl_width <<= 2
        xb = (row >> (d_max - d)) & 1
        yb = (col >> (d_max - d)) & 1
        z = (z << 2) | (xb << 1) | yb
        path_idx[d] = off + z


@njit(cache=True)
def step(g, n0, n1, alpha, beta, t, d_max, path_idx, q0_lev, q1_lev):
    # Coding probabilities of both symbols at every path depth; returns
    # the node-visit count (always d_max + 1).
    fill_path(t, d_max, path_idx)
    visits = 0
    for d in range(d_max, -1, -1):
        i = path_idx[d]
        denom = n0[i] + n1[i] + alpha + beta
        e0 = (n0[i] + beta) / denom
        e1 = (n1[i] + alpha) / denom
        if d == d_max:
            q0_lev[d] = e0
            q1_lev[d] = e1
        else:
            gs = g[i]
            q0_lev[d] = (1.0 - gs) * e0 + gs * q0_lev[d + 1]
            q1_lev[d] = (1.0 - gs) * e1 + gs * q1_lev[d + 1]
        visits += 1
    return visits


@njit(cache=True)
def advance(g, n0, n1, v, d_max, path_idx, q0_lev, q1_lev, clamp_stat):
    # Posterior split-weight update along the path, then count updates.
    # The ratio is <= 1 exactly; clamping only absorbs last-ulp rounding
    # and the worst excess seen is recorded for debug assertions.
    for d in range(d_max):
        i = path_idx[d]
        if v == 1:
            gnew = g[i] * q1_lev[d + 1] / q1_lev[d]
        else:
            gnew = g[i] * q0_lev[d + 1] / q0_lev[d]
        if gnew > 1.0:
            excess = gnew - 1.0
            if excess > clamp_stat[0]:
                clamp_stat[0] = excess
            gnew = 1.0
        g[i] = gnew
    for d in range(d_max + 1):
        i = path_idx[d]
        if v == 1:
            n1[i] += 1
        else:
            n0[i] += 1


@njit(cache=True)
def run_bits(bits, g, n0, n1, alpha, beta, d_max, path_idx, q0_lev, q1_lev,
             p1_out, p_real_out, clamp_stat):
    # Whole-image pass: per-pixel symbol-1 and realized-symbol coding
    # probabilities, taken before each state update.
    visits = 0
    for t in range(bits.size):
        visits += step(g, n0, n1, alpha, beta, t, d_max,
                       path_idx, q0_lev, q1_lev)
        v = np.int64(bits[t])
        p1_out[t] = q1_lev[0]
        if v == 1:
            p_real_out[t] = q1_lev[0]
        else:
            p_real_out[t] = q0_lev[0]
        advance(g, n0, n1, v, d_max, path_idx, q0_lev, q1_lev, clamp_stat)
    return visits


def warmup() -> None:
    """Force-compile every kernel (first call otherwise pays JIT cost)."""
    d_max = 1
    n_nodes = 5
    g = np.full(n_nodes, 0.5)
    g[1:] = 0.0
    n0 = np.zeros(n_nodes, dtype=np.int64)
    n1 = np.zeros(n_nodes, dtype=np.int64)
    path = np.zeros(d_max + 1, dtype=np.int64)
    q0 = np.zeros(d_max + 1)
    q1 = np.zeros(d_max + 1)
    clamp = np.zeros(1)
    bits = np.array([0, 1, 1, 0], dtype=np.uint8)
    run_bits(bits, g.copy(), n0.copy(), n1.copy(), 0.5, 0.5, d_max,
             path, q0, q1, np.zeros(4), np.zeros(4), clamp)
    step(g, n0, n1, 0.5, 0.5, 0, d_max, path, q0, q1)
    advance(g, n0, n1, np.int64(1), d_max, path, q0, q1, clamp)
