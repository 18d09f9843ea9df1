"""Compiled inner loops for signatures of piecewise-linear paths on a word table.

A word table is prefix-closed and sorted in graded order, so walking it from
the last entry to the first visits longer words before their prefixes. That
lets each segment update run in place: for a word u of length k,

    S'(u) = Σ_{j=0..k} S(u[:j]) · Π_{i>j} δ[u_i] / (k-j)!

which is Chen's identity against the exponential of one linear segment.
"""
import numpy as np
from numba import njit


@njit(cache=True)
def _apply_segment(state, delta, letters, depth, anc, inv_fact):
    for u in range(state.shape[0] - 1, 0, -1):
        k = depth[u]
        prod = 1.0
        acc = 0.0
        for j in range(k - 1, -1, -1):
            prod *= delta[letters[u, j]]
            if prod == 0.0:
                break
            acc += state[anc[u, j]] * prod * inv_fact[k - j]
        state[u] += acc


@njit(cache=True)
def fold_path(increments, letters, depth, anc, inv_fact, record):
    """Signature on the word table of the path with the given node increments.

    With ``record`` set, returns every prefix state, shape (n+1, W); otherwise (1, W).
    """
    n = increments.shape[0]
    W = letters.shape[0]
    out = np.zeros((n + 1 if record else 1, W))
    state = np.zeros(W)
    state[0] = 1.0
    if record:
        out[0, :] = state
    for s in range(n):
        _apply_segment(state, increments[s], letters, depth, anc, inv_fact)
        if record:
            out[s + 1, :] = state
    if not record:
        out[0, :] = state
    return out


@njit(cache=True)
def fold_many(increments, offsets, letters, depth, anc, inv_fact):
    """Per-path final signatures for stacked increments; path i uses rows offsets[i]:offsets[i+1]."""
    P = offsets.shape[0] - 1
    W = letters.shape[0]
    out = np.empty((P, W))
    state = np.empty(W)
    for p in range(P):
        state[:] = 0.0
        state[0] = 1.0
        for s in range(offsets[p], offsets[p + 1]):
            _apply_segment(state, increments[s], letters, depth, anc, inv_fact)
        out[p, :] = state
    return out


@njit(cache=True)
def sum_many(increments, offsets, letters, depth, anc, inv_fact):
    """Sum over paths of final signatures, accumulated in path order."""
    P = offsets.shape[0] - 1
    W = letters.shape[0]
    total = np.zeros(W)
    state = np.empty(W)
    for p in range(P):
        state[:] = 0.0
        state[0] = 1.0
        for s in range(offsets[p], offsets[p + 1]):
            _apply_segment(state, increments[s], letters, depth, anc, inv_fact)
        total += state
    return total
