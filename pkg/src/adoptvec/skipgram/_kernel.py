"""Compiled SGD inner loops for Skip-gram.

Walks arrive flattened: ``tokens`` holds word indices, ``offsets[i]`` is
the start of walk ``i`` (length ``n_walks + 1``), and ``progress`` gives
the global raw-token position of each kept token, used for the linear
learning-rate decay.
"""

import math

import numpy as np
from numba import njit, prange

_LCG_MUL = np.uint64(25214903917)
_LCG_ADD = np.uint64(11)


@njit(cache=True, inline="always")
def _sigmoid(x):
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


@njit(cache=True)
def _process_walks(walk_lo, walk_hi, tokens, offsets, progress, total_progress,
                   syn0, syn1, syn1neg, points, codes, codelens, table,
                   window, shrink_window, hs, negative, alpha0, min_alpha_frac,
                   rand_state, neu1e):
    dim = syn0.shape[1]
    next_random = rand_state
    for w in range(walk_lo, walk_hi):
        start = offsets[w]
        end = offsets[w + 1]
        for i in range(start, end):
            frac = 1.0 - progress[i] / total_progress
            if frac < min_alpha_frac:
                frac = min_alpha_frac
            alpha = alpha0 * frac
            center = tokens[i]
            b = 0
            if shrink_window:
                next_random = next_random * _LCG_MUL + _LCG_ADD
                b = np.int64(next_random % np.uint64(window))
            lo = i - window + b
            if lo < start:
                lo = start
            hi = i + window - b + 1
            if hi > end:
                hi = end
            for j in range(lo, hi):
                if j == i:
                    continue
                ctx = tokens[j]
                for d in range(dim):
                    neu1e[d] = 0.0
                if hs:
                    for p in range(codelens[ctx]):
                        node = points[ctx, p]
                        f = 0.0
                        for d in range(dim):
                            f += syn0[center, d] * syn1[node, d]
                        g = (1.0 - codes[ctx, p] - _sigmoid(f)) * alpha
                        for d in range(dim):
                            neu1e[d] += g * syn1[node, d]
                        for d in range(dim):
                            syn1[node, d] += g * syn0[center, d]
                if negative > 0:
                    for s in range(negative + 1):
                        if s == 0:
                            target = ctx
                            label = 1.0
                        else:
                            next_random = next_random * _LCG_MUL + _LCG_ADD
                            target = table[np.int64((next_random >> np.uint64(16)) % np.uint64(table.shape[0]))]
                            label = 0.0
                        f = 0.0
                        for d in range(dim):
                            f += syn0[center, d] * syn1neg[target, d]
                        g = (label - _sigmoid(f)) * alpha
                        for d in range(dim):
                            neu1e[d] += g * syn1neg[target, d]
                        for d in range(dim):
                            syn1neg[target, d] += g * syn0[center, d]
                for d in range(dim):
                    syn0[center, d] += neu1e[d]
    return next_random


@njit(cache=True)
def train_epoch_serial(tokens, offsets, progress, total_progress,
                       syn0, syn1, syn1neg, points, codes, codelens, table,
                       window, shrink_window, hs, negative, alpha0, min_alpha_frac, rand_state):
    neu1e = np.zeros(syn0.shape[1])
    return _process_walks(0, offsets.shape[0] - 1, tokens, offsets, progress, total_progress,
                          syn0, syn1, syn1neg, points, codes, codelens, table,
                          window, shrink_window, hs, negative, alpha0, min_alpha_frac,
                          rand_state, neu1e)


@njit(cache=True, parallel=True)
def train_epoch_parallel(tokens, offsets, progress, total_progress,
                         syn0, syn1, syn1neg, points, codes, codelens, table,
                         window, shrink_window, hs, negative, alpha0, min_alpha_frac,
                         rand_states, bounds):
    # Lock-free: workers write the shared matrices concurrently.
    n_workers = bounds.shape[0] - 1
    for k in prange(n_workers):
        neu1e = np.zeros(syn0.shape[1])
        rand_states[k] = _process_walks(bounds[k], bounds[k + 1], tokens, offsets, progress,
                                        total_progress, syn0, syn1, syn1neg, points, codes,
                                        codelens, table, window, shrink_window, hs, negative,
                                        alpha0, min_alpha_frac, rand_states[k], neu1e)
