"""Pure-numpy implementations of the hot inner loops.

Arithmetic is arranged to match the numba backend operation-for-operation:
prefix sums are sequential accumulations (np.cumsum accumulates left to
right), gain formulas use the identical expression tree, and the SMO error
cache is updated in the same three elementwise passes. The two backends are
expected to agree bit-for-bit on the split scans and to track each other
through the SMO trajectory.
"""

from __future__ import annotations

import numpy as np


def boost_split_scan(values, grad, hess, reg_lambda, gamma, min_leaf):
    """Best second-order split of one presorted feature column.

    values/grad/hess are aligned and sorted ascending by value. Returns
    (pos, gain) where the split threshold lies between pos and pos+1, or
    (-1, 0.0) when no candidate has positive gain.
    """
    n = values.shape[0]
    if n < 2:
        return -1, 0.0
    g_cum = np.cumsum(grad)
    h_cum = np.cumsum(hess)
    g_total = g_cum[-1]
    h_total = h_cum[-1]
    parent = g_total * g_total / (h_total + reg_lambda)

    gl = g_cum[:-1]
    hl = h_cum[:-1]
    gr = g_total - gl
    hr = h_total - hl
    gain = 0.5 * (gl * gl / (hl + reg_lambda) + gr * gr / (hr + reg_lambda) - parent) - gamma

    left_counts = np.arange(1, n)
    valid = (values[1:] != values[:-1]) & (left_counts >= min_leaf) & (n - left_counts >= min_leaf)
    if not np.any(valid):
        return -1, 0.0
    gain = np.where(valid, gain, -np.inf)
    pos = int(np.argmax(gain))
    best = float(gain[pos])
    if best <= 0.0:
        return -1, 0.0
    return pos, best


def gini_split_scan(values, labels, weights, min_leaf):
    """Best weighted-impurity-decrease split of one presorted feature column.

    Same contract as boost_split_scan; labels are 0/1 and weights nonnegative.
    """
    n = values.shape[0]
    if n < 2:
        return -1, 0.0
    w_cum = np.cumsum(weights)
    w1_cum = np.cumsum(weights * labels)
    w_total = w_cum[-1]
    w1_total = w1_cum[-1]
    if w_total <= 0.0:
        return -1, 0.0
    p1 = w1_total / w_total
    p0 = (w_total - w1_total) / w_total
    parent = 1.0 - p1 * p1 - p0 * p0

    wl = w_cum[:-1]
    w1l = w1_cum[:-1]
    wr = w_total - wl
    w1r = w1_total - w1l
    with np.errstate(divide="ignore", invalid="ignore"):
        pl1 = w1l / wl
        pl0 = (wl - w1l) / wl
        gini_l = 1.0 - pl1 * pl1 - pl0 * pl0
        pr1 = w1r / wr
        pr0 = (wr - w1r) / wr
        gini_r = 1.0 - pr1 * pr1 - pr0 * pr0
    gini_l = np.where(wl > 0.0, gini_l, 0.0)
    gini_r = np.where(wr > 0.0, gini_r, 0.0)
    gain = parent - (wl / w_total) * gini_l - (wr / w_total) * gini_r

    left_counts = np.arange(1, n)
    valid = (values[1:] != values[:-1]) & (left_counts >= min_leaf) & (n - left_counts >= min_leaf)
    if not np.any(valid):
        return -1, 0.0
    gain = np.where(valid, gain, -np.inf)
    pos = int(np.argmax(gain))
    best = float(gain[pos])
    if best <= 0.0:
        return -1, 0.0
    return pos, best


def smo_pass(K, y, alpha, err, b, C, tol, rand_j):
    """One sequential pass of two-coefficient dual updates.

    K is the symmetric kernel matrix, y in {-1,+1}, err the cached
    f(x_k) - y_k values, rand_j the pre-drawn partner index for each i
    (guaranteed != i). alpha and err are updated in place. Returns
    (changed_count, new_bias).
    """
    n = alpha.shape[0]
    changed = 0
    for i in range(n):
        e_i = err[i]
        r_i = e_i * y[i]
        if not ((r_i < -tol and alpha[i] < C) or (r_i > tol and alpha[i] > 0.0)):
            continue
        j = int(rand_j[i])
        e_j = err[j]
        ai_old = alpha[i]
        aj_old = alpha[j]
        if y[i] != y[j]:
            lo = max(0.0, aj_old - ai_old)
            hi = min(C, C + aj_old - ai_old)
        else:
            lo = max(0.0, ai_old + aj_old - C)
            hi = min(C, ai_old + aj_old)
        if lo >= hi:
            continue
        eta = 2.0 * K[i, j] - K[i, i] - K[j, j]
        if eta >= 0.0:
            continue
        aj_new = aj_old - y[j] * (e_i - e_j) / eta
        if aj_new > hi:
            aj_new = hi
        elif aj_new < lo:
            aj_new = lo
        if abs(aj_new - aj_old) < 1e-5:
            continue
        ai_new = ai_old + y[i] * y[j] * (aj_old - aj_new)

        b1 = b - e_i - y[i] * (ai_new - ai_old) * K[i, i] - y[j] * (aj_new - aj_old) * K[i, j]
        b2 = b - e_j - y[i] * (ai_new - ai_old) * K[i, j] - y[j] * (aj_new - aj_old) * K[j, j]
        if 0.0 < ai_new < C:
            b_new = b1
        elif 0.0 < aj_new < C:
            b_new = b2
        else:
            b_new = 0.5 * (b1 + b2)

        alpha[i] = ai_new
        alpha[j] = aj_new
        ci = y[i] * (ai_new - ai_old)
        cj = y[j] * (aj_new - aj_old)
        err += ci * K[i]
        err += cj * K[j]
        err += b_new - b
        b = b_new
        changed += 1
    return changed, b
