"""Numba-compiled implementations of the hot inner loops.

Mirrors numpy_backend function-for-function; see that module for contracts.
Accumulation order and expression trees are kept identical so results match
the fallback bit-for-bit.
"""

from __future__ import annotations

from numba import njit


@njit(cache=True)
def boost_split_scan(values, grad, hess, reg_lambda, gamma, min_leaf):
    n = values.shape[0]
    if n < 2:
        return -1, 0.0
    g_total = 0.0
    h_total = 0.0
    for k in range(n):
        g_total += grad[k]
        h_total += hess[k]
    parent = g_total * g_total / (h_total + reg_lambda)

    best_pos = -1
    best_gain = 0.0
    gl = 0.0
    hl = 0.0
    for i in range(n - 1):
        gl += grad[i]
        hl += hess[i]
        if values[i + 1] == values[i]:
            continue
        left = i + 1
        if left < min_leaf or n - left < min_leaf:
            continue
        gr = g_total - gl
        hr = h_total - hl
        gain = 0.5 * (gl * gl / (hl + reg_lambda) + gr * gr / (hr + reg_lambda) - parent) - gamma
        if gain > best_gain:
            best_gain = gain
            best_pos = i
    if best_pos < 0 or best_gain <= 0.0:
        return -1, 0.0
    return best_pos, best_gain


@njit(cache=True)
def gini_split_scan(values, labels, weights, min_leaf):
    n = values.shape[0]
    if n < 2:
        return -1, 0.0
    w_total = 0.0
    w1_total = 0.0
    for k in range(n):
        w_total += weights[k]
        w1_total += weights[k] * labels[k]
    if w_total <= 0.0:
        return -1, 0.0
    p1 = w1_total / w_total
    p0 = (w_total - w1_total) / w_total
    parent = 1.0 - p1 * p1 - p0 * p0

    best_pos = -1
    best_gain = 0.0
    wl = 0.0
    w1l = 0.0
    for i in range(n - 1):
        wl += weights[i]
        w1l += weights[i] * labels[i]
        if values[i + 1] == values[i]:
            continue
        left = i + 1
        if left < min_leaf or n - left < min_leaf:
            continue
        wr = w_total - wl
        w1r = w1_total - w1l
        if wl > 0.0:
            pl1 = w1l / wl
            pl0 = (wl - w1l) / wl
            gini_l = 1.0 - pl1 * pl1 - pl0 * pl0
        else:
            gini_l = 0.0
        if wr > 0.0:
            pr1 = w1r / wr
            pr0 = (wr - w1r) / wr
            gini_r = 1.0 - pr1 * pr1 - pr0 * pr0
        else:
            gini_r = 0.0
        gain = parent - (wl / w_total) * gini_l - (wr / w_total) * gini_r
        if gain > best_gain:
            best_gain = gain
            best_pos = i
    if best_pos < 0 or best_gain <= 0.0:
        return -1, 0.0
    return best_pos, best_gain


@njit(cache=True)
def smo_pass(K, y, alpha, err, b, C, tol, rand_j):
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
        for k in range(n):
            err[k] += ci * K[i, k]
        for k in range(n):
            err[k] += cj * K[j, k]
        delta_b = b_new - b
        for k in range(n):
            err[k] += delta_b
        b = b_new
        changed += 1
    return changed, b
