"""Numba @njit kernel implementations (default backend).

Mirror of ``numpy_impl``: same signatures, same arithmetic order in the
rolling, tree-build, tree-walk and dual-solver kernels, so both backends
agree bit-for-bit there. Compiled lazily with on-disk caching.
"""

from __future__ import annotations

import numpy as np
from numba import njit

BACKEND_NAME = "numba"


@njit(cache=True)
def rolling_core(x, half):
    n = x.shape[0]
    mean = np.empty(n, dtype=np.float64)
    std = np.empty(n, dtype=np.float64)
    mx = np.empty(n, dtype=np.float64)
    mn = np.empty(n, dtype=np.float64)
    for i in range(n):
        lo = i - half
        if lo < 0:
            lo = 0
        hi = i + half
        if hi > n - 1:
            hi = n - 1
        count = float(hi - lo + 1)
        acc = 0.0
        vmax = -np.inf
        vmin = np.inf
        for j in range(lo, hi + 1):
            v = x[j]
            acc += v
            if v > vmax:
                vmax = v
            if v < vmin:
                vmin = v
        m = acc / count
        sqacc = 0.0
        for j in range(lo, hi + 1):
            t = x[j] - m
            sqacc += t * t
        mean[i] = m
        std[i] = np.sqrt(sqacc / count)
        mx[i] = vmax
        mn[i] = vmin
    return mean, std, mx, mn


@njit(cache=True)
def build_tree(xsub, uniforms, height_limit, feat, thr, left, right, size):
    s = xsub.shape[0]
    p = xsub.shape[1]
    idx = np.arange(s)
    scratch = np.empty(s, dtype=np.int64)
    mins = np.empty(p, dtype=np.float64)
    maxs = np.empty(p, dtype=np.float64)
    nonconst = np.empty(p, dtype=np.int64)
    cap = feat.shape[0]
    stack_node = np.empty(cap, dtype=np.int64)
    stack_start = np.empty(cap, dtype=np.int64)
    stack_end = np.empty(cap, dtype=np.int64)
    stack_depth = np.empty(cap, dtype=np.int64)
    top = 0
    stack_node[top] = 0
    stack_start[top] = 0
    stack_end[top] = s
    stack_depth[top] = 0
    top += 1
    node_count = 1
    uptr = 0
    while top > 0:
        top -= 1
        node = stack_node[top]
        start = stack_start[top]
        end = stack_end[top]
        depth = stack_depth[top]
        sz = end - start
        size[node] = sz
        feat[node] = -1
        left[node] = -1
        right[node] = -1
        if sz <= 1 or depth >= height_limit:
            continue
        for f in range(p):
            lo = np.inf
            hi = -np.inf
            for r in range(start, end):
                v = xsub[idx[r], f]
                if v < lo:
                    lo = v
                if v > hi:
                    hi = v
            mins[f] = lo
            maxs[f] = hi
        n_nonconst = 0
        for f in range(p):
            if maxs[f] > mins[f]:
                nonconst[n_nonconst] = f
                n_nonconst += 1
        if n_nonconst == 0:
            continue
        u_feat = uniforms[uptr]
        u_cut = uniforms[uptr + 1]
        uptr += 2
        k = int(u_feat * n_nonconst)
        if k >= n_nonconst:
            k = n_nonconst - 1
        f = nonconst[k]
        cut = mins[f] + u_cut * (maxs[f] - mins[f])
        n_left = 0
        n_right = 0
        for r in range(start, end):
            row = idx[r]
            if xsub[row, f] < cut:
                idx[start + n_left] = row
                n_left += 1
            else:
                scratch[n_right] = row
                n_right += 1
        for r in range(n_right):
            idx[start + n_left + r] = scratch[r]
        li = node_count
        ri = node_count + 1
        node_count += 2
        feat[node] = f
        thr[node] = cut
        left[node] = li
        right[node] = ri
        stack_node[top] = ri
        stack_start[top] = start + n_left
        stack_end[top] = end
        stack_depth[top] = depth + 1
        top += 1
        stack_node[top] = li
        stack_start[top] = start
        stack_end[top] = start + n_left
        stack_depth[top] = depth + 1
        top += 1
    return node_count, uptr


@njit(cache=True)
def forest_path_sums(x, feats, thrs, lefts, rights, sizes, c_table):
    n = x.shape[0]
    n_trees = feats.shape[0]
    total = np.zeros(n, dtype=np.float64)
    for t in range(n_trees):
        for i in range(n):
            node = 0
            depth = 0.0
            while feats[t, node] >= 0:
                if x[i, feats[t, node]] < thrs[t, node]:
                    node = lefts[t, node]
                else:
                    node = rights[t, node]
                depth += 1.0
            total[i] += depth + c_table[sizes[t, node]]
    return total


@njit(cache=True)
def smo_solve(K, alpha, grad, c_box, tol, max_updates):
    n = alpha.shape[0]
    updates = 0
    violation = np.inf
    while updates < max_updates:
        g_min = np.inf
        i = -1
        for t in range(n):
            if alpha[t] < c_box and grad[t] < g_min:
                g_min = grad[t]
                i = t
        g_max = -np.inf
        j = -1
        for t in range(n):
            if alpha[t] > 0.0 and grad[t] > g_max:
                g_max = grad[t]
                j = t
        if i < 0 or j < 0:
            violation = 0.0
            break
        violation = g_max - g_min
        if violation < tol:
            break
        quad = K[i, i] + K[j, j] - 2.0 * K[i, j]
        if quad <= 0.0:
            quad = 1e-12
        pair_sum = alpha[i] + alpha[j]
        ai = alpha[i] + violation / quad
        hi = c_box if pair_sum >= c_box else pair_sum
        lo = pair_sum - c_box
        if lo < 0.0:
            lo = 0.0
        if ai > hi:
            ai = hi
        if ai < lo:
            ai = lo
        aj = pair_sum - ai
        dai = ai - alpha[i]
        daj = aj - alpha[j]
        alpha[i] = ai
        alpha[j] = aj
        for t in range(n):
            grad[t] += K[i, t] * dai + K[j, t] * daj
        updates += 1
    return updates, violation


@njit(cache=True)
def kmeans_assign(x, centroids):
    n = x.shape[0]
    p = x.shape[1]
    k = centroids.shape[0]
    labels = np.zeros(n, dtype=np.int64)
    best = np.empty(n, dtype=np.float64)
    for i in range(n):
        bd = np.inf
        bc = 0
        for c in range(k):
            d = 0.0
            for f in range(p):
                t = x[i, f] - centroids[c, f]
                d += t * t
            if d < bd:
                bd = d
                bc = c
        labels[i] = bc
        best[i] = bd
    return labels, best


@njit(cache=True)
def kmeans_update(x, labels, k):
    n = x.shape[0]
    p = x.shape[1]
    sums = np.zeros((k, p), dtype=np.float64)
    counts = np.zeros(k, dtype=np.int64)
    for i in range(n):
        c = labels[i]
        counts[c] += 1
        for f in range(p):
            sums[c, f] += x[i, f]
    return sums, counts


@njit(cache=True)
def cluster_dist_sums(pts, asg, k):
    n = pts.shape[0]
    p = pts.shape[1]
    sums = np.zeros((n, k), dtype=np.float64)
    counts = np.zeros(k, dtype=np.int64)
    for i in range(n):
        counts[asg[i]] += 1
    for i in range(n):
        for j in range(n):
            d = 0.0
            for f in range(p):
                t = pts[i, f] - pts[j, f]
                d += t * t
            sums[i, asg[j]] += np.sqrt(d)
    return sums, counts
