"""Pure-numpy kernel implementations (fallback backend).

Functionally equivalent to ``numba_impl``; the rolling, tree-build,
tree-walk and dual-solver kernels are written so that per-element
arithmetic happens in the same order as the numba loops and both
backends produce bit-identical results for those kernels.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "numpy"


def rolling_core(x: np.ndarray, half: int):
    """Mean/std/max/min over the truncated centered window [i-half, i+half].

    Accumulation runs over window offsets in ascending order, i.e. each
    window is summed left to right exactly like a per-window loop.
    """
    n = x.shape[0]
    count = np.zeros(n, dtype=np.float64)
    acc = np.zeros(n, dtype=np.float64)
    for d in range(-half, half + 1):
        if d < 0:
            dst, src = slice(-d, n), slice(0, n + d)
        elif d > 0:
            dst, src = slice(0, n - d), slice(d, n)
        else:
            dst = src = slice(0, n)
        acc[dst] += x[src]
        count[dst] += 1.0
    mean = acc / count
    sqacc = np.zeros(n, dtype=np.float64)
    for d in range(-half, half + 1):
        if d < 0:
            dst, src = slice(-d, n), slice(0, n + d)
        elif d > 0:
            dst, src = slice(0, n - d), slice(d, n)
        else:
            dst = src = slice(0, n)
        t = x[src] - mean[dst]
        sqacc[dst] += t * t
    std = np.sqrt(sqacc / count)
    mx = np.full(n, -np.inf)
    mn = np.full(n, np.inf)
    for d in range(-half, half + 1):
        if d < 0:
            dst, src = slice(-d, n), slice(0, n + d)
        elif d > 0:
            dst, src = slice(0, n - d), slice(d, n)
        else:
            dst = src = slice(0, n)
        np.maximum(mx[dst], x[src], out=mx[dst])
        np.minimum(mn[dst], x[src], out=mn[dst])
    return mean, std, mx, mn


def build_tree(xsub, uniforms, height_limit, feat, thr, left, right, size):
    """Grow one isolation tree over ``xsub`` into preallocated node arrays.

    Nodes are visited in explicit-stack DFS preorder (left child first);
    each split consumes exactly two uniforms (feature pick among the
    node's non-constant features, then the cut position). Returns
    (node_count, uniforms_consumed). Leaves carry feat == -1.
    """
    s = xsub.shape[0]
    idx = np.arange(s, dtype=np.int64)
    stack = [(0, 0, s, 0)]
    node_count = 1
    uptr = 0
    while stack:
        node, start, end, depth = stack.pop()
        sz = end - start
        size[node] = sz
        feat[node] = -1
        left[node] = -1
        right[node] = -1
        if sz <= 1 or depth >= height_limit:
            continue
        rows = idx[start:end].copy()
        sub = xsub[rows]
        mins = sub.min(axis=0)
        maxs = sub.max(axis=0)
        nonconst = np.nonzero(maxs > mins)[0]
        if nonconst.size == 0:
            continue
        u_feat = uniforms[uptr]
        u_cut = uniforms[uptr + 1]
        uptr += 2
        k = int(u_feat * nonconst.size)
        if k >= nonconst.size:
            k = nonconst.size - 1
        f = int(nonconst[k])
        cut = mins[f] + u_cut * (maxs[f] - mins[f])
        mask = xsub[rows, f] < cut
        n_left = int(mask.sum())
        idx[start:start + n_left] = rows[mask]
        idx[start + n_left:end] = rows[~mask]
        li = node_count
        ri = node_count + 1
        node_count += 2
        feat[node] = f
        thr[node] = cut
        left[node] = li
        right[node] = ri
        stack.append((ri, start + n_left, end, depth + 1))
        stack.append((li, start, start + n_left, depth + 1))
    return node_count, uptr


def forest_path_sums(x, feats, thrs, lefts, rights, sizes, c_table):
    """Sum over trees of the isolation path length of every sample.

    Path length = leaf depth + c(leaf size), with the c adjustment
    supplied as a lookup table. Trees are walked level-synchronously.
    """
    n = x.shape[0]
    total = np.zeros(n, dtype=np.float64)
    rows = np.arange(n)
    for t in range(feats.shape[0]):
        node = np.zeros(n, dtype=np.int64)
        depth = np.zeros(n, dtype=np.float64)
        while True:
            f = feats[t, node]
            active = f >= 0
            if not active.any():
                break
            an = node[active]
            vals = x[rows[active], f[active]]
            go_left = vals < thrs[t, an]
            node[active] = np.where(go_left, lefts[t, an], rights[t, an])
            depth[active] += 1.0
        total += depth + c_table[sizes[t, node]]
    return total


def smo_solve(K, alpha, grad, c_box, tol, max_updates):
    """Two-coordinate descent on min 1/2 a'Ka s.t. sum(a)=1, 0<=a<=c_box.

    Mutates ``alpha`` and ``grad`` (grad must enter as K @ alpha).
    Returns (updates_done, final_kkt_violation).
    """
    updates = 0
    violation = np.inf
    while updates < max_updates:
        up = np.where(alpha < c_box, grad, np.inf)
        i = int(np.argmin(up))
        g_min = up[i]
        low = np.where(alpha > 0.0, grad, -np.inf)
        j = int(np.argmax(low))
        g_max = low[j]
        if not (np.isfinite(g_min) and np.isfinite(g_max)):
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
        grad += K[i] * dai + K[j] * daj
        updates += 1
    return updates, float(violation)


def kmeans_assign(x, centroids):
    """Nearest-centroid labels and the squared distance to that centroid."""
    n = x.shape[0]
    best = np.full(n, np.inf)
    labels = np.zeros(n, dtype=np.int64)
    for c in range(centroids.shape[0]):
        diff = x - centroids[c]
        d = np.einsum("ij,ij->i", diff, diff)
        better = d < best
        labels[better] = c
        best[better] = d[better]
    return labels, best


def kmeans_update(x, labels, k):
    """Per-cluster coordinate sums and member counts."""
    p = x.shape[1]
    counts = np.bincount(labels, minlength=k).astype(np.int64)
    sums = np.empty((k, p), dtype=np.float64)
    for d in range(p):
        sums[:, d] = np.bincount(labels, weights=x[:, d], minlength=k)
    return sums, counts


def cluster_dist_sums(pts, asg, k, block=512):
    """dist_sums[i, c] = sum of euclidean distances from point i to cluster c.

    Self-distance (exactly zero) is included in the point's own cluster.
    """
    n = pts.shape[0]
    sums = np.zeros((n, k), dtype=np.float64)
    counts = np.bincount(asg, minlength=k).astype(np.int64)
    sq = np.einsum("ij,ij->i", pts, pts)
    masks = [asg == c for c in range(k)]
    for s0 in range(0, n, block):
        blk = pts[s0:s0 + block]
        d2 = sq[s0:s0 + block, None] + sq[None, :] - 2.0 * (blk @ pts.T)
        np.maximum(d2, 0.0, out=d2)
        rows = np.arange(blk.shape[0])
        d2[rows, s0 + rows] = 0.0  # self-distance, exact despite gemm roundoff
        d = np.sqrt(d2)
        for c in range(k):
            if counts[c] > 0:
                sums[s0:s0 + block, c] = d[:, masks[c]].sum(axis=1)
    return sums, counts
