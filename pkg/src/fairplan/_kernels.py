"""Hot numeric kernels with optional numba acceleration.

Every kernel exists twice: a pure-numpy implementation and a numba
``@njit`` version with identical semantics. The backend is chosen once at
import time: numba when importable, unless ``FAIRPLAN_NUMBA`` is set to
``0``/``false``/``off`` (then the numpy path is used). ``BACKEND`` reports
which one is active.

Determinism note: results are bit-reproducible for a fixed backend, seed
and inputs. Switching backends may change low-order float bits (different
summation order); all cross-backend contracts are tolerance-based.
"""

import os

import numpy as np

__all__ = [
    "BACKEND",
    "pairwise_distances",
    "decay_weights",
    "ipf_fit",
    "assign_sequential",
]


def _numba_enabled() -> bool:
    flag = os.environ.get("FAIRPLAN_NUMBA", "").strip().lower()
    if flag in ("0", "false", "off", "no"):
        return False
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


# ---------------------------------------------------------------------------
# pure-numpy implementations
# ---------------------------------------------------------------------------

def _np_pairwise_distances(a_xy, b_xy):
    """Euclidean distances between two point sets, shape (len(a), len(b))."""
    diff = a_xy[:, None, :] - b_xy[None, :, :]
    return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))


def _np_decay_weights(dist, kappas, cutoff):
    """Per-type exponential decay weights, zeroed beyond the cutoff radius.

    dist: (n, m) meters; kappas: (F,) 1/m. Returns (F, n, m).
    """
    within = dist <= cutoff
    out = np.empty((kappas.shape[0], dist.shape[0], dist.shape[1]))
    for fi in range(kappas.shape[0]):
        out[fi] = np.where(within, np.exp(-kappas[fi] * dist), 0.0)
    return out


def _np_ipf_fit(mat, row_targets, col_targets, tol, max_iter):
    """Alternating row/column proportional scaling, in place.

    One iteration scales rows to row_targets then columns to col_targets.
    Stops when the max absolute cell change across BOTH scaling substeps
    drops below tol; measuring only full iterations would mistake a
    periodic oscillation (infeasible zero patterns) for convergence.
    Returns (iterations, last_change).
    """
    for it in range(1, max_iter + 1):
        before_rows = mat.copy()
        rs = mat.sum(axis=1)
        scale = np.divide(row_targets, rs, out=np.zeros_like(rs), where=rs > 0)
        mat *= scale[:, None]
        change = np.abs(mat - before_rows).max() if mat.size else 0.0
        before_cols = mat.copy()
        cs = mat.sum(axis=0)
        scale = np.divide(col_targets, cs, out=np.zeros_like(cs), where=cs > 0)
        mat *= scale[None, :]
        if mat.size:
            change = max(change, np.abs(mat - before_cols).max())
        if change < tol:
            return it, change
    return max_iter, change


def _np_assign_sequential(probs, capacities, order, draws):
    """Sample one building per resident, visiting residents in `order`.

    probs: (n, m) sampling weights; capacities: (m,) int64, mutated;
    draws: (n,) pre-drawn uniforms aligned with resident index. Residents
    whose weight over remaining-capacity buildings sums to zero stay
    unassigned (-1).
    """
    n, m = probs.shape
    out = np.full(n, -1, dtype=np.int64)
    for idx in order:
        total = 0.0
        for l in range(m):
            if capacities[l] > 0:
                total += probs[idx, l]
        if total <= 0.0:
            continue
        target = draws[idx] * total
        acc = 0.0
        chosen = -1
        for l in range(m):
            if capacities[l] > 0:
                acc += probs[idx, l]
                if acc >= target:
                    chosen = l
                    break
        if chosen < 0:  # guard against float underrun at the tail
            for l in range(m - 1, -1, -1):
                if capacities[l] > 0 and probs[idx, l] > 0.0:
                    chosen = l
                    break
        if chosen >= 0:
            out[idx] = chosen
            capacities[chosen] -= 1
    return out


# ---------------------------------------------------------------------------
# numba implementations (same contracts, explicit loops)
# ---------------------------------------------------------------------------

def _build_numba_kernels():
    from numba import njit

    @njit(cache=True)
    def nb_pairwise_distances(a_xy, b_xy):
        n = a_xy.shape[0]
        m = b_xy.shape[0]
        out = np.empty((n, m))
        for i in range(n):
            for j in range(m):
                dx = a_xy[i, 0] - b_xy[j, 0]
                dy = a_xy[i, 1] - b_xy[j, 1]
                out[i, j] = np.sqrt(dx * dx + dy * dy)
        return out

    @njit(cache=True)
    def nb_decay_weights(dist, kappas, cutoff):
        nf = kappas.shape[0]
        n = dist.shape[0]
        m = dist.shape[1]
        out = np.zeros((nf, n, m))
        for fi in range(nf):
            k = kappas[fi]
            for i in range(n):
                for j in range(m):
                    d = dist[i, j]
                    if d <= cutoff:
                        out[fi, i, j] = np.exp(-k * d)
        return out

    @njit(cache=True)
    def nb_ipf_fit(mat, row_targets, col_targets, tol, max_iter):
        n = mat.shape[0]
        m = mat.shape[1]
        change = 0.0
        for it in range(1, max_iter + 1):
            change = 0.0
            for i in range(n):
                rs = 0.0
                for j in range(m):
                    rs += mat[i, j]
                scale = row_targets[i] / rs if rs > 0.0 else 0.0
                for j in range(m):
                    new = mat[i, j] * scale
                    d = abs(new - mat[i, j])
                    if d > change:
                        change = d
                    mat[i, j] = new
            for j in range(m):
                cs = 0.0
                for i in range(n):
                    cs += mat[i, j]
                scale = col_targets[j] / cs if cs > 0.0 else 0.0
                for i in range(n):
                    new = mat[i, j] * scale
                    d = abs(new - mat[i, j])
                    if d > change:
                        change = d
                    mat[i, j] = new
            if change < tol:
                return it, change
        return max_iter, change

    @njit(cache=True)
    def nb_assign_sequential(probs, capacities, order, draws):
        n = probs.shape[0]
        m = probs.shape[1]
        out = np.full(n, -1, dtype=np.int64)
        for oi in range(order.shape[0]):
            idx = order[oi]
            total = 0.0
            for l in range(m):
                if capacities[l] > 0:
                    total += probs[idx, l]
            if total <= 0.0:
                continue
            target = draws[idx] * total
            acc = 0.0
            chosen = -1
            for l in range(m):
                if capacities[l] > 0:
                    acc += probs[idx, l]
                    if acc >= target:
                        chosen = l
                        break
            if chosen < 0:
                for l in range(m - 1, -1, -1):
                    if capacities[l] > 0 and probs[idx, l] > 0.0:
                        chosen = l
                        break
            if chosen >= 0:
                out[idx] = chosen
                capacities[chosen] -= 1
        return out

    return {
        "pairwise_distances": nb_pairwise_distances,
        "decay_weights": nb_decay_weights,
        "ipf_fit": nb_ipf_fit,
        "assign_sequential": nb_assign_sequential,
    }


_NUMPY_KERNELS = {
    "pairwise_distances": _np_pairwise_distances,
    "decay_weights": _np_decay_weights,
    "ipf_fit": _np_ipf_fit,
    "assign_sequential": _np_assign_sequential,
}

if _numba_enabled():
    BACKEND = "numba"
    _ACTIVE = _build_numba_kernels()
else:
    BACKEND = "numpy"
    _ACTIVE = _NUMPY_KERNELS

pairwise_distances = _ACTIVE["pairwise_distances"]
decay_weights = _ACTIVE["decay_weights"]
ipf_fit = _ACTIVE["ipf_fit"]
assign_sequential = _ACTIVE["assign_sequential"]


def numpy_kernels():
    """The pure-numpy kernel set, regardless of the active backend.

    Used by the benchmark script and by tests that compare both paths.
    """
    return dict(_NUMPY_KERNELS)
