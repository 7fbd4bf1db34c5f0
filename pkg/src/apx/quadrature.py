"""Batched adaptive quadrature and 1-d search utilities.

All integrators evaluate the integrand on numpy arrays, so a single call can
drive hundreds of panels (or hundreds of independent intervals) through one
vectorized function evaluation.  The base rule is Gauss-Kronrod 7-15 with the
|K - G| difference as the per-panel error estimate; panels failing their share
of the budget are bisected in batches.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .errors import QuadratureError

# Gauss-Kronrod 7-15 abscissae/weights on [-1, 1] (QUADPACK values).
_XGK = np.array([
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.0,
])
_WGK = np.array([
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728,
])
_WG = np.array([
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469,
])

# Full 15-node layout: -x0..-x6, 0, x6..x0.
_NODES = np.concatenate([-_XGK[:-1], [0.0], _XGK[-2::-1]])
_WK = np.concatenate([_WGK[:-1], [_WGK[-1]], _WGK[-2::-1]])
# Gauss nodes sit at the odd Kronrod positions.
_GIDX = np.array([1, 3, 5, 7, 9, 11, 13])
_WGFULL = np.concatenate([_WG[:-1], [_WG[-1]], _WG[-2::-1]])

_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


def _gk_panels(fn, lo, hi):
    """15-point GK rule on each [lo_i, hi_i]; returns (integrals, errors)."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    pts = mid[:, None] + half[:, None] * _NODES[None, :]
    vals = np.asarray(fn(pts.ravel()), dtype=float).reshape(pts.shape)
    k = half * (vals @ _WK)
    g = half * (vals[:, _GIDX] @ _WGFULL)
    return k, np.abs(k - g)


def adaptive_quad(fn, a, b, rel_tol=1e-8, abs_tol=0.0, edges=None,
                  max_panels=400_000, max_rounds=48):
    """Integrate fn over [a, b] with batched adaptive bisection.

    `edges` seeds the panel decomposition (useful for oscillatory integrands
    whose sign structure is known); otherwise a single panel is used.
    Raises QuadratureError when the budget cannot be met.
    """
    if edges is None:
        lo = np.array([a], dtype=float)
        hi = np.array([b], dtype=float)
    else:
        edges = np.asarray(edges, dtype=float)
        lo, hi = edges[:-1], edges[1:]
        keep = hi > lo
        lo, hi = lo[keep], hi[keep]
    vals, errs = _gk_panels(fn, lo, hi)
    for _ in range(max_rounds):
        total = float(np.sum(vals))
        # Roundoff floor scales with the unsigned panel mass, not the
        # (possibly cancelled) total.
        mass = float(np.sum(np.abs(vals)))
        tol = max(abs_tol, rel_tol * abs(total), 64 * np.finfo(float).eps * mass)
        err_sum = float(np.sum(errs))
        if err_sum <= tol:
            return total, err_sum
        if len(lo) >= max_panels:
            worst = int(np.argmax(errs))
            raise QuadratureError(
                "panel budget exhausted", (float(lo[worst]), float(hi[worst])))
        # Bisect every panel whose error exceeds its proportional share.
        share = tol / max(len(lo), 1)
        split = errs > 0.5 * share
        if not np.any(split):
            split = errs == errs.max()
        mid = 0.5 * (lo[split] + hi[split])
        new_lo = np.concatenate([lo[split], mid])
        new_hi = np.concatenate([mid, hi[split]])
        nv, ne = _gk_panels(fn, new_lo, new_hi)
        lo = np.concatenate([lo[~split], new_lo])
        hi = np.concatenate([hi[~split], new_hi])
        vals = np.concatenate([vals[~split], nv])
        errs = np.concatenate([errs[~split], ne])
    worst = int(np.argmax(errs))
    raise QuadratureError(
        "adaptive quadrature did not converge",
        (float(lo[worst]), float(hi[worst])))


def adaptive_quad_many(fn, los, his, rel_tol=1e-8, abs_tol=0.0,
                       max_rounds=40, max_panels=2_000_000, seed_splits=1):
    """Independent adaptive integrals over many intervals at once.

    Returns an array of integrals, one per input interval.  All intervals
    share each round's single batched integrand evaluation.  `seed_splits`
    subdivides every interval up front (needed when the integrand oscillates
    faster than the interval scale, where the GK estimator would alias).
    """
    los = np.asarray(los, dtype=float)
    his = np.asarray(his, dtype=float)
    n_owner = len(los)
    if seed_splits > 1:
        frac = np.arange(seed_splits) / seed_splits
        width = his - los
        lo = (los[:, None] + width[:, None] * frac[None, :]).ravel()
        hi = (los[:, None] + width[:, None]
              * np.append(frac[1:], 1.0)[None, :]).ravel()
        owner = np.repeat(np.arange(n_owner), seed_splits)
    else:
        owner = np.arange(n_owner)
        lo, hi = los.copy(), his.copy()
    vals, errs = _gk_panels(fn, lo, hi)
    for _ in range(max_rounds):
        totals = np.bincount(owner, weights=vals, minlength=n_owner)
        masses = np.bincount(owner, weights=np.abs(vals), minlength=n_owner)
        err_tot = np.bincount(owner, weights=errs, minlength=n_owner)
        tols = np.maximum(abs_tol, rel_tol * np.abs(totals))
        tols = np.maximum(tols, 64 * np.finfo(float).eps * masses)
        live = err_tot > tols
        if not np.any(live):
            return totals
        counts = np.bincount(owner, minlength=n_owner).astype(float)
        share = np.where(counts > 0, tols / np.maximum(counts, 1.0), np.inf)
        split = live[owner] & (errs > 0.5 * share[owner])
        if not np.any(split):
            # Force progress on the worst panel of each live owner.
            split = np.zeros(len(lo), dtype=bool)
            masked = np.where(live[owner], errs, -1.0)
            order = np.argsort(-masked)
            seen = set()
            for idx in order:
                o = owner[idx]
                if masked[idx] < 0 or o in seen:
                    continue
                split[idx] = True
                seen.add(o)
        if len(lo) + int(np.sum(split)) > max_panels:
            raise QuadratureError("panel budget exhausted in batch integral")
        mid = 0.5 * (lo[split] + hi[split])
        new_lo = np.concatenate([lo[split], mid])
        new_hi = np.concatenate([mid, hi[split]])
        new_owner = np.concatenate([owner[split], owner[split]])
        nv, ne = _gk_panels(fn, new_lo, new_hi)
        lo = np.concatenate([lo[~split], new_lo])
        hi = np.concatenate([hi[~split], new_hi])
        owner = np.concatenate([owner[~split], new_owner])
        vals = np.concatenate([vals[~split], nv])
        errs = np.concatenate([errs[~split], ne])
    raise QuadratureError("batched adaptive quadrature did not converge")


def golden_max(fn, a, b, xtol):
    """Golden-section maximization of a scalar function on [a, b]."""
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = fn(x1), fn(x2)
    while (b - a) > xtol:
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = fn(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = fn(x1)
    return (x1, f1) if f1 >= f2 else (x2, f2)


def grid_refine_max(fn_vec, a, b, n_grid, xtol):
    """Coarse vectorized grid scan followed by golden-section refinement.

    `fn_vec` maps an array of abscissae to values; refinement probes it one
    point at a time around the grid argmax until the step is below xtol.
    Returns (argmax, max).
    """
    xs = np.linspace(a, b, n_grid, endpoint=False) if n_grid > 1 \
        else np.array([0.5 * (a + b)])
    vals = np.asarray(fn_vec(xs), dtype=float)
    i = int(np.argmax(vals))
    best_x, best_v = float(xs[i]), float(vals[i])
    step = (b - a) / max(n_grid, 1)
    lo, hi = max(a, best_x - step), min(b, best_x + step)
    if hi <= lo or step <= xtol:
        return best_x, best_v

    def fn_scalar(x):
        return float(np.asarray(fn_vec(np.array([x])))[0])

    xr, fr = golden_max(fn_scalar, lo, hi, xtol)
    if fr >= best_v:
        return float(xr), float(fr)
    return best_x, best_v


def thread_count(override=None):
    """Resolve the parallelism level: explicit override, else APX_THREADS."""
    if override is not None:
        return max(1, int(override))
    env = os.environ.get("APX_THREADS", "")
    try:
        return max(1, int(env))
    except ValueError:
        return 1


def ordered_map(fn, items, threads=None):
    """Map preserving input order; threads > 1 uses a worker pool.

    Results are collected in submission order, so the reduction downstream is
    independent of the parallelism level.
    """
    items = list(items)
    workers = thread_count(threads)
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
