"""Lower-triangular summability matrices, variation classes and strong means.

Rows are generated on demand from a named rule or explicit row data.  The
RBVS/HBVS constants follow the finite-support convention: entries beyond
column n are zero, so the rest-variation sum truncates at k = n + 1.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .errors import ConfigError
from .poly import APPolynomial

ROW_SUM_TOL = 1e-12
UNBOUNDED = math.inf


@dataclass(frozen=True)
class SummabilityMatrix:
    """Generator of lower-triangular nonnegative rows (a_{nk})."""

    name: str
    generator: Callable[[int], np.ndarray]

    def row(self, n: int) -> np.ndarray:
        if n < 0:
            raise ConfigError(f"row index must be >= 0, got {n}")
        row = np.asarray(self.generator(n), dtype=float)
        if row.shape != (n + 1,):
            raise ConfigError(
                f"matrix {self.name!r} returned a row of length {len(row)} "
                f"for n = {n}")
        return row


def _cesaro(n):
    return np.full(n + 1, 1.0 / (n + 1))


def _one_hot(n):
    row = np.zeros(n + 1)
    row[n] = 1.0
    return row


def _increasing(n):
    k = np.arange(n + 1, dtype=float)
    return 2.0 * (k + 1.0) / ((n + 1.0) * (n + 2.0))


def riesz_matrix(weights, name="riesz") -> SummabilityMatrix:
    """Riesz means: row n proportional to (p_0, ..., p_n) normalized.

    `weights` is a callable k -> p_k or a sequence; weights must be
    nonnegative with positive partial sums.
    """
    if callable(weights):
        w_fn = weights
    else:
        seq = [float(v) for v in weights]

        def w_fn(k):
            if k >= len(seq):
                raise ConfigError(
                    f"riesz weight sequence too short for index {k}")
            return seq[k]

    def gen(n):
        row = np.array([w_fn(k) for k in range(n + 1)], dtype=float)
        if np.any(row < 0):
            raise ConfigError("riesz weights must be nonnegative")
        total = row.sum()
        if total <= 0:
            raise ConfigError("riesz weights sum to zero")
        return row / total

    return SummabilityMatrix(name, gen)


def matrix_from_rows(rows, name="custom") -> SummabilityMatrix:
    rows = [np.asarray(r, dtype=float) for r in rows]
    for n, r in enumerate(rows):
        if r.shape != (n + 1,):
            raise ConfigError(f"rows[{n}] must have length {n + 1}, got {len(r)}")

    def gen(n):
        if n >= len(rows):
            raise ConfigError(f"custom matrix has only {len(rows)} rows, need n={n}")
        return rows[n]

    return SummabilityMatrix(name, gen)


def load_matrix_file(path) -> SummabilityMatrix:
    """Matrix file schema: {"rows": [[1.0], [0.5, 0.5], ...]}."""
    with open(path) as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON in {path}: {exc}")
    if not isinstance(payload, dict) or "rows" not in payload:
        raise ConfigError("matrix file must be an object with a 'rows' list")
    return matrix_from_rows(payload["rows"], name=str(path))


_BUILTINS = {
    "cesaro": lambda: SummabilityMatrix("cesaro", _cesaro),
    "one_hot": lambda: SummabilityMatrix("one_hot", _one_hot),
    "increasing": lambda: SummabilityMatrix("increasing", _increasing),
}


def builtin(name: str, weights=None, rows=None) -> SummabilityMatrix:
    """Named generators: cesaro, one_hot, increasing, riesz (with weights),
    or custom (with explicit rows)."""
    if name in _BUILTINS:
        return _BUILTINS[name]()
    if name == "riesz":
        if weights is None:
            weights = lambda k: k + 1.0
        return riesz_matrix(weights)
    if name == "custom":
        if rows is None:
            raise ConfigError("custom matrix requires explicit rows")
        return matrix_from_rows(rows)
    raise ConfigError(f"unknown matrix name {name!r}")


# -- condition (1) and the variation classes ---------------------------------

class RowViolation(NamedTuple):
    n: int
    k: int
    clause: str


def validate_rows(A: SummabilityMatrix, n_max: int):
    """Check nonnegativity, triangularity and unit row sums for n <= n_max.

    Returns None when every row passes, else the first RowViolation.
    Triangularity is structural here (rows carry exactly n+1 entries), so the
    checked clauses are nonnegativity and the unit row sum.
    """
    if n_max < 0:
        raise ConfigError(f"n_max must be >= 0, got {n_max}")
    for n in range(n_max + 1):
        row = A.row(n)
        neg = np.nonzero(row < 0)[0]
        if len(neg):
            return RowViolation(n, int(neg[0]), "nonnegativity")
        total = float(row.sum())
        if abs(total - 1.0) > ROW_SUM_TOL:
            return RowViolation(n, n, f"row sum {total!r} != 1")
    return None


def _variation(row: np.ndarray) -> np.ndarray:
    """|a_{nk} - a_{n,k+1}| for k = 0..n with a_{n,n+1} = 0."""
    ext = np.concatenate([row, [0.0]])
    return np.abs(np.diff(ext))


def rbvs_constant(A: SummabilityMatrix, n: int, m: int) -> float:
    """Rest-variation constant: sum_{k>=m} |a_nk - a_nk+1| / a_nm.

    Returns UNBOUNDED (inf) when a_nm = 0 with positive variation and 0 when
    both vanish (vacuous constraint).
    """
    row = A.row(n)
    if not 0 <= m <= n:
        raise ConfigError(f"m must be in [0, {n}], got {m}")
    var = float(_variation(row)[m:].sum())
    return _ratio(var, float(row[m]))


def hbvs_constant(A: SummabilityMatrix, n: int, m: int) -> float:
    """Head-variation constant: sum_{k<m} |a_nk - a_nk+1| / a_nm."""
    row = A.row(n)
    if not 0 <= m <= n:
        raise ConfigError(f"m must be in [0, {n}], got {m}")
    var = float(_variation(row)[:m].sum())
    return _ratio(var, float(row[m]))


def _ratio(var: float, denom: float) -> float:
    if denom > 0.0:
        return var / denom
    return 0.0 if var == 0.0 else UNBOUNDED


def _row_constants(row: np.ndarray):
    """(max RBVS constant, max HBVS constant) over m for one row."""
    var = _variation(row)
    rest = np.cumsum(var[::-1])[::-1]          # rest[m] = sum_{k >= m}
    head = np.concatenate([[0.0], np.cumsum(var[:-1])])  # head[m] = sum_{k < m}
    rb = hb = 0.0
    for m in range(len(row)):
        rb = max(rb, _ratio(float(rest[m]), float(row[m])))
        hb = max(hb, _ratio(float(head[m]), float(row[m])))
    return rb, hb


@dataclass(frozen=True)
class VariationReport:
    """Per-row and uniform variation constants plus the class verdict."""

    n_max: int
    per_row_rbvs: tuple
    per_row_hbvs: tuple
    uniform_rbvs: float
    uniform_hbvs: float
    klass: str                      # RBVS | HBVS | both | neither
    growth_rbvs: float              # per_row(n_max) / per_row(n_max // 2)
    growth_hbvs: float

    def to_dict(self) -> dict:
        def enc(v):
            return "UNBOUNDED" if math.isinf(v) else v
        return {
            "n_max": self.n_max,
            "class": self.klass,
            "uniform_K_rbvs": enc(self.uniform_rbvs),
            "uniform_K_hbvs": enc(self.uniform_hbvs),
            "growth_rbvs": enc(self.growth_rbvs),
            "growth_hbvs": enc(self.growth_hbvs),
            "per_row_K_rbvs": [enc(v) for v in self.per_row_rbvs],
            "per_row_K_hbvs": [enc(v) for v in self.per_row_hbvs],
        }


def classify(A: SummabilityMatrix, n_max: int) -> VariationReport:
    """Minimal per-row constants, uniform sup, class verdict, growth diagnostic.

    Unboundedness cannot be decided from finitely many rows; the growth
    ratio per_row(n_max)/per_row(n_max/2) signals an unbounded trend.
    """
    violation = validate_rows(A, n_max)
    if violation is not None:
        raise ConfigError(f"matrix rows invalid: {violation}")
    rb_list, hb_list = [], []
    for n in range(n_max + 1):
        rb, hb = _row_constants(A.row(n))
        rb_list.append(rb)
        hb_list.append(hb)
    uniform_rb = max(rb_list)
    uniform_hb = max(hb_list)
    is_rb = math.isfinite(uniform_rb)
    is_hb = math.isfinite(uniform_hb)
    klass = {(True, True): "both", (True, False): "RBVS",
             (False, True): "HBVS", (False, False): "neither"}[(is_rb, is_hb)]

    def growth(values):
        hi, lo = values[n_max], values[max(n_max // 2, 0)]
        if math.isinf(hi) or math.isinf(lo):
            return UNBOUNDED
        return hi / lo if lo > 0 else (UNBOUNDED if hi > 0 else 1.0)

    return VariationReport(n_max, tuple(rb_list), tuple(hb_list),
                           uniform_rb, uniform_hb, klass,
                           growth(rb_list), growth(hb_list))


# -- strong mean --------------------------------------------------------------

def resolve_gamma(f: APPolynomial, n: int, gamma=None) -> np.ndarray:
    """Materialize the truncation thresholds gamma_0..gamma_n.

    Default is the star convention gamma_k = alpha*k/2.  Accepts explicit
    sequences, callables, or {"kind": "star"|"linear", "scale": c}.
    """
    if gamma is None or (isinstance(gamma, dict) and gamma.get("kind") == "star"):
        out = f.alpha * np.arange(n + 1, dtype=float) / 2.0
    elif isinstance(gamma, dict):
        if gamma.get("kind") == "linear":
            out = float(gamma.get("scale", 1.0)) * np.arange(n + 1, dtype=float)
        else:
            raise ConfigError(f"unknown gamma spec {gamma!r}")
    elif callable(gamma):
        out = np.array([float(gamma(k)) for k in range(n + 1)])
    else:
        out = np.asarray(list(gamma), dtype=float)
        if len(out) < n + 1:
            raise ConfigError(
                f"gamma sequence has {len(out)} entries, need {n + 1}")
        out = out[:n + 1]
    if np.any(out < 0) or np.any(np.diff(out) < 0):
        raise ConfigError("gamma must be nondecreasing and nonnegative")
    return out


def _deviation_profile(f: APPolynomial, gammas: np.ndarray, xs: np.ndarray):
    """|S_{gamma_k} f(x) - f(x)| for all k and x, via prefix partial sums.

    Partial sums are step functions of the threshold, so only the
    len(spectrum)+1 distinct prefixes are evaluated.
    """
    lam = f.positive_exponents
    coef = f.positive_coefficients
    cuts = np.searchsorted(lam, gammas, side="right")
    phases = np.exp(1j * np.multiply.outer(lam, xs))          # (m, nx)
    contrib = 2.0 * np.real(coef[:, None] * phases)            # (m, nx)
    prefixes = np.vstack([np.zeros(len(xs)), np.cumsum(contrib, axis=0)])
    prefixes += f.a0
    full = prefixes[-1]
    devs = np.abs(prefixes - full[None, :])                    # (m+1, nx)
    return devs, cuts


def strong_mean(f: APPolynomial, A: SummabilityMatrix, n: int, q: float,
                x: float, gamma=None, mode: str = "direct",
                tol: float = 1e-5) -> float:
    """H^q_{n,A,gamma} f(x) = {sum_k a_nk |S_{gamma_k} f(x) - f(x)|^q}^{1/q}.

    mode="kernel" recomputes every partial sum through the oscillatory
    integral (cross-validation; requires the default star gamma).
    """
    if not q > 0:
        raise ConfigError(f"q must be > 0, got {q}")
    if n < 0:
        raise ConfigError(f"n must be >= 0, got {n}")
    gammas = resolve_gamma(f, n, gamma)
    row = A.row(n)
    if mode == "kernel":
        default = f.alpha * np.arange(n + 1, dtype=float) / 2.0
        if not np.array_equal(gammas, default):
            raise ConfigError("kernel mode requires the default star gamma")
        from .kernel import partial_sum_via_kernel
        fx = f.eval(x)
        devs = np.array([abs(partial_sum_via_kernel(f, k, x, tol).value - fx)
                         for k in range(n + 1)])
        return float(np.sum(row * devs ** q) ** (1.0 / q))
    if mode != "direct":
        raise ConfigError(f"unknown strong-mean mode {mode!r}")
    devs, cuts = _deviation_profile(f, gammas, np.array([float(x)]))
    return float(np.sum(row * devs[cuts, 0] ** q) ** (1.0 / q))


def strong_mean_profile(f: APPolynomial, A: SummabilityMatrix, n: int,
                        q: float, xs: np.ndarray, gamma=None) -> np.ndarray:
    """Vectorized strong mean over an array of evaluation points."""
    if not q > 0:
        raise ConfigError(f"q must be > 0, got {q}")
    gammas = resolve_gamma(f, n, gamma)
    row = A.row(n)
    xs = np.asarray(xs, dtype=float)
    devs, cuts = _deviation_profile(f, gammas, xs)
    # Group the row weights by prefix bucket: identical cuts share a partial sum.
    weights = np.bincount(cuts, weights=row, minlength=devs.shape[0])
    return np.power(weights @ np.power(devs, q), 1.0 / q)
