"""The de la Vallee Poussin-type kernel and the improper oscillatory integral.

Psi_{lambda,eta}(t) = 2 sin((eta-lambda)t/2) sin((eta+lambda)t/2)
                      / (pi (eta-lambda) t^2),

with the index form Psi_k = Psi_{alpha k/2, alpha (k+1)/2}.  The partial-sum
representation f(x) + int_0^inf phi_x(t) Psi_k(t) dt is evaluated by
zero-aligned adaptive panels on (0, T0] plus a certified asymptotic tail:
each cosine component of phi_x * Psi_k is integrated by parts twice on
(T0, inf), leaving boundary terms and a remainder bounded by
2|beta| / (Omega^2 T0^3) per component.  T0 is chosen so the certified
remainder fits the tail budget, so the whole evaluation carries an a priori
error bound instead of relying on the crude 1/T discard (which would need
T ~ 1e6..1e7 at the acceptance tolerance).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import CapacityError, ConfigError
from .poly import APPolynomial
from .quadrature import adaptive_quad

_TAYLOR_CUT = 1e-6
_OMEGA_EPS = 1e-8
_MAX_TAIL_START = 1e9
_EDGE_CAP = 5_000_000


@dataclass(frozen=True)
class KernelParams:
    """Transition band [lam, eta) of the kernel; index form has eta-lam = alpha/2."""

    lam: float
    eta: float

    def __post_init__(self):
        if not (math.isfinite(self.lam) and math.isfinite(self.eta)):
            raise ConfigError("kernel parameters must be finite")
        if not (0.0 <= self.lam < self.eta):
            raise ConfigError(
                f"kernel requires 0 <= lambda < eta, got ({self.lam}, {self.eta})")

    @classmethod
    def from_index(cls, k: int, alpha: float) -> "KernelParams":
        if k < 0:
            raise ConfigError(f"kernel index must be >= 0, got {k}")
        if alpha <= 0:
            raise ConfigError(f"alpha must be > 0, got {alpha}")
        return cls(alpha * k / 2.0, alpha * (k + 1) / 2.0)

    @property
    def band(self) -> float:
        return self.eta - self.lam

    @property
    def zero_periods(self):
        """Zero spacings of the two sine factors: 2*pi/(eta-lam), 2*pi/(eta+lam)."""
        slow = 2.0 * math.pi / (self.eta - self.lam)
        fast = 2.0 * math.pi / (self.eta + self.lam)
        return slow, fast


def psi(params: KernelParams, t):
    """Kernel value, continuous at 0 with value (eta+lam)/(2*pi).

    |t| below 1e-6 switches to a 4-term even Taylor branch to avoid
    cancellation in (cos(lam t) - cos(eta t)) / t^2.
    """
    lam, eta = params.lam, params.eta
    arr = np.asarray(t, dtype=float)
    out = np.empty(arr.shape)
    tiny = np.abs(arr) < _TAYLOR_CUT
    if np.any(~tiny):
        tt = arr[~tiny]
        out[~tiny] = (2.0 * np.sin((eta - lam) * tt / 2.0)
                      * np.sin((eta + lam) * tt / 2.0)
                      / (math.pi * (eta - lam) * tt ** 2))
    if np.any(tiny):
        tt = arr[tiny]
        t2 = tt * tt
        acc = np.zeros(tt.shape)
        for j, fact in ((1, 2.0), (2, 24.0), (3, 720.0), (4, 40320.0)):
            term = (eta ** (2 * j) - lam ** (2 * j)) / fact * t2 ** (j - 1)
            acc += term if j % 2 == 1 else -term
        out[tiny] = acc / (math.pi * (eta - lam))
    if np.isscalar(t) or arr.ndim == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class QuadraturePlan:
    """Zero-aligned panel decomposition of (0, tail_start] plus a tail bound.

    tail_bound certifies |int_{tail_start}^inf phi_x Psi| via
    |Psi| <= 2/(pi (eta-lam) t^2) and |phi_x| <= 4 sup|f| = 4 * f_bound.
    Panel edges are generated on demand (the full list can run to millions
    at tight tolerances).
    """

    params: KernelParams
    f_bound: float
    tail_start: float
    tail_bound: float

    def edges(self, upto: float | None = None) -> np.ndarray:
        hi = self.tail_start if upto is None else min(upto, self.tail_start)
        slow, fast = self.params.zero_periods
        count = int(hi / fast) + int(hi / slow) + 2
        if count > _EDGE_CAP:
            raise CapacityError(
                f"panel materialization would need ~{count} edges (cap {_EDGE_CAP})")
        zs = [np.arange(1, int(hi / step) + 1) * step
              for step in (slow, fast) if step < hi]
        merged = np.unique(np.concatenate([[0.0, hi]] + zs)) if zs \
            else np.array([0.0, hi])
        return merged[merged <= hi * (1 + 1e-15)]

    @property
    def panel_count(self) -> int:
        slow, fast = self.params.zero_periods
        return int(self.tail_start / fast) + int(self.tail_start / slow) + 1


def plan_quadrature(params: KernelParams, f_bound: float,
                    tol: float) -> QuadraturePlan:
    """Crude discard-tail plan: T with 8 f_bound / (pi (eta-lam) T) <= tol/2."""
    if not tol > 0:
        raise ConfigError(f"tolerance must be > 0, got {tol}")
    if f_bound < 0:
        raise ConfigError("f_bound must be >= 0")
    band = params.band
    if f_bound == 0.0:
        return QuadraturePlan(params, 0.0, 2.0 * math.pi / band, 0.0)
    T = 16.0 * f_bound / (math.pi * band * tol)
    T = max(T, 2.0 * math.pi / band)
    if T > _MAX_TAIL_START:
        raise CapacityError(
            f"tail start {T:.3g} exceeds cap {_MAX_TAIL_START:.0e} "
            f"for tol {tol:g}")
    return QuadraturePlan(params, f_bound, T,
                          8.0 * f_bound / (math.pi * band * T))


# -- certified asymptotic tail ------------------------------------------------

class _CosineCombo(NamedTuple):
    omegas: np.ndarray   # nonnegative frequencies
    betas: np.ndarray    # real coefficients; integrand = pref * sum b cos(w t) / t^2
    prefactor: float


def _integrand_combo(f: APPolynomial, x: float,
                     params: KernelParams) -> _CosineCombo:
    """phi_x(t) Psi(t) = pref * [sum_m beta_m cos(Omega_m t)] / t^2 exactly."""
    phi = f.symmetric_difference(x)
    c = phi.cos_amplitudes
    lam_f = f.positive_exponents
    lam_b, eta_b = params.lam, params.eta
    omegas, betas = [], []
    for ci, li in zip(c, lam_f):
        omegas.extend([abs(li - lam_b), li + lam_b, abs(li - eta_b),
                       li + eta_b, lam_b, eta_b])
        betas.extend([ci / 2.0, ci / 2.0, -ci / 2.0, -ci / 2.0, -ci, ci])
    if not omegas:
        return _CosineCombo(np.zeros(0), np.zeros(0), 0.0)
    omegas = np.asarray(omegas)
    betas = np.asarray(betas)
    keys = np.round(omegas * 1e9).astype(np.int64)
    uniq, inv = np.unique(keys, return_inverse=True)
    grouped_b = np.zeros(len(uniq))
    np.add.at(grouped_b, inv, betas)
    grouped_w = np.zeros(len(uniq))
    np.add.at(grouped_w, inv, omegas)
    counts = np.bincount(inv, minlength=len(uniq)).astype(float)
    pref = 1.0 / (math.pi * params.band)
    return _CosineCombo(grouped_w / counts, grouped_b, pref)


def _tail_after(combo: _CosineCombo, t0: float):
    """(value, certified remainder bound) of the integral over (t0, inf).

    int_{t0}^inf cos(w t)/t^2 dt = -sin(w t0)/(w t0^2) + 2 cos(w t0)/(w^2 t0^3)
                                   + R,   |R| <= 2/(w^2 t0^3);
    the w = 0 component integrates to 1/t0 exactly.  Frequencies below
    _OMEGA_EPS are treated as 0 with an extra 2.5*w*|beta| remainder.
    """
    if len(combo.omegas) == 0:
        return 0.0, 0.0
    w, b = combo.omegas, combo.betas
    zeroish = w <= _OMEGA_EPS
    value = float(np.sum(b[zeroish])) / t0
    rem = 2.5 * float(np.sum(np.abs(b[zeroish]) * w[zeroish]))
    wp, bp = w[~zeroish], b[~zeroish]
    if len(wp):
        value += float(np.sum(bp * (-np.sin(wp * t0) / (wp * t0 ** 2)
                                    + 2.0 * np.cos(wp * t0) / (wp ** 2 * t0 ** 3))))
        rem += float(np.sum(2.0 * np.abs(bp) / (wp ** 2 * t0 ** 3)))
    return combo.prefactor * value, combo.prefactor * rem


def _tail_start_for(combo: _CosineCombo, budget: float, t_min: float) -> float:
    """Smallest t0 >= t_min whose certified remainder fits the budget."""
    if len(combo.omegas) == 0:
        return t_min
    w, b = combo.omegas, combo.betas
    pos = w > _OMEGA_EPS
    fixed = 2.5 * float(np.sum(np.abs(b[~pos]) * w[~pos])) * combo.prefactor
    if fixed >= budget:
        raise CapacityError("near-zero frequency component exceeds tail budget")
    cubic = 2.0 * float(np.sum(np.abs(b[pos]) / w[pos] ** 2)) * combo.prefactor
    if cubic <= 0:
        return t_min
    return max(t_min, (cubic / (budget - fixed)) ** (1.0 / 3.0))


class KernelEvaluation(NamedTuple):
    value: float
    tail_start: float
    tail_bound: float
    quad_error: float
    panel_count: int


def partial_sum_via_kernel(f: APPolynomial, k: int, x: float,
                           tol: float = 1e-5) -> KernelEvaluation:
    """f(x) + int_0^inf phi_x(t) Psi_k(t) dt with absolute error <= tol.

    Matches the spectral truncation at gamma = alpha*k/2 whenever the open
    band (alpha k/2, alpha (k+1)/2) is exponent-free.  Budget split: 45% to
    the panel quadrature on (0, T0], 45% to the certified asymptotic tail.
    """
    if tol < 1e-6:
        raise ConfigError(f"kernel tolerance must be >= 1e-6, got {tol:g}")
    params = KernelParams.from_index(k, f.alpha)
    fx = f.eval(x)
    combo = _integrand_combo(f, x, params)
    if len(combo.omegas) == 0:
        return KernelEvaluation(fx, 0.0, 0.0, 0.0, 0)
    slow, _ = params.zero_periods
    t0 = _tail_start_for(combo, 0.45 * tol, t_min=3.0 * slow)
    if t0 > _MAX_TAIL_START:
        raise CapacityError(f"certified tail start {t0:.3g} exceeds cap")
    tail_value, tail_bound = _tail_after(combo, t0)
    plan = QuadraturePlan(params, f.coefficient_l1, t0, tail_bound)
    # Seed panels must resolve the fastest oscillation of phi_x * Psi_k, not
    # just the kernel zeros; wider panels alias and defeat the GK estimator.
    omega_max = float(np.max(combo.omegas)) if len(combo.omegas) else 1.0
    step = 2.0 * math.pi / max(omega_max, 1e-12)
    n_fine = int(t0 / step) + 1
    if n_fine > _EDGE_CAP:
        raise CapacityError(f"oscillation-resolving grid needs {n_fine} panels")
    edges = np.unique(np.concatenate([plan.edges(),
                                      np.linspace(0.0, t0, n_fine + 1)]))
    phi = f.symmetric_difference(x)

    def integrand(t):
        return phi(t) * psi(params, t)

    body, quad_err = adaptive_quad(integrand, 0.0, t0,
                                   abs_tol=0.45 * tol, rel_tol=0.0,
                                   edges=edges)
    return KernelEvaluation(fx + body + tail_value, t0, tail_bound,
                            quad_err, len(edges) - 1)


def averaged_difference(f: APPolynomial, x: float, delta: float,
                        nu: float) -> float:
    """Phi_x f(delta, nu) = (1/delta) int_nu^{nu+delta} phi_x(u) du."""
    if not delta > 0:
        raise ConfigError(f"delta must be > 0, got {delta}")
    phi = f.symmetric_difference(x)
    val, _ = adaptive_quad(phi, nu, nu + delta, rel_tol=1e-8,
                           abs_tol=1e-14 * max(1.0, f.coefficient_l1))
    return val / delta
