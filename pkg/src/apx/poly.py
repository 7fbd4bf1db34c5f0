"""Almost periodic trigonometric sums with gap-constrained spectra.

A polynomial stores the one-sided spectrum {(lambda_nu, A_nu)} with
lambda_nu >= 0 strictly increasing; evaluation uses the full symmetric
spectrum A_{-nu} = conj(A_nu), lambda_{-nu} = -lambda_nu, so every stored
object is a real-valued function.  Spectra are stored exactly as given and
never re-derived from samples.
"""

from __future__ import annotations

import json
import math
from dataclasses import InitVar, dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np

from .errors import ConfigError

MATCH_TOL = 1e-9        # exponent lookup tolerance
GAP_SLACK = 1e-12       # float slack on gap validation
IMAG_RESIDUE_TOL = 1e-12


@dataclass(frozen=True)
class APPolynomial:
    """Finite real trigonometric sum sum_nu A_nu e^{i lambda_nu x}.

    `exponents` holds the nonnegative side only (a lambda = 0 entry, when
    present, must come first and carry a real coefficient); `alpha` is the
    declared spectral gap: consecutive positive exponents differ by at least
    alpha, and the smallest positive exponent is at least alpha away from
    lambda_0 = 0.
    """

    exponents: tuple
    coefficients: tuple
    alpha: float
    label: str = ""
    check: InitVar[bool] = True

    def __post_init__(self, check):
        object.__setattr__(self, "exponents",
                           tuple(float(l) for l in self.exponents))
        object.__setattr__(self, "coefficients",
                           tuple(complex(c) for c in self.coefficients))
        object.__setattr__(self, "alpha", float(self.alpha))
        if check:
            self._validate()

    def _validate(self):
        if not (math.isfinite(self.alpha) and self.alpha > 0):
            raise ConfigError(f"alpha must be positive and finite, got {self.alpha}")
        if len(self.exponents) != len(self.coefficients):
            raise ConfigError("exponents and coefficients differ in length")
        prev = None
        for i, (lam, coef) in enumerate(zip(self.exponents, self.coefficients)):
            if not math.isfinite(lam) or lam < 0:
                raise ConfigError(f"terms[{i}]: exponent must be finite and >= 0, got {lam}")
            if not (math.isfinite(coef.real) and math.isfinite(coef.imag)):
                raise ConfigError(f"terms[{i}]: coefficient must be finite")
            if abs(coef) == 0.0:
                raise ConfigError(f"terms[{i}]: zero coefficient stored (|A| must be > 0)")
            if lam == 0.0:
                if i != 0:
                    raise ConfigError(f"terms[{i}]: lambda = 0 must be the first term")
                if coef.imag != 0.0:
                    raise ConfigError(f"terms[{i}]: lambda = 0 coefficient must be real")
            else:
                base = 0.0 if prev is None else prev
                gap = lam - base
                if prev is not None and gap <= 0:
                    raise ConfigError(
                        f"terms[{i}]: exponents must be strictly increasing "
                        f"({lam} after {prev})")
                if gap < self.alpha - GAP_SLACK:
                    raise ConfigError(
                        f"terms[{i}]: gap {gap:g} below declared alpha {self.alpha:g}")
                prev = lam

    # -- cached spectral views -------------------------------------------

    @cached_property
    def a0(self) -> float:
        if self.exponents and self.exponents[0] == 0.0:
            return self.coefficients[0].real
        return 0.0

    @cached_property
    def positive_exponents(self) -> np.ndarray:
        skip = 1 if (self.exponents and self.exponents[0] == 0.0) else 0
        return np.asarray(self.exponents[skip:], dtype=float)

    @cached_property
    def positive_coefficients(self) -> np.ndarray:
        skip = 1 if (self.exponents and self.exponents[0] == 0.0) else 0
        return np.asarray(self.coefficients[skip:], dtype=complex)

    @cached_property
    def symmetric_spectrum(self):
        """(lambdas, coefficients) over the full two-sided spectrum."""
        lam = self.positive_exponents
        coef = self.positive_coefficients
        lams = np.concatenate([-lam[::-1], [0.0], lam])
        coefs = np.concatenate([np.conj(coef[::-1]), [complex(self.a0)], coef])
        keep = np.abs(coefs) > 0
        keep[len(lam)] = True  # keep the zero term for bookkeeping
        return lams[keep], coefs[keep]

    @cached_property
    def max_exponent(self) -> float:
        lam = self.positive_exponents
        return float(lam[-1]) if len(lam) else 0.0

    @cached_property
    def coefficient_l1(self) -> float:
        """Upper bound for sup|f|: |A_0| + 2 sum |A_nu|."""
        return abs(self.a0) + 2.0 * float(np.sum(np.abs(self.positive_coefficients)))

    @property
    def is_zero(self) -> bool:
        return self.a0 == 0.0 and len(self.positive_exponents) == 0

    # -- evaluation ------------------------------------------------------

    def __call__(self, x):
        return self.eval(x)

    def eval(self, x):
        """Evaluate f at x (scalar or ndarray)."""
        arr = np.asarray(x, dtype=float)
        if not np.all(np.isfinite(arr)):
            raise ValueError("non-finite evaluation point")
        lam = self.positive_exponents
        if len(lam) == 0:
            out = np.full(arr.shape, self.a0)
            return float(out) if np.isscalar(x) or arr.ndim == 0 else out
        phases = np.exp(1j * np.multiply.outer(arr, lam))
        out = self.a0 + 2.0 * np.real(phases @ self.positive_coefficients)
        if np.isscalar(x) or arr.ndim == 0:
            return float(out)
        return out

    def coefficient_at(self, lam: float) -> complex:
        """Bohr coefficient lookup: exact A_nu within MATCH_TOL, else 0.

        For finite trigonometric sums the Bohr mean-value limit equals the
        stored coefficient exactly; negative lambda returns the conjugate.
        """
        if abs(lam) <= MATCH_TOL:
            return complex(self.a0)
        sign = 1.0 if lam >= 0 else -1.0
        target = abs(lam)
        exps = self.positive_exponents
        if len(exps):
            i = int(np.argmin(np.abs(exps - target)))
            if abs(exps[i] - target) <= MATCH_TOL:
                c = self.positive_coefficients[i]
                return complex(c) if sign > 0 else complex(np.conj(c))
        return 0j

    def partial_sum(self, gamma: float, x):
        """Spectral truncation sum over |lambda_nu| <= gamma (inclusive)."""
        if gamma < 0:
            raise ValueError("gamma must be >= 0")
        lam = self.positive_exponents
        keep = lam <= gamma
        arr = np.asarray(x, dtype=float)
        if not np.all(np.isfinite(arr)):
            raise ValueError("non-finite evaluation point")
        if not np.any(keep):
            out = np.full(arr.shape, self.a0)
        else:
            phases = np.exp(1j * np.multiply.outer(arr, lam[keep]))
            out = self.a0 + 2.0 * np.real(phases @ self.positive_coefficients[keep])
        if np.isscalar(x) or arr.ndim == 0:
            return float(out)
        return out

    def star_partial_sum(self, k: int, x) -> "StarPartialSum":
        """Truncation at gamma = alpha*k/2 plus band-occupancy diagnostics.

        `band_occupied` reports whether the open interval
        (alpha*k/2, alpha*(k+1)/2) contains a stored exponent; when it does,
        the kernel-integral representation of this truncation does not apply.
        `boundary_hit` flags exponents within MATCH_TOL of either endpoint.
        """
        if k < 0:
            raise ValueError("k must be >= 0")
        lo = self.alpha * k / 2.0
        hi = self.alpha * (k + 1) / 2.0
        lam = self.positive_exponents
        occupied = bool(np.any((lam > lo + MATCH_TOL) & (lam < hi - MATCH_TOL)))
        boundary = bool(np.any((np.abs(lam - lo) <= MATCH_TOL)
                               | (np.abs(lam - hi) <= MATCH_TOL)))
        return StarPartialSum(self.partial_sum(lo, x), occupied, boundary)

    # -- derived polynomials (skip gap validation, drop exact zeros) ------

    def _derived(self, exponents, coefficients, label=""):
        terms = [(l, c) for l, c in zip(exponents, coefficients) if abs(c) != 0.0]
        return APPolynomial(tuple(l for l, _ in terms),
                            tuple(c for _, c in terms),
                            self.alpha, label=label, check=False)

    def shift_difference(self, t: float) -> "APPolynomial":
        """f(. + t) - f(.) as a polynomial: coefficients A_nu (e^{i lam t} - 1)."""
        lam = self.positive_exponents
        coef = self.positive_coefficients * (np.exp(1j * lam * t) - 1.0)
        return self._derived(lam, coef)

    def tail(self, sigma: float) -> "APPolynomial":
        """Spectral tail: terms with lambda_nu > sigma."""
        lam = self.positive_exponents
        keep = lam > sigma
        return self._derived(lam[keep], self.positive_coefficients[keep])

    def scaled(self, c: float) -> "APPolynomial":
        exps, coefs = [], []
        if self.a0 != 0.0:
            exps.append(0.0)
            coefs.append(complex(self.a0 * c))
        exps.extend(self.positive_exponents)
        coefs.extend(self.positive_coefficients * c)
        return self._derived(exps, coefs)

    def symmetric_difference(self, x: float) -> "SymmetricDifference":
        return SymmetricDifference(self, float(x))

    # -- serialization -----------------------------------------------------

    def to_config(self) -> dict:
        return {
            "alpha": self.alpha,
            "terms": [{"lambda": l, "re": c.real, "im": c.imag}
                      for l, c in zip(self.exponents, self.coefficients)],
        }


class StarPartialSum(NamedTuple):
    value: float
    band_occupied: bool
    boundary_hit: bool


@dataclass(frozen=True)
class SymmetricDifference:
    """phi_x(t) = f(x+t) + f(x-t) - 2 f(x); even in t, phi_x(0) = 0."""

    base: APPolynomial
    x: float

    @cached_property
    def cos_amplitudes(self) -> np.ndarray:
        """c_nu = 4 Re(A_nu e^{i lambda_nu x}): phi_x = sum c_nu (cos(lam t) - 1)."""
        lam = self.base.positive_exponents
        coef = self.base.positive_coefficients
        return 4.0 * np.real(coef * np.exp(1j * lam * self.x))

    def __call__(self, t):
        arr = np.asarray(t, dtype=float)
        lam = self.base.positive_exponents
        if len(lam) == 0:
            out = np.zeros(arr.shape)
        else:
            out = (np.cos(np.multiply.outer(arr, lam)) - 1.0) @ self.cos_amplitudes
        if np.isscalar(t) or arr.ndim == 0:
            return float(out)
        return out

    def as_polynomial(self) -> APPolynomial:
        """phi_x as a polynomial in t (real cosine spectrum)."""
        c = self.cos_amplitudes
        lam = self.base.positive_exponents
        exps = [0.0]
        coefs = [complex(-float(np.sum(c)))]
        exps.extend(lam)
        coefs.extend(c / 2.0 + 0j)
        return self.base._derived(exps, coefs)


# -- configuration loading -------------------------------------------------

def from_config(config: dict, label: str = "") -> APPolynomial:
    """Build a polynomial from the JSON schema, reporting the first violation.

    Schema: {"alpha": 1.0, "terms": [{"lambda": 1.0, "re": 0.5, "im": 0.0}]}
    """
    if not isinstance(config, dict):
        raise ConfigError("function config must be a JSON object")
    unknown = set(config) - {"alpha", "terms", "label"}
    if unknown:
        raise ConfigError(f"unknown function config keys: {sorted(unknown)}")
    if "alpha" not in config:
        raise ConfigError("function config missing 'alpha'")
    if "terms" not in config or not isinstance(config["terms"], list):
        raise ConfigError("function config missing 'terms' list")
    exps, coefs = [], []
    for i, term in enumerate(config["terms"]):
        if not isinstance(term, dict):
            raise ConfigError(f"terms[{i}]: must be an object")
        bad = set(term) - {"lambda", "re", "im"}
        if bad:
            raise ConfigError(f"terms[{i}]: unknown keys {sorted(bad)}")
        if "lambda" not in term:
            raise ConfigError(f"terms[{i}]: missing 'lambda'")
        try:
            exps.append(float(term["lambda"]))
            coefs.append(complex(float(term.get("re", 0.0)),
                                 float(term.get("im", 0.0))))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"terms[{i}]: non-numeric entry ({exc})")
    return APPolynomial(tuple(exps), tuple(coefs), config["alpha"],
                        label=config.get("label", label))


def load_function(path) -> APPolynomial:
    with open(path) as fh:
        try:
            config = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON in {path}: {exc}")
    return from_config(config)


# -- built-in corpus --------------------------------------------------------

def lacunary(beta: float, levels: int = 8, alpha: float = 1.0) -> APPolynomial:
    """sum_{j=0}^{levels} 2^{-j beta} cos(2^j alpha x); gaps double, so >= alpha."""
    exps = tuple(alpha * 2.0 ** j for j in range(levels + 1))
    coefs = tuple(complex(2.0 ** (-beta * j) / 2.0) for j in range(levels + 1))
    return APPolynomial(exps, coefs, alpha, label=f"lacunary-beta{beta:g}")


def make_test_corpus(seed: int = 0) -> list:
    """Deterministic corpus exercising every spectral regime.

    Members keep every open band (alpha k/2, alpha (k+1)/2), k <= 16, free of
    exponents: reachable spectra sit on integer multiples of alpha/2, and the
    irrational-ratio two-tone member places its spectrum above 8.5*alpha, so
    the kernel-integral representation of the truncations applies throughout.
    """
    members = [
        APPolynomial((1.0,), (0.5,), 1.0, label="cos"),
        APPolynomial((0.0, 1.0), (0.25, 0.5), 1.0, label="const-plus-cos"),
        APPolynomial((2.0, 2.0 * math.sqrt(2.0)), (0.5, 0.5), 0.2,
                     label="two-tone"),
        lacunary(0.2),
        lacunary(0.4),
    ]
    rng = np.random.default_rng(seed)
    m = 2 + int(rng.integers(0, 3))
    indices = [m]
    for step in rng.integers(2, 6, size=3):
        indices.append(indices[-1] + int(step))
    exps = tuple(0.5 * i for i in indices)
    mags = rng.uniform(0.2, 1.0, size=4)
    phases = rng.uniform(0.0, 2.0 * np.pi, size=4)
    coefs = tuple(complex(r * np.cos(p), r * np.sin(p))
                  for r, p in zip(mags, phases))
    members.append(APPolynomial(exps, coefs, 1.0, label=f"random-{seed}"))
    return members
