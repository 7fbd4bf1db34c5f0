"""Modulus-of-continuity-type majorants w and their companion rate functions H."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConfigError, DegenerateModulusError


@dataclass(frozen=True)
class ModulusModel:
    """Majorant w(delta) paired with the companion rate function H(u).

    w must be of modulus-of-continuity type: w(0) = 0, nondecreasing and
    subadditive (validated on a grid, not symbolically).  H >= 0 enters the
    rate bounds through the products a*H(a).
    """

    w: Callable
    H: Callable
    label: str = ""
    params: dict = field(default_factory=dict)

    @classmethod
    def power_law(cls, beta: float, c: float = 1.0,
                  h_beta: float | None = None) -> "ModulusModel":
        """w(delta) = c*delta^beta with 0 < beta < 1, H(u) = u^{h_beta-1}.

        h_beta defaults to beta, giving the closed-form pairing where
        conditions on (w, H) hold with explicit constants.
        """
        if not 0 < beta < 1:
            raise ConfigError(f"power-law modulus requires 0 < beta < 1, got {beta}")
        if c <= 0:
            raise ConfigError(f"power-law modulus requires c > 0, got {c}")
        hb = beta if h_beta is None else float(h_beta)

        def w(delta):
            return c * np.power(np.maximum(np.asarray(delta, dtype=float), 0.0), beta)

        def H(u):
            return np.power(np.maximum(np.asarray(u, dtype=float), 1e-300), hb - 1.0)

        return cls(w, H, label=f"power-law(beta={beta:g}, c={c:g}, h_beta={hb:g})",
                   params={"beta": beta, "c": c, "h_beta": hb})

    @classmethod
    def from_callables(cls, w, H, label="custom") -> "ModulusModel":
        return cls(w, H, label=label)


def validate_modulus_type(w, *, grid=None, pairs=128, tol=1e-9):
    """Check w(0)=0, monotonicity and subadditivity on a grid; raise on failure."""
    if grid is None:
        grid = np.geomspace(1e-4, np.pi, 64)
    w0 = float(np.asarray(w(0.0)))
    if not np.isfinite(w0) or abs(w0) > tol:
        raise ConfigError(f"modulus must vanish at 0, got w(0) = {w0:g}")
    vals = np.asarray(w(grid), dtype=float)
    if np.any(~np.isfinite(vals)) or np.any(vals < -tol):
        raise ConfigError("modulus must be finite and nonnegative")
    if np.any(np.diff(vals) < -tol * np.maximum(1.0, vals[:-1])):
        i = int(np.argmax(np.diff(vals) < -tol * np.maximum(1.0, vals[:-1])))
        raise ConfigError(
            f"modulus not nondecreasing between delta={grid[i]:g} and {grid[i+1]:g}")
    rng = np.random.default_rng(12345)
    a = rng.choice(grid, size=pairs)
    b = rng.choice(grid, size=pairs)
    lhs = np.asarray(w(a + b), dtype=float)
    rhs = np.asarray(w(a), dtype=float) + np.asarray(w(b), dtype=float)
    bad = lhs > rhs + tol * np.maximum(1.0, rhs)
    if np.any(bad):
        i = int(np.argmax(bad))
        raise ConfigError(
            f"modulus not subadditive: w({a[i]:g}+{b[i]:g}) = {lhs[i]:g} "
            f"> w({a[i]:g}) + w({b[i]:g}) = {rhs[i]:g}")


def require_nondegenerate(w, grid):
    """Raise when w vanishes at a positive argument (no finite constant exists)."""
    vals = np.asarray(w(grid), dtype=float)
    if np.any(vals <= 0.0):
        i = int(np.argmax(vals <= 0.0))
        raise DegenerateModulusError(
            f"modulus vanishes at delta = {grid[i]:g} > 0")
