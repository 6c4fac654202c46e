"""Smooth cutoffs used by the layer construction.

eta: C-infinity step, 1 on [0, 1/4], 0 on [3/4, 1], built from the
exponential smoothstep S(r) = sigma(r) / (sigma(r) + sigma(1-r)) with
sigma(r) = exp(-1/(2r)) (zero-extended). The 1/(2r) rate keeps eta' strictly
inside (-4, 0): with exp(-1/r) the midpoint slope hits -4 exactly.

eta~: the polynomial step with density x^3 (1-x)^3 / Beta(4, 4); closed form,
Beta(4, 4) = 1/140, strictly decreasing, vanishing to third order at 0 and 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

_Q = 0.5  # sigma(r) = exp(-_Q / r)

BETA44 = 1.0 / 140.0


@lru_cache(maxsize=1)
def _smoothstep_derivs():
    """Vectorized S, S', ..., S'''' generated once from the symbolic form."""
    import sympy as sp

    r = sp.symbols("r")
    sig = sp.exp(-_Q / r)
    sig1 = sp.exp(-_Q / (1 - r))
    S = sig / (sig + sig1)
    exprs = [S]
    for _ in range(4):
        exprs.append(sp.diff(exprs[-1], r))
    return [sp.lambdify(r, e, "numpy") for e in exprs]


def smoothstep(r, order: int = 0):
    """S^{(order)}(r) with S = 0 for r <= 0 and S = 1 for r >= 1."""
    fns = _smoothstep_derivs()
    r = np.asarray(r, dtype=float)
    out = np.zeros_like(r)
    inner = (r > 0.0) & (r < 1.0)
    if np.any(inner):
        with np.errstate(over="ignore", under="ignore", divide="ignore",
                         invalid="ignore"):
            vals = fns[order](r[inner])
        out[inner] = np.nan_to_num(vals, nan=0.0, posinf=0.0, neginf=0.0)
    if order == 0:
        out[r >= 1.0] = 1.0
    return out


def eta(x, order: int = 0):
    """Cutoff eta on [0, 1]: 1 on [0, 1/4], 0 on [3/4, 1]; derivatives 0..4."""
    x = np.asarray(x, dtype=float)
    arg = 2.0 * (0.75 - x)
    return smoothstep(arg, order) * (-2.0) ** order


def eta_tilde(x, order: int = 0):
    """Polynomial step: eta~(x) = int_x^1 t^3 (1-t)^3 dt / Beta(4,4).

    Evaluated through the antiderivative in y = 1 - x so eta~(1) = 0 exactly;
    extended constantly outside [0, 1] (the density is supported there).
    """
    x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    if order == 0:
        y = 1.0 - x
        g = y ** 4 / 4.0 - 0.6 * y ** 5 + y ** 6 / 2.0 - y ** 7 / 7.0
        return g / BETA44
    # d/dx eta~ = -x^3 (1-x)^3 / B(4,4); higher orders differentiate that
    u = x
    if order == 1:
        core = -(u ** 3) * (1 - u) ** 3
    elif order == 2:
        core = -(3 * u ** 2 * (1 - u) ** 3 - 3 * u ** 3 * (1 - u) ** 2)
    elif order == 3:
        core = -(6 * u * (1 - u) ** 3 - 18 * u ** 2 * (1 - u) ** 2
                 + 6 * u ** 3 * (1 - u))
    elif order == 4:
        core = -(6 * (1 - u) ** 3 - 54 * u * (1 - u) ** 2
                 + 54 * u ** 2 * (1 - u) - 6 * u ** 3)
    else:
        raise ValueError("order must be 0..4")
    return core / BETA44


@dataclass(frozen=True)
class CutoffStats:
    """Measured extremes of the cutoff pair used by the construction."""

    eta_bar: float          # max over orders 0..3 of sup |eta^{(i)}|
    eta_0: float            # min(eta(1/2), 1 - eta(1/2))
    eta_bar4: float         # same including order 4, for smooth-join fits
    slope_min: float        # most negative eta' on the transition
    grid_points: int

    @property
    def ratio(self) -> float:
        return self.eta_bar / self.eta_0


@lru_cache(maxsize=1)
def measure_cutoff(grid_points: int = 20001) -> CutoffStats:
    """Sample eta and its derivatives on a fine grid.

    Also verifies the construction constraints: eta' in (-4, 0) strictly
    inside the transition, eta(1/2) = 1/2.
    """
    x = np.linspace(0.0, 1.0, grid_points)
    sups = [float(np.max(np.abs(eta(x, i)))) for i in range(5)]
    half = float(eta(np.array([0.5]))[0])
    eta_0 = min(half, 1.0 - half)
    inner = x[(x > 0.25) & (x < 0.75)]
    d1 = eta(inner, 1)
    slope_min = float(np.min(d1))
    # strictness below double resolution cannot be certified: near the
    # transition edges eta' underflows to 0 up to rounding noise
    if slope_min <= -4.0 or np.max(d1) > 64 * np.finfo(float).eps:
        raise ValueError("eta' must stay inside (-4, 0]")
    if not math.isclose(half, 0.5, abs_tol=1e-12):
        raise ValueError("eta(1/2) must equal 1/2")
    return CutoffStats(eta_bar=max(sups[:4]), eta_0=eta_0,
                       eta_bar4=max(sups), slope_min=slope_min,
                       grid_points=grid_points)


def w_weight(coef: float, x):
    """w(x) = coef * eta~(x) - (x + 1) * eta~'(x); nonnegative on [0, 1]."""
    x = np.asarray(x, dtype=float)
    return coef * eta_tilde(x) - (x + 1.0) * eta_tilde(x, 1)


def w_weight_argmax(coef: float) -> float:
    """The unique critical point of w in (0, 1), in closed form."""
    B = coef
    disc = B * B - 8.0 * B + 88.0
    return (3.0 * (4.0 - B) + math.sqrt(disc)) / (2.0 * (7.0 - B)) - 1.0
