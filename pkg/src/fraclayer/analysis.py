"""Decay-rate fitting, envelope extraction, and finite-difference oracles."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np


@dataclass
class DecayFit:
    """Least-squares power law v ~ exp(log_const) * x^(-exponent)."""

    exponent: float
    log_const: float
    residual: float          # RMS residual in log-log coordinates
    window: tuple[float, float]
    n_points: int

    def __post_init__(self):
        if self.window[0] >= self.window[1]:
            raise ValueError("window must satisfy x_min < x_max")
        if self.n_points < 4:
            raise ValueError("need at least 4 points")
        if self.residual < 0:
            raise ValueError("residual must be >= 0")

    def predict(self, x):
        return np.exp(self.log_const) * np.asarray(x, float) ** (-self.exponent)


def fit_power_decay(samples: Sequence[tuple[float, float]] | np.ndarray,
                    log_values: bool = False,
                    min_decades: float = 1.0) -> DecayFit:
    """Fit (x, v) samples with v > 0, x > 0 by regression on (ln x, ln v).

    With log_values=True the second column is taken as ln v directly, which
    lets callers pass values far below the double underflow threshold.
    Requires >= 4 samples spanning at least min_decades decades in x
    (default one decade; truncated-grid tail fits pass a smaller span).
    """
    arr = np.asarray(samples, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("samples must be an (n, 2) array-like")
    x, v = arr[:, 0], arr[:, 1]
    if np.any(x <= 0):
        raise ValueError("x must be positive")
    if not log_values and np.any(v <= 0):
        raise ValueError("values must be positive")
    if len(x) < 4:
        raise ValueError("need at least 4 samples")
    lx = np.log(x)
    lv = v if log_values else np.log(v)
    if lx.max() - lx.min() < min_decades * np.log(10.0):
        raise ValueError(f"samples must span at least {min_decades} decades")
    A = np.column_stack([lx, np.ones_like(lx)])
    coef, *_ = np.linalg.lstsq(A, lv, rcond=None)
    resid = lv - A @ coef
    return DecayFit(exponent=-coef[0], log_const=coef[1],
                    residual=float(np.sqrt(np.mean(resid ** 2))),
                    window=(float(x.min()), float(x.max())),
                    n_points=len(x))


def envelope_exponents(samples, trend: str, window_decades: float = 0.5,
                       log_values: bool = False) -> DecayFit:
    """Power-law fit of the upper or lower envelope of oscillatory decay data.

    A pilot plain fit gives exponent p0; per sliding log-window extrema of
    v * x^p0 are extracted and the extremal subsequence refit. One fixed-point
    refinement of the pilot is applied (extrema locations barely move for
    small pilot error).
    """
    if trend not in ("upper", "lower"):
        raise ValueError("trend must be 'upper' or 'lower'")
    arr = np.asarray(samples, dtype=float)
    order = np.argsort(arr[:, 0])
    x = arr[order, 0]
    lv = arr[order, 1] if log_values else np.log(arr[order, 1])
    if len(x) < 16:
        raise ValueError("need log-dense samples (>= 16)")
    lx = np.log(x)
    span = lx.max() - lx.min()
    if span < np.log(10.0):
        raise ValueError("samples must span at least one decade")
    density = len(x) / (span / np.log(10.0))
    if density < 8:
        raise ValueError("need >= 8 samples per decade")

    pilot = fit_power_decay(np.column_stack([x, lv]), log_values=True)
    p0 = pilot.exponent
    for _ in range(2):
        sel = _window_extrema(lx, lv + p0 * lx, window_decades, trend)
        if len(sel) < 2:
            raise ValueError("fewer than 2 envelope extrema found")
        if len(sel) >= 4 and lx[sel].max() - lx[sel].min() >= np.log(10.0):
            fit = fit_power_decay(np.column_stack([x[sel], lv[sel]]),
                                  log_values=True)
        else:
            # few extrema: slope through first/last extremum
            slope = (lv[sel[-1]] - lv[sel[0]]) / (lx[sel[-1]] - lx[sel[0]])
            fit = DecayFit(exponent=-slope,
                           log_const=float(lv[sel[0]] + slope * (-lx[sel[0]])),
                           residual=0.0,
                           window=(float(x[sel[0]]), float(x[sel[-1]])),
                           n_points=max(4, len(sel)))
        p0 = fit.exponent
    return fit


def _window_extrema(lx, lw, window_decades, trend):
    """Indices of per-window extrema of lw over sliding log-windows."""
    width = window_decades * np.log(10.0)
    edges = np.arange(lx.min(), lx.max() + width, width)
    picks = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        mask = (lx >= lo) & (lx < hi)
        if not np.any(mask):
            continue
        idx = np.nonzero(mask)[0]
        j = idx[np.argmax(lw[idx])] if trend == "upper" else idx[np.argmin(lw[idx])]
        picks.append(j)
    picks = sorted(set(picks))
    if trend == "upper":
        keep = [j for j in picks if lw[j] >= np.max(lw) - 0.5 * np.ptp(lw)]
    else:
        keep = [j for j in picks if lw[j] <= np.min(lw) + 0.5 * np.ptp(lw)]
    return np.asarray(keep if len(keep) >= 2 else picks, dtype=int)


_STENCILS = {
    1: ({-1: -0.5, 1: 0.5}, 1),
    2: ({-1: 1.0, 0: -2.0, 1: 1.0}, 2),
    3: ({-2: -0.5, -1: 1.0, 1: -1.0, 2: 0.5}, 3),
    4: ({-2: 1.0, -1: -4.0, 0: 6.0, 1: -4.0, 2: 1.0}, 4),
}


def _central(f: Callable, x: float, order: int, h: float) -> float:
    stencil, p = _STENCILS[order]
    acc = 0.0
    for k, c in stencil.items():
        acc += c * f(x + k * h)
    return acc / h ** p


def fd_derivative(f: Callable, x: float, order: int, h0: float | None = None):
    """Central-difference derivative with two-level Richardson extrapolation.

    Returns (value, error_estimate). The estimate combines the difference of
    the two extrapolation levels (truncation) with the rounding floor of the
    finest stencil, so it bounds the true error on polynomials up to degree 6
    up to rounding.
    """
    if order not in _STENCILS:
        raise ValueError("order must be 1..4")
    if h0 is None:
        h0 = 1e-3 * (1.0 + abs(x))
    d1 = _central(f, x, order, h0)
    d2 = _central(f, x, order, h0 / 2.0)
    d3 = _central(f, x, order, h0 / 4.0)
    r1 = (4.0 * d2 - d1) / 3.0
    r2 = (4.0 * d3 - d2) / 3.0
    r = (16.0 * r2 - r1) / 15.0
    coeff_mass = sum(abs(c) for c in _STENCILS[order][0].values())
    floor = 8.0 * np.finfo(float).eps * coeff_mass * abs(float(f(x))) \
        / (h0 / 4.0) ** order
    return r, abs(r - r2) + floor + np.finfo(float).eps * abs(r)


@dataclass
class BoundReport:
    """Outcome of a pointwise sandwich check."""

    n: int
    passed: bool
    worst_slack: float       # most negative margin (>= 0 means all hold)
    worst_location: float

    def __bool__(self):
        return self.passed


def check_bounds(samples, lower=None, upper=None, rtol: float = 0.0) -> BoundReport:
    """Check lower(x) <= v <= upper(x) on (x, v) samples.

    Slack at a sample is min(v - lower, upper - v) (whichever bounds are
    given), optionally relaxed by rtol * |v|. At least one bound is required.
    """
    if lower is None and upper is None:
        raise ValueError("supply at least one bound")
    arr = np.asarray(samples, dtype=float)
    x, v = arr[:, 0], arr[:, 1]
    slack = np.full_like(v, np.inf)
    if lower is not None:
        lo = np.asarray(lower(x), dtype=float)
        slack = np.minimum(slack, v - lo + rtol * np.abs(v))
    if upper is not None:
        hi = np.asarray(upper(x), dtype=float)
        slack = np.minimum(slack, hi - v + rtol * np.abs(v))
    i = int(np.argmin(slack))
    return BoundReport(n=len(v), passed=bool(slack[i] >= 0),
                       worst_slack=float(slack[i]), worst_location=float(x[i]))
