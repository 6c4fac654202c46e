import numpy as np
import pytest

from fraclayer.errors import GridTooCoarse
from fraclayer.gridop import (ExteriorModel, GridOperator, GridProfile,
                              eval_lk_grid, lag_weights)
from fraclayer.kernels import fractional_kernel, perturbed_kernel


def _grid(n=64, L=8.0, values=None, rng=None):
    x = np.linspace(-L, L, n)
    if values is None:
        values = np.tanh(x)
    return GridProfile(x, values, ExteriorModel(-1.0), ExteriorModel(1.0))


def test_constant_grid_is_zero(kernel_half):
    g = _grid(values=np.full(64, 0.25),)
    g = GridProfile(g.x, np.full(64, 0.25), ExteriorModel(0.25),
                    ExteriorModel(0.25))
    vals, errs = eval_lk_grid(kernel_half, g, check_coarse=False)
    assert np.max(np.abs(vals)) < 1e-12


def test_odd_profile_center_zero(kernel_half):
    n = 65
    x = np.linspace(-8, 8, n)
    g = GridProfile(x, np.tanh(x), ExteriorModel(-1.0), ExteriorModel(1.0))
    vals, errs = eval_lk_grid(kernel_half, g)
    assert abs(vals[n // 2]) < 1e-12


def test_matches_double_sum_oracle(kernel_half, rng):
    n = 64
    x = np.linspace(-4, 4, n)
    u = np.clip(np.tanh(x) + 0.05 * rng.standard_normal(n), -1, 1)
    g = GridProfile(x, u, ExteriorModel(-1.0), ExteriorModel(1.0))
    vals, errs = eval_lk_grid(kernel_half, g, check_coarse=False)
    h = g.h
    kmid = kernel_half.k(np.arange(1, n) * h) * h
    op = GridOperator(kernel_half, g)
    for i in range(1, n - 1):
        acc = 0.0
        for j in range(n):
            if j != i:
                acc += (u[j] - u[i]) * kmid[abs(j - i) - 1]
        acc += (-1.0 - u[i]) * op.wl[i] + (1.0 - u[i]) * op.wr[i]
        assert abs(vals[i] - acc) <= errs[i] + 1e-12, i


def test_exterior_power_correction_direction(kernel_half):
    x = np.linspace(-8, 8, 64)
    base = GridProfile(x, np.tanh(x), ExteriorModel(-1.0), ExteriorModel(1.0))
    uplift = GridProfile(x, np.tanh(x), ExteriorModel(-1.0, 0.5, 1.0),
                         ExteriorModel(1.0, -0.5, 1.0))
    v0, _ = eval_lk_grid(kernel_half, base, check_coarse=False)
    v1, _ = eval_lk_grid(kernel_half, uplift, check_coarse=False)
    # lifted left exterior and lowered right exterior pull values down at the
    # right edge and up at the left edge
    assert v1[0] > v0[0]
    assert v1[-1] < v0[-1]


def test_grid_too_coarse():
    kern = fractional_kernel(0.9)
    x = np.linspace(-1, 1, 16)
    u = 0.9 * (-1.0) ** np.arange(16)     # pure curvature at the grid scale
    g = GridProfile(x, u, ExteriorModel(0.0), ExteriorModel(0.0))
    with pytest.raises(GridTooCoarse):
        eval_lk_grid(kern, g)


def test_lag_weights_match_interval(kernel_half):
    w = lag_weights(kernel_half, 0.5, 5)
    for l in range(1, 5):
        ref = kernel_half.interval_integral(l * 0.5 - 0.25, l * 0.5 + 0.25)
        assert w[l - 1] == pytest.approx(float(ref), rel=1e-13)


def test_perturbed_kernel_grid():
    kern = perturbed_kernel(0.5, 0.7, 1.3)
    g = _grid(n=48)
    vals, errs = eval_lk_grid(kern, g, check_coarse=False)
    assert np.all(np.isfinite(vals))
