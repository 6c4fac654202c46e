import numpy as np
import pytest

from fraclayer import profiles as pr
from fraclayer.errors import NonIntegrable, TruncationDominates
from fraclayer.kernels import fractional_kernel, perturbed_kernel, symbol_constant
from fraclayer.quadrature import (QuadConfig, check_derivative_commutation,
                                  check_holder_transfer, eval_lk)

CFG = QuadConfig(tol=1e-6)


def test_constant_is_annihilated(kernel_half):
    ov = eval_lk(kernel_half, pr.constant(0.7), 1.3, CFG)
    assert abs(ov.value) < 1e-12


def test_plane_wave_symbol():
    for s in (0.25, 0.5, 0.75):
        kern = fractional_kernel(s)
        C = symbol_constant(s)
        for om in (0.5, 2.0):
            u = pr.cosine(om)
            ov = eval_lk(kern, u, 0.4, CFG)
            ref = -C * om ** (2 * s) * np.cos(om * 0.4)
            assert ov.value == pytest.approx(ref, rel=1e-4)


def test_tanh_self_convergence(kernel_half):
    u = pr.tanh_profile()
    coarse = eval_lk(kernel_half, u, 3.0, QuadConfig(tol=1e-9))
    dense = eval_lk(kernel_half, u, 3.0,
                    QuadConfig(tol=1e-9, panels_per_decade=12,
                               nodes_per_panel=16))
    assert abs(coarse.value - dense.value) <= coarse.error


def test_brute_force_pv_sum(kernel_half):
    """Independent trapezoid principal-value sum at 10x density."""
    u = pr.tanh_profile()
    x = 3.0
    z = np.geomspace(1e-6, 1e7, 400000)
    mid = 0.5 * (z[1:] + z[:-1])
    w = np.diff(z)
    vals = (u(x + mid) + u(x - mid) - 2 * u(np.array(x))) * kernel_half.k(mid)
    brute = float(np.sum(vals * w)) - 2.0 * float(
        (1.0 + 1.0 - 2 * u(np.array(x)))) * 0.0
    # constant-limit tail beyond the last node
    brute += (1.0 + (-1.0) - 2 * float(u(np.array(x)))) \
        * kernel_half.tail_integral(z[-1])
    ov = eval_lk(kernel_half, u, x, QuadConfig(tol=1e-9))
    assert ov.value == pytest.approx(brute, abs=1e-6)


def test_linearity(kernel_half):
    a, b = 0.6, -1.7
    u, v = pr.gaussian(), pr.tanh_profile()
    x = 0.8
    lu = eval_lk(kernel_half, u, x, CFG)
    lv = eval_lk(kernel_half, v, x, CFG)
    lc = eval_lk(kernel_half, pr.combine(a, u, b, v), x,
                 QuadConfig(tol=1e-4))
    assert lc.value == pytest.approx(a * lu.value + b * lv.value,
                                     abs=3 * (abs(a) * lu.error
                                              + abs(b) * lv.error + lc.error
                                              + 1e-9))


def test_translation_equivariance(kernel_half):
    u = pr.gaussian()
    c = 1.3
    base = eval_lk(kernel_half, u, 0.4, CFG)
    shifted = eval_lk(kernel_half, u.shifted(c), 0.4 + c, CFG)
    assert shifted.value == pytest.approx(base.value, abs=1e-8)


def test_sign_at_maximum(kernel_half):
    ov = eval_lk(kernel_half, pr.gaussian(), 0.0, CFG)
    assert ov.value <= 1e-10


def test_non_integrable_raises():
    kern = fractional_kernel(0.75)   # 2s >= 1: Lipschitz data insufficient
    with pytest.raises(NonIntegrable):
        eval_lk(kern, pr.lipschitz_bump(), 0.2, CFG)


def test_truncation_dominates_raises():
    kern = fractional_kernel(0.25)
    u = pr.ProfileFn(fn=lambda x: np.tanh(x), derivs=(), limits=(-1.0, 1.0),
                     tail=None, name="bare")
    with pytest.raises(TruncationDominates):
        eval_lk(kern, u, 0.0, QuadConfig(tol=1e-9, Z=10.0))


def test_commutation_gaussian_low_order():
    kern = fractional_kernel(0.25)
    rep = check_derivative_commutation(kern, pr.gaussian(), [-1.0, 0.0, 2.0],
                                       h=1e-3, cfg=CFG)
    assert rep.passed
    assert max(rep.discrepancies) < 1e-4


def test_commutation_constant(kernel_half):
    rep = check_derivative_commutation(kernel_half, pr.constant(0.3),
                                       [0.0, 1.0], cfg=CFG)
    assert max(rep.discrepancies) < 1e-10


def test_commutation_plane_wave_high_order():
    kern = fractional_kernel(0.75)
    u = pr.cosine(1.0)
    rep = check_derivative_commutation(kern, u, [0.0, 0.5], h=1e-3, cfg=CFG)
    assert rep.passed
    # both sides equal the symbol derivative: C w^(2s+1) sin(w x)
    C = symbol_constant(0.75)
    du = u.derivative_profile()
    got = eval_lk(kern, du, 0.5, CFG).value
    ref = C * np.sin(0.5)
    assert got == pytest.approx(ref, rel=1e-4)


def test_holder_transfer_cap_and_preconditions():
    kern = fractional_kernel(0.25)
    u = pr.lipschitz_bump()
    rep = check_holder_transfer(kern, u, [(-0.5, 0.1), (0.0, 1.4)],
                                alpha=1.0, seminorm=1.0, cfg=CFG)
    assert rep.passed and all(np.isfinite(rep.ratios))
    with pytest.raises(ValueError):
        check_holder_transfer(kern, u, [(0.3, 0.3)], alpha=1.0, seminorm=1.0)
    const = pr.constant(0.2)
    rep2 = check_holder_transfer(kern, const, [(0.0, 1.0)], alpha=1.0,
                                 seminorm=1.0, cfg=CFG)
    assert max(rep2.ratios) < 1e-8


def test_perturbed_kernel_runs():
    kern = perturbed_kernel(0.5, 0.8, 1.2, wobble=0.7)
    ov = eval_lk(kern, pr.gaussian(), 0.3, QuadConfig(tol=1e-5))
    frac = eval_lk(fractional_kernel(0.5), pr.gaussian(), 0.3, CFG)
    assert np.isfinite(ov.value)
    # ellipticity ordering of the negative-definite value at the max
    ov0 = eval_lk(kern, pr.gaussian(), 0.0, QuadConfig(tol=1e-5))
    f0 = eval_lk(fractional_kernel(0.5), pr.gaussian(), 0.0, CFG)
    assert 0.8 * abs(f0.value) - 1e-4 <= abs(ov0.value) <= 1.2 * abs(f0.value) + 1e-4
