import math

import numpy as np
import pytest

from fraclayer.kernels import (KernelSpec, fractional_kernel,
                               perturbed_kernel, symbol_constant)


def test_validation():
    with pytest.raises(ValueError):
        KernelSpec(s=1.2)
    with pytest.raises(ValueError):
        KernelSpec(s=0.5, lam=2.0, Lam=1.0)
    with pytest.raises(ValueError):
        KernelSpec(s=0.5, form="tabulated-perturbation")


def test_symmetry_and_ellipticity():
    zs = np.concatenate([np.geomspace(1e-6, 1e6, 200),
                         -np.geomspace(1e-6, 1e6, 200)])
    for kern in (fractional_kernel(0.3),
                 perturbed_kernel(0.7, 0.5, 2.0, wobble=0.9)):
        assert kern.symmetry_slack(zs) == 0.0
        assert kern.ellipticity_slack(zs) <= 1e-12


def test_interval_integral_fractional():
    kern = fractional_kernel(0.25)
    a, b = 0.5, 7.0
    # antiderivative of z^(-1.5) is -2 z^(-0.5)
    exact = 2.0 * (a ** -0.5 - b ** -0.5)
    assert kern.interval_integral(a, b) == pytest.approx(exact, rel=1e-14)
    assert kern.tail_integral(a) == pytest.approx(2.0 * a ** -0.5, rel=1e-14)


def test_interval_integral_perturbed_brackets():
    kern = perturbed_kernel(0.5, 0.5, 2.0)
    frac = fractional_kernel(0.5)
    v = kern.interval_integral(1.0, 10.0)
    base = frac.interval_integral(1.0, 10.0)
    assert 0.5 * base <= v <= 2.0 * base
    t = kern.tail_integral(3.0)
    assert 0.5 * frac.tail_integral(3.0) <= t <= 2.0 * frac.tail_integral(3.0)


def test_second_moment():
    kern = fractional_kernel(0.5)
    assert kern.second_moment_integral(0.1) == pytest.approx(0.1, rel=1e-14)


def test_symbol_constant_closed_form():
    import mpmath

    for s in (0.25, 0.5, 0.75):
        got = symbol_constant(s)
        with mpmath.workdps(30):
            a = 2 * mpmath.mpf(s)
            ref = mpmath.pi / 2 if abs(a - 1) < 1e-14 else \
                -mpmath.gamma(-a) * mpmath.cos(mpmath.pi * a / 2)
            ref = float(2 * ref)
        assert got == pytest.approx(ref, rel=1e-10)
