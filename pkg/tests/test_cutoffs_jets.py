import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fraclayer.cutoffs import (BETA44, eta, eta_tilde, measure_cutoff,
                               w_weight, w_weight_argmax)
from fraclayer.jets import (FLOAT_OPS, LOG_OPS, Jet, LogArray, jet_const,
                            jet_exp, jet_log, jet_pow, jet_var)


def test_eta_plateaus_and_midpoint():
    x = np.array([0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0])
    v = eta(x)
    assert v[0] == 1.0 and v[2] == 1.0
    assert v[4] == 0.0 and v[-1] == 0.0
    assert v[3] == pytest.approx(0.5, abs=1e-14)
    for order in (1, 2, 3, 4):
        d = eta(np.array([0.25, 0.75]), order)
        assert np.all(d == 0.0)


def test_eta_slope_constraint():
    stats = measure_cutoff()
    assert -4.0 < stats.slope_min < 0.0
    assert stats.eta_0 == 0.5
    assert stats.eta_bar >= 1.0


def test_eta_tilde_endpoints_and_monotone():
    assert float(eta_tilde(np.array([1.0]))[0]) == 0.0
    assert float(eta_tilde(np.array([0.0]))[0]) == pytest.approx(1.0, abs=1e-12)
    x = np.linspace(0, 1, 1001)
    assert np.all(np.diff(eta_tilde(x)) < 0)
    # density matches the stated quartic Beta normalization
    assert BETA44 == pytest.approx(1.0 / 140.0)
    mid = float(eta_tilde(np.array([0.3]), 1)[0])
    assert mid == pytest.approx(-0.3 ** 3 * 0.7 ** 3 / BETA44, rel=1e-13)


def test_weight_function_properties():
    for coef in (0.2222, 0.5, 1.2):
        xb = w_weight_argmax(coef)
        assert 0.0 < xb < 1.0
        xs = np.linspace(0, 1, 20001)
        w = w_weight(coef, xs)
        assert np.min(w) >= -1e-15
        wmax = float(w_weight(coef, np.array([xb]))[0])
        assert wmax >= np.max(w) - 1e-10
        assert float(w_weight(coef, np.array([0.0]))[0]) == pytest.approx(
            coef, abs=1e-12)
        assert abs(float(w_weight(coef, np.array([1.0]))[0])) < 1e-15


@settings(max_examples=60, deadline=None)
@given(st.floats(-1e5, 1e5), st.floats(-1e5, 1e5))
def test_logarray_field_ops(a, b):
    la, lb = LogArray.from_float(a), LogArray.from_float(b)
    assert (la + lb).to_float() == pytest.approx(a + b, rel=1e-12, abs=1e-300)
    assert (la - lb).to_float() == pytest.approx(a - b, rel=1e-12, abs=1e-300)
    assert (la * lb).to_float() == pytest.approx(a * b, rel=1e-12, abs=1e-300)


def test_logarray_extreme_scales():
    big = LogArray.from_log(50000.0)
    small = LogArray.from_log(-50001.0)
    assert (big * small).to_float() == pytest.approx(math.exp(-1.0))
    z = LogArray.from_float(3.0) - LogArray.from_float(3.0)
    assert z.to_float() == 0.0 and z.sign == 0.0


def test_jet_product_rule():
    x = np.array([1.7])
    xj = jet_var(x)
    p = jet_pow(xj, 3.0, FLOAT_OPS) * jet_pow(xj, -1.0, FLOAT_OPS)
    # x^3 * x^-1 = x^2
    assert p[0][0] == pytest.approx(1.7 ** 2, rel=1e-12)
    assert p[1][0] == pytest.approx(2 * 1.7, rel=1e-12)
    assert p[2][0] == pytest.approx(2.0, rel=1e-10)
    assert abs(p[3][0]) < 1e-9


def test_jet_exp_log_inverse():
    x = np.array([2.5])
    lj = jet_log(jet_var(x), FLOAT_OPS)
    back = jet_exp(lj, FLOAT_OPS)
    assert back[0][0] == pytest.approx(2.5, rel=1e-14)
    assert back[1][0] == pytest.approx(1.0, rel=1e-12)
    for m in (2, 3, 4):
        assert abs(back[m][0]) < 1e-10


def test_jet_log_backend_matches_float():
    x0 = 3.7e8
    def build(xj, ops):
        L = jet_log(xj, ops)
        g = jet_pow(L, 0.95, ops) * (-0.25)
        return jet_exp(g, ops)
    jf = build(jet_var(np.array([x0])), FLOAT_OPS)
    jl = build(jet_var(LogArray.from_log(np.log(x0))), LOG_OPS)
    for m in range(5):
        assert float(jl[m].to_float()) == pytest.approx(float(jf[m][0]),
                                                        rel=1e-11)


def test_jet_high_precision_reference():
    import mpmath as mp

    A, lnb, zeta = 0.25, 10.0, 20.0
    x0 = 1e7
    with mp.workdps(40):
        f = lambda t: mp.e ** (-A * mp.mpf(lnb) ** (1 / mp.mpf(zeta))
                               * mp.log(t) ** (1 - 1 / mp.mpf(zeta)))
        refs = [float(mp.diff(f, mp.mpf(x0), m)) for m in range(5)]
    xj = jet_var(np.array([x0]))
    L = jet_log(xj, FLOAT_OPS)
    g = jet_pow(L, 1 - 1 / zeta, FLOAT_OPS) * (-A * lnb ** (1 / zeta))
    jet = jet_exp(g, FLOAT_OPS)
    for m in range(5):
        assert float(jet[m][0]) == pytest.approx(refs[m], rel=1e-10)
