import numpy as np
import pytest

from fraclayer import verify_construction as vc


def _random_tuples(rng, n=30):
    out = []
    for _ in range(n):
        s = rng.uniform(0.1, 0.9)
        beta = rng.uniform(2.0, 6.0)
        delta = rng.uniform(2.0, 6.0)
        out.append((s, beta + rng.uniform(1e-3, 0.999), beta,
                    delta + rng.uniform(1e-3, 0.999), delta))
    return out


def test_inequality_sweep_passes(rng):
    recs = vc.inequality_sweep(_random_tuples(rng))
    assert recs and all(r.passed for r in recs)


def test_equality_cases_detected():
    recs = vc.equality_case_records()
    assert all(r.passed for r in recs)
    sr, _ = vc.exponent_ordering_slacks(0.5, 3.0, 3.0, 4.0, 4.0)
    assert abs(sr) < 1e-14          # gamma = delta
    sr, _ = vc.exponent_ordering_slacks(0.5, 3.0, 3.0, 3.5, 2.0)
    assert abs(sr) < 1e-14          # delta = 2
    sr, _ = vc.exponent_ordering_slacks(0.5, 3.0, 3.0, 4.0, 3.0)
    assert sr > 1e-6                # strict otherwise


def test_reduced_touchpoints(paper_constants):
    recs = vc.touchpoint_reduced_records(paper_constants)
    assert all(r.passed for r in recs)


def test_desk_touchpoints(desk_profile):
    recs = vc.touchpoint_desk_records(desk_profile)
    assert recs and all(r.passed for r in recs)


def test_profile_bounds(desk_profile):
    recs = vc.profile_bound_records(desk_profile, n=800)
    assert recs and all(r.passed for r in recs)


def test_second_third_derivative_bounds(desk_profile):
    recs = vc.second_derivative_bound_records(desk_profile, n=400)
    assert recs and all(r.passed for r in recs)


def test_fd_agreement(desk_profile):
    recs = vc.fd_agreement_records(desk_profile, n_pts=10)
    assert recs and all(r.passed for r in recs)


def test_highprec_oracle(desk_profile):
    recs = vc.highprec_agreement_records(desk_profile)
    assert recs and all(r.passed for r in recs)


def test_ordering_chain_desk_and_paper(desk_profile, paper_constants):
    assert all(r.passed for r in vc.ordering_chain_records(desk_profile.cx))
    assert all(r.passed for r in vc.ordering_chain_records(paper_constants))
