"""Degenerate, possibly oscillatory double-well potentials with wells at -1, +1.

Both modes pin the second derivative near the wells and recover W', W by
integrating twice from the well with zero data:

  pure-power    W''(t) = c1 (1+t)^(alpha-2)   near -1   (alpha = beta forced)
                W''(t) = c3 (1-t)^(gamma-2)   near +1   (gamma = delta forced)

  oscillatory   W''(t) = (1+t)^(p(t)-2),  p(t) = (a+b)/2 + (a-b)/2 sin(ln(1+t))
                and mirrored with (gamma, delta) near +1.

In oscillatory mode beta <= p(t) <= alpha, and since 0 < 1+t < 1 the two-sided
power envelope holds with unit constants. The middle region is a degree-5
bridge matching value and two derivatives at both junctions, verified positive
by dense sampling plus a Bernstein-coefficient certificate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import BridgeNotPositive, DegenerateOscillation, SampleOutsideWell


@dataclass(frozen=True)
class WellParams:
    alpha: float
    beta: float
    gamma: float
    delta: float
    c1: float = 1.0
    c2: float = 1.0
    c3: float = 1.0
    c4: float = 1.0
    mu: float = 0.5
    mode: str = "pure-power"

    def __post_init__(self):
        if not (self.alpha >= self.beta >= 2 and self.gamma >= self.delta >= 2):
            raise ValueError("need alpha >= beta >= 2 and gamma >= delta >= 2")
        if not (0 < self.c1 <= self.c2 and 0 < self.c3 <= self.c4):
            raise ValueError("need 0 < c1 <= c2 and 0 < c3 <= c4")
        if not 0 < self.mu < 1:
            raise ValueError("mu must be in (0, 1)")
        if self.mode not in ("pure-power", "oscillatory"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == "pure-power":
            if self.alpha != self.beta or self.gamma != self.delta:
                raise ValueError("pure-power mode forces alpha=beta, gamma=delta")
        else:
            if self.beta <= 2 or self.delta <= 2:
                raise DegenerateOscillation(
                    "oscillatory mode needs beta > 2 and delta > 2")
            if not all(c == 1.0 for c in (self.c1, self.c2, self.c3, self.c4)):
                raise ValueError("oscillatory mode realizes unit constants")

    def in_optimal_regime(self) -> bool:
        return max(self.alpha - self.beta, self.gamma - self.delta) < 1.0

    def config_dict(self) -> dict:
        return {"mode": self.mode, "alpha": self.alpha, "beta": self.beta,
                "gamma": self.gamma, "delta": self.delta, "c1": self.c1,
                "c2": self.c2, "c3": self.c3, "c4": self.c4, "mu": self.mu}


class _LogAxisCumulative:
    """Cumulative integral of f(e^y) e^y dy on a fixed panel ladder.

    Panels are narrow enough (<= 0.5 in y) to resolve the log-periodic
    oscillation of the well exponents.
    """

    def __init__(self, f: Callable, y_min: float, y_max: float,
                 decay: float, width: float = 0.4, nodes: int = 16):
        self.f = f
        self.decay = decay
        n = max(4, int(math.ceil((y_max - y_min) / width)))
        self.edges = np.linspace(y_min, y_max, n + 1)
        t, w = leggauss(nodes)
        self._t, self._w = t, w
        a, b = self.edges[:-1], self.edges[1:]
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        y = mid[:, None] + half[:, None] * t
        vals = (f(np.exp(y)) * np.exp(y)) @ w * half
        self.cum = np.concatenate([[0.0], np.cumsum(vals)])
        # mass below the ladder, bounded by the pure-power envelope
        self.below = math.exp(y_min * decay) / decay

    def __call__(self, u):
        """integral of f over (0, u], vectorized (any shape)."""
        u_in = np.atleast_1d(np.asarray(u, dtype=float))
        shape = u_in.shape
        u = u_in.ravel()
        y = np.full_like(u, -np.inf)
        np.log(u, out=y, where=u > 0)
        y = np.minimum(y, self.edges[-1])
        yc = np.clip(y, self.edges[0], self.edges[-1])
        j = np.clip(np.searchsorted(self.edges, yc) - 1, 0, len(self.edges) - 2)
        lo = self.edges[j]
        out = self.below + self.cum[j]
        half = 0.5 * (yc - lo)
        mid = 0.5 * (yc + lo)
        yy = mid[:, None] + half[:, None] * self._t
        part = (self.f(np.exp(yy)) * np.exp(yy)) @ self._w * half
        out = out + np.where(yc > lo, part, 0.0)
        # below the ladder: pure-power envelope approximation (negligible mass)
        under = y < self.edges[0]
        if np.any(under):
            out[under] = np.exp(y[under] * self.decay) / self.decay
        out[u <= 0] = 0.0
        return out.reshape(shape)


def _well_side(exp_hi: float, exp_lo: float, c: float, mode: str, mu: float):
    """W'', W', W as functions of the distance-to-well u in (0, mu].

    exp_hi >= exp_lo are the envelope exponents (alpha >= beta, or
    gamma >= delta); c is the pure-power constant.
    """
    if mode == "pure-power":
        a = exp_hi

        def d2(u):
            return c * u ** (a - 2.0)

        def d1(u):
            return c * u ** (a - 1.0) / (a - 1.0)

        def d0(u):
            return c * u ** a / (a * (a - 1.0))

        return d2, d1, d0

    m = 0.5 * (exp_hi + exp_lo)
    amp = 0.5 * (exp_hi - exp_lo)

    def d2(u):
        u = np.asarray(u, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            p = m + amp * np.sin(np.log(u))
            out = u ** (p - 2.0)
        return np.where(u > 0, out, 0.0)

    y_max = math.log(mu)
    floor = y_max + math.log(1e-12)
    J1 = _LogAxisCumulative(d2, floor - 45.0 / (exp_lo - 1.0), y_max,
                            decay=exp_lo - 1.0)
    J2 = _LogAxisCumulative(lambda u: J1(u), floor - 45.0 / exp_lo, y_max,
                            decay=exp_lo)
    return d2, J1, J2


def _bernstein_nonneg(coeffs: np.ndarray, depth: int = 10) -> bool:
    """Certify p(u) >= 0 on [0, 1] from monomial coefficients (low first)."""
    n = len(coeffs) - 1
    from math import comb
    B = np.array([sum(coeffs[j] * comb(k, j) / comb(n, j) for j in range(k + 1))
                  for k in range(n + 1)])
    if np.all(B >= 0):
        return True
    if depth == 0:
        return False
    # subdivide into p(u/2) and p(1/2 + u/2)
    pows = 0.5 ** np.arange(n + 1)
    left = coeffs * pows
    q = np.zeros(n + 1)
    for j, cj in enumerate(coeffs):
        for i in range(j + 1):
            q[i] += cj * comb(j, i) * 0.5 ** (j - i)
    right = q * pows
    return (_bernstein_nonneg(left, depth - 1)
            and _bernstein_nonneg(right, depth - 1))


@dataclass
class PotentialFn:
    """Double-well potential with wells pinned at -1 and +1."""

    params: WellParams
    W: Callable
    W1: Callable
    W2: Callable
    bridge_certificate: str = "sampled"

    def __call__(self, t):
        return self.W(t)

    def max_w2(self, n: int = 4001) -> float:
        t = np.linspace(-1.0, 1.0, n)
        return float(np.max(np.abs(self.W2(t))))

    def holder_spotcheck_w2(self, n: int = 400) -> dict:
        """Divided-difference Hölder estimate of W'' near each well (report only)."""
        p = self.params
        theta = min(min(p.beta, p.delta) - 2.0, 1.0)
        out = {}
        for side, mu in (("left", p.mu), ("right", p.mu)):
            d = np.geomspace(1e-8, mu / 4, n)
            if side == "left":
                t1, t2 = -1.0 + d, -1.0 + 2 * d
            else:
                t1, t2 = 1.0 - 2 * d, 1.0 - d
            num = np.abs(self.W2(t2) - self.W2(t1))
            den = np.abs(t2 - t1) ** theta if theta > 0 else np.ones_like(d)
            ratio = num / den if theta > 0 else num
            out[side] = float(np.max(ratio))
        out["theta"] = theta
        return out


def make_potential(params: WellParams) -> PotentialFn:
    """Assemble W from the well data and a positive degree-5 middle bridge."""
    p = params
    mu = p.mu
    l2, l1, l0 = _well_side(p.alpha, p.beta, p.c1, p.mode, mu)
    r2, r1, r0fn = _well_side(p.gamma, p.delta, p.c3, p.mode, mu)

    a, b = -1.0 + mu, 1.0 - mu
    # junction data: left side in u = 1+t at u=mu, right side in v = 1-t
    mu_arr = np.array([mu])
    Wa, W1a, W2a = (float(f(mu_arr)[0]) for f in (l0, l1, l2))
    Wb, W2b = float(r0fn(mu_arr)[0]), float(r2(mu_arr)[0])
    W1b = -float(r1(mu_arr)[0])

    bridge, certificate = _solve_bridge(a, b, (Wa, W1a, W2a), (Wb, W1b, W2b))
    dbridge = bridge.deriv()
    d2bridge = dbridge.deriv()

    def evaluate(t, order: int):
        scalar = np.ndim(t) == 0
        t = np.atleast_1d(np.asarray(t, dtype=float))
        t = np.clip(t, -1.0, 1.0)
        out = np.empty_like(t)
        left = t <= a
        right = t >= b
        mid = ~(left | right)
        lv = (l0, l1, l2)[order](1.0 + t[left])
        rv = (r0fn, r1, r2)[order](1.0 - t[right])
        out[left] = lv
        out[right] = -rv if order == 1 else rv
        poly = (bridge, dbridge, d2bridge)[order]
        out[mid] = poly(t[mid])
        return float(out[0]) if scalar else out

    pot = PotentialFn(
        params=p,
        W=lambda t: evaluate(t, 0),
        W1=lambda t: evaluate(t, 1),
        W2=lambda t: evaluate(t, 2),
        bridge_certificate=certificate,
    )
    return pot


def _solve_bridge(a: float, b: float, left_data, right_data):
    """Degree-5 two-point Hermite bridge, raised once if it dips <= 0."""
    from numpy.polynomial import Polynomial

    def hermite(extra_mid: float | None):
        # monomial basis in the centered variable xi = (2t - (a+b)) / (b-a)
        n = 5 if extra_mid is None else 6
        M = []
        rhs = []
        scale = 2.0 / (b - a)
        for t0, data in ((a, left_data), (b, right_data)):
            xi = (2 * t0 - (a + b)) / (b - a)
            for order, val in enumerate(data):
                row = np.zeros(n + 1)
                for j in range(order, n + 1):
                    c = math.perm(j, order) * xi ** (j - order)
                    row[j] = c * scale ** order
                M.append(row)
                rhs.append(val)
        if extra_mid is not None:
            row = np.zeros(n + 1)
            row[0] = 1.0
            M.append(row)
            rhs.append(extra_mid)
        coef = np.linalg.solve(np.array(M), np.array(rhs)) if n + 1 == len(M) \
            else np.linalg.lstsq(np.array(M), np.array(rhs), rcond=None)[0]
        poly = Polynomial(coef, domain=[a, b], window=[-1, 1])
        return poly, coef

    poly, coef = hermite(None)
    ts = np.linspace(a, b, 10001)
    vals = poly(ts)
    certificate = "sampled"
    if np.all(vals > 0) and _bernstein_nonneg(_to_unit_monomial(coef)):
        certificate = "bernstein"
    if np.min(vals) <= 0:
        target = max(left_data[0], right_data[0])
        poly, coef = hermite(target)
        vals = poly(ts)
        if np.min(vals) <= 0:
            raise BridgeNotPositive("middle bridge not positive after raise")
        certificate = "sampled+raised"
    return poly, certificate


def _to_unit_monomial(coef_window: np.ndarray) -> np.ndarray:
    """Map coefficients in the window variable xi in [-1,1] to u in [0,1]."""
    from numpy.polynomial import polynomial as P
    # xi = 2u - 1
    out = np.zeros_like(coef_window)
    for j, cj in enumerate(coef_window):
        sub = np.zeros(j + 1)
        for i in range(j + 1):
            sub[i] = math.comb(j, i) * (2.0) ** i * (-1.0) ** (j - i)
        out[:j + 1] += cj * sub
    return out


@dataclass
class WellBoundsReport:
    side: str
    n: int
    passed: bool
    worst_slack: float
    worst_pair: tuple[float, float]


def check_well_increment_bounds(pot: PotentialFn, samples) -> list[WellBoundsReport]:
    """Two-sided integrated bounds on W(t)-W(r) and W'(t)-W'(r) in the wells.

    Each sample is an (r, t) pair with r <= t, both inside one well interval.
    """
    p = pot.params
    mu = p.mu
    reports = []
    left_pairs, right_pairs = [], []
    for (r, t) in samples:
        if r > t:
            r, t = t, r
        if -1.0 <= r <= t <= -1.0 + mu:
            left_pairs.append((r, t))
        elif 1.0 - mu <= r <= t <= 1.0:
            right_pairs.append((r, t))
        else:
            raise SampleOutsideWell(f"pair ({r}, {t}) not inside a well interval")

    if left_pairs:
        arr = np.array(left_pairs)
        r, t = arr[:, 0], arr[:, 1]
        dW = pot.W(t) - pot.W(r)
        dW1 = pot.W1(t) - pot.W1(r)
        al, be = p.alpha, p.beta
        lo0 = p.c1 / (al * (al - 1)) * ((1 + t) ** al - (1 + r) ** al)
        hi0 = p.c2 / (be * (be - 1)) * ((1 + t) ** be - (1 + r) ** be)
        lo1 = p.c1 / (al - 1) * ((1 + t) ** (al - 1) - (1 + r) ** (al - 1))
        hi1 = p.c2 / (be - 1) * ((1 + t) ** (be - 1) - (1 + r) ** (be - 1))
        slack = np.minimum(np.minimum(dW - lo0, hi0 - dW),
                           np.minimum(dW1 - lo1, hi1 - dW1))
        i = int(np.argmin(slack))
        reports.append(WellBoundsReport(
            side="left", n=len(r), passed=bool(slack[i] >= -1e-12),
            worst_slack=float(slack[i]), worst_pair=(float(r[i]), float(t[i]))))

    if right_pairs:
        arr = np.array(right_pairs)
        r, t = arr[:, 0], arr[:, 1]
        dW = pot.W(t) - pot.W(r)
        dW1 = pot.W1(t) - pot.W1(r)
        ga, de = p.gamma, p.delta
        # increments are negative near +1: integrating the envelope puts the
        # (c4, delta) expression below and the (c3, gamma) expression above
        lo0 = p.c4 / (de * (de - 1)) * ((1 - t) ** de - (1 - r) ** de)
        hi0 = p.c3 / (ga * (ga - 1)) * ((1 - t) ** ga - (1 - r) ** ga)
        lo1 = p.c3 / (ga - 1) * ((1 - r) ** (ga - 1) - (1 - t) ** (ga - 1))
        hi1 = p.c4 / (de - 1) * ((1 - r) ** (de - 1) - (1 - t) ** (de - 1))
        slack = np.minimum(np.minimum(dW - lo0, hi0 - dW),
                           np.minimum(dW1 - lo1, hi1 - dW1))
        i = int(np.argmin(slack))
        reports.append(WellBoundsReport(
            side="right", n=len(r), passed=bool(slack[i] >= -1e-12),
            worst_slack=float(slack[i]), worst_pair=(float(r[i]), float(t[i]))))
    return reports


def envelope_slack(pot: PotentialFn, n: int = 1000) -> float:
    """Worst signed violation of the two-sided W'' envelope (<= 0 passes)."""
    p = pot.params
    worst = -np.inf
    for side in ("left", "right"):
        d = np.geomspace(1e-10, p.mu, n)
        if side == "left":
            t = -1.0 + d
            lo = p.c1 * d ** (p.alpha - 2.0)
            hi = p.c2 * d ** (p.beta - 2.0)
        else:
            t = 1.0 - d
            lo = p.c3 * d ** (p.gamma - 2.0)
            hi = p.c4 * d ** (p.delta - 2.0)
        w2 = pot.W2(t)
        worst = max(worst, float(np.max(lo - w2)), float(np.max(w2 - hi)))
    return worst
