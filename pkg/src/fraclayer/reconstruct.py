"""Reconstruct the potential from the layer profile and verify its shape.

With g(t) = L u~(t) and h(r) = g(u~^{-1}(r)), the potential
V(r) = integral_{-1}^r h makes the profile an exact critical point. The table
nodes are graded dyadically toward the wells so the second-derivative
envelopes can be fit over many decades of 1 -/+ r.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .analysis import DecayFit, envelope_exponents, fit_power_decay
from .construction import LayerProfile
from .errors import OutOfRange
from .kernels import KernelSpec, fractional_kernel
from .profiles import PowerTail, ProfileFn
from .quadrature import QuadConfig, eval_lk


def profile_as_fn(prof: LayerProfile, order_cap: int = 4) -> ProfileFn:
    """Wrap the assembled profile for the quadrature, with a fitted tail."""
    cx = prof.cx

    def fn(x):
        return prof.eval(x, 0)

    derivs = tuple((lambda m: (lambda x: prof.eval(x, m)))(m)
                   for m in range(1, order_cap + 1))
    # tail model: straight-line fit of ln(gap) against ln(x) over the window
    # where truncated-quadrature probes live
    L_lo = math.log(cx.a0) + 2.0
    L_hi = min(150.0, 0.8 * prof._edges[-1])
    tails = []
    for side in (+1, -1):
        Ls = np.linspace(L_lo, max(L_hi, L_lo + 5.0), 60)
        lg = prof.gap_logm(side, Ls)
        slope, intercept = np.polyfit(Ls, lg, 1)
        tails.append((-slope, math.exp(intercept)))
    (p_r, c_r), (p_l, c_l) = tails
    return ProfileFn(
        fn=fn, derivs=derivs, limits=(-1.0, 1.0),
        tail=PowerTail(p_left=p_l, c_left=c_l, p_right=p_r, c_right=-c_r),
        features=((0.0, 2.0 * cx.a0),),
        name="layer-profile",
    )


def invert_profile(prof: LayerProfile, r: float, tol: float = 1e-12,
                   max_log: float = 690.0) -> float:
    """x with u~(x) = r, by bisection in asinh(x) plus derivative polish."""
    if not -1.0 < r < 1.0:
        raise OutOfRange("r must be strictly inside (-1, 1)")
    lo, hi = -max_log, max_log

    def val(t):
        return float(prof.eval(np.array([math.sinh(t)]))[0]) - r

    if val(lo) > 0 or val(hi) < 0:
        raise OutOfRange(f"r={r} beyond values attained on the working domain")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if val(mid) <= 0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-14 * max(1.0, abs(lo) + abs(hi)):
            break
    x = math.sinh(0.5 * (lo + hi))
    for _ in range(8):
        f = float(prof.eval(np.array([x]))[0]) - r
        d = float(prof.eval(np.array([x]), 1)[0])
        if d <= 0:
            break
        step = f / d
        if abs(step) > 0.1 * (1.0 + abs(x)):
            break
        x -= step
        if abs(f) < tol * max(1.0, abs(r)):
            break
    return x


def graded_nodes(depth_decades: float = 12.0, per_decade: int = 12,
                 n_mid: int = 201) -> np.ndarray:
    """r-nodes: uniform middle plus geometric ladders toward both wells.

    The ladder in 1 -/+ r starts at 1/4 and shrinks by 10^(1/per_decade) per
    step, giving per_decade points per decade for the envelope fits.
    """
    j_max = int(depth_decades * per_decade)
    gaps = 0.25 * 10.0 ** (-np.arange(0, j_max + 1) / per_decade)
    mid = np.linspace(-0.75, 0.75, n_mid)   # abuts the ladder start exactly
    right = 1.0 - gaps[gaps > 1e-300]
    left = -right
    nodes = np.unique(np.concatenate([mid, right, left]))
    return nodes[(nodes > -1.0) & (nodes < 1.0)]


@dataclass
class PotentialTable:
    """Graded samples of the reconstructed potential and two derivatives."""

    r: np.ndarray
    x: np.ndarray
    V: np.ndarray
    V1: np.ndarray           # h(r) = V'(r)
    V2: np.ndarray           # divided differences of V1
    provenance: dict = field(default_factory=dict)

    def interior_min(self) -> float:
        return float(np.min(self.V))

    def closure_defect(self) -> float:
        """|V(+1) extrapolant| relative to max V (equal-depth identity)."""
        return abs(float(self.V[-1] + self._right_end_correction())) \
            / float(np.max(self.V))

    def _right_end_correction(self) -> float:
        # h ~ -c (1-r)^(p) near +1: integrate the fitted power model
        r = self.r
        h = self.V1
        m = r > 1.0 - 1e-5
        if np.count_nonzero(m) < 6 or np.any(h[m] >= 0):
            return 0.0
        fit = fit_power_decay(np.column_stack([1.0 - r[m], -h[m]]),
                              min_decades=0.5)
        p = -fit.exponent          # h ~ -C (1-r)^(-(-p))
        C = math.exp(fit.log_const)
        gap = 1.0 - r[-1]
        return -C * gap ** (1.0 + p) / (1.0 + p) if p > -1.0 else 0.0

    def to_csv(self, path) -> None:
        import csv as _csv
        with open(path, "w", newline="") as fh:
            w = _csv.writer(fh)
            w.writerow(["r", "V", "V1", "V2"])
            for i in range(len(self.r)):
                w.writerow([f"{v:.17g}" for v in
                            (self.r[i], self.V[i], self.V1[i], self.V2[i])])


def reconstruct_potential(prof: LayerProfile, kernel: KernelSpec,
                          depth_decades: float = 10.0,
                          per_decade: int = 12,
                          cfg: QuadConfig | None = None,
                          progress: bool = False) -> PotentialTable:
    """Build the table: invert nodes, evaluate the operator, integrate.

    The left-end contribution to V on (-1, r_min] comes from the fitted
    power model of h rather than truncation, keeping the equal-depth closure
    honest.
    """
    u = profile_as_fn(prof)
    cfg = cfg or QuadConfig(tol=1e-5, panels_per_decade=5, nodes_per_panel=10)
    r = graded_nodes(depth_decades, per_decade)
    x = np.array([invert_profile(prof, float(ri)) for ri in r])
    h = np.empty_like(r)
    for i, xi in enumerate(x):
        h[i] = eval_lk(kernel, u, float(xi), cfg).value
    # V by trapezoid from the left end, plus the fitted model below r_min
    V = np.concatenate([[0.0], np.cumsum(0.5 * (h[1:] + h[:-1]) * np.diff(r))])
    m = r < -1.0 + 1e-5
    left_corr = 0.0
    if np.count_nonzero(m) >= 6 and np.all(h[m] > 0):
        fit = fit_power_decay(np.column_stack([1.0 + r[m], h[m]]),
                              min_decades=0.5)
        p = -fit.exponent
        C = math.exp(fit.log_const)
        gap = 1.0 + r[0]
        if p > -1.0:
            left_corr = C * gap ** (1.0 + p) / (1.0 + p)
    V = V + left_corr
    # V'' = h' by centered three-point divided differences on the
    # nonuniform nodes
    V2 = np.empty_like(r)
    dm = np.diff(r)[:-1]       # r_i - r_{i-1}
    dp = np.diff(r)[1:]        # r_{i+1} - r_i
    V2[1:-1] = (h[2:] * dm ** 2 - h[:-2] * dp ** 2
                + h[1:-1] * (dp ** 2 - dm ** 2)) / (dp * dm * (dp + dm))
    V2[0] = V2[1]
    V2[-1] = V2[-2]
    return PotentialTable(
        r=r, x=x, V=V, V1=h, V2=V2,
        provenance={"params": vars(prof.cx.params), "rho": prof.cx.rho,
                    "kernel_s": kernel.s})


@dataclass
class RegularityReport:
    lipschitz_estimate: float
    end_trend_right: list
    end_trend_left: list
    passed: bool


def verify_potential_regularity(tab: PotentialTable,
                                n_end: int = 5,
                                n_fit: int = 12) -> RegularityReport:
    """Third-derivative proxies must decay toward both wells.

    The proxy is the divided difference of V2, which carries the designed
    log-periodic wobble, so the decay is asserted through the slope of
    ln(proxy) against ln(well gap) over the last n_fit nodes per side. The
    (finite) Lipschitz-constant estimate of V2 is stated, not asserted.
    """
    r, V2 = tab.r, tab.V2
    dV2 = np.abs(np.diff(V2) / np.diff(r))
    lip = float(np.nanmax(dV2[np.isfinite(dV2)]))

    def trend(gap, proxy):
        good = proxy > 0
        if np.count_nonzero(good) < 6:
            return 0.0
        slope = np.polyfit(np.log(gap[good]), np.log(proxy[good]), 1)[0]
        return float(slope)

    gap_r = 1.0 - 0.5 * (r[:-1] + r[1:])
    gap_l = 1.0 + 0.5 * (r[:-1] + r[1:])
    right_slope = trend(gap_r[-n_fit:], dV2[-n_fit:])
    left_slope = trend(gap_l[:n_fit], dV2[:n_fit])
    return RegularityReport(
        lipschitz_estimate=lip,
        end_trend_right=[float(v) for v in dV2[-n_end - 1:-1]],
        end_trend_left=[float(v) for v in dV2[1:n_end + 1]],
        passed=right_slope > 0.2 and left_slope > 0.2 and math.isfinite(lip))


@dataclass
class EnvelopeReport:
    side: str
    lower_exponent: float
    upper_exponent: float
    target: tuple[float, float]
    tol: float
    passed: bool


def verify_well_envelopes(tab: PotentialTable, params,
                          tol: float = 0.3) -> list[EnvelopeReport]:
    """Fitted envelope exponents of V'' against the well powers.

    Right well: V'' oscillates between (1-r)^(gamma-2) (lower envelope) and
    (1-r)^(delta-2) (upper); left well mirrored with (alpha, beta).
    """
    out = []
    for side in ("right", "left"):
        if side == "right":
            m = (tab.r > 1.0 - 0.05) & (tab.V2 > 0)
            gap = 1.0 - tab.r[m]
            lo_t, hi_t = params.gamma - 2.0, params.delta - 2.0
        else:
            m = (tab.r < -1.0 + 0.05) & (tab.V2 > 0)
            gap = 1.0 + tab.r[m]
            lo_t, hi_t = params.alpha - 2.0, params.beta - 2.0
        v = tab.V2[m]
        # in the variable w = 1/gap the curvature decays like w^-(power-2)
        samples = np.column_stack([1.0 / gap, np.log(v)])
        lo_fit = envelope_exponents(samples, "lower", log_values=True)
        hi_fit = envelope_exponents(samples, "upper", log_values=True)
        lower_exp = lo_fit.exponent
        upper_exp = hi_fit.exponent
        passed = (abs(lower_exp - lo_t) <= tol and abs(upper_exp - hi_t) <= tol)
        out.append(EnvelopeReport(side=side, lower_exponent=lower_exp,
                                  upper_exponent=upper_exp,
                                  target=(lo_t, hi_t), tol=tol,
                                  passed=passed))
    return out


@dataclass
class CurvatureLimitReport:
    side: int
    xs: list[float]
    scaled: list[float]
    estimate: float
    target: float
    rel_error: float
    passed: bool


def second_derivative_limit(prof: LayerProfile, kernel: KernelSpec, xs,
                            rel_tol: float = 0.10) -> list[CurvatureLimitReport]:
    """|x|^(2+2s) L u~'' -> -/+ 2 (1 + 2s) as x -> +/- inf.

    The total slope mass is 2; the limit constant is the mass times
    (1 + 2s), with the sign opposite to the side.
    """
    u = profile_as_fn(prof)
    base = u.derivative_profile().derivative_profile()
    cfg = QuadConfig(tol=1e-6, panels_per_decade=6, nodes_per_panel=12)
    out = []
    for side in (+1, -1):
        pts = sorted(side * abs(np.asarray(xs, dtype=float)))
        scaled = []
        for x in pts:
            ov = eval_lk(kernel, base, float(x), cfg)
            scaled.append(abs(x) ** (2.0 + 2.0 * kernel.s) * ov.value)
        target = -side * 2.0 * (1.0 + 2.0 * kernel.s)
        # fit a + b |x|^(-e) with the rate scanned over a grid
        X = np.abs(np.asarray(pts, dtype=float))
        Y = np.asarray(scaled)
        best = None
        for e in np.linspace(0.05, 1.0, 39):
            M = np.column_stack([np.ones_like(X), X ** (-e)])
            coef, res, *_ = np.linalg.lstsq(M, Y, rcond=None)
            sse = float(np.sum((M @ coef - Y) ** 2))
            if best is None or sse < best[0]:
                best = (sse, float(coef[0]))
        est = best[1]
        rel = abs(est - target) / abs(target)
        out.append(CurvatureLimitReport(
            side=side, xs=[float(p) for p in pts], scaled=scaled,
            estimate=est, target=target, rel_error=rel,
            passed=rel <= rel_tol))
    return out


def slope_mass(prof: LayerProfile, X: float = 1e20,
               n_panels: int = 2000) -> float:
    """Quadrature of u~' over [-X, X] plus the exact gap tails (should be 2).

    The tails int_{|y|>X} u~' equal the gaps 1 -/+ u~(+/-X), read off the
    profile in log form; the quadrature over [-X, X] is the nontrivial part.
    """
    from numpy.polynomial.legendre import leggauss

    t, w = leggauss(12)
    # symmetric log panels away from the bridge plus linear panels inside
    a0 = prof.cx.a0
    edges_out = np.geomspace(a0, X, n_panels // 2 + 1)
    edges_in = np.linspace(0.0, a0, n_panels // 4 + 1)
    total = 0.0
    for sgn in (+1.0, -1.0):
        for edges in (edges_in, edges_out):
            a_, b_ = edges[:-1], edges[1:]
            mid, half = 0.5 * (a_ + b_), 0.5 * (b_ - a_)
            y = sgn * (mid[:, None] + half[:, None] * t)
            vals = prof.eval(y.ravel(), 1).reshape(len(a_), 12)
            total += float(np.sum(vals @ w * half))
    LX = np.array([math.log(X)])
    total += math.exp(prof.gap_logm(+1, LX)[0])
    total += math.exp(prof.gap_logm(-1, LX)[0])
    return total
