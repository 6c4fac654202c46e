"""Evaluable profiles with derivative and far-field metadata.

A ProfileFn bundles what the nonlocal quadrature needs to know about a
function: pointwise values, analytic derivatives when available, the limits
at -inf/+inf, and a tail model describing how fast the limits are approached.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .errors import RegularityMismatch


@dataclass(frozen=True)
class PowerTail:
    """u(x) ~ limit + c * |x|^(-p) far out on each side (c signed, may be 0)."""

    p_left: float
    c_left: float
    p_right: float
    c_right: float


@dataclass(frozen=True)
class OscillatoryTail:
    """Bounded non-convergent far field with known mean and amplitude.

    Used for plane-wave style test profiles: beyond the truncation radius the
    profile is treated as mean + bounded oscillation on scale osc_scale.
    """

    mean: float
    amplitude: float
    osc_scale: float


@dataclass(frozen=True)
class ProfileFn:
    """u: R -> R with optional analytic derivatives up to order 4."""

    fn: Callable[[np.ndarray], np.ndarray]
    derivs: tuple = ()
    limits: tuple[float, float] | None = (-1.0, 1.0)
    tail: PowerTail | OscillatoryTail | None = None
    smoothness: str = "C^inf"
    locally_c2: bool = True
    features: tuple[tuple[float, float], ...] = ()   # (center, halfwidth)
    name: str = "profile"

    def __call__(self, x):
        return self.fn(np.asarray(x, dtype=float))

    def has_deriv(self, order: int) -> bool:
        return 1 <= order <= len(self.derivs)

    def deriv(self, order: int) -> Callable:
        if not self.has_deriv(order):
            raise RegularityMismatch(
                f"{self.name}: derivative of order {order} unavailable")
        return self.derivs[order - 1]

    def shifted(self, c: float) -> "ProfileFn":
        """x -> u(x - c), with features moved accordingly."""
        fn = self.fn
        new_derivs = tuple((lambda d: (lambda x: d(np.asarray(x) - c)))(d)
                           for d in self.derivs)
        return replace(
            self,
            fn=lambda x, _f=fn: _f(np.asarray(x) - c),
            derivs=new_derivs,
            features=tuple((a + c, w) for a, w in self.features),
            name=f"{self.name}-shifted",
        )

    def derivative_profile(self) -> "ProfileFn":
        """Profile for u' (drops one derivative order)."""
        if not self.has_deriv(1):
            raise RegularityMismatch(f"{self.name}: u' unavailable")
        tail = None
        if isinstance(self.tail, PowerTail):
            # d/dx [limit + c |x|^-p]: the sign flips on the right side only
            tail = PowerTail(self.tail.p_left + 1.0,
                             self.tail.c_left * self.tail.p_left,
                             self.tail.p_right + 1.0,
                             -self.tail.c_right * self.tail.p_right)
        elif isinstance(self.tail, OscillatoryTail):
            t = self.tail
            tail = OscillatoryTail(mean=0.0,
                                   amplitude=t.amplitude * 2 * np.pi / t.osc_scale,
                                   osc_scale=t.osc_scale)
        return ProfileFn(
            fn=self.derivs[0],
            derivs=self.derivs[1:],
            limits=(0.0, 0.0),
            tail=tail,
            smoothness=self.smoothness,
            features=self.features,
            name=f"{self.name}-d1",
        )


def combine(a: float, u: ProfileFn, b: float, v: ProfileFn) -> ProfileFn:
    """a*u + b*v with whatever derivatives both factors can supply."""
    nder = min(len(u.derivs), len(v.derivs))
    derivs = tuple(
        (lambda du, dv: (lambda x: a * du(x) + b * dv(x)))(u.derivs[i], v.derivs[i])
        for i in range(nder))
    lu = u.limits or (0.0, 0.0)
    lv = v.limits or (0.0, 0.0)
    limits = (a * lu[0] + b * lv[0], a * lu[1] + b * lv[1])
    return ProfileFn(
        fn=lambda x: a * u(x) + b * v(x),
        derivs=derivs,
        limits=limits,
        tail=None,
        features=u.features + v.features,
        name=f"{a}*{u.name}+{b}*{v.name}",
    )


def constant(c: float) -> ProfileFn:
    z = lambda x: np.zeros_like(np.asarray(x, dtype=float))
    return ProfileFn(
        fn=lambda x: np.full_like(np.asarray(x, dtype=float), c),
        derivs=(z, z, z, z),
        limits=(c, c),
        tail=PowerTail(1.0, 0.0, 1.0, 0.0),
        name=f"const({c})",
    )


def cosine(omega: float = 1.0) -> ProfileFn:
    w = float(omega)
    return ProfileFn(
        fn=lambda x: np.cos(w * x),
        derivs=(
            lambda x: -w * np.sin(w * x),
            lambda x: -w ** 2 * np.cos(w * x),
            lambda x: w ** 3 * np.sin(w * x),
            lambda x: w ** 4 * np.cos(w * x),
        ),
        limits=None,
        tail=OscillatoryTail(mean=0.0, amplitude=1.0, osc_scale=2 * np.pi / w),
        name=f"cos({w}x)",
    )


def sine(omega: float = 1.0) -> ProfileFn:
    w = float(omega)
    return ProfileFn(
        fn=lambda x: np.sin(w * x),
        derivs=(
            lambda x: w * np.cos(w * x),
            lambda x: -w ** 2 * np.sin(w * x),
            lambda x: -w ** 3 * np.cos(w * x),
            lambda x: w ** 4 * np.sin(w * x),
        ),
        limits=None,
        tail=OscillatoryTail(mean=0.0, amplitude=1.0, osc_scale=2 * np.pi / w),
        name=f"sin({w}x)",
    )


def tanh_profile(scale: float = 1.0) -> ProfileFn:
    a = float(scale)

    def f(x):
        return np.tanh(x / a)

    def d1(x):
        t = np.tanh(x / a)
        return (1 - t ** 2) / a

    def d2(x):
        t = np.tanh(x / a)
        return -2.0 / a ** 2 * t * (1 - t ** 2)

    def d3(x):
        t = np.tanh(x / a)
        return (1 - t ** 2) * (6 * t ** 2 - 2) / a ** 3

    def d4(x):
        t = np.tanh(x / a)
        return (1 - t ** 2) * (16 * t - 24 * t ** 3) / a ** 4

    # exponentially small tails: power model with zero coefficient
    return ProfileFn(
        fn=f, derivs=(d1, d2, d3, d4), limits=(-1.0, 1.0),
        tail=PowerTail(2.0, 0.0, 2.0, 0.0),
        features=((0.0, 4.0 * a),),
        name=f"tanh(x/{a})",
    )


def gaussian(width: float = 1.0) -> ProfileFn:
    a = float(width)

    def f(x):
        return np.exp(-(x / a) ** 2)

    def d1(x):
        return -2 * x / a ** 2 * f(x)

    def d2(x):
        return (4 * x ** 2 / a ** 4 - 2 / a ** 2) * f(x)

    def d3(x):
        return (12 * x / a ** 4 - 8 * x ** 3 / a ** 6) * f(x)

    def d4(x):
        return (16 * x ** 4 / a ** 8 - 48 * x ** 2 / a ** 6 + 12 / a ** 4) * f(x)

    return ProfileFn(
        fn=f, derivs=(d1, d2, d3, d4), limits=(0.0, 0.0),
        tail=PowerTail(3.0, 0.0, 3.0, 0.0),
        features=((0.0, 4.0 * a),),
        name=f"gauss({a})",
    )


def lipschitz_bump(width: float = 1.0) -> ProfileFn:
    """max(0, 1 - |x|/width): Lipschitz but not C^1; no derivative data."""
    a = float(width)
    return ProfileFn(
        fn=lambda x: np.maximum(0.0, 1.0 - np.abs(np.asarray(x, float)) / a),
        derivs=(),
        limits=(0.0, 0.0),
        tail=PowerTail(2.0, 0.0, 2.0, 0.0),
        smoothness="C^{0,1}",
        locally_c2=False,
        features=((0.0, 2.0 * a),),
        name="lip-bump",
    )


def power_tail_bump(sigma: float, tau: float, kappa: float = 1.0) -> ProfileFn:
    """(1 + (x/kappa)^2)^(-q(x)/2) with exact-order power tails.

    For sigma == tau this is smooth everywhere; the two-sided tails are
    c*|x|^-sigma on the left and c*|x|^-tau on the right with c = kappa^sigma.
    Only equal exponents are supported (the asymmetric case is assembled
    elsewhere from cutoffs).
    """
    if sigma != tau:
        raise ValueError("power_tail_bump needs sigma == tau")
    q = float(sigma)
    k = float(kappa)

    def f(x):
        return (1.0 + (x / k) ** 2) ** (-q / 2.0)

    def d1(x):
        return -q * x / k ** 2 * (1.0 + (x / k) ** 2) ** (-q / 2.0 - 1.0)

    def d2(x):
        u = 1.0 + (x / k) ** 2
        return (-q / k ** 2) * u ** (-q / 2.0 - 2.0) * (u - (q + 2.0) * (x / k) ** 2)

    return ProfileFn(
        fn=f, derivs=(d1, d2), limits=(0.0, 0.0),
        tail=PowerTail(q, k ** q, q, k ** q),
        features=((0.0, 4.0 * k),),
        name=f"power-bump({q})",
    )
