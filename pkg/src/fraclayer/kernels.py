"""Interaction kernels: symmetric, elliptically bounded perturbations of |z|^(-1-2s).

A kernel K is admissible when K(z) = K(-z) and
lam * |z|^(-1-2s) <= K(z) <= Lam * |z|^(-1-2s) for z != 0.
The slow-oscillation hypothesis on K (a limsup over dilation sequences) has no
finite certificate; it is recorded here as documentation only and never tested.
The pure power kernel satisfies it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
from numpy.polynomial.legendre import leggauss

FORMS = ("fractional", "scaled-fractional", "tabulated-perturbation")


@dataclass(frozen=True)
class KernelSpec:
    """Kernel of order s with ellipticity bounds lam <= Lam.

    forms:
      fractional              K(z) = |z|^(-1-2s)
      scaled-fractional       K(z) = c * |z|^(-1-2s),  lam <= c <= Lam
      tabulated-perturbation  K(z) = m(z) * |z|^(-1-2s), measurable even
                              multiplier m with values in [lam, Lam]
    """

    s: float
    lam: float = 1.0
    Lam: float = 1.0
    form: str = "fractional"
    scale: float = 1.0
    multiplier: Callable[[np.ndarray], np.ndarray] | None = field(
        default=None, compare=False)

    def __post_init__(self):
        if not 0.0 < self.s < 1.0:
            raise ValueError(f"s must be in (0,1), got {self.s}")
        if not 0.0 < self.lam <= self.Lam:
            raise ValueError("need 0 < lam <= Lam")
        if self.form not in FORMS:
            raise ValueError(f"unknown kernel form {self.form!r}")
        if self.form == "fractional" and not (self.lam <= 1.0 <= self.Lam):
            raise ValueError("fractional form needs lam <= 1 <= Lam")
        if self.form == "scaled-fractional" and not (
                self.lam <= self.scale <= self.Lam):
            raise ValueError("scaled-fractional needs lam <= scale <= Lam")
        if self.form == "tabulated-perturbation" and self.multiplier is None:
            raise ValueError("tabulated-perturbation needs a multiplier")

    # -- pointwise -----------------------------------------------------------

    def _mult(self, z: np.ndarray) -> np.ndarray:
        if self.form == "fractional":
            return np.ones_like(z)
        if self.form == "scaled-fractional":
            return np.full_like(z, self.scale)
        m = self.multiplier(np.abs(z))
        return np.asarray(m, dtype=float)

    def k(self, z):
        """K(z), vectorized; +inf at z = 0."""
        z = np.asarray(z, dtype=float)
        az = np.abs(z)
        with np.errstate(divide="ignore"):
            base = az ** (-1.0 - 2.0 * self.s)
        return self._mult(z) * base

    # -- exact/semi-exact integrals ------------------------------------------

    def interval_integral(self, a, b):
        """integral of K over [a, b] with 0 < a < b (vectorized in a, b)."""
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        if np.any(a <= 0) or np.any(b < a):
            raise ValueError("need 0 < a <= b")
        if self.form in ("fractional", "scaled-fractional"):
            c = 1.0 if self.form == "fractional" else self.scale
            p = 2.0 * self.s
            return c * (a ** (-p) - b ** (-p)) / p
        nodes, wts = _gauss_cache(24)
        # log substitution keeps the power factor mild on wide intervals
        la, lb = np.log(a), np.log(b)
        mid = 0.5 * (la + lb)
        half = 0.5 * (lb - la)
        t = mid[..., None] + half[..., None] * nodes
        z = np.exp(t)
        vals = self.k(z) * z  # dy = z dt
        return np.sum(vals * wts, axis=-1) * half

    def tail_integral(self, a):
        """integral of K over [a, +inf) for a > 0."""
        a = np.asarray(a, dtype=float)
        if np.any(a <= 0):
            raise ValueError("need a > 0")
        p = 2.0 * self.s
        if self.form in ("fractional", "scaled-fractional"):
            c = 1.0 if self.form == "fractional" else self.scale
            return c * a ** (-p) / p
        # bounded multiplier: integrate m against the power over [a, 32a],
        # then bound-free exact continuation using the multiplier at infinity
        # is unavailable; fall back to panels until the remainder is tiny.
        total = np.zeros_like(a)
        lo = a.copy()
        for _ in range(40):
            hi = lo * 4.0
            total = total + self.interval_integral(lo, hi)
            lo = hi
            if np.all(self.Lam * lo ** (-p) / p < 1e-18 * (1.0 + total)):
                break
        return total + self._mult(lo) * lo ** (-p) / p

    def second_moment_integral(self, r0):
        """integral of z^2 K(z) over [0, r0]; the singular-cell weight."""
        r0 = float(r0)
        if r0 <= 0:
            raise ValueError("need r0 > 0")
        p = 2.0 - 2.0 * self.s
        if self.form in ("fractional", "scaled-fractional"):
            c = 1.0 if self.form == "fractional" else self.scale
            return c * r0 ** p / p
        nodes, wts = _gauss_cache(24)
        # z = r0 * u^(1/p) removes the z^(1-2s) endpoint behavior
        u = 0.5 * (nodes + 1.0)
        z = r0 * u ** (1.0 / p)
        vals = self._mult(z) * (r0 ** p / p)
        return float(np.sum(vals * wts) * 0.5)

    def symmetry_slack(self, zs) -> float:
        """max |K(z) - K(-z)| over the sample; 0 for admissible kernels."""
        zs = np.asarray(zs, dtype=float)
        return float(np.max(np.abs(self.k(zs) - self.k(-zs)), initial=0.0))

    def ellipticity_slack(self, zs) -> float:
        """Worst signed violation of the two-sided power bounds (<=0 passes)."""
        zs = np.asarray(zs, dtype=float)
        zs = zs[zs != 0]
        base = np.abs(zs) ** (-1.0 - 2.0 * self.s)
        kv = self.k(zs)
        lo = np.max(self.lam * base - kv, initial=-np.inf)
        hi = np.max(kv - self.Lam * base, initial=-np.inf)
        return float(max(lo, hi))


@lru_cache(maxsize=None)
def _gauss_cache(n: int):
    nodes, wts = leggauss(n)
    return nodes, wts


@lru_cache(maxsize=None)
def symbol_constant(s: float) -> float:
    """C(s) = 2 * integral_0^inf (1 - cos v) v^(-1-2s) dv.

    With this package's convention L u(x) = (1/2) int (u(x+z)+u(x-z)-2u(x))
    |z|^(-1-2s) dz, plane waves satisfy L cos(w.)(x) = -C(s) w^(2s) cos(wx).
    Computed once by high-precision quadrature.
    """
    import mpmath

    with mpmath.workdps(40):
        two_s = mpmath.mpf(2) * mpmath.mpf(s)

        def integrand(v):
            return (1 - mpmath.cos(v)) / v ** (1 + two_s)

        head = mpmath.quad(integrand, [0, 1, mpmath.pi, 10 * mpmath.pi])
        # beyond 10*pi, split off the exact power part and treat the cosine
        # part as an oscillatory quadrature
        a = 10 * mpmath.pi
        tail_const = a ** (-two_s) / two_s
        tail_osc = mpmath.quadosc(
            lambda v: mpmath.cos(v) / v ** (1 + two_s),
            [a, mpmath.inf], period=2 * mpmath.pi)
        val = 2 * (head + tail_const - tail_osc)
        return float(val)


def fractional_kernel(s: float, lam: float = 1.0, Lam: float = 1.0) -> KernelSpec:
    """The pure power kernel |z|^(-1-2s)."""
    return KernelSpec(s=s, lam=min(lam, 1.0), Lam=max(Lam, 1.0), form="fractional")


def perturbed_kernel(s: float, lam: float, Lam: float,
                     wobble: float = 0.5) -> KernelSpec:
    """A tabulated-perturbation kernel with a smooth even multiplier.

    m(z) = mid + amp*wobble*cos(log|z|) stays inside [lam, Lam] for
    wobble in [0, 1].
    """
    if not 0.0 <= wobble <= 1.0:
        raise ValueError("wobble in [0,1]")
    mid = 0.5 * (lam + Lam)
    amp = 0.5 * (Lam - lam) * wobble

    def m(az: np.ndarray) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return mid + amp * np.cos(np.log(az))

    return KernelSpec(s=s, lam=lam, Lam=Lam, form="tabulated-perturbation",
                      multiplier=m)
