"""Harmonic-conjugate pairs on the reduced (alpha, beta) plane."""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable

import numpy as np
from scipy.stats import qmc

PAIR_CLEARANCE = 1e-2


def _never(a, b, margin=PAIR_CLEARANCE):
    return np.zeros(np.broadcast(np.asarray(a), np.asarray(b)).shape, dtype=bool)


@dataclass(frozen=True)
class ConjugatePair:
    """Closed-form pair (ell, psi) with exact first partials.

    ``orientation`` is the sign ``s`` in ``ell_a = s psi_b``, ``ell_b = -s psi_a``.
    Pairs with ``s = -1`` list the conjugate first; ``oriented()`` returns the
    equivalent pair with ``s = +1``.
    """

    name: str
    ell: Callable
    psi: Callable
    dell: Callable
    dpsi: Callable
    orientation: int = 1
    excluded: Callable = _never
    formula: str = ""

    def __call__(self, a, b):
        return self.ell(a, b), self.psi(a, b)

    def excluded_2d(self, a, b, margin=PAIR_CLEARANCE):
        return self.excluded(np.asarray(a, dtype=float), np.asarray(b, dtype=float), margin)

    def swapped(self) -> "ConjugatePair":
        return replace(self, name=self.name + "-swapped", ell=self.psi, psi=self.ell,
                       dell=self.dpsi, dpsi=self.dell, orientation=-self.orientation)

    def oriented(self) -> "ConjugatePair":
        return self if self.orientation > 0 else self.swapped()


def _linear():
    one = lambda a, b: np.ones(np.broadcast(a, b).shape)
    zero = lambda a, b: np.zeros(np.broadcast(a, b).shape)
    return ConjugatePair(
        "linear",
        ell=lambda a, b: a + 0.0 * b,
        psi=lambda a, b: b + 0.0 * a,
        dell=lambda a, b: (one(a, b), zero(a, b)),
        dpsi=lambda a, b: (zero(a, b), one(a, b)),
        formula="(alpha, beta)",
    )


def _exponential():
    return ConjugatePair(
        "exponential",
        ell=lambda a, b: -np.exp(a) * np.sin(b),
        psi=lambda a, b: np.exp(a) * np.cos(b),
        dell=lambda a, b: (-np.exp(a) * np.sin(b), -np.exp(a) * np.cos(b)),
        dpsi=lambda a, b: (np.exp(a) * np.cos(b), -np.exp(a) * np.sin(b)),
        formula="(-exp(alpha) sin(beta), exp(alpha) cos(beta))",
    )


def _trig_hyperbolic():
    return ConjugatePair(
        "trig-hyperbolic",
        ell=lambda a, b: np.sinh(a) * np.sin(b),
        psi=lambda a, b: np.cosh(a) * np.cos(b),
        dell=lambda a, b: (np.cosh(a) * np.sin(b), np.sinh(a) * np.cos(b)),
        dpsi=lambda a, b: (np.sinh(a) * np.cos(b), -np.cosh(a) * np.sin(b)),
        orientation=-1,
        formula="(sinh(alpha) sin(beta), cosh(alpha) cos(beta))",
    )


def _poisson_excluded(a, b, margin=PAIR_CLEARANCE):
    # singular where alpha = 0 and beta is a multiple of 2 pi
    bw = np.remainder(b + np.pi, 2 * np.pi) - np.pi
    return np.hypot(a, bw) < margin


def _poisson():
    def d(a, b):
        return np.cosh(a) - np.cos(b)

    def dell(a, b):
        D2 = d(a, b) ** 2
        return (-np.sin(b) * np.sinh(a) / D2, (np.cosh(a) * np.cos(b) - 1.0) / D2)

    def dpsi(a, b):
        D2 = d(a, b) ** 2
        return ((1.0 - np.cosh(a) * np.cos(b)) / D2, -np.sinh(a) * np.sin(b) / D2)

    return ConjugatePair(
        "poisson-kernel",
        ell=lambda a, b: np.sin(b) / d(a, b),
        psi=lambda a, b: np.sinh(a) / d(a, b),
        dell=dell,
        dpsi=dpsi,
        excluded=_poisson_excluded,
        formula="(sin(beta), sinh(alpha)) / (cosh(alpha) - cos(beta))",
    )


_CATALOG = {p.name: p for p in (_linear(), _exponential(), _trig_hyperbolic(), _poisson())}


def pair_catalog() -> list[ConjugatePair]:
    """The four catalogued families, in a fixed order."""
    return list(_CATALOG.values())


def get_pair(name: str) -> ConjugatePair:
    return _CATALOG[name]


def _samples(region, n, seed):
    lo, hi = np.asarray(region, dtype=float).T
    u = qmc.Halton(d=2, scramble=True, seed=seed).random(n)
    return lo + u * (hi - lo)


def cr_residual_analytic(pair: ConjugatePair, a, b):
    """Orientation-aware Cauchy-Riemann residual from the exact partials."""
    s = pair.orientation
    la, lb = pair.dell(a, b)
    pa, pb = pair.dpsi(a, b)
    return np.abs(la - s * pb) + np.abs(lb + s * pa)


def verify_cauchy_riemann(pair: ConjugatePair, region, h: float = 1e-4,
                          n: int = 256, seed: int = 0) -> float:
    """Max of ``|ell_a - s psi_b| + |ell_b + s psi_a|`` by central differences.

    ``s`` is the pair's orientation.  Sample points inside the pair's excluded
    set (with a stencil-sized allowance) are dropped.
    """
    ab = _samples(region, n, seed)
    a, b = ab[:, 0], ab[:, 1]
    keep = ~pair.excluded_2d(a, b, PAIR_CLEARANCE + 2 * h)
    a, b = a[keep], b[keep]
    if a.size == 0:
        return 0.0

    def dd(f):
        fa = (f(a + h, b) - f(a - h, b)) / (2 * h)
        fb = (f(a, b + h) - f(a, b - h)) / (2 * h)
        return fa, fb

    s = pair.orientation
    la, lb = dd(pair.ell)
    pa, pb = dd(pair.psi)
    res = np.abs(la - s * pb) + np.abs(lb + s * pa)
    return float(np.max(res))


def gradient_magnitude_gap(pair: ConjugatePair, a, b):
    """``|grad ell|^2 - |grad psi|^2`` in the (alpha, beta) plane, exact partials."""
    la, lb = pair.dell(a, b)
    pa, pb = pair.dpsi(a, b)
    return la**2 + lb**2 - pa**2 - pb**2


def laplacian_2d(f, a, b, h=1e-3):
    """Five-point Laplacian of ``f(a, b)``."""
    return (f(a + h, b) + f(a - h, b) + f(a, b + h) + f(a, b - h) - 4 * f(a, b)) / h**2
