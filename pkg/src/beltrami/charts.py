"""Orthogonal curvilinear charts on R^3.

Every chart works on arrays of Cartesian points with shape ``(..., 3)`` and
returns coordinates, coordinate gradients (rows are ``grad q_i``) and the
closed-form scale factors ``|grad q_i|``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.stats import qmc

from .errors import SingularPoint, UnsupportedChart

CLEARANCE = 1e-3


def _split(p):
    p = np.asarray(p, dtype=float)
    return p[..., 0], p[..., 1], p[..., 2]


class CoordinateChart:
    """Base class; subclasses supply the closed forms."""

    name: str = ""
    coord_names: tuple[str, str, str] = ("", "", "")
    excluded_set: str = "none"

    def forward(self, p):
        raise NotImplementedError

    def inverse(self, q):
        raise NotImplementedError

    def gradients(self, p):
        raise NotImplementedError

    def scale_factors(self, p):
        raise NotImplementedError

    def cleared(self, p, margin=CLEARANCE):
        p = np.asarray(p, dtype=float)
        return np.ones(p.shape[:-1], dtype=bool)

    def coords_cleared(self, q, margin=CLEARANCE):
        """Clearance predicate stated on chart coordinates."""
        return self.cleared(self.inverse(q), margin)

    def bounds_clear(self, lo, hi, margin=CLEARANCE):
        """Whether a Cartesian box stays away from the excluded set."""
        return True

    def index(self, name: str) -> int:
        try:
            return self.coord_names.index(name)
        except ValueError:
            raise KeyError(f"{self.name} has no coordinate {name!r}") from None

    def jacobian(self, p, ordering: Sequence[str] | None = None):
        """``grad q_a . (grad q_b x grad q_c)`` for the given ordering."""
        g = self.gradients(p)
        a, b, c = (self.index(n) for n in (ordering or self.coord_names))
        return np.einsum("...i,...i->...", g[..., a, :],
                         np.cross(g[..., b, :], g[..., c, :]))

    def __repr__(self):
        return f"<chart {self.name} {self.coord_names}>"


class Cartesian(CoordinateChart):
    name = "cartesian"
    coord_names = ("x", "y", "z")

    def forward(self, p):
        return np.array(p, dtype=float, copy=True)

    def inverse(self, q):
        return np.array(q, dtype=float, copy=True)

    def gradients(self, p):
        p = np.asarray(p, dtype=float)
        return np.broadcast_to(np.eye(3), p.shape[:-1] + (3, 3)).copy()

    def scale_factors(self, p):
        p = np.asarray(p, dtype=float)
        return np.ones(p.shape)


def _xy_rect_distance(lo, hi):
    """Distance from the z-axis to the xy-projection of a box."""
    dx = max(lo[0], 0.0, -hi[0])
    dy = max(lo[1], 0.0, -hi[1])
    return float(np.hypot(dx, dy))


class Cylindrical(CoordinateChart):
    name = "cylindrical"
    coord_names = ("r", "phi", "z")
    excluded_set = "the axis r = 0"

    def forward(self, p):
        x, y, z = _split(p)
        return np.stack([np.hypot(x, y), np.arctan2(y, x), z], axis=-1)

    def inverse(self, q):
        r, phi, z = _split(q)
        return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=-1)

    def gradients(self, p):
        x, y, z = _split(p)
        r2 = x * x + y * y
        r = np.sqrt(r2)
        zero = np.zeros_like(x)
        one = np.ones_like(x)
        return np.stack([
            np.stack([x / r, y / r, zero], axis=-1),
            np.stack([-y / r2, x / r2, zero], axis=-1),
            np.stack([zero, zero, one], axis=-1),
        ], axis=-2)

    def scale_factors(self, p):
        x, y, _ = _split(p)
        r = np.hypot(x, y)
        return np.stack([np.ones_like(r), 1.0 / r, np.ones_like(r)], axis=-1)

    def cleared(self, p, margin=CLEARANCE):
        x, y, _ = _split(p)
        return np.hypot(x, y) >= margin

    def coords_cleared(self, q, margin=CLEARANCE):
        return np.asarray(q, dtype=float)[..., 0] >= margin

    def bounds_clear(self, lo, hi, margin=CLEARANCE):
        return _xy_rect_distance(lo, hi) >= margin


class Spherical(CoordinateChart):
    name = "spherical"
    coord_names = ("R", "vartheta", "phi")
    excluded_set = "the polar axis sin(vartheta) = 0, including R = 0"

    def forward(self, p):
        x, y, z = _split(p)
        rho = np.hypot(x, y)
        return np.stack([np.sqrt(rho * rho + z * z), np.arctan2(rho, z),
                         np.arctan2(y, x)], axis=-1)

    def inverse(self, q):
        R, th, phi = _split(q)
        s = np.sin(th)
        return np.stack([R * s * np.cos(phi), R * s * np.sin(phi),
                         R * np.cos(th)], axis=-1)

    def gradients(self, p):
        x, y, z = _split(p)
        rho2 = x * x + y * y
        rho = np.sqrt(rho2)
        R2 = rho2 + z * z
        R = np.sqrt(R2)
        zero = np.zeros_like(x)
        return np.stack([
            np.stack([x / R, y / R, z / R], axis=-1),
            np.stack([x * z / (rho * R2), y * z / (rho * R2), -rho / R2], axis=-1),
            np.stack([-y / rho2, x / rho2, zero], axis=-1),
        ], axis=-2)

    def scale_factors(self, p):
        R, th, _ = _split(self.forward(p))
        return np.stack([np.ones_like(R), 1.0 / R, 1.0 / (R * np.sin(th))], axis=-1)

    def cleared(self, p, margin=CLEARANCE):
        return self.coords_cleared(self.forward(p), margin)

    def coords_cleared(self, q, margin=CLEARANCE):
        q = np.asarray(q, dtype=float)
        R, th = q[..., 0], q[..., 1]
        return (R >= margin) & (th >= margin) & (th <= np.pi - margin)

    def bounds_clear(self, lo, hi, margin=CLEARANCE):
        return _xy_rect_distance(lo, hi) >= margin


class Toroidal(CoordinateChart):
    """(tau, eta, phi) about the unit circle r = 1, z = 0.

    The sign of r - 1 splits the chart into an outer (r > 1) and an inner
    (r < 1) branch.  The native ordering is left-handed: its Jacobian is
    negative on both branches, (tau, phi, eta) is the positive ordering.
    """

    coord_names = ("tau", "eta", "phi")

    def __init__(self, branch: str = "outer"):
        if branch not in ("outer", "inner"):
            raise ValueError(branch)
        self.branch = branch
        self.sign = 1.0 if branch == "outer" else -1.0
        self.name = "toroidal" if branch == "outer" else "toroidal-inner"
        self.excluded_set = ("the circle tau = 0, the cylinder r = 1 and the axis r = 0")

    def forward(self, p):
        x, y, z = _split(p)
        r = np.hypot(x, y)
        return np.stack([np.hypot(1.0 - r, z), z / (r - 1.0), np.arctan2(y, x)], axis=-1)

    def inverse(self, q):
        tau, eta, phi = _split(q)
        d = self.sign * tau / np.sqrt(1.0 + eta * eta)
        r = 1.0 + d
        return np.stack([r * np.cos(phi), r * np.sin(phi), eta * d], axis=-1)

    def gradients(self, p):
        x, y, z = _split(p)
        r2 = x * x + y * y
        r = np.sqrt(r2)
        er = np.stack([x / r, y / r, np.zeros_like(x)], axis=-1)
        ez = np.stack([np.zeros_like(x), np.zeros_like(x), np.ones_like(x)], axis=-1)
        ephi = np.stack([-y / r, x / r, np.zeros_like(x)], axis=-1)
        d = r - 1.0
        tau = np.hypot(d, z)
        g_tau = (d / tau)[..., None] * er + (z / tau)[..., None] * ez
        g_eta = (1.0 / d)[..., None] * ez - (z / d**2)[..., None] * er
        g_phi = (1.0 / r)[..., None] * ephi
        return np.stack([g_tau, g_eta, g_phi], axis=-2)

    def scale_factors(self, p):
        tau, eta, _ = _split(self.forward(p))
        s = np.sqrt(1.0 + eta * eta)
        return np.stack([np.ones_like(tau), (1.0 + eta * eta) / tau,
                         1.0 / (1.0 + self.sign * tau / s)], axis=-1)

    def cleared(self, p, margin=CLEARANCE):
        x, y, z = _split(p)
        r = np.hypot(x, y)
        side = self.sign * (r - 1.0)
        return (side >= margin) & (r >= margin) & (np.hypot(r - 1.0, z) >= margin)


CHARTS: dict[str, CoordinateChart] = {
    c.name: c for c in (Cartesian(), Cylindrical(), Spherical(),
                        Toroidal("outer"), Toroidal("inner"))
}


def get_chart(name: str) -> CoordinateChart:
    try:
        return CHARTS[name]
    except KeyError:
        raise UnsupportedChart(f"unknown chart {name!r}") from None


def evaluate_chart(chart: CoordinateChart, p, margin=CLEARANCE):
    """Chart coordinates of ``p``; raises SingularPoint inside the excluded set."""
    p = np.asarray(p, dtype=float)
    if not np.all(chart.cleared(p, margin)):
        raise SingularPoint(f"point inside the excluded set of {chart.name}: "
                            f"{chart.excluded_set}")
    return chart.forward(p)


def scale_factors_at(chart: CoordinateChart, p, margin=CLEARANCE):
    p = np.asarray(p, dtype=float)
    if not np.all(chart.cleared(p, margin)):
        raise SingularPoint(f"point inside the excluded set of {chart.name}")
    return chart.scale_factors(p)


@dataclass(frozen=True)
class HypothesisResult:
    passes: bool
    max_violation: float
    n_samples: int


def check_theorem1_hypothesis(chart: CoordinateChart, ordering: Sequence[str],
                              sample_region, n_samples: int = 256,
                              tol: float = 1e-8, h: float = 1e-4,
                              seed: int = 0) -> HypothesisResult:
    """Test the metric condition for harmonic orthogonal coordinates.

    With ordering ``(zeta, beta, gamma)`` the four quantities

        d_beta(|grad zeta| / |grad beta|),  d_gamma(|grad zeta| / |grad beta|),
        d_zeta |grad gamma|,               d_beta |grad gamma|

    are differentiated by central differences in the chart's own coordinates
    at ``n_samples`` low-discrepancy points of ``sample_region`` (bounds per
    native coordinate).  The check passes iff the largest absolute value is
    below ``tol``.
    """
    iz, ib, ig = (chart.index(n) for n in ordering)
    lo, hi = np.asarray(sample_region, dtype=float).T
    u = qmc.Halton(d=3, scramble=True, seed=seed).random(n_samples)
    q = lo + u * (hi - lo)

    def ratio(qq):
        s = chart.scale_factors(chart.inverse(qq))
        return s[..., iz] / s[..., ib]

    def gamma_scale(qq):
        return chart.scale_factors(chart.inverse(qq))[..., ig]

    def d(f, k):
        e = np.zeros(3)
        e[k] = h
        return (f(q + e) - f(q - e)) / (2 * h)

    v = np.stack([d(ratio, ib), d(ratio, ig), d(gamma_scale, iz), d(gamma_scale, ib)])
    worst = float(np.max(np.abs(v)))
    return HypothesisResult(bool(worst < tol), worst, n_samples)


@dataclass(frozen=True)
class AlphaReparam:
    """Monotone coordinate alpha(zeta) with d alpha / d zeta = |grad beta| / |grad zeta|."""

    alpha_of_zeta: Callable
    dalpha_dzeta: Callable
    formula: str


def _log_tan_half(t):
    return np.log(np.sin(t) / (1.0 + np.cos(t)))


_IDENTITY = AlphaReparam(lambda t: np.asarray(t, dtype=float),
                         lambda t: np.ones_like(np.asarray(t, dtype=float)), "alpha = zeta")

_ALPHA = {
    ("cylindrical", ("r", "phi", "z")): AlphaReparam(
        np.log, lambda r: 1.0 / np.asarray(r, dtype=float), "alpha = log r"),
    ("spherical", ("vartheta", "phi", "R")): AlphaReparam(
        _log_tan_half, lambda t: 1.0 / np.sin(t),
        "alpha = log(sin(vartheta) / (1 + cos(vartheta)))"),
}


def alpha_reparam(chart: CoordinateChart, ordering: Sequence[str]) -> AlphaReparam:
    """Closed-form alpha for a catalogued (chart, ordering); integration constant 0."""
    ordering = tuple(ordering)
    if chart.name == "cartesian" and sorted(ordering) == ["x", "y", "z"]:
        return _IDENTITY
    try:
        return _ALPHA[(chart.name, ordering)]
    except KeyError:
        raise UnsupportedChart(
            f"no closed-form alpha for {chart.name} ordering {ordering}") from None


# orderings for which alpha_reparam has a closed form
CATALOG_ORDERINGS = {
    "cartesian": ("x", "y", "z"),
    "cylindrical": ("r", "phi", "z"),
    "spherical": ("vartheta", "phi", "R"),
}
