"""Method of characteristics for ``grad P . grad C = 0`` in the plane.

``C`` is constant along the integral curves of ``grad P``.  Each query point
is carried along ``+grad P`` and ``-grad P`` (unit speed, adaptive RK4 with
step doubling) until its curve meets the seed curve; ``C`` is the arc length
of the seed curve at the meeting point.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.spatial import cKDTree

from .errors import CriticalPoint, EscapedDomain


@dataclass(frozen=True)
class SeedCurve:
    """Parametrized curve ``t -> (x, y)`` for ``t`` in ``[t0, t1]``.

    ``origin`` is the parameter where arc length is zero (default ``t0``).
    """

    func: Callable
    t0: float
    t1: float
    origin: float | None = None
    n_poly: int = 4001

    def __call__(self, t):
        return np.asarray(self.func(np.asarray(t, dtype=float)), dtype=float)

    def tangent(self, t, h=1e-6):
        return (self(t + h) - self(t - h)) / (2 * h)


@dataclass(frozen=True)
class Grid2D:
    xlo: float
    xhi: float
    ylo: float
    yhi: float
    nx: int = 41
    ny: int = 41

    @property
    def x(self):
        return np.linspace(self.xlo, self.xhi, self.nx)

    @property
    def y(self):
        return np.linspace(self.ylo, self.yhi, self.ny)

    def nodes(self):
        X, Y = np.meshgrid(self.x, self.y)
        return np.stack([X, Y], axis=-1)


def _as_pressure(P):
    if isinstance(P, tuple):
        return P
    return P, P.grad


class _Seed:
    """Polyline proxy of the seed curve for side tests and initial guesses."""

    def __init__(self, curve: SeedCurve):
        self.curve = curve
        self.t = np.linspace(curve.t0, curve.t1, curve.n_poly)
        self.pts = curve(self.t)
        d = np.gradient(self.pts, self.t, axis=0)
        self.tan = d / np.linalg.norm(d, axis=-1, keepdims=True)
        self.tree = cKDTree(self.pts)
        self.seg = float(np.max(np.linalg.norm(np.diff(self.pts, axis=0), axis=-1)))
        speed = np.linalg.norm(curve.tangent(self.t), axis=-1)
        self.arclen = CubicSpline(self.t, speed).antiderivative()
        origin = curve.t0 if curve.origin is None else curve.origin
        self.s0 = float(self.arclen(origin))

    def side(self, x):
        dist, k = self.tree.query(x)
        v = x - self.pts[k]
        cross = self.tan[k, 0] * v[..., 1] - self.tan[k, 1] * v[..., 0]
        return np.sign(cross), dist, self.t[k]

    def c_of_t(self, t):
        return self.arclen(t) - self.s0


@dataclass
class CharacteristicsResult:
    """``C`` on the grid plus an evaluator for arbitrary points."""

    grid: Grid2D
    C: np.ndarray
    solver: "_Solver"

    @property
    def x(self):
        return self.grid.x

    @property
    def y(self):
        return self.grid.y

    def evaluate(self, points):
        return self.solver.solve(np.asarray(points, dtype=float))

    def gradient(self, points, h: float = 1e-4):
        """Central-difference gradient of ``C`` at ``points`` (shape ``(n, 2)``)."""
        p = np.asarray(points, dtype=float)
        ex, ey = np.array([h, 0.0]), np.array([0.0, h])
        vals = self.evaluate(np.concatenate([p + ex, p - ex, p + ey, p - ey]))
        a, b, c, d = np.split(vals, 4)
        return np.stack([(a - b) / (2 * h), (c - d) / (2 * h)], axis=-1)


class _Solver:
    def __init__(self, P, seed_curve, box, floor, tol, ds_max, max_length):
        self.P, self.gradP = _as_pressure(P)
        self.seed = _Seed(seed_curve)
        self.curve = seed_curve
        self.box = box
        self.floor = floor
        self.tol = tol
        self.ds_max = ds_max
        self.max_length = max_length

    def _f(self, x, sgn):
        g = np.asarray(self.gradP(x), dtype=float)
        n = np.linalg.norm(g, axis=-1, keepdims=True)
        if np.any(n < self.floor):
            raise CriticalPoint(f"|grad P| < {self.floor:g} along a characteristic")
        return sgn[..., None] * g / n

    def _rk4(self, x, h, sgn):
        hh = h[..., None]
        k1 = self._f(x, sgn)
        k2 = self._f(x + 0.5 * hh * k1, sgn)
        k3 = self._f(x + 0.5 * hh * k2, sgn)
        k4 = self._f(x + hh * k3, sgn)
        return x + hh * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0

    def _refine(self, xold, h, sgn, t_guess):
        """Locate ``u`` in [0, h] and ``t`` with ``step(xold, u) = seed(t)``."""
        lo, hi = np.zeros_like(h), h.copy()
        side0, _, _ = self.seed.side(xold)
        for _ in range(30):
            mid = 0.5 * (lo + hi)
            s, _, _ = self.seed.side(self._rk4(xold, mid, sgn))
            same = s == side0
            lo = np.where(same, mid, lo)
            hi = np.where(same, hi, mid)
        u = 0.5 * (lo + hi)
        _, _, t = self.seed.side(self._rk4(xold, u, sgn))
        t = np.where(np.isfinite(t), t, t_guess)
        for _ in range(8):
            X = self._rk4(xold, u, sgn)
            F = X - self.curve(t)
            a = self._f(X, sgn)
            b = -self.curve.tangent(t)
            det = a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]
            du = (F[:, 0] * b[:, 1] - F[:, 1] * b[:, 0]) / det
            dt = (a[:, 0] * F[:, 1] - a[:, 1] * F[:, 0]) / det
            u, t = u - du, t - dt
        X = self._rk4(xold, u, sgn)
        resid = np.linalg.norm(X - self.curve(t), axis=-1)
        return u, t, resid

    def _trace(self, starts, sgn_value):
        n = len(starts)
        x = starts.copy()
        sgn = np.full(n, float(sgn_value))
        ds = np.full(n, self.ds_max / 4)
        travelled = np.zeros(n)
        t_hit = np.full(n, np.nan)
        length = np.full(n, np.inf)
        active = np.ones(n, dtype=bool)
        side0, dist0, t0 = self.seed.side(x)
        on = dist0 < 1e-13
        t_hit[on] = t0[on]
        length[on] = 0.0
        active[on] = False
        xlo, xhi, ylo, yhi = self.box
        ref_side = side0.copy()
        while active.any():
            idx = np.flatnonzero(active)
            xa, h, sg = x[idx], ds[idx], sgn[idx]
            full = self._rk4(xa, h, sg)
            half = self._rk4(self._rk4(xa, 0.5 * h, sg), 0.5 * h, sg)
            err = np.linalg.norm(full - half, axis=-1)
            ok = err <= self.tol
            fac = np.clip(0.9 * (self.tol / np.maximum(err, 1e-300)) ** 0.2, 0.2, 4.0)
            ds[idx] = np.minimum(h * fac, self.ds_max)
            acc = idx[ok]
            if acc.size == 0:
                continue
            xold, hacc = x[acc], h[ok]
            xnew = half[ok]
            s_new, dist, tn = self.seed.side(xnew)
            crossed = (s_new != ref_side[acc]) & (dist < 4 * (hacc + self.seed.seg))
            if crossed.any():
                c = acc[crossed]
                u, t, resid = self._refine(xold[crossed], hacc[crossed], sgn[c], tn[crossed])
                good = ((resid < 1e-9) & (t >= self.curve.t0 - 1e-9)
                        & (t <= self.curve.t1 + 1e-9) & (u >= -1e-12) & (u <= hacc[crossed] + 1e-12))
                g = c[good]
                t_hit[g] = t[good]
                length[g] = travelled[g] + u[good]
                active[g] = False
                ref_side[c[~good]] = s_new[crossed][~good]
            x[acc] = xnew
            travelled[acc] += hacc
            ref_side[acc] = np.where(active[acc], s_new, ref_side[acc])
            out = ((x[:, 0] < xlo) | (x[:, 0] > xhi) | (x[:, 1] < ylo) | (x[:, 1] > yhi)
                   | (travelled > self.max_length))
            active &= ~out
        return t_hit, length

    def solve(self, points):
        shape = points.shape[:-1]
        pts = points.reshape(-1, 2)
        tp, lp = self._trace(pts, +1.0)
        tm, lm = self._trace(pts, -1.0)
        use_p = np.isfinite(tp) & (~np.isfinite(tm) | (lp <= lm))
        t = np.where(use_p, tp, tm)
        if np.any(~np.isfinite(t)):
            bad = pts[~np.isfinite(t)][0]
            raise EscapedDomain(
                f"{int(np.sum(~np.isfinite(t)))} characteristics leave the box before "
                f"meeting the seed curve (first at {bad.tolist()})")
        return self.seed.c_of_t(t).reshape(shape)


def solve_characteristics(P, seed_curve: SeedCurve, grid: Grid2D, *,
                          trace_box=None, floor: float = 1e-6, tol: float = 1e-11,
                          ds_max: float = 0.02, max_length: float | None = None
                          ) -> CharacteristicsResult:
    """Numeric ``C`` on ``grid`` with ``grad P . grad C = 0``.

    ``P`` is a scalar with ``.grad`` (or a ``(P, gradP)`` tuple) acting on
    ``(..., 2)`` arrays.  ``trace_box`` bounds the characteristics; by default
    the grid box padded by 10%.
    """
    if trace_box is None:
        px, py = 0.1 * (grid.xhi - grid.xlo), 0.1 * (grid.yhi - grid.ylo)
        trace_box = (grid.xlo - px, grid.xhi + px, grid.ylo - py, grid.yhi + py)
    if max_length is None:
        w = trace_box[1] - trace_box[0]
        hgt = trace_box[3] - trace_box[2]
        max_length = 10.0 * np.hypot(w, hgt)
    _, gradP = _as_pressure(P)
    nodes = grid.nodes()
    gn = np.linalg.norm(gradP(nodes), axis=-1)
    if np.min(gn) < floor:
        raise CriticalPoint(f"min |grad P| = {np.min(gn):.3g} on the grid")
    solver = _Solver(P, seed_curve, trace_box, floor, tol, ds_max, max_length)
    return CharacteristicsResult(grid, solver.solve(nodes), solver)
