"""Surface meshes for the six figure panels, with the field sampled on them.

Level sets of the angular invariants are parametrized in closed form.  The
L_z and L_phi sets are written in a frame that rotates with the angle, which
keeps them single valued; only fig1b needs division by ``cos R``.  Vertices
that fall outside the chart's cleared region are dropped and the dropped
parameter runs are recorded as ``ClipRecord`` entries.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .catalog import build_case
from .charts import CLEARANCE
from .errors import ParamOutOfRange

FIGURES = ("fig1a", "fig1b", "fig2a", "fig2b", "fig3a", "fig3b")
FIGURE_CASE = {"fig1a": "spherical-fig1", "fig1b": "spherical-fig1",
               "fig2a": "gb-fig2", "fig2b": "gb-fig2",
               "fig3a": "gb-fig3", "fig3b": "gb-fig3"}
EDGE = 1e-2  # keeps angle parameters off the chart edges


@dataclass(frozen=True)
class ClipRecord:
    surface: str
    param: str
    lo: float
    hi: float
    at: str = ""


@dataclass
class FigureMesh:
    figure: str
    case_id: str
    points: np.ndarray
    quads: np.ndarray
    vectors: np.ndarray
    surface_ids: np.ndarray
    surfaces: tuple
    clipped: list = field(default_factory=list)


def _runs(mask):
    """Start/stop index pairs of the True runs in a 1D mask."""
    m = np.concatenate([[False], mask, [False]]).astype(int)
    d = np.diff(m)
    return list(zip(np.flatnonzero(d == 1), np.flatnonzero(d == -1) - 1))


class _Builder:
    def __init__(self, figure):
        self.figure = figure
        self.pts, self.quads, self.sid, self.names, self.clipped = [], [], [], [], []
        self.count = 0

    def add(self, name, u, v, P, valid, uname, vname):
        """Add a parameter grid ``P[i, j]`` (``u[i]``, ``v[j]``) as quads."""
        k = len(self.names)
        self.names.append(name)
        nu, nv = valid.shape
        for i in range(nu):
            for a, b in _runs(~valid[i]):
                self.clipped.append(ClipRecord(name, vname, float(v[a]), float(v[b]),
                                               f"{uname}={u[i]:.8g}"))
        index = -np.ones((nu, nv), dtype=int)
        index[valid] = self.count + np.arange(int(valid.sum()))
        self.count += int(valid.sum())
        self.pts.append(P[valid])
        self.sid.append(np.full(int(valid.sum()), k))
        q = np.stack([index[:-1, :-1], index[1:, :-1], index[1:, 1:], index[:-1, 1:]], axis=-1)
        q = q.reshape(-1, 4)
        self.quads.append(q[np.all(q >= 0, axis=1)])

    def finish(self, case_id, strict):
        if strict and self.clipped:
            c = self.clipped[0]
            raise ParamOutOfRange(
                f"{self.figure}: {len(self.clipped)} parameter runs leave the cleared "
                f"region (first {c.param} in [{c.lo:.6g}, {c.hi:.6g}] at {c.at})")
        field_ = build_case(case_id)
        P = np.concatenate(self.pts)
        return FigureMesh(self.figure, case_id, P, np.concatenate(self.quads),
                          field_(P), np.concatenate(self.sid), tuple(self.names),
                          self.clipped)


def _sphere_point(R, th, phi):
    s = np.sin(th)
    return np.stack([R * s * np.cos(phi), R * s * np.sin(phi), R * np.cos(th)], axis=-1)


def _fig1a(b, n):
    th = np.linspace(EDGE, np.pi - EDGE, n)
    phi = np.linspace(-np.pi + EDGE, np.pi - EDGE, 2 * n)
    T, F = np.meshgrid(th, phi, indexing="ij")
    b.add("R=1", th, phi, _sphere_point(1.0, T, F), np.ones(T.shape, bool), "vartheta", "phi")


def _fig1b(b, n, level=0.5):
    alpha = build_case("spherical-fig1").parts["alpha"]
    th = np.linspace(EDGE, np.pi - EDGE, n)
    R = np.linspace(0.05, 1.5, n)
    T, RR = np.meshgrid(th, R, indexing="ij")
    phi = (level + alpha.alpha_of_zeta(T) * np.sin(RR)) / np.cos(RR)
    valid = np.abs(phi) <= np.pi - CLEARANCE
    b.add(f"L_R={level:g}", th, R, _sphere_point(RR, T, np.where(valid, phi, 0.0)),
          valid, "vartheta", "R")


def _fig2a(b, n):
    x = np.linspace(-1.5, 1.5, n)
    X, Y = np.meshgrid(x, x, indexing="ij")
    for z in (-1.3, 0.0, 1.3):
        P = np.stack([X, Y, np.full_like(X, z)], axis=-1)
        b.add(f"z={z:g}", x, x, P, np.ones(X.shape, bool), "x", "y")


def _fig2b(b, n, level=0.5):
    # (x, y) = level (cos z, -sin z) + t (sin z, cos z)
    z = np.linspace(-1.5, 1.5, n)
    t = np.linspace(-1.5, 1.5, n)
    Z, T = np.meshgrid(z, t, indexing="ij")
    c, s = np.cos(Z), np.sin(Z)
    P = np.stack([level * c + T * s, -level * s + T * c, Z], axis=-1)
    b.add(f"L_z={level:g}", z, t, P, np.ones(Z.shape, bool), "z", "t")


def _fig3a(b, n):
    r = np.linspace(0.5, 2.0, n)
    z = np.linspace(-1.0, 1.0, n)
    Rr, Z = np.meshgrid(r, z, indexing="ij")
    for name, sgn in (("phi=0", 1.0), ("phi=pi", -1.0)):
        # exact zeros in y keep phi exactly 0 or pi
        P = np.stack([sgn * Rr, np.zeros_like(Rr), Z], axis=-1)
        b.add(name, r, z, P, np.ones(Rr.shape, bool), "r", "z")


def _fig3b(b, n, level=1.0):
    # (r, z) = level (cos phi, -sin phi) + t (sin phi, cos phi)
    phi = np.linspace(-np.pi + EDGE, np.pi - EDGE, 2 * n)
    t = np.linspace(-2.0, 2.0, n)
    F, T = np.meshgrid(phi, t, indexing="ij")
    c, s = np.cos(F), np.sin(F)
    r = level * c + T * s
    z = -level * s + T * c
    valid = r >= CLEARANCE
    rr = np.where(valid, r, 1.0)
    P = np.stack([rr * c, rr * s, z], axis=-1)
    b.add(f"L_phi={level:g}", phi, t, P, valid, "phi", "t")


_MAKERS = {"fig1a": _fig1a, "fig1b": _fig1b, "fig2a": _fig2a,
           "fig2b": _fig2b, "fig3a": _fig3a, "fig3b": _fig3b}


def figure_mesh(figure: str, n: int = 48, strict: bool = False) -> FigureMesh:
    """Mesh and sampled field for one panel.

    With ``strict`` a panel that needed clipping raises ``ParamOutOfRange``.
    """
    if figure not in _MAKERS:
        raise KeyError(f"unknown figure {figure!r}; choose from {', '.join(FIGURES)}")
    if n < 2:
        raise ValueError("n must be at least 2")
    b = _Builder(figure)
    _MAKERS[figure](b, n)
    return b.finish(FIGURE_CASE[figure], strict)


__all__ = ["FIGURES", "FIGURE_CASE", "ClipRecord", "FigureMesh", "figure_mesh"]
