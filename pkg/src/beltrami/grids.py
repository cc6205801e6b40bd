"""Cartesian sampling grids that respect a field's defined set."""
from __future__ import annotations

import numpy as np

from .errors import BoundsOutsideDomain


def parse_dims(text) -> tuple[int, int, int]:
    """``"16"`` or ``"16,8,4"`` (or ints) to three grid sizes."""
    if isinstance(text, (int, np.integer)):
        vals = [int(text)]
    else:
        vals = [int(v) for v in str(text).split(",")]
    if len(vals) == 1:
        vals = vals * 3
    if len(vals) != 3 or min(vals) < 1:
        raise ValueError(f"grid needs one or three positive sizes, got {text!r}")
    return tuple(vals)


def parse_bounds(text) -> tuple[np.ndarray, np.ndarray]:
    """``"x0,x1,y0,y1,z0,z1"`` to ``(lo, hi)`` arrays."""
    vals = [float(v) for v in str(text).split(",")] if isinstance(text, str) else list(text)
    if len(vals) != 6:
        raise ValueError("bounds need six numbers x0,x1,y0,y1,z0,z1")
    b = np.asarray(vals, dtype=float).reshape(3, 2)
    if np.any(b[:, 1] < b[:, 0]):
        raise ValueError("each bound pair must be increasing")
    return b[:, 0], b[:, 1]


def default_bounds(field, n: int = 4096, window: float = 0.3):
    """A Cartesian box inside the field's defined set.

    Cartesian fields use their own box.  Curvilinear fields use the bounding
    box of domain samples whose angle lies within ``window`` of the middle of
    the angle range, which keeps the box off the axis and the angle cut.
    """
    dom = field.domain
    chart = dom.chart
    box = np.asarray(dom.box, dtype=float)
    if chart.name == "cartesian":
        return box[:, 0].copy(), box[:, 1].copy()
    pts = field.sample(n, seed=12345)
    k = chart.index("phi")
    mid = box[k].mean()
    phi = chart.forward(pts)[:, k]
    sel = pts[np.abs(phi - mid) <= window]
    return sel.min(axis=0), sel.max(axis=0)


def check_bounds(field, lo, hi, points=None):
    """Raise ``BoundsOutsideDomain`` unless the box lies in the defined set."""
    lo, hi = np.asarray(lo, dtype=float), np.asarray(hi, dtype=float)
    dom = field.domain
    if not dom.chart.bounds_clear(lo, hi, dom.margin):
        raise BoundsOutsideDomain(
            f"box {lo.tolist()}..{hi.tolist()} meets the {dom.chart.name} excluded set "
            f"({dom.chart.excluded_set})")
    if dom.cut_phi and lo[0] < 0 and lo[1] <= 0 <= hi[1]:
        raise BoundsOutsideDomain(
            f"box {lo.tolist()}..{hi.tolist()} crosses the angle cut phi = +-pi")
    if points is not None:
        ok = field.defined(points)
        if not np.all(ok):
            bad = np.asarray(points)[~ok]
            raise BoundsOutsideDomain(
                f"{len(bad)} grid points lie outside the field's defined set "
                f"(first {bad[0].tolist()})")


def grid_points(lo, hi, dims):
    """Points of shape ``(nx, ny, nz, 3)``; a size of 1 takes the box midpoint."""
    axes = [np.linspace(a, b, n) if n > 1 else np.array([(a + b) / 2])
            for a, b, n in zip(lo, hi, dims)]
    X, Y, Z = np.meshgrid(*axes, indexing="ij")
    return np.stack([X, Y, Z], axis=-1)


def sample_grid(field, dims=16, bounds=None):
    """``(points, vectors)`` on a checked Cartesian grid."""
    dims = parse_dims(dims)
    lo, hi = default_bounds(field) if bounds is None else bounds
    P = grid_points(lo, hi, dims)
    check_bounds(field, lo, hi, P.reshape(-1, 3))
    W = np.asarray(field(P.reshape(-1, 3)), dtype=float).reshape(P.shape)
    return P, W


__all__ = ["parse_dims", "parse_bounds", "default_bounds", "check_bounds", "grid_points",
           "sample_grid"]
