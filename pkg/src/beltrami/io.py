"""Plain-text exports: CSV tables and legacy ASCII VTK files.

All numbers are written with ``%.8e`` (9 significant digits) through
``%``-formatting, which ignores the locale.
"""
from __future__ import annotations

import numpy as np

FMT = "%.8e"


def _rows(arr, fmt=FMT):
    return "\n".join(" ".join(fmt % v for v in row) for row in np.asarray(arr, dtype=float))


def csv_table(columns: dict, fmt: str = FMT) -> str:
    names = list(columns)
    data = np.stack([np.asarray(columns[n], dtype=float).ravel() for n in names], axis=-1)
    lines = [",".join(names)]
    lines += [",".join(fmt % v for v in row) for row in data]
    return "\n".join(lines) + "\n"


def points_csv(points, vectors, fmt: str = FMT) -> str:
    p = np.asarray(points, dtype=float).reshape(-1, 3)
    w = np.asarray(vectors, dtype=float).reshape(-1, 3)
    return csv_table({"x": p[:, 0], "y": p[:, 1], "z": p[:, 2],
                      "wx": w[:, 0], "wy": w[:, 1], "wz": w[:, 2]}, fmt)


def _title(title: str) -> str:
    return " ".join(str(title).split())[:255] or "beltrami"


def structured_grid_vtk(points, vectors, title: str = "beltrami field",
                        name: str = "w") -> str:
    """Legacy ASCII STRUCTURED_GRID with a point VECTORS attribute.

    ``points`` and ``vectors`` have shape ``(nx, ny, nz, 3)``; VTK wants x
    varying fastest, so the arrays are written in Fortran order.
    """
    p = np.asarray(points, dtype=float)
    w = np.asarray(vectors, dtype=float)
    nx, ny, nz = p.shape[:3]
    n = nx * ny * nz
    pf = p.transpose(2, 1, 0, 3).reshape(-1, 3)
    wf = w.transpose(2, 1, 0, 3).reshape(-1, 3)
    return "\n".join([
        "# vtk DataFile Version 2.0",
        _title(title),
        "ASCII",
        "DATASET STRUCTURED_GRID",
        f"DIMENSIONS {nx} {ny} {nz}",
        f"POINTS {n} float",
        _rows(pf),
        f"POINT_DATA {n}",
        f"VECTORS {name} float",
        _rows(wf),
    ]) + "\n"


def quad_mesh_vtk(points, quads, vectors, title: str = "beltrami surface",
                  name: str = "w") -> str:
    """Legacy ASCII UNSTRUCTURED_GRID of quad cells (VTK type 9) with point VECTORS."""
    p = np.asarray(points, dtype=float).reshape(-1, 3)
    q = np.asarray(quads, dtype=int).reshape(-1, 4)
    w = np.asarray(vectors, dtype=float).reshape(-1, 3)
    parts = [
        "# vtk DataFile Version 2.0",
        _title(title),
        "ASCII",
        "DATASET UNSTRUCTURED_GRID",
        f"POINTS {len(p)} float",
        _rows(p),
        f"CELLS {len(q)} {5 * len(q)}",
    ]
    if len(q):
        parts.append("\n".join("4 " + " ".join(str(int(i)) for i in row) for row in q))
    parts.append(f"CELL_TYPES {len(q)}")
    if len(q):
        parts.append("\n".join(["9"] * len(q)))
    parts += [f"POINT_DATA {len(p)}", f"VECTORS {name} float", _rows(w)]
    return "\n".join(parts) + "\n"
