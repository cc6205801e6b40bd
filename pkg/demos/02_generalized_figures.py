"""Generalized Beltrami fields and the surface data behind the figures.

The fields alpha(theta, L_theta) xi with xi a unit Beltrami field satisfy
w x curl w = grad(w^2 / 2).  Each figure panel is written as a legacy VTK
file of quads with the field sampled at the vertices.
"""
import sys
from pathlib import Path

import numpy as np

from beltrami import build_case, trace_field_line
from beltrami.calculus import (residual_divergence, residual_force_balance,
                               residual_speed_transport)
from beltrami.figures import FIGURES, figure_mesh
from beltrami.flow import invariant_drift, pick_seed
from beltrami.io import quad_mesh_vtk

out = Path(sys.argv[1] if len(sys.argv) > 1 else "figures")
out.mkdir(exist_ok=True)

for cid in ("gb-fig2", "gb-fig3"):
    f = build_case(cid)
    fb = residual_force_balance(f).max_residual
    sp = residual_speed_transport(f).max_residual
    dv = residual_divergence(f, reference=f.analytic_div).max_residual
    print(f"{cid}: force balance {fb:.1e}, w.grad w^2 {sp:.1e}, div vs closed form {dv:.1e}")
    tr = trace_field_line(f, pick_seed(f), 1e-2, 1000, stay_in_box=True)
    for name, inv in f.invariants.items():
        d = invariant_drift(tr, inv)
        print(f"    {name:6s} drifts {d.max_drift:.1e} over {tr.n_steps} steps")

for fig in FIGURES:
    m = figure_mesh(fig, n=48)
    path = out / f"{fig}.vtk"
    path.write_text(quad_mesh_vtk(m.points, m.quads, m.vectors, title=f"{fig} {m.case_id}"))
    speed = np.linalg.norm(m.vectors, axis=-1)
    print(f"{fig}: {len(m.points):5d} vertices, {len(m.quads):5d} quads, "
          f"|w| in [{speed.min():.3f}, {speed.max():.3f}], {len(m.clipped)} clipped runs"
          f" -> {path}")
