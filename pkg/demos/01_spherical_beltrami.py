"""Solenoidal Beltrami fields from harmonic conjugate pairs.

Builds the spherical field w = cos R grad alpha + sin R grad phi, checks that
it is parallel to its curl with factor -1, that it is tangent to every sphere
R = const, and follows a field line on the unit sphere.  The last
part shows why the construction fails in toroidal coordinates.
"""
import numpy as np

from beltrami import build_case, check_theorem1_hypothesis, get_chart, trace_field_line
from beltrami.calculus import boundary_tangency, residual_beltrami, singularity_scan
from beltrami.fields import proportionality_factor

f = build_case("spherical-fig1")
pts = f.sample(500, seed=1)

rep = residual_beltrami(f)
print(f"alignment |w x curl w| / (|w||curl w|): {rep.max_residual:.2e} on {rep.n_points} points")
h = proportionality_factor(f, pts)
print(f"(w . curl w) / w^2 ranges over [{h.min():.8f}, {h.max():.8f}]")

for R0 in (0.5, 1.0, 1.5):
    print(f"max |w . grad R| on R = {R0}: {boundary_tangency(f, R0):.1e}")

# Speed blows up like 1/sin(vartheta) toward the pole while L_R diverges.
scan = singularity_scan(f, thetas=[np.pi / 2, 1e-1, 1e-2, 1e-3, 1e-4])
print("\n vartheta        w^2        w^2 sin^2     |L_R|")
for th, w2, prof, L in scan:
    print(f"{th:9.1e}  {w2:12.5e}  {prof:.12f}  {L:8.4f}")

tr = trace_field_line(f, [0.6, 0.0, 0.8], ds=2e-3, n_steps=5000)
R = np.linalg.norm(tr.points, axis=-1)
print(f"\ntrace from (0.6, 0, 0.8): {len(tr)} points, stopped: {tr.status}")
print(f"max |R - 1| along the trace: {np.max(np.abs(R - 1)):.1e}")
end = tr.points[-1]
print(f"end point: vartheta = {np.arccos(end[2] / R[-1]):.4f}, "
      f"phi = {np.arctan2(end[1], end[0]):.4f} (the angle cut)")

# Toroidal coordinates have no ordering with h_beta/h_zeta a function of zeta alone.
torus = get_chart("toroidal")
for order in (("tau", "eta", "phi"), ("eta", "phi", "tau"), ("phi", "tau", "eta")):
    res = check_theorem1_hypothesis(torus, order, ((0.05, 0.95), (0.0, 1.0), (-1.0, 1.0)))
    print(f"toroidal ordering {order}: max violation {res.max_violation:.3f}")
