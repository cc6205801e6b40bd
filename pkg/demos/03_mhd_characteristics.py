"""Static MHD equilibria w = grad sigma(mu) + lambda grad C.

Given a pressure P, a second coordinate C with grad P . grad C = 0 can be
found by the method of characteristics.  Here the numerical C for P = xy is
compared with the closed form (y^2 - x^2)/2, then the equilibrium built on
it is checked against w x curl w = grad P.
"""
import numpy as np

from beltrami import build_case
from beltrami.calculus import (check_mhd_system, residual_curl_transport,
                               residual_force_balance, residual_transport)
from beltrami.characteristics import Grid2D, SeedCurve, solve_characteristics
from beltrami.fields import Scalar

P = Scalar(lambda q: q[..., 0] * q[..., 1],
           lambda q: np.stack([q[..., 1], q[..., 0]], axis=-1), "P")
arc = SeedCurve(lambda t: np.stack([np.cos(t), np.sin(t)], axis=-1), 0.0, np.pi / 2)
grid = Grid2D(0.5, 1.0, 0.5, 1.0, 11, 11)
res = solve_characteristics(P, arc, grid, trace_box=(0.05, 1.5, 0.05, 1.5))

X, Y = grid.nodes()[..., 0], grid.nodes()[..., 1]
C_closed = 0.5 * (Y**2 - X**2)
# arc length on the unit circle is a monotone function of the closed form
print("max |C_num - arccos(-2 C)/2| =", np.max(np.abs(res.C - 0.5 * np.arccos(-2 * C_closed))))
print("corr(C_num, C_closed) =", np.corrcoef(res.C.ravel(), C_closed.ravel())[0, 1])

for cid in ("mhd-xy", "mhd-exp", "mhd-cyl", "mhd-px", "mhd-pr"):
    f = build_case(cid)
    print(f"{cid:8s} force {residual_force_balance(f).max_residual:.1e}"
          f"  w.grad P {residual_transport(f, f.pressure).max_residual:.1e}"
          f"  curl w.grad P {residual_curl_transport(f, f.pressure).max_residual:.1e}"
          f"  system {check_mhd_system(f).max_residual:.1e}")
