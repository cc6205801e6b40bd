"""Steady Euler flows w = grad mu + lambda grad C with |grad mu|^2 / 2 = c - P.

The five catalog flows balance w x curl w = grad(P + w^2 / 2) and carry the
invariant lambda.  For the cylindrical flow built on exp(-r) sin phi the
divergence is the Laplacian of that potential; the printed closed form
(exp(-r)/r)(sin phi - cos phi / r^2) does not match it, the form
exp(-r) sin phi (1 - 1/r - 1/r^2) does.
"""
import numpy as np

from beltrami import build_case, list_recipes
from beltrami.calculus import (check_hamiltonian_structure, div, residual_divergence,
                               residual_force_balance)
from beltrami.catalog import euler_cyl_div_corrected

for r in list_recipes("euler"):
    f = build_case(r.case_id)
    fb = residual_force_balance(f).max_residual
    dv = residual_divergence(f, reference=f.analytic_div).max_residual
    ham = check_hamiltonian_structure(f).max_residual
    print(f"{r.case_id:10s} force {fb:.1e}  div vs closed form {dv:.1e}  hamiltonian {ham:.1e}")

f = build_case("euler-cyl")
pts = f.sample(1000, seed=7)
num = div(f, pts)
print("\neuler-cyl divergence")
print(f"  printed form:   max error {np.max(np.abs(num - f.analytic_div(pts))):.3f}")
print(f"  corrected form: max error {np.max(np.abs(num - euler_cyl_div_corrected(pts))):.1e}")
