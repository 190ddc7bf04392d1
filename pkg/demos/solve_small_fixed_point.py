"""Correct a seed into exact constraint data on a small grid.

The seed (h0, pi0) solves only the linearized constraints.  The missing
quadratic part is restored by the fixed point

    (h1, pi1) = S Phi(h0 + h1, pi0 + pi1).

Phi collects the quadratic remainder of the Hamiltonian and momentum
constraints, S is the conical right inverse of the linear map P, and
plain Picard iteration contracts because Phi is quadratically small in
the seed amplitude eps0.  This script runs the loop on a coarse grid,
prints the iteration history, and shows the nonlinear constraint
residual of the reconstructed (g, k) dropping well below the seed-only
residual.  Expect roughly half a minute of runtime.
"""

import numpy as np

from conedata import (ConeSpec, GridSpec, HPiData, KernelProfile, RayConfig,
                      SeedSpec, SolveConfig, WeightFunction, apply_Phi, apply_S,
                      constraints_grid, reconstruct_gk, seed_to_grid_discrete,
                      solve, solve_moment_coeffs)
from conedata.solver import hp_add

order = 4
cone = ConeSpec(axis=(0.0, 0.0, 1.0), theta=1.2)
grid = GridSpec(n=16, half_width=6.0)
spec = SeedSpec(s=1.0, eps0=1e-3, cone=cone, weight=WeightFunction())

h0, pi0 = seed_to_grid_discrete(spec, grid, order=order)
seed = HPiData(h0, pi0)

profile = KernelProfile(cone, n_polar=24, n_azimuth=48)
coeffs = solve_moment_coeffs(profile)
ray = RayConfig()

state = solve(
    seed,
    lambda f, F: apply_S(profile, coeffs, f, F, grid, ray),
    lambda hp: apply_Phi(hp, order=order),
    SolveConfig(tol=1e-6, max_iter=10),
)

print(f"converged: {state.converged} in {len(state.history)} iterations")
print(f"  {'iter':>4} {'update':>12} {'|Phi|':>12} {'ratio':>10}")
for rec in state.history:
    print(f"  {rec['iter']:4d} {rec['update_norm']:12.3e} "
          f"{rec['phi_norm']:12.3e} {rec['ratio']:10.2e}")

def residual(hp):
    H, M = constraints_grid(reconstruct_gk(hp), order=order)
    return float(np.hypot(H.l2(), M.l2()))

r_seed = residual(seed)
r_conv = residual(hp_add(seed, state.iterate))
print(f"\nconstraint residual, seed only:   {r_seed:.6e}")
print(f"constraint residual, corrected:   {r_conv:.6e}")
print(f"improvement factor:               {r_seed / r_conv:.1f}x")
print("\nthe residual floor is the stencil truncation of the discrete")
print("source, so the factor grows under joint grid refinement")
