"""
Exponential kernel and the viscous resolvent
============================================

The viscous resolvent u = J w solves u + lam f(x, u)_x = lam eps u_xx + w.
It is the fixed point of a map built from one convolution kernel, so we
look at the kernel first and then solve for u with each accelerator.
"""

import numpy as np

from discflux.flux import get_fixture
from discflux.grid import Grid, GridFunction, exp_convolve, l1_distance
from discflux.viscous import ResolventParams, boundary_leakage, newton_oracle, resolvent

# A grid with a cell face exactly at the flux discontinuity x = 0.
grid = Grid.from_spacing(-4.0, 4.0, 1e-3)
box = GridFunction(grid, np.where(np.abs(grid.x) < 1.0, 1.0, 0.0))

# Convolving the indicator of [-1, 1] with exp(-|x|/a)/(2a), a = 1/2,
# gives 1 - exp(-2) at the centre.
conv = exp_convolve(box, 0.5)
print("kernel * box at 0:", conv.values[grid.n_left], "closed form:", 1 - np.exp(-2))

# %%
# Solve the resolvent for the traffic flux with a jump in capacity.
flux = get_fixture("traffic_jump")
w = GridFunction(grid, np.where(np.abs(grid.x) < 1.5, 0.6, 0.0))
for accel in ("picard", "anderson", "newton"):
    p = ResolventParams(lam=0.5, eps=0.05, accel=accel, fp_tol=1e-12)
    sol = resolvent(w, flux, p)
    print(f"{accel:8s} evaluations={sol.iterations:5d} residual={sol.residual_l1:.1e}")

# %%
# Mass is conserved up to what leaks through the grid ends.
u = sol.u
print("mass(w) =", w.mass(), "mass(u) =", u.mass(), "leakage bound =", boundary_leakage(u, w, flux, p))

# %%
# An independent dense Newton solve of the same discrete equations agrees.
small = Grid.from_spacing(-2.0, 2.0, 1e-2)
ws = GridFunction(small, 0.8 * np.cos(0.5 * np.pi * np.clip(small.x, -1, 1)) ** 2)
ref = newton_oracle(ws, flux, 1e-3, 0.1)
print("L1 gap to dense oracle:", l1_distance(resolvent(ws, flux, ResolventParams(1e-3, 0.1)).u, ref))
