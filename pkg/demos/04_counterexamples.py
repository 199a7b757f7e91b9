"""
Counterexamples
===============

Four checks around the shifted Burgers pair and the traffic flux: the
adapted-entropy solution differs from the vanishing-viscosity one, no
decreasing viscous standing wave exists, the mollified flux has a
stationary state, and the operator is not accretive in L1.
"""

from discflux.diagnostics import (
    accretivity_ratio,
    compare_adapted_vs_vanishing,
    mollified_stationarity_check,
    traveling_wave_probe,
)
from discflux.flux import get_fixture
from discflux.grid import Grid
from discflux.semigroup import EvolutionParams

# %%
grid = Grid.from_spacing(-30.0, 30.0, 0.02)
d, rep = compare_adapted_vs_vanishing(1.0, grid, EvolutionParams(1.0, 20, "viscous", 0.1),
                                      support=(-20, 20), window=(-10, 10))
print(f"adapted vs vanishing: {d:.4f} (closed form {rep.reference})")

# %%
for eps in (0.1, 0.01):
    probe = traveling_wave_probe(get_fixture("burgers_shifted"), eps)
    print(f"eps={eps}: smallest slope {probe.min_slope:.4f}, increasing={probe.increasing}")

# %%
fine = Grid.from_spacing(-2.0, 2.0, 1e-3)
mol = mollified_stationarity_check(0.1, fine, [1e-2, 1e-3])
print("mollified residuals:", mol.residuals)

# %%
for lam in (0.1, 0.25, 0.5):
    print(f"gamma=2 lam={lam}: L1 ratio {accretivity_ratio(2 * lam, lam):.12f} (< 1)")
