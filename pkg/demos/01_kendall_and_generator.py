"""
Estimating an Archimedean generator from its Kendall distribution
=================================================================

Draw a Gumbel sample, turn it into pseudo-observations, build the
empirical Kendall distribution function and invert it into a generator.
"""

import numpy as np

from archcal import (
    ParametricGumbel,
    copula_diagonal,
    empirical_kendall_df,
    fit_generator_gnz,
    kendall_df_gumbel_2d,
    pseudo_observations,
    sample_gumbel,
    tau_to_theta,
)

# Kendall's tau of 0.5 corresponds to theta = 2
theta = tau_to_theta(0.5)
x = sample_gumbel(theta, m=2, n=2000, seed=3)

# W_i: fraction of rows strictly below row i in every coordinate
w = pseudo_observations(x)
k = empirical_kendall_df(w)
print("Kendall df atoms:", k.atoms.size)
print("sup |K_n - K|   :", np.max(np.abs(k.cumulative - kendall_df_gumbel_2d(theta, k.atoms))))

# the fitted generator is a Williamson hinge sum with one radial atom per K atom
gen = fit_generator_gnz(x)
print("radial atoms    :", gen.atoms[:5], "...")
print("psi(phi(0.3))   :", gen.psi(gen.phi(0.3)))

# compare the copula diagonal with the truth on a few points
u = np.linspace(0, 1, 6)
print("fitted diagonal :", np.round(copula_diagonal(gen, 2, u), 4))
print("true diagonal   :", np.round(copula_diagonal(ParametricGumbel(theta), 2, u), 4))
