"""
Calibrating a single-step multiple test
=======================================

Given B replicates of the test statistics under the least favorable
configuration, estimate the copula diagonal and choose the common local
level so that the family-wise error rate is alpha.
"""

import numpy as np
from scipy.special import ndtri

from archcal import (
    calibrate,
    calibrate_bonferroni,
    calibrate_oracle_gumbel,
    decide,
    evaluate,
    fit_generator_gnz,
    p_two_sided_normal,
    sample_gumbel,
)

m, alpha = 6, 0.05

# LFC statistics with standard normal margins and a Gumbel(2) copula
lfc = ndtri(sample_gumbel(2.0, m, 500, seed=11))
res = calibrate(fit_generator_gnz(lfc), m, alpha)

print("estimated alpha_loc:", round(res.alpha_loc, 5))
print("oracle alpha_loc   :", round(calibrate_oracle_gumbel(2.0, m, alpha).alpha_loc, 5))
print("Bonferroni         :", round(calibrate_bonferroni(m, alpha).alpha_loc, 5))

# one observed experiment: three nulls, three shifted means
n = 100
truth = np.array([True, True, True, False, False, False])
stats = np.where(truth, 0.0, 0.3) + ndtri(sample_gumbel(2.0, m, 1, seed=12)[0]) / np.sqrt(n)
p = p_two_sided_normal(stats, n)
rej = decide(p, res.alpha_loc)
out = evaluate(rej, truth)
print("p-values  :", np.round(p, 4))
print("rejected  :", rej.astype(int), " FWE:", out.fwe, " power:", out.power)
