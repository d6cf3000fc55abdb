"""Theta-function model of the singular functions.

For each crossing kappa_tilde_n the model f_tilde_n is built from theta
quotients on the boundary of the cuts. It is compared with the Nystrom hat
f_n after fixing the sign.
"""

from gaphilbert.acceptance import asymptotic_table
from gaphilbert.pipeline import Pipeline, RunConfig

p = Pipeline(RunConfig())
print(" n   ||f_tilde||   L2 gap   sup gap (middle 80%)")
for row in asymptotic_table(p):
    print(f"{row['n']:2d}   {row['norm']:9.4f}   {row['l2_gap']:6.4f}   {row['sup_mid']:6.4f}")
# The sup gap on the middle of the cut falls quickly. The L2 gap falls slowly
# because the model has an endpoint singularity that the true function lacks.
