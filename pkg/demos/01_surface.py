"""Surface data for a three-interval configuration.

Builds the normalized differentials, the period matrix and the constants that
enter the g- and d-functions, for the symmetric reference endpoints and for a
skewed variant.
"""

import numpy as np

from gaphilbert import GapGeometry, Surface

for endpoints in ([-3, -2, -1, 1, 2, 3], [-3, -2.2, -1, 0.5, 1.7, 3.1]):
    s = Surface(GapGeometry(endpoints))
    print(f"endpoints {endpoints}")
    print("  Im tau =\n", np.array2string(s.tau.imag, precision=6, prefix="  "))
    print(f"  u(inf) = {s.u_infinity}")
    print(f"  delta  = {s.delta}")
    print(f"  Omega  = {s.Omega}")
    print(f"  predicted decay of -ln lambda_n per index: {np.pi / s.tau11.imag:.6f}")

# Re g stays strictly between -1/2 and 1/2 in the gaps and peaks midway
s = Surface(GapGeometry([-3, -2, -1, 1, 2, 3]))
x = np.linspace(1.05, 1.95, 7)
print("Re g on the right gap:", np.round(s.g_function(x + 0j, side=1).real, 4))
