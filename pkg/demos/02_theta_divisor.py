"""Crossings of a real line with the theta divisor.

The zeros of Theta(W(kappa) - W0) predict -ln lambda_n. Their mean spacing
is pi / Im tau_11 and they track the Nystrom values more closely as n grows.
"""

import numpy as np

from gaphilbert import GapGeometry, Spectral, Surface, ThetaContext, find_kappa_tilde

geo = GapGeometry([-3, -2, -1, 1, 2, 3])
surface = Surface(geo)
ctx = ThetaContext(surface.tau)
scan = find_kappa_tilde(surface, ctx, 0.0, 30.0)
spectral = Spectral(geo, 128)

print(f"period pi/Im tau_11 = {scan.period:.5f}, crossings found: {len(scan.roots)}")
print(" n   kappa_tilde   kappa (Nystrom)   |diff| sqrt(kappa_tilde)")
for n in range(min(12, spectral.n_resolved)):
    kt, k = scan.roots[n], spectral.kappa[n]
    print(f"{n:2d}   {kt:10.5f}   {k:14.5f}   {abs(k - kt) * np.sqrt(kt):10.4f}")
print("roots per window:", scan.window_counts(10, start=0.0))
