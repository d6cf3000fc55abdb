"""Instability and conditional stability of the continuation.

Ratios of a negative norm on J to a positive norm on I_i grow like
exp(c kappa_n). Restricted to the weighted space A the continuation is
bounded, and random unit-ball samples stay below the analytic constant.
"""

from gaphilbert.acceptance import instability, stability
from gaphilbert.pipeline import Pipeline, RunConfig

p = Pipeline(RunConfig())
res = instability(p)
print(f"predicted rate {res.predicted_rate:.4f}")
for n, r, rate in zip(res.n, res.ratio, res.rate):
    print(f"n={n:2d}  r_n={r:.3e}  log r_n / kappa_n={rate:.4f}")

st = stability(p)
for n_max, e, a in st.rows():
    print(f"n_max={n_max:2d}  empirical {e:.4f}  analytic {a:.4f}")
