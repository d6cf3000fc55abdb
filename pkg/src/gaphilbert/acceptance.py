"""Property checks on a :class:`Pipeline`, one per acceptance criterion.

Each checker returns a JSON-ready dict with a boolean ``pass`` and the numbers
it was decided on. Tolerances are the stated ones; nothing is tuned per run.
"""

from __future__ import annotations

import numpy as np

from .asymptotics import align, l2_norm, lambda_asymptotic_slope
from .continuation import decompose, direct_psi, recover_roi
from .pipeline import Pipeline
from .sobolev import instability_experiment, stability_experiment

__all__ = ["CRITERIA", "evaluate_all", "asymptotic_table", "instability", "stability"]


def _f(x):
    return float(x)


def period_matrix(p: Pipeline) -> dict:
    tau = p.surface.tau
    sym = _f(np.abs(tau - tau.T).max())
    re = _f(np.abs(tau.real).max())
    lam = _f(np.linalg.eigvalsh(tau.imag).min())
    return {"pass": sym < 1e-10 and re < 1e-10 and lam > 0,
            "symmetry_defect": sym, "max_abs_real": re, "min_eig_imag": lam}


def theta_identities(p: Pipeline, samples: int = 100) -> dict:
    rng = np.random.default_rng(p.cfg.seed)
    ctx = p.theta_ctx
    g = p.surface.g
    tau = p.surface.tau
    v = rng.uniform(-1, 1, (samples, g)) + 1j * rng.uniform(-0.5, 0.5, (samples, g))
    even = _f(np.abs(ctx.theta(v) - ctx.theta(-v)).max())
    mu = rng.integers(-2, 3, (samples, g))
    lam = rng.integers(-2, 3, (samples, g))
    lhs = ctx.theta(v + mu + lam @ tau.T)
    fac = np.exp(-2j * np.pi * np.einsum("ni,ni->n", lam, v) - 1j * np.pi * np.einsum("ni,ij,nj->n", lam, tau, lam))
    rhs = fac * ctx.theta(v)
    quasi = _f((np.abs(lhs - rhs) / np.abs(rhs)).max())
    return {"pass": even < 1e-12 and quasi < 1e-9, "evenness_max": even, "quasi_periodicity_rel_max": quasi}


def jump_conditions(p: Pipeline) -> dict:
    s, sp = p.surface, p.spectral
    xi, xe = sp.interior.x, sp.exterior.x
    gi = s.g_function(xi + 0j, 1) + s.g_function(xi + 0j, -1)
    ge = s.g_function(xe + 0j, 1) + s.g_function(xe + 0j, -1)
    g_res = _f(max(np.abs(gi + 1).max(), np.abs(ge - 1).max()))
    x = np.concatenate([xi, xe])
    dsum = s.d_function(x + 0j, 1) + s.d_function(x + 0j, -1)
    d_res = _f(np.abs(dsum + np.log(p.geometry.w_real(x))).max())
    return {"pass": g_res < 1e-8 and d_res < 1e-8, "g_residual": g_res, "d_residual": d_res}


def eigenvalue_law(p: Pipeline) -> dict:
    sp = p.spectral
    n = np.arange(5, 16)
    slope = _f(np.polyfit(n, sp.kappa[n], 1)[0])
    pred = lambda_asymptotic_slope(p.surface)
    lam = sp.lam[:16]
    ordered = bool(np.all(np.diff(lam) < 0))
    gap = _f(((lam[:-1] - lam[1:]) / lam[:-1]).min())
    rel = abs(slope / pred - 1)
    return {"pass": rel < 0.02 and ordered and gap > 0, "slope": slope, "predicted": pred,
            "relative_error": _f(rel), "min_gap_ratio": gap}


def eigenvalue_accuracy(p: Pipeline) -> dict:
    n = np.arange(3, 13)
    kt = p.scan.roots[n]
    k = p.spectral.kappa[n]
    prod = np.abs(k - kt) * np.sqrt(kt)
    trend = _f(np.polyfit(n, prod, 1)[0])
    return {"pass": bool(np.all(np.isfinite(prod)) and prod.max() < 1.0 and trend <= 0),
            "scaled_error": prod.tolist(), "trend_slope": trend}


def divisor_counting(p: Pipeline, N: int = 10) -> dict:
    scan = p.scan
    g = p.surface.g
    counts = scan.window_counts(N, start=p.cfg.kappa_min, g=g)
    total = int(counts.sum())
    ok = (N - 1) * (g - 1) <= total <= (N + 1) * (g - 1)
    if g == 2:
        ok = ok and bool(np.all(counts == 1))
    return {"pass": bool(ok), "counts": counts.tolist(), "total": total, "flagged": scan.flagged}


def oscillation(p: Pipeline) -> dict:
    sc = [p.spectral.sign_changes(n) for n in range(9)]
    return {"pass": sc == list(range(9)), "sign_changes": sc}


def asymptotic_table(p: Pipeline, ns=None) -> list[dict]:
    """Per-n comparison of the model ``f_tilde`` with the Nystrom ``hat f_n``."""
    if ns is None:
        return _memo(p, "asymptotics", lambda: asymptotic_table(p, range(p.nmax)))
    sp, m = p.spectral, p.model
    xi, W = sp.interior.x, sp.interior.w
    tab = m.table(xi)
    mid = np.zeros(len(xi), bool)
    for lo, hi in p.geometry.interior_cuts:
        mid |= np.abs(xi - 0.5 * (lo + hi)) < 0.4 * (hi - lo)
    rows = []
    for n in ns:
        ft = m.f_tilde(n, tab)
        fh = sp.f_hat(n)
        al, _ = align(fh, ft, W)
        rows.append({"n": int(n), "kappa_tilde": _f(m.kappa_tilde[n]), "lambda_tilde": _f(np.exp(-m.kappa_tilde[n])),
                     "norm": l2_norm(ft, W), "l2_gap": l2_norm(fh - al, W),
                     "sup_mid": _f(np.abs(fh - al)[mid].max())})
    return rows


def singular_asymptotics(p: Pipeline) -> dict:
    rows = asymptotic_table(p)
    n = np.array([r["n"] for r in rows])
    dev = np.array([abs(r["norm"] - 1) for r in rows])
    sup = np.array([r["sup_mid"] for r in rows])
    gap = np.array([r["l2_gap"] for r in rows])
    sel = n >= 5
    C = _f((n[sel] * dev[sel]).max())
    norm_ok = bool(np.all(np.diff(dev[sel]) < 0) and np.all(dev[sel] <= C / n[sel]))
    sup_trend = _f(np.polyfit(np.log(n[n >= 2]), np.log(sup[n >= 2]), 1)[0])
    sup12 = _f(sup[n == 12][0]) if np.any(n == 12) else float("nan")
    sup_ok = sup_trend < 0 and sup12 < 0.05
    n_l2 = 20 if 20 < p.spectral.n_resolved else int(n.max())
    l2_final = _f(gap[n == n_l2][0])
    l2_trend = [r["l2_gap"] for r in rows if r["n"] in (5, 10, 15, 20)]
    l2_ok = l2_final < 0.05
    return {"pass": bool(norm_ok and sup_ok and l2_ok), "norm_fit_C": C, "norm_ok": norm_ok,
            "sup_mid_at_12": sup12, "sup_log_slope": sup_trend, "sup_ok": bool(sup_ok),
            "l2_gap_n": n_l2, "l2_gap": l2_final, "l2_gap_trend": l2_trend, "l2_ok": bool(l2_ok)}


def continuation_oracle(p: Pipeline) -> dict:
    sp = p.spectral
    phi = lambda x: np.exp(np.asarray(x) / 4)
    z = p.gap_points(per_gap=10 // p.surface.g if p.surface.g <= 10 else 1)
    ser = decompose(sp, p.surface, phi(sp.exterior.x), p.nmax)
    direct = direct_psi(p.geometry, phi, z)
    rel = _f((np.abs(ser.value(z) - direct) / np.abs(direct)).max())
    zero = decompose(sp, p.surface, np.zeros(len(sp.exterior.x)), p.nmax)
    zmax = _f(np.abs(zero.value(z)).max())
    return {"pass": rel < 1e-3 and zmax == 0.0, "max_rel_error": rel, "zero_output_max": zmax,
            "n_max": p.nmax, "points": len(z)}


def recovery(p: Pipeline) -> dict:
    z = np.array([0.5 * (lo + hi) for lo, hi in p.geometry.gaps])
    res = recover_roi(p.spectral, p.surface, [1.0], z, p.nmax)
    rel = _f(res.rel_err.max())
    return {"pass": rel < 1e-2, "max_rel_error_midgap": rel, "n_max": p.nmax}


def _memo(p: Pipeline, key: str, fn):
    store = p.__dict__.setdefault("_results", {})
    if key not in store:
        store[key] = fn()
    return store[key]


def instability(p: Pipeline):
    ns = range(3, p.nmax)
    return _memo(p, "instability", lambda: instability_experiment(
        p.spectral, p.surface, p.cfg.s1, p.cfg.s2, p.J, ns, d_gamma=p.cfg.d_gamma))


def instability_check(p: Pipeline) -> dict:
    res = instability(p)
    r = res.ratio
    i10 = int(np.nonzero(res.n == 10)[0][0])
    growth = _f(r[i10] / r[0])
    rate = _f(res.rate[i10])
    pred = res.predicted_rate
    rel = abs(rate - pred) / pred
    increasing = bool(np.all(np.diff(r[: i10 + 1]) > 0))
    return {"pass": growth >= 10 and rel < 0.2 and pred > 0 and increasing, "growth_3_to_10": growth,
            "rate_at_10": rate, "predicted_rate": pred, "relative_error": _f(rel), "increasing": increasing}


def stability(p: Pipeline):
    nm = list(range(6, p.nmax + 1, 2))
    if nm[-1] != p.nmax:
        nm.append(p.nmax)
    return _memo(p, "stability", lambda: stability_experiment(
        p.spectral, p.surface, p.J, nm, samples=p.cfg.samples, seed=p.cfg.seed))


def stability_check(p: Pipeline) -> dict:
    res = stability(p)
    e, a = res.empirical_C, res.analytic_C
    bounded = bool(np.all(e <= a))
    tight = bool(np.all(a <= 2 * e))
    spread = _f(e.max() / e.min() - 1)
    return {"pass": bounded and tight and spread < 0.1, "empirical_C": e.tolist(), "analytic_C": a.tolist(),
            "analytic_C_sup": res.extra["analytic_C_sup"].tolist(), "spread": spread}


CRITERIA = {
    "c01_period_matrix": period_matrix,
    "c02_theta_identities": theta_identities,
    "c03_jump_conditions": jump_conditions,
    "c04_eigenvalue_law": eigenvalue_law,
    "c05_eigenvalue_accuracy": eigenvalue_accuracy,
    "c06_divisor_counting": divisor_counting,
    "c07_oscillation": oscillation,
    "c08_singular_asymptotics": singular_asymptotics,
    "c09_continuation_oracle": continuation_oracle,
    "c10_recovery": recovery,
    "c11_instability": instability_check,
    "c12_stability": stability_check,
}


def evaluate_all(p: Pipeline) -> dict:
    return {k: fn(p) for k, fn in CRITERIA.items()}
