"""The twelve acceptance criteria on the reference geometry at their stated tolerances.

Each test prints one ``PASS``/``FAIL`` line, and the lines are repeated in the
terminal summary. Run as a script for the lines alone.
"""

import numpy as np
import pytest

from gaphilbert import acceptance
from gaphilbert.pipeline import Pipeline, RunConfig

from conftest import ACCEPTANCE_KEY


@pytest.fixture
def report(request):
    lines = request.config.stash[ACCEPTANCE_KEY]

    def record(number, title, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'} criterion {number:2d} {title}: {detail}"
        print(line)
        lines.append(line)
        return ok

    return record


def test_c01_period_matrix(pipe, report):
    r = acceptance.period_matrix(pipe)
    ok = r["symmetry_defect"] < 1e-10 and r["max_abs_real"] < 1e-10 and r["min_eig_imag"] > 0
    report(1, "period matrix", ok, f"|tau - tau^T| = {r['symmetry_defect']:.1e}, "
           f"|Re tau| = {r['max_abs_real']:.1e}, min eig Im tau = {r['min_eig_imag']:.4f}")
    assert ok


def test_c02_theta_identities(pipe, report):
    r = acceptance.theta_identities(pipe, samples=100)
    ok = r["evenness_max"] < 1e-12 and r["quasi_periodicity_rel_max"] < 1e-9
    report(2, "theta identities", ok, f"evenness {r['evenness_max']:.1e}, "
           f"quasi-periodicity {r['quasi_periodicity_rel_max']:.1e}")
    assert ok


def test_c03_jump_conditions(pipe, report):
    r = acceptance.jump_conditions(pipe)
    ok = r["g_residual"] < 1e-8 and r["d_residual"] < 1e-8
    report(3, "jump conditions", ok, f"g residual {r['g_residual']:.1e}, d residual {r['d_residual']:.1e}")
    assert ok


def test_c04_eigenvalue_law(pipe, report):
    r = acceptance.eigenvalue_law(pipe)
    ok = r["relative_error"] < 0.02 and r["min_gap_ratio"] > 0
    report(4, "eigenvalue law", ok, f"slope {r['slope']:.5f} vs {r['predicted']:.5f} "
           f"(rel {r['relative_error']:.1e})")
    assert ok


def test_c05_eigenvalue_accuracy(pipe, report):
    r = acceptance.eigenvalue_accuracy(pipe)
    err = np.array(r["scaled_error"])
    ok = bool(np.all(np.isfinite(err)) and err.max() < 1.0 and r["trend_slope"] <= 0)
    report(5, "approximate eigenvalues", ok, f"max |kappa - kappa~| sqrt(kappa~) = {err.max():.3f}, "
           f"trend {r['trend_slope']:.2e}")
    assert ok


def test_c06_divisor_counting(pipe, report):
    r = acceptance.divisor_counting(pipe, N=10)
    ok = r["counts"] == [1] * 10 and 9 <= r["total"] <= 11
    report(6, "divisor counting", ok, f"counts {r['counts']}")
    assert ok


def test_c07_oscillation(pipe, report):
    r = acceptance.oscillation(pipe)
    ok = r["sign_changes"] == list(range(9))
    report(7, "oscillation", ok, f"sign changes {r['sign_changes']}")
    assert ok


def test_c08_singular_asymptotics(pipe, report):
    r = acceptance.singular_asymptotics(pipe)
    ok = r["norm_ok"] and r["sup_mid_at_12"] < 0.05 and r["sup_log_slope"] < 0 and r["l2_gap"] < 0.05
    report(8, "singular-function asymptotics", ok,
           f"norm C = {r['norm_fit_C']:.3f}, sup at 12 = {r['sup_mid_at_12']:.4f}, "
           f"L2 gap at n={r['l2_gap_n']} = {r['l2_gap']:.4f} (needs < 0.05)")
    assert r["norm_ok"]
    assert r["sup_mid_at_12"] < 0.05 and r["sup_log_slope"] < 0
    assert r["l2_gap"] < 0.05


def test_c09_continuation_oracle(pipe, report):
    r = acceptance.continuation_oracle(pipe)
    ok = r["max_rel_error"] < 1e-3 and r["zero_output_max"] == 0.0 and r["points"] == 10
    report(9, "continuation oracle", ok, f"max rel error {r['max_rel_error']:.1e} at n_max = {r['n_max']}")
    assert ok


def test_c10_recovery(pipe, report):
    r = acceptance.recovery(pipe)
    ok = r["max_rel_error_midgap"] < 1e-2
    report(10, "end-to-end recovery", ok, f"max rel error at midgap {r['max_rel_error_midgap']:.1e}")
    assert ok


def test_c11_instability(pipe, report):
    r = acceptance.instability_check(pipe)
    ok = r["growth_3_to_10"] >= 10 and r["relative_error"] < 0.2 and r["predicted_rate"] > 0
    report(11, "instability", ok, f"r_10/r_3 = {r['growth_3_to_10']:.0f}, rate {r['rate_at_10']:.4f} "
           f"vs {r['predicted_rate']:.4f}")
    assert ok


def test_c12_stability(pipe, report):
    r = acceptance.stability_check(pipe)
    e, a = np.array(r["empirical_C"]), np.array(r["analytic_C"])
    ok = bool(np.all(e <= a) and np.all(a <= 2 * e) and r["spread"] < 0.1)
    report(12, "stability", ok, f"empirical {e.min():.3f}..{e.max():.3f}, analytic {a.min():.3f}..{a.max():.3f}")
    assert ok


if __name__ == "__main__":
    p = Pipeline(RunConfig())
    for key, result in acceptance.evaluate_all(p).items():
        print(f"{'PASS' if result['pass'] else 'FAIL'} {key}")
