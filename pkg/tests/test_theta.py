import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import gamma

from gaphilbert import ThetaContext, constant_W0, find_kappa_tilde, line_W
from gaphilbert.theta import ThetaError

complex_vec = st.tuples(*[st.floats(-2, 2)] * 4).map(lambda t: np.array([t[0] + 1j * t[1], t[2] + 1j * t[3]]))


def test_identity_tau_value_at_zero():
    ctx = ThetaContext(1j * np.eye(2))
    expected = (math.pi ** 0.25 / gamma(0.75)) ** 2
    assert ctx.theta(np.zeros(2)).real == pytest.approx(expected, rel=1e-14)


def test_diagonal_tau_factorizes_into_jacobi_theta():
    mp = pytest.importorskip("mpmath")
    tau = np.diag([1.3j, 0.8j])
    ctx = ThetaContext(tau)
    rng = np.random.default_rng(5)
    for _ in range(5):
        v = rng.uniform(-1, 1, 2) + 1j * rng.uniform(-0.4, 0.4, 2)
        ref = 1
        for k in range(2):
            ref *= complex(mp.jtheta(3, mp.pi * complex(v[k]), mp.exp(1j * mp.pi * complex(tau[k, k]))))
        assert ctx.theta(v) == pytest.approx(ref, rel=1e-12)


@settings(max_examples=50, deadline=None)
@given(complex_vec)
def test_even(ctx, v):
    assert abs(ctx.theta(v) - ctx.theta(-v)) <= 1e-12 * max(1.0, abs(ctx.theta(v)))


@settings(max_examples=50, deadline=None)
@given(complex_vec, st.tuples(*[st.integers(-2, 2)] * 4))
def test_quasi_periodic(ctx, v, shifts):
    mu = np.array(shifts[:2])
    lam = np.array(shifts[2:])
    tau = ctx.tau
    lhs = ctx.theta(v + mu + tau @ lam)
    rhs = np.exp(-2j * np.pi * lam @ v - 1j * np.pi * lam @ tau @ lam) * ctx.theta(v)
    assert abs(lhs - rhs) <= 1e-10 * abs(rhs)


def test_gradient_matches_differences(ctx):
    v = np.array([0.21 + 0.13j, -0.37 + 0.05j])
    h = 1e-6
    fd = [(ctx.theta(v + h * e) - ctx.theta(v - h * e)) / (2 * h) for e in np.eye(2)]
    np.testing.assert_allclose(ctx.grad_theta(v), fd, rtol=1e-7)


def test_truncation_bound(ctx):
    assert ctx.tail_bound() < ctx.tol
    small = ThetaContext(ctx.tau, radius=1)
    v = np.array([0.3 + 0.2j, 0.1 - 0.1j])
    assert abs(small.theta(v) - ctx.theta(v)) > 1e-8


def test_rejects_indefinite():
    with pytest.raises(ThetaError):
        ThetaContext(np.diag([1j, -1j]))


def test_line_is_real_with_unit_step(surface):
    W = line_W(surface, np.array([0.0, 1.7, 9.3]))
    assert np.abs(W.imag).max() < 1e-12
    W0 = line_W(surface, 0.0)
    np.testing.assert_allclose(W0, surface.u_infinity + surface.e(1) / 2 + surface.e(2) / 4, atol=1e-14)
    period = math.pi / surface.tau11.imag
    step = line_W(surface, period) - W0
    assert step[0].real == pytest.approx(1.0, abs=1e-12)


def test_line_constant_is_tied_to_delta(surface):
    L = np.linalg.inv(surface.L_inv)
    expected = L @ surface.delta / (2 * np.pi) + surface.e(2) / 2 + surface.e(1) / 2
    np.testing.assert_allclose(line_W(surface, 0.0), expected, atol=1e-12)


def test_W0_has_half_period_imaginary_part(surface):
    W0 = constant_W0(surface)
    np.testing.assert_allclose(W0.imag, surface.tau1.imag / 2)


def test_reference_roots_closed_form(pipe):
    # for the symmetric reference geometry the crossings sit at P (1/2 + 2m) and P (7/6 + 2m)
    P = pipe.scan.period
    m = np.arange(12)
    expected = np.sort(np.concatenate([P * (0.5 + 2 * m), P * (7 / 6 + 2 * m)]))
    expected = expected[expected < pipe.cfg.kappa_max]
    np.testing.assert_allclose(pipe.scan.roots, expected, atol=1e-9)
    assert pipe.scan.flagged == []


def test_roots_are_zeros(pipe, ctx, surface):
    W0 = constant_W0(surface)
    vals = np.abs(ctx.theta(line_W(surface, pipe.scan.roots) - W0))
    assert vals.max() < 1e-10 * np.median(pipe.scan.values)


def test_mean_spacing_is_the_period(pipe):
    r = pipe.scan.roots
    pairs = r[2::2] - r[:-2:2]
    np.testing.assert_allclose(pairs, 2 * pipe.scan.period, rtol=1e-9)


def test_asymmetric_spacing_and_counts(asym_pipe):
    scan = asym_pipe.scan
    assert np.all(scan.window_counts(10, start=0.0) == 1)
    pairs = scan.roots[7::2] - scan.roots[5:-2:2]
    np.testing.assert_allclose(pairs, 2 * scan.period, rtol=0.05)


def test_rejects_coarse_grid(surface):
    with pytest.raises(ValueError):
        find_kappa_tilde(surface, step=1.0)


def test_rows_mark_roots(pipe):
    rows = pipe.scan.rows()
    assert sum(r[2] for r in rows) == len(pipe.scan.roots)
    assert all(rows[i][0] <= rows[i + 1][0] for i in range(len(rows) - 1))
