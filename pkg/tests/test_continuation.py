import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.polynomial import polynomial as P

from gaphilbert.continuation import (decompose, decompose_psi, direct_psi, phantom_phi, pv_integral,
                                     pv_weighted_full, recover_roi)


def smooth(x):
    return np.exp(np.asarray(x) / 4)


@pytest.fixture(scope="module")
def series(pipe):
    sp = pipe.spectral
    return decompose(sp, pipe.surface, smooth(sp.exterior.x))


def test_orthonormal_projection(pipe):
    sp = pipe.spectral
    s = decompose(sp, pipe.surface, sp.h_weighted(3), 12)
    np.testing.assert_allclose(s.phi_n, np.eye(sp.n_resolved)[3], atol=1e-8)


def test_parseval(pipe):
    sp = pipe.spectral
    ge = sp.exterior
    s = decompose(sp, pipe.surface, smooth(ge.x), 12)
    norm2 = np.sum(ge.w * smooth(ge.x) ** 2 / ge.wfun)
    assert np.sum(s.phi_n[:12] ** 2) == pytest.approx(norm2, abs=1e-6)


def test_coefficient_relation(series, pipe):
    lam = pipe.spectral.lam[: len(series.psi_n)]
    np.testing.assert_array_equal(series.psi_n, 2 * lam * series.phi_n)
    assert np.all(np.abs(series.psi_n) <= 2 * lam * np.abs(series.phi_n).max())


def test_oracle_match(series, pipe):
    z = pipe.gap_points(per_gap=5)
    direct = direct_psi(pipe.geometry, smooth, z)
    assert np.max(np.abs(series.value(z) - direct) / np.abs(direct)) < 1e-3


def test_reproduces_psi_on_interior(series, pipe):
    xi = pipe.spectral.interior.x
    np.testing.assert_allclose(series.value(xi), direct_psi(pipe.geometry, smooth, xi), atol=1e-6)


def test_zero_data(pipe):
    sp = pipe.spectral
    s = decompose(sp, pipe.surface, np.zeros(len(sp.exterior.x)))
    assert np.all(s.value(pipe.gap_points()) == 0.0)


def test_tail_bound_monotone(pipe):
    sp = pipe.spectral
    z = np.array([-1.5, 1.2, 1.8])
    bounds = [decompose(sp, pipe.surface, smooth(sp.exterior.x), m).tail_bound(z) for m in range(1, sp.n_resolved + 1)]
    assert np.all(np.diff(np.array(bounds), axis=0) < 0)


def test_absolute_convergence_certificate(series, pipe):
    sp = pipe.spectral
    z = pipe.gap_points(per_gap=10, inner=0.9)
    inc = series.increments(z)
    for m in range(series.n_max - 1):
        tb = decompose(sp, pipe.surface, smooth(sp.exterior.x), m + 1).tail_bound(z)
        assert np.all(inc[:, -1] - inc[:, m] <= tb)


def test_evaluate_flags_loose_bounds(pipe):
    sp = pipe.spectral
    s = decompose(sp, pipe.surface, smooth(sp.exterior.x), 3, tol=1e-12)
    _, tb, ok = s.evaluate(np.array([1.5]))
    assert not ok[0] and tb[0] > 1e-12


def test_truncation_error_follows_envelope(pipe, surface):
    sp = pipe.spectral
    z = np.linspace(1.05, 1.95, 10)
    reg = surface.g_function(z + 0j, 1).real
    s = decompose(sp, surface, smooth(sp.exterior.x), 6)
    err = np.abs(s.value(z) - direct_psi(pipe.geometry, smooth, z))
    assert np.corrcoef(reg, np.log(err))[0, 1] > 0.99


def test_n_max_beyond_floor(pipe):
    sp = pipe.spectral
    with pytest.raises(ValueError):
        decompose(sp, pipe.surface, smooth(sp.exterior.x), sp.n_resolved + 1)


def test_psi_route_matches_phi_route(series, pipe):
    sp = pipe.spectral
    other = decompose_psi(sp, pipe.surface, series.value(sp.interior.x))
    np.testing.assert_allclose(other.psi_n, series.psi_n, atol=1e-10)


@settings(max_examples=25, deadline=None)
@given(st.floats(-0.95, 0.95))
def test_pv_integral_closed_form(y):
    # PV int_{-1}^{1} x^2/(x - y) dx = 2 y + y^2 ln((1 - y)/(1 + y))
    val = pv_integral(lambda x: x ** 2, -1.0, 1.0, y)[0]
    assert val == pytest.approx(2 * y + y ** 2 * np.log((1 - y) / (1 + y)), abs=1e-10)


def test_pv_integral_outside_is_ordinary():
    val = pv_integral(np.ones_like, -1.0, 1.0, 2.0)[0]
    assert val == pytest.approx(np.log(1 / 3), rel=1e-12)


@pytest.mark.parametrize("coeffs", [[1.0], [0.5, -1.0, 2.0], [1.0, 2.0, -1.0, 0.5, 0.3]])
def test_phantom_closed_form_against_pv(geo, coeffs):
    x = np.linspace(-2.9, 2.9, 9)
    num = pv_weighted_full(geo, lambda y: geo.w_real(y) ** 2 * P.polyval(y, coeffs), x, n=600) / np.pi
    np.testing.assert_allclose(phantom_phi(geo, coeffs)(x), num, atol=1e-8)


def test_constant_phantom_is_linear(geo):
    x = np.linspace(-3, 3, 5)
    np.testing.assert_allclose(phantom_phi(geo, [1.0])(x), geo.center - x, atol=1e-14)


def test_recovery_zero_phantom(pipe):
    res = recover_roi(pipe.spectral, pipe.surface, [0.0], np.array([-1.5, 1.5]))
    assert np.all(res.recovered == 0.0)


def test_recovery_constant_phantom(pipe):
    z = np.array([-1.5, 1.5])
    res = recover_roi(pipe.spectral, pipe.surface, [1.0], z, n_max=10)
    assert res.rel_err.max() < 1e-2


def test_recovery_degrades_away_from_interior(pipe):
    z = np.linspace(1.02, 1.98, 9)
    res = recover_roi(pipe.spectral, pipe.surface, [1.0], z)
    assert np.all(np.diff(res.rel_err) > 0)
    assert len(res.rows()) == 9
