import numpy as np
import pytest

from gaphilbert import AsymptoticModel, lambda_asymptotic_slope
from gaphilbert.acceptance import asymptotic_table
from gaphilbert.asymptotics import align, l2_norm


def test_slope(surface):
    assert lambda_asymptotic_slope(surface) == pytest.approx(2.27264497, rel=1e-8)


def test_f_tilde_is_imaginary(pipe):
    tab = pipe.model.table(pipe.spectral.interior.x)
    ft = pipe.model.f_tilde(7, tab)
    assert np.abs(ft.real).max() == 0.0
    assert np.isrealobj(pipe.model.h_tilde(7, pipe.model.table(pipe.spectral.exterior.x)))


def test_branches_agree_in_modulus(asym_pipe):
    m = asym_pipe.model
    tab = m.table(asym_pipe.spectral.interior.x)
    for n in (3, 6, 9):
        u1, u2 = m.upsilon(n, tab, 1), m.upsilon(n, tab, -1)
        np.testing.assert_allclose(np.abs(u1), np.abs(u2), rtol=1e-9)


def test_default_branch_avoids_degenerate_one(pipe):
    t = pipe.model.triple(6)
    assert np.isfinite(t.prefactor)
    assert t.lambda_model == pytest.approx(np.exp(-pipe.scan.roots[6]))


def test_norms_approach_one(pipe):
    rows = asymptotic_table(pipe)
    dev = np.array([abs(r["norm"] - 1) for r in rows])
    assert np.all(np.diff(dev) < 0)
    n = np.arange(5, len(rows))
    assert np.all(dev[5:] * n < 0.16)


@pytest.mark.parametrize("which", ["pipe", "asym_pipe"])
def test_sup_error_on_middle(which, request):
    rows = asymptotic_table(request.getfixturevalue(which))
    sup = np.array([r["sup_mid"] for r in rows])
    n = np.arange(len(rows))
    assert sup[12] < 0.05
    assert np.polyfit(np.log(n[2:]), np.log(sup[2:]), 1)[0] < 0


def test_exterior_model_tracks_h_hat(pipe):
    sp, m = pipe.spectral, pipe.model
    tab = m.table(sp.exterior.x)
    W = sp.exterior.w
    gaps = []
    for n in (4, 8, 12):
        al, _ = align(sp.h_hat(n), m.h_tilde(n, tab), W)
        gaps.append(l2_norm(sp.h_hat(n) - al, W))
    assert gaps[-1] < 0.08
    assert gaps == sorted(gaps, reverse=True)


def test_weighted_model_matches_weighted_functions(pipe):
    sp, m = pipe.spectral, pipe.model
    tab = m.table(sp.interior.x)
    fw = m.f_tilde_weighted(10, tab, sp.interior.wfun)
    ref = sp.f_weighted(10)
    al, _ = align(ref, fw, sp.interior.w / sp.interior.wfun)
    assert l2_norm(ref - al, sp.interior.w / sp.interior.wfun) < 0.1


def test_missing_crossing(surface, ctx):
    m = AsymptoticModel(surface, [1.0, 2.0], ctx)
    with pytest.raises(IndexError):
        m.triple(2)


def test_align_flips_sign():
    w = np.ones(4)
    ref = np.array([1.0, 2.0, -1.0, 0.5])
    out, s = align(ref, -ref, w)
    assert s == -1.0
    np.testing.assert_array_equal(out, ref)
