import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gaphilbert import REFERENCE_ENDPOINTS, GapGeometry, GeometryError
from gaphilbert.geometry import cosine_rule, graded_rule


def test_reference_structure():
    geo = GapGeometry(REFERENCE_ENDPOINTS)
    assert geo.genus == 2
    assert geo.cuts == [(-3, -2), (-1, 1), (2, 3)]
    assert geo.gaps == [(-2, -1), (1, 2)]
    assert geo.interior_cuts == [(-1, 1)]
    assert geo.exterior_cuts == [(-3, -2), (2, 3)]
    assert geo.center == 0.0
    assert geo.interior_length() == 2.0


def test_classify():
    geo = GapGeometry(REFERENCE_ENDPOINTS)
    tags = geo.classify([-4.0, -2.5, -1.5, 0.0, 1.5, 2.5, 4.0])
    assert list(tags) == ["outside", "exterior-cut", "gap", "interior-cut", "gap", "exterior-cut", "outside"]


@pytest.mark.parametrize("bad", [[-3, -2, -1, 1, 2], [-3, -2, 1, 2], [0, 1, 2, 3, 4, np.nan]])
def test_bad_shape_or_values(bad):
    with pytest.raises(GeometryError):
        GapGeometry(bad)


def test_unsorted_names_the_pair():
    with pytest.raises(GeometryError, match=r"a_3=1.0 >= a_4=-1.0"):
        GapGeometry([-3, -2, 1, -1, 2, 3])


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-50, 50, allow_nan=False), min_size=6, max_size=10, unique=True))
def test_any_sorted_even_list_is_accepted(vals):
    vals = sorted(vals)[: 2 * (len(vals) // 2)]
    if np.min(np.diff(vals)) < 1e-6:
        return
    geo = GapGeometry(vals)
    assert geo.genus == len(vals) // 2 - 1
    assert len(geo.gaps) == geo.genus


def test_weight_and_radical():
    geo = GapGeometry(REFERENCE_ENDPOINTS)
    assert geo.weight_w(0.0) == pytest.approx(3.0)
    x = np.array([-2.5, -1.5, 0.3, 1.5, 2.5])
    eps = 1e-9
    np.testing.assert_allclose(geo.radical_R(x + 1j * eps), geo.R_plus(x), atol=1e-6)
    np.testing.assert_allclose(geo.radical_R(x - 1j * eps), geo.R_minus(x), atol=1e-6)
    # R is real in gaps and purely imaginary on cuts
    rp = geo.R_plus(x)
    assert np.all(np.abs(rp[[1, 3]].imag) < 1e-14)
    assert np.all(np.abs(rp[[0, 2, 4]].real) < 1e-14)


def test_radical_flags_branch_points():
    geo = GapGeometry(REFERENCE_ENDPOINTS)
    val, flag = geo.radical_R(np.array([-1.0 + 0j]), return_flag=True)
    assert flag and val[0] == 0


@pytest.mark.parametrize("rule", [cosine_rule, graded_rule])
def test_rules_integrate_chebyshev_weight(rule):
    r = rule(-1.0, 1.0, 64)
    # int_{-1}^{1} x^2 / sqrt(1 - x^2) dx = pi / 2
    vals = r.nodes ** 2 / np.sqrt(r.dist_lo * r.dist_hi)
    assert r.integrate(vals) == pytest.approx(np.pi / 2, rel=1e-8)


def test_scaled_geometry():
    geo = GapGeometry(REFERENCE_ENDPOINTS).scaled(2.0, 1.0)
    np.testing.assert_allclose(geo.a, [-5, -3, -1, 3, 5, 7])
