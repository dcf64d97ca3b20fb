import io
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bestreply import bounds
from bestreply.smoothness import (
    CSV_COLUMNS,
    case3_term,
    check_lemma_inequalities,
    check_unweighted_inequality,
    check_weighted_inequality,
    default_weighted_grid,
    sign_changes,
    verify_g_max,
    weighted_certificate,
    write_violations_csv,
    z_lemma_endpoint,
)


def _lhs(dr, x, y):
    return Fraction((dr + 1) * (y + 1) ** dr * x - y ** (dr + 1)) + Fraction(y ** (dr + 2) - (y - 1) ** (dr + 2) + dr + 1, dr + 2)


def test_unweighted_d2_no_violations():
    rep = check_unweighted_inequality(2, *bounds.smoothness_params_unweighted(2))
    assert rep.ok
    assert rep.checked_points == 2 * 51 * 50


def test_unweighted_d1_trivial_params():
    rep = check_unweighted_inequality(1, 0.0, 0.0, x_max=1, y_max=1)
    v = [p for p in rep.violations if (p.x, p.y) == (1, 1)]
    assert len(v) == 1
    assert v[0].lhs == 4 and v[0].rhs == 1


def test_x_zero_row_holds_for_any_parameters():
    rep = check_unweighted_inequality(5, math.log10(1e-9), 0.0, x_max=0, y_max=50)
    assert rep.ok


@settings(max_examples=40, deadline=None)
@given(d=st.integers(2, 6), mu=st.floats(0, 1), log_lam=st.floats(-1, 6))
def test_unweighted_matches_fraction_oracle(d, mu, log_lam):
    rep = check_unweighted_inequality(d, log_lam, mu, x_max=6, y_max=6)
    lam, m = Fraction(10.0**log_lam), Fraction(mu)
    expected = sorted(
        (dr, x, y)
        for dr in range(1, d + 1)
        for x in range(7)
        for y in range(1, 7)
        if _lhs(dr, x, y) > lam * x ** (dr + 1) + m * y ** (dr + 1)
    )
    assert sorted((v.d_r, v.x, v.y) for v in rep.violations) == expected


def test_mu_override_falsifies_d2():
    log_lam, _ = bounds.smoothness_params_unweighted(2)
    assert not check_unweighted_inequality(2, log_lam, 0.2).ok


def test_weighted_single_point():
    rep = check_weighted_inequality(1, 2.0, 0.25, grid=[[1.0, 1.0]])
    assert rep.ok
    assert rep.max_slack == pytest.approx(0.25)


def test_weighted_y_zero_axis():
    pts = [[x, 0.0] for x in (0.01, 0.5, 1.0, 7.0)]
    assert check_weighted_inequality(4, 1.0, 0.0, grid=pts).ok


@pytest.mark.parametrize("d", range(1, 11))
def test_weighted_certificate_on_default_grid(d):
    lam, mu = weighted_certificate(d)
    assert check_weighted_inequality(d, lam, mu).ok


def test_weighted_shrunk_lambda_fails():
    lam, mu = weighted_certificate(2)
    assert not check_weighted_inequality(2, lam * 0.9, mu).ok


def test_default_grid_shape():
    g = default_weighted_grid(64)
    assert g.shape == (64 * 64, 2)
    assert g.min() == pytest.approx(2.0**-6) and g.max() == pytest.approx(2.0**6)


def test_g_max_d1():
    res = verify_g_max(1)
    assert res.max_g == pytest.approx(4 + 2 * math.sqrt(3), rel=1e-4)
    assert res.at_z == pytest.approx(1 + math.sqrt(3), abs=1e-3)


@pytest.mark.parametrize("d", range(1, 11))
def test_g_max_equals_psi_power(d):
    res = verify_g_max(d)
    assert res.ok, res


@pytest.mark.parametrize("d", range(1, 11))
def test_g_at_zero_below_max(d):
    m = bounds.mu_hat(d)
    assert 1 / (1 / (d + 1) - m) < bounds.psi(d) ** (d + 1)


def test_g_max_argument_checks():
    with pytest.raises(ValueError):
        verify_g_max(2, samples=100)
    with pytest.raises(ValueError):
        verify_g_max(2, z_max=1.0)


def test_lemma_suite_passes():
    reps = check_lemma_inequalities(200)
    assert set(reps) == {
        "a_case_one",
        "b_term_below_two",
        "c_term_decreasing",
        "c_term_decreasing_k2",
        "d_z_argmax",
        "e_xi_unique",
        "e_xi_unique_variant",
    }
    for name, rep in reps.items():
        assert rep.ok, name


def test_lemma_grid_minimum():
    with pytest.raises(ValueError):
        check_lemma_inequalities(50)


def test_case_one_boundary_equality():
    # d=1, y=1: 1 - 0 + 2 = 3 = (d+2) y^(d+1)
    reps = check_lemma_inequalities(100)
    assert reps["a_case_one"].max_slack == 0


def test_term_below_two_limit():
    val = lambda c, dr: (dr + 2) * math.exp(-1 / c) - dr * math.exp(-(dr + 2) / (c * dr - 1))
    assert val(10.0, 2) < 2
    assert val(1e4, 2) == pytest.approx(2, abs=1e-3)


def test_case3_term_decreasing_sample():
    c = np.linspace(1, 10, 50)
    t = case3_term(c, 4, 2 - 1 / 4)
    assert np.all(np.diff(t) <= 0)


def test_z_argmax_d6_at_endpoint():
    end = z_lemma_endpoint(6)
    assert end == pytest.approx(1 / (2 * bounds.lambert_w(5 / 14)))
    z = np.linspace(0, end, 10001)
    ew = math.exp(bounds.lambert_w(1.27))
    vals = (6 * z) ** 6 * (7 * ew - 5 * z)
    assert int(np.argmax(vals)) == len(z) - 1


def test_sign_changes():
    assert sign_changes([-1, -2, 0, 3, 4]) == 1
    assert sign_changes([1, -1, 1]) == 2


def test_csv_header_always_present():
    rep = check_unweighted_inequality(2, *bounds.smoothness_params_unweighted(2), x_max=3, y_max=3)
    text = write_violations_csv([rep])
    assert text == ",".join(CSV_COLUMNS) + "\n"
    buf = io.StringIO()
    write_violations_csv([check_unweighted_inequality(2, 0.0, 0.2, 3, 3)], buf)
    lines = buf.getvalue().splitlines()
    assert len(lines) > 1 and "\r" not in buf.getvalue()


@pytest.mark.parametrize("d", range(1, 11))
def test_weighted_chain_reproduces_psi_power(d):
    g = verify_g_max(d)
    m = bounds.mu_hat(d)
    beta = d + 1
    lam = g.max_g * (1 / (d + 1) - m)
    assert beta * lam / (1 - beta * m) == pytest.approx(bounds.psi(d) ** (d + 1), rel=1e-4)


@pytest.mark.parametrize("d", range(1, 11))
def test_weighted_falsified_mu_detected(d):
    lam, mu = weighted_certificate(d)
    assert not check_weighted_inequality(d, lam, mu - 0.1).ok


def test_unweighted_min_mu_on_grid_d2():
    # smallest mu that survives the 50x50 grid at d=2 sits well below 1 - 1/d
    log_lam, mu = bounds.smoothness_params_unweighted(2)
    assert check_unweighted_inequality(2, log_lam, 0.23).ok
    assert not check_unweighted_inequality(2, log_lam, 0.229).ok
