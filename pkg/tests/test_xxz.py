"""XXZ constraint scanning, gauged vectors and the local telescoping identities."""
import cmath

import hypothesis.strategies as st
import numpy as np
import pytest
from hypothesis import given, settings

from coordbethe import xxz
from coordbethe.hamiltonian import local_h_xxz

nonzero = st.complex_numbers(min_magnitude=0.3, max_magnitude=2.0, allow_nan=False, allow_infinity=False)


def test_gauged_vector_examples():
    np.testing.assert_array_equal(xxz.gauged_vector(1, 0.7, 2.0).components, [1, 0.7])
    np.testing.assert_array_equal(xxz.gauged_vector(3, 4.0, 2.0).components, [1, 1])
    for site in range(1, 6):
        np.testing.assert_array_equal(xxz.gauged_vector(site, 0.4 - 1j, 1.0).components, [1, 0.4 - 1j])
    with pytest.raises(ValueError):
        xxz.gauged_vector(1, 0.3, 0.0)


@given(nonzero, nonzero, st.integers(1, 8))
def test_adjacent_sites_ratio(Q, u, site):
    a = xxz.gauged_vector(site, u, Q).components[1]
    b = xxz.gauged_vector(site + 1, u, Q).components[1]
    assert abs(b / a - 1 / Q) < 1e-12


def test_telescope_vector_vanishes_at_q1():
    np.testing.assert_array_equal(xxz.telescope_vector(1.0), [0, 0])


@pytest.mark.parametrize("conv", xxz.CONVENTIONS)
def test_identities_hold_at_q1(conv):
    res = xxz.identity_residuals(1.0, 0.3 + 0.5j, -1.2 + 0.1j, 1, conv)
    assert max(res.values()) <= 1e-13


@settings(max_examples=30)
@given(nonzero, nonzero, st.integers(1, 6))
def test_uu_identity_site_convention(Q, u, site):
    assert xxz.identity_residuals(Q, u, 0.0, site, "site")["uu"] <= 1e-12 * max(1, abs(u))


@settings(max_examples=30)
@given(nonzero.filter(lambda q: abs(q - 1) > 1e-3), nonzero, nonzero)
def test_mixed_identities_obstruction(Q, u, d):
    """h has a zero up-up row, but the mixed right-hand sides have up-up entries Q - 1 and 1/Q - 1."""
    h = local_h_xxz(Q)
    assert not np.any(h[0])
    t = xxz.telescope_vector(Q)
    for conv in xxz.CONVENTIONS:
        u1, u2 = xxz._bond_vectors(Q, u, 1, conv)
        d1, d2 = xxz._bond_vectors(Q, d, 1, conv)
        rhs_du = np.kron(u1, d2) / Q - np.kron(d1, u2) - np.kron(d1, t)
        rhs_ud = Q * np.kron(d1, u2) - np.kron(u1, d2) + np.kron(u1, t)
        assert rhs_du[0] == pytest.approx(Q - 1, abs=1e-12)
        assert rhs_ud[0] == pytest.approx(1 / Q - 1, abs=1e-12)
        res = xxz.identity_residuals(Q, u, d, 1, conv)
        assert res["du"] >= abs(Q - 1) - 1e-12
        assert res["ud"] >= abs(1 / Q - 1) - 1e-12


def test_telescoping_check_reports_all_conventions():
    rep = xxz.telescoping_check(1.3 + 0.2j, 0.4, -0.9j)
    assert set(rep.by_convention) == set(xxz.CONVENTIONS)
    assert rep.convention in xxz.CONVENTIONS
    assert rep.max_residual == min(max(r.values()) for r in rep.by_convention.values())
    with pytest.raises(ValueError):
        xxz.telescoping_check(1.3, 0.4, 0.4)


@settings(max_examples=20, deadline=None)
@given(nonzero, nonzero)
def test_bulk_cancellation(Q, u):
    assert xxz.bulk_telescoping_cancellation(4, Q, u) <= 1e-12 * max(1, abs(u)) ** 4


def test_bulk_cancellation_q1_and_sensitivity():
    assert xxz.bulk_telescoping_cancellation(5, 1.0, 0.8 - 0.3j) <= 1e-14
    assert xxz.bulk_telescoping_cancellation(3, 1.4, 0.6, graded=False) > 1e-3
    with pytest.raises(ValueError):
        xxz.bulk_telescoping_cancellation(2, 1.4, 0.6)


def test_constraint_table_shape_and_order():
    rows = xxz.constraint_defects(xxz.XxzParams(3, 1.2, 0.3, 0.4, 0.5, 0.6, 0.1))
    assert len(rows) == 12
    assert [(r.n, r.eps, r.eps_p) for r in rows[:4]] == [(0, "+", "+"), (0, "+", "-"), (0, "-", "+"), (0, "-", "-")]
    assert [r.n for r in rows] == sorted(r.n for r in rows)


def test_minus_minus_defect():
    Q, s, L = 1.3, 0.2 + 0.1j, 4
    rows = xxz.constraint_defects(xxz.XxzParams(L, Q, 0.3, 0.4, 0.5, 0.6, s))
    for r in rows:
        if (r.eps, r.eps_p) == ("-", "-"):
            assert r.defect == pytest.approx(1 - Q ** (L - 1 - r.n) * cmath.exp(-s))


@given(nonzero, nonzero, nonzero, nonzero, nonzero, nonzero, st.integers(2, 6))
def test_defect_plus_target_independent_of_n(Q, a, b, c, d, s, L):
    p = xxz.XxzParams(L, Q, a, b, c, d, s)
    shifted = {}
    for r in xxz.constraint_defects(p):
        val = r.defect + Q ** (L - 1 - r.n) * cmath.exp(-s)
        shifted.setdefault((r.eps, r.eps_p), []).append(val)
    for vals in shifted.values():
        assert max(abs(v - vals[0]) for v in vals) <= 1e-9 * max(1, abs(vals[0]))


@settings(max_examples=30)
@given(
    st.integers(2, 6), st.data(), nonzero, nonzero, nonzero, nonzero, nonzero,
    st.sampled_from(xxz.SIGNS), st.sampled_from(xxz.SIGNS),
)
def test_engineered_triplet_flagged(L, data, Q, a, b, c, d, eps, eps_p):
    n = data.draw(st.integers(0, L - 1))
    p = xxz.engineered_params(L, Q, a, b, c, d, n, eps, eps_p)
    assert (n, eps, eps_p) in xxz.satisfied_triplets(p)
    row = next(r for r in xxz.constraint_defects(p) if (r.n, r.eps, r.eps_p) == (n, eps, eps_p))
    assert abs(row.defect) <= 1e-12 * max(1, abs(Q) ** L)


def test_random_parameters_satisfy_nothing():
    rng = np.random.default_rng(5)
    for _ in range(20):
        vals = rng.standard_normal(7) + 1j * rng.standard_normal(7)
        assert xxz.satisfied_triplets(xxz.XxzParams(5, *vals[:6])) == []


def test_zero_divisor_marked_per_row():
    rows = xxz.constraint_defects(xxz.XxzParams(3, 1.1, 0.3, 0.4, 0.0, 0.6, 0.0))
    for r in rows:
        if r.eps == "+":
            assert r.defect is None and "gamma" in r.error and not r.satisfied()
        else:
            assert r.defect is not None and r.error is None


def test_params_validation():
    with pytest.raises(ValueError):
        xxz.XxzParams(3, 0.0)
    with pytest.raises(ValueError):
        xxz.XxzParams(1, 1.0)
