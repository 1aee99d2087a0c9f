"""Monte Carlo harness: estimators, test functions, verification reports."""

import json
import math

import numpy as np
import pytest

import orlicz_conc.empirics as em
from orlicz_conc import (BobkovLedouxCap, GrowthEnvelope, InputError,
                         MultiIndexMatrix, NuMeasure, PhiSpec, PowerNorm,
                         SamplerSpec, StandardGaussian, batch_se,
                         comparison_check, empirical_entropy,
                         empirical_moment, enlargement_mc, euclidean_norm,
                         exp_tilt, halfspace_distance, linear, max_coordinate,
                         mlsi_report, mlsi_residual, quadratic_form, sample,
                         top_mass_fraction, verify_centered, verify_nu_logp)

ENV22 = GrowthEnvelope(K=1.0, alpha=2.0, beta=2.0, D=2.0, d=0.0)
SPEC2 = PowerNorm(dim=2, norm=2.0, a=2.0)


# ---------------------------------------------------------------------------
# estimators

def test_empirical_moment_exact_small_cases():
    assert empirical_moment(np.array([3.0, 4.0]), 2.0) == pytest.approx(
        math.sqrt(12.5), rel=1e-12)
    assert empirical_moment(np.array([-2.0, 2.0]), 5.0) == pytest.approx(2.0, rel=1e-12)


def test_empirical_moment_is_stable_at_high_p():
    vals = np.array([1.0, 2.0])
    want = ((1.0 + 2.0 ** 128) / 2.0) ** (1.0 / 128.0)
    assert empirical_moment(vals, 128.0) == pytest.approx(want, rel=1e-12)
    big = np.full(1000, 1e12)
    assert empirical_moment(big, 64.0) == pytest.approx(1e12, rel=1e-10)


def test_empirical_moment_monotone_in_p():
    rng = np.random.default_rng(0)
    v = rng.standard_normal(500)
    ms = [empirical_moment(v, p) for p in (1.0, 2.0, 4.0, 16.0, 64.0)]
    assert all(a <= b * (1 + 1e-12) for a, b in zip(ms, ms[1:]))


def test_empirical_entropy_two_point_value():
    # Ent of {1, e} under the empirical measure, computed by hand
    want = math.e / 2.0 - (1.0 + math.e) / 2.0 * math.log((1.0 + math.e) / 2.0)
    assert empirical_entropy(np.array([1.0, math.e])) == pytest.approx(want, rel=1e-9)
    assert empirical_entropy(np.full(64, 3.7)) == pytest.approx(0.0, abs=1e-9)


def test_batch_se_basics():
    assert batch_se(np.full(640, 2.0), np.mean) == 0.0
    rng = np.random.default_rng(1)
    v = rng.standard_normal(32000)
    se = batch_se(v, np.mean)
    ref = 1.0 / math.sqrt(32000)
    assert 0.5 * ref <= se <= 2.0 * ref


def test_top_mass_fraction_range():
    rng = np.random.default_rng(2)
    v = rng.standard_normal(1000)
    f = top_mass_fraction(v, 32.0)
    assert 0.0 < f <= 1.0
    assert top_mass_fraction(v[:5], 8.0, k=10) == pytest.approx(1.0, rel=1e-12)


# ---------------------------------------------------------------------------
# test functions

def test_linear_and_quadratic_builtins():
    theta = np.array([1.0, -2.0])
    f = linear(theta)
    X = np.array([[1.0, 1.0], [2.0, 0.0]])
    np.testing.assert_allclose(f.f(X), [-1.0, 2.0])
    np.testing.assert_allclose(f.grad(X), [theta, theta])

    M = np.array([[2.0, 1.0], [1.0, 3.0]])
    q = quadratic_form(MultiIndexMatrix(2, 2, M, symmetric=True))
    np.testing.assert_allclose(q.f(X), np.einsum("ni,ij,nj->n", X, M, X), rtol=1e-12)
    np.testing.assert_allclose(q.grad(X), 2.0 * X @ M, rtol=1e-12)
    assert q.hess_hs == pytest.approx(2.0 * float(np.linalg.norm(M)), rel=1e-12)
    assert q.hess_op == pytest.approx(
        2.0 * float(np.linalg.svd(M, compute_uv=False)[0]), rel=1e-12)


def test_norm_and_max_builtins():
    X = np.array([[3.0, 4.0], [0.5, -0.1]])
    e = euclidean_norm()
    np.testing.assert_allclose(e.f(X), [5.0, math.hypot(0.5, 0.1)], rtol=1e-12)
    np.testing.assert_allclose(e.grad(X)[0], [0.6, 0.8], rtol=1e-12)
    m = max_coordinate()
    np.testing.assert_allclose(m.f(X), [4.0, 0.5])
    np.testing.assert_allclose(m.grad(X), [[0.0, 1.0], [1.0, 0.0]])


def test_exp_tilt_values_and_gradient():
    theta = np.array([0.5, 0.0])
    g = exp_tilt(theta)
    X = np.array([[2.0, 7.0]])
    assert g.f(X)[0] == pytest.approx(math.e, rel=1e-12)
    np.testing.assert_allclose(g.grad(X)[0], theta * math.e, rtol=1e-12)


def test_halfspace_distance_gauge_values():
    f = halfspace_distance(0.0, SPEC2)
    X = np.array([[1.5, 0.3], [-2.0, 5.0]])
    # Psi*((x1)_+ e1) = x1^2/4 on the positive side, 0 otherwise
    np.testing.assert_allclose(f.f(X), [0.5625, 0.0], rtol=1e-9)
    g = f.grad(X)
    assert g[0, 0] == pytest.approx(0.75, rel=1e-4)
    assert abs(g[0, 1]) <= 1e-8
    np.testing.assert_allclose(g[1], [0.0, 0.0], atol=1e-8)


# ---------------------------------------------------------------------------
# verification scenarios

def test_verify_centered_report_identities():
    fam = StandardGaussian(n=2)
    theta = np.array([1.0, 0.0])
    rep = verify_centered(fam, linear(theta), SPEC2, ENV22,
                          np.array([2.0, 4.0, 8.0]), 20000, 3)
    # gradient gauge of a linear map is exact: rhs = sqrt(p) |theta|_2
    np.testing.assert_allclose(rep.rhs, np.sqrt(rep.p_grid), rtol=1e-9)
    np.testing.assert_allclose(rep.ratio, rep.lhs / rep.rhs, rtol=1e-12)
    assert rep.fitted == pytest.approx(float(np.max(rep.ratio)), rel=1e-12)
    assert 0.4 <= rep.fitted <= 1.2
    assert rep.flags == {}
    assert rep.meta["env"]["beta"] == 2.0


def test_verify_centered_flags_heavy_tail_estimates():
    fam = StandardGaussian(n=2)
    rep = verify_centered(fam, linear(np.array([1.0, 0.0])), SPEC2, ENV22,
                          np.array([2.0, 128.0]), 4000, 4)
    assert any(p > 64.0 for p in map(float, rep.flags))


def test_verify_centered_deterministic_and_thread_invariant(monkeypatch):
    fam = StandardGaussian(n=2)
    args = (fam, linear(np.array([0.0, 1.0])), SPEC2, ENV22,
            np.array([2.0, 4.0]), 30000, 5)
    monkeypatch.setenv(em.THREADS_ENV, "1")
    one = verify_centered(*args)
    monkeypatch.setenv(em.THREADS_ENV, "4")
    four = verify_centered(*args)
    np.testing.assert_array_equal(one.lhs, four.lhs)
    np.testing.assert_array_equal(one.lhs_se, four.lhs_se)
    assert one.fitted == four.fitted


def test_verify_nu_logp_small_run_passes():
    rep = verify_nu_logp(np.array([2.0, 4.0]), 20000, 1)
    assert rep.all_passed
    np.testing.assert_allclose(rep.lower, np.log([2.0, 4.0]) / (2.0 * math.e), rtol=1e-12)
    np.testing.assert_allclose(rep.upper, rep.l1 + np.log([2.0, 4.0]), rtol=1e-12)


def test_comparison_check_linear_map_is_exact_in_law():
    # <grad f, Z> for linear f reproduces theta . Z, so the ratio sits near 1
    fam = StandardGaussian(n=3)
    theta = np.array([1.0, 2.0, -2.0])
    rep = comparison_check(fam, PhiSpec(s=2.0), linear(theta),
                           np.array([2.0, 4.0]), 30000, 6)
    assert np.all(np.isfinite(rep.ratio))
    assert np.all((rep.ratio > 0.3) & (rep.ratio < 3.0))


def test_enlargement_requires_half_mass_start():
    # the base halfspace {x1 <= m} must carry at least median mass
    with pytest.raises(InputError):
        enlargement_mc(StandardGaussian(n=2), -10.0, SPEC2,
                       np.array([0.25]), 5000, 7)


def test_enlargement_radius_and_mass():
    curve = enlargement_mc(StandardGaussian(n=2), 0.0, SPEC2,
                           np.array([0.25, 1.0]), 50000, 8)
    np.testing.assert_allclose(curve.radius, [1.0, 2.0], rtol=1e-9)
    assert np.all(np.isnan(curve.bound))
    from scipy import stats
    for u, emp, se in zip(curve.u_grid, curve.emp, curve.se):
        assert abs(emp - stats.norm.cdf(2.0 * math.sqrt(u))) <= 4.0 * se


def test_mlsi_report_gaussian_tilt_is_tight():
    rep = mlsi_report(StandardGaussian(n=2), exp_tilt(np.array([0.5, 0.0])),
                      SPEC2, 2.0, 100000, 9)
    assert not rep.infinite
    assert abs(rep.residual) <= 5.0 * rep.se
    assert rep.residual == pytest.approx(
        mlsi_residual(StandardGaussian(n=2), exp_tilt(np.array([0.5, 0.0])),
                      SPEC2, 2.0, 100000, 9), rel=1e-12)


def test_mlsi_rejects_sign_changing_observables():
    with pytest.raises(InputError):
        mlsi_report(StandardGaussian(n=2), max_coordinate(), SPEC2, 2.0, 2000, 10)


def test_mlsi_infinite_when_the_gauge_caps():
    spec = BobkovLedouxCap(dim=2, threshold=0.1)
    rep = mlsi_report(StandardGaussian(n=2), exp_tilt(np.array([1.0, 0.0])),
                      spec, 2.0, 2000, 11)
    assert rep.infinite
    assert math.isinf(rep.residual)


# ---------------------------------------------------------------------------
# report output

def test_reports_serialize_and_write_csv(tmp_path):
    rep = verify_centered(StandardGaussian(n=2), linear(np.array([1.0, 0.0])),
                          SPEC2, ENV22, np.array([2.0, 4.0]), 5000, 12)
    d = rep.to_json_dict()
    json.dumps(d)
    assert "meta" in d and "ratio" in d
    path = str(tmp_path / "rep.csv")
    rep.to_csv(path)
    with open(path) as fh:
        head = fh.readline()
    assert head.startswith("# config: ")
    json.loads(head[len("# config: "):])
    data = np.loadtxt(path, delimiter=",", comments="#", skiprows=2)
    assert data.shape[0] == 2

    nu = verify_nu_logp(np.array([2.0]), 5000, 13)
    npath = str(tmp_path / "nu.csv")
    nu.to_csv(npath)
    assert "emp" in open(npath).read()
