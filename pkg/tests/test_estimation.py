import math

import numpy as np
import pytest
from scipy.optimize import minimize

from clfrd import (
    Clfrd,
    FitOptions,
    SeededStream,
    clfrd_loglik,
    clfrd_observed_information,
    clfrd_score,
    fit_baselines,
    fit_clfrd,
    fit_model,
    sample_inverse,
    wald_ci,
)

# published estimates for the three benchmark datasets
PUBLISHED_CLFRD = {
    "students": (6.19e-4, 1.02e-3, 1.7140),
    "appliances": (6.38e-2, 2.58e-2, 2.7986),
    "devices": (1.60e-2, 1.57e-4, 5.57e-3),
}


def _central_diff(data, theta, i, h):
    up, dn = theta.copy(), theta.copy()
    up[i] += h
    dn[i] -= h
    l_up = clfrd_loglik(Clfrd(*up), data)
    l_dn = clfrd_loglik(Clfrd(*dn), data)
    return (l_up - l_dn) / (2 * h), np.finfo(float).eps * max(abs(l_up), abs(l_dn)) / h


def loglik_fd_gradient(model, data, h_scale=1e-6):
    # Richardson-extrapolated central differences (truncation O(h^4)),
    # plus the cancellation floor eps * |loglik| / h of the oracle itself
    theta = model.to_vector()
    grad = np.zeros(3)
    floor = np.zeros(3)
    for i in range(3):
        h = h_scale * (1.0 + abs(theta[i]))
        d1, f1 = _central_diff(data, theta, i, h)
        d2, f2 = _central_diff(data, theta, i, h / 2.0)
        grad[i] = (4.0 * d2 - d1) / 3.0
        floor[i] = max(f1, f2)
    return grad, floor


class TestLoglik:
    def test_published_point_dataset1(self, students):
        m = Clfrd(*PUBLISHED_CLFRD["students"])
        assert -2.0 * clfrd_loglik(m, students) == pytest.approx(396.10, abs=0.05)

    def test_single_observation_identity(self):
        m = Clfrd(1.5, 0.5, 2.0)
        assert clfrd_loglik(m, [0.7]) == pytest.approx(float(m.log_pdf(0.7)), rel=1e-14)

    def test_equals_log_pdf_sum(self, devices):
        m = Clfrd(0.02, 1e-4, 0.5)
        assert clfrd_loglik(m, devices) == pytest.approx(float(np.sum(m.log_pdf(devices))), abs=1e-8)

    def test_rejects_nonpositive_data(self):
        with pytest.raises(ValueError):
            clfrd_loglik(Clfrd(1, 1, 1), [1.0, 0.0, 2.0])


class TestScore:
    def test_matches_finite_differences(self, students, appliances, devices):
        rng = np.random.default_rng(4242)
        for data in (students, appliances, devices):
            scale = 1.0 / data.mean()
            for _ in range(20):
                theta = np.exp(rng.uniform(-1.5, 1.5, 3)) * (scale, scale**2, 1.0)
                m = Clfrd(*theta)
                analytic = clfrd_score(m, data)
                fd, floor = loglik_fd_gradient(m, data)
                tol = 1e-5 * np.maximum(1.0, np.abs(fd)) + 8.0 * floor
                assert np.all(np.abs(analytic - fd) <= tol), (theta, analytic, fd, tol)

    def test_vanishes_at_interior_optimum(self, students):
        fit = fit_clfrd(students)
        assert np.max(np.abs(clfrd_score(fit.model, students))) < 1e-4 * students.size

    def test_constant_data_stays_finite(self):
        m = Clfrd(1.0, 1.0, 1.0)
        assert np.all(np.isfinite(clfrd_score(m, np.full(10, 2.5))))


class TestObservedInformation:
    def test_matches_score_differences(self, students):
        fit = fit_clfrd(students)
        theta = fit.model.to_vector()
        info = clfrd_observed_information(fit.model, students)
        fd = np.zeros((3, 3))
        for i in range(3):
            h = 1e-5 * (1.0 + abs(theta[i]))
            up, dn = theta.copy(), theta.copy()
            up[i] += h
            dn[i] -= h
            fd[:, i] = -(clfrd_score(Clfrd(*up), students) - clfrd_score(Clfrd(*dn), students)) / (2 * h)
        np.testing.assert_allclose(info, fd, rtol=1e-4, atol=1e-4 * (1 + np.abs(fd).max()))

    def test_symmetry(self, devices):
        info = clfrd_observed_information(Clfrd(0.02, 2e-4, 0.1), devices)
        np.testing.assert_array_equal(info, info.T)

    def test_published_covariance_dataset3(self, devices):
        # inverse information at the published triple reproduces the
        # published variance diagonal
        m = Clfrd(*PUBLISHED_CLFRD["devices"])
        cov = np.linalg.inv(clfrd_observed_information(m, devices))
        published = (5.237884e-5, 9.795843e-9, 2.409978e-1)
        for got, want in zip(np.diag(cov), published):
            assert got == pytest.approx(want, rel=0.20)


class TestFitClfrd:
    def test_dataset2_reproduces_published_fit(self, appliances):
        fit = fit_clfrd(appliances)
        assert fit.converged
        assert fit.neg2_loglik <= 143.28 + 0.05
        assert fit.params["alpha"] == pytest.approx(6.38e-2, rel=0.02)
        assert fit.params["beta"] == pytest.approx(2.58e-2, rel=0.02)
        assert fit.params["lambda"] == pytest.approx(2.7986, rel=0.02)

    def test_refit_from_optimum_is_fixed_point(self, students):
        fit = fit_clfrd(students)
        opts = FitOptions(optimizer_kind="local", start=tuple(fit.model.to_vector()))
        again = fit_clfrd(students, opts)
        assert again.neg2_loglik >= fit.neg2_loglik - 1e-6

    def test_simulated_recovery_smoke(self):
        truth = Clfrd(0.5, 0.5, 0.5)
        opts = FitOptions(optimizer_kind="local", start=(0.5, 0.5, 0.5),
                          max_iterations=100, compute_covariance=False)
        estimates = []
        for r in range(30):
            data = sample_inverse(truth, 300, SeededStream(888, r))
            fit = fit_clfrd(data, opts)
            if fit.converged:
                estimates.append(fit.model.to_vector())
        est = np.array(estimates)
        assert est.shape[0] >= 25
        assert np.all(est.std(axis=0) > 0)
        # loose sanity band around the truth
        assert np.abs(est[:, 0].mean() - 0.5) < 0.2

    def test_minimum_sample_size(self):
        with pytest.raises(ValueError):
            fit_clfrd([1.0, 2.0, 3.0])

    def test_local_requires_start(self):
        with pytest.raises(ValueError):
            fit_clfrd([1.0, 2.0, 3.0, 4.0], FitOptions(optimizer_kind="local"))

    def test_devices_boundary_fit(self, devices):
        # the likelihood supremum for this dataset is the plain
        # linear-failure-rate limit of the compounding ridge
        fit = fit_clfrd(devices)
        assert fit.converged
        assert fit.boundary
        assert fit.neg2_loglik == pytest.approx(476.127, abs=0.01)

    def test_profile_sanity(self, students, appliances):
        for data in (students, appliances):
            fit = fit_clfrd(data)
            base = fit.loglik
            theta = fit.model.to_vector()
            for i in range(3):
                for bump in (0.95, 1.05):
                    perturbed = theta.copy()
                    perturbed[i] *= bump
                    assert clfrd_loglik(Clfrd(*perturbed), data) <= base + 1e-9

    def test_log_scale_matches_natural_scale_run(self, students):
        fit = fit_clfrd(students)

        def neg_ll(theta):
            if np.any(theta <= 0):
                return math.inf
            return -clfrd_loglik(Clfrd(*theta), students)

        m = students.mean()
        direct = minimize(neg_ll, (1 / m, 1 / m**2, 1.0), method="Nelder-Mead",
                          options=dict(xatol=1e-12, fatol=1e-14, maxiter=8000, maxfev=16000))
        assert fit.neg2_loglik <= 2.0 * direct.fun + 1e-6

    def test_information_positive_definite_at_optima(self, students, appliances, devices):
        for data in (students, appliances, devices):
            fit = fit_clfrd(data)
            eigenvalues = np.linalg.eigvalsh(clfrd_observed_information(fit.model, data))
            assert np.all(eigenvalues > 0.0)


class TestWaldCi:
    def test_z_value(self, students):
        fit = fit_clfrd(students)
        ci = wald_ci(fit, 0.95)
        z = (ci["alpha"][1] - fit.params["alpha"]) / fit.std_errors["alpha"]
        assert z == pytest.approx(1.959964, abs=1e-6)

    def test_width_identity(self, students):
        fit = fit_clfrd(students)
        ci = wald_ci(fit, 0.9)
        from scipy.special import ndtri

        z = ndtri(0.95)
        for name, (lo, hi) in ci.items():
            assert hi - lo == pytest.approx(2.0 * z * fit.std_errors[name], rel=1e-12)

    def test_simulated_coverage(self):
        # set 8 at n = 300: empirical alpha coverage of the 95% interval
        truth = Clfrd(0.5, 0.5, 0.5)
        opts = FitOptions(optimizer_kind="local", start=(0.5, 0.5, 0.5), max_iterations=100)
        hits = total = 0
        for r in range(500):
            data = sample_inverse(truth, 300, SeededStream(424242, r))
            fit = fit_clfrd(data, opts)
            if not fit.converged or fit.ci is None:
                continue
            lo, hi = fit.ci["alpha"]
            total += 1
            hits += lo <= 0.5 <= hi
        assert total > 450
        assert 0.85 <= hits / total <= 0.99


class TestBaselineFits:
    def test_exponential_closed_form(self, students):
        fit = fit_model("ed", students)
        assert fit.params["lambda"] == pytest.approx(3.86e-2, abs=1e-4)

    def test_rayleigh_closed_form(self, students):
        fit = fit_model("rd", students)
        assert fit.params["sigma"] == pytest.approx(22.4669, abs=1e-3)

    def test_rayleigh_devices(self, devices):
        fit = fit_model("rd", devices)
        assert fit.params["sigma"] == pytest.approx(39.6472, abs=1e-3)

    def test_ged_dataset3(self, devices):
        fit = fit_model("ged", devices)
        assert fit.neg2_loglik == pytest.approx(480.00, abs=0.05)
        assert fit.params["lambda"] == pytest.approx(1.87e-2, rel=0.01)
        assert fit.params["alpha"] == pytest.approx(0.7802, rel=0.01)

    def test_lfr_dataset2(self, appliances):
        fit = fit_model("lfrd", appliances)
        assert fit.params["alpha"] == pytest.approx(0.3254, rel=0.01)
        assert fit.params["beta"] == pytest.approx(1.47e-2, rel=0.02)

    def test_fit_baselines_keys(self, students):
        fits = fit_baselines(students)
        assert set(fits) == {"lfrd", "rd", "ed", "ged"}
        assert all(f.converged for f in fits.values())

    def test_unknown_model(self, students):
        with pytest.raises(ValueError):
            fit_model("weibull", students)
