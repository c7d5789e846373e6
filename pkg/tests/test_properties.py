import math

import numpy as np
import pytest
from scipy.integrate import quad

from clfrd import (
    Clfrd,
    HazardShape,
    PdfShape,
    SeededStream,
    hazard_shape,
    lr_monotone_check,
    median,
    mit,
    mrl,
    order_stat_pdf,
    pdf_shape,
    raw_moment,
    sample_inverse,
)

from conftest import PARAMETER_SETS

# published reference tables: residual life and inactivity time at age 0.5
MRL_TABLE = {
    (2.0, 2.0, 2.0): 0.2211234,
    (2.0, 2.0, 0.5): 0.2668270,
    (2.0, 0.5, 2.0): 0.2994618,
    (2.0, 0.5, 0.5): 0.3773817,
    (0.5, 2.0, 2.0): 0.2831307,
    (0.5, 2.0, 0.5): 0.3962282,
    (0.5, 0.5, 2.0): 0.5214610,
    (0.5, 0.5, 0.5): 0.7728661,
}
MIT_TABLE = {
    (2.0, 2.0, 2.0): 0.3592062,
    (2.0, 2.0, 0.5): 0.3090133,
    (2.0, 0.5, 2.0): 0.3578331,
    (2.0, 0.5, 0.5): 0.3114150,
    (0.5, 2.0, 2.0): 0.2714062,
    (0.5, 2.0, 0.5): 0.2417515,
    (0.5, 0.5, 2.0): 0.2763928,
    (0.5, 0.5, 0.5): 0.2556945,
}


class TestPdfShape:
    def test_low_alpha_is_unimodal(self):
        assert pdf_shape(Clfrd(0.1, 2.0, 1.0)) is PdfShape.UNIMODAL

    def test_high_alpha_is_decreasing(self):
        assert pdf_shape(Clfrd(2.0, 0.5, 0.5)) is PdfShape.DECREASING

    def test_boundary_goes_decreasing(self):
        # alpha = 1, lam = 1, beta = 2.5 puts the threshold exactly at 1.0
        m = Clfrd(1.0, 2.5, 1.0)
        assert m.beta * (1 + m.lam) / (m.lam + (1 + m.lam) ** 2) == 1.0
        assert pdf_shape(m) is PdfShape.DECREASING

    def test_agrees_with_numeric_scan(self):
        rng = np.random.default_rng(20257)
        for _ in range(200):
            m = Clfrd(*np.exp(rng.uniform(np.log(0.1), np.log(5.0), 3)))
            label = pdf_shape(m)
            x = np.linspace(0.0, m.quantile(0.99), 2000)
            g = m.pdf(x)
            d = np.diff(g)
            scale = 1e-9 * np.max(np.abs(g))
            if label is PdfShape.DECREASING:
                assert np.all(d <= scale)
            else:
                # rises off zero before the eventual decay
                assert d[0] > -scale and np.any(d > scale)


def scan_hazard_pattern(m: Clfrd, points: int = 2000) -> str:
    """Sign pattern of h' from a dense scan: '+', '-+', '+-+', ...

    The window runs far past the 99% quantile because the final upturn of a
    bathtub can sit in the extreme tail.
    """
    x = np.linspace(0.0, m.quantile(1.0 - 1e-9), points)
    h = m.hazard(x)
    d = np.diff(h)
    tol = 1e-9 * np.max(np.abs(h))
    signs = []
    for v in d:
        if abs(v) <= tol:
            continue
        s = "+" if v > 0 else "-"
        if not signs or signs[-1] != s:
            signs.append(s)
    return "".join(signs) or "+"


_ALLOWED_PATTERNS = {
    HazardShape.INCREASING: {"+"},
    HazardShape.BATHTUB: {"-+"},
    HazardShape.INVERSE_BATHTUB: {"+-+"},
}


def near_classifier_boundary(m: Clfrd, tol: float = 1e-4) -> bool:
    # sign scans cannot resolve shapes whose turning values sit within
    # numerical noise of the classifier thresholds
    a2 = m.alpha**2
    h0 = m.beta * (1 + m.lam) - m.lam * a2
    checks = [abs(h0) / (m.beta * (1 + m.lam))]
    if a2 < 3 * m.beta:
        knee = (3 * m.beta - a2) / (2 * m.beta)
        checks.append(abs(math.log(2 * m.lam) - knee))
    return min(checks) < tol


class TestHazardShape:
    def test_bathtub_example(self):
        assert hazard_shape(Clfrd(2.0, 0.5, 2.0)) is HazardShape.BATHTUB

    def test_increasing_example(self):
        assert hazard_shape(Clfrd(0.5, 2.0, 2.0)) is HazardShape.INCREASING

    def test_unclassified_when_no_branch_matches(self):
        # alpha^2 < 3 beta with lam <= 1/2 leaves log(2 lam) <= 0
        assert hazard_shape(Clfrd(0.5, 2.0, 0.3)) is HazardShape.UNCLASSIFIED

    @pytest.mark.parametrize("params", PARAMETER_SETS)
    def test_study_sets_match_sign_scan(self, params):
        m = Clfrd(*params)
        label = hazard_shape(m)
        if label is HazardShape.UNCLASSIFIED:
            pytest.skip("classifier abstains for this triple")
        assert scan_hazard_pattern(m) in _ALLOWED_PATTERNS[label]

    def test_random_triples_match_sign_scan(self):
        rng = np.random.default_rng(99173)
        checked = 0
        for _ in range(200):
            m = Clfrd(*np.exp(rng.uniform(np.log(0.1), np.log(5.0), 3)))
            label = hazard_shape(m)
            if label is HazardShape.UNCLASSIFIED or near_classifier_boundary(m):
                continue
            pattern = scan_hazard_pattern(m)
            assert pattern in _ALLOWED_PATTERNS[label], (m, pattern, label)
            checked += 1
        assert checked > 100


class TestMrl:
    @pytest.mark.parametrize("params,expected", sorted(MRL_TABLE.items()))
    def test_reference_table(self, params, expected):
        assert mrl(Clfrd(*params), 0.5) == pytest.approx(expected, abs=1e-4)

    def test_at_zero_equals_mean(self):
        m = Clfrd(1.2, 0.8, 1.5)
        assert mrl(m, 0.0) == pytest.approx(raw_moment(m, 1), abs=1e-7)

    def test_domain(self):
        with pytest.raises(ValueError):
            mrl(Clfrd(2, 2, 2), -1.0)

    def test_underflow_guard(self):
        with pytest.raises(ArithmeticError):
            mrl(Clfrd(2, 2, 2), 80.0)

    def test_alpha_direction_in_table(self):
        # smaller initial hazard leaves more life after age 0.5
        for beta in (2.0, 0.5):
            for lam in (2.0, 0.5):
                assert MRL_TABLE[(0.5, beta, lam)] > MRL_TABLE[(2.0, beta, lam)]


class TestMit:
    @pytest.mark.parametrize("params,expected", sorted(MIT_TABLE.items()))
    def test_reference_table(self, params, expected):
        assert mit(Clfrd(*params), 0.5) == pytest.approx(expected, abs=1e-4)

    @pytest.mark.parametrize("x", [0.1, 0.5, 1.0, 2.5, 5.0])
    def test_bounds(self, x):
        m = Clfrd(0.5, 0.5, 2.0)
        assert 0.0 < mit(m, x) < x

    def test_continuity(self):
        m = Clfrd(2.0, 0.5, 0.5)
        xs = np.linspace(0.05, 3.0, 60)
        vals = np.array([mit(m, float(x)) for x in xs])
        assert np.max(np.abs(np.diff(vals))) < 0.1

    def test_domain(self):
        with pytest.raises(ValueError):
            mit(Clfrd(2, 2, 2), 0.0)


class TestRawMoment:
    def test_first_moment_is_mrl_at_zero(self):
        m = Clfrd(2, 2, 2)
        assert raw_moment(m, 1) == pytest.approx(mrl(m, 0.0), abs=1e-7)

    @pytest.mark.parametrize("params", PARAMETER_SETS)
    def test_variance_positive(self, params):
        m = Clfrd(*params)
        assert raw_moment(m, 2) - raw_moment(m, 1) ** 2 > 0.0

    def test_monte_carlo_cross_check(self):
        m = Clfrd(2, 2, 2)
        draws = sample_inverse(m, 10**6, SeededStream(314159))
        se = draws.std(ddof=1) / math.sqrt(draws.size)
        assert abs(raw_moment(m, 1) - draws.mean()) <= 3.0 * se

    def test_domain(self):
        with pytest.raises(ValueError):
            raw_moment(Clfrd(2, 2, 2), 0)


class TestMedian:
    def test_equals_half_quantile(self):
        m = Clfrd(2, 2, 2)
        assert median(m) == pytest.approx(m.quantile(0.5), abs=1e-12)

    def test_round_trip(self):
        m = Clfrd(0.5, 2.0, 0.5)
        assert m.cdf(median(m)) == pytest.approx(0.5, abs=1e-9)

    def test_against_bisection(self):
        m = Clfrd(2, 2, 2)
        lo, hi = 0.0, 10.0
        while hi - lo > 1e-12:
            mid = 0.5 * (lo + hi)
            lo, hi = (mid, hi) if m.cdf(mid) < 0.5 else (lo, mid)
        assert median(m) == pytest.approx(0.5 * (lo + hi), abs=1e-10)


class TestOrderStatPdf:
    def test_minimum_closed_form(self):
        m = Clfrd(1.5, 0.5, 1.0)
        n = 7
        for x in (0.0, 0.3, 1.0, 2.0):
            expected = n * m.pdf(x) * m.sf(x) ** (n - 1)
            assert order_stat_pdf(m, n, 1, x) == pytest.approx(expected, abs=1e-12)

    def test_single_sample_identity(self):
        m = Clfrd(2, 2, 2)
        assert order_stat_pdf(m, 1, 1, 0.7) == pytest.approx(m.pdf(0.7), rel=1e-14)

    def test_normalization(self):
        m = Clfrd(2, 2, 2)
        total = quad(lambda t: order_stat_pdf(m, 5, 3, t), 0.0, m.quantile(1 - 1e-12),
                     epsabs=1e-10, limit=200)[0]
        assert total == pytest.approx(1.0, abs=1e-6)

    def test_index_bounds(self):
        m = Clfrd(2, 2, 2)
        with pytest.raises(ValueError):
            order_stat_pdf(m, 5, 0, 1.0)
        with pytest.raises(ValueError):
            order_stat_pdf(m, 5, 6, 1.0)


class TestLrMonotoneCheck:
    GRID = np.arange(0.0, 10.0001, 0.01)

    def test_identical_models(self):
        m = Clfrd(1, 1, 1)
        assert lr_monotone_check(m, m, self.GRID)

    def test_proportional_ordered_pair(self):
        assert lr_monotone_check(Clfrd(1, 1, 1), Clfrd(2, 2, 2), self.GRID)

    def test_crossed_pair_matches_direct_scan(self):
        m1, m2 = Clfrd(2, 1, 1), Clfrd(1, 2, 2)
        expected = bool(
            np.all(np.diff(m1.log_pdf(self.GRID) - m2.log_pdf(self.GRID)) >= -1e-12)
        )
        assert lr_monotone_check(m1, m2, self.GRID) is expected

    def test_grid_validation(self):
        m = Clfrd(1, 1, 1)
        with pytest.raises(ValueError):
            lr_monotone_check(m, m, [3.0, 1.0, 2.0])
        with pytest.raises(ValueError):
            lr_monotone_check(m, m, [-1.0, 0.0, 1.0])
