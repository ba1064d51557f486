from __future__ import annotations

import math
import random

import numpy as np
import pytest

from copytrace.errors import ClassMissing, DegenerateInput, Separation, Singular
from copytrace.stats import (
    DesignMatrix,
    anova_sequential,
    average_ranks,
    build_blob_design,
    build_design,
    fit_logistic,
    null_deviance,
    spearman,
    welch_t,
)
from logistic_fixtures import FROZEN, make_fixture


def _loglik(X, y, beta):
    eta = X @ beta
    return float(y @ eta - np.sum(np.logaddexp(0.0, eta)))


class TestFitLogistic:
    def test_intercept_only_closed_form(self):
        y = np.array([1.0] * 7 + [0.0] * 13)
        X = np.ones((20, 1))
        result = fit_logistic(X, y)
        assert abs(result.coefficients[0] - math.log(7 / 13)) < 1e-10
        assert abs(result.residual_deviance - result.null_deviance) < 1e-9

    def test_matches_frozen_oracle(self):
        X, y = make_fixture("two", 101, 50)
        expected, expected_dev = FROZEN["two"]
        result = fit_logistic(X, y)
        assert result.converged
        assert np.max(np.abs(result.coefficients - np.array(expected))) < 1e-6
        assert abs(result.residual_deviance - expected_dev) < 1e-6

    def test_score_vanishes_at_convergence(self):
        X, y = make_fixture("three", 202, 80)
        result = fit_logistic(X, y)
        mu = 1 / (1 + np.exp(-(X @ result.coefficients)))
        assert np.max(np.abs(X.T @ (y - mu))) < 1e-6

    def test_analytic_score_matches_finite_differences(self):
        rng = np.random.RandomState(42)
        for _ in range(5):
            n, p = 30, 3
            X = np.column_stack([np.ones(n), rng.normal(size=(n, p - 1))])
            y = (rng.rand(n) < 0.5).astype(float)
            beta = rng.normal(scale=0.5, size=p)
            mu = 1 / (1 + np.exp(-(X @ beta)))
            analytic = X.T @ (y - mu)
            h = 1e-6
            for j in range(p):
                step = np.zeros(p)
                step[j] = h
                numeric = (_loglik(X, y, beta + step) - _loglik(X, y, beta - step)) / (2 * h)
                denom = max(abs(numeric), 1e-8)
                assert abs(analytic[j] - numeric) / denom < 1e-4

    def test_pure_noise_predictor_is_null(self):
        rng = np.random.RandomState(8)
        n = 20000
        noise = rng.normal(size=n)
        X = np.column_stack([np.ones(n), noise])
        y = (rng.rand(n) < 0.3).astype(float)
        result = fit_logistic(X, y)
        assert abs(result.odds_ratios[1] - 1.0) < 0.05
        assert result.p_values[1] > 0.05

    def test_tripled_odds_simulation(self):
        rng = np.random.RandomState(1234)
        n = 10000
        flag = (rng.rand(n) < 0.5).astype(float)
        eta = -1.0 + math.log(3.0) * flag
        y = (rng.rand(n) < 1 / (1 + np.exp(-eta))).astype(float)
        result = fit_logistic(np.column_stack([np.ones(n), flag]), y)
        assert 2.7 <= result.odds_ratios[1] <= 3.3

    def test_class_missing(self):
        X = np.ones((5, 1))
        with pytest.raises(ClassMissing):
            fit_logistic(X, np.zeros(5))
        with pytest.raises(ClassMissing):
            fit_logistic(X, np.ones(5))

    def test_singular_design(self):
        x = np.arange(6, dtype=float)
        X = np.column_stack([np.ones(6), x, 2 * x])
        with pytest.raises(Singular):
            fit_logistic(X, np.array([0, 1, 0, 1, 0, 1.0]))

    def test_separation_detected(self):
        x = np.array([-0.6, -0.4, -0.2, 0.2, 0.4, 0.6])
        y = (x > 0).astype(float)
        with pytest.raises(Separation) as exc_info:
            fit_logistic(np.column_stack([np.ones(6), x]), y)
        partial = exc_info.value.result
        assert partial is not None
        assert not partial.converged
        assert np.max(np.abs(partial.coefficients)) > 30

    def test_odds_ratios_recompute_exactly(self):
        X, y = make_fixture("one", 303, 40)
        result = fit_logistic(X, y)
        assert np.array_equal(result.odds_ratios, np.exp(result.coefficients))

    def test_rescaling_invariance(self):
        X, y = make_fixture("two", 101, 50)
        scaled = X.copy()
        scaled[:, 1] = scaled[:, 1] * 100.0
        base = fit_logistic(X, y)
        other = fit_logistic(scaled, y)
        assert abs(other.coefficients[1] * 100.0 - base.coefficients[1]) < 1e-8
        assert abs(other.z_values[1] - base.z_values[1]) < 1e-8
        assert abs(other.p_values[1] - base.p_values[1]) < 1e-8
        assert abs(other.residual_deviance - base.residual_deviance) < 1e-8
        assert abs(other.coefficients[2] - base.coefficients[2]) < 1e-8
        assert abs(other.std_errors[2] - base.std_errors[2]) < 1e-8


class TestAnova:
    def _design(self, X, y, groups):
        columns = [f"c{i}" for i in range(X.shape[1])]
        return DesignMatrix(columns=columns, X=X, y=y, term_groups=groups)

    def test_nested_drops_match_oracle_fits(self):
        X, y = make_fixture("three", 202, 80)
        design = self._design(X, y, [("x1", [1]), ("x2", [2]), ("x3", [3])])
        rows = anova_sequential(design)
        assert rows[0].term == "NULL"
        assert abs(rows[0].resid_deviance - null_deviance(y)) < 1e-9
        # oracle: independent nested fits
        prev = null_deviance(y)
        for k, row in enumerate(rows[1:], start=1):
            sub = fit_logistic(X[:, : k + 1], y)
            assert abs(row.resid_deviance - sub.residual_deviance) < 1e-6
            assert abs(row.deviance_drop - (prev - sub.residual_deviance)) < 1e-6
            prev = sub.residual_deviance
        assert abs(rows[-1].resid_deviance - FROZEN["three"][1]) < 1e-6

    def test_permuted_order_total_drop_identical(self):
        X, y = make_fixture("dummies", 404, 120)
        design_a = self._design(X, y, [("x1", [1]), ("g", [2, 3])])
        design_b = self._design(
            X[:, [0, 2, 3, 1]], y, [("g", [1, 2]), ("x1", [3])]
        )
        total_a = sum(r.deviance_drop for r in anova_sequential(design_a)[1:])
        total_b = sum(r.deviance_drop for r in anova_sequential(design_b)[1:])
        assert abs(total_a - total_b) < 1e-6  # telescoping sum

    def test_constant_term_contributes_nothing(self):
        X, y = make_fixture("one", 303, 40)
        with_const = build_design(
            numeric=[("x1", X[:, 1]), ("flat", np.full(len(y), 3.25))],
            categorical=[],
            y=y,
        )
        without = build_design(numeric=[("x1", X[:, 1])], categorical=[], y=y)
        assert "flat" in with_const.dropped
        drop_with = anova_sequential(with_const)[-1].resid_deviance
        drop_without = anova_sequential(without)[-1].resid_deviance
        assert abs(drop_with - drop_without) < 1e-6


class TestSpearman:
    def test_strictly_increasing(self):
        assert spearman([1, 2, 3, 4], [10, 20, 30, 40]) == pytest.approx(1.0, abs=1e-12)

    def test_negation(self):
        x = [3.0, 1.0, 4.0, 1.5, 5.0]
        assert spearman(x, [-v for v in x]) == pytest.approx(-1.0, abs=1e-12)

    def test_tied_fixture_matches_quadratic_oracle(self):
        rng = random.Random(77)
        x = [rng.choice([1, 2, 2, 3, 5, 5, 5, 8]) for _ in range(20)]
        y = [rng.choice([0, 0, 1, 1, 2, 4]) for _ in range(20)]

        def ranks_quadratic(v):
            out = []
            for value in v:
                smaller = sum(1 for other in v if other < value)
                equal = sum(1 for other in v if other == value)
                out.append(smaller + (equal + 1) / 2)
            return out

        rx, ry = ranks_quadratic(x), ranks_quadratic(y)
        mx = sum(rx) / len(rx)
        my = sum(ry) / len(ry)
        num = sum((a - mx) * (b - my) for a, b in zip(rx, ry))
        den = math.sqrt(sum((a - mx) ** 2 for a in rx) * sum((b - my) ** 2 for b in ry))
        assert spearman(x, y) == pytest.approx(num / den, abs=1e-12)

    def test_average_ranks_with_ties(self):
        assert list(average_ranks([10, 20, 20, 30])) == [1.0, 2.5, 2.5, 4.0]

    def test_degenerate_input(self):
        with pytest.raises(DegenerateInput):
            spearman([1, 1, 1], [1, 2, 3])

    def test_bounds_on_random_pairs(self):
        rng = random.Random(13)
        for _ in range(50):
            n = rng.randrange(2, 40)
            x = [rng.randrange(5) for _ in range(n)]
            y = [rng.randrange(5) for _ in range(n)]
            try:
                rho = spearman(x, y)
            except DegenerateInput:
                continue
            assert -1.0 - 1e-12 <= rho <= 1.0 + 1e-12


class TestWelch:
    def test_identical_samples(self):
        sample = [1.0, 2.0, 3.0]
        t, df, p = welch_t(sample, sample)
        assert t == 0.0
        assert p == 1.0

    def test_swap_antisymmetry(self):
        a = [3.1, 4.5, 2.2, 7.8, 5.0]
        b = [8.1, 9.2, 7.5]
        t1, df1, p1 = welch_t(a, b)
        t2, df2, p2 = welch_t(b, a)
        assert t1 == -t2
        assert df1 == df2
        assert p1 == p2

    def test_published_critical_value_df10(self):
        # equal sizes and equal variances give Welch df = na+nb-2 = 10 exactly;
        # shifting by tcrit*sqrt(14/3) lands on the published 5% point (2.228)
        tcrit = 2.2281388519862747  # two-sided 5% critical value, df=10
        base = [-5.0, -3.0, -1.0, 1.0, 3.0, 5.0]
        shifted = [v + tcrit * math.sqrt(14.0 / 3.0) for v in base]
        t, df, p = welch_t(shifted, base)
        assert df == pytest.approx(10.0, abs=1e-12)
        assert t == pytest.approx(tcrit, abs=1e-12)
        assert p == pytest.approx(0.05, abs=1e-6)

    def test_frozen_mpmath_fixtures(self):
        # p values integrated from the t density with mpmath (50 digits)
        t, df, p = welch_t([3.1, 4.5, 2.2, 7.8, 5.0, 4.4, 3.3], [8.1, 9.2, 7.5, 10.4, 9.9])
        assert t == pytest.approx(-5.37831419817026, abs=1e-10)
        assert df == pytest.approx(9.991372996066968, abs=1e-10)
        assert p == pytest.approx(0.00031175624499775339, abs=1e-6)
        t, df, p = welch_t([1.0, 2.0, 3.0, 4.0], [1.5, 2.5, 3.5, 4.5, 5.5])
        assert t == pytest.approx(-1.044465935734187, abs=1e-10)
        assert p == pytest.approx(0.33108326983868368, abs=1e-6)

    def test_degenerate_and_short_inputs(self):
        with pytest.raises(DegenerateInput):
            welch_t([2.0, 2.0], [3.0, 3.0])
        with pytest.raises(ValueError):
            welch_t([1.0], [1.0, 2.0])

    def test_p_in_unit_interval(self):
        rng = random.Random(21)
        for _ in range(50):
            a = [rng.gauss(0, 1) for _ in range(rng.randrange(2, 12))]
            b = [rng.gauss(1, 2) for _ in range(rng.randrange(2, 12))]
            try:
                _, _, p = welch_t(a, b)
            except DegenerateInput:
                continue
            assert 0.0 < p <= 1.0


class TestBuilders:
    class Row:
        def __init__(self, lang, time, binary, reused):
            self.language = lang
            self.creation_time = time
            self.is_binary = binary
            self.size = 10
            self.reused_within_window = reused
            self.blob = "aa" * 20

    def test_blob_design_reference_level_excluded(self):
        rows = [
            self.Row("C", 1_500_000_000, False, True),
            self.Row("Other", 1_500_100_000, True, False),
            self.Row("Python", 1_500_200_000, False, False),
            self.Row("C", 1_400_000_000, True, True),
        ]
        design = build_blob_design(rows, horizon=1_704_067_200)
        assert design.columns[0] == "(Intercept)"
        assert "Other" not in design.columns
        assert {"C", "Python"} <= set(design.columns)
        assert design.X.shape == (4, 5)

    def test_missing_reference_falls_back(self):
        rows = [
            self.Row("C", 1_500_000_000, False, True),
            self.Row("Python", 1_500_100_000, False, False),
            self.Row("C", 1_400_000_000, False, True),
        ]
        design = build_blob_design(rows, horizon=1_704_067_200)
        # C becomes the implicit baseline; only Python gets a contrast
        assert "Python" in design.columns and "C" not in design.columns
