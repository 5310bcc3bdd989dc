"""Tests for the evaluation metrics."""

import numpy as np
import pytest

from twinreg.metrics import (
    LengthMismatch,
    MetricsReport,
    ZeroVarianceTargets,
    metrics,
)


class TestMetrics:
    def test_perfect_predictor(self):
        report = metrics([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])
        assert report.sse == 0.0
        assert report.nmse == 0.0
        assert report.r2 == 1.0
        assert report.mape == 0.0

    def test_stated_formulas(self):
        report = metrics([0.0, 1.0], [1.0, 0.0])
        assert report.sse == pytest.approx(2.0)
        assert report.nmse == pytest.approx(4.0)
        assert report.r2 == pytest.approx(-3.0)
        assert report.mape is None  # a zero target makes MAPE undefined

    def test_mape_direct_evaluation(self):
        report = metrics([2.0, 4.0], [1.0, 5.0])
        assert report.mape == pytest.approx(0.375)

    def test_r2_is_one_minus_nmse_identically(self):
        rng = np.random.default_rng(0)
        for _ in range(25):
            y = rng.normal(size=17)
            yhat = rng.normal(size=17)
            report = metrics(y, yhat)
            assert report.r2 == 1.0 - report.nmse

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            metrics([1.0, 2.0], [1.0])

    def test_zero_variance_targets(self):
        with pytest.raises(ZeroVarianceTargets):
            metrics([2.0, 2.0, 2.0], [1.0, 2.0, 3.0])

    def test_training_context_fields_pass_through(self):
        report = metrics([1.0, 2.0], [1.0, 1.0], train_seconds=0.5, sv_count=7)
        assert report.train_seconds == 0.5
        assert report.sv_count == 7
        assert isinstance(report, MetricsReport)
