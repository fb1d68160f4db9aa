"""
Tests for the Prometheus metrics collector.
"""

import pytest
from prometheus_client import CollectorRegistry

from ..monitoring.metrics import MetricsCollector, get_metrics_collector


class TestMetricsCollector:
    """Test cases for MetricsCollector."""

    @pytest.fixture
    def collector(self):
        return MetricsCollector(CollectorRegistry())

    def test_record_check(self, collector):
        collector.record_check("brackets", "E15", 100, True, 0.01)
        collector.record_check("brackets", "E15", 100, False, 3.0)
        registry = collector.registry
        assert registry.get_sample_value(
            "biham_checks_total", {"suite": "brackets", "tag": "E15"}) == 200
        assert registry.get_sample_value(
            "biham_checks_failed_total", {"suite": "brackets", "tag": "E15"}) == 1
        assert registry.get_sample_value(
            "biham_worst_residual_ratio", {"suite": "brackets", "tag": "E15"}) == 3.0

    def test_durations_and_integrations(self, collector):
        collector.record_suite_duration("hierarchy", 1.5)
        collector.record_integration(2, 1000)
        registry = collector.registry
        assert registry.get_sample_value(
            "biham_suite_duration_seconds_sum", {"suite": "hierarchy"}) == 1.5
        assert registry.get_sample_value("biham_integrator_steps_total", {"m": "2"}) == 1000

    def test_exposition(self, collector, tmp_path):
        collector.record_integration(1, 10)
        assert b"biham_integrator_steps_total" in collector.get_metrics()
        path = tmp_path / "metrics.prom"
        collector.write(path)
        assert "biham_integrator_steps_total" in path.read_text()

    def test_global_instance(self):
        assert get_metrics_collector() is get_metrics_collector()
