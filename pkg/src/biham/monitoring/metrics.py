"""
Metrics collection using Prometheus client for verification runs.
"""

import logging
from pathlib import Path
from typing import Optional, Union

from prometheus_client import CollectorRegistry, Counter, Gauge, Histogram
from prometheus_client import generate_latest, write_to_textfile

logger = logging.getLogger(__name__)


class MetricsCollector:
    """Collects counters, timings and residual ratios of verification suites."""

    def __init__(self, registry: Optional[CollectorRegistry] = None):
        """
        Initialize the metrics collector.

        Args:
            registry: Prometheus registry to use (defaults to a fresh private one)
        """
        self.registry = registry or CollectorRegistry()

        self.checks_total = Counter(
            'biham_checks_total',
            'Total number of identity checks evaluated',
            ['suite', 'tag'],
            registry=self.registry
        )

        self.checks_failed = Counter(
            'biham_checks_failed_total',
            'Number of identity checks whose residual exceeded the tolerance',
            ['suite', 'tag'],
            registry=self.registry
        )

        self.suite_duration = Histogram(
            'biham_suite_duration_seconds',
            'Wall time spent running a verification suite',
            ['suite'],
            registry=self.registry
        )

        self.residual_ratio = Gauge(
            'biham_worst_residual_ratio',
            'Largest residual divided by its tolerance',
            ['suite', 'tag'],
            registry=self.registry
        )

        self.integrator_steps = Counter(
            'biham_integrator_steps_total',
            'Runge-Kutta steps taken by reduced flow integration',
            ['m'],
            registry=self.registry
        )

        logger.debug("Metrics collector initialized")

    def record_check(self, suite: str, tag: str, trials: int, passed: bool,
                     ratio: float) -> None:
        """Record the outcome of one identity."""
        self.checks_total.labels(suite=suite, tag=tag).inc(trials)
        if not passed:
            self.checks_failed.labels(suite=suite, tag=tag).inc()
        self.residual_ratio.labels(suite=suite, tag=tag).set(ratio)

    def record_suite_duration(self, suite: str, duration: float) -> None:
        self.suite_duration.labels(suite=suite).observe(duration)

    def record_integration(self, m: int, steps: int) -> None:
        self.integrator_steps.labels(m=str(m)).inc(steps)

    def get_metrics(self) -> bytes:
        """Get the current metrics in Prometheus format."""
        return generate_latest(self.registry)

    def write(self, path: Union[str, Path]) -> None:
        """Write the registry to a Prometheus text file."""
        write_to_textfile(str(path), self.registry)
        logger.info(f"Metrics written to {path}")


# Global metrics collector instance
metrics_collector = MetricsCollector()


def get_metrics_collector() -> MetricsCollector:
    """Get the global metrics collector instance."""
    return metrics_collector
