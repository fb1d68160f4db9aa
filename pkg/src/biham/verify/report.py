"""
Report models for verification runs.
"""

import json
import logging
import math
from typing import List, Optional

from pydantic import BaseModel, Field

logger = logging.getLogger(__name__)


class IdentityResult(BaseModel):
    tag: str = Field(..., description="Equation tag of the checked identity")
    identity: str = Field(..., description="Short description of the identity")
    max_residual: float = Field(..., description="Largest residual over all trials")
    tolerance: float = Field(..., description="Admissible residual")
    trials: int = Field(..., description="Number of evaluations")
    passed: bool = Field(..., description="Whether max_residual <= tolerance")


class SuiteReport(BaseModel):
    suite: str = Field(..., description="Suite that was run")
    n: int = Field(..., description="Matrix size")
    seed: int = Field(..., description="Root seed")
    trials: int = Field(..., description="Configured trials per identity")
    radius: float = Field(..., description="Sampling radius on the double")
    passed: bool = Field(..., description="Whether every identity passed")
    results: List[IdentityResult] = Field(..., description="Per-identity results sorted by (tag, identity)")

    def to_json(self) -> str:
        """Deterministic JSON text with keys in field order."""
        return json.dumps(self.model_dump(mode="json"), indent=2) + "\n"


class IdentityCheck:
    """
    Running maximum of one identity's residual over trials.

    NaN residuals count as failures.
    """

    def __init__(self, tag: str, identity: str, tolerance: float):
        self.tag = tag
        self.identity = identity
        self.tolerance = tolerance
        self.max_residual = 0.0
        self.trials = 0
        self._nan = False

    def add(self, residual: float) -> None:
        residual = float(residual)
        self.trials += 1
        if math.isnan(residual):
            self._nan = True
            return
        self.max_residual = max(self.max_residual, residual)

    def add_difference(self, value: complex, expected: complex) -> None:
        """Add |value - expected| / (1 + |expected|)."""
        self.add(abs(value - expected) / (1.0 + abs(expected)))

    @property
    def passed(self) -> bool:
        return not self._nan and self.max_residual <= self.tolerance

    def result(self) -> IdentityResult:
        if not self.passed:
            logger.warning(f"{self.tag} {self.identity}: residual {self.max_residual:.3e} "
                           f"exceeds {self.tolerance:.1e}")
        return IdentityResult(
            tag=self.tag,
            identity=self.identity,
            max_residual=float("nan") if self._nan else self.max_residual,
            tolerance=self.tolerance,
            trials=self.trials,
            passed=self.passed,
        )


def build_report(suite: str, n: int, seed: int, trials: int, radius: float,
                 results: List[IdentityResult],
                 passed: Optional[bool] = None) -> SuiteReport:
    ordered = sorted(results, key=lambda r: (r.tag, r.identity))
    return SuiteReport(
        suite=suite, n=n, seed=seed, trials=trials, radius=radius,
        passed=all(r.passed for r in ordered) if passed is None else passed,
        results=ordered,
    )
