"""
Verification suites turning every bracket identity into a checked residual.
"""
from .report import IdentityResult, SuiteReport
from .suites import run_suites

__all__ = ["IdentityResult", "SuiteReport", "run_suites"]
