"""
Free Hamiltonians, their flows, and the spin Sutherland parametrization.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..errors import NotRegularError
from ..linalg.core import ComplexMatrix, as_matrix, is_diagonal, is_hermitian, mat_exp
from ..linalg.gauss import DEFAULT_TOL_REG
from ..poisson.observables import Observable, PhasePoint
from ..poisson.rmatrix import DynamicalR
from .reduction import ReducedObservable, ReducedPoint

logger = logging.getLogger(__name__)

# Substituting the canonical parametrization into tr(L^2)/2 gives
# L_kl L_lk = -phi_kl phi_lk / (4 sinh^2((q_k - q_l)/2)).
SUTHERLAND_POTENTIAL_SIGN = -1


def free_hamiltonian(m: int, L: np.ndarray) -> complex:
    """H_m = tr(L^m) / m."""
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    return complex(np.trace(np.linalg.matrix_power(L, m))) / m


def exact_flow(p: PhasePoint, m: int, z: complex) -> PhasePoint:
    """
    Flow of H_m for the second bracket (equivalently H_{m+1} for the first).

    Returns:
        (exp(z L^m) g, L)
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    Lm = np.linalg.matrix_power(p.L, m)
    return PhasePoint(mat_exp(z * Lm) @ p.g, p.L)


def spectral_invariants(L: np.ndarray) -> List[complex]:
    """tr(L^k) for k = 1..n."""
    n = L.shape[0]
    values = []
    power = np.eye(n, dtype=np.complex128)
    for _ in range(n):
        power = power @ L
        values.append(complex(np.trace(power)))
    return values


@dataclass(frozen=True, eq=False)
class TrajectorySample:
    z: complex
    point: ReducedPoint
    invariants: List[complex]
    observables: List[complex] = field(default_factory=list)


@dataclass
class Trajectory:
    """Samples of a reduced flow along the ray from 0 to z_end."""

    m: int
    z_end: complex
    steps: int
    samples: List[TrajectorySample] = field(default_factory=list)

    @property
    def final(self) -> ReducedPoint:
        return self.samples[-1].point

    def invariant_drift(self) -> float:
        """Largest change of any tr(L^k) relative to the first sample."""
        if not self.samples:
            return 0.0
        start = np.asarray(self.samples[0].invariants)
        return max(float(np.max(np.abs(np.asarray(s.invariants) - start)))
                   for s in self.samples)

    def hermiticity_drift(self) -> float:
        """Largest ‖L - L^dagger‖ over the samples."""
        if not self.samples:
            return 0.0
        return max(float(np.linalg.norm(s.point.L - s.point.L.conj().T))
                   for s in self.samples)

    def starts_hermitian(self) -> bool:
        return bool(self.samples) and is_hermitian(self.samples[0].point.L, 1e-12)


def _rhs(q: np.ndarray, L: np.ndarray, m: int,
         tol_reg: float) -> Tuple[np.ndarray, np.ndarray]:
    Lm = np.linalg.matrix_power(L, m)
    R = DynamicalR(np.diag(q), tol_reg)
    RLm = R(Lm)
    return np.diag(Lm) * q, RLm @ L - L @ RLm


def integrate_reduced(rp0: ReducedPoint, m: int, z_end: complex, steps: int,
                      observables: Sequence[Observable] = (),
                      record_every: int = 1) -> Trajectory:
    """
    Fixed-step fourth-order Runge-Kutta integration of the reduced flow of h_m.

    Q' = (L^m)_0 Q and L' = [R(Q) L^m, L] along z = s z_end, s in [0, 1].

    Args:
        rp0: Initial point
        m: Hamiltonian index
        z_end: Endpoint of the straight ray from 0
        steps: Number of equal steps
        observables: Extra invariant observables recorded at each sample
        record_every: Keep every k-th step (the first and last are always kept)

    Returns:
        Trajectory whose first sample is at z = 0

    Raises:
        NotRegularError: If the flow reaches an eigenvalue collision; the
            error carries the z at which it happened
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    if record_every < 1:
        raise ValueError(f"record_every must be >= 1, got {record_every}")

    tol_reg = rp0.tol_reg
    restricted = [ReducedObservable(F) for F in observables]
    dz = complex(z_end) / steps
    q = rp0.q.astype(np.complex128)
    L = rp0.L.copy()
    traj = Trajectory(m=m, z_end=complex(z_end), steps=steps)

    def record(z: complex, point: ReducedPoint) -> None:
        traj.samples.append(TrajectorySample(
            z=z, point=point, invariants=spectral_invariants(point.L),
            observables=[f.evaluate(point) for f in restricted],
        ))

    record(0j, rp0)
    for k in range(1, steps + 1):
        z = k * dz
        try:
            k1q, k1L = _rhs(q, L, m, tol_reg)
            k2q, k2L = _rhs(q + 0.5 * dz * k1q, L + 0.5 * dz * k1L, m, tol_reg)
            k3q, k3L = _rhs(q + 0.5 * dz * k2q, L + 0.5 * dz * k2L, m, tol_reg)
            k4q, k4L = _rhs(q + dz * k3q, L + dz * k3L, m, tol_reg)
            q = q + dz / 6.0 * (k1q + 2 * k2q + 2 * k3q + k4q)
            L = L + dz / 6.0 * (k1L + 2 * k2L + 2 * k3L + k4L)
            point = ReducedPoint(np.diag(q), L, tol_reg)
        except NotRegularError as e:
            logger.error(f"Reduced flow left the regular set at z={z}")
            raise NotRegularError(f"Eigenvalue collision near z={z}: {e}",
                                  gap=e.gap, z=z) from e
        if k % record_every == 0 or k == steps:
            record(z, point)
    logger.debug(f"Integrated m={m} flow to z={z_end} in {steps} steps")
    return traj


def flow_projection_residuals(traj: Trajectory, start: PhasePoint,
                              observables: Sequence[Observable]) -> List[float]:
    """
    Per-sample distance between a reduced trajectory and the exact flow.

    Each sample at z is compared with exact_flow(start, m, z). The observables
    must be conjugation invariant, so their values on the exact point equal
    their values on its projection.

    Args:
        traj: Reduced trajectory started at the projection of start
        start: Unreduced initial point
        observables: Invariant observables to compare

    Returns:
        For each sample, the largest |f(sample) - f(exact)| / (1 + |f(exact)|)
    """
    residuals = []
    for sample in traj.samples:
        exact = exact_flow(start, traj.m, sample.z)
        reduced = sample.point.as_phase_point()
        diffs = []
        for F in observables:
            expected = F.evaluate(exact)
            diffs.append(abs(F.evaluate(reduced) - expected) / (1.0 + abs(expected)))
        residuals.append(float(np.max(diffs)))
    return residuals


def flow_commutation(rp0: ReducedPoint, m1: int, m2: int, z: complex,
                     observables: Sequence[Observable], steps: int = 1000) -> float:
    """
    Largest difference of observables between the two orders of composing flows.

    Compares Phi_{m1}^z(Phi_{m2}^z(rp0)) with Phi_{m2}^z(Phi_{m1}^z(rp0)).
    """
    restricted = [ReducedObservable(F) for F in observables]

    def compose(first: int, second: int) -> ReducedPoint:
        mid = integrate_reduced(rp0, first, z, steps, record_every=steps).final
        return integrate_reduced(mid, second, z, steps, record_every=steps).final

    a = compose(m2, m1)
    b = compose(m1, m2)
    return max(abs(f.evaluate(a) - f.evaluate(b)) for f in restricted)


@dataclass(frozen=True, eq=False)
class CanonicalSutherlandPoint:
    """
    Canonical coordinates of the spin Sutherland model.

    Attributes:
        q: Diagonal positions (complex)
        p: Diagonal momenta
        phi: Spin matrix with zero diagonal
    """

    q: ComplexMatrix
    p: ComplexMatrix
    phi: ComplexMatrix
    tol_reg: float = DEFAULT_TOL_REG

    def __post_init__(self) -> None:
        q = as_matrix(self.q, "q")
        p = as_matrix(self.p, "p")
        phi = as_matrix(self.phi, "phi")
        if not (is_diagonal(q) and is_diagonal(p)):
            raise ValueError("q and p must be diagonal")
        if np.any(np.diag(phi) != 0):
            raise ValueError("phi must have zero diagonal")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "phi", phi)

    @property
    def n(self) -> int:
        return self.q.shape[0]


def sutherland_embed(c: CanonicalSutherlandPoint) -> ReducedPoint:
    """Q = exp(q), L = p + (R(Q) + 1/2)(phi)."""
    Q = mat_exp(c.q)
    R = DynamicalR(Q, c.tol_reg)
    return ReducedPoint(Q, c.p + R.shifted(c.phi), c.tol_reg)


def sutherland_hamiltonian(c: CanonicalSutherlandPoint) -> complex:
    """tr(L^2)/2 at the embedded point."""
    return free_hamiltonian(2, sutherland_embed(c).L)


def sutherland_closed_form(c: CanonicalSutherlandPoint,
                           sign: Optional[int] = None) -> complex:
    """
    1/2 sum p_j^2 + (s/8) sum_{k != l} phi_kl phi_lk / sinh^2((q_k - q_l)/2).

    Args:
        c: Canonical point
        sign: Potential sign s; defaults to SUTHERLAND_POTENTIAL_SIGN
    """
    s = SUTHERLAND_POTENTIAL_SIGN if sign is None else sign
    q = np.diag(c.q)
    p = np.diag(c.p)
    diff = 0.5 * (q[:, None] - q[None, :])
    with np.errstate(divide="ignore", invalid="ignore"):
        weight = 1.0 / np.sinh(diff) ** 2
    np.fill_diagonal(weight, 0.0)
    potential = np.sum(c.phi * c.phi.T * weight)
    return complex(0.5 * np.sum(p * p) + s / 8.0 * potential)


def random_sutherland_point(rng: np.random.Generator, n: int,
                            scale: float = 1.0) -> CanonicalSutherlandPoint:
    """Canonical point with well separated complex positions."""
    spacing = 0.7 + 0.3 * rng.random(n)
    q = np.cumsum(spacing) + 0.3j * rng.standard_normal(n)
    p = scale * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
    phi = scale * (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    np.fill_diagonal(phi, 0.0)
    return CanonicalSutherlandPoint(np.diag(q), np.diag(p), phi)
