"""
Verification suites.

Every suite samples seeded random points, evaluates both sides of a family of
identities there and keeps the largest residual per identity. Trial k of the
suite with index s draws from SeedSequence(seed, spawn_key=(s, k)), so the
report does not depend on the number of worker processes.
"""

import itertools
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Sequence, Tuple

import numpy as np

from ..algebra.gaussian import GaussianRational
from ..algebra.poly import (
    StructureTable,
    antisymmetry_residual,
    decode_generator,
    generator_count,
    jacobi_sweep,
    point_values,
    w_identity_residual,
)
from ..cli.config import RunConfig, SliceChoice, Suite
from ..dynamics.hierarchy import (
    SUTHERLAND_POTENTIAL_SIGN,
    exact_flow,
    flow_commutation,
    flow_projection_residuals,
    free_hamiltonian,
    integrate_reduced,
    random_sutherland_point,
    sutherland_closed_form,
    sutherland_hamiltonian,
)
from ..dynamics.realforms import (
    SliceKind,
    conjugation_identity_check,
    hyp_pb,
    random_slice_point,
    slice_flow,
    slice_observables,
    trig_pb,
)
from ..dynamics.reduction import (
    ReducedPoint,
    derivative_relation_residuals,
    project,
    reduced_pb1,
    reduced_pb2,
    reduced_vf,
    restrict,
)
from ..dynamics.reduction import vector_field_action as reduced_vector_field_action
from ..errors import ConfigurationError, NotRegularError
from ..heisenberg.double import (
    DoubleElement,
    DoubleVector,
    delta,
    embed_cotangent,
    factor_derivative_residuals,
    factorize,
    pairing2,
    pb_double,
    project_delta,
    project_star,
    pullback,
    star,
    to_cotangent,
    transfer_point,
    transferred_pb_plus,
)
from ..linalg.core import (
    diagonal_part,
    inverse,
    mat_exp,
    random_matrix,
    random_near_identity,
    relative_residual,
    split,
    trace_pairing,
)
from ..linalg.gauss import GaussOrder, diagonalize_regular, gauss_decompose
from ..monitoring.metrics import get_metrics_collector
from ..poisson.brackets import (
    LIE_DERIVATIVE_W,
    PB1,
    PB2,
    BracketKind,
    BracketTag,
    evaluate_bracket,
    hamiltonian_vector_field,
    pb1,
    pb2,
    pb2_invariant,
    vector_field_action,
    w_flow,
)
from ..poisson.observables import (
    CallableObservable,
    CoordinateKind,
    CoordinateObservable,
    Observable,
    PhasePoint,
    TraceWordObservable,
    check_invariance,
    fd_derivatives,
    free_hamiltonian_observable,
    invariant_identity_check,
    trace_words,
)
from ..poisson.rmatrix import DynamicalR, dyn_R, dyn_R_coth, mcybe_residual
from .report import IdentityCheck, IdentityResult, SuiteReport, build_report

logger = logging.getLogger(__name__)

SUITE_ORDER = (
    Suite.JACOBI,
    Suite.BRACKETS,
    Suite.REDUCTION,
    Suite.HIERARCHY,
    Suite.REALFORMS,
    Suite.HEISENBERG,
)

# Conjugation-invariant trace words sampled by the suites
INVARIANT_WORDS = ("l", "ll", "lll", "g", "gl", "gll", "Gl", "glGl", "ggl")
SHORT_WORDS = ("l", "ll", "g", "gl", "gll", "glGl", "ggl", "lll")

FD_TOL = 1e-8
EXACT_TOL = 1e-12
FLOW_TOL = 1e-6
DOUBLE_FD_TOL = 1e-5
RESIDUAL_TOL = 1e-6
HERMITICITY_TOL = 1e-10

FLOW_STEPS = 2000
FLOW_SAMPLES = 20
FLOW_TRIALS = 10
FLOW_WORD_LENGTH = 4
COMMUTATION_TRIALS = 2
SLICE_FLOW_TRIALS = 3
POLY_TRIALS = 10
RESIDUAL_TRIALS = 20


@dataclass
class SuiteOutput:
    """Results of one suite together with the files it wants written."""

    suite: Suite
    results: List[IdentityResult]
    artifacts: Dict[str, str] = field(default_factory=dict)
    integrations: List[Tuple[int, int]] = field(default_factory=list)
    duration: float = 0.0


class _Ledger:
    """IdentityChecks keyed by (tag, identity), created on first use."""

    def __init__(self) -> None:
        self._checks: Dict[Tuple[str, str], IdentityCheck] = {}

    def check(self, tag: str, identity: str, tolerance: float) -> IdentityCheck:
        key = (tag, identity)
        if key not in self._checks:
            self._checks[key] = IdentityCheck(tag, identity, tolerance)
        return self._checks[key]

    def results(self) -> List[IdentityResult]:
        return [c.result() for c in self._checks.values()]


def trial_rng(seed: int, suite: Suite, trial: int) -> np.random.Generator:
    """Independent generator for one trial of one suite."""
    index = SUITE_ORDER.index(suite)
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index, trial)))


def _norm(X: np.ndarray) -> float:
    return float(np.linalg.norm(X))


def _complex(rng: np.random.Generator, scale: float) -> complex:
    re, im = rng.uniform(-scale, scale, 2)
    return complex(re, im)


def _random_phase_point(rng: np.random.Generator, n: int) -> PhasePoint:
    return PhasePoint(random_near_identity(rng, n, 0.6), random_matrix(rng, n, 0.5))


def _random_regular_point(rng: np.random.Generator, n: int,
                          scale: float = 0.5) -> ReducedPoint:
    q = (np.arange(1.0, n + 1) + 0.3 * rng.uniform(-0.5, 0.5, n)
         + 0.3j * rng.uniform(-0.5, 0.5, n))
    return ReducedPoint(np.diag(q), random_matrix(rng, n, scale))


def _derivative_along(func: Callable[[float], complex], h: float = 1e-3) -> complex:
    """Five-point central difference of a scalar function at 0."""
    return (-func(2 * h) + 8 * func(h) - 8 * func(-h) + func(-2 * h)) / (12 * h)


def _random_flow_point(rng: np.random.Generator, n: int) -> ReducedPoint:
    # log-spacing 1 leaves room for the drift of Q along short flows
    s = np.arange(n) + 0.2 * rng.uniform(-1.0, 1.0, n) + 0.5j * rng.uniform(-1.0, 1.0, n)
    return ReducedPoint(np.diag(np.exp(s)), random_matrix(rng, n, 0.25))


def _pointwise_product(F: Observable, K: Observable) -> CallableObservable:
    """F * K differentiated numerically, without the product rule."""
    def value(g: np.ndarray, L: np.ndarray) -> complex:
        p = PhasePoint(g, L)
        return F.evaluate(p) * K.evaluate(p)

    return CallableObservable(value, f"{F.label}*{K.label}", extrapolate=True)


def _random_regular_group_element(rng: np.random.Generator, n: int) -> np.ndarray:
    E = random_matrix(rng, n)
    return np.diag(np.arange(1.0, n + 1)).astype(np.complex128) + 0.3 * E / np.linalg.norm(E)


def _random_coordinate(rng: np.random.Generator, n: int) -> CoordinateObservable:
    kind = CoordinateKind.G_ENTRY if rng.random() < 0.5 else CoordinateKind.L_ENTRY
    i, j = rng.integers(n, size=2)
    return CoordinateObservable(kind, int(i), int(j))


def _pick_two(rng: np.random.Generator, family: Sequence[Observable]) -> Tuple[Observable, Observable]:
    a, b = rng.choice(len(family), size=2, replace=False)
    return family[int(a)], family[int(b)]


def _generator_observable(n: int, var: int) -> CoordinateObservable:
    kind, i, j = decode_generator(n, var)
    return CoordinateObservable(CoordinateKind(kind), i, j)


def run_jacobi(config: RunConfig, workers: int = 1) -> SuiteOutput:
    """
    Exact certificates: Jacobi sweeps, the W identity, antisymmetry of the
    structure tables, and agreement of the tables with the numeric brackets.
    """
    n = config.n
    ledger = _Ledger()
    results: List[IdentityResult] = []
    artifacts: Dict[str, str] = {}

    for tag in (BracketTag.PB1, BracketTag.PB2, BracketTag.PENCIL):
        cert = jacobi_sweep(n, tag, config.max_triples, config.seed, workers)
        artifacts[f"jacobi-{tag.value}-n{n}.txt"] = cert.render()
        results.append(IdentityResult(
            tag="jacobi",
            identity=f"{tag.value} Jacobi identity on generator triples",
            max_residual=float(cert.failures),
            tolerance=0.0,
            trials=cert.checked,
            passed=cert.all_zero,
        ))

    first = StructureTable(n, BracketTag.PB1)
    second = StructureTable(n, BracketTag.PB2)
    pairs = list(itertools.combinations(range(generator_count(n)), 2))
    w_check = ledger.check("E11", "W derivative of the second bracket is the first, exactly", 0.0)
    for a, b in pairs:
        w_check.add(0.0 if w_identity_residual(n, a, b, second, first).is_zero() else 1.0)
    for table in (first, second):
        check = ledger.check("ref2" if table is first else "ref3",
                             f"{table.tag.value} structure table is antisymmetric", 0.0)
        for a, b in pairs:
            check.add(0.0 if antisymmetry_residual(table, a, b).is_zero() else 1.0)

    top = generator_count(n)
    for trial in range(min(config.trials, POLY_TRIALS)):
        rng = trial_rng(config.seed, Suite.JACOBI, trial)
        # Dyadic entries keep every float in the coordinate brackets exact, so the
        # numeric value lifts to Q(i) without rounding.
        g = np.round(random_near_identity(rng, n, 0.5) * 64) / 64
        L = np.round(random_matrix(rng, n) * 64) / 64
        p = PhasePoint(g, L)
        values = point_values(g, L)
        coords = [_generator_observable(n, v) for v in range(top)]
        for a in range(top):
            for b in range(top):
                for table, bracket in ((first, pb1), (second, pb2)):
                    numeric = GaussianRational.of(bracket(coords[a], coords[b], p))
                    exact = table.bracket(a, b).evaluate(values)
                    ledger.check(
                        "ref2" if table is first else "ref3",
                        f"{table.tag.value} structure table matches the numeric bracket "
                        "exactly",
                        0.0,
                    ).add(0.0 if numeric == exact else 1.0)

    return SuiteOutput(Suite.JACOBI, results + ledger.results(), artifacts)


def run_brackets(config: RunConfig) -> SuiteOutput:
    """Linear algebra, r-matrices, derivatives and the unreduced brackets."""
    n, tol = config.n, config.tol
    ledger = _Ledger()
    words = [TraceWordObservable(w) for w in INVARIANT_WORDS]

    for trial in range(config.trials):
        rng = trial_rng(config.seed, Suite.BRACKETS, trial)
        p = _random_phase_point(rng, n)
        X, Y = random_matrix(rng, n), random_matrix(rng, n)
        scale = 1.0 + _norm(X) * _norm(Y)

        eta = random_near_identity(rng, n, 0.5)
        eta_inv = inverse(eta)
        ledger.check("E1", "trace pairing is conjugation invariant", EXACT_TOL).add_difference(
            trace_pairing(eta @ X @ eta_inv, eta @ Y @ eta_inv), trace_pairing(X, Y))
        ledger.check("E2", "triangular split reconstructs its input", 0.0).add(
            _norm(split(X).reconstruct() - X))

        A = random_near_identity(rng, n, 0.5)
        for order in GaussOrder:
            ledger.check("G11", f"{order.value} Gauss factors recompose their input",
                         EXACT_TOL).add(relative_residual(gauss_decompose(A, order).recompose(), A))

        g_reg = _random_regular_group_element(rng, n)
        eta_g, Q = diagonalize_regular(g_reg, config.tol_reg)
        ledger.check("F8", "regular elements conjugate to sorted diagonal form", tol).add(
            relative_residual(eta_g @ g_reg @ inverse(eta_g), Q))

        Z = X / _norm(X)
        z1, z2 = _complex(rng, 0.5), _complex(rng, 0.5)
        ledger.check("exp", "matrix exponential is a one-parameter group", tol).add(
            relative_residual(mat_exp(z1 * Z) @ mat_exp(z2 * Z), mat_exp((z1 + z2) * Z)))

        ledger.check("E3", "constant r-matrix solves the modified Yang-Baxter equation",
                     EXACT_TOL).add(mcybe_residual(X, Y) / scale)

        rp = _random_regular_point(rng, n)
        R = rp.R
        ledger.check("I2", "dynamical r-matrix is antisymmetric", EXACT_TOL).add(
            abs(trace_pairing(R(X), Y) + trace_pairing(X, R(Y))) / scale)
        ledger.check("I2", "dynamical r-matrix vanishes on diagonal matrices", 0.0).add(
            _norm(R(diagonal_part(X))))
        q = np.cumsum(0.7 + 0.3 * rng.random(n)) + 1j * rng.uniform(-1.0, 1.0, n)
        ledger.check("Rcoth", "rational and coth forms of R(Q) agree", EXACT_TOL).add(
            relative_residual(dyn_R_coth(q, X), dyn_R(np.diag(np.exp(q)), X)))

        family: List[Observable] = list(words) + [_random_coordinate(rng, n) for _ in range(2)]
        for obs in family:
            analytic = obs.derivatives(p)
            numeric = fd_derivatives(obs, p, config.fd_step)
            ledger.check("E5", "analytic derivatives match finite differences", FD_TOL).add(
                analytic.distance(numeric) / (1.0 + analytic.magnitude()))
            ledger.check("E6", "right derivative is the conjugated left derivative",
                         EXACT_TOL).add(_norm(analytic.nabla1p - p.g_inv @ analytic.nabla1 @ p.g)
                                        / (1.0 + _norm(analytic.nabla1)))

        for word in words:
            ledger.check("act1", "trace words are conjugation invariant", tol).add(
                check_invariance(word, p, trials=2, seed=trial)
                / (1.0 + abs(word.evaluate(p))))
            ledger.check("F1+2", "gradients of invariants satisfy the conjugation identity",
                         tol).add(invariant_identity_check(word, p)
                                  / (1.0 + word.derivatives(p).magnitude()))

        K = words[int(rng.integers(len(words)))]
        bK, bK_eta = K.derivatives(p), K.derivatives(p.conjugate(eta))
        ledger.check("F1", "gradients of invariants are conjugation equivariant", tol).add(
            (_norm(bK_eta.nabla1 - eta @ bK.nabla1 @ eta_inv)
             + _norm(bK_eta.d2 - eta @ bK.d2 @ eta_inv)) / (1.0 + bK.magnitude()))

        F, H = _pick_two(rng, family)
        v1, v2 = pb1(F, H, p), pb2(F, H, p)
        ledger.check("E8", "first bracket is antisymmetric", tol).add_difference(
            v1, -pb1(H, F, p))
        ledger.check("E9", "second bracket is antisymmetric", tol).add_difference(
            v2, -pb2(H, F, p))
        FK = _pointwise_product(F, K)
        ledger.check("E8", "first bracket obeys the Leibniz rule", FD_TOL).add_difference(
            pb1(FK, H, p), F.evaluate(p) * pb1(K, H, p) + K.evaluate(p) * v1)
        ledger.check("E9", "second bracket obeys the Leibniz rule", FD_TOL).add_difference(
            pb2(FK, H, p), F.evaluate(p) * pb2(K, H, p) + K.evaluate(p) * v2)

        x, y = _complex(rng, 1.0), _complex(rng, 1.0)
        kind = BracketKind.pencil(x, y)
        ledger.check("pencil", "pencil bracket is antisymmetric", tol).add_difference(
            evaluate_bracket(kind, F, H, p), -evaluate_bracket(kind, H, F, p))

        W1, W2 = _pick_two(rng, words)
        ledger.check("F1+3", "invariant form of the second bracket agrees with the general one",
                     tol).add_difference(pb2_invariant(W1, W2, p), pb2(W1, W2, p))

        for obs in family:
            for m in range(1, 5):
                ledger.check("E15", "bi-Hamiltonian recursion {F, H_m}_2 = {F, H_m+1}_1",
                             tol).add_difference(pb2(obs, free_hamiltonian_observable(m), p),
                                                 pb1(obs, free_hamiltonian_observable(m + 1), p))

        ledger.check("E11", "Lie derivative of the second bracket along W is the first",
                     tol).add_difference(evaluate_bracket(LIE_DERIVATIVE_W, F, H, p), v1)
        along_w = _derivative_along(lambda z: F.evaluate(w_flow(p, z)))
        ledger.check("E10", "W derivative matches the derivative along the integral curve",
                     FD_TOL).add_difference(along_w, F.w_derivative().evaluate(p))

        for bracket_kind, value in ((PB1, v1), (PB2, v2)):
            gdot, Ldot = hamiltonian_vector_field(bracket_kind, H, p)
            ledger.check("E13", f"Hamiltonian vector field of {bracket_kind.label} "
                         f"generates the bracket", tol).add_difference(
                vector_field_action(F, gdot, Ldot, p), value)

    return SuiteOutput(Suite.BRACKETS, ledger.results())


def run_reduction(config: RunConfig) -> SuiteOutput:
    """Reduced brackets against unreduced ones on invariant functions."""
    n, tol = config.n, config.tol
    ledger = _Ledger()
    words = [TraceWordObservable(w) for w in INVARIANT_WORDS]

    for trial in range(config.trials):
        rng = trial_rng(config.seed, Suite.REDUCTION, trial)
        rp = _random_regular_point(rng, n)
        p = rp.as_phase_point()
        W1, W2 = _pick_two(rng, words)
        f, h = restrict(W1), restrict(W2)
        r1, r2 = reduced_pb1(f, h, rp), reduced_pb2(f, h, rp)

        ledger.check("red1", "first bracket of invariants equals the reduced first bracket",
                     tol).add_difference(pb1(W1, W2, p), r1)
        ledger.check("red2", "second bracket of invariants equals the reduced second bracket",
                     tol).add_difference(pb2(W1, W2, p), r2)

        scale = 1.0 + W1.derivatives(p).magnitude() * (1.0 + _norm(rp.L))
        res_diag, res_full = derivative_relation_residuals(W1, rp)
        ledger.check("F14", "diagonal of [L, d2 F] vanishes", tol).add(res_diag / scale)
        ledger.check("F15", "off-diagonal part of nabla1 F is fixed by R(Q)", tol).add(
            res_full / scale)

        m = int(rng.integers(1, 5))
        hm = restrict(free_hamiltonian_observable(m))
        hm1 = restrict(free_hamiltonian_observable(m + 1))
        b2 = reduced_pb2(f, hm, rp)
        ledger.check("F25", "reduced recursion {f, h_m}_2 = {f, h_m+1}_1", tol).add_difference(
            reduced_pb1(f, hm1, rp), b2)
        Qdot, Ldot = reduced_vf(m, rp)
        ledger.check("F25", "reduced vector field of h_m generates {f, h_m}_2",
                     tol).add_difference(reduced_vector_field_action(f, Qdot, Ldot, rp), b2)

        d = np.exp(rng.uniform(-0.3, 0.3, n) + 1j * rng.uniform(-np.pi, np.pi, n))
        gauged = rp.gauge(np.diag(d))
        ledger.check("gauge", "reduced brackets are invariant under diagonal conjugation",
                     tol).add_difference(reduced_pb1(f, h, gauged), r1)
        ledger.check("gauge", "reduced brackets are invariant under diagonal conjugation",
                     tol).add_difference(reduced_pb2(f, h, gauged), r2)

        generic = PhasePoint(_random_regular_group_element(rng, n), random_matrix(rng, n))
        projected, _ = project(generic, config.tol_reg)
        ledger.check("recon", "invariants are unchanged by projection", tol).add_difference(
            W1.evaluate(projected.as_phase_point()), W1.evaluate(generic))
        ledger.check("recon", "brackets of invariants are unchanged by projection",
                     tol).add_difference(reduced_pb2(f, h, projected), pb2(W1, W2, generic))

    return SuiteOutput(Suite.REDUCTION, ledger.results())


def run_hierarchy(config: RunConfig) -> SuiteOutput:
    """Free Hamiltonians, the exact flows, the reduced flows and the Sutherland model."""
    n, tol = config.n, config.tol
    ledger = _Ledger()
    words = [TraceWordObservable(w) for w in INVARIANT_WORDS]
    short = [TraceWordObservable(w) for w in SHORT_WORDS]
    flow_words = [TraceWordObservable(w) for w in trace_words(FLOW_WORD_LENGTH)]
    integrations: List[Tuple[int, int]] = []
    flow_steps = max(config.steps, FLOW_STEPS)

    for trial in range(config.trials):
        rng = trial_rng(config.seed, Suite.HIERARCHY, trial)
        p = PhasePoint(random_near_identity(rng, n, 0.6), random_matrix(rng, n, 0.5))
        m = int(rng.integers(1, 4))
        Hm = free_hamiltonian_observable(m)
        ledger.check("E14", "free Hamiltonian matches its trace word", EXACT_TOL).add_difference(
            free_hamiltonian(m, p.L), Hm.evaluate(p))

        z1, z2 = _complex(rng, 0.5), _complex(rng, 0.5)
        moved = exact_flow(p, m, z1)
        ledger.check("E17", "L is constant along the exact flow", 0.0).add(_norm(moved.L - p.L))
        ledger.check("E17", "exact flow is a one-parameter group", tol).add(relative_residual(
            exact_flow(exact_flow(p, m, z2), m, z1).g, exact_flow(p, m, z1 + z2).g))

        W = words[int(rng.integers(len(words)))]
        rate = _derivative_along(lambda s: W.evaluate(exact_flow(p, m, z1 + s)))
        ledger.check("E13", "invariants move at the bracket rate along the exact flow",
                     FD_TOL).add_difference(rate, pb2(W, Hm, moved))

        c = random_sutherland_point(rng, n, 0.5)
        ledger.check("I7", f"spin Sutherland Hamiltonian with potential sign "
                     f"{SUTHERLAND_POTENTIAL_SIGN:+d}", EXACT_TOL).add_difference(
            sutherland_hamiltonian(c), sutherland_closed_form(c))

        if trial < FLOW_TRIALS:
            rp0 = _random_flow_point(rng, n)
            m_flow = 1 + trial % 2
            matches = ledger.check("F26", "reduced flow matches the projected exact flow "
                                   "on every sample", FLOW_TOL)
            try:
                traj = integrate_reduced(rp0, m_flow, 0.5, flow_steps,
                                         record_every=flow_steps // FLOW_SAMPLES)
            except NotRegularError as e:
                logger.warning(f"Reduced flow hit a collision at z={e.z}")
                matches.add(float("nan"))
            else:
                integrations.append((m_flow, flow_steps))
                for residual in flow_projection_residuals(traj, rp0.as_phase_point(), flow_words):
                    matches.add(residual)
                size = max(abs(v) for v in traj.samples[0].invariants)
                ledger.check("F26", "reduced flow is isospectral", FD_TOL).add(
                    traj.invariant_drift() / (1.0 + size))

        if trial < COMMUTATION_TRIALS:
            rp0 = _random_flow_point(rng, n)
            size = max(abs(w.evaluate(rp0.as_phase_point())) for w in short)
            try:
                residual = flow_commutation(rp0, 1, 2, 0.25, short, steps=flow_steps // 2)
            except NotRegularError as e:
                logger.warning(f"Commuting flows hit a collision at z={e.z}")
                residual = float("nan")
            integrations.extend([(1, flow_steps), (2, flow_steps)])
            ledger.check("commute", "hierarchy flows commute on invariants", FLOW_TOL).add(
                residual / (1.0 + size))

    return SuiteOutput(Suite.HIERARCHY, ledger.results(), integrations=integrations)


def _slice_kinds(choice: SliceChoice) -> List[SliceKind]:
    if choice is SliceChoice.HYPERBOLIC:
        return [SliceKind.HYPERBOLIC]
    if choice is SliceChoice.TRIGONOMETRIC:
        return [SliceKind.TRIGONOMETRIC]
    return [SliceKind.HYPERBOLIC, SliceKind.TRIGONOMETRIC]


def run_realforms(config: RunConfig) -> SuiteOutput:
    """Real and purely imaginary brackets on the two real slices."""
    n = config.n
    ledger = _Ledger()
    integrations: List[Tuple[int, int]] = []

    for trial in range(config.trials):
        rng = trial_rng(config.seed, Suite.REALFORMS, trial)
        for kind in _slice_kinds(config.slice):
            hyperbolic = kind is SliceKind.HYPERBOLIC
            tags = ("R5", "R6", "R8", "R1") if hyperbolic else ("R23", "R24", "R22", "R18")
            point = random_slice_point(kind, n, rng)
            f, h = (restrict(F) for F in _pick_two(rng, slice_observables(kind)))
            rp = point.to_reduced()
            for i, reduced in ((1, reduced_pb1), (2, reduced_pb2)):
                holomorphic = reduced(f, h, rp)
                tag = tags[i - 1]
                if hyperbolic:
                    ledger.check(tag, f"bracket {i} of real functions is real",
                                 EXACT_TOL).add(abs(holomorphic.imag) / (1.0 + abs(holomorphic)))
                    real_value: complex = hyp_pb(i, f, h, point)
                else:
                    ledger.check(tag, f"bracket {i} of real functions is purely imaginary",
                                 EXACT_TOL).add(abs(holomorphic.real) / (1.0 + abs(holomorphic)))
                    real_value = trig_pb(i, f, h, point)
                ledger.check(tag, f"slice formula for bracket {i} matches the reduced bracket",
                             EXACT_TOL).add_difference(real_value, holomorphic)

            X = random_matrix(rng, n)
            largest = float(np.max(np.abs(DynamicalR(point.Q).multipliers)))
            ledger.check(tags[2], "R(Q) intertwines the Hermitian adjoint on the slice",
                         EXACT_TOL).add(conjugation_identity_check(kind, point.Q, X)
                                        / (1.0 + largest * _norm(X)))

            if trial < SLICE_FLOW_TRIALS:
                start = random_slice_point(kind, n, rng, scale=0.3)
                m = 1 + trial % 2
                steps = 200
                traj = slice_flow(start, m, 0.1, steps)
                integrations.append((m, steps))
                ledger.check(tags[3], "slice flow keeps L Hermitian", HERMITICITY_TOL).add(
                    traj.hermiticity_drift() / (1.0 + _norm(start.L)))

    return SuiteOutput(Suite.REALFORMS, ledger.results(), integrations=integrations)


def run_heisenberg(config: RunConfig) -> SuiteOutput:
    """The double near the identity and the transfer of its plus bracket."""
    n, tol, radius = config.n, config.tol, config.radius
    ledger = _Ledger()
    words = [TraceWordObservable(w) for w in INVARIANT_WORDS]

    for trial in range(config.trials):
        rng = trial_rng(config.seed, Suite.HEISENBERG, trial)
        p = PhasePoint(random_near_identity(rng, n, radius),
                       random_near_identity(rng, n, radius))
        X, Y = random_matrix(rng, n), random_matrix(rng, n)
        scale = 1.0 + _norm(X) * _norm(Y)
        ledger.check("G2", "diagonal subalgebra is isotropic", EXACT_TOL).add(
            abs(pairing2(delta(X), delta(Y))) / scale)
        ledger.check("G3", "star subalgebra is isotropic", EXACT_TOL).add(
            abs(pairing2(star(X), star(Y))) / scale)
        V = DoubleVector(X, Y)
        ledger.check("G2/G3", "diagonal and star projections sum to the identity",
                     EXACT_TOL).add((project_delta(V) + project_star(V) - V).norm()
                                    / (1.0 + V.norm()))

        g = random_near_identity(rng, n, radius)
        g_delta, _ = factorize(DoubleElement(g, g))
        ledger.check("G8", "diagonal elements (g, g) factor through g^-1", EXACT_TOL).add(
            relative_residual(g_delta, inverse(g)))

        d = embed_cotangent(p)
        back = transfer_point(d)
        ledger.check("G9", "factorization inverts the cotangent embedding", tol).add(
            (_norm(back.g - p.g) + _norm(back.L - p.L)) / (1.0 + p.norm()))

        _, factors = factorize(d)
        at = to_cotangent(factors)
        family: List[Observable] = list(words) + [_random_coordinate(rng, n) for _ in range(2)]
        F, H = _pick_two(rng, family)
        ledger.check("+PB1", "transferred plus bracket equals the second bracket",
                     tol).add_difference(transferred_pb_plus(F, H, factors), pb2(F, H, at))

        Fd, Hd = pullback(F), pullback(H)
        ledger.check("PBpm", "plus bracket of pulled-back functions equals the second bracket",
                     DOUBLE_FD_TOL).add_difference(pb_double(1, Fd, Hd, d), pb2(F, H, at))
        minus = pb_double(-1, Fd, Hd, d)
        ledger.check("PBpm", "minus bracket is antisymmetric", DOUBLE_FD_TOL).add_difference(
            minus, -pb_double(-1, Hd, Fd, d))

        if trial < RESIDUAL_TRIALS:
            residuals = factor_derivative_residuals(F, factors)
            scale = 1.0 + F.derivatives(at).magnitude()
            names = (
                ("G13", "left derivative along the diagonal factor"),
                ("G13*", "right derivative along the diagonal factor"),
                ("G14", "left derivative along the star factor"),
                ("G15", "right derivative along the star factor"),
            )
            for (tag, identity), residual in zip(names, residuals):
                ledger.check(tag, identity, RESIDUAL_TOL).add(residual / scale)

    return SuiteOutput(Suite.HEISENBERG, ledger.results())


def run_suite(config: RunConfig, suite: Suite, workers: int = 1) -> SuiteOutput:
    """Run one suite and time it."""
    logger.info(f"Suite {suite.value} started (n={config.n}, trials={config.trials})")
    start = time.perf_counter()
    if suite is Suite.JACOBI:
        output = run_jacobi(config, workers)
    elif suite is Suite.BRACKETS:
        output = run_brackets(config)
    elif suite is Suite.REDUCTION:
        output = run_reduction(config)
    elif suite is Suite.HIERARCHY:
        output = run_hierarchy(config)
    elif suite is Suite.REALFORMS:
        output = run_realforms(config)
    elif suite is Suite.HEISENBERG:
        output = run_heisenberg(config)
    else:
        raise ValueError(f"Not a single suite: {suite.value}")
    output.duration = time.perf_counter() - start
    failed = sum(not r.passed for r in output.results)
    logger.info(f"Suite {suite.value} finished in {output.duration:.1f}s "
                f"with {failed} failed identities")
    return output


def selected_suites(config: RunConfig) -> List[Suite]:
    """
    Suites requested by the configuration.

    Raises:
        ConfigurationError: If the Jacobi suite is requested alone for n >= 4
            without max_triples
    """
    suites = list(SUITE_ORDER) if config.suite is Suite.ALL else [config.suite]
    if Suite.JACOBI in suites and config.n >= 4 and config.max_triples is None:
        if config.suite is Suite.JACOBI:
            raise ConfigurationError(
                f"A full Jacobi sweep for n={config.n} is too large; set max_triples"
            )
        logger.warning(f"Skipping the jacobi suite for n={config.n} without max_triples")
        suites.remove(Suite.JACOBI)
    return suites


def run_suites(config: RunConfig) -> Tuple[SuiteReport, Dict[str, str]]:
    """
    Run the configured suites and assemble one report.

    Suites fan out over worker processes when workers > 1; the report is
    sorted, so it does not depend on completion order.

    Returns:
        Tuple (report, artifacts) where artifacts maps file-name suffixes to
        certificate text
    """
    suites = selected_suites(config)
    if config.workers > 1 and len(suites) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            outputs = list(pool.map(run_suite, [config] * len(suites), suites))
    else:
        outputs = [run_suite(config, suite, config.workers) for suite in suites]

    collector = get_metrics_collector()
    results: List[IdentityResult] = []
    artifacts: Dict[str, str] = {}
    for output in outputs:
        collector.record_suite_duration(output.suite.value, output.duration)
        for m, steps in output.integrations:
            collector.record_integration(m, steps)
        for r in output.results:
            if r.tolerance > 0:
                ratio = r.max_residual / r.tolerance
            else:
                ratio = 0.0 if r.max_residual == 0 else float("inf")
            collector.record_check(output.suite.value, r.tag, r.trials, r.passed, ratio)
        results.extend(output.results)
        artifacts.update(output.artifacts)

    report = build_report(config.suite.value, config.n, config.seed, config.trials,
                          config.radius, results)
    return report, artifacts
