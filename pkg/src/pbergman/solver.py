"""Minimize the quadrature p-norm of a truncated series over an affine slice.

The engine behind every extremal quantity in the package.  Complex linear
constraints are eliminated exactly (particular solution plus an orthonormal
null-space basis), so every iterate is feasible to rounding.  The non-smooth
objective sum_i w_i |f(z_i)|^p is replaced by sum_i w_i (|f(z_i)|^2 + eps)^(p/2)
with eps driven down a fixed schedule; each stage runs iteratively reweighted
least squares with a backtracking line search, so the recorded objective
sequence is non-increasing.

Basis columns are pre-scaled to unit p-norm on the grid for conditioning;
reported coefficients are always in the raw monomial basis.

A single descent is sequential.  Restarts and independent problems may run in
parallel; problems, configs, and solutions are immutable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .geometry import QuadratureGrid
from .series import BasisSpec, CoeffVector

__all__ = [
    "DEFAULT_SMOOTHING_SCHEDULE",
    "InfeasibleConstraintsError",
    "SolverConfig",
    "ExtremalProblem",
    "Solution",
    "point_constraint",
    "derivative_constraint",
    "minimize_pnorm",
    "multistart_minimize",
    "kkt_residual",
    "smoothed_objective",
    "solution_record",
]

DEFAULT_SMOOTHING_SCHEDULE = (1e-2, 1e-4, 1e-6, 1e-8, 1e-10)

_ARMIJO = 1e-4
_MAX_BACKTRACKS = 40


class InfeasibleConstraintsError(ValueError):
    """Constraint rows are inconsistent or linearly dependent."""


@dataclass(frozen=True)
class SolverConfig:
    """Descent controls.

    ``tolerance`` is the relative objective-change stagnation threshold,
    ``max_iterations`` the per-smoothing-stage iteration cap.
    """

    tolerance: float = 1e-10
    max_iterations: int = 200
    smoothing_schedule: tuple[float, ...] = DEFAULT_SMOOTHING_SCHEDULE
    restarts: int = 8
    rng_seed: int = 0

    def __post_init__(self):
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        sched = tuple(float(e) for e in self.smoothing_schedule)
        if not sched or any(e <= 0 for e in sched):
            raise ValueError("smoothing_schedule must be positive")
        if any(b >= a for a, b in zip(sched, sched[1:])):
            raise ValueError("smoothing_schedule must be strictly decreasing")
        if sched[-1] > 1e-10:
            raise ValueError("smoothing_schedule must end at or below 1e-10")
        object.__setattr__(self, "smoothing_schedule", sched)


def point_constraint(basis: BasisSpec, z: complex, value: complex = 1.0) -> tuple[np.ndarray, complex]:
    """Row enforcing f(z) = value."""
    z = complex(z)
    if basis.has_poles() and z == 0:
        raise ValueError("cannot constrain a basis with poles at z = 0")
    row = np.array([z**n for n in basis.exponents], dtype=complex)
    return row, complex(value)


def derivative_constraint(basis: BasisSpec, z: complex, value: complex = 1.0) -> tuple[np.ndarray, complex]:
    """Row enforcing f'(z) = value."""
    z = complex(z)
    if basis.has_poles() and z == 0:
        raise ValueError("cannot constrain a basis with poles at z = 0")
    row = np.array(
        [0.0 if n == 0 else n * z ** (n - 1) for n in basis.exponents], dtype=complex
    )
    return row, complex(value)


@dataclass(frozen=True, eq=False)
class ExtremalProblem:
    """min ||f||_p over coefficients subject to complex linear constraints.

    ``constraints`` is a sequence of (row, target) pairs; rows act on raw
    monomial coefficients.  Rows must be linearly independent and fewer than
    the basis dimension, so the feasible slice has positive dimension.
    """

    basis: BasisSpec
    grid: QuadratureGrid
    p: float
    constraints: tuple[tuple[np.ndarray, complex], ...]

    def __post_init__(self):
        if self.p <= 0:
            raise ValueError(f"p must be positive, got {self.p}")
        cons = tuple(
            (np.asarray(row, dtype=complex), complex(target))
            for row, target in self.constraints
        )
        dim = self.basis.dimension
        if not cons:
            raise ValueError("at least one constraint is required")
        if any(row.shape != (dim,) for row, _ in cons):
            raise ValueError("constraint rows must match the basis dimension")
        if len(cons) >= dim:
            raise ValueError(
                f"{len(cons)} constraints leave no freedom in dimension {dim}"
            )
        C = np.array([row for row, _ in cons])
        if np.linalg.matrix_rank(C) < len(cons):
            raise InfeasibleConstraintsError("constraint rows are linearly dependent")
        object.__setattr__(self, "constraints", cons)

    @property
    def constraint_matrix(self) -> np.ndarray:
        return np.array([row for row, _ in self.constraints])

    @property
    def constraint_targets(self) -> np.ndarray:
        return np.array([target for _, target in self.constraints])


@dataclass(frozen=True, eq=False)
class Solution:
    """Outcome of one descent.

    ``objective`` is the attained ||f||_p.  ``stationarity_residual`` is the
    norm of the reduced gradient of the final smoothed objective; for p <= 1
    it is diagnostic only (convergence is declared on objective stagnation).
    ``objective_history`` records the smoothed objective at every accepted
    step and is non-increasing.
    """

    coeffs: CoeffVector
    objective: float
    feasibility_residual: float
    stationarity_residual: float
    iterations: int
    converged: bool
    seed: int | None = None
    objective_history: np.ndarray = field(default_factory=lambda: np.empty(0))


def _vandermonde(grid: QuadratureGrid, basis: BasisSpec) -> np.ndarray:
    V = np.empty((grid.nodes.size, basis.dimension), dtype=complex)
    for j, n in enumerate(basis.exponents):
        V[:, j] = grid.nodes**n
    return V


class _Workspace:
    """Per-problem precomputation: scaled Vandermonde and constraint elimination."""

    def __init__(self, problem: ExtremalProblem):
        self.problem = problem
        self.w = problem.grid.weights
        self.p = problem.p

        V = _vandermonde(problem.grid, problem.basis)
        # unit p-norm per column on this grid
        self.col_norms = (self.w @ np.abs(V) ** self.p) ** (1.0 / self.p)
        self.V = V / self.col_norms[None, :]

        C_raw = problem.constraint_matrix
        b = problem.constraint_targets
        self.C_raw = C_raw
        self.b = b
        Cs = C_raw / self.col_norms[None, :]

        a0, *_ = np.linalg.lstsq(Cs, b, rcond=None)
        residual = np.linalg.norm(Cs @ a0 - b)
        if residual > 1e-8 * (1.0 + np.linalg.norm(b)):
            raise InfeasibleConstraintsError(
                f"constraints are inconsistent (residual {residual:.3e})"
            )
        N = scipy.linalg.null_space(Cs)
        if N.shape[1] != problem.basis.dimension - len(problem.constraints):
            raise InfeasibleConstraintsError("constraint rows are linearly dependent")
        self.a0 = a0
        self.N = N
        self.M = self.V @ N
        self.u0 = self.V @ a0

    def raw_from_t(self, t: np.ndarray) -> np.ndarray:
        return (self.a0 + self.N @ t) / self.col_norms

    def t_from_raw(self, a_raw: np.ndarray) -> np.ndarray:
        return self.N.conj().T @ (a_raw * self.col_norms - self.a0)

    def values(self, t: np.ndarray) -> np.ndarray:
        return self.u0 + self.M @ t


def _phi_smoothed(u: np.ndarray, w: np.ndarray, p: float, eps: float) -> float:
    return float(w @ (np.abs(u) ** 2 + eps) ** (0.5 * p))


def _phi_raw(u: np.ndarray, w: np.ndarray, p: float) -> float:
    return float(w @ np.abs(u) ** p)


def _weighted_solve(A: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    try:
        c, low = scipy.linalg.cho_factor(A)
        return scipy.linalg.cho_solve((c, low), rhs)
    except scipy.linalg.LinAlgError:
        return np.linalg.lstsq(A, rhs, rcond=None)[0]


def _irls_stage(ws: _Workspace, t, u, eps, config):
    """One smoothing stage.  Returns (t, u, iterations, stagnated, history)."""
    w, p, M = ws.w, ws.p, ws.M
    phi = _phi_smoothed(u, w, p, eps)
    history = []
    stagnated = False
    # For p > 2 the reweighted quadratic underestimates curvature by up to
    # p - 1 along the radial direction; relaxing the step to 2/p restores a
    # uniform (p - 2)/p contraction instead of a slow Armijo zigzag.
    alpha0 = 1.0 if p <= 2.0 else 2.0 / p
    for _ in range(config.max_iterations):
        rho = (np.abs(u) ** 2 + eps) ** (0.5 * p - 1.0)
        omega = w * (0.5 * p) * rho
        Mh = M.conj().T
        A = (Mh * omega) @ M
        rhs = -(Mh @ (omega * ws.u0))
        t_new = _weighted_solve(A, rhs)
        delta = t_new - t
        grad_t = Mh @ (omega * u)
        descent = 2.0 * float(np.real(np.vdot(grad_t, delta)))
        if descent >= 0.0:
            stagnated = True  # at a stationary point up to rounding
            break
        du = M @ delta
        alpha = alpha0
        accepted = False
        for _ in range(_MAX_BACKTRACKS):
            u_try = u + alpha * du
            phi_try = _phi_smoothed(u_try, w, p, eps)
            if phi_try <= phi + _ARMIJO * alpha * descent:
                accepted = True
                break
            alpha *= 0.5
        if not accepted:
            stagnated = True
            break
        t = t + alpha * delta
        u = u_try
        history.append(phi_try)
        if phi - phi_try <= config.tolerance * max(phi_try, 1e-300):
            phi = phi_try
            stagnated = True
            break
        phi = phi_try
    return t, u, len(history), stagnated, history


def minimize_pnorm(
    problem: ExtremalProblem,
    config: SolverConfig | None = None,
    *,
    start: np.ndarray | None = None,
    seed: int | None = None,
) -> Solution:
    """Run the continuation descent; returns the final iterate with diagnostics.

    ``start`` is an optional raw coefficient vector; it is projected onto the
    feasible slice, so it need not satisfy the constraints exactly.  Without
    it the descent starts from the weighted least-squares solution, which is
    the exact minimizer for p = 2.  Non-convergence is reported through
    ``converged``, never silently.
    """
    config = config or SolverConfig()
    ws = _Workspace(problem)
    w, p = ws.w, ws.p
    schedule = config.smoothing_schedule

    if start is not None:
        t = ws.t_from_raw(np.asarray(start, dtype=complex))
    else:
        Mh = ws.M.conj().T
        t = _weighted_solve((Mh * w) @ ws.M, -(Mh @ (w * ws.u0)))
    u = ws.values(t)

    history = [_phi_smoothed(u, w, p, schedule[0])]
    stage_raw = []
    total_iters = 0
    all_stagnated = True
    for i, eps in enumerate(schedule):
        if i > 0:
            # same iterate under the smaller eps; keeps the record monotone
            history.append(_phi_smoothed(u, w, p, eps))
        t, u, iters, stagnated, seg = _irls_stage(ws, t, u, eps, config)
        history.extend(seg)
        total_iters += iters
        all_stagnated = all_stagnated and stagnated
        stage_raw.append(_phi_raw(u, w, p))

    drift = abs(stage_raw[-1] - stage_raw[-2]) if len(stage_raw) >= 2 else 0.0
    settled = drift <= max(100.0 * config.tolerance, 1e-12) * max(stage_raw[-1], 1e-300)
    converged = all_stagnated and settled

    a_raw = ws.raw_from_t(t)
    feasibility = float(
        np.max(np.abs(ws.C_raw @ a_raw - ws.b)) if len(ws.b) else 0.0
    )
    eps_last = schedule[-1]
    rho = (np.abs(u) ** 2 + eps_last) ** (0.5 * p - 1.0)
    stationarity = float(
        np.linalg.norm(2.0 * (ws.M.conj().T @ (w * (0.5 * p) * rho * u)))
    )
    hist = np.array(history)
    hist.setflags(write=False)
    return Solution(
        coeffs=CoeffVector(problem.basis, a_raw),
        objective=_phi_raw(u, w, p) ** (1.0 / p),
        feasibility_residual=feasibility,
        stationarity_residual=stationarity,
        iterations=total_iters,
        converged=converged,
        seed=seed,
        objective_history=hist,
    )


def _coefficient_distance(a: np.ndarray, b: np.ndarray) -> float:
    scale = max(1.0, float(np.linalg.norm(a)), float(np.linalg.norm(b)))
    return float(np.linalg.norm(a - b)) / scale


def multistart_minimize(
    problem: ExtremalProblem, config: SolverConfig | None = None
) -> list[Solution]:
    """Seeded restarts for the (possibly nonconvex) regime 0 < p < 1.

    Descents start from the p = 1 solution of the same constraints and from
    random perturbations of it.  Converged solutions are deduplicated at
    coefficient distance 1e-4 and returned sorted by objective; distinct
    survivors are all reported, uniqueness is never asserted.
    """
    config = config or SolverConfig()
    if problem.p == 1.0:
        base_problem = problem
    else:
        base_problem = ExtremalProblem(
            problem.basis, problem.grid, 1.0, problem.constraints
        )
    base = minimize_pnorm(base_problem, config)
    base_coeffs = base.coeffs.coefficients

    runs = [minimize_pnorm(problem, config, start=base_coeffs, seed=config.rng_seed)]
    scale = 0.5 * max(1.0, float(np.linalg.norm(base_coeffs)))
    dim = base_coeffs.size
    for k in range(1, config.restarts):
        rng = np.random.default_rng([config.rng_seed, k])
        noise = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        start = base_coeffs + scale * noise / math.sqrt(dim)
        runs.append(minimize_pnorm(problem, config, start=start, seed=k))

    survivors: list[Solution] = []
    for sol in sorted(
        (s for s in runs if s.converged), key=lambda s: s.objective
    ):
        if all(
            _coefficient_distance(sol.coeffs.coefficients, kept.coeffs.coefficients)
            > 1e-4
            for kept in survivors
        ):
            survivors.append(sol)
    return survivors


def kkt_residual(problem: ExtremalProblem, solution: Solution) -> float:
    """Norm of the objective gradient projected onto the constraint null space.

    The objective is ||f||_p^p, differentiable away from zeros of f for p > 1.
    The gradient is encoded as grad_re + 1j*grad_im per complex coefficient.
    """
    if problem.p <= 1:
        raise ValueError("kkt_residual requires p > 1")
    V = _vandermonde(problem.grid, problem.basis)
    u = V @ solution.coeffs.coefficients
    absu = np.abs(u)
    with np.errstate(divide="ignore", invalid="ignore"):
        c = np.where(absu > 0, absu ** (problem.p - 2.0), 0.0) * u
    grad = V.conj().T @ (problem.grid.weights * problem.p * c)
    N = scipy.linalg.null_space(problem.constraint_matrix)
    return float(np.linalg.norm(N.conj().T @ grad))


def smoothed_objective(
    problem: ExtremalProblem, coefficients: np.ndarray, eps: float
) -> tuple[float, np.ndarray]:
    """Value and coefficient gradient of sum_i w_i (|f(z_i)|^2 + eps)^(p/2).

    The gradient is encoded as grad_re + 1j*grad_im per complex coefficient,
    so the derivative along a complex direction d with real step h is
    Re(conj(grad) . d) * h.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    V = _vandermonde(problem.grid, problem.basis)
    a = np.asarray(coefficients, dtype=complex)
    u = V @ a
    w, p = problem.grid.weights, problem.p
    value = _phi_smoothed(u, w, p, eps)
    rho = (np.abs(u) ** 2 + eps) ** (0.5 * p - 1.0)
    grad = V.conj().T @ (w * p * rho * u)
    return value, grad


def solution_record(solution: Solution) -> dict:
    """JSON-ready diagnostics for one run."""
    return {
        "objective": solution.objective,
        "feasibility_residual": solution.feasibility_residual,
        "stationarity_residual": solution.stationarity_residual,
        "iterations": solution.iterations,
        "converged": solution.converged,
        "seed": solution.seed,
    }
