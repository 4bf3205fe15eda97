"""Second-order and asymptotic diagnostics built on the kernel solver.

Covers the quarter-Laplacian (Levi form) of log K_p and its comparison with
B_p^2 at the center of the disk, log-log slope estimation for the modulus of
continuity of m_p and for the decay of H_p, and the multistart spread of
near-optimal maximizers as p increases to 1.

Stencil points, probe radii, and sweep entries are independent solver calls
and can run in parallel; aggregation is a pure reduction.  The ``jobs``
argument of limit_sweep partitions caches per worker.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .geometry import Domain, QuadratureGrid
from .kernel import (
    MARGIN_FRACTION,
    BoundaryMarginError,
    default_basis,
    default_grid,
    h_function,
    metric_at,
    mp_minimizer,
    require_interior,
)
from .series import evaluate
from .solver import (
    ExtremalProblem,
    Solution,
    SolverConfig,
    minimize_pnorm,
    multistart_minimize,
    point_constraint,
    _vandermonde,
)

__all__ = [
    "DegenerateFitError",
    "LeviRecord",
    "HolderFit",
    "LimitRecord",
    "fit_power_law",
    "quarter_laplacian",
    "levi_form_log_kp",
    "levi_metric_gap",
    "holder_exponent",
    "hp_scaling_exponent",
    "dp_estimate",
    "limit_sweep",
    "write_levi_csv",
    "write_holder_csv",
    "write_limit_csv",
]

NOISE_FLOOR = 1e-9


class DegenerateFitError(ValueError):
    """Too few usable points to fit a slope."""


@dataclass(frozen=True)
class LeviRecord:
    """Levi form of log K_p versus B_p^2 along one direction."""

    z: complex
    direction: complex
    p: float
    levi: float
    b_p_squared: float
    gap: float
    fd_step: float


@dataclass(frozen=True)
class HolderFit:
    """Log-log slope of a modulus-of-continuity measurement."""

    z_prime: complex
    w: complex
    p: float
    radii: tuple[float, ...]
    deltas: tuple[float, ...]
    slope: float
    intercept: float
    r_squared: float


@dataclass(frozen=True)
class LimitRecord:
    """Per-p kernel values and maximizer-spread lower bounds on a sweep to 1."""

    z: complex
    p_list: tuple[float, ...]
    d_p_estimates: tuple[float, ...]
    k_p_values: tuple[float, ...]
    restarts: int
    statuses: tuple[str, ...]


def fit_power_law(radii, deltas, noise_floor: float = NOISE_FLOOR):
    """Least-squares slope of log(delta) against log(r).

    Points with delta at or below the noise floor are excluded; fewer than two
    survivors is a degenerate fit and raises instead of silently fitting.
    Returns (slope, intercept, r_squared).
    """
    r = np.asarray(radii, dtype=float)
    d = np.asarray(deltas, dtype=float)
    if r.shape != d.shape:
        raise ValueError("radii and deltas must align")
    mask = d > noise_floor
    if int(mask.sum()) < 2:
        raise DegenerateFitError(
            f"degenerate fit: {int(mask.sum())} deltas above the noise floor {noise_floor:g}"
        )
    lx = np.log(r[mask])
    ly = np.log(d[mask])
    A = np.column_stack([lx, np.ones_like(lx)])
    (slope, intercept), residual, *_ = np.linalg.lstsq(A, ly, rcond=None)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    ss_res = float(residual[0]) if residual.size else float(
        np.sum((ly - A @ np.array([slope, intercept])) ** 2)
    )
    r_squared = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return float(slope), float(intercept), float(r_squared)


def quarter_laplacian(f, step: float) -> float:
    """(1/4)(d2/ds2 + d2/dt2) of f(s + it) at 0.

    Five-point central differences on each axis at ``step``, with one
    Richardson extrapolation against ``step/2``.  f is called at 13 points;
    callers that cache f see the shared +-step evaluations only once.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    f0 = f(0.0 + 0.0j)

    def second(h: float, axis: complex) -> float:
        return (
            -f(-2 * h * axis)
            + 16 * f(-h * axis)
            - 30 * f0
            + 16 * f(h * axis)
            - f(2 * h * axis)
        ) / (12.0 * h * h)

    def lap(h: float) -> float:
        return second(h, 1.0 + 0.0j) + second(h, 1.0j)

    coarse = lap(step)
    fine = lap(step / 2.0)
    return (16.0 * fine - coarse) / 15.0 / 4.0


def levi_form_log_kp(
    domain: Domain,
    p: float,
    z: complex,
    direction: complex = 1.0,
    step: float = 1e-2,
    config: SolverConfig | None = None,
    *,
    degree: int = 16,
    grid: QuadratureGrid | None = None,
    margin: float | None = None,
    cache: dict | None = None,
    log_kp=None,
) -> float:
    """Levi form of log K_p at z along ``direction`` by finite differences.

    ``log_kp`` optionally replaces the solver with a closed-form callable
    tau -> log K(tau), which isolates the stencil machinery from solver noise.
    """
    z = complex(z)
    direction = complex(direction)
    if log_kp is not None:
        return quarter_laplacian(lambda tau: log_kp(z + tau * direction), step)

    base = MARGIN_FRACTION * domain.outer_radius if margin is None else margin
    needed = base + 2.0 * step * abs(direction)
    if not domain.contains(z) or domain.boundary_distance(z) < needed:
        raise BoundaryMarginError(
            f"stencil around {z} needs boundary distance >= {needed:.6g}"
        )
    cache = {} if cache is None else cache
    grid = grid or default_grid(domain)

    def phi(tau: complex) -> float:
        kr = mp_minimizer(
            domain, p, z + tau * direction, None, grid, config,
            degree=degree, margin=margin, cache=cache,
        )
        return math.log(kr.k_p)

    return quarter_laplacian(phi, step)


def levi_metric_gap(
    domain: Domain,
    p: float,
    direction: complex = 1.0,
    step: float = 1e-2,
    config: SolverConfig | None = None,
    *,
    degree: int = 16,
    grid: QuadratureGrid | None = None,
    cache: dict | None = None,
) -> LeviRecord:
    """Levi form of log K_p minus B_p^2 at the center of a disk.

    On the disk the kernel is p-independent, so the Levi term is that of the
    p = 2 kernel while B_p varies; the gap is positive for p > 2, negative for
    p < 2, and zero at p = 2.
    """
    if domain.kind != "disk":
        raise ValueError("the center comparison needs a complete circular domain (disk)")
    direction = complex(direction)
    cache = {} if cache is None else cache
    grid = grid or default_grid(domain)
    levi = levi_form_log_kp(
        domain, p, 0.0, direction, step, config,
        degree=degree, grid=grid, cache=cache,
    )
    met = metric_at(
        domain, p, 0.0, direction, None, grid, config, degree=degree, cache=cache
    )
    b2 = met.b_p**2
    return LeviRecord(
        z=0.0 + 0.0j,
        direction=met.direction,
        p=p,
        levi=levi,
        b_p_squared=b2,
        gap=levi - b2,
        fd_step=step,
    )


def _probe_circle(w: complex, r: float, directions: int):
    return [w + r * complex(math.cos(a), math.sin(a))
            for a in (2.0 * math.pi * k / directions for k in range(directions))]


def _check_radii(radii) -> tuple[float, ...]:
    rs = tuple(float(r) for r in radii)
    if len(rs) < 2:
        raise DegenerateFitError(f"degenerate fit: need >= 2 radii, got {len(rs)}")
    if any(r <= 0 for r in rs):
        raise ValueError("radii must be positive")
    if max(rs) / min(rs) < 10.0**1.5:
        raise ValueError("radii must span at least 1.5 decades")
    return tuple(sorted(rs, reverse=True))


def holder_exponent(
    domain: Domain,
    p: float,
    z_prime: complex,
    w: complex,
    radii,
    directions: int = 8,
    config: SolverConfig | None = None,
    *,
    degree: int = 16,
    grid: QuadratureGrid | None = None,
    margin: float | None = None,
    cache: dict | None = None,
    noise_floor: float = NOISE_FLOOR,
) -> HolderFit:
    """Fit the growth exponent of r -> max_phi |m_p(z', w + r e^{i phi}) - m_p(z', w)|.

    The max over equally spaced directions avoids direction-specific flatness.
    Local regularity of the minimizer in its constraint point predicts a slope
    close to 1; the check target is slope >= 0.9.
    """
    if p <= 1:
        raise ValueError("holder_exponent requires p > 1")
    z_prime, w = complex(z_prime), complex(w)
    rs = _check_radii(radii)
    cache = {} if cache is None else cache
    grid = grid or default_grid(domain)

    def m_at(point: complex) -> complex:
        kr = mp_minimizer(
            domain, p, point, None, grid, config,
            degree=degree, margin=margin, cache=cache,
        )
        return evaluate(kr.minimizer.coeffs, z_prime)

    base = m_at(w)
    deltas = tuple(
        max(abs(m_at(probe) - base) for probe in _probe_circle(w, r, directions))
        for r in rs
    )
    slope, intercept, r2 = fit_power_law(rs, deltas, noise_floor)
    return HolderFit(
        z_prime=z_prime, w=w, p=p, radii=rs, deltas=deltas,
        slope=slope, intercept=intercept, r_squared=r2,
    )


def hp_scaling_exponent(
    domain: Domain,
    p: float,
    z: complex,
    radii,
    directions: int = 8,
    config: SolverConfig | None = None,
    *,
    degree: int = 16,
    grid: QuadratureGrid | None = None,
    margin: float | None = None,
    cache: dict | None = None,
    noise_floor: float = NOISE_FLOOR,
) -> HolderFit:
    """Fit the decay exponent of r -> max_phi |H_p(z, z + r e^{i phi})|.

    H_p vanishes to second order on the diagonal at p = 2; the expected slope
    there is 2, and at least 1.9 is the check target.
    """
    if p <= 1:
        raise ValueError("hp_scaling_exponent requires p > 1")
    z = complex(z)
    rs = _check_radii(radii)
    cache = {} if cache is None else cache
    grid = grid or default_grid(domain)

    deltas = tuple(
        max(
            abs(
                h_function(
                    domain, p, z, probe, None, grid, config,
                    degree=degree, margin=margin, cache=cache,
                )
            )
            for probe in _probe_circle(z, r, directions)
        )
        for r in rs
    )
    slope, intercept, r2 = fit_power_law(rs, deltas, noise_floor)
    return HolderFit(
        z_prime=z, w=z, p=p, radii=rs, deltas=deltas,
        slope=slope, intercept=intercept, r_squared=r2,
    )


def _pairwise_spread(problem: ExtremalProblem, solutions: list[Solution]) -> float:
    """Max of sum_i w_i |f - g|^p over near-optimal pairs (a lower bound)."""
    if len(solutions) < 2:
        return 0.0
    best = solutions[0].objective
    near = [s for s in solutions if s.objective <= best * (1.0 + 1e-4)]
    if len(near) < 2:
        return 0.0
    V = _vandermonde(problem.grid, problem.basis)
    values = [V @ s.coeffs.coefficients for s in near]
    w, p = problem.grid.weights, problem.p
    spread = 0.0
    for i in range(len(values)):
        for j in range(i + 1, len(values)):
            spread = max(spread, float(w @ np.abs(values[i] - values[j]) ** p))
    return spread


def dp_estimate(
    domain: Domain,
    p: float,
    z: complex,
    config: SolverConfig | None = None,
    *,
    degree: int = 8,
    n_min: int | None = None,
    grid: QuadratureGrid | None = None,
    margin: float | None = None,
) -> tuple[float, list[Solution]]:
    """Multistart lower bound for the spread d_p(z) of maximizers, 0 < p < 1.

    Maximizers of K_p with f(z) = 1 are exactly the minimizers of ||f||_p
    under that constraint.  The sup over all maximizer pairs is not
    computable; the returned value is a heuristic lower bound taken over the
    near-optimal multistart survivors (bound: lower).
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"dp_estimate requires 0 < p < 1, got {p}")
    config = config or SolverConfig()
    z = complex(z)
    require_interior(domain, z, margin)
    basis = default_basis(domain, p, degree, n_min)
    grid = grid or default_grid(domain)
    problem = ExtremalProblem(basis, grid, p, (point_constraint(basis, z, 1.0),))
    solutions = multistart_minimize(problem, config)
    if not solutions:
        raise RuntimeError(f"no converged multistart run at p={p}")
    return _pairwise_spread(problem, solutions), solutions


def _sweep_entry(domain, p, z, config, degree, n_min, grid, margin):
    if p < 1.0:
        d_p, sols = dp_estimate(
            domain, p, z, config,
            degree=degree, n_min=n_min, grid=grid, margin=margin,
        )
    else:
        basis = default_basis(domain, p, degree, n_min)
        problem = ExtremalProblem(basis, grid, p, (point_constraint(basis, z, 1.0),))
        sols = multistart_minimize(problem, config)
        if not sols:
            raise RuntimeError("no converged multistart run at p=1")
        d_p = _pairwise_spread(problem, sols)
    k_p = sols[0].objective ** -p
    return d_p, k_p


def limit_sweep(
    domain: Domain,
    z: complex,
    p_list,
    config: SolverConfig | None = None,
    *,
    degree: int = 8,
    n_min: int | None = None,
    grid: QuadratureGrid | None = None,
    margin: float | None = None,
    jobs: int = 1,
) -> LimitRecord:
    """Tabulate (p, K_p, d_p lower bound) over an ascending p list in (0, 1].

    Failures are reported per row in ``statuses`` (value ``ok`` otherwise);
    partial tables keep NaN in the failed entries.
    """
    ps = tuple(float(p) for p in p_list)
    if not ps:
        raise ValueError("p_list is empty")
    if any(not 0.0 < p <= 1.0 for p in ps):
        raise ValueError("p_list must lie in (0, 1]")
    if any(b <= a for a, b in zip(ps, ps[1:])):
        raise ValueError("p_list must be ascending")
    config = config or SolverConfig()
    z = complex(z)
    grid = grid or default_grid(domain)

    def run(p: float):
        try:
            d_p, k_p = _sweep_entry(domain, p, z, config, degree, n_min, grid, margin)
            return d_p, k_p, "ok"
        except Exception as exc:  # per-row status, partial tables permitted
            return math.nan, math.nan, f"error: {exc}"

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run, ps))
    else:
        results = [run(p) for p in ps]

    return LimitRecord(
        z=z,
        p_list=ps,
        d_p_estimates=tuple(r[0] for r in results),
        k_p_values=tuple(r[1] for r in results),
        restarts=config.restarts,
        statuses=tuple(r[2] for r in results),
    )


def write_levi_csv(path, records: list[LeviRecord]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["p", "re_z", "im_z", "levi", "bp2", "gap"])
        for r in records:
            writer.writerow(
                [
                    f"{r.p:.17g}",
                    f"{r.z.real:.17g}",
                    f"{r.z.imag:.17g}",
                    f"{r.levi:.17g}",
                    f"{r.b_p_squared:.17g}",
                    f"{r.gap:.17g}",
                ]
            )


def write_holder_csv(path, fit: HolderFit) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["r", "delta", "fitted"])
        for r, d in zip(fit.radii, fit.deltas):
            fitted = math.exp(fit.intercept) * r**fit.slope
            writer.writerow([f"{r:.17g}", f"{d:.17g}", f"{fitted:.17g}"])


def write_limit_csv(path, record: LimitRecord) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["p", "K_p", "d_p", "restarts"])
        for p, k_p, d_p in zip(record.p_list, record.k_p_values, record.d_p_estimates):
            writer.writerow(
                [f"{p:.17g}", f"{k_p:.17g}", f"{d_p:.17g}", record.restarts]
            )
