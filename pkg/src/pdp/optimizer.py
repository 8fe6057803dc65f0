"""Log-barrier interior-point minimization of the decay rate.

Minimizes Gamma[V] over potentials supported in [-a, a] subject to the
strict constraints

    lambda_V + mu > 0,      W_V(0)^2 > delta,      ||V||_H1^2 < b^2,

by descending the barrier objective

    F_tau[V] = Gamma[V] - tau [log(lambda+mu) + log(W^2-delta) + log(b^2-||V||^2)]

with limited-memory BFGS directions, Armijo backtracking, and outer
continuation tau -> tau/10.  Design variables are the nodal values of V on
the support; nodes outside are frozen at zero.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import fgr
from .errors import InfeasiblePoint, InfeasibleStart, PdpError
from .grid import DesignParams, PotentialField, h1_gradient, h1_norm_sq
from .spectral import wronskian_at_zero

__all__ = [
    "BarrierProblem",
    "BarrierEval",
    "OptTrace",
    "OptOptions",
    "OptResult",
    "DesignRun",
    "barrier_objective",
    "lbfgs_direction",
    "optimize",
    "sweep",
    "classify_mechanism",
]


@dataclass(frozen=True)
class BarrierProblem:
    """Barrier subproblem: constraint parameters plus the current weight."""

    params: DesignParams
    tau: float
    design_dim: int


@dataclass(frozen=True)
class BarrierEval:
    """Value and nodal gradient of the barrier objective at one potential.

    gradient is the full-grid nodal gradient (quadrature weights already
    applied; zero off the support).  margins = (lambda+mu, W^2-delta,
    b^2-||V||^2), all strictly positive.
    """

    value: float
    gradient: np.ndarray
    gamma: float
    margins: tuple[float, float, float]
    wronskian_variance: float
    result: fgr.FgrResult


@dataclass
class OptTrace:
    """Per-iteration records of an optimization run."""

    iterates: list[dict] = field(default_factory=list)

    def append(self, **kw) -> None:
        self.iterates.append(kw)


@dataclass(frozen=True)
class OptOptions:
    """Optimizer knobs; defaults chosen for n ~ 2000 node grids."""

    tau_start: float = 1e-2
    tau_min: float = 1e-8
    tau_factor: float = 0.1
    max_iters: int = 150
    memory: int = 10
    armijo: float = 1e-4
    backtrack: float = 0.5
    grad_tol: float = 1e-10
    max_backtracks: int = 40
    symmetric: bool = False
    # each tau subproblem is solved loosely: at most stage_iters steps (the
    # schedule split of max_iters when None) and to gradient tolerance
    # max(grad_tol, stage_grad_factor * tau).  Without this the -tau log(m)
    # terms, unbounded below as a margin grows, can hijack the whole budget
    # at the first tau driving the iterate deep into the interior.
    stage_iters: int | None = None
    stage_grad_factor: float = 1e-3
    # advance tau once gamma is negligible against it: the subproblem is
    # then pure barrier and polishing it only drifts the iterate
    tau_advance_factor: float = 1e-2


@dataclass(frozen=True)
class OptResult:
    V_opt: PotentialField
    trace: OptTrace
    result: fgr.FgrResult
    margins: tuple[float, float, float]
    iterations: int
    converged: bool
    status: str


@dataclass
class DesignRun:
    """Outcome of one entry of a parameter sweep."""

    label: str
    params: DesignParams
    gamma_init: float | None = None
    gamma_opt: float | None = None
    iterations: int = 0
    margins: tuple[float, float, float] | None = None
    mechanism: str | None = None
    potential: PotentialField | None = None
    trace: OptTrace | None = None
    error: str | None = None


def classify_mechanism(res: fgr.FgrResult) -> str:
    """Low-density-of-states ('A') vs matrix-element-cancellation ('B').

    'A': the continuum is nearly opaque at the resonant wavenumber
    (|t(k)|^2 < 1e-2); 'B': the continuum is transparent (|t|^2 > 0.25)
    and smallness comes from the coupling matrix elements.
    """
    tsq = abs(res.scattering.t) ** 2
    if tsq < 1e-2:
        return "A"
    if tsq > 0.25:
        return "B"
    return "mixed"


def barrier_objective(V: PotentialField, problem: BarrierProblem) -> BarrierEval:
    """Barrier value and nodal gradient; raises InfeasiblePoint off-interior.

    The Gamma and constraint gradients are continuous Riesz fields, so the
    nodal gradient applies the trapezoid weights; the H1 term is an exact
    discrete quadratic form and contributes its own nodal gradient.
    """
    params = problem.params
    res = fgr.gamma(V, params)  # raises NoBoundState / ResonanceBelowCutoff
    if res.bound_state.count_negative_eigenvalues != 1:
        raise InfeasiblePoint(
            f"{res.bound_state.count_negative_eigenvalues} bound states (need exactly 1)"
        )
    wr = wronskian_at_zero(V, params.wronskian_tol)
    if not wr.valid:
        raise InfeasiblePoint(
            f"Wronskian variance {wr.variance:.3g} above tolerance"
        )
    m1 = res.bound_state.lam + params.mu
    m3 = params.b ** 2 - h1_norm_sq(V)
    aw = abs(wr.w0)
    if m1 <= 0 or m3 <= 0 or aw * aw <= params.delta:
        raise InfeasiblePoint(
            f"constraint margins (lam+mu={m1:.3g}, W0={wr.w0:.3g}, b^2-H1={m3:.3g})"
        )
    # the W margin is handled in log space: W0 grows like exp(integral
    # sqrt(V_+)) and its square can overflow for tall barriers
    if aw > 1e100:
        m2 = np.inf
        log_m2 = 2.0 * np.log(aw)
        w_coef = 2.0 / wr.w0  # 2 W0 / (W0^2 - delta), asymptotically
    else:
        m2 = aw * aw - params.delta
        log_m2 = np.log(m2)
        w_coef = 2.0 * wr.w0 / m2
    tau = problem.tau
    value = res.gamma - tau * (np.log(m1) + log_m2 + np.log(m3))

    w = V.grid.weights
    g_field = fgr.gamma_gradient(V, params, res).values
    g_field = g_field - tau * (
        res.bound_state.psi ** 2 / m1
        + w_coef * (wr.eta_plus * wr.eta_minus)
    )
    grad = w * g_field + (tau / m3) * h1_gradient(V)
    grad = np.where(V.support_mask, grad, 0.0)
    return BarrierEval(
        value=float(value),
        gradient=grad,
        gamma=res.gamma,
        margins=(float(m1), float(m2), float(m3)),
        wronskian_variance=wr.variance,
        result=res,
    )


def lbfgs_direction(history: list[tuple[np.ndarray, np.ndarray]], g: np.ndarray) -> np.ndarray:
    """Two-loop recursion over (s, y) pairs; steepest descent when empty.

    Pairs with non-positive curvature s.y are skipped, so the output is a
    descent direction whenever any valid pair (or none) remains.
    """
    q = -g.copy()
    if not history:
        return q
    alphas = []
    pairs = [(s, y, float(s @ y)) for s, y in history if float(s @ y) > 0.0]
    if not pairs:
        return q
    for s, y, sy in reversed(pairs):
        a = (s @ q) / sy
        alphas.append(a)
        q -= a * y
    s, y, sy = pairs[-1]
    q *= sy / float(y @ y)
    for (s, y, sy), a in zip(pairs, reversed(alphas)):
        b = (y @ q) / sy
        q += (a - b) * s
    return q


def _symmetrize(v: np.ndarray) -> np.ndarray:
    return 0.5 * (v + v[::-1])


def optimize(
    V_init: PotentialField,
    params: DesignParams,
    opts: OptOptions = OptOptions(),
) -> OptResult:
    """Barrier-continuation L-BFGS descent from a strictly feasible start.

    Each tau stage restarts the curvature history (the objective changes),
    runs Armijo-backtracked L-BFGS steps with feasibility-preserving
    clipping (infeasible or invalid trial points just shrink the step), and
    ends on its gradient tolerance or a line-search failure.  The shared
    iteration budget opts.max_iters spans all stages.
    """
    nfree = int(np.count_nonzero(V_init.support_mask))
    design_dim = (nfree + 1) // 2 if opts.symmetric else nfree
    v = np.asarray(V_init.values).copy()
    if opts.symmetric:
        v = _symmetrize(v)
    V = V_init.with_values(v)

    def stage_problem(tau):
        return BarrierProblem(params=params, tau=tau, design_dim=design_dim)

    try:
        cur = barrier_objective(V, stage_problem(opts.tau_start))
    except PdpError as exc:
        raise InfeasibleStart(f"initial potential is not strictly feasible: {exc}") from exc

    n_stages = 1 + max(
        0,
        int(np.ceil(np.log(opts.tau_start / opts.tau_min) / np.log(1.0 / opts.tau_factor) - 1e-9)),
    )
    stage_cap = opts.stage_iters or max(1, int(np.ceil(opts.max_iters / n_stages)))

    trace = OptTrace()
    it = 0
    tau = opts.tau_start
    stage_status = "converged"
    budget_hit = False
    while True:
        problem = stage_problem(tau)
        cur = barrier_objective(V, problem)
        history: list[tuple[np.ndarray, np.ndarray]] = []
        stage_status = "gradient tolerance reached"
        stage_tol = max(opts.grad_tol, opts.stage_grad_factor * tau)
        final_stage = tau <= opts.tau_min * (1.0 + 1e-12)
        if final_stage:
            stage_tol = opts.grad_tol
        stage_it = 0
        while True:
            gnorm = float(np.max(np.abs(cur.gradient)))
            if gnorm <= stage_tol:
                break
            if not final_stage and stage_it >= stage_cap:
                stage_status = "stage budget reached"
                break
            if not final_stage and cur.gamma < opts.tau_advance_factor * tau:
                stage_status = "stage budget reached"
                break
            if it >= opts.max_iters:
                budget_hit = True
                break
            d = lbfgs_direction(history, cur.gradient)
            if opts.symmetric:
                d = _symmetrize(d)
            slope = float(d @ cur.gradient)
            if slope >= 0.0:
                d = -cur.gradient
                slope = -float(cur.gradient @ cur.gradient)
            step = 1.0
            accepted = None
            for _ in range(opts.max_backtracks):
                trial_v = V.values + step * d
                if opts.symmetric:
                    trial_v = _symmetrize(trial_v)
                try:
                    trial = V.with_values(trial_v)
                    ev = barrier_objective(trial, problem)
                except PdpError:
                    step *= opts.backtrack  # clip back into the interior
                    continue
                if ev.value <= cur.value + opts.armijo * step * slope:
                    accepted = (trial, ev)
                    break
                step *= opts.backtrack
            if accepted is None:
                stage_status = "line-search failure"
                break
            trial, ev = accepted
            s = trial.values - V.values
            y = ev.gradient - cur.gradient
            history.append((s, y))
            if len(history) > opts.memory:
                history.pop(0)
            V, cur = trial, ev
            it += 1
            stage_it += 1
            trace.append(
                iter=it,
                tau=tau,
                gamma=cur.gamma,
                barrier_value=cur.value,
                grad_norm=float(np.max(np.abs(cur.gradient))),
                step_length=step,
                margin_resonance=cur.margins[0],
                margin_wronskian=cur.margins[1],
                margin_h1=cur.margins[2],
                wronskian_variance=cur.wronskian_variance,
            )
        if budget_hit:
            stage_status = "iteration budget exhausted"
            break
        if tau <= opts.tau_min * (1.0 + 1e-12):
            break
        tau = max(tau * opts.tau_factor, opts.tau_min)
    status = stage_status
    converged = not budget_hit
    return OptResult(
        V_opt=V,
        trace=trace,
        result=cur.result,
        margins=cur.margins,
        iterations=it,
        converged=converged,
        status=status,
    )


def sweep(entries) -> list[DesignRun]:
    """Run independent optimizations; per-entry failures are recorded.

    entries: iterable of (label, V_init, params, opts) tuples.
    """
    runs = []
    for label, V_init, params, opts in entries:
        run = DesignRun(label=str(label), params=params)
        try:
            run.gamma_init = fgr.gamma(V_init, params).gamma
            out = optimize(V_init, params, opts)
            run.gamma_opt = out.result.gamma
            run.iterations = out.iterations
            run.margins = out.margins
            run.mechanism = classify_mechanism(out.result)
            run.potential = out.V_opt
            run.trace = out.trace
        except PdpError as exc:
            run.error = f"{type(exc).__name__}: {exc}"
        runs.append(run)
    return runs
