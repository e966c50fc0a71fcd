"""Minimum-force grasping as a penalized optimal control problem.

The wrench balance is a linear arclength-varying system dw/ds = B(s) u(s)
with nonnegative cone coordinates u as inputs.  The solver iterates the
projected forward-backward sweep

    u  <-  max{ u + eta * (B^T p - u), 0 },    p = -chi * (w_L + w_e)

until the pointwise stationarity condition u = max{B^T p, 0} holds to
tolerance; that residual doubles as the convergence certificate.  When the
converged control is strictly positive everywhere, the quadratic problem has
the closed-form optimum evaluated by closed_form_cost, which serves as an
independent cross-check.
"""

from dataclasses import dataclass, field

import numpy as np

from ._sweep import DIVERGENCE_PATIENCE, STATUS_CONVERGED, STATUS_DIVERGED, run_sweep
from .errors import GridMismatchError, InvalidParameterError, StepSizeError
from .geometry import CurveSegment, as_segment
from .graspmap import FrictionCone, Wrench, grasp_maps, trapezoid_weights, _wrench_array

DEFAULT_ETA = 1e-6
DEFAULT_MAX_ITERS = 200_000


@dataclass(frozen=True)
class ControlProfile:
    """Nonnegative cone coordinates u(s_j) on a segment grid."""

    s: np.ndarray   # (M+1,)
    u: np.ndarray   # (M+1, 2), columns u1, u2

    @property
    def u1(self) -> np.ndarray:
        return self.u[:, 0]

    @property
    def u2(self) -> np.ndarray:
        return self.u[:, 1]


@dataclass(frozen=True)
class OcpProblem:
    """Grasp segment, friction cone, external wrench, and penalty weight."""

    segment: CurveSegment
    cone: FrictionCone
    external_wrench: np.ndarray
    chi: float

    # grid-sized arrays assembled once per problem
    B: np.ndarray = field(init=False, repr=False)         # (M+1, 3, 2)
    weights: np.ndarray = field(init=False, repr=False)   # trapezoid, (M+1,)

    def __post_init__(self):
        if self.chi <= 0:
            raise InvalidParameterError(f"chi must be positive, got {self.chi}")
        seg = as_segment(self.segment)
        object.__setattr__(self, "segment", seg)
        object.__setattr__(self, "external_wrench", _wrench_array(self.external_wrench))
        _, B = grasp_maps(seg, self.cone)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "weights", trapezoid_weights(len(seg.s), seg.grid_step))

    @property
    def n_points(self) -> int:
        return len(self.segment.s)

    def cone_gramian(self) -> np.ndarray:
        """W_hat = integral of B B^T over the segment (trapezoid)."""
        return np.einsum("j,jab,jcb->ac", self.weights, self.B, self.B)

    def zero_control(self) -> ControlProfile:
        return ControlProfile(self.segment.s, np.zeros((self.n_points, 2)))


@dataclass(frozen=True)
class SolveReport:
    """Converged control with its certificates and diagnostics."""

    control: ControlProfile
    force_profile: np.ndarray          # f(s) = V u(s), rows (f_t, f_n)
    terminal_wrench: Wrench
    cost: float
    stationarity_residual: float
    iterations: int
    converged: bool
    interior: bool
    costate: np.ndarray                # constant vector p
    residual_wrench_norm: float        # ||w_L + w_e||, large if w_e not resistible
    eta: float
    tol_stat: float


def _control_array(problem: OcpProblem, control) -> np.ndarray:
    u = control.u if isinstance(control, ControlProfile) else np.asarray(control, dtype=float)
    if u.shape != (problem.n_points, 2):
        raise GridMismatchError(
            f"control shape {u.shape} does not match problem grid ({problem.n_points}, 2)")
    return u


def integrate_state(problem: OcpProblem, control):
    """Wrench trajectory w(s_j) from w(0) = 0 and its endpoint w_L.

    Cumulative trapezoid integration of B(s) u(s) on the problem grid.
    """
    u = _control_array(problem, control)
    rate = np.einsum("jab,jb->ja", problem.B, u)
    h = problem.segment.grid_step
    increments = 0.5 * h * (rate[1:] + rate[:-1])
    w = np.vstack([np.zeros(3), np.cumsum(increments, axis=0)])
    return w, w[-1]


def cost(problem: OcpProblem, control) -> float:
    """J = (1/2) int ||u||^2 ds + (chi/2) ||w_L + w_e||^2, trapezoid rule."""
    u = _control_array(problem, control)
    _, w_L = integrate_state(problem, u)
    effort = float(problem.weights @ np.sum(u * u, axis=1))
    miss = w_L + problem.external_wrench
    return 0.5 * effort + 0.5 * problem.chi * float(miss @ miss)


def default_stationarity_tol(problem: OcpProblem) -> float:
    """Residual tolerance 1e-6 * chi * max(1, ||w_e||)."""
    return 1e-6 * problem.chi * max(1.0, float(np.linalg.norm(problem.external_wrench)))


def stable_step_size(problem: OcpProblem) -> float:
    """Step size eta = 1/(1 + chi * lambda_max(W_hat)), half the stability bound.

    The sweep update is linear with spectrum 1 - eta*(1 + chi*lambda_i(W_hat))
    on the reachable subspace, so this choice contracts every mode.
    """
    lam_max = float(np.linalg.eigvalsh(problem.cone_gramian())[-1])
    return 1.0 / (1.0 + problem.chi * lam_max)


def solve_forward_backward(problem: OcpProblem, eta: float | None = DEFAULT_ETA,
                           max_iters: int = DEFAULT_MAX_ITERS,
                           tol_stat: float | None = None,
                           initial_control=None,
                           backtrack: bool = False) -> SolveReport:
    """Projected forward-backward sweep for the minimum-force grasp.

    eta=None picks the spectral step from stable_step_size.  The iteration
    starts from zero control unless initial_control is given, keeps the
    nonnegativity constraints exact via the projection, and stops when the
    stationarity residual max |u - max(B^T p, 0)| drops below tol_stat.

    Raises StepSizeError if the cost increases for 50 consecutive
    iterations (diverging step); with backtrack=True the step is halved
    instead.
    """
    if eta is None:
        eta = stable_step_size(problem)
    if eta <= 0:
        raise InvalidParameterError(f"step size eta must be positive, got {eta}")
    if tol_stat is None:
        tol_stat = default_stationarity_tol(problem)

    m = problem.n_points
    # flattened layout: (2M,) vectors, (3, 2M) matrices -> two GEMVs per sweep
    Bmat = np.ascontiguousarray(problem.B.transpose(1, 0, 2).reshape(3, 2 * m))
    cw = np.repeat(problem.weights, 2)
    A = Bmat * cw                       # w_L = A @ u_flat
    we = problem.external_wrench
    chi = problem.chi

    if initial_control is None:
        u = np.zeros(2 * m)
    else:
        u = _control_array(problem, initial_control).reshape(-1).copy()
        if np.any(u < 0):
            raise InvalidParameterError("initial control must be nonnegative")

    u, w_L, p, residual, iterations, status, eta = run_sweep(
        Bmat, A, cw, we, chi, u, float(eta), float(tol_stat), int(max_iters),
        bool(backtrack))
    if status == STATUS_DIVERGED:
        raise StepSizeError(
            f"cost increased for {DIVERGENCE_PATIENCE} consecutive iterations "
            f"at eta={eta:g}; retry with a smaller step size")
    converged = status == STATUS_CONVERGED

    u2 = u.reshape(m, 2)
    control = ControlProfile(problem.segment.s, u2)
    final_cost = cost(problem, u2)
    u_max = float(u2.max())
    interior = u_max > 0 and bool(u2.min() > 1e-9 * u_max)
    return SolveReport(
        control=control,
        force_profile=u2 @ problem.cone.V.T,
        terminal_wrench=Wrench.from_array(w_L),
        cost=final_cost,
        stationarity_residual=residual,
        iterations=iterations,
        converged=converged,
        interior=interior,
        costate=p,
        residual_wrench_norm=float(np.linalg.norm(w_L + we)),
        eta=eta,
        tol_stat=tol_stat,
    )


def closed_form_cost(problem: OcpProblem):
    """Interior optimum (J*, p, w_L) of the quadratic problem.

    J* = (chi/2) w_e^T (I + chi W_hat)^{-1} w_e with constant costate
    p = -chi (I + chi W_hat)^{-1} w_e and w_L = W_hat p.  Valid as ground
    truth only when the iterative solution is interior; callers must check
    SolveReport.interior before comparing.
    """
    what = problem.cone_gramian()
    we = problem.external_wrench
    x = np.linalg.solve(np.eye(3) + problem.chi * what, we)
    j_star = 0.5 * problem.chi * float(we @ x)
    p = -problem.chi * x
    return j_star, p, what @ p


def gradient_check(problem: OcpProblem, control, h_fd: float = 1e-5) -> float:
    """Max relative error between the analytic cost gradient and central FD.

    The analytic gradient of the discrete cost w.r.t. u_i(s_j) is
    c_j * (u_i(s_j) - (B^T p)_i) with the same trapezoid weights c_j as the
    cost, so agreement is limited only by finite-difference truncation.
    The control must be strictly interior (u > h_fd) so the projection
    boundary plays no role.
    """
    u = _control_array(problem, control)
    if np.any(u <= h_fd):
        raise InvalidParameterError("gradient check requires a strictly interior control")
    _, w_L = integrate_state(problem, u)
    p = -problem.chi * (w_L + problem.external_wrench)
    g_analytic = problem.weights[:, None] * (u - np.einsum("jab,a->jb", problem.B, p))

    worst = 0.0
    scale = float(np.abs(g_analytic).max())
    for j in range(u.shape[0]):
        for i in range(2):
            bumped = u.copy()
            bumped[j, i] += h_fd
            plus = cost(problem, bumped)
            bumped[j, i] -= 2 * h_fd
            minus = cost(problem, bumped)
            fd = (plus - minus) / (2 * h_fd)
            worst = max(worst, abs(fd - g_analytic[j, i]) / max(scale, 1e-12))
    return worst
