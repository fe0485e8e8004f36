"""Time integrators: two mimetic element solvers plus classical one-step methods.

Both element methods expand the solution inside a step as a degree-p
polynomial through the Gauss-Lobatto nodes and difference it with the
incidence matrix; they differ only in how the resulting rate 1-cochain is
paired against the vector field. The collocation pairing (mci) matches the
rate to the field pointwise at the dual Gauss nodes, which reproduces Gauss
collocation and is symplectic. The Galerkin pairing (mgi) tests the rate
against the dual basis with the diagonal dual mass on the left and a
quadrature of the field against the same basis on the right; with enough
quadrature points it conserves polynomial Hamiltonians exactly.

Residuals carry a 1/sqrt(g) factor so Newton tolerances are expressed in
vector-field units regardless of the step size. Stage unknowns are flattened
variable-major (all stages of y_1, then y_2, ...). Steps accept negative dt,
which builds a reversed element; the integrate driver itself always walks
forward.
"""

import enum
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from .basis import edge_eval_all, gauss_rule, nodal_eval_all
from .errors import DomainError, EvaluationError, GeodesyError, IntegrationError
from .mimetic import ElementGrid, incidence_matrix
from .newton import NewtonConfig, newton_solve
from .systems import OdeSystem

_DEFAULT_QRHS_OFFSET = 10


class Method(enum.Enum):
    MCI = "mci"
    MGI = "mgi"
    EXPLICIT_EULER = "euler"
    SYMPLECTIC_EULER = "seuler"
    RK4 = "rk4"

    @property
    def is_element_method(self) -> bool:
        return self in (Method.MCI, Method.MGI)


def default_qrhs(p: int) -> int:
    """Default quadrature size for the Galerkin pairing: 2p + 10."""
    return 2 * p + _DEFAULT_QRHS_OFFSET


@lru_cache(maxsize=None)
def _collocation_tables(p: int):
    # reference-element matrices shared by every step of order p:
    #   E      incidence, (p+1, p)
    #   Et     edge functions at the dual nodes, Et[l, j] = e_l(tau_j)
    #   Lt     nodal basis at the dual nodes, (p+1, p)
    #   Dmat   E @ Et, the linearization of the rate at the dual nodes
    grid = ElementGrid.build(p, 0.0, 1.0)
    tau = grid.dual.nodes
    E = np.asarray(incidence_matrix(p).matrix)
    Et = np.array([edge_eval_all(grid.edge_basis, t) for t in tau]).T
    Lt = np.array([nodal_eval_all(grid.primal_basis, t) for t in tau]).T
    Dmat = E @ Et
    for arr in (E, Et, Lt, Dmat):
        arr.setflags(write=False)
    return E, Et, Lt, Dmat


@lru_cache(maxsize=None)
def _galerkin_tables(p: int, q_rhs: int):
    # quadrature tables for the Galerkin right-hand side:
    #   Lq      primal nodal basis at the quadrature nodes, (p+1, q)
    #   Ltilde  dual basis at the quadrature nodes, (p, q)
    grid = ElementGrid.build(p, 0.0, 1.0)
    quad = gauss_rule(q_rhs)
    Lq = np.array([nodal_eval_all(grid.primal_basis, s) for s in quad.nodes]).T
    Ltilde = np.array([nodal_eval_all(grid.dual_basis, s) for s in quad.nodes]).T
    for arr in (Lq, Ltilde):
        arr.setflags(write=False)
    return quad, Lq, Ltilde


@dataclass(frozen=True)
class ElementSolution:
    """Polynomial solution on one element: values at the p+1 primal nodes.

    Column 0 of coefficients is the element's initial condition, bitwise.
    """

    grid: ElementGrid
    coefficients: np.ndarray  # (dim, p+1)
    newton_iterations: int = 0

    def __post_init__(self):
        self.coefficients.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.coefficients.shape[0]

    def endpoint(self) -> np.ndarray:
        return self.coefficients[:, -1].copy()

    def evaluate(self, tau: float) -> np.ndarray:
        """State at reference coordinate tau."""
        return self.coefficients @ nodal_eval_all(self.grid.primal_basis, tau)

    def evaluate_time(self, t: float) -> np.ndarray:
        return self.evaluate(float(self.grid.to_ref(t)))


def _field_at(sys: OdeSystem, y, where: str) -> np.ndarray:
    reason = sys.check_domain(y)
    if reason is not None:
        raise DomainError(f"state leaves the domain at {where}: {reason}")
    h = np.asarray(sys.field(y), dtype=float)
    if not np.all(np.isfinite(h)):
        raise EvaluationError(f"vector field is non-finite at {where}")
    return h


def _stage_coefficients(y0: np.ndarray, z: np.ndarray, p: int) -> np.ndarray:
    coeffs = np.empty((len(y0), p + 1))
    coeffs[:, 0] = y0
    coeffs[:, 1:] = z.reshape(len(y0), p)
    return coeffs


def mci_residual(sys: OdeSystem, sol: ElementSolution) -> np.ndarray:
    """Collocation residual at the dual nodes, flattened variable-major.

    R[i, j] = (rate of y_i at dual node j) / sqrt(g) - h_i(y at dual node j).
    """
    grid = sol.grid
    E, Et, Lt, _ = _collocation_tables(grid.p)
    coeffs = sol.coefficients
    rate = (coeffs @ E) @ Et  # coboundary per variable, then edge expansion
    Y = coeffs @ Lt
    H = np.empty_like(Y)
    for j in range(grid.p):
        t = grid.to_time(grid.dual.nodes[j])
        H[:, j] = _field_at(sys, Y[:, j], f"collocation node {j} (t={t:g})")
    return (rate / grid.sqrt_g - H).reshape(-1)


def mgi_residual(sys: OdeSystem, sol: ElementSolution, q_rhs: int) -> np.ndarray:
    """Galerkin residual against the dual basis, flattened variable-major.

    R[i, m] = w_m (rate of y_i at dual node m) / sqrt(g)
              - sum_nu omega_nu h_i(y(sigma_nu)) ltilde_m(sigma_nu).
    """
    grid = sol.grid
    if q_rhs < 1:
        raise ValueError(f"q_rhs must be positive, got {q_rhs}")
    E, Et, _, _ = _collocation_tables(grid.p)
    quad, Lq, Ltilde = _galerkin_tables(grid.p, q_rhs)
    coeffs = sol.coefficients
    rate = (coeffs @ E) @ Et
    Yq = coeffs @ Lq
    Hq = np.empty_like(Yq)
    for nu in range(len(quad)):
        t = grid.to_time(quad.nodes[nu])
        Hq[:, nu] = _field_at(sys, Yq[:, nu], f"quadrature node {nu} (t={t:g})")
    rhs = Hq @ (quad.weights[:, None] * Ltilde.T)
    lhs = rate * grid.dual.weights / grid.sqrt_g
    return (lhs - rhs).reshape(-1)


def _solve_element(sys, y0, grid, residual_of, jacobian_of, config, initial_guess):
    p = grid.p
    y0 = np.asarray(y0, dtype=float)
    if len(y0) != sys.dim:
        raise ValueError(f"state has length {len(y0)}, system dimension is {sys.dim}")
    z0 = np.repeat(y0, p) if initial_guess is None else np.asarray(initial_guess, dtype=float)
    jac = jacobian_of if sys.jacobian is not None else None
    result = newton_solve(residual_of, z0, config, jacobian=jac)
    coeffs = _stage_coefficients(y0, result.x, p)
    return ElementSolution(grid, coeffs, newton_iterations=result.iterations)


def mci_step(
    sys: OdeSystem,
    y0,
    t0: float,
    dt: float,
    p: int,
    config: NewtonConfig = NewtonConfig(),
    initial_guess=None,
) -> ElementSolution:
    """One collocation-pairing step of order p over [t0, t0 + dt]; dt may be negative."""
    grid = ElementGrid.build(p, t0, t0 + dt)
    _, _, Lt, Dmat = _collocation_tables(p)
    Lt_int, Dmat_int = Lt[1:, :], Dmat[1:, :]
    M = sys.dim

    def residual(z):
        return mci_residual(sys, ElementSolution(grid, _stage_coefficients(y0, z, p)))

    def jacobian(z):
        coeffs = _stage_coefficients(y0, z, p)
        Y = coeffs @ Lt
        J = np.zeros((M * p, M * p))
        for j in range(p):
            Jh = np.asarray(sys.jacobian(Y[:, j]), dtype=float)
            for i in range(M):
                row = i * p + j
                J[row, i * p : (i + 1) * p] += Dmat_int[:, j] / grid.sqrt_g
                for i2 in range(M):
                    J[row, i2 * p : (i2 + 1) * p] -= Jh[i, i2] * Lt_int[:, j]
        return J

    return _solve_element(sys, y0, grid, residual, jacobian, config, initial_guess)


def mgi_step(
    sys: OdeSystem,
    y0,
    t0: float,
    dt: float,
    p: int,
    q_rhs: Optional[int] = None,
    config: NewtonConfig = NewtonConfig(),
    initial_guess=None,
) -> ElementSolution:
    """One Galerkin-pairing step of order p over [t0, t0 + dt]; dt may be negative."""
    if q_rhs is None:
        q_rhs = default_qrhs(p)
    grid = ElementGrid.build(p, t0, t0 + dt)
    _, _, _, Dmat = _collocation_tables(p)
    quad, Lq, Ltilde = _galerkin_tables(p, q_rhs)
    Dmat_int = Dmat[1:, :]
    Lq_int = Lq[1:, :]
    M = sys.dim
    w_dual = grid.dual.weights

    def residual(z):
        return mgi_residual(sys, ElementSolution(grid, _stage_coefficients(y0, z, p)), q_rhs)

    def jacobian(z):
        coeffs = _stage_coefficients(y0, z, p)
        Yq = coeffs @ Lq
        J = np.zeros((M * p, M * p))
        lhs_block = (w_dual[:, None] * Dmat_int.T) / grid.sqrt_g  # rows m, cols k
        for i in range(M):
            J[i * p : (i + 1) * p, i * p : (i + 1) * p] += lhs_block
        for nu in range(len(quad)):
            Jh = np.asarray(sys.jacobian(Yq[:, nu]), dtype=float)
            outer = np.outer(quad.weights[nu] * Ltilde[:, nu], Lq_int[:, nu])
            for i in range(M):
                for i2 in range(M):
                    J[i * p : (i + 1) * p, i2 * p : (i2 + 1) * p] -= Jh[i, i2] * outer
        return J

    return _solve_element(sys, y0, grid, residual, jacobian, config, initial_guess)


def explicit_euler_step(sys: OdeSystem, y0, t0: float, dt: float) -> np.ndarray:
    """Forward Euler update y + dt h(y)."""
    y0 = np.asarray(y0, dtype=float)
    return y0 + dt * _field_at(sys, y0, f"t={t0:g}")


def symplectic_euler_step(sys: OdeSystem, y0, t0: float, dt: float) -> np.ndarray:
    """Momentum-first symplectic Euler update for separable systems.

    p_new = p + dt f(q); q_new = q + dt g(p_new). Requires sys.partition.
    """
    part = sys.partition
    if part is None:
        raise ValueError("symplectic Euler needs a separable partition on the system")
    y0 = np.asarray(y0, dtype=float)
    reason = sys.check_domain(y0)
    if reason is not None:
        raise DomainError(f"state leaves the domain at t={t0:g}: {reason}")
    p_idx = np.asarray(part.p_indices, dtype=int)
    q_idx = np.asarray(part.q_indices, dtype=int)
    p_new = y0[p_idx] + dt * np.asarray(part.f(y0[q_idx]), dtype=float)
    q_new = y0[q_idx] + dt * np.asarray(part.g(p_new), dtype=float)
    y = np.empty_like(y0)
    y[p_idx] = p_new
    y[q_idx] = q_new
    return y


def rk4_step(sys: OdeSystem, y0, t0: float, dt: float) -> np.ndarray:
    """Classical fourth-order Runge-Kutta update."""
    y0 = np.asarray(y0, dtype=float)
    k1 = _field_at(sys, y0, f"t={t0:g}")
    k2 = _field_at(sys, y0 + 0.5 * dt * k1, f"t={t0:g} (stage 2)")
    k3 = _field_at(sys, y0 + 0.5 * dt * k2, f"t={t0:g} (stage 3)")
    k4 = _field_at(sys, y0 + dt * k3, f"t={t0:g} (stage 4)")
    return y0 + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


@dataclass(frozen=True)
class Trajectory:
    """Recorded time grid, endpoint states, and invariant series of one run."""

    method: Method
    times: np.ndarray  # (n+1,)
    states: np.ndarray  # (dim, n+1)
    invariants: dict  # label -> (n+1,) raw values
    dt: float
    order: Optional[int] = None  # polynomial order for element methods
    elements: Optional[tuple] = None  # ElementSolution per step for element methods
    newton_iterations: Optional[tuple] = None

    @property
    def dim(self) -> int:
        return self.states.shape[0]

    @property
    def steps(self) -> int:
        return len(self.times) - 1


def integrate(
    sys: OdeSystem,
    method: Method,
    y0,
    t0: float,
    tf: float,
    dt: float,
    p: int = 2,
    newton: NewtonConfig = NewtonConfig(),
    q_rhs: Optional[int] = None,
    warm_start: bool = False,
) -> Trajectory:
    """March from t0 to tf with fixed steps of dt, shortening the last one.

    Step times are computed as t0 + k dt (no accumulation drift) and the
    final step lands on tf exactly. Step failures are re-raised as
    IntegrationError annotated with the step index and start time.
    """
    if not tf > t0:
        raise ValueError(f"tf must exceed t0, got t0={t0!r}, tf={tf!r}")
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt!r}")
    y0 = np.asarray(y0, dtype=float)
    if y0.shape != (sys.dim,):
        raise ValueError(f"initial state must have shape ({sys.dim},), got {y0.shape}")

    n = max(1, int(math.ceil((tf - t0) / dt - 1e-12)))
    times = np.empty(n + 1)
    states = np.empty((sys.dim, n + 1))
    times[0] = t0
    states[:, 0] = y0
    elements = [] if method.is_element_method else None
    iteration_counts = [] if method.is_element_method else None

    y = y0
    guess = None
    for k in range(n):
        t_a = t0 + k * dt
        t_b = tf if k == n - 1 else t0 + (k + 1) * dt
        h = t_b - t_a
        try:
            if method is Method.MCI:
                sol = mci_step(sys, y, t_a, h, p, newton, initial_guess=guess)
            elif method is Method.MGI:
                sol = mgi_step(sys, y, t_a, h, p, q_rhs, newton, initial_guess=guess)
            elif method is Method.EXPLICIT_EULER:
                y = explicit_euler_step(sys, y, t_a, h)
            elif method is Method.SYMPLECTIC_EULER:
                y = symplectic_euler_step(sys, y, t_a, h)
            elif method is Method.RK4:
                y = rk4_step(sys, y, t_a, h)
            else:
                raise ValueError(f"unknown method {method!r}")
            if method.is_element_method:
                elements.append(sol)
                iteration_counts.append(sol.newton_iterations)
                y = sol.endpoint()
                if warm_start and k + 1 < n:
                    nxt = ElementGrid.build(p, t_b, min(t_b + dt, tf))
                    guess = np.concatenate(
                        [sol.evaluate_time(nxt.to_time(s)) for s in nxt.primal.nodes[1:]]
                    ).reshape(p, sys.dim).T.reshape(-1)
            reason = sys.check_domain(y)
            if reason is not None:
                raise DomainError(f"accepted state leaves the domain: {reason}")
        except GeodesyError as err:
            raise IntegrationError(
                f"step {k} starting at t={t_a:g} failed: {err}", step=k, time=t_a
            ) from err
        times[k + 1] = t_b
        states[:, k + 1] = y

    invariant_series = {
        label: np.array([fn(states[:, k]) for k in range(n + 1)])
        for label, fn in sys.invariants
    }
    return Trajectory(
        method=method,
        times=times,
        states=states,
        invariants=invariant_series,
        dt=dt,
        order=p if method.is_element_method else None,
        elements=tuple(elements) if elements is not None else None,
        newton_iterations=tuple(iteration_counts) if iteration_counts is not None else None,
    )


def sample_trajectory(traj: Trajectory, sample_times) -> np.ndarray:
    """Evaluate an element-method trajectory densely at the given times.

    Returns an array of shape (dim, len(sample_times)). Only methods that
    retain element polynomials support this; times must lie inside the
    integration window.
    """
    if traj.elements is None:
        raise ValueError(f"method {traj.method.value!r} does not retain element polynomials")
    sample_times = np.asarray(sample_times, dtype=float)
    t0, tf = traj.times[0], traj.times[-1]
    slack = 1e-12 * (1.0 + abs(t0) + abs(tf))
    if np.any(sample_times < t0 - slack) or np.any(sample_times > tf + slack):
        raise ValueError(f"sample times must lie within [{t0!r}, {tf!r}]")
    starts = np.array([el.grid.t_start for el in traj.elements])
    out = np.empty((traj.dim, len(sample_times)))
    for i, t in enumerate(sample_times):
        idx = int(np.clip(np.searchsorted(starts, t, side="right") - 1, 0, len(starts) - 1))
        out[:, i] = traj.elements[idx].evaluate_time(min(max(t, t0), tf))
    return out
