"""Finite-volume marching of filtered moment systems on a 1D periodic-free grid.

One explicit Euler step of the moment vector per cell, with kinetic numerical
fluxes: the deterministic local Lax-Friedrichs flux is evaluated at every
quadrature node between reconstructed nodal states, then projected back onto
the basis.  Three closure families share the loop:

* Galerkin (plain or filtered): nodal states are the truncated polynomial
  itself; a state outside the admissible set aborts the run.
* realizability-reconstructing closure: filter, solve the dual problem
  exactly (eta = 0), and advance the *reconstructed* moments of the ansatz,
  which are realizable with respect to the quadrature measure.
* regularized closure: filter, solve the dual problem with eta > 0, and
  advance the filtered moments themselves.

Boundary conditions are Dirichlet: one ghost cell per side frozen at the
projected initial moments, never filtered; ghost duals are solved once.

The time step dt_n = min(cfl dx / S_{n-1}, t_end - t_n) uses the fastest
signal speed S_{n-1} over the *previous* step's nodal states (the initial
closure for step 0), so dt is known before any filter gain that couples to
it; the conservative update shares the same dt.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from . import euler
from .basis import _legendre_rows, gauss_rule, vandermonde
from .closures import ClosureSolver, DualSolverConfig, EulerEntropy
from .errors import BreakdownError, DualNonConvergenceError, InadmissibleStateError
from .filters import FilterSpec, apply_filter


class Closure(enum.Enum):
    SG = "sg"
    FSG = "fsg"
    IPM = "ipm"
    FIPM_REALIZABLE = "fipm-realizable"
    FIPM_REGULARIZED = "fipm-regularized"


#: closures that advance reconstructed ansatz moments (exact dual, eta = 0)
RECONSTRUCTING = (Closure.IPM, Closure.FIPM_REALIZABLE)
#: closures that never touch a dual problem
GALERKIN = (Closure.SG, Closure.FSG)


@dataclass(frozen=True)
class GridConfig:
    """Uniform cell-centered grid on [a, b] with a CFL-limited time horizon."""

    a: float
    b: float
    n_cells: int
    t_end: float
    cfl: float = 0.5

    def __post_init__(self):
        if not self.b > self.a:
            raise ValueError(f"need b > a, got [{self.a}, {self.b}]")
        if self.n_cells < 3:
            raise ValueError(f"need at least 3 cells, got {self.n_cells}")
        if self.t_end < 0:
            raise ValueError(f"need t_end >= 0, got {self.t_end}")
        if not 0 < self.cfl <= 1:
            raise ValueError(f"need 0 < cfl <= 1, got {self.cfl}")

    @property
    def dx(self) -> float:
        return (self.b - self.a) / self.n_cells

    def centers(self) -> np.ndarray:
        return self.a + (np.arange(self.n_cells) + 0.5) * self.dx

    def ghost_centers(self) -> np.ndarray:
        return np.array([self.a - 0.5 * self.dx, self.b + 0.5 * self.dx])


@dataclass(frozen=True)
class UncertainShockIC:
    """Riemann data with an uncertain interface at x0 + sigma * xi, xi ~ U(-1,1).

    Both sides are at rest; the uncertain band must lie strictly inside the
    domain so the boundary cells see deterministic states.
    """

    rho_l: float
    p_l: float
    rho_r: float
    p_r: float
    x0: float
    sigma: float

    def __post_init__(self):
        if min(self.rho_l, self.p_l, self.rho_r, self.p_r) <= 0:
            raise ValueError("initial densities and pressures must be positive")
        if self.sigma < 0:
            raise ValueError(f"need sigma >= 0, got {self.sigma}")

    def primitive_states(self):
        return (
            np.array([self.rho_l, 0.0, self.p_l]),
            np.array([self.rho_r, 0.0, self.p_r]),
        )

    def conserved_states(self, gamma=euler.GAMMA_DEFAULT):
        w_l, w_r = self.primitive_states()
        return (
            euler.conserved_from_primitive(w_l, gamma),
            euler.conserved_from_primitive(w_r, gamma),
        )

    def validate_inside(self, grid: GridConfig):
        if not (grid.a < self.x0 - self.sigma and self.x0 + self.sigma < grid.b):
            raise ValueError("uncertain interface band must lie strictly inside the domain")


def project_ic(centers, degree, ic: UncertainShockIC, gamma=euler.GAMMA_DEFAULT):
    """Exact basis projection of the uncertain Riemann data at cell centers.

    The state at (x, xi) is u_L for xi > xi*(x) and u_R below, with
    xi*(x) = clamp((x - x0)/sigma); the moments follow from the antiderivative
    of the Legendre polynomials.  Returns (len(centers), degree+1, 3).
    """
    centers = np.asarray(centers, dtype=float)
    u_l, u_r = ic.conserved_states(gamma)
    if ic.sigma > 0:
        xi_star = np.clip((centers - ic.x0) / ic.sigma, -1.0, 1.0)
    else:
        xi_star = np.where(centers < ic.x0, -1.0, 1.0)
    jump = u_l - u_r  # (3,)
    rows = _legendre_rows(degree + 1, xi_star)  # (n, degree+2)
    out = np.zeros((centers.size, degree + 1, u_l.size))
    weight_l = (1.0 - xi_star) / 2.0
    out[:, 0, :] = weight_l[:, None] * u_l + (1.0 - weight_l)[:, None] * u_r
    for i in range(1, degree + 1):
        coef = (rows[:, i - 1] - rows[:, i + 1]) / (2.0 * np.sqrt(2.0 * i + 1.0))
        out[:, i, :] = coef[:, None] * jump
    return out


class EulerPhysics:
    """Deterministic Euler fluxes used inside the kinetic flux."""

    n_comp = 3
    component_names = ("rho", "m", "E")

    def __init__(self, gamma=euler.GAMMA_DEFAULT):
        self.gamma = gamma

    def flux(self, u):
        return euler.physical_flux(u, self.gamma)

    def max_speed(self, u):
        return euler.max_wavespeed(u, self.gamma)

    def admissible(self, u):
        return euler.admissible(u, self.gamma)


class AdvectionPhysics:
    """Linear transport at constant speed; any finite state is admissible."""

    n_comp = 1
    component_names = ("u",)

    def __init__(self, speed=1.0):
        self.speed = float(speed)

    def flux(self, u):
        return self.speed * np.asarray(u, dtype=float)

    def max_speed(self, u):
        u = np.asarray(u, dtype=float)
        return np.full(u.shape[:-1], abs(self.speed))

    def admissible(self, u):
        return np.all(np.isfinite(u), axis=-1)


def rusanov(u_l, u_r, physics):
    """Local Lax-Friedrichs flux for arbitrary leading shapes."""
    s = np.maximum(physics.max_speed(u_l), physics.max_speed(u_r))
    return 0.5 * (physics.flux(u_l) + physics.flux(u_r)) - 0.5 * s[..., None] * (
        np.asarray(u_r, float) - np.asarray(u_l, float)
    )


def kinetic_flux(states_l, states_r, phi_w, physics):
    """Moments of the nodewise Rusanov flux, <phi f*(u_L(xi), u_R(xi))>.

    states_* have shape (..., n_q, m); the result is (..., N+1, m).
    """
    return np.matmul(phi_w.T, rusanov(states_l, states_r, physics))


@dataclass
class StepDiagnostics:
    """Telemetry of one conservative update."""

    step: int
    t: float
    dt: float
    newton_total: int
    newton_max: int
    grad_max: float
    flux_left: np.ndarray
    flux_right: np.ndarray
    base_sum: np.ndarray
    new_sum: np.ndarray

    def conservation_residual(self, dt_over_dx) -> float:
        """Telescoped balance: sum of new moments minus base moments plus
        boundary flux difference; zero up to rounding."""
        res = self.new_sum - self.base_sum + dt_over_dx * (self.flux_right - self.flux_left)
        return float(np.abs(res).max())


@dataclass
class SolverState:
    """Marching state: time, moments, warm-start duals, lagged signal speed."""

    t: float
    step: int
    moments: np.ndarray
    duals: np.ndarray | None
    s_prev: float


@dataclass
class RunResult:
    grid: GridConfig
    degree: int
    closure: Closure
    t_final: float
    moments: np.ndarray
    duals: np.ndarray | None
    telemetry: list[StepDiagnostics] = field(default_factory=list)

    @property
    def n_steps(self) -> int:
        return len(self.telemetry)


class MomentSolver:
    """Explicit kinetic-flux marching of one closure on one grid."""

    def __init__(
        self,
        grid: GridConfig,
        degree: int,
        n_quad: int,
        physics,
        closure: Closure = Closure.IPM,
        model=None,
        filter_spec: FilterSpec | None = None,
        eta: float = 0.0,
        tau: float = 1e-7,
        newton_max_iter: int = 200,
    ):
        if degree < 0:
            raise ValueError(f"need degree >= 0, got {degree}")
        if n_quad < degree + 1:
            raise ValueError(
                f"need at least degree+1 quadrature nodes, got {n_quad} < {degree + 1}"
            )
        if closure in GALERKIN:
            # a filtered Galerkin run without a filter degenerates to plain
            # Galerkin bit-for-bit, so filter_spec=None is legal for both
            if eta != 0.0:
                raise ValueError("Galerkin closures do not take a regularization")
        else:
            if model is None:
                model = EulerEntropy(getattr(physics, "gamma", euler.GAMMA_DEFAULT))
            if closure in RECONSTRUCTING and eta != 0.0:
                raise ValueError("the reconstructing closure solves the exact dual (eta = 0)")
            if closure is Closure.FIPM_REGULARIZED and eta <= 0.0:
                raise ValueError("the regularized closure needs eta > 0")
        self.grid = grid
        self.degree = int(degree)
        self.quad = gauss_rule(n_quad)
        self.physics = physics
        self.closure = closure
        self.filter_spec = filter_spec
        self.model = model
        self.phi = vandermonde(degree, self.quad.nodes)
        self.phi_w = self.phi * self.quad.weights[:, None]
        self.dual_config = DualSolverConfig(
            tol=tau, eta=eta, max_iter=newton_max_iter
        ) if closure not in GALERKIN else None
        self.solver = (
            ClosureSolver(model, degree, self.quad) if closure not in GALERKIN else None
        )
        self._ghost_states = None
        self._ghost_duals = None

    # -- nodal states per closure -------------------------------------------

    def _galerkin_states(self, u_hat, step):
        states = np.matmul(self.phi, u_hat)  # (n, n_q, m)
        ok = self.physics.admissible(states)
        if not np.all(ok):
            cell, node = np.argwhere(~ok)[0]
            raise BreakdownError(
                f"Galerkin ansatz left the admissible set (cell {cell}, node {node}, "
                f"step {step})",
                cell=int(cell),
                node=int(node),
                step=int(step),
            )
        return states

    def _solve_duals(self, u_bar, start, step):
        v, info = self.solver.solve_batch(u_bar, start, self.dual_config)
        if not info.all_converged:
            bad = np.flatnonzero(~info.converged)
            worst = bad[np.argmax(info.grad_norm[bad])]
            raise DualNonConvergenceError(
                f"dual solve failed in {bad.size} cell(s) at step {step}; worst cell "
                f"{worst} with gradient norm {info.grad_norm[worst]:.3e}",
                grad_norm=float(info.grad_norm[worst]),
                iterations=int(info.iterations[worst]),
            )
        return v, info

    # -- setup ----------------------------------------------------------------

    def prepare(self, u0, ghost_moments) -> SolverState:
        """Initial marching state; solves ghost (and initial) closures once."""
        u0 = np.array(u0, dtype=float)
        ghost_moments = np.asarray(ghost_moments, dtype=float)
        if u0.shape != (self.grid.n_cells, self.degree + 1, self.physics.n_comp):
            raise ValueError(f"initial moments have wrong shape {u0.shape}")
        if self.closure in GALERKIN:
            self._ghost_states = np.matmul(self.phi, ghost_moments)
            states = self._galerkin_states(u0, step=0)
            duals = None
        else:
            self._ghost_duals, _ = self._solve_duals(ghost_moments, None, step=0)
            self._ghost_states = self.solver.node_states(self._ghost_duals)
            duals, _ = self._solve_duals(u0, None, step=0)
            states = self.solver.node_states(duals)
        s_prev = self._max_speed(states)
        return SolverState(t=0.0, step=0, moments=u0, duals=duals, s_prev=s_prev)

    def _max_speed(self, states) -> float:
        speeds = self.physics.max_speed(states)
        s = float(np.max(speeds))
        s_ghost = float(np.max(self.physics.max_speed(self._ghost_states)))
        s = max(s, s_ghost)
        if not np.isfinite(s) or s <= 0:
            raise InadmissibleStateError(f"nonpositive or non-finite signal speed {s}")
        return s

    # -- one conservative update ----------------------------------------------

    def step(self, state: SolverState, t_end: float):
        dt = min(self.grid.cfl * self.grid.dx / state.s_prev, t_end - state.t)
        if dt <= 0:
            raise ValueError("time step collapsed to zero")
        newton_total = newton_max = 0
        grad_max = 0.0

        u_bar = apply_filter(self.filter_spec, state.moments, dt)
        if self.closure in GALERKIN:
            states = self._galerkin_states(u_bar, state.step)
            base = u_bar
            duals = None
        else:
            duals, info = self._solve_duals(u_bar, state.duals, state.step)
            states = self.solver.node_states(duals)
            newton_total = info.total_iterations
            newton_max = int(info.iterations.max())
            grad_max = float(info.grad_norm.max())
            base = self.solver.reconstruct(duals) if self.closure in RECONSTRUCTING else u_bar

        all_states = np.concatenate(
            [self._ghost_states[:1], states, self._ghost_states[1:]], axis=0
        )
        flux = kinetic_flux(all_states[:-1], all_states[1:], self.phi_w, self.physics)
        u_new = base - dt / self.grid.dx * (flux[1:] - flux[:-1])
        if not np.all(np.isfinite(u_new)):
            raise InadmissibleStateError(f"non-finite moments after step {state.step}")

        diag = StepDiagnostics(
            step=state.step,
            t=state.t + dt,
            dt=dt,
            newton_total=newton_total,
            newton_max=newton_max,
            grad_max=grad_max,
            flux_left=flux[0].copy(),
            flux_right=flux[-1].copy(),
            base_sum=base.sum(axis=0),
            new_sum=u_new.sum(axis=0),
        )
        new_state = SolverState(
            t=state.t + dt,
            step=state.step + 1,
            moments=u_new,
            duals=duals,
            s_prev=self._max_speed(states),
        )
        return new_state, diag

    # -- full march -------------------------------------------------------------

    def run(self, u0, ghost_moments, max_steps=1_000_000) -> RunResult:
        """March from the initial moments to grid.t_end."""
        t_end = self.grid.t_end
        if t_end == 0.0:
            return RunResult(
                grid=self.grid,
                degree=self.degree,
                closure=self.closure,
                t_final=0.0,
                moments=np.array(u0, dtype=float),
                duals=None,
            )
        state = self.prepare(u0, ghost_moments)
        telemetry = []
        eps_t = 1e-12 * max(t_end, 1.0)
        while state.t < t_end - eps_t:
            state, diag = self.step(state, t_end)
            telemetry.append(diag)
            if state.step >= max_steps:
                raise RuntimeError(f"exceeded {max_steps} steps before reaching t_end")
        return RunResult(
            grid=self.grid,
            degree=self.degree,
            closure=self.closure,
            t_final=state.t,
            moments=state.moments,
            duals=state.duals,
            telemetry=telemetry,
        )
