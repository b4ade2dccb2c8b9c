"""Convex entropy models and the moment-closure dual problem.

A model supplies a strictly convex entropy s on its admissible states, the
entropy variables v = s'(u), the ansatz map u = s'_*(v) (gradient of the
Legendre conjugate s_*), and the ansatz Jacobian D s'_*(v).  The closure of a
moment vector u_hat is found by minimizing the dual functional

    d(v_hat) = <s_*(v_hat . phi)> - v_hat . u_hat + eta/2 ||v_hat||^2

over coefficient matrices v_hat of shape (N+1, m); eta = 0 is the exact
closure, eta > 0 its regularization.  Minimization is damped Newton with
backtracking on all cells of a batch simultaneously; candidates that leave the
dual domain or overflow are treated as line-search rejections.

Brackets <.> are evaluated with the probability-normalized Gauss rule, so
"admissible"/"realizable" statements below are with respect to the quadrature
measure.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import xlogy

from .basis import QuadratureRule, vandermonde
from .errors import DualDomainError, DualNonConvergenceError

# ---------------------------------------------------------------------------
# entropy models
# ---------------------------------------------------------------------------


class ScalarLogEntropy:
    """s(u) = u ln u on u > 0; ansatz s'_*(v) = exp(v - 1)."""

    n_comp = 1

    def entropy(self, u):
        u = np.asarray(u, dtype=float)
        return xlogy(u[..., 0], u[..., 0])

    def entropy_vars(self, u):
        u = np.asarray(u, dtype=float)
        return np.log(u) + 1.0

    def ansatz(self, v):
        v = np.asarray(v, dtype=float)
        with np.errstate(over="ignore"):
            return np.exp(v - 1.0)

    def ansatz_jacobian(self, v):
        return self.ansatz(v)[..., None]

    def conjugate(self, v):
        return self.ansatz(v)[..., 0]

    def dual_feasible(self, v):
        v = np.asarray(v, dtype=float)
        return np.isfinite(v[..., 0])

    def admissible(self, u):
        u = np.asarray(u, dtype=float)
        return (u[..., 0] > 0) & np.isfinite(u[..., 0])

    def safe_state(self, u, floor=1e-8):
        u = np.asarray(u, dtype=float)
        return np.maximum(np.nan_to_num(u, nan=floor), floor)


class BoundedScalarEntropy:
    """s(u) = (u-lo) ln(u-lo) + (hi-u) ln(hi-u) on lo < u < hi.

    The ansatz is a logistic curve between the bounds, so closures stay inside
    (lo, hi) by construction.
    """

    n_comp = 1

    def __init__(self, lo=0.0, hi=1.0):
        if not hi > lo:
            raise ValueError(f"need hi > lo, got ({lo}, {hi})")
        self.lo = float(lo)
        self.hi = float(hi)
        self.width = self.hi - self.lo

    def entropy(self, u):
        u = np.asarray(u, dtype=float)[..., 0]
        return xlogy(u - self.lo, u - self.lo) + xlogy(self.hi - u, self.hi - u)

    def entropy_vars(self, u):
        u = np.asarray(u, dtype=float)
        return np.log((u - self.lo) / (self.hi - u))

    def _sigmoid(self, v):
        with np.errstate(over="ignore"):
            return np.where(v >= 0, 1.0 / (1.0 + np.exp(-v)), np.exp(v) / (1.0 + np.exp(v)))

    def ansatz(self, v):
        v = np.asarray(v, dtype=float)
        return self.lo + self.width * self._sigmoid(v)

    def ansatz_jacobian(self, v):
        sig = self._sigmoid(np.asarray(v, dtype=float))
        return (self.width * sig * (1.0 - sig))[..., None]

    def conjugate(self, v):
        v = np.asarray(v, dtype=float)
        u = self.ansatz(v)
        return (v * u)[..., 0] - self.entropy(u)

    def dual_feasible(self, v):
        v = np.asarray(v, dtype=float)
        return np.isfinite(v[..., 0])

    def admissible(self, u):
        u = np.asarray(u, dtype=float)[..., 0]
        return (u > self.lo) & (u < self.hi) & np.isfinite(u)

    def safe_state(self, u, margin=1e-8):
        u = np.asarray(u, dtype=float)
        pad = margin * self.width
        return np.clip(np.nan_to_num(u, nan=self.lo + pad), self.lo + pad, self.hi - pad)


class EulerEntropy:
    """Physical entropy s(u) = -rho ln(rho^-gamma e_int) for 1D Euler states.

    u = (rho, m, E_t), e_int = E_t - m^2/(2 rho).  The dual domain is
    {v : v_3 < 0}; on it the ansatz is the closed-form inverse of s'.
    """

    n_comp = 3

    def __init__(self, gamma=1.4):
        if gamma <= 1.0:
            raise ValueError(f"need gamma > 1, got {gamma}")
        self.gamma = float(gamma)

    def _split(self, u):
        u = np.asarray(u, dtype=float)
        rho, m, e_t = u[..., 0], u[..., 1], u[..., 2]
        return rho, m, e_t - 0.5 * m**2 / rho

    def entropy(self, u):
        rho, m, e_int = self._split(u)
        return rho * (self.gamma * np.log(rho) - np.log(e_int))

    def entropy_vars(self, u):
        rho, m, e_int = self._split(u)
        v_col = m / rho
        w = -self.gamma * np.log(rho) + np.log(e_int)
        v3 = -rho / e_int
        v1 = self.gamma - w + 0.5 * v3 * v_col**2
        return np.stack([v1, m / e_int, v3], axis=-1)

    def _rho_vel(self, v):
        v = np.asarray(v, dtype=float)
        v1, v2, v3 = v[..., 0], v[..., 1], v[..., 2]
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            vel = -v2 / v3
            w = self.gamma - v1 + 0.5 * v3 * vel**2
            rho = np.exp(-(w + np.log(-v3)) / (self.gamma - 1.0))
        return rho, vel, v3

    def ansatz(self, v):
        rho, vel, v3 = self._rho_vel(v)
        with np.errstate(invalid="ignore", divide="ignore"):
            e_t = -rho / v3 + 0.5 * rho * vel**2
        return np.stack([rho, rho * vel, e_t], axis=-1)

    def ansatz_jacobian(self, v):
        rho, vel, v3 = self._rho_vel(v)
        with np.errstate(invalid="ignore", divide="ignore"):
            inv3 = 1.0 / v3
            c = np.stack([np.ones_like(vel), vel, 0.5 * vel**2 - inv3], axis=-1)
            jac = c[..., :, None] * c[..., None, :] / (self.gamma - 1.0)
            jac[..., 1, 1] += -inv3
            jac[..., 1, 2] += -vel * inv3
            jac[..., 2, 1] += -vel * inv3
            jac[..., 2, 2] += inv3**2 - vel**2 * inv3
        return rho[..., None, None] * jac

    def conjugate(self, v):
        rho, _, _ = self._rho_vel(v)
        return (self.gamma - 1.0) * rho

    def dual_feasible(self, v):
        v = np.asarray(v, dtype=float)
        return (v[..., 2] < 0) & np.all(np.isfinite(v), axis=-1)

    def admissible(self, u):
        from .euler import admissible

        return admissible(u, self.gamma)

    def safe_state(self, u, floor=1e-8):
        u = np.asarray(np.nan_to_num(u, nan=floor), dtype=float)
        rho = np.maximum(u[..., 0], floor)
        m = u[..., 1]
        e_int = np.maximum(u[..., 2] - 0.5 * m**2 / rho, floor)
        return np.stack([rho, m, e_int + 0.5 * m**2 / rho], axis=-1)


# ---------------------------------------------------------------------------
# dual problem over a truncated basis
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DualSolverConfig:
    """Newton/backtracking parameters for the dual minimization."""

    tol: float = 1e-7
    eta: float = 0.0
    max_iter: int = 200
    ls_contraction: float = 0.5
    ls_slope: float = 1e-4
    ls_max: int = 50

    def __post_init__(self):
        if self.tol <= 0 or self.eta < 0:
            raise ValueError("need tol > 0 and eta >= 0")


@dataclass
class SolveInfo:
    """Per-cell outcome of a batched dual solve."""

    converged: np.ndarray
    iterations: np.ndarray
    grad_norm: np.ndarray

    @property
    def all_converged(self) -> bool:
        return bool(np.all(self.converged))

    @property
    def total_iterations(self) -> int:
        return int(np.sum(self.iterations))


class ClosureSolver:
    """Dual closures of moment vectors for one model, basis degree, and rule."""

    def __init__(self, model, degree: int, quad: QuadratureRule):
        self.model = model
        self.degree = int(degree)
        self.quad = quad
        self.phi = vandermonde(degree, quad.nodes)  # (n_q, N+1)
        self.phi_w = self.phi * quad.weights[:, None]
        # T[q, i, j] = w_q phi_i(xi_q) phi_j(xi_q), reused in every Hessian
        self._t = np.einsum("q,qi,qj->qij", quad.weights, self.phi, self.phi)

    @property
    def n_unknowns(self) -> int:
        return (self.degree + 1) * self.model.n_comp

    # -- pointwise maps ----------------------------------------------------

    def node_values(self, v_hat):
        """Dual polynomial at the quadrature nodes, (..., n_q, m)."""
        return np.matmul(self.phi, v_hat)

    def node_states(self, v_hat):
        """Ansatz states at the quadrature nodes, (..., n_q, m)."""
        return self.model.ansatz(self.node_values(v_hat))

    def evaluate_ansatz(self, v_hat, xi):
        """Ansatz states at arbitrary points xi in [-1, 1]."""
        y = np.matmul(vandermonde(self.degree, np.atleast_1d(xi)), v_hat)
        if not np.all(self.model.dual_feasible(y)):
            raise DualDomainError("ansatz evaluation outside the dual domain")
        return self.model.ansatz(y)

    def reconstruct(self, v_hat):
        """Moments of the ansatz, <phi s'_*(v_hat . phi)>, same shape as v_hat."""
        return np.matmul(self.phi_w.T, self.node_states(v_hat))

    def cold_start(self, u_hat):
        """Dual start from the mean state; rows above degree 0 are zero."""
        v = np.zeros_like(u_hat)
        v[..., 0, :] = self.model.entropy_vars(self.model.safe_state(u_hat[..., 0, :]))
        return v

    # -- single-cell functionals (raise on domain violations) ---------------

    def _check_feasible(self, y):
        if not np.all(self.model.dual_feasible(y)):
            raise DualDomainError("dual variables leave the conjugate domain at a node")

    def objective(self, v_hat, u_hat, eta=0.0):
        y = self.node_values(v_hat)
        self._check_feasible(y)
        val = (
            float(self.quad.weights @ self.model.conjugate(y))
            - float(np.sum(v_hat * u_hat))
            + 0.5 * eta * float(np.sum(v_hat**2))
        )
        if not np.isfinite(val):
            raise DualDomainError("dual objective overflowed")
        return val

    def gradient(self, v_hat, u_hat, eta=0.0):
        y = self.node_values(v_hat)
        self._check_feasible(y)
        return self.phi_w.T @ self.model.ansatz(y) + eta * v_hat - u_hat

    def hessian(self, v_hat, eta=0.0):
        y = self.node_values(v_hat)
        self._check_feasible(y)
        jac = self.model.ansatz_jacobian(y)
        d = self.n_unknowns
        h = np.einsum("qij,qkl->ikjl", self._t, jac).reshape(d, d)
        return h + eta * np.eye(d)

    # -- batched Newton solve -----------------------------------------------

    def _batch_objective(self, v, u, eta):
        """Objective and feasibility per cell; infeasible cells get +inf."""
        y = self.node_values(v)
        feasible = np.all(self.model.dual_feasible(y), axis=-1)
        with np.errstate(invalid="ignore", over="ignore"):
            val = (
                self.model.conjugate(y) @ self.quad.weights
                - np.einsum("bim,bim->b", v, u)
                + 0.5 * eta * np.einsum("bim,bim->b", v, v)
            )
        bad = ~feasible | ~np.isfinite(val)
        val = np.where(bad, np.inf, val)
        return val

    def _batch_gradient(self, v, u, eta):
        a = self.node_states(v)
        return np.matmul(self.phi_w.T, a) + eta * v - u

    def _batch_hessian(self, v, eta):
        jac = self.model.ansatz_jacobian(self.node_values(v))
        b = v.shape[0]
        d = self.n_unknowns
        h = np.einsum("qij,bqkl->bikjl", self._t, jac).reshape(b, d, d)
        h += eta * np.eye(d)
        return h

    @staticmethod
    def _newton_directions(h, g_flat):
        """Solve H d = -g per cell, falling back to -g where that fails."""
        try:
            d = np.linalg.solve(h, -g_flat[..., None])[..., 0]
        except np.linalg.LinAlgError:
            d = np.empty_like(g_flat)
            for b in range(h.shape[0]):
                try:
                    d[b] = np.linalg.solve(h[b], -g_flat[b])
                except np.linalg.LinAlgError:
                    d[b] = -g_flat[b]
        bad = ~np.all(np.isfinite(d), axis=1)
        if np.any(bad):
            d[bad] = -g_flat[bad]
        return d

    def _line_search(self, v, u, eta, f0, direction, slope, config):
        """Vectorized backtracking; returns (v_new, f_new, accepted).

        The sufficient-decrease test carries a rounding-noise floor: close to
        the minimum a Newton step improves the objective by ~||g||^2/||H||,
        which can fall below the float resolution of f itself.
        """
        n = v.shape[0]
        step = np.ones(n)
        accepted = np.zeros(n, dtype=bool)
        v_new = v.copy()
        f_new = f0.copy()
        noise = 1e-14 * (1.0 + np.abs(f0))
        todo = np.arange(n)
        for _ in range(config.ls_max):
            cand = v[todo] + step[todo, None, None] * direction[todo]
            f_cand = self._batch_objective(cand, u[todo], eta)
            ok = f_cand <= f0[todo] + config.ls_slope * step[todo] * slope[todo] + noise[todo]
            if np.any(ok):
                hit = todo[ok]
                v_new[hit] = cand[ok]
                f_new[hit] = f_cand[ok]
                accepted[hit] = True
                todo = todo[~ok]
                if todo.size == 0:
                    break
            step[todo] *= config.ls_contraction
        return v_new, f_new, accepted

    def solve_batch(self, u_hat, start=None, config: DualSolverConfig | None = None):
        """Minimize the dual functional for every cell of u_hat (B, N+1, m).

        Returns (v_hat, SolveInfo).  Cells whose start is infeasible are
        restarted from the mean-state cold start; cells that stall in the line
        search or exhaust max_iter are reported as non-converged.
        """
        config = config or DualSolverConfig()
        u = np.asarray(u_hat, dtype=float)
        v = self.cold_start(u) if start is None else np.array(start, dtype=float)
        b = u.shape[0]
        eta = config.eta

        # repair infeasible warm starts cell by cell
        f = self._batch_objective(v, u, eta)
        infeasible = ~np.isfinite(f)
        if np.any(infeasible):
            v[infeasible] = self.cold_start(u[infeasible])
            f[infeasible] = self._batch_objective(v[infeasible], u[infeasible], eta)

        iterations = np.zeros(b, dtype=int)
        grad_norm = np.full(b, np.inf)
        converged = np.zeros(b, dtype=bool)
        active = np.flatnonzero(np.isfinite(f))

        for it in range(config.max_iter + 1):
            if active.size == 0:
                break
            g = self._batch_gradient(v[active], u[active], eta)
            gn = np.linalg.norm(g.reshape(active.size, -1), axis=1)
            grad_norm[active] = gn
            done = gn < config.tol
            converged[active[done]] = True
            active = active[~done]
            if active.size == 0 or it == config.max_iter:
                break
            g = g[~done]

            g_flat = g.reshape(active.size, -1)
            h = self._batch_hessian(v[active], eta)
            d_flat = self._newton_directions(h, g_flat)
            slope = np.einsum("bd,bd->b", g_flat, d_flat)
            uphill = slope >= 0
            if np.any(uphill):
                d_flat[uphill] = -g_flat[uphill]
                slope[uphill] = -np.sum(g_flat[uphill] ** 2, axis=1)
            direction = d_flat.reshape(g.shape)

            v_act, f_act, accepted = self._line_search(
                v[active], u[active], eta, f[active], direction, slope, config
            )
            # a second chance along steepest descent for Newton-step failures
            retry = ~accepted & ~uphill
            if np.any(retry):
                idx = np.flatnonzero(retry)
                v_retry, f_retry, acc_retry = self._line_search(
                    v_act[idx],
                    u[active][idx],
                    eta,
                    f_act[idx],
                    -g[idx],
                    -np.sum(g_flat[idx] ** 2, axis=1),
                    config,
                )
                v_act[idx] = v_retry
                f_act[idx] = f_retry
                accepted[idx] |= acc_retry
            v[active] = v_act
            f[active] = f_act
            iterations[active] += accepted.astype(int)
            # cells that cannot move are stalled; stop iterating them
            active = active[accepted]

        return v, SolveInfo(converged=converged, iterations=iterations, grad_norm=grad_norm)

    def solve(self, u_hat, start=None, config: DualSolverConfig | None = None):
        """Single-cell dual solve; raises DualNonConvergenceError on failure."""
        u = np.asarray(u_hat, dtype=float)
        v, info = self.solve_batch(
            u[None], None if start is None else np.asarray(start, dtype=float)[None], config
        )
        if not info.all_converged:
            raise DualNonConvergenceError(
                "dual Newton iteration did not reach tolerance "
                f"(last gradient norm {info.grad_norm[0]:.3e})",
                grad_norm=float(info.grad_norm[0]),
                iterations=int(info.iterations[0]),
            )
        return v[0]
