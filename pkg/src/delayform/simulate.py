"""Time integration of the agent formation under delayed PD control.

Each agent is a point mass in 3-space, ``R_i' = V_i``, ``V_i' = U_i``.  The
controller feeds back current and delayed tracking errors towards the
moving target ``R_0(t) + s_i`` and, through the Laplacian, the differences
between agents.  Integration is classical RK4 with a step that divides the
delay, so the delayed stage values fall on stored grid points or on
midpoints between them; midpoints are filled by cubic Hermite
interpolation of the stored states and derivatives.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import FitWindowExhaustedError, InvalidParameterError
from .model import (
    CouplingGainVector,
    FormationSpec,
    GainVector,
    Topology,
    ZERO_COUPLING,
    laplacian_from_adjacency,
)

__all__ = [
    "TrajectorySpec",
    "SimulationConfig",
    "TrajectoryLog",
    "control_input",
    "integrate",
    "decay_rate_fit",
    "modal_projection",
    "shrink_factor",
    "growth_factor",
    "default_perturbation",
]

HISTORY_POLICIES = ("rest", "tracking")


@dataclass(frozen=True, eq=False)
class TrajectorySpec:
    """Leader path ``R_0(t)`` as one polynomial per axis (ascending powers)."""

    coeffs: np.ndarray  # shape (3, degree + 1)

    def __post_init__(self):
        c = np.atleast_2d(np.array(self.coeffs, dtype=float))
        if c.shape[0] != 3 or c.shape[1] > 5 or c.shape[1] < 1:
            raise InvalidParameterError("trajectory needs 3 axes of degree <= 4")
        if not np.all(np.isfinite(c)):
            raise InvalidParameterError("trajectory coefficients must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        v = self._deriv(c)
        object.__setattr__(self, "_vel", v)
        object.__setattr__(self, "_acc", self._deriv(v))

    @classmethod
    def from_axes(cls, axes):
        deg = max(len(a) for a in axes)
        c = np.zeros((3, deg))
        for i, a in enumerate(axes):
            c[i, : len(a)] = a
        return cls(c)

    @classmethod
    def parabola(cls):
        """``R_0(t) = [0.005 (t**2 + 1), 0.5 t, 0.8 t]``."""
        return cls.from_axes([[0.005, 0.0, 0.005], [0.0, 0.5], [0.0, 0.8]])

    @classmethod
    def stationary(cls):
        return cls(np.zeros((3, 1)))

    def _eval(self, c, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape + (3,))
        for k in range(c.shape[1] - 1, -1, -1):
            out = out * t[..., None] + c[:, k]
        return out

    def _deriv(self, c):
        if c.shape[1] == 1:
            return np.zeros((3, 1))
        return c[:, 1:] * np.arange(1, c.shape[1])

    def position(self, t):
        return self._eval(self.coeffs, t)

    def velocity(self, t):
        return self._eval(self._vel, t)

    def acceleration(self, t):
        return self._eval(self._acc, t)


def default_perturbation(n_agents, magnitude=1.0):
    """Unit displacement of agent ``i`` along axis ``i mod 3``."""
    d = np.zeros((n_agents, 3))
    d[np.arange(n_agents), np.arange(n_agents) % 3] = magnitude
    return d


@dataclass(frozen=True, eq=False)
class SimulationConfig:
    p0: GainVector
    pbar: CouplingGainVector
    topology: Topology
    formation: FormationSpec
    trajectory: TrajectorySpec
    tau: float
    t_end: float
    dt: float = None
    history: str = "rest"
    perturbation: np.ndarray = None
    divergence_threshold: float = 1e12

    def __post_init__(self):
        p0 = self.p0 if isinstance(self.p0, GainVector) else GainVector.from_sequence(self.p0)
        pbar = self.pbar
        if pbar is None:
            pbar = ZERO_COUPLING
        elif not isinstance(pbar, CouplingGainVector):
            pbar = CouplingGainVector.from_sequence(pbar)
        object.__setattr__(self, "p0", p0)
        object.__setattr__(self, "pbar", pbar)
        topo = self.topology
        if not isinstance(topo, Topology):
            topo = laplacian_from_adjacency(topo)
            object.__setattr__(self, "topology", topo)
        if topo.n_agents != self.formation.n_agents:
            raise InvalidParameterError("topology and formation disagree on the number of agents")
        tau = float(self.tau)
        if not (tau >= 0 and math.isfinite(tau)):
            raise InvalidParameterError("tau must be finite and >= 0")
        t_end = float(self.t_end)
        if not (t_end > tau and math.isfinite(t_end)):
            raise InvalidParameterError("t_end must be finite and larger than tau")
        dt = self.dt
        if dt is None:
            dt = min(tau / 20.0, 0.01) if tau > 0 else 0.01
        dt = float(dt)
        if not dt > 0:
            raise InvalidParameterError("dt must be positive")
        if tau > 0:
            if dt > tau / 8.0:
                raise InvalidParameterError(f"dt={dt} exceeds tau/8; history would be under-resolved")
            # make the delay an integer number of steps
            dt = tau / math.ceil(tau / dt - 1e-9)
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "t_end", t_end)
        object.__setattr__(self, "dt", dt)
        if self.history not in HISTORY_POLICIES:
            raise InvalidParameterError(f"history policy must be one of {HISTORY_POLICIES}")
        n = self.formation.n_agents
        pert = self.perturbation
        pert = default_perturbation(n) if pert is None else np.array(pert, dtype=float)
        if pert.shape != (n, 3) or not np.all(np.isfinite(pert)):
            raise InvalidParameterError("perturbation must be a finite (n_agents, 3) array")
        pert.setflags(write=False)
        object.__setattr__(self, "perturbation", pert)

    @property
    def n_agents(self):
        return self.formation.n_agents

    @property
    def delay_steps(self):
        return int(round(self.tau / self.dt)) if self.tau > 0 else 0


@dataclass(frozen=True, eq=False)
class TrajectoryLog:
    t: np.ndarray
    R: np.ndarray  # (n_samples, n_agents, 3)
    V: np.ndarray
    tracking_error: np.ndarray
    formation_error: np.ndarray
    config: SimulationConfig = field(repr=False)
    diverged: bool = False
    diverged_at: float = math.nan

    def errors(self):
        """Position and velocity errors ``(e, xi)`` recomputed from the log."""
        cfg = self.config
        e = self.R - cfg.trajectory.position(self.t)[:, None, :] - cfg.formation.s[None]
        xi = self.V - cfg.trajectory.velocity(self.t)[:, None, :]
        return e, xi


def _formation_laplacian(topology):
    L = np.asarray(topology.laplacian)
    if np.any(L):
        return L
    # no coupling: measure relative errors with the complete graph instead
    n = L.shape[0]
    return n * np.eye(n) - np.ones((n, n))


def control_input(state_now, state_delayed, t, config):
    """Controller output ``U_i`` for every agent.

    ``state_now`` and ``state_delayed`` are ``(R, V)`` pairs of shape
    ``(n_agents, 3)`` taken at ``t`` and ``t - tau``.
    """
    R, V = state_now
    Rd, Vd = state_delayed
    traj, s = config.trajectory, config.formation.s
    p0, pb = config.p0, config.pbar
    e = R - traj.position(t) - s
    xi = V - traj.velocity(t)
    ed = Rd - traj.position(t - config.tau) - s
    xid = Vd - traj.velocity(t - config.tau)
    U = -p0.k0 * e - p0.k0_tau * ed - p0.h0 * xi - p0.h0_tau * xid + traj.acceleration(t)
    if not pb.is_zero:
        L = config.topology.laplacian
        U = U - L @ (pb.k * e + pb.k_tau * ed + pb.h * xi + pb.h_tau * xid)
    return U


def _history(config, t):
    traj, s, d = config.trajectory, config.formation.s, config.perturbation
    if config.history == "tracking":
        return traj.position(t) + s + d, np.broadcast_to(traj.velocity(t), d.shape).copy()
    return traj.position(0.0) + s + d, np.zeros_like(d)


def integrate(config):
    """Integrate the formation from ``t = 0`` to ``t_end`` (RK4, method of steps)."""
    dt, m = config.dt, config.delay_steps
    n_steps = int(math.ceil(config.t_end / dt - 1e-9))
    n = config.n_agents
    t = np.arange(n_steps + 1) * dt
    Y = np.full((n_steps + 1, 2, n, 3), np.nan)
    F = np.full((n_steps + 1, 2, n, 3), np.nan)
    R0, V0 = _history(config, 0.0)
    Y[0, 0], Y[0, 1] = R0, V0

    def rhs(tt, y, yd):
        return np.stack([y[1], control_input((y[0], y[1]), (yd[0], yd[1]), tt, config)])

    def delayed(k, half):
        """State at ``t_k - tau``, or at ``t_k - tau + dt/2`` when ``half``."""
        tt = t[k] - config.tau + (0.5 * dt if half else 0.0)
        if tt <= 0:
            return np.stack(_history(config, tt))
        j = k - m
        if not half:
            return Y[j]
        # cubic Hermite midpoint on [t_j, t_{j+1}]
        return 0.5 * (Y[j] + Y[j + 1]) + (dt / 8.0) * (F[j] - F[j + 1])

    diverged, t_div = False, math.nan
    last = n_steps
    for k in range(n_steps):
        y = Y[k]
        tk = t[k]
        if m:
            d0, d1, d2 = delayed(k, False), delayed(k, True), delayed(k + 1, False)
        k1 = rhs(tk, y, y if m == 0 else d0)
        F[k] = k1
        ya = y + 0.5 * dt * k1
        k2 = rhs(tk + 0.5 * dt, ya, ya if m == 0 else d1)
        yb = y + 0.5 * dt * k2
        k3 = rhs(tk + 0.5 * dt, yb, yb if m == 0 else d1)
        yc = y + dt * k3
        k4 = rhs(tk + dt, yc, yc if m == 0 else d2)
        ynew = y + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(ynew)) or np.max(np.abs(ynew)) > config.divergence_threshold:
            diverged, t_div, last = True, float(t[k + 1]), k
            break
        Y[k + 1] = ynew
    if not diverged:
        yl = Y[n_steps]
        F[n_steps] = rhs(t[n_steps], yl, yl if m == 0 else delayed(n_steps, False))

    t = t[: last + 1]
    R, V = Y[: last + 1, 0], Y[: last + 1, 1]
    e = R - config.trajectory.position(t)[:, None, :] - config.formation.s[None]
    Lf = _formation_laplacian(config.topology)
    track = np.linalg.norm(e.reshape(e.shape[0], -1), axis=1)
    form = np.linalg.norm(np.einsum("ij,tjk->tik", Lf, e).reshape(e.shape[0], -1), axis=1)
    for a in (t, R, V, track, form):
        a.setflags(write=False)
    return TrajectoryLog(t, R, V, track, form, config, diverged, t_div)


def _series(log, quantity):
    if quantity == "tracking":
        return log.tracking_error
    if quantity == "formation":
        return log.formation_error
    raise InvalidParameterError("quantity must be 'tracking' or 'formation'")


def decay_rate_fit(log, window=None, quantity="tracking", floor=1e-10):
    """Least-squares slope of ``ln ||e(t)||`` over ``window = (t0, t1)``.

    Samples after the norm first drops below ``floor`` times its early peak
    are discarded: rounding in the absolute positions dominates there.  The
    default window runs from half of that cut-off time (or of the run) to
    the cut-off itself.  If fewer than a quarter of the window's samples
    survive, :class:`FitWindowExhaustedError` is raised.
    """
    y = _series(log, quantity)
    t = log.t
    ref = max(np.max(y[: max(1, int(0.05 * y.size))]), np.finfo(float).tiny)
    below = np.flatnonzero(y <= floor * ref)
    t_cut = t[below[0]] if below.size else np.inf
    if window is None:
        t1 = min(t_cut, t[-1])
        window = (0.5 * t1, t1)
    t0, t1 = window
    if t0 < t[0] - 1e-12 or t1 > t[-1] + 1e-12 or not t1 > t0:
        raise InvalidParameterError("fit window must lie inside the logged time span")
    sel = (t >= t0) & (t <= t1)
    keep = sel & (t < t_cut)
    if keep.sum() < max(8, 0.25 * sel.sum()):
        raise FitWindowExhaustedError("error norm reaches numerical zero inside the fit window")
    slope, _ = np.polyfit(t[keep], np.log(y[keep]), 1)
    return float(slope)


def _window_max(log, quantity, first, width):
    y = _series(log, quantity)
    t = log.t
    if first:
        m = t <= t[0] + width
    else:
        m = t >= t[-1] - width
    return float(np.max(y[m]))


def shrink_factor(log, quantity="formation", width=None):
    """Peak norm over the first window divided by peak norm over the last."""
    if width is None:
        width = max(2.0 * log.config.tau, 5.0)
    last = _window_max(log, quantity, False, width)
    first = _window_max(log, quantity, True, width)
    return math.inf if last == 0 else first / last


def growth_factor(log, quantity="tracking", width=None):
    return 1.0 / shrink_factor(log, quantity, width)


def modal_projection(log):
    """Errors expressed in Laplacian eigen-coordinates.

    Returns ``(eigenvalues, norms)`` where ``norms[:, k]`` is the norm over
    the three axes of the error component along eigenvector ``k``.
    """
    L = np.asarray(log.config.topology.laplacian)
    w, Vec = np.linalg.eig(L)
    order = np.lexsort((w.imag, w.real))
    w, Vec = w[order], Vec[:, order]
    e, _ = log.errors()
    coef = np.einsum("ij,tjk->tik", np.linalg.inv(Vec), e)
    return w, np.linalg.norm(coef, axis=2)
