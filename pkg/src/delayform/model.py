"""Gains, feedback matrices, coupling topology and the per-mode reduction.

The agents obey ``R' = V``, ``V' = U`` with a PD controller acting on the
current and the delayed tracking errors.  In error coordinates the full
system is

    Z'(t) = [(I_N (x) M - L (x) P)] Z(t) + [(I_N (x) M_tau - L (x) P_tau)] Z(t - tau)

per spatial axis, and diagonalising the Laplacian ``L`` splits it into ``N``
two-component delay equations ``x' = A x + B x(t - tau)`` with
``A = M - lambda P`` and ``B = M_tau - lambda P_tau``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    InvalidParameterError,
    InvalidTopologyError,
    NonDiagonalizableWarning,
    NumericalFailureError,
)

__all__ = [
    "GainVector",
    "CouplingGainVector",
    "FeedbackMatrices",
    "Topology",
    "ModeSystem",
    "FormationSpec",
    "ZERO_COUPLING",
    "build_feedback_matrices",
    "laplacian_from_adjacency",
    "laplacian_eigenvalues",
    "mode_system",
    "effective_gains",
    "full_system",
    "EXAMPLE_ADJACENCY",
    "example_topology",
    "example_formation",
]


def _check_finite(name, values):
    for v in values:
        if not math.isfinite(v):
            raise InvalidParameterError(f"{name} must be finite, got {values!r}")


@dataclass(frozen=True)
class GainVector:
    """Leader feedback gains ``(k0, h0, k0_tau, h0_tau)``."""

    k0: float
    h0: float
    k0_tau: float
    h0_tau: float

    def __post_init__(self):
        vals = []
        for name in ("k0", "h0", "k0_tau", "h0_tau"):
            try:
                v = float(getattr(self, name))
            except (TypeError, ValueError) as exc:
                raise InvalidParameterError(f"{name} is not a real number") from exc
            object.__setattr__(self, name, v)
            vals.append(v)
        _check_finite("GainVector", vals)

    @classmethod
    def from_sequence(cls, seq):
        if len(seq) != 4:
            raise InvalidParameterError(f"expected 4 gains, got {len(seq)}")
        return cls(*seq)

    def as_array(self):
        return np.array([self.k0, self.h0, self.k0_tau, self.h0_tau])


@dataclass(frozen=True)
class CouplingGainVector:
    """Inter-agent gains ``(k, h, k_tau, h_tau)``, applied through the Laplacian."""

    k: float
    h: float
    k_tau: float
    h_tau: float

    def __post_init__(self):
        vals = []
        for name in ("k", "h", "k_tau", "h_tau"):
            try:
                v = float(getattr(self, name))
            except (TypeError, ValueError) as exc:
                raise InvalidParameterError(f"{name} is not a real number") from exc
            object.__setattr__(self, name, v)
            vals.append(v)
        _check_finite("CouplingGainVector", vals)

    @classmethod
    def from_sequence(cls, seq):
        if len(seq) != 4:
            raise InvalidParameterError(f"expected 4 coupling gains, got {len(seq)}")
        return cls(*seq)

    def as_array(self):
        return np.array([self.k, self.h, self.k_tau, self.h_tau])

    @property
    def is_zero(self):
        return not np.any(self.as_array())


ZERO_COUPLING = CouplingGainVector(0.0, 0.0, 0.0, 0.0)


@dataclass(frozen=True, eq=False)
class FeedbackMatrices:
    M: np.ndarray
    M_tau: np.ndarray
    P: np.ndarray
    P_tau: np.ndarray


def build_feedback_matrices(p0, pbar=ZERO_COUPLING):
    """Return the 2x2 matrices ``M, M_tau, P, P_tau`` for the given gains."""
    if not isinstance(p0, GainVector):
        p0 = GainVector.from_sequence(p0)
    if not isinstance(pbar, CouplingGainVector):
        pbar = CouplingGainVector.from_sequence(pbar)
    M = np.array([[0.0, 1.0], [-p0.k0, -p0.h0]])
    M_tau = np.array([[0.0, 0.0], [-p0.k0_tau, -p0.h0_tau]])
    P = np.array([[0.0, 0.0], [pbar.k, pbar.h]])
    P_tau = np.array([[0.0, 0.0], [pbar.k_tau, pbar.h_tau]])
    for m in (M, M_tau, P, P_tau):
        m.setflags(write=False)
    return FeedbackMatrices(M, M_tau, P, P_tau)


@dataclass(frozen=True, eq=False)
class Topology:
    adjacency: np.ndarray
    laplacian: np.ndarray

    @property
    def n_agents(self):
        return self.laplacian.shape[0]

    @property
    def is_symmetric(self):
        L = self.laplacian
        return np.max(np.abs(L - L.T), initial=0.0) < 1e-12

    @classmethod
    def uncoupled(cls, n_agents):
        return laplacian_from_adjacency(np.zeros((n_agents, n_agents)))


def laplacian_from_adjacency(adjacency):
    """Build the graph Laplacian ``L_ii = sum_l a_il``, ``L_ij = -a_ij``."""
    a = np.array(adjacency, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise InvalidTopologyError(f"adjacency must be a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidTopologyError("adjacency contains non-finite weights")
    if np.any(a < 0):
        raise InvalidTopologyError("adjacency weights must be nonnegative")
    if np.any(np.diag(a) != 0):
        raise InvalidTopologyError("adjacency must have a zero diagonal")
    L = -a.copy()
    np.fill_diagonal(L, a.sum(axis=1))
    a.setflags(write=False)
    L.setflags(write=False)
    return Topology(a, L)


def laplacian_eigenvalues(topology, check_diagonalizable=True):
    """Eigenvalues of the Laplacian, with multiplicity, as a complex array.

    Symmetric Laplacians go through the symmetric solver and come back with
    exactly zero imaginary parts.  A warning is issued when the eigenvector
    matrix is numerically singular (condition number above 1e6), since the
    modal reduction then no longer holds.
    """
    L = np.asarray(topology.laplacian if isinstance(topology, Topology) else topology, dtype=float)
    n = L.shape[0]
    if n > 512:
        raise InvalidTopologyError("dense eigensolver limited to n <= 512")
    scale = max(1.0, np.max(np.abs(L)))
    try:
        if np.max(np.abs(L - L.T), initial=0.0) < 1e-12:
            w, V = np.linalg.eigh(L)
            w = w.astype(complex)
        else:
            w, V = np.linalg.eig(L)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailureError(f"eigensolver did not converge: {exc}", residual=math.inf) from exc
    residual = np.max(np.linalg.norm(L @ V - V * w, axis=0), initial=0.0) / scale
    if residual > 1e-8:
        raise NumericalFailureError("eigenpair residual too large", residual=residual)
    if check_diagonalizable:
        cond = np.linalg.cond(V)
        if not np.isfinite(cond) or cond > 1e6:
            warnings.warn(
                f"Laplacian looks non-diagonalizable (eigenvector condition {cond:.3g}); "
                "modal decomposition may not represent the full system",
                NonDiagonalizableWarning,
                stacklevel=2,
            )
    order = np.lexsort((w.imag, w.real))
    return w[order]


def effective_gains(p0, pbar, lam):
    """``p0 + lam * pbar`` as a complex 4-vector ``(k0, h0, k0_tau, h0_tau)``."""
    if not isinstance(p0, GainVector):
        p0 = GainVector.from_sequence(p0)
    if pbar is None:
        pbar = ZERO_COUPLING
    elif not isinstance(pbar, CouplingGainVector):
        pbar = CouplingGainVector.from_sequence(pbar)
    return p0.as_array() + complex(lam) * pbar.as_array()


@dataclass(frozen=True, eq=False)
class ModeSystem:
    """One transverse mode ``x' = A x + B x(t - tau)``."""

    lam: complex
    A: np.ndarray
    B: np.ndarray
    tau: float
    gains: np.ndarray = field(repr=False)

    @property
    def is_real(self):
        return not (np.any(self.A.imag) or np.any(self.B.imag))

    def with_tau(self, tau):
        if tau < 0 or not math.isfinite(tau):
            raise InvalidParameterError(f"tau must be finite and >= 0, got {tau}")
        return ModeSystem(self.lam, self.A, self.B, float(tau), self.gains)

    def real_gains(self, tol=1e-12):
        """Effective gains as a real ``GainVector``; ``None`` if they are complex."""
        g = self.gains
        if np.max(np.abs(g.imag)) > tol * max(1.0, np.max(np.abs(g))):
            return None
        return GainVector(*g.real)


def mode_system(p0, pbar=None, lam=0.0, tau=0.0):
    """Two-component mode system for Laplacian eigenvalue ``lam``."""
    tau = float(tau)
    if not math.isfinite(tau) or tau < 0:
        raise InvalidParameterError(f"tau must be finite and >= 0, got {tau}")
    g = effective_gains(p0, pbar, lam)
    k0, h0, kt, ht = g
    A = np.array([[0.0, 1.0], [-k0, -h0]], dtype=complex)
    B = np.array([[0.0, 0.0], [-kt, -ht]], dtype=complex)
    for m in (A, B, g):
        m.setflags(write=False)
    return ModeSystem(complex(lam), A, B, tau, g)


@dataclass(frozen=True, eq=False)
class FormationSpec:
    """Per-agent formation offsets ``s_i = scale * offsets[i]``."""

    offsets: np.ndarray
    scale: float = 1.0

    def __post_init__(self):
        off = np.array(self.offsets, dtype=float)
        if off.ndim != 2 or off.shape[1] != 3:
            raise InvalidParameterError("offsets must have shape (n_agents, 3)")
        if not (self.scale > 0 and math.isfinite(self.scale)):
            raise InvalidParameterError("formation scale must be positive")
        off.setflags(write=False)
        object.__setattr__(self, "offsets", off)
        object.__setattr__(self, "scale", float(self.scale))

    @property
    def n_agents(self):
        return self.offsets.shape[0]

    @property
    def s(self):
        return self.scale * self.offsets


def full_system(p0, pbar, topology):
    """Full per-axis error system matrices ``(A_full, B_full)`` of size 2N.

    State ordering is ``(e_1, xi_1, ..., e_N, xi_N)``.
    """
    fm = build_feedback_matrices(p0, pbar if pbar is not None else ZERO_COUPLING)
    L = topology.laplacian if isinstance(topology, Topology) else np.asarray(topology, float)
    eye = np.eye(L.shape[0])
    A = np.kron(eye, fm.M) - np.kron(L, fm.P)
    B = np.kron(eye, fm.M_tau) - np.kron(L, fm.P_tau)
    return A, B


# three-agent example: directed weights, Laplacian spectrum {0, 4, 5}
EXAMPLE_ADJACENCY = ((0.0, 2.0, 1.0), (2.0, 0.0, 1.0), (2.0, 1.0, 0.0))
_TRIANGLE = ((0.0, -10.0, 0.0), (20.0, 10.0, 0.0), (-20.0, 10.0, 0.0))


def example_topology():
    return laplacian_from_adjacency(EXAMPLE_ADJACENCY)


def example_formation(scale=1.0):
    """Isosceles triangle used in the three-agent scenarios."""
    return FormationSpec(np.array(_TRIANGLE), scale)
