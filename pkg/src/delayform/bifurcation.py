"""Parametric bifurcation curves.

Every curve here comes from substituting a root ``mu = c + i omega`` into
the characteristic equation and solving for the parameters that put it
there: ``(k0, h0)`` for the uncoupled agent, ``(lambda, h0)`` for real
Laplacian eigenvalues, and complex ``lambda`` for general coupling.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyCurveError, InvalidParameterError, PoleError
from .model import CouplingGainVector, GainVector

__all__ = [
    "CurveKind",
    "ParametricCurve",
    "default_omega_grid",
    "k0h0_boundary",
    "lambda_h0_boundary",
    "lambda_of_mu",
    "lambda_boundary",
    "contour_lines",
]

POLE_TOL = 1e-6
MAX_JUMP = 0.05


class CurveKind(enum.Enum):
    K0H0 = "K0H0"
    LAMBDA_H0 = "LambdaH0"
    LAMBDA_BOUNDARY = "LambdaPlaneBoundary"
    LAMBDA_CONTOUR = "LambdaPlaneContour"


@dataclass(frozen=True, eq=False)
class ParametricCurve:
    """Samples ``(omega, x, y)`` split into segments at poles and gaps.

    For curves in the complex lambda plane ``x + i y`` is the point; for the
    gain-plane curves ``x`` and ``y`` are the two gains.
    """

    omega: np.ndarray
    x: np.ndarray
    y: np.ndarray
    kind: CurveKind
    level: float = 0.0
    segment_id: np.ndarray = None
    gaps: tuple = field(default=())

    @property
    def points(self):
        return self.x + 1j * self.y

    def __len__(self):
        return self.omega.size

    def segments(self):
        """Yield ``(omega, x, y)`` for each contiguous segment."""
        for s in np.unique(self.segment_id):
            m = self.segment_id == s
            yield self.omega[m], self.x[m], self.y[m]


def default_omega_grid(tau, omega_max=None, positive=False):
    """Uniform frequency grid with step ``min(0.25/tau, 0.01)``."""
    tau = float(tau)
    if not tau > 0:
        raise InvalidParameterError("default omega grid needs tau > 0")
    step = min(0.25 / tau, 0.01)
    if omega_max is None:
        omega_max = 4.0 * max(4.0 * math.pi / tau, 5.0)
    n = int(math.ceil(omega_max / step))
    w = np.arange(-n, n + 1) * step
    if positive:
        w = w[w > 0]
    return w


def _as_p0(p0):
    return p0 if isinstance(p0, GainVector) else GainVector.from_sequence(p0)


def _as_pbar(pbar):
    if pbar is None:
        return CouplingGainVector(0.0, 0.0, 0.0, 0.0)
    return pbar if isinstance(pbar, CouplingGainVector) else CouplingGainVector.from_sequence(pbar)


def _check_grid(omega_grid):
    w = np.asarray(omega_grid, dtype=float).ravel()
    if w.size == 0 or not np.all(np.isfinite(w)):
        raise InvalidParameterError("omega grid must be a non-empty finite array")
    return np.sort(w)


def _assemble(w, x, y, valid, kind, level, evaluate, max_jump, max_depth=12):
    """Refine large jumps by bisection, then split at invalid samples and unresolved jumps."""
    w, x, y, valid = list(w), list(x), list(y), list(valid)
    for _ in range(max_depth):
        ww = np.array(w)
        xx, yy, vv = np.array(x), np.array(y), np.array(valid)
        jump = np.hypot(np.diff(xx), np.diff(yy))
        bad = np.flatnonzero(vv[:-1] & vv[1:] & (jump > max_jump))
        if bad.size == 0:
            break
        wm = 0.5 * (ww[bad] + ww[bad + 1])
        xm, ym, vm = evaluate(wm)
        ww = np.insert(ww, bad + 1, wm)
        xx = np.insert(xx, bad + 1, xm)
        yy = np.insert(yy, bad + 1, ym)
        vv = np.insert(vv, bad + 1, vm)
        w, x, y, valid = list(ww), list(xx), list(yy), list(vv)
    w, x, y, valid = np.array(w), np.array(x), np.array(y), np.array(valid, dtype=bool)
    seg = np.zeros(w.size, dtype=int)
    gaps = []
    sid = 0
    prev = None
    for i in range(w.size):
        if not valid[i]:
            gaps.append(float(w[i]))
            prev = None
            continue
        if prev is not None:
            if not valid[i - 1] or math.hypot(x[i] - x[prev], y[i] - y[prev]) > max_jump:
                sid += 1
        elif i > 0:
            sid += 1
        seg[i] = sid
        prev = i
    keep = valid
    if not keep.any():
        raise EmptyCurveError("every sample of the curve was excluded")
    seg = seg[keep]
    # renumber segments consecutively from zero
    _, seg = np.unique(seg, return_inverse=True)
    for a in (w, x, y):
        a.setflags(write=False)
    return ParametricCurve(w[keep], x[keep], y[keep], kind, float(level), seg, tuple(gaps))


# ---------------------------------------------------------------------------
# uncoupled (k0, h0) plane

def _k0h0(w, kt, ht, tau):
    s, c = np.sin(w * tau), np.cos(w * tau)
    valid = w != 0
    with np.errstate(divide="ignore", invalid="ignore"):
        k0 = w * w - ht * w * s - kt * c
        h0 = np.where(valid, kt * s / np.where(valid, w, 1.0) - ht * c, np.nan)
    return k0, h0, valid


def k0h0_boundary(k0_tau, h0_tau, tau, omega_grid=None, max_jump=MAX_JUMP):
    """Purely imaginary root ``i omega`` boundary in the ``(k0, h0)`` plane.

    ``omega = 0`` is skipped (the ``h0`` expression divides by omega) and
    recorded in ``gaps``.
    """
    tau = float(tau)
    if not tau > 0:
        raise InvalidParameterError("k0h0_boundary needs tau > 0")
    kt, ht = float(k0_tau), float(h0_tau)
    w = _check_grid(default_omega_grid(tau, positive=True) if omega_grid is None else omega_grid)
    k0, h0, valid = _k0h0(w, kt, ht, tau)
    return _assemble(w, k0, h0, valid, CurveKind.K0H0, 0.0,
                     lambda wm: _k0h0(wm, kt, ht, tau), max_jump)


# ---------------------------------------------------------------------------
# (lambda, h0) plane for real Laplacian eigenvalues

def _lambda_h0(w, k0, kt0, ht0, pb, tau):
    s, c = np.sin(w * tau), np.cos(w * tau)
    den = pb.k + pb.h_tau * w * s + pb.k_tau * c
    scale = abs(pb.k) + abs(pb.h_tau * w) + abs(pb.k_tau) + 1e-300
    valid = (np.abs(den) > POLE_TOL * scale) & (w != 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        lam = (w * w - k0 - ht0 * w * s - kt0 * c) / np.where(valid, den, 1.0)
        h0 = (s / np.where(w != 0, w, 1.0)) * (kt0 + lam * pb.k_tau) - (ht0 + lam * pb.h_tau) * c - lam * pb.h
    lam = np.where(valid, lam, np.nan)
    h0 = np.where(valid, h0, np.nan)
    return lam, h0, valid


def lambda_h0_boundary(p0_partial, pbar, tau, omega_grid=None, max_jump=MAX_JUMP):
    """Boundary ``(lambda(omega), h0(omega))`` for real coupling eigenvalues.

    ``p0_partial`` holds ``(k0, k0_tau, h0_tau)``; ``h0`` is the free gain.
    Samples where the coupling denominator
    ``k + h_tau w sin(w tau) + k_tau cos(w tau)`` is within ``1e-6`` of zero
    are dropped and the curve is split there.
    """
    tau = float(tau)
    if not tau > 0:
        raise InvalidParameterError("lambda_h0_boundary needs tau > 0")
    if len(p0_partial) != 3:
        raise InvalidParameterError("p0_partial must be (k0, k0_tau, h0_tau)")
    k0, kt0, ht0 = (float(v) for v in p0_partial)
    pb = _as_pbar(pbar)
    w = _check_grid(default_omega_grid(tau, positive=True) if omega_grid is None else omega_grid)

    def ev(wm):
        return _lambda_h0(wm, k0, kt0, ht0, pb, tau)

    lam, h0, valid = ev(w)
    return _assemble(w, lam, h0, valid, CurveKind.LAMBDA_H0, 0.0, ev, max_jump)


# ---------------------------------------------------------------------------
# complex lambda plane

def _lambda_parts(mu, p0, pb, tau):
    """Numerator, denominator and term scale of ``lambda(mu)``, rescaled for Re mu < 0."""
    mu = np.asarray(mu, dtype=complex)
    q0 = mu * mu + mu * p0.h0 + p0.k0
    q1 = mu * p0.h0_tau + p0.k0_tau
    r0 = mu * pb.h + pb.k
    r1 = mu * pb.h_tau + pb.k_tau
    left = mu.real < 0
    # multiply through by exp(mu tau) where exp(-mu tau) would blow up
    e = np.exp(np.where(left, mu * tau, -mu * tau))
    num = np.where(left, -q0 * e - q1, -q0 - q1 * e)
    den = np.where(left, r0 * e + r1, r0 + r1 * e)
    scale = np.where(left, np.abs(r0 * e) + np.abs(r1), np.abs(r0) + np.abs(r1 * e))
    return num, den, scale


def lambda_of_mu(mu, p0, pbar, tau):
    """Coupling eigenvalue ``lambda`` for which ``mu`` is a characteristic root."""
    p0, pb = _as_p0(p0), _as_pbar(pbar)
    tau = float(tau)
    if not (tau >= 0 and math.isfinite(tau)):
        raise InvalidParameterError("tau must be finite and >= 0")
    num, den, scale = _lambda_parts(mu, p0, pb, tau)
    if np.ndim(num) == 0:
        if abs(den) <= 1e-14 * scale or den == 0:
            raise PoleError(f"lambda(mu) has a pole at mu={complex(mu)}")
        return complex(num / den)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = num / den
    out[np.abs(den) <= 1e-14 * scale] = np.nan
    return out


def _lambda_curve(c, p0, pb, tau):
    def ev(wm):
        num, den, scale = _lambda_parts(c + 1j * np.asarray(wm), p0, pb, tau)
        valid = np.abs(den) > POLE_TOL * np.maximum(scale, 1e-300)
        with np.errstate(divide="ignore", invalid="ignore"):
            lam = np.where(valid, num / np.where(valid, den, 1.0), np.nan)
        return lam.real, lam.imag, valid
    return ev


def contour_lines(c, p0, pbar, tau, omega_grid=None, max_jump=MAX_JUMP):
    """Curve ``lambda(c + i omega)``: where a root has real part exactly ``c``."""
    p0, pb = _as_p0(p0), _as_pbar(pbar)
    tau = float(tau)
    c = float(c)
    if not math.isfinite(c):
        raise InvalidParameterError("contour level must be finite")
    if omega_grid is None:
        omega_grid = default_omega_grid(max(tau, 1e-3))
    w = _check_grid(omega_grid)
    ev = _lambda_curve(c, p0, pb, tau)
    x, y, valid = ev(w)
    kind = CurveKind.LAMBDA_BOUNDARY if c == 0.0 else CurveKind.LAMBDA_CONTOUR
    return _assemble(w, x, y, valid, kind, c, ev, max_jump)


def lambda_boundary(p0, pbar, tau, omega_grid=None, max_jump=MAX_JUMP):
    """Stability boundary ``lambda(i omega)`` in the complex coupling plane."""
    return contour_lines(0.0, p0, pbar, tau, omega_grid, max_jump)
