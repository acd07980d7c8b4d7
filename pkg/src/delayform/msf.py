"""Master stability function over the complex coupling plane.

``msf_field`` tabulates the spectral abscissa of the mode system for every
node of a rectangular lattice of Laplacian eigenvalues.  Neighbouring nodes
have nearby spectra, so the lattice is swept in serpentine order and each
node is seeded with the rightmost roots of its predecessor; the contour
guard in :func:`rightmost_roots` falls back to full collocation whenever a
seed misses a root.

The second half of the module checks the large-delay shape of the boundary
when the delay acts only through the coupling: a near-circle of radius
``|k0 / k_tau|`` with real self-intersections and a slow rotation of the
crossing angles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy import ndimage, optimize
from scipy.interpolate import RegularGridInterpolator

from .bifurcation import ParametricCurve, lambda_boundary, lambda_of_mu
from .errors import (
    DegenerateTangentError,
    DelayFormError,
    IntersectionNotFoundError,
    InvalidParameterError,
    NoStableSeedError,
    TheoremHypothesisError,
)
from .model import CouplingGainVector, GainVector, mode_system
from .spectrum import default_window, rightmost_roots

__all__ = [
    "GridSpec",
    "MsfField",
    "AsymptoticCurve",
    "msf_value",
    "msf_field",
    "large_delay_asymptote",
    "self_intersections",
    "intersection_angles",
    "IntersectionAngle",
    "circle_convergence_metric",
]


@dataclass(frozen=True)
class GridSpec:
    """Rectangular lattice over ``(Re lambda, Im lambda)``."""

    re_min: float = -2.0
    re_max: float = 10.0
    im_min: float = -6.0
    im_max: float = 6.0
    n_re: int = 241
    n_im: int = 241

    def __post_init__(self):
        for name in ("re_min", "re_max", "im_min", "im_max"):
            if not math.isfinite(float(getattr(self, name))):
                raise InvalidParameterError(f"grid {name} must be finite")
        if not (self.re_min < self.re_max and self.im_min < self.im_max):
            raise InvalidParameterError("grid bounds must be increasing")
        if self.n_re < 2 or self.n_im < 2:
            raise InvalidParameterError("grid needs at least 2 nodes per axis")

    @classmethod
    def with_spacing(cls, re_min, re_max, im_min, im_max, spacing):
        n_re = int(round((re_max - re_min) / spacing)) + 1
        n_im = int(round((im_max - im_min) / spacing)) + 1
        return cls(re_min, re_max, im_min, im_max, n_re, n_im)

    @property
    def re(self):
        return np.linspace(self.re_min, self.re_max, self.n_re)

    @property
    def im(self):
        return np.linspace(self.im_min, self.im_max, self.n_im)

    @property
    def spacing(self):
        return ((self.re_max - self.re_min) / (self.n_re - 1), (self.im_max - self.im_min) / (self.n_im - 1))

    def covers_origin(self):
        return self.re_min <= 0 <= self.re_max and self.im_min <= 0 <= self.im_max

    def origin_index(self):
        return int(np.argmin(np.abs(self.re))), int(np.argmin(np.abs(self.im)))


@dataclass(frozen=True, eq=False)
class MsfField:
    grid: GridSpec
    values: np.ndarray  # shape (n_re, n_im); NaN marks failed nodes
    boundary: ParametricCurve
    region_mask: np.ndarray
    tau: float
    origin_value: float = math.nan

    @property
    def valid(self):
        return np.isfinite(self.values)

    def interpolator(self):
        return RegularGridInterpolator(
            (self.grid.re, self.grid.im), self.values, method="linear",
            bounds_error=False, fill_value=np.nan,
        )

    def interpolate(self, lam):
        """Bilinear interpolation of the field at complex points ``lam``."""
        lam = np.asarray(lam, dtype=complex)
        pts = np.stack([lam.real.ravel(), lam.imag.ravel()], axis=-1)
        return self.interpolator()(pts).reshape(lam.shape)


def _as_p0(p0):
    return p0 if isinstance(p0, GainVector) else GainVector.from_sequence(p0)


def _as_pbar(pbar):
    if pbar is None:
        return CouplingGainVector(0.0, 0.0, 0.0, 0.0)
    return pbar if isinstance(pbar, CouplingGainVector) else CouplingGainVector.from_sequence(pbar)


def msf_value(lam, p0, pbar, tau, window=None):
    """Spectral abscissa of the mode with (complex) Laplacian eigenvalue ``lam``."""
    return rightmost_roots(mode_system(p0, pbar, lam, tau), window)[0]


def _sweep(p0, pbar, tau, re, im, window):
    """Serpentine sweep over the lattice with seed continuation; NaN on failure."""
    vals = np.full((re.size, im.size), np.nan)
    seeds = None
    for j, y in enumerate(im):
        cols = range(re.size) if j % 2 == 0 else range(re.size - 1, -1, -1)
        for i in cols:
            mode = mode_system(p0, pbar, complex(re[i], y), tau)
            try:
                lam, roots = rightmost_roots(mode, window, seeds=seeds, keep=1.0)
            except DelayFormError:
                seeds = None
                continue
            vals[i, j] = lam
            seeds = roots
    return vals


def msf_field(p0, pbar, tau, grid_spec=None, window=None, boundary=True):
    """Tabulate the master stability function and flood-fill the stable region.

    The region is the 4-connected component of ``{Lambda_max < 0}`` that
    contains the node nearest to ``lambda = 0``.  If that node is not stable
    a :class:`NoStableSeedError` is raised carrying the field with an empty
    mask.
    """
    p0, pb = _as_p0(p0), _as_pbar(pbar)
    tau = float(tau)
    if not (tau >= 0 and math.isfinite(tau)):
        raise InvalidParameterError("tau must be finite and >= 0")
    grid = grid_spec or GridSpec()
    if not grid.covers_origin():
        raise InvalidParameterError("MSF grid must cover lambda = 0")
    window = window or default_window(tau)
    re, im = grid.re, grid.im

    if pb.is_zero:
        # coupling does not enter: every node is the uncoupled mode
        v = rightmost_roots(mode_system(p0, pb, 0.0, tau), window)[0]
        vals = np.full((re.size, im.size), v)
    elif np.allclose(im, -im[::-1], rtol=0, atol=1e-12 * max(1.0, abs(grid.im_max))):
        # real gains: the field is even in Im lambda, sweep the upper half only
        half = im.size // 2
        upper = _sweep(p0, pb, tau, re, im[half:], window)
        vals = np.empty((re.size, im.size))
        vals[:, half:] = upper
        vals[:, :half] = upper[:, ::-1] if im.size % 2 == 0 else upper[:, 1:][:, ::-1]
    else:
        vals = _sweep(p0, pb, tau, re, im, window)

    i0, j0 = grid.origin_index()
    origin_value = rightmost_roots(mode_system(p0, pb, 0.0, tau), window)[0]
    stable = np.isfinite(vals) & (vals < 0)
    labels, _ = ndimage.label(stable)  # default structure is 4-connected
    seed = labels[i0, j0]
    mask = labels == seed if seed > 0 else np.zeros_like(stable)
    curve = None
    if boundary and tau > 0:
        try:
            curve = lambda_boundary(p0, pb, tau)
        except DelayFormError:
            curve = None
    vals.setflags(write=False)
    mask.setflags(write=False)
    out = MsfField(grid, vals, curve, mask, tau, float(origin_value))
    if seed == 0:
        raise NoStableSeedError(
            f"origin node is not stable (Lambda_max = {vals[i0, j0]:.6g})", field=out
        )
    return out


# ---------------------------------------------------------------------------
# large-delay asymptotics

@dataclass(frozen=True, eq=False)
class AsymptoticCurve:
    lambda0: complex
    slope: float
    tau: float
    omega: np.ndarray
    exact: np.ndarray
    asymptotic: np.ndarray
    max_error: float
    error_constant: float  # max_error * tau**2
    intersections: tuple = field(default=())  # (j, omega_j, lambda_j)


def _check_hypotheses(p0, pb):
    if p0.k0_tau != 0 or p0.h0_tau != 0:
        raise TheoremHypothesisError("large-delay asymptotics need k0_tau = h0_tau = 0")
    if pb.k != 0 or pb.h != 0:
        raise TheoremHypothesisError("large-delay asymptotics need k = h = 0")
    if not (p0.k0 > 0 and p0.h0 > 0):
        raise TheoremHypothesisError("large-delay asymptotics need k0 > 0 and h0 > 0")
    if pb.k_tau == 0:
        raise TheoremHypothesisError("large-delay asymptotics need k_tau != 0")


def _slope(p0, pb):
    return pb.h_tau / pb.k_tau - p0.h0 / p0.k0


def large_delay_asymptote(p0, pbar, tau, omega_window=2 * math.pi, n=4001, j_max=0):
    """First-order large-delay form of ``lambda(i omega)`` on ``|omega tau| <= omega_window``.

    Returns the exact and asymptotic curves side by side together with the
    largest gap between them and ``C = gap * tau**2``.
    """
    p0, pb = _as_p0(p0), _as_pbar(pbar)
    _check_hypotheses(p0, pb)
    tau = float(tau)
    if not tau > 0:
        raise InvalidParameterError("tau must be positive")
    lam0 = -p0.k0 / pb.k_tau
    slope = _slope(p0, pb)
    w = np.linspace(-omega_window, omega_window, n) / tau
    exact = lambda_of_mu(1j * w, p0, pb, tau)
    rot = np.exp(1j * w * tau)
    approx = lam0 * rot + 1j * w * (p0.k0 / pb.k_tau) * slope * rot
    err = float(np.nanmax(np.abs(exact - approx)))
    inter = tuple(self_intersections(p0, pb, tau, j_max)) if j_max > 0 else ()
    return AsymptoticCurve(complex(lam0), float(slope), tau, w, exact, approx, err, err * tau * tau, inter)


def _im_lambda(w, p0, pb, tau):
    return lambda_of_mu(1j * w, p0, pb, tau).imag


def self_intersections(p0, pbar, tau, j_max):
    """Real self-intersection points ``(j, omega_j, lambda_j)`` for ``j = 0..j_max``.

    Each seed from the first-order formula is refined by a bracketed solve
    of ``Im lambda(i omega) = 0``; the bracket is the sign change of
    ``Im lambda`` nearest the seed within ``omega tau`` in
    ``[(j - 1/2) pi, (j + 1/2) pi]``.
    """
    p0, pb = _as_p0(p0), _as_pbar(pbar)
    _check_hypotheses(p0, pb)
    tau = float(tau)
    slope = _slope(p0, pb)
    out = [(0, 0.0, complex(lambda_of_mu(0.0, p0, pb, tau)))]
    for j in range(1, int(j_max) + 1):
        seed = (math.pi * j / tau) * (1.0 + slope / tau)
        big = np.linspace((j - 0.5) * math.pi, (j + 0.5) * math.pi, 401) / tau
        f = lambda_of_mu(1j * big, p0, pb, tau).imag
        sc = np.flatnonzero(np.sign(f[:-1]) * np.sign(f[1:]) <= 0)
        if sc.size == 0:
            raise IntersectionNotFoundError(f"no sign change of Im lambda near j={j}", j=j)
        k = sc[np.argmin(np.abs(0.5 * (big[sc] + big[sc + 1]) - seed))]
        try:
            wj, info = optimize.brentq(
                _im_lambda, big[k], big[k + 1], args=(p0, pb, tau),
                xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=100, full_output=True,
            )
        except (RuntimeError, ValueError) as exc:
            raise IntersectionNotFoundError(f"refinement failed for j={j}: {exc}", j=j) from exc
        if not info.converged:
            raise IntersectionNotFoundError(f"refinement did not converge for j={j}", j=j)
        out.append((j, float(wj), complex(lambda_of_mu(1j * wj, p0, pb, tau))))
    return out


class IntersectionAngle(NamedTuple):
    j: int
    numeric: float
    asymptotic: float
    leading_order: float


def _tangent(p0, pb, tau, w, h):
    return (lambda_of_mu(1j * (w + h), p0, pb, tau) - lambda_of_mu(1j * (w - h), p0, pb, tau)) / (2 * h)


def _angle_between(tp, tm):
    if abs(tp) < 1e-12 or abs(tm) < 1e-12:
        raise DegenerateTangentError("tangent vector vanishes")
    return float((np.angle(tm) - np.angle(tp)) % (2 * np.pi))


def intersection_angles(curve, p0, pbar, tau=None):
    """Crossing angles at the self-intersections of ``lambda(i omega)``.

    Both branches through a crossing are oriented away from ``omega = 0``
    (the branch at ``-omega_j`` is parameterised by ``s = -omega``), and the
    angle is measured from the ``+omega_j`` tangent to the ``-omega_j``
    tangent.  ``numeric`` uses central differences of the exact curve at the
    refined ``omega_j``; ``asymptotic`` is the first-order formula;
    ``leading_order`` repeats the numeric construction at ``omega tau = j pi``
    instead of at the crossing itself.
    """
    p0, pb = _as_p0(p0), _as_pbar(pbar)
    tau = float(curve.tau if tau is None else tau)
    h = 1e-4 / tau
    out = []
    for j, wj, _ in curve.intersections:
        if j == 0:
            continue
        try:
            theta = _angle_between(_tangent(p0, pb, tau, wj, h), -_tangent(p0, pb, tau, -wj, h))
            w0 = j * math.pi / tau
            lead = _angle_between(_tangent(p0, pb, tau, w0, h), -_tangent(p0, pb, tau, -w0, h))
        except DegenerateTangentError as exc:
            raise DegenerateTangentError(f"tangent vanishes at j={j}") from exc
        asym = (math.pi + 2 * j * math.pi * curve.slope / tau) % (2 * math.pi)
        out.append(IntersectionAngle(j, theta, asym, lead))
    return out


def circle_convergence_metric(p0, pbar, tau, omega_window=2 * math.pi, n=20001):
    """Largest deviation of ``|lambda(i omega)|`` from ``|lambda0|`` over ``|omega tau| <= 2 pi``."""
    p0, pb = _as_p0(p0), _as_pbar(pbar)
    _check_hypotheses(p0, pb)
    tau = float(tau)
    w = np.linspace(-omega_window, omega_window, n) / tau
    lam = lambda_of_mu(1j * w, p0, pb, tau)
    r0 = abs(p0.k0 / pb.k_tau)
    return float(np.nanmax(np.abs(np.abs(lam) - r0)))
