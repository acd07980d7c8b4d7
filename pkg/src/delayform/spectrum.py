"""Characteristic roots of linear delay equations ``x' = A x + B x(t - tau)``.

Roots of ``det[mu I - A - B exp(-mu tau)] = 0`` are seeded from a Chebyshev
collocation of the infinitesimal generator of the solution semigroup,
polished by Newton's method on the analytic characteristic function and
checked against an argument-principle count on the search rectangle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    ContourResolutionError,
    IncompleteSpectrumError,
    InvalidParameterError,
)
from .model import ModeSystem

__all__ = [
    "RootWindow",
    "CharacteristicRoot",
    "SpectrumResult",
    "CharacteristicFunction",
    "default_window",
    "char_value",
    "char_derivative",
    "char_roots",
    "system_roots",
    "argument_principle_count",
    "lambda_max",
    "rightmost_roots",
    "strongly_unstable_spectrum",
    "delay_channel_zeros",
    "instantaneous_spectrum",
    "cheb_diff",
]

ROOT_RTOL = 1e-10
MERGE_RADIUS = 1e-8
MARGINAL_TOL = 1e-9
DEFAULT_ORDER = 64
MAX_ORDER = 512

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class RootWindow:
    """Search rectangle ``re_min <= Re mu <= re_max``, ``|Im mu| <= im_max``."""

    re_min: float
    re_max: float
    im_max: float

    def __post_init__(self):
        for name in ("re_min", "re_max", "im_max"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise InvalidParameterError(f"window {name} must be finite")
            object.__setattr__(self, name, v)
        if not self.re_min < self.re_max:
            raise InvalidParameterError("window needs re_min < re_max")
        if not self.im_max > 0:
            raise InvalidParameterError("window needs im_max > 0")

    def contains(self, mu, pad=0.0):
        mu = np.asarray(mu)
        return (
            (mu.real >= self.re_min - pad)
            & (mu.real <= self.re_max + pad)
            & (np.abs(mu.imag) <= self.im_max + pad)
        )

    def expanded(self, eps):
        return RootWindow(self.re_min - eps, self.re_max + eps, self.im_max + eps)

    def rect(self):
        return (self.re_min, self.re_max, -self.im_max, self.im_max)


def default_window(tau):
    """Search window that covers the low-frequency roots and the ACS band."""
    tau = float(tau)
    re_min = -min(5.0, 10.0 / max(tau, 1.0)) - 2.0
    im_max = max(4.0 * math.pi / max(tau, 0.1), 10.0)
    return RootWindow(re_min, 3.0, im_max)


@dataclass(frozen=True)
class CharacteristicRoot:
    mu: complex
    residual: float
    multiplicity: int = 1


@dataclass(frozen=True, eq=False)
class SpectrumResult:
    roots: tuple
    window: RootWindow
    discretization_order: int
    expected_count: int

    @property
    def mu(self):
        return np.array([r.mu for r in self.roots], dtype=complex)

    @property
    def count(self):
        return sum(r.multiplicity for r in self.roots)

    def __len__(self):
        return len(self.roots)


class CharacteristicFunction:
    """``f(mu) = det[mu I - A - B exp(-mu tau)]`` with derivative and scaled forms.

    For 2x2 systems ``f`` is expanded as ``c0(mu) + c1(mu) z + c2 z**2`` with
    ``z = exp(-mu tau)``, which lets every evaluation be rescaled by
    ``exp(s mu)`` to stay finite far into the left half plane.
    """

    def __init__(self, A, B, tau):
        self.A = np.array(A, dtype=complex)
        self.B = np.array(B, dtype=complex)
        if self.A.ndim != 2 or self.A.shape != self.B.shape or self.A.shape[0] != self.A.shape[1]:
            raise InvalidParameterError("A and B must be square matrices of equal size")
        tau = float(tau)
        if not math.isfinite(tau) or tau < 0:
            raise InvalidParameterError(f"tau must be finite and >= 0, got {tau}")
        self.tau = tau
        self.d = self.A.shape[0]
        self.rank = int(np.linalg.matrix_rank(self.B)) if np.any(self.B) else 0
        self.is_real = not (np.any(self.A.imag) or np.any(self.B.imag))
        if self.d == 2:
            a11, a12, a21, a22 = self.A.ravel()
            b11, b12, b21, b22 = self.B.ravel()
            self._a = (a11, a12, a21, a22)
            self._b = (b11, b12, b21, b22)
            self.c2 = b11 * b22 - b12 * b21
            self.dc1 = -b11 - b22

    @classmethod
    def from_mode(cls, mode):
        return cls(mode.A, mode.B, mode.tau)

    # 2x2 coefficient form -------------------------------------------------
    def _c0(self, mu):
        a11, a12, a21, a22 = self._a
        return (mu - a11) * (mu - a22) - a12 * a21

    def _c1(self, mu):
        a11, a12, a21, a22 = self._a
        b11, b12, b21, b22 = self._b
        return -b11 * (mu - a22) - b22 * (mu - a11) - a12 * b21 - b12 * a21

    def _dc0(self, mu):
        a11, _, _, a22 = self._a
        return 2 * mu - a11 - a22

    def _terms(self, mu, s):
        """Terms of ``f(mu) exp(s mu)`` and of its mu-derivative."""
        tau = self.tau
        c0 = self._c0(mu)
        c1 = self._c1(mu)
        e0 = np.exp(s * mu)
        t0 = c0 * e0
        d0 = (self._dc0(mu) + s * c0) * e0
        if self.rank == 0:
            return (t0,), (d0,)
        e1 = np.exp((s - tau) * mu)
        t1 = c1 * e1
        d1 = (self.dc1 + (s - tau) * c1) * e1
        if self.c2 == 0:
            return (t0, t1), (d0, d1)
        e2 = np.exp((s - 2 * tau) * mu)
        t2 = self.c2 * e2
        d2 = (s - 2 * tau) * self.c2 * e2
        return (t0, t1, t2), (d0, d1, d2)

    def _delta(self, mu):
        mu = np.asarray(mu, dtype=complex)
        z = np.exp(-mu * self.tau)
        eye = np.eye(self.d)
        D = mu[..., None, None] * eye - self.A - self.B * z[..., None, None]
        dD = eye + self.tau * self.B * z[..., None, None]
        return D, dD

    # public evaluation ----------------------------------------------------
    def __call__(self, mu):
        mu = np.asarray(mu, dtype=complex)
        if self.d == 2:
            return sum(self._terms(mu, 0.0)[0])
        return np.linalg.det(self._delta(mu)[0])

    def derivative(self, mu):
        mu = np.asarray(mu, dtype=complex)
        if self.d == 2:
            return sum(self._terms(mu, 0.0)[1])
        D, dD = self._delta(mu)
        f = np.linalg.det(D)
        return f * np.trace(np.linalg.solve(D, dD), axis1=-2, axis2=-1)

    def _shift_for(self, mu):
        return np.where(np.real(mu) < 0, self.rank * self.tau, 0.0)

    def scale(self, mu):
        """Magnitude of the largest contributions to ``f``, used for relative tolerances."""
        mu = np.asarray(mu, dtype=complex)
        if self.d == 2:
            return sum(np.abs(t) for t in self._terms(mu, 0.0)[0]) + 1.0
        D = self._delta(mu)[0]
        return np.prod(np.linalg.norm(D, axis=-1), axis=-1) + 1.0

    def newton_step(self, mu):
        """``f / f'`` evaluated without overflow."""
        mu = np.asarray(mu, dtype=complex)
        if self.d == 2:
            s = self._shift_for(mu)
            t, d = self._terms(mu, s)
            with np.errstate(all="ignore"):
                return sum(t) / sum(d)
        D, dD = self._delta(mu)
        with np.errstate(all="ignore"):
            try:
                tr = np.trace(np.linalg.solve(D, dD), axis1=-2, axis2=-1)
            except np.linalg.LinAlgError:
                tr = np.array([np.trace(np.linalg.lstsq(a, b, rcond=None)[0]) for a, b in zip(D, dD)])
            return 1.0 / tr

    def relative_residual(self, mu):
        """``|f(mu)|`` divided by the size of its terms, overflow-safe."""
        mu = np.asarray(mu, dtype=complex)
        if self.d == 2:
            s = self._shift_for(mu)
            t = self._terms(mu, s)[0]
            with np.errstate(all="ignore"):
                return np.abs(sum(t)) / self._backward_scale(mu, s)
        return np.abs(self(mu)) / self.scale(mu)

    def _backward_scale(self, mu, s):
        # Coefficients evaluated with absolute values of every product.  Using
        # |c1(mu)| itself would reject genuine roots sitting where c1 cancels
        # (e.g. mu = -k0_tau / h0_tau), since rounding there is relative to
        # the parts of c1, not to c1.
        a11, a12, a21, a22 = (abs(v) for v in self._a)
        b11, b12, b21, b22 = (abs(v) for v in self._b)
        r = np.abs(mu)
        x = np.real(mu)
        abs0 = r * r + (a11 + a22) * r + a11 * a22 + a12 * a21
        out = (abs0 + 1.0) * np.exp(s * x)
        if self.rank:
            abs1 = (b11 + b22) * r + b11 * a22 + b22 * a11 + a12 * b21 + b12 * a21
            out = out + abs1 * np.exp((s - self.tau) * x)
            out = out + abs(self.c2) * np.exp((s - 2 * self.tau) * x)
        return out

    def phase(self, mu, s_ref):
        """``arg(f(mu) exp(s_ref mu))`` mod 2pi and a near-singularity indicator.

        Evaluated per point with whichever rescaling keeps the terms finite.
        """
        mu = np.asarray(mu, dtype=complex)
        if self.d == 2:
            s = self._shift_for(mu)
            t = self._terms(mu, s)[0]
            F = sum(t)
            mag = sum(np.abs(x) for x in t)
            ph = np.angle(F) + (s_ref - s) * mu.imag
            with np.errstate(all="ignore"):
                small = np.abs(F) / mag
            return ph, small
        D = self._delta(mu)[0]
        sign, _ = np.linalg.slogdet(D)
        scale = np.prod(np.linalg.norm(D, axis=-1), axis=-1)
        with np.errstate(all="ignore"):
            small = np.abs(np.linalg.det(D)) / scale
        return np.angle(sign) + s_ref * mu.imag, small


def _as_fn(mode_or_fn):
    if isinstance(mode_or_fn, CharacteristicFunction):
        return mode_or_fn
    if isinstance(mode_or_fn, ModeSystem):
        return CharacteristicFunction.from_mode(mode_or_fn)
    raise TypeError(f"expected ModeSystem or CharacteristicFunction, got {type(mode_or_fn)!r}")


def char_value(mu, mode):
    """``det[mu I - A - B exp(-mu tau)]`` for a mode system (vectorised in ``mu``)."""
    out = _as_fn(mode)(mu)
    return complex(out) if np.ndim(out) == 0 else out


def char_derivative(mu, mode):
    out = _as_fn(mode).derivative(mu)
    return complex(out) if np.ndim(out) == 0 else out


# ---------------------------------------------------------------------------
# argument principle

class _NearSingular(Exception):
    pass


def _wrap(x):
    return (x + np.pi) % (2 * np.pi) - np.pi


def _edge_change(fn, a, b, s_ref, max_points=2_000_000, max_rounds=60):
    """Continuous change of ``arg f`` along the segment ``a -> b``."""
    length = abs(b - a)
    n0 = int(min(200_000, 33 + 4 * length * (1.0 + fn.tau * max(fn.rank, 1))))
    t = np.linspace(0.0, 1.0, n0)
    ph, small = fn.phase(a + (b - a) * t, s_ref)
    if np.any(small < 1e-12):
        raise _NearSingular
    for _ in range(max_rounds):
        dph = _wrap(np.diff(ph))
        bad = np.flatnonzero(np.abs(dph) > np.pi / 4)
        if bad.size == 0:
            return dph.sum() - s_ref * (b - a).imag
        if t.size + bad.size > max_points:
            break
        tm = 0.5 * (t[bad] + t[bad + 1])
        pm, sm = fn.phase(a + (b - a) * tm, s_ref)
        if np.any(sm < 1e-12):
            raise _NearSingular
        t = np.insert(t, bad + 1, tm)
        ph = np.insert(ph, bad + 1, pm)
    raise ContourResolutionError("phase jump above pi/4 persists after maximal refinement")


def _winding(fn, rect):
    x0, x1, y0, y1 = rect
    corners = [complex(x0, y0), complex(x1, y0), complex(x1, y1), complex(x0, y1)]
    total = 0.0
    for i in range(4):
        a, b = corners[i], corners[(i + 1) % 4]
        if a.real == b.real:  # vertical edge
            s_ref = fn.rank * fn.tau if a.real < 0 else 0.0
        else:
            s_ref = 0.0
        total += _edge_change(fn, a, b, s_ref)
    w = total / (2 * np.pi)
    k = int(round(w))
    if abs(w - k) > 0.2:
        raise ContourResolutionError(f"winding number {w:.4f} is not close to an integer")
    return k


def _count(fn, rect, eps=1e-6, attempts=6):
    """Winding count on ``rect``, nudged outward when a root sits on the contour."""
    x0, x1, y0, y1 = rect
    for _ in range(attempts):
        try:
            return _winding(fn, (x0, x1, y0, y1)), (x0, x1, y0, y1)
        except _NearSingular:
            x0, x1, y0, y1 = x0 - eps, x1 + eps, y0 - eps, y1 + eps
            eps *= 10
    raise ContourResolutionError("contour keeps passing through a root after perturbation")


def argument_principle_count(mode, window):
    """Number of characteristic roots inside ``window``, with multiplicity."""
    fn = _as_fn(mode)
    return _count(fn, window.rect())[0]


# ---------------------------------------------------------------------------
# seeding and refinement

def cheb_diff(n):
    """Chebyshev points ``x_j = cos(pi j / n)`` and the differentiation matrix."""
    if n < 1:
        raise InvalidParameterError("order must be positive")
    j = np.arange(n + 1)
    x = np.cos(np.pi * j / n)
    c = np.where((j == 0) | (j == n), 2.0, 1.0) * (-1.0) ** j
    dX = x[:, None] - x[None, :]
    D = np.outer(c, 1.0 / c) / (dX + np.eye(n + 1))
    D -= np.diag(D.sum(axis=1))
    return x, D


def _generator_eigenvalues(fn, n):
    """Eigenvalues of the collocated infinitesimal generator on [-tau, 0]."""
    d = fn.d
    if fn.tau == 0.0:
        return np.linalg.eigvals(fn.A + fn.B)
    _, D = cheb_diff(n)
    G = np.kron((2.0 / fn.tau) * D, np.eye(d)).astype(complex)
    G[:d, :] = 0.0
    G[:d, :d] = fn.A
    G[:d, -d:] += fn.B
    return np.linalg.eigvals(G)


def _newton(fn, mu, iters=80):
    with np.errstate(all="ignore"):
        return _newton_loop(fn, mu, iters)


def _newton_loop(fn, mu, iters):
    mu = np.array(mu, dtype=complex, copy=True)
    active = np.ones(mu.shape, dtype=bool)
    for _ in range(iters):
        if not active.any():
            break
        idx = np.flatnonzero(active)
        step = fn.newton_step(mu[idx])
        bad = ~np.isfinite(step)
        step[bad] = 0.0
        mu[idx] -= step
        done = np.abs(step) <= 8 * _EPS * (1.0 + np.abs(mu[idx]))
        active[idx[done | bad]] = False
    return mu


def _accept(fn, mu, rtol=ROOT_RTOL):
    mu = np.asarray(mu, dtype=complex)
    ok = np.isfinite(mu)
    rr = np.full(mu.shape, np.inf)
    with np.errstate(all="ignore"):
        rr[ok] = fn.relative_residual(mu[ok])
    ok &= np.isfinite(rr)
    return ok & (rr <= rtol)


def _merge(mu, radius=MERGE_RADIUS):
    """Cluster points closer than ``radius``; returns cluster means and sizes."""
    mu = np.asarray(mu, dtype=complex)
    if mu.size == 0:
        return mu, np.zeros(0, int)
    order = np.lexsort((mu.imag, mu.real))
    mu = mu[order]
    out, sizes = [], []
    used = np.zeros(mu.size, dtype=bool)
    for i in range(mu.size):
        if used[i]:
            continue
        close = (~used) & (np.abs(mu - mu[i]) <= radius * (1.0 + abs(mu[i])))
        used |= close
        out.append(mu[close].mean())
        sizes.append(int(close.sum()))
    return np.array(out, dtype=complex), np.array(sizes)


def _symmetrize(fn, mu):
    """For real systems snap nearly-real roots to the axis and pair conjugates."""
    if not fn.is_real or mu.size == 0:
        return mu
    mu = mu.copy()
    near = np.abs(mu.imag) <= 1e-10 * (1.0 + np.abs(mu.real))
    mu[near] = mu[near].real
    return mu


def _local_multiplicity(fn, mu, others, r):
    dist = np.abs(others - mu)
    dist = dist[dist > 0]
    if dist.size:
        r = min(r, 0.3 * dist.min())
    try:
        return _count(fn, (mu.real - r, mu.real + r, mu.imag - r, mu.imag + r), eps=r * 1e-3)[0]
    except ContourResolutionError:
        return 1


def _finalize(fn, mu, expected):
    """Merge, snap and attach multiplicities so that the total matches ``expected``.

    A root of multiplicity m is only resolved to about eps**(1/m), so when the
    fine merge disagrees with the contour count the candidates are clustered
    more coarsely and each cluster is weighed by a small local winding count.
    """
    mu, _ = _merge(mu)
    mu = _symmetrize(fn, mu)
    mult = np.ones(mu.size, dtype=int)
    if mu.size == expected or mu.size == 0:
        return mu, mult
    mu, _ = _merge(mu, radius=1e-4)
    mu = _symmetrize(fn, mu)
    mult = np.array(
        [max(1, _local_multiplicity(fn, m, mu, 2e-4 * (1.0 + abs(m)))) for m in mu], dtype=int
    )
    return mu, mult


def _in_rect(mu, rect):
    x0, x1, y0, y1 = rect
    return (mu.real >= x0) & (mu.real <= x1) & (mu.imag >= y0) & (mu.imag <= y1)


def _rect_roots(fn, rect, order=DEFAULT_ORDER, max_order=MAX_ORDER, extra_seeds=None):
    """All roots in ``rect`` plus the (possibly nudged) rectangle and final order."""
    expected, rect = _count(fn, rect)
    width = max(rect[1] - rect[0], rect[3] - rect[2])
    pad = 0.25 + 0.1 * width
    x0, x1, y0, y1 = rect
    big = (x0 - pad, x1 + pad, y0 - pad, y1 + pad)
    pool = np.zeros(0, dtype=complex)
    if extra_seeds is not None:
        seeds = np.asarray(extra_seeds, dtype=complex)
        r = _newton(fn, seeds)
        pool = r[_accept(fn, r) & _in_rect(r, rect)]
    n = order
    last = None
    while True:
        if expected == 0:
            return np.zeros(0, complex), np.zeros(0, int), rect, n, expected
        if pool.size:
            mu, mult = _finalize(fn, pool, expected)
            last = (mu, mult)
            if mult.sum() == expected:
                return mu, mult, rect, n, expected
        if n > max_order:
            break
        ev = _generator_eigenvalues(fn, n)
        ev = ev[_in_rect(ev, big)]
        r = _newton(fn, ev)
        r = r[_accept(fn, r) & _in_rect(r, rect)]
        pool = np.concatenate([pool, r])
        if fn.tau == 0.0:
            # the generator is exact: nothing more to gain from refinement
            n = max_order
        n *= 2
    mu, mult = last if last is not None else (np.zeros(0, complex), np.zeros(0, int))
    raise IncompleteSpectrumError(
        f"found {int(mult.sum())} roots but the contour counts {expected}",
        roots=mu, expected=expected, found=int(mult.sum()),
    )


def _spectrum_result(fn, mu, mult, rect, n, expected):
    roots = tuple(
        CharacteristicRoot(complex(m), float(abs(fn(m))), int(k)) for m, k in zip(mu, mult)
    )
    x0, x1, y0, y1 = rect
    window = RootWindow(x0, x1, max(-y0, y1))
    return SpectrumResult(roots, window, int(n), int(expected))


def char_roots(mode, window=None, order=DEFAULT_ORDER, max_order=MAX_ORDER):
    """All characteristic roots of ``mode`` inside ``window``.

    Raises :class:`IncompleteSpectrumError` when doubling the collocation
    order up to ``max_order`` still leaves the count short.
    """
    fn = _as_fn(mode)
    if window is None:
        window = default_window(fn.tau)
    mu, mult, rect, n, expected = _rect_roots(fn, window.rect(), order, max_order)
    return _spectrum_result(fn, mu, mult, rect, n, expected)


def system_roots(A, B, tau, window=None, order=DEFAULT_ORDER, max_order=MAX_ORDER):
    """Same as :func:`char_roots` for a delay system of any dimension."""
    fn = CharacteristicFunction(A, B, tau)
    if window is None:
        window = default_window(tau)
    mu, mult, rect, n, expected = _rect_roots(fn, window.rect(), order, max_order)
    return _spectrum_result(fn, mu, mult, rect, n, expected)


# ---------------------------------------------------------------------------
# spectral abscissa

def _right_half_bound(fn, x0):
    """Upper bound on ``|mu|`` for roots with ``Re mu >= x0`` (2x2 only)."""
    if fn.d != 2:
        return math.inf
    a11, a12, a21, a22 = fn._a
    b11, b12, b21, b22 = fn._b
    p1 = abs(a11 + a22)
    p0 = abs(a11 * a22 - a12 * a21)
    q1 = abs(fn.dc1)
    q0 = abs(b11 * a22 + b22 * a11 - a12 * b21 - b12 * a21)
    zmax = math.exp(min(-x0 * fn.tau, 700.0))
    a = p1 + q1 * zmax
    b = p0 + q0 * zmax + abs(fn.c2) * zmax * zmax
    return 0.5 * (a + math.sqrt(a * a + 4 * b))


def rightmost_roots(mode, window_hint=None, seeds=None, order=32, max_order=MAX_ORDER, keep=1.0):
    """Spectral abscissa together with the roots within ``keep`` of it.

    ``seeds`` (e.g. roots of a nearby parameter point) are tried first; the
    collocation seeding is only used when the seeds do not pass the guard.
    """
    fn = _as_fn(mode)
    window = window_hint or default_window(fn.tau)
    if fn.tau == 0.0:
        ev = np.linalg.eigvals(fn.A + fn.B)
        lam = float(np.max(ev.real))
        return lam, ev[ev.real >= lam - keep]
    x_lo = window.re_min
    pool = np.zeros(0, dtype=complex)
    if seeds is not None and np.size(seeds):
        r = _newton(fn, np.asarray(seeds, dtype=complex))
        pool = r[_accept(fn, r)]
    n = order
    used_generator = False
    for _ in range(64):
        # complex gains break conjugate symmetry and the rightmost root may
        # sit above the window, so candidates are not filtered by Im mu
        cand = pool[pool.real >= x_lo]
        if cand.size:
            lam = float(cand.real.max())
            x0 = lam + 1e-6 * (1.0 + abs(lam))
            bound = _right_half_bound(fn, x0)
            im = max(window.im_max, float(np.abs(cand[cand.real >= lam - 1.0].imag).max()) + 1.0)
            if bound + 1.0 <= 4.0 * window.im_max:
                im = max(im, bound + 1.0)
            re_hi = max(window.re_max, lam + 1.0)
            if x0 >= 0:
                re_hi = max(re_hi, min(bound + 1.0, 1e6))
            count, _ = _count(fn, (x0, re_hi, -im, im))
            if count == 0:
                mu, _ = _merge(cand[cand.real >= lam - keep])
                return lam, _symmetrize(fn, mu)
        if used_generator and n > max_order:
            if cand.size == 0 and x_lo > window.re_min - 64:
                x_lo -= max(1.0, abs(x_lo))
                n = order
                continue
            raise IncompleteSpectrumError(
                "rightmost root not confirmed by the contour guard",
                roots=cand, expected=None, found=cand.size,
            )
        ev = _generator_eigenvalues(fn, n)
        ev = ev[(ev.real >= x_lo - 1.0) & (np.abs(ev.imag) <= 4.0 * window.im_max + 1.0)]
        r = _newton(fn, ev)
        pool = np.concatenate([pool, r[_accept(fn, r)]])
        if used_generator:
            n *= 2
        used_generator = True
        if cand.size == 0 and pool[(pool.real >= x_lo)].size == 0:
            n *= 2
    raise IncompleteSpectrumError("rightmost root search did not terminate")


def lambda_max(mode, window_hint=None, seeds=None):
    """Largest real part among the characteristic roots of ``mode``."""
    return rightmost_roots(mode, window_hint, seeds=seeds)[0]


# ---------------------------------------------------------------------------
# instantaneous part

def instantaneous_spectrum(mode, tol=MARGINAL_TOL):
    """Eigenvalues of ``A`` split into ``(unstable, marginal)``.

    Unstable means ``Re > tol``; marginal means ``|Re| <= tol``.
    """
    A = mode.A if isinstance(mode, ModeSystem) else np.asarray(mode)
    ev = np.linalg.eigvals(A)
    return ev[ev.real > tol], ev[np.abs(ev.real) <= tol]


def strongly_unstable_spectrum(mode):
    """Eigenvalues of the instantaneous matrix ``A`` with positive real part."""
    return instantaneous_spectrum(mode)[0]


def delay_channel_zeros(mode):
    """Zeros of the coefficient of ``exp(-mu tau)`` in a rank-one 2x2 mode.

    Writing the characteristic function as ``c0(mu) + c1(mu) exp(-mu tau)``,
    roots in the open left half plane accumulate at the zeros of ``c1`` as
    the delay grows (the equation there reads ``c1 = -c0 exp(mu tau)``), so
    these roots are not described by the asymptotic continuous spectrum.
    Returns the zeros with negative real part.
    """
    fn = _as_fn(mode)
    if fn.d != 2 or fn.rank != 1:
        return np.zeros(0, dtype=complex)
    c1_at_0 = complex(fn._c1(0.0))
    if fn.dc1 == 0:
        return np.zeros(0, dtype=complex)
    z = -c1_at_0 / fn.dc1
    return np.array([z]) if z.real < 0 else np.zeros(0, dtype=complex)
