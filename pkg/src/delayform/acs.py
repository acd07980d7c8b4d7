"""Asymptotic continuous spectrum and delay-independent universality classes.

For a rank-one delay matrix the generating polynomial
``chi_w(Y) = det[i w I - A - B Y]`` is linear in ``Y``, so the ACS is the
single curve ``gamma(w) = -ln|Y(w)|``.  Crossings of that curve through
``gamma = 0`` solve a quadratic in ``nu = w**2`` and decide whether the
mode is of class 0, I, II or U.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateDelayChannelError,
    InapplicableClassError,
    InternalConsistencyError,
    InvalidParameterError,
    UnsupportedParametersError,
    UnsupportedTopologyError,
)
from .model import (
    CouplingGainVector,
    GainVector,
    ModeSystem,
    ZERO_COUPLING,
    laplacian_eigenvalues,
    mode_system,
)

__all__ = [
    "UniversalityClass",
    "AcsSample",
    "CrossingSet",
    "ClassLabel",
    "SwitchingDelays",
    "SpectrumComposition",
    "generating_root",
    "acs_gamma",
    "acs_curve",
    "crossing_frequencies",
    "classify_mode",
    "classify_gains",
    "switching_delays",
    "predicted_unstable_count",
    "classify_formation",
]

DEFAULT_TOLERANCE = 1e-9
_DOUBLE_ROOT_TOL = 1e-10


class UniversalityClass(enum.Enum):
    ZERO = "0"
    I = "I"
    II = "II"
    U = "U"
    BOUNDARY = "Boundary"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class AcsSample:
    omega: float
    gamma: float
    Y: complex


@dataclass(frozen=True)
class CrossingSet:
    """Positive crossing frequencies (ascending) with their phases in [0, 2 pi)."""

    frequencies: tuple = ()
    phases: tuple = ()
    degenerate: bool = False

    def __len__(self):
        return len(self.frequencies)


@dataclass(frozen=True)
class ClassLabel:
    cls: UniversalityClass
    crossing: CrossingSet
    instantaneous_unstable: bool
    sum_matrix_stable: bool
    margin: float
    gains: GainVector = field(repr=False, default=None)
    lam: float = 0.0

    @property
    def is_boundary(self):
        return self.cls is UniversalityClass.BOUNDARY


def _gains_of(mode):
    g = np.asarray(mode.gains)
    return complex(g[0]), complex(g[1]), complex(g[2]), complex(g[3])


def generating_root(omega, mode):
    """Root ``Y(omega)`` of the (linear) generating polynomial."""
    k0, h0, kt, ht = _gains_of(mode)
    iw = 1j * float(omega)
    den = kt + iw * ht
    if den == 0:
        raise DegenerateDelayChannelError(
            f"delayed feedback vanishes at omega={omega}: k_tau + i omega h_tau = 0"
        )
    Y = -(iw * iw + h0 * iw + k0) / den
    # chi(Y) = det[i w I - A - B Y] should vanish
    chi = np.linalg.det(iw * np.eye(2) - mode.A - mode.B * Y)
    if abs(chi) > 1e-12 * (1.0 + abs(iw) ** 2 + abs(den * Y)):
        raise InternalConsistencyError(f"generating polynomial residual {abs(chi):.3g} at omega={omega}")
    return complex(Y)


def acs_gamma(omega, mode):
    """``gamma(omega) = -ln|Y(omega)|``; ``+inf`` where ``Y`` vanishes."""
    Y = generating_root(omega, mode)
    if Y == 0:
        return math.inf
    return -math.log(abs(Y))


def acs_curve(omegas, mode):
    """Vectorised ACS samples ``(omega, gamma, Y)`` over an array of frequencies."""
    k0, h0, kt, ht = _gains_of(mode)
    w = np.asarray(omegas, dtype=float)
    iw = 1j * w
    den = kt + iw * ht
    if np.any(den == 0):
        raise DegenerateDelayChannelError("delayed feedback vanishes on the frequency grid")
    Y = -(iw * iw + h0 * iw + k0) / den
    with np.errstate(divide="ignore"):
        gamma = -np.log(np.abs(Y))
    return w, gamma, Y


def _phase(omega, mode):
    Y = generating_root(omega, mode)
    return float((-np.angle(Y)) % (2 * np.pi))


def _real_mode(mode):
    g = mode.real_gains() if isinstance(mode, ModeSystem) else None
    if g is None:
        raise UnsupportedParametersError(
            "complex effective gains: the closed-form classification needs real lambda; "
            "use the numerical master stability map instead"
        )
    return g


def _nu_roots(g):
    """Roots of ``nu**2 + b nu + c`` and the discriminant."""
    b = g.h0 ** 2 - 2 * g.k0 - g.h0_tau ** 2
    c = g.k0 ** 2 - g.k0_tau ** 2
    disc = b * b - 4 * c
    if disc < 0:
        return (), disc, b, c
    sq = math.sqrt(disc)
    # numerically stable pair
    q = -0.5 * (b + math.copysign(sq, b)) if b != 0 else 0.5 * sq
    if q == 0:
        roots = (0.0, 0.0) if c == 0 else ()
    else:
        roots = tuple(sorted((q, c / q)))
    return roots, disc, b, c


def crossing_frequencies(mode):
    """Frequencies where the ACS crosses ``gamma = 0`` and their phases."""
    g = _real_mode(mode)
    if g.k0_tau == 0 and g.h0_tau == 0:
        # no delayed feedback: no ACS, the mode is the same for every delay
        return CrossingSet()
    roots, disc, b, _ = _nu_roots(g)
    scale = 1.0 + b * b
    degenerate = abs(disc) < _DOUBLE_ROOT_TOL * scale or any(r == 0 for r in roots)
    pos = sorted({r for r in roots if r > 0})
    if degenerate and len(pos) == 2:
        pos = [0.5 * (pos[0] + pos[1])]
    freqs = tuple(math.sqrt(r) for r in pos)
    phases = tuple(_phase(w, mode) for w in freqs)
    return CrossingSet(freqs, phases, bool(degenerate))


def _instantaneous_unstable(g, tol):
    # roots of mu^2 + h0 mu + k0
    ev = np.roots([1.0, g.h0, g.k0])
    return bool(np.any(ev.real > tol)), bool(np.any(np.abs(ev.real) <= tol))


def _inequality_class(g):
    """Class from the explicit gain inequalities, with relative margins."""
    k0, h0, kt, ht = g.k0, g.h0, g.k0_tau, g.h0_tau
    m1 = (abs(k0) - abs(kt)) / (1.0 + abs(k0) + abs(kt))
    margins = [abs(m1)]
    if abs(k0) < abs(kt):
        return UniversalityClass.I, margins
    c = k0 * k0 - kt * kt
    hm2 = 2 * k0 + ht * ht - 2 * math.sqrt(max(c, 0.0))
    # |h0| < |h0^-| is compared through squares so that an imaginary h0^-
    # (hm2 < 0) never lands inside the class-II region
    m2 = (h0 * h0 - hm2) / (1.0 + h0 * h0 + abs(hm2))
    margins.append(abs(m2))
    if k0 > abs(kt):
        if h0 * h0 < hm2:
            return UniversalityClass.II, margins
        margins.append(abs(h0) / (1.0 + abs(h0)))
        return (UniversalityClass.ZERO if h0 > 0 else UniversalityClass.U), margins
    # k0 < -|kt|
    ratio = abs(kt) / abs(ht) if ht != 0 else math.inf
    if ratio < 1e150:
        # for h0_tau -> 0 the bound tends to -inf, the same as h0_tau = 0
        beta = -((ht / 2) ** 2 + ratio ** 2)
        margins.append(abs(k0 - beta) / (1.0 + abs(k0) + abs(beta)))
        if k0 >= beta and h0 * h0 < hm2:
            return UniversalityClass.II, margins
    return UniversalityClass.U, margins


def _crossing_class(crossing, inst_unstable):
    n = len(crossing)
    if n == 2:
        return UniversalityClass.II
    if n == 1:
        return UniversalityClass.I
    return UniversalityClass.U if inst_unstable else UniversalityClass.ZERO


def classify_mode(p0, pbar=None, lambda_real=0.0, tolerance=DEFAULT_TOLERANCE):
    """Delay-independent class of the mode with real Laplacian eigenvalue ``lambda_real``.

    Two independent routes are evaluated: the closed-form gain inequalities
    and the count of ACS crossings together with the instantaneous spectrum.
    They must agree away from region boundaries; points within ``tolerance``
    (relative) of a boundary are labelled ``Boundary``.
    """
    lam = complex(lambda_real)
    if abs(lam.imag) > 1e-12 * max(1.0, abs(lam)):
        raise UnsupportedParametersError("classify_mode needs a real Laplacian eigenvalue")
    mode = mode_system(p0, pbar, lam.real, 0.0)
    g = _real_mode(mode)
    crossing = crossing_frequencies(mode)
    inst_unstable, inst_marginal = _instantaneous_unstable(g, tolerance)
    sum_stable = (g.k0 + g.k0_tau) > 0 and (g.h0 + g.h0_tau) > 0

    ineq, margins = _inequality_class(g)
    route = _crossing_class(crossing, inst_unstable)
    margin = float(min(margins))
    boundary = margin <= tolerance or crossing.degenerate or (not crossing and inst_marginal)
    if boundary:
        cls = UniversalityClass.BOUNDARY
    else:
        if ineq is not route:
            raise InternalConsistencyError(
                f"gain inequalities give class {ineq} but the crossing count gives {route} "
                f"for effective gains {g}"
            )
        cls = ineq
    return ClassLabel(cls, crossing, inst_unstable, bool(sum_stable), margin, g, lam.real)


def classify_gains(gains, tolerance=DEFAULT_TOLERANCE):
    """Shortcut: class of an uncoupled mode with gains ``(k0, h0, k0_tau, h0_tau)``."""
    return classify_mode(gains, None, 0.0, tolerance)


@dataclass(frozen=True)
class SwitchingDelays:
    """Delays at which a root pair crosses the imaginary axis.

    ``base_unstable`` is the number of unstable roots at ``tau = 0``, taken
    from the eigenvalues of ``A + B``; each destabilizing delay adds two,
    each stabilizing delay removes two.
    """

    destabilizing: tuple
    stabilizing: tuple
    horizon: float
    base_unstable: int = 0

    def unstable_count(self, tau):
        return predicted_unstable_count(self, tau)

    def stable_windows(self):
        """Open delay intervals on which the predicted unstable count is zero."""
        events = sorted(
            [(t, +2) for t in self.destabilizing if t > 0]
            + [(t, -2) for t in self.stabilizing if t > 0]
        )
        n = self.base_unstable + 2 * sum(1 for t in self.destabilizing if t == 0)
        out = []
        start = 0.0 if n == 0 else None
        for t, dn in events:
            n += dn
            if n == 0 and start is None:
                start = t
            elif n != 0 and start is not None:
                if t > start:
                    out.append((start, t))
                start = None
        if start is not None and start < self.horizon:
            out.append((start, self.horizon))
        return out


def predicted_unstable_count(sd, tau):
    """Unstable root count at delay ``tau`` implied by the switching sequences."""
    n = sd.base_unstable
    n += 2 * sum(1 for t in sd.destabilizing if t <= tau)
    n -= 2 * sum(1 for t in sd.stabilizing if t < tau)
    return max(n, 0)


def _sequence(omega, phi, horizon):
    out = []
    j = 0
    while True:
        t = (phi + 2 * math.pi * j) / omega
        if t > horizon:
            break
        out.append(t)
        j += 1
    return tuple(out)


def switching_delays(label, horizon):
    """Destabilizing and stabilizing delays up to ``horizon`` for class I/II."""
    horizon = float(horizon)
    if not (horizon >= 0 and math.isfinite(horizon)):
        raise InvalidParameterError("horizon must be finite and >= 0")
    if label.cls not in (UniversalityClass.I, UniversalityClass.II):
        raise InapplicableClassError(f"switching delays need class I or II, got {label.cls}")
    fr, ph = label.crossing.frequencies, label.crossing.phases
    g = label.gains
    ev = np.roots([1.0, g.h0 + g.h0_tau, g.k0 + g.k0_tau])
    base = int(np.sum(ev.real > 0))
    if label.cls is UniversalityClass.I:
        return SwitchingDelays(_sequence(fr[0], ph[0], horizon), (), horizon, base)
    # larger frequency destabilizes, smaller one stabilizes
    return SwitchingDelays(
        _sequence(fr[1], ph[1], horizon), _sequence(fr[0], ph[0], horizon), horizon, base
    )


@dataclass(frozen=True)
class SpectrumComposition:
    """Mode-by-mode class structure of a coupled formation."""

    counts: dict
    labels: tuple  # (lambda, ClassLabel) pairs in Laplacian eigenvalue order
    boundary_count: int
    absolutely_stable: bool
    has_class_u: bool

    def structure(self):
        c = self.counts
        return f"0_{c['0']} I_{c['I']} II_{c['II']} U_{c['U']}"


def classify_formation(p0, pbar, topology, tolerance=DEFAULT_TOLERANCE):
    """Class of every transverse mode and the resulting composition counts."""
    if pbar is None:
        pbar = ZERO_COUPLING
    if not isinstance(p0, GainVector):
        p0 = GainVector.from_sequence(p0)
    if not isinstance(pbar, CouplingGainVector):
        pbar = CouplingGainVector.from_sequence(pbar)
    lams = laplacian_eigenvalues(topology)
    if np.any(np.abs(lams.imag) > 1e-9):
        raise UnsupportedTopologyError(
            "Laplacian has complex eigenvalues; use the master stability map"
        )
    labels = []
    counts = {"0": 0, "I": 0, "II": 0, "U": 0}
    nb = 0
    for lam in lams.real:
        lab = classify_mode(p0, pbar, float(lam), tolerance)
        labels.append((float(lam), lab))
        if lab.cls is UniversalityClass.BOUNDARY:
            nb += 1
        else:
            counts[lab.cls.value] += 1
    absolutely = all(
        lab.cls is UniversalityClass.ZERO and lab.sum_matrix_stable for _, lab in labels
    )
    has_u = any(lab.cls is UniversalityClass.U for _, lab in labels)
    return SpectrumComposition(counts, tuple(labels), nb, absolutely, has_u)
