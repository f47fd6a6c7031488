"""Worldlines, branch pairs, and causal structure on flat spacetime.

Conventions used throughout the package: metric signature (+, -, -, -),
natural units (c = 1), lab time as the worldline parameter.  A point
charge q moving on X(t) carries the four-current density

    J^mu(t, x) = q * (1, dX/dt) * delta^3(x - X(t)),

so every four-dimensional current integral collapses to a one-dimensional
integral over lab time.  The classes here only describe the geometry;
field kernels and phase/dephasing functionals live in sibling modules.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np
from scipy.interpolate import CubicSpline

__all__ = [
    "Event",
    "OutOfDomainError",
    "StaticPath",
    "SplitPath",
    "SampledPath",
    "Worldline",
    "BranchPair",
    "Violation",
    "Separation",
    "interval_class",
    "current_sample",
    "make_split_path",
    "make_branch_pair",
    "validate_branch_pair",
    "causal_margin",
    "Scenario",
]

#: Default absolute tolerance on the squared interval when classifying
#: separations as lightlike.
LIGHTCONE_EPS = 1e-9


class OutOfDomainError(ValueError):
    """Raised when a worldline is sampled outside its time window."""


@dataclass(frozen=True)
class Event:
    """A spacetime point (t, x, y, z)."""

    t: float
    x: float
    y: float
    z: float

    def as_array(self) -> np.ndarray:
        return np.array([self.t, self.x, self.y, self.z], dtype=float)

    @staticmethod
    def from_array(a: Sequence[float]) -> "Event":
        t, x, y, z = (float(v) for v in a)
        return Event(t, x, y, z)


def _event_array(e) -> np.ndarray:
    """Accept an Event or any length-4 sequence and return ndarray(4)."""
    if isinstance(e, Event):
        return e.as_array()
    a = np.asarray(e, dtype=float)
    if a.shape != (4,):
        raise ValueError(f"expected a length-4 event, got shape {a.shape}")
    return a


class Separation(NamedTuple):
    """Causal classification of an event pair with its squared interval."""

    kind: str
    s2: float


def interval_class(a, b, eps: float = LIGHTCONE_EPS) -> Separation:
    """Classify the separation of two events.

    Returns ("timelike" | "spacelike" | "lightlike", s2) with the squared
    interval s2 = dt^2 - |dx|^2 and an absolute tolerance band of ``eps``
    around the light cone.
    """
    da = _event_array(a) - _event_array(b)
    s2 = float(da[0] ** 2 - da[1:] @ da[1:])
    if abs(s2) <= eps:
        return Separation("lightlike", s2)
    return Separation("timelike" if s2 > 0.0 else "spacelike", s2)


def _smoothstep(u: np.ndarray) -> np.ndarray:
    """Quintic smoothstep 6u^5 - 15u^4 + 10u^3 on [0, 1], C^2 at both ends."""
    u = np.clip(u, 0.0, 1.0)
    return u * u * u * (u * (6.0 * u - 15.0) + 10.0)


def _smoothstep_rate(u: np.ndarray) -> np.ndarray:
    """Derivative 30 u^2 (1-u)^2 of the quintic smoothstep (zero outside [0,1])."""
    inside = (u > 0.0) & (u < 1.0)
    uc = np.clip(u, 0.0, 1.0)
    return np.where(inside, 30.0 * uc * uc * (1.0 - uc) * (1.0 - uc), 0.0)


class StaticPath:
    """A path that never moves."""

    def __init__(self, point: Sequence[float]):
        self.point = np.asarray(point, dtype=float).reshape(3)

    def position(self, ts: np.ndarray) -> np.ndarray:
        ts = np.asarray(ts, dtype=float)
        return np.broadcast_to(self.point, ts.shape + (3,)).copy()

    def velocity(self, ts: np.ndarray) -> np.ndarray:
        ts = np.asarray(ts, dtype=float)
        return np.zeros(ts.shape + (3,))

    def knots(self) -> list[float]:
        return []


class SplitPath:
    """Smooth excursion along a fixed axis: rest, ramp out, hold, ramp back.

    The displacement is ``amplitude * s(t)`` along ``axis`` where s rises
    from 0 to 1 over [t0, t0 + ramp] through the quintic smoothstep, stays
    at 1 for ``hold``, and returns to 0 over another ``ramp``.  The profile
    is C^2 in time, so the current it generates has no kinks.  Peak speed
    is |amplitude| * 15 / (8 * ramp), reached mid-ramp.
    """

    def __init__(self, base, axis, amplitude: float, t0: float, ramp: float, hold: float):
        if ramp <= 0.0:
            raise ValueError("ramp must be positive")
        if hold < 0.0:
            raise ValueError("hold must be non-negative")
        self.base = np.asarray(base, dtype=float).reshape(3)
        axis = np.asarray(axis, dtype=float).reshape(3)
        norm = math.sqrt(float(axis @ axis))
        if norm == 0.0:
            raise ValueError("axis must be a nonzero vector")
        self.axis = axis / norm
        self.amplitude = float(amplitude)
        self.t0 = float(t0)
        self.ramp = float(ramp)
        self.hold = float(hold)

    @property
    def t_end(self) -> float:
        return self.t0 + 2.0 * self.ramp + self.hold

    def displacement(self, ts: np.ndarray) -> np.ndarray:
        ts = np.asarray(ts, dtype=float)
        up = _smoothstep((ts - self.t0) / self.ramp)
        down = _smoothstep((ts - self.t0 - self.ramp - self.hold) / self.ramp)
        return self.amplitude * (up - down)

    def displacement_rate(self, ts: np.ndarray) -> np.ndarray:
        ts = np.asarray(ts, dtype=float)
        up = _smoothstep_rate((ts - self.t0) / self.ramp)
        down = _smoothstep_rate((ts - self.t0 - self.ramp - self.hold) / self.ramp)
        return self.amplitude * (up - down) / self.ramp

    def position(self, ts: np.ndarray) -> np.ndarray:
        d = self.displacement(ts)
        return self.base + d[..., None] * self.axis

    def velocity(self, ts: np.ndarray) -> np.ndarray:
        r = self.displacement_rate(ts)
        return r[..., None] * self.axis

    def knots(self) -> list[float]:
        return [
            self.t0,
            self.t0 + self.ramp,
            self.t0 + self.ramp + self.hold,
            self.t_end,
        ]


class SampledPath:
    """Cubic-spline interpolation through sampled positions.

    The spline is clamped (zero velocity) at both ends so that a static
    extension beyond the sample range keeps the velocity continuous.
    Outside the sampled interval the path holds its endpoint value.
    """

    def __init__(self, times: Sequence[float], points: Sequence[Sequence[float]]):
        times = np.asarray(times, dtype=float)
        points = np.asarray(points, dtype=float)
        if times.ndim != 1 or times.size < 2:
            raise ValueError("need at least two sample times")
        if points.shape != (times.size, 3):
            raise ValueError("points must have shape (len(times), 3)")
        if np.any(np.diff(times) <= 0.0):
            raise ValueError("sample times must be strictly increasing")
        self.times = times
        self.points = points
        self._spline = CubicSpline(times, points, axis=0, bc_type="clamped")
        self._deriv = self._spline.derivative()

    def position(self, ts: np.ndarray) -> np.ndarray:
        ts = np.asarray(ts, dtype=float)
        tc = np.clip(ts, self.times[0], self.times[-1])
        return self._spline(tc)

    def velocity(self, ts: np.ndarray) -> np.ndarray:
        ts = np.asarray(ts, dtype=float)
        tc = np.clip(ts, self.times[0], self.times[-1])
        v = self._deriv(tc)
        inside = (ts >= self.times[0]) & (ts <= self.times[-1])
        return np.where(inside[..., None], v, 0.0)

    def knots(self) -> list[float]:
        return list(self.times)


@dataclass(frozen=True)
class Worldline:
    """A charged point particle on a finite lab-time window.

    ``extend`` controls what the particle does outside ``window``:
    "static" means it sits at the frozen endpoint position forever (the
    usual choice, so retarded fields have sources at all times), "none"
    means the current simply does not exist there.
    """

    charge: float
    window: tuple[float, float]
    path: object
    extend: str = "static"

    def __post_init__(self):
        t0, t1 = self.window
        if not t1 > t0:
            raise ValueError("window must satisfy t_start < t_end")
        if self.extend not in ("static", "none"):
            raise ValueError("extend must be 'static' or 'none'")

    def position(self, ts) -> np.ndarray:
        """Spatial position, applying the static extension outside the window."""
        ts = np.asarray(ts, dtype=float)
        tc = np.clip(ts, self.window[0], self.window[1])
        return self.path.position(tc)

    def velocity(self, ts) -> np.ndarray:
        """Velocity; identically zero outside the window (frozen endpoints)."""
        ts = np.asarray(ts, dtype=float)
        tc = np.clip(ts, self.window[0], self.window[1])
        v = self.path.velocity(tc)
        inside = (ts >= self.window[0]) & (ts <= self.window[1])
        return np.where(inside[..., None], v, 0.0)

    def knots(self) -> list[float]:
        lo, hi = self.window
        ks = [k for k in self.path.knots() if lo < k < hi]
        return sorted({lo, *ks, hi})


def current_sample(worldline: Worldline, t: float) -> tuple[np.ndarray, np.ndarray]:
    """Position and four-current amplitude q*(1, v) of a worldline at lab time t.

    Raises OutOfDomainError when t falls outside the worldline's window;
    the windowed current is only defined there, independent of how the
    field solver extends the source.
    """
    t0, t1 = worldline.window
    if not (t0 <= t <= t1):
        raise OutOfDomainError(f"t={t} outside worldline window [{t0}, {t1}]")
    pos = worldline.path.position(np.asarray(t, dtype=float))
    vel = worldline.path.velocity(np.asarray(t, dtype=float))
    four_current = worldline.charge * np.concatenate(([1.0], np.asarray(vel).reshape(3)))
    return np.asarray(pos).reshape(3), four_current


def make_split_path(
    L: float,
    t0: float,
    ramp: float,
    hold: float,
    *,
    charge: float = 1.0,
    base: Sequence[float] = (0.0, 0.0, 0.0),
    axis: Sequence[float] = (0.0, 1.0, 0.0),
    orientation: float = 1.0,
    window: tuple[float, float] | None = None,
) -> Worldline:
    """One branch of a two-path split: displaced by orientation * L/2 during the hold.

    The particle rests at ``base`` before t0, moves out along ``axis`` to a
    displacement of ``orientation * L/2`` over ``ramp``, holds for ``hold``,
    and returns by ``t0 + 2*ramp + hold``.  Rejects parameter sets whose
    peak speed 15 L / (16 ramp) would reach the speed of light.
    """
    if L < 0.0:
        raise ValueError("L must be non-negative")
    vmax = 15.0 * L / (16.0 * ramp)
    if vmax >= 1.0:
        raise ValueError(
            f"peak speed 15*L/(16*ramp) = {vmax:.6g} is not below 1; "
            "increase ramp or reduce L"
        )
    path = SplitPath(base, axis, orientation * L / 2.0, t0, ramp, hold)
    if window is None:
        window = (t0 - ramp, path.t_end + ramp)
    if not (window[0] <= t0 and path.t_end <= window[1]):
        raise ValueError("window must contain the whole excursion")
    return Worldline(charge=charge, window=window, path=path)


@dataclass(frozen=True)
class BranchPair:
    """Two worldline branches of one particle in superposition.

    The branches must share charge and window and coincide (in position
    and velocity) outside ``split_window``, the interior interval where
    the superposition is spatially open.  By convention the right branch
    carries amplitude sign +1 and the left branch -1 in every branch
    difference built from the pair.
    """

    label: str
    right: Worldline
    left: Worldline
    split_window: tuple[float, float]

    @property
    def charge(self) -> float:
        return self.right.charge

    @property
    def window(self) -> tuple[float, float]:
        return self.right.window

    def branches(self) -> tuple[tuple[Worldline, float], tuple[Worldline, float]]:
        """Branch worldlines with their amplitude signs (+1 right, -1 left)."""
        return (self.right, +1.0), (self.left, -1.0)

    def knots(self) -> list[float]:
        return sorted(set(self.right.knots()) | set(self.left.knots()))

    def split_knots(self) -> list[float]:
        a, b = self.split_window
        inner = [k for k in self.knots() if a < k < b]
        return [a, *inner, b]


def make_branch_pair(
    label: str,
    L: float,
    t0: float,
    ramp: float,
    hold: float,
    *,
    charge: float = 1.0,
    base: Sequence[float] = (0.0, 0.0, 0.0),
    axis: Sequence[float] = (0.0, 1.0, 0.0),
    window: tuple[float, float] | None = None,
) -> BranchPair:
    """Symmetric split: right branch at +L/2, left branch at -L/2 along axis."""
    right = make_split_path(
        L, t0, ramp, hold, charge=charge, base=base, axis=axis,
        orientation=+1.0, window=window,
    )
    left = make_split_path(
        L, t0, ramp, hold, charge=charge, base=base, axis=axis,
        orientation=-1.0, window=window,
    )
    split = (t0, t0 + 2.0 * ramp + hold)
    return BranchPair(label=label, right=right, left=left, split_window=split)


@dataclass(frozen=True)
class Violation:
    """One structural problem found while validating a branch pair."""

    code: str
    message: str


def validate_branch_pair(pair: BranchPair, n_check: int = 512) -> list[Violation]:
    """Check the structural contract of a branch pair.

    Returns a list of violations (empty when the pair is well formed):
    charge mismatch, window mismatch, a split window not contained in the
    time window, branch positions or velocities that differ outside the
    split window, and any sampled speed at or above 1.
    """
    out: list[Violation] = []
    if pair.right.charge != pair.left.charge:
        out.append(Violation(
            "ChargeMismatch",
            f"right charge {pair.right.charge} != left charge {pair.left.charge}",
        ))
    if pair.right.window != pair.left.window:
        out.append(Violation(
            "WindowMismatch",
            f"right window {pair.right.window} != left window {pair.left.window}",
        ))
    w0, w1 = pair.right.window
    a, b = pair.split_window
    if not (w0 <= a < b <= w1):
        out.append(Violation(
            "SplitWindowOutsideWindow",
            f"split window [{a}, {b}] not inside time window [{w0}, {w1}]",
        ))
        return out

    ts = np.linspace(w0, w1, n_check)
    for w in (pair.right, pair.left):
        speed = np.linalg.norm(w.velocity(ts), axis=-1).max()
        if speed >= 1.0:
            out.append(Violation(
                "SuperluminalSegment",
                f"sampled speed {speed:.6g} >= 1 on branch of {pair.label}",
            ))
            break

    outside = (ts <= a) | (ts >= b)
    t_out = ts[outside]
    if t_out.size:
        dp = np.linalg.norm(pair.right.position(t_out) - pair.left.position(t_out), axis=-1)
        dv = np.linalg.norm(pair.right.velocity(t_out) - pair.left.velocity(t_out), axis=-1)
        worst = max(dp.max(), dv.max())
        if worst > 1e-12:
            out.append(Violation(
                "CoincidenceViolation",
                f"branches differ by {worst:.3g} outside the split window",
            ))
    return out


def causal_margin(probe: BranchPair, source: BranchPair, n: int = 192) -> float:
    """Lower bound on |x_probe - x_source| - (t_probe - t_source) over split windows.

    Scans all four branch combinations on an n x n grid of (probe time,
    source time) pairs drawn from the two split windows and subtracts a
    Lipschitz safety term (the scanned function changes by at most 2 per
    unit time in either argument, since speeds stay below 1).  A positive
    return value therefore certifies that no event of the source's split
    window lies on or inside the past light cone of any event of the
    probe's split window: the source's branch distinction cannot reach
    the probe there.
    """
    pa, pb = probe.split_window
    sa, sb = source.split_window
    tp = np.linspace(pa, pb, n)
    tsrc = np.linspace(sa, sb, n)
    hp = (pb - pa) / (n - 1)
    hs = (sb - sa) / (n - 1)
    margin = math.inf
    for wp in (probe.right, probe.left):
        xp = wp.position(tp)
        for ws in (source.right, source.left):
            xs = ws.position(tsrc)
            dist = np.linalg.norm(xp[:, None, :] - xs[None, :, :], axis=-1)
            dt = tp[:, None] - tsrc[None, :]
            margin = min(margin, float((dist - dt).min()))
    return margin - 2.0 * max(hp, hs)


@dataclass(frozen=True)
class Scenario:
    """Two branch pairs plus the kernel and windows that define one experiment.

    ``T_A`` and ``T_B`` are the split-window durations of the two pairs,
    ``T`` the common worldline window length, and ``D`` the distance
    between the rest positions.  These are retained for reporting; the
    pairs themselves carry the authoritative geometry.
    """

    pair_A: BranchPair
    pair_B: BranchPair
    kernel: "object"
    D: float
    T: float
    T_A: float
    T_B: float
    background: object | None = None
    meta: dict = field(default_factory=dict)

    @property
    def spacelike(self) -> bool:
        """True when every split-window event of A is spacelike from every one of B.

        Uses the conservative grid bound of :func:`causal_margin` in both
        time orderings, so a True value is a certificate while a False
        value may occasionally be a near miss.
        """
        return causal_margin(self.pair_A, self.pair_B) > 0.0 and \
            causal_margin(self.pair_B, self.pair_A) > 0.0
