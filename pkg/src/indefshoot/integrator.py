"""Adaptive integration of the planar shooting system.

The state is (x, y) = (u, u'); the field is x' = y,
y' = -(lam*a+(t) - mu*a-(t)) * g(x) with g extended by zero outside
[0, 1], so every solution is global.  Backward requests integrate the
time-reversed field forward; weight nodes are mandatory step endpoints.
Crossings of the strip edges x=0 and x=1 are located on the dense
quartic and recorded, never used to stop.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from .errors import AdmissibilityError, NumericsError, StiffnessError
from .model import NonlinearitySpec, ParameterPair, WeightSpec


@dataclass(frozen=True)
class PhasePoint:
    """A phase-plane state (value, slope)."""

    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise AdmissibilityError("phase points must be finite")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y])


@dataclass(frozen=True)
class IntegratorConfig:
    """Step-control and event-localization tolerances."""

    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_step: float = math.inf
    event_tol: float = 1e-12

    def __post_init__(self):
        if self.rel_tol < 1e-13:
            raise AdmissibilityError("rel_tol below 1e-13 is not supported")
        for name in ("rel_tol", "abs_tol", "max_step", "event_tol"):
            if not getattr(self, name) > 0.0:
                raise AdmissibilityError(f"{name} must be positive")


DEFAULT_CONFIG = IntegratorConfig()


@dataclass
class CrossingEvent:
    """A located crossing of x=0 or x=1.

    `direction` is the sign of dx along the traversal (the integration
    parameter), which runs opposite to physical time on backward runs.
    """

    t: float
    level: float
    direction: int


@dataclass
class Trajectory:
    """Dense-output solution of one integration run.

    Effectively immutable; `eval` interpolates anywhere between the
    endpoints with the stored quartic step polynomials.
    """

    t_start: float
    t_end: float
    s_grid: np.ndarray            # accepted-step parameters, ascending from 0
    states: np.ndarray            # (n+1, 2) states at s_grid
    dense_q: np.ndarray           # (n, 2, 4) interpolant coefficients
    events: list[CrossingEvent] = field(default_factory=list)

    @property
    def direction(self) -> float:
        return 1.0 if self.t_end >= self.t_start else -1.0

    @property
    def t_grid(self) -> np.ndarray:
        return self.t_start + self.direction * self.s_grid

    @property
    def endpoint(self) -> PhasePoint:
        return PhasePoint(float(self.states[-1, 0]), float(self.states[-1, 1]))

    def eval(self, t):
        """Interpolated (x, y) at scalar or array times inside the run."""
        ts = np.atleast_1d(np.asarray(t, dtype=float))
        s = self.direction * (ts - self.t_start)
        L = self.s_grid[-1]
        if np.any(s < -1e-9 * (1 + L)) or np.any(s > L * (1 + 1e-12) + 1e-9):
            raise AdmissibilityError("evaluation time outside the trajectory span")
        s = np.clip(s, 0.0, L)
        idx = np.clip(np.searchsorted(self.s_grid, s, side="right") - 1,
                      0, len(self.s_grid) - 2)
        s_lo = self.s_grid[idx]
        h = self.s_grid[idx + 1] - s_lo
        th = (s - s_lo) / h
        q = self.dense_q[idx]                     # (m, 2, 4)
        poly = q[:, :, 3]
        for k in (2, 1, 0):
            poly = poly * th[:, None] + q[:, :, k]
        out = self.states[idx] + (h * th)[:, None] * poly
        return out[0] if np.ndim(t) == 0 else out

    def __call__(self, t):
        return self.eval(t)

    def to_csv(self, path, provenance: str | None = None):
        """Accepted steps as rows t,x,y with 17 significant digits."""
        rows = ["t,x,y"]
        if provenance:
            rows.insert(0, f"# {provenance}")
        for t, (x, y) in zip(self.t_grid, self.states):
            rows.append(f"{t:.17g},{x:.17g},{y:.17g}")
        with open(path, "w") as fh:
            fh.write("\n".join(rows) + "\n")


@dataclass
class BatchMapResult:
    """States of a batch of initial points carried to one or more section
    times, with first strip-exit bookkeeping."""

    sections: np.ndarray        # (k,) section times, traversal order
    states: np.ndarray          # (n, k, 2)
    exit_code: np.ndarray       # (n,) 0 interior, -1 left exit, +1 right exit
    exit_time: np.ndarray       # (n,) physical time of first exit (nan if none)
    n_steps: np.ndarray         # (n,) accepted+rejected step attempts

    def exited_before(self, j: int) -> np.ndarray:
        """Mask of points whose first exit happens on or before section j."""
        s = self.sections[j]
        t0 = self._t_from
        d = 1.0 if self.sections[-1] >= t0 else -1.0
        return (self.exit_code != 0) & (d * (self.exit_time - t0)
                                        <= d * (s - t0) + 1e-12)

    _t_from: float = 0.0


def _check_span(w: WeightSpec, t0: float, t1: float):
    T = w.duration
    if not (-1e-12 <= t0 <= T + 1e-12 and -1e-12 <= t1 <= T + 1e-12):
        raise AdmissibilityError(f"times must lie in [0, {T}]")


def _raise_status(status: int, t0: float, d: float, fail_s: float):
    if status == K.STEP_UNDERFLOW:
        raise StiffnessError(t0 + d * fail_s)
    if status == K.STEP_LIMIT:
        raise NumericsError(f"step limit exceeded near t={t0 + d * fail_s:.12g}")


def integrate(w: WeightSpec, gspec: NonlinearitySpec, p: ParameterPair,
              t0: float, t1: float, start: PhasePoint,
              cfg: IntegratorConfig = DEFAULT_CONFIG) -> Trajectory:
    """Dense trajectory from `start` at t0 to t1 (backward when t1 < t0)."""
    _check_span(w, t0, t1)
    if t0 == t1:
        raise AdmissibilityError("t0 and t1 must differ; use poincare_map for t0 == t1")
    L = abs(t1 - t0)
    d = 1.0 if t1 >= t0 else -1.0
    (status, fail_s, _rec, _ec, _es, _nst, S, Y, Q, EV) = K.integrate_core(
        t0, t1, start.x, start.y, p.lam, p.mu,
        *w._packed, *gspec._packed,
        cfg.rel_tol, cfg.abs_tol, cfg.max_step, cfg.event_tol,
        np.array([L]), True)
    _raise_status(status, t0, d, fail_s)
    events = [CrossingEvent(t=t0 + d * e[0], level=e[1], direction=int(e[2]))
              for e in EV]
    return Trajectory(t_start=t0, t_end=t1, s_grid=S, states=Y, dense_q=Q,
                      events=events)


def poincare_map(w: WeightSpec, gspec: NonlinearitySpec, p: ParameterPair,
                 t_from: float, t_to: float, pt: PhasePoint,
                 cfg: IntegratorConfig = DEFAULT_CONFIG) -> PhasePoint:
    """Carry one phase point from t_from to t_to."""
    _check_span(w, t_from, t_to)
    if t_from == t_to:
        return pt
    L = abs(t_to - t_from)
    d = 1.0 if t_to >= t_from else -1.0
    (status, fail_s, rec, _ec, _es, _nst, _S, _Y, _Q, _EV) = K.integrate_core(
        t_from, t_to, pt.x, pt.y, p.lam, p.mu,
        *w._packed, *gspec._packed,
        cfg.rel_tol, cfg.abs_tol, cfg.max_step, cfg.event_tol,
        np.array([L]), False)
    _raise_status(status, t_from, d, fail_s)
    return PhasePoint(float(rec[-1, 0]), float(rec[-1, 1]))


def poincare_map_batch(w: WeightSpec, gspec: NonlinearitySpec, p: ParameterPair,
                       t_from: float, t_to: float, pts: np.ndarray,
                       cfg: IntegratorConfig = DEFAULT_CONFIG,
                       sections=None) -> BatchMapResult:
    """Carry many phase points at once; optional intermediate sections
    (monotone from t_from toward t_to) are recorded exactly."""
    _check_span(w, t_from, t_to)
    pts = np.ascontiguousarray(np.atleast_2d(np.asarray(pts, dtype=float)))
    if pts.shape[1] != 2:
        raise AdmissibilityError("pts must be an (n, 2) array")
    if not np.all(np.isfinite(pts)):
        raise AdmissibilityError("phase points must be finite")
    d = 1.0 if t_to >= t_from else -1.0
    if sections is None:
        secs = np.array([t_to], dtype=float)
    else:
        secs = np.asarray(sections, dtype=float)
        if secs.ndim != 1 or secs.size == 0:
            raise AdmissibilityError("sections must be a nonempty 1-d sequence")
        if np.any(d * np.diff(secs) <= 0):
            raise AdmissibilityError("sections must be strictly monotone toward t_to")
        if abs(secs[-1] - t_to) > 1e-12:
            secs = np.append(secs, t_to)
        _check_span(w, secs[0], secs[-1])
    s_record = np.ascontiguousarray(d * (secs - t_from))
    if np.any(s_record < -1e-12):
        raise AdmissibilityError("sections must lie between t_from and t_to")

    stat, fs, rec, code, es, nst = K.map_batch_core(
        t_from, t_to, pts, p.lam, p.mu,
        *w._packed, *gspec._packed,
        cfg.rel_tol, cfg.abs_tol, cfg.max_step, cfg.event_tol, s_record)
    bad = np.nonzero(stat != K.OK)[0]
    if bad.size:
        i = int(bad[0])
        _raise_status(int(stat[i]), t_from, d, float(fs[i]))
    res = BatchMapResult(sections=secs, states=rec, exit_code=code,
                         exit_time=t_from + d * es, n_steps=nst)
    res._t_from = t_from
    return res
