"""Problem data: sign-alternating weights, hump nonlinearities, and the
closed-form parameter thresholds.

A weight a(t) on [0, T] alternates sign across its interior nodes,
starting and ending with a positivity interval; the effective coefficient
is lam*max(a,0) - mu*max(-a,0).  The nonlinearity g lives on [0,1] with
g(0) = g(1) = 0, g > 0 inside, g(s)/s -> 0 at 0+, and is extended by zero
outside [0,1].  Both are immutable after construction and every operation
here is a pure function.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.integrate import quad

from . import _kernels as K
from .errors import AdmissibilityError

_QUAD_OPTS = dict(epsabs=1e-13, epsrel=1e-10, limit=200)
_EMPTY_F = np.empty(0)
_EMPTY_I = np.empty(0, dtype=np.int64)
_EMPTY_P = np.empty((0, 10))

_SEG_KIND_CODES = {"const": K.SEG_CONST, "sine": K.SEG_SINE, "poly": K.SEG_POLY}


def _golden_min(f, a, b, xtol=1e-12):
    """Golden-section minimum of f on [a, b]."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc = f(c)
    fd = f(d)
    while b - a > xtol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    xm = 0.5 * (a + b)
    return xm, f(xm)


def _scan_refine_min(f, lo, hi, n=4096):
    """Grid scan plus golden-section refinement; ties break to smallest s."""
    s = np.linspace(lo, hi, n)
    vals = np.asarray(f(s))
    i = int(np.argmin(vals))
    a = s[max(i - 1, 0)]
    b = s[min(i + 1, n - 1)]
    xm, fm = _golden_min(lambda x: float(f(x)), a, b)
    if fm < vals[i]:
        return float(xm), float(fm)
    return float(s[i]), float(vals[i])


@dataclass(frozen=True, eq=False)
class WeightSpec:
    """A sign-alternating weight on [0, duration].

    `nodes` are the interior sign-change points; the segments they cut out
    alternate sign starting positive.  Evaluation kinds: the global sine
    wave sin(pi*t), a sampled table with linear interpolation, or named
    closed-form pieces per segment.
    """

    kind: str
    duration: float
    nodes: tuple = ()
    segments: tuple = ()
    table_t: np.ndarray | None = None
    table_a: np.ndarray | None = None
    _packed: tuple = field(init=False, repr=False)

    # -- constructors --------------------------------------------------

    @classmethod
    def sin_pi(cls, duration: float) -> "WeightSpec":
        """a(t) = sin(pi t) on [0, duration]; duration must be an odd
        integer so the weight ends on a positivity interval."""
        n = int(round(duration))
        if abs(duration - n) > 1e-9 or n < 1 or n % 2 == 0:
            raise AdmissibilityError(
                "sin_pi weight needs an odd integer duration (ends positive)")
        return cls(kind="sin_pi", duration=float(n),
                   nodes=tuple(float(k) for k in range(1, n)))

    @classmethod
    def from_table(cls, t, a, nodes) -> "WeightSpec":
        t = np.ascontiguousarray(t, dtype=float)
        a = np.ascontiguousarray(a, dtype=float)
        if t.ndim != 1 or t.shape != a.shape or t.size < 2:
            raise AdmissibilityError("table weight needs matching 1-d t/a arrays")
        if np.any(np.diff(t) <= 0):
            raise AdmissibilityError("table abscissae must be strictly increasing")
        return cls(kind="table", duration=float(t[-1] - t[0]),
                   nodes=tuple(float(v) for v in nodes),
                   table_t=t - t[0], table_a=a)

    @classmethod
    def piecewise(cls, duration, nodes, segments) -> "WeightSpec":
        """Closed-form segments between consecutive breakpoints.  Each
        segment is ("const", c), ("sine", amp) or ("poly", (c0, c1, ...))."""
        segs = []
        for sg in segments:
            kind = sg[0]
            if kind not in _SEG_KIND_CODES:
                raise AdmissibilityError(f"unknown segment kind {kind!r}")
            segs.append((kind,) + tuple(sg[1:]))
        return cls(kind="piecewise", duration=float(duration),
                   nodes=tuple(float(v) for v in nodes), segments=tuple(segs))

    # -- validation & packing -------------------------------------------

    def __post_init__(self):
        T = self.duration
        if not (T > 0.0 and math.isfinite(T)):
            raise AdmissibilityError("duration must be positive and finite")
        nd = np.asarray(self.nodes, dtype=float)
        if nd.size and (np.any(np.diff(nd) <= 0) or nd[0] <= 0 or nd[-1] >= T):
            raise AdmissibilityError(
                "nodes must be strictly increasing and inside ]0, T[")
        if nd.size % 2 != 0:
            raise AdmissibilityError(
                "node count must be even: the weight starts and ends on a "
                "positivity interval")

        full = np.concatenate(([0.0], nd, [T]))
        if self.kind == "sin_pi":
            packed = (np.int64(K.W_SIN_PI), np.ascontiguousarray(full),
                      _EMPTY_I, _EMPTY_P, _EMPTY_F, _EMPTY_F)
        elif self.kind == "table":
            t = self.table_t
            a = self.table_a
            if t is None or a is None:
                raise AdmissibilityError("table weight is missing its samples")
            if t[0] > 1e-12 or t[-1] < T - 1e-12:
                raise AdmissibilityError("table must cover the full interval [0, T]")
            if not (np.all(np.isfinite(t)) and np.all(np.isfinite(a))):
                raise AdmissibilityError("table values must be finite")
            packed = (np.int64(K.W_TABLE), np.ascontiguousarray(full),
                      _EMPTY_I, _EMPTY_P,
                      np.ascontiguousarray(t), np.ascontiguousarray(a))
        elif self.kind == "piecewise":
            nseg = full.size - 1
            if len(self.segments) != nseg:
                raise AdmissibilityError(
                    f"piecewise weight needs {nseg} segments, got {len(self.segments)}")
            segk = np.empty(nseg, dtype=np.int64)
            segp = np.zeros((nseg, 10))
            for i, sg in enumerate(self.segments):
                code = _SEG_KIND_CODES[sg[0]]
                segk[i] = code
                if code == K.SEG_POLY:
                    coeffs = np.asarray(sg[1], dtype=float)
                    if coeffs.size > 9:
                        raise AdmissibilityError("polynomial segments cap at degree 8")
                    segp[i, 0] = coeffs.size - 1
                    segp[i, 1:1 + coeffs.size] = coeffs
                else:
                    segp[i, 0] = float(sg[1])
            packed = (np.int64(K.W_PIECEWISE), np.ascontiguousarray(full),
                      segk, np.ascontiguousarray(segp), _EMPTY_F, _EMPTY_F)
        else:
            raise AdmissibilityError(f"unknown weight kind {self.kind!r}")

        object.__setattr__(self, "_packed", packed)
        self._validate_signs(full)

    def _validate_signs(self, full):
        scale = 0.0
        samples = []
        for i in range(full.size - 1):
            ts = np.linspace(full[i], full[i + 1], 1201)
            vals = self.a(ts)
            samples.append(vals)
            scale = max(scale, float(np.max(np.abs(vals)))) if vals.size else scale
        tol = 1e-12 * (1.0 + scale)
        for i, vals in enumerate(samples):
            sign = 1.0 if i % 2 == 0 else -1.0
            if np.any(sign * vals < -tol):
                raise AdmissibilityError(
                    f"segment {i} of the weight violates its sign "
                    f"({'>= 0' if sign > 0 else '<= 0'} expected)")
            ts = np.linspace(full[i], full[i + 1], 1201)
            if np.trapezoid(np.abs(vals), ts) <= tol * (full[i + 1] - full[i]):
                raise AdmissibilityError(
                    f"segment {i} of the weight is almost everywhere zero")

    # -- structure ------------------------------------------------------

    @property
    def humps(self) -> int:
        """Number of positivity intervals."""
        return len(self.nodes) // 2 + 1

    @property
    def sigma(self) -> float:
        """End of the first positivity interval (= duration if no nodes)."""
        return self.nodes[0] if self.nodes else self.duration

    @property
    def tau(self) -> float:
        """Start of the last positivity interval (= 0 if no nodes)."""
        return self.nodes[-1] if self.nodes else 0.0

    @property
    def breakpoints(self) -> np.ndarray:
        return self._packed[1]

    def negativity_intervals(self) -> list[tuple[float, float]]:
        full = self.breakpoints
        return [(full[i], full[i + 1]) for i in range(1, full.size - 1, 2)]

    def default_section(self) -> float:
        """Midpoint of the last negativity interval (midpoint of [0, T]
        for a single-hump weight)."""
        neg = self.negativity_intervals()
        if not neg:
            return 0.5 * self.duration
        lo, hi = neg[-1]
        return 0.5 * (lo + hi)

    def section_bounds(self) -> tuple[float, float]:
        """Admissible closed range for the shooting section."""
        neg = self.negativity_intervals()
        if not neg:
            return (0.0, self.duration)
        return neg[-1]

    # -- evaluation ------------------------------------------------------

    def a(self, t):
        """Weight value(s); t may be a scalar or an array within [0, T]."""
        ts = np.atleast_1d(np.asarray(t, dtype=float))
        out = K.eval_a_batch(np.ascontiguousarray(ts.ravel()), *self._packed)
        out = out.reshape(ts.shape)
        return float(out[()]) if np.isscalar(t) or np.ndim(t) == 0 else out


@dataclass(frozen=True, eq=False)
class NonlinearitySpec:
    """A hump nonlinearity on [0, 1], zero outside.

    Construction computes the maximum of g and a finite-difference
    Lipschitz estimate by a 4096-point scan with golden-section
    refinement, and checks the structural conditions: zeros at both
    endpoints, positivity inside, and a vanishing slope ratio g(s)/s
    as s -> 0+.
    """

    kind: str
    table_s: np.ndarray | None = None
    table_v: np.ndarray | None = None
    gmax: float = field(init=False)
    gmax_arg: float = field(init=False)
    lipschitz_bound: float = field(init=False)
    _packed: tuple = field(init=False, repr=False)

    @classmethod
    def s2_one_minus_s(cls) -> "NonlinearitySpec":
        """g(s) = s^2 (1 - s)."""
        return cls(kind="s2_1ms")

    @classmethod
    def from_table(cls, s, v) -> "NonlinearitySpec":
        s = np.ascontiguousarray(s, dtype=float)
        v = np.ascontiguousarray(v, dtype=float)
        if s.ndim != 1 or s.shape != v.shape or s.size < 3:
            raise AdmissibilityError("table nonlinearity needs matching 1-d arrays")
        if np.any(np.diff(s) <= 0):
            raise AdmissibilityError("table abscissae must be strictly increasing")
        if abs(s[0]) > 1e-12 or abs(s[-1] - 1.0) > 1e-12:
            raise AdmissibilityError("table must span [0, 1]")
        return cls(kind="table", table_s=s, table_v=v)

    def __post_init__(self):
        if self.kind == "s2_1ms":
            packed = (np.int64(K.G_S2_1MS), _EMPTY_F, _EMPTY_F)
        elif self.kind == "table":
            packed = (np.int64(K.G_TABLE),
                      np.ascontiguousarray(self.table_s),
                      np.ascontiguousarray(self.table_v))
        else:
            raise AdmissibilityError(f"unknown nonlinearity kind {self.kind!r}")
        object.__setattr__(self, "_packed", packed)

        g = self._raw
        if abs(g(0.0)) > 1e-12 or abs(g(1.0)) > 1e-12:
            raise AdmissibilityError("g must vanish at 0 and 1 (within 1e-12)")
        grid = np.linspace(0.0, 1.0, 10002)[1:-1]
        vals = g(grid)
        if np.any(vals <= 0.0):
            raise AdmissibilityError("g must be strictly positive on ]0, 1[")

        scan = np.linspace(0.0, 1.0, 4096)
        sv = g(scan)
        i = int(np.argmax(sv))
        a = scan[max(i - 1, 0)]
        b = scan[min(i + 1, 4095)]
        xm, fm = _golden_min(lambda x: -float(g(x)), a, b)
        if -fm > sv[i]:
            gmax, garg = -float(fm), float(xm)
        else:
            gmax, garg = float(sv[i]), float(scan[i])
        lip = float(np.max(np.abs(np.diff(g(scan))) / np.diff(scan)))
        object.__setattr__(self, "gmax", gmax)
        object.__setattr__(self, "gmax_arg", garg)
        object.__setattr__(self, "lipschitz_bound", lip)

        # slope ratio must fall off near zero and sit well below the
        # maximal slope: the zero equilibrium is degenerate
        ss = 10.0 ** -np.arange(3, 9, dtype=float)
        ratios = g(ss) / ss
        if np.any(np.diff(ratios) > 1e-15):
            raise AdmissibilityError("g(s)/s must be non-increasing as s -> 0+")
        if np.any(ratios > 1e-2 * lip):
            raise AdmissibilityError(
                "g(s)/s does not vanish fast enough near 0 "
                "(superlinearity condition)")

    def _raw(self, s):
        """Evaluate on scalars or arrays, zero extension included."""
        arr = np.atleast_1d(np.asarray(s, dtype=float))
        if self.kind == "s2_1ms":
            out = np.where((arr > 0.0) & (arr < 1.0), arr * arr * (1.0 - arr), 0.0)
        else:
            out = np.where((arr > 0.0) & (arr < 1.0),
                           np.interp(arr, self.table_s, self.table_v), 0.0)
        return float(out[()]) if np.ndim(s) == 0 else out

    __call__ = _raw


@dataclass(frozen=True)
class ParameterPair:
    """Intensities of the positive and negative weight parts."""

    lam: float
    mu: float

    def __post_init__(self):
        if not (self.lam > 0.0 and math.isfinite(self.lam)):
            raise AdmissibilityError("lambda must be positive")
        if not (self.mu >= 0.0 and math.isfinite(self.mu)):
            raise AdmissibilityError("mu must be nonnegative")


# ---------------------------------------------------------------------------
# pointwise and integral operations


def eval_weight(w: WeightSpec, p: ParameterPair, t):
    """lam*a+(t) - mu*a-(t); t scalar or array within [0, T]."""
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(ts < -1e-12) or np.any(ts > w.duration + 1e-12):
        raise AdmissibilityError(f"t outside [0, {w.duration}]")
    a = np.atleast_1d(w.a(ts))
    out = np.where(a > 0.0, p.lam * a, p.mu * a)
    return float(out[()]) if np.ndim(t) == 0 else out.reshape(np.shape(t))


def _signed_part_integral(w: WeightSpec, t1: float, t2: float, positive: bool) -> float:
    if not (0.0 <= t1 <= w.duration + 1e-12 and t2 <= w.duration + 1e-12):
        raise AdmissibilityError(f"bounds outside [0, {w.duration}]")
    if t1 > t2:
        raise AdmissibilityError("integration bounds must satisfy t1 <= t2")
    if t2 - t1 <= 0.0:
        return 0.0

    if w.kind == "table":
        # trapezoid rule, exact on the sample grid
        t = w.table_t
        inner = t[(t > t1) & (t < t2)]
        ts = np.concatenate(([t1], inner, [t2]))
        vals = np.interp(ts, t, w.table_a)
        part = np.maximum(vals, 0.0) if positive else np.maximum(-vals, 0.0)
        return float(np.trapezoid(part, ts))

    full = w.breakpoints
    total = 0.0
    sign = 1.0 if positive else -1.0
    for i in range(full.size - 1):
        if (i % 2 == 0) != positive:
            continue
        lo = max(t1, full[i])
        hi = min(t2, full[i + 1])
        if hi - lo <= 1e-15:
            continue
        val, _ = quad(lambda x: sign * w.a(x), lo, hi, **_QUAD_OPTS)
        total += val
    return total


def integral_Aplus(w: WeightSpec, t1: float, t2: float) -> float:
    """Integral of the positive weight part over [t1, t2]."""
    return _signed_part_integral(w, t1, t2, True)


def integral_Aminus(w: WeightSpec, t1: float, t2: float) -> float:
    """Integral of the negative weight part over [t1, t2]."""
    return _signed_part_integral(w, t1, t2, False)


def g_min_on(gspec: NonlinearitySpec, eta1: float, eta2: float) -> float:
    """Minimum of g over [eta1, eta2], grid scan + golden refinement."""
    if not (0.0 < eta1 < eta2 <= 1.0):
        raise AdmissibilityError("need 0 < eta1 < eta2 <= 1")
    _, fm = _scan_refine_min(gspec, eta1, eta2)
    return fm


def threshold_lambda_star(w: WeightSpec, gspec: NonlinearitySpec,
                          nu0: float, nu1: float, t1: float) -> float:
    """Intensity above which a solution started level at nu0 is driven to
    the left axis across the first positivity interval."""
    if not (0.0 < nu1 < nu0 < 1.0):
        raise AdmissibilityError("need 0 < nu1 < nu0 < 1")
    if not (0.0 < t1 < w.sigma):
        raise AdmissibilityError(
            f"t1 must lie in ]0, {w.sigma}[ (first positivity interval)")
    inner, _ = quad(lambda xi: integral_Aplus(w, 0.0, xi), 0.0, t1,
                    epsabs=1e-14, epsrel=1e-9, limit=200)
    den = g_min_on(gspec, nu1, nu0) * inner
    if den < 1e-300:
        raise AdmissibilityError("weight vanishes on [0, t1]")
    return (nu0 - nu1) / den


def threshold_lambda_star_star(w: WeightSpec, gspec: NonlinearitySpec,
                               nu1: float, nuT: float, t1: float) -> float:
    """Mirror-image threshold on the last positivity interval."""
    if not (0.0 < nu1 < nuT < 1.0):
        raise AdmissibilityError("need 0 < nu1 < nuT < 1")
    if not (w.tau < t1 < w.duration):
        raise AdmissibilityError(
            f"t1 must lie in ]{w.tau}, {w.duration}[ (last positivity interval)")
    inner, _ = quad(lambda xi: integral_Aplus(w, xi, w.duration), t1, w.duration,
                    epsabs=1e-14, epsrel=1e-9, limit=200)
    den = g_min_on(gspec, nu1, nuT) * inner
    if den < 1e-300:
        raise AdmissibilityError("weight vanishes on [t1, T]")
    return (nuT - nu1) / den


def threshold_mu_star(w: WeightSpec, gspec: NonlinearitySpec,
                      nu2: float, nu_sigma: float, t2: float,
                      omega_sigma: float) -> float:
    """Intensity of the negative part above which states pushed to the
    first negativity interval blow past the right edge of the strip."""
    if not w.nodes:
        raise AdmissibilityError("weight has no negativity interval")
    sigma = w.breakpoints[1]
    tau = w.breakpoints[2]
    if not (0.0 < nu_sigma < nu2 < 1.0):
        raise AdmissibilityError("need 0 < nu_sigma < nu2 < 1")
    if omega_sigma < 0.0:
        raise AdmissibilityError("omega_sigma must be nonnegative")
    if not (sigma < t2 <= tau):
        raise AdmissibilityError(f"t2 must lie in ]{sigma}, {tau}]")
    if omega_sigma > 0.0:
        bound = sigma + nu_sigma / (2.0 * omega_sigma)
        if t2 > bound:
            raise AdmissibilityError(
                f"t2={t2} exceeds sigma + nu_sigma/(2*omega_sigma) = {bound}")
    num = nu2 - nu_sigma + (t2 - sigma) * omega_sigma
    inner, _ = quad(lambda xi: integral_Aminus(w, sigma, xi), sigma, t2,
                    epsabs=1e-14, epsrel=1e-9, limit=200)
    den = g_min_on(gspec, nu_sigma / 2.0, nu2) * inner
    if den < 1e-300:
        raise AdmissibilityError("negative weight part vanishes on [sigma, t2]")
    return num / den


def delta_tilde(w: WeightSpec, gspec: NonlinearitySpec, lam: float) -> float:
    """Launch slope above which the first positivity interval is crossed
    out through the right edge; strict bound times a 1% margin."""
    if not (lam > 0.0):
        raise AdmissibilityError("lambda must be positive")
    sigma = w.sigma
    return 1.01 * (1.0 / sigma + lam * integral_Aplus(w, 0.0, sigma) * gspec.gmax)


def delta_tilde_backward(w: WeightSpec, gspec: NonlinearitySpec, lam: float) -> float:
    """Mirror of delta_tilde for backward launches on the last positivity
    interval."""
    if not (lam > 0.0):
        raise AdmissibilityError("lambda must be positive")
    width = w.duration - w.tau
    return 1.01 * (1.0 / width
                   + lam * integral_Aplus(w, w.tau, w.duration) * gspec.gmax)


def omega_sigma_default(w: WeightSpec, gspec: NonlinearitySpec, lam: float) -> float:
    """Default slope drop across the first positivity interval:
    lam * A+(0, sigma) * max g."""
    return lam * integral_Aplus(w, 0.0, w.sigma) * gspec.gmax


def neumann_necessary_mu(w: WeightSpec, lam: float) -> float:
    """Below lam * A+(0,T)/A-(0,T) the no-flux problem admits no positive
    nontrivial solution."""
    if lam < 0.0:
        raise AdmissibilityError("lambda must be nonnegative")
    am = integral_Aminus(w, 0.0, w.duration)
    if am <= 1e-300:
        raise AdmissibilityError("sign condition violated: negative part vanishes")
    return lam * integral_Aplus(w, 0.0, w.duration) / am


# ---------------------------------------------------------------------------
# problem definition files


def problem_from_dict(d: dict) -> tuple[WeightSpec, NonlinearitySpec]:
    """Build (weight, nonlinearity) from a problem definition mapping.

    Keys: `T`, `weight` ({"kind": "sin_pi"} | {"kind": "table", "t": [...],
    "a": [...]} | {"kind": "piecewise", "segments": [...]}), `g`
    ({"kind": "s2_1ms"} | {"kind": "table", "s": [...], "v": [...]}), and
    either `sigma`/`tau` or a `nodes` list for multi-hump weights.
    """
    try:
        T = float(d["T"])
        wd = d["weight"]
        gd = d["g"]
    except KeyError as exc:
        raise AdmissibilityError(f"problem file is missing key {exc}") from None

    if "nodes" in d:
        nodes = [float(v) for v in d["nodes"]]
    elif "sigma" in d or "tau" in d:
        try:
            nodes = [float(d["sigma"]), float(d["tau"])]
        except KeyError as exc:
            raise AdmissibilityError(
                f"sigma/tau must be given together (missing {exc})") from None
    else:
        nodes = None

    wkind = wd.get("kind")
    if wkind == "sin_pi":
        w = WeightSpec.sin_pi(T)
        if nodes is not None and tuple(nodes) != w.nodes:
            raise AdmissibilityError(
                f"declared nodes {nodes} disagree with sin_pi nodes {list(w.nodes)}")
    elif wkind == "table":
        if nodes is None:
            raise AdmissibilityError("table weight requires nodes (or sigma/tau)")
        w = WeightSpec.from_table(wd["t"], wd["a"], nodes)
        if abs(w.duration - T) > 1e-9:
            raise AdmissibilityError("table span disagrees with T")
    elif wkind == "piecewise":
        if nodes is None:
            raise AdmissibilityError("piecewise weight requires nodes (or sigma/tau)")
        segs = []
        for sg in wd["segments"]:
            kind = sg.get("kind")
            if kind == "const":
                segs.append(("const", float(sg["value"])))
            elif kind in ("sine", "sine_hump"):
                segs.append(("sine", float(sg.get("amp", 1.0))))
            elif kind == "poly":
                segs.append(("poly", tuple(float(c) for c in sg["coeffs"])))
            else:
                raise AdmissibilityError(f"unknown segment kind {kind!r}")
        w = WeightSpec.piecewise(T, nodes, segs)
    else:
        raise AdmissibilityError(f"unknown weight kind {wkind!r}")

    gkind = gd.get("kind")
    if gkind == "s2_1ms":
        g = NonlinearitySpec.s2_one_minus_s()
    elif gkind == "table":
        g = NonlinearitySpec.from_table(gd["s"], gd["v"])
    else:
        raise AdmissibilityError(f"unknown nonlinearity kind {gkind!r}")
    return w, g


def load_problem(path) -> tuple[WeightSpec, NonlinearitySpec]:
    """Read a problem definition JSON file."""
    text = Path(path).read_text()
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise AdmissibilityError(f"malformed problem JSON: {exc}") from None
    return problem_from_dict(d)
