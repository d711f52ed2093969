"""Phase-plane continua.

Deforms the initial sets (the horizontal unit segment at slope zero and
the two vertical half-rays on the value-zero axis) through the flow to a
section inside a negativity interval, refines the resulting curves
adaptively, detects the parameter sub-intervals whose trajectories stay
inside the open strip ]0,1[ x R, and provides the Monte-Carlo trapping
and prohibited-region diagnostics.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import AdmissibilityError
from .integrator import (DEFAULT_CONFIG, IntegratorConfig, PhasePoint,
                         integrate, poincare_map_batch)
from .model import NonlinearitySpec, ParameterPair, WeightSpec

SET_X01 = "X01"
SET_Y_GE0 = "Y_GE0"
SET_Y_LE0 = "Y_LE0"

# sample labels
INTERIOR = 0
EXIT0 = -1
EXIT1 = 1
FLAGGED = 2

LABEL_NAMES = {INTERIOR: "interior", EXIT0: "exit0", EXIT1: "exit1",
               FLAGGED: "flagged"}

# images closer than this to a strip edge are boundary cases, not assigned
AMBIGUITY_MARGIN = 1e-9


@dataclass(frozen=True)
class InitialSet:
    """One of the three shooting sets.

    X01 is the segment x in [0,1], y = 0; Y_GE0 / Y_LE0 are the value-zero
    rays truncated at y_cap.  The rays anchor at the end whose boundary
    condition they encode: Y_GE0 at t=0, Y_LE0 at t=T.
    """

    kind: str
    anchor_time: float
    y_cap: float = 1.0

    def __post_init__(self):
        if self.kind not in (SET_X01, SET_Y_GE0, SET_Y_LE0):
            raise AdmissibilityError(f"unknown initial set kind {self.kind!r}")
        if self.y_cap <= 0.0:
            raise AdmissibilityError("y_cap must be positive")

    def param_range(self) -> tuple[float, float]:
        if self.kind == SET_X01:
            return (0.0, 1.0)
        if self.kind == SET_Y_GE0:
            return (0.0, self.y_cap)
        return (-self.y_cap, 0.0)

    def points(self, s_values) -> np.ndarray:
        s = np.atleast_1d(np.asarray(s_values, dtype=float))
        if self.kind == SET_X01:
            return np.column_stack([s, np.zeros_like(s)])
        return np.column_stack([np.zeros_like(s), s])


@dataclass
class CrossingStructure:
    """Ordered break parameters of a continuum and the bands between them.

    `exit_labels[k]` names the strip side reached by the excursion
    adjacent to break k; `flagged[k]` marks breaks whose neighborhood
    classification was ambiguous (image within the margin of an edge).
    """

    kind_of_set: str
    break_params: np.ndarray
    exit_labels: list[str]
    flagged: list[bool]
    interior_bands: list[tuple[float, float]]


@dataclass
class Continuum:
    """Adaptively refined image of an initial set at a section time.

    Samples are ordered by the initial parameter s.  Labels classify each
    sample by the recorded strip exits up to the section: interior, left
    exit (exit0), right exit (exit1), or flagged boundary cases.
    Effectively immutable after construction.
    """

    initial_set: InitialSet
    section_time: float
    s: np.ndarray
    images: np.ndarray
    labels: np.ndarray
    exit_times: np.ndarray
    weight: WeightSpec
    gspec: NonlinearitySpec
    params: ParameterPair
    cfg: IntegratorConfig
    refined: bool = True
    _crossings: CrossingStructure | None = field(default=None, repr=False)

    def map_params(self, s_values) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Fresh integrations of extra parameters; returns (images,
        labels, exit_times)."""
        s_values = np.atleast_1d(np.asarray(s_values, dtype=float))
        res = poincare_map_batch(self.weight, self.gspec, self.params,
                                 self.initial_set.anchor_time,
                                 self.section_time,
                                 self.initial_set.points(s_values), self.cfg)
        img = res.states[:, -1, :]
        lab = _classify(img, res.exit_code, res.exit_time,
                        self.initial_set.anchor_time, self.section_time)
        return img, lab, res.exit_time

    def crossings(self) -> CrossingStructure:
        if self._crossings is None:
            self._crossings = detect_crossings(self)
        return self._crossings

    def to_csv(self, path, provenance: str | None = None):
        rows = ["s,x,y,label"]
        if provenance:
            rows.insert(0, f"# {provenance}")
        for sv, (x, y), lab in zip(self.s, self.images, self.labels):
            rows.append(f"{sv:.17g},{x:.17g},{y:.17g},{LABEL_NAMES[int(lab)]}")
        with open(path, "w") as fh:
            fh.write("\n".join(rows) + "\n")


def _classify(images, exit_code, exit_time, anchor, section):
    """Label samples: recorded exits win; otherwise the image position,
    with a flagged verdict inside the ambiguity margin."""
    d = 1.0 if section >= anchor else -1.0
    n = images.shape[0]
    lab = np.empty(n, dtype=np.int8)
    exited = (exit_code != 0) & (d * (exit_time - anchor)
                                 <= d * (section - anchor) + 1e-12)
    x = images[:, 0]
    near0 = np.abs(x) <= AMBIGUITY_MARGIN
    near1 = np.abs(x - 1.0) <= AMBIGUITY_MARGIN
    lab[:] = INTERIOR
    lab[x <= -AMBIGUITY_MARGIN] = EXIT0
    lab[x >= 1.0 + AMBIGUITY_MARGIN] = EXIT1
    lab[near0 | near1] = FLAGGED
    lab[exited] = exit_code[exited]
    # a recorded exit with a deep-interior image is a graze artifact
    deep = (np.abs(x - 0.5) < 0.5 - 1e-6)
    lab[exited & deep] = FLAGGED
    return lab


def _section_traversal_order(anchor, kappas):
    d = 1.0 if kappas[0] >= anchor else -1.0
    return sorted(kappas, key=lambda k: d * k)


def _validate_section(w: WeightSpec, kappa: float):
    lo, hi = w.section_bounds()
    if not (lo - 1e-12 <= kappa <= hi + 1e-12):
        raise AdmissibilityError(
            f"section {kappa} outside the admissible range [{lo}, {hi}]")


def shoot_set_sections(w: WeightSpec, gspec: NonlinearitySpec,
                       p: ParameterPair, iset: InitialSet, kappas,
                       cfg: IntegratorConfig = DEFAULT_CONFIG, *,
                       n_init: int = 129, refine_dist: float = 1e-3,
                       min_gap: float = 1e-12, max_rounds: int = 90,
                       max_samples: int = 250_000) -> list[Continuum]:
    """Shoot one initial set to several sections in a single pass.

    All sections must lie on the same side of the anchor; they are made
    mandatory step endpoints, so one integration per sample serves every
    section.  Gaps are bisected until adjacent in-strip images differ by
    less than `refine_dist` in sup-norm (label-changing gaps: until the
    gap closes to `min_gap`).
    """
    T = w.duration
    anchor = iset.anchor_time
    if not (abs(anchor) < 1e-12 or abs(anchor - T) < 1e-12):
        raise AdmissibilityError("initial sets anchor at t=0 or t=T")
    if iset.kind == SET_Y_GE0 and abs(anchor) > 1e-12:
        raise AdmissibilityError("the nonnegative ray anchors at t=0")
    if iset.kind == SET_Y_LE0 and abs(anchor - T) > 1e-12:
        raise AdmissibilityError("the nonpositive ray anchors at t=T")
    kappas = list(np.atleast_1d(np.asarray(kappas, dtype=float)))
    if not kappas:
        raise AdmissibilityError("need at least one section")
    for k in kappas:
        _validate_section(w, k)
    ordered = _section_traversal_order(anchor, kappas)
    far = ordered[-1]
    if abs(far - anchor) < 1e-12:
        raise AdmissibilityError("sections must differ from the anchor")

    lo, hi = iset.param_range()
    s = np.linspace(lo, hi, n_init)

    def evaluate(sv):
        res = poincare_map_batch(w, gspec, p, anchor, far,
                                 iset.points(sv), cfg, sections=ordered)
        return res.states, res.exit_code, res.exit_time

    states, code, etime = evaluate(s)
    nsec = len(ordered)
    labels = np.stack([
        _classify(states[:, j, :], code, etime, anchor, ordered[j])
        for j in range(nsec)], axis=1)            # (n, nsec)

    for _ in range(max_rounds):
        if s.size >= max_samples:
            warnings.warn("continuum sample budget exhausted; refinement "
                          "contract may be unmet in places")
            break
        gaps = np.diff(s)
        need = np.zeros(gaps.size, dtype=bool)
        for j in range(nsec):
            la = labels[:-1, j]
            lb = labels[1:, j]
            img = states[:, j, :]
            dist = np.max(np.abs(img[1:] - img[:-1]), axis=1)
            both_strip = np.isin(la, (INTERIOR, FLAGGED)) & np.isin(lb, (INTERIOR, FLAGGED))
            same_exit = (la == lb) & np.isin(la, (EXIT0, EXIT1))
            need |= np.where(same_exit, False,
                             np.where(both_strip, dist >= refine_dist, la != lb))
        need &= gaps >= min_gap
        if not need.any():
            break
        new_s = 0.5 * (s[:-1][need] + s[1:][need])
        if s.size + new_s.size > max_samples:
            new_s = new_s[:max_samples - s.size]
        new_states, new_code, new_etime = evaluate(new_s)
        new_labels = np.stack([
            _classify(new_states[:, j, :], new_code, new_etime, anchor, ordered[j])
            for j in range(nsec)], axis=1)
        s = np.concatenate([s, new_s])
        order = np.argsort(s, kind="stable")
        s = s[order]
        states = np.concatenate([states, new_states])[order]
        labels = np.concatenate([labels, new_labels])[order]
        etime = np.concatenate([etime, new_etime])[order]
        code = np.concatenate([code, new_code])[order]

    out = []
    for j, kap in enumerate(ordered):
        c = Continuum(initial_set=iset, section_time=kap, s=s.copy(),
                      images=states[:, j, :].copy(),
                      labels=labels[:, j].copy(), exit_times=etime.copy(),
                      weight=w, gspec=gspec, params=p, cfg=cfg)
        out.append(c)

    # ray truncation must end in a right exit, otherwise the cap hides
    # crossing structure
    if iset.kind in (SET_Y_GE0, SET_Y_LE0):
        edge = -1 if iset.kind == SET_Y_GE0 else 0
        final = out[-1]
        if final.labels[edge] != EXIT1:
            warnings.warn(
                f"y_cap={iset.y_cap} too small: extreme sample label is "
                f"{LABEL_NAMES[int(final.labels[edge])]}, max image x "
                f"{np.max(final.images[:, 0]):.3g}")

    # restore the requested section order
    index = {k: i for i, k in enumerate(ordered)}
    return [out[index[k]] for k in kappas]


def shoot_set(w: WeightSpec, gspec: NonlinearitySpec, p: ParameterPair,
              iset: InitialSet, kappa: float,
              cfg: IntegratorConfig = DEFAULT_CONFIG, **kw) -> Continuum:
    """Deform one initial set to a single section."""
    return shoot_set_sections(w, gspec, p, iset, [kappa], cfg, **kw)[0]


def detect_crossings(c: Continuum, *, s_tol: float = 1e-11) -> CrossingStructure:
    """Locate the break parameters separating interior bands from strip
    exits by bisection on the initial parameter."""
    labels = c.labels
    s = c.s
    n = s.size

    # interior runs; gaps made only of flagged samples do not split a run
    runs = []
    i = 0
    while i < n:
        if labels[i] == INTERIOR:
            j = i
            while j + 1 < n:
                if labels[j + 1] == INTERIOR:
                    j += 1
                    continue
                # look across flagged stretches
                k = j + 1
                while k < n and labels[k] == FLAGGED:
                    k += 1
                if k < n and labels[k] == INTERIOR and k - (j + 1) <= 3:
                    j = k
                    continue
                break
            runs.append((i, j))
            i = j + 1
        else:
            i += 1

    def locate(s_int, s_out):
        """Bisect between an interior-side and an outer-side parameter;
        returns (boundary, outer label, outer image x)."""
        img, lab, _ = c.map_params(np.array([s_out]))
        side_label = int(lab[0])
        side_x = img[0, 0]
        while abs(s_out - s_int) > s_tol:
            sm = 0.5 * (s_int + s_out)
            img, lab, _ = c.map_params(np.array([sm]))
            if lab[0] == INTERIOR:
                s_int = sm
            else:
                s_out = sm
                side_label = int(lab[0])
                side_x = img[0, 0]
        return 0.5 * (s_int + s_out), side_label, side_x

    break_params = []
    exit_labels = []
    flagged = []
    bands = []
    for (i0, i1) in runs:
        # left break
        if i0 == 0:
            b_lo = s[0]
            lab_lo, x_lo = int(labels[0]), c.images[0, 0]
            amb_lo = labels[0] in (FLAGGED, INTERIOR)
        else:
            b_lo, lab_lo, x_lo = locate(s[i0], s[i0 - 1])
            amb_lo = lab_lo == FLAGGED
        # right break
        if i1 == n - 1:
            b_hi = s[-1]
            lab_hi, x_hi = int(labels[-1]), c.images[-1, 0]
            amb_hi = labels[-1] in (FLAGGED, INTERIOR)
        else:
            b_hi, lab_hi, x_hi = locate(s[i1], s[i1 + 1])
            amb_hi = lab_hi == FLAGGED

        def side_name(lab, x):
            if lab == EXIT0:
                return "exit0"
            if lab == EXIT1:
                return "exit1"
            return "exit0" if x < 0.5 else "exit1"

        break_params.extend([b_lo, b_hi])
        exit_labels.extend([side_name(lab_lo, x_lo), side_name(lab_hi, x_hi)])
        flagged.extend([bool(amb_lo), bool(amb_hi)])
        bands.append((b_lo, b_hi))

    order = np.argsort(break_params, kind="stable")
    bp = np.asarray(break_params)[order]
    return CrossingStructure(
        kind_of_set=c.initial_set.kind,
        break_params=bp,
        exit_labels=[exit_labels[k] for k in order],
        flagged=[flagged[k] for k in order],
        interior_bands=bands,
    )


# ---------------------------------------------------------------------------
# Monte-Carlo diagnostics


def check_trapping(w: WeightSpec, gspec: NonlinearitySpec, p: ParameterPair,
                   n_samples: int = 1000, seed: int = 0,
                   cfg: IntegratorConfig = DEFAULT_CONFIG) -> dict:
    """Once a trajectory leaves the strip through a corner it stays in
    the corresponding quadrant; checked on dense samples of random
    launches in each of the four corner regions."""
    if n_samples < 1:
        raise AdmissibilityError("n_samples must be at least 1")
    T = w.duration
    rng = np.random.default_rng(seed)
    report = {}
    regions = {
        "left_down_forward": (0.0, -1.0, +1),
        "right_up_forward": (1.0, +1.0, +1),
        "left_up_backward": (0.0, +1.0, -1),
        "right_down_backward": (1.0, -1.0, -1),
    }
    for name, (x0, ysign, direction) in regions.items():
        ok = 0
        for _ in range(n_samples):
            t0 = rng.uniform(0.0, T)
            t0 = min(max(t0, 1e-6), T - 1e-6)
            y0 = ysign * 10.0 ** rng.uniform(-3, np.log10(5.0))
            t_end = T if direction > 0 else 0.0
            traj = integrate(w, gspec, p, t0, t_end,
                             PhasePoint(float(x0), float(y0)), cfg)
            ts = np.linspace(t0, t_end, 203)[1:]
            st = traj.eval(ts)
            if x0 == 0.0:
                good = np.all(st[:, 0] < 0.0) and np.all(ysign * st[:, 1] > 0.0)
            else:
                good = np.all(st[:, 0] > 1.0) and np.all(ysign * st[:, 1] > 0.0)
            ok += bool(good)
        report[name] = {"pass": ok, "fail": n_samples - ok}
    report["n_samples"] = n_samples
    report["seed"] = seed
    return report


def check_prohibited(w: WeightSpec, gspec: NonlinearitySpec, p: ParameterPair,
                     n_samples: int = 1000, seed: int = 0,
                     cfg: IntegratorConfig = DEFAULT_CONFIG) -> dict:
    """The strip [0,1] x R never maps into the second-quadrant wedges:
    forward runs avoid x<0, y>=0 and x>1, y<=0; backward runs the
    reflected wedges."""
    if n_samples < 1:
        raise AdmissibilityError("n_samples must be at least 1")
    T = w.duration
    rng = np.random.default_rng(seed)
    report = {}
    for name, (t_from, t_to) in (("forward", (0.0, T)), ("backward", (T, 0.0))):
        ok = 0
        for _ in range(n_samples):
            x0 = rng.uniform(0.0, 1.0)
            y0 = rng.uniform(-5.0, 5.0)
            traj = integrate(w, gspec, p, t_from, t_to,
                             PhasePoint(float(x0), float(y0)), cfg)
            ts = np.linspace(t_from, t_to, 501)
            st = np.vstack([traj.eval(ts), traj.states])
            x = st[:, 0]
            y = st[:, 1]
            if name == "forward":
                bad = np.any((x < 0.0) & (y >= 0.0)) or np.any((x > 1.0) & (y <= 0.0))
            else:
                bad = np.any((x < 0.0) & (y <= 0.0)) or np.any((x > 1.0) & (y >= 0.0))
            ok += not bad
        report[name] = {"pass": ok, "fail": n_samples - ok}
    report["n_samples"] = n_samples
    report["seed"] = seed
    return report
