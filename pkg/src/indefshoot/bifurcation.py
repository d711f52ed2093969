"""Bifurcation sweeps in the negative-part intensity.

The multiplicity solver already enumerates every solution at each mu, so
continuation reduces to a linking problem: solutions at adjacent grid
values are matched nearest-neighbor in (mu, u0, du0) with a band
fingerprint preference, fold ends are bisected toward their limit points
and joined, and endpoints approaching a trivial state are bisected until
they tag a transcritical candidate.  Closed branches (isolas) are
detected by start/end coincidence.  Everything is deterministic for a
fixed configuration.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import AdmissibilityError
from .integrator import DEFAULT_CONFIG, IntegratorConfig
from .model import NonlinearitySpec, ParameterPair, WeightSpec
from .shooting import BoundaryConditionType, solve_multiplicity

log = logging.getLogger("indefshoot")

MATCH_TOL = 0.05          # scaled linking distance between adjacent mu
DU0_SCALE = 5.0           # brings slope differences onto the u0 scale
TRANSCRITICAL_TOL = 1e-3  # endpoint distance to a trivial state

SWEEP_INTEGRATOR = IntegratorConfig(rel_tol=1e-8, abs_tol=1e-10)
SWEEP_SHOOT_KWARGS = dict(refine_dist=2e-3, n_init=65)


@dataclass(frozen=True)
class SweepConfig:
    """Grid and problem choice for one sweep."""

    lam: float
    mu_min: float
    mu_max: float
    n_steps: int
    bc: BoundaryConditionType
    kappa: float | None = None

    def __post_init__(self):
        if not self.mu_min < self.mu_max:
            raise AdmissibilityError("need mu_min < mu_max")
        if self.n_steps < 2:
            raise AdmissibilityError("need at least 2 grid steps")

    def grid(self) -> np.ndarray:
        return np.linspace(self.mu_min, self.mu_max, self.n_steps)


@dataclass
class BranchPoint:
    mu: float
    u0: float
    du0: float
    band_l: int
    band_r: int
    uT: float = 0.0
    duT: float = 0.0
    tag: str = ""


@dataclass
class Branch:
    """An ordered run of linked solutions.

    Points follow arc order, which folds back in mu at turning points.
    `closed` marks an isola; `fragile` marks single-point branches;
    `trivial` marks the constant reference rows.
    """

    branch_id: int
    points: list[BranchPoint] = field(default_factory=list)
    closed: bool = False
    fragile: bool = False
    trivial: str | None = None
    singular_tags: list[tuple[float, float, str]] = field(default_factory=list)

    @property
    def mus(self) -> np.ndarray:
        return np.array([q.mu for q in self.points])

    @property
    def u0s(self) -> np.ndarray:
        return np.array([q.u0 for q in self.points])


def _feature_dist(a: BranchPoint, b: BranchPoint, mu_range: float) -> float:
    """Scaled distance on (mu, u0, du0, uT, duT): both end data enter so
    linking follows one solution family through crowded regions."""
    return float(np.sqrt(((a.mu - b.mu) / mu_range) ** 2
                         + (a.u0 - b.u0) ** 2
                         + ((a.du0 - b.du0) / DU0_SCALE) ** 2
                         + (a.uT - b.uT) ** 2
                         + ((a.duT - b.duT) / DU0_SCALE) ** 2))


def _link(samples: dict[float, list[BranchPoint]], mu_range: float) -> list[Branch]:
    """Greedy nearest-neighbor linking across ascending mu values."""
    branches: list[Branch] = []
    open_br: list[Branch] = []
    for mu in sorted(samples):
        sols = samples[mu]
        pairs = []
        for bi, br in enumerate(open_br):
            last = br.points[-1]
            for sj, q in enumerate(sols):
                d = _feature_dist(last, q, mu_range)
                if d < MATCH_TOL:
                    bonus = 0.001 if (last.band_l == q.band_l
                                      and last.band_r == q.band_r) else 0.0
                    pairs.append((d - bonus, bi, sj))
        pairs.sort()
        used_b: set[int] = set()
        used_s: set[int] = set()
        next_open = []
        for d, bi, sj in pairs:
            if bi in used_b or sj in used_s:
                continue
            used_b.add(bi)
            used_s.add(sj)
            open_br[bi].points.append(sols[sj])
            next_open.append(open_br[bi])
        for bi, br in enumerate(open_br):
            if bi not in used_b:
                branches.append(br)
        for sj, q in enumerate(sols):
            if sj not in used_s:
                br = Branch(branch_id=-1, points=[q])
                next_open.append(br)
        open_br = next_open
    branches.extend(open_br)
    branches.sort(key=lambda b: (b.points[0].mu, b.points[0].u0))
    for i, br in enumerate(branches):
        br.branch_id = i
        br.fragile = len(br.points) < 2
    return branches


def _arm_class(br: Branch, which: str, depth: int = 25) -> int:
    """Mirror class of an arm: -1 or +1 for the two reflected families,
    0 for symmetric solutions.  Judged over the points adjacent to the
    end, because the end itself sits at a limit point where the
    asymmetry closes."""
    pts = br.points[-depth:] if which == "end" else br.points[:depth]
    diffs = [q.u0 - q.uT for q in pts]
    d = max(diffs, key=abs, default=0.0)
    if abs(d) < 5e-3:
        return 0
    return 1 if d > 0 else -1


def _join_folds(branches: list[Branch], mu_range: float,
                join_tol: float = 0.025,
                mu_window: float = 0.0,
                class_guard: bool = False) -> list[Branch]:
    """Merge branch ends that meet at a (nearly) common mu, i.e. fold
    limit points, then flag isolas whose start and end coincide.

    A join requires the two ends to be unambiguous: no third end inside
    twice the pair distance; crowded meetings stay split.  For symmetric
    weights the mirror class is invariant along arcs, so cross-class
    joins are refused."""
    work = [b for b in branches]
    changed = True
    while changed:
        changed = False
        ends = []
        for i, br in enumerate(work):
            if br.trivial:
                continue
            ends.append((i, "end", br.points[-1], _arm_class(br, "end")))
            if len(br.points) > 1:
                ends.append((i, "start", br.points[0], _arm_class(br, "start")))
        candidates = []
        for u in range(len(ends)):
            for v in range(u + 1, len(ends)):
                ia, ka, pa, ca = ends[u]
                ib, kb, pb, cb = ends[v]
                if ia == ib or ka != kb:
                    continue
                if abs(pa.mu - pb.mu) > mu_window + 1e-9 * (1 + mu_range):
                    continue
                if class_guard and ca != cb and ca * cb != -1:
                    continue
                d = _feature_dist(pa, pb, mu_range)
                if d < join_tol:
                    candidates.append((d, u, v))
        candidates.sort()
        for idx, (d, u, v) in enumerate(candidates):
            ambiguous = False
            for jdx, (d2, u2, v2) in enumerate(candidates):
                if jdx == idx or (u2 not in (u, v) and v2 not in (u, v)):
                    continue
                if d2 < 2.0 * d + 1e-12:
                    ambiguous = True
                    break
            if ambiguous:
                continue
            ia, ka, _pa, _ca = ends[u]
            ib, kb, _pb, _cb = ends[v]
            a, b = work[ia], work[ib]
            if ka == "end":
                a.points = a.points + list(reversed(b.points))
            else:
                a.points = list(reversed(b.points)) + a.points
            work.pop(ib)
            changed = True
            break
    for br in work:
        if br.trivial or len(br.points) < 4:
            continue
        p0, p1 = br.points[0], br.points[-1]
        if (abs(p0.mu - p1.mu) <= mu_window + 1e-9 * (1 + mu_range)
                and _feature_dist(p0, p1, mu_range) < join_tol):
            br.closed = True
    for i, br in enumerate(work):
        br.branch_id = i
        br.fragile = len(br.points) < 2
    return work


def _to_points(solutions) -> list[BranchPoint]:
    return [BranchPoint(mu=s.p.mu, u0=s.u0, du0=s.du0,
                        band_l=s.band_left, band_r=s.band_right,
                        uT=s.uT, duT=s.duT)
            for s in solutions]


class _Sweeper:
    """Holds the per-mu solve cache during one sweep."""

    def __init__(self, w, gspec, sc: SweepConfig, cfg, shoot_kwargs):
        self.w = w
        self.gspec = gspec
        self.sc = sc
        self.cfg = cfg
        self.shoot_kwargs = dict(SWEEP_SHOOT_KWARGS if shoot_kwargs is None
                                 else shoot_kwargs)
        self.samples: dict[float, list[BranchPoint]] = {}
        self.class_guard = weight_is_symmetric(w)

    def solve_at(self, mu: float) -> list[BranchPoint]:
        mu = float(mu)
        if mu in self.samples:
            return self.samples[mu]
        try:
            sols = solve_multiplicity(
                self.w, self.gspec, ParameterPair(self.sc.lam, mu),
                self.sc.bc, self.sc.kappa, self.cfg,
                kappa_check=False, shoot_kwargs=self.shoot_kwargs)
        except Exception as exc:                      # noqa: BLE001
            log.warning("solve at mu=%.8g failed (%s); skipped", mu, exc)
            sols = []
        pts = _to_points(sols)
        self.samples[mu] = pts
        return pts

    def link(self) -> list[Branch]:
        return _link({mu: list(pts) for mu, pts in self.samples.items()},
                     self.sc.mu_max - self.sc.mu_min)


def _refine_ends(sw: _Sweeper, branches: list[Branch], spacing: float,
                 rounds: int = 14):
    """Bisect mu past every interior branch end while "this arm" stays
    alive (a solution matches the moving reference point), driving ends
    toward their limit points: folds, pitchfork attachments, and
    transcritical crossings alike."""
    rng = sw.sc.mu_max - sw.sc.mu_min
    for br in branches:
        if br.trivial:
            continue
        for which in (0, -1):
            end = br.points[which]
            direction = -1.0 if which == 0 else 1.0
            mu_in = end.mu
            mu_out = mu_in + direction * spacing
            if mu_out < sw.sc.mu_min - 1e-12 or mu_out > sw.sc.mu_max + 1e-12:
                continue
            ref = end

            def closest(mu):
                pts = sw.solve_at(mu)
                best = None
                for q in pts:
                    d = _feature_dist(ref, q, rng)
                    if d < MATCH_TOL and (best is None or d < best[0]):
                        best = (d, q)
                return None if best is None else best[1]

            if closest(mu_out) is not None:
                continue          # a linking gap; the relink pass handles it
            toward_trivial = min(end.u0, 1.0 - end.u0) < 0.25
            lo, hi = mu_in, mu_out
            n_extra = rounds + (10 if toward_trivial else 0)
            for _ in range(n_extra):
                mid = 0.5 * (lo + hi)
                q = closest(mid)
                if q is not None:
                    lo = mid
                    ref = q
                else:
                    hi = mid
                if abs(hi - lo) < 1e-7 * rng:
                    break
                if toward_trivial and min(ref.u0, 1.0 - ref.u0) < TRANSCRITICAL_TOL:
                    break


def _split_class_transitions(branches: list[Branch],
                             window: int = 25) -> list[Branch]:
    """Cut branches at interior points where a long symmetric stretch
    hands over to a strongly asymmetric arm (a linking artifact at
    pitchfork points); the join pass reassembles the true components."""
    out = []
    queue = list(branches)
    while queue:
        br = queue.pop(0)
        if br.trivial or len(br.points) < 2 * window:
            out.append(br)
            continue
        asym = [abs(q.u0 - q.uT) for q in br.points]
        n = len(asym)
        cut = None
        # push the cut to the edge of the symmetric stretch
        for i in range(window, n - window):
            left = max(asym[i - window:i])
            right = max(asym[i:i + window])
            if left < 5e-3 and right > 3e-2:
                cut = i
            elif right < 5e-3 and left > 3e-2 and cut is None:
                cut = i
                break
        if cut is None:
            out.append(br)
        else:
            queue.append(Branch(branch_id=-1, points=br.points[:cut]))
            queue.append(Branch(branch_id=-1, points=br.points[cut:]))
    for i, br in enumerate(out):
        br.branch_id = i
        br.fragile = len(br.points) < 2
    return out


def _refine_pair_folds(sw: _Sweeper, branches: list[Branch], spacing: float,
                       rounds: int = 14, reach: float = 0.12):
    """Bisect candidate fold partners along a common mu sequence so both
    arms end on the same sample with converged features, which lets the
    join pass close them."""
    rng = sw.sc.mu_max - sw.sc.mu_min
    ends = []
    for br in branches:
        if br.trivial:
            continue
        ends.append(("end", br.points[-1], _arm_class(br, "end")))
        if len(br.points) > 1:
            ends.append(("start", br.points[0], _arm_class(br, "start")))
    for u in range(len(ends)):
        for v in range(u + 1, len(ends)):
            ka, pa, ca = ends[u]
            kb, pb, cb = ends[v]
            if ka != kb or abs(pa.mu - pb.mu) > spacing:
                continue
            if abs(pa.u0 - pb.u0) > reach and abs(pa.uT - pb.uT) > reach:
                continue
            if sw.class_guard and ca != cb and ca * cb != -1:
                continue
            direction = 1.0 if ka == "end" else -1.0
            lo = max(pa.mu, pb.mu) if direction > 0 else min(pa.mu, pb.mu)
            hi = lo + direction * spacing
            if hi < sw.sc.mu_min - 1e-12 or hi > sw.sc.mu_max + 1e-12:
                continue
            ra, rb = pa, pb

            def near(ref, pts):
                best = None
                for q in pts:
                    d = _feature_dist(ref, q, rng)
                    if d < MATCH_TOL and (best is None or d < best[0]):
                        best = (d, q)
                return None if best is None else best[1]

            for _ in range(rounds):
                mid = 0.5 * (lo + hi)
                pts = sw.solve_at(mid)
                qa = near(ra, pts)
                qb = near(rb, pts)
                if qa is not None and qb is not None and qa is not qb:
                    lo = mid
                    ra, rb = qa, qb
                else:
                    hi = mid
                if abs(hi - lo) < 1e-7 * rng:
                    break


def sweep(w: WeightSpec, gspec: NonlinearitySpec, sc: SweepConfig,
          cfg: IntegratorConfig = SWEEP_INTEGRATOR, *,
          shoot_kwargs: dict | None = None,
          refine: bool = True) -> list[Branch]:
    """Solve on the mu grid, link solutions into branches, refine fold and
    trivial-approach endpoints, join folds, and classify singular points.

    The returned list also carries the trivial reference branches (u0=0,
    and u0=1 for no-flux conditions) with `trivial` set.
    """
    sw = _Sweeper(w, gspec, sc, cfg, shoot_kwargs)
    grid = sc.grid()
    spacing = grid[1] - grid[0]
    for mu in grid:
        sw.solve_at(mu)

    branches = sw.link()
    if refine:
        _refine_ends(sw, branches, spacing)
        branches = sw.link()
        _refine_ends(sw, branches, spacing)
        branches = sw.link()
        _refine_pair_folds(sw, branches, spacing)
        branches = sw.link()
    if sw.class_guard:
        branches = _split_class_transitions(branches)
    branches = _join_folds(branches, sc.mu_max - sc.mu_min,
                           mu_window=0.25 * spacing,
                           class_guard=sw.class_guard)
    for br in branches:
        classify_singular(br, mu_range=(sc.mu_min, sc.mu_max),
                          weight_symmetric=weight_is_symmetric(w),
                          prominence=0.25 * spacing)

    # one refinement pass around singular tags, then rebuild
    if refine:
        added = False
        for br in branches:
            for mu_t, _u0, kind in br.singular_tags:
                if kind.startswith(("endpoint", "pitchfork")):
                    continue
                for off in (-0.5, -0.25, 0.25, 0.5):
                    mu_new = float(np.clip(mu_t + off * spacing,
                                           sc.mu_min, sc.mu_max))
                    if mu_new not in sw.samples:
                        sw.solve_at(mu_new)
                        added = True
        if added:
            branches = sw.link()
            _refine_ends(sw, branches, spacing)
            branches = sw.link()
            _refine_pair_folds(sw, branches, spacing)
            branches = sw.link()
            if sw.class_guard:
                branches = _split_class_transitions(branches)
            branches = _join_folds(branches, sc.mu_max - sc.mu_min,
                                   mu_window=0.25 * spacing,
                                   class_guard=sw.class_guard)
            for br in branches:
                classify_singular(br, mu_range=(sc.mu_min, sc.mu_max),
                                  weight_symmetric=weight_is_symmetric(w),
                                  prominence=0.25 * spacing)

    _demote_pitchfork_turnings(branches, sc, weight_is_symmetric(w))
    _tag_pitchforks(branches, sc, weight_is_symmetric(w))
    branches.extend(_trivial_rows(sc))
    return branches


def weight_is_symmetric(w: WeightSpec, n: int = 2001) -> bool:
    ts = np.linspace(0.0, w.duration, n)
    vals = w.a(ts)
    return bool(np.max(np.abs(vals - vals[::-1])) < 1e-9)


def _trivial_rows(sc: SweepConfig) -> list[Branch]:
    rows = []
    zero = Branch(branch_id=-1, trivial="zero", points=[
        BranchPoint(mu=sc.mu_min, u0=0.0, du0=0.0, band_l=-1, band_r=-1),
        BranchPoint(mu=sc.mu_max, u0=0.0, du0=0.0, band_l=-1, band_r=-1)])
    rows.append(zero)
    if sc.bc.name == "neumann":
        one = Branch(branch_id=-2, trivial="one", points=[
            BranchPoint(mu=sc.mu_min, u0=1.0, du0=0.0, band_l=-1, band_r=-1),
            BranchPoint(mu=sc.mu_max, u0=1.0, du0=0.0, band_l=-1, band_r=-1)])
        rows.append(one)
    return rows


def classify_singular(branch: Branch, *, mu_range: tuple[float, float],
                      weight_symmetric: bool = False,
                      prominence: float = 0.0) -> Branch:
    """Tag turning points (mu reversals along the arc, vertex-refined),
    transcritical candidates (endpoints at a trivial state), and sweep
    boundary endpoints.

    Reversals shallower than `prominence` on either side are ordering
    jitter among refined samples, not folds, and are pruned."""
    branch.singular_tags = []
    pts = branch.points
    if branch.trivial or len(pts) < 3:
        return branch
    mus = branch.mus
    # mu reversals along the arc; joined fold ends may carry zero steps,
    # so the sign is carried across plateaus
    flips = []
    last_sign = 0
    last_i = 0
    for i, d in enumerate(np.diff(mus)):
        sign = 1 if d > 0 else (-1 if d < 0 else 0)
        if sign == 0:
            continue
        if last_sign != 0 and sign != last_sign:
            flips.append((last_i + 1 + i) // 2)
        last_sign = sign
        last_i = i
    # prune shallow reversals, shallowest first
    while prominence > 0.0 and flips:
        anchors = [0] + flips + [len(pts) - 1]
        depths = []
        for k, j in enumerate(flips):
            a = anchors[k]
            b = anchors[k + 2]
            depths.append(min(abs(mus[j] - mus[a]), abs(mus[j] - mus[b])))
        k_min = int(np.argmin(depths))
        if depths[k_min] >= prominence:
            break
        flips.pop(k_min)
    for j in flips:
        a = max(j - 1, 0)
        c = min(j + 1, len(pts) - 1)
        den = mus[c] - 2.0 * mus[j] + mus[a]
        if den != 0.0:
            vertex = mus[j] - (mus[c] - mus[a]) ** 2 / (8.0 * den)
            vertex = float(np.clip(vertex, min(mus[a], mus[j], mus[c]),
                                   max(mus[a], mus[j], mus[c])))
        else:
            vertex = float(mus[j])
        branch.singular_tags.append((vertex, float(pts[j].u0), "turning"))
        pts[j].tag = "turning"
    if not branch.closed:
        for which in (0, -1):
            end = pts[which]
            gap = min(end.u0, 1.0 - end.u0)
            if gap < TRANSCRITICAL_TOL:
                branch.singular_tags.append(
                    (float(end.mu), float(end.u0), "transcritical"))
                end.tag = (end.tag + "+transcritical").lstrip("+")
            elif (abs(end.mu - mu_range[0]) < 1e-9 * (1 + mu_range[1])
                  or abs(end.mu - mu_range[1]) < 1e-9 * (1 + mu_range[1])):
                branch.singular_tags.append(
                    (float(end.mu), float(end.u0), "endpoint"))
    return branch


def _demote_pitchfork_turnings(branches: list[Branch], sc: SweepConfig,
                               symmetric: bool):
    """A "turning" whose fold point lies on another branch (in the full
    feature metric, so the far-end data must agree too) is a pitchfork
    birth, not a fold; relabel it."""
    rng = sc.mu_max - sc.mu_min
    kind = "pitchfork-candidate" + ("(sym)" if symmetric else "(asym)")
    for a in branches:
        if a.trivial or not a.singular_tags:
            continue
        fold_pts = [q for q in a.points if "turning" in q.tag]
        for fp in fold_pts:
            hit = False
            for b in branches:
                if b is a or b.trivial:
                    continue
                if any(_feature_dist(fp, q, rng) < 0.02 for q in b.points):
                    hit = True
                    break
            if hit:
                a.singular_tags = [
                    (m, u, kind) if (k == "turning"
                                     and abs(u - fp.u0) < 1e-9
                                     and abs(m - fp.mu) < 0.5) else (m, u, k)
                    for (m, u, k) in a.singular_tags]
                fp.tag = fp.tag.replace("turning", "pitchfork-candidate")


def _tag_pitchforks(branches: list[Branch], sc: SweepConfig,
                    symmetric: bool):
    """A branch endpoint landing on another branch away from the trivial
    states is a pitchfork candidate; the tag records whether the weight
    passed the evenness test (required to tell pitchforks from
    transcritical crossings)."""
    rng = sc.mu_max - sc.mu_min
    kind = "pitchfork-candidate" + ("(sym)" if symmetric else "(asym)")
    nontrivial = [b for b in branches if not b.trivial and not b.fragile]
    for a in nontrivial:
        for b in nontrivial:
            if a is b:
                continue
            for which in (0, -1):
                ea = a.points[which]
                if min(ea.u0, 1.0 - ea.u0) < TRANSCRITICAL_TOL:
                    continue
                if any(_feature_dist(ea, q, rng) < MATCH_TOL / 2
                       for q in b.points):
                    a.singular_tags.append((float(ea.mu), float(ea.u0), kind))
                    break


def detect_existence_window(branches: list[Branch],
                            sweep_range: tuple[float, float] | None = None,
                            grid_spacing: float = 0.0):
    """Smallest and largest mu carrying a nontrivial solution, or None.

    When the window touches the sweep range the corresponding truncation
    flag is set."""
    mus = []
    for br in branches:
        if br.trivial:
            continue
        mus.extend(q.mu for q in br.points)
    if not mus:
        return None
    m0 = float(min(mus))
    m1 = float(max(mus))
    out = {"m0": m0, "m1": m1, "truncated_lo": False, "truncated_hi": False}
    if sweep_range is not None:
        tol = max(grid_spacing * 0.5, 1e-9)
        out["truncated_lo"] = m0 <= sweep_range[0] + tol
        out["truncated_hi"] = m1 >= sweep_range[1] - tol
    return out


def conjecture_scan(w: WeightSpec, gspec: NonlinearitySpec, p: ParameterPair,
                    bc: BoundaryConditionType, kappa_list=None,
                    cfg: IntegratorConfig = DEFAULT_CONFIG, *,
                    shoot_kwargs: dict | None = None) -> dict:
    """Count solutions of a multi-hump problem at sections inside the
    last negativity interval and report the band fingerprints.

    Exploratory: the combinatorial growth of crossings with the number of
    positivity intervals is reported, never asserted."""
    if kappa_list is None:
        lo, hi = w.section_bounds()
        if w.humps == 1:
            kappa_list = [w.default_section()]
        else:
            kappa_list = [lo + f * (hi - lo) for f in (0.25, 0.5, 0.75)]
    report = {"humps": w.humps, "lambda": p.lam, "mu": p.mu, "bc": bc.name,
              "expected_if_conjectured": 3 ** w.humps - 1, "sections": []}
    for kap in kappa_list:
        sols = solve_multiplicity(w, gspec, p, bc, float(kap), cfg,
                                  shoot_kwargs=shoot_kwargs)
        report["sections"].append({
            "kappa": float(kap),
            "count": len(sols),
            "bands": [[s.band_left, s.band_right] for s in sols],
            "u0": [s.u0 for s in sols],
        })
    report["count"] = max((sec["count"] for sec in report["sections"]),
                          default=0)
    return report


# ---------------------------------------------------------------------------
# export helpers


def branches_to_csv(branches: list[Branch], path, provenance: str | None = None):
    rows = ["branch_id,mu,u0,du0,band_l,band_r,tag"]
    if provenance:
        rows.insert(0, f"# {provenance}")
    for br in branches:
        for q in br.points:
            rows.append(f"{br.branch_id},{q.mu:.17g},{q.u0:.17g},"
                        f"{q.du0:.17g},{q.band_l},{q.band_r},{q.tag}")
    with open(path, "w") as fh:
        fh.write("\n".join(rows) + "\n")


def sweep_summary(branches: list[Branch], sc: SweepConfig) -> dict:
    grid = sc.grid()
    window = detect_existence_window(branches, (sc.mu_min, sc.mu_max),
                                     grid[1] - grid[0])
    return {
        "lambda": sc.lam,
        "bc": sc.bc.name,
        "mu_range": [sc.mu_min, sc.mu_max],
        "n_steps": sc.n_steps,
        "branches": [{
            "id": br.branch_id,
            "n_points": len(br.points),
            "closed": br.closed,
            "fragile": br.fragile,
            "trivial": br.trivial,
            "singular": [{"mu": m, "u0": u, "kind": k}
                         for (m, u, k) in br.singular_tags],
        } for br in branches],
        "existence_window": window,
    }
