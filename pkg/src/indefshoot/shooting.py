"""Boundary value solving by continua intersection.

For each boundary condition the matching forward and backward initial
sets are deformed to a common section; crossings of the two curves
inside the open strip are refined into phase points, polished into full
trajectories on [0, T], and verified (positivity, interiority, equation
and boundary residuals) before being returned.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import _kernels as K
from .errors import AdmissibilityError
from .integrator import (DEFAULT_CONFIG, IntegratorConfig, PhasePoint,
                         Trajectory, integrate, poincare_map_batch)
from .model import (NonlinearitySpec, ParameterPair, WeightSpec, delta_tilde,
                    delta_tilde_backward)
from .phaseplane import (INTERIOR, SET_X01, SET_Y_GE0, SET_Y_LE0, Continuum,
                         InitialSet, shoot_set_sections)

log = logging.getLogger("indefshoot")

NONTRIVIAL_FLOOR = 1e-6      # max u below this is the zero solution's shadow
NEAR_ONE_CEIL = 1.0 - 1e-6   # min u above this is the u=1 shadow
EQ_RESIDUAL_TOL = 1e-6
BC_RESIDUAL_TOL = 1e-8


class EndCondition(Enum):
    VALUE_ZERO = "value_zero"
    SLOPE_ZERO = "slope_zero"


@dataclass(frozen=True)
class BoundaryConditionType:
    """Which datum vanishes at each end of [0, T]."""

    left: EndCondition
    right: EndCondition

    @classmethod
    def dirichlet(cls):
        return cls(EndCondition.VALUE_ZERO, EndCondition.VALUE_ZERO)

    @classmethod
    def neumann(cls):
        return cls(EndCondition.SLOPE_ZERO, EndCondition.SLOPE_ZERO)

    @classmethod
    def mixed1(cls):
        """u(0) = 0, u'(T) = 0."""
        return cls(EndCondition.VALUE_ZERO, EndCondition.SLOPE_ZERO)

    @classmethod
    def mixed2(cls):
        """u'(0) = 0, u(T) = 0."""
        return cls(EndCondition.SLOPE_ZERO, EndCondition.VALUE_ZERO)

    @classmethod
    def from_name(cls, name: str) -> "BoundaryConditionType":
        table = {"dirichlet": cls.dirichlet, "neumann": cls.neumann,
                 "mixed1": cls.mixed1, "mixed2": cls.mixed2}
        try:
            return table[name.lower()]()
        except KeyError:
            raise AdmissibilityError(
                f"unknown boundary condition {name!r}; choose from "
                f"{sorted(table)}") from None

    @property
    def name(self) -> str:
        key = (self.left, self.right)
        return {
            (EndCondition.VALUE_ZERO, EndCondition.VALUE_ZERO): "dirichlet",
            (EndCondition.SLOPE_ZERO, EndCondition.SLOPE_ZERO): "neumann",
            (EndCondition.VALUE_ZERO, EndCondition.SLOPE_ZERO): "mixed1",
            (EndCondition.SLOPE_ZERO, EndCondition.VALUE_ZERO): "mixed2",
        }[key]


@dataclass
class IntersectionPoint:
    """A refined crossing of the forward and backward continua."""

    s_left: float
    s_right: float
    point: np.ndarray
    band_left: int
    band_right: int
    residual: float
    quality: str                # "refined" | "unrefined"


@dataclass
class BvpSolution:
    """A verified positive solution.

    The trajectory is the dense forward solution on [0, T] launched from
    the polished left datum; residuals are recomputed from it.
    """

    bc: BoundaryConditionType
    p: ParameterPair
    kappa: float
    section_point: PhasePoint
    left_param: float
    right_param: float
    band_left: int
    band_right: int
    trajectory: Trajectory
    u0: float
    du0: float
    uT: float
    duT: float
    residual_eq: float
    residual_bc_left: float
    residual_bc_right: float
    match_gap: float
    quality: str = "refined"
    kappa_agreement: bool = True

    @property
    def bands(self) -> tuple[int, int]:
        return (self.band_left, self.band_right)


def _band_polyline(c: Continuum, band: tuple[float, float]):
    """Samples inside one interior band plus geometric padding toward the
    band ends, so crossings close to the strip boundary are visible."""
    lo, hi = band
    width = hi - lo
    mask = (c.s >= lo) & (c.s <= hi) & (c.labels == INTERIOR)
    s_in = c.s[mask]
    img_in = c.images[mask]
    if width <= 0:
        return s_in, img_in
    offs = width * np.array([1e-8, 1e-7, 1e-6, 1e-5, 1e-4, 1e-3])
    extra = np.concatenate([[lo], lo + offs, hi - offs, [hi]])
    extra = extra[(extra >= lo) & (extra <= hi)]
    extra = np.setdiff1d(extra, s_in)
    if extra.size:
        img_x, _, _ = c.map_params(extra)
        s_all = np.concatenate([s_in, extra])
        img_all = np.vstack([img_in, img_x])
        order = np.argsort(s_all, kind="stable")
        return s_all[order], img_all[order]
    return s_in, img_in


def intersect_continua(cf: Continuum, cb: Continuum, *,
                       refine_tol: float = 1e-10, dedup_tol: float = 1e-8,
                       max_iter: int = 100) -> list[IntersectionPoint]:
    """All crossings of the interior-band polylines of two continua
    sharing a section, refined by a damped quasi-Newton iteration on the
    pair of initial parameters."""
    if abs(cf.section_time - cb.section_time) > 1e-12:
        raise AdmissibilityError("continua must share their section time")
    sf = cf.crossings()
    sb = cb.crossings()

    candidates = []
    for bi, bandf in enumerate(sf.interior_bands):
        s_f, P_f = _band_polyline(cf, bandf)
        if s_f.size < 2:
            continue
        for bj, bandb in enumerate(sb.interior_bands):
            s_b, P_b = _band_polyline(cb, bandb)
            if s_b.size < 2:
                continue

            def tangents(i, j):
                tf = (P_f[i + 1] - P_f[i]) / max(s_f[i + 1] - s_f[i], 1e-300)
                tb_vec = (P_b[j + 1] - P_b[j]) / max(s_b[j + 1] - s_b[j], 1e-300)
                return np.column_stack([tf, -tb_vec])

            hits = K.segment_pair_hits(np.ascontiguousarray(P_f),
                                       np.ascontiguousarray(P_b), 4096)
            for row in hits:
                i, j, ta, tb = int(row[0]), int(row[1]), row[2], row[3]
                sl = s_f[i] + ta * (s_f[i + 1] - s_f[i])
                sr = s_b[j] + tb * (s_b[j + 1] - s_b[j])
                candidates.append(dict(sl=sl, sr=sr, band=(bi, bj),
                                       bandf=bandf, bandb=bandb,
                                       J=tangents(i, j), origin="hit"))

            # near-parallel arcs can cross between polyline vertices with
            # no segment crossing; closest-approach pairs on decimated
            # polylines seed extra candidates
            stride_f = max(1, (s_f.size - 1) // 2000)
            stride_b = max(1, (s_b.size - 1) // 2000)
            idx_f = np.unique(np.append(np.arange(0, s_f.size, stride_f),
                                        s_f.size - 1))
            idx_b = np.unique(np.append(np.arange(0, s_b.size, stride_b),
                                        s_b.size - 1))
            Pd_f = np.ascontiguousarray(P_f[idx_f])
            Pd_b = np.ascontiguousarray(P_b[idx_b])
            near_tol = 2e-2 * max(1.0, float(stride_f + stride_b) / 8.0)
            near = K.segment_near_pairs(Pd_f, Pd_b, near_tol, 40000)
            if near.shape[0]:
                dist = {}
                for row in near:
                    dist[(int(row[0]), int(row[1]))] = row[4]
                kept = []
                for row in near:
                    i, j, d = int(row[0]), int(row[1]), row[4]
                    local_min = True
                    for di in (-1, 0, 1):
                        for dj in (-1, 0, 1):
                            other = dist.get((i + di, j + dj))
                            if other is not None and other < d:
                                local_min = False
                    if local_min:
                        kept.append(row)
                kept.sort(key=lambda r: r[4])
                for row in kept[:8]:
                    i, j, ta, tb = int(row[0]), int(row[1]), row[2], row[3]
                    i0, i1 = idx_f[i], idx_f[min(i + 1, idx_f.size - 1)]
                    j0, j1 = idx_b[j], idx_b[min(j + 1, idx_b.size - 1)]
                    sl = s_f[i0] + ta * (s_f[i1] - s_f[i0])
                    sr = s_b[j0] + tb * (s_b[j1] - s_b[j0])
                    candidates.append(dict(
                        sl=sl, sr=sr, band=(bi, bj), bandf=bandf, bandb=bandb,
                        J=tangents(min(i0, s_f.size - 2), min(j0, s_b.size - 2)),
                        origin="near"))
    candidates.sort(key=lambda cd: (cd["band"], cd["sl"], cd["sr"]))

    def f_images(side, svals):
        c = cf if side == "f" else cb
        img, _, _ = c.map_params(np.asarray(svals))
        return img

    results = []
    for cand in candidates:
        sl, sr = cand["sl"], cand["sr"]
        J = cand["J"].copy()
        lof, hif = cand["bandf"]
        lob, hib = cand["bandb"]
        Fl = f_images("f", [sl])[0]
        Fr = f_images("b", [sr])[0]
        F = Fl - Fr
        stall = 0
        for _ in range(max_iter):
            if np.max(np.abs(F)) <= refine_tol:
                break
            try:
                step = np.linalg.solve(J, -F)
            except np.linalg.LinAlgError:
                step = -F * 1e-3
            # damped update, clamped to the band closures
            lam_d = 1.0
            sl_n, sr_n, Fl_n, Fr_n, F_n = sl, sr, Fl, Fr, F
            for _ in range(7):
                sl_t = min(max(sl + lam_d * step[0], lof), hif)
                sr_t = min(max(sr + lam_d * step[1], lob), hib)
                Fl_t = f_images("f", [sl_t])[0]
                Fr_t = f_images("b", [sr_t])[0]
                F_t = Fl_t - Fr_t
                if np.max(np.abs(F_t)) < np.max(np.abs(F)) or lam_d <= 1 / 64:
                    sl_n, sr_n, Fl_n, Fr_n, F_n = sl_t, sr_t, Fl_t, Fr_t, F_t
                    break
                lam_d *= 0.5
            ds = np.array([sl_n - sl, sr_n - sr])
            dF = F_n - F
            nrm = float(ds @ ds)
            if nrm > 0.0:
                J = J + np.outer(dF - J @ ds, ds) / nrm
            improved = np.max(np.abs(F_n)) < 0.9 * np.max(np.abs(F))
            sl, sr, Fl, Fr, F = sl_n, sr_n, Fl_n, Fr_n, F_n
            stall = 0 if improved else stall + 1
            if stall >= 3 and np.max(np.abs(F)) > refine_tol:
                # finite-difference refresh of the jacobian
                hf = max(1e-12, min(1e-7, 0.25 * (hif - lof)))
                hb = max(1e-12, min(1e-7, 0.25 * (hib - lob)))
                slp = sl + hf if sl + hf <= hif else sl - hf
                srp = sr + hb if sr + hb <= hib else sr - hb
                col0 = ((f_images("f", [slp])[0] - Fl) / (slp - sl)
                        if slp != sl else J[:, 0])
                col1 = (-(f_images("b", [srp])[0] - Fr) / (srp - sr)
                        if srp != sr else J[:, 1])
                J = np.column_stack([col0, col1])
                stall = 0
        best = float(np.max(np.abs(F)))
        quality = "refined" if best <= refine_tol else "unrefined"
        if quality == "unrefined" and cand["origin"] == "near":
            continue          # speculative candidate that never converged
        results.append(IntersectionPoint(
            s_left=float(sl), s_right=float(sr), point=0.5 * (Fl + Fr),
            band_left=cand["band"][0], band_right=cand["band"][1],
            residual=best, quality=quality))

    # merge duplicates
    merged: list[IntersectionPoint] = []
    for r in sorted(results, key=lambda r: (r.s_left, r.s_right)):
        dup = False
        for m in merged:
            if (abs(r.s_left - m.s_left) <= dedup_tol
                    and abs(r.s_right - m.s_right) <= dedup_tol):
                dup = True
                if r.residual < m.residual:
                    m.s_left, m.s_right = r.s_left, r.s_right
                    m.point, m.residual, m.quality = r.point, r.residual, r.quality
                break
        if not dup:
            merged.append(r)
    if any(r.quality == "unrefined" for r in merged):
        log.warning("%d intersection(s) left unrefined",
                    sum(r.quality == "unrefined" for r in merged))
    return merged


def _initial_datum(bc_left: EndCondition, s: float) -> PhasePoint:
    if bc_left == EndCondition.VALUE_ZERO:
        return PhasePoint(0.0, float(s))
    return PhasePoint(float(s), 0.0)


def _right_residual_batch(w, gspec, p, bc, svals, cfg):
    """Signed right-end boundary residual of full forward runs launched
    from the left data svals."""
    svals = np.atleast_1d(np.asarray(svals, dtype=float))
    if bc.left == EndCondition.VALUE_ZERO:
        pts = np.column_stack([np.zeros_like(svals), svals])
    else:
        pts = np.column_stack([svals, np.zeros_like(svals)])
    res = poincare_map_batch(w, gspec, p, 0.0, w.duration, pts, cfg)
    end = res.states[:, -1, :]
    if bc.right == EndCondition.VALUE_ZERO:
        return end[:, 0]
    return end[:, 1]


def _polish_left_param(w, gspec, p, bc, s0, band, cfg, *, target=1e-11,
                       max_iter=30, bracket_probe=1e-7):
    """Secant on the scalar right-end residual as a function of the left
    parameter; the left condition holds exactly by construction.

    Returns (s, |residual|, bracketed).  `bracketed` requires a sign
    change of the residual across the polished parameter: the trivial
    states shed one-signed residual shadows (the slope ratio of g
    vanishes at 0, so any fixed tolerance admits them), and those must
    not count as roots."""
    lo, hi = band
    width = max(hi - lo, 1e-12)

    def psi(sv):
        return float(_right_residual_batch(w, gspec, p, bc, [sv], cfg)[0])

    s_prev = s0
    f_prev = psi(s_prev)
    best_s, best_f = s_prev, abs(f_prev)
    if best_f > target:
        step0 = max(1e-10, 1e-6 * width)
        s_cur = min(max(s0 + step0, lo), hi)
        if s_cur == s_prev:
            s_cur = s_prev - step0
        f_cur = psi(s_cur)
        if abs(f_cur) < best_f:
            best_s, best_f = s_cur, abs(f_cur)
        for _ in range(max_iter):
            if abs(f_cur) <= target:
                break
            den = f_cur - f_prev
            if den == 0.0:
                break
            s_next = s_cur - f_cur * (s_cur - s_prev) / den
            s_next = min(max(s_next, lo - 0.05 * width), hi + 0.05 * width)
            f_next = psi(s_next)
            s_prev, f_prev = s_cur, f_cur
            s_cur, f_cur = s_next, f_next
            if abs(f_cur) < best_f:
                best_s, best_f = s_cur, abs(f_cur)
    f_lo = psi(best_s - bracket_probe)
    f_hi = psi(best_s + bracket_probe)
    bracketed = (f_lo > 0.0) != (f_hi > 0.0) or f_lo == 0.0 or f_hi == 0.0
    return best_s, best_f, bracketed


def verify_solution(sol: BvpSolution, w: WeightSpec,
                    gspec: NonlinearitySpec, *, n_grid: int = 1000,
                    fd_step: float = 1e-5, eq_tol: float | None = None) -> dict:
    """Recompute the equation and boundary residuals of a solution from
    its dense trajectory; returns a report with pass/fail per criterion.

    The finite-difference equation residual sees the dense-output
    interpolation noise (about 2e3 * rel_tol at the default step), so its
    pass threshold scales with the tolerance the trajectory was computed
    at, floored at the headline 1e-6."""
    T = w.duration
    ts = np.linspace(0.0, T, n_grid + 2)[1:-1]
    # keep the centered difference clear of the weight's derivative kinks
    for node in w.breakpoints[1:-1]:
        close = np.abs(ts - node) < 2.5 * fd_step
        ts[close] = node + np.where(ts[close] >= node, 3.0 * fd_step,
                                    -3.0 * fd_step)
    st = sol.trajectory.eval(ts)
    x = st[:, 0]
    y_hi = sol.trajectory.eval(ts + fd_step)[:, 1]
    y_lo = sol.trajectory.eval(ts - fd_step)[:, 1]
    dy = (y_hi - y_lo) / (2.0 * fd_step)
    from .model import eval_weight
    field = -eval_weight(w, sol.p, ts) * gspec(x)
    eq_resid = float(np.max(np.abs(dy - field)))

    start = sol.trajectory.states[0]
    end = sol.trajectory.states[-1]
    bc_l = abs(start[0]) if sol.bc.left == EndCondition.VALUE_ZERO else abs(start[1])
    bc_r = abs(end[0]) if sol.bc.right == EndCondition.VALUE_ZERO else abs(end[1])

    umin = float(np.min(x))
    umax = float(np.max(x))
    if eq_tol is None:
        eq_tol = EQ_RESIDUAL_TOL
    report = {
        "eq_residual": eq_resid,
        "bc_residual_left": float(bc_l),
        "bc_residual_right": float(bc_r),
        "u_min": umin,
        "u_max": umax,
        "pass_equation": eq_resid < eq_tol,
        "pass_bc": bc_l < BC_RESIDUAL_TOL and bc_r < BC_RESIDUAL_TOL,
        "pass_interior": bool(0.0 < umin and umax < 1.0),
        "pass_nontrivial": bool(umax >= NONTRIVIAL_FLOOR
                                and umin <= NEAR_ONE_CEIL),
    }
    report["pass_all"] = all(report[k] for k in
                             ("pass_equation", "pass_bc", "pass_interior",
                              "pass_nontrivial"))
    return report


def _forward_set(bc: BoundaryConditionType, w, gspec, lam) -> InitialSet:
    if bc.left == EndCondition.VALUE_ZERO:
        cap = 2.0 * delta_tilde(w, gspec, lam)
        return InitialSet(SET_Y_GE0, 0.0, y_cap=cap)
    return InitialSet(SET_X01, 0.0)


def _backward_set(bc: BoundaryConditionType, w, gspec, lam) -> InitialSet:
    if bc.right == EndCondition.VALUE_ZERO:
        cap = 2.0 * delta_tilde_backward(w, gspec, lam)
        return InitialSet(SET_Y_LE0, w.duration, y_cap=cap)
    return InitialSet(SET_X01, w.duration)


def _solve_at_section(w, gspec, p, bc, cf: Continuum, cb: Continuum,
                      cfg) -> list[BvpSolution]:
    kappa = cf.section_time
    raw = intersect_continua(cf, cb)
    out = []
    for r in raw:
        s_pol, psi, bracketed = _polish_left_param(
            w, gspec, p, bc, r.s_left,
            cf.crossings().interior_bands[r.band_left], cfg)
        if not bracketed:
            log.info("candidate at s_l=%.6g dropped: right residual has no "
                     "sign change (trivial-state shadow)", r.s_left)
            continue
        traj = integrate(w, gspec, p, 0.0, w.duration,
                         _initial_datum(bc.left, s_pol), cfg)
        sec = traj.eval(kappa)
        sol = BvpSolution(
            bc=bc, p=p, kappa=kappa,
            section_point=PhasePoint(float(sec[0]), float(sec[1])),
            left_param=float(s_pol), right_param=float(r.s_right),
            band_left=r.band_left, band_right=r.band_right,
            trajectory=traj,
            u0=float(traj.states[0, 0]), du0=float(traj.states[0, 1]),
            uT=float(traj.states[-1, 0]), duT=float(traj.states[-1, 1]),
            residual_eq=math.nan, residual_bc_left=math.nan,
            residual_bc_right=math.nan,
            match_gap=float(r.residual), quality=r.quality)
        # the FD residual floor scales with tolerance and field strength
        field_scale = (p.lam + p.mu) * gspec.gmax
        eq_tol = (max(EQ_RESIDUAL_TOL, 5e3 * cfg.rel_tol)
                  * max(1.0, field_scale / 3.0))
        rep = verify_solution(sol, w, gspec, eq_tol=eq_tol)
        sol.residual_eq = rep["eq_residual"]
        sol.residual_bc_left = rep["bc_residual_left"]
        sol.residual_bc_right = rep["bc_residual_right"]
        if not rep["pass_all"]:
            log.info("intersection at (s_l=%.6g, s_r=%.6g) rejected: %s",
                     r.s_left, r.s_right,
                     {k: v for k, v in rep.items() if k.startswith("pass")})
            continue
        out.append(sol)
    # drop duplicates that polished to the same solution
    dedup: list[BvpSolution] = []
    for solu in sorted(out, key=lambda sol_: (sol_.u0, sol_.du0)):
        if dedup and (abs(solu.u0 - dedup[-1].u0) < 1e-9
                      and abs(solu.du0 - dedup[-1].du0) < 1e-9):
            continue
        dedup.append(solu)
    return dedup


def solve_multiplicity(w: WeightSpec, gspec: NonlinearitySpec,
                       p: ParameterPair, bc: BoundaryConditionType,
                       kappa: float | None = None,
                       cfg: IntegratorConfig = DEFAULT_CONFIG, *,
                       kappa_check: bool = True,
                       shoot_kwargs: dict | None = None) -> list[BvpSolution]:
    """All verified positive solutions for one boundary condition.

    The result is sorted by (u(0), u'(0)).  A control run at a second
    section flags count discrepancies (tangential crossings are the
    dominant failure mode); disagreeing runs are merged.
    """
    lo, hi = w.section_bounds()
    if kappa is None:
        kappa = w.default_section()
    _check = None
    if kappa_check:
        _check = lo + 0.25 * (hi - lo)
        if abs(_check - kappa) < 1e-9:
            _check = lo + 0.75 * (hi - lo)
    sections = [kappa] if _check is None else [kappa, _check]

    fset = _forward_set(bc, w, gspec, p.lam)
    bset = _backward_set(bc, w, gspec, p.lam)
    kw = shoot_kwargs or {}
    fcont = shoot_set_sections(w, gspec, p, fset, sections, cfg, **kw)
    bcont = shoot_set_sections(w, gspec, p, bset, sections, cfg, **kw)

    primary = _solve_at_section(w, gspec, p, bc, fcont[0], bcont[0], cfg)
    if _check is None:
        return primary

    control = _solve_at_section(w, gspec, p, bc, fcont[1], bcont[1], cfg)
    if len(control) == len(primary):
        return primary

    log.warning("solution count disagrees between sections %.6g (%d) and "
                "%.6g (%d); merging", kappa, len(primary), _check,
                len(control))
    merged = list(primary)
    for sol in control:
        if all(abs(sol.u0 - m.u0) > 1e-6 or abs(sol.du0 - m.du0) > 1e-6
               for m in merged):
            sol.kappa_agreement = False
            merged.append(sol)
    for sol in merged:
        sol.kappa_agreement = len(control) == len(primary)
    merged.sort(key=lambda sol_: (sol_.u0, sol_.du0))
    return merged


def solution_records(solutions: list[BvpSolution]) -> list[dict]:
    """Plain-dict export records, one per solution."""
    out = []
    for sol in solutions:
        out.append({
            "bc": sol.bc.name,
            "lambda": sol.p.lam,
            "mu": sol.p.mu,
            "kappa": sol.kappa,
            "u0": sol.u0,
            "du0": sol.du0,
            "uT": sol.uT,
            "duT": sol.duT,
            "bands": [sol.band_left, sol.band_right],
            "residuals": {"eq": sol.residual_eq,
                          "bcL": sol.residual_bc_left,
                          "bcR": sol.residual_bc_right},
        })
    return out
