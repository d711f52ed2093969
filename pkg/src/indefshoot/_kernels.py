"""Low-level numba kernels.

Weight and nonlinearity evaluation plus the adaptive Dormand-Prince 5(4)
integration core with quartic dense output and strip-boundary crossing
recording.  Everything is data-driven (kind enums + parameter arrays, no
closures), so a single compilation serves every weight/nonlinearity
instance.
"""

import math

import numpy as np
from numba import njit, prange

# weight kinds (kept in sync with the packers in model.py)
W_SIN_PI = 0
W_TABLE = 1
W_PIECEWISE = 2

# piecewise segment kinds
SEG_CONST = 0
SEG_SINE = 1
SEG_POLY = 2

# nonlinearity kinds
G_S2_1MS = 0
G_TABLE = 1

# Dormand-Prince 5(4) pair with Shampine's quartic interpolant.
DP_C = np.array([0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0])
DP_A = np.array([
    [0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0,
     -5103.0 / 18656.0],
])
DP_B = np.array([35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0,
                 -2187.0 / 6784.0, 11.0 / 84.0])
DP_E = np.array([71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0,
                 -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0])
DP_P = np.array([
    [1.0, -8048581381.0 / 2820520608.0, 8663915743.0 / 2820520608.0,
     -12715105075.0 / 11282082432.0],
    [0.0, 0.0, 0.0, 0.0],
    [0.0, 131558114200.0 / 32700410799.0, -68118460800.0 / 10900136933.0,
     87487479700.0 / 32700410799.0],
    [0.0, -1754552775.0 / 470086768.0, 14199869525.0 / 1410260304.0,
     -10690763975.0 / 1880347072.0],
    [0.0, 127303824393.0 / 49829197408.0, -318862633887.0 / 49829197408.0,
     701980252875.0 / 199316789632.0],
    [0.0, -282668133.0 / 205662961.0, 2019193451.0 / 616988883.0,
     -1453857185.0 / 822651844.0],
    [0.0, 40617522.0 / 29380423.0, -110615467.0 / 29380423.0,
     69997945.0 / 29380423.0],
])

# integrate_core status codes
OK = 0
STEP_UNDERFLOW = 1
STEP_LIMIT = 2

_MAX_STEPS = 5_000_000


@njit(cache=True)
def _bisect_right(arr, v):
    lo = 0
    hi = arr.size
    while lo < hi:
        mid = (lo + hi) // 2
        if v < arr[mid]:
            hi = mid
        else:
            lo = mid + 1
    return lo


@njit(cache=True)
def _lin_interp(ts, vs, t):
    n = ts.size
    if t <= ts[0]:
        return vs[0]
    if t >= ts[n - 1]:
        return vs[n - 1]
    i = _bisect_right(ts, t)
    if i >= n:
        i = n - 1
    lo = i - 1
    w = (t - ts[lo]) / (ts[i] - ts[lo])
    return vs[lo] * (1.0 - w) + vs[i] * w


@njit(cache=True)
def eval_a(t, wkind, wnodes, wsegk, wsegp, wtabt, wtaba):
    if wkind == W_SIN_PI:
        return math.sin(math.pi * t)
    if wkind == W_TABLE:
        return _lin_interp(wtabt, wtaba, t)
    # piecewise: wnodes is the full breakpoint grid, endpoints included
    n = wnodes.size
    i = _bisect_right(wnodes, t) - 1
    if i < 0:
        i = 0
    if i > n - 2:
        i = n - 2
    k = wsegk[i]
    lo = wnodes[i]
    hi = wnodes[i + 1]
    if k == SEG_CONST:
        return wsegp[i, 0]
    if k == SEG_SINE:
        return wsegp[i, 0] * math.sin(math.pi * (t - lo) / (hi - lo))
    deg = int(wsegp[i, 0])
    acc = 0.0
    for j in range(deg, -1, -1):
        acc = acc * t + wsegp[i, 1 + j]
    return acc


@njit(cache=True)
def eval_a_batch(ts, wkind, wnodes, wsegk, wsegp, wtabt, wtaba):
    out = np.empty(ts.size)
    for i in range(ts.size):
        out[i] = eval_a(ts[i], wkind, wnodes, wsegk, wsegp, wtabt, wtaba)
    return out


@njit(cache=True)
def eval_g(s, gkind, gtabs, gtabv):
    # zero extension outside [0,1]
    if s <= 0.0 or s >= 1.0:
        return 0.0
    if gkind == G_S2_1MS:
        return s * s * (1.0 - s)
    return _lin_interp(gtabs, gtabv, s)


@njit(cache=True)
def eval_weight_term(t, lam, mu, wkind, wnodes, wsegk, wsegp, wtabt, wtaba):
    a = eval_a(t, wkind, wnodes, wsegk, wsegp, wtabt, wtaba)
    if a > 0.0:
        return lam * a
    if a < 0.0:
        return mu * a
    return 0.0


@njit(cache=True)
def integrate_core(t0, t1, x0, y0, lam, mu,
                   wkind, wnodes, wsegk, wsegp, wtabt, wtaba,
                   gkind, gtabs, gtabv,
                   rtol, atol, max_step, event_tol,
                   s_record, want_dense):
    """March the planar field from (x0, y0) at t0 to t1.

    Runs in the internal coordinate s in [0, L] with t = t0 + d*s, so a
    backward request integrates the time-reversed field forward.  Weight
    nodes and every entry of `s_record` are mandatory step endpoints.
    Crossings of x=0 and x=1 are located on the dense quartic and
    recorded; they never stop the march.

    Returns (status, fail_s, rec, exit_code, exit_s, n_steps,
             S, Y, Q, EV) where rec holds the state at each s_record,
    S/Y/Q the dense step data (empty unless want_dense) and EV the
    crossing events as rows (s, level, direction-in-s).
    """
    d = 1.0 if t1 >= t0 else -1.0
    L = abs(t1 - t0)
    nrec = s_record.size
    rec = np.empty((nrec, 2))

    tol_s = 1e-14 * (L + 1.0)

    # ascending breakpoints: interior weight nodes + record points
    nn = wnodes.size
    tlo = min(t0, t1)
    thi = max(t0, t1)
    tmp = np.empty(nn + nrec + 1)
    m = 0
    for i in range(nn):
        v = wnodes[i]
        if tlo < v < thi:
            tmp[m] = d * (v - t0)
            m += 1
    for i in range(nrec):
        tmp[m] = s_record[i]
        m += 1
    b = np.sort(tmp[:m])
    breaks = np.empty(m + 1)
    q = 0
    for i in range(m):
        if b[i] <= tol_s or b[i] > L + tol_s:
            continue
        if q > 0 and b[i] - breaks[q - 1] <= tol_s:
            continue
        breaks[q] = b[i]
        q += 1
    if q == 0 or abs(breaks[q - 1] - L) > tol_s:
        breaks[q] = L
        q += 1
    else:
        breaks[q - 1] = L

    # dense storage (grown by doubling)
    cap = 1024 if want_dense else 1
    S = np.empty(cap + 1)
    Y = np.empty((cap + 1, 2))
    Q = np.empty((cap, 2, 4))
    S[0] = 0.0
    Y[0, 0] = x0
    Y[0, 1] = y0
    nacc = 0

    ev_cap = 16
    EV = np.empty((ev_cap, 3))
    nev = 0
    exit_code = 0
    exit_s = np.nan

    x = x0
    y = y0
    status = OK
    fail_s = 0.0
    nsteps = 0

    rec_i = 0
    while rec_i < nrec and s_record[rec_i] <= tol_s:
        rec[rec_i, 0] = x
        rec[rec_i, 1] = y
        rec_i += 1

    kx = np.empty(7)
    ky = np.empty(7)

    s_cur = 0.0
    h = 0.0
    for bi in range(q):
        if status != OK:
            break
        seg_hi = breaks[bi]
        if seg_hi - s_cur > tol_s:
            # fresh derivative at the segment start (weight may jump at a node)
            t = t0 + d * s_cur
            w = eval_weight_term(t, lam, mu, wkind, wnodes, wsegk, wsegp,
                                 wtabt, wtaba)
            f0x = d * y
            f0y = -d * w * eval_g(x, gkind, gtabs, gtabv)

            # starting step size: forward-Euler probe
            sc_x = atol + rtol * abs(x)
            sc_y = atol + rtol * abs(y)
            d0 = math.sqrt(0.5 * ((x / sc_x) ** 2 + (y / sc_y) ** 2))
            d1 = math.sqrt(0.5 * ((f0x / sc_x) ** 2 + (f0y / sc_y) ** 2))
            if d0 < 1e-5 or d1 < 1e-5:
                h0 = 1e-6
            else:
                h0 = 0.01 * d0 / d1
            h0 = min(h0, seg_hi - s_cur)
            xp = x + h0 * f0x
            yp = y + h0 * f0y
            tp = t0 + d * (s_cur + h0)
            wp = eval_weight_term(tp, lam, mu, wkind, wnodes, wsegk, wsegp,
                                  wtabt, wtaba)
            f1x = d * yp
            f1y = -d * wp * eval_g(xp, gkind, gtabs, gtabv)
            d2 = math.sqrt(0.5 * (((f1x - f0x) / sc_x) ** 2
                                  + ((f1y - f0y) / sc_y) ** 2)) / h0
            dm = max(d1, d2)
            if dm <= 1e-15:
                h1 = max(1e-6, h0 * 1e-3)
            else:
                h1 = (0.01 / dm) ** 0.2
            h = min(100.0 * h0, h1, max_step, seg_hi - s_cur)

            while seg_hi - s_cur > tol_s:
                if h < 1e-14 * max(L, 1e-30):
                    status = STEP_UNDERFLOW
                    fail_s = s_cur
                    break
                if nsteps >= _MAX_STEPS:
                    status = STEP_LIMIT
                    fail_s = s_cur
                    break
                if h > seg_hi - s_cur:
                    h = seg_hi - s_cur
                nsteps += 1

                kx[0] = f0x
                ky[0] = f0y
                for st in range(1, 6):
                    ax = 0.0
                    ay = 0.0
                    for j in range(st):
                        ax += DP_A[st, j] * kx[j]
                        ay += DP_A[st, j] * ky[j]
                    xs = x + h * ax
                    ys = y + h * ay
                    ts_ = t0 + d * (s_cur + DP_C[st] * h)
                    ws = eval_weight_term(ts_, lam, mu, wkind, wnodes, wsegk,
                                          wsegp, wtabt, wtaba)
                    kx[st] = d * ys
                    ky[st] = -d * ws * eval_g(xs, gkind, gtabs, gtabv)
                bx = 0.0
                by = 0.0
                for j in range(6):
                    bx += DP_B[j] * kx[j]
                    by += DP_B[j] * ky[j]
                x_new = x + h * bx
                y_new = y + h * by
                t_new = t0 + d * (s_cur + h)
                w_new = eval_weight_term(t_new, lam, mu, wkind, wnodes, wsegk,
                                         wsegp, wtabt, wtaba)
                kx[6] = d * y_new
                ky[6] = -d * w_new * eval_g(x_new, gkind, gtabs, gtabv)

                ex = 0.0
                ey = 0.0
                for j in range(7):
                    ex += DP_E[j] * kx[j]
                    ey += DP_E[j] * ky[j]
                sc_x = atol + rtol * max(abs(x), abs(x_new))
                sc_y = atol + rtol * max(abs(y), abs(y_new))
                err = math.sqrt(0.5 * ((h * ex / sc_x) ** 2
                                       + (h * ey / sc_y) ** 2))

                if err <= 1.0:
                    # candidate accepted: dense coefficients, crossing scan
                    q0x = 0.0
                    q1x = 0.0
                    q2x = 0.0
                    q3x = 0.0
                    q0y = 0.0
                    q1y = 0.0
                    q2y = 0.0
                    q3y = 0.0
                    for j in range(7):
                        q0x += kx[j] * DP_P[j, 0]
                        q1x += kx[j] * DP_P[j, 1]
                        q2x += kx[j] * DP_P[j, 2]
                        q3x += kx[j] * DP_P[j, 3]
                        q0y += ky[j] * DP_P[j, 0]
                        q1y += ky[j] * DP_P[j, 1]
                        q2y += ky[j] * DP_P[j, 2]
                        q3y += ky[j] * DP_P[j, 3]

                    # locate crossings of x=0 and x=1 on the quartic
                    ev_th = np.empty(8)
                    ev_lv = np.empty(8)
                    ev_dr = np.empty(8)
                    n_loc = 0
                    for lev_i in range(2):
                        level = 0.0 if lev_i == 0 else 1.0
                        fprev = x - level
                        thprev = 0.0
                        for si in range(1, 5):
                            th = 0.25 * si
                            fx = (x - level
                                  + h * th * (q0x + th * (q1x + th * (q2x + th * q3x))))
                            if fprev * fx < 0.0 and n_loc < 8:
                                ta = thprev
                                tb = th
                                fa = fprev
                                it = 0
                                while h * (tb - ta) > event_tol and it < 80:
                                    tm = 0.5 * (ta + tb)
                                    fm = (x - level
                                          + h * tm * (q0x + tm * (q1x + tm * (q2x + tm * q3x))))
                                    if fa * fm <= 0.0:
                                        tb = tm
                                    else:
                                        ta = tm
                                        fa = fm
                                    it += 1
                                ev_th[n_loc] = 0.5 * (ta + tb)
                                ev_lv[n_loc] = level
                                ev_dr[n_loc] = 1.0 if fx > fprev else -1.0
                                n_loc += 1
                            fprev = fx
                            thprev = th

                    # stepping across a smoothness break of the extended g
                    # (the strip edges) silently degrades the order, so
                    # retake the step to land just past the first crossing
                    if n_loc > 0:
                        th_first = 2.0
                        for j in range(n_loc):
                            if ev_th[j] < th_first:
                                th_first = ev_th[j]
                        th_land = th_first + max(1e-3, 4.0 * event_tol / h)
                        if th_land < 1.0 - 1e-3 and h > 1e-10 * (L + 1.0):
                            h = th_land * h
                            continue

                    # commit: record crossings in traversal order
                    for a_ in range(1, n_loc):
                        for b_ in range(a_, 0, -1):
                            if ev_th[b_] < ev_th[b_ - 1]:
                                ev_th[b_], ev_th[b_ - 1] = ev_th[b_ - 1], ev_th[b_]
                                ev_lv[b_], ev_lv[b_ - 1] = ev_lv[b_ - 1], ev_lv[b_]
                                ev_dr[b_], ev_dr[b_ - 1] = ev_dr[b_ - 1], ev_dr[b_]
                            else:
                                break
                    for j in range(n_loc):
                        s_ev = s_cur + ev_th[j] * h
                        if nev >= ev_cap:
                            ev_new = np.empty((ev_cap * 2, 3))
                            ev_new[:nev] = EV[:nev]
                            EV = ev_new
                            ev_cap *= 2
                        EV[nev, 0] = s_ev
                        EV[nev, 1] = ev_lv[j]
                        EV[nev, 2] = ev_dr[j]
                        nev += 1
                        if exit_code == 0:
                            if ev_lv[j] == 0.0 and ev_dr[j] < 0.0:
                                exit_code = -1
                                exit_s = s_ev
                            elif ev_lv[j] == 1.0 and ev_dr[j] > 0.0:
                                exit_code = 1
                                exit_s = s_ev

                    if want_dense:
                        if nacc >= cap:
                            cap2 = cap * 2
                            S2 = np.empty(cap2 + 1)
                            Y2 = np.empty((cap2 + 1, 2))
                            Q2 = np.empty((cap2, 2, 4))
                            S2[:nacc + 1] = S[:nacc + 1]
                            Y2[:nacc + 1] = Y[:nacc + 1]
                            Q2[:nacc] = Q[:nacc]
                            S = S2
                            Y = Y2
                            Q = Q2
                            cap = cap2
                        Q[nacc, 0, 0] = q0x
                        Q[nacc, 0, 1] = q1x
                        Q[nacc, 0, 2] = q2x
                        Q[nacc, 0, 3] = q3x
                        Q[nacc, 1, 0] = q0y
                        Q[nacc, 1, 1] = q1y
                        Q[nacc, 1, 2] = q2y
                        Q[nacc, 1, 3] = q3y
                        nacc += 1
                        S[nacc] = s_cur + h
                        Y[nacc, 0] = x_new
                        Y[nacc, 1] = y_new

                    s_cur += h
                    x = x_new
                    y = y_new
                    f0x = kx[6]
                    f0y = ky[6]
                    if err == 0.0:
                        fac = 10.0
                    else:
                        fac = min(10.0, 0.9 * err ** -0.2)
                    h = min(h * fac, max_step)
                else:
                    h *= max(0.2, 0.9 * err ** -0.2)

        if status != OK:
            break
        # flush records that fall on this breakpoint
        while rec_i < nrec and s_record[rec_i] <= s_cur + tol_s:
            rec[rec_i, 0] = x
            rec[rec_i, 1] = y
            rec_i += 1

    # records past a failure point are filled with the failure state
    while rec_i < nrec:
        rec[rec_i, 0] = x
        rec[rec_i, 1] = y
        rec_i += 1

    if want_dense:
        return (status, fail_s, rec, exit_code, exit_s, nsteps,
                S[:nacc + 1], Y[:nacc + 1], Q[:nacc], EV[:nev])
    return (status, fail_s, rec, exit_code, exit_s, nsteps,
            S[:0], Y[:0], Q[:0], EV[:nev])


@njit(cache=True, parallel=True)
def map_batch_core(t0, t1, pts, lam, mu,
                   wkind, wnodes, wsegk, wsegp, wtabt, wtaba,
                   gkind, gtabs, gtabv,
                   rtol, atol, max_step, event_tol, s_record):
    """Endpoint map for a batch of initial states, states recorded at each
    s_record section.  Rows of pts are independent; results do not depend
    on the parallel schedule."""
    n = pts.shape[0]
    k = s_record.size
    rec = np.empty((n, k, 2))
    code = np.empty(n, np.int64)
    es = np.empty(n)
    stat = np.empty(n, np.int64)
    fs = np.empty(n)
    nst = np.empty(n, np.int64)
    for i in prange(n):
        (st, fsi, reci, ec, esi, nsi,
         _S, _Y, _Q, _E) = integrate_core(
            t0, t1, pts[i, 0], pts[i, 1], lam, mu,
            wkind, wnodes, wsegk, wsegp, wtabt, wtaba,
            gkind, gtabs, gtabv,
            rtol, atol, max_step, event_tol, s_record, False)
        stat[i] = st
        fs[i] = fsi
        for j in range(k):
            rec[i, j, 0] = reci[j, 0]
            rec[i, j, 1] = reci[j, 1]
        code[i] = ec
        es[i] = esi
        nst[i] = nsi
    return stat, fs, rec, code, es, nst


@njit(cache=True)
def segment_near_pairs(P, Ql, dist_tol, max_hits):
    """Segment pairs closer than dist_tol (closest-approach parameters
    included).  Feeds crossing candidates for near-parallel or tangential
    arcs that the exact-intersection scan misses."""
    n = P.shape[0] - 1
    m = Ql.shape[0] - 1
    out = np.empty((max_hits, 5))
    c = 0
    for i in range(n):
        ax = P[i, 0]
        ay = P[i, 1]
        bx = P[i + 1, 0]
        by = P[i + 1, 1]
        lox = min(ax, bx) - dist_tol
        hix = max(ax, bx) + dist_tol
        loy = min(ay, by) - dist_tol
        hiy = max(ay, by) + dist_tol
        ux = bx - ax
        uy = by - ay
        uu = ux * ux + uy * uy
        for j in range(m):
            cx = Ql[j, 0]
            cy = Ql[j, 1]
            dx = Ql[j + 1, 0]
            dy = Ql[j + 1, 1]
            if max(cx, dx) < lox or min(cx, dx) > hix:
                continue
            if max(cy, dy) < loy or min(cy, dy) > hiy:
                continue
            vx = dx - cx
            vy = dy - cy
            vv = vx * vx + vy * vy
            wx = ax - cx
            wy = ay - cy
            uv = ux * vx + uy * vy
            uw = ux * wx + uy * wy
            vw = vx * wx + vy * wy
            den = uu * vv - uv * uv
            if den > 1e-30:
                ta = (uv * vw - vv * uw) / den
                tb = (uu * vw - uv * uw) / den
            else:
                ta = 0.0
                tb = vw / vv if vv > 0.0 else 0.0
            ta = min(max(ta, 0.0), 1.0)
            tb = min(max(tb, 0.0), 1.0)
            # re-clamp each against the other
            if vv > 0.0:
                tb = min(max((vw + uv * ta) / vv, 0.0), 1.0)
            if uu > 0.0:
                ta = min(max((uv * tb - uw) / uu, 0.0), 1.0)
            px = ax + ta * ux - (cx + tb * vx)
            py = ay + ta * uy - (cy + tb * vy)
            d = math.sqrt(px * px + py * py)
            if d < dist_tol and c < max_hits:
                out[c, 0] = i
                out[c, 1] = j
                out[c, 2] = ta
                out[c, 3] = tb
                out[c, 4] = d
                c += 1
    return out[:c]


@njit(cache=True)
def segment_pair_hits(P, Ql, max_hits):
    """Candidate crossings between two polylines (proper segment-segment
    intersections, bounding-box pruned).  Returns rows
    (i, j, ta, tb): segment indices and intra-segment parameters."""
    n = P.shape[0] - 1
    m = Ql.shape[0] - 1
    out = np.empty((max_hits, 4))
    c = 0
    for i in range(n):
        ax = P[i, 0]
        ay = P[i, 1]
        bx = P[i + 1, 0]
        by = P[i + 1, 1]
        lox = min(ax, bx)
        hix = max(ax, bx)
        loy = min(ay, by)
        hiy = max(ay, by)
        for j in range(m):
            cx = Ql[j, 0]
            cy = Ql[j, 1]
            dx = Ql[j + 1, 0]
            dy = Ql[j + 1, 1]
            if max(cx, dx) < lox or min(cx, dx) > hix:
                continue
            if max(cy, dy) < loy or min(cy, dy) > hiy:
                continue
            rx = bx - ax
            ry = by - ay
            sx = dx - cx
            sy = dy - cy
            den = rx * sy - ry * sx
            if den == 0.0:
                continue
            qpx = cx - ax
            qpy = cy - ay
            ta = (qpx * sy - qpy * sx) / den
            tb = (qpx * ry - qpy * rx) / den
            if -1e-12 <= ta <= 1.0 + 1e-12 and -1e-12 <= tb <= 1.0 + 1e-12:
                if c < max_hits:
                    out[c, 0] = i
                    out[c, 1] = j
                    out[c, 2] = min(max(ta, 0.0), 1.0)
                    out[c, 3] = min(max(tb, 0.0), 1.0)
                    c += 1
    return out[:c]
