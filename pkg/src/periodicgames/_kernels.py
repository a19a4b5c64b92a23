"""Compiled RK4 integration kernels.

Two families cover every experiment:

* linear kernels: interior learning (2-player or polymatrix) is linear in the
  concatenated state s, ds/dt = (Lbar + sum_k w_k(t) L_k) s, where each L_k is
  a block-assembled matrix and w_k is a unit wave of the game's k-th harmonic
  term.  2-player and polymatrix games differ only in how the blocks are laid
  out, so one kernel serves both.
* projected kernels: boundary-constrained learning integrates the dual
  (cumulative-gradient) state and pushes every payoff evaluation through a
  Euclidean simplex projection, which is nonlinear, so it gets its own field.

Wave angles advance by a rotation recurrence (two fused rotations per RK4
step) instead of calling cos/sin per stage: exact to ~1e-11 over the longest
runs here and several times faster.  Square/triangle values are recovered
from the running (cos, sin) pair.  Everything is fixed-order floating point,
so results are bit-reproducible regardless of thread count: each batch member
writes only its own output slots.

Sweep kernels do not store trajectories.  They track, per omega: extrema of
the observed coordinate, the trapezoid running integral of the state (for
time-averages), and the max/min of the running average over the final
verdict window.
"""

from __future__ import annotations

import numpy as np
from numba import njit, prange

TWO_OVER_PI = 2.0 / np.pi

#: steps between rotation-recurrence renormalizations and finiteness checks
_HOUSEKEEP = 4096


@njit(cache=True, inline="always")
def _wave_cs(kind, c, s):
    """Unit wave value at angle theta given (cos theta, sin theta)."""
    if kind == 0:
        return c
    if kind == 1:
        return s
    if kind == 2:
        # square: +1 on [0, pi), -1 on [pi, 2*pi); right-limit at the jumps
        if s > 0.0:
            return 1.0
        if s < 0.0:
            return -1.0
        return 1.0 if c >= 0.0 else -1.0
    # triangle = (2/pi) * asin(sin theta)
    return TWO_OVER_PI * np.arcsin(s)


@njit(cache=True, inline="always")
def _lin_apply(lbar, lks, wvals, s, out):
    """out = (Lbar + sum_k wvals[k] * L_k) @ s."""
    d = s.shape[0]
    for i in range(d):
        acc = 0.0
        for j in range(d):
            acc += lbar[i, j] * s[j]
        out[i] = acc
    for k in range(lks.shape[0]):
        w = wvals[k]
        if w != 0.0:
            for i in range(d):
                acc = 0.0
                for j in range(d):
                    acc += lks[k, i, j] * s[j]
                out[i] += w * acc


@njit(cache=True, inline="always")
def _proj_into(v, buf, out):
    """Euclidean projection of v onto the probability simplex (sort/cumsum)."""
    m = v.shape[0]
    for i in range(m):
        buf[i] = v[i]
    for i in range(1, m):  # insertion sort, descending; m is tiny
        key = buf[i]
        j = i - 1
        while j >= 0 and buf[j] < key:
            buf[j + 1] = buf[j]
            j -= 1
        buf[j + 1] = key
    csum = 0.0
    theta = 0.0
    for j in range(m):
        csum += buf[j]
        cand = (csum - 1.0) / (j + 1)
        if buf[j] - cand > 0.0:
            theta = cand
    for i in range(m):
        diff = v[i] - theta
        out[i] = diff if diff > 0.0 else 0.0


@njit(cache=True, inline="always")
def _proj_field(mean, amps, wvals, s, mx, px, py, bufx, bufy, out):
    """Dual field: d(x+)/dt = U(t) proj(y+), d(y+)/dt = -U(t)^T proj(x+)."""
    my = mean.shape[1]
    _proj_into(s[:mx], bufx, px)
    _proj_into(s[mx:], bufy, py)
    for i in range(mx):
        acc = 0.0
        for j in range(my):
            acc += mean[i, j] * py[j]
        out[i] = acc
    for j in range(my):
        acc = 0.0
        for i in range(mx):
            acc += mean[i, j] * px[i]
        out[mx + j] = -acc
    for k in range(amps.shape[0]):
        w = wvals[k]
        if w != 0.0:
            for i in range(mx):
                acc = 0.0
                for j in range(my):
                    acc += amps[k, i, j] * py[j]
                out[i] += w * acc
            for j in range(my):
                acc = 0.0
                for i in range(mx):
                    acc += amps[k, i, j] * px[i]
                out[mx + j] -= w * acc


@njit(cache=True, inline="always")
def _init_waves(kinds, mults, phases, omega, t0, h, cw, sw, cd, sd):
    for k in range(kinds.shape[0]):
        ang = mults[k] * omega * t0 + phases[k]
        cw[k] = np.cos(ang)
        sw[k] = np.sin(ang)
        half = mults[k] * omega * (0.5 * h)
        cd[k] = np.cos(half)
        sd[k] = np.sin(half)


@njit(cache=True, inline="always")
def _advance_waves(cw, sw, cd, sd):
    for k in range(cw.shape[0]):
        c = cw[k] * cd[k] - sw[k] * sd[k]
        s = sw[k] * cd[k] + cw[k] * sd[k]
        cw[k] = c
        sw[k] = s


@njit(cache=True, inline="always")
def _renorm_waves(cw, sw):
    for k in range(cw.shape[0]):
        r2 = cw[k] * cw[k] + sw[k] * sw[k]
        scale = 1.5 - 0.5 * r2  # first-order 1/sqrt(r2)
        cw[k] *= scale
        sw[k] *= scale


@njit(cache=True)
def linear_trajectory(lbar, lks, kinds, mults, phases, omega, s0, t0, h,
                      n_steps, stride):
    """Integrate the linear interior field, storing every stride-th state.

    Returns (samples, n_done): samples[0] is the initial state and n_done is
    the number of completed steps (< n_steps only after a non-finite abort).
    """
    d = s0.shape[0]
    kk = kinds.shape[0]
    n_samples = n_steps // stride + 1
    samples = np.zeros((n_samples, d))
    s = s0.copy()
    samples[0] = s
    k1 = np.empty(d); k2 = np.empty(d); k3 = np.empty(d); k4 = np.empty(d)
    st = np.empty(d)
    wv = np.empty(kk)
    cw = np.empty(kk); sw = np.empty(kk); cd = np.empty(kk); sd = np.empty(kk)
    _init_waves(kinds, mults, phases, omega, t0, h, cw, sw, cd, sd)
    n_done = 0
    for i in range(n_steps):
        for k in range(kk):
            wv[k] = _wave_cs(kinds[k], cw[k], sw[k])
        _lin_apply(lbar, lks, wv, s, k1)
        _advance_waves(cw, sw, cd, sd)
        for k in range(kk):
            wv[k] = _wave_cs(kinds[k], cw[k], sw[k])
        for j in range(d):
            st[j] = s[j] + 0.5 * h * k1[j]
        _lin_apply(lbar, lks, wv, st, k2)
        for j in range(d):
            st[j] = s[j] + 0.5 * h * k2[j]
        _lin_apply(lbar, lks, wv, st, k3)
        _advance_waves(cw, sw, cd, sd)
        for k in range(kk):
            wv[k] = _wave_cs(kinds[k], cw[k], sw[k])
        for j in range(d):
            st[j] = s[j] + h * k3[j]
        _lin_apply(lbar, lks, wv, st, k4)
        for j in range(d):
            s[j] += (h / 6.0) * (k1[j] + 2.0 * (k2[j] + k3[j]) + k4[j])
        if (i + 1) % _HOUSEKEEP == 0:
            _renorm_waves(cw, sw)
            tot = 0.0
            for j in range(d):
                tot += s[j]
            if not np.isfinite(tot):
                break
        n_done = i + 1
        if n_done % stride == 0:
            samples[n_done // stride] = s
    return samples, n_done


@njit(cache=True, parallel=True)
def linear_sweep(lbar, lks, kinds, mults, phases, omegas, s0, h, n_steps,
                 win_steps, obs):
    """Batched interior integration over omegas, tracking running statistics.

    Per batch member: extrema of coordinate ``obs`` over every step, the final
    time-average of all coordinates (trapezoid at full resolution), and the
    max/min of the running average per coordinate over the last ``win_steps``
    steps.  ok[b] flips to False on a non-finite abort (stats then cover the
    completed prefix).
    """
    nb = omegas.shape[0]
    d = s0.shape[0]
    kk = kinds.shape[0]
    obs_max = np.full(nb, -np.inf)
    obs_min = np.full(nb, np.inf)
    final_avg = np.zeros((nb, d))
    win_max = np.full((nb, d), -np.inf)
    win_min = np.full((nb, d), np.inf)
    ok = np.ones(nb, np.bool_)
    t_done = np.zeros(nb)
    for b in prange(nb):
        omega = omegas[b]
        s = s0.copy()
        ssum = np.zeros(d)  # sum of s_1..s_i (excludes the initial state)
        k1 = np.empty(d); k2 = np.empty(d); k3 = np.empty(d); k4 = np.empty(d)
        st = np.empty(d)
        wv = np.empty(kk)
        cw = np.empty(kk); sw = np.empty(kk); cd = np.empty(kk); sd = np.empty(kk)
        _init_waves(kinds, mults, phases, omega, 0.0, h, cw, sw, cd, sd)
        obs_max[b] = s[obs]
        obs_min[b] = s[obs]
        win_from = n_steps - win_steps
        alive = True
        i = 0
        while alive and i < n_steps:
            for k in range(kk):
                wv[k] = _wave_cs(kinds[k], cw[k], sw[k])
            _lin_apply(lbar, lks, wv, s, k1)
            _advance_waves(cw, sw, cd, sd)
            for k in range(kk):
                wv[k] = _wave_cs(kinds[k], cw[k], sw[k])
            for j in range(d):
                st[j] = s[j] + 0.5 * h * k1[j]
            _lin_apply(lbar, lks, wv, st, k2)
            for j in range(d):
                st[j] = s[j] + 0.5 * h * k2[j]
            _lin_apply(lbar, lks, wv, st, k3)
            _advance_waves(cw, sw, cd, sd)
            for k in range(kk):
                wv[k] = _wave_cs(kinds[k], cw[k], sw[k])
            for j in range(d):
                st[j] = s[j] + h * k3[j]
            _lin_apply(lbar, lks, wv, st, k4)
            for j in range(d):
                s[j] += (h / 6.0) * (k1[j] + 2.0 * (k2[j] + k3[j]) + k4[j])
            i += 1
            if s[obs] > obs_max[b]:
                obs_max[b] = s[obs]
            if s[obs] < obs_min[b]:
                obs_min[b] = s[obs]
            for j in range(d):
                ssum[j] += s[j]
            if i > win_from:
                t = i * h
                for j in range(d):
                    # trapezoid integral / elapsed time
                    avg = h * (ssum[j] - 0.5 * s[j] + 0.5 * s0[j]) / t
                    if avg > win_max[b, j]:
                        win_max[b, j] = avg
                    if avg < win_min[b, j]:
                        win_min[b, j] = avg
            if i % _HOUSEKEEP == 0:
                _renorm_waves(cw, sw)
                tot = 0.0
                for j in range(d):
                    tot += s[j]
                if not np.isfinite(tot):
                    ok[b] = False
                    alive = False
        t_done[b] = i * h
        if i > 0:
            for j in range(d):
                final_avg[b, j] = h * (ssum[j] - 0.5 * s[j] + 0.5 * s0[j]) / (i * h)
        else:
            for j in range(d):
                final_avg[b, j] = s0[j]
    return obs_max, obs_min, final_avg, win_max, win_min, ok, t_done


@njit(cache=True)
def projected_trajectory(mean, amps, kinds, mults, phases, omega, dual0, t0,
                         h, n_steps, stride):
    """Boundary-constrained integration storing strategies and duals."""
    mx = mean.shape[0]
    my = mean.shape[1]
    d = mx + my
    kk = kinds.shape[0]
    n_samples = n_steps // stride + 1
    strat = np.zeros((n_samples, d))
    duals = np.zeros((n_samples, d))
    s = dual0.copy()
    k1 = np.empty(d); k2 = np.empty(d); k3 = np.empty(d); k4 = np.empty(d)
    st = np.empty(d)
    px = np.empty(mx); py = np.empty(my)
    bufx = np.empty(mx); bufy = np.empty(my)
    wv = np.empty(kk)
    cw = np.empty(kk); sw = np.empty(kk); cd = np.empty(kk); sd = np.empty(kk)
    _init_waves(kinds, mults, phases, omega, t0, h, cw, sw, cd, sd)
    _proj_into(s[:mx], bufx, px)
    _proj_into(s[mx:], bufy, py)
    for i in range(mx):
        strat[0, i] = px[i]
    for j in range(my):
        strat[0, mx + j] = py[j]
    duals[0] = s
    n_done = 0
    for i in range(n_steps):
        for k in range(kk):
            wv[k] = _wave_cs(kinds[k], cw[k], sw[k])
        _proj_field(mean, amps, wv, s, mx, px, py, bufx, bufy, k1)
        _advance_waves(cw, sw, cd, sd)
        for k in range(kk):
            wv[k] = _wave_cs(kinds[k], cw[k], sw[k])
        for j in range(d):
            st[j] = s[j] + 0.5 * h * k1[j]
        _proj_field(mean, amps, wv, st, mx, px, py, bufx, bufy, k2)
        for j in range(d):
            st[j] = s[j] + 0.5 * h * k2[j]
        _proj_field(mean, amps, wv, st, mx, px, py, bufx, bufy, k3)
        _advance_waves(cw, sw, cd, sd)
        for k in range(kk):
            wv[k] = _wave_cs(kinds[k], cw[k], sw[k])
        for j in range(d):
            st[j] = s[j] + h * k3[j]
        _proj_field(mean, amps, wv, st, mx, px, py, bufx, bufy, k4)
        for j in range(d):
            s[j] += (h / 6.0) * (k1[j] + 2.0 * (k2[j] + k3[j]) + k4[j])
        if (i + 1) % _HOUSEKEEP == 0:
            _renorm_waves(cw, sw)
            tot = 0.0
            for j in range(d):
                tot += s[j]
            if not np.isfinite(tot):
                break
        n_done = i + 1
        if n_done % stride == 0:
            row = n_done // stride
            _proj_into(s[:mx], bufx, px)
            _proj_into(s[mx:], bufy, py)
            for j in range(mx):
                strat[row, j] = px[j]
            for j in range(my):
                strat[row, mx + j] = py[j]
            duals[row] = s
    return strat, duals, n_done


@njit(cache=True, parallel=True)
def projected_sweep(mean, amps, kinds, mults, phases, omegas, dual0, h,
                    n_steps, win_steps, obs):
    """Batched boundary-constrained integration with running statistics.

    Statistics are over the emitted strategies (projections), not the duals.
    """
    nb = omegas.shape[0]
    mx = mean.shape[0]
    my = mean.shape[1]
    d = mx + my
    kk = kinds.shape[0]
    obs_max = np.full(nb, -np.inf)
    obs_min = np.full(nb, np.inf)
    final_avg = np.zeros((nb, d))
    win_max = np.full((nb, d), -np.inf)
    win_min = np.full((nb, d), np.inf)
    ok = np.ones(nb, np.bool_)
    t_done = np.zeros(nb)
    for b in prange(nb):
        omega = omegas[b]
        s = dual0.copy()
        strat0 = np.empty(d)
        strat = np.empty(d)
        ssum = np.zeros(d)
        k1 = np.empty(d); k2 = np.empty(d); k3 = np.empty(d); k4 = np.empty(d)
        st = np.empty(d)
        px = np.empty(mx); py = np.empty(my)
        bufx = np.empty(mx); bufy = np.empty(my)
        wv = np.empty(kk)
        cw = np.empty(kk); sw = np.empty(kk); cd = np.empty(kk); sd = np.empty(kk)
        _init_waves(kinds, mults, phases, omega, 0.0, h, cw, sw, cd, sd)
        _proj_into(s[:mx], bufx, px)
        _proj_into(s[mx:], bufy, py)
        for j in range(mx):
            strat0[j] = px[j]
        for j in range(my):
            strat0[mx + j] = py[j]
        obs_max[b] = strat0[obs]
        obs_min[b] = strat0[obs]
        win_from = n_steps - win_steps
        alive = True
        i = 0
        while alive and i < n_steps:
            for k in range(kk):
                wv[k] = _wave_cs(kinds[k], cw[k], sw[k])
            _proj_field(mean, amps, wv, s, mx, px, py, bufx, bufy, k1)
            _advance_waves(cw, sw, cd, sd)
            for k in range(kk):
                wv[k] = _wave_cs(kinds[k], cw[k], sw[k])
            for j in range(d):
                st[j] = s[j] + 0.5 * h * k1[j]
            _proj_field(mean, amps, wv, st, mx, px, py, bufx, bufy, k2)
            for j in range(d):
                st[j] = s[j] + 0.5 * h * k2[j]
            _proj_field(mean, amps, wv, st, mx, px, py, bufx, bufy, k3)
            _advance_waves(cw, sw, cd, sd)
            for k in range(kk):
                wv[k] = _wave_cs(kinds[k], cw[k], sw[k])
            for j in range(d):
                st[j] = s[j] + h * k3[j]
            _proj_field(mean, amps, wv, st, mx, px, py, bufx, bufy, k4)
            for j in range(d):
                s[j] += (h / 6.0) * (k1[j] + 2.0 * (k2[j] + k3[j]) + k4[j])
            i += 1
            _proj_into(s[:mx], bufx, px)
            _proj_into(s[mx:], bufy, py)
            for j in range(mx):
                strat[j] = px[j]
            for j in range(my):
                strat[mx + j] = py[j]
            if strat[obs] > obs_max[b]:
                obs_max[b] = strat[obs]
            if strat[obs] < obs_min[b]:
                obs_min[b] = strat[obs]
            for j in range(d):
                ssum[j] += strat[j]
            if i > win_from:
                t = i * h
                for j in range(d):
                    avg = h * (ssum[j] - 0.5 * strat[j] + 0.5 * strat0[j]) / t
                    if avg > win_max[b, j]:
                        win_max[b, j] = avg
                    if avg < win_min[b, j]:
                        win_min[b, j] = avg
            if i % _HOUSEKEEP == 0:
                _renorm_waves(cw, sw)
                tot = 0.0
                for j in range(d):
                    tot += s[j]
                if not np.isfinite(tot):
                    ok[b] = False
                    alive = False
        t_done[b] = i * h
        if i > 0:
            for j in range(d):
                final_avg[b, j] = h * (ssum[j] - 0.5 * strat[j] + 0.5 * strat0[j]) / (i * h)
        else:
            for j in range(d):
                final_avg[b, j] = strat0[j]
    return obs_max, obs_min, final_avg, win_max, win_min, ok, t_done
