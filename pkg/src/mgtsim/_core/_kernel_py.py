"""Pure-python (numpy) twin of the compiled stepping kernel.

Same call signature and semantics as ``_kernel.advance``; used when the
compiled extension is unavailable.  Vectorized per stage, so it is correct
but roughly two orders of magnitude slower on desk-scale grids.
"""

from __future__ import annotations

import numpy as np


def _gamma(fam, p0, p1, p2, p3, x):
    if fam == 0:
        return np.full_like(x, p0)
    if fam == 1:
        return p0 + p1 * np.exp(-p2 * x)
    if fam == 2:
        return p0 + p1 / (1.0 + x * x)
    z = (x - p2) / p3
    return p0 + p1 * np.exp(-z * z)


def _stage(us, vs, ws, ts, out, q, i2h, tau, alpha, b, D, eps, fam, p0, p1, p2, p3):
    ku, kv, kw, kt = out
    gam = _gamma(fam, p0, p1, p2, p3, ts)
    if not np.min(gam) > 0.0:
        return 1

    fw = 0.5 * (gam[:-1] + gam[1:]) * (b * (vs[1:] - vs[:-1]) + (us[1:] - us[:-1]))

    if eps > 0.0:
        ku[1:-1] = eps * ((us[:-2] - 2.0 * us[1:-1] + us[2:]) * q) + vs[1:-1]
        ku[0] = eps * 2.0 * (us[1] - us[0]) * q + vs[0]
        ku[-1] = eps * 2.0 * (us[-2] - us[-1]) * q + vs[-1]
        kv[1:-1] = eps * ((vs[:-2] - 2.0 * vs[1:-1] + vs[2:]) * q) + ws[1:-1]
        kv[0] = eps * 2.0 * (vs[1] - vs[0]) * q + ws[0]
        kv[-1] = eps * 2.0 * (vs[-2] - vs[-1]) * q + ws[-1]
        wvisc_int = eps * ((ws[:-2] - 2.0 * ws[1:-1] + ws[2:]) * q)
        wvisc_lo = eps * 2.0 * (ws[1] - ws[0]) * q
        wvisc_hi = eps * 2.0 * (ws[-2] - ws[-1]) * q
    else:
        ku[:] = vs
        kv[:] = ws
        wvisc_int = 0.0
        wvisc_lo = 0.0
        wvisc_hi = 0.0

    kw[1:-1] = (wvisc_int + (fw[1:] - fw[:-1]) * q - alpha * ws[1:-1]) / tau
    kw[0] = (wvisc_lo + 2.0 * fw[0] * q - alpha * ws[0]) / tau
    kw[-1] = (wvisc_hi - 2.0 * fw[-1] * q - alpha * ws[-1]) / tau

    vx = (vs[2:] - vs[:-2]) * i2h
    kt[1:-1] = D * ((ts[:-2] - 2.0 * ts[1:-1] + ts[2:]) * q) + b * gam[1:-1] * vx * vx
    kt[0] = D * 2.0 * (ts[1] - ts[0]) * q
    kt[-1] = D * 2.0 * (ts[-2] - ts[-1]) * q
    return 0


def advance(u, v, w, th, nsteps, dt, h, tau, alpha, b, D, eps,
            fam, p0, p1, p2, p3, work):
    """Advance (u, v, w, th) in place; return code as in the compiled kernel."""
    n = u.shape[0]
    q = 1.0 / (h * h)
    i2h = 1.0 / (2.0 * h)
    half = 0.5 * dt
    sixth = dt / 6.0

    staged = work[0:4]
    k1 = work[4:8]
    k2 = work[8:12]
    k3 = work[12:16]
    k4 = work[16:20]
    y = (u, v, w, th)
    args = (q, i2h, tau, alpha, b, D, eps, fam, p0, p1, p2, p3)

    for s in range(nsteps):
        if _stage(*y, k1, *args):
            return s + 1
        for j in range(4):
            np.multiply(k1[j], half, out=staged[j])
            staged[j] += y[j]
        if _stage(*staged, k2, *args):
            return s + 1
        for j in range(4):
            np.multiply(k2[j], half, out=staged[j])
            staged[j] += y[j]
        if _stage(*staged, k3, *args):
            return s + 1
        for j in range(4):
            np.multiply(k3[j], dt, out=staged[j])
            staged[j] += y[j]
        if _stage(*staged, k4, *args):
            return s + 1
        acc = 0.0
        for yj, a1, a2, a3, a4 in zip(y, k1, k2, k3, k4):
            yj += sixth * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
            acc += yj.sum()
        if not np.isfinite(acc):
            return -(s + 1)
    return 0
