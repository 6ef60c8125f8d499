# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled classical RK4 stepping kernel for the coupled wave-heat system.

Advances the four nodal fields in place over a block of fixed-size steps.
Semantics are identical to the pure-python backend in ``_kernel_py``:
even-reflection Neumann second differences, arithmetic-mean face
coefficients with zero wall fluxes and half-width boundary cells, central
first differences vanishing at the walls.
"""

from libc.math cimport exp, isfinite


cdef inline double gamma_val(int fam, double p0, double p1, double p2, double p3,
                             double x) noexcept nogil:
    cdef double z
    if fam == 0:
        return p0
    elif fam == 1:
        return p0 + p1 * exp(-p2 * x)
    elif fam == 2:
        return p0 + p1 / (1.0 + x * x)
    else:
        z = (x - p2) / p3
        return p0 + p1 * exp(-z * z)


cdef int _stage(double[::1] us, double[::1] vs, double[::1] ws, double[::1] ts,
                double[::1] ku, double[::1] kv, double[::1] kw, double[::1] kt,
                double[::1] gam, double[::1] fw,
                int n, double q, double i2h,
                double tau, double alpha, double b, double D, double eps,
                int fam, double p0, double p1, double p2, double p3) noexcept nogil:
    cdef int i
    cdef double g, vx, wvisc
    cdef int m = n - 1

    for i in range(n):
        g = gamma_val(fam, p0, p1, p2, p3, ts[i])
        if not g > 0.0:
            return 1
        gam[i] = g

    # combined mechanical face flux (b * dv + du), scaled by q at the nodes
    for i in range(m):
        fw[i] = 0.5 * (gam[i] + gam[i + 1]) * (
            b * (vs[i + 1] - vs[i]) + (us[i + 1] - us[i])
        )

    if eps > 0.0:
        ku[0] = eps * 2.0 * (us[1] - us[0]) * q + vs[0]
        kv[0] = eps * 2.0 * (vs[1] - vs[0]) * q + ws[0]
        wvisc = eps * 2.0 * (ws[1] - ws[0]) * q
    else:
        ku[0] = vs[0]
        kv[0] = ws[0]
        wvisc = 0.0
    kw[0] = (wvisc + 2.0 * fw[0] * q - alpha * ws[0]) / tau
    kt[0] = D * 2.0 * (ts[1] - ts[0]) * q

    if eps > 0.0:
        for i in range(1, m):
            ku[i] = eps * (us[i - 1] - 2.0 * us[i] + us[i + 1]) * q + vs[i]
            kv[i] = eps * (vs[i - 1] - 2.0 * vs[i] + vs[i + 1]) * q + ws[i]
            kw[i] = (eps * (ws[i - 1] - 2.0 * ws[i] + ws[i + 1]) * q
                     + (fw[i] - fw[i - 1]) * q - alpha * ws[i]) / tau
            vx = (vs[i + 1] - vs[i - 1]) * i2h
            kt[i] = (D * (ts[i - 1] - 2.0 * ts[i] + ts[i + 1]) * q
                     + b * gam[i] * vx * vx)
    else:
        for i in range(1, m):
            ku[i] = vs[i]
            kv[i] = ws[i]
            kw[i] = ((fw[i] - fw[i - 1]) * q - alpha * ws[i]) / tau
            vx = (vs[i + 1] - vs[i - 1]) * i2h
            kt[i] = (D * (ts[i - 1] - 2.0 * ts[i] + ts[i + 1]) * q
                     + b * gam[i] * vx * vx)

    if eps > 0.0:
        ku[m] = eps * 2.0 * (us[m - 1] - us[m]) * q + vs[m]
        kv[m] = eps * 2.0 * (vs[m - 1] - vs[m]) * q + ws[m]
        wvisc = eps * 2.0 * (ws[m - 1] - ws[m]) * q
    else:
        ku[m] = vs[m]
        kv[m] = ws[m]
        wvisc = 0.0
    kw[m] = (wvisc - 2.0 * fw[m - 1] * q - alpha * ws[m]) / tau
    kt[m] = D * 2.0 * (ts[m - 1] - ts[m]) * q
    return 0


cdef int _advance(double[::1] u, double[::1] v, double[::1] w, double[::1] th,
                  int nsteps, double dt, double h,
                  double tau, double alpha, double b, double D, double eps,
                  int fam, double p0, double p1, double p2, double p3,
                  double[:, ::1] work) noexcept nogil:
    cdef int n = u.shape[0]
    cdef double q = 1.0 / (h * h)
    cdef double i2h = 1.0 / (2.0 * h)
    cdef double half = 0.5 * dt
    cdef double sixth = dt / 6.0
    cdef int s, i, err
    cdef double acc

    cdef double[::1] su = work[0], sv = work[1], sw = work[2], st = work[3]
    cdef double[::1] k1u = work[4], k1v = work[5], k1w = work[6], k1t = work[7]
    cdef double[::1] k2u = work[8], k2v = work[9], k2w = work[10], k2t = work[11]
    cdef double[::1] k3u = work[12], k3v = work[13], k3w = work[14], k3t = work[15]
    cdef double[::1] k4u = work[16], k4v = work[17], k4w = work[18], k4t = work[19]
    cdef double[::1] gam = work[20], fw = work[21]

    for s in range(nsteps):
        err = _stage(u, v, w, th, k1u, k1v, k1w, k1t, gam, fw,
                     n, q, i2h, tau, alpha, b, D, eps, fam, p0, p1, p2, p3)
        if err:
            return s + 1
        for i in range(n):
            su[i] = u[i] + half * k1u[i]
            sv[i] = v[i] + half * k1v[i]
            sw[i] = w[i] + half * k1w[i]
            st[i] = th[i] + half * k1t[i]
        err = _stage(su, sv, sw, st, k2u, k2v, k2w, k2t, gam, fw,
                     n, q, i2h, tau, alpha, b, D, eps, fam, p0, p1, p2, p3)
        if err:
            return s + 1
        for i in range(n):
            su[i] = u[i] + half * k2u[i]
            sv[i] = v[i] + half * k2v[i]
            sw[i] = w[i] + half * k2w[i]
            st[i] = th[i] + half * k2t[i]
        err = _stage(su, sv, sw, st, k3u, k3v, k3w, k3t, gam, fw,
                     n, q, i2h, tau, alpha, b, D, eps, fam, p0, p1, p2, p3)
        if err:
            return s + 1
        for i in range(n):
            su[i] = u[i] + dt * k3u[i]
            sv[i] = v[i] + dt * k3v[i]
            sw[i] = w[i] + dt * k3w[i]
            st[i] = th[i] + dt * k3t[i]
        err = _stage(su, sv, sw, st, k4u, k4v, k4w, k4t, gam, fw,
                     n, q, i2h, tau, alpha, b, D, eps, fam, p0, p1, p2, p3)
        if err:
            return s + 1
        acc = 0.0
        for i in range(n):
            u[i] += sixth * (k1u[i] + 2.0 * k2u[i] + 2.0 * k3u[i] + k4u[i])
            v[i] += sixth * (k1v[i] + 2.0 * k2v[i] + 2.0 * k3v[i] + k4v[i])
            w[i] += sixth * (k1w[i] + 2.0 * k2w[i] + 2.0 * k3w[i] + k4w[i])
            th[i] += sixth * (k1t[i] + 2.0 * k2t[i] + 2.0 * k3t[i] + k4t[i])
            acc += u[i] + v[i] + w[i] + th[i]
        if not isfinite(acc):
            return -(s + 1)
    return 0


def advance(double[::1] u, double[::1] v, double[::1] w, double[::1] th,
            int nsteps, double dt, double h,
            double tau, double alpha, double b, double D, double eps,
            int fam, double p0, double p1, double p2, double p3,
            double[:, ::1] work):
    """Advance (u, v, w, th) in place by nsteps RK4 steps of size dt.

    Returns 0 on success, step_index + 1 if gamma(theta) became nonpositive
    during that step, and -(step_index + 1) if a nonfinite value appeared.
    ``work`` must be a C-contiguous float64 array of shape (22, len(u)).
    """
    cdef int rc
    with nogil:
        rc = _advance(u, v, w, th, nsteps, dt, h, tau, alpha, b, D, eps,
                      fam, p0, p1, p2, p3, work)
    return rc
