# Compiled versions of the hot loops in transco._pykernels.
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs, hypot, copysign, exp, log, lgamma, cos, sin

cnp.import_array()

cdef double _EPS = np.finfo(float).eps
cdef int _MAX_ITER = 60
cdef double _BIG = 1e150
cdef double _LOG_BIG = log(1e150)


cdef int _tqli(double[::1] d, double[::1] e, double[:, ::1] z, int n) nogil:
    cdef int l, m, i, k, it
    cdef double dd, g, r, s, c, p, f, b
    cdef bint deflated
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = fabs(d[m]) + fabs(d[m + 1])
                if fabs(e[m]) <= _EPS * dd:
                    break
                m += 1
            if m == l:
                break
            it += 1
            if it > _MAX_ITER:
                return -1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + copysign(r, g))
            s = 1.0
            c = 1.0
            p = 0.0
            deflated = False
            i = m - 1
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    deflated = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                for k in range(n):
                    f = z[k, i + 1]
                    z[k, i + 1] = s * z[k, i] + c * f
                    z[k, i] = c * z[k, i] - s * f
                i -= 1
            if deflated:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return 0


def tridiag_eigh_batch(diag, offdiag):
    """Eigen-decompose a stack of symmetric tridiagonal matrices (see the Python twin)."""
    cdef cnp.ndarray[double, ndim=2] D = np.ascontiguousarray(np.atleast_2d(diag), dtype=float)
    cdef Py_ssize_t nb = D.shape[0]
    cdef Py_ssize_t n = D.shape[1]
    cdef cnp.ndarray[double, ndim=2] O = np.ascontiguousarray(np.asarray(offdiag, dtype=float).reshape(nb, -1))
    w = np.empty((nb, n))
    zs = np.empty((nb, n, n))
    cdef double[::1] d = np.empty(n)
    cdef double[::1] e = np.empty(n)
    cdef double[:, ::1] z = np.empty((n, n))
    cdef Py_ssize_t bi, r, j
    cdef int status
    for bi in range(nb):
        for r in range(n):
            d[r] = D[bi, r]
            e[r] = O[bi, r] if r < n - 1 else 0.0
            for j in range(n):
                z[r, j] = 1.0 if r == j else 0.0
        with nogil:
            status = _tqli(d, e, z, <int>n)
        if status != 0:
            raise RuntimeError("QL iteration did not converge")
        order = np.argsort(np.asarray(d), kind="stable")
        w[bi] = np.asarray(d)[order]
        zs[bi] = np.asarray(z)[:, order]
    return w, zs


def laguerre_kernel(int k, int count, double x):
    """Normalized associated-Laguerre kernel values (see the Python twin)."""
    out = np.zeros(count)
    cdef double[::1] o = out
    cdef double log_scale, g_prev, g, g_next
    cdef int n
    if count == 0:
        return out
    if x == 0.0:
        if k == 0:
            out[:] = 1.0
        return out
    log_scale = 0.5 * k * log(x) - 0.5 * x - 0.5 * lgamma(k + 1.0)
    g_prev = 0.0
    g = 1.0
    o[0] = exp(log_scale) if log_scale > -745.0 else 0.0
    for n in range(count - 1):
        g_next = ((2 * n + 1 + k - x) * g - sqrt(<double>n * (n + k)) * g_prev) / sqrt(<double>(n + 1) * (n + k + 1))
        g_prev = g
        g = g_next
        if fabs(g) > _BIG:
            g_prev /= _BIG
            g /= _BIG
            log_scale += _LOG_BIG
        o[n + 1] = g * exp(log_scale) if log_scale > -745.0 else 0.0
    return out


def wigner_points(psi, x, phi):
    """Wigner function at points ``alpha = r e^{i phi}`` with ``x = 4 r^2`` (see the Python twin)."""
    cdef cnp.ndarray[complex, ndim=1] ps = np.ascontiguousarray(psi, dtype=complex).ravel()
    cdef double[::1] xs = np.ascontiguousarray(x, dtype=float).ravel()
    cdef double[::1] ph = np.ascontiguousarray(phi, dtype=float).ravel()
    cdef Py_ssize_t size = ps.shape[0]
    cdef Py_ssize_t npts = xs.shape[0]
    cdef double[::1] cre = np.empty(size * size)
    cdef double[::1] cim = np.empty(size * size)
    cdef Py_ssize_t n, k, q
    cdef double sgn
    for k in range(size):
        for n in range(size - k):
            c = ps[n + k] * ps[n].conjugate()
            sgn = 1.0 if n % 2 == 0 else -1.0
            cre[k * size + n] = sgn * c.real
            cim[k * size + n] = sgn * c.imag
    out = np.zeros(npts)
    cdef double[::1] o = out
    cdef double xv, lx, log_scale, g_prev, g, g_next, tc, ts, acc, total, scale, c1, s1, tmp
    with nogil:
        for q in range(npts):
            xv = xs[q]
            lx = log(xv) if xv > 0 else 0.0
            c1 = cos(ph[q])
            s1 = sin(ph[q])
            tc = 1.0
            ts = 0.0
            total = 0.0
            for k in range(size):
                if k > 0:
                    # cos(k phi), sin(k phi) by rotation
                    tmp = tc * c1 - ts * s1
                    ts = ts * c1 + tc * s1
                    tc = tmp
                    if xv <= 0:
                        continue
                    log_scale = 0.5 * k * lx - 0.5 * xv - 0.5 * lgamma(k + 1.0)
                else:
                    log_scale = -0.5 * xv
                scale = exp(log_scale) if log_scale > -745.0 else 0.0
                g_prev = 0.0
                g = 1.0
                acc = 0.0
                for n in range(size - k):
                    if n > 0:
                        g_next = ((2 * n - 1 + k - xv) * g - sqrt(<double>(n - 1) * (n - 1 + k)) * g_prev) / sqrt(<double>n * (n + k))
                        g_prev = g
                        g = g_next
                        if fabs(g) > _BIG:
                            g_prev /= _BIG
                            g /= _BIG
                            log_scale += _LOG_BIG
                            scale = exp(log_scale) if log_scale > -745.0 else 0.0
                    acc += g * scale * (cre[k * size + n] * tc + cim[k * size + n] * ts)
                total += acc if k == 0 else 2.0 * acc
            o[q] = total * (2.0 / 3.141592653589793)
    return out
