"""Pure-Python reference versions of the hot kernels.

These mirror :mod:`transco._ckernels` loop for loop and are used when the
compiled extension is unavailable (or forced off with ``TRANSCO_PURE_PYTHON=1``).
"""

from __future__ import annotations

import math

import numpy as np

_EPS = np.finfo(float).eps
_MAX_ITER = 60
_BIG = 1e150


def _tqli(d: list, e: list, z: list, n: int):
    """Implicit-shift QL on one symmetric tridiagonal matrix, in place.

    ``e[i]`` couples rows ``i`` and ``i+1``; ``e[n-1]`` must be zero. ``z`` is a
    row-major ``n*n`` list that accumulates the rotations (start from identity).
    """
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= _EPS * dd:
                    break
                m += 1
            if m == l:
                break
            it += 1
            if it > _MAX_ITER:
                raise RuntimeError("QL iteration did not converge")
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            deflated = False
            i = m - 1
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
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
                    f = z[k * n + i + 1]
                    z[k * n + i + 1] = s * z[k * n + i] + c * f
                    z[k * n + i] = c * z[k * n + i] - s * f
                i -= 1
            if deflated:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0


def tridiag_eigh_batch(diag, offdiag):
    """Eigen-decompose a stack of symmetric tridiagonal matrices.

    Parameters
    ----------
    diag : (B, n) array
    offdiag : (B, n-1) array

    Returns
    -------
    w : (B, n) ascending eigenvalues
    z : (B, n, n) with eigenvectors in columns
    """
    diag = np.atleast_2d(np.asarray(diag, dtype=float))
    offdiag = np.asarray(offdiag, dtype=float).reshape(diag.shape[0], -1)
    nb, n = diag.shape
    w = np.empty((nb, n))
    zs = np.empty((nb, n, n))
    for b in range(nb):
        d = [float(v) for v in diag[b]]
        e = [float(v) for v in offdiag[b]] + [0.0]
        z = [1.0 if r == c else 0.0 for r in range(n) for c in range(n)]
        _tqli(d, e, z, n)
        order = sorted(range(n), key=lambda j: d[j])
        for jj, j in enumerate(order):
            w[b, jj] = d[j]
            for r in range(n):
                zs[b, r, jj] = z[r * n + j]
    return w, zs


def laguerre_kernel(k: int, count: int, x: float) -> np.ndarray:
    """``h_n = sqrt(n!/(n+k)!) x^{k/2} e^{-x/2} L_n^{(k)}(x)`` for ``n = 0..count-1``.

    The normalized three-term recurrence keeps a running log scale, so the
    seed may underflow without losing later terms.
    """
    out = np.zeros(count)
    if count == 0:
        return out
    if x == 0.0:
        if k == 0:
            out[:] = 1.0
        return out
    log_scale = 0.5 * k * math.log(x) - 0.5 * x - 0.5 * math.lgamma(k + 1.0)
    g_prev = 0.0
    g = 1.0
    out[0] = math.exp(log_scale) if log_scale > -745.0 else 0.0
    for n in range(count - 1):
        g_next = ((2 * n + 1 + k - x) * g - math.sqrt(n * (n + k)) * g_prev) / math.sqrt((n + 1) * (n + k + 1))
        g_prev, g = g, g_next
        if abs(g) > _BIG:
            g_prev /= _BIG
            g /= _BIG
            log_scale += math.log(_BIG)
        out[n + 1] = g * math.exp(log_scale) if log_scale > -745.0 else 0.0
    return out


def wigner_points(psi, x, phi) -> np.ndarray:
    """Wigner function at points ``alpha = r e^{i phi}`` with ``x = 4 r^2``.

    Vectorized over points; loops over the Laguerre order ``k`` and index ``n``.
    """
    psi = np.asarray(psi, dtype=complex)
    x = np.asarray(x, dtype=float).ravel()
    phi = np.asarray(phi, dtype=float).ravel()
    size = psi.size
    total = np.zeros(x.size)
    pos = x > 0
    logx = np.where(pos, np.log(np.where(pos, x, 1.0)), 0.0)
    sign = np.array([1.0 if n % 2 == 0 else -1.0 for n in range(size)])
    for k in range(size):
        coef = psi[k:] * np.conj(psi[: size - k]) * sign[: size - k]
        if not np.any(coef):
            continue
        count = size - k
        if k == 0:
            log_scale = -0.5 * x
        else:
            log_scale = np.where(pos, 0.5 * k * logx - 0.5 * x - 0.5 * math.lgamma(k + 1.0), -np.inf)
        g_prev = np.zeros(x.size)
        g = np.ones(x.size)
        if k == 0:
            trig_c, trig_s = 1.0, 0.0
        else:
            trig_c, trig_s = np.cos(k * phi), np.sin(k * phi)
        acc = np.zeros(x.size)
        for n in range(count):
            if n > 0:
                g_next = ((2 * n - 1 + k - x) * g - math.sqrt((n - 1) * (n - 1 + k)) * g_prev) / math.sqrt(n * (n + k))
                g_prev, g = g, g_next
                big = np.abs(g) > _BIG
                if np.any(big):
                    g_prev = np.where(big, g_prev / _BIG, g_prev)
                    g = np.where(big, g / _BIG, g)
                    log_scale = np.where(big, log_scale + math.log(_BIG), log_scale)
            c = coef[n]
            if c != 0:
                h = g * np.exp(log_scale)
                acc += h * (c.real * trig_c + c.imag * trig_s)
        total += acc if k == 0 else 2.0 * acc
    return (2.0 / math.pi) * total
