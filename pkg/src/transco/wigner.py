"""Wigner function of a field state and its integrated negativity.

Normalization is ``W(alpha) = (2/pi) <psi| D(alpha) P D(alpha)^dag |psi>`` with
``P`` the photon-number parity, so the integral of ``W`` over the complex
plane is one and ``W_vac(0) = 2/pi``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from transco import kernels
from transco.errors import DomainError
from transco.fockcore import FieldState, moments
from transco.io import write_csv

TINY_NEGATIVITY = 1e-9


@dataclass(frozen=True)
class PhaseGrid:
    """Polar quadrature: ``n_radial`` Gauss-Legendre nodes per radial piece, ``n_angular`` rays."""

    extent: float
    n_radial: int = 64
    n_angular: int = 512

    def __post_init__(self):
        if self.n_radial < 64 or self.n_angular < 64:
            raise DomainError("n_radial and n_angular must both be at least 64")
        if not self.extent > 0:
            raise DomainError("extent must be positive")

    @classmethod
    def for_state(cls, state: FieldState, n_radial: int = 64, n_angular: int = 512, margin: float = 5.0) -> "PhaseGrid":
        return cls(math.sqrt(moments(state)[0]) + margin, n_radial, n_angular)


def wigner_points(state: FieldState, alpha) -> np.ndarray:
    alpha = np.asarray(alpha, dtype=complex).ravel()
    return kernels.wigner_points(state.amps, 4.0 * np.abs(alpha) ** 2, np.angle(alpha))


def wigner_at(state: FieldState, alpha: complex) -> float:
    return float(wigner_points(state, [alpha])[0])


def wigner_grid(state: FieldState, re, im) -> np.ndarray:
    """``W`` on the Cartesian product ``re x im``, shape ``(len(re), len(im))``."""
    X, Y = np.meshgrid(np.asarray(re, float), np.asarray(im, float), indexing="ij")
    return wigner_points(state, (X + 1j * Y).ravel()).reshape(X.shape)


def _polar(psi, r, phi):
    return kernels.wigner_points(psi, 4.0 * r * r, phi)


@dataclass(frozen=True)
class NegativityReport:
    raw: float  # integral of |W| minus one, before clamping
    value: float  # reported negativity
    normalization: float  # integral of W
    tiny: bool  # raw below TINY_NEGATIVITY, reported as 0


def negativity_report(state: FieldState, grid: PhaseGrid | None = None, scan_factor: int = 4, bisect_steps: int = 60) -> NegativityReport:
    """Integrate ``|W|`` on rays split at the sign changes of ``W``.

    Each ray is scanned on ``scan_factor * n_radial`` uniform radii; every
    bracketed zero is refined by bisection, and each sign-definite piece gets
    its own Gauss-Legendre rule. The angular integral is a uniform trapezoid.
    """
    grid = grid or PhaseGrid.for_state(state)
    nbar = moments(state)[0]
    if grid.extent < math.sqrt(nbar) + 5.0 - 1e-12:
        raise DomainError(f"grid extent {grid.extent} below sqrt(nbar) + 5 = {math.sqrt(nbar) + 5:.3f}")
    psi = state.amps
    R = grid.extent
    n_ang = grid.n_angular
    phis = 2 * math.pi * np.arange(n_ang) / n_ang

    n_scan = scan_factor * grid.n_radial
    rs = np.linspace(0.0, R, n_scan + 1)
    P, Rg = np.meshgrid(phis, rs, indexing="ij")
    ws = _polar(psi, Rg.ravel(), P.ravel()).reshape(P.shape)
    sgn = np.sign(ws)
    ray, cell = np.nonzero(sgn[:, :-1] * sgn[:, 1:] < 0)

    lo = rs[cell].copy()
    hi = rs[cell + 1].copy()
    f_lo = ws[ray, cell]
    ph = phis[ray]
    for _ in range(bisect_steps if ray.size else 0):
        mid = 0.5 * (lo + hi)
        fm = _polar(psi, mid, ph)
        left = np.sign(fm) == np.sign(f_lo)
        lo = np.where(left, mid, lo)
        f_lo = np.where(left, fm, f_lo)
        hi = np.where(left, hi, mid)
    roots = 0.5 * (lo + hi)

    # breakpoints per ray: 0, roots..., R
    pieces_ray, pieces_a, pieces_b = [], [], []
    order = np.lexsort((roots, ray))
    ray_s, root_s = ray[order], roots[order]
    start = 0
    for j in range(n_ang):
        stop = start
        while stop < ray_s.size and ray_s[stop] == j:
            stop += 1
        pts = np.concatenate(([0.0], root_s[start:stop], [R]))
        pieces_ray.append(np.full(pts.size - 1, j))
        pieces_a.append(pts[:-1])
        pieces_b.append(pts[1:])
        start = stop
    pr = np.concatenate(pieces_ray)
    pa = np.concatenate(pieces_a)
    pb = np.concatenate(pieces_b)

    x, w = np.polynomial.legendre.leggauss(grid.n_radial)
    half = 0.5 * (pb - pa)
    nodes = (0.5 * (pa + pb))[:, None] + half[:, None] * x[None, :]
    vals = _polar(psi, nodes.ravel(), np.repeat(phis[pr], x.size)).reshape(nodes.shape)
    weights = half[:, None] * w[None, :] * nodes
    dphi = 2 * math.pi / n_ang
    abs_int = float(np.sum(np.abs(vals) * weights) * dphi)
    w_int = float(np.sum(vals * weights) * dphi)
    raw = abs_int - 1.0
    tiny = raw < TINY_NEGATIVITY
    return NegativityReport(raw, 0.0 if tiny else raw, w_int, bool(tiny))


def negativity(state: FieldState, grid: PhaseGrid | None = None) -> float:
    """Integrated negativity ``int |W| d^2 alpha - 1``; values below 1e-9 are reported as 0."""
    return negativity_report(state, grid).value


def write_fig2_csv(path, rows):
    """Rows of ``(n_max, theta, negativity)``."""
    return write_csv(path, ["n_max", "theta", "negativity"], rows)


def write_wigner_grid_csv(path, state: FieldState, re, im):
    W = wigner_grid(state, re, im)
    rows = [(float(a), float(b), float(W[i, j])) for i, a in enumerate(re) for j, b in enumerate(im)]
    return write_csv(path, ["alpha_re", "alpha_im", "W"], rows)
