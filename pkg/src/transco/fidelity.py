"""Bloch-sphere-averaged gate fidelities for a resonant JCM pulse.

The gate is ``exp(i Theta sigma_y / 2)`` applied to ``|theta, phi>``. Closed
forms come in a general version that takes arbitrary complex amplitudes and
fast versions for a field with a constant phase step ``varphi``, which only
need the magnitudes. :func:`oracle_avg_fidelity` averages the raw evolution
by quadrature and shares no algebra with either.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from transco import jcm
from transco.errors import DomainError
from transco.fockcore import FieldState, QubitAngles
from transco.io import write_csv

FULL_SPHERE = "full"
FIXED_PHI = "fixed_phi"


@dataclass(frozen=True)
class GateSpec:
    Theta: float
    averaging: str = FULL_SPHERE
    varphi: float = math.pi / 2

    def __post_init__(self):
        if not (0.0 <= self.Theta < 2 * math.pi):
            raise DomainError(f"Theta must lie in [0, 2pi), got {self.Theta}")
        if self.averaging not in (FULL_SPHERE, FIXED_PHI):
            raise DomainError(f"unknown averaging {self.averaging!r}")


def target_state(atom: QubitAngles, Theta: float) -> np.ndarray:
    """Amplitudes ``(t_g, t_e)`` of ``exp(i Theta sigma_y/2)|theta, phi>``."""
    c, s = math.cos(atom.theta / 2), math.sin(atom.theta / 2)
    C, S = math.cos(Theta / 2), math.sin(Theta / 2)
    e = np.exp(1j * atom.phi)
    return np.array([c * C - e * s * S, c * S + e * s * C], dtype=complex)


def pointwise_fidelity(field: FieldState, tau: float, atom: QubitAngles, Theta: float) -> float:
    joint = jcm.evolve_joint(field, atom, jcm.EvolutionParams(tau))
    return jcm.atom_fidelity(joint, target_state(atom, Theta))


def _ladder(psi: np.ndarray, tau: float):
    """Shifted amplitudes and trig factors on ``n = 0..len(psi)``.

    One spare slot on top keeps ``psi[n+1]`` inside the arrays.
    """
    size = psi.size + 1
    p = np.zeros(size + 1, dtype=complex)
    p[1 : psi.size + 1] = psi  # p[j] = psi[j-1]
    n = np.arange(size)
    pn, pm, pp = p[1:], p[:-1], np.append(p[2:], 0.0)
    wn = jcm.rabi_freqs(n) * tau
    wm = jcm.rabi_freqs(n - 1) * tau
    return pn, pm, pp, wn, wm


def avg_fidelity_full_sphere(field: FieldState, tau: float, Theta: float) -> float:
    """Full-sphere average for arbitrary complex amplitudes."""
    pn, pm, pp, wn, wm = _ladder(field.amps, tau)
    cn, cm = np.cos(wn / 2), np.cos(wm / 2)
    sn, sm = np.sin(wn / 2), np.sin(wm / 2)
    cT, sT, hT = math.cos(Theta), math.sin(Theta), math.cos(Theta / 2) ** 2
    hS = math.sin(Theta / 2) ** 2
    a2 = np.abs(pn) ** 2
    terms = (
        a2 * (cn * cm * hT / 3 + (np.cos(wn) + np.cos(wm)) / 12 * cT)
        - np.real(pm * np.conj(pp)) * sn * sm * hS / 3
        + (cn + cm) / 6 * (np.imag(np.conj(pn) * pp) * sn - np.imag(np.conj(pn) * pm) * sm) * sT
    )
    return float(0.5 + terms.sum())


def avg_fidelity_half_pi(field: FieldState, tau: float) -> float:
    """Full-sphere average at ``Theta = pi/2``; every term carries the 1/6 prefactor."""
    pn, pm, pp, wn, wm = _ladder(field.amps, tau)
    cn, cm = np.cos(wn / 2), np.cos(wm / 2)
    sn, sm = np.sin(wn / 2), np.sin(wm / 2)
    terms = (
        np.abs(pn) ** 2 * cn * cm
        - np.real(pm * np.conj(pp)) * sn * sm
        + (cn + cm) * (np.imag(np.conj(pn) * pp) * sn - np.imag(np.conj(pn) * pm) * sm)
    )
    return float(0.5 + terms.sum() / 6)


def _mag_ladder(mags: np.ndarray, tau: float):
    size = mags.size + 1
    a = np.zeros(size + 1)
    a[1 : mags.size + 1] = mags
    n = np.arange(size)
    an, am, ap = a[1:], a[:-1], np.append(a[2:], 0.0)
    return an, am, ap, jcm.rabi_freqs(n) * tau, jcm.rabi_freqs(n - 1) * tau


def full_sphere_phased(mags, tau: float, Theta: float, varphi: float = math.pi / 2) -> float:
    """Full-sphere average for ``psi[n] = mags[n] e^{i n varphi}``."""
    an, am, ap, wn, wm = _mag_ladder(np.asarray(mags, dtype=float), tau)
    cn, cm = np.cos(wn / 2), np.cos(wm / 2)
    sn, sm = np.sin(wn / 2), np.sin(wm / 2)
    terms = (
        an**2 * (cn * cm * math.cos(Theta / 2) ** 2 / 3 + (np.cos(wn) + np.cos(wm)) / 12 * math.cos(Theta))
        - math.cos(2 * varphi) * am * ap * sn * sm * math.sin(Theta / 2) ** 2 / 3
        + math.sin(varphi) * (cn + cm) / 6 * an * (ap * sn + am * sm) * math.sin(Theta)
    )
    return float(0.5 + terms.sum())


def fixed_phi_general(field: FieldState, tau: float, Theta: float) -> float:
    """Average over the ``phi = 0`` great circle for arbitrary complex amplitudes."""
    pn, pm, pp, wn, wm = _ladder(field.amps, tau)
    cn, cm = np.cos(wn / 2), np.cos(wm / 2)
    sn, sm = np.sin(wn / 2), np.sin(wm / 2)
    cT, sT = math.cos(Theta), math.sin(Theta)
    terms = (
        np.abs(pn) ** 2 * (cn * cm / 4 + (np.cos(wn) + np.cos(wm)) / 8) * cT
        + np.real(pm * np.conj(pp)) * sn * sm * cT / 4
        + (cn + cm) / 4 * (np.imag(np.conj(pn) * pp) * sn - np.imag(np.conj(pn) * pm) * sm) * sT
    )
    return float(0.5 + terms.sum())


def fixed_phi_phased(mags, tau: float, Theta: float, varphi: float = math.pi / 2) -> float:
    """Great-circle average for ``psi[n] = mags[n] e^{i n varphi}``."""
    an, am, ap, wn, wm = _mag_ladder(np.asarray(mags, dtype=float), tau)
    cn, cm = np.cos(wn / 2), np.cos(wm / 2)
    sn, sm = np.sin(wn / 2), np.sin(wm / 2)
    cT, sT = math.cos(Theta), math.sin(Theta)
    terms = (
        an**2 * (cn * cm / 4 + (np.cos(wn) + np.cos(wm)) / 8) * cT
        + math.cos(2 * varphi) / 4 * am * ap * sn * sm * cT
        + math.sin(varphi) / 4 * (cn + cm) * an * (ap * sn + am * sm) * sT
    )
    return float(0.5 + terms.sum())


def avg_fidelity_fixed_phi(field: FieldState, tau: float, Theta: float, varphi: float | None = None) -> float:
    """Great-circle (``phi = 0``) average fidelity.

    With ``varphi`` given, the field's magnitudes are used with the phase
    ladder ``arg psi[n] = n varphi``; with ``varphi=None`` the field's own
    phases are used.
    """
    if varphi is None:
        return fixed_phi_general(field, tau, Theta)
    return fixed_phi_phased(np.abs(field.amps), tau, Theta, varphi)


def _branch_gram(field: FieldState, tau: float) -> np.ndarray:
    size = field.amps.size + 1
    gg, ge = jcm.ground_branch(field.amps, tau, 1, size)
    eg, ee = jcm.excited_branch(field.amps, tau, 1, size)
    # overlap with the target is linear in these four ladders
    vecs = np.array([gg, eg, ge, ee])
    return vecs.conj() @ vecs.T


def _ring_fidelity(gram: np.ndarray, theta: np.ndarray, phi: np.ndarray, Theta: float) -> np.ndarray:
    c = np.cos(theta / 2)
    s = np.sin(theta / 2) * np.exp(1j * phi)
    C, S = math.cos(Theta / 2), math.sin(Theta / 2)
    tg = c * C - s * S
    te = c * S + s * C
    coef = np.stack([np.conj(tg) * c, np.conj(tg) * s, np.conj(te) * c, np.conj(te) * s], axis=-1)
    return np.real(np.einsum("...i,ij,...j->...", coef.conj(), gram, coef))


def oracle_avg_fidelity(
    field: FieldState,
    tau: float,
    Theta: float,
    mode: str = FULL_SPHERE,
    n_theta: int = 128,
    n_phi: int = 128,
) -> float:
    """Quadrature average of the pointwise fidelity of the evolved joint state.

    ``FULL_SPHERE`` uses Gauss-Legendre nodes in ``cos(theta)`` and a uniform
    trapezoid in ``phi``; ``FIXED_PHI`` uses a uniform trapezoid over
    ``theta`` in ``[0, 2pi)`` at ``phi = 0``.
    """
    if n_theta < 64 or (mode == FULL_SPHERE and n_phi < 64):
        raise DomainError("quadrature orders must be at least 64")
    gram = _branch_gram(field, tau)
    if mode == FULL_SPHERE:
        x, w = np.polynomial.legendre.leggauss(n_theta)
        phis = 2 * math.pi * np.arange(n_phi) / n_phi
        th, ph = np.meshgrid(np.arccos(x), phis, indexing="ij")
        vals = _ring_fidelity(gram, th, ph, Theta)
        return float((w[:, None] * vals).sum() / (2.0 * n_phi))
    if mode == FIXED_PHI:
        th = 2 * math.pi * np.arange(n_theta) / n_theta
        return float(_ring_fidelity(gram, th, np.zeros_like(th), Theta).mean())
    raise DomainError(f"unknown averaging mode {mode!r}")


def write_fig3_csv(path, rows):
    """Rows of ``(var/nbar, F)``."""
    return write_csv(path, ["var_over_nbar", "fidelity"], rows)


def write_fig4_csv(path, rows):
    """Rows of ``(Theta, F_opt, var_opt/nbar)``."""
    return write_csv(path, ["Theta", "fidelity_opt", "var_opt_over_nbar"], rows)


def write_fig6_csv(path, rows):
    """Rows of ``(nbar, Theta, delta_F, error_ratio)``."""
    return write_csv(path, ["nbar", "Theta", "delta_F", "error_ratio"], rows)
