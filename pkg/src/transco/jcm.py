"""Closed-form Jaynes-Cummings evolution in the interaction picture.

Time enters only through the dimensionless ``tau = Omega_0 t``. Amplitudes
``psi[n]`` with ``n < 0`` or ``n > n_max`` are treated as zero and
``Omega_n = 0`` for ``n < 0``.

The excited-start branch couples ``|n, e>`` to ``|n + m, g>``, so evolutions
that involve ``|e>`` return a joint state on the ladder ``0..n_max + m`` to
stay unitary.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from transco.errors import DomainError
from transco.fockcore import FieldState, QubitAngles


@dataclass(frozen=True)
class EvolutionParams:
    tau: float
    detuning_ratio: float = 0.0
    photon_order_m: int = 1

    def __post_init__(self):
        if self.tau < 0:
            raise DomainError(f"tau must be nonnegative, got {self.tau}")
        if self.photon_order_m < 1:
            raise DomainError("photon_order_m must be >= 1")


@dataclass(frozen=True, eq=False)
class JointState:
    """Atom-field amplitudes: ``cg[n]`` on ``|n, g>`` and ``ce[n]`` on ``|n, e>``."""

    cg: np.ndarray
    ce: np.ndarray

    def __post_init__(self):
        cg = np.array(self.cg, dtype=complex).ravel()
        ce = np.array(self.ce, dtype=complex).ravel()
        if cg.shape != ce.shape:
            raise DomainError("cg and ce must have equal length")
        cg.setflags(write=False)
        ce.setflags(write=False)
        object.__setattr__(self, "cg", cg)
        object.__setattr__(self, "ce", ce)

    @property
    def n_max(self) -> int:
        return self.cg.size - 1

    @property
    def norm2(self) -> float:
        return float(np.vdot(self.cg, self.cg).real + np.vdot(self.ce, self.ce).real)

    def to_dict(self) -> dict:
        return {
            "n_max": self.n_max,
            "cg_re": self.cg.real.tolist(),
            "cg_im": self.cg.imag.tolist(),
            "ce_re": self.ce.real.tolist(),
            "ce_im": self.ce.imag.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "JointState":
        cg = np.asarray(data["cg_re"]) + 1j * np.asarray(data["cg_im"])
        ce = np.asarray(data["ce_re"]) + 1j * np.asarray(data["ce_im"])
        if cg.size != int(data["n_max"]) + 1:
            raise DomainError("inconsistent joint-state JSON: lengths do not match n_max")
        return cls(cg, ce)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "JointState":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class QubitDensity:
    """Reduced atomic density matrix in the ``(g, e)`` basis."""

    rho: np.ndarray

    @property
    def purity(self) -> float:
        return float(np.real(np.trace(self.rho @ self.rho)))

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.rho)))

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.rho)

    def bloch_vector(self) -> np.ndarray:
        r = self.rho
        return np.array([2 * r[1, 0].real, 2 * r[1, 0].imag, (r[1, 1] - r[0, 0]).real])


def rabi_freqs(n, m: int = 1) -> np.ndarray:
    """Resonant ``m``-photon Rabi frequencies ``sqrt((n+m)...(n+1))`` in units of the coupling; zero for ``n < 0``."""
    n = np.asarray(n, dtype=float)
    prod = np.ones_like(n)
    for j in range(1, m + 1):
        prod = prod * (n + j)
    return np.where(n >= 0, np.sqrt(np.abs(prod)), 0.0)


def rabi_freq(n: int, params: EvolutionParams | None = None) -> float:
    """Rabi frequency of manifold ``n`` (``|n, e>`` with ``|n + m, g>``) in units of the coupling.

    Detuning adds in quadrature for ``m = 1``: ``sqrt(n + 1 + (delta/Omega_0)^2)``.
    Returns 0 for ``n < 0``.
    """
    params = params or EvolutionParams(0.0)
    if n < 0:
        return 0.0
    m = params.photon_order_m
    if params.detuning_ratio != 0.0:
        if m != 1:
            raise DomainError("detuning is only defined for the one-photon model")
        return math.sqrt(n + 1 + params.detuning_ratio**2)
    return float(rabi_freqs(n, m))


def _shift(psi: np.ndarray, k: int, size: int) -> np.ndarray:
    """``out[n] = psi[n + k]`` on ``0..size-1`` with out-of-range entries zero."""
    out = np.zeros(size, dtype=complex)
    n = np.arange(size)
    idx = n + k
    ok = (idx >= 0) & (idx < psi.size)
    out[ok] = psi[idx[ok]]
    return out


def _require_resonant(params: EvolutionParams):
    if params.detuning_ratio != 0.0:
        raise DomainError("resonant evolution called with nonzero detuning; use evolve_detuned_from_ground")


def ground_branch(psi: np.ndarray, tau: float, m: int = 1, size: int | None = None):
    """``(cg, ce)`` for the atom starting in ``|g>``."""
    size = psi.size if size is None else size
    n = np.arange(size)
    cg = _shift(psi, 0, size) * np.cos(rabi_freqs(n - m, m) * tau / 2)
    ce = -1j * _shift(psi, m, size) * np.sin(rabi_freqs(n, m) * tau / 2)
    return cg, ce


def excited_branch(psi: np.ndarray, tau: float, m: int = 1, size: int | None = None):
    """``(cg, ce)`` for the atom starting in ``|e>``."""
    size = psi.size + m if size is None else size
    n = np.arange(size)
    ce = _shift(psi, 0, size) * np.cos(rabi_freqs(n, m) * tau / 2)
    cg = -1j * _shift(psi, -m, size) * np.sin(rabi_freqs(n - m, m) * tau / 2)
    return cg, ce


def evolve_from_ground(field: FieldState, params: EvolutionParams) -> JointState:
    _require_resonant(params)
    return JointState(*ground_branch(field.amps, params.tau, params.photon_order_m))


def evolve_from_excited(field: FieldState, params: EvolutionParams) -> JointState:
    _require_resonant(params)
    return JointState(*excited_branch(field.amps, params.tau, params.photon_order_m))


def evolve_joint(field: FieldState, atom: QubitAngles, params: EvolutionParams) -> JointState:
    """Evolve ``field (x) |theta, phi>`` as the atom-amplitude-weighted sum of both branches."""
    _require_resonant(params)
    m = params.photon_order_m
    size = field.amps.size + m
    ag, ae = atom.amplitudes()
    gg, ge = ground_branch(field.amps, params.tau, m, size)
    eg, ee = excited_branch(field.amps, params.tau, m, size)
    return JointState(ag * gg + ae * eg, ag * ge + ae * ee)


def evolve_detuned_from_ground(field: FieldState, params: EvolutionParams) -> JointState:
    """Ground-start evolution under ``(delta/2) sigma_z + (Omega_0/2)(a sigma_+ + a^dag sigma_-)``.

    Manifold ``n`` (``|n, e>``, ``|n+1, g>``) has ``Omega(n) = sqrt(n + 1 + d^2)`` and
    mixing angle ``alpha_n = atan2(sqrt(n + 1), d)`` with ``d = delta/Omega_0``; the
    lone state ``|0, g>`` is manifold ``-1`` and only picks up a phase.
    """
    if params.photon_order_m != 1:
        raise DomainError("detuned evolution is implemented for m = 1 only")
    d = float(params.detuning_ratio)
    psi = field.amps
    size = psi.size
    man = np.arange(-1, size - 1)  # manifold index n for psi[n + 1]
    coupling = np.sqrt(man + 1.0)
    freq = np.sqrt(man + 1.0 + d * d)
    alpha = np.arctan2(coupling, d)
    half = freq * params.tau / 2
    g_factor = np.cos(half) + 1j * np.sin(half) * np.cos(alpha)
    e_factor = -1j * np.sin(half) * np.sin(alpha)
    cg = psi * g_factor
    ce = np.zeros(size, dtype=complex)
    ce[: size - 1] = psi[1:] * e_factor[1:]
    return JointState(cg, ce)


def reduce_atom(joint: JointState) -> QubitDensity:
    cg, ce = joint.cg, joint.ce
    rho = np.array(
        [
            [np.vdot(cg, cg), np.vdot(ce, cg)],
            [np.vdot(cg, ce), np.vdot(ce, ce)],
        ],
        dtype=complex,
    )
    return QubitDensity(rho)


def reduce_field(joint: JointState) -> np.ndarray:
    """Reduced field density matrix ``rho[n, n'] = sum_a c_a[n] c_a[n']^*``."""
    return np.outer(joint.cg, joint.cg.conj()) + np.outer(joint.ce, joint.ce.conj())


def coherence(joint: JointState) -> float:
    """``|<sigma_+>| + |<sigma_->| = 2 |sum_n ce[n] cg[n]^*|``."""
    return 2.0 * abs(np.vdot(joint.cg, joint.ce))


def atom_fidelity(joint: JointState, target) -> float:
    """``<t| rho_atom |t>`` for a normalized atomic target ``(t_g, t_e)``."""
    t = np.asarray(target, dtype=complex)
    overlap = np.conj(t[0]) * joint.cg + np.conj(t[1]) * joint.ce
    return float(np.vdot(overlap, overlap).real)


def excitation_number(joint: JointState, m: int = 1) -> float:
    """``<a^dag a> + m <|e><e|>``, conserved by the resonant ``m``-photon interaction."""
    n = np.arange(joint.cg.size)
    return float(np.dot(n, np.abs(joint.cg) ** 2) + np.dot(n + m, np.abs(joint.ce) ** 2))
