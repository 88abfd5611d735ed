"""Tavis-Cummings evolution of ``2J`` atoms starting in ``|J, -J>``.

Amplitudes are stored as ``c[n, k]`` on ``|n> (x) |J, -J + k>``. Exact
evolution diagonalizes each excitation block, a real symmetric tridiagonal
matrix in units of ``Omega_0 / 2``, with the QL kernel; the eigensystems only
depend on ``(2J, n_max)`` and are cached.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from transco import kernels
from transco.errors import DomainError
from transco.fockcore import FieldState

SUPPORT_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class DickeJointState:
    """Joint field/collective-spin amplitudes ``c[n, k]``, ``m = k - J``."""

    J2: int
    c: np.ndarray

    def __post_init__(self):
        c = np.array(self.c, dtype=complex)
        if c.ndim != 2 or c.shape[1] != self.J2 + 1:
            raise DomainError(f"amplitude array must have shape (n_max + 1, {self.J2 + 1})")
        c.setflags(write=False)
        object.__setattr__(self, "c", c)

    @property
    def J(self) -> float:
        return self.J2 / 2

    @property
    def n_max(self) -> int:
        return self.c.shape[0] - 1

    @property
    def norm2(self) -> float:
        return float(np.sum(np.abs(self.c) ** 2))

    def amplitude(self, n: int, m: float) -> complex:
        k = int(round(m + self.J))
        return complex(self.c[n, k])

    def to_dict(self) -> dict:
        return {"J2": self.J2, "n_max": self.n_max, "re": self.c.real.tolist(), "im": self.c.imag.tolist()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "DickeJointState":
        c = np.asarray(data["re"]) + 1j * np.asarray(data["im"])
        if c.shape[0] != int(data["n_max"]) + 1:
            raise DomainError("inconsistent Dicke-state JSON: rows do not match n_max")
        return cls(int(data["J2"]), c)


@dataclass(frozen=True)
class ExcitationBlock:
    """Block ``E`` on the basis ``|E - k> (x) |J, -J + k>``, ``k = 0..dim-1``."""

    E: int
    J2: int

    @property
    def dim(self) -> int:
        return min(self.J2, self.E) + 1

    def offdiag(self) -> np.ndarray:
        k = np.arange(self.dim - 1)
        return np.sqrt(self.E - k) * np.sqrt((self.J2 - k) * (k + 1.0))

    @property
    def hamiltonian(self) -> np.ndarray:
        off = self.offdiag()
        return np.diag(off, 1) + np.diag(off, -1)


def _check_j2(J2: int):
    if int(J2) != J2 or J2 < 1:
        raise DomainError(f"J2 (number of atoms) must be a positive integer, got {J2}")


@lru_cache(maxsize=32)
def block_eigensystems(J2: int, n_max: int):
    """``(w_small, z_small, w_full, z_full)`` for blocks ``E < J2`` and ``J2 <= E <= n_max``.

    ``w_small``/``z_small`` are lists indexed by ``E``; the full-dimension
    blocks are stacked in arrays indexed by ``E - J2``.
    """
    _check_j2(J2)
    w_small, z_small = [], []
    for E in range(min(J2, n_max + 1)):
        blk = ExcitationBlock(E, J2)
        w, z = kernels.tridiag_eigh_batch(np.zeros((1, blk.dim)), blk.offdiag()[None, :])
        w_small.append(w[0])
        z_small.append(z[0])
    if n_max >= J2:
        Es = np.arange(J2, n_max + 1)
        k = np.arange(J2)
        off = np.sqrt(Es[:, None] - k[None, :]) * np.sqrt((J2 - k) * (k + 1.0))[None, :]
        w_full, z_full = kernels.tridiag_eigh_batch(np.zeros((Es.size, J2 + 1)), off)
    else:
        w_full = np.zeros((0, J2 + 1))
        z_full = np.zeros((0, J2 + 1, J2 + 1))
    for arr in (w_full, z_full):
        arr.setflags(write=False)
    return tuple(w_small), tuple(z_small), w_full, z_full


def tcm_evolve_exact(field: FieldState, J2: int, tau: float) -> DickeJointState:
    """Exact evolution ``exp(-i tau H / 2)`` of ``field (x) |J, -J>`` block by block."""
    _check_j2(J2)
    psi = field.amps
    n_max = field.n_max
    w_small, z_small, w_full, z_full = block_eigensystems(J2, n_max)
    c = np.zeros((n_max + 1, J2 + 1), dtype=complex)
    for E, (w, z) in enumerate(zip(w_small, z_small)):
        if psi[E] == 0:
            continue
        amp = z @ (np.exp(-0.5j * tau * w) * z[0, :]) * psi[E]
        k = np.arange(w.size)
        c[E - k, k] = amp
    if w_full.shape[0]:
        amps = np.einsum("bij,bj->bi", z_full, np.exp(-0.5j * tau * w_full) * z_full[:, 0, :])
        amps *= psi[J2:, None]
        Es = np.arange(J2, n_max + 1)
        for k in range(J2 + 1):
            c[Es - k, k] = amps[:, k]
    return DickeJointState(J2, c)


def tcm_evolve_n2_analytic(field: FieldState, tau: float) -> DickeJointState:
    """Closed-form two-atom evolution (``J = 1``)."""
    psi = field.amps
    n_max = field.n_max
    c = np.zeros((n_max + 1, 3), dtype=complex)
    c[0, 0] += psi[0]
    if n_max >= 1:
        w = tau / math.sqrt(2)
        c[1, 0] += psi[1] * math.cos(w)
        c[0, 1] += -1j * psi[1] * math.sin(w)
    for n in range(2, n_max + 1):
        d = 2 * n - 1
        w = tau * math.sqrt(d) / math.sqrt(2)
        c[n, 0] += psi[n] * ((n - 1) / d + n / d * math.cos(w))
        c[n - 2, 2] += psi[n] * math.sqrt(n * (n - 1)) / d * (math.cos(w) - 1.0)
        c[n - 1, 1] += -1j * psi[n] * math.sqrt(n / d) * math.sin(w)
    return DickeJointState(2, c)


def rabi_freq_tcm(J2: int, n) -> np.ndarray:
    """Strong-field collective Rabi frequency ``sqrt(n - J + 1/2)`` in units of ``Omega_0``."""
    return np.sqrt(np.maximum(np.asarray(n, dtype=float) - J2 / 2 + 0.5, 0.0))


def _binom_sqrt(J2: int) -> np.ndarray:
    return np.sqrt(np.array([math.comb(J2, k) for k in range(J2 + 1)], dtype=float))


def tcm_evolve_approx(field: FieldState, J2: int, tau: float) -> DickeJointState:
    """Strong-field approximate propagator.

    ``c[n, k] = (-i)^k sqrt(C(2J, k)) psi[n+k] cos^{2J-k}(w/2) sin^k(w/2)`` with
    ``w = Omega(J, n+k) tau``. The field must vanish on ``n <= 2J``; weight
    there above ``SUPPORT_TOL`` is a :class:`DomainError`, smaller weight is
    dropped.
    """
    _check_j2(J2)
    psi = np.array(field.amps)
    low = float(np.sum(np.abs(psi[: J2 + 1]) ** 2))
    if low > SUPPORT_TOL:
        raise DomainError(f"approximate propagator needs psi_n = 0 for n <= {J2}; found weight {low:.3g} there")
    psi[: J2 + 1] = 0.0
    size = psi.size
    k = np.arange(J2 + 1)
    idx = np.arange(size)[:, None] + k[None, :]
    ok = idx < size
    half = rabi_freq_tcm(J2, idx) * tau / 2
    val = ((-1j) ** k * _binom_sqrt(J2))[None, :] * np.cos(half) ** (J2 - k) * np.sin(half) ** k
    c = np.where(ok, psi[np.minimum(idx, size - 1)] * val, 0.0)
    return DickeJointState(J2, c)


def spin_coherent(J2: int, Theta: float) -> np.ndarray:
    """Components of the spin-coherent state rotated by ``Theta`` from ``|J, -J>``."""
    k = np.arange(J2 + 1)
    return _binom_sqrt(J2) * math.cos(Theta / 2) ** (J2 - k) * math.sin(Theta / 2) ** k


def spin_target_fidelity(state: DickeJointState, Theta: float) -> float:
    """Overlap with the ``Theta``-rotated spin-coherent state, field traced out."""
    return float(np.sum(np.abs(state.c @ spin_coherent(state.J2, Theta)) ** 2))


def spin_expectations(state: DickeJointState) -> tuple[float, float, float]:
    """``(<J_x>, <J_y>, <J_z>)``."""
    J2 = state.J2
    c = state.c
    k = np.arange(J2 + 1)
    jz = float(np.sum((k - J2 / 2) * np.abs(c) ** 2))
    lad = np.sqrt((J2 - k[:-1]) * (k[:-1] + 1.0))
    jplus = np.sum(np.conj(c[:, 1:]) * lad * c[:, :-1])
    return float(jplus.real), float(jplus.imag), jz


def jz_heisenberg(field: FieldState, J2: int, tau: float) -> float:
    """``-J sum_n |psi_n|^2 cos(tau sqrt(n - J + 1/2))``."""
    n = np.arange(field.amps.size)
    return float(-J2 / 2 * np.sum(field.probs * np.cos(tau * rabi_freq_tcm(J2, n))))


def reduced_spin_density(state: DickeJointState) -> np.ndarray:
    return state.c.T @ state.c.conj()


def spin_impurity(state: DickeJointState) -> float:
    """``1 - tr(rho_spin^2)``; zero iff the spins end unentangled with the field."""
    rho = reduced_spin_density(state)
    return float(1.0 - np.real(np.trace(rho @ rho)) / state.norm2**2)


def variance_l_diagnostic(nbar: float, J2: int, l: float) -> float:
    """``(nbar - J + 1/2)/pi (1 + 2 l (l+1) / 3J)`` for a summation half-width ``l``.

    A diagnostic only; the natural width is ``l = (sqrt(2J+1) - 1)/2``.
    """
    J = J2 / 2
    return (nbar - J + 0.5) / math.pi * (1 + 2 * l * (l + 1) / (3 * J))


def fitted_variance_curve(nbar: float, J2: int) -> float:
    """Empirical strong-field optimum ``2 (nbar - 1.2 J + 1/2) / pi``."""
    return 2 * (nbar - 1.2 * J2 / 2 + 0.5) / math.pi


def fitted_time_curve(nbar: float, J2: int) -> float:
    """Empirical strong-field optimum ``tau = (pi/2) / sqrt(nbar - 2J + 1/2)``."""
    return math.pi / 2 / math.sqrt(nbar - J2 + 0.5)
