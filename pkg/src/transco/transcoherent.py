"""Field states that rotate a ground- or excited-state atom exactly to ``|theta>``.

Both builders work in log-magnitude space with the phase tracked in quarter
turns, so truncation indices of several thousand do not overflow.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from transco import jcm
from transco.errors import DomainError
from transco.fockcore import FieldState, PulseSpec

_QUARTER = np.array([1.0, 1.0j, -1.0, -1.0j])


@dataclass(frozen=True)
class RecursionBuild:
    """Output of a recursion builder.

    ``n_boundary`` is ``n_max`` for ground builds and ``n_min`` for excited ones.
    ``truncation_leak`` is the relative probability that the truncated series
    leaks out of the target subspace (zero, to rounding, when the series ends
    exactly).
    """

    state: FieldState
    tau: float
    spec: PulseSpec
    photon_order_m: int
    n_boundary: int
    n_top: int
    truncation_leak: float = 0.0

    @property
    def exact(self) -> bool:
        return self.truncation_leak < 1e-20

    def to_dict(self) -> dict:
        return {
            "tau": self.tau,
            "spec": asdict(self.spec),
            "photon_order_m": self.photon_order_m,
            "n_boundary": self.n_boundary,
            "n_top": self.n_top,
            "truncation_leak": self.truncation_leak,
            "exact": self.exact,
            "state": self.state.to_dict(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "RecursionBuild":
        return cls(
            state=FieldState.from_dict(data["state"]),
            tau=float(data["tau"]),
            spec=PulseSpec(**data["spec"]),
            photon_order_m=int(data["photon_order_m"]),
            n_boundary=int(data["n_boundary"]),
            n_top=int(data["n_top"]),
            truncation_leak=float(data.get("truncation_leak", 0.0)),
        )


def _check_theta(theta: float):
    if not (0.0 < theta < math.pi):
        raise DomainError(f"theta must lie strictly inside (0, pi), got {theta}")


def _assemble(n_idx: np.ndarray, log_mag: np.ndarray, quarter: np.ndarray, size: int) -> FieldState:
    amps = np.zeros(size, dtype=complex)
    amps[n_idx] = np.exp(log_mag - log_mag.max()) * _QUARTER[quarter % 4]
    return FieldState.from_amplitudes(amps)


def build_ground(theta: float, n_max: int, m: int = 1) -> RecursionBuild:
    """Ground-start state whose top manifold completes a pi pulse at the returned ``tau``.

    Seeds ``psi[n_max]`` and recurses down in steps of ``m``; the support is the
    residue class of ``n_max`` modulo ``m``.
    """
    _check_theta(theta)
    if m < 1:
        raise DomainError("m must be >= 1")
    if n_max < max(m, 1):
        raise DomainError(f"n_max={n_max} must be at least m={m}")
    tau = math.pi / float(jcm.rabi_freqs(n_max - m, m))
    n_idx = np.arange(n_max, -1, -m)
    log_tan = math.log(math.tan(theta / 2))
    log_mag = np.zeros(n_idx.size)
    quarter = np.zeros(n_idx.size, dtype=int)
    for j in range(1, n_idx.size):
        n = n_idx[j]
        s = math.sin(float(jcm.rabi_freqs(n, m)) * tau / 2)
        c = math.cos(float(jcm.rabi_freqs(n - m, m)) * tau / 2)
        # psi[n] = psi[n+m] * s / (i tan(theta/2) c), with s, c > 0 on the support
        log_mag[j] = log_mag[j - 1] + math.log(s) - log_tan - math.log(c)
        quarter[j] = quarter[j - 1] - 1
    quarter -= quarter[-1]
    state = _assemble(n_idx, log_mag, quarter, n_max + 1)
    return RecursionBuild(state, tau, PulseSpec(theta, 0, "ground"), m, n_max, n_max)


def build_excited(theta: float, n_min: int, k: int = 0, m: int = 1, max_terms: int = 200_000) -> RecursionBuild:
    """Excited-start state whose lowest manifold completes a ``(2k+1) pi`` pulse.

    The series runs upward from ``psi[n_min]`` in steps of ``m`` until just
    before the denominator ``cos(Omega_{n+m} tau / 2)`` crosses its next zero
    past the ``(4k+2) pi`` boundary, or until further terms fall below
    ``1e-16`` of the peak. It is cut at the term whose leak out of the target
    subspace is smallest. For ``m = 1`` the numerator vanishes exactly on the
    boundary (``n_top = 4 n_min + 3`` for ``k = 0``, unless the tail has
    already underflowed); for ``m > 1`` the boundary is generally not hit and
    ``truncation_leak`` reports the residue.
    """
    _check_theta(theta)
    if m < 1 or k < 0:
        raise DomainError("need m >= 1 and k >= 0")
    if n_min < 0:
        raise DomainError("n_min must be nonnegative")
    tau = (2 * k + 1) * math.pi / float(jcm.rabi_freqs(n_min, m))
    stop_phase = (4 * k + 3) * math.pi
    log_tan = math.log(math.tan(theta / 2))

    ns = [n_min]
    log_mag = [0.0]
    quarter = [0]
    n = n_min
    while len(ns) < max_terms:
        w_next = float(jcm.rabi_freqs(n + m, m)) * tau
        if w_next >= stop_phase:
            break
        s = math.sin(float(jcm.rabi_freqs(n, m)) * tau / 2)
        c = math.cos(w_next / 2)
        if abs(s) < 1e-13 or c == 0.0:
            # numerical zero of the numerator: the series closes at n
            break
        # psi[n+m] = -i tan(theta/2) s / c * psi[n]
        step = -1 + (0 if s > 0 else 2) + (0 if c > 0 else 2)
        log_mag.append(log_mag[-1] + log_tan + math.log(abs(s)) - math.log(abs(c)))
        quarter.append(quarter[-1] + step)
        n += m
        ns.append(n)
        if log_mag[-1] < max(log_mag) - 2 * 16 * math.log(10) and abs(s) < 1.0:
            break
    ns_arr = np.array(ns)
    lm = np.array(log_mag)
    lm_rel = lm - lm.max()
    p = np.exp(2 * lm_rel)
    sin_top = np.abs(np.sin(jcm.rabi_freqs(ns_arr, m) * tau / 2))
    leak = p * sin_top**2 / np.cumsum(p)
    top = int(np.argmin(leak))
    state = _assemble(ns_arr[: top + 1], lm[: top + 1], np.array(quarter[: top + 1]), int(ns_arr[top]) + 1)
    return RecursionBuild(
        state,
        tau,
        PulseSpec(theta, k, "excited"),
        m,
        n_min,
        int(ns_arr[top]),
        float(leak[top]),
    )


def verify_build(build: RecursionBuild) -> tuple[float, float]:
    """Evolve a build for its own ``tau`` and return ``(atom purity, fidelity to |theta>)``."""
    params = jcm.EvolutionParams(build.tau, 0.0, build.photon_order_m)
    if build.spec.start == "ground":
        joint = jcm.evolve_from_ground(build.state, params)
    else:
        joint = jcm.evolve_from_excited(build.state, params)
    theta = build.spec.theta
    target = (math.cos(theta / 2), math.sin(theta / 2))
    return jcm.reduce_atom(joint).purity, jcm.atom_fidelity(joint, target)


def detuned_leak(n_max: int, delta_ratio: float, tau_grid) -> float:
    """Smallest root-sum-square top-manifold truncation residual over ``tau_grid``.

    With ``d = delta/Omega_0``, manifold ``n_max - 1`` has
    ``Omega = sqrt(n_max + d^2)`` and ``alpha = atan2(sqrt(n_max), d)``. The two
    residuals are ``cos(Omega tau/2)`` and ``sin(Omega tau/2) cos(alpha)``; both
    vanish together only at zero detuning.
    """
    taus = np.asarray(tau_grid, dtype=float).ravel()
    if taus.size == 0:
        raise DomainError("tau grid is empty")
    if n_max < 1:
        raise DomainError("n_max must be >= 1")
    d = float(delta_ratio)
    freq = math.sqrt(n_max + d * d)
    alpha = math.atan2(math.sqrt(n_max), d)
    half = freq * taus / 2
    r_cos = np.cos(half) * (math.sin(alpha / 2) ** 2 + math.cos(alpha / 2) ** 2)
    r_sin = np.sin(half) * (math.sin(alpha / 2) ** 2 - math.cos(alpha / 2) ** 2)
    return float(np.min(np.hypot(r_cos, r_sin)))
