"""Truncated Fock-space field states.

A :class:`FieldState` holds photon-number amplitudes ``psi[n]`` for
``n = 0..n_max``. Constructors always return normalized states with the global
phase fixed so that the first nonzero amplitude is real and positive.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from transco.errors import DomainError

NORM_TOL = 1e-12
_SINC_SERIES_CUTOFF = 1e-4


def sinc(x):
    """Unnormalized sinc, ``sin(x)/x`` with ``sinc(0) = 1``.

    Accepts scalars or arrays. A Taylor branch is used for ``|x| < 1e-4``.
    """
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < _SINC_SERIES_CUTOFF
    safe = np.where(small, 1.0, x)
    x2 = x * x
    out = np.where(small, 1.0 - x2 / 6.0 + x2 * x2 / 120.0, np.sin(safe) / safe)
    return float(out) if out.ndim == 0 else out


def suggest_nmax(nbar: float, var: float) -> int:
    """Truncation index ``ceil(nbar + 6 sigma + 10)`` used throughout the figure drivers."""
    if var < 0:
        raise DomainError(f"variance must be nonnegative, got {var}")
    return int(math.ceil(nbar + 6.0 * math.sqrt(var) + 10.0))


def _fix_phase(amps: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(amps)
    if nz.size == 0:
        raise DomainError("field state has no nonzero amplitude")
    lead = amps[nz[0]]
    return amps * (abs(lead) / lead)


@dataclass(frozen=True, eq=False)
class FieldState:
    """Pure single-mode field state on the Fock ladder ``0..n_max``.

    Instances are immutable: the amplitude array is stored read-only.
    Use :meth:`from_amplitudes` to normalize arbitrary input.
    """

    amps: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amps, dtype=complex).ravel()
        if amps.size == 0:
            raise DomainError("field state needs at least one amplitude")
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > 1e-10:
            raise DomainError(f"amplitudes not normalized (norm^2 = {norm!r}); use FieldState.from_amplitudes")
        amps.setflags(write=False)
        object.__setattr__(self, "amps", amps)

    @classmethod
    def from_amplitudes(cls, amps, fix_phase: bool = True) -> "FieldState":
        amps = np.array(amps, dtype=complex).ravel()
        if not np.all(np.isfinite(amps)):
            raise DomainError("amplitudes must be finite")
        norm = math.sqrt(float(np.vdot(amps, amps).real))
        if norm == 0.0:
            raise DomainError("cannot normalize the zero vector")
        amps = amps / norm
        if fix_phase:
            amps = _fix_phase(amps)
        return cls(amps)

    @property
    def n_max(self) -> int:
        return self.amps.size - 1

    @property
    def probs(self) -> np.ndarray:
        return np.abs(self.amps) ** 2

    def padded(self, n_max: int) -> np.ndarray:
        """Amplitudes zero-padded (never truncated) to length ``n_max + 1``."""
        if n_max < self.n_max:
            raise DomainError(f"cannot pad state with n_max={self.n_max} down to {n_max}")
        out = np.zeros(n_max + 1, dtype=complex)
        out[: self.amps.size] = self.amps
        return out

    def to_dict(self) -> dict:
        return {
            "n_max": self.n_max,
            "re": [float(v) for v in self.amps.real],
            "im": [float(v) for v in self.amps.imag],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "FieldState":
        re = np.asarray(data["re"], dtype=float)
        im = np.asarray(data["im"], dtype=float)
        if re.shape != im.shape or re.size != int(data["n_max"]) + 1:
            raise DomainError("inconsistent field-state JSON: lengths do not match n_max")
        return cls.from_amplitudes(re + 1j * im, fix_phase=False)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "FieldState":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class GaussianSpec:
    """Gaussian photon-number distribution with a constant phase step.

    ``phase_step`` is the phase difference ``arg psi[n+1] - arg psi[n]``.
    """

    nbar: float
    var: float
    n_max: int
    phase_step: float = math.pi / 2

    def __post_init__(self):
        if not self.var > 0:
            raise DomainError(f"variance must be positive, got {self.var}")
        if self.nbar < 0:
            raise DomainError(f"mean photon number must be nonnegative, got {self.nbar}")
        if self.n_max < self.nbar + 6.0 * math.sqrt(self.var):
            raise DomainError(
                f"n_max={self.n_max} below nbar + 6 sigma = {self.nbar + 6.0 * math.sqrt(self.var):.3f}"
            )


@dataclass(frozen=True)
class QubitAngles:
    """Bloch-sphere point ``cos(theta/2)|g> + sin(theta/2) e^{i phi}|e>``."""

    theta: float
    phi: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.theta <= 2 * math.pi):
            raise DomainError(f"theta must lie in [0, 2pi], got {self.theta}")
        if not (0.0 <= self.phi < 2 * math.pi):
            raise DomainError(f"phi must lie in [0, 2pi), got {self.phi}")

    def amplitudes(self) -> np.ndarray:
        """``(c_g, c_e)`` of the atomic state."""
        return np.array(
            [math.cos(self.theta / 2), math.sin(self.theta / 2) * np.exp(1j * self.phi)],
            dtype=complex,
        )


@dataclass(frozen=True)
class PulseSpec:
    """Target pulse for an exact construction.

    ``start`` is ``"ground"`` or ``"excited"``; ``branch_k`` selects the
    excitation-manifold branch.
    """

    theta: float
    branch_k: int = 0
    start: str = "ground"

    def __post_init__(self):
        if self.start not in ("ground", "excited"):
            raise DomainError(f"start must be 'ground' or 'excited', got {self.start!r}")
        if self.branch_k < 0:
            raise DomainError("branch_k must be nonnegative")

    def is_deliverable(self) -> bool:
        """Whether the pulse area is reachable exactly from ``start`` on branch ``k``."""
        k = self.branch_k
        if self.start == "ground":
            return 2 * k * math.pi <= self.theta <= (2 * k + 1) * math.pi
        return (2 * k + 1) * math.pi <= self.theta + math.pi <= (2 * k + 2) * math.pi


def make_fock(n: int, n_max: int) -> FieldState:
    if not (0 <= n <= n_max):
        raise DomainError(f"need 0 <= n <= n_max, got n={n}, n_max={n_max}")
    amps = np.zeros(n_max + 1, dtype=complex)
    amps[n] = 1.0
    return FieldState(amps)


def gaussian_magnitudes(nbar: float, var: float, n_max: int) -> np.ndarray:
    """Normalized ``|psi_n|`` of the Gaussian distribution, built in log space.

    No truncation check; the optimizer inner loops call this directly.
    """
    n = np.arange(n_max + 1, dtype=float)
    log_amp = -((n - nbar) ** 2) / (4.0 * var)
    mag = np.exp(log_amp - log_amp.max())
    return mag / np.linalg.norm(mag)


def make_gaussian(spec: GaussianSpec) -> FieldState:
    """Gaussian probabilities ``exp[-(n - nbar)^2 / 2 var]`` with ``arg psi[n] = n * phase_step``."""
    mag = gaussian_magnitudes(spec.nbar, spec.var, spec.n_max)
    return FieldState.from_amplitudes(mag * np.exp(1j * spec.phase_step * np.arange(mag.size)))


def gaussian_field(nbar: float, var: float, n_max: int | None = None, phase_step: float = math.pi / 2) -> FieldState:
    """Shorthand for :func:`make_gaussian` with the suggested truncation."""
    if n_max is None:
        n_max = suggest_nmax(nbar, max(var, 0.0))
    return make_gaussian(GaussianSpec(nbar, var, n_max, phase_step))


def coherent_probabilities(nbar: float, n_max: int) -> np.ndarray:
    """Poisson photon-number distribution of a coherent state, truncated at ``n_max``."""
    n = np.arange(n_max + 1)
    if nbar == 0:
        p = np.zeros(n_max + 1)
        p[0] = 1.0
        return p
    lg = np.array([math.lgamma(k + 1.0) for k in n])
    return np.exp(n * math.log(nbar) - nbar - lg)


def make_coherent(nbar: float, n_max: int, phase_step: float = math.pi / 2) -> FieldState:
    amps = np.sqrt(coherent_probabilities(nbar, n_max)) * np.exp(1j * phase_step * np.arange(n_max + 1))
    return FieldState.from_amplitudes(amps)


def rephase(state: FieldState, phase_step: float) -> FieldState:
    """Same photon-number distribution with the phase ladder ``arg psi[n] = n * phase_step``."""
    mag = np.abs(state.amps)
    return FieldState.from_amplitudes(mag * np.exp(1j * phase_step * np.arange(mag.size)))


def moments(state: FieldState) -> tuple[float, float]:
    """Mean photon number and photon-number variance."""
    p = state.probs
    n = np.arange(p.size, dtype=float)
    mean = float(np.dot(n, p))
    var = float(np.dot((n - mean) ** 2, p))
    return mean, var


def fit_gaussian(state: FieldState) -> tuple[float, float]:
    """Moment-matched Gaussian parameters ``(nbar, var)``.

    The distribution is assumed singly peaked; nothing is validated.
    """
    return moments(state)


def squeezing_db(theta: float) -> float:
    """Quadrature squeezing in dB that yields number variance ``nbar * sinc(theta)``."""
    s = sinc(theta)
    if s <= 0:
        raise DomainError(f"sinc({theta}) = {s} is not positive; no squeezing level reaches it")
    return -10.0 * math.log10(s)


def write_distribution_csv(path, state: FieldState, with_coherent: bool = False) -> Path:
    """Write ``n, prob`` rows (plus the matched-mean Poisson column if requested)."""
    path = Path(path)
    probs = state.probs
    header = ["n", "prob"]
    cols = [probs]
    if with_coherent:
        header.append("coherent_prob")
        cols.append(coherent_probabilities(moments(state)[0], state.n_max))
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for n in range(probs.size):
            writer.writerow([n] + [f"{c[n]:.17g}" for c in cols])
    return path
