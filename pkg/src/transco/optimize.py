"""Nelder-Mead with restarts, parameter sweeps, and the figure-level drivers.

All optimizers here *maximize*. Positive physical parameters (variance,
interaction time) are searched in log coordinates.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from transco import fidelity as fid
from transco import tcm
from transco.errors import DomainError
from transco.fockcore import FieldState, gaussian_magnitudes, sinc, suggest_nmax
from transco.io import write_csv


@dataclass
class OptimizationResult:
    params_opt: np.ndarray
    objective_opt: float
    n_evals: int
    converged: bool
    restarts_used: int = 1
    names: tuple = ()

    def as_dict(self) -> dict:
        return {
            "params_opt": [float(v) for v in self.params_opt],
            "names": list(self.names),
            "objective_opt": float(self.objective_opt),
            "n_evals": int(self.n_evals),
            "converged": bool(self.converged),
            "restarts_used": int(self.restarts_used),
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict())

    def param(self, name: str) -> float:
        return float(self.params_opt[list(self.names).index(name)])


@dataclass(frozen=True)
class NMOptions:
    xtol: float = 1e-6
    ftol: float = 1e-10
    max_evals: int = 2000
    init_step: float = 0.1
    penalty: float = 1e3


def _boxed(objective, bounds, penalty):
    if bounds is None:
        return objective
    lo = np.array([b[0] for b in bounds], dtype=float)
    hi = np.array([b[1] for b in bounds], dtype=float)

    def wrapped(x):
        xc = np.clip(x, lo, hi)
        val = objective(xc)
        excess = float(np.sum((x - xc) ** 2))
        return val - penalty * excess if excess else val

    return wrapped


def nelder_mead(objective: Callable, x0, bounds=None, opts: NMOptions | None = None) -> OptimizationResult:
    """Maximize ``objective`` by the downhill simplex method.

    Coefficients: reflection 1, expansion 2, contraction 1/2, shrink 1/2.
    Stops when the simplex diameter (max-norm about the best vertex) is below
    ``xtol`` and the objective spread below ``ftol``, or once ``max_evals`` is
    reached; the budget is checked per iteration, so the last iteration may
    overshoot it by up to ``dim + 2`` evaluations.
    Out-of-box points are evaluated at the clamped point minus a quadratic
    penalty. The reported optimum is clamped into the box.
    """
    opts = opts or NMOptions()
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    f0 = objective(x0)
    if not np.isfinite(f0):
        raise DomainError(f"objective is not finite at x0 = {x0.tolist()}")
    func = _boxed(objective, bounds, opts.penalty)
    dim = x0.size
    evals = 0

    def f(x):
        nonlocal evals
        evals += 1
        return -float(func(x))

    simplex = [x0.copy()]
    for i in range(dim):
        v = x0.copy()
        v[i] += opts.init_step if v[i] == 0 else opts.init_step * max(abs(v[i]), 1.0)
        simplex.append(v)
    simplex = np.array(simplex)
    fs = np.array([f(v) for v in simplex])
    converged = False
    while True:
        order = np.argsort(fs, kind="stable")
        simplex, fs = simplex[order], fs[order]
        diam = float(np.max(np.abs(simplex[1:] - simplex[0])))
        if diam < opts.xtol and fs[-1] - fs[0] < opts.ftol:
            converged = True
            break
        if evals >= opts.max_evals:
            break
        centroid = simplex[:-1].mean(axis=0)
        worst = simplex[-1]
        xr = centroid + (centroid - worst)
        fr = f(xr)
        if fr < fs[0]:
            xe = centroid + 2.0 * (centroid - worst)
            fe = f(xe)
            if fe < fr:
                simplex[-1], fs[-1] = xe, fe
            else:
                simplex[-1], fs[-1] = xr, fr
            continue
        if fr < fs[-2]:
            simplex[-1], fs[-1] = xr, fr
            continue
        if fr < fs[-1]:
            xc = centroid + 0.5 * (xr - centroid)
            fc = f(xc)
            if fc <= fr:
                simplex[-1], fs[-1] = xc, fc
                continue
        else:
            xc = centroid + 0.5 * (worst - centroid)
            fc = f(xc)
            if fc < fs[-1]:
                simplex[-1], fs[-1] = xc, fc
                continue
        for i in range(1, dim + 1):
            simplex[i] = simplex[0] + 0.5 * (simplex[i] - simplex[0])
            fs[i] = f(simplex[i])
    best = simplex[0]
    if bounds is not None:
        best = np.clip(best, [b[0] for b in bounds], [b[1] for b in bounds])
    return OptimizationResult(best, -float(fs[0]), evals + 1, converged, 1)


def restart_points(x0, restarts: int, seed: int, spread: float) -> list:
    """``x0`` followed by ``restarts - 1`` Gaussian jitters drawn from a PCG64 stream."""
    rng = np.random.Generator(np.random.PCG64(seed))
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    pts = [x0]
    for _ in range(restarts - 1):
        pts.append(x0 + spread * rng.standard_normal(x0.size))
    return pts


def nelder_mead_restarts(
    objective: Callable,
    x0,
    bounds=None,
    opts: NMOptions | None = None,
    restarts: int = 8,
    seed: int = 0,
    spread: float = 0.1,
) -> OptimizationResult:
    """Best of ``restarts`` simplex runs; ties keep the earliest run."""
    if restarts < 1:
        raise DomainError("restarts must be >= 1")
    best = None
    total = 0
    for start in restart_points(x0, restarts, seed, spread):
        if bounds is not None:
            start = np.clip(start, [b[0] for b in bounds], [b[1] for b in bounds])
        res = nelder_mead(objective, start, bounds, opts)
        total += res.n_evals
        if best is None or res.objective_opt > best.objective_opt:
            best = res
    best.n_evals = total
    best.restarts_used = restarts
    return best


# ---------------------------------------------------------------- objectives


def jcm_objective(nbar, var, tau, Theta, n_max, mode=fid.FULL_SPHERE, varphi=math.pi / 2) -> float:
    """Averaged fidelity of a Gaussian field with phase step ``varphi``."""
    mags = gaussian_magnitudes(nbar, var, n_max)
    if mode == fid.FULL_SPHERE:
        return fid.full_sphere_phased(mags, tau, Theta, varphi)
    if mode == fid.FIXED_PHI:
        return fid.fixed_phi_phased(mags, tau, Theta, varphi)
    raise DomainError(f"unknown averaging mode {mode!r}")


def tcm_field(nbar, var, n_max, phase_step=math.pi / 2) -> FieldState:
    mags = gaussian_magnitudes(nbar, var, n_max)
    return FieldState(mags * np.exp(1j * phase_step * np.arange(mags.size)))


def tcm_objective(nbar, var, tau, J2, n_max, Theta=math.pi / 2, approx=False) -> float:
    field_state = tcm_field(nbar, var, n_max)
    if approx:
        state = tcm.tcm_evolve_approx(field_state, J2, tau)
    else:
        state = tcm.tcm_evolve_exact(field_state, J2, tau)
    return tcm.spin_target_fidelity(state, Theta)


def tcm_impurity(nbar, var, tau, J2, n_max) -> float:
    return tcm.spin_impurity(tcm.tcm_evolve_exact(tcm_field(nbar, var, n_max), J2, tau))


def _translate(p: dict) -> dict:
    p = dict(p)
    nbar = p.get("nbar")
    if "var_over_nbar" in p:
        p["var"] = p.pop("var_over_nbar") * nbar
    if "tau_sqrt_nbar" in p:
        p["tau"] = p.pop("tau_sqrt_nbar") / math.sqrt(nbar)
    if "n_max" not in p and nbar is not None:
        p["n_max"] = suggest_nmax(nbar, 3 * nbar) + int(p.get("J2", 0))
    p["n_max"] = int(p["n_max"])
    if "J2" in p:
        p["J2"] = int(p["J2"])
    return p


OBJECTIVES = {
    "jcm_full_sphere": lambda p: jcm_objective(mode=fid.FULL_SPHERE, **p),
    "jcm_fixed_phi": lambda p: jcm_objective(mode=fid.FIXED_PHI, **p),
    "tcm_exact": lambda p: tcm_objective(approx=False, **p),
    "tcm_approx": lambda p: tcm_objective(approx=True, **p),
    "tcm_impurity": lambda p: tcm_impurity(**p),
}


@dataclass(frozen=True)
class SweepAxis:
    name: str
    min: float
    max: float
    count: int
    scale: str = "linear"

    def __post_init__(self):
        if self.count < 2:
            raise DomainError(f"axis {self.name!r} needs count >= 2")
        if self.scale not in ("linear", "log"):
            raise DomainError(f"axis scale must be linear or log, got {self.scale!r}")
        if self.scale == "log" and not (self.min > 0 and self.max > 0):
            raise DomainError("log axes need positive bounds")

    def values(self) -> np.ndarray:
        if self.scale == "log":
            return np.geomspace(self.min, self.max, self.count)
        return np.linspace(self.min, self.max, self.count)


@dataclass(frozen=True)
class SweepGrid:
    axes: tuple
    objective: str
    fixed: dict = field(default_factory=dict)

    def points(self):
        grids = np.meshgrid(*[a.values() for a in self.axes], indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=-1)


def sweep(grid: SweepGrid, threads: int = 1) -> list:
    """Evaluate the objective on every grid point in row-major axis order.

    Returns rows ``(axis values..., objective)``. The row order does not
    depend on ``threads``.
    """
    if grid.objective not in OBJECTIVES:
        raise DomainError(f"unknown objective id {grid.objective!r}; known: {sorted(OBJECTIVES)}")
    func = OBJECTIVES[grid.objective]
    names = [a.name for a in grid.axes]
    pts = grid.points()

    def run(x):
        return func(_translate({**grid.fixed, **dict(zip(names, x))}))

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            vals = list(pool.map(run, pts))
    else:
        vals = [run(x) for x in pts]
    return [tuple(float(v) for v in x) + (float(val),) for x, val in zip(pts, vals)]


def write_sweep_csv(path, grid: SweepGrid, rows):
    return write_csv(path, [a.name for a in grid.axes] + [grid.objective], rows)


def grid_argmax(values: Sequence[float], scores: Sequence[float]) -> int:
    """Index of the max score; the smallest value wins ties within 1e-12."""
    scores = np.asarray(scores, dtype=float)
    top = scores.max()
    cand = np.flatnonzero(scores >= top - 1e-12)
    return int(cand[np.argmin(np.asarray(values)[cand])])


# ------------------------------------------------------------------ drivers


def optimize_jcm(
    nbar: float,
    Theta: float,
    n_max: int | None = None,
    mode: str = fid.FULL_SPHERE,
    tau: float | None = None,
    varphi: float | None = math.pi / 2,
    restarts: int = 4,
    seed: int = 0,
    opts: NMOptions | None = None,
) -> OptimizationResult:
    """Maximize the averaged fidelity over the Gaussian variance.

    ``tau=None`` also optimizes the interaction time and ``varphi=None`` the
    phase step. The simplex starts at the coherent point
    ``(var, tau) = (nbar, Theta / sqrt(nbar))``.
    """
    n_max = n_max or suggest_nmax(nbar, 3 * nbar)
    names = ["var"]
    x0 = [math.log(nbar)]
    bounds = [(math.log(0.05 * nbar), math.log(3.0 * nbar))]
    tau_c = Theta / math.sqrt(nbar)
    if tau is None:
        names.append("tau")
        x0.append(math.log(tau_c))
        bounds.append((math.log(0.2 * tau_c), math.log(5.0 * tau_c)))
    if varphi is None:
        names.append("varphi")
        x0.append(math.pi / 2)
        bounds.append((-math.pi, math.pi))

    def unpack(x):
        var = math.exp(x[0])
        i = 1
        t = tau
        if tau is None:
            t = math.exp(x[i])
            i += 1
        ph = varphi if varphi is not None else x[i]
        return var, t, ph

    def obj(x):
        var, t, ph = unpack(x)
        return jcm_objective(nbar, var, t, Theta, n_max, mode, ph)

    res = nelder_mead_restarts(obj, x0, bounds, opts, restarts, seed)
    var, t, ph = unpack(res.params_opt)
    params = [var] + ([t] if tau is None else []) + ([ph] if varphi is None else [])
    res.params_opt = np.array(params)
    res.names = tuple(names)
    return res


def fig3_curve(nbar=20.0, n_max=400, Theta=math.pi / 2, ratios=None) -> list:
    """Rows ``(var/nbar, F)`` at the classical time ``Theta / sqrt(nbar)``."""
    ratios = np.linspace(0.5, 1.3, 50) if ratios is None else np.asarray(ratios)
    tau = Theta / math.sqrt(nbar)
    return [(float(r), jcm_objective(nbar, r * nbar, tau, Theta, n_max)) for r in ratios]


def fig3_optimum(nbar=20.0, n_max=400, Theta=math.pi / 2, seed=0) -> OptimizationResult:
    return optimize_jcm(nbar, Theta, n_max, fid.FULL_SPHERE, tau=Theta / math.sqrt(nbar), seed=seed)


def fig4_rows(nbar=500.0, Thetas=None, n_max=1200, seed=0) -> list:
    """Rows ``(Theta, F_full, var_full/nbar, tau_full sqrt(nbar), F_fixed, var_fixed/nbar, varphi_fixed)``."""
    Thetas = np.array([math.pi / 4, math.pi / 2, 3 * math.pi / 4, math.pi]) if Thetas is None else Thetas
    rows = []
    for T in Thetas:
        full = optimize_jcm(nbar, T, n_max, fid.FULL_SPHERE, seed=seed)
        fixed = optimize_jcm(nbar, T, n_max, fid.FIXED_PHI, varphi=None, seed=seed)
        rows.append(
            (
                float(T),
                full.objective_opt,
                full.param("var") / nbar,
                full.param("tau") * math.sqrt(nbar),
                fixed.objective_opt,
                fixed.param("var") / nbar,
                fixed.param("varphi"),
            )
        )
    return rows


FIG4_HEADER = ["Theta", "F_full", "var_full_over_nbar", "tau_full_sqrt_nbar", "F_fixed", "var_fixed_over_nbar", "varphi_fixed"]


def fig6_rows(nbars=(50.0, 200.0), n_theta=16, seed=0) -> list:
    """Rows ``(nbar, Theta, F_sq, F_coh, delta_F, error_ratio)`` on ``Theta = j pi / n_theta``.

    ``F_sq`` maximizes over ``(var, tau)``; ``F_coh`` fixes ``var = nbar`` and
    maximizes over ``tau`` only. The squeezed search is started both from the
    coherent optimum and from ``var = nbar sinc(Theta/2)`` so it can never end
    below ``F_coh``.
    """
    rows = []
    for nbar in nbars:
        n_max = suggest_nmax(nbar, 3 * nbar)
        for j in range(1, n_theta + 1):
            T = j * math.pi / n_theta
            tau_c = T / math.sqrt(nbar)
            coh = nelder_mead_restarts(
                lambda x: jcm_objective(nbar, nbar, math.exp(x[0]), T, n_max),
                [math.log(tau_c)],
                [(math.log(0.2 * tau_c), math.log(5 * tau_c))],
                restarts=2,
                seed=seed,
            )
            tau_coh = math.exp(coh.params_opt[0])

            def sq_obj(x):
                return jcm_objective(nbar, math.exp(x[0]), math.exp(x[1]), T, n_max)

            bounds = [(math.log(0.05 * nbar), math.log(3 * nbar)), (math.log(0.2 * tau_c), math.log(5 * tau_c))]
            starts = [[math.log(nbar), math.log(tau_coh)], [math.log(nbar * sinc(T / 2)), math.log(tau_c)]]
            f_sq = max(nelder_mead(sq_obj, s, bounds).objective_opt for s in starts)
            f_coh = coh.objective_opt
            rows.append((nbar, T, f_sq, f_coh, f_sq - f_coh, (1 - f_sq) / (1 - f_coh)))
    return rows


FIG6_HEADER = ["nbar", "Theta", "F_sq", "F_coh", "delta_F", "error_ratio"]


def optimize_tcm(
    nbar: float,
    J2: int,
    approx: bool = False,
    Theta: float = math.pi / 2,
    n_max: int | None = None,
    restarts: int = 8,
    seed: int = 0,
    opts: NMOptions | None = None,
) -> OptimizationResult:
    """Maximize the spin-coherent target fidelity over ``(var, tau)``.

    Restarts jitter the log-coordinates of ``(2 nbar / pi, pi / (2 sqrt(nbar)))``.
    """
    n_max = n_max or suggest_nmax(nbar, 3 * nbar) + J2
    x0 = [math.log(2 * nbar / math.pi), math.log(math.pi / 2 / math.sqrt(nbar))]
    bounds = [(x0[0] - math.log(6), x0[0] + math.log(2.5)), (x0[1] - math.log(3), x0[1] + math.log(3))]

    def obj(x):
        return tcm_objective(nbar, math.exp(x[0]), math.exp(x[1]), J2, n_max, Theta, approx)

    res = nelder_mead_restarts(obj, x0, bounds, opts or NMOptions(xtol=1e-7, ftol=1e-12), restarts, seed)
    res.params_opt = np.exp(res.params_opt)
    res.names = ("var", "tau")
    return res


def tcm_fig4_rows(nbar=100.0, J2s=(2, 4, 8), restarts=8, seed=0) -> list:
    """Rows ``(J2, 1-F, var/(2 nbar/pi), tau sqrt(nbar)/(pi/2), tau sqrt(nbar-J+1/2)/(pi/2), tau sqrt(nbar-J/2+1/2)/(pi/2))``.

    The last two columns are the two candidate time laws, reported side by side.
    """
    rows = []
    for J2 in J2s:
        r = optimize_tcm(nbar, J2, False, restarts=restarts, seed=seed)
        var, tau = r.params_opt
        J = J2 / 2
        rows.append(
            (
                J2,
                1 - r.objective_opt,
                var / (2 * nbar / math.pi),
                tau * math.sqrt(nbar) / (math.pi / 2),
                tau * math.sqrt(nbar - J + 0.5) / (math.pi / 2),
                tau * math.sqrt(nbar - J / 2 + 0.5) / (math.pi / 2),
            )
        )
    return rows


TCM_FIG4_HEADER = ["J2", "infidelity", "var_over_2nbar_pi", "tau_sqrt_nbar_over_half_pi", "tau_fit_J", "tau_fit_J_half"]


def tcm_fig5_rows(nbar=500.0, J2s=(2, 4, 8, 16), restarts=4, seed=0) -> list:
    """Rows ``(J2, 1-F, var / fitted_var, tau / fitted_tau)`` from the approximate fidelity."""
    rows = []
    for J2 in J2s:
        r = optimize_tcm(nbar, J2, True, restarts=restarts, seed=seed)
        var, tau = r.params_opt
        rows.append(
            (
                J2,
                1 - r.objective_opt,
                var / tcm.fitted_variance_curve(nbar, J2),
                tau / tcm.fitted_time_curve(nbar, J2),
            )
        )
    return rows


TCM_FIG5_HEADER = ["J2", "infidelity", "var_over_fit", "tau_over_fit"]


def impurity_floor(nbars=(5.0, 10.0, 20.0), J2=2, var_ratios=None, tau_ratios=None) -> list:
    """Minimum spin impurity over a ``(var/nbar, tau sqrt(nbar)/(pi/2))`` grid per ``nbar``.

    Rows ``(nbar, min_impurity, var/nbar at min, tau ratio at min)``.
    """
    var_ratios = np.linspace(0.3, 1.3, 41) if var_ratios is None else np.asarray(var_ratios)
    tau_ratios = np.linspace(0.7, 1.3, 41) if tau_ratios is None else np.asarray(tau_ratios)
    rows = []
    for nbar in nbars:
        n_max = suggest_nmax(nbar, 3 * nbar) + J2
        best = (math.inf, 0.0, 0.0)
        for vr in var_ratios:
            fs = tcm_field(nbar, vr * nbar, n_max)
            for tr in tau_ratios:
                tau = tr * math.pi / 2 / math.sqrt(nbar)
                imp = tcm.spin_impurity(tcm.tcm_evolve_exact(fs, J2, tau))
                if imp < best[0]:
                    best = (imp, float(vr), float(tr))
        rows.append((float(nbar),) + best)
    return rows
