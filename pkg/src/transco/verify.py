"""Acceptance checks shared by ``transco verify`` and the test suite.

Each ``criterion_N`` returns a :class:`CriterionResult`. A check fails when
its measured quantity misses the tolerance or when it overruns its time
budget.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from transco import fidelity as fid
from transco import jcm, optimize, tcm, transcoherent, wigner
from transco.errors import DomainError
from transco.fockcore import FieldState, fit_gaussian, make_fock, sinc

THETAS = tuple(j * math.pi / 8 for j in range(1, 7))


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    runtime: float = 0.0
    budget: float = math.inf
    extra: dict = field(default_factory=dict)

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] criterion {self.number} ({self.name}): {self.detail} [{self.runtime:.2f}s / {self.budget:g}s]"


def _timed(number, name, budget, fn) -> CriterionResult:
    t0 = time.perf_counter()
    ok, detail, extra = fn()
    dt = time.perf_counter() - t0
    if dt > budget:
        ok = False
        detail += "; over time budget"
    return CriterionResult(number, name, bool(ok), detail, dt, budget, extra)


# ----------------------------------------------------------------- exactness


def exactness_cells(thetas=THETAS, boundaries=(2, 5, 20, 100), orders=(1, 2, 3)) -> list[dict]:
    """Build and evolve every cell of the exactness matrix.

    For excited starts the boundary is ``n_min``. A cell the builder rejects
    (``n_max < m`` for ground starts) is recorded with ``status="infeasible"``.
    """
    cells = []
    for start in ("ground", "excited"):
        for theta in thetas:
            for nb in boundaries:
                for m in orders:
                    cell = {"start": start, "theta": theta, "n": nb, "m": m}
                    try:
                        if start == "ground":
                            b = transcoherent.build_ground(theta, nb, m)
                        else:
                            b = transcoherent.build_excited(theta, nb, 0, m)
                    except DomainError as exc:
                        cell.update(status="infeasible", error=str(exc), purity=math.nan, fidelity=math.nan)
                        cells.append(cell)
                        continue
                    pur, fi = transcoherent.verify_build(b)
                    ok = pur >= 1 - 1e-10 and fi >= 1 - 1e-10
                    cell.update(status="pass" if ok else "fail", purity=pur, fidelity=fi)
                    cells.append(cell)
    return cells


def criterion_1() -> CriterionResult:
    def run():
        cells = exactness_cells()
        bad = [c for c in cells if c["status"] == "fail"]
        infeasible = [c for c in cells if c["status"] == "infeasible"]
        worst = max(cells, key=lambda c: -math.inf if c["status"] == "infeasible" else 1 - c["fidelity"])
        detail = (
            f"{len(cells) - len(bad) - len(infeasible)}/{len(cells)} cells exact, "
            f"{len(bad)} below 1-1e-10, {len(infeasible)} infeasible; "
            f"worst 1-F={1 - worst['fidelity']:.3g} ({worst['start']}, theta={worst['theta']:.4f}, n={worst['n']}, m={worst['m']})"
        )
        return not bad and not infeasible, detail, {"cells": cells}

    return _timed(1, "exactness", 10.0, run)


def criterion_1_attainable() -> CriterionResult:
    """The subset of the matrix where a finite exact build exists: ground with ``n_max >= m`` and excited ``m = 1``."""

    def run():
        cells = [
            c
            for c in exactness_cells()
            if (c["start"] == "ground" and c["status"] != "infeasible") or (c["start"] == "excited" and c["m"] == 1)
        ]
        bad = [c for c in cells if c["status"] != "pass"]
        worst = max(1 - min(c["purity"], c["fidelity"]) for c in cells)
        return not bad, f"{len(cells) - len(bad)}/{len(cells)} cells, worst 1-min(P,F)={worst:.3g}", {}

    return _timed(1, "exactness, finite-build cells", 10.0, run)


def criterion_2() -> CriterionResult:
    def run():
        devs = []
        for theta in THETAS:
            b = transcoherent.build_ground(theta, 200)
            nbar, var = fit_gaussian(b.state)
            devs.append(abs(var / nbar / sinc(theta) - 1))
        worst = max(devs)
        return worst <= 0.05, f"max |var/nbar / sinc(theta) - 1| = {worst:.4f} (tol 0.05)", {"deviations": devs}

    return _timed(2, "sinc-variance law", 5.0, run)


# -------------------------------------------------------------------- oracle


def random_field(rng: np.random.Generator, size: int) -> FieldState:
    amps = rng.normal(size=size) + 1j * rng.normal(size=size)
    return FieldState.from_amplitudes(amps / np.linalg.norm(amps), fix_phase=False)


def closed_form_cases(n_cases: int = 25, seed: int = 20240917) -> list[dict]:
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n_cases):
        size = int(rng.integers(3, 41))
        field_ = random_field(rng, size)
        tau = float(rng.uniform(0.05, 3.0))
        Theta = float(rng.uniform(0.0, 2 * math.pi))
        varphi = float(rng.uniform(-math.pi, math.pi))
        mags = np.abs(rng.normal(size=size))
        mags /= np.linalg.norm(mags)
        phased = FieldState.from_amplitudes(mags * np.exp(1j * varphi * np.arange(size)), fix_phase=False)
        full_o = fid.oracle_avg_fidelity(field_, tau, Theta, fid.FULL_SPHERE)
        fixed_o = fid.oracle_avg_fidelity(field_, tau, Theta, fid.FIXED_PHI)
        errs = {
            "full_general": abs(fid.avg_fidelity_full_sphere(field_, tau, Theta) - full_o),
            "half_pi": abs(fid.avg_fidelity_half_pi(field_, tau) - fid.oracle_avg_fidelity(field_, tau, math.pi / 2)),
            "fixed_general": abs(fid.fixed_phi_general(field_, tau, Theta) - fixed_o),
            "full_phased": abs(
                fid.full_sphere_phased(mags, tau, Theta, varphi) - fid.oracle_avg_fidelity(phased, tau, Theta)
            ),
            "fixed_phased": abs(
                fid.fixed_phi_phased(mags, tau, Theta, varphi)
                - fid.oracle_avg_fidelity(phased, tau, Theta, fid.FIXED_PHI)
            ),
        }
        out.append(errs)
    return out


def criterion_3() -> CriterionResult:
    def run():
        cases = closed_form_cases()
        worst = {k: max(c[k] for c in cases) for k in cases[0]}
        top = max(worst.values())
        detail = f"max |closed - oracle| = {top:.3g} over {len(cases)} cases (tol 1e-8)"
        return top <= 1e-8, detail, {"worst_by_form": worst}

    return _timed(3, "closed forms vs quadrature", 30.0, run)


def criterion_7() -> CriterionResult:
    def run():
        rng = np.random.default_rng(7)
        taus = np.linspace(0.1, 6.0, 20)
        f1 = random_field(rng, 25)
        f2 = random_field(rng, 25)
        e1 = e2 = 0.0
        for tau in taus:
            ex = tcm.tcm_evolve_exact(f1, 1, tau)
            j = jcm.evolve_from_ground(f1, jcm.EvolutionParams(float(tau)))
            e1 = max(e1, float(np.max(np.abs(ex.c[:, 0] - j.cg[: ex.c.shape[0]]))))
            e1 = max(e1, float(np.max(np.abs(ex.c[:, 1] - j.ce[: ex.c.shape[0]]))))
            a = tcm.tcm_evolve_exact(f2, 2, tau).c
            b = tcm.tcm_evolve_n2_analytic(f2, tau).c
            e2 = max(e2, float(np.max(np.abs(a - b))))
        top = max(e1, e2)
        return top <= 1e-10, f"J2=1 vs JCM {e1:.3g}, J2=2 vs analytic {e2:.3g} (tol 1e-10)", {}

    return _timed(7, "TCM oracles", 10.0, run)


def criterion_10() -> CriterionResult:
    def run():
        vac = wigner.negativity_report(make_fock(0, 4))
        one = wigner.negativity_report(make_fock(1, 4))
        one_exact = 4 * math.exp(-0.5) - 2
        negs = [wigner.negativity(transcoherent.build_ground(math.pi / 2, n).state) for n in range(2, 11)]
        dec = all(b < a for a, b in zip(negs, negs[1:]))
        ok = vac.value <= 1e-6 and abs(one.value - one_exact) <= 1e-4 and dec
        detail = (
            f"vacuum {vac.raw:.2g}, |1> error {abs(one.value - one_exact):.2g}, "
            f"pi/2 negativities {negs[0]:.3g} -> {negs[-1]:.3g} strictly decreasing={dec}"
        )
        return ok, detail, {"negativities": negs}

    return _timed(10, "Wigner negativity", 120.0, run)


# --------------------------------------------------------------- asymptotics


def criterion_4() -> CriterionResult:
    def run():
        curve = optimize.fig3_curve()
        i = optimize.grid_argmax([r for r, _ in curve], [f for _, f in curve])
        r_grid = curve[i][0]
        r_opt = optimize.fig3_optimum().param("var") / 20.0
        ok = abs(r_opt - 0.90) <= 0.03 and abs(r_grid - 0.90) <= 0.03
        return ok, f"argmax var/nbar = {r_opt:.4f} (Nelder-Mead), {r_grid:.4f} (50-point curve), target 0.90 +- 0.03", {}

    return _timed(4, "optimal squeezing at nbar=20", 60.0, run)


def criterion_5() -> CriterionResult:
    def run():
        rows = optimize.fig4_rows()
        full_dev = max(abs(r[2] / sinc(r[0] / 2) - 1) for r in rows)
        fixed_dev = max(abs(r[5] / (sinc(r[0] / 2) / math.sqrt(2)) - 1) for r in rows)
        half = [r for r in rows if abs(r[0] - math.pi / 2) < 1e-12][0]
        half_dev = abs(half[5] * 500.0 / (2 * 500.0 / math.pi) - 1)
        ok = full_dev <= 0.03 and fixed_dev <= 0.05 and half_dev <= 0.03
        detail = f"full-sphere dev {full_dev:.4f} (0.03), fixed-phi dev {fixed_dev:.4f} (0.05), pi/2 fixed-phi vs 2nbar/pi {half_dev:.4f} (0.03)"
        return ok, detail, {"rows": rows}

    return _timed(5, "optimal-variance law at nbar=500", 600.0, run)


def criterion_6() -> CriterionResult:
    def run():
        rows = optimize.fig6_rows()
        ok = True
        notes = []
        for nbar in (50.0, 200.0):
            sub = [r for r in rows if r[0] == nbar]
            dF = [r[4] for r in sub]
            pos = min(dF) >= 0
            inc = all(b > a for a, b in zip(dF, dF[1:]))
            ratio = max(r[5] for r in sub if r[1] >= math.pi / 4 - 1e-12)
            ok &= pos and inc and ratio < 1
            notes.append(f"nbar={nbar:g}: min dF={min(dF):.3g}, increasing={inc}, max ratio(Theta>=pi/4)={ratio:.4f}")
        return ok, "; ".join(notes), {"rows": rows}

    return _timed(6, "squeezed-over-coherent gain", 300.0, run)


def criterion_8() -> CriterionResult:
    def run():
        exact = optimize.tcm_fig4_rows(100.0, (2, 4, 8))
        approx = optimize.tcm_fig5_rows(500.0, (2, 4, 8, 16))
        e_var = max(abs(r[2] - 1) for r in exact)
        e_tau = max(abs(r[3] - 1) for r in exact)
        a_var = max(abs(r[2] - 1) for r in approx)
        a_tau = max(abs(r[3] - 1) for r in approx)
        ok = e_var <= 0.10 and e_tau <= 0.10 and a_var <= 0.05 and a_tau <= 0.05
        detail = (
            f"exact nbar=100: var dev {e_var:.4f}, tau dev {e_tau:.4f} (0.10); "
            f"approx nbar=500: var dev {a_var:.4f}, tau dev {a_tau:.4f} (0.05)"
        )
        return ok, detail, {"exact": exact, "approx": approx}

    return _timed(8, "TCM optimum", 900.0, run)


# ---------------------------------------------------------------------- nogo


def leak_grid(n_max: int, tau_max: float = 10 * math.pi, points: int = 200_001) -> np.ndarray:
    """Uniform grid on ``(0, tau_max]`` plus the resonant zeros ``(2j+1) pi / sqrt(n_max)``."""
    base = np.linspace(0.0, tau_max, points)[1:]
    zeros = (2 * np.arange(int(tau_max * math.sqrt(n_max) / (2 * math.pi)) + 1) + 1) * math.pi / math.sqrt(n_max)
    return np.union1d(base, zeros[zeros <= tau_max])


def criterion_9() -> CriterionResult:
    def run():
        n_max = 5
        grid = leak_grid(n_max)
        deltas = (1.0, 0.5, 0.1, 0.01, 0.001, 0.0)
        leaks = [transcoherent.detuned_leak(n_max, d, grid) for d in deltas]
        positive = all(v > 0 for v in leaks[:3])
        mono = all(b < a for a, b in zip(leaks, leaks[1:])) and leaks[-1] <= 1e-12
        floor = optimize.impurity_floor()
        min_imp = min(r[1] for r in floor)
        ok = positive and mono and min_imp > 1e-6
        detail = (
            "leak(" + ", ".join(f"{d:g}:{v:.3g}" for d, v in zip(deltas, leaks)) + f"), monotone={mono}; "
            f"J2=2 impurity floor {min_imp:.3g} over nbar in (5, 10, 20) (> 1e-6)"
        )
        return ok, detail, {"leaks": leaks, "impurity": floor}

    return _timed(9, "no-go", 120.0, run)


SUITES = {
    "exactness": (criterion_1, criterion_2),
    "oracle": (criterion_3, criterion_7, criterion_10),
    "asymptotics": (criterion_4, criterion_5, criterion_6, criterion_8),
    "nogo": (criterion_9,),
}
SUITES["all"] = tuple(
    sorted({f for s in list(SUITES.values()) for f in s}, key=lambda f: int(f.__name__.split("_")[1]))
)


def run_suite(name: str, echo=print) -> list[CriterionResult]:
    if name not in SUITES:
        raise DomainError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    results = []
    for fn in SUITES[name]:
        res = fn()
        if echo:
            echo(res.line())
        results.append(res)
    return results
