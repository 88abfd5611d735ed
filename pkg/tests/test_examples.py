"""Worked examples for each module, one small case per documented behavior."""

import math

import numpy as np
import pytest

from transco import fidelity as fid
from transco import jcm, optimize, tcm, transcoherent, wigner
from transco.fockcore import (
    GaussianSpec,
    QubitAngles,
    fit_gaussian,
    gaussian_field,
    make_coherent,
    make_fock,
    make_gaussian,
    moments,
    squeezing_db,
)

P = jcm.EvolutionParams


def test_fock_three():
    s = make_fock(3, 3)
    assert s.amps[3] == 1 and moments(s) == (3.0, 0.0)
    assert fit_gaussian(make_fock(3, 10)) == (3.0, 0.0)


def test_gaussian_examples():
    assert moments(make_gaussian(GaussianSpec(20, 20, 400)))[1] == pytest.approx(20, rel=0.02)
    nbar, var = moments(make_gaussian(GaussianSpec(50, 100 / math.pi, 200)))
    assert var / nbar == pytest.approx(2 / math.pi, rel=0.02)
    tiny = make_gaussian(GaussianSpec(1e-9, 1e-9, 2))
    assert tiny.probs[0] == pytest.approx(1.0)


def test_squeezing_levels():
    assert squeezing_db(2.85) == pytest.approx(10.0, abs=0.1)
    assert squeezing_db(3.04) == pytest.approx(15.0, abs=0.3)
    assert squeezing_db(1e-6) == pytest.approx(0.0, abs=1e-10)


def test_sinc_fit_pi_over_8():
    nbar, var = fit_gaussian(transcoherent.build_ground(math.pi / 8, 200).state)
    assert var / nbar == pytest.approx(0.974, rel=0.05)


def test_vacuum_paths():
    j = jcm.evolve_from_excited(make_fock(0, 0), P(math.pi))
    assert j.cg[1] == pytest.approx(-1j) and abs(j.ce[0]) < 1e-15
    j = jcm.evolve_from_excited(make_fock(0, 0), P(2 * math.pi))
    assert j.ce[0] == pytest.approx(-1.0)
    j = jcm.evolve_from_ground(make_fock(1, 1), P(math.pi))
    assert j.ce[0] == pytest.approx(-1j) and np.allclose(np.delete(j.ce, 0), 0) and np.allclose(j.cg, 0)


def test_joint_reduces_to_branches(rng):
    s = gaussian_field(8.0, 6.0)
    for atom, fn in ((QubitAngles(0.0), jcm.evolve_from_ground), (QubitAngles(math.pi), jcm.evolve_from_excited)):
        a = jcm.evolve_joint(s, atom, P(0.9))
        b = fn(s, P(0.9))
        n = b.cg.size
        np.testing.assert_allclose(a.cg[:n], b.cg, atol=1e-15)
        np.testing.assert_allclose(a.ce[:n], b.ce, atol=1e-15)


def test_joint_high_fidelity_large_nbar():
    s = gaussian_field(500.0, 500.0 * math.sin(math.pi / 4) / (math.pi / 4))
    F = fid.pointwise_fidelity(s, math.pi / 2 / math.sqrt(500), QubitAngles(math.pi / 3, math.pi / 5), math.pi / 2)
    assert F >= 0.99


def test_detuned_incomplete_transfer():
    j = jcm.evolve_detuned_from_ground(make_fock(1, 1), P(math.pi, 1.0))
    assert abs(j.ce[0]) ** 2 < 1
    assert abs(j.ce[0]) ** 2 == pytest.approx(math.sin(math.pi / math.sqrt(2)) ** 2 / 2, rel=1e-12)
    j = jcm.evolve_detuned_from_ground(make_fock(0, 0), P(1.0, 0.7))
    assert abs(j.cg[0]) == pytest.approx(1.0)


def test_purity_and_coherence_examples():
    bell = jcm.JointState([0, 1 / math.sqrt(2)], [1 / math.sqrt(2), 0])
    assert jcm.reduce_atom(bell).purity == pytest.approx(0.5)
    prod = jcm.evolve_from_ground(gaussian_field(5.0, 5.0), P(0.0))
    assert jcm.coherence(prod) == 0.0
    eq = jcm.JointState([1 / math.sqrt(2)], [1 / math.sqrt(2)])
    assert jcm.coherence(eq) == pytest.approx(1.0)
    tau = math.pi / (2 * math.sqrt(20))
    assert jcm.coherence(jcm.evolve_from_ground(gaussian_field(20.0, 40 / math.pi), P(tau))) >= 0.99


def test_transcoherent_examples():
    b = transcoherent.build_ground(math.pi / 2, 1)
    assert b.tau == pytest.approx(math.pi)
    assert min(transcoherent.verify_build(b)) >= 1 - 1e-10
    b = transcoherent.build_ground(math.pi / 2, 20, 2)
    assert min(transcoherent.verify_build(b)) >= 1 - 1e-10
    b = transcoherent.build_excited(math.pi / 2, 0)
    assert b.exact and min(transcoherent.verify_build(b)) >= 1 - 1e-10
    b = transcoherent.build_ground(math.pi / 4, 50)
    assert transcoherent.verify_build(b)[0] >= 1 - 1e-10


def test_excited_near_pi_approaches_fock():
    b = transcoherent.build_excited(math.pi - 1e-3, 10)
    nbar, var = moments(b.state)
    assert var / nbar < 1e-3


def test_target_state_examples():
    np.testing.assert_allclose(fid.target_state(QubitAngles(0.0), math.pi / 2), [1 / math.sqrt(2), 1 / math.sqrt(2)])
    np.testing.assert_allclose(fid.target_state(QubitAngles(math.pi), math.pi / 2), [-1 / math.sqrt(2), 1 / math.sqrt(2)], atol=1e-16)
    a = QubitAngles(1.0, 2.0)
    np.testing.assert_allclose(fid.target_state(a, 0.0), a.amplitudes())


def test_identity_pulse_fidelity():
    assert fid.avg_fidelity_full_sphere(make_fock(0, 0), 0.0, 0.0) == pytest.approx(1.0)
    assert fid.avg_fidelity_fixed_phi(make_fock(0, 0), 0.0, 0.0, 1.234) == pytest.approx(1.0)


def test_fig3_peak_vs_oracle():
    s = gaussian_field(20.0, 18.0, 400)
    tau = math.pi / (2 * math.sqrt(20))
    assert fid.full_sphere_phased(np.abs(s.amps), tau, math.pi / 2) == pytest.approx(
        fid.oracle_avg_fidelity(s, tau, math.pi / 2), abs=1e-8
    )


def test_oracle_converged_at_128(rng):
    from conftest import random_amps
    from transco.fockcore import FieldState

    s = FieldState(random_amps(rng, 12))
    a = fid.oracle_avg_fidelity(s, 1.3, 2.1, n_theta=128)
    b = fid.oracle_avg_fidelity(s, 1.3, 2.1, n_theta=256)
    assert abs(a - b) < 1e-10


def test_fixed_phi_half_pi_grid_max():
    tau = math.pi / (2 * math.sqrt(500))
    ratios = np.linspace(0.3, 1.0, 71)
    F = [optimize.jcm_objective(500.0, r * 500, tau, math.pi / 2, 1200, fid.FIXED_PHI) for r in ratios]
    best = ratios[optimize.grid_argmax(ratios, F)]
    assert best * 500 == pytest.approx(1000 / math.pi, rel=0.05)


def test_tcm_two_atom_examples():
    s = tcm.tcm_evolve_n2_analytic(make_fock(1, 1), math.pi / 2 * math.sqrt(2))
    assert s.c[0, 1] == pytest.approx(-1j)
    s = tcm.tcm_evolve_exact(make_fock(2, 2), 2, 2 * math.pi / math.sqrt(1.5))
    assert s.c[2, 0] == pytest.approx(1.0, abs=1e-12)
    assert abs(tcm.tcm_evolve_exact(make_fock(0, 2), 2, 3.0).c[0, 0]) == pytest.approx(1.0)


def test_tcm_fidelity_examples():
    f = gaussian_field(30.0, 30.0)
    for J2 in (1, 3):
        s = tcm.tcm_evolve_exact(f, J2, 0.0)
        assert abs(s.c[:, 0]).sum() > 0 and np.allclose(s.c[:, 1:], 0)
        assert tcm.spin_target_fidelity(s, 0.0) == pytest.approx(1.0)
        assert tcm.spin_target_fidelity(s, math.pi) == pytest.approx(0.0, abs=1e-30)


def test_tcm_approx_single_atom_matches_exact():
    f = optimize.tcm_field(200.0, 200.0, 300)
    tau = math.pi / 2 / math.sqrt(200)
    a = tcm.spin_target_fidelity(tcm.tcm_evolve_approx(f, 1, tau), math.pi / 2)
    e = tcm.spin_target_fidelity(tcm.tcm_evolve_exact(f, 1, tau), math.pi / 2)
    assert a == pytest.approx(e, abs=1e-3)


def test_tcm_two_atom_optimum_expectations():
    r = optimize.optimize_tcm(100.0, 2, restarts=2)
    var, tau = r.params_opt
    assert r.objective_opt >= 0.995
    s = tcm.tcm_evolve_exact(optimize.tcm_field(100.0, var, 216), 2, tau)
    jx, jy, jz = tcm.spin_expectations(s)
    assert abs(jz) <= 0.05
    assert abs(math.hypot(jx, jy)) == pytest.approx(1.0, abs=0.05)
    assert jz == pytest.approx(tcm.jz_heisenberg(optimize.tcm_field(100.0, var, 216), 2, tau), abs=1e-2)
    s0 = tcm.tcm_evolve_exact(optimize.tcm_field(100.0, var, 216), 2, 0.0)
    assert tcm.spin_expectations(s0) == pytest.approx((0.0, 0.0, -1.0))


def test_coherent_wigner_nonnegative():
    s = make_coherent(6.0, 60)
    re = np.linspace(-6, 6, 41)
    assert wigner.wigner_grid(s, re, re).min() >= -1e-9
