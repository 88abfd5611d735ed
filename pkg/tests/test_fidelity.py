import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_amps
from transco import DomainError
from transco import fidelity as fid
from transco.fockcore import FieldState, QubitAngles, gaussian_field, make_fock


def brute_full_sphere(field, tau, Theta, n=64):
    """Average of the pointwise fidelity of the evolved joint state (no Gram matrix)."""
    x, w = np.polynomial.legendre.leggauss(n)
    phis = 2 * math.pi * np.arange(n) / n
    tot = 0.0
    for xi, wi in zip(x, w):
        for ph in phis:
            tot += wi * fid.pointwise_fidelity(field, tau, QubitAngles(math.acos(xi), ph), Theta)
    return tot / (2 * n)


def brute_fixed_phi(field, tau, Theta, n=64):
    ths = 2 * math.pi * np.arange(n) / n
    vals = []
    for th in ths:
        # the great circle runs over theta in [0, 2pi); theta > pi is phi = pi on the other side
        atom = QubitAngles(th, 0.0) if th <= math.pi else QubitAngles(2 * math.pi - th, math.pi)
        vals.append(fid.pointwise_fidelity(field, tau, atom, Theta))
    return float(np.mean(vals))


def test_oracle_vs_pointwise(rng):
    f = FieldState(random_amps(rng, 6))
    for Theta in (0.3, math.pi / 2, 2.5):
        assert fid.oracle_avg_fidelity(f, 0.9, Theta) == pytest.approx(brute_full_sphere(f, 0.9, Theta), abs=1e-12)
        assert fid.oracle_avg_fidelity(f, 0.9, Theta, fid.FIXED_PHI) == pytest.approx(
            brute_fixed_phi(f, 0.9, Theta), abs=1e-12
        )


@pytest.mark.parametrize("seed", range(10))
def test_closed_forms_vs_oracle(seed):
    rng = np.random.default_rng(seed)
    size = int(rng.integers(2, 30))
    f = FieldState(random_amps(rng, size))
    tau = float(rng.uniform(0.05, 4))
    Theta = float(rng.uniform(0, 2 * math.pi))
    assert fid.avg_fidelity_full_sphere(f, tau, Theta) == pytest.approx(fid.oracle_avg_fidelity(f, tau, Theta), abs=1e-12)
    assert fid.fixed_phi_general(f, tau, Theta) == pytest.approx(
        fid.oracle_avg_fidelity(f, tau, Theta, fid.FIXED_PHI), abs=1e-12
    )
    assert fid.avg_fidelity_half_pi(f, tau) == pytest.approx(fid.avg_fidelity_full_sphere(f, tau, math.pi / 2), abs=1e-14)


@pytest.mark.parametrize("varphi", [0.0, 0.4, math.pi / 2, -2.0])
def test_phased_forms_match_general(rng, varphi):
    mags = np.abs(rng.normal(size=20))
    mags /= np.linalg.norm(mags)
    f = FieldState(mags * np.exp(1j * varphi * np.arange(20)))
    for Theta in (0.7, math.pi, 4.0):
        assert fid.full_sphere_phased(mags, 0.6, Theta, varphi) == pytest.approx(
            fid.avg_fidelity_full_sphere(f, 0.6, Theta), abs=1e-14
        )
        assert fid.fixed_phi_phased(mags, 0.6, Theta, varphi) == pytest.approx(fid.fixed_phi_general(f, 0.6, Theta), abs=1e-14)
        assert fid.avg_fidelity_fixed_phi(f, 0.6, Theta, varphi) == pytest.approx(
            fid.avg_fidelity_fixed_phi(f, 0.6, Theta), abs=1e-14
        )


def test_identity_gate_at_zero_time():
    f = gaussian_field(10.0, 10.0)
    assert fid.avg_fidelity_full_sphere(f, 0.0, 0.0) == pytest.approx(1.0, abs=1e-15)
    assert fid.fixed_phi_general(f, 0.0, 0.0) == pytest.approx(1.0, abs=1e-15)


def test_vacuum_frozen_value():
    # vacuum, tau = pi: |e> -> -i|1, g>, so the atom ends in |g> for every start
    f = make_fock(0, 0)
    # mean of |<t|g>|^2 over the sphere for a Theta = pi/2 target is 1/2
    assert fid.avg_fidelity_full_sphere(f, math.pi, math.pi / 2) == pytest.approx(0.5, abs=1e-15)
    assert fid.oracle_avg_fidelity(f, math.pi, math.pi / 2) == pytest.approx(0.5, abs=1e-15)


def test_large_nbar_approaches_one():
    f = gaussian_field(500.0, 500.0 * 2 / math.pi)
    F = fid.avg_fidelity_full_sphere(f, math.pi / 2 / math.sqrt(500.0), math.pi / 2)
    assert 0.999 < F < 1.0


def test_gate_spec_checks():
    assert fid.GateSpec(1.0).averaging == fid.FULL_SPHERE
    with pytest.raises(DomainError):
        fid.GateSpec(-0.1)
    with pytest.raises(DomainError):
        fid.GateSpec(1.0, "hemisphere")


def test_oracle_order_check(rng):
    f = FieldState(random_amps(rng, 3))
    with pytest.raises(DomainError):
        fid.oracle_avg_fidelity(f, 1.0, 1.0, n_theta=32)
    with pytest.raises(DomainError):
        fid.oracle_avg_fidelity(f, 1.0, 1.0, mode="bogus")


def test_target_state_normalized():
    t = fid.target_state(QubitAngles(1.2, 0.5), 0.8)
    assert np.vdot(t, t).real == pytest.approx(1.0)


amps = st.lists(st.floats(-1, 1), min_size=2, max_size=25).filter(lambda v: sum(x * x for x in v) > 1e-3)


@given(a=amps, b=amps, tau=st.floats(0, 10), Theta=st.floats(0, 6.28))
def test_fidelity_in_unit_interval(a, b, tau, Theta):
    n = min(len(a), len(b))
    f = FieldState.from_amplitudes(np.array(a[:n]) + 1j * np.array(b[:n]), fix_phase=False)
    for F in (fid.avg_fidelity_full_sphere(f, tau, Theta), fid.fixed_phi_general(f, tau, Theta)):
        assert -1e-12 <= F <= 1 + 1e-12


def test_csv_writers(tmp_path):
    p = fid.write_fig3_csv(tmp_path / "a.csv", [(0.9, 0.99)])
    assert p.read_text() == "var_over_nbar,fidelity\n0.90000000000000002,0.98999999999999999\n"
    assert fid.write_fig4_csv(tmp_path / "b.csv", []).read_text().startswith("Theta,")
    assert fid.write_fig6_csv(tmp_path / "c.csv", []).read_text().startswith("nbar,")
