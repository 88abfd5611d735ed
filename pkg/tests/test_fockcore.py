import json
import math

import numpy as np
import pytest

from transco import DomainError
from transco.fockcore import (
    FieldState,
    GaussianSpec,
    PulseSpec,
    QubitAngles,
    coherent_probabilities,
    fit_gaussian,
    gaussian_field,
    make_coherent,
    make_fock,
    make_gaussian,
    moments,
    rephase,
    sinc,
    squeezing_db,
    suggest_nmax,
    write_distribution_csv,
)


def test_sinc_values():
    assert sinc(0.0) == 1.0
    assert sinc(math.pi / 2) == pytest.approx(2 / math.pi, rel=1e-15)
    xs = np.array([1e-6, 1e-5, 2e-4, 1.0])
    np.testing.assert_allclose(sinc(xs), np.sin(xs) / xs, rtol=1e-15)


def test_fock_json():
    s = make_fock(0, 4)
    d = json.loads(s.to_json())
    assert d["re"] == [1.0, 0.0, 0.0, 0.0, 0.0]
    assert d["im"] == [0.0] * 5
    assert FieldState.from_json(s.to_json()).amps.tolist() == s.amps.tolist()


def test_fock_bounds():
    with pytest.raises(DomainError):
        make_fock(5, 4)


def test_field_state_immutable():
    s = make_fock(1, 3)
    with pytest.raises(ValueError):
        s.amps[0] = 1.0


def test_unnormalized_rejected():
    with pytest.raises(DomainError):
        FieldState(np.array([1.0, 1.0]))
    with pytest.raises(DomainError):
        FieldState.from_amplitudes([0.0, 0.0])
    with pytest.raises(DomainError):
        FieldState.from_amplitudes([np.nan, 1.0])


def test_global_phase_fixed():
    s = FieldState.from_amplitudes([0.0, 1j, 1.0])
    assert s.amps[1].imag == 0 and s.amps[1].real > 0


def test_padded():
    s = make_fock(1, 2)
    assert s.padded(5).size == 6
    with pytest.raises(DomainError):
        s.padded(1)


def test_from_dict_inconsistent():
    with pytest.raises(DomainError):
        FieldState.from_dict({"n_max": 3, "re": [1.0, 0.0], "im": [0.0, 0.0]})


def test_gaussian_moments():
    s = make_gaussian(GaussianSpec(20.0, 18.0, 400))
    nbar, var = moments(s)
    assert nbar == pytest.approx(20.0, rel=1e-2)
    assert var == pytest.approx(18.0, rel=1e-2)
    np.testing.assert_allclose(np.unwrap(np.angle(s.amps[15:25])), np.unwrap(np.angle(s.amps[15:25]))[0] + np.pi / 2 * np.arange(10), atol=1e-12)


def test_gaussian_spec_checks():
    with pytest.raises(DomainError):
        GaussianSpec(20.0, 0.0, 400)
    with pytest.raises(DomainError):
        GaussianSpec(-1.0, 1.0, 400)
    with pytest.raises(DomainError):
        GaussianSpec(20.0, 18.0, 30)


def test_gaussian_field_default_nmax():
    s = gaussian_field(50.0, 25.0)
    assert s.n_max == suggest_nmax(50.0, 25.0)


def test_coherent_is_poisson():
    p = coherent_probabilities(3.0, 60)
    assert p.sum() == pytest.approx(1.0, abs=1e-14)
    assert p[2] == pytest.approx(math.exp(-3) * 9 / 2, rel=1e-14)
    s = make_coherent(3.0, 60)
    assert moments(s)[0] == pytest.approx(3.0, rel=1e-12)
    assert moments(s)[1] == pytest.approx(3.0, rel=1e-12)
    assert coherent_probabilities(0.0, 3).tolist() == [1.0, 0.0, 0.0, 0.0]


def test_rephase_keeps_distribution():
    s = make_coherent(4.0, 40, 0.0)
    r = rephase(s, 0.3)
    np.testing.assert_allclose(r.probs, s.probs, atol=1e-15)


def test_fit_gaussian_is_moments():
    s = make_coherent(5.0, 50)
    assert fit_gaussian(s) == moments(s)


def test_squeezing_db():
    assert squeezing_db(math.pi / 2) == pytest.approx(-10 * math.log10(2 / math.pi), rel=1e-14)
    with pytest.raises(DomainError):
        squeezing_db(4.0)


def test_qubit_angles():
    a = QubitAngles(math.pi, 0.0).amplitudes()
    assert abs(a[0]) < 1e-15 and a[1] == pytest.approx(1.0)
    with pytest.raises(DomainError):
        QubitAngles(-0.1)
    with pytest.raises(DomainError):
        QubitAngles(0.1, 2 * math.pi)


def test_pulse_spec_deliverable():
    assert PulseSpec(math.pi / 2).is_deliverable()
    assert not PulseSpec(math.pi / 2, 1).is_deliverable()
    assert PulseSpec(math.pi / 2, 0, "excited").is_deliverable()
    with pytest.raises(DomainError):
        PulseSpec(1.0, 0, "sideways")
    with pytest.raises(DomainError):
        PulseSpec(1.0, -1)


def test_distribution_csv(tmp_path):
    s = make_coherent(2.0, 10)
    path = write_distribution_csv(tmp_path / "d.csv", s, with_coherent=True)
    lines = path.read_text().splitlines()
    assert lines[0] == "n,prob,coherent_prob"
    assert len(lines) == 12
    n, p, c = lines[3].split(",")
    assert float(p) == pytest.approx(float(c), rel=1e-3)
