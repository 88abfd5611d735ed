import pytest

from transco import DomainError, verify


def test_unknown_suite():
    with pytest.raises(DomainError):
        verify.run_suite("everything")


def test_all_suite_covers_every_criterion():
    nums = [int(f.__name__.split("_")[1]) for f in verify.SUITES["all"]]
    assert nums == list(range(1, 11))


def test_exactness_cells_shape():
    cells = verify.exactness_cells()
    assert len(cells) == 144
    infeasible = [c for c in cells if c["status"] == "infeasible"]
    assert {(c["start"], c["n"], c["m"]) for c in infeasible} == {("ground", 2, 3)}
    failing = [c for c in cells if c["status"] == "fail"]
    # only excited starts with m >= 2 miss the tolerance
    assert failing and all(c["start"] == "excited" and c["m"] >= 2 for c in failing)


def test_leak_grid_contains_resonant_zero():
    import math

    g = verify.leak_grid(5)
    assert math.pi / math.sqrt(5) in g
    assert g[0] > 0 and g[-1] == pytest.approx(10 * math.pi)


def test_result_line():
    r = verify.CriterionResult(3, "x", True, "ok", 0.5, 10)
    assert r.line() == "[PASS] criterion 3 (x): ok [0.50s / 10s]"
