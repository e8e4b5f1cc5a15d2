import pytest

from heatspec.verify import SUITES, SuiteReport, run_suite

FAST = ["poisson", "varadhan", "theta", "hexagon", "photos", "selective", "thin-torus", "millson", "bounds"]


@pytest.mark.parametrize("name", FAST)
def test_fast_suites_pass(name):
    rep = run_suite(name)
    assert rep.checks and rep.passed, rep.to_dict()


@pytest.mark.slow
@pytest.mark.parametrize("name", ["sphere-map", "lollipop"])
def test_point_cloud_suites_pass(name):
    rep = run_suite(name)
    assert rep.passed, rep.to_dict()


def test_every_suite_is_registered():
    assert set(SUITES) == set(FAST) | {"sphere-map", "barbell", "lollipop"}


def test_report_operators():
    rep = SuiteReport("x")
    rep.add("a", 1.0, 1.0)
    rep.add("b", 1.0, 1.0, ">=")
    rep.add("c", 0.0, 0.0, ">")
    assert [c.passed for c in rep.checks] == [True, True, False]
    assert not rep.passed and rep.to_dict()["passed"] is False
