import pytest

from npbrane.suites import SUITES, instance_gen, run_suite


@pytest.mark.parametrize("name", sorted(SUITES))
def test_suite_passes(name):
    r = run_suite(name, seed=7, instances=min(10, SUITES[name].default_instances))
    assert r["failures"] == 0, r["first_witness"]


def test_suite_reproducible():
    a = run_suite("exterior-d-squared", seed=3, instances=5)
    assert a == run_suite("exterior-d-squared", seed=3, instances=5)
    g1, g2 = instance_gen(3, "x", 0), instance_gen(3, "x", 0)
    assert g1.rng.random() == g2.rng.random()


def test_seed_range():
    with pytest.raises(OverflowError):
        instance_gen(2**64, "x", 0)
    with pytest.raises(KeyError):
        run_suite("no-such-suite")
