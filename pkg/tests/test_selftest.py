"""
Self-test suite tests: the bounded oracles and the batch driver.
"""

import random

import pytest

from app import sapphire
from app.config import override_settings
from app.gl2z import is_reverser, sqrt_matrices
from app.intmat import Mat2
from app.selftest import (
    random_checks,
    reverser_search,
    run_selftest,
    sap_filter,
    sap_identities,
    sap_out,
    sapphire_box,
    smaller_unit_exists,
    sqrt_search,
    torus_bundle_box,
)


def test_reverser_search(golden):
    B = reverser_search(golden, 3)
    assert B is not None
    assert is_reverser(golden, B)


def test_reverser_search_det_minus_one():
    assert reverser_search(Mat2(1, 1, 1, 0), 5) is None


def test_sqrt_search_agrees(golden):
    assert sqrt_search(golden) == sqrt_matrices(golden)
    assert sqrt_search(Mat2(3, 2, 4, 3)) == sqrt_matrices(Mat2(3, 2, 4, 3))


def test_unit_scan():
    theta = Mat2(17, 24, 12, 17)
    assert not smaller_unit_exists(theta, Mat2(1, 2, 1, 1))
    assert smaller_unit_exists(theta, Mat2(3, 4, 2, 3))


def test_random_checks_golden(golden):
    assert random_checks(golden, random.Random(0)) is None


def test_boxes():
    assert Mat2(1, 1, 1, 0) in torus_bundle_box(1)
    assert sapphire_box(1) == []
    assert Mat2(2, 1, 1, 1) in sapphire_box(2)


def test_empty_bound_warns():
    report = run_selftest(0, 0)
    assert report.ok
    assert report.warnings
    assert report.counts == {}


def test_seeded_run_over_small_box():
    """Every torus bundle in the bound 1 box and every random sample passes; counts match the box."""
    override_settings(reverser_oracle_bound=10)
    report = run_selftest(1, 7, samples=12)
    assert report.ok, [f.to_dict() for f in report.failures]
    n = len(torus_bundle_box(1))
    assert n > 0
    assert report.counts == {"tb_kappa": n, "tb_out": n, "random_gl2z": 12}


def test_random_checks_sweep_bound_two():
    """Root, square-root, reverser and homeomorphism oracles agree on every Anosov matrix in [-2, 2]."""
    override_settings(reverser_oracle_bound=10)
    rng = random.Random(3)
    failures = []
    for A in torus_bundle_box(2):
        detail = random_checks(A, rng)
        if detail is not None:
            failures.append((str(A), detail))
    assert failures == []


@pytest.mark.parametrize("B", sapphire_box(2), ids=str)
def test_sapphire_box_bound_two(B):
    """Identities, the square-root filter and the Out(E) cross-check hold across the bound 2 box."""
    G = sapphire.build(B)
    assert sap_identities(G) is None
    assert sap_filter(G) is None
    assert sap_out(G) is None
