import numpy as np
import pytest

from matlag import acceptance, symmetry, weights
from matlag.operators import family1
from matlag.weights import F1

GRID = tuple(10.0**k for k in range(-3, 3)) + (0.5, 2.0, 5.0, 20.0)
PAIRS = acceptance.symmetry_pairs()


def test_matched_pair_passes():
    rep = symmetry.check(family1(0, 1, 1), F1(0, 1, 1), (0.1, 1.0, 10.0), 1e-8)
    assert rep.passed and rep.verdict == "PASS"


def test_mismatched_beta_fails_first_order_equation():
    rep = symmetry.check(family1(0, 1, 1), F1(0, 2, 1), (0.1, 1.0, 10.0), 1e-8)
    assert rep.verdict == "FAIL"
    assert rep.worst.e2 > 1e-2


@pytest.mark.parametrize("label,build,params,spec", PAIRS, ids=[p[0] for p in PAIRS])
def test_every_pair_passes(label, build, params, spec):
    rep = symmetry.check(build(**params), spec, GRID, 1e-8)
    assert rep.passed, rep.to_json()["worst"]
    assert all(p.e1 == 0.0 for p in rep.points)
    assert rep.boundary.wf2_power_at_zero > 0


@pytest.mark.parametrize("label,build,params,spec", PAIRS, ids=[p[0] for p in PAIRS])
def test_perturbation_breaks_symmetry(label, build, params, spec):
    op = build(**params)
    for _, bumped in acceptance.perturbations(op):
        assert symmetry.check(bumped, spec, GRID).max_residual > 1e-5


def test_diagonal_weight_pair():
    spec = weights.diagonal(0.5, 1.5)
    assert symmetry.check(weights.pair(spec), spec).passed


def test_report_json():
    j = symmetry.check(family1(0, 1, 1), F1(0, 1, 1)).to_json()
    assert j["verdict"] == "PASS" and len(j["points"]) == len(symmetry.DEFAULT_GRID)
    assert j["boundary"]["vanishes"]


def test_bad_grid():
    with pytest.raises(ValueError):
        symmetry.check(family1(0, 1, 1), F1(0, 1, 1), (0.0, 1.0))


@pytest.mark.parametrize("t", [0.1, 1.0, 10.0])
def test_cross_validation(t):
    assert symmetry.cross_validate_derivatives(F1(0, 1, 1), t) <= 1e-6
    assert symmetry.cross_validate_derivatives(weights.F3(4), t) <= 1e-6
