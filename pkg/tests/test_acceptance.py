"""The ten acceptance criteria, one test per criterion.

Each test delegates to the corresponding self-contained criterion in
polycap.acceptance (also runnable via `polycap suite`) and fails with the
criterion's own diagnostic detail.
"""
from polycap import acceptance


def _check(result):
    print(result.line())
    assert result.passed, f"{result.name}: {result.detail}"


def test_criterion_01_permanent_floor():
    _check(acceptance.criterion_1_permanent_floor())


def test_criterion_02_capacity_sandwich():
    _check(acceptance.criterion_2_capacity_sandwich())


def test_criterion_03_polarization_exact():
    _check(acceptance.criterion_3_polarization_exact())


def test_criterion_04_contraction():
    _check(acceptance.criterion_4_contraction())


def test_criterion_05_sparse_support():
    _check(acceptance.criterion_5_sparse_support())


def test_criterion_06_ladder_telescopes():
    _check(acceptance.criterion_6_ladder_telescopes())


def test_criterion_07_sinkhorn_newton():
    _check(acceptance.criterion_7_sinkhorn_newton())


def test_criterion_08_entropic():
    _check(acceptance.criterion_8_entropic())


def test_criterion_09_head_derivative_oracle():
    _check(acceptance.criterion_9_head_derivative_oracle())


def test_criterion_10_diagnostics():
    _check(acceptance.criterion_10_diagnostics())
