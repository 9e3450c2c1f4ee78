from math import factorial

import numpy as np
import pytest

from conftest import mono, sq
from hermcert.algebra import GaussianRational
from hermcert.bergman import (
    QuadratureError,
    QuadraturePlan,
    WeightSpec,
    coefficient_matrix_onset,
    diagonal_asymptotics,
    gram_matrix,
    kernel_eval,
    reproducing_error,
)
from hermcert.hermform import HoloSection, from_squares, norm_power, unit_form

FS = norm_power(1, 1)
ONE = unit_form(1)


def fs_gram(m: int) -> np.ndarray:
    return np.diag([factorial(m - j) * factorial(j) / factorial(m + 1) for j in range(m + 1)])


def test_gram_examples():
    K2 = gram_matrix(WeightSpec(FS, ONE, 2))
    assert np.allclose(K2.gram, np.diag([1 / 3, 1 / 6, 1 / 3]), atol=1e-9)
    K1 = gram_matrix(WeightSpec(FS, ONE, 1))
    assert np.allclose(K1.gram, np.diag([0.5, 0.5]), atol=1e-9)
    assert K1.basis_dim == 2 and K1.m == 1


@pytest.mark.parametrize("m", [3, 7, 12])
def test_gram_closed_form_and_invariants(m):
    K = gram_matrix(WeightSpec(FS, ONE, m))
    assert np.max(np.abs(K.gram - fs_gram(m))) <= 1e-9
    assert np.allclose(K.gram, K.gram.conj().T)
    assert np.linalg.eigvalsh(K.gram).min() > 0
    assert K.orthonormality_residual() <= 1e-8
    assert K.quadrature_error_estimate <= 1e-10


def test_kernel_examples():
    K1 = gram_matrix(WeightSpec(FS, ONE, 1))
    assert kernel_eval(K1, 0, 0).real == pytest.approx(2.0, abs=1e-9)
    K = gram_matrix(WeightSpec(FS, ONE, 6))
    rng = np.random.default_rng(0)
    for _ in range(10):
        x = complex(*rng.normal(size=2))
        y = complex(*rng.normal(size=2))
        val = kernel_eval(K, x, x).real / (1 + abs(x) ** 2) ** 6
        assert val == pytest.approx(7.0, abs=1e-8)
        assert abs(kernel_eval(K, x, y) - kernel_eval(K, y, x).conjugate()) <= 1e-12 * abs(kernel_eval(K, x, y))


def test_kernel_accepts_homogeneous_points():
    K = gram_matrix(WeightSpec(FS, ONE, 4))
    # the point at infinity [1:0]
    assert kernel_eval(K, (1, 0), (1, 0)).real == pytest.approx(5.0, abs=1e-8)
    with pytest.raises(ValueError):
        kernel_eval(K, (1, 0, 0), (1, 0))


def test_non_diagonal_weight_is_fubini_study_in_disguise():
    # |z0|^2 + |z1|^2 + |z0 + z1|^2 is a Hermitian metric on C^2, so the kernel
    # diagonal divided by R^m is still m + 1
    x, y = mono(1, 0), mono(0, 1)
    R = from_squares([(1, x), (1, y), (1, x + y)])
    m = 5
    K = gram_matrix(WeightSpec(R, ONE, m))
    for t in (0.3, -1 + 2j, 4j):
        r = float(R((t, 1)))
        assert kernel_eval(K, t, t).real / r**m == pytest.approx(m + 1, abs=1e-8)


def test_reproducing_examples():
    spec = WeightSpec(FS, ONE, 8)
    K = gram_matrix(spec)
    assert reproducing_error(K, spec, mono(3, 5)) <= 1e-8
    s = HoloSection(1, 8, {(8, 0): 1, (4, 4): "3/7", (1, 7): GaussianRational(-2, 1)})
    assert reproducing_error(K, spec, s) <= 1e-7
    with pytest.raises(ValueError):
        reproducing_error(K, spec, mono(3, 4))


def test_reproducing_with_positive_weight():
    P = sq(mono(1, 0)) + from_squares([(2, mono(0, 1))])
    spec = WeightSpec(FS, P, 6)
    K = gram_matrix(spec)
    assert K.basis_dim == 8
    assert reproducing_error(K, spec, HoloSection(1, 7, {(7, 0): 1, (2, 5): 2})) <= 1e-7


def test_asymptotics_fubini_study():
    probes = [0.0, 0.5 + 0.5j, 3.0, (1, 0)]
    table = diagonal_asymptotics(FS, ONE, [4, 8, 16, 32], probes)
    for i, m in enumerate(table.m_values):
        assert np.allclose(table.rho[i], (m + 1) / m, atol=1e-9)
    assert table.b1_mean == pytest.approx(-1.0, abs=1e-6)
    dev = np.abs(table.rho - 1.0)
    halving = dev[1:] / dev[:-1]
    assert np.all((halving > 0.3) & (halving < 0.7))


def test_asymptotics_general_weight_bounded_deviation():
    P = sq(mono(1, 0)) + from_squares([(3, mono(0, 1))])
    table = diagonal_asymptotics(FS, P, [6, 12, 24], [0.2, 1.0 + 1j, 5.0])
    assert np.isfinite(table.C_estimate) and table.C_estimate < 10
    assert np.all(np.abs(table.rho[-1] - 1) < np.abs(table.rho[0] - 1) + 1e-12)


def test_asymptotics_argument_checks():
    with pytest.raises(ValueError):
        diagonal_asymptotics(FS, ONE, [8], [0.0])
    with pytest.raises(ValueError):
        diagonal_asymptotics(FS, ONE, [8, 4], [0.0])


def test_weight_spec_validation(circle):
    with pytest.raises(ValueError):
        WeightSpec(FS, ONE, 0)
    with pytest.raises(ValueError):
        WeightSpec(norm_power(2, 1), ONE, 1)
    with pytest.raises(ValueError):
        gram_matrix(WeightSpec(sq(mono(1, 0)), ONE, 2))  # fails the positivity conditions
    with pytest.raises(ValueError):
        gram_matrix(WeightSpec(FS, circle, 2))  # P vanishes on a circle


def test_quadrature_error_reports_achieved_tolerance():
    with pytest.raises(QuadratureError) as info:
        gram_matrix(WeightSpec(FS, ONE, 3), QuadraturePlan(rtol=0.0, n_radial=4, max_levels=1))
    assert info.value.achieved >= 0


def test_onset_table(quillen_form):
    table = coefficient_matrix_onset(FS, quillen_form, range(1, 10))
    assert table.onset == 5
    by_m = {row["m"]: row for row in table.rows}
    assert [by_m[m]["nonnegative"] for m in range(1, 10)] == [False] * 4 + [True] * 5
    # m = 5 and m = 6 carry exactly vanishing entries, from m = 7 on all are positive
    for m in (5, 6):
        assert abs(by_m[m]["min_diagonal"]) <= 1e-9 * by_m[m]["max_abs_diagonal"]
    for m in (7, 8, 9):
        assert by_m[m]["min_diagonal"] > 1e-3 * by_m[m]["max_abs_diagonal"]
    assert by_m[4]["min_diagonal"] < 0


def test_onset_rejects_higher_dimension(jet_form):
    with pytest.raises(ValueError):
        coefficient_matrix_onset(norm_power(2, 1), jet_form, [1, 2])
