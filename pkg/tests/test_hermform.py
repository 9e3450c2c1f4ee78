import random
from fractions import Fraction

import pytest

from conftest import mono, rand_form, rand_point, rand_section, sq
from hermcert.algebra import GaussianRational
from hermcert.hermform import (
    HermitianForm,
    HoloSection,
    eval_pair,
    exact_rank,
    from_squares,
    gcurvature,
    norm_power,
    product,
    support_space_basis,
    unit_form,
)
from hermcert.spectra import psd_matrix_exact


def _diag(P: HermitianForm) -> list:
    return [P.C.get((a, a), GaussianRational(0)) for a in P.basis]


def test_from_squares_definition():
    P = from_squares([(1, mono(2, 0)), (-1, mono(0, 2))])
    assert P.C == {((2, 0), (2, 0)): 1, ((0, 2), (0, 2)): -1}


def test_duplicate_sections_accumulate():
    P = from_squares([(1, mono(2, 0)), (-1, mono(1, 1)), (-1, mono(1, 1))])
    assert P.C[((1, 1), (1, 1))] == -2


def test_circle_matrix(circle):
    direct = from_squares([(1, mono(2, 0)), (1, mono(0, 2)), (-1, mono(1, 1)), (-1, mono(1, 1))])
    assert direct == circle
    assert circle.is_diagonal()
    assert _diag(circle) == [1, -2, 1]


def test_from_squares_rejects_mixed_shapes():
    with pytest.raises(ValueError):
        from_squares([(1, mono(2, 0)), (1, mono(1, 0))])
    with pytest.raises(ValueError):
        from_squares([(1, mono(1, 0)), (1, mono(1, 0, 0))])


def test_non_hermitian_rejected():
    with pytest.raises(ValueError):
        HermitianForm(1, 1, {((1, 0), (0, 1)): 1})


def test_eval_pair_examples(circle):
    assert circle((1, 1)) == 0
    assert circle((1, 0)) == 1
    assert eval_pair(norm_power(1, 1), (1, 2), (3, 4)) == 11


def test_eval_pair_hermitian_and_dimension(circle):
    rng = random.Random(3)
    P = rand_form(rng, 2, 2)
    v, w = rand_point(rng, 2), rand_point(rng, 2)
    assert eval_pair(P, v, w) == eval_pair(P, w, v).conj()
    with pytest.raises(ValueError):
        eval_pair(circle, (1, 2, 3), (1, 2))


def test_product_examples(quillen_form):
    assert product(sq(mono(1, 0)), sq(mono(0, 1))) == sq(mono(1, 1))
    Q = product(quillen_form, norm_power(1, 1))
    assert Q.is_diagonal()
    assert _diag(Q) == [1, Fraction(-1, 2), Fraction(-1, 2), 1]
    assert product(quillen_form, unit_form(1)) == quillen_form


def test_product_rejects_mismatch(circle):
    with pytest.raises(ValueError):
        product(circle, norm_power(2, 1))


def test_norm_power_examples():
    assert _diag(norm_power(1, 1)) == [1, 1]
    assert _diag(norm_power(1, 2)) == [1, 2, 1]
    P = norm_power(2, 2)
    assert P.is_diagonal()
    expected = {(2, 0, 0): 1, (1, 1, 0): 2, (1, 0, 1): 2, (0, 2, 0): 1, (0, 1, 1): 2, (0, 0, 2): 1}
    assert {a: P.C[(a, a)] for a in P.basis} == expected
    with pytest.raises(ValueError):
        norm_power(1, 0)


def test_support_space_examples(circle, jet_form):
    assert support_space_basis(sq(mono(2, 0))) == [mono(2, 0)]
    assert len(support_space_basis(circle)) == 3
    basis = support_space_basis(jet_form)
    spanning = [mono(4, 0, 0), mono(2, 0, 2), mono(0, 4, 0), mono(1, 2, 1)]
    vecs = [s.vector() for s in basis]
    assert len(basis) == 4
    assert exact_rank(vecs + [s.vector() for s in spanning]) == 4
    with pytest.raises(ValueError):
        support_space_basis(HermitianForm.zero(1, 2))


def test_support_space_matches_square_sections():
    rng = random.Random(11)
    for _ in range(30):
        sections = [rand_section(rng, 2, 2) for _ in range(rng.randint(1, 4))]
        P = from_squares([(rng.choice((1, -1)), s) for s in sections])
        if P.is_zero():
            continue
        span = exact_rank([s.vector() for s in sections])
        got = support_space_basis(P)
        assert exact_rank([s.vector() for s in got]) == len(got)
        assert exact_rank([s.vector() for s in got] + [s.vector() for s in sections]) == span
        if span == len(sections):
            assert len(got) == span
        else:
            assert len(got) <= span


def test_gcurvature_examples():
    R = norm_power(1, 1)
    v = (3, GaussianRational(1, 2))
    assert gcurvature(R, [v]) == [[R(v)]]
    assert gcurvature(R, [(1, 0), (0, 1)]) == [[1, 0], [0, 1]]
    G = gcurvature(R, [(1, 0), (2, 0)])
    assert G == [[1, 2], [2, 4]]
    assert G[0][0] * G[1][1] - G[0][1] * G[1][0] == 0
    with pytest.raises(ValueError):
        gcurvature(R, [(1, 0, 0)])


def test_gcurvature_of_sum_of_squares_is_psd():
    rng = random.Random(5)
    for _ in range(25):
        P = from_squares([(1, rand_section(rng, 1, 2)) for _ in range(3)])
        pts = [rand_point(rng, 1) for _ in range(rng.randint(1, 4))]
        assert psd_matrix_exact(gcurvature(P, pts))


def test_from_squares_diagonal_value():
    rng = random.Random(8)
    for _ in range(25):
        terms = [(rng.choice((1, -1)), rand_section(rng, 2, 2)) for _ in range(3)]
        v = rand_point(rng, 2)
        expected = sum(w * s.evaluate(v).abs2() for w, s in terms)
        assert from_squares(terms)(v) == expected


def test_scale_and_power():
    P = sq(mono(1, 0)) - sq(mono(0, 1))
    assert P.scale(2) == P + P
    assert P**2 == P * P
    with pytest.raises(ValueError):
        P.scale(GaussianRational(0, 1))


def test_section_arithmetic():
    x, y = mono(1, 0), mono(0, 1)
    s = (x + y) * (x - y)
    assert s == x * x - y * y
    assert s.evaluate((2, 1)) == 3
    with pytest.raises(ValueError):
        HoloSection(1, 2, {(1, 0): 1})
