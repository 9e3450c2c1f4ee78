import random

import numpy as np
import pytest

from conftest import mono, rand_form, sq
from hermcert.certify import SamplingPlan, modulus_ratio_estimate
from hermcert.decomp import (
    distinguished_basis,
    exact_modulus,
    hyperbolic_rotation,
    modulus,
    rational_distinguished_basis,
    rebase_distinguished,
    sos_decomposition,
)
from hermcert.hermform import HermitianForm, norm_power
from hermcert.spectra import psd_exact, to_float


def test_single_square():
    b = distinguished_basis(sq(mono(2, 0)))
    assert b.signature == (1, 0)
    assert np.allclose(np.abs(b.F[0]), [1, 0, 0])


def test_circle_basis(circle):
    b = distinguished_basis(circle)
    assert b.signature == (2, 1)
    # g is a multiple of z0 z1, f lies in span{z0^2, z1^2}
    assert np.allclose(np.abs(b.G[0]), [0, np.sqrt(2), 0])
    assert np.allclose(b.F[:, 1], 0)


def test_norm_power_basis():
    b = distinguished_basis(norm_power(1, 1))
    assert b.signature == (2, 0)
    assert np.allclose(b.F.conj().T @ b.F, np.eye(2))


def test_zero_form_rejected():
    with pytest.raises(ValueError):
        distinguished_basis(HermitianForm.zero(1, 2))


def test_modulus_examples(circle):
    mod = modulus(circle, distinguished_basis(circle))
    assert np.allclose(mod.matrix, np.diag([1, 2, 1]), atol=1e-8)
    P = norm_power(2, 2)
    assert np.allclose(modulus(P, distinguished_basis(P)).matrix, to_float(P), atol=1e-8)
    neg = -sq(mono(2, 0))
    assert np.allclose(modulus(neg, distinguished_basis(neg)).matrix, to_float(sq(mono(2, 0))), atol=1e-8)


def test_modulus_identities():
    rng = random.Random(21)
    for _ in range(20):
        P = rand_form(rng, 2, 2, k=4)
        if P.is_zero():
            continue
        b = distinguished_basis(P)
        mod = modulus(P, b)
        v = tuple(complex(rng.gauss(0, 1), rng.gauss(0, 1)) for _ in range(3))
        fv = sum(abs(s.evaluate(v)) ** 2 for s in b.f)
        gv = sum(abs(s.evaluate(v)) ** 2 for s in b.g)
        scale = np.linalg.norm(to_float(P)) * sum(abs(x) ** 2 for x in v) ** 2
        assert abs(mod(v) + P(v) - 2 * fv) <= 1e-8 * scale
        assert abs(mod(v) - P(v) - 2 * gv) <= 1e-8 * scale


def test_modulus_rejects_foreign_basis(circle):
    with pytest.raises(ValueError):
        modulus(circle, distinguished_basis(norm_power(1, 2)))


def test_exact_modulus(circle):
    assert exact_modulus(circle, rational_distinguished_basis(circle)) == norm_power(1, 2)


def test_sos_decomposition_examples(circle):
    P = norm_power(1, 2)
    secs = sos_decomposition(P)
    assert len(secs) == 3
    M = sum(np.outer(s.coeffs, s.coeffs.conj()) for s in secs)
    assert np.allclose(M, to_float(P), atol=1e-8)
    assert sos_decomposition(circle) is None
    assert sos_decomposition(HermitianForm.zero(1, 2)) == []


def test_sos_exists_iff_psd():
    rng = random.Random(22)
    for i in range(40):
        P = rand_form(rng, 1, 3, signs=(1,) if i % 2 else (1, -1))
        assert (sos_decomposition(P) is not None) == psd_exact(P)


def test_rebase_keeps_signature_and_form(circle):
    b = distinguished_basis(circle)
    M = to_float(circle)
    for seed in range(10):
        r = rebase_distinguished(b, seed)
        assert r.signature == (2, 1)
        assert np.linalg.norm(r.reexpand() - M) <= 1e-7 * np.linalg.norm(M)


def test_hyperbolic_identity_and_example(circle):
    b = distinguished_basis(circle)
    same = hyperbolic_rotation(b, 0, 0, 1.0, 0.0)
    assert np.allclose(same.F, b.F) and np.allclose(same.G, b.G)
    rot = hyperbolic_rotation(b, 0, 0, 5 / 4, 3 / 4)
    assert abs(rot.diagonal_value((1, 2)) - 9) <= 1e-7
    with pytest.raises(ValueError):
        hyperbolic_rotation(b, 0, 0, 1.0, 1.0)


def test_rebase_pure_blocks_unitary_only():
    P = norm_power(1, 2)
    b = distinguished_basis(P)
    r = rebase_distinguished(b, 3)
    assert r.signature == (3, 0)
    assert np.allclose(r.reexpand(), to_float(P), atol=1e-10)


def test_ratio_boundedness_is_basis_independent(circle, quillen_form):
    # bounded (positive) forms stay bounded, diverging ones stay large, under rebasing
    plan = SamplingPlan(n_samples=300, seed=1)
    for P in (norm_power(1, 2), quillen_form * norm_power(1, 5)):
        for basis in (distinguished_basis(P), rebase_distinguished(distinguished_basis(P), 7)):
            est = modulus_ratio_estimate(P, basis, plan)
            assert est.sup_estimate < 1e3
    near = [(1, 1 - 10.0**-k) for k in range(1, 5)]
    plan = SamplingPlan(n_samples=0, points=near)
    for basis in (distinguished_basis(circle), rebase_distinguished(distinguished_basis(circle), 7)):
        assert modulus_ratio_estimate(circle, basis, plan).sup_estimate > 1e6
