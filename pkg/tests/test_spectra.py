"""Gram eigensystems, the reciprocity identities, and the KL apparatus."""

import math
from fractions import Fraction

import numpy as np
import pytest

from spectral_walks import (
    eigh,
    gram_matrix,
    gram_spectrum,
    kl_vectors,
    kl_gram_check,
    dipole_combination,
    rayleigh_energy,
    reciprocity_spectrum,
    r_function,
    spectral_growth,
    linear_independence_check,
    tree_graph,
    words_up_to,
    energy_inner,
    laplacian_apply,
)
from spectral_walks.spectra import kl_value, kl_vertex_function


class TestEigh:
    def test_diagonal(self):
        vals, vecs = eigh([[1.0, 0.0], [0.0, 3.0]])
        assert np.allclose(vals, [3.0, 1.0], atol=1e-14)
        assert np.allclose(np.abs(vecs), np.eye(2)[:, ::-1], atol=1e-14)

    def test_two_by_two_closed_form(self):
        for n in (2, 10, 100):
            vals, vecs = eigh([[1.0, 1.0], [1.0, float(n)]])
            root = math.sqrt((n + 1) ** 2 - 4 * (n - 1))
            assert abs(vals[0] - (n + 1 + root) / 2) <= 1e-9
            assert abs(vals[1] - (n + 1 - root) / 2) <= 1e-9

    def test_matches_lapack_on_random_symmetric(self):
        rng = np.random.default_rng(0)
        for n in (1, 2, 3, 5, 8, 12):
            for _ in range(4):
                a = rng.normal(size=(n, n))
                a = (a + a.T) / 2
                vals, vecs = eigh(a)
                ref = np.sort(np.linalg.eigvalsh(a))[::-1]
                scale = max(float(np.linalg.norm(a)), 1.0)
                assert np.max(np.abs(vals - ref)) <= 1e-10 * scale
                assert np.max(np.abs(a @ vecs - vecs * vals)) <= 1e-10 * scale
                assert np.max(np.abs(vecs.T @ vecs - np.eye(n))) <= 1e-10

    def test_residual_and_orthonormality_on_grams(self):
        for words in (("1", "11", "111"), tuple(words_up_to(3))):
            gs = gram_spectrum(words)
            m = gs.matrix.astype(float)
            fro = float(np.linalg.norm(m))
            assert np.max(np.abs(m @ gs.eigenvectors - gs.eigenvectors * gs.eigenvalues)) <= 1e-10 * fro
            n = len(words)
            assert np.max(np.abs(gs.eigenvectors.T @ gs.eigenvectors - np.eye(n))) <= 1e-10
            assert all(gs.eigenvalues[i] >= gs.eigenvalues[i + 1] for i in range(n - 1))

    def test_deterministic_to_the_bit(self):
        a = np.random.default_rng(3).normal(size=(7, 7))
        a = a + a.T
        v1, w1 = eigh(a)
        v2, w2 = eigh(a)
        assert v1.tobytes() == v2.tobytes()
        assert w1.tobytes() == w2.tobytes()

    def test_sign_convention(self):
        _, vecs = eigh([[0.0, 1.0], [1.0, 0.0]])
        for j in range(2):
            lead = np.nonzero(np.abs(vecs[:, j]) > 1e-12)[0]
            assert vecs[lead[0], j] > 0

    def test_rejects_asymmetric(self):
        with pytest.raises(ValueError, match="symmetric"):
            eigh([[0.0, 1.0], [0.0, 0.0]])

    def test_rejects_non_square(self):
        with pytest.raises(ValueError):
            eigh([[1.0, 2.0, 3.0]])

    def test_one_by_one(self):
        vals, vecs = eigh([[4.0]])
        assert vals[0] == 4.0 and vecs[0, 0] == 1.0


class TestGram:
    def test_frozen_matrices(self):
        assert gram_matrix(("1", "11", "111")).tolist() == [[1, 1, 1], [1, 2, 2], [1, 2, 3]]
        assert gram_matrix(("0", "111")).tolist() == [[1, 0], [0, 3]]
        assert gram_matrix(("10", "11")).tolist() == [[2, 1], [1, 2]]
        assert gram_matrix(("1", "1111111111")).tolist() == [[1, 1], [1, 10]]

    def test_rejects_origin_and_duplicates(self):
        with pytest.raises(ValueError):
            gram_matrix(("", "1"))
        with pytest.raises(ValueError):
            gram_matrix(("1", "1"))
        with pytest.raises(ValueError):
            gram_matrix(())

    def test_linear_independence(self):
        assert linear_independence_check(("1", "11", "10"))
        assert linear_independence_check(tuple(words_up_to(3)))


class TestReciprocity:
    def test_r_function_frozen_tables(self):
        rf = dict(r_function(gram_spectrum(("0", "111"))))
        assert abs(rf[3.0] - 2.0 / 3.0) <= 1e-10
        assert abs(rf[1.0] - 2.0) <= 1e-10
        rf = {round(lam, 9): r for lam, r in r_function(gram_spectrum(("10", "11")))}
        assert abs(rf[3.0] - 1.0) <= 1e-10
        assert abs(rf[1.0] - 1.0) <= 1e-10

    def test_routes_agree_per_eigenvector(self):
        for words in (("1", "11", "111"), ("10", "11"), tuple(words_up_to(3))):
            for lam, energy_route, coeff_route in reciprocity_spectrum(words):
                assert abs(energy_route - coeff_route) <= 1e-9

    def test_rayleigh_exact_for_rational_input(self):
        g = tree_graph(3)
        u = dipole_combination(g, ("1", "10"), (Fraction(1, 2), Fraction(-1, 3)))
        val = rayleigh_energy(g, u)
        assert isinstance(val, Fraction)
        # <u, Lu>_E = xi.xi + (sum xi)^2 over the dipole pairing, exactly
        xi = (Fraction(1, 2), Fraction(-1, 3))
        m = [[1, 1], [1, 2]]
        num = sum(a * a for a in xi) + sum(xi) ** 2
        den = sum(xi[i] * m[i][j] * xi[j] for i in range(2) for j in range(2))
        assert val == num / den

    def test_zero_sum_reciprocity_exact(self):
        # with zero-sum coefficients the boundary term drops out entirely
        g = tree_graph(3)
        xi = (Fraction(1), Fraction(-1))
        u = dipole_combination(g, ("1", "10"), xi)
        val = rayleigh_energy(g, u)
        m = [[1, 1], [1, 2]]
        den = sum(xi[i] * m[i][j] * xi[j] for i in range(2) for j in range(2))
        assert val == Fraction(2) / den


class TestKL:
    def test_w_vectors_restrict_to_eigenvectors(self):
        words = ("1", "11", "111")
        gs = gram_spectrum(words)
        for vec in kl_vectors(gs):
            for i, y in enumerate(words):
                assert abs(kl_value(vec, y) - gs.eigenvectors[i, vec.index]) <= 1e-10

    def test_w_gram_is_inverse_spectrum(self):
        gs = gram_spectrum(("1", "11", "111"))
        got = kl_gram_check(gs)
        want = np.diag(1.0 / gs.eigenvalues)
        assert np.max(np.abs(got - want)) <= 1e-8

    def test_u_vectors_orthonormal(self):
        gs = gram_spectrum(("1", "11", "10", "00"))
        got = kl_gram_check(gs, normalized=True)
        assert np.max(np.abs(got - np.eye(4))) <= 1e-8

    def test_u_laplacian_pairing_formulas(self):
        words = ("1", "11", "10", "011")
        gs = gram_spectrum(words)
        g = tree_graph(3)
        vecs = kl_vectors(gs, normalized=True)
        fns = [kl_vertex_function(v, g) for v in vecs]
        laps = [laplacian_apply(g, f) for f in fns]
        sums = [gs.coefficient_sum(j) for j in range(len(words))]
        lams = gs.eigenvalues
        for j in range(len(words)):
            for k in range(len(words)):
                got = energy_inner(g, fns[j], laps[k])
                got = got.real if isinstance(got, complex) else float(got)
                if j == k:
                    want = (1.0 + sums[j] ** 2) / lams[j]
                else:
                    want = sums[j] * sums[k] / math.sqrt(lams[j] * lams[k])
                assert abs(got - want) <= 1e-8

    def test_diagonal_pairing_equals_r_function(self):
        gs = gram_spectrum(("1", "11", "111"))
        rf = r_function(gs)
        for j, (lam, r) in enumerate(rf):
            assert abs(r - (1.0 + gs.coefficient_sum(j) ** 2) / lam) <= 1e-12

    def test_reconstruction(self):
        gs = gram_spectrum(tuple(words_up_to(3)))
        n = len(gs.words)
        rebuilt = sum(
            gs.eigenvalues[j] * np.outer(gs.eigenvectors[:, j], gs.eigenvectors[:, j])
            for j in range(n)
        )
        fro = float(np.linalg.norm(gs.matrix.astype(float)))
        assert np.max(np.abs(rebuilt - gs.matrix)) <= 1e-9 * fro


def test_spectral_growth_matches_set_size():
    for d in range(1, 5):
        words = words_up_to(d)
        assert abs(spectral_growth(words) - len(words)) <= 1e-8
