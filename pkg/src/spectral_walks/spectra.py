"""Gram matrices of tree dipoles and their spectral decomposition.

For a finite set F of nonempty words the Gram matrix M has entries
M[x, y] = dipole_value(x, y), exact integers.  Its eigensystem drives
three constructions checked against each other throughout:

* the Karhunen-Loeve vectors w_k = (1/lambda_k) sum_x xi_k(x) v_x and
  their unit-energy rescalings u_k = sqrt(lambda_k) w_k,
* the reciprocity pairing between Rayleigh quotients of the Laplacian in
  energy space and inverse Rayleigh quotients of M,
* the growth law sum_j <xi_j>^2 = |F| with <xi> the coefficient sum.

The eigensolver is a deterministic cyclic Jacobi iteration so repeated
runs are bit-stable with no dependence on LAPACK build details.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .graphs import WeightedGraph, energy_inner, laplacian_apply
from .tree import check_word, common_prefix_length, dipole_value, tree_graph, words_up_to

__all__ = [
    "GramSpectrum",
    "KLVector",
    "eigh",
    "gram_matrix",
    "gram_spectrum",
    "kl_vectors",
    "kl_value",
    "kl_vertex_function",
    "kl_gram_check",
    "dipole_combination",
    "rayleigh_energy",
    "reciprocity_spectrum",
    "r_function",
    "spectral_growth",
    "linear_independence_check",
]


def eigh(matrix):
    """Eigendecomposition of a real symmetric matrix by cyclic Jacobi sweeps.

    Returns (eigenvalues, eigenvectors) with eigenvalues descending and
    eigenvectors as orthonormal columns.  Convergence is declared when the
    off-diagonal Frobenius norm falls below 1e-12 times the Frobenius norm
    of the input; sweep order is fixed, so results are reproducible to the
    bit.  Each eigenvector's sign is pinned by making its first component
    of magnitude > 1e-12 positive.
    """
    a = np.array(matrix, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("eigh needs a square matrix")
    n = a.shape[0]
    if n == 0:
        return np.zeros(0), np.zeros((0, 0))
    if np.max(np.abs(a - a.T)) > 1e-12:
        raise ValueError("matrix is not symmetric within 1e-12")
    a = (a + a.T) / 2.0
    fro = float(np.linalg.norm(a))
    tol = 1e-12 * fro
    v = np.eye(n)
    if fro > 0.0:
        off_mask = ~np.eye(n, dtype=bool)
        for _ in range(60):
            # norm of the off-diagonal part, summed directly (a difference of
            # two large sums would cancel and floor far above tol)
            off = float(np.linalg.norm(a[off_mask]))
            if off <= tol:
                break
            for p in range(n - 1):
                for q in range(p + 1, n):
                    apq = a[p, q]
                    if apq == 0.0:
                        continue
                    h = a[q, q] - a[p, p]
                    if abs(apq) < 1e-36 * abs(h):
                        t = apq / h  # small-angle limit; theta would overflow
                    else:
                        theta = h / (2.0 * apq)
                        t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                    c = 1.0 / math.sqrt(t * t + 1.0)
                    s = t * c
                    app, aqq = a[p, p], a[q, q]
                    col_p = a[:, p].copy()
                    col_q = a[:, q].copy()
                    a[:, p] = c * col_p - s * col_q
                    a[:, q] = s * col_p + c * col_q
                    row_p = a[p, :].copy()
                    row_q = a[q, :].copy()
                    a[p, :] = c * row_p - s * row_q
                    a[q, :] = s * row_p + c * row_q
                    # the 2x2 block is known in closed form; writing it kills roundoff drift
                    a[p, p] = app - t * apq
                    a[q, q] = aqq + t * apq
                    a[p, q] = 0.0
                    a[q, p] = 0.0
                    vp = v[:, p].copy()
                    vq = v[:, q].copy()
                    v[:, p] = c * vp - s * vq
                    v[:, q] = s * vp + c * vq
        else:
            raise RuntimeError("Jacobi iteration did not converge in 60 sweeps")
    vals = np.diag(a).copy()
    order = np.argsort(-vals, kind="stable")
    vals = vals[order]
    vecs = v[:, order]
    for j in range(n):
        col = vecs[:, j]
        lead = np.nonzero(np.abs(col) > 1e-12)[0]
        if lead.size and col[lead[0]] < 0.0:
            vecs[:, j] = -col
    return vals, vecs


def _check_words(words):
    words = tuple(words)
    if not words:
        raise ValueError("the word set is empty")
    for w in words:
        check_word(w)
        if w == "":
            raise ValueError("the origin carries no dipole and cannot enter F")
    if len(set(words)) != len(words):
        raise ValueError("duplicate words in F")
    return words


def gram_matrix(words) -> np.ndarray:
    """Exact integer Gram matrix of the dipoles {v_x : x in F} in energy form."""
    words = _check_words(words)
    n = len(words)
    m = np.zeros((n, n), dtype=np.int64)
    for i, x in enumerate(words):
        for j in range(i, n):
            m[i, j] = m[j, i] = common_prefix_length(x, words[j])
    return m


@dataclass(frozen=True, eq=False)
class GramSpectrum:
    """A word set F with its dipole Gram matrix and eigensystem.

    eigenvalues are descending; eigenvectors[:, j] is the unit eigenvector
    for eigenvalues[j].
    """

    words: tuple
    matrix: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def coefficient_sum(self, j: int) -> float:
        """<xi_j> = sum over F of the j-th eigenvector's components."""
        return float(np.sum(self.eigenvectors[:, j]))


def gram_spectrum(words) -> GramSpectrum:
    words = _check_words(words)
    m = gram_matrix(words)
    vals, vecs = eigh(m)
    return GramSpectrum(words=words, matrix=m, eigenvalues=vals, eigenvectors=vecs)


@dataclass(frozen=True)
class KLVector:
    """One Karhunen-Loeve vector: coefficients over F and its eigenvalue.

    With normalized=False this is w_k, scaled 1/lambda_k, which restricts
    to xi_k on F.  With normalized=True it is u_k = sqrt(lambda_k) w_k,
    which has unit energy norm.
    """

    index: int
    eigenvalue: float
    words: tuple
    coefficients: np.ndarray
    normalized: bool

    @property
    def scale(self) -> float:
        if self.normalized:
            return 1.0 / math.sqrt(self.eigenvalue)
        return 1.0 / self.eigenvalue


def kl_vectors(gs: GramSpectrum, normalized: bool = False) -> list:
    return [
        KLVector(
            index=j,
            eigenvalue=float(gs.eigenvalues[j]),
            words=gs.words,
            coefficients=gs.eigenvectors[:, j].copy(),
            normalized=normalized,
        )
        for j in range(len(gs.words))
    ]


def kl_value(vec: KLVector, y: str) -> float:
    """Evaluate the KL vector at a tree vertex."""
    acc = 0.0
    for xi, x in zip(vec.coefficients, vec.words):
        acc += xi * dipole_value(x, y)
    return vec.scale * acc


def kl_vertex_function(vec: KLVector, g: WeightedGraph) -> dict:
    """Sample a KL vector on the vertex set of a truncated tree."""
    scale = vec.scale
    out = {}
    for y in g.vertices:
        acc = 0.0
        for xi, x in zip(vec.coefficients, vec.words):
            acc += xi * common_prefix_length(x, y)
        out[y] = scale * acc
    return out


def dipole_combination(g: WeightedGraph, words, coefficients) -> dict:
    """The vertex function sum_i coefficients[i] * v_{words[i]} on g."""
    words = _check_words(words)
    if len(words) != len(coefficients):
        raise ValueError("one coefficient per word required")
    out = {}
    for y in g.vertices:
        acc = 0  # int seed keeps Fraction coefficients exact
        for xi, x in zip(coefficients, words):
            acc += xi * common_prefix_length(x, y)
        out[y] = acc
    return out


def _tree_for(words, depth=None) -> WeightedGraph:
    need = max(len(w) for w in words)
    if depth is None:
        depth = need
    if depth < need:
        raise ValueError(f"truncation depth {depth} is below the longest word ({need})")
    return tree_graph(depth)


def kl_gram_check(gs: GramSpectrum, depth: int | None = None, normalized: bool = False) -> np.ndarray:
    """Energy Gram matrix of the KL vectors, computed on a truncated tree.

    Every inner product goes through graphs.energy_inner, a route that
    never touches the eigendecomposition; the contract is diag(1/lambda_k)
    for the w_k and the identity matrix for the u_k.
    """
    g = _tree_for(gs.words, depth)
    vecs = kl_vectors(gs, normalized=normalized)
    sampled = [kl_vertex_function(v, g) for v in vecs]
    n = len(vecs)
    out = np.zeros((n, n))
    for j in range(n):
        for k in range(j, n):
            val = energy_inner(g, sampled[j], sampled[k])
            out[j, k] = out[k, j] = float(val)
    return out


def rayleigh_energy(g: WeightedGraph, u):
    """Energy-form Rayleigh quotient <u, Lu>_E / <u, u>_E.

    Exact (a Fraction) when u and the conductances are rational.
    """
    den = energy_inner(g, u, u)
    den = den.real if isinstance(den, complex) else den
    if den <= 0:
        raise ValueError("zero energy norm")
    num = energy_inner(g, u, laplacian_apply(g, u))
    num = num.real if isinstance(num, complex) else num
    if isinstance(num, float) or isinstance(den, float):
        return float(num) / float(den)
    return Fraction(num) / Fraction(den)


def reciprocity_spectrum(words, depth: int | None = None):
    """Two independent routes to the Laplacian Rayleigh quotient, per eigenvector.

    For each eigenvector xi of M with the mean projected out (the identity
    needs zero-sum charges), form u = sum xi'(x) v_x and emit the triple
    (lambda, <u,Lu>_E/<u,u>_E on a truncated tree, |xi'|^2/<xi',M xi'>).
    The last two agree; eigenvectors that are essentially constant (the
    projection leaves nothing) are skipped.
    """
    words = _check_words(words)
    gs = gram_spectrum(words)
    g = _tree_for(words, depth)
    n = len(words)
    rows = []
    for j in range(n):
        xi = gs.eigenvectors[:, j].copy()
        xi -= np.mean(xi)
        norm = float(np.linalg.norm(xi))
        if norm <= 1e-12:
            continue
        u = dipole_combination(g, words, xi)
        energy_route = float(rayleigh_energy(g, u))
        coeff_route = float(xi @ xi) / float(xi @ (gs.matrix @ xi))
        rows.append((float(gs.eigenvalues[j]), energy_route, coeff_route))
    return rows


def r_function(gs: GramSpectrum) -> list:
    """The reciprocity function on the spectrum of M.

    Returns [(lambda_j, R(lambda_j))] with R(lambda) = (1/lambda)(1 + <xi>^2),
    the energy form <u_j, L u_j>_E of the unit-energy KL vector expressed
    through Gram data alone.
    """
    out = []
    for j in range(len(gs.words)):
        lam = float(gs.eigenvalues[j])
        s = gs.coefficient_sum(j)
        out.append((lam, (1.0 + s * s) / lam))
    return out


def spectral_growth(words) -> float:
    """sum_j <xi_j>^2 over the Gram eigenbasis; equals |F| by Parseval."""
    gs = gram_spectrum(words)
    return float(sum(gs.coefficient_sum(j) ** 2 for j in range(len(gs.words))))


def linear_independence_check(words, depth: int | None = None) -> bool:
    """Whether the dipoles {v_x : x in F} are linearly independent in energy.

    The Gram matrix is recomputed through energy_inner on a truncated
    tree (not through the word combinatorics) and passes iff its smallest
    eigenvalue exceeds 1e-10 times its Frobenius norm.
    """
    words = _check_words(words)
    g = _tree_for(words, depth)
    dipoles = [{y: common_prefix_length(x, y) for y in g.vertices} for x in words]
    n = len(words)
    m = np.zeros((n, n))
    for i in range(n):
        for j in range(i, n):
            m[i, j] = m[j, i] = float(energy_inner(g, dipoles[i], dipoles[j]))
    vals, _ = eigh(m)
    return bool(vals[-1] > 1e-10 * float(np.linalg.norm(m)))
