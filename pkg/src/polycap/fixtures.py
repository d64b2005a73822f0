"""Deterministic generators for matrices, polynomials, and PSD tuples used by
the test batteries and the built-in check suite.

Every random generator takes an explicit ``numpy.random.Generator``; nothing
here touches global RNG state.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from .capacity import sinkhorn_scale
from .errors import InputError
from .polynomials import (
    DeterminantalPolynomial,
    ProductFormPolynomial,
    SparsePolynomial,
)


def uniform_matrix(n: int):
    """The n x n doubly stochastic matrix with all entries 1/n, exactly."""
    if n < 1:
        raise InputError("n must be >= 1")
    row = tuple(Fraction(1, n) for _ in range(n))
    return tuple(row for _ in range(n))


def uniform_product_polynomial(n: int, mode: str = "exact") -> ProductFormPolynomial:
    """p(x) = ((x_1 + ... + x_n)/n)^n, the capacity-1 equality case."""
    return ProductFormPolynomial(uniform_matrix(n), mode=mode)


def equality_family(a, mode: str = "exact") -> ProductFormPolynomial:
    """p(x) = ((a_1 x_1 + ... + a_n x_n)/n)^n with a > 0: capacity is
    prod(a_i) and the mixed partial attains the n!/n^n bound exactly."""
    a = list(a)
    n = len(a)
    if n < 1 or any(Fraction(v) <= 0 for v in a):
        raise InputError("equality_family needs a nonempty positive vector")
    if mode == "exact":
        row = tuple(Fraction(v) / n for v in a)
    else:
        row = tuple(float(v) / n for v in a)
    return ProductFormPolynomial(tuple(row for _ in range(n)), mode=mode)


def two_per_row_circulant(mode: str = "exact") -> tuple:
    """3x3 doubly stochastic circulant with two nonzeros per row/column;
    its permanent 1/4 meets the sparse-support bound with equality."""
    h = Fraction(1, 2) if mode == "exact" else 0.5
    z = Fraction(0) if mode == "exact" else 0.0
    return ((h, h, z), (z, h, h), (h, z, h))


def elementary_product(n: int, mode: str = "exact") -> SparsePolynomial:
    """p(x) = x_1 * ... * x_n; capacity 1, mixed partial 1."""
    one = 1 if mode == "exact" else 1.0
    return SparsePolynomial(n, {tuple([1] * n): one}, mode=mode)


def power_sum(n: int, mode: str = "exact") -> SparsePolynomial:
    """p(x) = (x_1^n + ... + x_n^n)/n: capacity 1 but mixed partial 0, the
    standard example failing the half-plane property for n >= 3."""
    c = Fraction(1, n) if mode == "exact" else 1.0 / n
    terms = {}
    for i in range(n):
        e = [0] * n
        e[i] = n
        terms[tuple(e)] = c
    return SparsePolynomial(n, terms, mode=mode)


def lorentz_quadratic(k: int) -> SparsePolynomial:
    """q(x) = x_0^2 - x_1^2 - ... - x_k^2, the Lorentz form: real-rooted
    along (1, 0, ..., 0) though its coefficients are signed."""
    if k < 1:
        raise InputError("k must be >= 1")
    terms = {}
    e0 = [0] * (k + 1)
    e0[0] = 2
    terms[tuple(e0)] = 1
    for i in range(1, k + 1):
        e = [0] * (k + 1)
        e[i] = 2
        terms[tuple(e)] = -1
    return SparsePolynomial(k + 1, terms, mode="exact", allow_signed=True)


def random_positive_matrix(n: int, rng: np.random.Generator,
                           low: float = 0.1, high: float = 1.0):
    """Square float matrix with entries uniform in [low, high] > 0."""
    if not 0 < low <= high:
        raise InputError("need 0 < low <= high")
    return tuple(map(tuple, rng.uniform(low, high, (n, n))))


def random_product_polynomial(n: int, rng: np.random.Generator,
                              low: float = 0.1, high: float = 1.0) -> ProductFormPolynomial:
    """Product-form polynomial over a random strictly positive matrix."""
    return ProductFormPolynomial(random_positive_matrix(n, rng, low, high),
                                 mode="float")


def random_doubly_stochastic(n: int, rng: np.random.Generator,
                             tol: float = 1e-12):
    """Random doubly stochastic matrix: positive start, Sinkhorn-balanced."""
    result = sinkhorn_scale(random_positive_matrix(n, rng), tol=tol,
                            max_iter=20000)
    return result.scaled_matrix


def random_rational_matrix(n: int, rng: np.random.Generator,
                           denominator: int = 97):
    """Square matrix of strictly positive Fractions with a fixed denominator."""
    ints = rng.integers(1, denominator + 1, (n, n))
    return tuple(tuple(Fraction(int(v), denominator) for v in row)
                 for row in ints)


def random_permutation_matrix(n: int, rng: np.random.Generator):
    """0/1 permutation matrix (as Fractions) plus the permutation itself."""
    perm = tuple(int(v) for v in rng.permutation(n))
    rows = []
    for i in range(n):
        row = [Fraction(0)] * n
        row[perm[i]] = Fraction(1)
        rows.append(tuple(row))
    return tuple(rows), perm


def random_k_regular_doubly_stochastic(n: int, k: int, rng: np.random.Generator):
    """Average of k random permutation matrices: doubly stochastic with at
    most k nonzeros in every row and column. Returns (matrix, permutations)."""
    if not 1 <= k:
        raise InputError("k must be >= 1")
    mats = []
    perms = []
    for _ in range(k):
        m, p = random_permutation_matrix(n, rng)
        mats.append(m)
        perms.append(p)
    rows = []
    for i in range(n):
        rows.append(tuple(
            sum(m[i][j] for m in mats) / k for j in range(n)))
    return tuple(rows), tuple(perms)


def random_psd_matrix(n: int, rng: np.random.Generator, rank: int | None = None):
    """Random symmetric PSD float matrix G G^T with G of shape (n, rank)."""
    r = n if rank is None else rank
    if not 1 <= r <= n:
        raise InputError("need 1 <= rank <= n")
    g = rng.standard_normal((n, r))
    return tuple(map(tuple, g @ g.T))


def random_psd_tuple(n: int, rng: np.random.Generator):
    """Tuple of n random full-rank PSD matrices of size n x n."""
    return tuple(random_psd_matrix(n, rng) for _ in range(n))


def diagonal_psd_tuple(matrix):
    """PSD tuple (diag of row 1, ..., diag of row n): its mixed "determinant"
    polynomial det(sum x_i diag(row_i)) is the product form of matrix^T, so
    the full mixed partial equals per(matrix)."""
    rows = [tuple(r) for r in matrix]
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise InputError("matrix must be square")
    if any(v < 0 for r in rows for v in r):
        raise InputError("matrix entries must be nonnegative")
    mats = []
    for r in rows:
        mats.append(tuple(
            tuple(r[j] if j == l else 0 for l in range(n)) for j in range(n)))
    return tuple(mats)


def doubly_stochastic_psd_tuple(n: int, rng: np.random.Generator):
    """PSD tuple with sum_i A_i = I and tr(A_i) = 1: A_i = sum_j W_ij q_j q_j^T
    with W doubly stochastic and Q orthogonal."""
    W = np.array(random_doubly_stochastic(n, rng))
    q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    outer = np.einsum("aj,bj->jab", q, q)  # q_j q_j^T stacked over j
    mats = np.tensordot(W, outer, axes=([1], [0]))
    mats = 0.5 * (mats + mats.transpose(0, 2, 1))
    return tuple(tuple(map(tuple, m)) for m in mats)


def random_sparse_homogeneous(n: int, degree: int, n_terms: int,
                              rng: np.random.Generator,
                              mode: str = "float") -> SparsePolynomial:
    """Random sparse homogeneous polynomial: exponent vectors drawn as
    multinomial counts, strictly positive coefficients."""
    if n < 1 or degree < 1 or n_terms < 1:
        raise InputError("n, degree, and n_terms must be >= 1")
    terms = {}
    guard = 0
    while len(terms) < n_terms and guard < 100 * n_terms:
        guard += 1
        e = tuple(int(v) for v in rng.multinomial(degree, [1.0 / n] * n))
        if e in terms:
            continue
        if mode == "exact":
            terms[e] = Fraction(int(rng.integers(1, 100)), 100)
        else:
            terms[e] = float(rng.uniform(0.1, 1.0))
    return SparsePolynomial(n, terms, mode=mode)


def multilinear_head_sparse(n: int, k: int, n_terms: int,
                            rng: np.random.Generator,
                            mode: str = "exact") -> SparsePolynomial:
    """Sparse degree-n polynomial in n variables guaranteed to survive k
    head derivatives: includes the all-ones monomial and extra terms whose
    first k exponents are exactly 1."""
    if not 0 <= k < n:
        raise InputError("need 0 <= k < n")
    terms = {tuple([1] * n): Fraction(1) if mode == "exact" else 1.0}
    guard = 0
    while len(terms) < n_terms and guard < 100 * n_terms:
        guard += 1
        head = (1,) * k
        tail = tuple(int(v) for v in
                     rng.multinomial(n - k, [1.0 / (n - k)] * (n - k)))
        e = head + tail
        if e in terms:
            # also mix in generic terms so the head derivative kills some
            e = tuple(int(v) for v in rng.multinomial(n, [1.0 / n] * n))
            if e in terms:
                continue
        if mode == "exact":
            terms[e] = Fraction(int(rng.integers(1, 100)), 100)
        else:
            terms[e] = float(rng.uniform(0.1, 1.0))
    return SparsePolynomial(n, terms, mode=mode)


def product_with_sparse_first_column(n: int, k: int,
                                     rng: np.random.Generator) -> ProductFormPolynomial:
    """Product-form polynomial whose first variable has rank exactly k: the
    first column of the matrix has k nonzeros, all other entries positive."""
    if not 1 <= k <= n:
        raise InputError("need 1 <= k <= n")
    A = rng.uniform(0.1, 1.0, (n, n))
    zero_rows = rng.permutation(n)[: n - k]
    for i in zero_rows:
        A[i, 0] = 0.0
    return ProductFormPolynomial(tuple(map(tuple, A)), mode="float")


def univariate_equality_pair(n: int):
    """(a, b) with a_i = 1/n, b_i = (n-1)/n: the single-variable reduction
    bound d1 >= ((n-1)/n)^(n-1) * C holds with equality."""
    if n < 1:
        raise InputError("n must be >= 1")
    a = tuple(Fraction(1, n) for _ in range(n))
    b = tuple(Fraction(n - 1, n) for _ in range(n))
    return a, b


def feasible_entropy_vector(n: int, rng: np.random.Generator):
    """Random c in [0,1]^n with sum(c) = n-1: c = 1 - Dirichlet(1,...,1)."""
    if n < 2:
        raise InputError("n must be >= 2")
    d = rng.dirichlet([1.0] * n)
    return tuple(1.0 - v for v in d)
