"""Capacity minimization, Sinkhorn scaling, complex lower-envelope sampling."""
from fractions import Fraction

import numpy as np
import pytest

import polycap as pc
from polycap import fixtures
from polycap.capacity import log_objective


class TestKnownValues:
    def test_uniform_product_is_one(self):
        for n in (2, 3, 5, 8):
            r = pc.capacity_minimize(fixtures.uniform_product_polynomial(n))
            assert r.value == pytest.approx(1.0, abs=1e-10)
            assert r.status == "converged"

    def test_diagonal_product(self):
        p = pc.ProductFormPolynomial([[2.0, 0.0], [0.0, 3.0]], mode="float")
        assert pc.capacity_minimize(p).value == pytest.approx(6.0, rel=1e-10)

    def test_all_ones_matrix(self):
        p = pc.ProductFormPolynomial([[1.0, 1.0], [1.0, 1.0]], mode="float")
        assert pc.capacity_minimize(p).value == pytest.approx(4.0, rel=1e-10)

    def test_equality_family_value_is_product_of_scalers(self):
        a = (Fraction(1, 2), Fraction(1, 3), Fraction(5))
        p = fixtures.equality_family(a)
        r = pc.capacity_minimize(p)
        assert r.value == pytest.approx(float(Fraction(1, 2) * Fraction(1, 3) * 5),
                                        rel=1e-9)

    def test_single_variable(self):
        p = pc.SparsePolynomial(1, {(3,): 2}, mode="exact")
        r = pc.capacity_minimize(p)
        assert r.value == 2.0 and r.status == "converged" and r.iterations == 0

    def test_minimizer_is_feasible(self):
        rng = np.random.default_rng(1)
        p = pc.ProductFormPolynomial(fixtures.random_positive_matrix(4, rng),
                                     mode="float")
        r = pc.capacity_minimize(p)
        x = np.array(r.minimizer)
        assert np.all(x > 0)
        assert np.prod(x) == pytest.approx(1.0, rel=1e-12)
        assert p.evaluate(tuple(x)) == pytest.approx(r.value, rel=1e-12)


class TestObjectiveDerivatives:
    @pytest.mark.parametrize("kind", ["sparse", "product", "determinantal"])
    def test_gradient_and_hessian_match_finite_differences(self, kind):
        rng = np.random.default_rng(42)
        if kind == "sparse":
            poly = pc.expand(pc.ProductFormPolynomial(
                fixtures.random_positive_matrix(3, rng), mode="float"))
        elif kind == "product":
            poly = pc.ProductFormPolynomial(fixtures.random_positive_matrix(4, rng),
                                            mode="float")
        else:
            poly = pc.DeterminantalPolynomial(
                fixtures.doubly_stochastic_psd_tuple(4, rng), mode="float")
        obj = log_objective(poly)
        y = rng.normal(0, 0.3, poly.n_vars)
        h = 1e-6
        eye = np.eye(poly.n_vars)
        fd_g = np.array([(obj.value(y + h * e) - obj.value(y - h * e)) / (2 * h)
                         for e in eye])
        fd_h = np.array([(obj.gradient(y + h * e) - obj.gradient(y - h * e)) / (2 * h)
                         for e in eye])
        assert np.abs(obj.gradient(y) - fd_g).max() < 1e-6
        assert np.abs(obj.hessian(y) - fd_h).max() < 1e-5

    def test_objective_is_convex_along_segments(self):
        rng = np.random.default_rng(43)
        poly = pc.ProductFormPolynomial(fixtures.random_positive_matrix(5, rng),
                                        mode="float")
        obj = log_objective(poly)
        for _ in range(50):
            y1 = rng.normal(0, 1.0, 5)
            y2 = rng.normal(0, 1.0, 5)
            mid = obj.value((y1 + y2) / 2)
            assert mid <= (obj.value(y1) + obj.value(y2)) / 2 + 1e-9

    def test_oracle_objective_finite_differences(self):
        fn = pc.FunctionOracle(3, 3, lambda x: ((x[0] + x[1] + x[2]) / 3) ** 3,
                               mode="float")
        r = pc.capacity_minimize(fn, tol=1e-8)
        assert r.value == pytest.approx(1.0, rel=1e-7)


class TestInvariances:
    def test_scalar_homogeneity(self):
        rng = np.random.default_rng(2)
        m = fixtures.random_positive_matrix(3, rng)
        c1 = pc.capacity_minimize(pc.ProductFormPolynomial(m, mode="float")).value
        scaled = [[7.0 * v for v in row] for row in [m[0]]] + [list(m[1]), list(m[2])]
        c2 = pc.capacity_minimize(pc.ProductFormPolynomial(scaled, mode="float")).value
        assert c2 == pytest.approx(7.0 * c1, rel=1e-9)

    def test_diagonal_substitution_multiplies_by_det(self):
        # Cap(p(Dx)) = prod(d) * Cap(p) for degree-n forms in n variables
        rng = np.random.default_rng(3)
        m = np.array(fixtures.random_positive_matrix(3, rng))
        d = np.array([2.0, 0.5, 3.0])
        c1 = pc.capacity_minimize(pc.ProductFormPolynomial(m, mode="float")).value
        c2 = pc.capacity_minimize(pc.ProductFormPolynomial(m * d[None, :],
                                                           mode="float")).value
        assert c2 == pytest.approx(d.prod() * c1, rel=1e-9)

    def test_representation_independence(self):
        rng = np.random.default_rng(4)
        m = fixtures.random_positive_matrix(4, rng)
        p = pc.ProductFormPolynomial(m, mode="float")
        c_prod = pc.capacity_minimize(p).value
        c_sparse = pc.capacity_minimize(pc.expand(p)).value
        mats = fixtures.diagonal_psd_tuple(m)
        # det(sum x_i diag(row_i)) multiplies columns, i.e. the transpose form
        c_det = pc.capacity_minimize(
            pc.DeterminantalPolynomial(mats, mode="float")).value
        c_trans = pc.capacity_minimize(
            pc.ProductFormPolynomial(np.array(m, dtype=float).T, mode="float")).value
        assert c_sparse == pytest.approx(c_prod, rel=1e-8)
        assert c_det == pytest.approx(c_trans, rel=1e-8)


class TestStatusesAndValidation:
    def test_degenerate_zero_sparse(self):
        p = pc.SparsePolynomial(2, {(2, 0): 1.0}, mode="float")
        r = pc.capacity_minimize(p)
        assert r.value == 0.0 and r.status == "degenerate-zero"

    def test_degenerate_zero_product(self):
        p = pc.ProductFormPolynomial([[0.0, 1.0], [0.0, 1.0]], mode="float")
        r = pc.capacity_minimize(p)
        assert r.value == 0.0 and r.status == "degenerate-zero"

    def test_iteration_cap_status(self):
        p = pc.ProductFormPolynomial([[5.0, 0.1], [0.1, 3.0]], mode="float")
        r = pc.capacity_minimize(p, max_iter=1)
        assert r.status == "iteration-cap" and r.iterations == 1

    def test_identically_zero_pencil_rejected(self):
        mats = [[[1.0, 0.0], [0.0, 0.0]], [[2.0, 0.0], [0.0, 0.0]]]
        p = pc.DeterminantalPolynomial(mats, mode="float")
        with pytest.raises(pc.InputError, match="positive"):
            pc.capacity_minimize(p)

    def test_bad_tol(self):
        p = fixtures.uniform_product_polynomial(2)
        with pytest.raises(pc.InputError):
            pc.capacity_minimize(p, tol=0.0)

    def test_bad_x0(self):
        p = fixtures.uniform_product_polynomial(2)
        with pytest.raises(pc.InputError):
            pc.capacity_minimize(p, x0=(1.0, -1.0))
        with pytest.raises(pc.InputError):
            pc.capacity_minimize(p, x0=(1.0,))

    def test_x0_start_converges_to_same_value(self):
        p = pc.ProductFormPolynomial([[5.0, 0.1], [0.1, 3.0]], mode="float")
        r0 = pc.capacity_minimize(p)
        r1 = pc.capacity_minimize(p, x0=(2.0, 0.5))
        assert r1.value == pytest.approx(r0.value, rel=1e-10)

    def test_to_dict_round_trip_fields(self):
        r = pc.capacity_minimize(fixtures.uniform_product_polynomial(2))
        d = r.to_dict()
        assert set(d) == {"value", "minimizer", "iterations", "gradient_norm",
                          "status"}


class TestSinkhorn:
    def test_doubly_stochastic_fixed_point(self):
        m = [[0.5, 0.5], [0.5, 0.5]]
        r = pc.sinkhorn_scale(m)
        assert r.status == "converged"
        assert r.capacity == pytest.approx(1.0, rel=1e-12)
        assert r.max_deviation <= 1e-10

    def test_all_ones_capacity_four(self):
        r = pc.sinkhorn_scale([[1.0, 1.0], [1.0, 1.0]])
        assert r.capacity == pytest.approx(4.0, rel=1e-12)

    def test_agrees_with_newton(self):
        rng = np.random.default_rng(7)
        for _ in range(10):
            m = fixtures.random_positive_matrix(4, rng)
            cap_s = pc.sinkhorn_scale(m, tol=1e-12).capacity
            cap_n = pc.capacity_minimize(
                pc.ProductFormPolynomial(m, mode="float"), tol=1e-12).value
            assert cap_s == pytest.approx(cap_n, rel=1e-8)

    def test_scaled_matrix_is_doubly_stochastic(self):
        rng = np.random.default_rng(8)
        r = pc.sinkhorn_scale(fixtures.random_positive_matrix(5, rng))
        s = np.array(r.scaled_matrix)
        assert np.abs(s.sum(axis=0) - 1).max() < 1e-9
        assert np.abs(s.sum(axis=1) - 1).max() < 1e-9
        # scalers factor the input as A = D1 B D2 with B the balanced matrix
        m = np.array(fixtures.random_positive_matrix(5, np.random.default_rng(8)))
        rebuilt = np.diag(r.row_scalers) @ s @ np.diag(r.col_scalers)
        assert np.abs(rebuilt - m).max() < 1e-10

    def test_zero_row_rejected(self):
        with pytest.raises(pc.InputError):
            pc.sinkhorn_scale([[0.0, 0.0], [1.0, 1.0]])

    def test_zero_column_rejected(self):
        with pytest.raises(pc.InputError):
            pc.sinkhorn_scale([[0.0, 1.0], [0.0, 1.0]])

    def test_non_square_rejected(self):
        with pytest.raises(pc.InputError):
            pc.sinkhorn_scale([[1.0, 1.0]])

    def test_iteration_cap(self):
        rng = np.random.default_rng(9)
        r = pc.sinkhorn_scale(fixtures.random_positive_matrix(3, rng),
                              tol=1e-12, max_iter=10)
        assert r.status in ("converged", "iteration-cap")
        if r.status == "iteration-cap":
            assert r.iterations == 10


class TestComplexSampler:
    def test_stable_families_stay_above_one(self):
        for p in (fixtures.uniform_product_polynomial(2, mode="float"),
                  fixtures.uniform_product_polynomial(3, mode="float"),
                  fixtures.elementary_product(3, mode="float")):
            v = pc.complex_capacity_sample(p, samples=500, seed=0)
            assert v >= 1.0 - 1e-9
            assert v <= 1.5  # the infimum over the sampled region is 1

    def test_unstable_family_dips_below(self):
        v = pc.complex_capacity_sample(fixtures.power_sum(3, mode="float"),
                                       samples=500, seed=0)
        assert v < 0.25

    def test_deterministic_for_fixed_seed(self):
        p = fixtures.uniform_product_polynomial(3, mode="float")
        a = pc.complex_capacity_sample(p, samples=200, seed=5)
        b = pc.complex_capacity_sample(p, samples=200, seed=5)
        assert a == b
