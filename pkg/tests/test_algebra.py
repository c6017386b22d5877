"""Kernel axioms: products, grading, versors, duality, blade detection."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from moebiusnets import (
    AlgebraError,
    GradeError,
    Multivector,
    Versor,
    adjoint_bracket,
    conformal_algebra,
    dual,
    is_pure_blade,
    lambda_inner,
    minkowski_inner,
    projective_distance,
    random_multivector,
    random_spin_versor,
    random_unit_spacelike,
    versor_apply,
)


def coeff_arrays(n):
    size = 1 << (n + 2)
    return st.lists(
        st.floats(min_value=-10, max_value=10, allow_nan=False), min_size=size, max_size=size
    ).map(np.array)


class TestGeneratorRelations:
    def test_dimension_guard(self):
        with pytest.raises(AlgebraError):
            conformal_algebra(1)
        with pytest.raises(AlgebraError):
            conformal_algebra(9)

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_printed_relations_exact(self, n):
        alg = conformal_algebra(n)
        for i in range(1, n + 1):
            sq = alg.e(i) * alg.e(i)
            assert sq.coeffs[0] == -1.0 and np.count_nonzero(sq.coeffs) == 1
        anti = alg.e0 * alg.einf + alg.einf * alg.e0
        assert anti.coeffs[0] == 1.0 and np.count_nonzero(anti.coeffs) == 1
        assert (alg.e0 * alg.e0).max_abs() == 0.0
        assert (alg.einf * alg.einf).max_abs() == 0.0
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                if i != j:
                    assert (alg.e(i) * alg.e(j) + alg.e(j) * alg.e(i)).max_abs() == 0.0

    def test_derived_null_combination(self, alg3):
        # (e_0 + e_inf)^2 expands to e_0 e_inf + e_inf e_0 = 1
        sq = (alg3.e0 + alg3.einf) * (alg3.e0 + alg3.einf)
        assert sq.coeffs[0] == 1.0 and np.count_nonzero(sq.coeffs) == 1

    def test_identity_element(self, alg3):
        rng = np.random.default_rng(0)
        x = random_multivector(alg3, rng)
        assert alg3.scalar(1.0) * x == x


class TestProducts:
    @settings(max_examples=60, deadline=None)
    @given(coeff_arrays(2), coeff_arrays(2), coeff_arrays(2))
    def test_associativity(self, a, b, c):
        alg = conformal_algebra(2)
        A, B, C = (Multivector(alg, x) for x in (a, b, c))
        lhs, rhs = (A * B) * C, A * (B * C)
        scale = max(A.norm() * B.norm() * C.norm(), 1.0)
        assert (lhs - rhs).max_abs() <= 1e-12 * scale

    @settings(max_examples=60, deadline=None)
    @given(coeff_arrays(2), coeff_arrays(2), coeff_arrays(2))
    def test_distributivity(self, a, b, c):
        alg = conformal_algebra(2)
        A, B, C = (Multivector(alg, x) for x in (a, b, c))
        scale = max((A.norm() + B.norm()) * C.norm(), 1.0)
        assert ((A + B) * C - (A * C + B * C)).max_abs() <= 1e-12 * scale

    def test_reverse_antiautomorphism_on_basis(self, alg3):
        for i in range(alg3.size):
            for j in range(alg3.size):
                a, b = alg3.basis_blade(i), alg3.basis_blade(j)
                assert (a * b).reverse() == b.reverse() * a.reverse()

    def test_wedge_of_orthogonal_vectors_is_product(self, alg3):
        a, b = alg3.e(1), alg3.e(2)
        assert a.wedge(b) == a * b

    def test_wedge_antisymmetry(self, alg3):
        assert alg3.e(1).wedge(alg3.e(1)).max_abs() == 0.0
        rng = np.random.default_rng(1)
        u = alg3.vector(rng.normal(size=5))
        assert u.wedge(u).max_abs() < 1e-14

    def test_grade_decomposition_exact(self, alg3):
        rng = np.random.default_rng(2)
        x = random_multivector(alg3, rng)
        total = alg3.scalar(0.0)
        for k in range(alg3.dimension + 1):
            total = total + x.grade(k)
        assert total == x


class TestInnerProduct:
    def test_convention_values(self, alg3):
        assert minkowski_inner(alg3.e0, alg3.einf) == -0.5
        assert minkowski_inner(alg3.e(1), alg3.e(1)) == 1.0
        assert minkowski_inner(alg3.e0, alg3.e0) == 0.0

    def test_matches_symmetrized_product(self, alg3):
        rng = np.random.default_rng(3)
        u = alg3.vector(rng.normal(size=5))
        v = alg3.vector(rng.normal(size=5))
        sym = u * v + v * u
        assert sym.is_grade(0)
        assert math.isclose(minkowski_inner(u, v), -0.5 * sym.scalar, rel_tol=1e-13)

    def test_grade_guard(self, alg3):
        with pytest.raises(GradeError):
            minkowski_inner(alg3.e(1) * alg3.e(2), alg3.e(1))


class TestAdjointBracket:
    def test_basis_examples(self, alg3):
        e1, e2, e3 = alg3.e(1), alg3.e(2), alg3.e(3)
        assert adjoint_bracket(e1, e1 * e2) == -2.0 * e2
        assert adjoint_bracket(e3, e1 * e2).max_abs() == 0.0
        # [e_0, e_0 e_inf] = 2 <e_inf, e_0> e_0 = -e_0
        assert adjoint_bracket(alg3.e0, alg3.e0 * alg3.einf) == -1.0 * alg3.e0

    def test_identity_on_all_basis_combinations(self, alg3):
        basis = [alg3.e0, alg3.e(1), alg3.e(2), alg3.e(3), alg3.einf]
        for i, vi in enumerate(basis):
            for j, vj in enumerate(basis):
                if i == j:
                    continue
                for vk in basis:
                    lhs = adjoint_bracket(vk, vi * vj)
                    rhs = 2.0 * (minkowski_inner(vj, vk) * vi - minkowski_inner(vi, vk) * vj)
                    assert (lhs - rhs).max_abs() == 0.0


class TestVersors:
    def test_identity_versor(self, alg3):
        rng = np.random.default_rng(4)
        x = random_multivector(alg3, rng)
        assert versor_apply(Versor.identity(alg3), x) == x

    def test_inversion_preserves_null(self, alg3):
        rng = np.random.default_rng(5)
        s = random_unit_spacelike(alg3, rng)
        p = alg3.e0 + alg3.e(1) + alg3.einf  # lift of (1,0,0)
        image = (s * p * s).grade(1)
        assert abs(minkowski_inner(image, image)) < 1e-12 * image.norm() ** 2

    def test_unit_products_up_to_eight_factors(self, alg3):
        rng = np.random.default_rng(6)
        for k in (2, 4, 6, 8):
            phi = random_spin_versor(alg3, rng, k)
            assert abs(phi.eta - 1.0) <= 1e-12

    def test_sandwich_preserves_inner_products(self, alg3):
        rng = np.random.default_rng(7)
        phi = random_spin_versor(alg3, rng, 4)
        u = alg3.vector(rng.normal(size=5))
        v = alg3.vector(rng.normal(size=5))
        lhs = minkowski_inner(phi.apply(u).grade(1), phi.apply(v).grade(1))
        assert math.isclose(lhs, minkowski_inner(u, v), rel_tol=1e-11, abs_tol=1e-11)

    def test_sandwich_preserves_grades(self, alg3):
        rng = np.random.default_rng(8)
        phi = random_spin_versor(alg3, rng, 4)
        blade = alg3.e(1).wedge(alg3.e(2))
        assert phi.apply(blade).is_grade(2)

    def test_rejects_mixed_parity(self, alg3):
        with pytest.raises(AlgebraError):
            Versor(alg3.scalar(1.0) + alg3.e(1))

    def test_rejects_non_invertible(self, alg3):
        with pytest.raises(AlgebraError):
            Versor(alg3.e0)  # null vector has no inverse


class TestDuality:
    def test_point_pair_blade_maps_to_grade_two(self, alg3):
        v = alg3.e(1).wedge(alg3.e(2)).wedge(alg3.e(3))
        dv = dual(v)
        assert dv.is_grade(2)
        assert lambda_inner(dv, dv) == -lambda_inner(v, v)

    def test_signature_reversal_random_blades(self, alg3):
        rng = np.random.default_rng(9)
        for _ in range(20):
            vs = [alg3.vector(rng.normal(size=5)) for _ in range(3)]
            blade = vs[0].wedge(vs[1]).wedge(vs[2])
            if blade.max_abs() < 1e-9:
                continue
            assert math.isclose(
                lambda_inner(dual(blade), dual(blade)), -lambda_inner(blade, blade), rel_tol=1e-10
            )

    def test_linear_isomorphism(self, alg3):
        rng = np.random.default_rng(10)
        x, y = random_multivector(alg3, rng), random_multivector(alg3, rng)
        assert (dual(x + y) - (dual(x) + dual(y))).max_abs() < 1e-12

    def test_orthogonal_factor_square_sign(self, alg3):
        # (s_1 ... s_k)^2 = (-1)^{k(k-1)/2} prod s_i^2 for orthogonal factors
        blade = alg3.e(1) * alg3.e(2)
        assert (blade * blade).scalar == -1.0  # (-1)^1 * (-1)(-1)
        blade3 = alg3.e(1) * alg3.e(2) * alg3.e(3)
        assert (blade3 * blade3).scalar == 1.0  # (-1)^3 * (-1)^3


class TestPureBlades:
    def test_grade_two_criteria(self, alg3):
        assert is_pure_blade(alg3.e(1) * alg3.e(2), 2)
        mixed = alg3.e(1) * alg3.e(2) + alg3.e(3) * alg3.einf
        assert not is_pure_blade(mixed, 2)

    def test_vectors_always_pure(self, alg3):
        rng = np.random.default_rng(11)
        assert is_pure_blade(alg3.vector(rng.normal(size=5)), 1)

    def test_higher_grade_kernel_test(self, alg4):
        rng = np.random.default_rng(12)
        vs = [alg4.vector(rng.normal(size=6)) for _ in range(3)]
        blade = vs[0].wedge(vs[1]).wedge(vs[2])
        assert is_pure_blade(blade, 3)
        other = alg4.e(1).wedge(alg4.e(2)).wedge(alg4.e(3))
        nonpure = blade + 0.7 * other
        if nonpure.wedge(nonpure).max_abs() > 1e-9:  # guard against accidental purity
            assert not is_pure_blade(nonpure, 3)

    def test_mixed_grade_rejected(self, alg3):
        with pytest.raises(GradeError):
            is_pure_blade(alg3.scalar(1.0) + alg3.e(1) * alg3.e(2), 2)


class TestDeterminismAndComparison:
    def test_products_bit_identical(self, alg3):
        rng = np.random.default_rng(13)
        a, b = random_multivector(alg3, rng), random_multivector(alg3, rng)
        assert (a * b) == (a * b)
        assert np.array_equal((a * b).coeffs, (a * b).coeffs)

    def test_projective_distance(self, alg3):
        p = alg3.e0 + alg3.e(1) + alg3.einf
        assert projective_distance(p, -3.7 * p) == 0.0
        assert projective_distance(p, alg3.e0) > 0.1

    def test_signature_mismatch_rejected(self, alg3, alg4):
        with pytest.raises(AlgebraError):
            alg3.scalar(1.0) * alg4.scalar(1.0)

    def test_immutable_coefficients(self, alg3):
        x = alg3.scalar(1.0)
        with pytest.raises(ValueError):
            x.coeffs[0] = 2.0
