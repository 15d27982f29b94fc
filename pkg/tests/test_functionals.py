"""Functional evaluation, invariance, norm axioms, Lieb-type checks."""

import numpy as np
import pytest

from ppt_blocks import functionals as fn
from ppt_blocks import linalg
from ppt_blocks.blocks import Block2x2
from ppt_blocks.errors import NotHermitianError, NotPSDError
from ppt_blocks.sampling import (
    SampleSpec,
    child_seed,
    random_ginibre,
    random_pd,
    random_psd,
    random_psd_block,
    random_unitary,
)


class TestParsing:
    @pytest.mark.parametrize(
        "spec,kind",
        [
            ("trace", fn.TRACE),
            ("det", fn.DETERMINANT),
            ("specrad", fn.SPECTRAL_RADIUS),
            ("fro", fn.FROBENIUS),
            ("opnorm", fn.OPERATOR_NORM),
            ("kyfan:2", fn.KY_FAN_NORM),
            ("schatten:2", fn.SCHATTEN_NORM),
            ("schatten:inf", fn.SCHATTEN_NORM),
            ("prod-sv:1", fn.TOP_K_SINGULAR_PRODUCT),
            ("esym:2", fn.ELEM_SYM_EIG),
        ],
    )
    def test_round_trip(self, spec, kind):
        f = fn.parse_functional(spec)
        assert f.kind == kind
        assert fn.parse_functional(f.label).kind == kind

    def test_rejects_unknown(self):
        with pytest.raises(ValueError):
            fn.parse_functional("nuclear")

    def test_rejects_small_p(self):
        with pytest.raises(ValueError):
            fn.schatten_norm(0.5)


class TestEvaluate:
    def test_ky_fan_top(self):
        assert fn.evaluate(fn.ky_fan_norm(1), np.diag([3.0, 1.0])) == pytest.approx(3.0)

    def test_schatten_two_of_nilpotent(self):
        value = fn.evaluate(fn.schatten_norm(2), np.array([[0.0, 1.0], [0.0, 0.0]]))
        assert value == pytest.approx(1.0)

    def test_top_two_product(self):
        value = fn.evaluate(fn.top_k_singular_product(2), np.diag([3.0, 2.0, 1.0]))
        assert value == pytest.approx(6.0)

    def test_determinant(self):
        assert fn.evaluate(fn.determinant(), np.array([[2.0, 1.0], [1.0, 2.0]])) == pytest.approx(3.0)

    def test_spectral_radius_sign_blind(self):
        assert fn.evaluate(fn.spectral_radius(), np.diag([1.0, -4.0])) == pytest.approx(4.0)

    def test_eig_product_modulus_order(self):
        value = fn.evaluate(fn.elem_sym_eig(2), np.diag([1.0, -4.0, 2.0]))
        assert value == pytest.approx(-8.0)  # top two by modulus: -4, 2

    def test_operator_is_schatten_inf(self):
        m = random_ginibre(3, 7)
        assert fn.evaluate(fn.operator_norm(), m) == pytest.approx(
            fn.evaluate(fn.schatten_norm(float("inf")), m)
        )

    def test_frobenius_matches_schatten_two(self):
        for i in range(10):
            m = random_ginibre(4, child_seed(9100, i))
            direct = fn.evaluate(fn.frobenius_norm(), m)
            spectral = fn.evaluate(fn.schatten_norm(2), m)
            assert abs(direct - spectral) <= 1e-12 * max(1.0, direct)

    def test_ky_fan_full_equals_trace_norm(self):
        m = random_ginibre(4, 12)
        assert fn.evaluate(fn.ky_fan_norm(4), m) == pytest.approx(
            fn.evaluate(fn.schatten_norm(1), m)
        )

    def test_k_out_of_range(self):
        with pytest.raises(ValueError):
            fn.evaluate(fn.ky_fan_norm(5), np.eye(3))

    def test_eig_kinds_require_hermitian(self):
        with pytest.raises(NotHermitianError):
            fn.evaluate(fn.spectral_radius(), np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_trace_complex_input(self):
        m = np.array([[1j, 0.0], [0.0, 0.0]])
        assert fn.evaluate(fn.trace(), m) == pytest.approx(1j)


class TestInvariance:
    @pytest.mark.parametrize(
        "f",
        [
            fn.ky_fan_norm(2),
            fn.schatten_norm(1),
            fn.schatten_norm(3),
            fn.operator_norm(),
            fn.frobenius_norm(),
            fn.top_k_singular_product(2),
        ],
    )
    def test_two_sided_invariance(self, f):
        for i in range(20):
            m = random_ginibre(3, child_seed(9200, i))
            u = random_unitary(3, child_seed(9300, i))
            v = random_unitary(3, child_seed(9400, i))
            base = fn.evaluate(f, m)
            moved = fn.evaluate(f, u @ m @ v)
            assert abs(moved - base) <= 1e-9 * max(1.0, abs(base))

    @pytest.mark.parametrize(
        "f", [fn.trace(), fn.determinant(), fn.spectral_radius(), fn.elem_sym_eig(2)]
    )
    def test_similarity_invariance(self, f):
        for i in range(20):
            m = random_psd(3, child_seed(9500, i))
            u = random_unitary(3, child_seed(9600, i))
            base = abs(fn.evaluate(f, m))
            moved = abs(fn.evaluate(f, linalg.hermitian_part(u.conj().T @ m @ u)))
            assert abs(moved - base) <= 1e-9 * max(1.0, base)


class TestNormAxioms:
    @pytest.mark.parametrize("f", [fn.ky_fan_norm(2), fn.schatten_norm(1), fn.schatten_norm(2.5)])
    def test_triangle_and_homogeneity(self, f):
        for i in range(100):
            x = random_ginibre(4, child_seed(9700, 2 * i))
            y = random_ginibre(4, child_seed(9700, 2 * i + 1))
            vx = fn.evaluate(f, x)
            vy = fn.evaluate(f, y)
            vsum = fn.evaluate(f, x + y)
            assert vsum <= vx + vy + 1e-9 * max(1.0, vx + vy)
            assert fn.evaluate(f, -2.5 * x) == pytest.approx(2.5 * vx, rel=1e-9)

    def test_top_k_product_on_direct_sums(self):
        # top-k product of a blocked diagonal equals the best split
        d1 = np.array([5.0, 1.0])
        d2 = np.array([3.0, 2.0])
        joined = np.diag(np.concatenate([d1, d2]))
        for k in range(1, 5):
            direct = fn.evaluate(fn.top_k_singular_product(k), joined)
            best = 0.0
            for k1 in range(0, k + 1):
                k2 = k - k1
                if k1 > 2 or k2 > 2:
                    continue
                best = max(best, np.prod(sorted(d1, reverse=True)[:k1]) * np.prod(sorted(d2, reverse=True)[:k2]))
            assert direct == pytest.approx(best)


class TestLiebAxioms:
    def test_trace_campaign(self):
        spec = SampleSpec(n=3, seed=41, count=200, method="psd")
        assert fn.check_lieb_axioms(fn.trace(), spec).passed

    def test_ky_fan_campaign(self):
        spec = SampleSpec(n=4, seed=43, count=200, method="psd")
        assert fn.check_lieb_axioms(fn.ky_fan_norm(2), spec).passed

    @pytest.mark.parametrize(
        "f", [fn.determinant(), fn.schatten_norm(2), fn.top_k_singular_product(2),
              fn.spectral_radius(), fn.elem_sym_eig(2)]
    )
    def test_other_functionals(self, f):
        spec = SampleSpec(n=3, seed=47, count=60, method="psd")
        assert fn.check_lieb_axioms(f, spec).passed

    def test_equal_arguments_give_equality(self):
        x = random_ginibre(3, 51)
        lhs = abs(fn.evaluate(fn.trace(), x.conj().T @ x)) ** 2
        rhs = abs(fn.evaluate(fn.trace(), x.conj().T @ x)) * abs(
            fn.evaluate(fn.trace(), x.conj().T @ x)
        )
        assert lhs == pytest.approx(rhs)


class TestBlockLieb:
    def test_zero_corner(self):
        block = Block2x2(a=np.eye(2), x=np.zeros((2, 2)), b=np.eye(2))
        cert = fn.check_block_lieb(fn.trace(), block)
        assert cert.passed
        assert cert.links[0].lhs_value == pytest.approx(0.0)

    def test_identity_equality(self):
        block = Block2x2(a=np.eye(2), x=np.eye(2), b=np.eye(2))
        cert = fn.check_block_lieb(fn.trace(), block)
        assert cert.passed
        assert cert.links[0].lhs_value == pytest.approx(cert.links[0].rhs_value)

    def test_rejects_indefinite_block(self):
        with pytest.raises(NotPSDError):
            fn.check_block_lieb(
                fn.trace(), Block2x2(a=np.eye(2), x=2 * np.eye(2), b=np.eye(2))
            )

    @pytest.mark.parametrize(
        "f", [fn.trace(), fn.determinant(), fn.ky_fan_norm(2), fn.schatten_norm(2)]
    )
    def test_random_psd_blocks(self, f):
        for i in range(15):
            block = random_psd_block(3, child_seed(9800, i))
            assert fn.check_block_lieb(f, block).passed


class TestGmLieb:
    def test_equal_arguments(self):
        x = random_pd(3, 61)
        cert = fn.check_gm_lieb(fn.trace(), x, x)
        assert cert.passed
        assert cert.links[0].lhs_value == pytest.approx(cert.links[0].rhs_value, rel=1e-9)

    def test_scalar_identity_case(self):
        cert = fn.check_gm_lieb(fn.trace(), np.eye(2), 4 * np.eye(2))
        assert cert.passed
        assert cert.links[0].lhs_value == pytest.approx(4.0)
        assert cert.links[0].rhs_value == pytest.approx(4.0)

    @pytest.mark.parametrize(
        "f",
        [fn.trace(), fn.determinant(), fn.ky_fan_norm(2), fn.schatten_norm(3),
         fn.top_k_singular_product(2), fn.spectral_radius(), fn.operator_norm()],
    )
    def test_random_pd_pairs(self, f):
        for i in range(15):
            x = random_pd(3, child_seed(9900, 2 * i))
            y = random_pd(3, child_seed(9900, 2 * i + 1))
            assert fn.check_gm_lieb(f, x, y).passed
