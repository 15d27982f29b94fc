"""Block assembly, partial transpose, positivity tests, transforms."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ppt_blocks import linalg
from ppt_blocks.blocks import (
    Block2x2,
    ando_mix,
    assemble,
    average_diagonal,
    cartesian_parts,
    geometric_mean_block,
    is_positive,
    is_ppt,
    negate_offdiag,
    offdiag_compression,
    partial_transpose,
    phase_conjugator,
    ppt_variants,
    rotate_offdiag,
    schur_criterion,
    split,
    sum_difference_basis,
    swap_blocks,
)
from ppt_blocks.errors import NotPDError
from ppt_blocks.sampling import (
    child_seed,
    random_ginibre,
    random_pd,
    random_ppt_separable,
    random_psd,
    random_psd_block,
)


def identity_block(n=2, corner=0.5):
    return Block2x2(a=np.eye(n), x=corner * np.eye(n), b=np.eye(n))


def random_block(seed, n=2):
    return Block2x2(
        a=random_psd(n, child_seed(seed, 0)),
        x=random_ginibre(n, child_seed(seed, 1)),
        b=random_psd(n, child_seed(seed, 2)),
    )


class TestAssembleSplit:
    def test_identity_assembly(self):
        h = assemble(Block2x2(a=np.eye(2), x=np.zeros((2, 2)), b=np.eye(2)))
        np.testing.assert_array_equal(h, np.eye(4))

    def test_balanced_corner_spectrum(self):
        h = assemble(identity_block())
        values = linalg.herm_eig(h).values
        np.testing.assert_allclose(values, [1.5, 1.5, 0.5, 0.5], atol=1e-12)

    def test_rank_structure_matches_dense_eig(self):
        block = Block2x2(
            a=np.diag([1.0, 0.0]),
            x=np.array([[0.0, 0.5], [0.0, 0.0]]),
            b=np.diag([0.0, 1.0]),
        )
        ours = linalg.herm_eig(assemble(block)).values
        reference = np.sort(np.linalg.eigvalsh(assemble(block)))[::-1]
        np.testing.assert_allclose(ours, reference, atol=1e-12)

    def test_round_trip_exact(self):
        block = random_block(1)
        again = split(assemble(block))
        assert np.array_equal(again.a, block.a)
        assert np.array_equal(again.x, block.x)
        assert np.array_equal(again.b, block.b)

    def test_split_rejects_odd(self):
        with pytest.raises(ValueError):
            split(np.eye(3))

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(ValueError):
            Block2x2(a=np.eye(2), x=np.zeros((3, 3)), b=np.eye(2))


class TestPartialTranspose:
    def test_hermitian_corner_fixed_point(self):
        block = Block2x2(a=np.eye(2), x=np.array([[1.0, 2.0], [2.0, 0.0]]), b=np.eye(2))
        flipped = partial_transpose(block)
        np.testing.assert_array_equal(flipped.x, block.x)

    def test_nilpotent_corner(self):
        n = np.array([[0.0, 1.0], [0.0, 0.0]])
        flipped = partial_transpose(Block2x2(a=np.eye(2), x=n, b=np.eye(2)))
        np.testing.assert_array_equal(flipped.x, n.T)

    @given(st.integers(min_value=0, max_value=2**32 - 1))
    @settings(max_examples=25, deadline=None)
    def test_involution_bitwise(self, seed):
        block = random_block(seed)
        again = partial_transpose(partial_transpose(block))
        assert np.array_equal(again.x, block.x)
        assert np.array_equal(again.a, block.a)
        assert np.array_equal(again.b, block.b)


class TestPositivity:
    def test_diagonal_identity_passes(self):
        assert is_positive(Block2x2(a=np.eye(2), x=np.zeros((2, 2)), b=np.eye(2))).passed

    def test_oversized_corner_fails(self):
        cert = is_positive(Block2x2(a=np.eye(2), x=2 * np.eye(2), b=np.eye(2)))
        assert not cert.passed
        assert cert.gap == pytest.approx(-1.0, abs=1e-12)

    def test_gram_blocks_pass(self):
        for i in range(10):
            assert is_positive(random_psd_block(2, child_seed(8000, i))).passed

    def test_certificate_witness_rayleigh(self):
        block = Block2x2(a=np.eye(2), x=2 * np.eye(2), b=np.eye(2))
        cert = is_positive(block)
        h = assemble(block)
        w = cert.witness
        quotient = np.real(w.conj() @ (h @ w)) / np.linalg.norm(w) ** 2
        assert quotient == pytest.approx(cert.gap, abs=1e-10)


class TestPpt:
    def test_balanced_corner_is_ppt(self):
        assert is_ppt(identity_block()).passed

    def test_entangled_projector_fails(self):
        # H is a rank-one projector (PSD) whose partial transpose has a
        # -1/2 eigenvalue; the dense 4x4 decomposition is the oracle.
        block = Block2x2(
            a=np.diag([0.5, 0.0]),
            x=np.array([[0.0, 0.5], [0.0, 0.0]]),
            b=np.diag([0.0, 0.5]),
        )
        assert is_positive(block).passed
        cert = is_ppt(block)
        assert not cert.passed
        assert cert.gap == pytest.approx(-0.5, abs=1e-12)
        h_tau = assemble(partial_transpose(block))
        np.testing.assert_allclose(np.min(np.linalg.eigvalsh(h_tau)), -0.5, atol=1e-12)

    def test_separable_samples_pass(self):
        for i in range(10):
            block = random_ppt_separable(3, child_seed(8100, i))
            cert = is_ppt(block, tol=1e-10)
            assert cert.passed
            assert is_positive(partial_transpose(block), tol=1e-10).passed


class TestSchur:
    def test_balanced_corner_gap(self):
        cert = schur_criterion(identity_block())
        assert cert.passed
        assert cert.gap == pytest.approx(0.75, abs=1e-12)

    def test_oversized_corner_fails(self):
        cert = schur_criterion(Block2x2(a=np.eye(2), x=2 * np.eye(2), b=np.eye(2)))
        assert not cert.passed
        assert cert.gap == pytest.approx(-3.0, abs=1e-12)

    def test_singular_a_rejected(self):
        with pytest.raises(NotPDError):
            schur_criterion(
                Block2x2(a=np.diag([1.0, 0.0]), x=np.zeros((2, 2)), b=np.eye(2))
            )

    def test_agrees_with_eigenvalue_test(self):
        # mixed PPT / non-PPT stream with almost surely PD corners
        tol = 1e-8
        for i in range(200):
            block = random_psd_block(2, child_seed(8200, i))
            eig_cert = is_ppt(block, tol=tol)
            schur_cert = schur_criterion(block, tol=tol)
            if eig_cert.passed != schur_cert.passed:
                band = 10 * tol * eig_cert.scale
                assert abs(eig_cert.gap) < band or abs(schur_cert.gap) < band


class TestTransforms:
    def test_negate_involution(self):
        block = random_block(5)
        again = negate_offdiag(negate_offdiag(block))
        assert np.array_equal(again.x, block.x)

    def test_negate_and_swap_preserve_psd(self):
        for i in range(8):
            block = random_psd_block(2, child_seed(8300, i))
            assert is_positive(negate_offdiag(block)).passed
            assert is_positive(swap_blocks(block)).passed

    def test_rotate_zero_is_identity(self):
        block = random_block(6)
        rotated = rotate_offdiag(block, 0.0)
        np.testing.assert_array_equal(rotated.x, block.x)

    def test_rotate_pi_is_negation(self):
        block = random_block(7)
        np.testing.assert_allclose(
            rotate_offdiag(block, np.pi).x, negate_offdiag(block).x, atol=1e-15
        )

    def test_rotate_quarter_turn_stays_ppt(self):
        rotated = rotate_offdiag(identity_block(), np.pi / 2)
        np.testing.assert_allclose(rotated.x, 0.5j * np.eye(2), atol=1e-15)
        assert is_ppt(rotated).passed

    def test_average_diagonal_fixed_point(self):
        block = identity_block()
        averaged = average_diagonal(block)
        np.testing.assert_allclose(averaged.a, block.a, atol=1e-15)

    def test_average_diagonal_scalar_blocks(self):
        block = Block2x2(a=2 * np.eye(2), x=0.5 * np.eye(2), b=np.eye(2))
        averaged = average_diagonal(block)
        np.testing.assert_allclose(averaged.a, 1.5 * np.eye(2), atol=1e-15)
        assert is_ppt(averaged).passed

    def test_ppt_closure_campaign(self):
        for i in range(8):
            block = random_ppt_separable(2, child_seed(8400, i))
            for variant in ppt_variants(block):
                assert is_positive(variant).passed
            for theta in (np.pi / 7, np.pi / 3, 1.0):
                assert is_ppt(rotate_offdiag(block, theta)).passed
            assert is_ppt(average_diagonal(block)).passed

    def test_ppt_variants_zero_corner(self):
        block = Block2x2(a=np.diag([1.0, 2.0]), x=np.zeros((2, 2)), b=np.eye(2))
        variants = ppt_variants(block)
        assert len(variants) == 8
        for variant in variants:
            assert is_positive(variant).passed


class TestOffdiagCompression:
    def test_zero_corner_gap_half(self):
        cert = offdiag_compression(Block2x2(a=np.eye(2), x=np.zeros((2, 2)), b=np.eye(2)))
        assert cert.passed
        assert cert.gap == pytest.approx(0.5, abs=1e-12)

    def test_balanced_corner(self):
        assert offdiag_compression(identity_block()).passed

    def test_random_psd_blocks(self):
        for i in range(8):
            assert offdiag_compression(random_psd_block(3, child_seed(8500, i))).passed


class TestAndoMix:
    def test_idempotent(self):
        block = identity_block()
        mixed = ando_mix(block, block)
        np.testing.assert_allclose(mixed.a, block.a, atol=1e-10)
        np.testing.assert_allclose(mixed.b, block.b, atol=1e-10)

    def test_scalar_means(self):
        b1 = Block2x2(a=np.eye(2), x=np.zeros((2, 2)), b=np.eye(2))
        b2 = Block2x2(a=4 * np.eye(2), x=np.zeros((2, 2)), b=9 * np.eye(2))
        mixed = ando_mix(b1, b2)
        np.testing.assert_allclose(mixed.a, 2 * np.eye(2), atol=1e-10)
        np.testing.assert_allclose(mixed.b, 3 * np.eye(2), atol=1e-10)

    def test_psd_output_on_shared_corner_pairs(self):
        for i in range(8):
            n = 2 + i % 2
            x = random_ginibre(n, child_seed(8600, i))
            a1 = random_pd(n, child_seed(8610, i))
            a2 = random_pd(n, child_seed(8620, i))
            # Schur construction keeps each block PSD with PD diagonal
            b1 = linalg.hermitian_part(
                x.conj().T @ linalg.pd_inverse(a1) @ x + random_pd(n, child_seed(8630, i))
            )
            b2 = linalg.hermitian_part(
                x.conj().T @ linalg.pd_inverse(a2) @ x + random_pd(n, child_seed(8640, i))
            )
            block1 = Block2x2(a=a1, x=x, b=b1)
            block2 = Block2x2(a=a2, x=x, b=b2)
            assert is_positive(block1).passed
            assert is_positive(block2).passed
            assert is_positive(ando_mix(block1, block2)).passed

    def test_rejects_mismatched_corners(self):
        b1 = identity_block()
        b2 = Block2x2(a=np.eye(2), x=0.25 * np.eye(2), b=np.eye(2))
        with pytest.raises(ValueError):
            ando_mix(b1, b2)


class TestGeometricMeanBlock:
    def test_fixed_point(self):
        block = identity_block()
        out = geometric_mean_block(block)
        np.testing.assert_allclose(out.a, np.eye(2), atol=1e-10)

    def test_scalar_blocks(self):
        block = Block2x2(a=4 * np.eye(2), x=np.eye(2), b=9 * np.eye(2))
        out = geometric_mean_block(block)
        np.testing.assert_allclose(out.a, 6 * np.eye(2), atol=1e-10)
        np.testing.assert_allclose(out.b, 6 * np.eye(2), atol=1e-10)
        assert is_ppt(out).passed

    def test_random_ppt_stays_ppt(self):
        for i in range(8):
            block = random_ppt_separable(2, child_seed(8700, i))
            assert is_ppt(geometric_mean_block(block)).passed


class TestCartesianParts:
    def test_hermitian_input(self):
        x = np.array([[1.0, 2.0], [2.0, -1.0]])
        re, im = cartesian_parts(x)
        np.testing.assert_allclose(re, x, atol=1e-15)
        np.testing.assert_allclose(im, np.zeros((2, 2)), atol=1e-15)

    def test_anti_hermitian_input(self):
        re, im = cartesian_parts(1j * np.eye(2))
        np.testing.assert_allclose(re, np.zeros((2, 2)), atol=1e-15)
        np.testing.assert_allclose(im, np.eye(2), atol=1e-15)

    def test_nilpotent(self):
        re, im = cartesian_parts(np.array([[0.0, 1.0], [0.0, 0.0]]))
        np.testing.assert_allclose(re, [[0.0, 0.5], [0.5, 0.0]], atol=1e-15)
        np.testing.assert_allclose(im, [[0.0, -0.5j], [0.5j, 0.0]], atol=1e-15)

    @given(st.integers(min_value=0, max_value=2**32 - 1))
    @settings(max_examples=25, deadline=None)
    def test_reconstruction_exact(self, seed):
        x = random_ginibre(3, seed)
        re, im = cartesian_parts(x)
        assert np.linalg.norm(re - re.conj().T) == 0.0
        assert np.linalg.norm(im - im.conj().T) == 0.0
        np.testing.assert_allclose(re + 1j * im, x, atol=1e-16)


class TestConjugationIdentities:
    def test_phase_conjugation_reproduces_rotation(self):
        for i, theta in enumerate((0.7, np.pi / 3, 2.5)):
            block = random_block(child_seed(8800, i), n=3)
            w = phase_conjugator(3, theta)
            direct = assemble(rotate_offdiag(block, theta))
            conjugated = w @ assemble(block) @ w.conj().T
            scale = max(1.0, np.linalg.norm(direct))
            assert np.linalg.norm(direct - conjugated) <= 1e-12 * scale

    def test_sum_difference_block_diagonalization(self):
        for i in range(5):
            n = 2 + i % 2
            g = random_psd(n, child_seed(8900, 2 * i))
            r, _ = cartesian_parts(random_ginibre(n, child_seed(8900, 2 * i + 1)))
            stacked = assemble(Block2x2(a=g, x=r, b=g))
            j = sum_difference_basis(n)
            rotated = j.conj().T @ stacked @ j
            expected = np.zeros((2 * n, 2 * n), dtype=complex)
            expected[:n, :n] = g + r
            expected[n:, n:] = g - r
            scale = max(1.0, np.linalg.norm(expected))
            assert np.linalg.norm(rotated - expected) <= 1e-12 * scale
