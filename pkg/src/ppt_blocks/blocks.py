"""2x2 block matrices [[A, X], [X*, B]]: assembly, partial transpose,
positivity certification, and the structure-preserving transforms.

A and B are Hermitian n x n, X is an arbitrary n x n corner.  The partial
transpose swaps X with X*.  A block is PPT when both the block and its
partial transpose are positive semidefinite.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .certificates import Certificate, Link, gap_certificate
from .errors import NotPDError
from . import linalg


@dataclass(frozen=True)
class Block2x2:
    a: np.ndarray
    x: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = linalg.to_hermitian(self.a)
        x = linalg.as_square_matrix(self.x)
        b = linalg.to_hermitian(self.b)
        if not (a.shape == x.shape == b.shape):
            raise ValueError(
                f"blocks must share one dimension, got {a.shape}, {x.shape}, {b.shape}"
            )
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "b", b)

    @property
    def n(self) -> int:
        return self.a.shape[0]


def assemble(block: Block2x2) -> np.ndarray:
    """The 2n x 2n Hermitian matrix [[A, X], [X*, B]]."""
    n = block.n
    h = np.zeros((2 * n, 2 * n), dtype=complex)
    h[:n, :n] = block.a
    h[:n, n:] = block.x
    h[n:, :n] = block.x.conj().T
    h[n:, n:] = block.b
    return h


def split(h, n: int | None = None) -> Block2x2:
    """Inverse of assemble.  n defaults to half the matrix dimension."""
    h = linalg.as_square_matrix(h)
    if n is None:
        if h.shape[0] % 2:
            raise ValueError("cannot split an odd-dimensional matrix evenly")
        n = h.shape[0] // 2
    if not 0 < n < h.shape[0]:
        raise ValueError(f"split point {n} out of range for dimension {h.shape[0]}")
    if 2 * n != h.shape[0]:
        raise ValueError("only balanced splits are supported")
    return Block2x2(a=h[:n, :n], x=h[:n, n:], b=h[n:, n:])


def partial_transpose(block: Block2x2) -> Block2x2:
    """(A, X, B) -> (A, X*, B).  An involution, exactly."""
    return Block2x2(a=block.a, x=block.x.conj().T, b=block.b)


def is_positive(block: Block2x2, tol: float = linalg.DEFAULT_TOL) -> Certificate:
    """PSD test on the assembled matrix, gap = smallest eigenvalue."""
    h = assemble(block)
    gap, witness = linalg.min_eig_witness(h)
    return gap_certificate(
        name="positive",
        lhs="0",
        rhs="[[A,X],[X*,B]]",
        gap=gap,
        tol=tol,
        scale=max(1.0, float(np.linalg.norm(h))),
        witness=witness,
    )


def is_ppt(block: Block2x2, tol: float = linalg.DEFAULT_TOL) -> Certificate:
    """PSD test on both the block and its partial transpose."""
    direct = is_positive(block, tol=tol)
    transposed = is_positive(partial_transpose(block), tol=tol)
    worst = direct if direct.gap <= transposed.gap else transposed
    links = (
        Link("H_psd", 0.0, direct.gap, direct.gap, direct.scale, direct.passed),
        Link(
            "H_tau_psd",
            0.0,
            transposed.gap,
            transposed.gap,
            transposed.scale,
            transposed.passed,
        ),
    )
    return gap_certificate(
        name="ppt",
        lhs="0",
        rhs="H and H^tau",
        gap=worst.gap,
        tol=tol,
        scale=worst.scale,
        witness=worst.witness,
        links=links,
    )


def schur_criterion(block: Block2x2, tol: float = linalg.DEFAULT_TOL) -> Certificate:
    """PPT test through the two Schur complements of A.

    Requires A strictly positive definite; agrees with the eigenvalue
    test away from the tolerance boundary.
    """
    a_inv = linalg.pd_inverse(block.a)  # raises NotPDError for singular A
    x = block.x
    comp_direct = linalg.hermitian_part(block.b - x.conj().T @ a_inv @ x)
    comp_transp = linalg.hermitian_part(block.b - x @ a_inv @ x.conj().T)
    gap_d, wit_d = linalg.min_eig_witness(comp_direct)
    gap_t, wit_t = linalg.min_eig_witness(comp_transp)
    scale_d = max(1.0, float(np.linalg.norm(comp_direct)))
    scale_t = max(1.0, float(np.linalg.norm(comp_transp)))
    links = (
        Link("B - X*inv(A)X psd", 0.0, gap_d, gap_d, scale_d, gap_d >= -tol * scale_d),
        Link("B - Xinv(A)X* psd", 0.0, gap_t, gap_t, scale_t, gap_t >= -tol * scale_t),
    )
    if gap_d / scale_d <= gap_t / scale_t:
        gap, witness, scale = gap_d, wit_d, scale_d
    else:
        gap, witness, scale = gap_t, wit_t, scale_t
    return gap_certificate(
        name="schur_ppt",
        lhs="0",
        rhs="both Schur complements of A",
        gap=gap,
        tol=tol,
        scale=scale,
        witness=witness,
        links=links,
    )


def negate_offdiag(block: Block2x2) -> Block2x2:
    return Block2x2(a=block.a, x=-block.x, b=block.b)


def swap_blocks(block: Block2x2) -> Block2x2:
    return Block2x2(a=block.b, x=block.x.conj().T, b=block.a)


def rotate_offdiag(block: Block2x2, theta: float) -> Block2x2:
    """Multiply the corner by a unit phase; preserves PPT."""
    phase = cmath.exp(1j * theta)
    return Block2x2(a=block.a, x=phase * block.x, b=block.b)


def average_diagonal(block: Block2x2) -> Block2x2:
    """Replace both diagonal blocks by their mean; preserves PPT."""
    mean = linalg.hermitian_part((block.a + block.b) / 2)
    return Block2x2(a=mean, x=block.x, b=mean)


def ppt_variants(block: Block2x2) -> list[Block2x2]:
    """The eight sign / corner-transpose / swap variants that stay PSD
    whenever the input block is PPT."""
    a, x, b = block.a, block.x, block.b
    xs = x.conj().T
    return [
        Block2x2(a=a, x=x, b=b),
        Block2x2(a=a, x=-x, b=b),
        Block2x2(a=a, x=xs, b=b),
        Block2x2(a=a, x=-xs, b=b),
        Block2x2(a=b, x=xs, b=a),
        Block2x2(a=b, x=-xs, b=a),
        Block2x2(a=b, x=x, b=a),
        Block2x2(a=b, x=-x, b=a),
    ]


def offdiag_compression(block: Block2x2, tol: float = linalg.DEFAULT_TOL) -> Certificate:
    """Certify [[0, X], [X*, 0]] <= H / 2 for a PSD block."""
    n = block.n
    corner = np.zeros((2 * n, 2 * n), dtype=complex)
    corner[:n, n:] = block.x
    corner[n:, :n] = block.x.conj().T
    cert = linalg.loewner_leq(
        corner,
        assemble(block) / 2,
        tol=tol,
        name="offdiag_compression",
        lhs="[[0,X],[X*,0]]",
        rhs="H/2",
    )
    return cert


def ando_mix(b1: Block2x2, b2: Block2x2, tol: float = linalg.DEFAULT_TOL) -> Block2x2:
    """Geometric means of the diagonal blocks of two PSD blocks sharing
    one corner: (A1 # A2, X, B1 # B2) is again PSD."""
    if b1.n != b2.n:
        raise ValueError("blocks must share one dimension")
    drift = float(np.linalg.norm(b1.x - b2.x))
    if drift > 1e-12 * max(1.0, float(np.linalg.norm(b1.x))):
        raise ValueError("blocks must share the same corner X")
    return Block2x2(
        a=linalg.geometric_mean(b1.a, b2.a, tol=tol),
        x=b1.x,
        b=linalg.geometric_mean(b1.b, b2.b, tol=tol),
    )


def geometric_mean_block(block: Block2x2, tol: float = linalg.DEFAULT_TOL) -> Block2x2:
    """(A, X, B) -> (A # B, X, A # B); maps PPT blocks to PPT blocks."""
    mean = linalg.geometric_mean(block.a, block.b, tol=tol)
    return Block2x2(a=mean, x=block.x, b=mean)


def cartesian_parts(x) -> tuple[np.ndarray, np.ndarray]:
    """Hermitian (re, im) with x = re + 1j * im, re = (x + x*)/2."""
    x = linalg.as_square_matrix(x)
    re = (x + x.conj().T) / 2
    im = (x - x.conj().T) / 2j
    return re, im


def phase_conjugator(n: int, theta: float) -> np.ndarray:
    """diag(exp(i theta) I_n, I_n); conjugation reproduces rotate_offdiag."""
    w = np.eye(2 * n, dtype=complex)
    w[:n, :n] *= cmath.exp(1j * theta)
    return w


def sum_difference_basis(n: int) -> np.ndarray:
    """The unitary (1/sqrt 2) [[I, -I], [I, I]]; conjugating [[G, R], [R, G]]
    by it block-diagonalizes to diag(G + R, G - R)."""
    eye = np.eye(n)
    j = np.zeros((2 * n, 2 * n), dtype=complex)
    j[:n, :n] = eye
    j[:n, n:] = -eye
    j[n:, :n] = eye
    j[n:, n:] = eye
    return j / np.sqrt(2.0)


def require_pd_diagonal(block: Block2x2) -> None:
    """Raise NotPDError unless both diagonal blocks are strictly PD."""
    for label, m in (("A", block.a), ("B", block.b)):
        smallest = linalg.min_eig(m)
        if smallest <= 1e-10 * max(1.0, float(np.linalg.norm(m))):
            raise NotPDError(
                f"diagonal block {label} is not PD: min eigenvalue {smallest:.3e}",
                min_eigenvalue=smallest,
            )
