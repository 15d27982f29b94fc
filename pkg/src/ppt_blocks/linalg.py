"""Dense complex matrix core: Hermitian eigendecomposition, SVD, polar
factors, matrix powers, the geometric mean, and Loewner-order tests.

The eigensolver is a cyclic Jacobi iteration with threshold pivoting,
specialized to Hermitian matrices.  Everything else in the package is
built on top of it, so its accuracy contract (reconstruction residual
below 1e-10 relative) is what every downstream tolerance leans on.
Intended scale is dense matrices up to n of a few dozen.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np
from numba import njit

from .certificates import Certificate, gap_certificate
from .errors import (
    ConvergenceError,
    NotHermitianError,
    NotPDError,
    NotPSDError,
)

DEFAULT_TOL = 1e-8
HERMITIAN_TOL = 1e-12
EIG_CONVERGENCE_TOL = 1e-13
MAX_SWEEPS = 40

# Test hook: when set, herm_eig returns perturbed eigenvalues so that the
# self-test pipeline can demonstrate it detects a broken solver.
FAULT_ENV_VAR = "PPT_BLOCKS_FAULT"


def as_square_matrix(a) -> np.ndarray:
    """Validate and return a square complex matrix with finite entries."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if m.shape[0] == 0:
        raise ValueError("zero-dimensional matrices are not supported")
    if not np.all(np.isfinite(m.real)) or not np.all(np.isfinite(m.imag)):
        raise ValueError("matrix entries must be finite")
    return m


def frobenius(m: np.ndarray) -> float:
    return float(np.linalg.norm(m))


def hermitian_part(m: np.ndarray) -> np.ndarray:
    return (m + m.conj().T) / 2


def to_hermitian(m, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Symmetrize m, rejecting inputs that are not Hermitian up to tol."""
    m = as_square_matrix(m)
    drift = float(np.linalg.norm(m - m.conj().T))
    if drift > tol * max(1.0, float(np.linalg.norm(m))):
        raise NotHermitianError(
            f"matrix is not Hermitian: ||M - M*||_F = {drift:.3e}"
        )
    return hermitian_part(m)


@dataclass(frozen=True)
class EigenSystem:
    """Eigenvalues (real, descending) and a unitary eigenbasis."""

    values: np.ndarray
    basis: np.ndarray


@dataclass(frozen=True)
class SvdSystem:
    """X = left @ diag(singulars) @ right*.  Singulars descending."""

    left: np.ndarray
    singulars: np.ndarray
    right: np.ndarray


@dataclass(frozen=True)
class PolarFactors:
    """X = unitary @ modulus with modulus PSD Hermitian."""

    unitary: np.ndarray
    modulus: np.ndarray


@njit(cache=True)
def _jacobi_sweeps(a, v, tol, max_sweeps):  # pragma: no cover - compiled
    n = a.shape[0]
    scale = 0.0
    for i in range(n):
        for j in range(n):
            scale += abs(a[i, j]) ** 2
    scale = np.sqrt(scale)
    if scale == 0.0:
        return 0, 0.0
    off = 0.0
    for sweep in range(max_sweeps):
        off2 = 0.0
        for i in range(n):
            for j in range(n):
                if i != j:
                    off2 += abs(a[i, j]) ** 2
        off = np.sqrt(off2)
        if off <= tol * scale:
            return sweep, off / scale
        # threshold pivoting: early sweeps skip pivots that are already
        # small relative to the remaining off-diagonal mass
        thresh = 0.2 * off / n if sweep < 3 else 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                h = abs(apq)
                if h <= thresh or h == 0.0:
                    continue
                app = a[p, p].real
                aqq = a[q, q].real
                u = apq / h
                tau = (aqq - app) / (2.0 * h)
                if abs(tau) > 1e14:
                    t = 1.0 / (2.0 * tau)
                elif tau != 0.0:
                    sign = 1.0 if tau > 0.0 else -1.0
                    t = sign / (abs(tau) + np.sqrt(1.0 + tau * tau))
                else:
                    t = 1.0
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                uc = u * c
                us = u * s
                for r in range(n):
                    arp = a[r, p]
                    arq = a[r, q]
                    a[r, p] = uc * arp - s * arq
                    a[r, q] = us * arp + c * arq
                for r in range(n):
                    apr = a[p, r]
                    aqr = a[q, r]
                    a[p, r] = np.conj(uc) * apr - s * aqr
                    a[q, r] = np.conj(us) * apr + c * aqr
                a[p, p] = complex(a[p, p].real, 0.0)
                a[q, q] = complex(a[q, q].real, 0.0)
                a[p, q] = 0.0
                a[q, p] = 0.0
                for r in range(n):
                    vrp = v[r, p]
                    vrq = v[r, q]
                    v[r, p] = uc * vrp - s * vrq
                    v[r, q] = us * vrp + c * vrq
    off2 = 0.0
    for i in range(n):
        for j in range(n):
            if i != j:
                off2 += abs(a[i, j]) ** 2
    off = np.sqrt(off2)
    if off <= tol * scale:
        return max_sweeps, off / scale
    return -1, off / scale


def _fault_offset(scale: float) -> float:
    raw = os.environ.get(FAULT_ENV_VAR, "")
    if not raw:
        return 0.0
    try:
        eps = float(raw)
    except ValueError:
        eps = 1e-6
    return eps * max(1.0, scale)


def herm_eig(
    m,
    tol: float = EIG_CONVERGENCE_TOL,
    max_sweeps: int = MAX_SWEEPS,
) -> EigenSystem:
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending.

    Raises ConvergenceError (with the off-diagonal residual) if the sweep
    budget is exhausted, which does not happen at the intended scale.
    """
    a = to_hermitian(m)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    if n > 1:
        sweeps, residual = _jacobi_sweeps(a, v, tol, max_sweeps)
        if sweeps < 0:
            raise ConvergenceError(
                f"Jacobi sweeps exhausted ({max_sweeps}), off-diagonal "
                f"residual {residual:.3e}",
                residual=residual,
                sweeps=max_sweeps,
            )
    values = np.diagonal(a).real.copy()
    order = np.argsort(-values, kind="stable")
    values = values[order]
    fault = _fault_offset(float(np.linalg.norm(values)))
    if fault:
        values = values + fault
    return EigenSystem(values=values, basis=np.ascontiguousarray(v[:, order]))


def min_eig(m) -> float:
    """Smallest eigenvalue of a Hermitian matrix."""
    return float(herm_eig(m).values[-1])


def min_eig_witness(m) -> tuple[float, np.ndarray]:
    """Smallest eigenvalue and the corresponding unit eigenvector."""
    system = herm_eig(m)
    return float(system.values[-1]), system.basis[:, -1].copy()


def svd(x) -> SvdSystem:
    """Singular value decomposition built on the Hermitian eigensolver.

    Right factor and singular values come from X*X; left columns are
    recovered as X v / s and re-orthonormalized, with columns for
    singular values below 1e-12 * s_1 filled in by completion.
    """
    x = as_square_matrix(x)
    n = x.shape[0]
    gram = hermitian_part(x.conj().T @ x)
    system = herm_eig(gram)
    singulars = np.sqrt(np.clip(system.values, 0.0, None))
    right = system.basis
    cutoff = 1e-12 * (singulars[0] if singulars[0] > 0.0 else 1.0)
    left = np.zeros((n, n), dtype=complex)
    for i in range(n):
        if singulars[i] > cutoff:
            left[:, i] = (x @ right[:, i]) / singulars[i]
    left = _reorthonormalize(left)
    return SvdSystem(left=left, singulars=singulars, right=right)


def _reorthonormalize(w: np.ndarray) -> np.ndarray:
    """Re-orthonormalize columns, preserving well-conditioned ones.

    QR with a column-phase fix: for nearly unitary w this returns w up to
    roundoff, while zero or degenerate columns (rank-deficient inputs) get
    completed to an orthonormal basis.
    """
    q, r = np.linalg.qr(w)
    diag = np.diagonal(r)
    absd = np.abs(diag)
    phases = np.where(absd > 0.0, diag / np.maximum(absd, 1e-300), 1.0)
    return q * phases


def polar(x) -> PolarFactors:
    """Polar decomposition X = U |X| with U = left @ right* from the SVD.

    For singular X the unitary factor is not unique; this fixed choice
    keeps results reproducible.
    """
    system = svd(x)
    unitary = system.left @ system.right.conj().T
    modulus = hermitian_part(
        (system.right * system.singulars) @ system.right.conj().T
    )
    return PolarFactors(unitary=unitary, modulus=modulus)


def _pd_threshold(scale: float) -> float:
    return 1e-10 * max(1.0, scale)


def psd_power(p, alpha: float, tol: float = DEFAULT_TOL) -> np.ndarray:
    """p**alpha for PSD Hermitian p via the eigendecomposition.

    Eigenvalues in [-tol*scale, 0) are clamped to zero; anything lower is
    a genuine failure.  Negative alpha requires strict positivity.
    """
    p = to_hermitian(p)
    system = herm_eig(p)
    scale = max(1.0, float(np.linalg.norm(p)))
    smallest = float(system.values[-1])
    if smallest < -tol * scale:
        raise NotPSDError(
            f"matrix is not PSD: min eigenvalue {smallest:.3e}",
            min_eigenvalue=smallest,
            witness=system.basis[:, -1].copy(),
        )
    values = np.clip(system.values, 0.0, None)
    if alpha < 0 and values[-1] <= _pd_threshold(scale):
        raise NotPDError(
            f"matrix is not PD: min eigenvalue {smallest:.3e}",
            min_eigenvalue=smallest,
        )
    powered = values**alpha
    return hermitian_part((system.basis * powered) @ system.basis.conj().T)


def psd_sqrt(p, tol: float = DEFAULT_TOL) -> np.ndarray:
    """PSD square root; see psd_power for the clamping contract."""
    return psd_power(p, 0.5, tol=tol)


def pd_inverse(p) -> np.ndarray:
    """Inverse of a positive definite matrix via the eigendecomposition."""
    p = to_hermitian(p)
    system = herm_eig(p)
    smallest = float(system.values[-1])
    if smallest <= _pd_threshold(float(np.linalg.norm(p))):
        raise NotPDError(
            f"matrix is not PD: min eigenvalue {smallest:.3e}",
            min_eigenvalue=smallest,
        )
    return hermitian_part(
        (system.basis / system.values) @ system.basis.conj().T
    )


def geometric_mean(a, b, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Geometric mean of positive matrices:

        a^(1/2) (a^(-1/2) b a^(-1/2))^(1/2) a^(1/2)

    a must be strictly PD; b may touch the PSD boundary, in which case the
    result is PSD but the inverse-free identities only hold approximately.
    """
    a = to_hermitian(a)
    b = to_hermitian(b)
    if a.shape != b.shape:
        raise ValueError("geometric mean needs matrices of equal dimension")
    root = psd_power(a, 0.5, tol=tol)
    inv_root = psd_power(a, -0.5, tol=tol)
    inner = hermitian_part(inv_root @ b @ inv_root)
    middle = psd_sqrt(inner, tol=tol)
    return hermitian_part(root @ middle @ root)


def geometric_mean_reg(a, b, eps: float, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Geometric mean of (a + eps*I, b + eps*I), for boundary inputs."""
    a = to_hermitian(a)
    eye = np.eye(a.shape[0])
    return geometric_mean(a + eps * eye, to_hermitian(b) + eps * eye, tol=tol)


def frac_power_quarter_half(x, y, tol: float = DEFAULT_TOL) -> np.ndarray:
    """y^(1/4) x^(1/2) y^(1/4) for PSD x, y (Hermitian PSD result)."""
    quarter = psd_power(y, 0.25, tol=tol)
    half = psd_power(x, 0.5, tol=tol)
    return hermitian_part(quarter @ half @ quarter)


def loewner_leq(
    m,
    n,
    tol: float = DEFAULT_TOL,
    name: str = "loewner",
    lhs: str = "M",
    rhs: str = "N",
) -> Certificate:
    """Certify m <= n in the Loewner order.

    The gap is the smallest eigenvalue of n - m; the witness eigenvector
    lets a failure be re-checked with one Rayleigh quotient.
    """
    m = to_hermitian(m)
    n = to_hermitian(n)
    if m.shape != n.shape:
        raise ValueError("Loewner comparison needs equal dimensions")
    diff = hermitian_part(n - m)
    gap, witness = min_eig_witness(diff)
    scale = max(1.0, float(np.linalg.norm(diff)))
    return gap_certificate(
        name=name, lhs=lhs, rhs=rhs, gap=gap, tol=tol, scale=scale, witness=witness
    )
