"""Matrix functionals: unitarily invariant norms, singular value and
eigenvalue products, trace, determinant, spectral radius.

All of them are monotone on the PSD cone and satisfy a Cauchy-Schwarz
style inequality |L(X*Y)|^2 <= L(X*X) L(Y*Y); the campaign checkers in
this module verify both numerically on sampled inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .certificates import (
    Certificate,
    Link,
    chain_certificate,
    scalar_certificate,
    scalar_link,
)
from .errors import NotPSDError
from . import linalg

TRACE = "trace"
DETERMINANT = "determinant"
SPECTRAL_RADIUS = "spectral_radius"
ELEM_SYM_EIG = "elem_sym_eig"
TOP_K_SINGULAR_PRODUCT = "top_k_singular_product"
KY_FAN_NORM = "ky_fan_norm"
SCHATTEN_NORM = "schatten_norm"
FROBENIUS = "frobenius"
OPERATOR_NORM = "operator_norm"

_NORM_KINDS = {KY_FAN_NORM, SCHATTEN_NORM, FROBENIUS, OPERATOR_NORM}
# Kinds evaluated from the eigenvalues of a Hermitian argument; general
# non-normal eigenvalues are out of scope here.
_EIG_KINDS = {SPECTRAL_RADIUS, ELEM_SYM_EIG}


@dataclass(frozen=True)
class Functional:
    kind: str
    k: int | None = None
    p: float | None = None

    @property
    def label(self) -> str:
        if self.kind == KY_FAN_NORM:
            return f"kyfan:{self.k}"
        if self.kind == SCHATTEN_NORM:
            return "schatten:inf" if math.isinf(self.p) else f"schatten:{self.p:g}"
        if self.kind == TOP_K_SINGULAR_PRODUCT:
            return f"prod-sv:{self.k}"
        if self.kind == ELEM_SYM_EIG:
            return f"esym:{self.k}"
        return {
            TRACE: "trace",
            DETERMINANT: "det",
            SPECTRAL_RADIUS: "specrad",
            FROBENIUS: "fro",
            OPERATOR_NORM: "opnorm",
        }[self.kind]

    @property
    def is_norm(self) -> bool:
        return self.kind in _NORM_KINDS

    @property
    def unitarily_invariant(self) -> bool:
        # trace / det / specrad / esym are invariant under U* M U, which is
        # what the geometric-mean verifiers need; the norms and singular
        # value products are invariant under arbitrary U M V.
        return True

    @property
    def two_sided_invariant(self) -> bool:
        return self.kind in _NORM_KINDS or self.kind == TOP_K_SINGULAR_PRODUCT

    def __str__(self) -> str:
        return self.label


def trace() -> Functional:
    return Functional(TRACE)


def determinant() -> Functional:
    return Functional(DETERMINANT)


def spectral_radius() -> Functional:
    return Functional(SPECTRAL_RADIUS)


def elem_sym_eig(k: int) -> Functional:
    return Functional(ELEM_SYM_EIG, k=int(k))


def top_k_singular_product(k: int) -> Functional:
    return Functional(TOP_K_SINGULAR_PRODUCT, k=int(k))


def ky_fan_norm(k: int) -> Functional:
    return Functional(KY_FAN_NORM, k=int(k))


def schatten_norm(p: float) -> Functional:
    p = float(p)
    if p < 1.0:
        raise ValueError(f"Schatten norms need p >= 1, got {p}")
    return Functional(SCHATTEN_NORM, p=p)


def frobenius_norm() -> Functional:
    return Functional(FROBENIUS)


def operator_norm() -> Functional:
    return Functional(OPERATOR_NORM)


def parse_functional(spec: str) -> Functional:
    """Parse CLI identifiers such as "trace", "det", "kyfan:2",
    "schatten:inf", "prod-sv:1", "specrad", "esym:2", "fro", "opnorm"."""
    spec = spec.strip().lower()
    plain = {
        "trace": trace,
        "det": determinant,
        "specrad": spectral_radius,
        "fro": frobenius_norm,
        "opnorm": operator_norm,
    }
    if spec in plain:
        return plain[spec]()
    if ":" in spec:
        head, _, arg = spec.partition(":")
        if head == "kyfan":
            return ky_fan_norm(int(arg))
        if head == "schatten":
            return schatten_norm(float("inf") if arg == "inf" else float(arg))
        if head == "prod-sv":
            return top_k_singular_product(int(arg))
        if head == "esym":
            return elem_sym_eig(int(arg))
    raise ValueError(f"unknown functional specifier: {spec!r}")


def _check_k(k: int | None, n: int) -> int:
    if k is None or not 1 <= k <= n:
        raise ValueError(f"index k={k} out of range for dimension {n}")
    return k


def evaluate_from_singulars(f: Functional, s: np.ndarray) -> float:
    """Evaluate a singular-value based functional from a descending
    spectrum, without touching the matrix again."""
    n = len(s)
    if f.kind == KY_FAN_NORM:
        return float(np.sum(s[: _check_k(f.k, n)]))
    if f.kind == OPERATOR_NORM:
        return float(s[0])
    if f.kind == FROBENIUS:
        return float(np.sqrt(np.sum(s**2)))
    if f.kind == SCHATTEN_NORM:
        if math.isinf(f.p):
            return float(s[0])
        return float(np.sum(s**f.p) ** (1.0 / f.p))
    if f.kind == TOP_K_SINGULAR_PRODUCT:
        return float(np.prod(s[: _check_k(f.k, n)]))
    raise ValueError(f"{f.kind} is not a singular-value functional")


def evaluate_psd_spectrum(f: Functional, s: np.ndarray) -> float:
    """Evaluate any functional on a PSD matrix given its descending
    spectrum (eigenvalues equal singular values there)."""
    s = np.clip(np.asarray(s, dtype=float), 0.0, None)
    n = len(s)
    if f.kind == TRACE:
        return float(np.sum(s))
    if f.kind == DETERMINANT:
        return float(np.prod(s))
    if f.kind == SPECTRAL_RADIUS:
        return float(s[0])
    if f.kind == ELEM_SYM_EIG:
        return float(np.prod(s[: _check_k(f.k, n)]))
    return evaluate_from_singulars(f, s)


def evaluate(f: Functional, m) -> float | complex:
    """Evaluate the functional on a square complex matrix.

    Returns a float whenever the value is real up to roundoff; trace and
    determinant of genuinely complex-valued inputs come back complex.
    """
    m = linalg.as_square_matrix(m)
    n = m.shape[0]
    if f.kind == TRACE:
        return _tidy(np.trace(m))
    if f.kind == DETERMINANT:
        # LU with partial pivoting underneath
        return _tidy(np.linalg.det(m))
    if f.kind == FROBENIUS:
        return float(np.linalg.norm(m))
    if f.kind in _EIG_KINDS:
        values = linalg.herm_eig(m).values  # rejects non-Hermitian input
        by_modulus = values[np.argsort(-np.abs(values), kind="stable")]
        if f.kind == SPECTRAL_RADIUS:
            return float(abs(by_modulus[0]))
        return float(np.prod(by_modulus[: _check_k(f.k, n)]))
    return evaluate_from_singulars(f, linalg.svd(m).singulars)


def _tidy(value: complex) -> float | complex:
    value = complex(value)
    if abs(value.imag) <= 1e-10 * (1.0 + abs(value)):
        return float(value.real)
    return value


def check_lieb_axioms(f: Functional, samples, tol: float = linalg.DEFAULT_TOL) -> Certificate:
    """Campaign check of monotonicity on PSD pairs and the Cauchy-Schwarz
    inequality |L(X*Y)|^2 <= L(X*X) L(Y*Y).

    samples is a SampleSpec; its n / seed / count drive the draw.  For the
    eigenvalue-based functionals the Cauchy-Schwarz pairs are sampled from
    a commuting family, since non-normal eigenvalues are out of scope.
    """
    from . import sampling  # local import keeps module load cheap

    if samples.count < 1:
        raise ValueError("axiom campaign needs at least one sample")
    worst_mono: Link | None = None
    worst_cs: Link | None = None
    for i in range(samples.count):
        seed_a = sampling.child_seed(samples.seed, 2 * i)
        seed_b = sampling.child_seed(samples.seed, 2 * i + 1)
        x = sampling.random_psd(samples.n, seed_a)
        growth = sampling.random_psd(samples.n, seed_b)
        y = linalg.hermitian_part(x + growth)
        base = abs(evaluate(f, x))
        mono = scalar_link(f"monotone[{i}]", base, abs(evaluate(f, y)), tol)
        if worst_mono is None or mono.slack < worst_mono.slack:
            worst_mono = mono

        if f.kind in _EIG_KINDS:
            q = sampling.random_unitary(samples.n, seed_a)
            rng = sampling.generator(seed_b)
            u = linalg.hermitian_part(q @ np.diag(rng.random(samples.n) + 0.1) @ q.conj().T)
            v = linalg.hermitian_part(q @ np.diag(rng.random(samples.n) + 0.1) @ q.conj().T)
        else:
            u = sampling.random_ginibre(samples.n, seed_a)
            v = sampling.random_ginibre(samples.n, seed_b)
        lhs = abs(evaluate(f, u.conj().T @ v)) ** 2
        rhs = abs(evaluate(f, u.conj().T @ u)) * abs(evaluate(f, v.conj().T @ v))
        cs = scalar_link(f"cauchy_schwarz[{i}]", lhs, rhs, tol)
        if worst_cs is None or cs.slack / cs.scale < worst_cs.slack / worst_cs.scale:
            worst_cs = cs
    return chain_certificate(
        name=f"lieb_axioms[{f.label}]",
        lhs="worst sampled axiom slack",
        rhs="0",
        links=(worst_mono, worst_cs),
        tol=tol,
    )


def check_block_lieb(f: Functional, block, tol: float = linalg.DEFAULT_TOL) -> Certificate:
    """For a PSD block [[A, X], [X*, B]]: |L(X)|^2 <= L(A) L(B)."""
    from .blocks import assemble  # deferred to avoid an import cycle

    h = assemble(block)
    smallest = linalg.min_eig(h)
    scale = max(1.0, float(np.linalg.norm(h)))
    if smallest < -tol * scale:
        raise NotPSDError(
            f"block is not PSD: min eigenvalue {smallest:.3e}",
            min_eigenvalue=smallest,
        )
    lhs = abs(evaluate(f, block.x)) ** 2
    rhs = abs(evaluate(f, block.a)) * abs(evaluate(f, block.b))
    return scalar_certificate(
        name=f"block_lieb[{f.label}]",
        lhs="|L(X)|^2",
        rhs="L(A) L(B)",
        lhs_value=lhs,
        rhs_value=rhs,
        tol=tol,
    )


def check_gm_lieb(f: Functional, x, y, tol: float = linalg.DEFAULT_TOL) -> Certificate:
    """L(X # Y) <= sqrt(L(X) L(Y)) for positive definite X, Y."""
    mean = linalg.geometric_mean(x, y, tol=tol)
    lhs = abs(evaluate(f, mean))
    rhs = math.sqrt(abs(evaluate(f, x)) * abs(evaluate(f, y)))
    return scalar_certificate(
        name=f"gm_lieb[{f.label}]",
        lhs="L(X#Y)",
        rhs="sqrt(L(X) L(Y))",
        lhs_value=lhs,
        rhs_value=rhs,
        tol=tol,
    )
