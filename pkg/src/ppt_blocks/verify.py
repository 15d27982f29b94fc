"""One verifier per inequality satisfied by PPT blocks.

Every verifier consumes a Block2x2, checks its preconditions (PPT at a
strict tolerance, positive definite diagonal blocks), and emits a single
Certificate.  Chained inequalities are certified link by link so a
failure localizes to one claim.

A BlockContext caches the spectra and derived matrices that the
verifiers share (the geometric mean of the diagonal, the polar factors
of the corner, singular values of the comparison expressions), so
running the whole battery costs little more than running one verifier.
"""

from __future__ import annotations

from functools import cached_property

import numpy as np

from .blocks import Block2x2, assemble, cartesian_parts, partial_transpose
from .certificates import (
    Certificate,
    Link,
    chain_certificate,
    gap_certificate,
)
from .errors import NotPDError, NotPPTError
from .functionals import Functional, evaluate_from_singulars, evaluate_psd_spectrum
from . import linalg

STRICT_PPT_TOL = 1e-10

# Floor for log-space singular value products.
_LOG_FLOOR = 1e-300


def _herm_singulars(values: np.ndarray) -> np.ndarray:
    """Singular values of a Hermitian matrix from its eigenvalues."""
    return np.sort(np.abs(values))[::-1]


def _psd_spectrum(values: np.ndarray) -> np.ndarray:
    """Descending nonnegative spectrum of a numerically PSD matrix."""
    return np.clip(values, 0.0, None)


class BlockContext:
    """Shared, lazily computed data for one block under verification."""

    def __init__(self, block: Block2x2, strict_tol: float = STRICT_PPT_TOL):
        self.block = block
        self.strict_tol = strict_tol

    @classmethod
    def ensure(cls, block: Block2x2, ctx: "BlockContext | None") -> "BlockContext":
        return ctx if ctx is not None else cls(block)

    @property
    def n(self) -> int:
        return self.block.n

    @cached_property
    def h(self) -> np.ndarray:
        return assemble(self.block)

    @cached_property
    def h_tau(self) -> np.ndarray:
        return assemble(partial_transpose(self.block))

    @cached_property
    def eig_h(self) -> linalg.EigenSystem:
        return linalg.herm_eig(self.h)

    @cached_property
    def eig_h_tau(self) -> linalg.EigenSystem:
        return linalg.herm_eig(self.h_tau)

    @cached_property
    def ppt_gap(self) -> float:
        return float(min(self.eig_h.values[-1], self.eig_h_tau.values[-1]))

    @cached_property
    def ppt_scale(self) -> float:
        return max(1.0, float(np.linalg.norm(self.h)))

    @cached_property
    def eig_a(self) -> linalg.EigenSystem:
        return linalg.herm_eig(self.block.a)

    @cached_property
    def eig_b(self) -> linalg.EigenSystem:
        return linalg.herm_eig(self.block.b)

    @cached_property
    def gm(self) -> np.ndarray:
        return linalg.geometric_mean(self.block.a, self.block.b)

    @cached_property
    def eig_gm(self) -> linalg.EigenSystem:
        return linalg.herm_eig(self.gm)

    @cached_property
    def sv_gm(self) -> np.ndarray:
        return _psd_spectrum(self.eig_gm.values)

    @cached_property
    def svd_x(self) -> linalg.SvdSystem:
        return linalg.svd(self.block.x)

    @cached_property
    def sv_x(self) -> np.ndarray:
        return self.svd_x.singulars

    @cached_property
    def polar_unitary(self) -> np.ndarray:
        system = self.svd_x
        return system.left @ system.right.conj().T

    @cached_property
    def modulus_x(self) -> np.ndarray:
        system = self.svd_x
        return linalg.hermitian_part(
            (system.right * system.singulars) @ system.right.conj().T
        )

    @cached_property
    def rotated_gm(self) -> np.ndarray:
        u = self.polar_unitary
        return linalg.hermitian_part(u.conj().T @ self.gm @ u)

    @cached_property
    def rhs_main(self) -> np.ndarray:
        return linalg.geometric_mean(self.gm, self.rotated_gm)

    @cached_property
    def rhs_lee(self) -> np.ndarray:
        return linalg.hermitian_part((self.gm + self.rotated_gm) / 2)

    @cached_property
    def half_sum(self) -> np.ndarray:
        return linalg.hermitian_part((self.block.a + self.block.b) / 2)

    @cached_property
    def sv_half_sum(self) -> np.ndarray:
        return _psd_spectrum(linalg.herm_eig(self.half_sum).values)

    def _power_from_eig(self, system: linalg.EigenSystem, alpha: float) -> np.ndarray:
        values = _psd_spectrum(system.values) ** alpha
        return linalg.hermitian_part((system.basis * values) @ system.basis.conj().T)

    @cached_property
    def sqrt_a(self) -> np.ndarray:
        return self._power_from_eig(self.eig_a, 0.5)

    @cached_property
    def sqrt_b(self) -> np.ndarray:
        return self._power_from_eig(self.eig_b, 0.5)

    @cached_property
    def sv_root_product(self) -> np.ndarray:
        # singular values of sqrt(A) sqrt(B) via the PSD matrix
        # sqrt(B) A sqrt(B)
        inner = linalg.hermitian_part(self.sqrt_b @ self.block.a @ self.sqrt_b)
        return np.sqrt(_psd_spectrum(linalg.herm_eig(inner).values))

    @cached_property
    def sv_quarter_form(self) -> np.ndarray:
        # spectrum of B^(1/4) A^(1/2) B^(1/4)
        quarter = self._power_from_eig(self.eig_b, 0.25)
        form = linalg.hermitian_part(quarter @ self.sqrt_a @ quarter)
        return _psd_spectrum(linalg.herm_eig(form).values)

    @cached_property
    def sv_h(self) -> np.ndarray:
        return _herm_singulars(self.eig_h.values)

    def require_ppt(self) -> None:
        if self.ppt_gap < -self.strict_tol * self.ppt_scale:
            raise NotPPTError(
                f"block is not PPT: gap {self.ppt_gap:.3e} at scale {self.ppt_scale:.3e}",
                gap=self.ppt_gap,
            )

    def require_pd_diagonal(self) -> None:
        for label, system, m in (
            ("A", self.eig_a, self.block.a),
            ("B", self.eig_b, self.block.b),
        ):
            smallest = float(system.values[-1])
            if smallest <= 1e-10 * max(1.0, float(np.linalg.norm(m))):
                raise NotPDError(
                    f"diagonal block {label} is not PD: min eigenvalue {smallest:.3e}",
                    min_eigenvalue=smallest,
                )


def _prepared(block, ctx) -> BlockContext:
    ctx = BlockContext.ensure(block, ctx)
    ctx.require_ppt()
    ctx.require_pd_diagonal()
    return ctx


def verify_main(block: Block2x2, tol: float = linalg.DEFAULT_TOL, ctx=None) -> Certificate:
    """|X| <= (A # B) # U*(A # B)U with U the polar unitary of X."""
    ctx = _prepared(block, ctx)
    cert = linalg.loewner_leq(
        ctx.modulus_x,
        ctx.rhs_main,
        tol=tol,
        name="main",
        lhs="|X|",
        rhs="(A#B) # U*(A#B)U",
    )
    return cert


def verify_lee(block: Block2x2, tol: float = linalg.DEFAULT_TOL, ctx=None) -> Certificate:
    """|X| <= (A # B + U*(A # B)U) / 2, the arithmetic-mean bound.

    Also records that the geometric-mean bound sits below this one, which
    is what makes it the stronger statement.
    """
    ctx = _prepared(block, ctx)
    base = linalg.loewner_leq(
        ctx.modulus_x,
        ctx.rhs_lee,
        tol=tol,
        name="lee",
        lhs="|X|",
        rhs="(A#B + U*(A#B)U)/2",
    )
    comparison = linalg.loewner_leq(ctx.rhs_main, ctx.rhs_lee, tol=tol)
    links = (
        Link(
            "gm_bound<=am_bound",
            0.0,
            comparison.gap,
            comparison.gap,
            comparison.scale,
            comparison.passed,
        ),
    )
    return gap_certificate(
        name="lee",
        lhs=base.lhs,
        rhs=base.rhs,
        gap=base.gap,
        tol=tol,
        scale=base.scale,
        witness=base.witness,
        links=links,
    )


def verify_lieb_gm(
    block: Block2x2, functional: Functional, tol: float = linalg.DEFAULT_TOL, ctx=None
) -> Certificate:
    """L(|X|) <= L(A # B) for a unitarily invariant functional."""
    if not functional.unitarily_invariant:
        raise ValueError(f"{functional} is not unitarily invariant")
    ctx = _prepared(block, ctx)
    lhs = evaluate_psd_spectrum(functional, ctx.sv_x)
    rhs = evaluate_psd_spectrum(functional, ctx.sv_gm)
    link = _leq_link("L(|X|)<=L(A#B)", lhs, rhs, tol)
    return chain_certificate(
        name=f"lieb_gm[{functional.label}]",
        lhs="L(|X|)",
        rhs="L(A#B)",
        links=(link,),
        tol=tol,
    )


def verify_norm_chain(
    block: Block2x2, norm: Functional, tol: float = linalg.DEFAULT_TOL, ctx=None
) -> Certificate:
    """||X|| <= ||A#B|| <= ||sqrt(A)sqrt(B)|| <= ||A+B|| / 2."""
    if not norm.two_sided_invariant:
        raise ValueError(f"{norm} is not a unitarily invariant norm")
    ctx = _prepared(block, ctx)
    v_x = evaluate_from_singulars(norm, ctx.sv_x)
    v_gm = evaluate_psd_spectrum(norm, ctx.sv_gm)
    v_root = evaluate_from_singulars(norm, ctx.sv_root_product)
    v_half = evaluate_psd_spectrum(norm, 2.0 * ctx.sv_half_sum) / 2.0
    links = (
        _leq_link("norm(X)<=norm(A#B)", v_x, v_gm, tol),
        _leq_link("norm(A#B)<=norm(rootA rootB)", v_gm, v_root, tol),
        _leq_link("norm(rootA rootB)<=norm(A+B)/2", v_root, v_half, tol),
    )
    return chain_certificate(
        name=f"norm_chain[{norm.label}]",
        lhs="norm(X)",
        rhs="norm(A+B)/2",
        links=links,
        tol=tol,
    )


def verify_trace_chain(block: Block2x2, tol: float = linalg.DEFAULT_TOL, ctx=None) -> Certificate:
    """tr(X*X) <= tr((A#B)^2) <= tr(AB) <= tr((A+B)^2) / 2."""
    ctx = _prepared(block, ctx)
    t_x = float(np.linalg.norm(block.x)) ** 2
    t_gm = float(np.sum(ctx.sv_gm**2))
    t_ab = float(np.real(np.trace(block.a @ block.b)))
    t_sum = 0.5 * float(np.linalg.norm(block.a + block.b)) ** 2
    links = (
        _leq_link("tr(X*X)<=tr((A#B)^2)", t_x, t_gm, tol),
        _leq_link("tr((A#B)^2)<=tr(AB)", t_gm, t_ab, tol),
        _leq_link("tr(AB)<=tr((A+B)^2)/2", t_ab, t_sum, tol),
    )
    return chain_certificate(
        name="trace_chain", lhs="tr(X*X)", rhs="tr((A+B)^2)/2", links=links, tol=tol
    )


def verify_singular_product_chain(
    block: Block2x2, k: int, tol: float = linalg.DEFAULT_TOL, ctx=None
) -> Certificate:
    """Top-k singular value products, compared in log space:

    prod s_j(X) <= prod s_j(A#B) <= prod s_j(B^(1/4)A^(1/2)B^(1/4))
                <= prod s_j(A^(1/2)B^(1/2))
    """
    ctx = _prepared(block, ctx)
    if not 1 <= k <= ctx.n:
        raise ValueError(f"k={k} out of range for dimension {ctx.n}")

    def log_product(s: np.ndarray) -> float:
        return float(np.sum(np.log(np.maximum(s[:k], _LOG_FLOOR))))

    p_x = log_product(ctx.sv_x)
    p_gm = log_product(ctx.sv_gm)
    p_quarter = log_product(ctx.sv_quarter_form)
    p_root = log_product(ctx.sv_root_product)
    links = (
        _leq_link("log prod s(X)<=log prod s(A#B)", p_x, p_gm, tol),
        _leq_link("log prod s(A#B)<=log prod s(quarter form)", p_gm, p_quarter, tol),
        _leq_link("log prod s(quarter form)<=log prod s(rootA rootB)", p_quarter, p_root, tol),
    )
    return chain_certificate(
        name=f"singular_product[k={k}]",
        lhs="log prod s_j(X)",
        rhs="log prod s_j(rootA rootB)",
        links=links,
        tol=tol,
    )


def verify_half_index(block: Block2x2, tol: float = linalg.DEFAULT_TOL, ctx=None) -> Certificate:
    """s_j(X) <= s_m(A#B) <= s_m((A+B)/2) with m = floor((j+1)/2)."""
    ctx = _prepared(block, ctx)
    links = []
    for j in range(1, ctx.n + 1):
        m = (j + 1) // 2
        links.append(
            _leq_link(f"s_{j}(X)<=s_{m}(A#B)", ctx.sv_x[j - 1], ctx.sv_gm[m - 1], tol)
        )
        links.append(
            _leq_link(
                f"s_{m}(A#B)<=s_{m}((A+B)/2)",
                ctx.sv_gm[m - 1],
                ctx.sv_half_sum[m - 1],
                tol,
            )
        )
    return chain_certificate(
        name="half_index",
        lhs="s_j(X)",
        rhs="s_floor((j+1)/2)((A+B)/2)",
        links=tuple(links),
        tol=tol,
    )


def verify_hiroshima(
    block: Block2x2, norm: Functional, tol: float = linalg.DEFAULT_TOL, ctx=None
) -> Certificate:
    """||H|| <= ||(A+B) (+) 0|| where (+) pads with a zero block so both
    sides live in dimension 2n."""
    if not norm.two_sided_invariant:
        raise ValueError(f"{norm} is not a unitarily invariant norm")
    ctx = BlockContext.ensure(block, ctx)
    ctx.require_ppt()
    lhs = evaluate_from_singulars(norm, ctx.sv_h)
    padded = np.concatenate([2.0 * ctx.sv_half_sum, np.zeros(ctx.n)])
    rhs = evaluate_from_singulars(norm, padded)
    return chain_certificate(
        name=f"hiroshima[{norm.label}]",
        lhs="norm(H)",
        rhs="norm(A+B (+) 0)",
        links=(_leq_link("norm(H)<=norm(A+B)", lhs, rhs, tol),),
        tol=tol,
    )


def verify_re_im(block: Block2x2, tol: float = linalg.DEFAULT_TOL, ctx=None) -> Certificate:
    """All four of +-Re(X) <= A#B and +-Im(X) <= A#B."""
    ctx = _prepared(block, ctx)
    re, im = cartesian_parts(block.x)
    parts = (("+re", re), ("-re", -re), ("+im", im), ("-im", -im))
    links = []
    worst_gap, worst_scale, worst_witness = np.inf, 1.0, None
    for label, part in parts:
        diff = linalg.hermitian_part(ctx.gm - part)
        gap, witness = linalg.min_eig_witness(diff)
        scale = max(1.0, float(np.linalg.norm(diff)))
        links.append(Link(f"{label}<=A#B", 0.0, gap, gap, scale, gap >= -tol * scale))
        if gap / scale < worst_gap / worst_scale:
            worst_gap, worst_scale, worst_witness = gap, scale, witness
    return gap_certificate(
        name="re_im",
        lhs="+-Re(X), +-Im(X)",
        rhs="A#B",
        gap=worst_gap,
        tol=tol,
        scale=worst_scale,
        witness=worst_witness,
        links=tuple(links),
    )


def verify_extremal_gm(
    x,
    y,
    tol: float = linalg.DEFAULT_TOL,
    perturbations: int = 10,
    eps_factor: float = 1e-3,
    seed: int = 0,
) -> Certificate:
    """The geometric mean is the largest Hermitian Z keeping
    [[X, Z], [Z, Y]] positive semidefinite.

    Certifies (a) the block is PSD at Z = X # Y and (b) pushing Z up by
    eps in any sampled PSD direction breaks positivity.  The combined gap
    is a margin: nonnegative exactly when every part holds.
    """
    from . import sampling  # deferred: sampling imports blocks

    x = linalg.to_hermitian(x)
    y = linalg.to_hermitian(y)
    g = linalg.geometric_mean(x, y, tol=tol)
    base_block = Block2x2(a=x, x=g, b=y)
    base = assemble(base_block)
    gap_a, witness = linalg.min_eig_witness(base)
    scale_a = max(1.0, float(np.linalg.norm(base)))
    links = [Link("psd_at_mean", 0.0, gap_a, gap_a, scale_a, gap_a >= -tol * scale_a)]
    margins = [gap_a + tol * scale_a]
    eps = eps_factor * max(float(np.linalg.norm(g)), 1e-12)
    n = x.shape[0]
    for i in range(perturbations):
        direction = sampling.random_psd(n, sampling.child_seed(seed, i))
        direction = direction / max(float(np.linalg.norm(direction)), 1e-300)
        bumped = assemble(Block2x2(a=x, x=g + eps * direction, b=y))
        gap_i = linalg.min_eig(bumped)
        scale_i = max(1.0, float(np.linalg.norm(bumped)))
        broke = gap_i < -tol * scale_i
        links.append(Link(f"perturb[{i}]_breaks_psd", gap_i, -tol * scale_i, -gap_i - tol * scale_i, scale_i, broke))
        margins.append(-gap_i - tol * scale_i)
    combined = float(min(margins))
    return Certificate(
        name="extremal_gm",
        lhs="X#Y maximality margin",
        rhs="0",
        gap=combined,
        tol=tol,
        scale=0.0,  # margin already folds the tolerance in
        passed=combined >= 0.0,
        marginal=abs(combined) < 10 * tol,
        witness=witness,
        links=tuple(links),
    )


def _leq_link(label: str, lhs: float, rhs: float, tol: float) -> Link:
    lhs = float(lhs)
    rhs = float(rhs)
    scale = max(1.0, abs(rhs))
    return Link(label, lhs, rhs, rhs - lhs, scale, rhs - lhs >= -tol * scale)
