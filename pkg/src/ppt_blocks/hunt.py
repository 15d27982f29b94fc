"""Search for PPT blocks violating s_j(X) <= s_j((A+B)/2).

That inequality fails in general for j >= 2 (only the half-index version
holds), but no concrete counterexample is fixed here, so the hunt samples
PPT blocks from both generators, tracks the violation ratio, and refines
the best candidate by hill climbing on the corner block.  A hit is only
reported after two independent confirmations: the eigensolver re-run at
tightened settings, and an arithmetic certificate built from Gershgorin
bounds on small compressions (no eigensolver trust required).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .blocks import Block2x2, assemble, partial_transpose
from .errors import BudgetExhaustedError
from .sampling import SampleSpec, child_seed, generator, random_ppt_rejection, random_ppt_separable
from .verify import STRICT_PPT_TOL
from . import linalg

HUNT_METHODS = ("ppt_separable", "ppt_rejection")


@dataclass
class HuntReport:
    j: int
    n: int
    tol: float
    budget: int
    tested: int
    best_ratio: float
    best_block: Block2x2 | None
    hit: bool
    hit_block: Block2x2 | None = None
    hit_details: dict | None = None
    climb_accepted: int = 0
    methods: tuple[str, ...] = HUNT_METHODS

    def to_dict(self) -> dict:
        from .jsonio import block_to_dict

        out = {
            "kind": "hunt_report",
            "j": self.j,
            "n": self.n,
            "tol": self.tol,
            "budget": self.budget,
            "tested": self.tested,
            "best_ratio": self.best_ratio,
            "hit": self.hit,
            "climb_accepted": self.climb_accepted,
            "methods": list(self.methods),
        }
        if self.best_block is not None:
            out["best_block"] = block_to_dict(self.best_block)
        if self.hit_block is not None:
            out["hit_block"] = block_to_dict(self.hit_block)
        if self.hit_details is not None:
            out["hit_details"] = self.hit_details
        return out


def _gershgorin_min(c: np.ndarray) -> float:
    radii = np.sum(np.abs(c), axis=1) - np.abs(np.diagonal(c))
    return float(np.min(np.diagonal(c).real - radii))


def _gershgorin_max(c: np.ndarray) -> float:
    radii = np.sum(np.abs(c), axis=1) - np.abs(np.diagonal(c))
    return float(np.max(np.diagonal(c).real + radii))


def independent_violation_check(block: Block2x2, j: int, tol: float = 1e-8) -> dict:
    """Certify s_j(X) > s_j((A+B)/2) without trusting any eigensolver.

    Candidate subspaces come from LAPACK (numpy), but the certified bounds
    are plain arithmetic: for any j orthonormal columns V,
    s_j(X)^2 >= lambda_min((XV)*(XV)), and for any n-j+1 orthonormal
    columns W, s_j(M) <= lambda_max(W* M W); both compressions are
    bounded by Gershgorin discs.
    """
    x = block.x
    n = block.n
    if not 1 <= j <= n:
        raise ValueError(f"j={j} out of range for dimension {n}")
    m = linalg.hermitian_part((block.a + block.b) / 2)

    _, _, vh = np.linalg.svd(x)
    v = vh.conj().T[:, :j]
    xv = x @ v
    lower_sq = _gershgorin_min(xv.conj().T @ xv)
    lower = float(np.sqrt(max(0.0, lower_sq)))
    orth_v = float(np.linalg.norm(v.conj().T @ v - np.eye(j)))

    w_vals, w_vecs = np.linalg.eigh(m)
    w = w_vecs[:, : n - j + 1]  # ascending order: the n-j+1 smallest
    upper = _gershgorin_max(w.conj().T @ m @ w)
    orth_w = float(np.linalg.norm(w.conj().T @ w - np.eye(n - j + 1)))

    scale = max(1.0, float(w_vals[-1]))
    margin = lower - upper
    certified = (
        margin > 10.0 * tol * scale
        and orth_v < 1e-12
        and orth_w < 1e-12
    )
    return {
        "certified": bool(certified),
        "sj_x_lower": lower,
        "sj_mean_upper": upper,
        "margin": float(margin),
        "scale": scale,
        "witness_orthonormality": {"right_sv": orth_v, "eigvecs": orth_w},
    }


def _sj_values(block: Block2x2, tol: float = linalg.EIG_CONVERGENCE_TOL, sweeps: int = linalg.MAX_SWEEPS):
    sv_x = np.sqrt(
        np.clip(
            linalg.herm_eig(
                linalg.hermitian_part(block.x.conj().T @ block.x), tol=tol, max_sweeps=sweeps
            ).values,
            0.0,
            None,
        )
    )
    mean = linalg.hermitian_part((block.a + block.b) / 2)
    sv_m = np.clip(linalg.herm_eig(mean, tol=tol, max_sweeps=sweeps).values, 0.0, None)
    return sv_x, sv_m


def _is_strictly_ppt(block: Block2x2) -> bool:
    h = assemble(block)
    ht = assemble(partial_transpose(block))
    gap = min(linalg.min_eig(h), linalg.min_eig(ht))
    return gap >= -STRICT_PPT_TOL * max(1.0, float(np.linalg.norm(h)))


def _confirm_hit(block: Block2x2, j: int, tol: float) -> dict | None:
    """Tightened eigensolver pass plus the arithmetic certificate."""
    sv_x, sv_m = _sj_values(block, tol=1e-15, sweeps=60)
    scale = max(1.0, float(sv_m[0]))
    if sv_x[j - 1] - sv_m[j - 1] <= 10.0 * tol * scale:
        return None
    details = independent_violation_check(block, j, tol=tol)
    if not details["certified"]:
        return None
    details["sj_x_tightened"] = float(sv_x[j - 1])
    details["sj_mean_tightened"] = float(sv_m[j - 1])
    return details


def hunt_sj_counterexample(
    spec: SampleSpec,
    j: int,
    tol: float = linalg.DEFAULT_TOL,
    methods: tuple[str, ...] = HUNT_METHODS,
    climb_steps: int = 2000,
) -> HuntReport:
    """Random search over PPT blocks followed by hill climbing on X.

    spec.count is the random-search budget.  Exhausting it without a
    certified violation is a valid outcome; the report then carries the
    best ratio seen.
    """
    n = spec.n
    if not 1 <= j <= n:
        raise ValueError(f"j={j} out of range for dimension {n}")
    best_ratio = -np.inf
    best_block = None
    tested = 0
    tiny = 1e-300

    for index in range(spec.count):
        seed = child_seed(spec.seed, index)
        method = methods[index % len(methods)]
        try:
            if method == "ppt_separable":
                block = random_ppt_separable(n, seed, r=spec.r)
            else:
                block, _ = random_ppt_rejection(n, seed, budget=spec.budget)
        except BudgetExhaustedError:
            continue
        tested += 1
        sv_x, sv_m = _sj_values(block)
        ratio = float(sv_x[j - 1] / max(sv_m[j - 1], tiny))
        if ratio > best_ratio:
            best_ratio = ratio
            best_block = block
        scale = max(1.0, float(sv_m[0]))
        if sv_x[j - 1] - sv_m[j - 1] > 10.0 * tol * scale:
            details = _confirm_hit(block, j, tol)
            if details is not None:
                return HuntReport(
                    j=j,
                    n=n,
                    tol=tol,
                    budget=spec.count,
                    tested=tested,
                    best_ratio=ratio,
                    best_block=block,
                    hit=True,
                    hit_block=block,
                    hit_details=details,
                    methods=methods,
                )

    accepted = 0
    if best_block is not None and climb_steps > 0:
        rng = generator(child_seed(spec.seed, spec.count + 1))
        current = best_block
        current_ratio = best_ratio
        sigma = 0.05 * max(float(np.linalg.norm(current.x)), 1e-3)
        stale = 0
        for _ in range(climb_steps):
            x = current.x.copy()
            row = rng.integers(0, n)
            col = rng.integers(0, n)
            bump = sigma * (rng.standard_normal() + 1j * rng.standard_normal())
            x[row, col] += bump
            candidate = Block2x2(a=current.a, x=x, b=current.b)
            tested += 1
            if not _is_strictly_ppt(candidate):
                stale += 1
            else:
                sv_x, sv_m = _sj_values(candidate)
                ratio = float(sv_x[j - 1] / max(sv_m[j - 1], tiny))
                if ratio > current_ratio:
                    current, current_ratio = candidate, ratio
                    accepted += 1
                    stale = 0
                    scale = max(1.0, float(sv_m[0]))
                    if sv_x[j - 1] - sv_m[j - 1] > 10.0 * tol * scale:
                        details = _confirm_hit(candidate, j, tol)
                        if details is not None:
                            return HuntReport(
                                j=j,
                                n=n,
                                tol=tol,
                                budget=spec.count,
                                tested=tested,
                                best_ratio=current_ratio,
                                best_block=current,
                                hit=True,
                                hit_block=candidate,
                                hit_details=details,
                                climb_accepted=accepted,
                                methods=methods,
                            )
                else:
                    stale += 1
            if stale >= 50:
                sigma = max(sigma * 0.5, 1e-6)
                stale = 0
        best_ratio = current_ratio
        best_block = current

    if not np.isfinite(best_ratio):
        best_ratio = 0.0  # nothing was tested
    return HuntReport(
        j=j,
        n=n,
        tol=tol,
        budget=spec.count,
        tested=tested,
        best_ratio=float(best_ratio),
        best_block=best_block,
        hit=False,
        climb_accepted=accepted,
        methods=methods,
    )


def replay_violation(block: Block2x2, j: int, tol: float = linalg.DEFAULT_TOL) -> dict:
    """Re-certify a stored violating block through the arithmetic check."""
    return independent_violation_check(block, j, tol=tol)
