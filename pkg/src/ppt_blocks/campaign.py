"""Campaign runner: verify batteries of inequalities over sampled or
file-supplied blocks, emitting one JSON line per sample.

Sampled PPT streams are filtered at a strict tolerance before any
verifier runs; samples whose PPT gap sits inside the marginal band are
regenerated (deterministically, by walking the attempt index forward) so
boundary noise never masquerades as a theorem failure.  Reports are
ordered by sample id regardless of how the work was scheduled.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .blocks import Block2x2, is_ppt
from .certificates import Certificate
from .errors import BudgetExhaustedError, MatrixError
from .functionals import (
    Functional,
    determinant,
    ky_fan_norm,
    parse_functional,
    schatten_norm,
    top_k_singular_product,
)
from .sampling import SampleSpec, child_seed, draw
from . import linalg, verify

VERIFIER_NAMES = (
    "main",
    "lee",
    "lieb_gm",
    "norm_chain",
    "trace_chain",
    "singular_product",
    "half_index",
    "hiroshima",
    "re_im",
)

THREADS_ENV_VAR = "PPT_BLOCKS_THREADS"


@dataclass
class VerificationReport:
    sample_id: int
    seed: int
    n: int
    method: str
    certificates: list[Certificate]
    failure_count: int
    marginal_count: int

    def to_dict(self, include_witness: str = "auto") -> dict:
        return {
            "type": "sample",
            "sample_id": self.sample_id,
            "seed": self.seed,
            "n": self.n,
            "method": self.method,
            "failures": self.failure_count,
            "marginals": self.marginal_count,
            "certificates": [c.to_dict(include_witness) for c in self.certificates],
        }


def default_norms(n: int) -> list[Functional]:
    norms = [ky_fan_norm(k) for k in range(1, n + 1)]
    norms += [schatten_norm(1), schatten_norm(2), schatten_norm(float("inf"))]
    return norms


def default_lieb_functionals(n: int) -> list[Functional]:
    k = min(2, n)
    return [ky_fan_norm(k), schatten_norm(3), top_k_singular_product(k), determinant()]


def build_battery(
    names,
    n: int,
    norms: list[Functional] | None = None,
    lieb: list[Functional] | None = None,
):
    """Expand verifier names into (label, callable(ctx, tol)) entries."""
    unknown = [name for name in names if name not in VERIFIER_NAMES]
    if unknown:
        raise ValueError(f"unknown verifier names: {unknown}")
    norms = default_norms(n) if norms is None else norms
    lieb = default_lieb_functionals(n) if lieb is None else lieb
    battery = []
    for name in names:
        if name == "main":
            battery.append(("main", lambda ctx, tol: verify.verify_main(ctx.block, tol, ctx)))
        elif name == "lee":
            battery.append(("lee", lambda ctx, tol: verify.verify_lee(ctx.block, tol, ctx)))
        elif name == "lieb_gm":
            for f in lieb:
                battery.append(
                    (
                        f"lieb_gm[{f.label}]",
                        lambda ctx, tol, f=f: verify.verify_lieb_gm(ctx.block, f, tol, ctx),
                    )
                )
        elif name == "norm_chain":
            for f in norms:
                battery.append(
                    (
                        f"norm_chain[{f.label}]",
                        lambda ctx, tol, f=f: verify.verify_norm_chain(ctx.block, f, tol, ctx),
                    )
                )
        elif name == "trace_chain":
            battery.append(
                ("trace_chain", lambda ctx, tol: verify.verify_trace_chain(ctx.block, tol, ctx))
            )
        elif name == "singular_product":
            for k in range(1, n + 1):
                battery.append(
                    (
                        f"singular_product[k={k}]",
                        lambda ctx, tol, k=k: verify.verify_singular_product_chain(
                            ctx.block, k, tol, ctx
                        ),
                    )
                )
        elif name == "half_index":
            battery.append(
                ("half_index", lambda ctx, tol: verify.verify_half_index(ctx.block, tol, ctx))
            )
        elif name == "hiroshima":
            for f in norms:
                battery.append(
                    (
                        f"hiroshima[{f.label}]",
                        lambda ctx, tol, f=f: verify.verify_hiroshima(ctx.block, f, tol, ctx),
                    )
                )
        elif name == "re_im":
            battery.append(("re_im", lambda ctx, tol: verify.verify_re_im(ctx.block, tol, ctx)))
    return battery


def accept_blocks(
    spec: SampleSpec, strict_tol: float = verify.STRICT_PPT_TOL
) -> list[tuple[int, Block2x2]]:
    """Deterministic list of (attempt_index, block), spec.count long.

    PPT-method samples are certified at the strict tolerance; fails and
    marginal verdicts are skipped by advancing the attempt index, so the
    accepted stream is a pure function of the spec.
    """
    needs_filter = spec.method in ("ppt_separable", "ppt_rejection")
    accepted: list[tuple[int, Block2x2]] = []
    attempt = 0
    max_attempts = max(10 * spec.count, 1000)
    while len(accepted) < spec.count and attempt < max_attempts:
        try:
            block = draw(spec, attempt)
        except BudgetExhaustedError:
            attempt += 1
            continue
        keep = True
        if needs_filter:
            cert = is_ppt(block, tol=strict_tol)
            keep = cert.passed and not cert.marginal
        if keep:
            accepted.append((attempt, block))
        attempt += 1
    if len(accepted) < spec.count:
        raise BudgetExhaustedError(
            f"could not accept {spec.count} samples within {max_attempts} attempts",
            attempts=attempt,
        )
    return accepted


def verify_block(
    block: Block2x2,
    names,
    tol: float = linalg.DEFAULT_TOL,
    norms: list[Functional] | None = None,
    lieb: list[Functional] | None = None,
    sample_id: int = 0,
    seed: int = 0,
    method: str = "supplied",
) -> VerificationReport:
    battery = build_battery(names, block.n, norms=norms, lieb=lieb)
    ctx = verify.BlockContext(block)
    certificates = []
    for label, fn in battery:
        try:
            cert = fn(ctx, tol)
        except MatrixError as exc:
            # definite failure: scale 0 makes the pass rule gap >= 0
            cert = Certificate(
                name=f"{label}:precondition",
                lhs="precondition",
                rhs=type(exc).__name__,
                gap=-1.0,
                tol=tol,
                scale=0.0,
                passed=False,
                marginal=False,
            )
        certificates.append(cert)
    failures = sum(1 for c in certificates if not c.passed)
    marginals = sum(1 for c in certificates if c.marginal)
    return VerificationReport(
        sample_id=sample_id,
        seed=seed,
        n=block.n,
        method=method,
        certificates=certificates,
        failure_count=failures,
        marginal_count=marginals,
    )


def _verify_one(args) -> VerificationReport:
    spec_dict, attempt_index, sample_id, names, tol, norm_labels, lieb_labels = args
    spec = SampleSpec.from_dict(spec_dict)
    block = draw(spec, attempt_index)
    norms = [parse_functional(s) for s in norm_labels] if norm_labels else None
    lieb = [parse_functional(s) for s in lieb_labels] if lieb_labels else None
    return verify_block(
        block,
        names,
        tol=tol,
        norms=norms,
        lieb=lieb,
        sample_id=sample_id,
        seed=child_seed(spec.seed, attempt_index),
        method=spec.method,
    )


def worker_count() -> int:
    raw = os.environ.get(THREADS_ENV_VAR, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def run_campaign(
    spec: SampleSpec,
    names=VERIFIER_NAMES,
    tol: float = linalg.DEFAULT_TOL,
    strict_tol: float = verify.STRICT_PPT_TOL,
    norms: list[Functional] | None = None,
    lieb: list[Functional] | None = None,
    threads: int | None = None,
) -> tuple[list[VerificationReport], dict]:
    """Run the selected verifiers over a sampled stream of blocks."""
    build_battery(names, spec.n, norms=norms, lieb=lieb)  # fail fast on bad names
    threads = worker_count() if threads is None else max(1, threads)
    accepted = accept_blocks(spec, strict_tol=strict_tol)

    if threads > 1:
        norm_labels = [f.label for f in norms] if norms is not None else None
        lieb_labels = [f.label for f in lieb] if lieb is not None else None
        jobs = [
            (spec.to_dict(), attempt, i, tuple(names), tol, norm_labels, lieb_labels)
            for i, (attempt, _) in enumerate(accepted)
        ]
        with ProcessPoolExecutor(max_workers=threads) as pool:
            reports = list(pool.map(_verify_one, jobs, chunksize=8))
    else:
        reports = [
            verify_block(
                block,
                names,
                tol=tol,
                norms=norms,
                lieb=lieb,
                sample_id=i,
                seed=child_seed(spec.seed, attempt),
                method=spec.method,
            )
            for i, (attempt, block) in enumerate(accepted)
        ]
    reports.sort(key=lambda r: r.sample_id)
    return reports, summarize(reports)


def summarize(reports) -> dict:
    cert_count = sum(len(r.certificates) for r in reports)
    failures = sum(r.failure_count for r in reports)
    marginals = sum(r.marginal_count for r in reports)
    return {
        "type": "summary",
        "samples": len(reports),
        "certificates": cert_count,
        "failures": failures,
        "marginals": marginals,
        "marginal_rate": (marginals / cert_count) if cert_count else 0.0,
    }


def report_lines(reports, summary, include_witness: str = "auto"):
    """JSON-lines rendering: one line per sample, then the summary."""
    from .jsonio import dumps

    for report in reports:
        yield dumps(report.to_dict(include_witness))
    yield dumps(summary)
