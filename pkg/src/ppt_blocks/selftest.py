"""Reduced-count invariant suite behind the `selftest` CLI command.

Runs a quick pass over the invariants that the full test suite checks at
scale.  Each suite prints one line; the exit status is zero only when
everything holds.
"""

from __future__ import annotations

import numpy as np

from .blocks import (
    average_diagonal,
    geometric_mean_block,
    is_ppt,
    is_positive,
    ppt_variants,
    rotate_offdiag,
    schur_criterion,
)
from .campaign import run_campaign, report_lines
from .certificates import MARGINAL_BAND
from .errors import NotPDError
from .functionals import check_lieb_axioms, ky_fan_norm, trace
from .sampling import SampleSpec, child_seed, random_pd, random_hermitian, stream_digest
from .verify import verify_extremal_gm
from . import linalg

_SELFTEST_SEED = 0x5E1F7E57


def _suite_eig(seed: int):
    worst = 0.0
    for i in range(40):
        n = 2 + i % 7
        m = random_hermitian(n, child_seed(seed, i))
        system = linalg.herm_eig(m)
        scale = max(1.0, float(np.linalg.norm(m)))
        rec = np.linalg.norm((system.basis * system.values) @ system.basis.conj().T - m)
        orth = np.linalg.norm(system.basis.conj().T @ system.basis - np.eye(n))
        worst = max(worst, rec / scale, orth)
    return worst <= 1e-10, f"worst residual {worst:.2e}"


def _suite_svd_polar(seed: int):
    from .sampling import random_ginibre

    worst = 0.0
    for i in range(20):
        n = 2 + i % 5
        x = random_ginibre(n, child_seed(seed, 100 + i))
        system = linalg.svd(x)
        scale = max(1.0, float(np.linalg.norm(x)))
        rec = np.linalg.norm((system.left * system.singulars) @ system.right.conj().T - x)
        factors = linalg.polar(x)
        pol = np.linalg.norm(factors.unitary @ factors.modulus - x)
        uni = np.linalg.norm(factors.unitary.conj().T @ factors.unitary - np.eye(n))
        worst = max(worst, rec / scale, pol / scale, uni)
    return worst <= 1e-10, f"worst residual {worst:.2e}"


def _suite_geometric_mean(seed: int):
    worst = 0.0
    ok = True
    for i in range(20):
        n = 2 + i % 4
        a = random_pd(n, child_seed(seed, 200 + 2 * i))
        b = random_pd(n, child_seed(seed, 201 + 2 * i))
        g_ab = linalg.geometric_mean(a, b)
        g_ba = linalg.geometric_mean(b, a)
        scale = max(1.0, float(np.linalg.norm(g_ab)))
        worst = max(worst, np.linalg.norm(g_ab - g_ba) / scale)
        riccati = np.linalg.norm(g_ab @ linalg.pd_inverse(a) @ g_ab - b)
        worst = max(worst, riccati / max(1.0, float(np.linalg.norm(b))))
        ok = ok and linalg.loewner_leq(g_ab, (a + b) / 2).passed
    return ok and worst <= 1e-7, f"worst relative drift {worst:.2e}"


def _suite_block_closure(seed: int):
    from .sampling import random_ppt_separable

    ok = True
    for i in range(10):
        n = 2 + i % 2
        block = random_ppt_separable(n, child_seed(seed, 300 + i))
        for variant in ppt_variants(block):
            ok = ok and is_positive(variant).passed
        for theta in (np.pi / 7, np.pi / 3, 1.0):
            ok = ok and is_ppt(rotate_offdiag(block, theta)).passed
        ok = ok and is_ppt(average_diagonal(block)).passed
        ok = ok and is_ppt(geometric_mean_block(block)).passed
    return ok, "variants, rotations, averaging, geometric-mean block"


def _suite_schur_equivalence(seed: int):
    from .sampling import random_psd_block

    tol = linalg.DEFAULT_TOL
    disagreements = 0
    for i in range(60):
        block = random_psd_block(2, child_seed(seed, 400 + i))
        eig_cert = is_ppt(block, tol=tol)
        try:
            schur_cert = schur_criterion(block, tol=tol)
        except NotPDError:
            continue
        if eig_cert.passed != schur_cert.passed:
            band = MARGINAL_BAND * tol * eig_cert.scale
            if abs(eig_cert.gap) >= band and abs(schur_cert.gap) >= band:
                disagreements += 1
    return disagreements == 0, f"{disagreements} disagreements outside the band"


def _suite_theorems(seed: int):
    spec = SampleSpec(n=2, seed=child_seed(seed, 500), count=6, method="ppt_separable")
    reports, summary = run_campaign(spec, threads=1)
    spec3 = SampleSpec(n=3, seed=child_seed(seed, 501), count=6, method="ppt_separable")
    _, summary3 = run_campaign(spec3, threads=1)
    failures = summary["failures"] + summary3["failures"]
    return failures == 0, f"{failures} failures over 12 blocks"


def _suite_extremal(seed: int):
    ok = True
    for i in range(6):
        n = 2 + i % 3
        x = random_pd(n, child_seed(seed, 600 + 2 * i))
        y = random_pd(n, child_seed(seed, 601 + 2 * i))
        ok = ok and verify_extremal_gm(x, y, seed=child_seed(seed, 602 + i)).passed
    return ok, "maximality margins positive"


def _suite_determinism(seed: int):
    spec = SampleSpec(n=3, seed=seed, count=8, method="ppt_separable")
    same_stream = stream_digest(spec) == stream_digest(spec)
    small = SampleSpec(n=2, seed=seed, count=3, method="ppt_separable")
    r1, s1 = run_campaign(small, names=("main", "trace_chain"), threads=1)
    r2, s2 = run_campaign(small, names=("main", "trace_chain"), threads=1)
    same_reports = list(report_lines(r1, s1)) == list(report_lines(r2, s2))
    return same_stream and same_reports, "streams and reports repeat bit-for-bit"


def _suite_functionals(seed: int):
    spec = SampleSpec(n=3, seed=child_seed(seed, 700), count=25, method="psd")
    ok = check_lieb_axioms(trace(), spec).passed
    ok = ok and check_lieb_axioms(ky_fan_norm(2), spec).passed
    return ok, "trace and kyfan:2 axioms hold"


SUITES = (
    ("eigensolver", _suite_eig),
    ("svd_polar", _suite_svd_polar),
    ("geometric_mean", _suite_geometric_mean),
    ("block_closure", _suite_block_closure),
    ("schur_equivalence", _suite_schur_equivalence),
    ("theorem_suite", _suite_theorems),
    ("extremal_gm", _suite_extremal),
    ("determinism", _suite_determinism),
    ("functional_axioms", _suite_functionals),
)


def run_selftest(seed: int = _SELFTEST_SEED, out=print) -> int:
    failures = 0
    for name, suite in SUITES:
        try:
            ok, detail = suite(seed)
        except Exception as exc:  # a crash is a failure, not a traceback
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        mark = "ok" if ok else "FAIL"
        out(f"[{mark}] {name}: {detail}")
        failures += 0 if ok else 1
    out(f"selftest: {len(SUITES) - failures}/{len(SUITES)} suites passed")
    return 0 if failures == 0 else 1
