"""Command-line front end.

Commands: check (single block), verify (campaigns), sample (emit random
instances), hunt (counterexample search), selftest.

Exit codes: 0 success (or certified hunt hit), 1 inequality failure,
2 usage or parse error, 3 hunt budget exhausted.
"""

from __future__ import annotations

import argparse
import json
import sys

from .blocks import is_positive, is_ppt, partial_transpose, schur_criterion
from .campaign import (
    VERIFIER_NAMES,
    report_lines,
    run_campaign,
    summarize,
    verify_block,
    worker_count,
)
from .errors import BudgetExhaustedError, MatrixError, NotPDError
from .functionals import parse_functional
from .hunt import hunt_sj_counterexample, replay_violation
from .jsonio import FormatError, block_from_dict, block_to_dict, dumps, load_blocks, matrix_to_dict
from .sampling import SampleSpec, sample_stream
from .selftest import run_selftest
from . import linalg

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_EXHAUSTED = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ppt-blocks",
        description="Certify positivity, partial transposes, and geometric-mean "
        "inequalities on 2x2 block matrices.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="PSD/PPT verdict for one block file")
    check.add_argument("--input", required=True, help="block JSON file")
    check.add_argument("--tol", type=float, default=linalg.DEFAULT_TOL)
    check.add_argument("--format", choices=("json", "table"), default="table")
    check.add_argument("--output", default=None)

    verify_p = sub.add_parser("verify", help="run verifier campaigns")
    group = verify_p.add_mutually_exclusive_group(required=True)
    group.add_argument("--all", action="store_true", help="enable every verifier")
    group.add_argument("--only", default=None, help="comma-separated verifier names")
    verify_p.add_argument("--input", default=None, help="verify blocks from a file")
    verify_p.add_argument("--n", type=int, default=3)
    verify_p.add_argument("--seed", type=int, default=0)
    verify_p.add_argument("--count", type=int, default=100)
    verify_p.add_argument("--method", default="ppt_separable",
                          choices=("ppt_separable", "ppt_rejection"))
    verify_p.add_argument("--r", type=int, default=4, help="separable terms")
    verify_p.add_argument("--budget", type=int, default=10_000, help="rejection attempts")
    verify_p.add_argument("--tol", type=float, default=linalg.DEFAULT_TOL)
    verify_p.add_argument("--norm", action="append", default=None,
                          help="norm battery entry, e.g. kyfan:2 (repeatable)")
    verify_p.add_argument("--format", choices=("json", "table"), default="json")
    verify_p.add_argument("--witness", choices=("auto", "always", "never"), default="auto")
    verify_p.add_argument("--output", default=None)

    sample = sub.add_parser("sample", help="emit random instances as JSON lines")
    sample.add_argument("--method", default="ppt_separable",
                        choices=("ginibre", "psd", "pd", "unitary", "psd_block",
                                 "ppt_separable", "ppt_rejection"))
    sample.add_argument("--n", type=int, default=3)
    sample.add_argument("--seed", type=int, default=0)
    sample.add_argument("--count", type=int, default=1)
    sample.add_argument("--r", type=int, default=4)
    sample.add_argument("--budget", type=int, default=10_000)
    sample.add_argument("--output", default=None)

    hunt = sub.add_parser("hunt", help="search for singular-value counterexamples")
    hunt.add_argument("--j", type=int, required=True, help="singular value index (1-based)")
    hunt.add_argument("--n", type=int, default=2)
    hunt.add_argument("--seed", type=int, default=0)
    hunt.add_argument("--count", type=int, default=10_000, help="random search budget")
    hunt.add_argument("--climb", type=int, default=2000, help="hill-climb steps")
    hunt.add_argument("--r", type=int, default=4)
    hunt.add_argument("--budget", type=int, default=10_000, help="rejection attempts")
    hunt.add_argument("--tol", type=float, default=linalg.DEFAULT_TOL)
    hunt.add_argument("--replay", default=None,
                      help="re-certify a stored hit file instead of searching")
    hunt.add_argument("--output", default=None)

    selftest = sub.add_parser("selftest", help="run the reduced invariant suite")
    selftest.add_argument("--seed", type=int, default=None)

    return parser


def _emit(lines, output: str | None) -> None:
    text = "\n".join(lines) + "\n"
    if output is None:
        sys.stdout.write(text)
    else:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)


def _load_single_block(path: str):
    blocks = load_blocks(path)
    if len(blocks) != 1:
        raise FormatError(f"expected exactly one block in {path}, found {len(blocks)}")
    return blocks[0]


def _cmd_check(args) -> int:
    block = _load_single_block(args.input)
    direct = is_positive(block, tol=args.tol)
    transposed = is_positive(partial_transpose(block), tol=args.tol)
    ppt = is_ppt(block, tol=args.tol)
    schur = None
    try:
        schur = schur_criterion(block, tol=args.tol)
    except NotPDError:
        pass

    if args.format == "json":
        payload = {
            "type": "check",
            "n": block.n,
            "psd_H": direct.to_dict(),
            "psd_H_tau": transposed.to_dict(),
            "ppt": ppt.to_dict(),
        }
        if schur is not None:
            payload["schur"] = schur.to_dict()
        _emit([dumps(payload)], args.output)
    else:
        def verdict(cert):
            state = "pass" if cert.passed else "fail"
            if cert.marginal:
                state += " (marginal)"
            return f"{state:16s} gap {cert.gap:+.6e}  scale {cert.scale:.3e}"

        lines = [
            f"H PSD:     {verdict(direct)}",
            f"H^tau PSD: {verdict(transposed)}",
            f"PPT:       {verdict(ppt)}",
        ]
        if schur is not None:
            lines.append(f"Schur PPT: {verdict(schur)}")
            for link in schur.links:
                state = "psd" if link.passed else "not psd"
                lines.append(f"  {link.label}: {state}, min eig {link.rhs_value:+.6e}")
        else:
            lines.append("Schur PPT: skipped (A not positive definite)")
        _emit(lines, args.output)
    return EXIT_OK if ppt.passed else EXIT_FAILURE


def _cmd_verify(args) -> int:
    if args.all:
        names = VERIFIER_NAMES
    else:
        names = tuple(name.strip() for name in args.only.split(",") if name.strip())
        if not names:
            raise FormatError("empty verifier list")
    unknown = [name for name in names if name not in VERIFIER_NAMES]
    if unknown:
        raise FormatError(f"unknown verifier names: {unknown}; known: {list(VERIFIER_NAMES)}")
    norms = [parse_functional(s) for s in args.norm] if args.norm else None

    if args.input is not None:
        blocks = load_blocks(args.input)
        reports = [
            verify_block(block, names, tol=args.tol, norms=norms,
                         sample_id=i, seed=0, method="file")
            for i, block in enumerate(blocks)
        ]
        summary = summarize(reports)
    else:
        spec = SampleSpec(
            n=args.n,
            seed=args.seed,
            count=args.count,
            method=args.method,
            r=args.r,
            budget=args.budget,
        )
        reports, summary = run_campaign(
            spec, names=names, tol=args.tol, norms=norms, threads=worker_count()
        )

    if args.format == "json":
        _emit(list(report_lines(reports, summary, include_witness=args.witness)), args.output)
    else:
        lines = []
        for report in reports:
            state = "ok" if report.failure_count == 0 else "FAIL"
            lines.append(
                f"sample {report.sample_id:5d}  n={report.n}  {state}  "
                f"failures={report.failure_count}  marginals={report.marginal_count}"
            )
        lines.append(
            f"summary: {summary['samples']} samples, {summary['certificates']} certificates, "
            f"{summary['failures']} failures, {summary['marginals']} marginal"
        )
        _emit(lines, args.output)
    return EXIT_OK if summary["failures"] == 0 else EXIT_FAILURE


def _cmd_sample(args) -> int:
    spec = SampleSpec(
        n=args.n,
        seed=args.seed,
        count=args.count,
        method=args.method,
        r=args.r,
        budget=args.budget,
    )
    lines = []
    for index, sample in sample_stream(spec):
        if hasattr(sample, "a"):
            payload = block_to_dict(sample)
        else:
            payload = matrix_to_dict(sample)
        payload["index"] = index
        lines.append(dumps(payload))
    _emit(lines, args.output)
    return EXIT_OK


def _cmd_hunt(args) -> int:
    if args.replay is not None:
        with open(args.replay, "r", encoding="utf-8") as fh:
            stored = json.load(fh)
        block = block_from_dict(stored["hit_block"] if "hit_block" in stored else stored)
        j = int(stored.get("j", args.j))
        details = replay_violation(block, j, tol=args.tol)
        _emit([dumps({"type": "replay", "j": j, **details})], args.output)
        return EXIT_OK if details["certified"] else EXIT_FAILURE

    spec = SampleSpec(
        n=args.n,
        seed=args.seed,
        count=args.count,
        method="ppt_separable",
        r=args.r,
        budget=args.budget,
    )
    report = hunt_sj_counterexample(spec, args.j, tol=args.tol, climb_steps=args.climb)
    _emit([dumps(report.to_dict())], args.output)
    return EXIT_OK if report.hit else EXIT_EXHAUSTED


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "check":
            return _cmd_check(args)
        if args.command == "verify":
            return _cmd_verify(args)
        if args.command == "sample":
            return _cmd_sample(args)
        if args.command == "hunt":
            return _cmd_hunt(args)
        if args.command == "selftest":
            if args.seed is None:
                return run_selftest()
            return run_selftest(seed=args.seed)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except json.JSONDecodeError as exc:
        print(
            f"error: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}",
            file=sys.stderr,
        )
        return EXIT_USAGE
    except (FormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExhaustedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_EXHAUSTED
    except MatrixError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
