"""Inequality verdicts with re-checkable witnesses.

A Certificate records what was compared, the observed gap (a minimum
eigenvalue for Loewner comparisons, a scalar slack otherwise), the
tolerance and scale the verdict was taken at, and enough witness data
to re-check the verdict without re-running the eigensolver.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Loewner verdicts within this multiple of the pass band are flagged
# marginal: the verdict is real but sits close to the tolerance edge.
MARGINAL_BAND = 10.0


@dataclass(frozen=True)
class Link:
    """One scalar comparison inside a chained certificate."""

    label: str
    lhs_value: float
    rhs_value: float
    slack: float
    scale: float
    passed: bool

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "lhs_value": self.lhs_value,
            "rhs_value": self.rhs_value,
            "slack": self.slack,
            "scale": self.scale,
            "passed": self.passed,
        }


@dataclass(frozen=True)
class Certificate:
    name: str
    lhs: str
    rhs: str
    gap: float
    tol: float
    scale: float
    passed: bool
    marginal: bool
    witness: np.ndarray | None = field(default=None, repr=False)
    links: tuple[Link, ...] = ()

    def to_dict(self, include_witness: str = "auto") -> dict:
        """JSON-ready form.  include_witness: "auto" keeps the witness only
        for failed or marginal verdicts, "always"/"never" force it."""
        out = {
            "name": self.name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "gap": self.gap,
            "tol": self.tol,
            "scale": self.scale,
            "passed": self.passed,
            "marginal": self.marginal,
        }
        if self.links:
            out["links"] = [link.to_dict() for link in self.links]
        keep = include_witness == "always" or (
            include_witness == "auto" and (not self.passed or self.marginal)
        )
        if keep and self.witness is not None:
            out["witness"] = {
                "re": [float(v) for v in self.witness.real],
                "im": [float(v) for v in self.witness.imag],
            }
        return out


def gap_certificate(
    name: str,
    lhs: str,
    rhs: str,
    gap: float,
    tol: float,
    scale: float,
    witness: np.ndarray | None = None,
    links: tuple[Link, ...] = (),
) -> Certificate:
    """Verdict on an eigenvalue gap: pass iff gap >= -tol*scale."""
    gap = float(gap)
    scale = float(scale)
    return Certificate(
        name=name,
        lhs=lhs,
        rhs=rhs,
        gap=gap,
        tol=tol,
        scale=scale,
        passed=gap >= -tol * scale,
        marginal=abs(gap) < MARGINAL_BAND * tol * scale,
        witness=witness,
        links=links,
    )


def scalar_link(label: str, lhs_value: float, rhs_value: float, tol: float) -> Link:
    """lhs <= rhs up to tol*max(1, |rhs|)."""
    lhs_value = float(lhs_value)
    rhs_value = float(rhs_value)
    scale = max(1.0, abs(rhs_value))
    slack = rhs_value - lhs_value
    return Link(
        label=label,
        lhs_value=lhs_value,
        rhs_value=rhs_value,
        slack=slack,
        scale=scale,
        passed=slack >= -tol * scale,
    )


def scalar_certificate(
    name: str, lhs: str, rhs: str, lhs_value: float, rhs_value: float, tol: float
) -> Certificate:
    """Single scalar comparison.  Scalar verdicts are definite: the +tol
    acceptance margin already absorbs roundoff, so no marginal flag."""
    link = scalar_link(name, lhs_value, rhs_value, tol)
    return Certificate(
        name=name,
        lhs=lhs,
        rhs=rhs,
        gap=link.slack,
        tol=tol,
        scale=link.scale,
        passed=link.passed,
        marginal=False,
        links=(link,),
    )


def chain_certificate(
    name: str, lhs: str, rhs: str, links: tuple[Link, ...], tol: float
) -> Certificate:
    """Combine scalar links; the reported gap belongs to the worst link.

    "Worst" is judged on slack/scale so that the certificate-level rule
    (pass iff gap >= -tol*scale) always agrees with the per-link verdicts,
    even when link scales differ by orders of magnitude.
    """
    worst = min(links, key=lambda link: link.slack / link.scale)
    return Certificate(
        name=name,
        lhs=lhs,
        rhs=rhs,
        gap=worst.slack,
        tol=tol,
        scale=worst.scale,
        passed=all(link.passed for link in links),
        marginal=False,
        links=links,
    )


def recheck(cert: Certificate, lhs_matrix=None, rhs_matrix=None, tol_factor: float = 100.0) -> bool:
    """Re-derive the verdict from recorded data, without the eigensolver.

    Scalar links are re-evaluated from their stored values.  For a Loewner
    certificate the witness Rayleigh quotient must reproduce the recorded
    gap, which pins a failure independently of how the gap was found.
    """
    for link in cert.links:
        slack = link.rhs_value - link.lhs_value
        if (slack >= -cert.tol * link.scale) != link.passed:
            return False
    if cert.witness is not None and lhs_matrix is not None and rhs_matrix is not None:
        w = cert.witness
        nrm = np.linalg.norm(w)
        if nrm == 0.0:
            return False
        w = w / nrm
        quotient = float(np.real(np.conj(w) @ ((rhs_matrix - lhs_matrix) @ w)))
        if abs(quotient - cert.gap) > tol_factor * cert.tol * max(1.0, cert.scale):
            return False
        if not cert.passed and quotient >= 0.0:
            return False
    return True
