"""Deterministic random generation of matrices and PPT blocks.

Reproducibility contract: a SampleSpec identifies its sample stream
exactly, within one build.  All randomness flows through numpy's PCG64
generator seeded explicitly; campaign streams derive per-sample seeds as
seed XOR splitmix64(index), so samples are independent and can be
regenerated in isolation.  Complex Gaussians use a Box-Muller transform
of the uniform stream (two uniforms per entry, E|z|^2 = 1).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .blocks import Block2x2, split
from .errors import BudgetExhaustedError
from . import linalg

_MASK64 = (1 << 64) - 1

METHODS = (
    "ginibre",
    "psd",
    "pd",
    "unitary",
    "psd_block",
    "ppt_separable",
    "ppt_rejection",
)


@dataclass(frozen=True)
class SampleSpec:
    """Recipe for one deterministic sample stream."""

    n: int
    seed: int
    count: int = 1
    method: str = "ppt_separable"
    r: int = 4  # separable terms
    cond_cap: float = 100.0  # condition number cap for pd draws
    budget: int = 10_000  # rejection attempts per sample
    rank: int | None = None  # psd rank, full when None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("dimension must be at least 1")
        if self.method not in METHODS:
            raise ValueError(f"unknown sampling method {self.method!r}")

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "seed": self.seed,
            "count": self.count,
            "method": self.method,
            "r": self.r,
            "cond_cap": self.cond_cap,
            "budget": self.budget,
            "rank": self.rank,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SampleSpec":
        known = {k: data[k] for k in (
            "n", "seed", "count", "method", "r", "cond_cap", "budget", "rank"
        ) if k in data}
        return cls(**known)


def splitmix64(x: int) -> int:
    """One step of the splitmix64 avalanche hash."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def child_seed(seed: int, index: int) -> int:
    return (seed & _MASK64) ^ splitmix64(index)


def generator(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed & _MASK64))


def _complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    """Standard complex Gaussians (E|z|^2 = 1) by Box-Muller."""
    u1 = rng.random(shape)
    u2 = rng.random(shape)
    radius = np.sqrt(-np.log1p(-u1))  # avoids log(0)
    return radius * np.exp(2j * np.pi * u2)


def random_ginibre(n: int, seed: int) -> np.ndarray:
    """n x n matrix of i.i.d. standard complex Gaussians."""
    return _complex_normal(generator(seed), (n, n))


def random_hermitian(n: int, seed: int) -> np.ndarray:
    g = random_ginibre(n, seed)
    return linalg.hermitian_part(g)


def random_psd(n: int, seed: int, rank: int | None = None) -> np.ndarray:
    """G* G with G of shape (rank, n); full rank by default."""
    r = n if rank is None else int(rank)
    if not 1 <= r:
        raise ValueError("rank must be positive")
    g = _complex_normal(generator(seed), (r, n))
    return linalg.hermitian_part(g.conj().T @ g)


def random_pd(n: int, seed: int, cond_cap: float = 100.0) -> np.ndarray:
    """Strictly PD sample with condition number at most cond_cap.

    A Wishart draw is shifted by the delta that brings its condition
    number under the cap, then trace-normalized to n.
    """
    if cond_cap < 1.0:
        raise ValueError("condition cap must be at least 1")
    if n == 1:
        return np.array([[1.0 + 0j]])
    base = random_psd(n, seed)
    values = linalg.herm_eig(base).values
    top, bottom = float(values[0]), float(values[-1])
    if cond_cap == 1.0:
        return np.eye(n, dtype=complex)
    if top > cond_cap * bottom:
        delta = (top - cond_cap * bottom) / (cond_cap - 1.0)
        base = base + delta * np.eye(n)
    base = linalg.hermitian_part(base)
    return base * (n / float(np.trace(base).real))


def random_unitary(n: int, seed: int) -> np.ndarray:
    """Haar unitary: QR of a Ginibre sample with the R diagonal made
    positive (phase fixing)."""
    g = random_ginibre(n, seed)
    q, r = np.linalg.qr(g)
    diag = np.diagonal(r)
    absd = np.abs(diag)
    phases = np.where(absd > 0.0, diag / np.maximum(absd, 1e-300), 1.0)
    return q * phases


def random_ppt_separable(n: int, seed: int, r: int = 4) -> Block2x2:
    """PPT by construction: a sum of r Kronecker products of a random
    2x2 PSD factor with a random n x n PSD factor.  Partial transposition
    only transposes the 2x2 factors, so positivity is preserved."""
    if r < 1:
        raise ValueError("need at least one separable term")
    a = np.zeros((n, n), dtype=complex)
    x = np.zeros((n, n), dtype=complex)
    b = np.zeros((n, n), dtype=complex)
    for k in range(r):
        p = random_psd(2, child_seed(seed, 2 * k))
        q = random_psd(n, child_seed(seed, 2 * k + 1))
        a += p[0, 0].real * q
        x += p[0, 1] * q
        b += p[1, 1].real * q
    return Block2x2(a=a, x=x, b=b)


def random_psd_block(n: int, seed: int, dof: int | None = None) -> Block2x2:
    """A 2n x 2n Wishart matrix reinterpreted as a block; PSD but with no
    PPT guarantee.  dof is the number of Gaussian rows (default 2n)."""
    h = random_psd(2 * n, seed, rank=dof)
    return split(h, n)


def random_ppt_rejection(
    n: int,
    seed: int,
    budget: int = 10_000,
    tol: float = 1e-10,
    dof: int | None = None,
) -> tuple[Block2x2, int]:
    """Draw PSD blocks until one passes the PPT test at tol; returns the
    block and the number of attempts used.

    The Wishart draw is PSD by construction, so only the partial
    transpose needs an eigenvalue test per attempt.
    """
    if budget < 1:
        raise ValueError("budget must be positive")
    for attempt in range(budget):
        h = random_psd(2 * n, child_seed(seed, attempt), rank=dof)
        h_tau = h.copy()
        h_tau[:n, n:] = h[:n, n:].conj().T
        h_tau[n:, :n] = h[n:, :n].conj().T
        gap = linalg.min_eig(h_tau)
        if gap >= -tol * max(1.0, float(np.linalg.norm(h))):
            return split(h, n), attempt + 1
    raise BudgetExhaustedError(
        f"no PPT block within {budget} attempts at n={n}",
        attempts=budget,
        acceptance_rate=0.0,
    )


def draw(spec: SampleSpec, index: int):
    """Sample number `index` of the stream described by spec."""
    seed = child_seed(spec.seed, index)
    if spec.method == "ginibre":
        return random_ginibre(spec.n, seed)
    if spec.method == "psd":
        return random_psd(spec.n, seed, rank=spec.rank)
    if spec.method == "pd":
        return random_pd(spec.n, seed, cond_cap=spec.cond_cap)
    if spec.method == "unitary":
        return random_unitary(spec.n, seed)
    if spec.method == "psd_block":
        return random_psd_block(spec.n, seed)
    if spec.method == "ppt_separable":
        return random_ppt_separable(spec.n, seed, r=spec.r)
    if spec.method == "ppt_rejection":
        block, _ = random_ppt_rejection(spec.n, seed, budget=spec.budget)
        return block
    raise ValueError(f"unknown sampling method {spec.method!r}")


def sample_stream(spec: SampleSpec):
    """Yield (index, sample) pairs for the whole stream."""
    for index in range(spec.count):
        yield index, draw(spec, index)


def stream_digest(spec: SampleSpec) -> str:
    """SHA-256 over the byte representation of the stream; used by the
    golden-file determinism test."""
    import hashlib

    digest = hashlib.sha256()
    for _, sample in sample_stream(spec):
        if isinstance(sample, Block2x2):
            for part in (sample.a, sample.x, sample.b):
                digest.update(np.ascontiguousarray(part).tobytes())
        else:
            digest.update(np.ascontiguousarray(sample).tobytes())
    return digest.hexdigest()
