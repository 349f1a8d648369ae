"""Monte Carlo sampling of CUE and COE with batched error estimates.

Floats live here and only here. Haar unitaries come from QR of a complex
Ginibre matrix with the diagonal phase correction (plain QR is biased
toward the sign conventions of the factorization; multiplying each column
by r_jj/|r_jj| removes that). COE samples are S S^T.

Reproducibility: the seed feeds a SeedSequence whose spawned children give
one PCG64 stream per batch. Batches are evaluated independently and merged
in batch order with sample-count weights, so a run is bit-identical for a
fixed (seed, sample_count, batch_count) regardless of worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

GENERATOR_NAME = "PCG64"


@dataclass(frozen=True)
class SampleConfig:
    ensemble: str
    N: int
    sample_count: int
    rng_seed: int
    batch_count: int = 20

    def __post_init__(self):
        if self.ensemble not in ("CUE", "COE"):
            raise ValueError("ensemble must be CUE or COE")
        if self.N < 1:
            raise ValueError("N must be >= 1")
        if not (self.sample_count >= self.batch_count >= 2):
            raise ValueError("need sample_count >= batch_count >= 2")


def sample_cue(N, rng, size=None):
    """Haar unitaries, one (N, N) matrix or a (size, N, N) stack."""
    shape = (N, N) if size is None else (size, N, N)
    g = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    q, r = np.linalg.qr(g / math.sqrt(2.0))
    d = np.diagonal(r, axis1=-2, axis2=-1)
    q = q * (d / np.abs(d))[..., None, :]
    return q


def sample_coe(N, rng, size=None):
    """Symmetric unitaries S S^T with S Haar."""
    s = sample_cue(N, rng, size=size)
    return s @ np.swapaxes(s, -1, -2)


@dataclass(frozen=True)
class EntryMoment:
    """Product of matrix entries: factors are (row, col, conjugate)."""

    factors: tuple

    def evaluate(self, w):
        out = np.ones(w.shape[0], dtype=complex)
        for i, j, conj in self.factors:
            vals = w[:, i, j]
            out = out * (np.conj(vals) if conj else vals)
        return out

    def describe(self):
        bits = []
        for i, j, conj in self.factors:
            name = f"W[{i},{j}]"
            bits.append(f"conj({name})" if conj else name)
        return "*".join(bits)


@dataclass(frozen=True)
class BlockTraceMoment:
    """p_lam(B) * conj(p_mu(B)) over the upper-left M x M block."""

    lam: tuple
    mu: tuple
    M: int

    def evaluate(self, w):
        b = w[:, : self.M, : self.M]
        powers = {}

        def tr_power(k):
            if k not in powers:
                mat = np.linalg.matrix_power(b, k)
                powers[k] = np.trace(mat, axis1=-2, axis2=-1)
            return powers[k]

        out = np.ones(w.shape[0], dtype=complex)
        for part in self.lam:
            out = out * tr_power(part)
        for part in self.mu:
            out = out * np.conj(tr_power(part))
        return out

    def describe(self):
        lam = ",".join(map(str, self.lam))
        mu = ",".join(map(str, self.mu))
        return f"p_({lam})(B) * conj(p_({mu})(B)), M={self.M}"


@dataclass(frozen=True)
class EstimateResult:
    mean: complex
    std_error: float
    sample_count: int
    batch_count: int
    seed: int
    generator: str = GENERATOR_NAME


def _batch_sizes(total, batches):
    base, rem = divmod(total, batches)
    return [base + (1 if b < rem else 0) for b in range(batches)]


def _batch_mean(ensemble, N, size, seed_seq, observable):
    rng = np.random.Generator(np.random.PCG64(seed_seq))
    if ensemble == "CUE":
        w = sample_cue(N, rng, size=size)
    else:
        w = sample_coe(N, rng, size=size)
    vals = observable.evaluate(w)
    return complex(np.mean(vals))


def estimate_moment(cfg, observable, workers=1):
    """Batched mean with a batch-spread standard error."""
    if isinstance(observable, BlockTraceMoment) and observable.M > cfg.N:
        raise ValueError("block size M cannot exceed N")
    root = np.random.SeedSequence(cfg.rng_seed)
    children = root.spawn(cfg.batch_count)
    sizes = _batch_sizes(cfg.sample_count, cfg.batch_count)
    jobs = [
        (cfg.ensemble, cfg.N, sizes[b], children[b], observable)
        for b in range(cfg.batch_count)
    ]
    if workers <= 1:
        means = [_batch_mean(*job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_batch_mean, *job) for job in jobs]
            means = [f.result() for f in futures]  # batch order, always
    total = cfg.sample_count
    mean = sum((sizes[b] / total) * means[b] for b in range(cfg.batch_count))
    b_count = cfg.batch_count
    var = sum(
        (sizes[b] / total) ** 2 * abs(means[b] - mean) ** 2
        for b in range(b_count)
    ) * b_count / (b_count - 1)
    return EstimateResult(
        mean=mean,
        std_error=math.sqrt(var),
        sample_count=total,
        batch_count=b_count,
        seed=cfg.rng_seed,
    )


@dataclass(frozen=True)
class ComparisonReport:
    observable: str
    N: int
    M: int | None
    symbolic: float
    mean: complex
    std_error: float
    trunc_bound: float
    sigma_tol: float
    verdict: str

    @property
    def passed(self):
        return self.verdict == "pass"

    def to_json(self):
        return {
            "observable": self.observable,
            "N": self.N,
            "M": self.M,
            "symbolic": self.symbolic,
            "mean": [self.mean.real, self.mean.imag],
            "stderr": self.std_error,
            "trunc_bound": self.trunc_bound,
            "verdict": self.verdict,
        }


def compare(symbolic, estimate, sigma_tol=4.0, trunc_bound=0.0,
            observable="", N=0, M=None):
    """Pass iff |mean - symbolic| <= sigma_tol * stderr + trunc_bound."""
    symbolic_f = float(symbolic)
    gap = abs(estimate.mean - symbolic_f)
    ok = gap <= sigma_tol * estimate.std_error + trunc_bound
    return ComparisonReport(
        observable=observable,
        N=N,
        M=M,
        symbolic=symbolic_f,
        mean=estimate.mean,
        std_error=estimate.std_error,
        trunc_bound=trunc_bound,
        sigma_tol=sigma_tol,
        verdict="pass" if ok else "fail",
    )


def _max_abs_coefficient(series):
    top = Fraction(0)
    for k in range(series.cap + 1):
        c = series.terms[k]
        if isinstance(c, Fraction):
            top = max(top, abs(c))
        else:
            for f in c.coeffs:
                top = max(top, abs(f))
    return top


def trace_truncation_allowance(result, N, M):
    """C * u^(cap+1) * M^min(cap+1, 2n) with C the largest coefficient."""
    series = result.series
    c = _max_abs_coefficient(series)
    n = result.n
    k1 = series.cap + 1
    u = 1.0 / (N + 1)
    return float(c) * u ** k1 * float(M) ** min(k1, 2 * n)


def entry_truncation_allowance(series, N, beta=1):
    """C * u^(cap+1) for an entry-moment pattern series."""
    c = _max_abs_coefficient(series)
    omega = {1: N + 1, 2: N, 4: 2 * N - 1}[beta]
    return float(c) * (1.0 / omega) ** (series.cap + 1)
