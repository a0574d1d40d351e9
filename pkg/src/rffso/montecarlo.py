"""Monte Carlo oracle: samplers for both hops and an outage estimator.

Every draw comes from a Philox counter-based generator keyed by
``(seed, stream index, hop)``, so results depend only on the config and
never on how streams are scheduled across threads.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channels import FisherSnedecorParams, GammaGammaParams
from .specfun import DomainError

__all__ = [
    "McConfig",
    "McEstimate",
    "standard_gamma",
    "sample_fs",
    "sample_gg",
    "binomial_estimate",
    "estimate_outage",
]

_RF, _FSO = 0, 1


@dataclass(frozen=True)
class McConfig:
    samples: int
    seed: int = 0
    streams: int = 1

    def __post_init__(self):
        for name in ("samples", "seed", "streams"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, np.integer)):
                raise DomainError(f"McConfig.{name} must be an integer, got {v!r}")
        if self.samples < 1 or self.streams < 1:
            raise DomainError("McConfig needs samples >= 1 and streams >= 1")
        if self.streams > self.samples:
            raise DomainError("McConfig.streams cannot exceed samples")
        if not 0 <= self.seed < 2 ** 64:
            raise DomainError("McConfig.seed must be an unsigned 64-bit integer")

    def stream_sizes(self) -> list[int]:
        base, extra = divmod(self.samples, self.streams)
        return [base + (i < extra) for i in range(self.streams)]


@dataclass(frozen=True)
class McEstimate:
    """Outage estimate.  When no outage event is seen ``stderr`` is the
    rule-of-three bound 3/n and ``one_sided`` is set."""

    p_hat: float
    stderr: float
    samples_used: int
    one_sided: bool = False


def _generator(seed, stream, hop):
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(stream, hop))
    return np.random.Generator(np.random.Philox(ss))


def standard_gamma(rng: np.random.Generator, shape: float, size: int) -> np.ndarray:
    """Gamma(shape, 1) variates by Marsaglia-Tsang squeeze/rejection.

    Shapes below one use the boost Gamma(a) = Gamma(a+1) * U^(1/a).
    """
    if not shape > 0:
        raise DomainError(f"gamma shape must be > 0, got {shape}")
    if shape < 1:
        g = standard_gamma(rng, shape + 1.0, size)
        u = rng.random(size)
        # log domain: U^(1/a) underflows for small a
        return np.exp(np.log(g) + np.log(u) / shape)
    d = shape - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    out = np.empty(size)
    filled = 0
    while filled < size:
        need = size - filled
        n = need + need // 20 + 16
        x = rng.standard_normal(n)
        u = rng.random(n)
        v = (1.0 + c * x) ** 3
        pos = v > 0
        x2 = x * x
        squeeze = u < 1.0 - 0.0331 * x2 * x2
        with np.errstate(divide="ignore", invalid="ignore"):
            full = np.log(u) < 0.5 * x2 + d * (1.0 - v + np.log(v))
        ok = pos & (squeeze | full)
        acc = d * v[ok][:need]
        out[filled:filled + acc.size] = acc
        filled += acc.size
    return out


def _fs_stream(p, seed, stream, n):
    rng = _generator(seed, stream, _RF)
    x = standard_gamma(rng, p.m, n)
    y = standard_gamma(rng, p.m_s, n)
    return (p.m_s * p.mu1 / p.m) * (x / y)


def _gg_stream(p, seed, stream, n):
    rng = _generator(seed, stream, _FSO)
    ia = standard_gamma(rng, p.alpha, n) / p.alpha
    ib = standard_gamma(rng, p.beta, n) / p.beta
    irr = ia * ib
    return p.mu2 * irr * irr


def _workers(workers):
    if workers is not None:
        return max(1, int(workers))
    env = os.environ.get("RFFSO_THREADS")
    return max(1, int(env)) if env else 1


def _per_stream(fn, cfg, workers):
    sizes = cfg.stream_sizes()
    jobs = [(i, n) for i, n in enumerate(sizes)]
    nw = min(_workers(workers), len(jobs))
    if nw == 1:
        return [fn(i, n) for i, n in jobs]
    with ThreadPoolExecutor(nw) as pool:
        return list(pool.map(lambda job: fn(*job), jobs))


def sample_fs(p: FisherSnedecorParams, cfg: McConfig, workers: int | None = None) -> np.ndarray:
    """Draw RF-hop SNRs as (m_s mu1 / m) * X / Y, X ~ Gamma(m), Y ~ Gamma(m_s).

    (X/m)/(Y/m_s) is F-distributed with (2m, 2m_s) degrees of freedom;
    scaling by mu1 gives exactly the Fisher-Snedecor SNR density.
    """
    parts = _per_stream(lambda i, n: _fs_stream(p, cfg.seed, i, n), cfg, workers)
    return np.concatenate(parts)


def sample_gg(p: GammaGammaParams, cfg: McConfig, workers: int | None = None) -> np.ndarray:
    """Draw FSO-hop SNRs mu2 * I^2 with I the product of unit-mean Gamma(alpha), Gamma(beta)."""
    parts = _per_stream(lambda i, n: _gg_stream(p, cfg.seed, i, n), cfg, workers)
    return np.concatenate(parts)


def binomial_estimate(count: int, n: int) -> McEstimate:
    p_hat = count / n
    if count == 0:
        return McEstimate(0.0, 3.0 / n, n, one_sided=True)
    return McEstimate(p_hat, math.sqrt(p_hat * (1.0 - p_hat) / n), n)


def estimate_outage(sys, q, cfg: McConfig, workers: int | None = None) -> McEstimate:
    """Fraction of paired draws with min(gamma_1, gamma_2) < gamma_th.

    ``sys`` is a :class:`~rffso.relay.RelaySystem` and ``q`` an
    :class:`~rffso.relay.OutageQuery`.  The two hops of each sample come
    from independent substreams.
    """
    gth = q.gamma_th

    def count(i, n):
        g1 = _fs_stream(sys.rf, cfg.seed, i, n)
        g2 = _gg_stream(sys.fso, cfg.seed, i, n)
        return int(np.count_nonzero(np.minimum(g1, g2) < gth))

    total = sum(_per_stream(count, cfg, workers))
    return binomial_estimate(total, cfg.samples)
