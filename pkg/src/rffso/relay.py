"""Decode-and-forward combining, outage probability, floors and sweeps."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional, Sequence

from .channels import (FisherSnedecorParams, FsoGeometry, GammaGammaParams, fs_cdf,
                       gg_cdf, rytov_variance, turbulence_params)
from .specfun import DomainError

__all__ = [
    "RelaySystem",
    "OutageQuery",
    "OutageCurve",
    "AXES",
    "InvalidAxisError",
    "db_to_linear",
    "linear_to_db",
    "combine_cdfs",
    "end_to_end_cdf",
    "outage_probability",
    "outage_floor_mu1",
    "outage_floor_mu2",
    "sweep",
]

AXES = ("mu1", "mu2", "mu1_and_mu2", "fso_length")


class InvalidAxisError(DomainError):
    pass


def db_to_linear(x_db: float) -> float:
    if not math.isfinite(x_db):
        raise DomainError(f"dB value must be finite, got {x_db}")
    return 10.0 ** (x_db / 10.0)


def linear_to_db(x: float) -> float:
    if not (x > 0) or math.isinf(x):
        raise DomainError(f"linear value must be finite and > 0, got {x}")
    return 10.0 * math.log10(x)


@dataclass(frozen=True)
class RelaySystem:
    rf: FisherSnedecorParams
    fso: GammaGammaParams

    def __post_init__(self):
        if not isinstance(self.rf, FisherSnedecorParams):
            raise DomainError("RelaySystem.rf must be FisherSnedecorParams")
        if not isinstance(self.fso, GammaGammaParams):
            raise DomainError("RelaySystem.fso must be GammaGammaParams")


@dataclass(frozen=True)
class OutageQuery:
    gamma_th: float

    def __post_init__(self):
        g = self.gamma_th
        if isinstance(g, bool) or not isinstance(g, (int, float)) \
                or not (math.isfinite(g) and g > 0):
            raise DomainError(f"gamma_th must be finite and > 0, got {g!r}")


@dataclass(frozen=True)
class OutageCurve:
    """One swept outage curve.

    ``axis_values`` are in dB for the SNR axes and metres for
    ``fso_length``.  ``systems`` and ``sigma_r2`` record the exact hop
    parameters behind each point (``sigma_r2`` is None unless the point's
    turbulence came from a geometry).
    """

    axis_name: str
    axis_values: tuple
    analytic_pout: tuple
    mc_pout: Optional[tuple] = None
    systems: tuple = ()
    sigma_r2: tuple = ()

    def __post_init__(self):
        if self.axis_name not in AXES:
            raise InvalidAxisError(f"unknown axis {self.axis_name!r}")
        n = len(self.axis_values)
        if len(self.analytic_pout) != n or (self.mc_pout is not None and len(self.mc_pout) != n):
            raise DomainError("OutageCurve lists must have equal length")
        if any(b <= a for a, b in zip(self.axis_values, self.axis_values[1:])):
            raise DomainError("axis values must be strictly increasing")
        if any(not 0.0 <= p <= 1.0 for p in self.analytic_pout):
            raise DomainError("analytic outage outside [0, 1]")


def combine_cdfs(f1: float, f2: float) -> float:
    """CDF of min(gamma_1, gamma_2) for independent hops: F1 + F2 - F1 F2."""
    return 1.0 - (1.0 - f1) * (1.0 - f2)


def end_to_end_cdf(sys: RelaySystem, gamma: float) -> float:
    if not gamma >= 0:
        raise DomainError(f"gamma must be >= 0, got {gamma}")
    return combine_cdfs(fs_cdf(sys.rf, gamma), gg_cdf(sys.fso, gamma))


def outage_probability(sys: RelaySystem, q: OutageQuery) -> float:
    return end_to_end_cdf(sys, q.gamma_th)


def outage_floor_mu2(sys: RelaySystem, q: OutageQuery) -> float:
    """Limit of the outage probability as mu2 grows: the RF hop alone."""
    return fs_cdf(sys.rf, q.gamma_th)


def outage_floor_mu1(sys: RelaySystem, q: OutageQuery) -> float:
    """Limit of the outage probability as mu1 grows: the FSO hop alone."""
    return gg_cdf(sys.fso, q.gamma_th)


def _point_system(base, axis, value, geometry, variant):
    if axis == "mu1":
        return replace(base, rf=replace(base.rf, mu1=db_to_linear(value))), None
    if axis == "mu2":
        return replace(base, fso=replace(base.fso, mu2=db_to_linear(value))), None
    if axis == "mu1_and_mu2":
        mu = db_to_linear(value)
        return RelaySystem(replace(base.rf, mu1=mu), replace(base.fso, mu2=mu)), None
    g = replace(geometry, length=value)
    s2 = rytov_variance(g)
    alpha, beta = turbulence_params(s2, variant)
    return replace(base, fso=GammaGammaParams(alpha, beta, base.fso.mu2)), s2


def sweep(base: RelaySystem, q: OutageQuery, axis: str, grid: Sequence[float],
          geometry: Optional[FsoGeometry] = None, variant: str = "paper_7_6",
          mc=None, workers: Optional[int] = None) -> OutageCurve:
    """Outage probability along one axis.

    ``grid`` is in dB for ``mu1``, ``mu2`` and ``mu1_and_mu2`` (the
    swept SNR replaces the corresponding field of ``base``) and in metres
    for ``fso_length``, where alpha and beta are recomputed from
    ``geometry`` at each length while mu2 stays fixed.  If ``mc`` (a
    :class:`~rffso.montecarlo.McConfig`) is given, every point also gets a
    Monte Carlo estimate drawn with that same config.  Points may be
    evaluated on ``workers`` threads; output order always follows ``grid``.
    """
    if axis not in AXES:
        raise InvalidAxisError(f"unknown axis {axis!r}; expected one of {AXES}")
    grid = tuple(float(v) for v in grid)
    if not grid:
        raise DomainError("sweep grid is empty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise DomainError("sweep grid must be strictly increasing")
    if axis == "fso_length" and geometry is None:
        raise InvalidAxisError("fso_length sweeps need an FsoGeometry")

    def point(value):
        sys, s2 = _point_system(base, axis, value, geometry, variant)
        pout = outage_probability(sys, q)
        est = None
        if mc is not None:
            from .montecarlo import estimate_outage
            e = estimate_outage(sys, q, mc)
            est = (e.p_hat, e.stderr)
        return sys, s2, pout, est

    if workers and workers > 1 and len(grid) > 1:
        with ThreadPoolExecutor(min(workers, len(grid))) as pool:
            rows = list(pool.map(point, grid))
    else:
        rows = [point(v) for v in grid]

    return OutageCurve(
        axis_name=axis,
        axis_values=grid,
        analytic_pout=tuple(r[2] for r in rows),
        mc_pout=tuple(r[3] for r in rows) if mc is not None else None,
        systems=tuple(r[0] for r in rows),
        sigma_r2=tuple(r[1] for r in rows),
    )
