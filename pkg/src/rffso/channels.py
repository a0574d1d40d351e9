"""Hop models: Fisher-Snedecor F fading (RF) and Gamma-Gamma turbulence (FSO).

All SNR quantities are linear.  Densities and distribution functions are
evaluated in log space and exponentiated once.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .specfun import DomainError, gauss_2f1_nonpos, gg_cdf_kernel, ln_beta, log_bessel_k

__all__ = [
    "FisherSnedecorParams",
    "GammaGammaParams",
    "FsoGeometry",
    "LinkBudget",
    "BETA_EXPONENT_VARIANTS",
    "fs_pdf",
    "fs_cdf",
    "fs_mean",
    "gg_pdf",
    "gg_cdf",
    "rytov_variance",
    "turbulence_params",
    "mu1_from_budget",
    "mu2_from_budget",
]

BETA_EXPONENT_VARIANTS = ("paper_7_6", "standard_5_6")


def _positive(owner, **fields):
    for name, value in fields.items():
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise DomainError(f"{owner}.{name} must be a real number, got {value!r}")
        if not (math.isfinite(value) and value > 0):
            raise DomainError(f"{owner}.{name} must be finite and > 0, got {value}")


@dataclass(frozen=True)
class FisherSnedecorParams:
    """RF hop: fading severity ``m``, shadowing ``m_s`` and SNR scale ``mu1``."""

    m: float
    m_s: float
    mu1: float

    def __post_init__(self):
        _positive("FisherSnedecorParams", m=self.m, m_s=self.m_s, mu1=self.mu1)


@dataclass(frozen=True)
class GammaGammaParams:
    """FSO hop: turbulence parameters ``alpha``, ``beta`` and average electrical SNR ``mu2``."""

    alpha: float
    beta: float
    mu2: float

    def __post_init__(self):
        _positive("GammaGammaParams", alpha=self.alpha, beta=self.beta, mu2=self.mu2)

    @classmethod
    def from_geometry(cls, geometry: FsoGeometry, mu2: float,
                      variant: str = "paper_7_6") -> GammaGammaParams:
        alpha, beta = turbulence_params(rytov_variance(geometry), variant)
        return cls(alpha, beta, mu2)


@dataclass(frozen=True)
class FsoGeometry:
    """Physical FSO path: ``cn2`` [m^-2/3], ``wavelength`` [m], ``length`` [m]."""

    cn2: float
    wavelength: float
    length: float

    def __post_init__(self):
        _positive("FsoGeometry", cn2=self.cn2, wavelength=self.wavelength,
                  length=self.length)
        if not 1e-17 <= self.cn2 <= 1e-12:
            warnings.warn(f"C_n^2 = {self.cn2:g} m^-2/3 is outside the usual "
                          "1e-17..1e-12 range", stacklevel=3)
        if not 1e-7 < self.wavelength < 1e-5:
            warnings.warn(f"wavelength {self.wavelength:g} m is outside the "
                          "optical band", stacklevel=3)


@dataclass(frozen=True)
class LinkBudget:
    """Transmit powers, photodetector responsivity and noise variances (SI units)."""

    pt: float
    eta: float
    sigma_d2: float
    ps: float
    sigma_r2: float

    def __post_init__(self):
        _positive("LinkBudget", pt=self.pt, eta=self.eta, sigma_d2=self.sigma_d2,
                  ps=self.ps, sigma_r2=self.sigma_r2)


def _gamma_arg(gamma, strict=False):
    if isinstance(gamma, bool) or not isinstance(gamma, (int, float)):
        raise DomainError(f"gamma must be real, got {gamma!r}")
    gamma = float(gamma)
    if math.isnan(gamma) or gamma < 0 or (strict and gamma == 0):
        raise DomainError(f"gamma must be {'> 0' if strict else '>= 0'}, got {gamma}")
    return gamma


# ---------------------------------------------------------------------------
# RF hop
# ---------------------------------------------------------------------------

def fs_pdf(p: FisherSnedecorParams, gamma: float) -> float:
    """Density of the RF-hop SNR.

    For ``m < 1`` the density has a pole at zero; ``fs_pdf(p, 0.0)`` then
    returns ``math.inf`` rather than raising.
    """
    gamma = _gamma_arg(gamma)
    m, ms = p.m, p.m_s
    if math.isinf(gamma):
        return 0.0
    scale = ms * p.mu1
    if gamma == 0:
        if m < 1:
            return math.inf
        if m > 1:
            return 0.0
        return math.exp(-math.log(scale) - ln_beta(m, ms))
    u = m * gamma / scale
    log_u = math.log(m) + math.log(gamma) - math.log(scale)
    log_f = (math.log(m / scale) + (m - 1) * log_u
             - (m + ms) * math.log1p(u) - ln_beta(m, ms))
    return math.exp(log_f)


def fs_cdf(p: FisherSnedecorParams, gamma: float) -> float:
    """CDF of the RF-hop SNR through its hypergeometric closed form."""
    gamma = _gamma_arg(gamma)
    if gamma == 0:
        return 0.0
    if math.isinf(gamma):
        return 1.0
    m, ms = p.m, p.m_s
    log_u = math.log(m) + math.log(gamma) - math.log(ms * p.mu1)
    if log_u > 0:
        # upper half: the survival function has the same form with
        # (m, m_s) swapped and u -> 1/u, so F = 1 - S stays accurate near 1
        return 1.0 - _fs_half(ms, m, -log_u)
    return _fs_half(m, ms, log_u)


def _fs_half(a, b, log_u):
    """u^a 2F1(a, a+b; a+1; -u) / (a B(a, b)), i.e. I_x(a, b) with x = u/(1+u)."""
    u = math.exp(log_u)
    h = gauss_2f1_nonpos(a, a + b, a + 1, -u).value if u > 0 else 1.0
    log_f = a * log_u - math.log(a) - ln_beta(a, b) + math.log(h)
    return min(math.exp(log_f), 1.0)


def fs_mean(p: FisherSnedecorParams) -> float:
    """E[gamma_1] = mu1 * m_s / (m_s - 1); finite only for m_s > 1."""
    if p.m_s <= 1:
        raise DomainError(f"mean diverges for m_s <= 1 (m_s = {p.m_s})")
    return p.mu1 * p.m_s / (p.m_s - 1)


# ---------------------------------------------------------------------------
# FSO hop
# ---------------------------------------------------------------------------

def gg_pdf(p: GammaGammaParams, gamma: float) -> float:
    """Density of the FSO-hop SNR gamma_2 = mu2 * I^2 with Gamma-Gamma irradiance I.

    The Bessel argument is 2*sqrt(alpha*beta)*(gamma/mu2)^(1/4), the form
    that follows from the change of variables and integrates to one.
    """
    gamma = _gamma_arg(gamma, strict=True)
    if math.isinf(gamma):
        return 0.0
    a, b = p.alpha, p.beta
    log_r = math.log(gamma) - math.log(p.mu2)
    arg = 2.0 * math.sqrt(a * b) * math.exp(0.25 * log_r)
    log_f = (0.5 * (a + b) * math.log(a * b) - math.lgamma(a) - math.lgamma(b)
             - math.log(p.mu2) + (0.25 * (a + b) - 1.0) * log_r
             + log_bessel_k(a - b, arg).value)
    return math.exp(log_f) if log_f > -745.2 else 0.0


def gg_cdf(p: GammaGammaParams, gamma: float) -> float:
    gamma = _gamma_arg(gamma)
    z = p.alpha * p.beta * math.sqrt(gamma / p.mu2)
    return gg_cdf_kernel(p.alpha, p.beta, z).value


def rytov_variance(g: FsoGeometry) -> float:
    """sigma_R^2 = 1.23 C_n^2 k^(7/6) L^(11/6) with k = 2 pi / lambda."""
    k = 2.0 * math.pi / g.wavelength
    return 1.23 * g.cn2 * k ** (7.0 / 6.0) * g.length ** (11.0 / 6.0)


def turbulence_params(sigma_r2: float, variant: str = "paper_7_6") -> tuple[float, float]:
    """Large- and small-scale scintillation parameters (alpha, beta) from the Rytov variance.

    ``variant="paper_7_6"`` uses the exponent 7/6 in both denominators;
    ``"standard_5_6"`` uses 5/6 for beta as in the plane-wave literature.
    """
    if isinstance(sigma_r2, bool) or not isinstance(sigma_r2, (int, float)) \
            or not (math.isfinite(sigma_r2) and sigma_r2 > 0):
        raise DomainError(f"Rytov variance must be finite and > 0, got {sigma_r2!r}")
    if variant not in BETA_EXPONENT_VARIANTS:
        raise DomainError(f"unknown beta exponent variant {variant!r}")
    s125 = sigma_r2 ** 1.2
    beta_exp = 7.0 / 6.0 if variant == "paper_7_6" else 5.0 / 6.0
    x_a = 0.49 * sigma_r2 / (1.0 + 1.11 * s125) ** (7.0 / 6.0)
    x_b = 0.51 * sigma_r2 / (1.0 + 0.69 * s125) ** beta_exp
    # expm1 keeps the weak-turbulence limit 1/x exact
    return 1.0 / math.expm1(x_a), 1.0 / math.expm1(x_b)


def mu2_from_budget(b: LinkBudget) -> float:
    """Average electrical SNR of the FSO hop, P_t^2 eta^2 / sigma_d^2 (E[I] = 1)."""
    return b.pt ** 2 * b.eta ** 2 / b.sigma_d2


def mu1_from_budget(b: LinkBudget, power_gain: float = 1.0) -> float:
    """RF SNR scale P_s * power_gain / sigma_r^2.

    ``power_gain`` is the mean channel power gain; the hop model itself
    takes ``mu1`` directly, this is a convenience for budget-driven setups.
    """
    _positive("mu1_from_budget", power_gain=power_gain)
    return b.ps * power_gain / b.sigma_r2
