"""
The two hops of the relay link
==============================

The RF hop fades with a Fisher-Snedecor F law, the optical hop with
Gamma-Gamma scintillation whose parameters follow from the path geometry.
"""

import numpy as np

from rffso import (FisherSnedecorParams, FsoGeometry, GammaGammaParams, fs_cdf, fs_mean,
                   gg_cdf, rytov_variance, turbulence_params)

# A 1 km path at 1550 nm in moderate turbulence
geom = FsoGeometry(cn2=2e-14, wavelength=1550e-9, length=1000.0)
s2 = rytov_variance(geom)
alpha, beta = turbulence_params(s2)
print(f"Rytov variance {s2:.5f} -> alpha = {alpha:.4f}, beta = {beta:.4f}")

# The plane-wave literature uses 5/6 in the beta denominator
print("beta with the 5/6 exponent: %.4f" % turbulence_params(s2, "standard_5_6")[1])

###############################################################################
# Longer paths mean stronger scintillation
for length in (500, 1000, 2000, 3000):
    g = FsoGeometry(2e-14, 1550e-9, float(length))
    a, b = turbulence_params(rytov_variance(g))
    print(f"L = {length:5d} m   alpha = {a:7.3f}   beta = {b:6.3f}")

###############################################################################
# CDFs of both hops at 10 dB average SNR.  Note that mu1 is the scale of
# the F law; the actual mean SNR is mu1 * m_s / (m_s - 1).
rf = FisherSnedecorParams(m=1.12, m_s=1.42, mu1=10.0)
fso = GammaGammaParams(alpha, beta, mu2=10.0)
print(f"RF mean SNR: {fs_mean(rf):.2f}")

for g in np.geomspace(0.1, 100, 7):
    print(f"gamma = {g:8.3f}   F_rf = {fs_cdf(rf, g):.6f}   F_fso = {gg_cdf(fso, g):.6f}")
