"""
Outage floors
=============

Improving one hop only helps until the other hop dominates: as mu2 grows
the outage probability settles on the RF hop CDF at the threshold, and as
mu1 grows it settles on the FSO hop CDF.
"""

import numpy as np

from rffso import (FisherSnedecorParams, FsoGeometry, GammaGammaParams, OutageQuery,
                   RelaySystem, outage_floor_mu1, outage_floor_mu2, sweep)

geom = FsoGeometry(2e-14, 1550e-9, 1000.0)
q = OutageQuery(gamma_th=1.0)

states = {
    "head-to-head LoS": (1.12, 1.42),
    "head-to-head NLoS": (1.09, 2.25),
}

###############################################################################
# Sweep mu2 with mu1 held at 20 dB
for name, (m, ms) in states.items():
    base = RelaySystem(FisherSnedecorParams(m, ms, 100.0), GammaGammaParams.from_geometry(geom, 1.0))
    curve = sweep(base, q, "mu2", np.arange(0, 61, 10))
    print(name)
    for x, p in zip(curve.axis_values, curve.analytic_pout):
        print(f"   mu2 = {x:4.0f} dB   P_out = {p:.6e}")
    print(f"   floor (RF hop alone): {outage_floor_mu2(base, q):.6e}")

###############################################################################
# Sweep mu1 for three path lengths, mu2 at 20 dB.  The FSO hop sets the floor.
for length in (1000.0, 2000.0, 3000.0):
    g = FsoGeometry(2e-14, 1550e-9, length)
    base = RelaySystem(FisherSnedecorParams(1.12, 1.42, 1.0), GammaGammaParams.from_geometry(g, 100.0))
    curve = sweep(base, q, "mu1", [20.0, 40.0, 60.0])
    pts = "  ".join(f"{p:.3e}" for p in curve.analytic_pout)
    print(f"L = {length:6.0f} m   P_out at 20/40/60 dB: {pts}   floor {outage_floor_mu1(base, q):.3e}")
