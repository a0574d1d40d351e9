"""
Checking the closed form by simulation
======================================

Draw both hop SNRs from their physical constructions and count how often
the weaker hop falls below the threshold.
"""

from rffso import (FisherSnedecorParams, GammaGammaParams, McConfig, OutageQuery,
                   RelaySystem, db_to_linear, estimate_outage, outage_probability)

q = OutageQuery(gamma_th=1.0)
cfg = McConfig(samples=1_000_000, seed=2024, streams=4)

for snr_db in (0, 10, 20, 30):
    mu = db_to_linear(snr_db)
    system = RelaySystem(FisherSnedecorParams(0.75, 4.27, mu),
                         GammaGammaParams(6.896, 5.774, mu))
    p = outage_probability(system, q)
    est = estimate_outage(system, q, cfg, workers=4)
    z = (est.p_hat - p) / est.stderr
    print(f"{snr_db:3d} dB   analytic {p:.6e}   simulated {est.p_hat:.6e} "
          f"+/- {est.stderr:.1e}   z = {z:+.2f}")
