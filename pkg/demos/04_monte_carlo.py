"""Monte Carlo verification at desk scale.

Empirical size against both Monte Carlo and asymptotic critical values,
limit-law goodness of fit, and the Schur-squared ordering of rejection
probabilities.  Sizes here use modest replication counts so the script runs
in under a minute; the acceptance suite runs the full-scale versions.
"""

import math

import numpy as np

from pmean import (RngStream, critical_value, empirical_critval, empirical_power,
                   limit_law_ks, schur2_check)

ALPHA = 0.05
D = 1000
REPS = 40_000

print(f"empirical size at d = {D}, reps = {REPS}:")
print(f"{'p':>6} | {'asym crit':>10} | {'size':>7} | {'mc crit':>10} | {'size':>7}")
for p in (-math.inf, -2.0, -0.5, 0.0, 1.0, 2.0, math.inf):
    ca = critical_value(p, D, ALPHA).value
    sa = empirical_power(p, D, np.zeros(D), ca, REPS, RngStream(1, 0), threads=2)
    cm = empirical_critval(p, D, ALPHA, REPS, RngStream(2, 0), threads=2)
    sm = empirical_power(p, D, np.zeros(D), cm.estimate, REPS, RngStream(3, 0), threads=2)
    print(f"{p:6} | {ca:10.5g} | {sa.estimate:7.4f} | {cm.estimate:10.5g} | {sm.estimate:7.4f}")

print()
print("limit-law KS fit (d = 2000, 3000 replicates):")
for p in (-2.0, -0.7, 0.0, 1.0, math.inf):
    fit = limit_law_ks(p, 2000, 3000, RngStream(4, 0), threads=2)
    print(f"  p = {p:5}: KS = {fit.distance:.4f} against {fit.law}")

print()
print("Schur-squared ordering at d = 2 (v majorizes w in squares):")
v, w = (math.sqrt(2), 0.0), (1.0, 1.0)
for p, c in ((1.0, 1.5), (2.0, 1.5), (math.inf, 1.8)):
    r = schur2_check(p, 2, c, v, w, 200_000, RngStream(5, 0), threads=2)
    print(f"  p = {p:5}: {r.tag:20s} P(v) = {r.prob_v.estimate:.4f}, "
          f"P(w) = {r.prob_w.estimate:.4f}, z = {r.z_score:+.1f}")
