"""Exact finite-dimensional ARE at d = 2 by quadrature.

In the continuous-sample-size Gaussian model the ARE is a ratio of squared
shift scales solving exact size and power equations.  At d = 2 the p-mean
test can beat the likelihood ratio test by at most ~3.2%, attained at p = 1
for equalized directions and, by the quarter-turn symmetry of the unit
balls, at p = infinity for the spike direction.
"""

import math

from pmean import are_finite

ALPHA, BETA = 0.05, 0.95
EQ = (1.0, 1.0)
SPIKE = (math.sqrt(2.0), 0.0)

print(f"d = 2, (alpha, beta) = ({ALPHA}, {BETA})")
print(f"  are_(1,2)   equalized : {are_finite(1.0, 2, EQ, ALPHA, BETA):.5f}")
print(f"  are_(inf,2) spike     : {are_finite(math.inf, 2, SPIKE, ALPHA, BETA):.5f}")
print(f"  are_(2.1,2) spike     : {are_finite(2.1, 2, SPIKE, ALPHA, BETA):.5f}")
print(f"  are_(1.9,2) equalized : {are_finite(1.9, 2, EQ, ALPHA, BETA):.5f}")
print(f"  are_(2,2)   any       : {are_finite(2.0, 2, (0.37, 1.2), ALPHA, BETA):.5f}")

print()
print("Schur-squared ordering of the direction dependence:")
for p in (1.0, 3.0):
    eq = are_finite(p, 2, EQ, ALPHA, BETA)
    sp = are_finite(p, 2, SPIKE, ALPHA, BETA)
    rel = ">=" if eq >= sp else "<"
    print(f"  p = {p}: equalized {eq:.5f} {rel} spike {sp:.5f}")
