"""The ARE phase transition in the direction of the alternative.

For p > 2, the p-mean test's efficiency relative to the 2-mean (likelihood
ratio) test is a_p < 1 for equalized directions but infinite for directions
dominated by few large coordinates; the switch happens at the growth
threshold d^{(p-2)/(4p)} of <u>_p.  Sample-size ratios make the transition
tangible at finite d.
"""

import math

import numpy as np

from pmean import (TestPlan, a_p, ap_curve, attaining_sequence, block_sequence,
                   classify_are, equalized_sequence, sample_size, spike_sequence)

ALPHA, BETA = 0.05, 0.95

print("a_p along the exponent line (equalized-direction ARE):")
for p, ap in ap_curve([-0.4, 0.0, 0.5, 1.0, 2.0, 3.0, 5.0, 10.0]):
    print(f"  a_{p:<5g} = {ap:.6f}")

print()
print("verdicts for p = 3 at (0.05, 0.95):")
for name, seq in (("equalized", equalized_sequence()), ("spike", spike_sequence()),
                  ("block d^0.8", block_sequence(0.8))):
    v = classify_are(3.0, seq, ALPHA, BETA)
    print(f"  {name:12s}: {v.tag:9s} {v.value if v.value is not None else ''}  [{v.rationale}]")

print()
print("sample-size ratios n_2/n_3 converging to a_3 (equalized) or diverging (spike):")
for d in (100, 10_000, 1_000_000):
    theta = np.full(d, d ** -0.5)
    n2 = sample_size(TestPlan(2.0, d, ALPHA, BETA, theta))
    n3 = sample_size(TestPlan(3.0, d, ALPHA, BETA, theta))
    spike = np.zeros(d)
    spike[0] = 1.0
    m2 = sample_size(TestPlan(2.0, d, ALPHA, BETA, spike))
    m3 = sample_size(TestPlan(3.0, d, ALPHA, BETA, spike))
    print(f"  d = {d:>8}: equalized {n2 / n3:.4f} (a_3 = {a_p(3.0):.4f}), "
          f"spike {m2 / m3:.3f}")

print()
print("block constructions attaining intermediate ARE values (p = 3, d = 1e6):")
d = 1_000_000
for target in (1.5, 3.0, 8.0):
    u = attaining_sequence(3.0, target, ALPHA, BETA).probe(d)
    theta = u / math.sqrt(d)
    ratio = (sample_size(TestPlan(2.0, d, ALPHA, BETA, theta))
             / sample_size(TestPlan(3.0, d, ALPHA, BETA, theta)))
    print(f"  target {target:4.1f}: achieved {ratio:.4f} "
          f"(block of {int(np.count_nonzero(u))} coordinates)")
