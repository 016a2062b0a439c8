"""
Cross-checking against exact rationals
======================================

The oracle enumerates every path with Fraction arithmetic and compares the
float engine against it on random chains.
"""

from fractions import Fraction

from timeinfo.oracle import RationalChain, enumerate_joint, oracle_entropy_laws, pair_measures

rc = RationalChain.from_source([Fraction(1, 3)] * 3, [[1, 0], [0, 1], [0, 1]])
joint = enumerate_joint(rc)
for path, p in joint.items():
    print(path, p)
for name, value in pair_measures(joint).items():
    print(f"{name:7s} {value:.7f}")

report = oracle_entropy_laws(trials=2000, seed=42)
print("kinds", report.kinds, "divergences", len(report.divergences))
print("bijections", report.bijections, "equalities", report.equalities, "max gap", report.max_gap)

hard = oracle_entropy_laws(trials=500, seed=1, adversarial=True)
print("adversarial passed:", hard.passed)
