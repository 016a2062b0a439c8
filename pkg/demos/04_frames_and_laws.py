"""
Frames and the two entropy laws
===============================

Anchoring the window on a stage collapses the realized path up to that
stage. A deterministic kernel can only lose entropy; a refining kernel can
only gain it.
"""

import numpy as np

from timeinfo import (
    OperatorKernel,
    ProcessChain,
    TimeMomentSet,
    UnifiedTimeMeasure,
    apply_frame,
    entropy_increase_verdict,
    entropy_reduction_verdict,
    recall_entropy,
)


def chain(source, rows, realized):
    x = TimeMomentSet(0, tuple((f"x{i + 1}", p) for i, p in enumerate(source)))
    y = np.asarray(source) @ np.asarray(rows, dtype=float)
    y = TimeMomentSet(1, tuple((f"y{j + 1}", p) for j, p in enumerate(y)))
    return ProcessChain([x, y], [OperatorKernel(rows)], realized)


merged = chain([1 / 3] * 3, [[1, 0], [0, 1], [0, 1]], ["x2", "y2"])
v = entropy_reduction_verdict(merged)
print(f"merge: H(Y) = {v.lhs_bits:.7f} <= H(X) = {v.rhs_bits:.7f}, holds={v.holds}")
print(f"  H(X|Y) = {v.conditional_bits:.7f}, residual {v.decomposition_residual:.1e}")
print("  left about X once y2 is seen:", recall_entropy(merged), "bits")

split = chain([0.5, 0.5], [[0.5, 0.5, 0, 0], [0, 0, 0.5, 0.5]], ["x1", "y2"])
v = entropy_increase_verdict(split)
print(f"split: H(Y) = {v.lhs_bits:.1f} >= H(X) = {v.rhs_bits:.1f}, holds={v.holds}")

# the branch from a single point, seen from before and after it happens
branch = chain([1.0], [[0.2, 0.8]], ["x1", "y1"])
for stage in (0, 1):
    framed = apply_frame(branch, UnifiedTimeMeasure.at_stage(branch, stage))
    print(f"frame at stage {stage}: known {framed.known_stages},",
          "H(Y) =", round(framed.stages[1].entropy, 7))
print("effective probability of x1 -> y1 from t1:", apply_frame(
    branch, UnifiedTimeMeasure.at_stage(branch, 1)).effective_probability(0))
