"""
Lost branches and information conservation
==========================================

When y1 happens, the branch to y2 did not. Booking that lost mass in an
absorbing extra state keeps the information volume of the realized path
constant; the raw product of probabilities does not.
"""

from timeinfo import (
    BLACK_HOLE,
    OperatorKernel,
    ProcessChain,
    TimeMomentSet,
    classify_variation,
    conservation_check,
    extend_with_blackhole,
    raw_conservation_check,
)

x = TimeMomentSet.from_mapping(0, {"x1": 1.0})
y = TimeMomentSet.from_mapping(1, {"y1": 0.2, "y2": 0.8})
k = OperatorKernel([[0.2, 0.8]])
chain = ProcessChain([x, y], [k], ["x1", "y1"])

ext = extend_with_blackhole(chain)
for entry in ext.ledger:
    print(entry)
t = ext.transitions[0]
print("extended rows", t.target_labels)
print(t.rows)
print("x1 ->", BLACK_HOLE, t.probability("x1", BLACK_HOLE))

print("with black hole:", conservation_check(ext))
print("raw:", raw_conservation_check(chain))

# how surprising was the realization?
for label in ("y1", "y2"):
    print(label, classify_variation(x, k, label))
tiny = OperatorKernel([[1e-8, 1 - 1e-8]])
print("rare branch:", classify_variation(x, tiny, "y1").kind)
