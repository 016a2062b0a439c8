"""
Entropy, information volume and the knowledge gate
==================================================

Measures are evaluated in a context. Once the window contains the moment of
an event, that event is knowledge and carries no information.
"""

from timeinfo import (
    Direction,
    MeasureContext,
    OperatorKernel,
    TimeMoment,
    TimeMomentSet,
    conditional_entropy,
    entropy,
    information_volume,
    knowledge_step_profile,
    mutual_information_volume,
)

y = TimeMomentSet.from_mapping(3, {"y1": 0.2, "y2": 0.8})
print("H(Y) with no observation", round(entropy(y), 7))
for anchor in (2, 3, 4):
    ctx = MeasureContext.at(anchor)
    print(f"anchor {anchor}: H = {entropy(y, ctx):.7f}, I(y1) = {information_volume(y, 'y1', ctx):.7f}")

# the same switch, as a series over anchors
print(knowledge_step_profile(TimeMoment(3), range(6)))

# conditional and mutual quantities involve two moments and take no window
x = TimeMomentSet.uniform(0, ["x1", "x2", "x3"])
k = OperatorKernel([[1, 0], [0, 1], [0, 1]])
print("H(Y|X)", conditional_entropy(x, k, Direction.FORWARD))
print("H(X|Y)", round(conditional_entropy(x, k, Direction.BACKWARD), 7))
mi = mutual_information_volume(x, k)
print("I(X;Y)", round(mi, 7), "analytic only:", mi.analytic_only)
