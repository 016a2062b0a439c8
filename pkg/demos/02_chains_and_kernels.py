"""
Moment sets, kernels and chain validation
=========================================

Build a two-stage chain, push a distribution through a kernel, reverse it
with Bayes, and see what validation reports when the stages disagree.
"""

import numpy as np

from timeinfo import OperatorKernel, ProcessChain, TimeMomentSet, pushforward, reverse_kernel, validate_chain

x = TimeMomentSet.uniform(0, ["x1", "x2", "x3"])
merge = OperatorKernel([[1, 0], [0, 1], [0, 1]])
print(merge)

y = pushforward(x, merge)
print("pushforward", y.as_dict())

marginal, back = reverse_kernel(x, merge)
print("p(x | y) rows\n", np.round(back.rows, 4))

chain = ProcessChain([x, y], [merge])
print("consistent chain ok:", validate_chain(chain).ok)

# declare a target the kernel cannot produce
wrong = TimeMomentSet.from_mapping(1, {"y1": 0.5, "y2": 0.5})
for v in validate_chain(ProcessChain([x, wrong], [merge])).violations:
    print(v)
