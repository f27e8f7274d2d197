"""
Maxingales on a binary tree
===========================

A filtration is a refining sequence of partitions.  Taking conditional
suprema of a terminal vector backwards in time gives a maxingale: each step
is the conditional supremum of the next.  Read x_t as the best terminal
outcome still possible given what is known at time t.
"""

from condsup import (
    AdaptedProcess,
    Filtration,
    SampleSpace,
    classify_maxingale,
    maxingale_from_terminal,
    running_max,
)

space = SampleSpace.uniform(4)
flt = Filtration(space, [[[0, 1, 2, 3]], [[0, 1], [2, 3]], [[0], [1], [2], [3]]])

x = maxingale_from_terminal(space.vector([1, 3, 2, 6]), flt)
for t, v in enumerate(x):
    print(f"x_{t} = {v.as_strings()}")
print("classified as:", classify_maxingale(x).label)

###############################################################################
# A process that decreases in conditional supremum is a super-maxingale.

down = AdaptedProcess(flt, [[9] * 4, [3, 3, 6, 6], [1, 3, 2, 6]])
print("steps:", classify_maxingale(down).steps, "->", classify_maxingale(down).label)

###############################################################################
# The running maximum of any adapted process is a sub-maxingale.

proc = AdaptedProcess(flt, [[2] * 4, [1, 1, 4, 4], [3, 0, 5, 1]])
g = running_max(proc)
for t, v in enumerate(g):
    print(f"g_{t} = {v.as_strings()}")
print("running max is sub-maxingale:", classify_maxingale(g).is_sub)
