"""
Time maxima and space maxima under a permutation
================================================

A weight-preserving permutation tau of the outcomes acts by S f = f o tau.
The system is ergodic exactly when tau is a single cycle, and then the
maximum of f along its orbit equals its global maximum everywhere.
"""

from condsup import (
    SampleSpace,
    TransformSystem,
    cesaro_mean,
    cond_sup,
    is_ergodic,
    max_ergodic_check,
    period,
    time_max,
)

three = TransformSystem(SampleSpace.uniform(3), [1, 2, 0])
f = three.space.vector([1, 2, 3])
print("3-cycle ergodic:", is_ergodic(three))
print("  time max", time_max(three, f).as_strings(), " space max", cond_sup(f, three.sys).as_strings())
print("  Cesaro mean over one period", cesaro_mean(three, f, period(three)).as_strings())

###############################################################################
# Two 2-cycles: the orbit of outcome 0 never reaches outcome 2, so the time
# maximum stays below the global maximum there.

two = TransformSystem(SampleSpace.uniform(4), [1, 0, 3, 2])
g = two.space.vector([1, 2, 5, 6])
print("two 2-cycles ergodic:", is_ergodic(two))
print("  time max", time_max(two, g).as_strings(), " space max", cond_sup(g, two.sys).as_strings())

###############################################################################
# The randomized check confirms the first system and produces the indicator
# of a cycle as a counterexample for the second.

print("3-cycle:", max_ergodic_check(three, trials=200))
print("2+2:    ", max_ergodic_check(two, trials=200).counterexample.as_strings())
