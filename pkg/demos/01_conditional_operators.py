"""
Conditional supremum and infimum on a finite space
==================================================

Four equally likely outcomes, and a sub-sigma-algebra generated by the
partition {0,1} {2,3}.  The conditional expectation averages over each atom;
the conditional supremum and infimum take the atomwise max and min.
"""

from fractions import Fraction

from condsup import (
    ConditionalSystem,
    Partition,
    SampleSpace,
    cond_expectation,
    cond_inf,
    cond_sup,
    delta,
    lp_limit_estimate,
    nearest_in_range,
)

space = SampleSpace.uniform(4)
sys = ConditionalSystem(space, Partition([[0, 1], [2, 3]], 4))
f = space.vector([1, 3, 2, 6])

print("f      ", f.as_strings())
print("F f    ", cond_expectation(f, sys).as_strings())
print("M_F f  ", cond_sup(f, sys).as_strings())
print("m_F f  ", cond_inf(f, sys).as_strings())

###############################################################################
# The sandwich m_F f <= F f <= M_F f always holds, and M_F is the least
# element constant on atoms that dominates f.

assert cond_inf(f, sys) <= cond_expectation(f, sys) <= cond_sup(f, sys)

###############################################################################
# Sub-additivity is strict in general: the supremum of a sum can be smaller
# than the sum of suprema when the maxima sit on different outcomes.

g = space.vector([3, 1, 6, 2])
print("M(f+g) ", cond_sup(f + g, sys).as_strings(), " M f + M g", (cond_sup(f, sys) + cond_sup(g, sys)).as_strings())

###############################################################################
# delta(f) = M_F f - m_F f measures how far f is from being measurable.  Half
# of it is the distance to the closest measurable vector, attained at the
# atomwise midpoint.

nearest, dist = nearest_in_range(f, sys)
print("delta  ", delta(f, sys).as_strings())
print("nearest", nearest.as_strings(), " distance", dist.as_strings())

###############################################################################
# Conditional L^p norms approach the conditional supremum as p grows.  The gap
# shrinks roughly like 1/p.

res = lp_limit_estimate(f, sys, p_max=1024)
for p, gap in zip(res.ps, res.gaps):
    print(f"p = {p:5d}   sup gap {gap:.3e}")

###############################################################################
# Weights need not be uniform; everything stays exact.

skew = SampleSpace([Fraction(1, 2), Fraction(1, 6), Fraction(1, 6), Fraction(1, 6)])
skew_sys = ConditionalSystem(skew, Partition([[0, 1], [2, 3]], 4))
print("skewed F f", cond_expectation(skew.vector([1, 3, 2, 6]), skew_sys).as_strings())
