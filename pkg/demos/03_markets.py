"""
Immediate profit, arbitrage and superhedging
============================================

A one-asset market on a scenario tree.  Absence of immediate profit (AIP)
asks that every price lie between the conditional infimum and supremum of the
next price.  Under AIP the minimal superhedging price of a claim is finite and
computed by backward induction.
"""

from fractions import Fraction

from condsup import (
    Filtration,
    MarketModel,
    SampleSpace,
    aip_check,
    na_check,
    superhedge_price,
    superhedge_verify,
)


def one_step(s0, up, down):
    space = SampleSpace.uniform(2)
    flt = Filtration(space, [[[0, 1]], [[0], [1]]])
    return MarketModel(flt, [[s0, s0], [up, down]])


###############################################################################
# 5 -> (6, 4) is fine.  5 -> (6, 11/2) is not: buying one unit at 5 always
# gains at least 1/2, so the zero claim can be superhedged at price -1/2.

print("5 -> (6, 4):    AIP", aip_check(one_step(5, 6, 4)).holds)
rep = aip_check(one_step(5, 6, Fraction(11, 2)))
v = rep.violations[0]
print("5 -> (6, 11/2): AIP", rep.holds, f"({v.side} bound, certificate price {v.certificate.price[0]})")

###############################################################################
# 5 -> (6, 5) satisfies AIP but admits an arbitrage: hold one unit, never lose,
# sometimes gain.

na = na_check(one_step(5, 6, 5))
print("5 -> (6, 5):    AIP", na.aip, " NA", na.holds, f"(decided by {na.decided_by})")

###############################################################################
# A call with strike 5 on 4 -> (8, 2) pays (3, 0).  The cheapest superhedge
# costs 1 and holds half a unit; the verifier certifies 1 and shows that
# 1 - 1/1000 cannot superhedge.

m = one_step(4, 8, 2)
h = m.space.vector([3, 0])
res = superhedge_price(m, h)
ver = superhedge_verify(m, h, 0, res.price)
print(f"call: pi_0 = {res.price[0]}, theta_0 = {res.strategy.at(0)[0]}, minimal: {ver.minimal}")

###############################################################################
# Two periods, recombining: 4 -> (8, 2) -> (16, 4, 4, 1), call struck at 5.

space = SampleSpace.uniform(4)
flt = Filtration(space, [[[0, 1, 2, 3]], [[0, 1], [2, 3]], [[0], [1], [2], [3]]])
m2 = MarketModel(flt, [[4] * 4, [8, 8, 2, 2], [16, 4, 4, 1]])
res2 = superhedge_price(m2, space.vector([11, 0, 0, 0]))
for t, v in enumerate(res2.values):
    print(f"pi_{t} = {v.as_strings()}")
print("hedge at t=1:", res2.strategy.at(1).as_strings())
