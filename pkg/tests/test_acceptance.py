"""Exit criteria, one test per criterion, each at its stated size and tolerance.

Every test appends a ``PASS``/``FAIL`` line to ``RESULTS``; ``conftest.py``
prints them in the pytest terminal summary.  Running this file directly
(``python3 tests/test_acceptance.py``) prints the same lines and exits
non-zero if any criterion fails.
"""

from __future__ import annotations

import itertools
import json
import random
import sys
import time
from collections import Counter
from fractions import Fraction
from importlib import resources
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from condsup import (  # noqa: E402
    AIPViolation,
    ConditionalSystem,
    ImmediateProfit,
    LatticeVector,
    SampleSpace,
    Strategy,
    TransformSystem,
    aip_check,
    aip_check_multiperiod,
    arbitrage_bruteforce,
    cesaro_mean,
    cond_expectation,
    cond_sup,
    delta,
    invariant_partition,
    is_ergodic,
    lp_limit_estimate,
    max_ergodic_check,
    na_check,
    nearest_in_range,
    period,
    portfolio_value,
    superhedge_price,
    superhedge_verify,
    time_max,
)
from condsup.generate import (  # noqa: E402
    random_measurable,
    random_partition,
    random_rational,
    random_space,
    random_tree_market,
    random_vector,
)
from condsup.scenario import load  # noqa: E402
from golden_cases import CASES, FIXTURES, captured, matches_golden  # noqa: E402
from invariants import lattice_violations  # noqa: E402
from oracles import lp_has_arbitrage, lp_has_immediate_profit, lp_superhedge  # noqa: E402

RESULTS: list[str] = []

TITLES = {
    1: "algebraic identities, 1000 exact instances",
    2: "L^p limit, 100 vectors at p_max = 4096",
    3: "distance to R(F), 200 instances x 10^4 candidates",
    4: "AIP equivalence, 500 markets",
    5: "NA vs brute force and NA => AIP, 500 markets",
    6: "superhedging verification, 200 markets + call fixture",
    7: "ergodic characterisation, all permutations of <= 8 points",
    8: "CLI golden files, exit codes, schema",
}


# 1


def criterion_1() -> tuple[bool, str]:
    rng = random.Random(1)
    failed = Counter()
    for _ in range(1000):
        n = rng.randint(1, 12)
        space = random_space(rng, n)
        sys_ = ConditionalSystem(space, random_partition(rng, n))
        failed.update(lattice_violations(rng, sys_, random_vector(rng, space), random_vector(rng, space)))
    if failed:
        return False, "violations: " + ", ".join(f"{k} x{v}" for k, v in failed.most_common())
    return True, "1000 instances, 0 violations"


# 2


def criterion_2() -> tuple[bool, str]:
    # entries a/b with 0 <= a <= b <= 100, so M_F(|f|) <= 1 (the gap scales with the maximum)
    rng = random.Random(2)
    quarter = Fraction(1, 4)
    non_monotone, worst, worst_heavy, heavy = 0, 0.0, 0.0, 0
    for _ in range(100):
        n = rng.randint(1, 12)
        space = random_space(rng, n)
        sys_ = ConditionalSystem(space, random_partition(rng, n))
        vals = []
        for _ in range(n):
            b = rng.randint(1, 100)
            vals.append(Fraction(rng.randint(0, b), b))
        f = LatticeVector(space, vals)
        res = lp_limit_estimate(f, sys_, 4096)
        non_monotone += not res.monotone
        worst = max(worst, res.final_gap)
        gap = np.abs(res.target.to_numpy() - res.norms[-1])
        for atom in sys_.atoms:
            top = max(f[i] for i in atom)
            w_top = sum(space.weights[i] for i in atom if f[i] == top)
            if w_top / sum(space.weights[i] for i in atom) >= quarter:
                heavy += 1
                worst_heavy = max(worst_heavy, float(gap[list(atom)].max()))
    ok = non_monotone == 0 and worst < 1e-2 and worst_heavy < 1e-3
    return ok, (
        f"non-monotone {non_monotone}; max gap {worst:.3e} (< 1e-2); "
        f"max gap on {heavy} atoms with maximiser weight >= 1/4: {worst_heavy:.3e} (< 1e-3)"
    )


# 3


def criterion_3() -> tuple[bool, str]:
    rng = random.Random(3)
    nprng = np.random.default_rng(3)
    n_cand = 10_000
    identity_fail, beaten, exact_rechecks, library_spot = 0, 0, 0, 0
    for _ in range(200):
        n = rng.randint(1, 12)
        space = random_space(rng, n)
        sys_ = ConditionalSystem(space, random_partition(rng, n))
        f = random_vector(rng, space)
        g, dist = nearest_in_range(f, sys_)
        half_delta = delta(f, sys_) / 2
        if not (sys_.in_range(g) and cond_sup(abs(f - g), sys_) == half_delta == dist):
            identity_fail += 1

        atoms = sys_.atoms
        lo = [min(f[i] for i in a) for a in atoms]
        hi = [max(f[i] for i in a) for a in atoms]
        mid = [(a + b) / 2 for a, b in zip(lo, hi)]
        d = np.array([float(dist[a[0]]) for a in atoms])
        k = len(atoms)
        # candidate constants per atom: either k/1000 on a window around the atom's values
        # or mid + j/10^6, a perturbation of the optimum
        near = nprng.random((n_cand, k)) < 0.5
        lo_i = np.array([int(np.floor(float(x) * 1000)) - 1000 for x in lo])
        hi_i = np.array([int(np.ceil(float(x) * 1000)) + 1000 for x in hi])
        grid = nprng.integers(lo_i, hi_i + 1, size=(n_cand, k))
        jitter = nprng.integers(-1000, 1001, size=(n_cand, k))
        mid_f = np.array([float(x) for x in mid])
        c = np.where(near, mid_f + jitter / 1e6, grid / 1000)
        val = np.maximum(np.array([float(x) for x in hi]) - c, c - np.array([float(x) for x in lo]))
        suspects = np.nonzero(np.all(val <= d + 1e-9, axis=1))[0]
        spot = list(suspects) + list(nprng.integers(0, n_cand, size=5))
        for r in spot:
            exact_rechecks += 1
            consts = [
                mid[j] + Fraction(int(jitter[r, j]), 10**6) if near[r, j] else Fraction(int(grid[r, j]), 1000)
                for j in range(k)
            ]
            h = space.vector([consts[sys_.partition.atom_of(i)] for i in range(n)])
            got = cond_sup(abs(f - h), sys_)
            if got <= dist and got != dist:
                beaten += 1
            float_val = [max(float(hi[j] - consts[j]), float(consts[j] - lo[j])) for j in range(k)]
            if not np.allclose(float_val, val[r]):
                library_spot += 1
    ok = identity_fail == 0 and beaten == 0 and library_spot == 0
    return ok, (
        f"identity failures {identity_fail}; candidates beating the nearest point {beaten} "
        f"of {200 * n_cand} ({exact_rechecks} rechecked exactly); float/exact disagreements {library_spot}"
    )


# 4


def _cheapest_profit(m, strat, t):
    """Turn a strategy into an immediate profit if it superhedges 0 at a negative price somewhere."""
    sys_t = m.filtration.systems[t]
    v = portfolio_value(m, strat, t, m.space.zero())
    p = cond_sup(-v, sys_t)
    neg = m.space.indicator(i for i in range(m.space.size) if p[i] < 0)
    if neg.is_zero():
        return None
    restricted = Strategy(m.filtration, [h * neg for h in strat.holdings], start=t)
    return ImmediateProfit(t, restricted, p * neg)


def direct_immediate_profit(rng, m, random_tries=5):
    """Per-atom long/short one-step sign certificates, then random strategies."""
    flt, space = m.filtration, m.space
    for t in range(m.horizon):
        later = [space.zero()] * (m.horizon - t - 1)
        for atom in flt.partitions[t].atoms:
            for sign in (1, -1):
                strat = Strategy(flt, [space.indicator(atom) * sign, *later], start=t)
                cert = _cheapest_profit(m, strat, t)
                if cert is not None:
                    return cert
        for _ in range(random_tries):
            strat = Strategy(
                flt,
                [random_measurable(rng, space, flt.partitions[s], max_num=5, max_den=3) for s in range(t, m.horizon)],
                start=t,
            )
            cert = _cheapest_profit(m, strat, t)
            if cert is not None:
                return cert
    return None


def criterion_4() -> tuple[bool, str]:
    rng = random.Random(4)
    disagree, bad_cert, lp_disagree, fails = 0, 0, 0, 0
    for k in range(500):
        m = random_tree_market(rng, rng.randint(1, 3), max_leaves=8, mode=("free", "aip", "strict")[k % 3])
        one = aip_check(m)
        multi = aip_check_multiperiod(m)
        direct = direct_immediate_profit(rng, m)
        verdicts = {one.holds, multi.holds, direct is None}
        disagree += len(verdicts) > 1
        if not one.holds:
            fails += 1
            bad_cert += not one.violations or not all(v.certificate.verify(m) for v in one.violations)
        if direct is not None:
            bad_cert += not direct.verify(m)
        lp_disagree += one.holds == lp_has_immediate_profit(m)
    ok = disagree == 0 and bad_cert == 0 and lp_disagree == 0
    return ok, (
        f"{fails} markets fail AIP; verdict disagreements {disagree}; invalid certificates {bad_cert}; "
        f"LP oracle disagreements {lp_disagree}"
    )


# 5


def criterion_5() -> tuple[bool, str]:
    rng = random.Random(5)
    strict, mismatch, na_not_aip, errors, lp_disagree, bad_cert, na_holds = 0, 0, 0, 0, 0, 0, 0
    for k in range(500):
        m = random_tree_market(rng, rng.randint(1, 3), max_leaves=8, mode=("free", "aip", "strict")[k % 3])
        try:
            na = na_check(m)
            bf = arbitrage_bruteforce(m)
            if na.strict:
                strict += 1
                mismatch += na.holds != bf.holds
            if na.holds:
                na_holds += 1
                na_not_aip += not aip_check(m).holds
            lp_disagree += bf.holds == lp_has_arbitrage(m)
            bad_cert += not all(c.verify(m) for c in bf.certificates)
        except Exception:  # any exception counts against the criterion
            errors += 1
    ok = mismatch == 0 and na_not_aip == 0 and errors == 0 and lp_disagree == 0 and bad_cert == 0
    return ok, (
        f"{strict} strict markets, mismatches {mismatch}; NA holds on {na_holds}, of which without AIP {na_not_aip}; "
        f"exceptions {errors}; LP brute-force disagreements {lp_disagree}; invalid certificates {bad_cert}"
    )


# 6


def criterion_6() -> tuple[bool, str]:
    rng = random.Random(6)
    eps = Fraction(1, 1000)
    not_certified, not_refuted, lp_off = 0, 0, 0
    for k in range(200):
        m = random_tree_market(rng, rng.randint(1, 2), max_leaves=8, mode=("aip", "strict")[k % 2])
        h = m.space.vector([random_rational(rng, 20, 4, nonneg=True) for _ in range(m.space.size)])
        res = superhedge_price(m, h, 0)
        ver = superhedge_verify(m, h, 0, res.price, eps)
        not_certified += not ver.certified
        not_refuted += not ver.refuted
        lp = lp_superhedge(m, h, 0)
        lp_off += any(abs(lp[a] - float(res.price[a[0]])) > 1e-6 for a in m.filtration.partitions[0].atoms)
    sc = load(FIXTURES / "call.json")
    call = superhedge_price(sc.market, sc.claim("call"), 0).price
    call_ok = call == sc.space.unit()
    ok = not_certified == 0 and not_refuted == 0 and lp_off == 0 and call_ok
    return ok, (
        f"uncertified {not_certified}, unrefuted pi - 1/1000 {not_refuted}, LP price mismatches {lp_off}; "
        f"call fixture pi_0 = {call[0]}"
    )


# 7


def _single_cycle(tau) -> bool:
    i, steps = tau[0], 1
    while i != 0:
        i, steps = tau[i], steps + 1
    return steps == len(tau)


def criterion_7() -> tuple[bool, str]:
    rng = random.Random(7)
    systems, ergodic_count = 0, 0
    wrong_verdict, wrong_report, bad_counter, cesaro_fail, inv_fail = 0, 0, 0, 0, 0
    for n in range(1, 9):
        space = SampleSpace.uniform(n)
        trivial = ConditionalSystem.trivial(space)
        # F f does not depend on tau, so one pool of 100 vectors per size serves every system
        pool = [random_vector(rng, space) for _ in range(100)]
        expect = [cond_expectation(f, trivial) for f in pool]
        for tau in itertools.permutations(range(n)):
            systems += 1
            ts = TransformSystem(space, tau)
            single = _single_cycle(tau)
            wrong_verdict += is_ergodic(ts) != single
            rep = max_ergodic_check(ts, trials=5, seed=systems)
            wrong_report += rep.consistent != single
            per = period(ts)
            if single:
                ergodic_count += 1
                cesaro_fail += sum(cesaro_mean(ts, f, per) != e for f, e in zip(pool, expect))
            else:
                ce = rep.counterexample
                bad_counter += ce is None or time_max(ts, ce) == cond_sup(ce, ts.sys)
                inv = ConditionalSystem(space, invariant_partition(ts))
                f = pool[systems % 100]
                inv_fail += cesaro_mean(ts, f, per) != cond_expectation(f, inv)
    ok = not (wrong_verdict or wrong_report or bad_counter or cesaro_fail or inv_fail)
    return ok, (
        f"{systems} systems ({ergodic_count} single cycles): wrong ergodic verdicts {wrong_verdict}, "
        f"wrong max-ergodic reports {wrong_report}, unverified counterexamples {bad_counter}, "
        f"Cesaro != F f {cesaro_fail} of {100 * ergodic_count}, Cesaro != invariant expectation {inv_fail}"
    )


# 8


def criterion_8() -> tuple[bool, str]:
    import jsonschema

    schema = json.loads(resources.files("condsup").joinpath("schemas/report.schema.json").read_text())
    validator = jsonschema.Draft202012Validator(schema)
    mismatched, invalid = [], []
    commands = set()
    for name in CASES:
        commands.add(CASES[name][0][0])
        for fmt in ("text", "json"):
            ok, why = matches_golden(name, fmt)
            if not ok:
                mismatched.append(f"{name}.{fmt}: {why}")
        if list(validator.iter_errors(json.loads(captured(name, "json")[1]))):
            invalid.append(name)
    codes = sorted({c for _, c in CASES.values()})
    ok = not mismatched and not invalid and commands == {"condops", "check", "price", "ergodic"} and codes == [0, 1, 2, 3]
    detail = f"{len(CASES)} cases x 2 formats over {sorted(commands)}, exit codes {codes}"
    if mismatched:
        detail += "; mismatched: " + ", ".join(mismatched)
    if invalid:
        detail += "; schema-invalid: " + ", ".join(invalid)
    return ok, detail


CRITERIA = {1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5, 6: criterion_6, 7: criterion_7, 8: criterion_8}


def run_criterion(n: int) -> tuple[bool, str]:
    start = time.perf_counter()
    ok, detail = CRITERIA[n]()
    line = f"{'PASS' if ok else 'FAIL'} criterion {n} ({TITLES[n]}): {detail} [{time.perf_counter() - start:.1f}s]"
    RESULTS.append(line)
    print(line)
    return ok, detail


@pytest.mark.acceptance
@pytest.mark.parametrize("n", sorted(CRITERIA))
def test_criterion(n):
    ok, detail = run_criterion(n)
    assert ok, detail


if __name__ == "__main__":
    outcomes = [run_criterion(n)[0] for n in sorted(CRITERIA)]
    sys.exit(0 if all(outcomes) else 1)
