"""Conditional expectation preserving systems given by weight-preserving permutations.

``S f = f o tau`` is a Riesz homomorphism with ``S e = e``; with ``F`` the
global expectation, ``F S = F`` holds exactly when ``tau`` preserves the
weights.  Powers of ``S`` repeat with period ``lcm`` of the cycle lengths, so
suprema and averages over all times are finite computations.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .lattice import (
    ConditionalSystem,
    LatticeError,
    LatticeVector,
    Partition,
    SampleSpace,
    cond_expectation,
    cond_sup,
)

__all__ = [
    "TransformSystem",
    "MaxErgodicReport",
    "apply_s",
    "cycles",
    "period",
    "is_ergodic",
    "invariant_partition",
    "time_max",
    "cesaro_mean",
    "max_ergodic_check",
    "preserves_expectation",
]


class TransformSystem:
    """Sample space, global expectation and a weight-preserving permutation ``tau``."""

    __slots__ = ("sys", "tau", "_cycles")

    def __init__(self, space: SampleSpace, tau: Sequence[int]):
        tau = tuple(int(i) for i in tau)
        n = space.size
        if len(tau) != n or sorted(tau) != list(range(n)):
            raise LatticeError(f"tau must be a permutation of 0..{n - 1}")
        w = space.weights
        moved = [i for i in range(n) if w[tau[i]] != w[i]]
        if moved:
            raise LatticeError(f"tau does not preserve the weights at outcomes {moved}")
        self.sys = ConditionalSystem.trivial(space)
        self.tau = tau
        self._cycles = _cycle_decomposition(tau)

    @property
    def space(self) -> SampleSpace:
        return self.sys.space

    def __repr__(self):
        return f"TransformSystem(tau={list(self.tau)})"


def _cycle_decomposition(tau: Sequence[int]) -> tuple[tuple[int, ...], ...]:
    seen = [False] * len(tau)
    out = []
    for start in range(len(tau)):
        if seen[start]:
            continue
        cyc = []
        i = start
        while not seen[i]:
            seen[i] = True
            cyc.append(i)
            i = tau[i]
        out.append(tuple(cyc))
    return tuple(out)


def cycles(ts: TransformSystem) -> tuple[tuple[int, ...], ...]:
    """Cycles of ``tau`` in orbit order, listed by smallest element."""
    return ts._cycles


def period(ts: TransformSystem) -> int:
    return math.lcm(*(len(c) for c in ts._cycles))


def invariant_partition(ts: TransformSystem) -> Partition:
    """Partition into cycles: the invariant sets of ``tau``."""
    return Partition(ts._cycles, ts.space.size)


def apply_s(ts: TransformSystem, f: LatticeVector, k: int = 1) -> LatticeVector:
    """``(S^k f)(w) = f(tau^k(w))``."""
    if k < 0:
        raise LatticeError("k must be non-negative")
    ts.sys._check(f)
    k %= period(ts)
    idx = list(range(ts.space.size))
    for _ in range(k):
        idx = [ts.tau[i] for i in idx]
    v = f.values
    return LatticeVector._raw(f.space, tuple(v[i] for i in idx))


def is_ergodic(ts: TransformSystem) -> bool:
    """True iff ``tau`` is a single cycle."""
    return len(ts._cycles) == 1


def time_max(ts: TransformSystem, f: LatticeVector) -> LatticeVector:
    """``sup_k S^k f``: the maximum of ``f`` along each orbit."""
    ts.sys._check(f)
    out = [None] * ts.space.size
    v = f.values
    for cyc in ts._cycles:
        top = max(v[i] for i in cyc)
        for i in cyc:
            out[i] = top
    return LatticeVector._raw(f.space, tuple(out))


def cesaro_mean(ts: TransformSystem, f: LatticeVector, n: int) -> LatticeVector:
    """``(1/n) sum_{k<n} S^k f``, exact.

    Along a cycle of length ``L``, ``n = qL + r`` steps visit every point
    ``q`` times plus the next ``r`` points, so the sum is taken that way.
    """
    if n < 1:
        raise LatticeError("n must be at least 1")
    ts.sys._check(f)
    v = f.values
    out = [None] * ts.space.size
    for cyc in ts._cycles:
        L = len(cyc)
        q, r = divmod(n, L)
        vals = [v[i] for i in cyc]
        full = sum(vals) * q
        if r == 0:
            mean = full / n
            for i in cyc:
                out[i] = mean
            continue
        doubled = vals + vals
        window = sum(doubled[:r])
        for pos, i in enumerate(cyc):
            out[i] = (full + window) / n
            window += doubled[pos + r] - doubled[pos]
    return LatticeVector._raw(f.space, tuple(out))


@dataclass(frozen=True)
class MaxErgodicReport:
    """``consistent`` is true iff ``time_max(f) == M_F(f)`` for every tested ``f``."""

    consistent: bool
    trials: int
    mismatches: int
    counterexample: LatticeVector | None


def max_ergodic_check(ts: TransformSystem, trials: int = 100, seed: int = 0, max_den: int = 100) -> MaxErgodicReport:
    """Compare the time maximum with the conditional supremum on random vectors.

    For a system with more than one cycle the indicator of the cycle through
    outcome 0 is always tested as well: it is invariant, so its time maximum is
    itself, while its conditional supremum is ``e``.
    """
    rng = random.Random(seed)
    space, sys = ts.space, ts.sys
    mismatches, counter = 0, None
    for _ in range(trials):
        f = LatticeVector._raw(
            space, tuple(Fraction(rng.randint(-max_den, max_den), rng.randint(1, max_den)) for _ in range(space.size))
        )
        if time_max(ts, f) != cond_sup(f, sys):
            mismatches += 1
            if counter is None:
                counter = f
    if not is_ergodic(ts):
        ind = space.indicator(ts._cycles[0])
        if time_max(ts, ind) != cond_sup(ind, sys):
            counter = ind
            mismatches += 1
    return MaxErgodicReport(mismatches == 0, trials, mismatches, counter)


def preserves_expectation(ts: TransformSystem, f: LatticeVector) -> bool:
    """``F S f == F f``."""
    return cond_expectation(apply_s(ts, f), ts.sys) == cond_expectation(f, ts.sys)
