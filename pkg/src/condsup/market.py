"""One risky asset on a finite filtration: AIP, NA and superhedging prices.

The numeraire is an implicit zero-interest bank account, so a self-financing
strategy ``theta`` started at time ``t0`` with capital ``p`` is worth

    p + sum_{i=t0+1}^{T} theta_{i-1} * (S_i - S_{i-1})

at the horizon.  All computations are exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .filtration import AdaptedProcess, Filtration, NotAdaptedError
from .lattice import LatticeError, LatticeVector, cond_inf, cond_sup, as_fraction

__all__ = [
    "MarketError",
    "AIPViolation",
    "VerificationError",
    "MarketModel",
    "Strategy",
    "Claim",
    "ImmediateProfit",
    "NodeViolation",
    "AIPReport",
    "MultiperiodAIPReport",
    "Arbitrage",
    "ArbitrageReport",
    "NAReport",
    "SuperhedgeResult",
    "SuperhedgeVerification",
    "portfolio_value",
    "terminal_gain",
    "aip_check",
    "aip_check_multiperiod",
    "arbitrage_bruteforce",
    "na_check",
    "superhedge_price",
    "superhedge_verify",
    "minimax_theta",
    "envelope_weights",
]


class MarketError(LatticeError):
    pass


class VerificationError(MarketError):
    """Primal and dual superhedging computations disagree."""


class MarketModel:
    """Filtration plus a non-negative adapted price process ``S_0, ..., S_T``."""

    __slots__ = ("filtration", "prices")

    def __init__(self, filtration: Filtration, prices):
        if not isinstance(prices, AdaptedProcess):
            prices = AdaptedProcess(filtration, prices)
        elif prices.filtration != filtration:
            raise MarketError("price process is adapted to a different filtration")
        for t, s in enumerate(prices):
            if any(v < 0 for v in s):
                raise MarketError(f"negative price at time {t}")
        self.filtration = filtration
        self.prices = prices

    @property
    def space(self):
        return self.filtration.space

    @property
    def horizon(self) -> int:
        return self.filtration.horizon

    def increment(self, i: int) -> LatticeVector:
        """``Delta S_i = S_i - S_{i-1}`` for ``1 <= i <= T``."""
        return self.prices[i] - self.prices[i - 1]

    def __repr__(self):
        return f"MarketModel({self.filtration!r}, {list(self.prices)})"


class Strategy:
    """Holdings ``theta_{t0}, ..., theta_{T-1}`` with ``theta_s`` constant on atoms of ``P_s``."""

    __slots__ = ("filtration", "start", "holdings")

    def __init__(self, filtration: Filtration, holdings: Sequence, start: int = 0):
        T = filtration.horizon
        if not 0 <= start <= T:
            raise MarketError(f"start time {start} outside 0..{T}")
        hs = [h if isinstance(h, LatticeVector) else LatticeVector(filtration.space, h) for h in holdings]
        if len(hs) != T - start:
            raise MarketError(f"expected {T - start} holdings for times {start}..{T - 1}, got {len(hs)}")
        for k, h in enumerate(hs):
            s = start + k
            if not filtration.partitions[s].is_measurable(h):
                raise NotAdaptedError(f"holding at time {s} is not constant on the atoms of P_{s}", time=s)
        self.filtration = filtration
        self.start = start
        self.holdings: tuple[LatticeVector, ...] = tuple(hs)

    @classmethod
    def zero(cls, filtration: Filtration, start: int = 0) -> Strategy:
        z = filtration.space.zero()
        return cls(filtration, [z] * (filtration.horizon - start), start)

    def at(self, s: int) -> LatticeVector:
        return self.holdings[s - self.start]

    def __eq__(self, other):
        if not isinstance(other, Strategy):
            return NotImplemented
        return (self.filtration, self.start, self.holdings) == (other.filtration, other.start, other.holdings)

    def __repr__(self):
        return f"Strategy(start={self.start}, {list(self.holdings)})"


class Claim:
    """A payoff known at the horizon."""

    __slots__ = ("payoff", "name")

    def __init__(self, payoff: LatticeVector, name: str = ""):
        self.payoff = payoff
        self.name = name

    def check(self, m: MarketModel) -> LatticeVector:
        if self.payoff.space != m.space:
            raise MarketError("claim lives on a different space")
        if not m.filtration.partitions[-1].is_measurable(self.payoff):
            raise NotAdaptedError("claim is not measurable at the horizon", time=m.horizon)
        return self.payoff


def _as_payoff(m: MarketModel, h) -> LatticeVector:
    if isinstance(h, Claim):
        return h.check(m)
    return Claim(h).check(m)


def terminal_gain(m: MarketModel, strat: Strategy) -> LatticeVector:
    """Gain ``sum theta_{i-1} Delta S_i`` of a strategy started with zero capital."""
    if strat.filtration != m.filtration:
        raise MarketError("strategy is adapted to a different filtration")
    total = m.space.zero()
    for s, theta in enumerate(strat.holdings, start=strat.start):
        total = total + theta * m.increment(s + 1)
    return total


def portfolio_value(m: MarketModel, strat: Strategy, t0: int, p: LatticeVector) -> LatticeVector:
    """Terminal value of ``strat`` started at ``t0`` with capital ``p``."""
    if strat.start != t0:
        raise MarketError(f"strategy starts at {strat.start}, not at {t0}")
    if not m.filtration.partitions[t0].is_measurable(p):
        raise NotAdaptedError(f"initial capital is not constant on the atoms of P_{t0}", time=t0)
    return p + terminal_gain(m, strat)


@dataclass(frozen=True)
class ImmediateProfit:
    """Negative price at time ``t`` that superhedges the zero claim."""

    t: int
    strategy: Strategy
    price: LatticeVector

    def verify(self, m: MarketModel) -> bool:
        return (
            self.price <= 0
            and not self.price.is_zero()
            and m.filtration.partitions[self.t].is_measurable(self.price)
            and portfolio_value(m, self.strategy, self.t, self.price) >= 0
        )


@dataclass(frozen=True)
class NodeViolation:
    """``side`` is ``"lower"`` when ``min S_{t+1} > S_t`` on the atom, ``"upper"`` when ``max S_{t+1} < S_t``."""

    t: int
    atom: tuple[int, ...]
    side: str
    certificate: ImmediateProfit


@dataclass(frozen=True)
class AIPReport:
    holds: bool
    violations: tuple[NodeViolation, ...] = ()


def _one_step_strategy(m: MarketModel, t: int, theta: LatticeVector) -> Strategy:
    z = m.space.zero()
    return Strategy(m.filtration, [theta] + [z] * (m.horizon - t - 1), start=t)


def aip_check(m: MarketModel) -> AIPReport:
    """Check ``m_{F_t}(S_{t+1}) <= S_t <= M_{F_t}(S_{t+1})`` for every ``t < T``.

    Each violating atom comes with an immediate-profit certificate: a one-step
    position of one unit (long for a lower violation, short for an upper one)
    bought with a strictly negative price.
    """
    space = m.space
    found = []
    for t in range(m.horizon):
        s_now, s_next = m.prices[t], m.prices[t + 1]
        for atom in m.filtration.partitions[t].atoms:
            here = s_now[atom[0]]
            lo = min(s_next[i] for i in atom)
            hi = max(s_next[i] for i in atom)
            if lo > here:
                side, sign, gap = "lower", 1, lo - here
            elif hi < here:
                side, sign, gap = "upper", -1, here - hi
            else:
                continue
            ind = space.indicator(atom)
            cert = ImmediateProfit(t, _one_step_strategy(m, t, sign * ind), -gap * ind)
            found.append(NodeViolation(t, atom, side, cert))
    return AIPReport(not found, tuple(found))


@dataclass(frozen=True)
class MultiperiodAIPReport:
    holds: bool
    failures: tuple[tuple[int, int, tuple[int, ...], str], ...] = ()


def aip_check_multiperiod(m: MarketModel) -> MultiperiodAIPReport:
    """Check ``m_{F_t}(S_u) <= S_t <= M_{F_t}(S_u)`` for all ``t <= u``.

    Failures are ``(t, u, atom, side)`` tuples.
    """
    failures = []
    T = m.horizon
    for t in range(T + 1):
        sys_t = m.filtration.systems[t]
        s_t = m.prices[t]
        for u in range(t, T + 1):
            lo, hi = cond_inf(m.prices[u], sys_t), cond_sup(m.prices[u], sys_t)
            for atom in sys_t.atoms:
                i = atom[0]
                if lo[i] > s_t[i]:
                    failures.append((t, u, atom, "lower"))
                elif hi[i] < s_t[i]:
                    failures.append((t, u, atom, "upper"))
    return MultiperiodAIPReport(not failures, tuple(failures))


@dataclass(frozen=True)
class Arbitrage:
    """Zero-cost strategy with non-negative, non-zero terminal value."""

    t: int
    atom: tuple[int, ...]
    strategy: Strategy

    def verify(self, m: MarketModel) -> bool:
        v = terminal_gain(m, self.strategy)
        return v >= 0 and not v.is_zero()


@dataclass(frozen=True)
class ArbitrageReport:
    holds: bool
    certificates: tuple[Arbitrage, ...] = ()


def arbitrage_bruteforce(m: MarketModel) -> ArbitrageReport:
    """Decide NA by sign analysis of each one-step increment.

    NA holds iff on every atom of every ``P_t`` the increment ``Delta S_{t+1}``
    either vanishes identically or takes both signs strictly.
    """
    space = m.space
    certs = []
    for t in range(m.horizon):
        d = m.increment(t + 1)
        for atom in m.filtration.partitions[t].atoms:
            vals = [d[i] for i in atom]
            up, down = any(v > 0 for v in vals), any(v < 0 for v in vals)
            if up == down:
                continue
            theta = space.indicator(atom) * (1 if up else -1)
            certs.append(Arbitrage(t, atom, _one_step_strategy(m, t, theta)))
    return ArbitrageReport(not certs, tuple(certs))


@dataclass(frozen=True)
class NAReport:
    """``decided_by`` is ``"strictness"`` when the strict two-sided bounds hold
    everywhere (then NA and AIP coincide and both hold) and ``"sign-analysis"``
    otherwise."""

    holds: bool
    strict: bool
    aip: bool
    decided_by: str
    certificate: Arbitrage | None = None


def _strictness_holds(m: MarketModel) -> bool:
    # Singleton components reduce the hypothesis to pointwise strict bounds.
    for t in range(m.horizon):
        s_now, s_next = m.prices[t], m.prices[t + 1]
        for atom in m.filtration.partitions[t].atoms:
            here = s_now[atom[0]]
            vals = [s_next[i] for i in atom]
            if all(v == here for v in vals):
                continue
            if not min(vals) < here < max(vals):
                return False
    return True


def na_check(m: MarketModel) -> NAReport:
    aip = aip_check(m).holds
    if _strictness_holds(m):
        return NAReport(aip, True, aip, "strictness")
    bf = arbitrage_bruteforce(m)
    cert = bf.certificates[0] if bf.certificates else None
    return NAReport(bf.holds, False, aip, "sign-analysis", cert)


class AIPViolation(MarketError):
    """Superhedging problem unbounded below because AIP fails at a node."""

    def __init__(self, message: str, t: int, atom: tuple[int, ...]):
        super().__init__(message)
        self.t = t
        self.atom = atom


def minimax_theta(moves: Sequence[Fraction], targets: Sequence[Fraction]) -> tuple[Fraction, Fraction] | None:
    """Solve ``min_theta max_c (targets[c] - theta * moves[c])`` exactly.

    Returns ``(value, theta)``, choosing the optimal ``theta`` of least absolute
    value (the smaller one on a tie), or ``None`` when the problem is unbounded
    below (all moves of one strict sign).
    """
    if all(d == 0 for d in moves):
        return max(targets), Fraction(0)
    if all(d > 0 for d in moves) or all(d < 0 for d in moves):
        return None

    def g(theta):
        return max(y - theta * d for d, y in zip(moves, targets))

    n = len(moves)
    best = None
    for i in range(n):
        for j in range(i + 1, n):
            if moves[i] != moves[j]:
                v = g((targets[i] - targets[j]) / (moves[i] - moves[j]))
                if best is None or v < best:
                    best = v
    # optimal set is {theta : lower <= theta <= upper}
    lower = max(((y - best) / d for d, y in zip(moves, targets) if d > 0), default=None)
    upper = min(((y - best) / d for d, y in zip(moves, targets) if d < 0), default=None)
    theta = Fraction(0)
    if lower is not None and theta < lower:
        theta = lower
    if upper is not None and theta > upper:
        theta = upper
    return best, theta


def envelope_weights(moves: Sequence[Fraction], targets: Sequence[Fraction]) -> tuple[Fraction, tuple[Fraction, ...]]:
    """Upper concave envelope of the points ``(moves[c], targets[c])`` at 0.

    Returns the envelope value and a probability vector over the points with
    zero mean move whose mean target equals that value.  Requires 0 to lie in
    the convex hull of ``moves``.
    """
    n = len(moves)
    best, weights = None, None
    for c in range(n):
        if moves[c] == 0 and (best is None or targets[c] > best):
            best = targets[c]
            weights = tuple(Fraction(int(k == c)) for k in range(n))
    for i in range(n):
        if moves[i] >= 0:
            continue
        for j in range(n):
            if moves[j] <= 0:
                continue
            lam = moves[j] / (moves[j] - moves[i])
            v = lam * targets[i] + (1 - lam) * targets[j]
            if best is None or v > best:
                best = v
                weights = tuple(lam if k == i else 1 - lam if k == j else Fraction(0) for k in range(n))
    if best is None:
        raise MarketError("0 is outside the convex hull of the moves")
    return best, weights


@dataclass(frozen=True)
class SuperhedgeResult:
    """Minimal superhedging prices ``values[s - t]`` for ``s = t..T`` and the hedge."""

    t: int
    price: LatticeVector
    strategy: Strategy
    values: tuple[LatticeVector, ...]


def superhedge_price(m: MarketModel, h, t: int = 0) -> SuperhedgeResult:
    """Minimal superhedging price of claim ``h`` at time ``t`` by backward induction.

    At each atom of ``P_s`` the price is ``min_theta max_child (pi_{s+1} - theta * Delta S_{s+1})``,
    which is the upper concave envelope of the child points ``(S_{s+1}, pi_{s+1})``
    evaluated at ``S_s``.  Raises :class:`AIPViolation` when some atom lets the
    minimax run off to minus infinity.
    """
    payoff = _as_payoff(m, h)
    T = m.horizon
    if not 0 <= t <= T:
        raise MarketError(f"time {t} outside 0..{T}")
    flt = m.filtration
    pi = payoff
    values = [pi]
    holdings = []
    for s in range(T - 1, t - 1, -1):
        price_vals = [None] * m.space.size
        theta_vals = [None] * m.space.size
        here_s = m.prices[s]
        for k, atom in enumerate(flt.partitions[s].atoms):
            kids = flt.children(s, k)
            here = here_s[atom[0]]
            moves = [m.prices[s + 1][c[0]] - here for c in kids]
            targets = [pi[c[0]] for c in kids]
            sol = minimax_theta(moves, targets)
            if sol is None:
                raise AIPViolation(f"AIP fails at time {s} on atom {set(atom)}: superhedging price is unbounded below", s, atom)
            for i in atom:
                price_vals[i], theta_vals[i] = sol
        pi = LatticeVector._raw(m.space, tuple(price_vals))
        values.append(pi)
        holdings.append(LatticeVector._raw(m.space, tuple(theta_vals)))
    values.reverse()
    holdings.reverse()
    return SuperhedgeResult(t, values[0], Strategy(flt, holdings, start=t), tuple(values))


@dataclass(frozen=True)
class SuperhedgeVerification:
    """``certified``: ``price`` plus the hedge dominates the claim.
    ``refuted``: on every atom of ``P_t`` the dual (martingale-measure) bound
    exceeds ``price - eps``, so no strategy superhedges from ``price - eps``."""

    price: LatticeVector
    eps: Fraction
    certified: bool
    refuted: bool
    strategy: Strategy
    dual_bound: LatticeVector
    refuted_atoms: tuple[tuple[int, ...], ...] = field(default=())

    @property
    def minimal(self) -> bool:
        return self.certified and self.refuted


def superhedge_verify(m: MarketModel, h, t: int, price: LatticeVector, eps=Fraction(1, 1000)) -> SuperhedgeVerification:
    """Certify ``price`` as a superhedging price and refute ``price - eps``.

    The primal side replays the minimax hedge and checks
    ``price + gain >= h`` pointwise.  The dual side builds, node by node, a
    probability on the children under which ``S`` is a martingale and the
    expected next price equals the concave envelope; any superhedging capital
    is at least the expected payoff under such a measure.  Raises
    :class:`VerificationError` if the dual bound differs from the backward
    induction price (a duality gap means a bug).
    """
    eps = as_fraction(eps)
    if eps <= 0:
        raise MarketError("eps must be positive")
    payoff = _as_payoff(m, h)
    flt = m.filtration
    if not flt.partitions[t].is_measurable(price):
        raise NotAdaptedError(f"price is not constant on the atoms of P_{t}", time=t)
    res = superhedge_price(m, payoff, t)
    certified = portfolio_value(m, res.strategy, t, price) >= payoff

    bound = payoff
    for s in range(m.horizon - 1, t - 1, -1):
        vals = [None] * m.space.size
        for k, atom in enumerate(flt.partitions[s].atoms):
            kids = flt.children(s, k)
            here = m.prices[s][atom[0]]
            moves = [m.prices[s + 1][c[0]] - here for c in kids]
            env, q = envelope_weights(moves, [res.values[s + 1 - t][c[0]] for c in kids])
            if sum(qc * d for qc, d in zip(q, moves)) != 0 or min(q) < 0 or sum(q) != 1:
                raise VerificationError(f"dual weights at time {s}, atom {set(atom)} are not a martingale measure")
            b = sum(qc * bound[c[0]] for qc, c in zip(q, kids))
            if env != res.values[s - t][atom[0]] or b != env:
                raise VerificationError(
                    f"duality gap at time {s}, atom {set(atom)}: primal {res.values[s - t][atom[0]]}, dual {b}"
                )
            for i in atom:
                vals[i] = b
        bound = LatticeVector._raw(m.space, tuple(vals))

    atoms = flt.partitions[t].atoms
    refuted_atoms = tuple(a for a in atoms if bound[a[0]] > price[a[0]] - eps)
    return SuperhedgeVerification(
        price=price,
        eps=eps,
        certified=certified,
        refuted=len(refuted_atoms) == len(atoms),
        strategy=res.strategy,
        dual_bound=bound,
        refuted_atoms=refuted_atoms,
    )
