"""Random instances for property tests and demos.

Every generator takes a :class:`random.Random` so runs are reproducible.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .filtration import Filtration
from .lattice import LatticeVector, Partition, SampleSpace
from .market import MarketModel

__all__ = [
    "random_rational",
    "random_space",
    "random_partition",
    "random_refinement",
    "random_vector",
    "random_measurable",
    "random_filtration",
    "random_tree_market",
]


def random_rational(rng: random.Random, max_num: int = 100, max_den: int = 100, nonneg: bool = False) -> Fraction:
    lo = 0 if nonneg else -max_num
    return Fraction(rng.randint(lo, max_num), rng.randint(1, max_den))


def random_space(rng: random.Random, size: int, max_weight: int = 100) -> SampleSpace:
    raw = [rng.randint(1, max_weight) for _ in range(size)]
    total = sum(raw)
    return SampleSpace([Fraction(r, total) for r in raw])


def random_partition(rng: random.Random, size: int, n_atoms: int | None = None) -> Partition:
    k = n_atoms if n_atoms is not None else rng.randint(1, size)
    labels = list(range(k)) + [rng.randrange(k) for _ in range(size - k)]
    rng.shuffle(labels)
    atoms: dict[int, list[int]] = {}
    for i, lab in enumerate(labels):
        atoms.setdefault(lab, []).append(i)
    return Partition(atoms.values(), size)


def random_refinement(rng: random.Random, coarse: Partition) -> Partition:
    """Split each atom of ``coarse`` at random."""
    atoms = []
    for atom in coarse.atoms:
        sub = random_partition(rng, len(atom))
        atoms += [[atom[i] for i in a] for a in sub.atoms]
    return Partition(atoms, coarse.size)


def random_vector(rng: random.Random, space: SampleSpace, max_num: int = 100, max_den: int = 100, nonneg: bool = False) -> LatticeVector:
    return LatticeVector(space, [random_rational(rng, max_num, max_den, nonneg) for _ in range(space.size)])


def random_measurable(rng: random.Random, space: SampleSpace, partition: Partition, **kw) -> LatticeVector:
    """Random element of ``R(F)``: one random value per atom."""
    vals = [None] * space.size
    for atom in partition.atoms:
        v = random_rational(rng, **kw)
        for i in atom:
            vals[i] = v
    return LatticeVector(space, vals)


def random_filtration(rng: random.Random, space: SampleSpace, horizon: int) -> Filtration:
    parts = [random_partition(rng, space.size, rng.randint(1, min(2, space.size)))]
    for _ in range(horizon):
        parts.append(random_refinement(rng, parts[-1]))
    return Filtration(space, parts)


def random_tree_market(
    rng: random.Random,
    periods: int,
    max_leaves: int = 8,
    max_branch: int = 3,
    mode: str = "free",
    shuffle: bool = True,
) -> MarketModel:
    """Random scenario-tree market with a trivial partition at time 0.

    ``mode`` controls the one-step price moves: ``"free"`` draws them
    independently (AIP may fail), ``"aip"`` makes every parent price lie
    between the smallest and largest child price (touching allowed), and
    ``"strict"`` makes it lie strictly between them whenever the node branches.
    """
    if mode not in ("free", "aip", "strict"):
        raise ValueError(f"unknown mode {mode!r}")
    if periods < 1:
        raise ValueError("periods must be at least 1")
    while True:
        shape = [[rng.randint(1, max_branch)]]
        for _ in range(periods - 1):
            shape.append([rng.randint(1, max_branch) for _ in range(sum(shape[-1]))])
        if sum(shape[-1]) <= max_leaves:
            break
    n_leaves = sum(shape[-1])
    root_price = Fraction(rng.randint(1, 20))
    levels = [[(0, n_leaves, root_price)]]
    for t in range(periods):
        counts = shape[t]
        if t + 1 < periods:
            sizes = iter(_subtree_sizes(shape, t + 1))
        nxt = []
        for (lo, hi, p), b in zip(levels[-1], counts):
            kids = _child_prices(rng, p, b, mode)
            start = lo
            for q in kids:
                width = next(sizes) if t + 1 < periods else 1
                nxt.append((start, start + width, q))
                start += width
            assert start == hi
        levels.append(nxt)

    perm = list(range(n_leaves))
    if shuffle:
        rng.shuffle(perm)
    space = random_space(rng, n_leaves)
    parts, prices = [], []
    for level in levels:
        parts.append(Partition([[perm[i] for i in range(lo, hi)] for lo, hi, _ in level], n_leaves))
        row = [None] * n_leaves
        for lo, hi, p in level:
            for i in range(lo, hi):
                row[perm[i]] = p
        prices.append(row)
    flt = Filtration(space, parts)
    return MarketModel(flt, prices)


def _subtree_sizes(shape: list[list[int]], level: int) -> list[int]:
    """Number of leaves below each node at ``level`` (level 0 is the root)."""
    sizes = [1] * sum(shape[-1])
    for counts in reversed(shape[level:]):
        it = iter(sizes)
        sizes = [sum(next(it) for _ in range(b)) for b in counts]
    return sizes


def _child_prices(rng: random.Random, parent: Fraction, b: int, mode: str) -> list[Fraction]:
    def move():
        return Fraction(rng.randint(-10, 10), rng.randint(1, 4))

    kids = [max(Fraction(0), parent + move()) for _ in range(b)]
    if mode == "free":
        return kids
    if b == 1:
        return [parent]
    if mode == "strict":
        if parent == 0:
            return [parent] * b
        up = parent + Fraction(rng.randint(1, 10), rng.randint(1, 4))
        down = parent * Fraction(rng.randint(0, 9), 10)
        i, j = rng.sample(range(b), 2)
        kids[i], kids[j] = up, down
        return kids
    if min(kids) > parent:
        kids[rng.randrange(b)] = parent - min(parent, Fraction(rng.randint(0, 10), rng.randint(1, 4)))
    elif max(kids) < parent:
        kids[rng.randrange(b)] = parent + Fraction(rng.randint(0, 10), rng.randint(1, 4))
    return kids
