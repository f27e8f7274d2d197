"""Filtrations as refining partitions, adapted processes, and maxingales."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .lattice import (
    ConditionalSystem,
    DimensionError,
    LatticeError,
    LatticeVector,
    Partition,
    SampleSpace,
    cond_sup,
)

__all__ = [
    "FiltrationError",
    "NotAdaptedError",
    "Filtration",
    "AdaptedProcess",
    "MaxingaleReport",
    "validate_filtration",
    "classify_maxingale",
    "running_max",
    "maxingale_from_terminal",
]


class FiltrationError(LatticeError):
    """Consecutive partitions that do not refine each other.

    ``time`` is the later of the two offending times and ``atom`` an atom of
    that partition which straddles two earlier atoms.
    """

    def __init__(self, message: str, time: int | None = None, atom: tuple[int, ...] | None = None):
        super().__init__(message)
        self.time = time
        self.atom = atom


class NotAdaptedError(LatticeError):
    def __init__(self, message: str, time: int | None = None):
        super().__init__(message)
        self.time = time


class Filtration:
    """Partitions ``P_0, ..., P_T`` of one sample space, each refining the last."""

    __slots__ = ("space", "partitions", "systems")

    def __init__(self, space: SampleSpace, partitions: Iterable):
        parts = [p if isinstance(p, Partition) else Partition(p, space.size) for p in partitions]
        if not parts:
            raise FiltrationError("a filtration needs at least one partition")
        for t, p in enumerate(parts):
            if p.size != space.size:
                raise DimensionError(f"partition at time {t} covers {p.size} outcomes, space has {space.size}")
        for t in range(1, len(parts)):
            earlier, later = parts[t - 1], parts[t]
            for atom in later.atoms:
                owners = {earlier.atom_of(i) for i in atom}
                if len(owners) > 1:
                    crossed = [set(earlier.atoms[k]) for k in sorted(owners)]
                    raise FiltrationError(
                        f"partition at time {t} does not refine time {t - 1}: "
                        f"atom {set(atom)} meets {crossed}",
                        time=t,
                        atom=atom,
                    )
        self.space = space
        self.partitions: tuple[Partition, ...] = tuple(parts)
        self.systems = tuple(ConditionalSystem(space, p) for p in parts)

    @property
    def horizon(self) -> int:
        """Final time ``T``."""
        return len(self.partitions) - 1

    def system(self, t: int) -> ConditionalSystem:
        if not 0 <= t <= self.horizon:
            raise LatticeError(f"time {t} outside 0..{self.horizon}")
        return self.systems[t]

    def children(self, t: int, atom_index: int) -> list[tuple[int, ...]]:
        """Atoms of ``P_{t+1}`` contained in atom ``atom_index`` of ``P_t``."""
        parent = self.partitions[t]
        nxt = self.partitions[t + 1]
        return [a for a in nxt.atoms if parent.atom_of(a[0]) == atom_index]

    def __len__(self):
        return len(self.partitions)

    def __eq__(self, other):
        if not isinstance(other, Filtration):
            return NotImplemented
        return self.space == other.space and self.partitions == other.partitions

    def __hash__(self):
        return hash((self.space, self.partitions))

    def __repr__(self):
        return f"Filtration(T={self.horizon}, {list(self.partitions)})"


def validate_filtration(space: SampleSpace, partitions: Iterable) -> Filtration:
    """Build a :class:`Filtration`, raising :class:`FiltrationError` on a non-refining pair."""
    return Filtration(space, partitions)


class AdaptedProcess:
    """Vectors ``x_0, ..., x_T`` with ``x_t`` constant on the atoms of ``P_t``."""

    __slots__ = ("filtration", "vectors")

    def __init__(self, filtration: Filtration, vectors: Sequence):
        vecs = [v if isinstance(v, LatticeVector) else LatticeVector(filtration.space, v) for v in vectors]
        if len(vecs) != len(filtration):
            raise LatticeError(f"process has {len(vecs)} entries, filtration has {len(filtration)} times")
        for t, (v, p) in enumerate(zip(vecs, filtration.partitions)):
            if v.space != filtration.space:
                raise DimensionError(f"entry {t} lives on a different space")
            if not p.is_measurable(v):
                raise NotAdaptedError(f"entry at time {t} is not constant on the atoms of P_{t}", time=t)
        self.filtration = filtration
        self.vectors: tuple[LatticeVector, ...] = tuple(vecs)

    def __len__(self):
        return len(self.vectors)

    def __getitem__(self, t):
        return self.vectors[t]

    def __iter__(self):
        return iter(self.vectors)

    def __eq__(self, other):
        if not isinstance(other, AdaptedProcess):
            return NotImplemented
        return self.filtration == other.filtration and self.vectors == other.vectors

    def __repr__(self):
        return f"AdaptedProcess({list(self.vectors)})"


@dataclass(frozen=True)
class MaxingaleReport:
    """Outcome of comparing ``M_{F_n}(x_{n+1})`` with ``x_n`` at each step.

    ``steps[n]`` is ``"equal"``, ``"sub"`` (``M >= x_n``, strict somewhere),
    ``"super"`` (``M <= x_n``, strict somewhere) or ``"none"``.
    """

    steps: tuple[str, ...]
    label: str

    @property
    def is_sub(self) -> bool:
        return all(s in ("equal", "sub") for s in self.steps)

    @property
    def is_super(self) -> bool:
        return all(s in ("equal", "super") for s in self.steps)

    @property
    def is_maxingale(self) -> bool:
        return self.label == "maxingale"


def classify_maxingale(x: AdaptedProcess) -> MaxingaleReport:
    flt = x.filtration
    steps = []
    for n in range(flt.horizon):
        m = cond_sup(x[n + 1], flt.systems[n])
        ge, le = m >= x[n], m <= x[n]
        steps.append("equal" if ge and le else "sub" if ge else "super" if le else "none")
    if all(s == "equal" for s in steps):
        label = "maxingale"
    elif all(s in ("equal", "sub") for s in steps):
        label = "sub-maxingale"
    elif all(s in ("equal", "super") for s in steps):
        label = "super-maxingale"
    else:
        label = "none"
    return MaxingaleReport(tuple(steps), label)


def running_max(x: AdaptedProcess) -> AdaptedProcess:
    """``g_n = x_0 v x_1 v ... v x_n``."""
    out = [x[0]]
    for v in x.vectors[1:]:
        out.append(out[-1] | v)
    return AdaptedProcess(x.filtration, out)


def maxingale_from_terminal(f: LatticeVector, flt: Filtration) -> AdaptedProcess:
    """The maxingale ``(M_{F_n}(f))_n``."""
    return AdaptedProcess(flt, [cond_sup(f, s) for s in flt.systems])
