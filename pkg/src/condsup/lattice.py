"""Finite conditional Riesz triples.

A finite outcome set with strictly positive rational weights plays the role of
the Dedekind complete Riesz space ``E`` with weak unit ``e`` (the all-ones
vector).  A partition of the outcomes stands for a sub-sigma-algebra; the
conditional expectation ``F`` averages over atoms and its range ``R(F)`` is the
set of vectors constant on atoms.

Because every weight is strictly positive, the least element of ``R(F)`` above
``f`` is the atomwise maximum of ``f``, and the greatest element below is the
atomwise minimum.  In the finite model ``E``, ``L^1(F)`` and ``L^inf(F)``
coincide, so no separate types are provided for them.

Everything except :func:`n_p_norm` and :func:`lp_limit_estimate` is exact
rational arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Iterator, Sequence

import numpy as np

__all__ = [
    "LatticeError",
    "DimensionError",
    "as_fraction",
    "SampleSpace",
    "LatticeVector",
    "Partition",
    "ConditionalSystem",
    "PiecewiseAffineConvex",
    "LpLimit",
    "sup",
    "inf",
    "cond_expectation",
    "cond_sup",
    "cond_inf",
    "norm_inf",
    "band_component",
    "n_p_norm",
    "lp_limit_estimate",
    "apply_convex",
    "delta",
    "nearest_in_range",
]


class LatticeError(ValueError):
    """Invalid construction of a space, vector, partition or operator."""


class DimensionError(LatticeError):
    """Operands live on different sample spaces."""


def as_fraction(x) -> Fraction:
    """Convert ``x`` to a :class:`Fraction` without passing through floats.

    Integers, :class:`numbers.Rational` instances and strings such as
    ``"3/4"`` are accepted.  Floats are rejected: a binary float is almost
    never the rational the caller meant.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, Rational):
        return Fraction(x.numerator, x.denominator)
    if isinstance(x, str):
        try:
            return Fraction(x)
        except (ValueError, ZeroDivisionError) as exc:
            raise LatticeError(f"invalid rational {x!r}") from exc
    raise TypeError(f"expected an exact rational, got {type(x).__name__}: {x!r}")


class SampleSpace:
    """Finite outcome set ``{0, ..., size-1}`` with a probability vector.

    Every weight must be strictly positive and the weights must sum to one
    exactly.
    """

    __slots__ = ("weights",)

    def __init__(self, weights: Iterable):
        w = tuple(as_fraction(x) for x in weights)
        if not w:
            raise LatticeError("a sample space needs at least one outcome")
        for i, x in enumerate(w):
            if x <= 0:
                raise LatticeError(f"weight of outcome {i} is {x}; weights must be > 0")
        if sum(w) != 1:
            raise LatticeError(f"weights sum to {sum(w)}, not 1")
        self.weights = w

    @classmethod
    def uniform(cls, size: int) -> SampleSpace:
        if size < 1:
            raise LatticeError("size must be positive")
        return cls([Fraction(1, size)] * size)

    @property
    def size(self) -> int:
        return len(self.weights)

    def vector(self, values: Iterable) -> LatticeVector:
        return LatticeVector(self, values)

    def constant(self, c) -> LatticeVector:
        return LatticeVector._raw(self, (as_fraction(c),) * self.size)

    def unit(self) -> LatticeVector:
        """The weak order unit ``e``."""
        return self.constant(1)

    def zero(self) -> LatticeVector:
        return self.constant(0)

    def indicator(self, indices: Iterable[int]) -> LatticeVector:
        idx = set(indices)
        bad = [i for i in idx if not 0 <= i < self.size]
        if bad:
            raise LatticeError(f"indices {sorted(bad)} outside 0..{self.size - 1}")
        one, zero = Fraction(1), Fraction(0)
        return LatticeVector._raw(self, tuple(one if i in idx else zero for i in range(self.size)))

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, SampleSpace):
            return NotImplemented
        return self.weights == other.weights

    def __hash__(self):
        return hash(self.weights)

    def __repr__(self):
        return f"SampleSpace([{', '.join(str(w) for w in self.weights)}])"


def _same_space(a: SampleSpace, b: SampleSpace) -> None:
    if a is not b and a != b:
        raise DimensionError(f"vectors live on different spaces (sizes {a.size} and {b.size})")


class LatticeVector:
    """An element of ``E``: one rational per outcome.

    Arithmetic is pointwise.  ``|`` and ``&`` are the lattice supremum and
    infimum, ``<=`` is the (partial) pointwise order, and ``*`` between two
    vectors is the pointwise product of the f-algebra structure.
    """

    __slots__ = ("space", "values")

    def __init__(self, space: SampleSpace, values: Iterable):
        vals = tuple(as_fraction(v) for v in values)
        if len(vals) != space.size:
            raise DimensionError(f"vector has {len(vals)} entries, space has {space.size} outcomes")
        self.space = space
        self.values = vals

    @classmethod
    def _raw(cls, space: SampleSpace, values: tuple) -> LatticeVector:
        # Trusted constructor: values already a tuple of Fractions of the right length.
        obj = object.__new__(cls)
        obj.space = space
        obj.values = values
        return obj

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self) -> Iterator[Fraction]:
        return iter(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def __eq__(self, other):
        if not isinstance(other, LatticeVector):
            return NotImplemented
        return self.values == other.values and self.space == other.space

    def __hash__(self):
        return hash(self.values)

    def __repr__(self):
        return f"LatticeVector({', '.join(str(v) for v in self.values)})"

    def _zip(self, other: LatticeVector):
        _same_space(self.space, other.space)
        return zip(self.values, other.values)

    def _coerce(self, other):
        if isinstance(other, LatticeVector):
            return other
        return self.space.constant(other)

    def __add__(self, other):
        other = self._coerce(other)
        return LatticeVector._raw(self.space, tuple(a + b for a, b in self._zip(other)))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        return LatticeVector._raw(self.space, tuple(a - b for a, b in self._zip(other)))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return LatticeVector._raw(self.space, tuple(-a for a in self.values))

    def __mul__(self, other):
        if isinstance(other, LatticeVector):
            return LatticeVector._raw(self.space, tuple(a * b for a, b in self._zip(other)))
        c = as_fraction(other)
        return LatticeVector._raw(self.space, tuple(c * a for a in self.values))

    __rmul__ = __mul__

    def __truediv__(self, other):
        c = as_fraction(other)
        return LatticeVector._raw(self.space, tuple(a / c for a in self.values))

    def __abs__(self):
        return LatticeVector._raw(self.space, tuple(abs(a) for a in self.values))

    def __or__(self, other):
        other = self._coerce(other)
        return LatticeVector._raw(self.space, tuple(a if a >= b else b for a, b in self._zip(other)))

    __ror__ = __or__

    def __and__(self, other):
        other = self._coerce(other)
        return LatticeVector._raw(self.space, tuple(a if a <= b else b for a, b in self._zip(other)))

    __rand__ = __and__

    def __le__(self, other):
        other = self._coerce(other)
        return all(a <= b for a, b in self._zip(other))

    def __ge__(self, other):
        other = self._coerce(other)
        return all(a >= b for a, b in self._zip(other))

    def __lt__(self, other):
        other = self._coerce(other)
        return self <= other and self.values != other.values

    def __gt__(self, other):
        other = self._coerce(other)
        return self >= other and self.values != other.values

    @property
    def pos(self) -> LatticeVector:
        """Positive part ``f+ = f v 0``."""
        zero = Fraction(0)
        return LatticeVector._raw(self.space, tuple(a if a > 0 else zero for a in self.values))

    @property
    def neg(self) -> LatticeVector:
        """Negative part ``f- = (-f) v 0``."""
        zero = Fraction(0)
        return LatticeVector._raw(self.space, tuple(-a if a < 0 else zero for a in self.values))

    def is_zero(self) -> bool:
        return not any(self.values)

    def as_strings(self) -> list[str]:
        return [str(v) for v in self.values]

    def to_numpy(self) -> np.ndarray:
        return np.array([float(v) for v in self.values])


def sup(f: LatticeVector, g: LatticeVector) -> LatticeVector:
    return f | g


def inf(f: LatticeVector, g: LatticeVector) -> LatticeVector:
    return f & g


class Partition:
    """A partition of ``{0, ..., n-1}`` into non-empty atoms.

    Atoms are stored as sorted tuples, ordered by their smallest index.
    """

    __slots__ = ("atoms", "size", "_atom_of")

    def __init__(self, atoms: Iterable[Iterable[int]], size: int | None = None):
        parsed = []
        for k, atom in enumerate(atoms):
            a = tuple(sorted(int(i) for i in atom))
            if not a:
                raise LatticeError(f"atom {k} is empty")
            if len(set(a)) != len(a):
                raise LatticeError(f"atom {k} repeats an outcome")
            parsed.append(a)
        if not parsed:
            raise LatticeError("a partition needs at least one atom")
        parsed.sort(key=lambda a: a[0])
        seen: dict[int, int] = {}
        for k, atom in enumerate(parsed):
            for i in atom:
                if i in seen:
                    raise LatticeError(f"outcome {i} appears in atoms {set(parsed[seen[i]])} and {set(atom)}")
                seen[i] = k
        n = len(seen) if size is None else size
        missing = sorted(set(range(n)) - seen.keys())
        extra = sorted(i for i in seen if not 0 <= i < n)
        if missing or extra:
            raise LatticeError(f"atoms do not cover 0..{n - 1} (missing {missing}, out of range {extra})")
        self.atoms: tuple[tuple[int, ...], ...] = tuple(parsed)
        self.size = n
        self._atom_of = tuple(seen[i] for i in range(n))

    @classmethod
    def trivial(cls, size: int) -> Partition:
        return cls([range(size)], size)

    @classmethod
    def finest(cls, size: int) -> Partition:
        return cls([[i] for i in range(size)], size)

    def atom_of(self, i: int) -> int:
        """Index of the atom containing outcome ``i``."""
        return self._atom_of[i]

    def refines(self, coarser: Partition) -> bool:
        """True when every atom of ``self`` lies inside an atom of ``coarser``."""
        if self.size != coarser.size:
            return False
        return all(len({coarser.atom_of(i) for i in atom}) == 1 for atom in self.atoms)

    def is_measurable(self, f: LatticeVector) -> bool:
        """True when ``f`` is constant on every atom."""
        v = f.values
        return all(v[i] == v[atom[0]] for atom in self.atoms for i in atom)

    def __len__(self):
        return len(self.atoms)

    def __iter__(self):
        return iter(self.atoms)

    def __eq__(self, other):
        if not isinstance(other, Partition):
            return NotImplemented
        return self.atoms == other.atoms and self.size == other.size

    def __hash__(self):
        return hash(self.atoms)

    def __repr__(self):
        return "Partition(" + " ".join("{" + ",".join(map(str, a)) + "}" for a in self.atoms) + ")"


class ConditionalSystem:
    """The triple ``(E, e, F)``: a sample space plus the partition defining ``F``."""

    __slots__ = ("space", "partition", "_atom_weights")

    def __init__(self, space: SampleSpace, partition: Partition):
        if partition.size != space.size:
            raise DimensionError(f"partition covers {partition.size} outcomes, space has {space.size}")
        self.space = space
        self.partition = partition
        w = space.weights
        self._atom_weights = tuple(sum(w[i] for i in atom) for atom in partition.atoms)

    @classmethod
    def trivial(cls, space: SampleSpace) -> ConditionalSystem:
        return cls(space, Partition.trivial(space.size))

    @property
    def atoms(self):
        return self.partition.atoms

    def in_range(self, f: LatticeVector) -> bool:
        """Membership in ``R(F)``."""
        _same_space(self.space, f.space)
        return self.partition.is_measurable(f)

    def conditional_weights(self, atom_index: int) -> tuple[Fraction, ...]:
        """Weights of the outcomes of one atom, renormalised to sum to one."""
        total = self._atom_weights[atom_index]
        return tuple(self.space.weights[i] / total for i in self.partition.atoms[atom_index])

    def _check(self, f: LatticeVector) -> None:
        _same_space(self.space, f.space)

    def _fill(self, per_atom: Sequence) -> LatticeVector:
        out = [None] * self.space.size
        for atom, v in zip(self.partition.atoms, per_atom):
            for i in atom:
                out[i] = v
        return LatticeVector._raw(self.space, tuple(out))

    def __eq__(self, other):
        if not isinstance(other, ConditionalSystem):
            return NotImplemented
        return self.space == other.space and self.partition == other.partition

    def __hash__(self):
        return hash((self.space, self.partition))

    def __repr__(self):
        return f"ConditionalSystem({self.space!r}, {self.partition!r})"


def cond_expectation(f: LatticeVector, sys: ConditionalSystem) -> LatticeVector:
    """Weighted average of ``f`` over each atom."""
    sys._check(f)
    w, v = sys.space.weights, f.values
    return sys._fill(
        [sum(w[i] * v[i] for i in atom) / total for atom, total in zip(sys.atoms, sys._atom_weights)]
    )


def cond_sup(f: LatticeVector, sys: ConditionalSystem) -> LatticeVector:
    """Conditional supremum ``M_F(f)``: the least element of ``R(F)`` above ``f``."""
    sys._check(f)
    v = f.values
    return sys._fill([max(v[i] for i in atom) for atom in sys.atoms])


def cond_inf(f: LatticeVector, sys: ConditionalSystem) -> LatticeVector:
    """Conditional infimum ``m_F(f)``: the greatest element of ``R(F)`` below ``f``."""
    sys._check(f)
    v = f.values
    return sys._fill([min(v[i] for i in atom) for atom in sys.atoms])


def norm_inf(f: LatticeVector, sys: ConditionalSystem) -> LatticeVector:
    """Vector-valued sup norm ``||f||_{inf,F} = M_F(|f|)``."""
    return cond_sup(abs(f), sys)


def band_component(h: LatticeVector) -> LatticeVector:
    """Indicator of the support of ``h+``.

    The result ``p`` is a component of the unit (``p & (e - p) == 0``) with
    ``p * h == h.pos`` and ``(e - p) * h == -h.neg``.
    """
    one, zero = Fraction(1), Fraction(0)
    return LatticeVector._raw(h.space, tuple(one if a > 0 else zero for a in h.values))


def n_p_norm(f: LatticeVector, sys: ConditionalSystem, p=2) -> np.ndarray:
    """Conditional ``L^p`` norm ``F(|f|^p)^(1/p)`` as a float array.

    Each atom is scaled by its maximum of ``|f|`` before exponentiation, so every
    powered term lies in ``[0, 1]`` and large ``p`` cannot overflow.  For
    ``p == 1`` the value is the exact conditional expectation of ``|f|``,
    converted to float at the end.
    """
    sys._check(f)
    if isinstance(p, (int, Rational)):
        p_exact = Fraction(p)
        if p_exact < 1:
            raise LatticeError(f"p must be >= 1, got {p}")
        if p_exact == 1:
            return cond_expectation(abs(f), sys).to_numpy()
    p = float(p)
    if not p >= 1:
        raise LatticeError(f"p must be >= 1, got {p}")
    a = abs(f).values
    per_atom = []
    for k, atom in enumerate(sys.atoms):
        top = max(a[i] for i in atom)
        if top == 0:
            per_atom.append(0.0)
            continue
        if all(a[i] == top for i in atom):
            per_atom.append(float(top))
            continue
        cw = sys.conditional_weights(k)
        s = math.fsum(float(c) * float(a[i] / top) ** p for c, i in zip(cw, atom))
        # s <= 1 exactly; float rounding of the weights must not push N_p past the maximum
        per_atom.append(float(top) * min(s, 1.0) ** (1.0 / p))
    out = np.empty(sys.space.size)
    for atom, v in zip(sys.atoms, per_atom):
        out[list(atom)] = v
    return out


@dataclass(frozen=True)
class LpLimit:
    """Conditional ``L^p`` norms along a doubling grid and their gaps to ``M_F(f)``."""

    ps: tuple[int, ...]
    norms: np.ndarray
    gaps: np.ndarray
    target: LatticeVector
    monotone: bool

    @property
    def final_gap(self) -> float:
        return float(self.gaps[-1])


def lp_limit_estimate(f: LatticeVector, sys: ConditionalSystem, p_max: int = 4096) -> LpLimit:
    """Follow ``N_p(f)`` for ``p = 2, 4, ..., p_max`` towards ``M_F(f)``.

    ``f`` must be non-negative.  ``gaps[k]`` is the sup-distance between the
    ``k``-th norm and ``M_F(f)``; ``monotone`` records whether the norms are
    non-decreasing in ``p`` at every outcome.
    """
    sys._check(f)
    if any(v < 0 for v in f.values):
        raise LatticeError("lp_limit_estimate requires a non-negative vector")
    if p_max < 2:
        raise LatticeError(f"p_max must be at least 2, got {p_max}")
    ps = []
    p = 2
    while p <= p_max:
        ps.append(p)
        p *= 2
    target = cond_sup(f, sys)
    t = target.to_numpy()
    norms = np.array([n_p_norm(f, sys, q) for q in ps])
    gaps = np.abs(t[None, :] - norms).max(axis=1)
    monotone = bool(np.all(np.diff(norms, axis=0) >= 0))
    return LpLimit(tuple(ps), norms, gaps, target, monotone)


class PiecewiseAffineConvex:
    """Convex function ``x -> max_i (slope_i * x + intercept_i)``."""

    __slots__ = ("pieces",)

    def __init__(self, pieces: Iterable[tuple]):
        ps = tuple((as_fraction(a), as_fraction(b)) for a, b in pieces)
        if not ps:
            raise LatticeError("a piecewise affine function needs at least one piece")
        self.pieces = ps

    @classmethod
    def absolute(cls) -> PiecewiseAffineConvex:
        return cls([(1, 0), (-1, 0)])

    @classmethod
    def call(cls, strike) -> PiecewiseAffineConvex:
        """Payoff ``(x - strike)+``."""
        k = as_fraction(strike)
        return cls([(0, 0), (1, -k)])

    def __call__(self, x) -> Fraction:
        x = as_fraction(x)
        return max(a * x + b for a, b in self.pieces)

    def __repr__(self):
        return "PiecewiseAffineConvex(" + ", ".join(f"{a}*x + {b}" for a, b in self.pieces) + ")"


def apply_convex(phi: PiecewiseAffineConvex, f: LatticeVector) -> LatticeVector:
    return LatticeVector._raw(f.space, tuple(phi(v) for v in f.values))


def delta(f: LatticeVector, sys: ConditionalSystem) -> LatticeVector:
    """Oscillation ``M_F(f) - m_F(f)``; zero exactly on ``R(F)``."""
    return cond_sup(f, sys) - cond_inf(f, sys)


def nearest_in_range(f: LatticeVector, sys: ConditionalSystem) -> tuple[LatticeVector, LatticeVector]:
    """Best approximation of ``f`` in ``R(F)`` for the vector-valued sup norm.

    Returns ``(g, dist)`` with ``g`` the atomwise midpoint of ``f`` and
    ``dist = M_F(|f - g|) = delta(f) / 2``.
    """
    hi, lo = cond_sup(f, sys), cond_inf(f, sys)
    return (hi + lo) / 2, (hi - lo) / 2
