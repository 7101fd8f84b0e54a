"""Exact stochastic vectors and the structural operations on them.

Indices ``j`` and permutation images are 1-based, matching the usual way
additivity instances are written (merge of components j and j+1).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement
from math import gcd
from typing import Iterable, Iterator, Sequence

from .errors import (
    ArityMismatch,
    IndexOutOfRange,
    InvalidConditional,
    InvalidPermutation,
    NegativeComponent,
    NotNormalized,
    SimplexError,
    ZeroMass,
)

Rational = Fraction

_ZERO = Fraction(0)
_ONE = Fraction(1)


def as_rational(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floats are not accepted; pass an exact rational")
    return Fraction(x)


@dataclass(frozen=True)
class StochasticVector:
    """A finite vector of nonnegative rationals summing to exactly one."""

    components: tuple[Fraction, ...]

    def __post_init__(self):
        comps = tuple(as_rational(c) for c in self.components)
        if not comps:
            raise SimplexError("a stochastic vector needs at least one component")
        for c in comps:
            if c < 0:
                raise NegativeComponent(f"negative component {c}")
        total = sum(comps, _ZERO)
        if total != 1:
            raise NotNormalized(total)
        object.__setattr__(self, "components", comps)

    @classmethod
    def _trusted(cls, comps: tuple[Fraction, ...]) -> "StochasticVector":
        # skips validation; callers guarantee the invariants
        obj = object.__new__(cls)
        object.__setattr__(obj, "components", comps)
        return obj

    def __len__(self) -> int:
        return len(self.components)

    def __iter__(self) -> Iterator[Fraction]:
        return iter(self.components)

    def __getitem__(self, i):
        return self.components[i]

    def __repr__(self) -> str:
        return f"StochasticVector({format_vector(self)})"

    def __str__(self) -> str:
        return format_vector(self)

    @property
    def denominator(self) -> int:
        """Least common denominator of the components."""
        d = 1
        for c in self.components:
            d = d * c.denominator // gcd(d, c.denominator)
        return d

    def sort_key(self):
        """Graded lexicographic key: length first, then componentwise."""
        return (len(self.components), self.components)


@dataclass(frozen=True)
class NestedVector:
    outer: StochasticVector
    blocks: tuple[tuple[Fraction, ...], ...]

    def flatten(self) -> StochasticVector:
        return StochasticVector._trusted(tuple(c for blk in self.blocks for c in blk))

    @property
    def block_lengths(self) -> tuple[int, ...]:
        return tuple(len(b) for b in self.blocks)


def from_rationals(values: Iterable) -> StochasticVector:
    return StochasticVector(tuple(values))


def uniform(n: int) -> StochasticVector:
    if n < 1:
        raise SimplexError("uniform vector needs n >= 1")
    return StochasticVector._trusted((Fraction(1, n),) * n)


def append_zero(v: StochasticVector) -> StochasticVector:
    return StochasticVector._trusted(v.components + (_ZERO,))


def _check_pair_index(v: StochasticVector, j: int) -> None:
    if not 1 <= j <= len(v) - 1:
        raise IndexOutOfRange(f"pair index {j} outside 1..{len(v) - 1}")


def merge_adjacent(v: StochasticVector, j: int) -> StochasticVector:
    """Replace components j and j+1 by their sum."""
    _check_pair_index(v, j)
    c = v.components
    return StochasticVector._trusted(c[: j - 1] + (c[j - 1] + c[j],) + c[j + 1:])


def pair_mass(v: StochasticVector, j: int) -> Fraction:
    _check_pair_index(v, j)
    return v.components[j - 1] + v.components[j]


def conditional_pair(v: StochasticVector, j: int) -> StochasticVector:
    s = pair_mass(v, j)
    if s == 0:
        raise ZeroMass(f"components {j} and {j + 1} are both zero")
    return StochasticVector._trusted((v.components[j - 1] / s, v.components[j] / s))


def split_at(v: StochasticVector, j: int, pair: StochasticVector) -> StochasticVector:
    """Inverse of merge_adjacent: split component j by the two-point vector ``pair``."""
    if not 1 <= j <= len(v):
        raise IndexOutOfRange(f"index {j} outside 1..{len(v)}")
    if len(pair) != 2:
        raise ArityMismatch("split needs a two-component vector")
    c = v.components
    s = c[j - 1]
    return StochasticVector._trusted(c[: j - 1] + (s * pair[0], s * pair[1]) + c[j:])


def _coerce_conditional(cond) -> StochasticVector:
    if isinstance(cond, StochasticVector):
        return cond
    try:
        return StochasticVector(tuple(cond))
    except (SimplexError, TypeError, ValueError) as exc:
        raise InvalidConditional(str(exc)) from exc


def compose(outer: StochasticVector, conditionals: Sequence) -> NestedVector:
    """Build the grouped vector whose block i is ``outer[i]`` times conditional i.

    ``conditionals`` may list one entry per outer component (entries for zero
    components are ignored) or one entry per positive component only. A zero
    outer component always yields the single-entry block ``(0,)``.
    """
    n = len(outer)
    positive = [i for i, p in enumerate(outer) if p > 0]
    if len(conditionals) == n:
        chosen = {i: conditionals[i] for i in positive}
    elif len(conditionals) == len(positive):
        chosen = dict(zip(positive, conditionals))
    else:
        raise ArityMismatch(
            f"{len(conditionals)} conditionals for {n} outer components "
            f"({len(positive)} positive)"
        )
    blocks = []
    for i, p in enumerate(outer):
        if p == 0:
            blocks.append((_ZERO,))
        else:
            cond = _coerce_conditional(chosen[i])
            blocks.append(tuple(p * q for q in cond))
    return NestedVector(outer, tuple(blocks))


def nest_by_lengths(v: StochasticVector, lengths: Sequence[int]) -> NestedVector:
    """Group consecutive components of ``v`` into blocks of the given lengths."""
    if sum(lengths) != len(v) or any(m < 1 for m in lengths):
        raise ArityMismatch(f"block lengths {tuple(lengths)} do not tile length {len(v)}")
    blocks, pos = [], 0
    for m in lengths:
        blk = v.components[pos:pos + m]
        if m > 1 and sum(blk) == 0:
            raise ZeroMass("a zero-mass block must have length 1")
        blocks.append(blk)
        pos += m
    outer = StochasticVector._trusted(tuple(sum(b, _ZERO) for b in blocks))
    return NestedVector(outer, tuple(blocks))


def block_conditional(nested: NestedVector, i: int) -> StochasticVector | None:
    """Conditional vector of block i (0-based); None for a zero-mass block."""
    p = nested.outer[i]
    if p == 0:
        return None
    return StochasticVector._trusted(tuple(q / p for q in nested.blocks[i]))


def permute(v: StochasticVector, perm: Sequence[int]) -> StochasticVector:
    """Result component i is input component perm[i] (1-based images)."""
    n = len(v)
    if len(perm) != n or sorted(perm) != list(range(1, n + 1)):
        raise InvalidPermutation(f"{tuple(perm)} is not a permutation of 1..{n}")
    return StochasticVector._trusted(tuple(v.components[k - 1] for k in perm))


def inverse_permutation(perm: Sequence[int]) -> tuple[int, ...]:
    inv = [0] * len(perm)
    for i, k in enumerate(perm, start=1):
        inv[k - 1] = i
    return tuple(inv)


def swap(v: StochasticVector) -> StochasticVector:
    """(p1, p2) -> (p2, p1) for a two-component vector."""
    if len(v) != 2:
        raise ArityMismatch("swap is defined on two-component vectors")
    return StochasticVector._trusted((v[1], v[0]))


def pair(p) -> StochasticVector:
    """The two-component vector (p, 1-p)."""
    p = as_rational(p)
    if not 0 <= p <= 1:
        raise SimplexError(f"{p} is not in [0, 1]")
    return StochasticVector._trusted((p, 1 - p))


# -- enumeration helpers -------------------------------------------------------

def grid_vectors(b: int, n: int) -> Iterator[StochasticVector]:
    """All length-n vectors whose components are multiples of 1/b, in lex order."""
    if n == 1:
        yield StochasticVector._trusted((_ONE,))
        return
    # cut points c_1 <= ... <= c_{n-1}; components are successive gaps
    for cuts in combinations_with_replacement(range(b + 1), n - 1):
        edges = (0,) + cuts + (b,)
        yield StochasticVector._trusted(
            tuple(Fraction(edges[i + 1] - edges[i], b) for i in range(n))
        )


def grid_up_to(b: int, max_length: int) -> list[StochasticVector]:
    out = []
    for n in range(1, max_length + 1):
        out.extend(sorted(grid_vectors(b, n), key=StochasticVector.sort_key))
    return out


def farey_points(max_denominator: int) -> list[Fraction]:
    """All rationals in [0, 1] with denominator at most ``max_denominator``, ascending."""
    pts = {Fraction(a, d) for d in range(1, max_denominator + 1) for a in range(d + 1)}
    return sorted(pts)


def delta2_vectors(max_denominator: int) -> list[StochasticVector]:
    return [pair(p) for p in farey_points(max_denominator)]


def vectors_with_denominator_at_most(d: int, max_length: int) -> list[StochasticVector]:
    """Every vector of length <= max_length whose common denominator is <= d."""
    seen = set()
    for q in range(1, d + 1):
        for n in range(1, max_length + 1):
            for v in grid_vectors(q, n):
                seen.add(v)
    return sorted(seen, key=StochasticVector.sort_key)


def random_vector(rng, max_denominator: int, max_length: int) -> StochasticVector:
    n = rng.randint(1, max_length)
    d = rng.randint(1, max_denominator)
    cuts = sorted(rng.randint(0, d) for _ in range(n - 1))
    edges = [0] + cuts + [d]
    return StochasticVector._trusted(
        tuple(Fraction(edges[i + 1] - edges[i], d) for i in range(n))
    )


# -- text format ---------------------------------------------------------------

def format_rational(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def format_vector(v: StochasticVector) -> str:
    return ",".join(format_rational(c) for c in v)


def parse_rational(token: str) -> Fraction:
    token = "".join(token.split())
    if not token:
        raise SimplexError("empty rational token")
    try:
        return Fraction(token)
    except (ValueError, ZeroDivisionError) as exc:
        raise SimplexError(f"cannot parse rational {token!r}") from exc


def parse_vector(text: str) -> StochasticVector:
    """Parse ``"1/2, 1/4, 1/4"`` into a validated vector."""
    stripped = "".join(text.split())
    if not stripped:
        raise SimplexError("empty vector")
    return StochasticVector(tuple(parse_rational(tok) for tok in stripped.split(",")))
