"""Executable versions of the identities used to characterize Tsallis entropy.

Covers the two-point relation between H(p1, p2) and H(p2, p1), the interval
map f and its orbits, the symmetry-defect recursion for alpha = 2,
reconstruction of a functional from its two-point restriction by repeated
merging, and the rational-grid route through uniform vectors.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Callable

from .errors import AlphaIsOne, AmbiguousReconstruction, DomainError, StepLimitExceeded
from .functionals import EntropyFunctional
from .simplex import (
    StochasticVector,
    conditional_pair,
    format_rational,
    merge_adjacent,
    pair,
    pair_mass,
    uniform,
)
from .values import DEFAULT_PRECISION, EntropyValue, as_alpha, pow_alpha

HALF = Fraction(1, 2)
TWO_THIRDS = Fraction(2, 3)
ONE = Fraction(1)
AGREEMENT_TOLERANCE = 1e-10


# -- two-point relations ---------------------------------------------------------

def lemma1_residual(F: EntropyFunctional, alpha, p) -> EntropyValue:
    """(1 - 3*2**-a) H(p,1-p) + 2**-a H(1-p,p) - H(1/2,1/2) (1 - p**a - (1-p)**a)."""
    alpha = as_alpha(alpha)
    p = Fraction(p)
    prec = F.prec
    v = pair(p)
    w = pair(1 - p)
    half_pow = pow_alpha(HALF, alpha, prec)
    lhs = (1 - 3 * half_pow) * F(v) + half_pow * F(w)
    rhs = F(uniform(2)) * (1 - pow_alpha(p, alpha, prec) - pow_alpha(1 - p, alpha, prec))
    return lhs - rhs


def alpha2_sum_residual(F: EntropyFunctional, p) -> EntropyValue:
    """H(p,1-p) + H(1-p,p) - 4 H(1/2,1/2) (1 - p**2 - (1-p)**2)."""
    p = Fraction(p)
    lhs = F(pair(p)) + F(pair(1 - p))
    return lhs - 4 * F(uniform(2)) * (1 - p * p - (1 - p) * (1 - p))


def f_map(p) -> Fraction:
    """max{(1-p)/p, 1 - (1-p)/p} on [1/2, 1]."""
    p = Fraction(p)
    if not HALF <= p <= ONE:
        raise DomainError(f"f is defined on [1/2, 1], got {p}")
    q = (1 - p) / p
    return max(q, 1 - q)


def symmetry_defect(F: EntropyFunctional, p) -> EntropyValue:
    """D(p) = |H(p, 1-p) - H(1-p, p)| for p in [1/2, 1]."""
    p = Fraction(p)
    if not HALF <= p <= ONE:
        raise DomainError(f"the defect is defined on [1/2, 1], got {p}")
    return abs(F(pair(p)) - F(pair(1 - p)))


# -- orbits ----------------------------------------------------------------------

def in_closed_hitting_set(p: Fraction) -> bool:
    return HALF <= p <= TWO_THIRDS


def in_open_interval(p: Fraction) -> bool:
    return HALF < p < TWO_THIRDS


@dataclass
class OrbitTrace:
    start: Fraction
    points: list[Fraction]
    hit_index: int | None
    open_hit_index: int | None
    reached_one: bool

    @property
    def denominators(self) -> list[int]:
        return [q.denominator for q in self.points]

    @property
    def steps(self) -> int:
        return len(self.points) - 1

    @property
    def passes_two_thirds(self) -> bool:
        return TWO_THIRDS in self.points

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["step", "value", "denominator", "in_closed_hitting_set",
                         "in_open_interval"])
        for k, q in enumerate(self.points):
            writer.writerow([k, format_rational(q), q.denominator,
                             int(in_closed_hitting_set(q)), int(in_open_interval(q))])
        return buf.getvalue()


def orbit(p, max_steps: int | None = None) -> OrbitTrace:
    """Iterate f from p until the fixed point 1 is reached.

    ``max_steps`` defaults to the denominator of p, which always suffices
    because every step strictly lowers the denominator.
    """
    p = Fraction(p)
    if not HALF <= p <= ONE:
        raise DomainError(f"orbits start in [1/2, 1], got {p}")
    if max_steps is None:
        max_steps = p.denominator
    # with p = a/b in lowest terms, f(p) is (b-a)/a or (2a-b)/a, both already reduced
    a, b = p.numerator, p.denominator
    pairs = [(a, b)]
    while a != b:
        if len(pairs) - 1 >= max_steps:
            raise StepLimitExceeded(f"orbit of {p} did not reach 1 in {max_steps} steps")
        a, b = (b - a, a) if 2 * b >= 3 * a else (2 * a - b, a)
        pairs.append((a, b))
    points = [Fraction(x, y) for x, y in pairs]
    hit = next((k for k, q in enumerate(points) if in_closed_hitting_set(q)), None)
    open_hit = next((k for k, q in enumerate(points) if in_open_interval(q)), None)
    return OrbitTrace(p, points, hit, open_hit, True)


def iterate_f(p, n: int) -> list[Fraction]:
    """[p, f(p), ..., f^n(p)]."""
    pts = [Fraction(p)]
    for _ in range(n):
        pts.append(f_map(pts[-1]))
    return pts


def defect_recursion_residual(F: EntropyFunctional, p, n: int) -> EntropyValue:
    """D(p) - (prod_{k=0}^{n-1} f^k(p))**2 D(f^n(p)).

    Unrolling the one-step relation D(q) = q**2 D(f(q)) n times gives the
    factors p, f(p), ..., f^(n-1)(p).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    pts = iterate_f(p, n)
    factor = ONE
    for q in pts[:-1]:
        factor *= q
    return symmetry_defect(F, pts[0]) - factor * factor * symmetry_defect(F, pts[-1])


def exceptional_starts(max_denominator: int) -> list[Fraction]:
    """Starting points in (2/3, 1) whose orbit never enters the open interval (1/2, 2/3)."""
    out = []
    for b in range(2, max_denominator + 1):
        for a in range(b):
            p = Fraction(a, b)
            if p.denominator != b or not TWO_THIRDS < p < ONE:
                continue
            if orbit(p).open_hit_index is None:
                out.append(p)
    return sorted(out)


# -- reconstruction from the two-point restriction ------------------------------

class Delta2Restriction:
    """A map defined on vectors of length <= 2 with value 0 at (1)."""

    def __init__(self, fn: Callable[[StochasticVector], EntropyValue],
                 prec: int = DEFAULT_PRECISION, name: str = "base"):
        self.fn = fn
        self.prec = prec
        self.name = name
        anchor = EntropyValue.of(fn(uniform(1)), prec)
        if not anchor.is_zero():
            raise DomainError(f"base value at (1) must be 0, got {anchor}")

    @classmethod
    def of(cls, F: EntropyFunctional) -> "Delta2Restriction":
        return cls(F, F.prec, F.name)

    def __call__(self, v: StochasticVector) -> EntropyValue:
        if len(v) > 2:
            raise DomainError("two-point restriction evaluated on a longer vector")
        return EntropyValue.of(self.fn(v), self.prec)


def _pick_leftmost(v):
    return 1


def _pick_rightmost(v):
    return len(v) - 1


def _pick_largest_mass(v):
    best_j, best_s = 1, None
    for j in range(1, len(v)):
        s = pair_mass(v, j)
        if best_s is None or s > best_s:
            best_j, best_s = j, s
    return best_j


STRATEGIES = {
    "leftmost": _pick_leftmost,
    "rightmost": _pick_rightmost,
    "largest-mass": _pick_largest_mass,
}


def _reconstruct(base: Delta2Restriction, alpha, v: StochasticVector, pick) -> EntropyValue:
    acc = EntropyValue.of(0, base.prec)
    while len(v) > 2:
        j = pick(v)
        s = pair_mass(v, j)
        if s != 0:
            acc = acc + pow_alpha(s, alpha, base.prec) * base(conditional_pair(v, j))
        v = merge_adjacent(v, j)
    return acc + base(v)


def reconstruct_from_pairs(base, alpha, v: StochasticVector,
                           strategy: str = "leftmost") -> EntropyValue:
    """Extend a two-point functional to v by merging adjacent components.

    Each merge of components j, j+1 with mass s contributes s**alpha times
    the base value of the conditional pair. ``strategy="consistent"`` runs
    every merge order and raises AmbiguousReconstruction if they disagree.
    """
    alpha = as_alpha(alpha)
    if not isinstance(base, Delta2Restriction):
        base = Delta2Restriction.of(base)
    if strategy == "consistent":
        return reconstruct_all(base, alpha, v)[0]
    try:
        pick = STRATEGIES[strategy]
    except KeyError:
        raise ValueError(f"unknown strategy {strategy!r}; "
                         f"choose from {sorted(STRATEGIES)} or 'consistent'") from None
    return _reconstruct(base, alpha, v, pick)


def reconstruct_all(base, alpha, v: StochasticVector,
                    tolerance: float = AGREEMENT_TOLERANCE) -> tuple[EntropyValue, dict]:
    alpha = as_alpha(alpha)
    if not isinstance(base, Delta2Restriction):
        base = Delta2Restriction.of(base)
    values = {name: _reconstruct(base, alpha, v, pick) for name, pick in STRATEGIES.items()}
    first = values["leftmost"]
    for name, val in values.items():
        if not val.close_to(first, rel=0.0, abs_tol=tolerance):
            raise AmbiguousReconstruction(
                f"merge orders disagree at {v}: leftmost={first}, {name}={val}")
    return first, values


class ReconstructedFunctional(EntropyFunctional):
    def __init__(self, base, alpha, strategy: str = "leftmost"):
        self.base = base if isinstance(base, Delta2Restriction) else Delta2Restriction.of(base)
        self.alpha = as_alpha(alpha)
        self.strategy = strategy
        self.prec = self.base.prec
        self.name = f"reconstructed({self.base.name}, {strategy})"

    def evaluate(self, v):
        return reconstruct_from_pairs(self.base, self.alpha, v, self.strategy)


# -- the rational-grid route -----------------------------------------------------

def rational_uniform_ratio(alpha, m: int, n: int, prec: int = DEFAULT_PRECISION) -> EntropyValue:
    """(1 - m**(1-alpha)) / (1 - n**(1-alpha)), the ratio H(u_m) / H(u_n)."""
    alpha = as_alpha(alpha)
    if alpha.is_one():
        raise AlphaIsOne()
    if m < 2 or n < 2:
        raise ValueError("uniform ratio needs m, n >= 2")
    if m == n:
        return EntropyValue.of(1, prec)
    return (1 - _inv_pow(m, alpha, prec)) / (1 - _inv_pow(n, alpha, prec))


def _inv_pow(k: int, alpha, prec) -> EntropyValue:
    """k**(1-alpha) = k * (1/k)**alpha."""
    return k * pow_alpha(Fraction(1, k), alpha, prec)


@dataclass
class RationalRoute:
    value: EntropyValue
    common_denominator: int
    uniform_values: dict = field(default_factory=dict)


def _uniform_value(alpha, k: int, c: EntropyValue, prec: int) -> EntropyValue:
    # H(u_1) = 0; otherwise scale H(u_2) = c by the uniform ratio
    if k == 1:
        return EntropyValue.of(0, prec)
    return c * rational_uniform_ratio(alpha, k, 2, prec)


def rational_route(alpha, v: StochasticVector, c, prec: int = DEFAULT_PRECISION) -> RationalRoute:
    """Evaluate H(v) through refinement into uniform vectors, without the closed form.

    With p_i = a_i/b, refining every p_i into a_i*n equal pieces gives the
    uniform vector on b*n points, which can also be reached from u_n by
    refining every piece into b parts:

        H(v) + sum p_i**alpha H(u_{a_i n}) = H(u_{bn}) = H(u_n) + n * n**-alpha H(u_b)
    """
    alpha = as_alpha(alpha)
    if alpha.is_one():
        raise AlphaIsOne()
    c = EntropyValue.of(c, prec)
    n = len(v)
    b = lcm(*(p.denominator for p in v))
    used = {}

    def U(k):
        if k not in used:
            used[k] = _uniform_value(alpha, k, c, prec)
        return used[k]

    value = U(n) + n * pow_alpha(Fraction(1, n), alpha, prec) * U(b)
    for p in v:
        a = p.numerator * (b // p.denominator)
        if a == 0:
            continue
        value = value - pow_alpha(p, alpha, prec) * U(a * n)
    return RationalRoute(value, b, used)


def rational_reconstruct(alpha, v: StochasticVector, c, prec: int = DEFAULT_PRECISION) -> EntropyValue:
    return rational_route(alpha, v, c, prec).value
