"""Entropy formulas and candidate functionals on the probability simplex."""
from __future__ import annotations

from fractions import Fraction
from pathlib import Path
from typing import Callable, Mapping

from .errors import AlphaIsOne
from .simplex import StochasticVector, parse_rational, parse_vector, uniform
from .values import (
    DEFAULT_PRECISION,
    Alpha,
    EntropyValue,
    as_alpha,
    context,
    pow_alpha,
    rational_to_mpf,
)


def _power_sum(v: StochasticVector, alpha: Alpha, prec: int) -> EntropyValue:
    total = EntropyValue.of(0, prec)
    for p in v:
        total = total + pow_alpha(p, alpha, prec)
    return total


def tsallis(v: StochasticVector, alpha, prec: int = DEFAULT_PRECISION) -> EntropyValue:
    """(1 - sum p_i**alpha) / (alpha - 1)."""
    alpha = as_alpha(alpha)
    if alpha.is_one():
        raise AlphaIsOne()
    return (1 - _power_sum(v, alpha, prec)) / (alpha.as_value(prec) - 1)


def _xlogx_sum(v: StochasticVector, prec: int, log) -> EntropyValue:
    # 0 ln 0 = 1 ln 1 = 0 keeps degenerate vectors exact
    if all(p == 0 or p == 1 for p in v):
        return EntropyValue.of(0, prec)
    ctx = context(prec + 32)
    acc = ctx.mpf(0)
    for p in v:
        if p != 0:
            x = rational_to_mpf(p, prec + 32)
            acc += x * log(ctx, x)
    return EntropyValue(None, context(prec).mpf(acc), prec)


def shannon(v: StochasticVector, prec: int = DEFAULT_PRECISION) -> EntropyValue:
    """-sum p_i ln p_i."""
    return -_xlogx_sum(v, prec, lambda ctx, x: ctx.ln(x))


def closed_form(v: StochasticVector, alpha, c, prec: int = DEFAULT_PRECISION) -> EntropyValue:
    """The characterized value with normalization c = H(1/2, 1/2).

    alpha = 1:      -c * sum p_i log2 p_i
    alpha = 2:      2c (1 - sum p_i**2)
    otherwise:      c (1 - sum p_i**alpha) / (1 - 2**(1 - alpha))
    """
    alpha = as_alpha(alpha)
    c = EntropyValue.of(c, prec)
    if alpha.is_one():
        return -c * _xlogx_sum(v, prec, lambda ctx, x: ctx.log(x, 2))
    if alpha.is_two():
        return 2 * c * (1 - _power_sum(v, alpha, prec))
    two_pow = _two_to_one_minus(alpha, prec)
    return c * (1 - _power_sum(v, alpha, prec)) / (1 - two_pow)


def _two_to_one_minus(alpha: Alpha, prec: int) -> EntropyValue:
    """2**(1 - alpha), exact for integer alpha."""
    if alpha.is_exact_integer:
        return EntropyValue.of(Fraction(2) ** (1 - alpha.integer), prec)
    return 2 * _half_pow(alpha, prec)


def _half_pow(alpha: Alpha, prec: int) -> EntropyValue:
    return pow_alpha(Fraction(1, 2), alpha, prec)


# -- functional objects ----------------------------------------------------------

class EntropyFunctional:
    """A deterministic map from stochastic vectors to entropy values."""

    name = "functional"
    alpha: Alpha | None = None
    prec = DEFAULT_PRECISION

    def evaluate(self, v: StochasticVector) -> EntropyValue:
        raise NotImplementedError

    def __call__(self, v: StochasticVector) -> EntropyValue:
        return self.evaluate(v)

    def __repr__(self):
        return f"<{type(self).__name__} {self.name}>"


class TsallisFunctional(EntropyFunctional):
    def __init__(self, alpha, prec: int = DEFAULT_PRECISION):
        self.alpha = as_alpha(alpha)
        if self.alpha.is_one():
            raise AlphaIsOne()
        self.prec = prec
        self.name = f"tsallis(alpha={self.alpha})"

    def evaluate(self, v):
        return tsallis(v, self.alpha, self.prec)


class ShannonFunctional(EntropyFunctional):
    def __init__(self, prec: int = DEFAULT_PRECISION):
        self.alpha = Alpha(1)
        self.prec = prec
        self.name = "shannon"

    def evaluate(self, v):
        return shannon(v, self.prec)


class ClosedFormFunctional(EntropyFunctional):
    def __init__(self, alpha, c, prec: int = DEFAULT_PRECISION):
        self.alpha = as_alpha(alpha)
        self.c = EntropyValue.of(c, prec)
        self.prec = prec
        self.name = f"closed-form(alpha={self.alpha}, c={self.c})"

    def evaluate(self, v):
        return closed_form(v, self.alpha, self.c, self.prec)


class CallableFunctional(EntropyFunctional):
    """Wrap a plain function returning an int, Fraction, mpf or EntropyValue."""

    def __init__(self, fn: Callable, name: str = "callable", alpha=None,
                 prec: int = DEFAULT_PRECISION):
        self.fn = fn
        self.name = name
        self.alpha = as_alpha(alpha) if alpha is not None else None
        self.prec = prec

    def evaluate(self, v):
        return EntropyValue.of(self.fn(v), self.prec)


class TabulatedFunctional(EntropyFunctional):
    def __init__(self, table: Mapping[StochasticVector, object], fallback: EntropyFunctional):
        self.table = {k: EntropyValue.of(val, fallback.prec) for k, val in table.items()}
        self.fallback = fallback
        self.alpha = fallback.alpha
        self.prec = fallback.prec
        self.name = f"table[{len(self.table)}]/{fallback.name}"

    def evaluate(self, v):
        hit = self.table.get(v)
        return hit if hit is not None else self.fallback(v)


class PerturbedFunctional(EntropyFunctional):
    def __init__(self, base: EntropyFunctional, at: StochasticVector, delta):
        self.base = base
        self.at = at
        self.delta = Fraction(delta)
        self.alpha = base.alpha
        self.prec = base.prec
        self.name = f"perturb({base.name}, at={at}, delta={self.delta})"

    def evaluate(self, v):
        value = self.base(v)
        return value + self.delta if v == self.at else value


def tsallis_functional(alpha, prec: int = DEFAULT_PRECISION) -> TsallisFunctional:
    return TsallisFunctional(alpha, prec)


def shannon_functional(prec: int = DEFAULT_PRECISION) -> ShannonFunctional:
    return ShannonFunctional(prec)


def default_functional(alpha, prec: int = DEFAULT_PRECISION) -> EntropyFunctional:
    """Tsallis for alpha != 1, Shannon for alpha = 1."""
    alpha = as_alpha(alpha)
    return ShannonFunctional(prec) if alpha.is_one() else TsallisFunctional(alpha, prec)


def closed_form_functional(alpha, c=None, prec: int = DEFAULT_PRECISION) -> ClosedFormFunctional:
    """Closed form normalized by c; c defaults to the reference entropy at (1/2, 1/2)."""
    if c is None:
        c = default_functional(alpha, prec)(uniform(2))
    return ClosedFormFunctional(alpha, c, prec)


def make_tabulated(table, fallback: EntropyFunctional) -> TabulatedFunctional:
    return TabulatedFunctional(table, fallback)


def perturb(base: EntropyFunctional, at: StochasticVector, delta) -> PerturbedFunctional:
    return PerturbedFunctional(base, at, delta)


def load_table(path, prec: int = DEFAULT_PRECISION) -> dict[StochasticVector, EntropyValue]:
    """Read ``vector ; value`` lines. Blank lines and ``#`` comments are skipped."""
    table = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ";" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'vector ; value'")
        vec_text, val_text = line.split(";", 1)
        table[parse_vector(vec_text)] = EntropyValue.of(parse_rational(val_text), prec)
    return table


def dump_table(table: Mapping[StochasticVector, EntropyValue]) -> str:
    lines = []
    for v in sorted(table, key=StochasticVector.sort_key):
        val = table[v]
        lines.append(f"{v} ; {val if val.is_exact else val.decimal(20)}")
    return "\n".join(lines) + "\n"
