"""Entropy values (exact rational or extended-precision real) and the parameter alpha."""
from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from mpmath import MPContext
from mpmath.ctx_mp_python import mpf
from mpmath.libmp import from_rational, round_nearest

from .simplex import format_rational

DEFAULT_PRECISION = 128
PRECISION_ENV = "TSALLIS_LAB_PRECISION"
# relative agreement tolerance between exact and float routes
EVAL_TOLERANCE = 1e-12


@lru_cache(maxsize=None)
def context(prec: int = DEFAULT_PRECISION) -> MPContext:
    """A private mpmath context at ``prec`` bits (never the global one)."""
    ctx = MPContext()
    ctx.prec = prec
    return ctx


def precision_from_env(default: int = DEFAULT_PRECISION) -> int:
    raw = os.environ.get(PRECISION_ENV)
    return int(raw) if raw else default


def rational_to_mpf(x: Fraction, prec: int) -> mpf:
    ctx = context(prec)
    return ctx.make_mpf(from_rational(x.numerator, x.denominator, prec, round_nearest))


def to_mpf(x, prec: int) -> mpf:
    if isinstance(x, Fraction):
        return rational_to_mpf(x, prec)
    if isinstance(x, int):
        return rational_to_mpf(Fraction(x), prec)
    return context(prec).mpf(x)


class EntropyValue:
    """A value that is exact when possible and always has a rounded approximation."""

    __slots__ = ("exact", "approx", "prec")

    def __init__(self, exact: Fraction | None, approx: mpf, prec: int = DEFAULT_PRECISION):
        self.exact = exact
        self.approx = approx
        self.prec = prec

    @classmethod
    def of(cls, x, prec: int = DEFAULT_PRECISION) -> "EntropyValue":
        if isinstance(x, EntropyValue):
            return x
        if isinstance(x, (int, Fraction)):
            q = Fraction(x)
            return cls(q, rational_to_mpf(q, prec), prec)
        if isinstance(x, float):
            return cls(None, context(prec).mpf(x), prec)
        if isinstance(x, mpf):
            return cls(None, context(prec).mpf(x), prec)
        raise TypeError(f"cannot make an entropy value from {type(x).__name__}")

    @classmethod
    def approximate(cls, x, prec: int = DEFAULT_PRECISION) -> "EntropyValue":
        return cls(None, to_mpf(x, prec), prec)

    @property
    def is_exact(self) -> bool:
        return self.exact is not None

    def _binary(self, other, op_exact, op_approx):
        other = EntropyValue.of(other, self.prec)
        prec = max(self.prec, other.prec)
        if self.exact is not None and other.exact is not None:
            q = op_exact(self.exact, other.exact)
            return EntropyValue(q, rational_to_mpf(q, prec), prec)
        ctx = context(prec)
        return EntropyValue(None, op_approx(ctx.mpf(self.approx), ctx.mpf(other.approx)), prec)

    def __add__(self, other):
        return self._binary(other, lambda a, b: a + b, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, lambda a, b: a - b, lambda a, b: a - b)

    def __rsub__(self, other):
        return EntropyValue.of(other, self.prec) - self

    def __mul__(self, other):
        return self._binary(other, lambda a, b: a * b, lambda a, b: a * b)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._binary(other, lambda a, b: a / b, lambda a, b: a / b)

    def __rtruediv__(self, other):
        return EntropyValue.of(other, self.prec) / self

    def __neg__(self):
        if self.exact is not None:
            return EntropyValue(-self.exact, -self.approx, self.prec)
        return EntropyValue(None, -self.approx, self.prec)

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def sign(self) -> int:
        if self.exact is not None:
            return (self.exact > 0) - (self.exact < 0)
        return (self.approx > 0) - (self.approx < 0)

    def _cmp(self, other) -> int:
        return (self - other).sign()

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __eq__(self, other):
        if not isinstance(other, (EntropyValue, int, Fraction, mpf, float)):
            return NotImplemented
        return self._cmp(other) == 0

    def __hash__(self):
        return hash(self.exact if self.exact is not None else self.approx)

    def __float__(self):
        return float(self.approx)

    def is_zero(self) -> bool:
        return self.sign() == 0

    def close_to(self, other, rel: float = EVAL_TOLERANCE, abs_tol: float = 0.0) -> bool:
        """Exact equality when both are exact, else a relative/absolute comparison."""
        other = EntropyValue.of(other, self.prec)
        if self.exact is not None and other.exact is not None:
            return self.exact == other.exact
        diff = abs(float((self - other).approx))
        scale = max(abs(float(self.approx)), abs(float(other.approx)))
        return diff <= max(rel * scale, abs_tol)

    def decimal(self, digits: int = 15) -> str:
        return context(self.prec).nstr(self.approx, digits)

    def __str__(self) -> str:
        if self.exact is not None:
            return format_rational(self.exact)
        return "~" + self.decimal()

    def __repr__(self) -> str:
        return f"EntropyValue({self})"

    def to_json(self) -> dict:
        return {
            "exact": format_rational(self.exact) if self.exact is not None else None,
            "decimal": self.decimal(17),
        }


ZERO = EntropyValue.of(0)


@dataclass(frozen=True)
class Alpha:
    """The entropy parameter; exact rational or extended-precision real, always > 0."""

    value: Fraction | mpf

    def __post_init__(self):
        v = self.value
        if isinstance(v, (int, str)):
            v = Fraction(v)
        elif isinstance(v, float):
            raise TypeError("pass alpha as an exact rational, a string, or an mpf")
        if not v > 0:
            raise ValueError(f"alpha must be positive, got {v}")
        object.__setattr__(self, "value", v)

    @classmethod
    def parse(cls, text: str) -> "Alpha":
        return cls(Fraction("".join(text.split())))

    @property
    def is_exact(self) -> bool:
        return isinstance(self.value, Fraction)

    @property
    def is_exact_integer(self) -> bool:
        return self.is_exact and self.value.denominator == 1

    @property
    def integer(self) -> int:
        if not self.is_exact_integer:
            raise ValueError(f"alpha {self} is not an exact integer")
        return self.value.numerator

    def is_one(self) -> bool:
        return self.value == 1

    def is_two(self) -> bool:
        return self.value == 2

    def as_value(self, prec: int = DEFAULT_PRECISION) -> EntropyValue:
        if self.is_exact:
            return EntropyValue.of(self.value, prec)
        return EntropyValue.approximate(self.value, prec)

    def __str__(self) -> str:
        if self.is_exact:
            return format_rational(self.value)
        return context(DEFAULT_PRECISION).nstr(self.value, 15)


def as_alpha(a) -> Alpha:
    return a if isinstance(a, Alpha) else Alpha(a)


def pow_alpha(p: Fraction, alpha, prec: int = DEFAULT_PRECISION) -> EntropyValue:
    """p**alpha; exact for integer alpha or p in {0, 1}, with 0**alpha = 0."""
    alpha = as_alpha(alpha)
    p = Fraction(p)
    if p < 0:
        raise ValueError(f"pow_alpha needs p >= 0, got {p}")
    if p == 0 or p == 1:
        return EntropyValue.of(p, prec)
    if alpha.is_exact_integer:
        return EntropyValue.of(p ** alpha.integer, prec)
    guard = context(prec + 32)
    r = guard.power(rational_to_mpf(p, prec + 32), to_mpf(alpha.value, prec + 32))
    return EntropyValue(None, context(prec).mpf(r), prec)
