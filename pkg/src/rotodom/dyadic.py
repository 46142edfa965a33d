"""Exact arithmetic on dyadic rationals in [0, 1].

Every map in this package is a piecewise translation by a dyadic amount, so
orbit and classification computations never leave the grid of values
p / 2**n.  Numerators are arbitrary-precision integers and denominators are
tracked as exponents of two; floating point is never used for computation
(only for the optional decimal rendering in reports).

Conventions fixed here and relied on everywhere else:

* level-n intervals are half open, [p * 2**-n, (p+1) * 2**-n), so a dyadic
  boundary point belongs to the interval on its right;
* the value 1 is representable (interval right endpoints need it) but is
  rejected by the map-evaluation helpers, which act on [0, 1).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering

__all__ = [
    "Dyadic",
    "DyadicInterval",
    "normalize",
    "add_mod1",
    "level_index",
    "binary_digit",
]

_DYADIC_RE = re.compile(r"^(\d+)\s*/\s*(?:2\^(\d+)|(\d+))$")


@total_ordering
class Dyadic:
    """A dyadic rational num / 2**exp in [0, 1].

    Instances are normalized (num odd, or exp == 0) and treated as
    immutable; all operations return fresh values, so sharing between
    concurrent callers needs no coordination.
    """

    __slots__ = ("num", "exp")

    def __init__(self, num: int, exp: int = 0):
        if exp < 0:
            raise ValueError(f"exponent must be non-negative, got {exp}")
        if not 0 <= num <= (1 << exp):
            raise ValueError(f"{num}/2^{exp} lies outside [0, 1]")
        if num:
            shift = min((num & -num).bit_length() - 1, exp)
            num >>= shift
            exp -= shift
        else:
            exp = 0
        self.num = num
        self.exp = exp

    @classmethod
    def parse(cls, text: str) -> "Dyadic":
        """Parse "p/2^n" (or "p/q" with q a power of two), "0" or "1"."""
        text = text.strip()
        if text == "0":
            return cls(0)
        if text == "1":
            return cls(1)
        m = _DYADIC_RE.match(text)
        if not m:
            raise ValueError(f"cannot parse dyadic {text!r}; expected p/2^n, 0 or 1")
        num = int(m.group(1))
        if m.group(2) is not None:
            exp = int(m.group(2))
        else:
            den = int(m.group(3))
            if den <= 0 or den & (den - 1):
                raise ValueError(f"denominator of {text!r} is not a power of two")
            exp = den.bit_length() - 1
        return cls(num, exp)

    @classmethod
    def from_fraction(cls, value: Fraction | int) -> "Dyadic":
        f = Fraction(value)
        den = f.denominator
        if den & (den - 1):
            raise ValueError(f"{value} is not dyadic")
        return cls(f.numerator, den.bit_length() - 1)

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.num, 1 << self.exp)

    def num_at(self, exp: int) -> int:
        """Numerator of this value rewritten with denominator 2**exp."""
        if exp < self.exp:
            raise ValueError("cannot coarsen the denominator exactly")
        return self.num << (exp - self.exp)

    def __eq__(self, other):
        if isinstance(other, Dyadic):
            return self.num == other.num and self.exp == other.exp
        return NotImplemented

    def __lt__(self, other):
        if isinstance(other, Dyadic):
            return self.num << other.exp < other.num << self.exp
        return NotImplemented

    def __hash__(self):
        return hash((self.num, self.exp))

    def __str__(self):
        if self.exp == 0:
            return str(self.num)
        return f"{self.num}/2^{self.exp}"

    def __repr__(self):
        return f"Dyadic({self})"

    def decimal(self, max_places: int = 12) -> str:
        """Exact decimal expansion when short enough, otherwise rounded."""
        if self.exp <= max_places:
            digits = str(self.num * 5 ** self.exp).rjust(self.exp, "0")
            if self.exp == 0:
                return digits
            return f"0.{digits.zfill(self.exp)}"
        return f"~{float(self.fraction):.12g}"


def normalize(num: int, exp: int) -> Dyadic:
    """The unique normalized representation of num / 2**exp in [0, 1]."""
    return Dyadic(num, exp)


def _require_below_one(x: Dyadic):
    if x.num == 1 and x.exp == 0:
        raise ValueError("map evaluation is defined on [0, 1); got 1")


def _as_dyadic_pair(t) -> tuple[int, int]:
    # signed displacement as (numerator, exponent); numerator may be negative
    if isinstance(t, Dyadic):
        return t.num, t.exp
    f = Fraction(t)
    den = f.denominator
    if den & (den - 1):
        raise ValueError(f"displacement {t} is not dyadic")
    return f.numerator, den.bit_length() - 1


def add_mod1(x: Dyadic, t) -> Dyadic:
    """Exact (x + t) mod 1 for a signed dyadic displacement t.

    t may be a Dyadic, an int, or a Fraction with power-of-two denominator.
    """
    tn, te = _as_dyadic_pair(t)
    m = max(x.exp, te)
    num = (x.num << (m - x.exp)) + (tn << (m - te))
    return Dyadic(num % (1 << m), m)


def level_index(x: Dyadic, n: int) -> int:
    """Index m with x in [m * 2**-n, (m+1) * 2**-n); requires x < 1."""
    if n < 0:
        raise ValueError(f"level must be non-negative, got {n}")
    _require_below_one(x)
    if x.exp <= n:
        return x.num << (n - x.exp)
    return x.num >> (x.exp - n)


def binary_digit(x: Dyadic, k: int) -> int:
    """Digit k (1-based) of the terminating binary expansion of x < 1."""
    if k < 1:
        raise ValueError(f"digit position must be >= 1, got {k}")
    _require_below_one(x)
    if k > x.exp:
        return 0
    return (x.num >> (x.exp - k)) & 1


@dataclass(frozen=True)
class DyadicInterval:
    """The half-open interval [index * 2**-level, (index+1) * 2**-level)."""

    level: int
    index: int

    def __post_init__(self):
        if self.level < 0:
            raise ValueError(f"level must be non-negative, got {self.level}")
        if not 0 <= self.index < (1 << self.level):
            raise ValueError(f"index {self.index} out of range for level {self.level}")

    @classmethod
    def containing(cls, x: Dyadic, level: int) -> "DyadicInterval":
        return cls(level, level_index(x, level))

    @property
    def left(self) -> Dyadic:
        return Dyadic(self.index, self.level)

    @property
    def right(self) -> Dyadic:
        return Dyadic(self.index + 1, self.level)

    @property
    def midpoint(self) -> Dyadic:
        return Dyadic(2 * self.index + 1, self.level + 1)

    @property
    def length(self) -> Fraction:
        return Fraction(1, 1 << self.level)

    def contains(self, x: Dyadic) -> bool:
        return self.left <= x < self.right

    def __str__(self):
        return f"[{self.left}, {self.right})"
