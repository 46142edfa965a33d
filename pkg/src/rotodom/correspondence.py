"""The measurable identification of [0, 1) with the boundary of T_N.

A point x < 1 encodes as the sequence whose first letter is its level-N
interval index and whose later letters are its binary digits from position
N+1 on (letter j >= 2 reads digit N+j-1: level-n intervals correspond to
tree level n-N+1, so digits inside the first letter are never repeated).
Dyadic cut points are doubled: the extra left-limit copy x^- encodes as
the expansion terminating in 1s, and such eventually-1 tails are exactly
the boundary points with no preimage in the interval.

decode returns exact rationals, not only dyadics: eventually periodic
tails encode rationals with odd denominator factors, and the
representation must stay closed under boundary application.  Only the
dyadic sublattice feeds back into :mod:`rotodom.interval_maps`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

from .dyadic import Dyadic, level_index
from .interval_maps import RotatedOdometer
from .tree_automorphisms import BoundaryPoint, TreeAutomorphism, apply_boundary

__all__ = [
    "EncodedPoint",
    "Counterexample",
    "encode_point",
    "decode_point",
    "cylinder_mass",
    "boundary_distance",
    "conjugacy_check",
]


class EncodedPoint(NamedTuple):
    point: BoundaryPoint
    has_interval_preimage: bool


def encode_point(x: Dyadic, N: int, side: str = "upper") -> EncodedPoint:
    """Boundary encoding of x (side="upper") or of its double x^- ("lower").

    The upper encoding needs x < 1; the lower one needs 0 < x <= 1 (zero
    has no doubled point).
    """
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    if side == "upper":
        head = level_index(x, N)
        tail = [_digit(x, k) for k in range(N + 1, x.exp + 1)]
        return EncodedPoint(BoundaryPoint([head] + tail, (0,)), True)
    if side == "lower":
        if x.num == 0:
            raise ValueError("0 has no doubled point")
        if x.exp <= N:
            head = (x.num << (N - x.exp)) - 1
            return EncodedPoint(BoundaryPoint((head,), (1,)), False)
        head = x.num >> (x.exp - N)
        # digits N+1 .. exp of x, with the final 1 replaced by 0, then all 1s
        tail = [_digit(x, k) for k in range(N + 1, x.exp + 1)]
        tail[-1] = 0
        return EncodedPoint(BoundaryPoint([head] + tail, (1,)), False)
    raise ValueError(f"side must be 'upper' or 'lower', got {side!r}")


def _digit(x: Dyadic, k: int) -> int:
    return (x.num >> (x.exp - k)) & 1 if k <= x.exp else 0


def dyadic_letters(x: Dyadic, N: int, depth: int) -> tuple[int, ...]:
    """First `depth` letters of the upper encoding of x, without allocation
    of a BoundaryPoint (hot path of the conjugacy suite)."""
    if depth < 1:
        return ()
    num, exp = x.num, x.exp
    head = num << (N - exp) if exp <= N else num >> (exp - N)
    letters = [head]
    for k in range(N + 1, N + depth):
        letters.append((num >> (exp - k)) & 1 if k <= exp else 0)
    return tuple(letters)


def _prefix_agrees(x: Dyadic, N: int, b: BoundaryPoint, depth: int) -> bool:
    # letter-by-letter comparison without tuple allocation (hot path)
    num, exp = x.num, x.exp
    pre = b.preperiod
    per = b.period
    lp = len(pre)
    lq = len(per)
    head = num << (N - exp) if exp <= N else num >> (exp - N)
    if (pre[0] if lp else per[0]) != head:
        return False
    for j in range(1, depth):
        c = pre[j] if j < lp else per[(j - lp) % lq]
        k = N + j
        bit = (num >> (exp - k)) & 1 if k <= exp else 0
        if c != bit:
            return False
    return True


def decode_point(b: BoundaryPoint, N: int) -> tuple[Fraction, bool]:
    """Exact value encoded by b, and whether it has an interval preimage.

    The flag is False exactly for the eventually-1 tails (the doubled
    points); the returned value is then the doubled point's position.
    """
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    pre = b.preperiod
    per = b.period
    if not pre:
        pre = (per[0],)
        per = per[1:] + per[:1]
    if pre[0] >= (1 << N):
        raise ValueError(f"first letter {pre[0]} out of range for N={N}")
    value = Fraction(pre[0], 1 << N)
    for j in range(2, len(pre) + 1):
        if pre[j - 1]:
            value += Fraction(1, 1 << (N + j - 1))
    # the periodic tail starts at letter index len(pre)+1 >= 2, i.e. at
    # binary position N + len(pre)
    first_pos = N + len(pre)
    cycle = 0
    for bit in per:
        cycle = (cycle << 1) | bit
    if cycle:
        value += Fraction(cycle, (1 << len(per)) - 1) / (1 << (first_pos - 1))
    return value, not b.is_eventually_one()


def cylinder_mass(v: Sequence[int], N: int) -> Fraction:
    """Bernoulli mass of the cylinder at vertex v: 2**-(N + level - 1)."""
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    if not v:
        raise ValueError("the root has no cylinder")
    return Fraction(1, 1 << (N + len(v) - 1))


def boundary_distance(b1: BoundaryPoint, b2: BoundaryPoint) -> Fraction:
    """Ultrametric 2**-r, r the longest common prefix length (0 iff equal)."""
    if b1 == b2:
        return Fraction(0)
    # a first disagreement must occur while the pair of tails is still
    # within one joint period of the common horizon
    horizon = max(len(b1.preperiod), len(b2.preperiod))
    horizon += len(b1.period) * len(b2.period) + 1
    u, v = b1.letters(horizon), b2.letters(horizon)
    for r in range(horizon):
        if u[r] != v[r]:
            return Fraction(1, 1 << r)
    raise AssertionError(f"unequal points {b1} and {b2} agree to depth {horizon}")


@dataclass(frozen=True)
class Counterexample:
    """First step at which the interval orbit and tree orbit disagree."""

    step: int
    expected: tuple[int, ...]
    actual: tuple[int, ...]

    def __str__(self):
        return (
            f"mismatch at step {self.step}: interval side encodes "
            f"{self.expected}, tree side gives {self.actual}"
        )


def conjugacy_check(
    od: RotatedOdometer,
    x: Dyadic,
    steps: int,
    depth: int,
    automorphism: TreeAutomorphism | None = None,
) -> Counterexample | None:
    """Verify that encoding intertwines the odometer with its tree model.

    For every k <= steps, the first `depth` letters of the encoding of
    F^k(x) must match the k-th image of the encoding of x under the tree
    automorphism.  Returns None on agreement, else the first mismatch.
    """
    if automorphism is None:
        from .analysis import odometer_automorphism

        automorphism = odometer_automorphism(od)
    N = od.N
    b = encode_point(x, N).point
    cur = x
    for k in range(steps + 1):
        if not _prefix_agrees(cur, N, b, depth):
            return Counterexample(k, dyadic_letters(cur, N, depth), b.letters(depth))
        if k == steps:
            break
        cur = od.step(cur)
        b = apply_boundary(automorphism, b)
    return None
