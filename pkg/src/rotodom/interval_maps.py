"""Exact evaluation of rotated odometers on [0, 1).

The von Neumann-Kakutani map acts on the branch [1 - 2**(1-n), 1 - 2**-n)
as the translation x -> x - (1 - 3 * 2**-n); the branch index n is one plus
the number of leading 1 digits of x, which keeps evaluation O(exponent)
with no interval search.  A rotated odometer precomposes this map with a
piecewise translation permuting the 2**N intervals of length 2**-N.

This module also houses the brute-force periodicity oracle.  The oracle
only ever reports "no period within the bound", never "aperiodic";
certification of aperiodicity is the job of the symbolic classification in
:mod:`rotodom.analysis`.
"""

from __future__ import annotations

from .dyadic import Dyadic, DyadicInterval, level_index
from .permutations import Permutation

__all__ = [
    "NoPreimageError",
    "RotatedOdometer",
    "vnk",
    "vnk_inverse",
    "apply_rotation",
    "apply_odometer",
    "detect_period",
    "periodic_intervals_oracle",
    "discontinuity_points",
]


class NoPreimageError(ValueError):
    """Raised when asking for the preimage of 0, which has none in [0, 1)."""


def _require_below_one(x: Dyadic):
    if x.num == 1 and x.exp == 0:
        raise ValueError("map evaluation is defined on [0, 1); got 1")


def _leading_ones(x: Dyadic) -> int:
    # number of leading 1 digits in the binary expansion of x < 1
    if x.exp == 0:
        return 0
    inverted = ~x.num & ((1 << x.exp) - 1)
    return x.exp - inverted.bit_length()


def vnk(x: Dyadic) -> Dyadic:
    """The von Neumann-Kakutani map of x < 1."""
    _require_below_one(x)
    n = _leading_ones(x) + 1
    m = max(x.exp, n)
    num = (x.num << (m - x.exp)) + (3 << (m - n)) - (1 << m)
    return Dyadic(num, m)


def vnk_inverse(y: Dyadic) -> Dyadic:
    """The unique x with vnk(x) == y, for 0 < y < 1."""
    _require_below_one(y)
    if y.num == 0:
        raise NoPreimageError("0 has no preimage under the von Neumann-Kakutani map")
    n = (y.exp - y.num.bit_length()) + 1
    m = max(y.exp, n)
    num = (y.num << (m - y.exp)) - (3 << (m - n)) + (1 << m)
    return Dyadic(num, m)


class RotatedOdometer:
    """F = vnk o R_pi, where R_pi permutes the 2**N equal subintervals."""

    __slots__ = ("N", "pi", "_offsets")

    def __init__(self, N: int, pi: Permutation):
        if N < 1:
            raise ValueError(f"N must be >= 1, got {N}")
        if pi.size != (1 << N):
            raise ValueError(f"permutation acts on {pi.size} symbols, expected {1 << N}")
        self.N = N
        self.pi = pi
        self._offsets = tuple(pi(p) - p for p in range(pi.size))

    def rotate(self, x: Dyadic) -> Dyadic:
        _require_below_one(x)
        N = self.N
        p = x.num << (N - x.exp) if x.exp <= N else x.num >> (x.exp - N)
        d = self._offsets[p]
        if d == 0:
            return x
        m = max(x.exp, N)
        return Dyadic((x.num << (m - x.exp)) + (d << (m - N)), m)

    def step(self, x: Dyadic) -> Dyadic:
        # fused rotate + vnk on raw integers (hot path of the orbit suites);
        # the leading-ones count works on any width-exp bit pattern, so the
        # intermediate value is not renormalized
        num, exp = x.num, x.exp
        if num == 1 and exp == 0:
            raise ValueError("map evaluation is defined on [0, 1); got 1")
        N = self.N
        p = num << (N - exp) if exp <= N else num >> (exp - N)
        d = self._offsets[p]
        if d:
            if exp < N:
                num <<= N - exp
                exp = N
            num += d << (exp - N)
        if num == 0:
            n = 1
        else:
            inverted = ~num & ((1 << exp) - 1)
            n = exp - inverted.bit_length() + 1
        m = exp if exp > n else n
        return Dyadic((num << (m - exp)) + (3 << (m - n)) - (1 << m), m)

    def __repr__(self):
        return f"RotatedOdometer(N={self.N}, pi={self.pi.cycle_string()})"


def apply_rotation(od: RotatedOdometer, x: Dyadic) -> Dyadic:
    """R_pi(x): translate x by (pi(p) - p) * 2**-N, p its level-N index."""
    return od.rotate(x)


def apply_odometer(od: RotatedOdometer, x: Dyadic) -> Dyadic:
    """One step of the rotated odometer F = vnk o R_pi."""
    return od.step(x)


def detect_period(od: RotatedOdometer, x: Dyadic, bound: int) -> int | None:
    """Smallest k <= bound with F^k(x) == x, or None if none is found.

    None means "no period within the bound"; it is not a certificate of
    aperiodicity.
    """
    if bound < 1:
        raise ValueError(f"bound must be >= 1, got {bound}")
    y = od.step(x)
    for k in range(1, bound + 1):
        if y == x:
            return k
        y = od.step(y)
    return None


def default_bound(od: RotatedOdometer, predicted_period: int = 0) -> int:
    """2 * max(2**N, predicted period): the oracle's stock search budget."""
    return 2 * max(1 << od.N, predicted_period)


def periodic_intervals_oracle(
    od: RotatedOdometer, K: int, bound: int | None = None
) -> list[tuple[DyadicInterval, int | None]]:
    """Period status of the midpoint of every level-K interval.

    Midpoints (odd numerator at level K+1) are interior points of any
    maximal periodic interval once K is at least the classification's
    resolution, so a midpoint verdict holds on the whole interval.
    """
    if K < od.N:
        raise ValueError(f"level K={K} must be at least N={od.N}")
    if bound is None:
        bound = default_bound(od)
    results = []
    for p in range(1 << K):
        interval = DyadicInterval(K, p)
        results.append((interval, detect_period(od, interval.midpoint, bound)))
    return results


def discontinuity_points(od: RotatedOdometer, up_to_level: int) -> set[Dyadic]:
    """Breakpoints of both pieces: {1 - 2**-k, k <= K} and the 2**-N grid."""
    if up_to_level < 0:
        raise ValueError(f"level must be non-negative, got {up_to_level}")
    points = {Dyadic((1 << k) - 1, k) for k in range(up_to_level + 1)}
    points.update(Dyadic(p, od.N) for p in range(1, 1 << od.N))
    return points
