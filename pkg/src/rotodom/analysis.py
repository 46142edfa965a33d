"""Symbolic classification of rotated odometers, with oracle cross-checks.

The complete dynamical picture of F = vnk o R_pi is read off one finite
object: the product of the interval permutation induced by vnk with pi
(pi applied first).  The cycle containing 0 carries the minimal part,
where the automorphism restricts to an adding machine over the cycle's
cylinders; every other cycle contributes periodic intervals whose common
period is exactly the cycle length.

Everything symbolic here is checkable against the brute-force oracle in
:mod:`rotodom.interval_maps`, and :func:`oracle_crosscheck` does exactly
that, interval by interval.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations as all_permutations

from .dyadic import Dyadic, DyadicInterval
from .interval_maps import RotatedOdometer, detect_period
from .permutations import CycleDecomposition, Permutation
from .tree_automorphisms import (
    TreeAutomorphism,
    adding_machine,
    apply_vertex,
    compose,
    finite_depth,
    graft,
    rotation_automorphism,
    symbol_to_word,
    vnk_interval_permutation,
    word_to_symbol,
)

__all__ = [
    "DEFAULT_SEED",
    "PeriodicPart",
    "ClassificationReport",
    "Mismatch",
    "PipelineResult",
    "EnumerationRow",
    "EnumerationResult",
    "odometer_automorphism",
    "classify",
    "oracle_crosscheck",
    "analyze_finite_depth",
    "enumerate_all",
]

# fixed default for every sampled suite, always echoed in reports
DEFAULT_SEED = 7


def odometer_automorphism(od: RotatedOdometer) -> TreeAutomorphism:
    """The tree model of F: the adding machine composed after the rigid
    rotation, i.e. the wreath tuple (a, 1, ..., 1) over the root product."""
    return compose(adding_machine(od.N), rotation_automorphism(od.pi))


@dataclass()
class PeriodicPart:
    """One periodic component: a cycle away from 0 and its intervals."""

    symbols: tuple[int, ...]
    period: int
    intervals: tuple[tuple[Dyadic, Dyadic], ...]
    measure: Fraction


@dataclass()
class ClassificationReport:
    """Complete periodic/minimal decomposition of a rotated odometer."""

    N: int
    pi: Permutation
    root_product: Permutation
    cycles: CycleDecomposition
    minimal_symbols: tuple[int, ...]
    S_size: int
    minimal_intervals: tuple[tuple[Dyadic, Dyadic], ...]
    minimal_measure: Fraction
    periodic: tuple[PeriodicPart, ...]
    is_minimal: bool
    verified: bool = False

    @property
    def normalized_cylinder_mass(self) -> Fraction:
        """Mass of one minimal cylinder after normalizing the minimal part."""
        return Fraction(1, self.S_size)

    @property
    def periodic_measure(self) -> Fraction:
        return sum((part.measure for part in self.periodic), Fraction(0))

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "pi": _perm_dict(self.pi),
            "root_product": _perm_dict(self.root_product),
            "cycles": [list(c) for c in self.cycles.cycles],
            "minimal": {
                "cylinders": list(self.minimal_symbols),
                "measure": str(self.minimal_measure),
                "S_size": self.S_size,
            },
            "periodic": [
                {
                    "symbols": list(part.symbols),
                    "period": part.period,
                    "intervals": [_interval_pair(iv) for iv in part.intervals],
                    "measure": str(part.measure),
                }
                for part in self.periodic
            ],
            "verified": self.verified,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ClassificationReport":
        N = d["N"]
        size = 1 << N
        pi = Permutation.parse(d["pi"]["images"], size)
        root = Permutation.parse(d["root_product"]["images"], size)
        cycles = CycleDecomposition(tuple(tuple(c) for c in d["cycles"]))
        minimal_symbols = tuple(d["minimal"]["cylinders"])
        periodic = tuple(
            PeriodicPart(
                symbols=tuple(p["symbols"]),
                period=p["period"],
                intervals=tuple(
                    (Dyadic.parse(a), Dyadic.parse(b)) for a, b in p["intervals"]
                ),
                measure=Fraction(p["measure"]),
            )
            for p in d["periodic"]
        )
        return cls(
            N=N,
            pi=pi,
            root_product=root,
            cycles=cycles,
            minimal_symbols=minimal_symbols,
            S_size=d["minimal"]["S_size"],
            minimal_intervals=_merged_intervals(minimal_symbols, N),
            minimal_measure=Fraction(d["minimal"]["measure"]),
            periodic=periodic,
            is_minimal=not periodic,
            verified=d["verified"],
        )


def _perm_dict(p: Permutation) -> dict:
    return {"images": p.images_string(), "cycles": p.cycle_string()}


def _interval_pair(pair: tuple[Dyadic, Dyadic]) -> list[str]:
    return [str(pair[0]), str(pair[1])]


def _merged_intervals(symbols: tuple[int, ...], N: int) -> tuple[tuple[Dyadic, Dyadic], ...]:
    # maximal runs of consecutive level-N cylinders
    if not symbols:
        return ()
    runs = []
    start = prev = symbols[0]
    for s in symbols[1:]:
        if s == prev + 1:
            prev = s
        else:
            runs.append((start, prev))
            start = prev = s
    runs.append((start, prev))
    return tuple((Dyadic(lo, N), Dyadic(hi + 1, N)) for lo, hi in runs)


def classify(od: RotatedOdometer) -> ClassificationReport:
    """Cycle-by-cycle decomposition of the rotated odometer's dynamics."""
    root = vnk_interval_permutation(od.N) * od.pi
    cycles = root.cycle_decomposition()
    zero_cycle = cycles.cycle_containing(0)
    minimal_symbols = tuple(sorted(zero_cycle))
    periodic = []
    for c in cycles.cycles:
        if 0 in c:
            continue
        symbols = tuple(sorted(c))
        periodic.append(
            PeriodicPart(
                symbols=symbols,
                period=len(c),
                intervals=_merged_intervals(symbols, od.N),
                measure=Fraction(len(c), 1 << od.N),
            )
        )
    return ClassificationReport(
        N=od.N,
        pi=od.pi,
        root_product=root,
        cycles=cycles,
        minimal_symbols=minimal_symbols,
        S_size=len(zero_cycle),
        minimal_intervals=_merged_intervals(minimal_symbols, od.N),
        minimal_measure=Fraction(len(zero_cycle), 1 << od.N),
        periodic=tuple(periodic),
        is_minimal=len(cycles.cycles) == 1,
    )


@dataclass(frozen=True)
class Mismatch:
    """A level-K interval whose brute-force verdict contradicts the report."""

    interval: DyadicInterval
    predicted: int | None
    observed: int | None

    def __str__(self):
        pred = self.predicted if self.predicted is not None else "aperiodic"
        obs = self.observed if self.observed is not None else "no period found"
        return f"{self.interval}: classification says {pred}, oracle says {obs}"


def oracle_crosscheck(
    od: RotatedOdometer,
    K: int,
    bound: int,
    report: ClassificationReport | None = None,
) -> Mismatch | None:
    """Check every level-K interval's brute-force period against the report.

    Intervals inside a predicted periodic part must report exactly the
    predicted period; intervals inside the minimal part must report no
    period within the bound.  The bound must be at least four times the
    largest predicted period so a wrong prediction cannot hide.
    """
    if K < od.N:
        raise ValueError(f"level K={K} must be at least N={od.N}")
    if report is None:
        report = classify(od)
    max_period = max((part.period for part in report.periodic), default=0)
    if bound < 4 * max_period:
        raise ValueError(f"bound {bound} is below 4 * max predicted period = {4 * max_period}")
    period_at = {}
    for part in report.periodic:
        for s in part.symbols:
            period_at[s] = part.period
    for p in range(1 << K):
        interval = DyadicInterval(K, p)
        predicted = period_at.get(p >> (K - od.N))
        observed = detect_period(od, interval.midpoint, bound)
        if observed != predicted:
            return Mismatch(interval, predicted, observed)
    return None


@dataclass()
class PipelineResult:
    """A finite-depth automorphism realized as a rotated odometer."""

    m: int
    pi: Permutation
    report: ClassificationReport
    verified: bool
    periods_power_of_two: bool
    max_period_log2: int


def _random_dyadic(rng: random.Random, max_level: int) -> Dyadic:
    exp = rng.randint(0, max_level)
    return Dyadic(rng.randrange(1 << exp), exp)


def analyze_finite_depth(
    g: TreeAutomorphism,
    m: int | None = None,
    samples: int = 12,
    steps: int = 60,
    depth: int = 12,
    seed: int | None = None,
) -> PipelineResult:
    """Realize a finite-depth automorphism g of the binary tree as a
    rotated odometer and classify the composition of the adding machine
    with g.

    The induced permutation pi is the level-m action of g read through the
    word/symbol identification.  Verification is twofold: sampled orbits of
    the odometer are matched letter-by-letter against boundary orbits under
    the grafted composition, and the classification is cross-checked by the
    brute-force oracle.  The result also records the checked-by-assertion
    facts: every reported period is a power of two, and the minimal clopen
    set (the cycle of 0) is nonempty, which certifies infinite order of the
    composition since the level orders over that cycle double forever.
    """
    from .correspondence import conjugacy_check

    if g.alphabet != 2:
        raise ValueError("expected an automorphism of the binary tree")
    derived = finite_depth(g)
    if m is None:
        m = derived
    elif m < derived:
        raise ValueError(f"automorphism moves letters at depth {derived} > m = {m}")
    q = 1 << m
    pi = Permutation(
        word_to_symbol(apply_vertex(g, symbol_to_word(s, m))) for s in range(q)
    )
    od = RotatedOdometer(m, pi)
    report = classify(od)
    periods_pow2 = all(
        part.period & (part.period - 1) == 0 for part in report.periodic
    )
    n0 = max((part.period.bit_length() - 1 for part in report.periodic), default=0)
    composed = compose(adding_machine(m), graft(g, m))
    rng = random.Random(DEFAULT_SEED if seed is None else seed)
    ok = report.S_size >= 1 and periods_pow2
    for _ in range(samples):
        x = _random_dyadic(rng, 16)
        if conjugacy_check(od, x, steps, depth, automorphism=composed) is not None:
            ok = False
            break
    if ok:
        max_period = max((part.period for part in report.periodic), default=0)
        bound = max(32, 4 * max_period)
        if oracle_crosscheck(od, m + 2, bound, report) is not None:
            ok = False
    report.verified = ok
    return PipelineResult(
        m=m,
        pi=pi,
        report=report,
        verified=ok,
        periods_power_of_two=periods_pow2,
        max_period_log2=n0,
    )


@dataclass(frozen=True)
class EnumerationRow:
    pi: Permutation
    is_minimal: bool
    S_size: int
    periods: tuple[int, ...]
    periodic_measure: Fraction

    def to_dict(self) -> dict:
        return {
            "pi": self.pi.images_string(),
            "pi_cycles": self.pi.cycle_string(),
            "minimal": self.is_minimal,
            "S_size": self.S_size,
            "periods": list(self.periods),
            "periodic_measure": str(self.periodic_measure),
        }


@dataclass()
class EnumerationResult:
    N: int
    mode: str
    seed: int | None
    rows: list[EnumerationRow]
    counts: dict

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "mode": self.mode,
            "seed": self.seed,
            "rows": [row.to_dict() for row in self.rows],
            "counts": self.counts,
        }


def enumerate_all(
    N: int, sample: int | None = None, seed: int | None = None
) -> EnumerationResult:
    """Classification summary per permutation, exhaustively for N <= 3.

    Exhaustive enumeration is refused for N >= 4 (16! permutations); pass
    `sample` to draw that many random permutations instead.  Output rows
    are sorted lexicographically by image tuple so runs are diffable.
    """
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    q = 1 << N
    if sample is None:
        if N >= 4:
            raise ValueError(
                f"exhaustive enumeration of {q}! permutations is refused for N={N}; "
                "pass sample=<count> to draw a random sample"
            )
        perms = [Permutation(images) for images in all_permutations(range(q))]
        mode, used_seed = "exhaustive", None
    else:
        if sample < 1:
            raise ValueError(f"sample count must be >= 1, got {sample}")
        used_seed = DEFAULT_SEED if seed is None else seed
        rng = random.Random(used_seed)
        drawn = set()
        while len(drawn) < sample:
            images = list(range(q))
            rng.shuffle(images)
            drawn.add(tuple(images))
        perms = [Permutation(images) for images in sorted(drawn)]
        mode = "sample"
    rows = []
    minimal_count = 0
    multiset_counts: dict[str, int] = {}
    for pi in perms:
        report = classify(RotatedOdometer(N, pi))
        periods = tuple(sorted(part.period for part in report.periodic))
        row = EnumerationRow(
            pi=pi,
            is_minimal=report.is_minimal,
            S_size=report.S_size,
            periods=periods,
            periodic_measure=report.periodic_measure,
        )
        rows.append(row)
        minimal_count += report.is_minimal
        key = ",".join(map(str, periods)) if periods else "-"
        multiset_counts[key] = multiset_counts.get(key, 0) + 1
    counts = {
        "rows": len(rows),
        "minimal": minimal_count,
        "period_multisets": dict(sorted(multiset_counts.items())),
    }
    return EnumerationResult(N=N, mode=mode, seed=used_seed, rows=rows, counts=counts)
