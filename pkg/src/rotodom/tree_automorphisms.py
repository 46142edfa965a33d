"""Finite-state automorphisms of binary and grafted binary trees.

Vertices of the grafted tree carry words w1 w2 ... wi with w1 drawn from
the 2**N first-level symbols and later letters binary; the plain binary
tree is the case N = 1.  An automorphism is stored as a small automaton:
finitely many states, each holding a permutation of its alphabet and one
successor state per *image* letter.  Reading a word left to right, a state
permutes the current letter and control passes to the successor stored at
the image letter's position.

That convention fixes the classic wreath-recursion ambiguities once and
for all:

* tuple position means target position: the entry at position i is the
  section at the source letter mapped to i;
* the section of g at a vertex v is the automorphism induced on the
  subtree at v, transported to the standard binary tree, so that
  g(v . rest) = g(v) . section(g, v)(rest);
* ``compose(g, h)`` applies h first.

The test suite gates this convention set on three independently worked
fixtures (the adding machine carry trace, conjugation of a pair tuple by
the letter swap, and the rotated odometer's root cycle structure).

Automata returned by every public operation are minimized (bisimulation
partition refinement) and renumbered breadth-first, so structural equality
coincides with equality of boundary actions.  Instances are immutable;
share them freely.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Iterable, Mapping, NamedTuple, Sequence

from .dyadic import Dyadic, level_index
from .interval_maps import vnk
from .permutations import CycleDecomposition, Permutation

__all__ = [
    "Word",
    "State",
    "BoundaryPoint",
    "TreeAutomorphism",
    "OrderBound",
    "identity",
    "sigma",
    "adding_machine",
    "rotation_automorphism",
    "vnk_interval_permutation",
    "word_to_symbol",
    "symbol_to_word",
    "compose",
    "inverse",
    "power",
    "section",
    "apply_vertex",
    "apply_boundary",
    "is_identity",
    "order_probe",
    "level_permutation",
    "finite_depth_from_table",
    "finite_depth",
    "graft",
    "to_json",
    "from_json",
]

Word = tuple[int, ...]


class State(NamedTuple):
    """One automaton state: a permutation and successors by image letter."""

    perm: tuple[int, ...]
    sections: tuple[int, ...]


def _identity_perm(k: int) -> tuple[int, ...]:
    return tuple(range(k))


def _invert(perm: Sequence[int]) -> tuple[int, ...]:
    inv = [0] * len(perm)
    for i, j in enumerate(perm):
        inv[j] = i
    return tuple(inv)


def _canonicalize(states: Sequence[State], initial: int) -> tuple[State, ...]:
    # reachable states only
    reach = [initial]
    seen = {initial}
    for s in reach:
        for t in states[s].sections:
            if t not in seen:
                seen.add(t)
                reach.append(t)
    # Moore partition refinement: start from the permutation alone, then
    # split by successor blocks until stable
    block: dict[int, object] = {s: states[s].perm for s in reach}
    nblocks = len(set(block.values()))
    while True:
        block = {
            s: (block[s], tuple(block[t] for t in states[s].sections))
            for s in reach
        }
        n = len(set(block.values()))
        if n == nblocks:
            break
        nblocks = n
    # renumber blocks breadth-first from the initial state's block
    rep: dict[object, int] = {}
    for s in reach:
        rep.setdefault(block[s], s)
    order = [block[initial]]
    new_id = {block[initial]: 0}
    for label in order:
        for t in states[rep[label]].sections:
            tl = block[t]
            if tl not in new_id:
                new_id[tl] = len(order)
                order.append(tl)
    out = []
    for label in order:
        st = states[rep[label]]
        out.append(State(st.perm, tuple(new_id[block[t]] for t in st.sections)))
    return tuple(out)


class TreeAutomorphism:
    """An automorphism of T (binary) or T_N, in canonical automaton form.

    The initial state is always state 0 after canonicalization.  Use the
    module-level builders and operations rather than assembling states by
    hand; the constructor is public mainly for deserialization.
    """

    __slots__ = ("states",)

    def __init__(self, states: Sequence[State], initial: int = 0):
        states = tuple(State(tuple(s.perm), tuple(s.sections)) for s in states)
        if not states:
            raise ValueError("automaton needs at least one state")
        if not 0 <= initial < len(states):
            raise ValueError(f"initial state {initial} out of range")
        for idx, st in enumerate(states):
            k = len(st.perm)
            if sorted(st.perm) != list(range(k)):
                raise ValueError(f"state {idx}: {st.perm} is not a permutation")
            if len(st.sections) != k:
                raise ValueError(f"state {idx}: expected {k} sections, got {len(st.sections)}")
            for t in st.sections:
                if not 0 <= t < len(states):
                    raise ValueError(f"state {idx}: section target {t} out of range")
                if len(states[t].perm) != 2:
                    raise ValueError(f"state {idx}: section target {t} is not binary")
        k0 = len(states[initial].perm)
        if k0 < 2 or k0 & (k0 - 1):
            raise ValueError(f"initial alphabet {k0} is not a power of two")
        self.states = _canonicalize(states, initial)

    @property
    def alphabet(self) -> int:
        return len(self.states[0].perm)

    def root_permutation(self) -> Permutation:
        return Permutation(self.states[0].perm)

    def wreath_sections(self) -> tuple["TreeAutomorphism", ...]:
        """The automorphisms at the tuple positions of the top level."""
        return tuple(TreeAutomorphism(self.states, t) for t in self.states[0].sections)

    def is_identity(self) -> bool:
        return all(st.perm == _identity_perm(len(st.perm)) for st in self.states)

    def __eq__(self, other):
        if isinstance(other, TreeAutomorphism):
            return self.states == other.states
        return NotImplemented

    def __hash__(self):
        return hash(self.states)

    def __mul__(self, other: "TreeAutomorphism") -> "TreeAutomorphism":
        return compose(self, other)

    def __repr__(self):
        if len(self.states) <= 6:
            return f"TreeAutomorphism[{self.wreath_string()}]"
        return f"TreeAutomorphism[{len(self.states)} states on alphabet {self.alphabet}]"

    def wreath_string(self) -> str:
        names = _display_names(self)
        root = self.states[0]
        entries = ", ".join(names[t] for t in root.sections)
        return f"({entries}){Permutation(root.perm).cycle_string()}"


class BoundaryPoint:
    """An eventually periodic infinite path w1 w2 w3 ... along the tree.

    Stored canonically: the period is primitive and as much of the
    preperiod as possible has been absorbed into a rotation of the period,
    so equal sequences compare equal.  Letters beyond the first must be
    binary; the first letter may range over the grafted tree's first-level
    alphabet.
    """

    __slots__ = ("preperiod", "period")

    def __init__(self, preperiod: Iterable[int], period: Iterable[int]):
        pre = [int(c) for c in preperiod]
        per = tuple(int(c) for c in period)
        if not per:
            raise ValueError("period must be non-empty")
        if any(c not in (0, 1) for c in per):
            raise ValueError(f"period letters must be binary, got {per}")
        if any(c not in (0, 1) for c in pre[1:]):
            raise ValueError(f"letters beyond the first must be binary, got {pre}")
        if pre and pre[0] < 0:
            raise ValueError("letters must be non-negative")
        self._store(pre, per)

    @classmethod
    def _trusted(cls, pre: list, per: tuple) -> "BoundaryPoint":
        # internal constructor for letters already produced by an automaton
        self = object.__new__(cls)
        self._store(pre, per)
        return self

    def _store(self, pre: list, per: tuple):
        length = len(per)
        if length > 1:
            for d in range(1, length):
                if length % d == 0 and per == per[:d] * (length // d):
                    per = per[:d]
                    break
        last = per[-1]
        while pre and pre[-1] == last:
            per = (last,) + per[:-1]
            pre.pop()
            last = per[-1]
        self.preperiod = tuple(pre)
        self.period = per

    @property
    def first_letter(self) -> int:
        return self.preperiod[0] if self.preperiod else self.period[0]

    def letters(self, k: int) -> Word:
        """The first k letters of the sequence."""
        pre = self.preperiod
        if k <= len(pre):
            return pre[:k]
        rest = k - len(pre)
        reps = rest // len(self.period) + 1
        return pre + (self.period * reps)[:rest]

    def is_eventually_zero(self) -> bool:
        return self.period == (0,)

    def is_eventually_one(self) -> bool:
        return self.period == (1,)

    def __eq__(self, other):
        if isinstance(other, BoundaryPoint):
            return self.preperiod == other.preperiod and self.period == other.period
        return NotImplemented

    def __hash__(self):
        return hash((self.preperiod, self.period))

    def __str__(self):
        if self.preperiod:
            head, rest, per = self.preperiod[0], self.preperiod[1:], self.period
        else:
            head, rest, per = self.period[0], (), self.period[1:] + self.period[:1]
        bits = "".join(map(str, rest))
        return f"{head}·{bits}({''.join(map(str, per))})^∞"

    def __repr__(self):
        return f"BoundaryPoint({self})"

    _GRAMMAR = re.compile(r"^(\d+)[·.]([01]*)\(([01]+)\)\^(?:∞|inf)$")

    @classmethod
    def parse(cls, text: str) -> "BoundaryPoint":
        m = cls._GRAMMAR.match(text.strip())
        if not m:
            raise ValueError(
                f"cannot parse boundary point {text!r}; expected e.g. 2·10(0)^∞"
            )
        head = int(m.group(1))
        rest = tuple(int(c) for c in m.group(2))
        per = tuple(int(c) for c in m.group(3))
        return cls((head,) + rest, per)


# ---------------------------------------------------------------------------
# builders

def identity(alphabet: int = 2) -> TreeAutomorphism:
    """The trivial automorphism (on T_N when alphabet = 2**N)."""
    if alphabet == 2:
        return TreeAutomorphism([State((0, 1), (0, 0))])
    root = State(_identity_perm(alphabet), (1,) * alphabet)
    return TreeAutomorphism([root, State((0, 1), (1, 1))])


def sigma() -> TreeAutomorphism:
    """The swap of the two first-level letters of the binary tree."""
    return TreeAutomorphism([State((1, 0), (1, 1)), State((0, 1), (1, 1))])


def adding_machine(N: int = 1) -> TreeAutomorphism:
    """Addition of one with infinite carry, on T (N=1) or grafted to T_N.

    The single nontrivial section sits at tuple position 0: the carry
    continues exactly on the subtree that lands on the first cylinder.
    """
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    a = State((1, 0), (0, 1))
    idstate = State((0, 1), (1, 1))
    if N == 1:
        return TreeAutomorphism([a, idstate])
    tau = vnk_interval_permutation(N).images
    root = State(tau, (1,) + (2,) * ((1 << N) - 1))
    return TreeAutomorphism([root, State((1, 0), (1, 2)), State((0, 1), (2, 2))])


def rotation_automorphism(pi: Permutation) -> TreeAutomorphism:
    """The automorphism permuting first-level cylinders rigidly by pi."""
    k = pi.size
    if k < 2 or k & (k - 1):
        raise ValueError(f"alphabet {k} is not a power of two")
    root = State(pi.images, (1,) * k)
    return TreeAutomorphism([root, State((0, 1), (1, 1))])


@lru_cache(maxsize=None)
def vnk_interval_permutation(N: int) -> Permutation:
    """How the von Neumann-Kakutani map permutes the 2**N equal intervals.

    Computed from the interval map itself (image of each interval's
    midpoint); the tests cross-check the result against the binary adding
    machine's action on level-N words.
    """
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    images = []
    for p in range(1 << N):
        mid = Dyadic(2 * p + 1, N + 1)
        images.append(level_index(vnk(mid), N))
    return Permutation(images)


def word_to_symbol(word: Sequence[int]) -> int:
    """Binary word -> first-level symbol of the grafted tree (big-endian)."""
    s = 0
    for c in word:
        if c not in (0, 1):
            raise ValueError(f"binary word expected, got {tuple(word)}")
        s = (s << 1) | c
    return s


def symbol_to_word(symbol: int, N: int) -> Word:
    """Inverse of :func:`word_to_symbol` for words of length N."""
    if not 0 <= symbol < (1 << N):
        raise ValueError(f"symbol {symbol} out of range for N={N}")
    return tuple((symbol >> (N - 1 - i)) & 1 for i in range(N))


# ---------------------------------------------------------------------------
# operations

def compose(g: TreeAutomorphism, h: TreeAutomorphism) -> TreeAutomorphism:
    """g after h (h applied first) as one automaton on pair states."""
    if g.alphabet != h.alphabet:
        raise ValueError(f"alphabet mismatch: {g.alphabet} vs {h.alphabet}")
    gs, hs = g.states, h.states
    pair_id: dict[tuple[int, int], int] = {(0, 0): 0}
    pairs = [(0, 0)]
    records: list[State] = []
    for sg, sh in pairs:
        G, H = gs[sg], hs[sh]
        tau = G.perm
        inv_tau = _invert(tau)
        perm = tuple(tau[H.perm[v]] for v in range(len(H.perm)))
        sections = []
        for i in range(len(perm)):
            key = (G.sections[i], H.sections[inv_tau[i]])
            if key not in pair_id:
                pair_id[key] = len(pairs)
                pairs.append(key)
            sections.append(pair_id[key])
        records.append(State(perm, tuple(sections)))
    return TreeAutomorphism(records)


def inverse(g: TreeAutomorphism) -> TreeAutomorphism:
    """State-wise inverse: for output letter i, continue in the inverse of
    the section g keeps at position perm(i)."""
    records = [
        State(_invert(st.perm), tuple(st.sections[st.perm[i]] for i in range(len(st.perm))))
        for st in g.states
    ]
    return TreeAutomorphism(records)


def power(g: TreeAutomorphism, k: int) -> TreeAutomorphism:
    """g composed with itself k times (k may be negative)."""
    if k < 0:
        return power(inverse(g), -k)
    result = identity(g.alphabet)
    base = g
    while k:
        if k & 1:
            result = compose(result, base)
        k >>= 1
        if k:
            base = compose(base, base)
    return result


def apply_vertex(g: TreeAutomorphism, v: Sequence[int]) -> Word:
    """Image of the vertex with label word v (same level)."""
    states = g.states
    st = states[0]
    out = []
    for c in v:
        if not 0 <= c < len(st.perm):
            raise ValueError(f"letter {c} out of range for alphabet {len(st.perm)}")
        w = st.perm[c]
        out.append(w)
        st = states[st.sections[w]]
    return tuple(out)


def section(g: TreeAutomorphism, v: Sequence[int]) -> TreeAutomorphism:
    """The automorphism induced on the subtree at v, as a map of T.

    Satisfies apply_vertex(g, v + w) = apply_vertex(g, v) +
    apply_vertex(section(g, v), w) for every finite word w.
    """
    states = g.states
    cur = 0
    for c in v:
        st = states[cur]
        if not 0 <= c < len(st.perm):
            raise ValueError(f"letter {c} out of range for alphabet {len(st.perm)}")
        cur = st.sections[st.perm[c]]
    return TreeAutomorphism(states, cur)


def apply_boundary(g: TreeAutomorphism, b: BoundaryPoint) -> BoundaryPoint:
    """Image of an eventually periodic boundary point, by state tracking.

    Termination: once the input is inside its periodic tail, the pair
    (state, phase within the input period) determines the future, and there
    are finitely many such pairs.
    """
    states = g.states
    if b.first_letter >= len(states[0].perm):
        raise ValueError(f"first letter {b.first_letter} out of range for alphabet {g.alphabet}")
    st = 0
    out = []
    for c in b.preperiod:
        rec = states[st]
        w = rec.perm[c]
        out.append(w)
        st = rec.sections[w]
    per = b.period
    length = len(per)
    seen: dict[tuple[int, int], int] = {}
    phase = 0
    while (st, phase) not in seen:
        seen[(st, phase)] = len(out)
        rec = states[st]
        w = rec.perm[per[phase]]
        out.append(w)
        st = rec.sections[w]
        phase = (phase + 1) % length
    start = seen[(st, phase)]
    return BoundaryPoint._trusted(out[:start], tuple(out[start:]))


def is_identity(g: TreeAutomorphism) -> bool:
    """True iff g acts trivially on the whole boundary.

    After minimization this is just "every reachable state keeps its
    permutation trivial": any state that moves a letter is reachable by
    some word, and conversely.
    """
    return g.is_identity()


@dataclass(frozen=True)
class OrderBound:
    """Result of probing the order of an automorphism to finite depth."""

    value: int
    exact: bool

    def __str__(self):
        return f"Finite({self.value})" if self.exact else f"AtLeast({self.value})"


def order_probe(g: TreeAutomorphism, depth: int) -> OrderBound:
    """Order of g restricted to the first `depth` levels, certified if it
    is the true order.

    The order k of g on the deepest level always divides the order of g, so
    g**k being the identity certifies Finite(k) exactly; otherwise the
    order is at least k and AtLeast(k) is reported.  (Infinite order is
    never claimed here; for compositions with the adding machine the
    classification in :mod:`rotodom.analysis` supplies that certificate.)
    """
    if depth < 1:
        raise ValueError(f"depth must be >= 1, got {depth}")
    k = 1
    for n in range(1, depth + 1):
        perm, _ = level_permutation(g, n)
        k = perm.order()
    if is_identity(power(g, k)):
        return OrderBound(k, exact=True)
    return OrderBound(k, exact=False)


def level_permutation(g: TreeAutomorphism, n: int) -> tuple[Permutation, CycleDecomposition]:
    """The permutation g induces on level-n vertices, indexed lexicographically."""
    if n < 1:
        raise ValueError(f"level must be >= 1, got {n}")
    states = g.states
    size = g.alphabet << (n - 1)
    images = [0] * size
    stack = [(0, 0, 0, 0)]
    while stack:
        sid, d, src, dst = stack.pop()
        if d == n:
            images[src] = dst
            continue
        st = states[sid]
        weight = 1 << (n - 1 - d) if d else 1 << (n - 1)
        for c in range(len(st.perm)):
            w = st.perm[c]
            stack.append((st.sections[w], d + 1, src + c * weight, dst + w * weight))
    perm = Permutation(images)
    return perm, perm.cycle_decomposition()


def finite_depth_from_table(m: int, table: Mapping) -> TreeAutomorphism:
    """The automorphism acting by `table` on the first m letters and
    trivially below.

    `table` maps every binary word of length m (tuple of bits or string
    like "01") to its image word.  It must be a bijection and
    prefix-compatible: words sharing a prefix must have images sharing a
    prefix of the same length.  Violations are rejected naming the pair.
    """
    if m < 1:
        raise ValueError(f"depth must be >= 1, got {m}")

    def as_word(w) -> Word:
        letters = tuple(int(c) for c in w)
        if len(letters) != m or any(c not in (0, 1) for c in letters):
            raise ValueError(f"table key/value {w!r} is not a binary word of length {m}")
        return letters

    mapping = {as_word(k): as_word(v) for k, v in table.items()}
    words = [tuple(bits) for bits in product((0, 1), repeat=m)]
    if sorted(mapping) != words:
        raise ValueError(f"table domain must be all {1 << m} binary words of length {m}")
    if sorted(mapping.values()) != words:
        raise ValueError("table is not a bijection")

    def fmt(w: Word) -> str:
        return "".join(map(str, w))

    # prefix maps per level; conflicts name the violating pair of rows
    prefix_maps: list[dict[Word, Word]] = [{(): ()}]
    for j in range(1, m + 1):
        pmap: dict[Word, Word] = {}
        witness: dict[Word, Word] = {}
        for w, img in mapping.items():
            key = w[:j]
            if key in pmap:
                if pmap[key] != img[:j]:
                    other = witness[key]
                    raise ValueError(
                        "table is not prefix-compatible: "
                        f"{fmt(other)} -> {fmt(mapping[other])} and {fmt(w)} -> {fmt(img)} "
                        f"share a prefix of length {j - 1} but their images do not"
                    )
            else:
                pmap[key] = img[:j]
                witness[key] = w
        prefix_maps.append(pmap)

    prefixes = [tuple(bits) for j in range(m) for bits in product((0, 1), repeat=j)]
    state_id = {u: i for i, u in enumerate(prefixes)}
    id_state = len(prefixes)
    records = []
    for u in prefixes:
        j = len(u)
        perm = tuple(prefix_maps[j + 1][u + (c,)][-1] for c in (0, 1))
        inv = _invert(perm)
        sections = tuple(
            state_id[u + (inv[i],)] if j + 1 < m else id_state for i in (0, 1)
        )
        records.append(State(perm, sections))
    records.append(State((0, 1), (id_state, id_state)))
    return TreeAutomorphism(records)


def finite_depth(g: TreeAutomorphism) -> int:
    """Smallest m such that g never changes letters beyond position m.

    Raises ValueError when no such m exists (the action stays nontrivial at
    arbitrarily deep levels).
    """
    states = g.states
    nontrivial = {
        i for i, st in enumerate(states) if st.perm != _identity_perm(len(st.perm))
    }
    changed = True
    while changed:
        changed = False
        for i, st in enumerate(states):
            if i not in nontrivial and any(t in nontrivial for t in st.sections):
                nontrivial.add(i)
                changed = True
    if 0 not in nontrivial:
        return 1
    memo: dict[int, int] = {}

    def depth_of(s: int, on_stack: tuple[int, ...]) -> int:
        if s not in nontrivial:
            return 0
        if s in on_stack:
            raise ValueError("automorphism has unbounded depth (nontrivial state cycle)")
        if s in memo:
            return memo[s]
        d = 1 + max(depth_of(t, on_stack + (s,)) for t in states[s].sections)
        memo[s] = d
        return d

    return depth_of(0, ())


def graft(g: TreeAutomorphism, N: int) -> TreeAutomorphism:
    """Transport an automorphism of the binary tree to the grafted tree T_N.

    The root permutation is the level-N action of g conjugated through the
    word/symbol identification; the tuple entry at each target position is
    the section of g at the source word mapped there.
    """
    if g.alphabet != 2:
        raise ValueError("graft expects an automorphism of the binary tree")
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    if N == 1:
        return g
    states = g.states
    q = 1 << N
    rho = [0] * q
    section_at = [0] * q
    for bits in product((0, 1), repeat=N):
        src = word_to_symbol(bits)
        cur = 0
        dst = 0
        for c in bits:
            st = states[cur]
            w = st.perm[c]
            dst = (dst << 1) | w
            cur = st.sections[w]
        rho[src] = dst
        section_at[dst] = cur
    root = State(tuple(rho), tuple(t + 1 for t in section_at))
    records = [root] + [
        State(st.perm, tuple(t + 1 for t in st.sections)) for st in states
    ]
    return TreeAutomorphism(records)


# ---------------------------------------------------------------------------
# textual automaton format

_BUILTIN_NAMES = ("a", "sigma", "id")


def _classify_builtins(g: TreeAutomorphism) -> dict[int, str]:
    """Map state ids to builtin names where the behaviour matches."""
    out: dict[int, str] = {}
    id_state = None
    for i, st in enumerate(g.states):
        if st.perm == (0, 1) and st.sections == (i, i):
            id_state = i
            out[i] = "id"
    if id_state is not None:
        for i, st in enumerate(g.states):
            if st.perm == (1, 0) and st.sections == (id_state, id_state):
                out[i] = "sigma"
            elif st.perm == (1, 0) and st.sections == (i, id_state):
                out[i] = "a"
    return out


def _display_names(g: TreeAutomorphism) -> dict[int, str]:
    names = _classify_builtins(g)
    names = {i: ("1" if n == "id" else n) for i, n in names.items()}
    for i in range(len(g.states)):
        names.setdefault(i, f"s{i}")
    return names


def to_json(g: TreeAutomorphism) -> str:
    """Serialize in the textual automaton format (deterministic bytes)."""
    builtin = _classify_builtins(g)
    names = {i: builtin.get(i, f"s{i}") for i in range(len(g.states))}
    states = {}
    for i, st in enumerate(g.states):
        if i in builtin:
            continue
        states[names[i]] = {
            "alphabet": len(st.perm),
            "perm": list(st.perm),
            "sections": [names[t] for t in st.sections],
        }
    obj = {"initial": names[0], "states": states}
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def from_json(text: str) -> TreeAutomorphism:
    """Parse the textual automaton format.

    The names "a", "sigma" and "id" are builtin constants and may be
    referenced without being defined (defining them is an error).
    """
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"invalid automaton file: {exc}") from None
    if not isinstance(obj, dict):
        raise ValueError("automaton file must be a JSON object")
    for field in ("initial", "states"):
        if field not in obj:
            raise ValueError(f"automaton file is missing the {field!r} field")
    defs = obj["states"]
    if not isinstance(defs, dict):
        raise ValueError("the 'states' field must be an object")
    ids: dict[str, int] = {}
    for name in defs:
        if name in _BUILTIN_NAMES:
            raise ValueError(f"state name {name!r} is reserved for a builtin")
        ids[name] = len(ids)

    records: list[State | None] = [None] * len(ids)
    builtin_ids: dict[str, int] = {}

    def builtin(name: str) -> int:
        if name not in builtin_ids:
            builtin_ids[name] = len(records)
            records.append(None)
        return builtin_ids[name]

    def resolve(name, context: str) -> int:
        if not isinstance(name, str):
            raise ValueError(f"{context}: state name must be a string, got {name!r}")
        if name in ids:
            return ids[name]
        if name in _BUILTIN_NAMES:
            return builtin(name)
        raise ValueError(f"{context}: unknown state name {name!r}")

    for name, d in defs.items():
        if not isinstance(d, dict):
            raise ValueError(f"state {name!r}: definition must be an object")
        for field in ("alphabet", "perm", "sections"):
            if field not in d:
                raise ValueError(f"state {name!r} is missing the {field!r} field")
        perm = tuple(int(i) for i in d["perm"])
        if len(perm) != d["alphabet"]:
            raise ValueError(
                f"state {name!r}: alphabet {d['alphabet']} does not match perm of length {len(perm)}"
            )
        sections = tuple(resolve(s, f"state {name!r} sections") for s in d["sections"])
        records[ids[name]] = State(perm, sections)

    initial = resolve(obj["initial"], "initial")

    # materialize any builtins that were referenced
    pending = True
    while pending:
        pending = False
        if "a" in builtin_ids or "sigma" in builtin_ids:
            if "id" not in builtin_ids:
                builtin("id")
                pending = True
    if "id" in builtin_ids:
        i = builtin_ids["id"]
        records[i] = State((0, 1), (i, i))
    if "sigma" in builtin_ids:
        i = builtin_ids["sigma"]
        records[i] = State((1, 0), (builtin_ids["id"], builtin_ids["id"]))
    if "a" in builtin_ids:
        i = builtin_ids["a"]
        records[i] = State((1, 0), (i, builtin_ids["id"]))

    return TreeAutomorphism([st for st in records], initial)
