import random

import pytest

from rotodom.permutations import Permutation
from rotodom.tree_automorphisms import (
    BoundaryPoint,
    OrderBound,
    State,
    TreeAutomorphism,
    adding_machine,
    apply_boundary,
    apply_vertex,
    compose,
    finite_depth,
    finite_depth_from_table,
    from_json,
    graft,
    identity,
    inverse,
    is_identity,
    level_permutation,
    order_probe,
    power,
    rotation_automorphism,
    section,
    sigma,
    symbol_to_word,
    to_json,
    vnk_interval_permutation,
    word_to_symbol,
)


def increment_reference(b: BoundaryPoint) -> BoundaryPoint:
    """Binary addition of one with carry to the right, done directly on the
    sequence (independent of the automaton engine)."""
    horizon = len(b.preperiod) + len(b.period)
    letters = list(b.letters(horizon))
    if 0 not in letters:
        return BoundaryPoint((), (0,))
    j = letters.index(0)
    out = [0] * j + [1] + letters[j + 1 :]
    # beyond the horizon the input continues with its period at phase 0,
    # untouched by the carry
    return BoundaryPoint(out, b.period)


def dihedral_generators():
    """a1 = letter swap, a2 = (a1, a2): two involutions whose product acts
    transitively on every level."""
    a2 = TreeAutomorphism(
        [
            State((0, 1), (1, 0)),
            State((1, 0), (2, 2)),
            State((0, 1), (2, 2)),
        ]
    )
    return sigma(), a2


def random_automorphism(rng, root_alphabet=2, max_states=3):
    n = rng.randint(1, max_states)
    binary = [
        State(((0, 1) if rng.random() < 0.5 else (1, 0)),
              (rng.randrange(n), rng.randrange(n)))
        for _ in range(n)
    ]
    if root_alphabet == 2:
        return TreeAutomorphism(binary)
    root_perm = list(range(root_alphabet))
    rng.shuffle(root_perm)
    root = State(tuple(root_perm), tuple(rng.randrange(1, n + 1) for _ in range(root_alphabet)))
    shifted = [State(s.perm, tuple(t + 1 for t in s.sections)) for s in binary]
    return TreeAutomorphism([root] + shifted)


def random_point(rng, alphabet=2):
    pre = [rng.randrange(alphabet)] + [rng.randrange(2) for _ in range(rng.randint(0, 4))]
    per = [rng.randrange(2) for _ in range(rng.randint(1, 3))]
    return BoundaryPoint(pre, per)


def random_word(rng, alphabet, length):
    if length == 0:
        return ()
    return (rng.randrange(alphabet),) + tuple(rng.randrange(2) for _ in range(length - 1))


class TestBoundaryPoint:
    def test_canonical_preperiod_absorption(self):
        assert BoundaryPoint((0,), (0,)) == BoundaryPoint((), (0,))
        assert BoundaryPoint((1, 0, 1), (1,)) == BoundaryPoint((1, 0), (1,))

    def test_primitive_period(self):
        assert BoundaryPoint((2,), (0, 1, 0, 1)).period == (0, 1)

    def test_rotation_on_absorption(self):
        # 1 . (10)^inf  ==  (11 0)(110)... : absorbing the 1 rotates the period
        b = BoundaryPoint((2, 1), (0, 1))
        assert b.preperiod == (2,)
        assert b.period == (1, 0)
        assert b.letters(6) == (2, 1, 0, 1, 0, 1)

    def test_letters(self):
        b = BoundaryPoint((3, 1), (0, 1))
        assert b.letters(7) == (3, 1, 0, 1, 0, 1, 0)
        assert b.letters(1) == (3,)

    def test_validation(self):
        with pytest.raises(ValueError):
            BoundaryPoint((0,), ())
        with pytest.raises(ValueError):
            BoundaryPoint((0,), (2,))
        with pytest.raises(ValueError):
            BoundaryPoint((0, 3), (0,))

    def test_str_and_parse_round_trip(self):
        rng = random.Random(7)
        for _ in range(200):
            b = random_point(rng, alphabet=rng.choice((2, 4, 8)))
            assert BoundaryPoint.parse(str(b)) == b

    def test_grammar(self):
        b = BoundaryPoint.parse("2·10(0)^∞")
        assert b.letters(5) == (2, 1, 0, 0, 0)
        assert BoundaryPoint.parse("1·(1)^∞") == BoundaryPoint((), (1,))
        assert BoundaryPoint.parse("0·(1)^∞") == BoundaryPoint((0,), (1,))
        with pytest.raises(ValueError):
            BoundaryPoint.parse("2·10")


class TestAddingMachineFacts:
    def test_all_ones_maps_to_all_zeros(self):
        a = adding_machine(1)
        assert apply_boundary(a, BoundaryPoint((), (1,))) == BoundaryPoint((), (0,))

    def test_carry_once(self):
        a = adding_machine(1)
        got = apply_boundary(a, BoundaryPoint((1,), (0,)))
        assert got == BoundaryPoint((0, 1), (0,))

    def test_zero_increments(self):
        a = adding_machine(1)
        assert apply_boundary(a, BoundaryPoint((), (0,))) == BoundaryPoint((1,), (0,))

    def test_alternating_point(self):
        # direct evaluation: the first letter 0 flips, the tail is copied
        a = adding_machine(1)
        b = BoundaryPoint((), (0, 1))
        expected = increment_reference(b)
        assert expected.letters(7) == (1, 1, 0, 1, 0, 1, 0)
        assert apply_boundary(a, b) == expected

    def test_against_increment_reference(self):
        a = adding_machine(1)
        rng = random.Random(8)
        for _ in range(400):
            b = random_point(rng)
            assert apply_boundary(a, b) == increment_reference(b), b

    def test_inverse_of_adding_machine(self):
        a = adding_machine(1)
        assert apply_boundary(inverse(a), BoundaryPoint((), (0,))) == BoundaryPoint((), (1,))


class TestVnkIntervalPermutation:
    def test_n2_fixture(self):
        tau = vnk_interval_permutation(2)
        assert tau.images == (2, 3, 1, 0)
        assert tau.cycle_string() == "(0 2 1 3)"

    def test_n1_is_swap(self):
        assert vnk_interval_permutation(1).images == (1, 0)

    def test_single_cycle_with_known_prefix(self):
        for N in (2, 3, 4, 5):
            tau = vnk_interval_permutation(N)
            assert tau.is_transitive()
            # orbit of 0 starts 0, 2^(N-1), 2^(N-2), 2^(N-1)+2^(N-2)
            orbit = [0]
            for _ in range(3):
                orbit.append(tau(orbit[-1]))
            assert orbit == [0, 1 << (N - 1), 1 << (N - 2), (1 << (N - 1)) + (1 << (N - 2))]

    def test_matches_binary_adding_machine_on_words(self):
        # independent route: conjugate the level-N action of the binary
        # adding machine through the word/symbol identification
        a = adding_machine(1)
        for N in (1, 2, 3, 4):
            tau = vnk_interval_permutation(N)
            for s in range(1 << N):
                w = symbol_to_word(s, N)
                assert tau(s) == word_to_symbol(apply_vertex(a, w))


class TestApplyVertex:
    def test_root_step_of_grafted_machine(self):
        A = adding_machine(2)
        assert apply_vertex(A, (3,)) == (0,)

    def test_identity(self):
        g = identity()
        rng = random.Random(9)
        for _ in range(50):
            v = random_word(rng, 2, rng.randint(0, 6))
            assert apply_vertex(g, v) == v

    def test_three_step_trace(self):
        a = adding_machine(1)
        assert apply_vertex(a, (1, 1, 0)) == (0, 0, 1)

    def test_letter_range_checked(self):
        with pytest.raises(ValueError):
            apply_vertex(adding_machine(1), (2,))


class TestSection:
    def test_sections_of_adding_machine(self):
        a = adding_machine(1)
        assert section(a, (1,)) == a
        assert section(a, (0,)).is_identity()

    def test_section_of_identity(self):
        assert section(identity(), (0, 1, 0)).is_identity()

    def test_grafted_machine_carry_sits_at_last_source(self):
        A = adding_machine(2)
        a = adding_machine(1)
        assert section(A, (3,)) == a
        for s in (0, 1, 2):
            assert section(A, (s,)).is_identity()

    def test_empty_word_gives_back_g(self):
        A = adding_machine(2)
        assert section(A, ()) == A

    def test_section_law(self):
        rng = random.Random(10)
        for _ in range(200):
            alphabet = rng.choice((2, 4))
            g = random_automorphism(rng, alphabet)
            v = random_word(rng, alphabet, rng.randint(1, 3))
            w = tuple(rng.randrange(2) for _ in range(rng.randint(0, 4)))
            assert apply_vertex(g, v + w) == apply_vertex(g, v) + apply_vertex(section(g, v), w)


class TestCompose:
    def test_conjugating_pair_by_swap(self):
        s, a2 = dihedral_generators()
        a1 = s
        h = compose(a1, a2)
        hs = compose(h, s)
        # h*s = (a2, a1) with trivial root
        assert hs.root_permutation().is_identity()
        assert hs.wreath_sections() == (a2, a1)

    def test_compose_with_identity(self):
        rng = random.Random(11)
        for _ in range(100):
            alphabet = rng.choice((2, 4))
            g = random_automorphism(rng, alphabet)
            assert compose(g, identity(alphabet)) == g
            assert compose(identity(alphabet), g) == g

    def test_rotated_odometer_model(self):
        A = adding_machine(2)
        R = rotation_automorphism(Permutation.parse("(0 3)", 4))
        AR = compose(A, R)
        assert AR.root_permutation() == Permutation((0, 3, 1, 2))
        assert AR.root_permutation().cycle_string() == "(0)(1 3 2)"
        assert AR.wreath_sections() == (adding_machine(1), identity(), identity(), identity())

    def test_alphabet_mismatch_rejected(self):
        with pytest.raises(ValueError):
            compose(adding_machine(2), adding_machine(1))

    def test_composition_law_on_boundary(self):
        rng = random.Random(12)
        for _ in range(200):
            alphabet = rng.choice((2, 4))
            g = random_automorphism(rng, alphabet)
            h = random_automorphism(rng, alphabet)
            b = random_point(rng, alphabet)
            assert apply_boundary(compose(g, h), b) == apply_boundary(g, apply_boundary(h, b))

    def test_level_action_composes(self):
        rng = random.Random(13)
        for _ in range(50):
            g = random_automorphism(rng, 4)
            h = random_automorphism(rng, 4)
            pg, _ = level_permutation(g, 3)
            ph, _ = level_permutation(h, 3)
            pgh, _ = level_permutation(compose(g, h), 3)
            assert pgh == pg * ph


class TestInverse:
    def test_involutions(self):
        assert inverse(identity()) == identity()
        assert inverse(sigma()) == sigma()

    def test_inverse_law(self):
        rng = random.Random(14)
        for _ in range(150):
            alphabet = rng.choice((2, 4))
            g = random_automorphism(rng, alphabet)
            assert is_identity(compose(g, inverse(g)))
            assert is_identity(compose(inverse(g), g))

    def test_boundary_round_trip(self):
        rng = random.Random(15)
        for _ in range(150):
            alphabet = rng.choice((2, 4))
            g = random_automorphism(rng, alphabet)
            b = random_point(rng, alphabet)
            assert apply_boundary(inverse(g), apply_boundary(g, b)) == b


class TestIsIdentityAndOrder:
    def test_identity_automaton(self):
        assert is_identity(identity())
        assert is_identity(identity(8))

    def test_nontrivial(self):
        assert not is_identity(adding_machine(1))
        assert not is_identity(sigma())

    def test_square_of_conjugated_pair(self):
        s, a2 = dihedral_generators()
        hs = compose(compose(s, a2), s)
        assert not is_identity(hs)
        assert is_identity(compose(hs, hs))

    def test_order_probe_swap(self):
        for depth in (1, 2, 5):
            assert order_probe(sigma(), depth) == OrderBound(2, exact=True)

    def test_order_probe_adding_machine(self):
        assert order_probe(adding_machine(1), 8) == OrderBound(256, exact=False)

    def test_order_probe_dihedral_product(self):
        s, a2 = dihedral_generators()
        h = compose(s, a2)
        assert order_probe(h, 10) == OrderBound(1024, exact=False)
        assert order_probe(compose(h, s), 8) == OrderBound(2, exact=True)

    def test_power(self):
        a = adding_machine(1)
        assert power(a, 0) == identity()
        assert power(a, 2) == compose(a, a)
        assert power(a, -1) == inverse(a)
        assert is_identity(compose(power(a, 5), power(a, -5)))

    def test_level_order_doubles_or_stabilizes(self):
        # the doubling law holds across binary branchings; the root of a
        # grafted tree has 2**N children, so its level starts the chain
        rng = random.Random(16)
        samples = [adding_machine(1), dihedral_generators()[1], adding_machine(2)]
        samples += [random_automorphism(rng, rng.choice((2, 4))) for _ in range(10)]
        for g in samples:
            ks = [level_permutation(g, n)[0].order() for n in range(1, 7)]
            if g.alphabet == 2:
                assert ks[0] in (1, 2)
            for prev, k in zip(ks, ks[1:]):
                assert k in (prev, 2 * prev), (g, ks)


class TestLevelPermutation:
    def test_adding_machine_is_transitive_on_every_level(self):
        for N in (1, 2):
            A = adding_machine(N)
            for n in range(1, 9):
                perm, cycles = level_permutation(A, n)
                assert len(cycles.cycles) == 1
                assert len(perm.images) == (1 << N) << (n - 1)

    def test_identity_level_action(self):
        perm, cycles = level_permutation(identity(4), 3)
        assert perm.is_identity()
        assert all(len(c) == 1 for c in cycles.cycles)

    def test_rotated_odometer_first_level(self):
        A = adding_machine(2)
        R = rotation_automorphism(Permutation.parse("(0 3)", 4))
        _, cycles = level_permutation(compose(A, R), 1)
        assert cycles.cycles == ((0,), (1, 3, 2))

    def test_lexicographic_indexing(self):
        # the level-2 vertex (w1, w2) sits at index 2*w1 + w2
        A = adding_machine(2)
        perm, _ = level_permutation(A, 2)
        for w1 in range(4):
            for w2 in range(2):
                img = apply_vertex(A, (w1, w2))
                assert perm(2 * w1 + w2) == 2 * img[0] + img[1]


class TestPrefixCompatibility:
    def test_images_of_children_are_children(self):
        rng = random.Random(17)
        for _ in range(200):
            alphabet = rng.choice((2, 4))
            g = random_automorphism(rng, alphabet)
            v = random_word(rng, alphabet, rng.randint(1, 4))
            for c in (0, 1):
                assert apply_vertex(g, v + (c,))[: len(v)] == apply_vertex(g, v)


class TestFiniteDepthFromTable:
    def test_swap_table(self):
        g = finite_depth_from_table(1, {"0": "1", "1": "0"})
        assert g == sigma()

    def test_conditional_swap(self):
        table = {"00": "00", "01": "01", "10": "11", "11": "10"}
        g = finite_depth_from_table(2, table)
        assert g.root_permutation().is_identity()
        assert g.wreath_sections() == (identity(), sigma())
        for w, img in table.items():
            assert apply_vertex(g, tuple(int(c) for c in w)) == tuple(int(c) for c in img)

    def test_acts_trivially_below_depth(self):
        g = finite_depth_from_table(2, {"00": "00", "01": "01", "10": "11", "11": "10"})
        rng = random.Random(18)
        for _ in range(50):
            tail = tuple(rng.randrange(2) for _ in range(5))
            v = random_word(rng, 2, 2)
            assert apply_vertex(g, v + tail)[2:] == tail

    def test_prefix_incompatible_rejected_naming_pair(self):
        table = {"00": "00", "01": "10", "10": "01", "11": "11"}
        with pytest.raises(ValueError, match="prefix-compatible") as err:
            finite_depth_from_table(2, table)
        message = str(err.value)
        assert "00" in message and "01" in message

    def test_non_bijective_rejected(self):
        with pytest.raises(ValueError, match="bijection"):
            finite_depth_from_table(1, {"0": "1", "1": "1"})

    def test_incomplete_domain_rejected(self):
        with pytest.raises(ValueError, match="domain"):
            finite_depth_from_table(2, {"00": "00", "01": "01", "10": "10"})


class TestFiniteDepth:
    def test_depths(self):
        assert finite_depth(sigma()) == 1
        assert finite_depth(identity()) == 1
        g = finite_depth_from_table(2, {"00": "00", "01": "01", "10": "11", "11": "10"})
        assert finite_depth(g) == 2

    def test_unbounded_rejected(self):
        with pytest.raises(ValueError, match="depth"):
            finite_depth(adding_machine(1))


class TestGraft:
    def test_graft_of_adding_machine(self):
        assert graft(adding_machine(1), 2) == adding_machine(2)
        assert graft(adding_machine(1), 3) == adding_machine(3)

    def test_graft_identity(self):
        for N in (1, 2, 3):
            assert graft(identity(), N).is_identity()

    def test_graft_boundary_action_matches(self):
        # the grafted automorphism acts on re-bracketed sequences exactly as
        # the original acts on binary sequences

        def rebracket(b, N):
            length = len(b.period)
            horizon = max(len(b.preperiod), N) + length
            letters = b.letters(horizon)
            phase = (horizon - len(b.preperiod)) % length
            tail = b.period[phase:] + b.period[:phase]
            return BoundaryPoint((word_to_symbol(letters[:N]),) + letters[N:horizon], tail)

        rng = random.Random(19)
        for _ in range(150):
            g = random_automorphism(rng, 2)
            N = rng.choice((2, 3))
            gg = graft(g, N)
            b = random_point(rng, 2)
            got = apply_boundary(gg, rebracket(b, N))
            assert got == rebracket(apply_boundary(g, b), N)

    def test_word_symbol_identification(self):
        assert word_to_symbol((1, 1)) == 3
        assert symbol_to_word(3, 2) == (1, 1)
        assert word_to_symbol((1, 0)) == 2

    def test_incompatible_root_cycle_cannot_pull_back(self):
        # the 3-cycle of first-level symbols fixes 3 = word 11 but its pull
        # back through the identification is not a tree map
        cycle = Permutation.from_cycles(4, [(0, 1, 2)])
        table = {
            symbol_to_word(s, 2): symbol_to_word(cycle(s), 2) for s in range(4)
        }
        with pytest.raises(ValueError, match="prefix-compatible"):
            finite_depth_from_table(2, table)

    def test_graft_requires_binary(self):
        with pytest.raises(ValueError):
            graft(adding_machine(2), 2)


class TestSerialization:
    def test_round_trip_objects(self):
        s, a2 = dihedral_generators()
        cases = [
            identity(),
            identity(4),
            sigma(),
            adding_machine(1),
            adding_machine(3),
            compose(adding_machine(2), rotation_automorphism(Permutation.parse("(0 3)", 4))),
            compose(s, a2),
        ]
        for g in cases:
            assert from_json(to_json(g)) == g

    def test_writer_is_stable(self):
        g = compose(adding_machine(2), rotation_automorphism(Permutation.parse("(0 3)", 4)))
        text = to_json(g)
        assert to_json(from_json(text)) == text

    def test_builtins_need_no_definition(self):
        g = from_json('{"initial": "a", "states": {}}')
        assert g == adding_machine(1)
        g = from_json('{"initial": "sigma", "states": {}}')
        assert g == sigma()

    def test_builtin_names_emitted(self):
        text = to_json(adding_machine(2))
        assert '"a"' in text and '"id"' in text

    def test_reserved_names_rejected(self):
        bad = '{"initial": "a", "states": {"a": {"alphabet": 2, "perm": [0, 1], "sections": ["a", "a"]}}}'
        with pytest.raises(ValueError, match="reserved"):
            from_json(bad)

    def test_unknown_state_rejected(self):
        bad = '{"initial": "s0", "states": {"s0": {"alphabet": 2, "perm": [0, 1], "sections": ["ghost", "s0"]}}}'
        with pytest.raises(ValueError, match="ghost"):
            from_json(bad)

    def test_missing_field_rejected(self):
        with pytest.raises(ValueError, match="initial"):
            from_json('{"states": {}}')
        bad = '{"initial": "s0", "states": {"s0": {"alphabet": 2, "perm": [0, 1]}}}'
        with pytest.raises(ValueError, match="sections"):
            from_json(bad)

    def test_alphabet_consistency_checked(self):
        bad = '{"initial": "s0", "states": {"s0": {"alphabet": 4, "perm": [0, 1], "sections": ["id", "id"]}}}'
        with pytest.raises(ValueError, match="alphabet"):
            from_json(bad)

    def test_random_round_trips(self):
        rng = random.Random(20)
        for _ in range(100):
            g = random_automorphism(rng, rng.choice((2, 4, 8)))
            assert from_json(to_json(g)) == g


class TestCanonicalForm:
    def test_equal_actions_are_structurally_equal(self):
        # two superficially different automata with the same action collapse
        # to the same canonical form
        g1 = TreeAutomorphism(
            [
                State((1, 0), (1, 2)),
                State((1, 0), (3, 2)),
                State((0, 1), (2, 2)),
                State((1, 0), (1, 4)),
                State((0, 1), (4, 4)),
            ]
        )
        assert g1 == adding_machine(1)

    def test_identity_collapses_to_one_state(self):
        g = TreeAutomorphism(
            [
                State((0, 1), (1, 1)),
                State((0, 1), (2, 0)),
                State((0, 1), (2, 2)),
            ]
        )
        assert len(g.states) == 1
        assert g == identity()

    def test_validation(self):
        with pytest.raises(ValueError, match="permutation"):
            TreeAutomorphism([State((0, 0), (0, 0))])
        with pytest.raises(ValueError, match="power of two"):
            TreeAutomorphism([State((0, 1, 2), (1, 1, 1)), State((0, 1), (1, 1))])
        with pytest.raises(ValueError, match="binary"):
            TreeAutomorphism(
                [State((0, 1, 2, 3), (1, 1, 1, 0)), State((0, 1), (1, 1))]
            )
