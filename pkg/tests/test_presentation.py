"""Presentation parsing, word algebra, and the family builders."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from charvar.errors import InvalidParams, ParseError, UnknownGenerator
from charvar.matgroup import frobenius, sample_su
from charvar.presentation import (
    Family,
    GraphSpec,
    GroupPresentation,
    Word,
    abelian_group,
    build_family,
    commutator,
    direct_with_finite,
    evaluate_word,
    free_group,
    free_product,
    free_reduce,
    generator,
    parse_presentation,
    presentation_to_text,
    raag,
    star_raag,
    torus_knot_group,
    word_to_text,
)

# strategy: words over 3 generators with exponents in [-4, 4] \ {0}
_letters = st.tuples(
    st.integers(min_value=0, max_value=2),
    st.integers(min_value=-4, max_value=4).filter(lambda e: e != 0),
)
_words = st.lists(_letters, max_size=10).map(lambda ls: Word(tuple(ls)))


class TestWordAlgebra:
    def test_cancellation(self):
        w = generator(0) * generator(0, -1)
        assert free_reduce(w) == Word(())

    def test_exponent_merge(self):
        w = generator(0, 2) * generator(0, 3)
        assert free_reduce(w) == generator(0, 5)

    def test_inner_cancellation(self):
        w = generator(0) * generator(1) * generator(1, -1) * generator(0)
        assert free_reduce(w) == generator(0, 2)

    def test_inverse(self):
        w = generator(0, 2) * generator(1, -3)
        assert free_reduce(w * w.inverse()) == Word(())

    def test_commutator_shape(self):
        w = commutator(generator(0), generator(1))
        assert w.letters == ((0, 1), (1, 1), (0, -1), (1, -1))

    def test_exponent_cap(self):
        with pytest.raises(InvalidParams):
            generator(0, 10**6 + 1)

    @given(_words)
    @settings(max_examples=60, deadline=None)
    def test_free_reduce_idempotent(self, w):
        once = free_reduce(w)
        assert free_reduce(once) == once
        assert once.is_reduced


class TestEvaluate:
    def test_empty_word_is_identity(self, rng):
        images = [sample_su(2, rng)]
        assert np.allclose(evaluate_word(Word(()), images), np.eye(2))

    def test_commutator_of_diagonals(self):
        images = [np.diag([2.0, 0.5]), np.diag([3.0, 1 / 3.0])]
        w = commutator(generator(0), generator(1))
        assert frobenius(evaluate_word(w, images) - np.eye(2)) < 1e-12

    def test_torus_knot_rotations(self):
        # rotation by pi squares to -I; rotation by 2pi/3 cubes to -I,
        # so a^2 b^-3 evaluates to (-I)(-I)^-1 = I
        a = np.diag([1j, -1j])
        b = np.diag([np.exp(1j * np.pi / 3), np.exp(-1j * np.pi / 3)])
        w = generator(0, 2) * generator(1, -3)
        assert frobenius(evaluate_word(w, [a, b]) - np.eye(2)) < 1e-14

    @given(_words, _words, st.integers(min_value=0, max_value=2**31 - 1))
    @settings(max_examples=40, deadline=None)
    def test_evaluation_is_multiplicative(self, w1, w2, seed):
        rng = np.random.default_rng(seed)
        images = [sample_su(2, rng) for _ in range(3)]
        lhs = evaluate_word(w1 * w2, images)
        rhs = evaluate_word(w1, images) @ evaluate_word(w2, images)
        assert frobenius(lhs - rhs) < 1e-10

    @given(_words, st.integers(min_value=0, max_value=2**31 - 1))
    @settings(max_examples=40, deadline=None)
    def test_evaluation_respects_reduction(self, w, seed):
        rng = np.random.default_rng(seed)
        images = [sample_su(2, rng) for _ in range(3)]
        lhs = evaluate_word(free_reduce(w), images)
        rhs = evaluate_word(w, images)
        assert frobenius(lhs - rhs) < 1e-10


class TestParser:
    def test_three_generator_nilpotent(self):
        pres = parse_presentation(
            "<a,b,c | [a,c], [b,c], a*b*a^-1*b^-1*c^-1>"
        )
        assert pres.rank == 3
        assert len(pres.relators) == 3
        assert pres.relators[0] == commutator(generator(0), generator(2))

    def test_empty_relator_list(self):
        pres = parse_presentation("<a | >")
        assert pres.rank == 1
        assert pres.relators == ()

    def test_torus_knot_text(self):
        pres = parse_presentation("<a,b | a^2*b^-3>")
        assert pres.relators == (generator(0, 2) * generator(1, -3),)

    def test_whitespace_insensitive(self):
        a = parse_presentation("<a,b|[a,b]>")
        b = parse_presentation("  < a , b |  [ a , b ] > ")
        assert a.relators == b.relators

    def test_round_trip_is_fixed_point(self):
        for text in (
            "<a,b | a^2*b^-3>",
            "<a | >",
            "<a,b,c | [a,c], [b,c], a*b*a^-1*b^-1*c^-1>",
        ):
            canonical = presentation_to_text(parse_presentation(text))
            assert presentation_to_text(parse_presentation(canonical)) == canonical

    def test_unknown_generator(self):
        with pytest.raises(UnknownGenerator):
            parse_presentation("<a | a*b>")

    def test_error_carries_position(self):
        with pytest.raises(ParseError) as err:
            parse_presentation("<a | a^^>")
        assert err.value.position == 7

    def test_missing_closing(self):
        with pytest.raises(ParseError):
            parse_presentation("<a | a^2")

    def test_word_to_text_round_trip(self):
        w = generator(0, 2) * generator(1, -1)
        pres = parse_presentation(f"<a,b | {word_to_text(w, ('a', 'b'))}>")
        assert pres.relators == (w,)


class TestBuilders:
    def test_star_three_generators(self):
        pres = star_raag(2)
        assert pres.rank == 3
        assert pres.fixed == (0,)
        assert pres.relators == (
            commutator(generator(0), generator(1)),
            commutator(generator(0), generator(2)),
        )

    def test_complete_graph_is_abelian(self):
        g = GraphSpec(3, frozenset({(0, 1), (0, 2), (1, 2)}))
        pres = raag(g)
        assert len(pres.relators) == 3
        assert all(
            rel == commutator(generator(i), generator(j))
            for rel, (i, j) in zip(pres.relators, g.sorted_edges())
        )

    def test_edgeless_graph_is_free(self):
        pres = raag(GraphSpec(3, frozenset()))
        assert pres.rank == 3
        assert pres.relators == ()

    def test_raag_relator_count_matches_edges(self, rng):
        for _ in range(10):
            v = int(rng.integers(2, 6))
            pairs = [(i, j) for i in range(v) for j in range(i + 1, v)]
            take = rng.random(len(pairs)) < 0.5
            edges = frozenset(p for p, keep in zip(pairs, take) if keep)
            pres = raag(GraphSpec(v, edges))
            assert len(pres.relators) == len(edges)

    def test_graph_rejects_self_loop(self):
        with pytest.raises(InvalidParams):
            GraphSpec(2, frozenset({(1, 1)}))

    def test_graph_rejects_out_of_range(self):
        with pytest.raises(InvalidParams):
            GraphSpec(2, frozenset({(0, 5)}))

    def test_torus_knot_relators(self):
        pres = torus_knot_group([2, 3])
        assert pres.relators == (generator(0, 2) * generator(1, -3),)
        with pytest.raises(InvalidParams):
            torus_knot_group([2])

    def test_direct_with_finite_ordering(self):
        z4 = GroupPresentation(("b1",), (generator(0, 4),))
        pres = direct_with_finite(2, z4)
        assert pres.generator_names == ("a1", "a2", "b1")
        assert pres.fixed == (2,)
        # two commutators then the shifted torsion relator
        assert pres.relators[-1] == generator(2, 4)

    def test_free_product_shifts_indices(self):
        pres = free_product(torus_knot_group([2, 3]), abelian_group(2))
        assert pres.rank == 4
        assert pres.relators[1] == commutator(generator(2), generator(3))

    def test_build_family_dispatch(self):
        assert build_family("free", rank=2) == free_group(2)
        assert build_family(Family.STAR_RAAG, rank=2) == star_raag(2)
        with pytest.raises(InvalidParams):
            build_family("free", rank=0)
