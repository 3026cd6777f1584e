from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rbslab.ordpm import (
    EMPTY_EMPTY, EMPTY_POINT, FilteredDimSeq, JMorphism, JObject, OrdPmMorphism, compose,
    compose_delta, delta_to_ordpm, face_map, factor_collapse_splitting, format_partition,
    fred_hom, fred_hom_bruteforce, fred_objects, free_monoid_words, free_monoid_words_bruteforce,
    is_snug, j_morphisms, order_maps, ordpm_morphisms, ordpm_to_delta, parse_context, parse_word,
    refinement_zigzag, rho_choices, snug_partition, snug_partitions_bruteforce,
)

CONTEXT = "1<2<3|4<5|6"


# -- simplex category versus Ord± ---------------------------------------------


@pytest.mark.parametrize("m,n", list(itertools.product(range(5), repeat=2)))
def test_round_trip_exhaustive(m, n):
    thetas = list(order_maps(m, n))
    alphas = list(ordpm_morphisms(n, m))
    # both directions are mutually inverse bijections
    assert len(thetas) == len(alphas)
    for theta in thetas:
        assert ordpm_to_delta(delta_to_ordpm(theta, n)) == tuple(theta)
    for alpha in alphas:
        assert delta_to_ordpm(ordpm_to_delta(alpha), alpha.m) == alpha


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_contravariant_functoriality(data):
    a, b, c = (data.draw(st.integers(0, 4)) for _ in range(3))
    theta = data.draw(st.sampled_from(list(order_maps(a, b))))
    psi = data.draw(st.sampled_from(list(order_maps(b, c))))
    lhs = delta_to_ordpm(compose_delta(psi, theta), c)
    assert lhs == delta_to_ordpm(theta, b).compose(delta_to_ordpm(psi, c))


def test_identity_and_zero():
    assert delta_to_ordpm(tuple(range(4)), 3) == OrdPmMorphism.identity(3)
    # [0] -> [n] constant at j sends i <= j to ⊥ and i > j to ⊤
    alpha = delta_to_ordpm((2,), 4)
    assert alpha.values == (0, 0, 1, 1)


@pytest.mark.parametrize("n", range(1, 6))
def test_face_maps(n):
    for i in range(1, n + 1):
        f = face_map(n, i)
        assert f == delta_to_ordpm((i - 1, i), n)
        assert f.values == tuple(0 if j < i else 1 if j == i else 2 for j in range(1, n + 1))
    assert str(face_map(3, 2)) == "[1->⊥ 2->1 3->⊤]"


def test_face_map_rejects_out_of_range():
    with pytest.raises(ValueError):
        face_map(3, 0)


def test_ordpm_rejects_non_monotone():
    with pytest.raises(ValueError):
        OrdPmMorphism(2, 2, (2, 1))


# -- snug partitions ----------------------------------------------------------


@pytest.mark.parametrize("word,expected", [
    ("123456", "(123)(45)(6)"),
    ("654321", "(6)(5)(4)(3)(2)(1)"),
    ("12423456", "(12)(4)(23)(45)(6)"),
    ("", "∅_∅"),
])
def test_snug_golden(word, expected):
    ctx = parse_context(CONTEXT)
    obj = snug_partition(ctx, parse_word(word, ctx))
    assert format_partition(obj) == expected
    if not word:
        assert obj == EMPTY_EMPTY


def _contexts(k: int):
    letters = [str(i) for i in range(1, k + 1)]
    for cuts in itertools.product([False, True], repeat=k - 1):
        ctx, cur = [], [letters[0]]
        for i, c in enumerate(cuts):
            if c:
                ctx.append(tuple(cur))
                cur = [letters[i + 1]]
            else:
                cur.append(letters[i + 1])
        ctx.append(tuple(cur))
        yield letters, ctx


def test_snug_predicate_exhaustive():
    """Every word of length <= 6 over every context of total size <= 6."""
    for k in range(1, 7):
        for letters, ctx in _contexts(k):
            for length in range(7):
                for w in itertools.product(letters, repeat=length):
                    obj = snug_partition(ctx, w)
                    parts = obj.blocks()
                    assert tuple(x for p in parts for x in p) == w
                    assert all(is_snug(p, ctx) for p in parts)
                    assert not any(is_snug(a + b, ctx) for a, b in zip(parts, parts[1:]))


def test_snug_partition_unique_against_bruteforce():
    for k in range(1, 5):
        for letters, ctx in _contexts(k):
            for length in range(6):
                for w in itertools.product(letters, repeat=length):
                    brute = snug_partitions_bruteforce(ctx, w)
                    assert brute == [tuple(snug_partition(ctx, w).blocks())]


@pytest.mark.parametrize("text", ["1<<2", "1<2|2"])
def test_bad_context(text):
    with pytest.raises(ValueError):
        parse_context(text)


def test_bad_word():
    with pytest.raises(ValueError):
        parse_word("17", parse_context(CONTEXT))


# -- partitioned ordered sets ---------------------------------------------------


def test_empty_objects_distinct():
    assert EMPTY_EMPTY != EMPTY_POINT
    assert str(EMPTY_EMPTY) == "∅_∅" and str(EMPTY_POINT) == "∅_{*}"
    # ∅_* is initial: exactly one morphism to every object
    for target in [EMPTY_EMPTY, EMPTY_POINT, JObject.of([[1], [2, 3]]), JObject.of([[], [1]])]:
        assert len(j_morphisms(EMPTY_POINT, target)) == 1


def j_objects(max_elems: int = 3, max_parts: int = 3):
    out = []
    for ne in range(max_elems + 1):
        for np_ in range(max_parts + 1):
            for s in itertools.combinations_with_replacement(range(np_), ne) if np_ else \
                    ([()] if ne == 0 else []):
                out.append(JObject(tuple(range(ne)), tuple(range(np_)), tuple(s)))
    return out


OBJS = j_objects()


@settings(max_examples=150, deadline=None)
@given(st.sampled_from(OBJS), st.sampled_from(OBJS), st.sampled_from(OBJS))
def test_composition_and_factorisation(a, b, c):
    for f in j_morphisms(a, b)[:6]:
        coll, split = factor_collapse_splitting(f)
        assert coll.is_collapse and split.is_splitting
        assert compose(split, coll) == f
        assert compose(f, JMorphism.identity(a)) == f == compose(JMorphism.identity(b), f)
        for g in j_morphisms(b, c)[:6]:
            h = compose(g, f)
            assert h in j_morphisms(a, c)


@settings(max_examples=150, deadline=None)
@given(st.sampled_from([o for o in OBJS if o.surjective]),
       st.sampled_from([o for o in OBJS if o.surjective]))
def test_rho_unique_for_surjective_data(a, b):
    """With surjective partitioning maps and surjective θ, ρ is forced."""
    n = len(b.elements)
    for theta in itertools.combinations_with_replacement(range(n), len(a.elements)):
        if set(theta) != set(range(n)):
            continue
        assert len(rho_choices(a, b, theta)) <= 1


def test_rho_not_unique_in_general():
    a = JObject.of([[0], []])
    b = JObject.of([[0], []])
    assert len(rho_choices(a, b, (0,))) == 2


def test_refinement_zigzag():
    src = JObject.of([[1, 2], [3]], ["a", "b"])
    tgt = JObject.of([[1], [2], [3]], ["x", "y", "z"])
    first, second, third = refinement_zigzag(src, tgt, (0, 1, 2))
    assert first.target == second.target
    assert second.source == third.source and third.target == tgt
    with pytest.raises(ValueError):
        # two source parts meet the same target part
        refinement_zigzag(JObject.of([[1], [2]]), JObject.of([[1, 2]]), (0, 1))
    with pytest.raises(ValueError):
        refinement_zigzag(src, tgt, (1, 0, 2))


# -- reduced filtered dimension sequences ---------------------------------------


def test_fred_object_counts():
    assert [len(fred_objects(t)) for t in range(1, 6)] == [3 ** (t - 1) for t in range(1, 6)]


@pytest.mark.parametrize("total", [1, 2, 3, 4])
def test_fred_hom_against_bruteforce(total):
    objs = fred_objects(total)
    for a, b in itertools.product(objs, repeat=2):
        assert sorted(fred_hom(a, b)) == fred_hom_bruteforce(a, b)


def test_fred_is_poset_up_to_five():
    objs = [o for t in range(1, 6) for o in fred_objects(t)]
    for a, b in itertools.product(objs, repeat=2):
        if a.total == b.total:
            assert len(fred_hom(a, b)) <= 1


def test_fred_examples():
    d = FilteredDimSeq(((1, 1),))
    assert len(fred_hom(d, FilteredDimSeq(((2,),)))) == 1
    assert len(fred_hom(d, FilteredDimSeq(((1,), (1,))))) == 1
    assert fred_hom(FilteredDimSeq(((2,),)), d) == []
    with pytest.raises(ValueError):
        FilteredDimSeq(((0, 1),))


@pytest.mark.parametrize("sizes,n,bound", [([1], 2, 4), ([2], 1, 4), ([1, 1], 2, 4), ([2, 1], 3, 3)])
def test_free_monoid_word_counts(sizes, n, bound):
    assert free_monoid_words(sizes, n, bound) == free_monoid_words_bruteforce(sizes, n, bound)


def test_free_monoid_single_generator():
    # pairs of words in one degree-1 generator: degree k has k + 1 splittings
    assert free_monoid_words([1], 2, 4) == [1, 2, 3, 4, 5]
