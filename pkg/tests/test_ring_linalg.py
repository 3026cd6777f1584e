from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rbslab.ring_linalg import (
    CapExceeded, RingError, Summand, act_on_summand, canonical_summand, count_summands,
    enumerate_gl, enumerate_summands, gl_order, make_ring, matrix_inverse, parse_poly,
    poly_is_irreducible, summand_contains, summand_leq,
)

RINGS = ["F2", "F3", "F5", "F4", "F8", "F9", "Z4", "Z8", "Z9", "F2[t]/t^2", "F3[t]/t^2",
         "F2[t]/t^3"]


def gaussian_binomial(n: int, k: int, q: int) -> int:
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


@pytest.mark.parametrize("spec", RINGS)
def test_ring_axioms_exhaustive(spec):
    r = make_ring(spec)
    els = range(r.size)
    for a, b, c in itertools.product(els, repeat=3):
        assert r.add(r.add(a, b), c) == r.add(a, r.add(b, c))
        assert r.mul(r.mul(a, b), c) == r.mul(a, r.mul(b, c))
        assert r.mul(a, r.add(b, c)) == r.add(r.mul(a, b), r.mul(a, c))
    for a in els:
        assert r.add(a, r.neg(a)) == 0
        assert r.mul(a, 1) == a
        if r.is_unit(a):
            assert r.mul(a, r.inv(a)) == 1


@pytest.mark.parametrize("spec,size,units", [
    ("F2", 2, 1), ("F3", 3, 2), ("F4", 4, 3), ("F8", 8, 7), ("F9", 9, 8), ("Z4", 4, 2),
    ("Z8", 8, 4), ("Z9", 9, 6), ("F2[t]/t^2", 4, 2), ("F2[t]/t^3", 8, 4),
])
def test_sizes_and_units(spec, size, units):
    r = make_ring(spec)
    assert r.size == size
    assert len(r.units) == units


@pytest.mark.parametrize("n", [2, 3, 5, 7])
def test_prime_field_matches_integer_arithmetic(n):
    r = make_ring(f"F{n}")
    for a, b in itertools.product(range(n), repeat=2):
        assert r.add(a, b) == (a + b) % n
        assert r.mul(a, b) == (a * b) % n


def test_zmod_matches_integer_arithmetic():
    r = make_ring("Z8")
    for a, b in itertools.product(range(8), repeat=2):
        assert r.mul(a, b) == (a * b) % 8


@pytest.mark.parametrize("spec", ["F4", "F8", "F9"])
def test_extension_fields_have_cyclic_unit_group(spec):
    r = make_ring(spec)
    orders = []
    for a in r.units:
        x, k = a, 1
        while x != 1:
            x, k = r.mul(x, a), k + 1
        orders.append(k)
    assert max(orders) == r.size - 1


@pytest.mark.parametrize("bad", ["Z6", "F6", "F9:t^2+2", "G2", "F4:t^2+1", "F3[t]/t^0", "F1"])
def test_bad_ring_specs(bad):
    with pytest.raises(RingError):
        make_ring(bad)


def test_ring_cap():
    with pytest.raises(CapExceeded):
        make_ring("F9", cap=8)


def test_label_round_trip():
    for spec in RINGS:
        r = make_ring(spec)
        assert make_ring(r.label).label == r.label


def test_irreducibility():
    assert poly_is_irreducible(parse_poly("t^2+t+1", 2), 2)
    assert not poly_is_irreducible(parse_poly("t^2+1", 2), 2)
    assert poly_is_irreducible(parse_poly("t^2+1", 3), 3)


# -- summands -------------------------------------------------------------


@pytest.mark.parametrize("spec,n,k", [
    ("F2", 3, 1), ("F2", 3, 2), ("F2", 4, 2), ("F3", 3, 1), ("F4", 2, 1), ("Z4", 2, 1),
    ("Z4", 3, 1), ("Z4", 3, 2), ("F2[t]/t^2", 2, 1), ("Z9", 2, 1),
])
def test_summand_counts_against_gaussian_binomial(spec, n, k):
    r = make_ring(spec)
    q = r.size // len(r.nonunits)
    m = len(r.nonunits)
    expected = m ** (k * (n - k)) * gaussian_binomial(n, k, q)
    assert count_summands(r, n, k) == expected
    summands = enumerate_summands(r, n, k)
    assert len(summands) == expected == len(set(summands))


@pytest.mark.parametrize("spec,n,k", [("F2", 3, 1), ("F2", 3, 2), ("Z4", 2, 1), ("F3", 2, 1)])
def test_summand_enumeration_against_span_oracle(spec, n, k):
    """Oracle: canonicalize the span of every unimodular k-frame."""
    r = make_ring(spec)
    seen = set()
    for frame in itertools.product(itertools.product(range(r.size), repeat=n), repeat=k):
        s = canonical_summand(r, frame, n)
        if s is not None and s.rank == k:
            seen.add(s)
    assert sorted(seen) == enumerate_summands(r, n, k)


def test_nonsummand_rejected():
    r = make_ring("Z4")
    assert canonical_summand(r, [(2, 0)], 2) is None
    assert canonical_summand(r, [(1, 2)], 2) is not None


@pytest.mark.parametrize("spec,n", [("F2", 2), ("F2", 3), ("F3", 2), ("Z4", 2), ("F4", 2),
                                    ("F2[t]/t^2", 2)])
def test_gl_order_against_bruteforce(spec, n):
    r = make_ring(spec)
    count = 0
    for entries in itertools.product(range(r.size), repeat=n * n):
        g = tuple(tuple(entries[i * n:(i + 1) * n]) for i in range(n))
        try:
            matrix_inverse(r, g)
        except ValueError:
            continue
        count += 1
    assert count == gl_order(r, n) == len(enumerate_gl(r, n))


@pytest.mark.parametrize("spec,n", [("F2", 3), ("Z4", 2), ("F3", 2)])
def test_matrix_group_tables(spec, n):
    r = make_ring(spec)
    g = enumerate_gl(r, n)
    for i in range(0, len(g), max(1, len(g) // 17)):
        for j in range(0, len(g), max(1, len(g) // 13)):
            assert g[g.mul(i, j)] == r.matmul(g[i], g[j])
        assert g.mul(i, g.inv(i)) == g.identity_index
        assert g[g.inv(i)] == matrix_inverse(r, g[i])


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_action_preserves_containment(data):
    r = make_ring(data.draw(st.sampled_from(["F2", "F3", "Z4"])))
    n = 3 if r.size == 2 else 2
    grp = enumerate_gl(r, n)
    g = grp[data.draw(st.integers(0, len(grp) - 1))]
    lines = enumerate_summands(r, n, 1)
    planes = enumerate_summands(r, n, n - 1) if n > 2 else lines
    s = data.draw(st.sampled_from(lines))
    t = data.draw(st.sampled_from(planes))
    gs, gt = act_on_summand(r, g, s), act_on_summand(r, g, t)
    assert summand_leq(r, s, t) == summand_leq(r, gs, gt)
    for v in gs.basis:
        assert summand_contains(r, gs, v)


def test_summand_contains_basic():
    r = make_ring("F2")
    s = Summand(3, ((1, 0, 0), (0, 1, 0)))
    assert summand_contains(r, s, (1, 1, 0))
    assert not summand_contains(r, s, (0, 0, 1))
