from __future__ import annotations

import itertools
import math

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from rbslab.categories import SimplicialComplex
from rbslab.homology import (
    ChainComplex, homology, homology_presentation, induced_map, integer_invariants,
    parse_coeff, rank_mod_p, relative_homology, smith_normal_form, snf_diagonal,
    uct_consistent,
)

matrices = st.integers(1, 6).flatmap(lambda r: st.integers(1, 6).flatmap(
    lambda c: st.lists(st.lists(st.integers(-9, 9), min_size=c, max_size=c),
                       min_size=r, max_size=r)))


def bareiss_det(m: list[list[int]]) -> int:
    a = [row[:] for row in m]
    n = len(a)
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k]), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[-1][-1] if n else 1


def invariant_factors_oracle(m: list[list[int]]) -> list[int]:
    """Determinantal divisors: d_k = gcd of k x k minors; invariants d_k / d_{k-1}."""
    rows, cols = len(m), len(m[0])
    out, prev = [], 1
    for k in range(1, min(rows, cols) + 1):
        g = 0
        for ri in itertools.combinations(range(rows), k):
            for ci in itertools.combinations(range(cols), k):
                g = math.gcd(g, bareiss_det([[m[i][j] for j in ci] for i in ri]))
        if g == 0:
            break
        out.append(g // prev)
        prev = g
    return out


def rank_mod_p_oracle(m: list[list[int]], p: int) -> int:
    a = [[x % p for x in row] for row in m]
    rank, cols = 0, len(a[0]) if a else 0
    for c in range(cols):
        piv = next((i for i in range(rank, len(a)) if a[i][c]), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        inv = pow(a[rank][c], -1, p)
        a[rank] = [x * inv % p for x in a[rank]]
        for i in range(len(a)):
            if i != rank and a[i][c]:
                f = a[i][c]
                a[i] = [(x - f * y) % p for x, y in zip(a[i], a[rank])]
        rank += 1
    return rank


@settings(max_examples=150, deadline=None)
@given(matrices)
def test_snf_reconstruction_and_oracle(m):
    u, d, v, ui, vi = smith_normal_form(m, with_inverses=True)
    U, D, V, A = (np.array(x, dtype=object) for x in (u, d, v, m))
    assert (U @ A @ V).tolist() == d
    assert (U @ np.array(ui, dtype=object)).tolist() == np.eye(len(u), dtype=int).tolist()
    assert (V @ np.array(vi, dtype=object)).tolist() == np.eye(len(v), dtype=int).tolist()
    diag = snf_diagonal(d)
    assert all(D[i, j] == 0 for i in range(len(d)) for j in range(len(d[0])) if i != j)
    nz = [x for x in diag if x]
    assert diag[:len(nz)] == nz and all(x > 0 for x in nz)
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))
    assert nz == invariant_factors_oracle(m)


@settings(max_examples=100, deadline=None)
@given(matrices, st.sampled_from([2, 3, 5]))
def test_rank_mod_p_against_dense_oracle(m, p):
    assert rank_mod_p(sp.csc_matrix(np.array(m, dtype=np.int64)), p) == rank_mod_p_oracle(m, p)


@settings(max_examples=100, deadline=None)
@given(matrices)
def test_integer_invariants_sparse_route(m):
    assert integer_invariants(sp.csc_matrix(np.array(m, dtype=np.int64))) == \
        invariant_factors_oracle(m)


def test_snf_known():
    _, d, _ = smith_normal_form([[2, 4, 4], [-6, 6, 12], [10, -4, -16]])
    assert snf_diagonal(d) == [2, 6, 12]


# -- simplicial complexes with known homology ---------------------------------

RP2 = [(0, 1, 2), (0, 2, 3), (0, 3, 4), (0, 4, 5), (0, 1, 5), (1, 2, 4), (2, 3, 5), (1, 3, 4),
       (1, 3, 5), (2, 4, 5)]


def closure(facets, n_vertices=None) -> SimplicialComplex:
    simp = set()
    for f in facets:
        for k in range(1, len(f) + 1):
            simp.update(itertools.combinations(sorted(f), k))
    n = n_vertices or (max(max(f) for f in facets) + 1)
    return SimplicialComplex(list(range(n)), simp)


def torus_facets():
    # 7-vertex Möbius-Császár torus
    return [tuple(sorted(((i + a) % 7, (i + b) % 7, (i + c) % 7)))
            for i in range(7) for a, b, c in [(0, 1, 3), (0, 2, 3)]]


@pytest.mark.parametrize("facets,p,betti,torsion", [
    (RP2, 0, {0: 1, 1: 0, 2: 0}, {0: [], 1: [2], 2: []}),
    (RP2, 2, {0: 1, 1: 1, 2: 1}, None),
    (RP2, 3, {0: 1, 1: 0, 2: 0}, None),
    ("torus", 0, {0: 1, 1: 2, 2: 1}, {0: [], 1: [], 2: []}),
    ([(0, 1, 2, 3)], 0, {0: 1, 1: 0, 2: 0, 3: 0}, None),
])
def test_known_surfaces(facets, p, betti, torsion):
    if facets == "torus":
        facets = torus_facets()
    h = homology(closure(facets).chain_complex(), p)
    assert h.betti == betti
    if torsion is not None:
        assert h.torsion == torsion


def test_sphere_boundary_of_tetrahedron():
    faces = list(itertools.combinations(range(4), 3))
    h = homology(closure(faces).chain_complex(reduced=True))
    assert h.betti == {-1: 0, 0: 0, 1: 0, 2: 1}


@pytest.mark.parametrize("facets", [RP2, "torus", [(0, 1, 2, 3)]])
@pytest.mark.parametrize("p", [2, 3, 5])
def test_universal_coefficients(facets, p):
    if facets == "torus":
        facets = torus_facets()
    c = closure(facets).chain_complex()
    assert all(uct_consistent(homology(c, 0), homology(c, p), p).values())


def test_relative_homology_disk_mod_boundary():
    c = closure([(0, 1, 2)]).chain_complex()
    # boundary circle: vertices and the three edges
    sub = {0: [0, 1, 2], 1: [0, 1, 2]}
    h = relative_homology(c, sub)
    assert h.betti == {0: 0, 1: 0, 2: 1}


def test_relative_rejects_non_subcomplex():
    c = closure([(0, 1, 2)]).chain_complex()
    with pytest.raises(ValueError):
        relative_homology(c, {1: [0]})


def test_d_squared_checked():
    b1 = sp.csc_matrix(np.array([[1], [1]]))
    b2 = sp.csc_matrix(np.array([[1]]))
    with pytest.raises(ValueError):
        ChainComplex([2, 1, 1], [None, b1, b2])


def test_induced_map_of_identity_and_presentation():
    c = closure(RP2).chain_complex()
    ident = {d: sp.identity(c.dim(d), dtype=np.int64, format="csc") for d in c.degrees}
    m = induced_map(c, c, ident, 1)
    assert m.source_invariants == [2]
    assert m.is_isomorphism()
    pres = homology_presentation(c, 1)
    assert pres.invariants == [2]
    # twice the generator is a boundary
    g = pres.generators[0]
    assert pres.coordinates([2 * x for x in g]) == [0]


def test_zero_map_is_not_isomorphism():
    c = closure(torus_facets()).chain_complex()
    zero = {d: sp.csc_matrix((c.dim(d), c.dim(d)), dtype=np.int64) for d in c.degrees}
    assert not induced_map(c, c, zero, 1).is_isomorphism()


@pytest.mark.parametrize("text,p", [("Z", 0), ("Fp:3", 3), ("F5", 5)])
def test_parse_coeff(text, p):
    assert parse_coeff(text) == p


@pytest.mark.parametrize("text", ["Fp:4", "Q", "Fp:x"])
def test_parse_coeff_rejects(text):
    with pytest.raises(ValueError):
        parse_coeff(text)
