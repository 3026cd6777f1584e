from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rbslab.flags_tits import (
    borel_pair_homology, check_flag_action, flag_data, flag_poset, is_concentrated,
    standard_flag, steinberg, steinberg_coinvariants, tits_complex, tits_homology, tits_report,
)
from rbslab.homology import uct_consistent
from rbslab.ring_linalg import act_on_summand, make_ring

CASES = [("F2", 2), ("F2", 3), ("F3", 2), ("F3", 3), ("F4", 2), ("Z4", 2), ("Z4", 3),
         ("F2[t]/t^2", 2), ("F2", 4)]


def reduced_euler_from_flags(spec: str, n: int) -> int:
    """Reduced Euler characteristic from flag counts alone: -1 + Σ (-1)^k #(k-simplices)."""
    fd = flag_data(make_ring(spec), n)
    return -1 + sum((-1) ** (len(ch) - 1) for ch in fd.chains[1:])


@pytest.mark.parametrize("spec,n", CASES)
def test_tits_concentrated_and_euler(spec, n):
    h = tits_homology(make_ring(spec), n)
    assert is_concentrated(h, n - 2)
    assert (-1) ** (n - 2) * h.betti[n - 2] == reduced_euler_from_flags(spec, n)


@pytest.mark.parametrize("q,n", [(2, 2), (2, 3), (3, 2), (3, 3), (4, 2), (2, 4)])
def test_steinberg_rank_over_fields(q, n):
    """Over F_q the top homology has rank q^(n choose 2)."""
    h = tits_homology(make_ring(f"F{q}"), n)
    assert h.betti[n - 2] == q ** (n * (n - 1) // 2)


@pytest.mark.parametrize("spec,n,vertices,edges", [
    ("F2", 3, 14, 21), ("F3", 3, 26, 52), ("Z4", 3, 56, 168), ("F2", 2, 3, None),
])
def test_tits_sizes(spec, n, vertices, edges):
    sc = tits_complex(make_ring(spec), n)
    assert len(sc.simplices_of_dim(0)) == vertices
    if edges is not None:
        assert len(sc.simplices_of_dim(1)) == edges


@pytest.mark.parametrize("spec,n", CASES[:7])
@pytest.mark.parametrize("p", [2, 3])
def test_tits_uct(spec, n, p):
    r = make_ring(spec)
    assert all(uct_consistent(tits_homology(r, n), tits_homology(r, n, p), p).values())


def test_rank_one():
    h = tits_homology(make_ring("F2"), 1)
    assert h.betti == {-1: 1}


@pytest.mark.parametrize("spec,n", [("F2", 2), ("F2", 3), ("Z4", 2), ("F3", 2)])
def test_flag_action_is_an_action(spec, n):
    check_flag_action(make_ring(spec), n)


@pytest.mark.parametrize("spec,n", [("F2", 3), ("Z4", 2)])
def test_flag_action_against_direct_matrix_action(spec, n):
    """BFS-built action tables agree with acting on summands directly."""
    r = make_ring(spec)
    fd = flag_data(r, n)
    grp = fd.group
    for g in range(0, len(grp), 7):
        for i, s in enumerate(fd.summands):
            assert fd.summands[fd.summand_action[g, i]] == act_on_summand(r, grp[g], s)


def test_flag_poset_order():
    r = make_ring("F2")
    p = flag_poset(r, 3)
    # 14 one-step flags and 21 complete flags; complete flags lie below two one-step flags
    assert len(p) == 35
    assert int(p.less.sum()) == 42


def test_standard_flag():
    fd = flag_data(make_ring("F2"), 3)
    f = standard_flag(3, (1, 2))
    assert f.graded_ranks() == (1, 1, 1)
    assert fd.flags[fd.flag_of(f)] == f


@settings(max_examples=25, deadline=None)
@given(st.data())
def test_steinberg_representation_is_multiplicative(data):
    spec, n = data.draw(st.sampled_from([("F2", 3), ("F3", 2), ("Z4", 2)]))
    p = data.draw(st.sampled_from([0, 2, 3]))
    r = make_ring(spec)
    st_ = steinberg(r, n, p)
    grp = flag_data(r, n).group
    a = data.draw(st.integers(0, len(grp) - 1))
    b = data.draw(st.integers(0, len(grp) - 1))
    lhs = st_.rho(grp.mul(a, b))
    rhs = st_.rho(a) @ st_.rho(b)
    if p:
        rhs = rhs % p
    assert np.array_equal(lhs, rhs)
    assert np.array_equal(st_.rho(grp.identity_index), np.eye(st_.rank, dtype=lhs.dtype))


@pytest.mark.parametrize("spec,n", [("F2", 2), ("F3", 2), ("F2", 3)])
@pytest.mark.parametrize("p", [0, 2, 3])
def test_coinvariants_generators_equal_all_elements(spec, n, p):
    r = make_ring(spec)
    assert steinberg_coinvariants(r, n, p) == steinberg_coinvariants(r, n, p, all_elements=True)


@pytest.mark.parametrize("spec,n", [("F2", 2), ("F3", 2), ("F2", 3), ("F4", 2), ("Z4", 2)])
def test_integral_coinvariants_vanish(spec, n):
    assert steinberg_coinvariants(make_ring(spec), n, 0) == (0, [])


@pytest.mark.parametrize("spec,n,p,d", [("F2", 2, 2, 3), ("F3", 2, 3, 3), ("Z4", 2, 2, 3),
                                        ("F2", 3, 2, 4)])
def test_borel_pair_trivial_group_is_suspension(spec, n, p, d):
    """With the trivial group the pair (cone, Tits complex) shifts homology by one."""
    r = make_ring(spec)
    rel = borel_pair_homology(r, n, p, d, group="trivial")
    tits = tits_homology(r, n, p)
    for k in range(d):
        assert rel.betti[k] == tits.betti.get(k - 1, 0)


def test_tits_report_payload():
    rep = tits_report(make_ring("F2"), 3)
    assert rep["vertices"] == 14
    assert rep["simplices"] == {"0": 14, "1": 21}
    assert rep["concentrated"] and rep["steinberg_rank"] == 8 and rep["top_degree"] == 1
    assert rep["free_equals_projective"]
