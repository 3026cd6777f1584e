"""Acceptance suite: ten numbered checks over the whole library.

Each check returns a :class:`CriterionResult`; :func:`run_all` runs them in
order.  Heavy homology computations are memoised per process so that the
checks sharing a computation (cofibre runs, vanishing line, coinvariants)
pay for it once.
"""

from __future__ import annotations

import functools
import itertools
import random
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .categories import (
    AUTO_NERVE_LIMIT, DEFAULT_CHAIN_CAP, TableGroup, build_resolution, group_category,
    nerve_chain_counts, nerve_truncated, random_category, resolution_is_complex, twisted_arrow,
)
from .flags_tits import flag_poset, is_concentrated, steinberg_coinvariants, tits_complex
from .homology import (
    ChainComplex, HomologyResult, homology, smith_normal_form, uct_consistent,
)
from .ordpm import (
    FilteredDimSeq, delta_to_ordpm, face_map, fred_hom, fred_objects, format_partition,
    order_maps, ordpm_morphisms, ordpm_to_delta, parse_context, parse_word, snug_partition,
)
from .rbs import (
    coinvariants_vs_relative, cofibre_check, coset_independence, e1_vanishing, h1_check,
    rbs_data, rbs_homology, stabilization_maps,
)
from .ring_linalg import CapExceeded, make_ring

# regression values (first computed by the brute-force routes, then frozen)
TITS_RANKS: dict[tuple[str, int], int] = {
    ("F2", 1): 1, ("F2", 2): 2, ("F2", 3): 8, ("F2", 4): 64,
    ("F3", 1): 1, ("F3", 2): 3, ("F3", 3): 27,
    ("F4", 2): 4,
    ("Z4", 1): 1, ("Z4", 2): 5, ("Z4", 3): 113,
    ("F2[t]/t^2", 2): 5,
}
MOD_P_VANISHING = [("F2", 2, 2, 5), ("F3", 2, 3, 3), ("F2", 3, 2, 3)]
COFIBRE_GRID = [("F2", 2, 2, 4), ("F2", 2, 3, 4), ("F3", 2, 2, 3), ("F3", 2, 3, 3),
                ("F2", 3, 2, 3)]
H1_EXPECTED = {2: [], 3: [2]}
SNUG_GOLDEN = [("123456", "(123)(45)(6)"), ("654321", "(6)(5)(4)(3)(2)(1)"),
               ("12423456", "(12)(4)(23)(45)(6)"), ("", "∅_∅")]
SNUG_CONTEXT = "1<2<3|4<5|6"


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    details: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} criterion {self.number:2d}: {self.name}"

    def to_json(self) -> dict:
        return {"number": self.number, "name": self.name, "passed": self.passed,
                "details": self.details}


# ---------------------------------------------------------------------------
# shared, memoised computations


@functools.lru_cache(maxsize=None)
def _rbs_fp(ring: str, n: int, p: int, d_max: int, cap: int) -> HomologyResult:
    return rbs_homology(make_ring(ring), n, p, d_max, cap=cap)


@functools.lru_cache(maxsize=None)
def _cofibre(ring: str, n: int, p: int, d_max: int, cap: int):
    return cofibre_check(make_ring(ring), n, p, d_max, cap=cap)


@functools.lru_cache(maxsize=None)
def _tits(ring: str, n: int) -> tuple[ChainComplex, HomologyResult]:
    c = tits_complex(make_ring(ring), n).chain_complex(reduced=True)
    return c, homology(c, 0)


@functools.lru_cache(maxsize=None)
def _h1(q: int, cap: int):
    return h1_check(make_ring(f"F{q}"), 2, cap=cap)


@functools.lru_cache(maxsize=None)
def _stabilization():
    return stabilization_maps(make_ring("F2"), 3)


def twisted_arrow_cases(cap: int = DEFAULT_CHAIN_CAP) -> list[tuple[str, object, int]]:
    """``(label, category, D)`` for the twisted arrow comparison."""
    cases = [("RBS(F2^2)", rbs_data(make_ring("F2"), 2).category, 4),
             ("flag poset F2^3", flag_poset(make_ring("F2"), 3).as_category(), 3),
             ("BZ/2", group_category(TableGroup.cyclic(2), "BZ/2"), 5)]
    return cases + [(c.name, c, 4) for c in random_categories(5)]


def random_categories(k: int, d_max: int = 4, max_chains: int = 20_000) -> list:
    """The first ``k`` random categories (by seed) with at least seven
    morphisms whose twisted arrow category has at most ``max_chains``
    nerve chains in degree ``d_max``."""
    out = []
    for seed in itertools.count():
        c = random_category(seed)
        if c is None or c.n_morphisms < 7:
            continue
        if nerve_chain_counts(twisted_arrow(c), d_max)[-1] > max_chains:
            continue
        out.append(c)
        if len(out) == k:
            return out
    raise AssertionError("unreachable")


def _nerve_or_skeleton(c, d: int, cap: int) -> tuple[str, ChainComplex]:
    """Full nerve when it is small enough, otherwise the nerve of a skeleton
    (an equivalent category, hence a homotopy equivalent nerve)."""
    if nerve_chain_counts(c, d)[-1] <= AUTO_NERVE_LIMIT:
        return "nerve", nerve_truncated(c, d, cap)
    return "skeleton-nerve", nerve_truncated(c.skeleton(), d, cap)


@functools.lru_cache(maxsize=None)
def _tw_pairs(cap: int) -> tuple:
    out = []
    for label, c, d in twisted_arrow_cases(cap):
        ra, a = _nerve_or_skeleton(c, d, cap)
        rb, b = _nerve_or_skeleton(twisted_arrow(c), d, cap)
        out.append((label, d, a, b, homology(a, 0), homology(b, 0), (ra, rb)))
    return tuple(out)


def _hom_table(h: HomologyResult) -> dict:
    return {str(d): h.group_str(d) for d in h.degrees if h.reliable(d)}


# ---------------------------------------------------------------------------
# criteria


def criterion_1(cap: int = DEFAULT_CHAIN_CAP) -> tuple[bool, dict]:
    details, ok = {}, True
    for ring, n, p, d in MOD_P_VANISHING:
        h = _rbs_fp(ring, n, p, d, cap)
        want = range(1, d)
        good = h.betti[0] == 1 and all(h.reliable(k) and h.betti[k] == 0 for k in want)
        ok &= good
        details[f"{ring} n={n} F{p} D={d}"] = {"homology": _hom_table(h), "method": h.method,
                                                "ok": good}
    return ok, details


def criterion_2(cap: int = DEFAULT_CHAIN_CAP) -> tuple[bool, dict]:
    details, ok = {}, True
    for (ring, n), want in TITS_RANKS.items():
        _, h = _tits(ring, n)
        top = n - 2
        conc = is_concentrated(h, top)
        rank = h.betti.get(top, 0)
        good = conc and rank == want
        ok &= good
        details[f"{ring} n={n}"] = {"degree": top, "rank": rank, "expected": want,
                                    "concentrated_free": conc, "ok": good}
    return ok, details


def criterion_3(cap: int = DEFAULT_CHAIN_CAP) -> tuple[bool, dict]:
    details, ok = {}, True
    for ring, n, p, d in COFIBRE_GRID:
        r = _cofibre(ring, n, p, d, cap)
        ok &= r.equal
        details[f"{ring} n={n} F{p} D={d}"] = {
            "relative": {k: r.rbs.betti[k] for k in sorted(r.agree)},
            "borel": {k: r.borel.betti[k] for k in sorted(r.agree)},
            "verdict": "equal" if r.equal else "different"}
    return ok, details


def criterion_4(cap: int = DEFAULT_CHAIN_CAP) -> tuple[bool, dict]:
    details, ok = {}, True
    for ring, n, p, d in COFIBRE_GRID:
        if (ring, n) not in {("F2", 2), ("F2", 3), ("F3", 2)}:
            continue
        h = _cofibre(ring, n, p, d, cap).rbs
        van = e1_vanishing(h, n)
        # every degree below n - 1 must be reliable and zero
        good = set(van) == set(range(0, n - 1)) and all(van.values())
        ok &= good
        details[f"{ring} n={n} F{p}"] = {str(k): v for k, v in van.items()} | {"ok": good}
    return ok, details


def criterion_5(cap: int = DEFAULT_CHAIN_CAP) -> tuple[bool, dict]:
    details, ok = {}, True
    for q, n in [(2, 2), (3, 2), (2, 3)]:
        ring = make_ring(f"F{q}")
        rank, tors = steinberg_coinvariants(ring, n, 0)
        good = rank == 0 and tors == []
        cross = {}
        for spec, m, p, d in COFIBRE_GRID:
            if (spec, m) == (f"F{q}", n):
                h = _cofibre(spec, m, p, d, cap).rbs
                cross[f"F{p}"] = coinvariants_vs_relative(ring, n, h)
        good = good and bool(cross) and all(cross.values())
        ok &= good
        details[f"F{q} n={n}"] = {"Z_rank": rank, "Z_torsion": tors,
                                  "matches_relative": cross, "ok": good}
    return ok, details


def criterion_6(cap: int = DEFAULT_CHAIN_CAP) -> tuple[bool, dict]:
    details, ok = {}, True
    for q, want in H1_EXPECTED.items():
        r = _h1(q, cap)
        good = r.agree and r.elementary_in_e and r.nerve_invariants == want
        ok &= good
        details[f"F{q}"] = r.to_json() | {"expected": want, "ok": good}
    return ok, details


def criterion_7(cap: int = DEFAULT_CHAIN_CAP) -> tuple[bool, dict]:
    details, ok = {}, True
    for label, d, _, _, ha, hb, routes in _tw_pairs(cap):
        degs = range(d)
        good = all(ha.betti[k] == hb.betti[k] and ha.torsion[k] == hb.torsion[k] for k in degs)
        ok &= good
        details[label] = {"D": d, "routes": list(routes), "category": _hom_table(ha), "twisted": _hom_table(hb),
                          "ok": good}
    return ok, details


def ordpm_roundtrip(max_size: int = 4) -> dict:
    """Exhaustive check of the equivalence between the opposite simplex
    category and Ord±, together with functoriality."""
    bad, checked = 0, 0
    for m in range(max_size + 1):
        for n in range(max_size + 1):
            for theta in order_maps(m, n):
                checked += 1
                if ordpm_to_delta(delta_to_ordpm(theta, n)) != tuple(theta):
                    bad += 1
            for alpha in ordpm_morphisms(m, n):
                checked += 1
                if delta_to_ordpm(ordpm_to_delta(alpha), m) != alpha:
                    bad += 1
    # contravariant functoriality on composable pairs
    for a, b, c in itertools.product(range(max_size + 1), repeat=3):
        for theta in order_maps(a, b):
            for psi in order_maps(b, c):
                checked += 1
                lhs = delta_to_ordpm(tuple(psi[t] for t in theta), c)
                rhs = delta_to_ordpm(theta, b).compose(delta_to_ordpm(psi, c))
                if lhs != rhs:
                    bad += 1
    return {"checked": checked, "mismatches": bad}


def criterion_8(cap: int = DEFAULT_CHAIN_CAP) -> tuple[bool, dict]:
    rt = ordpm_roundtrip(4)
    faces = all(face_map(n, i) == delta_to_ordpm((i - 1, i), n)
                for n in range(1, 5) for i in range(1, n + 1))
    golden_face = face_map(4, 2).values == (0, 1, 2, 2)
    ctx = parse_context(SNUG_CONTEXT)
    snug = {w: format_partition(snug_partition(ctx, parse_word(w, ctx))) for w, _ in SNUG_GOLDEN}
    snug_ok = all(snug[w] == want for w, want in SNUG_GOLDEN)
    ok = rt["mismatches"] == 0 and faces and golden_face and snug_ok
    return ok, {"roundtrip": rt, "face_maps": faces and golden_face, "snug": snug}


def criterion_9(cap: int = DEFAULT_CHAIN_CAP) -> tuple[bool, dict]:
    r = _stabilization()
    iso = r.isomorphisms
    zero_h1 = r.maps[1]["source"] == [] and r.maps[1]["target"] == []
    ok = r.lands_in_boundary and r.pairs_checked > 0 and iso.get(0, False) and \
        iso.get(1, False) and zero_h1
    return ok, r.to_json()


def _random_matrix(rng: random.Random) -> list[list[int]]:
    r, c = rng.randint(1, 8), rng.randint(1, 8)
    return [[rng.randint(-6, 6) if rng.random() < 0.6 else 0 for _ in range(c)] for _ in range(r)]


def snf_reconstruction(count: int = 100, seed: int = 0) -> int:
    """Number of random matrices with ``U A V = D`` failing (expected 0)."""
    rng = random.Random(seed)
    fails = 0
    for _ in range(count):
        a = _random_matrix(rng)
        u, d, v, ui, vi = smith_normal_form(a, with_inverses=True)
        obj = lambda x: np.array(x, dtype=object)  # noqa: E731
        prod = (obj(u) @ obj(a) @ obj(v)).tolist()
        unimodular = (obj(u) @ obj(ui)).tolist() == np.eye(len(u), dtype=int).tolist() and \
            (obj(v) @ obj(vi)).tolist() == np.eye(len(v), dtype=int).tolist()
        diag = [d[i][i] for i in range(min(len(d), len(d[0])))]
        off = any(d[i][j] for i in range(len(d)) for j in range(len(d[0])) if i != j)
        nz = [x for x in diag if x]
        divides = all(y % x == 0 for x, y in zip(nz, nz[1:])) and diag[:len(nz)] == nz
        if prod != d or not unimodular or off or not divides or any(x < 0 for x in diag):
            fails += 1
    return fails


def fred_poset_violations(max_total: int = 5) -> tuple[int, int]:
    """``(pairs checked, pairs with more than one morphism)``."""
    objs: list[FilteredDimSeq] = [o for t in range(1, max_total + 1) for o in fred_objects(t)]
    checked = bad = 0
    for a in objs:
        for b in objs:
            if a.total != b.total:
                continue
            checked += 1
            if len(fred_hom(a, b)) > 1:
                bad += 1
    return checked, bad


def criterion_10(cap: int = DEFAULT_CHAIN_CAP) -> tuple[bool, dict]:
    details: dict = {}
    # d^2 = 0 on the complexes of the suite
    complexes: list[tuple[str, ChainComplex]] = []
    for ring, n in TITS_RANKS:
        complexes.append((f"tits {ring} n={n}", _tits(ring, n)[0]))
    for label, d, a, b, _, _, _ in _tw_pairs(cap):
        complexes += [(f"nerve {label}", a), (f"nerve Tw {label}", b)]
    complexes.append(("nerve RBS(F2^2) D=5", nerve_truncated(rbs_data(make_ring("F2"), 2)
                                                             .category, 5, cap)))
    d2_fail = []
    for label, c in complexes:
        try:
            c.check_d_squared()
        except ValueError:
            d2_fail.append(label)
    res_fail = []
    for ring, n, p, d in MOD_P_VANISHING:
        data = rbs_data(make_ring(ring), n)
        sk = data.category.skeleton(data.standard_representatives())
        if not resolution_is_complex(sk, build_resolution(sk, p, d, cap)):
            res_fail.append(f"{ring} n={n} F{p}")
    details["d_squared"] = {"complexes": len(complexes), "resolutions": len(MOD_P_VANISHING),
                            "failures": d2_fail + res_fail}
    snf_fails = snf_reconstruction(100)
    details["snf"] = {"matrices": 100, "failures": snf_fails}
    # universal coefficients on every integral homology of the suite
    uct_fail = []
    uct_cases: list[tuple[str, ChainComplex, HomologyResult]] = []
    uct_cases += [(f"tits {r} n={n}", *_tits(r, n)) for r, n in TITS_RANKS]
    for label, d, a, b, ha, hb, _ in _tw_pairs(cap):
        uct_cases += [(f"nerve {label}", a, ha), (f"nerve Tw {label}", b, hb)]
    for label, c, hz in uct_cases:
        for p in (2, 3):
            if not all(uct_consistent(hz, homology(c, p), p).values()):
                uct_fail.append(f"{label} p={p}")
    for q in H1_EXPECTED:
        hz = _h1(q, cap).nerve_side
        for p in (2, 3):
            hp = rbs_homology(make_ring(f"F{q}"), 2, p, 2, method="nerve", cap=cap)
            if not all(uct_consistent(hz, hp, p).values()):
                uct_fail.append(f"H1 RBS(F{q}^2) p={p}")
    details["uct"] = {"cases": 2 * len(uct_cases) + 2 * len(H1_EXPECTED), "failures": uct_fail}
    coset = {f"F{q}": coset_independence(make_ring(f"F{q}"), 2) for q in (2, 3)}
    details["coset_independence"] = coset
    pairs, bad = fred_poset_violations(5)
    details["fred_poset"] = {"pairs": pairs, "violations": bad}
    ok = not d2_fail and not res_fail and snf_fails == 0 and not uct_fail and bad == 0 and \
        all(v > 0 for v in coset.values())
    return ok, details


CRITERIA: list[tuple[int, str, Callable[[int], tuple[bool, dict]]]] = [
    (1, "mod-p vanishing of RBS homology", criterion_1),
    (2, "Tits complexes concentrated in degree n-2", criterion_2),
    (3, "cofibre comparison with the Borel pair", criterion_3),
    (4, "relative homology vanishes below n-1", criterion_4),
    (5, "Steinberg coinvariants vanish", criterion_5),
    (6, "H1 of RBS against (GL/E)^ab", criterion_6),
    (7, "twisted arrow invariance", criterion_7),
    (8, "golden combinatorics", criterion_8),
    (9, "stabilization functor", criterion_9),
    (10, "property suites", criterion_10),
]


def run_criterion(number: int, cap: int = DEFAULT_CHAIN_CAP) -> CriterionResult:
    _, name, fn = CRITERIA[number - 1]
    t = time.perf_counter()
    try:
        ok, details = fn(cap)
    except CapExceeded as e:
        ok, details = False, {"error": "cap exceeded", "job": e.what, "needed": e.needed,
                              "cap": e.cap, "degree": e.degree}
    return CriterionResult(number, name, bool(ok), details, time.perf_counter() - t)


def run_all(cap: int = DEFAULT_CHAIN_CAP, numbers=None) -> list[CriterionResult]:
    return [run_criterion(k, cap) for k in (numbers or range(1, len(CRITERIA) + 1))]


def clear_caches() -> None:
    for f in (_rbs_fp, _cofibre, _tits, _h1, _stabilization, _tw_pairs):
        f.cache_clear()
