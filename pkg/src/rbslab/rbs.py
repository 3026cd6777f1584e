"""Reductive Borel-Serre categories of free modules over finite local rings.

Flag model: objects are splittable flags ``F`` of ``R^n`` (trivial flag
first), and ``Hom(F, G)`` is the set of cosets ``g U_F`` with ``g F <= G``.
A coset is stored by its smallest group index, so each morphism is the
triple ``(F, G, rep)``.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .categories import (DEFAULT_CHAIN_CAP, CategoryError, FinCategory, Functor, category_homology,
                         functor_chain_map, nerve_chain_counts)
from .flags_tits import (FlagData, borel_pair_homology, flag_data, standard_flag,
                         steinberg_coinvariants)
from .homology import HomologyResult, induced_map
from .ring_linalg import MatrixGroup, Ring, Summand, block_diag, enumerate_gl

# ---------------------------------------------------------------------------
# unipotent radicals and cosets


def _in_summand_batch(ring: Ring, s: Summand | None, w: np.ndarray) -> np.ndarray:
    """Row mask: which rows of ``w`` lie in ``s`` (``None`` is the zero module)."""
    if s is None:
        return ~w.any(axis=1)
    add, mul = ring.add_table, ring.mul_table
    recon = np.zeros_like(w)
    for row, c in zip(s.basis, s.pivots()):
        recon = add[recon, mul[w[:, c][:, None], np.asarray(row)[None, :]]]
    return (recon == w).all(axis=1)


def unipotent_indices(fd: FlagData, chain: tuple[int, ...]) -> np.ndarray:
    """Group indices of ``U_F``: ``(g - 1) M_i ⊆ M_{i-1}`` for every step."""
    ring, grp = fd.ring, fd.group
    mats = grp._array
    mods: list[Summand | None] = [None] + [fd.summands[i] for i in chain]
    eye = ring.identity(fd.n)
    tops = mods[1:] + [Summand(fd.n, eye)]
    mask = np.ones(len(grp), dtype=bool)
    for lower, upper in zip(mods, tops):
        for v in upper.basis:
            gv = ring.batch_matmul(mats, np.asarray(v)[None, :, None])[:, :, 0]
            w = ring.add_table[gv, ring.neg_table[np.asarray(v)][None, :]]
            mask &= _in_summand_batch(ring, lower, w)
    return np.flatnonzero(mask)


def coset_minima(grp: MatrixGroup, sub: np.ndarray) -> np.ndarray:
    """``out[g]`` is the smallest index in the left coset ``g·sub``."""
    out = np.full(len(grp), -1, dtype=np.int64)
    sub_mats = grp._array[sub]
    for g in range(len(grp)):
        if out[g] >= 0:
            continue
        prods = grp.ring.batch_matmul(grp._array[g][None], sub_mats)
        members = grp._lookup(grp._encode_stack(prods))
        out[members] = members.min()
    return out


# ---------------------------------------------------------------------------
# the category


class RBSData:
    """Flag-model RBS category of ``R^n`` with its group-theoretic data."""

    def __init__(self, ring: Ring, n: int):
        self.ring = ring
        self.n = n
        self.fd = fd = flag_data(ring, n)
        grp = fd.group
        self.unipotent = [unipotent_indices(fd, ch) for ch in fd.chains]
        self.coset_rep = [coset_minima(grp, u) for u in self.unipotent]
        act = fd.flag_action
        subsets: list[list[int]] = []
        for ch in fd.chains:
            subsets.append(sorted(fd.flag_index[sub] for k in range(len(ch) + 1)
                                  for sub in itertools.combinations(ch, k)))
        morphs: list[tuple[int, int, int]] = []
        for f in range(len(fd.chains)):
            for r in np.unique(self.coset_rep[f]):
                for g in subsets[int(act[r, f])]:
                    morphs.append((f, g, int(r)))
        morphs.sort()
        self.morphs = morphs
        self.index = {m: i for i, m in enumerate(morphs)}
        e = grp.identity_index
        idents = [self.index[(f, f, int(self.coset_rep[f][e]))] for f in range(len(fd.chains))]

        def comp(a: int, b: int) -> int:
            _, h_tgt, h = morphs[a]
            f, _, g = morphs[b]
            return self.index[(f, h_tgt, int(self.coset_rep[f][grp.mul(h, g)]))]

        self.category = FinCategory(fd.flags, [m[0] for m in morphs], [m[1] for m in morphs],
                                    idents, comp, morph_labels=morphs,
                                    name=f"RBS({ring.label}^{n})", validate=False)

    def standard_representatives(self) -> list[int]:
        """Object index of the standard flag of each type (one per isomorphism class)."""
        out = []
        for comp in compositions(self.n):
            ranks = tuple(itertools.accumulate(comp))[:-1]
            out.append(self.fd.flag_of(standard_flag(self.n, ranks)))
        return sorted(out)

    def nontrivial_objects(self) -> list[int]:
        return list(range(1, len(self.fd.chains)))


_RBS_CACHE: dict[tuple[str, int], RBSData] = {}


def rbs_data(ring: Ring, n: int) -> RBSData:
    key = (ring.label, n)
    if key not in _RBS_CACHE:
        _RBS_CACHE[key] = RBSData(ring, n)
    return _RBS_CACHE[key]


def rbs_category(ring: Ring, n: int) -> FinCategory:
    return rbs_data(ring, n).category


def boundary_rbs(c: FinCategory) -> FinCategory:
    """Full subcategory on the nontrivial flags."""
    keep = [x for x, f in enumerate(c.objects) if not f.is_trivial]
    return c.full_subcategory(keep, name=f"∂{c.name}")


def rank_truncation(ring: Ring, n: int, k: int) -> FinCategory:
    """Full subcategory on flags whose graded pieces all have rank ``<= k``."""
    if not 0 <= k <= n:
        raise ValueError("need 0 <= k <= n")
    c = rbs_category(ring, n)
    keep = [x for x, f in enumerate(c.objects) if max(f.graded_ranks()) <= k]
    return c.full_subcategory(keep, name=f"∂_{k}{c.name}")


def compositions(n: int) -> list[tuple[int, ...]]:
    """Ordered compositions of ``n`` into positive parts."""
    out = []
    for cuts in itertools.product([False, True], repeat=n - 1):
        parts, cur = [], 1
        for c in cuts:
            if c:
                parts.append(cur)
                cur = 1
            else:
                cur += 1
        parts.append(cur)
        out.append(tuple(parts))
    return sorted(out)


# ---------------------------------------------------------------------------
# homology


def rbs_homology(ring: Ring, n: int, p: int, d_max: int, method: str = "auto",
                 cap: int = DEFAULT_CHAIN_CAP) -> HomologyResult:
    data = rbs_data(ring, n)
    return category_homology(data.category, p, d_max, method=method,
                             representatives=data.standard_representatives(), cap=cap)


def rbs_relative_homology(ring: Ring, n: int, p: int, d_max: int, method: str = "auto",
                          cap: int = DEFAULT_CHAIN_CAP) -> HomologyResult:
    """Homology of the nerve of RBS relative to that of its boundary."""
    data = rbs_data(ring, n)
    return category_homology(data.category, p, d_max, data.nontrivial_objects(), method=method,
                             representatives=data.standard_representatives(), cap=cap)


@dataclass
class CofibreReport:
    ring: str
    n: int
    p: int
    d_max: int
    rbs: HomologyResult
    borel: HomologyResult
    agree: dict[int, bool] = field(default_factory=dict)

    @property
    def equal(self) -> bool:
        return bool(self.agree) and all(self.agree.values())

    def to_json(self) -> dict:
        return {"ring": self.ring, "rank": self.n, "p": self.p, "max_degree": self.d_max,
                "rbs_relative": self.rbs.to_json(), "borel_pair": self.borel.to_json(),
                "agree": {str(d): v for d, v in sorted(self.agree.items())},
                "verdict": "equal" if self.equal else "different"}


def cofibre_check(ring: Ring, n: int, p: int, d_max: int, method: str = "auto",
                  cap: int = DEFAULT_CHAIN_CAP) -> CofibreReport:
    """Compare RBS relative to its boundary with the Borel pair of the flag poset."""
    a = rbs_relative_homology(ring, n, p, d_max, method, cap)
    b = borel_pair_homology(ring, n, p, d_max, method, cap=cap)
    agree = {d: a.betti[d] == b.betti[d] and a.torsion.get(d, []) == b.torsion.get(d, [])
             for d in a.degrees if a.reliable(d) and b.reliable(d)}
    return CofibreReport(ring.label, n, p, d_max, a, b, agree)


# ---------------------------------------------------------------------------
# stabilization


def _pad(s: Summand) -> Summand:
    return Summand(s.n + 1, tuple(row + (0,) for row in s.basis))


def stabilization_functor(ring: Ring, n: int, validate: bool = True) -> Functor:
    """``RBS(R^{n-1}) -> RBS(R^n)``: append ``R^{n-1} ⊂ R^n``, ``g ↦ g ⊕ 1``."""
    if n < 2:
        raise ValueError("stabilization needs n >= 2")
    a, b = rbs_data(ring, n - 1), rbs_data(ring, n)
    top = Summand(n, ring.identity(n)[: n - 1])
    bfd = b.fd
    obj_map = []
    for ch in a.fd.chains:
        img = tuple(bfd.summand_index[_pad(a.fd.summands[i])] for i in ch)
        obj_map.append(bfd.flag_index[img + (bfd.summand_index[top],)])
    one = ((1,),)
    stab = [b.fd.group.index_of(block_diag(ring, g, one)) for g in a.fd.group]
    mor_map = []
    for f, g, r in a.morphs:
        fi = obj_map[f]
        mor_map.append(b.index[(fi, obj_map[g], int(b.coset_rep[fi][stab[r]]))])
    return Functor(a.category, b.category, obj_map, mor_map, validate=validate)


@dataclass
class StabilizationReport:
    n: int
    lands_in_boundary: bool
    pairs_checked: int
    maps: dict[int, dict]

    @property
    def isomorphisms(self) -> dict[int, bool]:
        return {d: m["isomorphism"] for d, m in self.maps.items()}

    def to_json(self) -> dict:
        return {"rank": self.n, "lands_in_boundary": self.lands_in_boundary,
                "pairs_checked": self.pairs_checked,
                "maps": {str(d): m for d, m in sorted(self.maps.items())}}


def stabilization_maps(ring: Ring, n: int, degrees: tuple[int, ...] = (0, 1)) -> StabilizationReport:
    """Integral maps ``H_d(RBS(R^{n-1})) -> H_d(RBS(R^n))``.

    Computed on the skeleta of standard flags, which the functor preserves.
    """
    f = stabilization_functor(ring, n)
    pairs = f.validate()
    lands = all(not f.target.objects[x].is_trivial for x in f.obj_map)
    a, b = rbs_data(ring, n - 1), rbs_data(ring, n)
    sa = a.category.full_subcategory(a.standard_representatives())
    sb = b.category.full_subcategory(b.standard_representatives())
    fs = f.restrict(sa, sb)
    d_max = max(degrees) + 1
    src, tgt, chain = functor_chain_map(fs, d_max)
    maps = {}
    for d in degrees:
        m = induced_map(src, tgt, chain, d)
        maps[d] = {"source": m.source_invariants, "target": m.target_invariants,
                   "matrix": [list(map(int, col)) for col in m.matrix],
                   "isomorphism": m.is_isomorphism()}
    return StabilizationReport(n, lands, pairs, maps)


# ---------------------------------------------------------------------------
# list model


class ListModel:
    """Skeletal list model: objects are compositions ``b`` of ``n`` (standing
    for ``(R^{b_1}, ..., R^{b_d})``).

    A morphism ``b -> c`` is an order preserving surjection ``θ`` with
    ``c_j = Σ_{θ(i)=j} b_i`` together with, for each ``j``, a coset
    ``x_j U`` in ``GL_{c_j}`` for the standard flag of type ``(b_i)_{θ(i)=j}``.
    """

    def __init__(self, ring: Ring, n: int):
        self.ring = ring
        self.n = n
        self.groups = {k: enumerate_gl(ring, k) for k in range(1, n + 1)}
        self._reps: dict[tuple[int, ...], np.ndarray] = {}
        self.objects = compositions(n)
        morphs: list[tuple] = []
        for bi, b in enumerate(self.objects):
            for ci, c in enumerate(self.objects):
                for theta in self.surjections(b, c):
                    blocks = self.blocks(b, theta, len(c))
                    choices = [np.unique(self.coset_table(blk)).tolist() for blk in blocks]
                    for xs in itertools.product(*choices):
                        morphs.append((bi, ci, theta, tuple(int(x) for x in xs)))
        morphs.sort()
        self.morphs = morphs
        self.index = {m: i for i, m in enumerate(morphs)}
        idents = []
        for bi, b in enumerate(self.objects):
            theta = tuple(range(len(b)))
            xs = tuple(int(self.coset_table((k,))[self.groups[k].identity_index]) for k in b)
            idents.append(self.index[(bi, bi, theta, xs)])
        self.category = FinCategory(self.objects, [m[0] for m in morphs], [m[1] for m in morphs],
                                    idents, self._compose, morph_labels=morphs,
                                    name=f"List({ring.label}^{n})", validate=False)

    @staticmethod
    def surjections(b: tuple[int, ...], c: tuple[int, ...]) -> list[tuple[int, ...]]:
        """Order preserving surjections merging consecutive parts of ``b`` into ``c``."""
        out = []
        for cuts in itertools.combinations(range(1, len(b)), len(c) - 1):
            bounds = (0,) + cuts + (len(b),)
            if all(sum(b[bounds[j]:bounds[j + 1]]) == c[j] for j in range(len(c))):
                theta = tuple(j for j in range(len(c)) for _ in range(bounds[j], bounds[j + 1]))
                out.append(theta)
        return out

    @staticmethod
    def blocks(b: tuple[int, ...], theta: tuple[int, ...], m: int) -> list[tuple[int, ...]]:
        return [tuple(b[i] for i in range(len(b)) if theta[i] == j) for j in range(m)]

    def coset_table(self, block: tuple[int, ...]) -> np.ndarray:
        """Coset minima in ``GL_{sum(block)}`` for the standard unipotent of ``block``."""
        tab = self._reps.get(block)
        if tab is None:
            k = sum(block)
            grp = self.groups[k]
            fd = flag_data(self.ring, k)
            ranks = tuple(itertools.accumulate(block))[:-1]
            chain = fd.chains[fd.flag_of(standard_flag(k, ranks))]
            tab = coset_minima(grp, unipotent_indices(fd, chain))
            self._reps[block] = tab
        return tab

    def _compose(self, u: int, v: int) -> int:
        _, ei, psi, ys = self.morphs[u]
        bi, ci, theta, xs = self.morphs[v]
        b, c = self.objects[bi], self.objects[ci]
        e = self.objects[ei]
        comp = tuple(psi[t] for t in theta)
        new = []
        for k in range(len(e)):
            js = [j for j in range(len(c)) if psi[j] == k]
            grp = self.groups[e[k]]
            inner = block_diag(self.ring, *(self.groups[c[j]][xs[j]] for j in js))
            prod = grp.index_of(self.ring.matmul(grp[ys[k]], inner))
            blk = tuple(b[i] for i in range(len(b)) if comp[i] == k)
            new.append(int(self.coset_table(blk)[prod]))
        return self.index[(bi, ei, comp, tuple(new))]


@dataclass
class ListModelReport:
    n: int
    essentially_surjective: bool
    fully_faithful: bool
    hom_counts_match: bool
    flag_morphisms: int
    list_morphisms: int

    @property
    def equivalence(self) -> bool:
        return self.essentially_surjective and self.fully_faithful and self.hom_counts_match

    def to_json(self) -> dict:
        return {"rank": self.n, "essentially_surjective": self.essentially_surjective,
                "fully_faithful": self.fully_faithful, "hom_counts_match": self.hom_counts_match,
                "flag_morphisms": self.flag_morphisms, "list_morphisms": self.list_morphisms,
                "equivalence": self.equivalence}


def _block_upper(x, c: tuple[int, ...]) -> bool:
    off = list(itertools.accumulate((0,) + c))
    for j in range(len(c)):
        for i in range(off[j + 1], len(x)):
            if any(x[i][off[j]:off[j + 1]]):
                return False
    return True


def associated_graded_functor(ring: Ring, n: int) -> tuple[Functor, ListModel]:
    """``gr``: a flag goes to its graded ranks; ``g: F -> G`` goes to the diagonal
    blocks of ``h_G^{-1} g h_F`` where ``h_F`` carries the standard flag to ``F``."""
    data = rbs_data(ring, n)
    fd = data.fd
    grp = fd.group
    lm = ListModel(ring, n)
    obj_index = {b: i for i, b in enumerate(lm.objects)}
    obj_map = [obj_index[f.graded_ranks()] for f in fd.flags]
    std = [fd.flag_of(standard_flag(n, tuple(itertools.accumulate(f.graded_ranks()))[:-1]))
           for f in fd.flags]
    act = fd.flag_action
    carrier = []
    for x in range(len(fd.flags)):
        hits = np.flatnonzero(act[:, std[x]] == x)
        carrier.append(int(hits[0]))
    mor_map = []
    for f, g, r in data.morphs:
        b, c = fd.flags[f].graded_ranks(), fd.flags[g].graded_ranks()
        x = ring.matmul(ring.matmul(grp.inverse_matrix(carrier[g]), grp[r]), grp[carrier[f]])
        if not _block_upper(x, c):
            raise CategoryError("conjugated representative is not block upper triangular")
        theta = _theta_for(fd, f, g)
        off = list(itertools.accumulate((0,) + c))
        xs = []
        for j in range(len(c)):
            blk = tuple(row[off[j]:off[j + 1]] for row in x[off[j]:off[j + 1]])
            sub = lm.blocks(b, theta, len(c))[j]
            xs.append(int(lm.coset_table(sub)[lm.groups[c[j]].index_of(blk)]))
        mor_map.append(lm.index[(obj_map[f], obj_map[g], theta, tuple(xs))])
    return Functor(data.category, lm.category, obj_map, mor_map, validate=True), lm


def _theta_for(fd: FlagData, f: int, g: int) -> tuple[int, ...]:
    """Block of ``gr(G)`` containing each graded piece of a flag of type ``F``
    refining one of type ``G`` (determined by the rank sequences)."""
    rf = fd.flags[f].ranks() + (fd.n,)
    rg = fd.flags[g].ranks() + (fd.n,)
    return tuple(next(j for j, t in enumerate(rg) if t >= r) for r in rf)


def list_model_check(ring: Ring, n: int) -> ListModelReport:
    """Verify that ``gr`` is an equivalence onto the skeletal list model."""
    fun, lm = associated_graded_functor(ring, n)
    src, tgt = fun.source, fun.target
    ess = set(fun.obj_map) == set(range(tgt.n_objects))
    ff = True
    counts = True
    for x in range(src.n_objects):
        for y in range(src.n_objects):
            hs = src.homset(x, y)
            ht = tgt.homset(fun.obj_map[x], fun.obj_map[y])
            img = {fun.mor_map[m] for m in hs}
            if len(hs) != len(ht):
                counts = False
            if len(img) != len(hs) or img != set(ht):
                ff = False
    return ListModelReport(n, ess, ff, counts, src.n_morphisms, tgt.n_morphisms)


# ---------------------------------------------------------------------------
# group-theoretic checks


def generated_subgroup(grp: MatrixGroup, gens) -> np.ndarray:
    """Indices of the subgroup generated by ``gens`` (closure under products)."""
    gens = sorted({int(g) for g in gens})
    inside = np.zeros(len(grp), dtype=bool)
    inside[grp.identity_index] = True
    frontier = [grp.identity_index]
    while frontier:
        nxt = []
        for s in gens:
            row = grp.mul_row(s)
            for h in frontier:
                sh = int(row[h])
                if not inside[sh]:
                    inside[sh] = True
                    nxt.append(sh)
        frontier = nxt
    return np.flatnonzero(inside)


def e_subgroup(ring: Ring, n: int) -> np.ndarray:
    """Subgroup generated by all ``U_F``."""
    data = rbs_data(ring, n)
    gens = set()
    for u in data.unipotent[1:]:
        gens.update(int(x) for x in u)
    return generated_subgroup(data.fd.group, gens)


def elementary_subgroup(ring: Ring, n: int) -> np.ndarray:
    """``E_n(R)``: generated by the elementary matrices ``1 + a e_ij``."""
    grp = flag_data(ring, n).group
    gens = []
    for i, j in itertools.permutations(range(n), 2):
        for a in range(1, ring.size):
            m = [[int(r == s) for s in range(n)] for r in range(n)]
            m[i][j] = a
            gens.append(grp.index_of(tuple(map(tuple, m))))
    return generated_subgroup(grp, gens)


def abelian_invariants_from_orders(order_counts: Counter) -> list[int]:
    """Invariant factors of a finite abelian group from its element-order counts."""
    size = sum(order_counts.values())
    primes = [q for q in range(2, size + 1) if size % q == 0 and all(q % r for r in range(2, q))]
    elementary: list[list[int]] = []
    for q in primes:
        # |A[q^k]| = q^(sum_i min(k, e_i))
        logs = [0]
        k = 1
        while True:
            cnt = sum(c for o, c in order_counts.items() if (q ** k) % o == 0)
            logs.append(round(math.log(cnt, q)))
            if logs[-1] == logs[-2]:
                break
            k += 1
        # number of cyclic factors with exponent >= k is logs[k] - logs[k-1]
        ge = [logs[k] - logs[k - 1] for k in range(1, len(logs))]
        exps = []
        for k in range(len(ge)):
            nxt = ge[k + 1] if k + 1 < len(ge) else 0
            exps += [k + 1] * (ge[k] - nxt)
        elementary.append(sorted((q ** e for e in exps), reverse=True))
    width = max((len(x) for x in elementary), default=0)
    inv = []
    for i in range(width):
        inv.append(math.prod(x[i] for x in elementary if i < len(x)))
    return sorted(inv)


def quotient_abelianization(grp: MatrixGroup, normal: np.ndarray) -> list[int]:
    """Invariant factors of ``(G / N)^ab`` for a normal subgroup ``N``."""
    g = len(grp)
    comms = set(int(x) for x in normal)
    sample = range(g)
    for a in sample:
        ra = grp.mul_row(a)
        for b in sample:
            ab = int(ra[b])
            comms.add(grp.mul(ab, grp.mul(grp.inv(a), grp.inv(b))))
    n_sub = generated_subgroup(grp, comms)
    inside = np.zeros(g, dtype=bool)
    inside[n_sub] = True
    coset = np.full(g, -1, dtype=np.int64)
    counts: Counter = Counter()
    for x in range(g):
        if coset[x] >= 0:
            continue
        members = grp.mul_row(x)[n_sub]
        coset[members] = x
        k, y = 1, x
        while not inside[y]:
            y = grp.mul(y, x)
            k += 1
        counts[k] += 1
    return abelian_invariants_from_orders(counts)


@dataclass
class H1Report:
    ring: str
    n: int
    group_side: list[int]
    nerve_side: HomologyResult
    elementary_in_e: bool

    @property
    def nerve_invariants(self) -> list[int]:
        return sorted(self.nerve_side.torsion.get(1, []) + [0] * self.nerve_side.betti[1])

    @property
    def agree(self) -> bool:
        return [x for x in self.group_side if x > 1] == self.nerve_invariants

    def to_json(self) -> dict:
        return {"ring": self.ring, "rank": self.n, "group_invariants": self.group_side,
                "nerve_invariants": self.nerve_invariants,
                "elementary_in_E": self.elementary_in_e, "agree": self.agree}


def h1_check(ring: Ring, n: int, method: str = "auto", cap: int = DEFAULT_CHAIN_CAP) -> H1Report:
    """Integral ``H_1`` of RBS against ``(GL_n / E)^ab``."""
    grp = flag_data(ring, n).group
    e = e_subgroup(ring, n)
    inv = quotient_abelianization(grp, e)
    h = rbs_homology(ring, n, 0, 2, method, cap)
    el = set(elementary_subgroup(ring, n).tolist()) <= set(e.tolist())
    return H1Report(ring.label, n, inv, h, el)


def check_unipotent(ring: Ring, n: int) -> None:
    """``U_F`` is normal in the stabilizer and trivial on every graded piece."""
    data = rbs_data(ring, n)
    fd, grp = data.fd, data.fd.group
    act = fd.flag_action
    for f, ch in enumerate(fd.chains):
        stab = np.flatnonzero(act[:, f] == f)
        u = set(data.unipotent[f].tolist())
        if not u <= set(stab.tolist()):
            raise CategoryError(f"U of flag {f} leaves the stabilizer")
        for s in stab:
            for x in u:
                if grp.mul(grp.mul(int(s), x), grp.inv(int(s))) not in u:
                    raise CategoryError(f"U of flag {f} is not normal")
        mods = [None] + [fd.summands[i] for i in ch] + [Summand(n, ring.identity(n))]
        for x in u:
            g = grp[x]
            for lower, upper in zip(mods, mods[1:]):
                for v in upper.basis:
                    w = np.array([ring.sub(a, b) for a, b in zip(ring.matvec(g, v), v)])[None]
                    if not _in_summand_batch(ring, lower, w)[0]:
                        raise CategoryError(f"U of flag {f} moves a graded piece")


def coset_independence(ring: Ring, n: int) -> int:
    """Compose every composable pair with every choice of representatives.

    Returns the number of representative pairs checked; raises on a mismatch.
    """
    data = rbs_data(ring, n)
    grp = data.fd.group
    c = data.category
    checked = 0
    cosets = []
    for f in range(len(data.fd.chains)):
        cosets.append({int(r): np.flatnonzero(data.coset_rep[f] == r) for r in
                       np.unique(data.coset_rep[f])})
    for b in range(c.n_morphisms):
        f, g, rg = data.morphs[b]
        for a in c.out_all(g):
            _, h, rh = data.morphs[a]
            want = data.morphs[c.compose(a, b)]
            for x in cosets[g][rh]:
                row = grp.mul_row(int(x))
                vals = data.coset_rep[f][row[cosets[f][rg]]]
                if not (vals == want[2]).all():
                    raise CategoryError("composition depends on representatives")
                checked += len(vals)
    return checked


def e1_vanishing(h: HomologyResult, n: int) -> dict[int, bool]:
    """Relative homology vanishes in reliable degrees below ``n - 1``."""
    return {d: h.is_zero(d) for d in h.degrees if d < n - 1 and h.reliable(d)}


def coinvariants_vs_relative(ring: Ring, n: int, h: HomologyResult) -> bool:
    """Steinberg coinvariants match relative homology in degree ``n - 1``."""
    rank, tors = steinberg_coinvariants(ring, n, h_p(h))
    return h.reliable(n - 1) and h.betti[n - 1] == rank and h.torsion.get(n - 1, []) == tors


def h_p(h: HomologyResult) -> int:
    return 0 if h.coeff == "Z" else int(h.coeff[1:])


def nerve_size(c: FinCategory, d_max: int) -> list[int]:
    return nerve_chain_counts(c, d_max)
