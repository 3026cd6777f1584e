"""Splittable flags, Tits complexes and Steinberg modules over finite local rings.

Over a local ring every chain of proper nonzero free summands of ``R^n`` is a
splittable flag: a summand of ``R^n`` contained in another summand is a
summand of it, and projective quotients are free.  Flags are therefore stored
as strictly increasing tuples of summand indices.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .categories import (DEFAULT_CHAIN_CAP, TableGroup, action_category, category_homology, check_action,
                         Poset, SimplicialComplex, _nullspace_mod_p)
from .homology import (HomologyResult, coeff_label, homology, integer_invariants, rank_mod_p,
                       smith_normal_form)
from .ring_linalg import (CapExceeded, DEFAULT_GL_CAP, MatrixGroup, Ring, Summand,
                          act_on_summand, enumerate_gl, enumerate_summands, standard_summand,
                          summand_leq)

DEFAULT_FLAG_CAP = 100_000


@dataclass(frozen=True, order=True)
class Flag:
    """``M_1 ⊂ ... ⊂ M_{d-1}`` inside ``R^n``; the empty chain is the trivial flag."""

    n: int
    summands: tuple[Summand, ...] = ()

    @property
    def is_trivial(self) -> bool:
        return not self.summands

    def ranks(self) -> tuple[int, ...]:
        return tuple(s.rank for s in self.summands)

    def graded_ranks(self) -> tuple[int, ...]:
        """Ranks of the successive quotients, ending with ``R^n / M_{d-1}``."""
        full = (0,) + self.ranks() + (self.n,)
        return tuple(b - a for a, b in zip(full, full[1:]))

    def __str__(self) -> str:
        inner = " < ".join("<" + ",".join("".join(map(str, r)) for r in s.basis) + ">"
                           for s in self.summands)
        return f"0 < {inner} < R^{self.n}" if inner else f"0 < R^{self.n}"


def standard_flag(n: int, ranks: tuple[int, ...]) -> Flag:
    return Flag(n, tuple(standard_summand(n, k) for k in ranks))


def gl_generators(ring: Ring, n: int) -> list[tuple]:
    """Elementary matrices ``1 + a e_ij`` and ``diag(u, 1, ..., 1)``.

    These generate ``GL_n`` of a local ring (row reduction only needs unit
    pivots, so every invertible matrix is a product of them).
    """
    gens = []
    eye = [[int(i == j) for j in range(n)] for i in range(n)]
    for i, j in itertools.permutations(range(n), 2):
        for a in range(1, ring.size):
            m = [row[:] for row in eye]
            m[i][j] = a
            gens.append(tuple(map(tuple, m)))
    for u in ring.units:
        if u != 1:
            m = [row[:] for row in eye]
            m[0][0] = u
            gens.append(tuple(map(tuple, m)))
    return gens


def permutation_action(group: MatrixGroup, gen_perms: dict[int, np.ndarray], npts: int
                       ) -> np.ndarray:
    """Action table ``act[g]`` from permutations of a generating set.

    Breadth-first over the Cayley graph using ``act[s·h] = act[s][act[h]]``;
    raises if the generators do not reach every element.
    """
    act = np.full((len(group), npts), -1, dtype=np.int64)
    e = group.identity_index
    act[e] = np.arange(npts)
    frontier = [e]
    while frontier:
        nxt = []
        for s, ps in gen_perms.items():
            row = group.mul_row(s)
            for h in frontier:
                gh = int(row[h])
                if act[gh, 0] < 0:
                    act[gh] = ps[act[h]]
                    nxt.append(gh)
        frontier = nxt
    if (act[:, 0] < 0).any():
        raise ValueError("generators do not generate the group")
    return act


class FlagData:
    """Summands and flags of ``R^n`` with their ``GL_n(R)`` actions.

    ``summands`` is sorted by rank then canonical form.  ``flags`` starts with
    the trivial flag and then lists nonempty chains by length and indices.
    The group and action tables are built on first use.
    """

    def __init__(self, ring: Ring, n: int, flag_cap: int = DEFAULT_FLAG_CAP,
                 gl_cap: int = DEFAULT_GL_CAP):
        if n < 1:
            raise ValueError("rank must be positive")
        self.ring = ring
        self.n = n
        self.gl_cap = gl_cap
        self.summands: list[Summand] = []
        for k in range(1, n):
            self.summands.extend(enumerate_summands(ring, n, k))
        self.summand_index = {s: i for i, s in enumerate(self.summands)}
        ns = len(self.summands)
        self.contained = np.zeros((ns, ns), dtype=bool)  # contained[i, j]: S_i ⊊ S_j
        for i, s in enumerate(self.summands):
            for j, t in enumerate(self.summands):
                if s.rank < t.rank and summand_leq(ring, s, t):
                    self.contained[i, j] = True
        up = [np.flatnonzero(self.contained[i]).tolist() for i in range(ns)]
        chains: list[tuple[int, ...]] = [()]
        layer = [(i,) for i in range(ns)]
        while layer:
            chains.extend(layer)
            if len(chains) > flag_cap:
                raise CapExceeded("flag enumeration", len(chains), flag_cap)
            layer = [ch + (j,) for ch in layer for j in up[ch[-1]]]
        self.chains = chains
        self.flags = [Flag(n, tuple(self.summands[i] for i in ch)) for ch in chains]
        self.flag_index = {ch: i for i, ch in enumerate(chains)}
        self._group: MatrixGroup | None = None
        self._summand_action: np.ndarray | None = None
        self._flag_action: np.ndarray | None = None

    @property
    def group(self) -> MatrixGroup:
        if self._group is None:
            self._group = enumerate_gl(self.ring, self.n, self.gl_cap)
        return self._group

    def generator_indices(self) -> list[int]:
        return [self.group.index_of(g) for g in gl_generators(self.ring, self.n)]

    @property
    def summand_action(self) -> np.ndarray:
        """``summand_action[g, i]`` is the index of ``g·S_i``."""
        if self._summand_action is None:
            grp = self.group
            if not self.summands:
                self._summand_action = np.zeros((len(grp), 0), dtype=np.int64)
            else:
                perms = {}
                for s in self.generator_indices():
                    g = grp[s]
                    perms[s] = np.array([self.summand_index[act_on_summand(self.ring, g, x)]
                                         for x in self.summands], dtype=np.int64)
                self._summand_action = permutation_action(grp, perms, len(self.summands))
        return self._summand_action

    @property
    def flag_action(self) -> np.ndarray:
        """``flag_action[g, i]`` is the index of ``g·F_i``."""
        if self._flag_action is None:
            sa = self.summand_action
            perms = {}
            for s in self.generator_indices():
                perms[s] = np.array([self.flag_index[tuple(int(sa[s, i]) for i in ch)]
                                     for ch in self.chains], dtype=np.int64)
            self._flag_action = permutation_action(self.group, perms, len(self.chains))
        return self._flag_action

    def refines(self, i: int, j: int) -> bool:
        """``F_i <= F_j`` in the refinement order: ``F_j``'s summands are among ``F_i``'s."""
        return set(self.chains[j]) <= set(self.chains[i])

    def flag_of(self, flag: Flag) -> int:
        return self.flag_index[tuple(self.summand_index[s] for s in flag.summands)]


@functools.lru_cache(maxsize=32)
def flag_data(ring: Ring, n: int) -> FlagData:
    return FlagData(ring, n)


def flag_poset(ring: Ring, n: int, include_trivial: bool = False) -> Poset:
    """Splittable flags under refinement; the trivial flag is the maximum."""
    fd = flag_data(ring, n)
    keep = list(range(len(fd.chains))) if include_trivial else list(range(1, len(fd.chains)))
    sets = [set(fd.chains[i]) for i in keep]
    less = np.array([[a != b and b <= a for b in sets] for a in sets], dtype=bool) \
        if keep else np.zeros((0, 0), dtype=bool)
    return Poset([fd.flags[i] for i in keep], less, validate=False)


def flag_action_table(ring: Ring, n: int, include_trivial: bool = False) -> np.ndarray:
    fd = flag_data(ring, n)
    act = fd.flag_action
    return act if include_trivial else act[:, 1:] - 1


def tits_complex(ring: Ring, n: int) -> SimplicialComplex:
    """Order complex of proper nonzero summands under containment.

    Simplices are the nontrivial flags; vertex ``i`` is ``summands[i]``.
    """
    fd = flag_data(ring, n)
    return SimplicialComplex(fd.summands, fd.chains[1:], validate=False)


def tits_homology(ring: Ring, n: int, p: int = 0) -> HomologyResult:
    """Reduced homology of the Tits complex (degree -1 included)."""
    return homology(tits_complex(ring, n).chain_complex(reduced=True), p)


def is_concentrated(h: HomologyResult, d: int) -> bool:
    """Reduced homology free and zero outside degree ``d``."""
    return all(not h.torsion.get(k) for k in h.degrees) and \
        all(h.betti[k] == 0 for k in h.degrees if k != d)


# ---------------------------------------------------------------------------
# Steinberg modules


@dataclass
class SteinbergData:
    """Top reduced homology of the Tits complex with its ``GL_n`` action.

    ``basis`` holds cycles as columns over the top simplices; ``rho(g)``
    gives the matrix of ``g`` in that basis.
    """

    ring: Ring
    n: int
    coeff: str
    p: int
    homology: HomologyResult
    top_simplices: list[tuple[int, ...]]
    basis: np.ndarray
    _coords: np.ndarray = field(repr=False)
    _cache: dict[int, np.ndarray] = field(default_factory=dict, repr=False)

    @property
    def rank(self) -> int:
        return self.basis.shape[1]

    @property
    def concentrated(self) -> bool:
        return is_concentrated(self.homology, self.n - 2)

    def coordinates(self, chain: np.ndarray) -> np.ndarray:
        """Coordinates of a top-degree cycle in ``basis``."""
        out = self._coords @ chain
        return out % self.p if self.p else out

    def permutation_signs(self, g: int) -> tuple[np.ndarray, np.ndarray]:
        """Image positions and orientation signs of the top simplices under ``g``."""
        fd = flag_data(self.ring, self.n)
        act = fd.summand_action[g]
        index = {s: i for i, s in enumerate(self.top_simplices)}
        pos = np.empty(len(self.top_simplices), dtype=np.int64)
        sign = np.empty(len(self.top_simplices), dtype=np.int64)
        for j, s in enumerate(self.top_simplices):
            img = [int(act[v]) for v in s]
            order = sorted(range(len(img)), key=img.__getitem__)
            pos[j] = index[tuple(img[k] for k in order)]
            sign[j] = _perm_sign(order)
        return pos, sign

    def rho(self, g: int) -> np.ndarray:
        """Matrix of ``g`` acting on the basis (columns are images)."""
        m = self._cache.get(g)
        if m is None:
            pos, sign = self.permutation_signs(g)
            moved = np.zeros_like(self.basis)
            moved[pos] = self.basis * sign[:, None]
            m = self.coordinates(moved)
            if len(self._cache) < 50_000:
                self._cache[g] = m
        return m


def _perm_sign(order: list[int]) -> int:
    sign = 1
    seen = [False] * len(order)
    for i in range(len(order)):
        if not seen[i]:
            j, length = i, 0
            while not seen[j]:
                seen[j] = True
                j = order[j]
                length += 1
            if length % 2 == 0:
                sign = -sign
    return sign


def steinberg(ring: Ring, n: int, p: int = 0) -> SteinbergData:
    """Steinberg module of ``R^n`` over Z (``p == 0``) or F_p."""
    if n < 2:
        raise ValueError("the Steinberg module needs rank at least 2")
    cc = tits_complex(ring, n).chain_complex(reduced=True)
    hom = homology(cc, p)
    top = n - 2
    simplices = cc.labels[top + 1]
    bd = cc.boundary(top)
    if p:
        k = _nullspace_mod_p(bd.toarray().astype(np.float64) % p, p).astype(np.int64)
        basis = k.T
        free = _free_columns(k)
        coords = np.zeros((len(free), basis.shape[0]), dtype=np.int64)
        coords[np.arange(len(free)), free] = 1
    else:
        u, d, v, ui, vi = smith_normal_form(bd, with_inverses=True)
        r = sum(1 for i in range(min(len(d), len(d[0]) if d else 0)) if d[i][i])
        v = np.array(v, dtype=object).astype(np.int64)
        vi = np.array(vi, dtype=object).astype(np.int64)
        basis = v[:, r:]
        coords = vi[r:]
    return SteinbergData(ring, n, coeff_label(p), p, hom, simplices, basis, coords)


def _free_columns(k: np.ndarray) -> list[int]:
    """Free columns of a nullspace basis built on them (one unit entry each)."""
    free = []
    for i in range(k.shape[0]):
        cols = [j for j in np.flatnonzero(k[i] == 1) if np.count_nonzero(k[:, j]) == 1]
        free.append(int(cols[0]))
    return free


def coinvariants(mats: list[np.ndarray], r: int, p: int = 0) -> tuple[int, list[int]]:
    """``M / span{x - g x}`` for ``M = k^r`` and the given action matrices.

    Returns ``(free rank, torsion invariants)``; over F_p the torsion is empty.
    """
    if r == 0:
        return 0, []
    eye = np.eye(r, dtype=np.int64)
    rel = np.hstack([m - eye for m in mats]) if mats else np.zeros((r, 0), dtype=np.int64)
    if p:
        rank = rank_mod_p(sp.csc_matrix(rel % p), p) if rel.size else 0
        return r - rank, []
    inv = integer_invariants(sp.csc_matrix(rel)) if rel.size else []
    return r - len(inv), sorted(x for x in inv if x > 1)


def steinberg_coinvariants(ring: Ring, n: int, p: int = 0, all_elements: bool = False
                           ) -> tuple[int, list[int]]:
    """``St(R^n)_{GL_n(R)}`` as ``(rank, torsion)``.

    The relations ``x - s x`` for a generating set already span the
    augmentation submodule; ``all_elements`` uses every group element instead.
    """
    st = steinberg(ring, n, p)
    fd = flag_data(ring, n)
    elems = range(len(fd.group)) if all_elements else fd.generator_indices()
    return coinvariants([st.rho(g) for g in elems], st.rank, p)


# ---------------------------------------------------------------------------
# Borel construction of the flag poset


def borel_pair_category(ring: Ring, n: int, group: str = "GL"):
    """Action category of ``GL_n`` (or the trivial group) on all flags.

    Returns the category and the object indices of the nontrivial flags.
    """
    fd = flag_data(ring, n)
    poset = flag_poset(ring, n, include_trivial=True)
    if group == "GL":
        g = fd.group
        act = fd.flag_action
    elif group == "trivial":
        g = TableGroup.trivial()
        act = np.arange(len(poset))[None, :]
    else:
        raise ValueError("group must be 'GL' or 'trivial'")
    c = action_category(g, poset, act, validate=False, name=f"GL_{n}({ring.label})⋉F")
    return c, list(range(1, len(poset)))


def borel_pair_homology(ring: Ring, n: int, p: int, d_max: int, method: str = "auto",
                        group: str = "GL", cap: int = DEFAULT_CHAIN_CAP) -> HomologyResult:
    """Homology of the action category on all flags relative to the nontrivial ones."""
    c, sub = borel_pair_category(ring, n, group)
    return category_homology(c, p, d_max, sub, method=method, cap=cap)


def check_flag_action(ring: Ring, n: int) -> None:
    """The group acts by poset automorphisms fixing the trivial flag."""
    fd = flag_data(ring, n)
    check_action(fd.group, flag_poset(ring, n, include_trivial=True), fd.flag_action)
    if not (fd.flag_action[:, 0] == 0).all():
        raise ValueError("trivial flag not fixed")


def tits_report(ring: Ring, n: int, p: int = 0) -> dict:
    fd = flag_data(ring, n)
    h = tits_homology(ring, n, p)
    top = n - 2
    return {"ring": ring.label, "rank": n, "vertices": len(fd.summands),
            "simplices": {str(k): sum(1 for ch in fd.chains[1:] if len(ch) == k + 1)
                          for k in range(max(n - 1, 0))},
            "homology": h.to_json(), "concentrated": is_concentrated(h, top),
            "top_degree": top, "steinberg_rank": h.betti.get(top, 0),
            # local rings only, so the free and projective Tits complexes agree
            "free_equals_projective": True}
