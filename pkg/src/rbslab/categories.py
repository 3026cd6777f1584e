"""Finite categories, posets, simplicial complexes and their homology.

A :class:`FinCategory` stores its morphisms by index together with a
composition callable ``compose(f, g) = f ∘ g`` (``g`` first).  Large
categories (action categories, RBS categories) compose from structured data
instead of a materialised table.

Homology of a finite category is computed either from the normalized nerve
truncated at a degree ``D`` (:func:`nerve_truncated`) or, for F_p
coefficients, as ``Tor`` over the category algebra using a projective
resolution of the constant functor by representables
(:func:`resolution_homology`).  Both routes report degrees ``<= D - 1`` as
reliable.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, Mapping, Protocol, Sequence

import numpy as np
import scipy.sparse as sp

from .homology import ChainComplex, HomologyResult, coeff_label, homology, rank_mod_p
from .ring_linalg import CapExceeded

DEFAULT_CHAIN_CAP = 1_500_000
DEFAULT_ASSOC_CAP = 400_000
DEFAULT_MORPHISM_CAP = 250_000


class CategoryError(ValueError):
    """A category, functor or action failed a structural law."""


class FinCategory:
    """A finite category with morphisms indexed ``0..M-1``.

    Args:
        objects: object labels.
        src, tgt: object index of each morphism's source and target.
        identities: identity morphism index per object.
        compose: ``compose(f, g)`` returns the index of ``f ∘ g``.
        morph_labels: optional labels for morphisms.
        validate: check identity and associativity laws (exhaustive up to
            ``assoc_cap`` composable triples, sampled beyond).
    """

    def __init__(self, objects: Sequence[Hashable], src: Sequence[int], tgt: Sequence[int],
                 identities: Sequence[int], compose: Callable[[int, int], int],
                 morph_labels: Sequence[Hashable] | None = None, name: str = "",
                 validate: bool = True, assoc_cap: int = DEFAULT_ASSOC_CAP):
        self.objects = list(objects)
        self.src = list(src)
        self.tgt = list(tgt)
        self.identities = list(identities)
        self._compose = compose
        self.morph_labels = list(morph_labels) if morph_labels is not None else None
        self.name = name
        n_obj = len(self.objects)
        self.is_identity = [False] * len(self.src)
        for x, i in enumerate(self.identities):
            if self.src[i] != x or self.tgt[i] != x:
                raise CategoryError(f"identity of object {x} has wrong endpoints")
            self.is_identity[i] = True
        self.hom: dict[tuple[int, int], list[int]] = {}
        self.out_nonid: list[list[int]] = [[] for _ in range(n_obj)]
        for m, (a, b) in enumerate(zip(self.src, self.tgt)):
            self.hom.setdefault((a, b), []).append(m)
            if not self.is_identity[m]:
                self.out_nonid[a].append(m)
        self._object_index = {o: i for i, o in enumerate(self.objects)} \
            if _all_hashable(self.objects) else None
        self._cache: dict[tuple[int, int], int] = {}
        if validate:
            self.validate(assoc_cap)

    # -- basic access -----------------------------------------------------------
    @property
    def n_objects(self) -> int:
        return len(self.objects)

    @property
    def n_morphisms(self) -> int:
        return len(self.src)

    def homset(self, x: int, y: int) -> list[int]:
        return self.hom.get((x, y), [])

    def compose(self, f: int, g: int) -> int:
        """``f ∘ g``; ``g`` is applied first."""
        key = (f, g)
        r = self._cache.get(key)
        if r is None:
            if self.tgt[g] != self.src[f]:
                raise CategoryError(f"morphisms {f} and {g} are not composable")
            r = self._compose(f, g)
            if len(self._cache) < 4_000_000:
                self._cache[key] = r
        return r

    def object_index(self, obj: Hashable) -> int:
        if self._object_index is None:
            return self.objects.index(obj)
        return self._object_index[obj]

    def hom_counts(self, nonidentity: bool = False) -> np.ndarray:
        n = self.n_objects
        a = np.zeros((n, n), dtype=object)
        for (x, y), ms in self.hom.items():
            a[x, y] = len(ms)
        if nonidentity:
            for x in range(n):
                a[x, x] -= 1
        return a

    def composition_table(self) -> dict[tuple[int, int], int]:
        table = {}
        for g in range(self.n_morphisms):
            for f in self.out_all(self.tgt[g]):
                table[(f, g)] = self.compose(f, g)
        return table

    def out_all(self, x: int) -> list[int]:
        return [self.identities[x]] + self.out_nonid[x]

    # -- validation -------------------------------------------------------------
    def validate(self, assoc_cap: int = DEFAULT_ASSOC_CAP, samples: int = 20_000,
                 seed: int = 0) -> None:
        for f in range(self.n_morphisms):
            x, y = self.src[f], self.tgt[f]
            if self.compose(self.identities[y], f) != f or self.compose(f, self.identities[x]) != f:
                raise CategoryError(f"identity law fails for morphism {f}")
        out_count = [1 + len(o) for o in self.out_nonid]
        # number of composable triples h∘g∘f
        pairs_from = [0] * self.n_objects
        for g in range(self.n_morphisms):
            pairs_from[self.src[g]] += out_count[self.tgt[g]]
        triples = sum(pairs_from[self.tgt[f]] for f in range(self.n_morphisms))
        if triples <= assoc_cap:
            for f in range(self.n_morphisms):
                for g in self.out_all(self.tgt[f]):
                    gf = self.compose(g, f)
                    self._check_endpoints(gf, self.src[f], self.tgt[g])
                    for h in self.out_all(self.tgt[g]):
                        if self.compose(h, gf) != self.compose(self.compose(h, g), f):
                            raise CategoryError("associativity fails")
        else:
            rng = random.Random(seed)
            for _ in range(samples):
                f = rng.randrange(self.n_morphisms)
                gs = self.out_all(self.tgt[f])
                g = gs[rng.randrange(len(gs))]
                hs = self.out_all(self.tgt[g])
                h = hs[rng.randrange(len(hs))]
                gf = self.compose(g, f)
                self._check_endpoints(gf, self.src[f], self.tgt[g])
                if self.compose(h, gf) != self.compose(self.compose(h, g), f):
                    raise CategoryError("associativity fails")

    def _check_endpoints(self, m: int, x: int, y: int) -> None:
        if self.src[m] != x or self.tgt[m] != y:
            raise CategoryError("composite has wrong endpoints")

    # -- constructions ----------------------------------------------------------
    @classmethod
    def from_table(cls, objects: Sequence[Hashable], src: Sequence[int], tgt: Sequence[int],
                   identities: Sequence[int], table: Mapping[tuple[int, int], int],
                   **kw) -> "FinCategory":
        def comp(f: int, g: int) -> int:
            return table[(f, g)]
        return cls(objects, src, tgt, identities, comp, **kw)

    def full_subcategory(self, objs: Iterable[int], name: str = "", validate: bool = False
                         ) -> "FinCategory":
        objs = sorted(set(objs))
        new_obj = {x: i for i, x in enumerate(objs)}
        keep = [m for m in range(self.n_morphisms)
                if self.src[m] in new_obj and self.tgt[m] in new_obj]
        new_m = {m: i for i, m in enumerate(keep)}
        parent = self

        def comp(f: int, g: int) -> int:
            return new_m[parent.compose(keep[f], keep[g])]

        labels = [self.morph_labels[m] for m in keep] if self.morph_labels else keep
        sub = FinCategory([self.objects[x] for x in objs],
                          [new_obj[self.src[m]] for m in keep],
                          [new_obj[self.tgt[m]] for m in keep],
                          [new_m[self.identities[x]] for x in objs], comp,
                          morph_labels=labels, name=name or f"{self.name}|sub",
                          validate=validate)
        sub.parent_objects = objs  # type: ignore[attr-defined]
        sub.parent_morphisms = keep  # type: ignore[attr-defined]
        return sub

    def is_isomorphism(self, f: int) -> bool:
        x, y = self.src[f], self.tgt[f]
        return any(self.compose(g, f) == self.identities[x]
                   and self.compose(f, g) == self.identities[y]
                   for g in self.homset(y, x))

    def isomorphism_classes(self) -> list[list[int]]:
        parent = list(range(self.n_objects))

        def find(a: int) -> int:
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for x in range(self.n_objects):
            for y in range(x + 1, self.n_objects):
                if find(x) == find(y) or not self.homset(y, x):
                    continue
                if any(self.is_isomorphism(f) for f in self.homset(x, y)):
                    parent[find(y)] = find(x)
        classes: dict[int, list[int]] = {}
        for x in range(self.n_objects):
            classes.setdefault(find(x), []).append(x)
        return sorted(classes.values())

    def skeleton(self, representatives: Sequence[int] | None = None) -> "FinCategory":
        """Full subcategory on one object per isomorphism class.

        ``representatives`` may name the chosen objects; they are checked to
        meet every class exactly once.
        """
        classes = self.isomorphism_classes()
        if representatives is None:
            reps = [c[0] for c in classes]
        else:
            reps = list(representatives)
            owner = {x: i for i, c in enumerate(classes) for x in c}
            if sorted(owner[r] for r in reps) != list(range(len(classes))):
                raise CategoryError("representatives do not meet each class once")
        return self.full_subcategory(reps, name=f"skel({self.name})")

    def is_downward_closed(self, objs: Iterable[int]) -> bool:
        """Every morphism with target in ``objs`` has its source in ``objs``."""
        s = set(objs)
        return all(self.src[m] in s for m in range(self.n_morphisms) if self.tgt[m] in s)

    def to_json(self) -> dict:
        return {"objects": [str(o) for o in self.objects],
                "morphisms": [{"src": a, "tgt": b, "identity": self.is_identity[m],
                               "label": str(self.morph_labels[m]) if self.morph_labels else m}
                              for m, (a, b) in enumerate(zip(self.src, self.tgt))],
                "composition": [[f, g, h] for (f, g), h in sorted(self.composition_table().items())]}

    def __repr__(self) -> str:
        return f"FinCategory({self.name!r}, objects={self.n_objects}, morphisms={self.n_morphisms})"


def _all_hashable(xs: Iterable) -> bool:
    try:
        for x in xs:
            hash(x)
    except TypeError:
        return False
    return True


# ---------------------------------------------------------------------------
# small groups


class Group(Protocol):
    identity_index: int

    def __len__(self) -> int: ...
    def mul(self, i: int, j: int) -> int: ...
    def inv(self, i: int) -> int: ...


class TableGroup:
    """Finite group from a multiplication table on ``0..n-1``."""

    def __init__(self, table: Sequence[Sequence[int]]):
        self.table = [list(r) for r in table]
        n = len(self.table)
        self.identity_index = next(e for e in range(n)
                                   if all(self.table[e][x] == x for x in range(n)))
        self._inv = [next(y for y in range(n) if self.table[x][y] == self.identity_index)
                     for x in range(n)]

    @classmethod
    def cyclic(cls, n: int) -> "TableGroup":
        return cls([[(a + b) % n for b in range(n)] for a in range(n)])

    @classmethod
    def trivial(cls) -> "TableGroup":
        return cls([[0]])

    def __len__(self) -> int:
        return len(self.table)

    def mul(self, i: int, j: int) -> int:
        return self.table[i][j]

    def inv(self, i: int) -> int:
        return self._inv[i]


def group_category(g: Group, name: str = "BG") -> FinCategory:
    """One-object category with morphisms the group elements."""
    n = len(g)
    return FinCategory(["*"], [0] * n, [0] * n, [g.identity_index],
                       lambda a, b: g.mul(a, b), name=name)


def discrete_category(n: int) -> FinCategory:
    return FinCategory(list(range(n)), list(range(n)), list(range(n)), list(range(n)),
                       lambda a, b: a, name=f"discrete({n})")


# ---------------------------------------------------------------------------
# posets and simplicial complexes


class Poset:
    """Finite poset with a strict order given as a boolean matrix."""

    def __init__(self, elements: Sequence[Hashable], less: np.ndarray | Sequence[Sequence[bool]],
                 validate: bool = True):
        self.elements = list(elements)
        self.less = np.array(less, dtype=bool)
        n = len(self.elements)
        if self.less.shape != (n, n):
            raise CategoryError("order matrix has the wrong shape")
        if validate:
            lt = self.less
            if lt.diagonal().any():
                raise CategoryError("order is not irreflexive")
            if (lt & lt.T).any():
                raise CategoryError("order is not antisymmetric")
            li = lt.astype(np.int64)
            if ((li @ li > 0) & ~lt).any():
                raise CategoryError("order is not transitive")

    @classmethod
    def from_relation(cls, elements: Sequence[Hashable], leq: Callable[[Hashable, Hashable], bool]
                      ) -> "Poset":
        n = len(elements)
        less = [[i != j and leq(elements[i], elements[j]) for j in range(n)] for i in range(n)]
        return cls(elements, less)

    def __len__(self) -> int:
        return len(self.elements)

    def leq(self, i: int, j: int) -> bool:
        return i == j or bool(self.less[i, j])

    def as_category(self) -> FinCategory:
        n = len(self)
        pairs = [(i, j) for i in range(n) for j in range(n) if self.leq(i, j)]
        index = {pr: k for k, pr in enumerate(pairs)}

        def comp(f: int, g: int) -> int:
            return index[(pairs[g][0], pairs[f][1])]

        return FinCategory(self.elements, [a for a, _ in pairs], [b for _, b in pairs],
                           [index[(i, i)] for i in range(n)], comp, morph_labels=pairs,
                           name="poset")

    def subposet(self, keep: Sequence[int]) -> "Poset":
        keep = list(keep)
        return Poset([self.elements[i] for i in keep], self.less[np.ix_(keep, keep)],
                     validate=False)


class SimplicialComplex:
    """Abstract simplicial complex on vertices ``0..n-1``.

    Simplices are strictly increasing vertex tuples; the set is face-closed.
    """

    def __init__(self, vertices: Sequence[Hashable], simplices: Iterable[Sequence[int]],
                 validate: bool = True):
        self.vertices = list(vertices)
        simp = {tuple(s) for s in simplices}
        self.simplices = simp
        if validate:
            for s in simp:
                if list(s) != sorted(set(s)) or not s:
                    raise CategoryError(f"simplex {s} is not strictly increasing")
                if len(s) > 1:
                    for i in range(len(s)):
                        if s[:i] + s[i + 1:] not in simp:
                            raise CategoryError(f"face of {s} missing")
            for v in range(len(self.vertices)):
                if (v,) not in simp:
                    raise CategoryError(f"vertex {v} missing")

    @property
    def dimension(self) -> int:
        return max((len(s) - 1 for s in self.simplices), default=-1)

    def simplices_of_dim(self, d: int) -> list[tuple[int, ...]]:
        return sorted(s for s in self.simplices if len(s) == d + 1)

    def chain_complex(self, reduced: bool = False) -> ChainComplex:
        """Simplicial chains; ``reduced`` adds the augmentation in degree -1."""
        top = self.dimension
        levels = [self.simplices_of_dim(d) for d in range(max(top, 0) + 1)] if top >= 0 else []
        dims, bds = [], []
        if reduced:
            dims.append(1)
            bds.append(None)
        for d, simp in enumerate(levels):
            dims.append(len(simp))
            if d == 0:
                if reduced:
                    bds.append(sp.csc_matrix(np.ones((1, len(simp)), dtype=np.int64)))
                else:
                    bds.append(None)
                continue
            prev = {s: i for i, s in enumerate(levels[d - 1])}
            rows, cols, vals = [], [], []
            for j, s in enumerate(simp):
                for i in range(len(s)):
                    rows.append(prev[s[:i] + s[i + 1:]])
                    cols.append(j)
                    vals.append(-1 if i % 2 else 1)
            bds.append(sp.csc_matrix((vals, (rows, cols)), shape=(len(levels[d - 1]), len(simp)),
                                     dtype=np.int64))
        cc = ChainComplex(dims, bds, min_degree=-1 if reduced else 0,
                          labels=([[()]] if reduced else []) + levels)
        return cc


def order_complex(p: Poset) -> SimplicialComplex:
    """Simplices are the nonempty chains of ``p``."""
    n = len(p)
    up = [[j for j in range(n) if p.less[i, j]] for i in range(n)]
    chains: set[tuple[int, ...]] = set()

    def extend(chain: tuple[int, ...]) -> None:
        chains.add(tuple(sorted(chain)))
        for j in up[chain[-1]]:
            extend(chain + (j,))

    for i in range(n):
        extend((i,))
    return SimplicialComplex(p.elements, chains)


# ---------------------------------------------------------------------------
# nerves


class NerveComplex(ChainComplex):
    """Normalized nerve chains; ``chains[d]`` lists the degree-``d`` basis.

    Degree 0 chains are ``(x,)`` for objects ``x``; degree ``d >= 1`` chains are
    tuples of ``d`` composable non-identity morphism indices ``(f1, ..., fd)``
    with ``f1`` applied first.
    """

    chains: list[list[tuple[int, ...]]]
    category: FinCategory

    def chain_objects(self, d: int, i: int) -> list[int]:
        ch = self.chains[d][i]
        if d == 0:
            return [ch[0]]
        c = self.category
        return [c.src[ch[0]]] + [c.tgt[f] for f in ch]

    def sub_selection(self, objs: Iterable[int]) -> dict[int, list[int]]:
        """Basis indices of the nerve of the full subcategory on ``objs``."""
        s = set(objs)
        return {d: [i for i in range(len(self.chains[d]))
                    if all(x in s for x in self.chain_objects(d, i))]
                for d in range(len(self.chains))}


def nerve_chain_counts(c: FinCategory, d_max: int) -> list[int]:
    """Exact number of normalized chains per degree, from hom-set sizes."""
    a = c.hom_counts(nonidentity=True)
    counts = [c.n_objects]
    v = np.ones(c.n_objects, dtype=object)
    for _ in range(d_max):
        v = v @ a
        counts.append(int(sum(v)))
    return counts


def nerve_truncated(c: FinCategory, d_max: int, cap: int = DEFAULT_CHAIN_CAP,
                    check: bool = True) -> NerveComplex:
    """Normalized nerve chain complex in degrees ``0..d_max``, flagged truncated."""
    if d_max < 0:
        raise ValueError("degree bound must be nonnegative")
    counts = nerve_chain_counts(c, d_max)
    for d, k in enumerate(counts):
        if k > cap:
            raise CapExceeded(f"nerve of {c.name or 'category'}", k, cap, degree=d)
    src, tgt, is_id = c.src, c.tgt, c.is_identity
    out_sorted = [sorted(o) for o in c.out_nonid]
    chains: list[list[tuple[int, ...]]] = [[(x,) for x in range(c.n_objects)]]
    if d_max >= 1:
        first = sorted((m for m in range(c.n_morphisms) if not is_id[m]),
                       key=lambda m: (src[m], m))
        chains.append([(m,) for m in first])
    for d in range(2, d_max + 1):
        nxt = []
        for ch in chains[-1]:
            for m in out_sorted[tgt[ch[-1]]]:
                nxt.append(ch + (m,))
        chains.append(nxt)
    bds: list[sp.csc_matrix | None] = [None]
    for d in range(1, d_max + 1):
        prev = {ch: i for i, ch in enumerate(chains[d - 1])}
        rows, cols, vals = [], [], []
        if d == 1:
            for j, (m,) in enumerate(chains[1]):
                rows += [tgt[m], src[m]]
                cols += [j, j]
                vals += [1, -1]
        else:
            comp = c.compose
            for j, ch in enumerate(chains[d]):
                rows.append(prev[ch[1:]])
                cols.append(j)
                vals.append(1)
                for i in range(1, d):
                    h = comp(ch[i], ch[i - 1])
                    if is_id[h]:
                        continue
                    rows.append(prev[ch[: i - 1] + (h,) + ch[i + 1:]])
                    cols.append(j)
                    vals.append(-1 if i % 2 else 1)
                rows.append(prev[ch[:-1]])
                cols.append(j)
                vals.append(-1 if d % 2 else 1)
        bds.append(sp.csc_matrix((np.array(vals, dtype=np.int64), (rows, cols)),
                                 shape=(len(chains[d - 1]), len(chains[d]))))
    nc = NerveComplex([len(x) for x in chains], bds, truncated=True, check=check)
    nc.chains = chains
    nc.category = c
    return nc


# ---------------------------------------------------------------------------
# twisted arrows and action categories


def twisted_arrow(c: FinCategory, cap: int = DEFAULT_MORPHISM_CAP) -> FinCategory:
    """Objects are morphisms of ``c``; a morphism ``f -> g`` is a pair
    ``(a, b)`` with ``g = b ∘ f ∘ a``.  Composition ``(a', b') ∘ (a, b) =
    (a ∘ a', b' ∘ b)``."""
    comp = c.compose
    morphs: list[tuple[int, int, int, int]] = []  # (f, g, a, b)
    for f in range(c.n_morphisms):
        for g in range(c.n_morphisms):
            for a in c.homset(c.src[g], c.src[f]):
                fa = comp(f, a)
                for b in c.homset(c.tgt[f], c.tgt[g]):
                    if comp(b, fa) == g:
                        morphs.append((f, g, a, b))
                        if len(morphs) > cap:
                            raise CapExceeded("twisted arrow morphisms", len(morphs), cap)
    index = {m: i for i, m in enumerate(morphs)}
    ident = [index[(f, f, c.identities[c.src[f]], c.identities[c.tgt[f]])]
             for f in range(c.n_morphisms)]

    def tw_comp(u: int, v: int) -> int:
        g, h, a2, b2 = morphs[u]
        f, _, a1, b1 = morphs[v]
        return index[(f, h, comp(a1, a2), comp(b2, b1))]

    return FinCategory(list(range(c.n_morphisms)), [m[0] for m in morphs],
                       [m[1] for m in morphs], ident, tw_comp, morph_labels=morphs,
                       name=f"Tw({c.name})")


def check_action(g: Group, p: Poset, act: Sequence[Sequence[int]]) -> None:
    """Raise unless ``act[i][x]`` is an action of ``g`` by poset automorphisms."""
    n = len(p)
    act_arr = np.asarray(act, dtype=np.int64)
    if act_arr.shape != (len(g), n):
        raise CategoryError("action table has the wrong shape")
    if not np.array_equal(act_arr[g.identity_index], np.arange(n)):
        raise CategoryError("identity does not act trivially")
    for i in range(len(g)):
        perm = act_arr[i]
        if sorted(perm.tolist()) != list(range(n)):
            raise CategoryError("group element does not act bijectively")
        if not np.array_equal(p.less[np.ix_(perm, perm)], p.less):
            raise CategoryError("group element is not a poset automorphism")
        for j in range(len(g)):
            if not np.array_equal(act_arr[g.mul(i, j)], perm[act_arr[j]]):
                raise CategoryError("action is not compatible with multiplication")


def action_category(g: Group, p: Poset, act: Sequence[Sequence[int]], validate: bool = True,
                    name: str = "G⋉P") -> FinCategory:
    """Objects are elements of ``p``; ``Hom(x, y) = {g : g·x <= y}``."""
    if validate:
        check_action(g, p, act)
    n = len(p)
    leq = p.less | np.eye(n, dtype=bool)
    morphs: list[tuple[int, int, int]] = []
    for x in range(n):
        for gi in range(len(g)):
            gx = act[gi][x]
            for y in np.flatnonzero(leq[gx]):
                morphs.append((x, int(y), gi))
    morphs.sort()
    index = {m: i for i, m in enumerate(morphs)}
    e = g.identity_index

    def comp(f: int, h: int) -> int:
        y, z, a = morphs[f]
        x, _, b = morphs[h]
        return index[(x, z, g.mul(a, b))]

    return FinCategory(p.elements, [m[0] for m in morphs], [m[1] for m in morphs],
                       [index[(x, x, e)] for x in range(n)], comp, morph_labels=morphs,
                       name=name, validate=False)


# ---------------------------------------------------------------------------
# functors


class Functor:
    """Functor between finite categories given by object and morphism maps."""

    def __init__(self, source: FinCategory, target: FinCategory, obj_map: Sequence[int],
                 mor_map: Sequence[int], validate: bool = True, pair_cap: int = DEFAULT_ASSOC_CAP):
        self.source = source
        self.target = target
        self.obj_map = list(obj_map)
        self.mor_map = list(mor_map)
        if validate:
            self.validate(pair_cap)

    def validate(self, pair_cap: int = DEFAULT_ASSOC_CAP, samples: int = 20_000) -> int:
        """Check identities, endpoints and composition; returns pairs checked."""
        s, t = self.source, self.target
        for x in range(s.n_objects):
            if self.mor_map[s.identities[x]] != t.identities[self.obj_map[x]]:
                raise CategoryError(f"identity of object {x} not preserved")
        for m in range(s.n_morphisms):
            fm = self.mor_map[m]
            if t.src[fm] != self.obj_map[s.src[m]] or t.tgt[fm] != self.obj_map[s.tgt[m]]:
                raise CategoryError(f"endpoints of morphism {m} not preserved")
        pairs = [(f, g) for g in range(s.n_morphisms) for f in s.out_all(s.tgt[g])]
        if len(pairs) > pair_cap:
            pairs = random.Random(0).sample(pairs, samples)
        for f, g in pairs:
            if self.mor_map[s.compose(f, g)] != t.compose(self.mor_map[f], self.mor_map[g]):
                raise CategoryError("composition not preserved")
        return len(pairs)

    def restrict(self, source_sub: FinCategory, target_sub: FinCategory) -> "Functor":
        """Restriction to full subcategories made by :meth:`FinCategory.full_subcategory`."""
        so, sm = source_sub.parent_objects, source_sub.parent_morphisms  # type: ignore[attr-defined]
        to, tm = target_sub.parent_objects, target_sub.parent_morphisms  # type: ignore[attr-defined]
        tobj = {x: i for i, x in enumerate(to)}
        tmor = {m: i for i, m in enumerate(tm)}
        try:
            om = [tobj[self.obj_map[x]] for x in so]
            mm = [tmor[self.mor_map[m]] for m in sm]
        except KeyError as exc:
            raise CategoryError("functor does not map the subcategories into each other") from exc
        return Functor(source_sub, target_sub, om, mm)


def functor_chain_map(f: Functor, d_max: int, src_nerve: NerveComplex | None = None,
                      tgt_nerve: NerveComplex | None = None, cap: int = DEFAULT_CHAIN_CAP
                      ) -> tuple[NerveComplex, NerveComplex, dict[int, sp.csc_matrix]]:
    """Chain map between normalized nerves; degenerate image chains go to 0.

    Returns the two nerve complexes and the degreewise matrices; ``∂∘f = f∘∂``
    is verified.
    """
    a = src_nerve or nerve_truncated(f.source, d_max, cap)
    b = tgt_nerve or nerve_truncated(f.target, d_max, cap)
    tid = f.target.is_identity
    maps: dict[int, sp.csc_matrix] = {}
    for d in range(d_max + 1):
        index = {ch: i for i, ch in enumerate(b.chains[d])}
        rows, cols = [], []
        for j, ch in enumerate(a.chains[d]):
            if d == 0:
                img = (f.obj_map[ch[0]],)
            else:
                img = tuple(f.mor_map[m] for m in ch)
                if any(tid[m] for m in img):
                    continue
            rows.append(index[img])
            cols.append(j)
        maps[d] = sp.csc_matrix((np.ones(len(rows), dtype=np.int64), (rows, cols)),
                                shape=(len(b.chains[d]), len(a.chains[d])))
    for d in range(1, d_max + 1):
        lhs = b.boundary(d) @ maps[d]
        rhs = maps[d - 1] @ a.boundary(d)
        if (lhs - rhs).count_nonzero():
            raise CategoryError(f"chain map does not commute with ∂ in degree {d}")
    return a, b, maps


# ---------------------------------------------------------------------------
# homology of categories


def nerve_homology(c: FinCategory, p: int, d_max: int, sub_objects: Iterable[int] | None = None,
                   cap: int = DEFAULT_CHAIN_CAP) -> HomologyResult:
    """Homology of the nerve (relative to the full subcategory on
    ``sub_objects`` if given) from the normalized chains truncated at ``d_max``."""
    nc = nerve_truncated(c, d_max, cap)
    if sub_objects is None:
        return homology(nc, p)
    return homology(nc.quotient(nc.sub_selection(sub_objects)), p)


class _Echelon:
    """Fully reduced row echelon basis over F_p, grown by batches of rows."""

    def __init__(self, ncols: int, p: int):
        self.p = p
        self.ncols = ncols
        self.rows = np.zeros((0, ncols), dtype=np.float64)
        self.piv: list[int] = []

    @property
    def rank(self) -> int:
        return len(self.piv)

    def reduce(self, x: np.ndarray) -> np.ndarray:
        x = np.mod(x, self.p)
        if self.piv and x.size:
            x = np.mod(x - x[:, self.piv] @ self.rows, self.p)
        return x

    def add(self, x: np.ndarray, batch: int = 512) -> list[int]:
        """Insert rows; returns the indices of rows that raised the rank."""
        raised = []
        for start in range(0, x.shape[0], batch):
            raised += [start + i for i in self._add_batch(x[start:start + batch])]
        return raised

    def _add_batch(self, x: np.ndarray) -> list[int]:
        p = self.p
        x = self.reduce(np.asarray(x, dtype=np.float64))
        new_rows, new_piv, raised = [], [], []
        for i in range(x.shape[0]):
            row = x[i]
            for r, c in zip(new_rows, new_piv):
                if row[c]:
                    row = np.mod(row - row[c] * r, p)
            nz = np.flatnonzero(row)
            if nz.size == 0:
                continue
            c = int(nz[0])
            row = np.mod(row * pow(int(row[c]), p - 2, p), p)
            for k, r in enumerate(new_rows):
                if r[c]:
                    new_rows[k] = np.mod(r - r[c] * row, p)
            new_rows.append(row)
            new_piv.append(c)
            raised.append(i)
        if new_rows:
            nr = np.array(new_rows)
            if self.piv:
                self.rows = np.mod(self.rows - self.rows[:, new_piv] @ nr, p)
            self.rows = np.vstack([self.rows, nr])
            self.piv += new_piv
        return raised

    def contains(self, v: np.ndarray) -> bool:
        return not self.reduce(v[None, :]).any()


def _nullspace_mod_p(m: np.ndarray, p: int) -> np.ndarray:
    """Basis (as rows) of ``{v : m v = 0}`` over F_p."""
    ncols = m.shape[1]
    if m.shape[0] == 0:
        return np.eye(ncols)
    ech = _Echelon(ncols, p)
    ech.add(m)
    piv = ech.piv
    free = [j for j in range(ncols) if j not in set(piv)]
    k = np.zeros((len(free), ncols))
    if free:
        k[np.arange(len(free)), free] = 1
        if piv:
            k[:, piv] = np.mod(-ech.rows[:, free].T, p)
    return k


@dataclass
class ResolutionData:
    """Generators of a free resolution of the constant functor.

    ``gens[i]`` lists ``(object, vector)`` pairs; the vector is the image of
    the generator in ``F_{i-1}`` evaluated at that object (empty for i = 0).
    """

    p: int
    gens: list[list[tuple[int, np.ndarray]]]


class _Representables:
    """Hom-set positions and composition tables used by the resolution."""

    def __init__(self, c: FinCategory):
        self.c = c
        n = c.n_objects
        self.hom = {(x, y): c.homset(x, y) for x in range(n) for y in range(n)}
        self.pos = {k: {m: i for i, m in enumerate(v)} for k, v in self.hom.items()}
        self._comp: dict[tuple[int, int, int], np.ndarray] = {}

    def comp(self, x: int, y: int, z: int) -> np.ndarray:
        """``T[a, f]`` = position of ``a ∘ f`` in Hom(x, z) for a ∈ Hom(y, z), f ∈ Hom(x, y)."""
        key = (x, y, z)
        t = self._comp.get(key)
        if t is None:
            hy, hz = self.hom[(x, y)], self.hom[(y, z)]
            pz = self.pos[(x, z)]
            t = np.array([[pz[self.c.compose(a, f)] for f in hy] for a in hz],
                         dtype=np.int64).reshape(len(hz), len(hy))
            self._comp[key] = t
        return t

    def size(self, x: int, y: int) -> int:
        return len(self.hom[(x, y)])


def _module_dims(rep: _Representables, gens: Sequence[tuple[int, np.ndarray]], y: int
                 ) -> tuple[int, list[int]]:
    offs, tot = [], 0
    for x, _ in gens:
        offs.append(tot)
        tot += rep.size(x, y)
    return tot, offs


def _images(rep: _Representables, gens: Sequence[tuple[int, np.ndarray]], x: int,
            vec: np.ndarray, y: int, p: int) -> np.ndarray:
    """Columns ``a · vec`` for all ``a`` ∈ Hom(x, y); ``vec`` ∈ F(x) for the free
    module generated by ``gens``."""
    ny = rep.size(x, y)
    dim_y, offs_y = _module_dims(rep, gens, y)
    out = np.zeros((dim_y, ny))
    if ny == 0:
        return out
    _, offs_x = _module_dims(rep, gens, x)
    for l, (xl, _) in enumerate(gens):
        size = rep.size(xl, x)
        if size == 0:
            continue
        block = vec[offs_x[l]: offs_x[l] + size]
        nz = np.flatnonzero(block)
        if nz.size == 0:
            continue
        t = rep.comp(xl, x, y)[:, nz]  # (ny, |nz|)
        cols = np.repeat(np.arange(ny), nz.size)
        rows = offs_y[l] + t.reshape(-1)
        np.add.at(out, (rows, cols), np.tile(block[nz], ny))
    return np.mod(out, p)


def _process_order(c: FinCategory) -> list[int]:
    reach = [sum(1 for y in range(c.n_objects) if c.homset(x, y)) for x in range(c.n_objects)]
    return sorted(range(c.n_objects), key=lambda x: (-reach[x], x))


def build_resolution(c: FinCategory, p: int, length: int, cap: int = DEFAULT_CHAIN_CAP
                     ) -> ResolutionData:
    """Free resolution ``F_length -> ... -> F_0 -> k`` of the constant functor
    by sums of representables ``k·Hom(x, -)``, with greedy generator choice.

    ``cap`` bounds the total dimension of each ``F_i`` (summed over objects).
    """
    rep = _Representables(c)
    order = _process_order(c)
    gens0: list[tuple[int, np.ndarray]] = []
    for y in order:
        if not any(rep.size(x, y) for x, _ in gens0):
            gens0.append((y, np.zeros(0)))
    gens = [gens0]
    for i in range(length):
        cur = gens[i]
        prev = gens[i - 1] if i > 0 else None
        new: list[tuple[int, np.ndarray]] = []
        total = sum(_module_dims(rep, cur, y)[0] for y in order)
        if total > cap:
            raise CapExceeded(f"resolution of {c.name or 'category'}", total, cap, degree=i)
        for y in order:
            dim_y, offs_y = _module_dims(rep, cur, y)
            if dim_y == 0:
                continue
            # boundary of F_i at y, then its kernel
            if prev is None:
                mat = np.ones((1, dim_y))
            else:
                blocks = [_images(rep, prev, xj, wj, y, p) for xj, wj in cur]
                mat = np.hstack(blocks) if blocks else np.zeros((0, dim_y))
            ker = _nullspace_mod_p(mat, p)
            if ker.shape[0] == 0:
                continue
            span = _Echelon(dim_y, p)
            for xg, vg in new:
                if rep.size(xg, y):
                    span.add(_images(rep, cur, xg, vg, y, p).T)
            if span.rank == ker.shape[0]:
                continue
            for k in range(ker.shape[0]):
                v = ker[k]
                if span.contains(v):
                    continue
                new.append((y, v.copy()))
                span.add(_images(rep, cur, y, v, y, p).T)
                if span.rank == ker.shape[0]:
                    break
            assert span.rank == ker.shape[0]
        gens.append(new)
    return ResolutionData(p, gens)


def resolution_is_complex(c: FinCategory, res: ResolutionData) -> bool:
    """``d ∘ d = 0`` on every generator, and ``ε ∘ d = 0`` in degree 1."""
    rep = _Representables(c)
    p, gens = res.p, res.gens
    for x, w in gens[1] if len(gens) > 1 else []:
        if int(np.sum(w)) % p:
            return False
    for i in range(2, len(gens)):
        prev, prev2 = gens[i - 1], gens[i - 2]
        for x, w in gens[i]:
            _, offs = _module_dims(rep, prev, x)
            dim_x, _ = _module_dims(rep, prev2, x)
            acc = np.zeros(dim_x)
            for l, (xl, vl) in enumerate(prev):
                size = rep.size(xl, x)
                if size:
                    acc += _images(rep, prev2, xl, vl, x, p) @ w[offs[l]: offs[l] + size]
            if np.any(np.mod(acc, p)):
                return False
    return True


def resolution_homology(c: FinCategory, p: int, d_max: int,
                        sub_objects: Iterable[int] | None = None,
                        resolution: ResolutionData | None = None,
                        cap: int = DEFAULT_CHAIN_CAP) -> HomologyResult:
    """``H_d`` of the nerve of ``c`` (relative to a downward-closed full
    subcategory if given) with F_p coefficients, computed as ``Tor`` of the
    constant functors over the category algebra.  Degrees ``<= d_max - 1`` are
    reliable, matching :func:`nerve_truncated`.
    """
    if p <= 1:
        raise ValueError("the resolution route needs a prime field")
    sub = set(sub_objects or ())
    if sub and not c.is_downward_closed(sub):
        raise CategoryError("relative subcategory must be downward closed")
    res = resolution or build_resolution(c, p, d_max, cap)
    if len(res.gens) < d_max + 1:
        raise ValueError("resolution too short")
    gens = res.gens
    keep = [[j for j, (x, _) in enumerate(g) if x not in sub] for g in gens]
    dims = [len(k) for k in keep[: d_max + 1]]
    rep = _Representables(c)
    ranks = [0] * (d_max + 2)
    for i in range(1, d_max + 1):
        row_of = {j: r for r, j in enumerate(keep[i - 1])}
        cols = []
        for j in keep[i]:
            x, w = gens[i][j]
            _, offs = _module_dims(rep, gens[i - 1], x)
            col: dict[int, int] = {}
            for l, (xl, _) in enumerate(gens[i - 1]):
                if l not in row_of:
                    continue
                size = rep.size(xl, x)
                s = int(np.sum(w[offs[l]: offs[l] + size])) % p
                if s:
                    col[row_of[l]] = s
            cols.append(col)
        ranks[i] = rank_mod_p(cols, p)
    betti = {d: dims[d] - ranks[d] - ranks[d + 1] for d in range(d_max + 1)}
    return HomologyResult(coeff_label(p), betti, {d: [] for d in betti}, d_max - 1,
                          method="resolution")


AUTO_NERVE_LIMIT = 250_000
AUTO_NERVE_LIMIT_FP = 60_000


def category_homology(c: FinCategory, p: int, d_max: int,
                      sub_objects: Iterable[int] | None = None, method: str = "auto",
                      representatives: Sequence[int] | None = None,
                      cap: int = DEFAULT_CHAIN_CAP) -> HomologyResult:
    """Homology of ``c`` (relative to the full subcategory on ``sub_objects``).

    ``method`` is ``"nerve"`` (full category), ``"skeleton"`` (nerve of a
    skeleton), ``"resolution"`` (F_p only, on a skeleton) or ``"auto"``.  Over
    F_p, ``auto`` uses the full nerve when its top-degree chain count is at
    most ``AUTO_NERVE_LIMIT_FP`` and the resolution otherwise; over Z it uses
    the full nerve up to ``AUTO_NERVE_LIMIT`` chains and the skeleton nerve
    beyond.  The relative subcategory must be closed under isomorphism.
    """
    sub = None if sub_objects is None else set(sub_objects)
    if method not in ("auto", "nerve", "skeleton", "resolution"):
        raise ValueError(f"unknown method {method!r}")
    if method == "auto":
        top = nerve_chain_counts(c, d_max)[-1]
        if top <= (AUTO_NERVE_LIMIT_FP if p else AUTO_NERVE_LIMIT):
            method = "nerve"
        else:
            method = "resolution" if p else "skeleton"
    if method == "nerve":
        res = nerve_homology(c, p, d_max, sub, cap)
        res.method = "nerve"
        return res
    if method == "resolution" and p == 0:
        raise ValueError("the resolution route needs F_p coefficients")
    sk = c.skeleton(representatives)
    reps = sk.parent_objects  # type: ignore[attr-defined]
    sk_sub = None
    if sub is not None:
        sk_sub = [i for i, x in enumerate(reps) if x in sub]
    if method == "skeleton":
        res = nerve_homology(sk, p, d_max, sk_sub, cap)
        res.method = "skeleton-nerve"
        return res
    return resolution_homology(sk, p, d_max, sk_sub, cap=cap)


def random_category(seed: int, n_objects: int = 3, n_generators: int = 4, max_size: int = 3,
                    max_morphisms: int = 60) -> FinCategory | None:
    """Random subcategory of finite sets and maps, closed under composition.

    Objects are sets ``{0..k-1}`` with random ``k <= max_size``; random maps are
    added and the set of morphisms is closed under composition.  Returns
    ``None`` when the closure exceeds ``max_morphisms``.
    """
    rng = random.Random(seed)
    sizes = [rng.randint(1, max_size) for _ in range(n_objects)]
    mors = {(x, x, tuple(range(sizes[x]))) for x in range(n_objects)}
    for _ in range(n_generators):
        x, y = rng.randrange(n_objects), rng.randrange(n_objects)
        mors.add((x, y, tuple(rng.randrange(sizes[y]) for _ in range(sizes[x]))))
    while True:
        new = {(x, z, tuple(g[i] for i in f))
               for (x, y, f) in mors for (y2, z, g) in mors if y2 == y}
        if new <= mors:
            break
        mors |= new
        if len(mors) > max_morphisms:
            return None
    ordered = sorted(mors)
    index = {m: i for i, m in enumerate(ordered)}

    def comp(f: int, g: int) -> int:
        x, _, gm = ordered[g]
        _, z, fm = ordered[f]
        return index[(x, z, tuple(fm[i] for i in gm))]

    return FinCategory(list(range(n_objects)), [m[0] for m in ordered], [m[1] for m in ordered],
                       [index[(x, x, tuple(range(sizes[x])))] for x in range(n_objects)], comp,
                       morph_labels=ordered, name=f"random{seed}")
