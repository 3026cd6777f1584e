"""Combinatorics of ordered sets with adjoined extremes, partitioned ordered
sets, snug substring partitions and filtered dimension sequences.

Conventions:

* An order map ``θ: [m] -> [n]`` of the simplex category is a nondecreasing
  tuple of length ``m + 1`` with values in ``0..n``.
* An :class:`OrdPmMorphism` ``(m)± -> (n)±`` stores the images of
  ``1..m``; ``⊥`` is encoded as ``0`` and ``⊤`` as ``n + 1``.
* A :class:`JObject` ``I_P`` stores the elements of ``I`` (labels, in order),
  the labels of ``P`` and the partitioning map as positions in ``P``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Hashable, Iterator, Sequence

BOT = "⊥"
TOP = "⊤"


# ---------------------------------------------------------------------------
# simplex category versus Ord±


def order_maps(m: int, n: int) -> Iterator[tuple[int, ...]]:
    """All nondecreasing maps ``[m] -> [n]``."""
    return itertools.combinations_with_replacement(range(n + 1), m + 1)


def is_order_map(theta: Sequence[int], n: int) -> bool:
    return all(0 <= x <= n for x in theta) and all(a <= b for a, b in zip(theta, theta[1:]))


@dataclass(frozen=True)
class OrdPmMorphism:
    """Order preserving ``(m)± -> (n)±`` fixing both extremes."""

    m: int
    n: int
    values: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.values) != self.m:
            raise ValueError("need one value per element of the source")
        full = (0,) + self.values + (self.n + 1,)
        if any(not 0 <= v <= self.n + 1 for v in self.values) or \
                any(a > b for a, b in zip(full, full[1:])):
            raise ValueError("map is not order preserving")

    def __call__(self, i: int) -> int:
        if i == 0:
            return 0
        if i == self.m + 1:
            return self.n + 1
        return self.values[i - 1]

    def compose(self, other: "OrdPmMorphism") -> "OrdPmMorphism":
        """``self ∘ other``; ``other`` is applied first."""
        if other.n != self.m:
            raise ValueError("morphisms are not composable")
        return OrdPmMorphism(other.m, self.n, tuple(self(v) for v in other.values))

    @classmethod
    def identity(cls, n: int) -> "OrdPmMorphism":
        return cls(n, n, tuple(range(1, n + 1)))

    def label(self, v: int) -> str:
        return BOT if v == 0 else TOP if v == self.n + 1 else str(v)

    def __str__(self) -> str:
        return "[" + " ".join(f"{i}->{self.label(v)}" for i, v in enumerate(self.values, 1)) + "]"


def ordpm_morphisms(m: int, n: int) -> Iterator[OrdPmMorphism]:
    for vals in itertools.combinations_with_replacement(range(n + 2), m):
        yield OrdPmMorphism(m, n, vals)


def delta_to_ordpm(theta: Sequence[int], n: int) -> OrdPmMorphism:
    """``θ: [m] -> [n]`` gives ``(n)± -> (m)±``:
    ``i ↦ ⊥`` if ``i <= θ(0)``, ``j`` if ``θ(j-1) < i <= θ(j)``, ``⊤`` if ``θ(m) < i``."""
    theta = tuple(theta)
    if not theta or not is_order_map(theta, n):
        raise ValueError("θ is not an order preserving map into [n]")
    m = len(theta) - 1
    vals = []
    for i in range(1, n + 1):
        if i <= theta[0]:
            vals.append(0)
        elif i > theta[m]:
            vals.append(m + 1)
        else:
            vals.append(next(j for j in range(1, m + 1) if theta[j - 1] < i <= theta[j]))
    return OrdPmMorphism(n, m, tuple(vals))


def ordpm_to_delta(alpha: OrdPmMorphism) -> tuple[int, ...]:
    """``α: (m)± -> (n)±`` gives ``[n] -> [m]``, ``i ↦ max of α^{-1}({⊥, 1..i})``
    with ``⊥`` read as ``0``."""
    out = []
    for i in range(alpha.n + 1):
        pre = [k for k in range(alpha.m + 1) if alpha(k) <= i]
        out.append(max(pre))
    return tuple(out)


def compose_delta(psi: Sequence[int], theta: Sequence[int]) -> tuple[int, ...]:
    """``ψ ∘ θ`` for order maps given as tuples."""
    return tuple(psi[t] for t in theta)


def face_map(n: int, i: int) -> OrdPmMorphism:
    """The Segal face ``θ_i: (n)± -> (1)±``: ``j<i ↦ ⊥``, ``i ↦ 1``, ``j>i ↦ ⊤``."""
    if not 1 <= i <= n:
        raise ValueError("need 1 <= i <= n")
    return OrdPmMorphism(n, 1, tuple(0 if j < i else 1 if j == i else 2 for j in range(1, n + 1)))


# ---------------------------------------------------------------------------
# partitioned linearly ordered sets


@dataclass(frozen=True)
class JObject:
    """``s: I -> P`` order preserving; ``s`` holds positions in ``P``."""

    elements: tuple[Hashable, ...]
    parts: tuple[Hashable, ...]
    s: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.s) != len(self.elements):
            raise ValueError("partitioning map needs one value per element")
        if any(not 0 <= x < len(self.parts) for x in self.s):
            raise ValueError("partitioning map leaves P")
        if any(a > b for a, b in zip(self.s, self.s[1:])):
            raise ValueError("partitioning map is not order preserving")

    @classmethod
    def of(cls, blocks: Sequence[Sequence[Hashable]], parts: Sequence[Hashable] | None = None
           ) -> "JObject":
        """From ordered blocks ``I_p`` (empty blocks allowed)."""
        blocks = [tuple(b) for b in blocks]
        parts = tuple(parts) if parts is not None else tuple(range(len(blocks)))
        elems = tuple(x for b in blocks for x in b)
        s = tuple(p for p, b in enumerate(blocks) for _ in b)
        return cls(elems, parts, s)

    @property
    def surjective(self) -> bool:
        return set(self.s) == set(range(len(self.parts)))

    def block(self, p: int) -> tuple[int, ...]:
        return tuple(i for i, x in enumerate(self.s) if x == p)

    def blocks(self) -> list[tuple[Hashable, ...]]:
        return [tuple(self.elements[i] for i in self.block(p)) for p in range(len(self.parts))]

    def __str__(self) -> str:
        if not self.elements:
            return "∅_∅" if not self.parts else "∅_{" + ",".join(map(str, self.parts)) + "}"
        return "".join("(" + "".join(map(str, b)) + ")" for b in self.blocks())


EMPTY_EMPTY = JObject((), (), ())
EMPTY_POINT = JObject((), ("*",), ())


def _order_preserving(f: Sequence[int]) -> bool:
    return all(a <= b for a, b in zip(f, f[1:]))


@dataclass(frozen=True)
class JMorphism:
    """``(θ, ρ): I_P -> J_Q`` with ``θ: I -> J``, ``ρ: Q -> P`` and ``s = ρ ∘ r ∘ θ``."""

    source: JObject
    target: JObject
    theta: tuple[int, ...]
    rho: tuple[int, ...]

    def __post_init__(self) -> None:
        src, tgt = self.source, self.target
        if len(self.theta) != len(src.elements) or len(self.rho) != len(tgt.parts):
            raise ValueError("θ or ρ has the wrong length")
        if any(not 0 <= t < len(tgt.elements) for t in self.theta) or \
                any(not 0 <= r < len(src.parts) for r in self.rho):
            raise ValueError("θ or ρ leaves its codomain")
        if not (_order_preserving(self.theta) and _order_preserving(self.rho)):
            raise ValueError("θ and ρ must be order preserving")
        for i, t in enumerate(self.theta):
            if src.s[i] != self.rho[tgt.s[t]]:
                raise ValueError("square does not commute")

    @classmethod
    def identity(cls, obj: JObject) -> "JMorphism":
        return cls(obj, obj, tuple(range(len(obj.elements))), tuple(range(len(obj.parts))))

    @property
    def is_collapse(self) -> bool:
        return self.source.parts == self.target.parts and self.rho == tuple(range(len(self.rho)))

    @property
    def is_splitting(self) -> bool:
        return self.source.elements == self.target.elements and \
            self.theta == tuple(range(len(self.theta)))


def compose(second: JMorphism, first: JMorphism) -> JMorphism:
    """``second ∘ first`` is ``(θ₂θ₁, ρ₁ρ₂)``."""
    if first.target != second.source:
        raise ValueError("morphisms are not composable")
    theta = tuple(second.theta[t] for t in first.theta)
    rho = tuple(first.rho[r] for r in second.rho)
    return JMorphism(first.source, second.target, theta, rho)


def factor_collapse_splitting(m: JMorphism) -> tuple[JMorphism, JMorphism]:
    """``I_P -> J_P -> J_Q``: the collapse ``(θ, id)`` then the splitting ``(id, ρ)``,
    where ``J_P`` is partitioned by ``ρ ∘ r``."""
    src, tgt = m.source, m.target
    mid = JObject(tgt.elements, src.parts, tuple(m.rho[q] for q in tgt.s))
    collapse = JMorphism(src, mid, m.theta, tuple(range(len(src.parts))))
    split = JMorphism(mid, tgt, tuple(range(len(tgt.elements))), m.rho)
    return collapse, split


def refines(source: JObject, target: JObject, theta: Sequence[int]) -> bool:
    """Every ``θ^{-1}(J_q)`` lies inside a single ``I_p``."""
    for q in range(len(target.parts)):
        pre = {source.s[i] for i, t in enumerate(theta) if target.s[t] == q}
        if len(pre) > 1:
            return False
    return True


def refinement_zigzag(source: JObject, target: JObject, theta: Sequence[int]
                      ) -> tuple[JMorphism, JMorphism, JMorphism]:
    """``I_P -> I_{Q_θ} <- I_Q -> J_Q`` for ``θ`` refining the partitions.

    Returns ``((id, ρ_θ), (id, ι_θ), (θ, id))``.
    """
    theta = tuple(theta)
    if len(theta) != len(source.elements) or not _order_preserving(theta):
        raise ValueError("θ must be an order preserving map I -> J")
    if not refines(source, target, theta):
        raise ValueError("θ does not refine the partitions")
    r_theta = [target.s[t] for t in theta]
    q_theta = sorted(set(r_theta))
    pos = {q: k for k, q in enumerate(q_theta)}
    rho_theta = tuple(next(source.s[i] for i in range(len(theta)) if r_theta[i] == q)
                      for q in q_theta)
    ids = tuple(range(len(source.elements)))
    i_qt = JObject(source.elements, tuple(target.parts[q] for q in q_theta),
                   tuple(pos[q] for q in r_theta))
    i_q = JObject(source.elements, target.parts, tuple(r_theta))
    first = JMorphism(source, i_qt, ids, rho_theta)
    second = JMorphism(i_q, i_qt, ids, tuple(q_theta))
    third = JMorphism(i_q, target, theta, tuple(range(len(target.parts))))
    return first, second, third


def j_morphisms(source: JObject, target: JObject) -> list[JMorphism]:
    """All morphisms ``I_P -> J_Q`` by exhaustive enumeration."""
    out = []
    ni, nj = len(source.elements), len(target.elements)
    nq, np_ = len(target.parts), len(source.parts)
    for theta in itertools.combinations_with_replacement(range(nj), ni) if nj else ([()] if not ni else []):
        for rho in itertools.combinations_with_replacement(range(np_), nq) if np_ else ([()] if not nq else []):
            try:
                out.append(JMorphism(source, target, tuple(theta), tuple(rho)))
            except ValueError:
                pass
    return out


# ---------------------------------------------------------------------------
# maximally snug substrings


def parse_context(text: str) -> list[tuple[str, ...]]:
    """``"1<2<3|4<5|6"`` gives the ordered alphabets ``(1,2,3), (4,5), (6,)``."""
    if not text:
        return []
    alphabets = [tuple(x.strip() for x in part.split("<")) for part in text.split("|")]
    seen = [x for a in alphabets for x in a]
    if any(not x for x in seen) or len(set(seen)) != len(seen):
        raise ValueError(f"malformed context {text!r}")
    return alphabets


def parse_word(text: str, context: Sequence[Sequence[str]]) -> tuple[str, ...]:
    """Letters separated by spaces or commas, or one character each."""
    gens = {x for a in context for x in a}
    letters = tuple(x for x in text.replace(",", " ").split()) if ("," in text or " " in text) \
        else tuple(text)
    bad = [x for x in letters if x not in gens]
    if bad:
        raise ValueError(f"letters {bad} are not generators of the context")
    return letters


def is_snug(run: Sequence[str], context: Sequence[Sequence[str]]) -> bool:
    """A nonempty consecutive ascending run inside one alphabet."""
    if not run:
        return False
    for a in context:
        if run[0] in a:
            k = a.index(run[0])
            return tuple(run) == tuple(a[k:k + len(run)])
    return False


def snug_partition(context: Sequence[Sequence[str]], word: Sequence[str]) -> JObject:
    """Partition of ``word`` into maximally snug substrings.

    A run grows while the next letter is the successor of the previous one in
    the same alphabet.  The empty word gives ``∅_∅``.
    """
    succ = {a[k]: a[k + 1] for a in context for k in range(len(a) - 1)}
    gens = {x for a in context for x in a}
    runs: list[list[str]] = []
    for x in word:
        if x not in gens:
            raise ValueError(f"{x!r} is not a generator")
        if runs and succ.get(runs[-1][-1]) == x:
            runs[-1].append(x)
        else:
            runs.append([x])
    parts = tuple("(" + "".join(r) + ")" for r in runs)
    return JObject.of(runs, parts)


def format_partition(obj: JObject) -> str:
    """``"(123)(45)(6)"``; the empty partition prints as ``∅_∅``."""
    return "".join(obj.parts) if obj.parts else str(obj)


def snug_partitions_bruteforce(context: Sequence[Sequence[str]], word: Sequence[str]
                               ) -> list[tuple[tuple[str, ...], ...]]:
    """All partitions into snug parts with no two adjacent parts mergeable."""
    n = len(word)
    out = []
    for cuts in itertools.product([False, True], repeat=max(n - 1, 0)):
        parts, cur = [], [word[0]] if n else []
        for k, c in enumerate(cuts):
            if c:
                parts.append(tuple(cur))
                cur = [word[k + 1]]
            else:
                cur.append(word[k + 1])
        if cur:
            parts.append(tuple(cur))
        if all(is_snug(p, context) for p in parts) and \
                not any(is_snug(a + b, context) for a, b in zip(parts, parts[1:])):
            out.append(tuple(parts))
    return out


# ---------------------------------------------------------------------------
# reduced filtered dimension sequences


@dataclass(frozen=True)
class FilteredDimSeq:
    """``<d^(p)>``: an ordered tuple of nonempty blocks of positive dimensions."""

    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if any(not b for b in self.blocks):
            raise ValueError("blocks of a filtered dimension sequence are nonempty")
        if any(d < 1 for b in self.blocks for d in b):
            raise ValueError("reduced sequences have positive dimensions")

    @property
    def obj(self) -> JObject:
        return JObject.of([[(p, k) for k in range(len(b))] for p, b in enumerate(self.blocks)])

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(d for b in self.blocks for d in b)

    @property
    def total(self) -> int:
        return sum(self.dims)

    @property
    def length(self) -> int:
        return len(self.dims)

    def __str__(self) -> str:
        return "<" + ",".join("(" + ",".join(map(str, b)) + ")" for b in self.blocks) + ">"


def fred_objects(total: int) -> list[FilteredDimSeq]:
    """All reduced filtered dimension sequences of the given total (nonempty)."""
    out = []
    for comp in _compositions(total):
        for cuts in itertools.product([False, True], repeat=len(comp) - 1):
            blocks, cur = [], [comp[0]]
            for k, c in enumerate(cuts):
                if c:
                    blocks.append(tuple(cur))
                    cur = [comp[k + 1]]
                else:
                    cur.append(comp[k + 1])
            blocks.append(tuple(cur))
            out.append(FilteredDimSeq(tuple(blocks)))
    return sorted(out, key=lambda d: (d.length, d.blocks))


def _compositions(n: int) -> list[tuple[int, ...]]:
    if n == 0:
        return []
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
    return out


def fred_hom(d: FilteredDimSeq, e: FilteredDimSeq) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Morphisms ``D -> E``: ``(θ, ρ)`` in the partitioned category with
    ``e_j = Σ_{θ(i)=j} d_i``, listed as ``(θ, ρ)`` position tuples.

    Positive dimensions force ``θ`` surjective, so only surjections are tried;
    surjective partitioning maps then force ``ρ``.
    """
    src, tgt = d.obj, e.obj
    dd, ee = d.dims, e.dims
    m, n = len(dd), len(ee)
    out = []
    if n > m:
        return out
    for cuts in itertools.combinations(range(1, m), n - 1):
        bounds = (0,) + cuts + (m,)
        if any(sum(dd[bounds[j]:bounds[j + 1]]) != ee[j] for j in range(n)):
            continue
        theta = tuple(j for j in range(n) for _ in range(bounds[j], bounds[j + 1]))
        rho = [None] * len(tgt.parts)
        ok = True
        for i, t in enumerate(theta):
            q = tgt.s[t]
            if rho[q] is None:
                rho[q] = src.s[i]
            elif rho[q] != src.s[i]:
                ok = False
                break
        if not ok:
            continue
        try:
            JMorphism(src, tgt, theta, tuple(rho))
        except ValueError:
            continue
        out.append((theta, tuple(rho)))
    return out


def fred_hom_bruteforce(d: FilteredDimSeq, e: FilteredDimSeq
                        ) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Oracle for :func:`fred_hom` by filtering every morphism of the partitioned category."""
    dd, ee = d.dims, e.dims
    out = []
    for mor in j_morphisms(d.obj, e.obj):
        sums = [0] * len(ee)
        for i, t in enumerate(mor.theta):
            sums[t] += dd[i]
        if tuple(sums) == ee:
            out.append((mor.theta, mor.rho))
    return sorted(out)


def rho_choices(source: JObject, target: JObject, theta: Sequence[int]) -> list[tuple[int, ...]]:
    """All ``ρ`` making ``(θ, ρ)`` a morphism."""
    out = []
    for rho in itertools.product(range(len(source.parts)), repeat=len(target.parts)):
        try:
            JMorphism(source, target, tuple(theta), rho)
        except ValueError:
            continue
        out.append(rho)
    return out


# ---------------------------------------------------------------------------
# free monoid word counts


def free_monoid_words(sizes: Sequence[int], n: int, bound: int) -> list[int]:
    """Number of ``n``-tuples of words of each total degree ``0..bound``.

    ``sizes[i]`` generators sit in degree ``i + 1``; the count is the
    coefficient list of ``(1 / (1 - A(x)))^n`` with ``A(x) = Σ sizes[i] x^{i+1}``.
    """
    if n < 0 or bound < 0:
        raise ValueError("need n >= 0 and bound >= 0")
    a = [0] * (bound + 1)
    for i, s in enumerate(sizes):
        if i + 1 <= bound:
            a[i + 1] = s
    # W = 1 / (1 - A): W_k = Σ_{j>=1} a_j W_{k-j}
    w = [1] + [0] * bound
    for k in range(1, bound + 1):
        w[k] = sum(a[j] * w[k - j] for j in range(1, k + 1))
    out = [1] + [0] * bound
    for _ in range(n):
        out = [sum(out[j] * w[k - j] for j in range(k + 1)) for k in range(bound + 1)]
    return out


def free_monoid_words_bruteforce(sizes: Sequence[int], n: int, bound: int) -> list[int]:
    """Enumerate ``n``-tuples of words explicitly (small inputs only)."""
    gens = [(i + 1, k) for i, s in enumerate(sizes) for k in range(s)]
    words_by_degree: dict[int, int] = {0: 1}
    frontier = [((), 0)]
    while frontier:
        nxt = []
        for w, deg in frontier:
            for g in gens:
                nd = deg + g[0]
                if nd <= bound:
                    words_by_degree[nd] = words_by_degree.get(nd, 0) + 1
                    nxt.append((w + (g,), nd))
        frontier = nxt
    out = [0] * (bound + 1)
    for degs in itertools.product(range(bound + 1), repeat=n):
        if sum(degs) <= bound:
            c = 1
            for x in degs:
                c *= words_by_degree.get(x, 0)
            out[sum(degs)] += c
    return out
