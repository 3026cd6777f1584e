"""Exact homology of chain complexes over Z and F_p.

Boundary matrices are stored as ``scipy.sparse.csc_matrix`` of int64 (chain
complexes coming from nerves and order complexes have entries in a small
range).  All elimination is done on Python ints, which never overflow.

Two independent elimination paths:

* over F_p, sparse Gaussian elimination with a Markowitz-style pivot choice;
* over Z, sparse elimination on unit pivots (Schur complement updates) until
  no unit is left, followed by a dense Smith normal form of the remainder.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp

IntMatrix = list[list[int]]


def coeff_label(p: int) -> str:
    """``0`` stands for the integers, a prime ``p`` for F_p."""
    return "Z" if p == 0 else f"F{p}"


def parse_coeff(text: str) -> int:
    """``"Z"`` -> 0, ``"Fp:3"``/``"F3"`` -> 3."""
    from .ring_linalg import is_prime

    t = text.strip()
    if t.upper() == "Z":
        return 0
    for prefix in ("Fp:", "FP:", "fp:", "F"):
        if t.startswith(prefix):
            try:
                p = int(t[len(prefix):])
            except ValueError:
                break
            if not is_prime(p):
                raise ValueError(f"coefficient characteristic {p} is not prime")
            return p
    raise ValueError(f"unrecognised coefficient spec {text!r}")


# ---------------------------------------------------------------------------
# chain complexes


class ChainComplex:
    """Finite (possibly truncated) chain complex of free modules.

    ``dims[i]`` is the rank in degree ``min_degree + i``; ``boundaries[i]`` is
    the map out of that degree (``boundaries[0]`` is the zero map).  ``∂∘∂ = 0``
    is checked at construction.  If ``truncated`` is set, the top degree lacks
    its incoming boundary and homology there is flagged unreliable.
    """

    def __init__(self, dims: Sequence[int], boundaries: Sequence[sp.spmatrix | None],
                 min_degree: int = 0, truncated: bool = False, check: bool = True,
                 labels: Sequence[Sequence] | None = None):
        self.dims = [int(n) for n in dims]
        self.min_degree = min_degree
        self.truncated = truncated
        self.labels = labels
        bds = []
        for i, n in enumerate(self.dims):
            b = boundaries[i] if i < len(boundaries) else None
            rows = self.dims[i - 1] if i > 0 else 0
            if b is None or i == 0:
                b = sp.csc_matrix((rows, n), dtype=np.int64)
            b = sp.csc_matrix(b, dtype=np.int64)
            if b.shape != (rows, n):
                raise ValueError(f"boundary in degree {i + min_degree} has shape {b.shape}, "
                                 f"expected {(rows, n)}")
            b.eliminate_zeros()
            bds.append(b)
        self.boundaries = bds
        if check:
            self.check_d_squared()

    @property
    def max_degree(self) -> int:
        return self.min_degree + len(self.dims) - 1

    @property
    def degrees(self) -> range:
        return range(self.min_degree, self.max_degree + 1)

    def dim(self, d: int) -> int:
        i = d - self.min_degree
        return self.dims[i] if 0 <= i < len(self.dims) else 0

    def boundary(self, d: int) -> sp.csc_matrix:
        """``∂_d : C_d -> C_{d-1}``; zero outside the stored range."""
        i = d - self.min_degree
        if 0 < i < len(self.dims):
            return self.boundaries[i]
        return sp.csc_matrix((self.dim(d - 1), self.dim(d)), dtype=np.int64)

    def check_d_squared(self) -> None:
        for i in range(2, len(self.dims)):
            prod = (self.boundaries[i - 1] @ self.boundaries[i]).tocoo()
            if np.any(prod.data != 0):
                raise ValueError(f"∂∘∂ ≠ 0 at degree {i + self.min_degree}")

    @property
    def reliable_max(self) -> int:
        return self.max_degree - 1 if self.truncated else self.max_degree

    def euler_characteristic(self) -> int:
        return sum((-1) ** d * self.dim(d) for d in self.degrees)

    def quotient(self, sub: Mapping[int, Iterable[int]]) -> "ChainComplex":
        """``C/sub`` for a subcomplex given by basis indices per degree."""
        keep = {}
        subs = {d: set(sub.get(d, ())) for d in self.degrees}
        for d in self.degrees:
            b = self.boundary(d).tocsc()
            for c in subs[d]:
                rows = b.indices[b.indptr[c]:b.indptr[c + 1]]
                vals = b.data[b.indptr[c]:b.indptr[c + 1]]
                bad = [r for r, v in zip(rows, vals) if v != 0 and r not in subs.get(d - 1, set())]
                if bad:
                    raise ValueError(f"selection is not a subcomplex at degree {d}")
            keep[d] = [i for i in range(self.dim(d)) if i not in subs[d]]
        dims, bds = [], []
        for d in self.degrees:
            dims.append(len(keep[d]))
            if d == self.min_degree:
                bds.append(None)
            else:
                b = self.boundary(d).tocsr()[keep[d - 1], :].tocsc()[:, keep[d]]
                bds.append(b)
        return ChainComplex(dims, bds, self.min_degree, self.truncated, check=False)


def columns_of(m: sp.spmatrix) -> list[dict[int, int]]:
    """Sparse matrix as a list of ``{row: value}`` column dicts (Python ints)."""
    m = sp.csc_matrix(m)
    out = []
    for c in range(m.shape[1]):
        lo, hi = m.indptr[c], m.indptr[c + 1]
        out.append({int(r): int(v) for r, v in zip(m.indices[lo:hi], m.data[lo:hi]) if v})
    return out


def from_columns(cols: Sequence[Mapping[int, int]], nrows: int) -> sp.csc_matrix:
    rows, cidx, vals = [], [], []
    for c, col in enumerate(cols):
        for r, v in col.items():
            if v:
                rows.append(r)
                cidx.append(c)
                vals.append(v)
    return sp.csc_matrix((np.array(vals, dtype=np.int64), (rows, cidx)),
                         shape=(nrows, len(cols)))


# ---------------------------------------------------------------------------
# dense Smith normal form


def _identity(n: int) -> IntMatrix:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def smith_normal_form(a: Sequence[Sequence[int]] | sp.spmatrix | np.ndarray,
                      with_inverses: bool = False):
    """Smith normal form ``U·A·V = D`` over the integers.

    Pivots on the smallest-magnitude nonzero entry of the active block.

    Returns:
        ``(U, D, V)`` as lists of lists of Python ints, or
        ``(U, D, V, U_inv, V_inv)`` when ``with_inverses`` is set.
    """
    if sp.issparse(a):
        a = a.toarray()
    d = [[int(x) for x in row] for row in np.asarray(a, dtype=object).tolist()] \
        if not isinstance(a, list) else [[int(x) for x in row] for row in a]
    m = len(d)
    n = len(d[0]) if m else 0
    if m and any(len(r) != n for r in d):
        raise ValueError("ragged matrix")
    u, v = _identity(m), _identity(n)
    ui, vi = (_identity(m), _identity(n)) if with_inverses else (None, None)

    def row_add(i: int, j: int, q: int) -> None:  # row_i += q * row_j
        if q == 0:
            return
        di, dj = d[i], d[j]
        for k in range(n):
            if dj[k]:
                di[k] += q * dj[k]
        ri, rj = u[i], u[j]
        for k in range(m):
            if rj[k]:
                ri[k] += q * rj[k]
        if ui is not None:
            for row in ui:  # col_j -= q * col_i
                if row[i]:
                    row[j] -= q * row[i]

    def row_swap(i: int, j: int) -> None:
        d[i], d[j] = d[j], d[i]
        u[i], u[j] = u[j], u[i]
        if ui is not None:
            for row in ui:
                row[i], row[j] = row[j], row[i]

    def row_neg(i: int) -> None:
        d[i] = [-x for x in d[i]]
        u[i] = [-x for x in u[i]]
        if ui is not None:
            for row in ui:
                row[i] = -row[i]

    def col_add(i: int, j: int, q: int) -> None:  # col_i += q * col_j
        if q == 0:
            return
        for row in d:
            if row[j]:
                row[i] += q * row[j]
        for row in v:
            if row[j]:
                row[i] += q * row[j]
        if vi is not None:
            ri, rj = vi[i], vi[j]  # row_j -= q * row_i
            for k in range(n):
                if ri[k]:
                    rj[k] -= q * ri[k]

    def col_swap(i: int, j: int) -> None:
        for row in d:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]
        if vi is not None:
            vi[i], vi[j] = vi[j], vi[i]

    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            row = d[i]
            for j in range(t, n):
                x = row[j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        if i != t:
            row_swap(i, t)
        if j != t:
            col_swap(j, t)
        while True:
            piv = d[t][t]
            moved = False
            for i in range(t + 1, m):
                x = d[i][t]
                if x:
                    row_add(i, t, -(x // piv))
                    if d[i][t]:
                        row_swap(i, t)
                        moved = True
                        break
            if moved:
                continue
            piv = d[t][t]
            for j in range(t + 1, n):
                x = d[t][j]
                if x:
                    col_add(j, t, -(x // piv))
                    if d[t][j]:
                        col_swap(j, t)
                        moved = True
                        break
            if moved:
                continue
            piv = d[t][t]
            bad = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if d[i][j] % piv:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            row_add(t, bad, 1)
        if d[t][t] < 0:
            row_neg(t)
        t += 1
    if with_inverses:
        return u, d, v, ui, vi
    return u, d, v


def snf_diagonal(d: IntMatrix) -> list[int]:
    return [d[i][i] for i in range(min(len(d), len(d[0]) if d else 0))]


def _dense_invariants(cols: Sequence[Mapping[int, int]]) -> list[int]:
    """Nonzero SNF invariants of a small matrix given by column dicts."""
    cols = [c for c in cols if c]
    if not cols:
        return []
    rows = sorted({r for c in cols for r in c})
    pos = {r: i for i, r in enumerate(rows)}
    mat = [[0] * len(cols) for _ in rows]
    for j, c in enumerate(cols):
        for r, x in c.items():
            mat[pos[r]][j] = x
    _, d, _ = smith_normal_form(mat)
    return [x for x in snf_diagonal(d) if x]


# ---------------------------------------------------------------------------
# sparse elimination


def _sparse_eliminate(cols: Sequence[Mapping[int, int]], p: int,
                      record: list | None = None) -> tuple[int, list[dict[int, int]]]:
    """Sparse Schur-complement elimination.

    Over F_p (``p > 0``) every nonzero entry is a pivot; over Z (``p == 0``)
    only entries ``±1`` are.  Columns are visited shortest first and the pivot
    row is the shortest row among eligible entries.

    Returns:
        ``(number of pivots, leftover nonzero columns)``; the leftover is empty
        over F_p.  If ``record`` is a list, ``(row, column dict)`` is appended
        for every pivot, in elimination order.
    """
    active: dict[int, dict[int, int]] = {}
    rows: dict[int, set[int]] = {}
    heap: list[tuple[int, int]] = []
    for c, col in enumerate(cols):
        col = {r: (x % p if p else x) for r, x in col.items()}
        col = {r: x for r, x in col.items() if x}
        if not col:
            continue
        active[c] = col
        for r in col:
            rows.setdefault(r, set()).add(c)
        heap.append((len(col), c))
    heapq.heapify(heap)
    deferred: set[int] = set()
    npiv = 0
    while heap:
        ln, c = heapq.heappop(heap)
        col = active.get(c)
        if col is None or len(col) != ln:
            continue
        if p:
            r = min(col, key=lambda rr: (len(rows[rr]), rr))
        else:
            units = [rr for rr, x in col.items() if x == 1 or x == -1]
            if not units:
                deferred.add(c)
                continue
            r = min(units, key=lambda rr: (len(rows[rr]), rr))
        v = col[r]
        vinv = pow(v, p - 2, p) if p else v  # v = ±1 is its own inverse over Z
        if record is not None:
            record.append((r, dict(col)))
        for c2 in list(rows[r]):
            if c2 == c:
                continue
            col2 = active[c2]
            f = col2[r] * vinv
            if p:
                f %= p
            for rr, x in col.items():
                y = col2.get(rr, 0) - f * x
                if p:
                    y %= p
                if y:
                    if rr not in col2:
                        rows[rr].add(c2)
                    col2[rr] = y
                elif rr in col2:
                    del col2[rr]
                    rows[rr].discard(c2)
            if col2:
                heapq.heappush(heap, (len(col2), c2))
                deferred.discard(c2)
            else:
                del active[c2]
                deferred.discard(c2)
        for rr in col:
            rows[rr].discard(c)
        del rows[r]
        del active[c]
        npiv += 1
    leftover = [active[c] for c in sorted(active)]
    return npiv, leftover


def rank_mod_p(m: sp.spmatrix | Sequence[Mapping[int, int]], p: int) -> int:
    cols = columns_of(m) if sp.issparse(m) else m
    r, left = _sparse_eliminate(cols, p)
    assert not left
    return r


def integer_invariants(m: sp.spmatrix | Sequence[Mapping[int, int]]) -> list[int]:
    """Nonzero Smith invariants (with multiplicity, ascending, 1s included)."""
    cols = columns_of(m) if sp.issparse(m) else m
    units, left = _sparse_eliminate(cols, 0)
    core = _dense_invariants(left)
    return [1] * units + core


# ---------------------------------------------------------------------------
# homology


@dataclass
class HomologyResult:
    """Per-degree homology.  Over F_p ``betti`` holds dimensions."""

    coeff: str
    betti: dict[int, int]
    torsion: dict[int, list[int]] = field(default_factory=dict)
    reliable_max: int = 0
    method: str = "chains"

    @property
    def degrees(self) -> list[int]:
        return sorted(self.betti)

    def reliable(self, d: int) -> bool:
        return d <= self.reliable_max

    def is_zero(self, d: int) -> bool:
        return self.betti.get(d, 0) == 0 and not self.torsion.get(d)

    def group_str(self, d: int) -> str:
        parts = []
        b = self.betti.get(d, 0)
        base = "Z" if self.coeff == "Z" else self.coeff
        if b:
            parts.append(base if b == 1 else f"{base}^{b}")
        for t in self.torsion.get(d, []):
            parts.append(f"Z/{t}")
        return " + ".join(parts) if parts else "0"

    def table(self) -> dict[str, dict]:
        return {str(d): {"betti": self.betti[d], "torsion": list(self.torsion.get(d, [])),
                         "reliable": self.reliable(d)} for d in self.degrees}

    def to_json(self) -> dict:
        return {"coeff": self.coeff, "reliable_max": self.reliable_max, "method": self.method,
                "degrees": self.table()}


def homology(c: ChainComplex, p: int = 0) -> HomologyResult:
    """Homology of ``c`` with coefficients Z (``p == 0``) or F_p."""
    ranks: dict[int, int] = {}
    invs: dict[int, list[int]] = {}
    for d in c.degrees:
        b = c.boundary(d)
        if d == c.min_degree or b.nnz == 0:
            ranks[d] = 0
            invs[d] = []
            continue
        if p:
            ranks[d] = rank_mod_p(b, p)
        else:
            iv = integer_invariants(b)
            ranks[d] = len(iv)
            invs[d] = iv
    betti, torsion = {}, {}
    for d in c.degrees:
        betti[d] = c.dim(d) - ranks[d] - ranks.get(d + 1, 0)
        if not p:
            torsion[d] = sorted(x for x in invs.get(d + 1, []) if x > 1)
    return HomologyResult(coeff_label(p), betti, torsion, c.reliable_max)


def relative_homology(c: ChainComplex, sub: Mapping[int, Iterable[int]], p: int = 0
                      ) -> HomologyResult:
    """Homology of ``C/sub``; raises ``ValueError`` if ``sub`` is not a subcomplex."""
    return homology(c.quotient(sub), p)


def uct_consistent(hz: HomologyResult, hp: HomologyResult, p: int) -> dict[int, bool]:
    """Universal coefficients check degree by degree (reliable degrees only)."""
    out = {}
    for d in hz.degrees:
        if d not in hp.betti or not (hz.reliable(d) and hp.reliable(d)):
            continue
        expect = hz.betti[d] + sum(1 for t in hz.torsion.get(d, []) if t % p == 0) \
            + sum(1 for t in hz.torsion.get(d - 1, []) if t % p == 0)
        out[d] = expect == hp.betti[d]
    return out


def euler_check(c: ChainComplex, hz: HomologyResult) -> bool:
    return c.euler_characteristic() == sum((-1) ** d * hz.betti[d] for d in hz.degrees)


# ---------------------------------------------------------------------------
# explicit homology presentations and induced maps


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def _solve_echelon(basis: Sequence[tuple[int, list[int]]], u: Sequence[int]) -> list[int]:
    """Solve ``B x = u`` for an integer echelon basis given as (lead, vector)."""
    u = list(u)
    x = []
    for lead, b in basis:
        q, r = divmod(u[lead], b[lead])
        if r:
            raise ValueError("vector not in the lattice")
        x.append(q)
        if q:
            u = [a - q * c for a, c in zip(u, b)]
    if any(u):
        raise ValueError("vector not in the lattice")
    return x


@dataclass
class HomologyPresentation:
    """``H_d`` over Z as ``⊕ Z/t_i ⊕ Z^f`` with explicit cycle generators.

    Built from the cokernel of ``∂_{d+1}``: unit pivots of ``∂_{d+1}`` eliminate
    chain basis elements (recording the substitution), the rest is a small
    dense presentation.  ``invariants`` lists torsion orders then 0 per free
    summand.
    """

    degree: int
    invariants: list[int]
    generators: list[list[int]]
    _subst: list[tuple[int, dict[int, int]]]
    _remaining: dict[int, int]
    _basis: list[tuple[int, list[int]]]
    _p2: IntMatrix
    _keep: list[int]

    def _to_remaining(self, z: Sequence[int]) -> list[int]:
        u = {i: x for i, x in enumerate(z) if x}
        for r, expr in self._subst:
            x = u.pop(r, 0)
            if x:
                for rr, c in expr.items():
                    u[rr] = u.get(rr, 0) + x * c
        vec = [0] * len(self._remaining)
        for r, x in u.items():
            if x:
                vec[self._remaining[r]] = x
        return vec

    def coordinates(self, z: Sequence[int]) -> list[int]:
        """Coordinates of a cycle in the generators (torsion coordinates reduced)."""
        x = _solve_echelon(self._basis, self._to_remaining(z))
        out = []
        for i, inv in zip(self._keep, self.invariants):
            y = sum(a * b for a, b in zip(self._p2[i], x))
            out.append(y % inv if inv else y)
        return out


def homology_presentation(c: ChainComplex, d: int) -> HomologyPresentation:
    """Explicit Z-presentation of ``H_d(c)``.

    The cycle basis comes from a dense Smith form of ``∂_d`` (so ``C_d`` should be
    modest); ``∂_{d+1}`` may be large and sparse.
    """
    n = c.dim(d)
    down = c.boundary(d)
    if c.dim(d - 1) and down.nnz:
        _, dd, v = smith_normal_form(down.toarray().tolist())
        rank = sum(1 for x in snf_diagonal(dd) if x)
        zbasis = [[v[i][j] for i in range(n)] for j in range(rank, n)]
    else:
        zbasis = [[1 if i == j else 0 for i in range(n)] for j in range(n)]
    k = len(zbasis)
    record: list = []
    _, leftover = _sparse_eliminate(columns_of(c.boundary(d + 1)), 0, record)
    subst = []
    for r, col in record:
        u = col[r]  # ±1
        subst.append((r, {rr: -x * u for rr, x in col.items() if rr != r}))
    eliminated = {r for r, _ in subst}
    remaining = {r: i for i, r in enumerate(i for i in range(n) if i not in eliminated)}
    pres = HomologyPresentation(d, [], [], subst, remaining, [], [], [])
    nrem = len(remaining)
    # lattice spanned by cycle images and relations, tracking cycle coefficients
    lat: dict[int, tuple[list[int], list[int]]] = {}

    def insert(vec: list[int], coef: list[int]) -> None:
        while True:
            lead = next((i for i, x in enumerate(vec) if x), None)
            if lead is None:
                return
            cur = lat.get(lead)
            if cur is None:
                if vec[lead] < 0:
                    vec, coef = [-x for x in vec], [-x for x in coef]
                lat[lead] = (vec, coef)
                return
            b, bc = cur
            a, cc = b[lead], vec[lead]
            if cc % a == 0:
                q = cc // a
                vec = [x - q * y for x, y in zip(vec, b)]
                coef = [x - q * y for x, y in zip(coef, bc)]
                continue
            g, s_, t_ = _xgcd(a, cc)
            nb = [s_ * x + t_ * y for x, y in zip(b, vec)]
            nbc = [s_ * x + t_ * y for x, y in zip(bc, coef)]
            nv = [(cc // g) * x - (a // g) * y for x, y in zip(b, vec)]
            nvc = [(cc // g) * x - (a // g) * y for x, y in zip(bc, coef)]
            if nb[lead] < 0:
                nb, nbc = [-x for x in nb], [-x for x in nbc]
            lat[lead] = (nb, nbc)
            vec, coef = nv, nvc

    for j, z in enumerate(zbasis):
        insert(pres._to_remaining(z), [1 if t == j else 0 for t in range(k)])
    rel_vecs = []
    for col in leftover:
        vec = [0] * nrem
        for r, x in col.items():
            vec[remaining[r]] = x
        rel_vecs.append(vec)
        insert(list(vec), [0] * k)
    leads = sorted(lat)
    basis = [(lead, lat[lead][0]) for lead in leads]
    coefs = [lat[lead][1] for lead in leads]
    r = len(basis)
    x_rel = [_solve_echelon(basis, v) for v in rel_vecs]
    if r and x_rel:
        mat = [[x_rel[j][i] for j in range(len(x_rel))] for i in range(r)]
        p2, d2, _, p2inv, _ = smith_normal_form(mat, with_inverses=True)
        diag = snf_diagonal(d2) + [0] * (r - min(r, len(x_rel)))
    else:
        p2, p2inv = _identity(r), _identity(r)
        diag = [0] * r
    keep = [i for i in range(r) if diag[i] != 1]
    order = sorted(keep, key=lambda i: (diag[i] == 0, diag[i]))
    gens = []
    for i in order:
        w = [p2inv[j][i] for j in range(r)]
        cz = [sum(w[j] * coefs[j][t] for j in range(r)) for t in range(k)]
        gens.append([sum(cz[t] * zbasis[t][e] for t in range(k) if cz[t]) for e in range(n)])
    pres.invariants = [diag[i] for i in order]
    pres.generators = gens
    pres._basis = basis
    pres._p2 = p2
    pres._keep = order
    return pres


@dataclass
class InducedMap:
    degree: int
    source_invariants: list[int]
    target_invariants: list[int]
    matrix: list[list[int]]  # columns = images of source generators

    def is_isomorphism(self) -> bool:
        if sorted(self.source_invariants) != sorted(self.target_invariants):
            return False
        return self.is_surjective()

    def is_surjective(self) -> bool:
        k = len(self.target_invariants)
        if k == 0:
            return True
        cols = [list(c) for c in self.matrix]
        for i, t in enumerate(self.target_invariants):
            if t:
                cols.append([t if r == i else 0 for r in range(k)])
        if not cols:
            return False
        mat = [[cols[j][i] for j in range(len(cols))] for i in range(k)]
        _, dd, _ = smith_normal_form(mat)
        diag = snf_diagonal(dd)
        return len(diag) >= k and all(abs(x) == 1 for x in diag[:k])


def induced_map(src: ChainComplex, tgt: ChainComplex, chain_map: Mapping[int, sp.spmatrix],
                d: int) -> InducedMap:
    """Map on ``H_d(-; Z)`` induced by a chain map given degreewise."""
    ps = homology_presentation(src, d)
    pt = homology_presentation(tgt, d)
    f = sp.coo_matrix(chain_map[d])
    cols = []
    for g in ps.generators:
        img = [0] * tgt.dim(d)
        for r, c, x in zip(f.row, f.col, f.data):
            if g[c]:
                img[r] += int(x) * g[c]
        cols.append(pt.coordinates(img))
    return InducedMap(d, ps.invariants, pt.invariants, cols)
