"""Finite local rings, matrices over them, GL enumeration and free summands.

Elements of a ring of size ``p**m`` are encoded as integers ``0..size-1``.
For ``Z/p^k`` the encoding is the residue itself.  For the polynomial kinds
(``F_q`` as ``F_p[t]/(f)`` and ``F_p[t]/t^k``) an element
``c_0 + c_1 t + ... + c_{m-1} t^{m-1}`` is encoded as ``sum c_i p^i``.

Matrices are tuples of row tuples of encodings, so they are hashable and
immutable.  Free summands of ``R^n`` are stored by a canonical basis obtained
from Gaussian elimination that only ever pivots on units (see
:func:`canonical_summand`).
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

Matrix = tuple[tuple[int, ...], ...]

DEFAULT_RING_CAP = 4096
DEFAULT_GL_CAP = 200_000
DEFAULT_SUMMAND_CAP = 200_000

# Irreducible polynomials (coefficients low to high, monic) for the small
# prime-power fields that have a built-in default.
BUILTIN_MODULI: dict[int, tuple[int, tuple[int, ...]]] = {
    4: (2, (1, 1, 1)),  # t^2 + t + 1
    8: (2, (1, 1, 0, 1)),  # t^3 + t + 1
    9: (3, (1, 0, 1)),  # t^2 + 1
}


class RingError(ValueError):
    """Invalid ring descriptor."""


class CapExceeded(RuntimeError):
    """An enumeration would exceed its configured cap."""

    def __init__(self, what: str, needed: int, cap: int, degree: int | None = None):
        self.what = what
        self.needed = needed
        self.cap = cap
        self.degree = degree
        where = f" in degree {degree}" if degree is not None else ""
        super().__init__(f"{what}{where}: {needed} exceeds cap {cap}")


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


def _prime_power(q: int) -> tuple[int, int] | None:
    for p in range(2, q + 1):
        if q % p == 0:
            if not is_prime(p):
                return None
            k, r = 0, q
            while r % p == 0:
                r //= p
                k += 1
            return (p, k) if r == 1 else None
    return None


# ---------------------------------------------------------------------------
# polynomials over F_p as coefficient tuples (low to high)


def _poly_trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a: Sequence[int], f: Sequence[int], p: int) -> list[int]:
    a = _poly_trim([x % p for x in a])
    f = _poly_trim([x % p for x in f])
    inv_lead = pow(f[-1], p - 2, p)
    while len(a) >= len(f):
        c = a[-1] * inv_lead % p
        shift = len(a) - len(f)
        for i, fc in enumerate(f):
            a[shift + i] = (a[shift + i] - c * fc) % p
        a = _poly_trim(a)
    return a


def poly_is_irreducible(f: Sequence[int], p: int) -> bool:
    """Brute force: no monic factor of degree 1..deg(f)//2."""
    deg = len(_poly_trim(list(f))) - 1
    if deg < 1:
        return False
    for d in range(1, deg // 2 + 1):
        for low in itertools.product(range(p), repeat=d):
            if not _poly_mod(f, list(low) + [1], p):
                return False
    return True


def parse_poly(text: str, p: int) -> tuple[int, ...]:
    """Parse ``"t^2+t+1"`` or ``"2t^2 + 1"`` into coefficients low to high."""
    s = text.replace(" ", "").replace("-", "+-")
    coeffs: dict[int, int] = {}
    for term in filter(None, s.split("+")):
        m = re.fullmatch(r"(-?\d*)\*?(t(?:\^(\d+))?)?", term)
        if m is None or (m.group(1) in ("", "-") and m.group(2) is None):
            raise RingError(f"cannot parse polynomial term {term!r}")
        c = m.group(1)
        coef = -1 if c == "-" else (1 if c == "" else int(c))
        exp = 0 if m.group(2) is None else (int(m.group(3)) if m.group(3) else 1)
        coeffs[exp] = (coeffs.get(exp, 0) + coef) % p
    if not coeffs:
        raise RingError(f"empty polynomial {text!r}")
    deg = max(coeffs)
    return tuple(coeffs.get(i, 0) for i in range(deg + 1))


# ---------------------------------------------------------------------------


class Ring:
    """A finite commutative local ring with full operation tables.

    Attributes:
        kind: ``"prime_field"``, ``"field_ext"``, ``"zmod"`` or ``"truncated_poly"``.
        p: residue characteristic.
        m: ``size == p**m``.
        modulus: for the polynomial kinds, the monic modulus (low to high).
        label: canonical descriptor string, parseable by :func:`make_ring`.
    """

    def __init__(self, kind: str, p: int, m: int, modulus: tuple[int, ...] | None,
                 label: str, cap: int = DEFAULT_RING_CAP):
        self.kind = kind
        self.p = p
        self.m = m
        self.modulus = modulus
        self.label = label
        self.size = p ** m
        if self.size > cap:
            raise CapExceeded("ring size", self.size, cap)
        self.add_table, self.mul_table = self._build_tables()
        n = self.size
        self.neg_table = np.argmax(self.add_table == 0, axis=1)
        one_hits = self.mul_table == 1
        self.units_mask = one_hits.any(axis=1)
        self.inv_table = np.where(self.units_mask, np.argmax(one_hits, axis=1), -1)
        self.units = tuple(int(a) for a in np.flatnonzero(self.units_mask))
        self.nonunits = tuple(int(a) for a in np.flatnonzero(~self.units_mask))
        # python-list copies for fast scalar access
        self._add = self.add_table.tolist()
        self._mul = self.mul_table.tolist()
        self._neg = self.neg_table.tolist()
        self._inv = self.inv_table.tolist()
        self._unit = self.units_mask.tolist()
        self._check_local()
        assert len(self.units) + len(self.nonunits) == n

    # -- construction helpers -------------------------------------------------
    def _digits(self) -> np.ndarray:
        codes = np.arange(self.size)
        return np.stack([(codes // self.p ** i) % self.p for i in range(self.m)], axis=1)

    def _encode(self, digits: np.ndarray) -> np.ndarray:
        weights = self.p ** np.arange(self.m)
        return (digits * weights).sum(axis=-1)

    def _build_tables(self) -> tuple[np.ndarray, np.ndarray]:
        n = self.size
        dtype = np.int16 if n < 2 ** 15 else np.int32
        if self.kind in ("prime_field", "zmod"):
            a = np.arange(n)
            add = (a[:, None] + a[None, :]) % n
            mul = (a[:, None] * a[None, :]) % n
            return add.astype(dtype), mul.astype(dtype)
        p, m = self.p, self.m
        dig = self._digits()
        add = self._encode((dig[:, None, :] + dig[None, :, :]) % p)
        # reduction of t^e modulo the modulus for e < 2m - 1
        red = np.zeros((2 * m - 1, m), dtype=np.int64)
        for e in range(2 * m - 1):
            r = _poly_mod([0] * e + [1], self.modulus, p)
            red[e, : len(r)] = r
        mul = np.empty((n, n), dtype=np.int64)
        for a in range(n):
            conv = np.zeros((n, 2 * m - 1), dtype=np.int64)
            for i in range(m):
                conv[:, i : i + m] += dig[a, i] * dig
            mul[a] = self._encode((conv @ red) % p)
        return add.astype(dtype), mul.astype(dtype)

    def _check_local(self) -> None:
        non = np.array(self.nonunits, dtype=np.int64)
        if len(non) == 0:
            raise RingError("ring has no zero element")  # unreachable
        sums = self.add_table[np.ix_(non, non)]
        prods = self.mul_table[np.ix_(np.arange(self.size), non)]
        if self.units_mask[sums].any() or self.units_mask[prods].any():
            raise RingError(f"{self.label} is not local")

    # -- scalar arithmetic ------------------------------------------------------
    def add(self, a: int, b: int) -> int:
        return self._add[a][b]

    def sub(self, a: int, b: int) -> int:
        return self._add[a][self._neg[b]]

    def mul(self, a: int, b: int) -> int:
        return self._mul[a][b]

    def neg(self, a: int) -> int:
        return self._neg[a]

    def inv(self, a: int) -> int:
        r = self._inv[a]
        if r < 0:
            raise ZeroDivisionError(f"{a} is not a unit in {self.label}")
        return r

    def is_unit(self, a: int) -> bool:
        return self._unit[a]

    def residue(self, a: int) -> int:
        """Image of ``a`` in the residue field, as an element code of that field."""
        if self.kind == "zmod":
            return a % self.p
        if self.kind == "truncated_poly":
            return a % self.p
        return a

    @property
    def is_field(self) -> bool:
        return len(self.nonunits) == 1

    @property
    def maximal_ideal_generator(self) -> str:
        if self.is_field:
            return "0"
        return str(self.p) if self.kind == "zmod" else "t"

    # -- matrices ---------------------------------------------------------------
    def identity(self, n: int) -> Matrix:
        return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))

    def matmul(self, a: Matrix, b: Matrix) -> Matrix:
        add, mul = self._add, self._mul
        cols = list(zip(*b))
        out = []
        for row in a:
            new = []
            for col in cols:
                s = 0
                for x, y in zip(row, col):
                    if x and y:
                        s = add[s][mul[x][y]]
                new.append(s)
            out.append(tuple(new))
        return tuple(out)

    def matvec(self, a: Matrix, v: Sequence[int]) -> tuple[int, ...]:
        add, mul = self._add, self._mul
        out = []
        for row in a:
            s = 0
            for x, y in zip(row, v):
                if x and y:
                    s = add[s][mul[x][y]]
            out.append(s)
        return tuple(out)

    def batch_matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Vectorised product over broadcast stacks of matrices (codes as ints)."""
        add, mul = self.add_table, self.mul_table
        a = np.asarray(a)
        b = np.asarray(b)
        k = a.shape[-1]
        acc = mul[a[..., :, 0][..., :, None], b[..., 0, :][..., None, :]]
        for t in range(1, k):
            acc = add[acc, mul[a[..., :, t][..., :, None], b[..., t, :][..., None, :]]]
        return acc

    def __repr__(self) -> str:
        return f"Ring({self.label})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Ring) and other.label == self.label

    def __hash__(self) -> int:
        return hash(("Ring", self.label))


def make_ring(spec: str, cap: int = DEFAULT_RING_CAP) -> Ring:
    """Build a ring from a descriptor.

    Grammar: ``F<p>``; ``F<q>`` for q in the built-in table or
    ``F<q>:<poly in t>``; ``Z<p^k>``; ``F<p>[t]/t^<k>``.

    Raises:
        RingError: malformed descriptor, non-prime characteristic, reducible
            modulus or a modulus ``Z<N>`` that is not a prime power.
        CapExceeded: ring larger than ``cap``.
    """
    s = spec.strip().replace(" ", "")
    m = re.fullmatch(r"F(\d+)\[t\]/t\^?(\d*)", s)
    if m:
        p = int(m.group(1))
        k = int(m.group(2)) if m.group(2) else 1
        if not is_prime(p):
            raise RingError(f"characteristic {p} is not prime")
        if k < 1:
            raise RingError("truncation degree must be at least 1")
        if k == 1:
            return Ring("prime_field", p, 1, None, f"F{p}", cap)
        modulus = tuple([0] * k + [1])
        return Ring("truncated_poly", p, k, modulus, f"F{p}[t]/t^{k}", cap)
    m = re.fullmatch(r"Z(?:/)?(\d+)", s)
    if m:
        n = int(m.group(1))
        pk = _prime_power(n)
        if pk is None:
            raise RingError(f"Z/{n} is not a local ring (need a prime power)")
        p, k = pk
        kind = "prime_field" if k == 1 else "zmod"
        label = f"F{p}" if k == 1 else f"Z{n}"
        return Ring(kind, p, k, None, label, cap)
    m = re.fullmatch(r"F(\d+)(?::(.+))?", s)
    if m:
        q = int(m.group(1))
        pk = _prime_power(q)
        if pk is None:
            raise RingError(f"{q} is not a prime power")
        p, k = pk
        if k == 1:
            if m.group(2):
                raise RingError("a prime field takes no modulus")
            return Ring("prime_field", p, 1, None, f"F{p}", cap)
        if m.group(2):
            f = parse_poly(m.group(2), p)
        elif q in BUILTIN_MODULI:
            f = BUILTIN_MODULI[q][1]
        else:
            raise RingError(f"no built-in modulus for F{q}; supply F{q}:<poly>")
        if len(f) - 1 != k or f[-1] % p != 1:
            raise RingError(f"modulus must be monic of degree {k}")
        if not poly_is_irreducible(f, p):
            raise RingError(f"modulus {m.group(2) or f} is reducible over F{p}")
        label = f"F{q}:" + poly_to_str(f)
        return Ring("field_ext", p, k, tuple(f), label, cap)
    raise RingError(f"unrecognised ring descriptor {spec!r}")


def poly_to_str(f: Sequence[int]) -> str:
    terms = []
    for e in range(len(f) - 1, -1, -1):
        c = f[e]
        if c == 0:
            continue
        var = "" if e == 0 else ("t" if e == 1 else f"t^{e}")
        coef = str(c) if (c != 1 or e == 0) else ""
        terms.append(coef + var)
    return "+".join(terms) if terms else "0"


# ---------------------------------------------------------------------------
# free summands


@dataclass(frozen=True, order=True)
class Summand:
    """Free direct summand of ``R^n`` in canonical form.

    ``basis`` holds ``k`` rows of length ``n``.  Each row has a pivot entry equal
    to 1 in a column where every other row is 0; columns left of a row's pivot
    hold non-units.
    """

    n: int
    basis: Matrix

    @property
    def rank(self) -> int:
        return len(self.basis)

    def pivots(self) -> tuple[int, ...]:
        out = []
        for row in self.basis:
            for j, x in enumerate(row):
                if x == 1 and all(r[j] == 0 for r in self.basis if r is not row):
                    out.append(j)
                    break
        return tuple(out)


def _unit_pivot_reduce(ring: Ring, rows: Iterable[Sequence[int]], n: int
                       ) -> tuple[list[list[int]], list[int], list[list[int]]]:
    """Unit-pivot elimination.

    Returns (pivot rows, pivot columns, residual rows).  Pivot rows are scaled
    to a 1 in their pivot column and every pivot column is cleared in all other
    rows.  Residual rows are non-zero leftovers with entries in the maximal
    ideal.
    """
    add, mul, neg, inv, unit = ring._add, ring._mul, ring._neg, ring._inv, ring._unit
    work = [list(r) for r in rows if any(r)]
    for r in work:
        if len(r) != n:
            raise ValueError("generator of wrong length")
    pivot_rows: list[list[int]] = []
    pivot_cols: list[int] = []
    for c in range(n):
        idx = next((i for i, r in enumerate(work) if unit[r[c]]), None)
        if idx is None:
            continue
        row = work.pop(idx)
        s = inv[row[c]]
        row = [mul[s][x] for x in row]
        for other in itertools.chain(work, pivot_rows):
            f = other[c]
            if f:
                nf = neg[f]
                for j in range(n):
                    if row[j]:
                        other[j] = add[other[j]][mul[nf][row[j]]]
        pivot_rows.append(row)
        pivot_cols.append(c)
        work = [r for r in work if any(r)]
    return pivot_rows, pivot_cols, work


def canonical_summand(ring: Ring, gens: Sequence[Sequence[int]], n: int | None = None
                      ) -> Summand | None:
    """Canonical form of the row span of ``gens``, or ``None`` if it is not a
    free direct summand with free quotient.

    Over a local ring the row span is such a summand exactly when unit-pivot
    elimination leaves no residual rows.
    """
    if n is None:
        if not gens:
            raise ValueError("ambient rank needed for an empty generating set")
        n = len(gens[0])
    piv_rows, piv_cols, residual = _unit_pivot_reduce(ring, gens, n)
    if residual:
        return None
    order = sorted(range(len(piv_cols)), key=lambda i: piv_cols[i])
    return Summand(n, tuple(tuple(piv_rows[i]) for i in order))


def summand_contains(ring: Ring, s: Summand, v: Sequence[int]) -> bool:
    """Whether vector ``v`` lies in summand ``s``."""
    add, mul, neg = ring._add, ring._mul, ring._neg
    w = list(v)
    for row, c in zip(s.basis, s.pivots()):
        f = w[c]
        if f:
            nf = neg[f]
            w = [add[a][mul[nf][b]] for a, b in zip(w, row)]
    return not any(w)


def summand_leq(ring: Ring, s: Summand, t: Summand) -> bool:
    """Whether ``s`` is contained in ``t``."""
    return s.rank <= t.rank and all(summand_contains(ring, t, v) for v in s.basis)


def act_on_summand(ring: Ring, g: Matrix, s: Summand) -> Summand:
    """``g·S`` for column vectors: the rows ``v`` become ``g v``."""
    res = canonical_summand(ring, [ring.matvec(g, v) for v in s.basis], s.n)
    assert res is not None
    return res


def standard_summand(n: int, k: int) -> Summand:
    """Span of the first ``k`` coordinate vectors."""
    return Summand(n, tuple(tuple(1 if j == i else 0 for j in range(n)) for i in range(k)))


def count_summands(ring: Ring, n: int, k: int) -> int:
    """Number of rank-``k`` free summands of ``R^n``, via canonical-form shapes."""
    q = ring.size
    mq = len(ring.nonunits)
    total = 0
    for piv in itertools.combinations(range(n), k):
        free_left = free_right = 0
        pivset = set(piv)
        for r, c in enumerate(piv):
            for j in range(n):
                if j in pivset:
                    continue
                if j < c:
                    free_left += 1
                else:
                    free_right += 1
        total += mq ** free_left * q ** free_right
    return total


def enumerate_summands(ring: Ring, n: int, k: int, cap: int = DEFAULT_SUMMAND_CAP
                       ) -> list[Summand]:
    """All rank-``k`` free summands of ``R^n`` in sorted canonical order.

    Generated directly as canonical shapes: choose pivot columns, put non-units
    left of each pivot and arbitrary elements right of it.
    """
    if not 0 <= k <= n:
        raise ValueError("need 0 <= k <= n")
    total = count_summands(ring, n, k)
    if total > cap:
        raise CapExceeded("summand enumeration", total, cap)
    out: list[Summand] = []
    elems = range(ring.size)
    for piv in itertools.combinations(range(n), k):
        pivset = set(piv)
        slots = []  # (row, col, allowed values)
        for r, c in enumerate(piv):
            for j in range(n):
                if j not in pivset:
                    slots.append((r, j, ring.nonunits if j < c else elems))
        for values in itertools.product(*(s[2] for s in slots)):
            rows = [[0] * n for _ in range(k)]
            for r, c in enumerate(piv):
                rows[r][c] = 1
            for (r, j, _), v in zip(slots, values):
                rows[r][j] = v
            out.append(Summand(n, tuple(tuple(r) for r in rows)))
    out.sort()
    return out


# ---------------------------------------------------------------------------
# general linear groups


def _matrix_code(m: Matrix, size: int) -> int:
    code = 0
    for row in m:
        for x in row:
            code = code * size + x
    return code


class MatrixGroup(Sequence):
    """An enumerated finite matrix group, sorted lexicographically (row-major).

    Behaves as a sequence of matrices.  Multiplication is available by index
    through :meth:`mul`; rows of the multiplication table are computed with
    vectorised ring arithmetic and cached.
    """

    def __init__(self, ring: Ring, n: int, elements: Iterable[Matrix]):
        self.ring = ring
        self.n = n
        els = sorted(set(elements))
        self._elements: list[Matrix] = els
        self._codes = np.array([_matrix_code(m, ring.size) for m in els], dtype=np.int64)
        self._array = np.array(els, dtype=np.int64).reshape(len(els), n, n)
        self.index = {m: i for i, m in enumerate(els)}
        self._rows: dict[int, np.ndarray] = {}
        self.identity_index = self.index[ring.identity(n)]
        self._inverse = self._compute_inverses()

    def _encode_stack(self, mats: np.ndarray) -> np.ndarray:
        flat = mats.reshape(mats.shape[0], -1).astype(np.int64)
        size = self.ring.size
        codes = np.zeros(flat.shape[0], dtype=np.int64)
        for j in range(flat.shape[1]):
            codes = codes * size + flat[:, j]
        return codes

    def _lookup(self, codes: np.ndarray) -> np.ndarray:
        pos = np.searchsorted(self._codes, codes)
        pos = np.minimum(pos, len(self._codes) - 1)
        if not np.array_equal(self._codes[pos], codes):
            raise ValueError("product left the group")
        return pos

    def mul_row(self, i: int) -> np.ndarray:
        """Indices of ``g_i · g_j`` for all ``j``."""
        row = self._rows.get(i)
        if row is None:
            prods = self.ring.batch_matmul(self._array[i][None, :, :], self._array)
            row = self._lookup(self._encode_stack(prods))
            self._rows[i] = row
        return row

    def mul(self, i: int, j: int) -> int:
        return int(self.mul_row(i)[j])

    def inv(self, i: int) -> int:
        return self._inverse[i]

    def _compute_inverses(self) -> list[int]:
        inv = [-1] * len(self)
        for i, g in enumerate(self._elements):
            if inv[i] < 0:
                j = self.index[matrix_inverse(self.ring, g)]
                inv[i] = j
                inv[j] = i
        return inv

    def index_of(self, m: Matrix) -> int:
        return self.index[m]

    def inverse_matrix(self, i: int) -> Matrix:
        return self._elements[self._inverse[i]]

    def __len__(self) -> int:
        return len(self._elements)

    def __getitem__(self, i):  # type: ignore[override]
        return self._elements[i]

    def __iter__(self) -> Iterator[Matrix]:
        return iter(self._elements)


def gl_order(ring: Ring, n: int) -> int:
    """``|GL_n(R)| = |m|^{n^2} |GL_n(k)|`` for residue field ``k``."""
    q = ring.size // len(ring.nonunits)
    order = len(ring.nonunits) ** (n * n)
    for i in range(n):
        order *= q ** n - q ** i
    return order


def enumerate_gl(ring: Ring, n: int, cap: int = DEFAULT_GL_CAP) -> MatrixGroup:
    """All invertible ``n x n`` matrices, built column by column.

    A partial list of columns extends to an invertible matrix exactly when the
    columns span a free summand of the expected rank.
    """
    expected = gl_order(ring, n)
    if expected > cap:
        raise CapExceeded(f"GL_{n}({ring.label}) enumeration", expected, cap)
    vectors = list(itertools.product(range(ring.size), repeat=n))
    partial: list[tuple[tuple[int, ...], ...]] = [()]
    for j in range(n):
        nxt = []
        for cols in partial:
            for v in vectors:
                cand = cols + (v,)
                piv, _, res = _unit_pivot_reduce(ring, cand, n)
                if not res and len(piv) == j + 1:
                    nxt.append(cand)
        partial = nxt
    mats = [tuple(zip(*cols)) for cols in partial] if n else [()]
    if n == 0:
        raise ValueError("rank must be positive")
    group = MatrixGroup(ring, n, mats)
    assert len(group) == expected, (len(group), expected)
    return group


def matrix_inverse(ring: Ring, g: Matrix) -> Matrix:
    """Gauss-Jordan inverse pivoting on units; raises for singular input."""
    add, mul, neg, inv, unit = ring._add, ring._mul, ring._neg, ring._inv, ring._unit
    n = len(g)
    a = [list(row) + [1 if i == j else 0 for j in range(n)] for i, row in enumerate(g)]
    for c in range(n):
        r = next((i for i in range(c, n) if unit[a[i][c]]), None)
        if r is None:
            raise ValueError("matrix is not invertible")
        a[c], a[r] = a[r], a[c]
        s = inv[a[c][c]]
        a[c] = [mul[s][x] for x in a[c]]
        for i in range(n):
            f = a[i][c]
            if i != c and f:
                nf = neg[f]
                a[i] = [add[x][mul[nf][y]] for x, y in zip(a[i], a[c])]
    return tuple(tuple(row[n:]) for row in a)


def block_diag(ring: Ring, *blocks: Matrix) -> Matrix:
    n = sum(len(b) for b in blocks)
    out = [[0] * n for _ in range(n)]
    off = 0
    for b in blocks:
        for i, row in enumerate(b):
            for j, x in enumerate(row):
                out[off + i][off + j] = x
        off += len(b)
    return tuple(tuple(r) for r in out)
