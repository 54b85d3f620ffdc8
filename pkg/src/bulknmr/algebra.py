"""Collective product-operator basis and its Lie algebra for spin-1/2 nuclei.

A basis element is a product of single-nucleus spin components, one
Cartesian axis per involved nucleus, e.g. ``S[1z]`` or ``C[1x,3y]``. For
``n`` nuclei there are ``4**n - 1`` of them (every nucleus carries either
nothing or one of x, y, z; the all-identity word is excluded).

Internally an element is a *word*: a length-``n`` tuple of site codes
(0 = identity, 1 = x, 2 = y, 3 = z). Words are packed into base-4 integer
codes with nucleus 1 as the most significant digit.

Commutators are evaluated symbolically site by site using the spin-1/2
multiplication rule ``S_a S_b = delta_ab / 4 + (i/2) eps_abc S_c``. Because
every site product is a single operator, the commutator of two basis
elements is always zero or a single basis element with a dyadic coefficient:

    [A, B] = i * f * W,   f = +/- 2**(1 - m - 2e)

where ``m`` is the number of sites carrying two different axes (the
commutator vanishes unless ``m`` is odd) and ``e`` the number of sites
carrying the same axis.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

__all__ = [
    "MAX_NUCLEI",
    "Axis",
    "ProductOperator",
    "Basis",
    "StructureTable",
    "get_basis",
    "enumerate_basis",
    "commute",
    "commute_combination",
    "build_structure_table",
    "adjoint_generator",
    "parse_operator",
]

MAX_NUCLEI = 10


class Axis(enum.IntEnum):
    X = 1
    Y = 2
    Z = 3

    @property
    def label(self) -> str:
        return "xyz"[self - 1]

    @classmethod
    def parse(cls, value) -> "Axis":
        if isinstance(value, cls):
            return value
        if isinstance(value, str):
            try:
                return cls("XYZ".index(value.strip().upper()) + 1)
            except ValueError:
                raise ValueError(f"unknown axis {value!r}") from None
        return cls(int(value))


def _check_n(n) -> int:
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
        raise ValueError(f"nucleus count must be an integer, got {n!r}")
    if not 1 <= n <= MAX_NUCLEI:
        raise ValueError(f"nucleus count must be in [1, {MAX_NUCLEI}], got {n}")
    return int(n)


@dataclass(frozen=True, order=False)
class ProductOperator:
    """One collective product operator.

    ``axes`` is a tuple of ``(nucleus, Axis)`` pairs with 1-based nucleus
    indices in strictly increasing order.
    """

    n: int
    axes: tuple

    def __post_init__(self):
        _check_n(self.n)
        axes = tuple((int(p), Axis.parse(a)) for p, a in self.axes)
        if not axes:
            raise ValueError("a product operator involves at least one nucleus")
        nuclei = [p for p, _ in axes]
        if any(b <= a for a, b in zip(nuclei, nuclei[1:])):
            raise ValueError(f"nucleus indices must be strictly increasing: {nuclei}")
        if nuclei[0] < 1 or nuclei[-1] > self.n:
            raise ValueError(f"nucleus index out of range 1..{self.n}: {nuclei}")
        object.__setattr__(self, "axes", axes)

    @classmethod
    def from_word(cls, word) -> "ProductOperator":
        return cls(len(word), tuple((p + 1, Axis(a)) for p, a in enumerate(word) if a))

    @property
    def rank(self) -> int:
        return len(self.axes)

    @property
    def word(self) -> tuple:
        w = [0] * self.n
        for p, a in self.axes:
            w[p - 1] = int(a)
        return tuple(w)

    @property
    def code(self) -> int:
        c = 0
        for a in self.word:
            c = 4 * c + a
        return c

    @property
    def nuclei(self) -> tuple:
        return tuple(p for p, _ in self.axes)

    @property
    def name(self) -> str:
        head = "S" if self.rank == 1 else "C"
        return head + "[" + ",".join(f"{p}{a.label}" for p, a in self.axes) + "]"

    def __str__(self):
        return self.name


def parse_operator(text: str, n: int) -> ProductOperator:
    """Parse names like ``S[1z]`` or ``C[1x,2y]`` into a ProductOperator."""
    s = text.strip()
    if len(s) < 4 or s[0] not in "SC" or s[1] != "[" or s[-1] != "]":
        raise ValueError(f"malformed operator name {text!r}")
    slots = []
    for item in s[2:-1].split(","):
        item = item.strip()
        if len(item) < 2 or not item[:-1].isdigit():
            raise ValueError(f"malformed operator slot {item!r} in {text!r}")
        slots.append((int(item[:-1]), Axis.parse(item[-1])))
    op = ProductOperator(n, tuple(slots))
    if (s[0] == "S") != (op.rank == 1):
        raise ValueError(f"prefix of {text!r} does not match its rank")
    return op


class Basis:
    """Canonically ordered basis for ``n`` nuclei with vectorized lookups.

    Ordering: ascending rank, then lexicographic in the involved nuclei,
    then lexicographic in the axes.
    """

    def __init__(self, n: int):
        self.n = _check_n(n)
        blocks = []
        for rank in range(1, self.n + 1):
            axes = np.array(list(itertools.product((1, 2, 3), repeat=rank)), dtype=np.uint8)
            for nuclei in itertools.combinations(range(self.n), rank):
                block = np.zeros((len(axes), self.n), dtype=np.uint8)
                block[:, nuclei] = axes
                blocks.append(block)
        self.words = np.concatenate(blocks)
        self.words.setflags(write=False)
        place = 4 ** np.arange(self.n - 1, -1, -1, dtype=np.int64)
        self.codes = self.words.astype(np.int64) @ place
        self.ranks = np.count_nonzero(self.words, axis=1)
        self.index_of_code = np.full(4**self.n, -1, dtype=np.int64)
        self.index_of_code[self.codes] = np.arange(len(self.codes))
        for arr in (self.codes, self.ranks, self.index_of_code):
            arr.setflags(write=False)

    def __len__(self):
        return len(self.codes)

    def __getitem__(self, j) -> ProductOperator:
        return ProductOperator.from_word(tuple(int(a) for a in self.words[j]))

    def __iter__(self):
        return (self[j] for j in range(len(self)))

    def index(self, op: ProductOperator) -> int:
        if op.n != self.n:
            raise ValueError(f"operator acts on {op.n} nuclei, basis on {self.n}")
        return int(self.index_of_code[op.code])

    def names(self) -> list:
        return [op.name for op in self]

    def index_of(self, nuclei, axes) -> int:
        """Index of the element with the given 1-based nuclei and axes."""
        code = 0
        word = [0] * self.n
        for p, a in zip(nuclei, axes):
            word[p - 1] = int(Axis.parse(a))
        for a in word:
            code = 4 * code + a
        j = int(self.index_of_code[code])
        if j < 0:
            raise ValueError(f"no basis element for nuclei={nuclei} axes={axes}")
        return j


@lru_cache(maxsize=None)
def get_basis(n: int) -> Basis:
    return Basis(n)


def enumerate_basis(n: int) -> list:
    """Return the ``4**n - 1`` product operators for ``n`` nuclei in canonical order."""
    return list(get_basis(_check_n(n)))


# Single-site multiplication table for codes 0..3 (identity, x, y, z).
_SITE_PRODUCT = np.zeros((4, 4), dtype=np.uint8)
_SITE_ANTI = np.zeros((4, 4), dtype=np.int64)
_SITE_EQUAL = np.zeros((4, 4), dtype=np.int64)
_SITE_SIGN = np.ones((4, 4), dtype=np.int64)
for _a in range(4):
    for _b in range(4):
        if _a == 0 or _b == 0:
            _SITE_PRODUCT[_a, _b] = _a + _b
        elif _a == _b:
            _SITE_EQUAL[_a, _b] = 1
        else:
            _c = 6 - _a - _b
            _SITE_PRODUCT[_a, _b] = _c
            _SITE_ANTI[_a, _b] = 1
            # Levi-Civita symbol eps_{abc} for a permutation of (1, 2, 3)
            _SITE_SIGN[_a, _b] = 1 if (_a, _b, _c) in ((1, 2, 3), (2, 3, 1), (3, 1, 2)) else -1
del _a, _b, _c


def _commute_words(a, b):
    """Return ``(f, word)`` with ``[A, B] = i f W`` or ``(0, None)``."""
    m = e = 0
    sign = 1
    word = []
    for x, y in zip(a, b):
        word.append(int(_SITE_PRODUCT[x, y]))
        m += int(_SITE_ANTI[x, y])
        e += int(_SITE_EQUAL[x, y])
        sign *= int(_SITE_SIGN[x, y])
    if m % 2 == 0:
        return Fraction(0), None
    if (m - 1) // 2 % 2:
        sign = -sign
    return Fraction(sign * 2, 2 ** (m + 2 * e)), tuple(word)


def commute(a: ProductOperator, b: ProductOperator) -> dict:
    """Structure constants of ``[a, b]``.

    Returns a mapping ``{ProductOperator: Fraction}`` holding the real
    coefficients ``f_l`` of ``[a, b] = i * sum_l f_l B_l``. The mapping is
    empty when the operators commute.

    >>> sx = ProductOperator(1, ((1, "x"),))
    >>> sy = ProductOperator(1, ((1, "y"),))
    >>> commute(sx, sy)
    {ProductOperator(n=1, axes=((1, <Axis.Z: 3>),)): Fraction(1, 1)}
    """
    if a.n != b.n:
        raise ValueError(f"operators act on different nucleus counts ({a.n} vs {b.n})")
    f, word = _commute_words(a.word, b.word)
    if word is None:
        return {}
    return {ProductOperator.from_word(word): f}


def commute_combination(x: dict, y: dict) -> dict:
    """Bilinear extension of :func:`commute`.

    ``x`` and ``y`` map ProductOperator to real coefficients; the result
    ``r`` satisfies ``[X, Y] = i * sum r_l B_l``. Zero terms are dropped.
    """
    out = {}
    for a, ca in x.items():
        for b, cb in y.items():
            for op, f in commute(a, b).items():
                out[op] = out.get(op, 0) + ca * cb * f
    return {op: c for op, c in out.items() if c != 0}


def _commute_row(basis: Basis, j: int):
    """Vectorized commutators of element ``j`` against every basis element.

    Returns ``(k, l, f)`` arrays: ``[B_j, B_k] = i f B_l`` for each nonzero
    commutator.
    """
    a = basis.words[j]
    W = basis.words
    anti = _SITE_ANTI[a, W].sum(axis=1)
    nz = np.flatnonzero(anti % 2 == 1)
    Wn = W[nz]
    m = anti[nz]
    e = _SITE_EQUAL[a, Wn].sum(axis=1)
    sign = _SITE_SIGN[a, Wn].prod(axis=1)
    sign = np.where(((m - 1) // 2) % 2 == 1, -sign, sign)
    f = np.ldexp(sign.astype(float), (1 - m - 2 * e).astype(np.int32))
    place = 4 ** np.arange(basis.n - 1, -1, -1, dtype=np.int64)
    codes = _SITE_PRODUCT[a, Wn].astype(np.int64) @ place
    return nz, basis.index_of_code[codes], f


class StructureTable:
    """Structure constants ``[B_j, B_k] = i * sum_l f_jkl B_l`` over one basis.

    Entries for ``j < k`` are stored as ``{l: Fraction}``; only nonzero
    commutators appear. Construction is eager for small ``n`` and lazy
    (rows evaluated on demand) otherwise. The table is read-only once built.
    """

    EAGER_MAX_N = 4

    def __init__(self, n: int, eager: bool | None = None):
        self.n = _check_n(n)
        self.basis = get_basis(self.n)
        self._rows = {}
        if eager is None:
            eager = self.n <= self.EAGER_MAX_N
        self.eager = eager
        if eager:
            for j in range(len(self.basis)):
                self._row(j)

    def _row(self, j: int) -> dict:
        row = self._rows.get(j)
        if row is None:
            k, l, f = _commute_row(self.basis, j)
            row = {int(kk): (int(ll), float(ff)) for kk, ll, ff in zip(k, l, f)}
            self._rows[j] = row
        return row

    def commutator(self, j: int, k: int) -> dict:
        """``{l: Fraction}`` for ``[B_j, B_k]`` in either index order."""
        hit = self._row(j).get(k)
        if hit is None:
            return {}
        l, f = hit
        return {l: Fraction(f)}

    @property
    def entries(self) -> dict:
        """Map ``(j, k) -> {l: Fraction}`` over all nonzero pairs with ``j < k``."""
        out = {}
        for j in range(len(self.basis)):
            for k, (l, f) in sorted(self._row(j).items()):
                if j < k:
                    out[(j, k)] = {l: Fraction(f)}
        return out

    def nonzero_count(self) -> int:
        """Number of unordered pairs with a nonzero commutator."""
        return sum(1 for j in range(len(self.basis)) for k in self._row(j) if j < k)

    def row_arrays(self, j: int):
        """``(k, l, f)`` numpy arrays for all nonzero ``[B_j, B_k]``."""
        return _commute_row(self.basis, j)


def build_structure_table(n: int, eager: bool | None = None) -> StructureTable:
    """Build the structure-constant table for ``n`` nuclei.

    Each stored result is checked to expand over the basis (closure): a
    commutator landing on the identity would indicate a broken basis.
    """
    table = StructureTable(n, eager=eager)
    if table.eager:
        for row in table._rows.values():
            for l, _ in row.values():
                if l < 0:
                    raise RuntimeError("commutator left the basis; closure violated")
    return table


def adjoint_generator(table: StructureTable, h) -> sp.csr_matrix:
    """Generator ``A`` of the linear classical dynamics ``dv/dt = A v``.

    For a Hamiltonian ``H = sum_l h_l B_l`` the Heisenberg equation
    ``dB_j/dt = i [H, B_j]`` gives ``A_jk = -sum_l h_l f_ljk``.

    Parameters
    ----------
    table : StructureTable
        Table (or lazy table) for the basis the coefficients refer to.
    h : array_like
        Hamiltonian coefficients, length ``4**n - 1``, in rad/s.

    Returns
    -------
    scipy.sparse.csr_matrix
        Real sparse generator, assembled in a deterministic order.
    """
    h = np.asarray(h, dtype=float)
    size = len(table.basis)
    if h.shape != (size,):
        raise ValueError(f"coefficient vector must have length {size}, got shape {h.shape}")
    rows, cols, vals = [], [], []
    for l in np.flatnonzero(h):
        # [B_l, B_j] = i f B_k  ->  dB_j/dt gains -h_l f B_k
        j, k, f = table.row_arrays(int(l))
        rows.append(j)
        cols.append(k)
        vals.append(-h[l] * f)
    if not rows:
        return sp.csr_matrix((size, size))
    A = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(size, size),
    ).tocsr()
    A.sum_duplicates()
    A.eliminate_zeros()
    return A
