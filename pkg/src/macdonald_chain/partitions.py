"""Integer partitions: representation, enumeration, orders and box statistics.

Partitions are stored as weakly decreasing tuples of positive integers.  The
canonical ordering of the partitions of ``k`` is reverse lexicographic, so
``(k)`` comes first and ``(1^k)`` last.
"""

from collections import Counter, namedtuple
from functools import lru_cache
from itertools import product
from math import comb, factorial

import numpy as np

__all__ = [
    "Partition",
    "PartitionIndexSet",
    "BoxStat",
    "enumerate_partitions",
    "multiplicities",
    "z_classical",
    "dominance_leq",
    "arm_leg",
    "mn_character",
    "sub_multisets",
    "multiset_union",
    "multiset_difference",
]


class Partition(tuple):
    """A weakly decreasing tuple of positive integers.

    Text form is comma separated (``"5,3,1,1"``); the empty partition is
    written ``"-"``.
    """

    __slots__ = ()

    def __new__(cls, parts=()):
        if isinstance(parts, int):
            parts = (parts,)
        parts = tuple(int(p) for p in parts)
        for a, b in zip(parts, parts[1:]):
            if a < b:
                raise ValueError(f"parts must be weakly decreasing: {parts}")
        if parts and parts[-1] < 1:
            raise ValueError(f"parts must be positive: {parts}")
        return tuple.__new__(cls, parts)

    @classmethod
    def _trusted(cls, parts):
        # skips validation; callers guarantee a valid decreasing tuple
        return tuple.__new__(cls, parts)

    @classmethod
    def from_parts(cls, parts):
        """Build from parts in any order."""
        return tuple.__new__(cls, sorted((int(p) for p in parts), reverse=True))

    @classmethod
    def parse(cls, text):
        text = text.strip()
        if text in ("-", ""):
            return cls(())
        return cls(int(x) for x in text.replace(" ", "").split(","))

    @property
    def size(self):
        return sum(self)

    @property
    def length(self):
        return len(self)

    def multiplicities(self):
        return multiplicities(self)

    def conjugate(self):
        if not self:
            return Partition(())
        return Partition._trusted(
            tuple(sum(1 for p in self if p > j) for j in range(self[0]))
        )

    def boxes(self):
        """Yield the (row, column) boxes of the diagram, 1-indexed."""
        for i, p in enumerate(self, start=1):
            for j in range(1, p + 1):
                yield i, j

    def __str__(self):
        return ",".join(str(p) for p in self) if self else "-"

    def __repr__(self):
        return f"Partition({', '.join(str(p) for p in self)})"


BoxStat = namedtuple("BoxStat", ["row", "col", "arm", "leg"])


class PartitionIndexSet:
    """All partitions of ``k`` in reverse-lexicographic order."""

    def __init__(self, k, partitions):
        self.k = k
        self.partitions = partitions
        self._position = {p: i for i, p in enumerate(partitions)}
        self._mult = None

    def __len__(self):
        return len(self.partitions)

    def __iter__(self):
        return iter(self.partitions)

    def __getitem__(self, i):
        return self.partitions[i]

    def __contains__(self, lam):
        return lam in self._position

    def index(self, lam):
        try:
            return self._position[lam]
        except KeyError:
            raise KeyError(f"{lam!r} is not a partition of {self.k}") from None

    def multiplicity_matrix(self):
        """Integer array ``A`` with ``A[n, i] = a_i`` of the n-th partition."""
        if self._mult is None:
            rows, cols = [], []
            for n, lam in enumerate(self.partitions):
                rows.extend([n] * len(lam))
                cols.extend(lam)
            dtype = np.uint8 if self.k < 256 else np.int32
            a = np.zeros((len(self), self.k + 1), dtype=dtype)
            np.add.at(a, (np.asarray(rows, dtype=np.intp), np.asarray(cols, dtype=np.intp)), 1)
            self._mult = a
        return self._mult

    def __repr__(self):
        return f"PartitionIndexSet(k={self.k}, n={len(self)})"


def _reverse_lex(k):
    if k == 0:
        yield ()
        return
    a = [k]
    while True:
        yield tuple(a)
        ones = 0
        while a and a[-1] == 1:
            a.pop()
            ones += 1
        if not a:
            return
        x = a.pop() - 1
        rem = ones + 1
        a.append(x)
        while rem > x:
            a.append(x)
            rem -= x
        if rem:
            a.append(rem)


@lru_cache(maxsize=None)
def enumerate_partitions(k):
    """Return the :class:`PartitionIndexSet` of all partitions of ``k``."""
    if k < 0:
        raise ValueError("k must be non-negative")
    return PartitionIndexSet(k, [Partition._trusted(p) for p in _reverse_lex(k)])


def multiplicities(lam):
    """Sparse multiplicity vector ``{i: a_i(lam)}`` (zero entries omitted)."""
    return dict(Counter(lam))


def z_classical(lam):
    """Centralizer order ``prod_i i^{a_i} a_i!``."""
    z = 1
    for i, a in Counter(lam).items():
        z *= i**a * factorial(a)
    return z


def dominance_leq(mu, lam):
    """Dominance comparison of ``mu`` against ``lam``.

    Returns True when ``mu <= lam``, False when ``lam < mu`` strictly, and
    None when the two are incomparable.
    """
    if sum(mu) != sum(lam):
        raise ValueError("dominance order compares partitions of the same size")
    n = max(len(mu), len(lam))
    s_mu = s_lam = 0
    le = ge = True
    for i in range(n):
        s_mu += mu[i] if i < len(mu) else 0
        s_lam += lam[i] if i < len(lam) else 0
        if s_mu > s_lam:
            le = False
        if s_mu < s_lam:
            ge = False
    if le:
        return True
    if ge:
        return False
    return None


def arm_leg(lam, i, j):
    """Arm and leg of the box in row ``i``, column ``j`` (1-indexed)."""
    if not (1 <= i <= len(lam) and 1 <= j <= lam[i - 1]):
        raise ValueError(f"box ({i}, {j}) is outside the diagram of {lam}")
    leg = sum(1 for p in lam[i:] if p >= j)
    return BoxStat(i, j, lam[i - 1] - j, leg)


@lru_cache(maxsize=None)
def _mn(beta, rho):
    # beta: frozenset bead positions; rho: remaining cycle lengths
    if not rho:
        return 1
    r, rest = rho[0], rho[1:]
    total = 0
    for b in beta:
        c = b - r
        if c < 0 or c in beta:
            continue
        between = sum(1 for x in beta if c < x < b)
        sign = -1 if between % 2 else 1
        total += sign * _mn((beta - {b}) | {c}, rest)
    return total


def mn_character(lam, rho):
    """Irreducible character value chi^lam at the class rho (Murnaghan-Nakayama)."""
    if sum(lam) != sum(rho):
        raise ValueError("character needs partitions of the same size")
    n = len(lam)
    beta = frozenset(lam[i] + (n - 1 - i) for i in range(n))
    return _mn(beta, tuple(rho))


def sub_multisets(lam):
    """All sub-multisets of the parts of ``lam`` with their binomial weights.

    Each entry is ``(sub, prod_i C(a_i(lam), a_i(sub)))``; the empty partition
    and ``lam`` itself are included.
    """
    mult = sorted(Counter(lam).items(), reverse=True)
    out = []
    for choice in product(*(range(a + 1) for _, a in mult)):
        parts = []
        weight = 1
        for (i, a), b in zip(mult, choice):
            parts.extend([i] * b)
            weight *= comb(a, b)
        out.append((Partition._trusted(tuple(parts)), weight))
    out.sort(key=lambda e: (sum(e[0]), e[0]))
    return out


def multiset_union(a, b):
    return Partition._trusted(tuple(sorted(a + b, reverse=True)))


def multiset_difference(a, b):
    """Parts of ``a`` with the multiset ``b`` removed; ``b`` must be contained in ``a``."""
    rest = Counter(a)
    rest.subtract(Counter(b))
    if any(v < 0 for v in rest.values()):
        raise ValueError(f"{b} is not a sub-multiset of {a}")
    return Partition._trusted(tuple(sorted(rest.elements(), reverse=True)))
