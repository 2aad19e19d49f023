"""Exact transition matrices on partitions of k.

The auxiliary-variables kernel is built twice: once from the discard and
replace probabilities (multiset binomials), and once from the power-sum
action of the first Macdonald operator (subsets of part positions).  Both
must agree exactly.  The class-level Metropolis baseline and Hanlon's
random-transposition chain live here as well.
"""

import csv
import io
import json
from fractions import Fraction
from itertools import combinations
from math import comb, prod

import numpy as np

from .measures import Measure, _check_backend, as_exact, pi_inf_t
from .partitions import (
    Partition,
    enumerate_partitions,
    multiplicities,
    multiset_union,
    sub_multisets,
    z_classical,
)

__all__ = [
    "TransitionMatrix",
    "LazyKernel",
    "PartitionCombination",
    "aux_matrix",
    "aux_kernel",
    "aux_row",
    "macdonald_d1_action",
    "aux_matrix_via_operator",
    "check_reversibility",
    "stationarity_residual",
    "power_dist",
    "metropolis_matrix",
    "hanlon_matrix",
    "jack_operator_action",
    "hanlon_ell_matrix",
    "DENSE_EXACT_MAX_K",
]

DENSE_EXACT_MAX_K = 20
DENSE_FLOAT_MAX_K = 30


def _params(q, t, backend):
    _check_backend(backend)
    if backend == "exact":
        q, t = as_exact(q), as_exact(t)
    else:
        q, t = float(q), float(t)
    if not (q > 1 and t > 1):
        raise ValueError(f"need q, t > 1 (got q={q}, t={t})")
    return q, t


class TransitionMatrix:
    """Sparse row-stochastic matrix over an index set of partitions.

    ``rows[i]`` maps column positions to entries; zero entries are omitted.
    """

    def __init__(self, index, rows, backend="exact", name=""):
        self.index = index
        self.rows = rows
        self.backend = backend
        self.name = name

    @property
    def k(self):
        return self.index.k

    def __len__(self):
        return len(self.index)

    def row_items(self, i):
        return self.rows[i].items()

    def entry(self, lam, nu):
        zero = 0.0 if self.backend == "float" else Fraction(0)
        return self.rows[self.index.index(Partition(lam))].get(self.index.index(Partition(nu)), zero)

    def row(self, lam):
        """Row of ``lam`` as ``{partition: probability}``."""
        r = self.rows[self.index.index(Partition(lam))]
        return {self.index[j]: v for j, v in sorted(r.items())}

    def row_sums(self):
        return [sum(r.values()) for r in self.rows]

    def nnz(self):
        return sum(len(r) for r in self.rows)

    def to_dense(self):
        n = len(self)
        if self.backend == "float":
            a = np.zeros((n, n))
            for i, r in enumerate(self.rows):
                for j, v in r.items():
                    a[i, j] = v
            return a
        a = [[Fraction(0)] * n for _ in range(n)]
        for i, r in enumerate(self.rows):
            for j, v in r.items():
                a[i][j] = v
        return a

    def to_float(self):
        rows = [{j: float(v) for j, v in r.items()} for r in self.rows]
        return TransitionMatrix(self.index, rows, "float", self.name)

    def apply(self, f):
        """Right action ``(M f)(lam) = sum_nu M(lam, nu) f(nu)``."""
        return [sum(v * f[j] for j, v in r.items()) for r in self.rows]

    def to_csv(self, fh=None, digits=10):
        out = fh if fh is not None else io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["row", "column", "fraction", "probability"])
        for i, r in enumerate(self.rows):
            for j in sorted(r):
                v = r[j]
                frac = str(v) if self.backend == "exact" else ""
                w.writerow([str(self.index[i]), str(self.index[j]), frac, f"{float(v):.{digits}g}"])
        if fh is None:
            return out.getvalue()

    def to_json(self):
        fmt = str if self.backend == "exact" else float
        return json.dumps(
            {
                "name": self.name,
                "k": self.k,
                "backend": self.backend,
                "partitions": [str(p) for p in self.index],
                "rows": [{str(j): fmt(v) for j, v in sorted(r.items())} for r in self.rows],
            },
            indent=1,
        )

    def __repr__(self):
        return f"TransitionMatrix({self.name or 'M'}, k={self.k}, n={len(self)}, backend={self.backend})"


class LazyKernel:
    """Rows materialized on demand by ``row_fn(lam)`` and cached."""

    def __init__(self, index, row_fn, backend, name=""):
        self.index = index
        self.backend = backend
        self.name = name
        self._row_fn = row_fn
        self._cache = {}

    @property
    def k(self):
        return self.index.k

    def __len__(self):
        return len(self.index)

    def row_items(self, i):
        if i not in self._cache:
            lam = self.index[i]
            self._cache[i] = {self.index.index(nu): v for nu, v in self._row_fn(lam).items()}
        return self._cache[i].items()

    def row(self, lam):
        return self._row_fn(Partition(lam))


class PartitionCombination(dict):
    """Finite formal sum of partitions (all of one size) with scalar coefficients."""

    def add(self, lam, c):
        if c:
            self[lam] = self.get(lam, 0) + c

    def size(self):
        sizes = {sum(lam) for lam in self}
        if len(sizes) > 1:
            raise ValueError(f"mixed sizes {sorted(sizes)}")
        return sizes.pop() if sizes else None


class _InfTCache:
    def __init__(self, t, backend):
        self.t = t
        self.backend = backend
        self._tables = {}

    def __call__(self, r):
        if r not in self._tables:
            m = pi_inf_t(r, self.t, self.backend)
            self._tables[r] = list(m.items())
        return self._tables[r]


def aux_row(lam, q, t, backend="exact", _inf=None):
    """Row ``M(lam, .)`` of the auxiliary-variables kernel as ``{nu: prob}``.

    Sums ``w_lam(kept) * pi_inf_t(nu - kept)`` over proper sub-multisets
    ``kept`` of ``lam``.
    """
    q, t = _params(q, t, backend)
    lam = Partition(lam)
    inf = _inf or _InfTCache(t, backend)
    k = sum(lam)
    a = multiplicities(lam)
    qpow = {i: q**i - 1 for i in a}
    norm = q**k - 1
    out = {}
    for kept, binom in sub_multisets(lam):
        if len(kept) == len(lam):
            continue
        b = multiplicities(kept)
        w = binom * prod(qpow[i] ** (ai - b.get(i, 0)) for i, ai in a.items()) / norm
        for mu, p in inf(k - sum(kept)):
            nu = multiset_union(kept, mu)
            out[nu] = out.get(nu, 0) + w * p
    return out


def aux_matrix(k, q, t, backend="exact"):
    """Dense-capable auxiliary-variables kernel on partitions of k."""
    if k < 1:
        raise ValueError("k must be at least 1")
    cap = DENSE_EXACT_MAX_K if backend == "exact" else DENSE_FLOAT_MAX_K
    if k > cap:
        raise ValueError(f"full {backend} matrix capped at k={cap}; use aux_kernel for single rows")
    q, t = _params(q, t, backend)
    index = enumerate_partitions(k)
    inf = _InfTCache(t, backend)
    rows = []
    for lam in index:
        r = aux_row(lam, q, t, backend, inf)
        rows.append({index.index(nu): v for nu, v in r.items()})
    return TransitionMatrix(index, rows, backend, "aux")


def aux_kernel(k, q, t, backend="exact"):
    """Auxiliary-variables kernel whose rows are built only when visited."""
    q, t = _params(q, t, backend)
    inf = _InfTCache(t, backend)
    return LazyKernel(enumerate_partitions(k), lambda lam: aux_row(lam, q, t, backend, inf), backend, "aux")


def macdonald_d1_action(lam, q, t, n):
    """Power-sum expansion of the first Macdonald operator applied to ``p_lam`` in n variables.

    ``[n] p_lam + t^n/(t-1) sum_{J != {}} prod_{j in J}(q^{lam_j} - 1)
    p_{lam_{J^c}} sum_{mu |- |lam_J|} prod_m (1 - t^{-mu_m}) p_mu / z_mu``,
    with J running over subsets of part positions.
    """
    q, t = as_exact(q), as_exact(t)
    lam = Partition(lam)
    if n < len(lam):
        raise ValueError("need at least as many variables as parts")
    out = PartitionCombination()
    out.add(lam, sum(t ** (n - i) for i in range(1, n + 1)))
    pref = t**n / (t - 1)
    inner = {}
    positions = range(len(lam))
    for size in range(1, len(lam) + 1):
        for J in combinations(positions, size):
            coef = pref * prod(q ** lam[j] - 1 for j in J)
            kept = Partition._trusted(tuple(lam[i] for i in positions if i not in J))
            r = sum(lam[j] for j in J)
            if r not in inner:
                inner[r] = [
                    (mu, prod((1 - t ** (-m) for m in mu), start=Fraction(1)) / z_classical(mu))
                    for mu in enumerate_partitions(r)
                ]
            for mu, c in inner[r]:
                out.add(multiset_union(kept, mu), coef * c)
    return out


def aux_matrix_via_operator(k, q, t, n, rescale="variables"):
    """Auxiliary kernel recovered from the Macdonald operator by an affine rescale.

    ``rescale="variables"`` (default) uses ``t/(q^k-1) (t^{-n} D - sum_{i<=n} t^{-i})``,
    which removes every trace of n.  ``rescale="degree"`` uses ``t^{-k}`` and
    ``sum_{i<=k}`` instead; that variant agrees only when ``n == k``.
    """
    if n < k:
        raise ValueError(f"need n >= k (got n={n}, k={k})")
    if rescale not in ("variables", "degree"):
        raise ValueError("rescale must be 'variables' or 'degree'")
    q, t = as_exact(q), as_exact(t)
    if not (q > 1 and t > 1):
        raise ValueError("need q, t > 1")
    m = n if rescale == "variables" else k
    shift = sum(t ** (-i) for i in range(1, m + 1))
    scale = t / (q**k - 1)
    index = enumerate_partitions(k)
    rows = []
    for lam in index:
        d = macdonald_d1_action(lam, q, t, n)
        d.add(lam, -shift * t**m)
        row = {}
        for nu, c in d.items():
            v = scale * c / t**m
            if v:
                row[index.index(nu)] = v
        rows.append(row)
    return TransitionMatrix(index, rows, "exact", "aux-operator")


def _as_vector(pi):
    return pi.probs if isinstance(pi, Measure) else pi


def check_reversibility(M, pi):
    """Largest detailed-balance residual ``|pi(x)M(x,y) - pi(y)M(y,x)|``."""
    p = _as_vector(pi)
    if len(p) != len(M):
        raise ValueError(f"dimension mismatch: {len(p)} vs {len(M)}")
    if isinstance(pi, Measure) and pi.index.k != M.k:
        raise ValueError("index sets differ")
    worst = 0
    for i in range(len(M)):
        for j, v in M.row_items(i):
            back = M.rows[j].get(i, 0) if hasattr(M, "rows") else dict(M.row_items(j)).get(i, 0)
            worst = max(worst, abs(p[i] * v - p[j] * back))
    return worst


def stationarity_residual(M, pi):
    """Largest entry of ``|pi M - pi|``."""
    p = _as_vector(pi)
    if len(p) != len(M):
        raise ValueError(f"dimension mismatch: {len(p)} vs {len(M)}")
    out = [0] * len(p)
    for i in range(len(M)):
        for j, v in M.row_items(i):
            out[j] += p[i] * v
    return max(abs(a - b) for a, b in zip(out, p))


def power_dist(M, start, ell, backend=None):
    """Distribution after ``ell`` steps from ``start`` (a row of ``M^ell``)."""
    if ell < 0:
        raise ValueError("ell must be non-negative")
    backend = backend or M.backend
    index = M.index
    s = index.index(Partition(start))
    one = 1.0 if backend == "float" else Fraction(1)
    if backend == "float" and isinstance(M, TransitionMatrix) and len(M) <= 5000:
        if not hasattr(M, "_dense_cache") or M._dense_cache is None:
            M._dense_cache = np.asarray(M.to_float().to_dense() if M.backend == "exact" else M.to_dense())
        v = np.zeros(len(index))
        v[s] = 1.0
        for _ in range(ell):
            v = v @ M._dense_cache
        return Measure(index, v, "float")
    v = {s: one}
    for _ in range(ell):
        nxt = {}
        for i, pi in v.items():
            for j, x in M.row_items(i):
                if backend == "float":
                    x = float(x)
                nxt[j] = nxt.get(j, 0) + pi * x
        v = nxt
    if backend == "float":
        probs = np.zeros(len(index))
        for j, x in v.items():
            probs[j] = x
    else:
        probs = [v.get(j, Fraction(0)) for j in range(len(index))]
    return Measure(index, probs, backend)


def _transposition_moves(lam):
    """Cycle-type moves of a uniform transposition with their counts.

    Yields ``(kind, nu, count)`` with ``kind`` in ``{"merge", "split"}``; counts
    are over unordered pairs and sum to ``C(k, 2)``.  Split counts are halved
    per ordered piece, so they may be half-integers.
    """
    parts = list(lam)
    for i, j in combinations(range(len(parts)), 2):
        rest = parts[:i] + parts[i + 1 : j] + parts[j + 1 :]
        yield "merge", Partition.from_parts(rest + [parts[i] + parts[j]]), Fraction(parts[i] * parts[j])
    for i, a in enumerate(parts):
        rest = parts[:i] + parts[i + 1 :]
        for d in range(1, a):
            yield "split", Partition.from_parts(rest + [d, a - d]), Fraction(a, 2)


def _class_chain(k, accept, backend, name):
    index = enumerate_partitions(k)
    total = comb(k, 2)
    rows = []
    for lam in index:
        row = {}
        i = index.index(lam)
        for kind, nu, cnt in _transposition_moves(lam):
            p = cnt / total * accept(kind, lam, nu)
            if backend == "float":
                p = float(p)
            if p:
                j = index.index(nu)
                row[j] = row.get(j, 0) + p
        hold = 1 - sum(row.values())
        if hold:
            row[i] = row.get(i, 0) + hold
        rows.append(row)
    return TransitionMatrix(index, rows, backend, name)


def metropolis_matrix(k, q, t, backend="exact"):
    """Class-level Metropolis chain from uniform transpositions.

    A move ``lam -> nu`` is accepted with ``min(1, w(nu)/w(lam))`` where
    ``w(lam) = prod_i eta_i^{a_i}`` and ``eta_i = (t^i-1)/(q^i-1)``.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    q, t = _params(q, t, backend)
    eta = [None] + [(t**i - 1) / (q**i - 1) for i in range(1, k + 1)]

    def weight(lam):
        return prod((eta[p] for p in lam), start=1)

    def accept(kind, lam, nu):
        r = weight(nu) / weight(lam)
        return 1 if r >= 1 else r

    if backend == "exact":
        return _class_chain(k, accept, "exact", "metropolis")
    # float: compute acceptance in floats directly
    return _class_chain(k, lambda kind, lam, nu: float(accept(kind, lam, nu)), "float", "metropolis")


def hanlon_matrix(r, alpha, variant="operator"):
    """Hanlon's random-transposition Metropolis chain on partitions of r.

    ``variant="operator"`` (default) is the chain read off the Jack operator:
    merges always taken, splits taken with probability ``1/alpha``; it is
    reversible for ``alpha^{-l(lam)}/z_lam``.  ``variant="verbal"`` swaps the
    roles (splits always, merges with ``1/alpha``) and is reversible for the
    Ewens law with parameter ``1/alpha`` instead.
    """
    if r < 2:
        raise ValueError("r must be at least 2")
    alpha = as_exact(alpha)
    if alpha < 1:
        raise ValueError("alpha must be at least 1")
    if variant not in ("operator", "verbal"):
        raise ValueError("variant must be 'operator' or 'verbal'")
    damped = "split" if variant == "operator" else "merge"

    def accept(kind, lam, nu):
        return 1 / alpha if kind == damped else 1

    return _class_chain(r, accept, "exact", f"hanlon-{variant}")


def jack_operator_action(lam, alpha, n):
    """Power-sum expansion of ``(alpha U_n + V_n) p_lam`` in n variables.

    Merge terms replace two parts by their sum, split terms replace a part
    ``lam_k`` by ``(lam_k - m, m)`` for ``m = 1..lam_k - 1`` (both orders kept),
    and the remaining scalars sit on the diagonal.
    """
    alpha = as_exact(alpha)
    lam = Partition(lam)
    if n < sum(lam):
        raise ValueError("need n >= |lam|")
    half = Fraction(1, 2)
    parts = list(lam)
    out = PartitionCombination()
    diag = half * (
        alpha * sum(p * (p - 1) for p in parts) + sum(p * (2 * n - p - 1) for p in parts)
    )
    out.add(lam, diag)
    s = len(parts)
    for j in range(s):
        for k in range(s):
            if j != k:
                rest = [parts[x] for x in range(s) if x not in (j, k)]
                out.add(Partition.from_parts(rest + [parts[j] + parts[k]]), half * alpha * parts[j] * parts[k])
    for k in range(s):
        rest = parts[:k] + parts[k + 1 :]
        for m in range(1, parts[k]):
            out.add(Partition.from_parts(rest + [parts[k] - m, m]), half * parts[k])
    return out


def hanlon_ell_matrix(r, alpha, n):
    """Coefficients ``l_{mu lam}(alpha)`` from the Jack operator action, as a matrix.

    Subtracts ``(n-1) r`` from the diagonal and divides by ``alpha C(r,2)``;
    rows are indexed by the source partition.
    """
    if n < r:
        raise ValueError(f"need n >= r (got n={n}, r={r})")
    if r < 2:
        raise ValueError("r must be at least 2")
    alpha = as_exact(alpha)
    index = enumerate_partitions(r)
    scale = alpha * comb(r, 2)
    rows = []
    for lam in index:
        d = jack_operator_action(lam, alpha, n)
        d.add(lam, -(n - 1) * r)
        rows.append({index.index(nu): c / scale for nu, c in d.items() if c})
    return TransitionMatrix(index, rows, "exact", "hanlon-ell")
