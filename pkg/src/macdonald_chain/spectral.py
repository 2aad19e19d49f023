"""Eigenvalues, eigenvectors and Macdonald coefficients of the auxiliary chain.

Eigenvalues are closed form.  Eigenvectors are computed as exact kernels of
``M - beta I`` and scaled so the coordinate at ``(k)`` matches the known
value of the integral-form coefficient there; dividing by
``prod_i (1 - q^{rho_i})`` then gives the power-sum coefficients ``X_rho^lam``.
"""

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import prod

from .exact_chain import aux_matrix
from .linalg import nullspace
from .measures import as_exact, pi_qt_table, pochhammer_xy
from .partitions import Partition, enumerate_partitions, mn_character, z_classical

__all__ = [
    "beta",
    "c_pair",
    "x_special",
    "x_row_k_anchor",
    "SpectralTable",
    "EigenvalueCollision",
    "eigen_table",
    "gram_check",
    "kostka_qt",
    "x_from_kostka",
    "fbar2_at_row",
    "fbar2_k1_at_ones",
    "SPECTRAL_MAX_K",
    "n_stat",
]

SPECTRAL_MAX_K = 12


class EigenvalueCollision(ValueError):
    """Two partitions share an eigenvalue, so eigenvectors are not determined."""


def beta(lam, q, t):
    """Eigenvalue ``t/(q^k-1) sum_i (q^{lam_i} - 1) t^{-i}``."""
    q, t = _qt(q, t)
    k = sum(lam)
    return t / (q**k - 1) * sum((q**p - 1) * t ** (-i) for i, p in enumerate(lam, start=1))


def _qt(q, t):
    if isinstance(q, float) or isinstance(t, float):
        return float(q), float(t)
    return as_exact(q), as_exact(t)


def c_pair(lam, q, t):
    """Arm-leg products ``(c_lam, c'_lam)``."""
    q, t = _qt(q, t)
    lam = Partition(lam)
    conj = lam.conjugate()
    one = 1.0 if isinstance(q, float) else Fraction(1)
    c = cp = one
    for i, j in lam.boxes():
        a = lam[i - 1] - j
        leg = conj[j - 1] - i
        c *= 1 - q**a * t ** (leg + 1)
        cp *= 1 - q ** (a + 1) * t**leg
    return c, cp


def x_row_k_anchor(lam, q, t):
    """``X_{(k)}^lam = prod over boxes (i,j) != (1,1) of (t^{i-1} - q^{j-1})``."""
    q, t = _qt(q, t)
    one = 1.0 if isinstance(q, float) else Fraction(1)
    return prod((t ** (i - 1) - q ** (j - 1) for i, j in Partition(lam).boxes() if (i, j) != (1, 1)), start=one)


def x_special(which, arg, q, t):
    """Closed-form special values of the power-sum coefficients.

    ``which`` is one of

    * ``"row_k"``: ``X_rho^{(k)} = (q,q)_k / prod_i (1 - q^{rho_i})``
    * ``"row_k_printed"``: ``(q,q)_k prod_i (1 - t^{rho_i})``, a misprinted
      variant kept for comparison; it does not match the eigenvector table
    * ``"row_1k"``: ``X_rho^{(1^k)} = (-1)^{k - l(rho)} (t,t)_k / prod_i (1 - t^{rho_i})``
    * ``"col_k"``: ``X_{(k)}^lam`` for a shape ``lam``
    """
    q, t = _qt(q, t)
    arg = Partition(arg)
    k = sum(arg)
    if which == "row_k":
        return pochhammer_xy(q, q, k) / prod(1 - q**r for r in arg)
    if which == "row_k_printed":
        return pochhammer_xy(q, q, k) * prod(1 - t**r for r in arg)
    if which == "row_1k":
        sign = -1 if (k - len(arg)) % 2 else 1
        return sign * pochhammer_xy(t, t, k) / prod(1 - t**r for r in arg)
    if which == "col_k":
        return x_row_k_anchor(arg, q, t)
    raise ValueError(f"unsupported special value {which!r}")


@dataclass
class SpectralTable:
    """Exact spectral data of the auxiliary kernel on partitions of k."""

    k: int
    q: Fraction
    t: Fraction
    index: object
    pi: list
    beta: list
    f: list
    norms: list
    c: list
    cp: list
    X: list = field(repr=False)
    anchors: list = field(default_factory=list)

    def position(self, lam):
        return self.index.index(Partition(lam))

    def fbar2(self, lam, rho):
        """Squared normalized eigenfunction ``f_lam(rho)^2 / <f_lam, f_lam>``."""
        i = self.position(lam)
        return self.f[i][self.position(rho)] ** 2 / self.norms[i]

    def to_json(self):
        names = [str(p) for p in self.index]
        return json.dumps(
            {
                "k": self.k,
                "q": str(self.q),
                "t": str(self.t),
                "partitions": names,
                "eigenvalues": {n: str(b) for n, b in zip(names, self.beta)},
                "eigenvectors": {n: [str(x) for x in v] for n, v in zip(names, self.f)},
                "norms": {n: str(x) for n, x in zip(names, self.norms)},
                "X": {n: [str(x) for x in v] for n, v in zip(names, self.X)},
            },
            indent=1,
        )


def n_stat(lam):
    """``n(lam) = sum_i (i-1) lam_i``."""
    return sum(i * p for i, p in enumerate(lam))


def eigen_table(k, q, t, M=None, anchor="auto"):
    """Exact eigen-decomposition of the auxiliary kernel for partitions of k.

    Each kernel vector is scaled so its ``(k)`` coordinate equals
    ``X_{(k)}^lam (1 - q^k)``.  When that value is zero (it happens when
    ``q^a = t^b`` for small a, b) the vector is instead scaled so that
    ``K_{(k),lam} = t^{n(lam)}``; ``anchor="kostka"`` forces this for every
    shape.  ``table.anchors`` records which rule was used.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    if k > SPECTRAL_MAX_K:
        raise ValueError(f"exact eigenvectors are capped at k={SPECTRAL_MAX_K}")
    q, t = as_exact(q), as_exact(t)
    index = enumerate_partitions(k)
    betas = [beta(lam, q, t) for lam in index]
    seen = {}
    clashes = []
    for lam, b in zip(index, betas):
        if b in seen:
            clashes.append((seen[b], lam))
        seen[b] = lam
    if clashes:
        raise EigenvalueCollision(f"repeated eigenvalues at q={q}, t={t}: {clashes}")
    if M is None:
        M = aux_matrix(k, q, t)
    dense = M.to_dense()
    n = len(index)
    top = index.index(Partition((k,)))
    norm_const = pochhammer_xy(q, q, k) / pochhammer_xy(t, q, k)
    f, norms, cs, cps, X, anchors = [], [], [], [], [], []
    denoms = [prod(1 - q**r for r in rho) for rho in index]
    zs = [z_classical(rho) for rho in index]
    for lam, b in zip(index, betas):
        shifted = [[dense[i][j] - (b if i == j else 0) for j in range(n)] for i in range(n)]
        ker = nullspace(shifted)
        if len(ker) != 1:
            raise ValueError(f"kernel for {lam} has dimension {len(ker)}")
        v = ker[0]
        target = x_row_k_anchor(lam, q, t) * (1 - q**k)
        if target != 0 and anchor != "kostka":
            scale = target / v[top]
            anchors.append("row")
        else:
            # the row-(k) value vanishes at this (q, t); use K_{(k),lam} = t^{n(lam)}
            s = sum(x / (d * z) for x, d, z in zip(v, denoms, zs))
            scale = t ** n_stat(lam) / s
            anchors.append("kostka")
        v = [x * scale for x in v]
        c, cp = c_pair(lam, q, t)
        f.append(v)
        cs.append(c)
        cps.append(cp)
        norms.append(c * cp * norm_const)
        X.append([x / d for x, d in zip(v, denoms)])
    pi = pi_qt_table(k, q, t).probs
    return SpectralTable(k, q, t, index, pi, betas, f, norms, cs, cps, X, anchors)


def gram_check(table):
    """Largest deviation of the ``pi``-Gram matrix of the eigenvectors from its claimed diagonal."""
    worst = Fraction(0)
    n = len(table.index)
    for a in range(n):
        fa = table.f[a]
        for b in range(a, n):
            fb = table.f[b]
            g = sum(x * y * p for x, y, p in zip(fa, fb, table.pi))
            target = table.norms[a] if a == b else 0
            worst = max(worst, abs(g - target))
    return worst


def kostka_qt(table):
    """``K[lam][mu] = K_{mu lam}(q,t) = sum_rho chi^mu_rho X_rho^lam / z_rho``."""
    index = table.index
    zs = [z_classical(rho) for rho in index]
    chars = [[mn_character(mu, rho) for rho in index] for mu in index]
    return [
        [sum(ch * x / z for ch, x, z in zip(chars[m], table.X[l], zs)) for m in range(len(index))]
        for l in range(len(index))
    ]


def x_from_kostka(K, index):
    """Invert :func:`kostka_qt`: ``X_rho^lam = sum_mu chi^mu_rho K_{mu lam}``."""
    chars = [[mn_character(mu, rho) for rho in index] for mu in index]
    n = len(index)
    return [[sum(chars[m][r] * K[l][m] for m in range(n)) for r in range(n)] for l in range(n)]


def fbar2_at_row(lam, q, t):
    """Closed form of ``fbar_lam((k))^2`` from the anchor value and arm-leg norms."""
    q, t = _qt(q, t)
    k = sum(lam)
    c, cp = c_pair(lam, q, t)
    return (x_row_k_anchor(lam, q, t) * (q**k - 1)) ** 2 / (c * cp) * pochhammer_xy(t, q, k) / pochhammer_xy(q, q, k)


def fbar2_k1_at_ones(k, q, t):
    """Closed form of ``fbar_{(k-1,1)}((1^k))^2``.

    ``p = sum_{j=1}^{k-1} (1 - q^{j-1} t^2)(1 - q^j) / ((1 - q^j t)(1 - q^{j-1} t))``
    times a ratio of four-factor products that tends to ``(1-1/q)/(1-1/t)``.
    Works for exact or float ``q``, ``t``.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    q, t = _qt(q, t)
    # each term divided through by q^{2j-1} so floats do not overflow
    p = sum(
        (q ** (1 - j) - t**2) * (q ** (-j) - 1) / ((q ** (-j) - t) * (q ** (1 - j) - t))
        for j in range(1, k)
    )
    a, b = q ** (2 - k), q ** (1 - k)
    ratio = (
        (1 - a / t)
        * (1 - b / t)
        / ((1 - b) * (1 - b / q))
        * (1 - 1 / q)
        * (1 - b / t)
        / ((1 - 1 / t) * (1 - a / t**2))
    )
    return ratio * p**2
