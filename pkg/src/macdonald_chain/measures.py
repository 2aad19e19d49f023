"""Probability measures on partitions of k.

Every measure here is built in one of two backends:

* ``"exact"``: entries are :class:`fractions.Fraction` and are evaluated from
  closed-form normalizing constants, so an exact total of 1 is a real check.
* ``"float"``: entries are a float64 array computed in the log domain and
  normalized numerically; usable for large ``k`` where ``q**k`` would
  overflow.
"""

import csv
import io
import json
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial, lgamma, log

import numpy as np

from .partitions import (
    Partition,
    enumerate_partitions,
    multiplicities,
    z_classical,
)

__all__ = [
    "Measure",
    "as_exact",
    "z_qt",
    "pochhammer_xy",
    "pi_qt",
    "pi_qt_table",
    "pi_ewens",
    "pi_multiplicative",
    "pi_inf_t",
    "w_given",
    "qt_weights",
    "multiplicative_partition_function",
]

BACKENDS = ("exact", "float")


def as_exact(x):
    """Coerce an int, Fraction or ``"p/q"`` string to a Fraction.

    Floats are refused so that exact computations never round silently.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("boolean is not a rational parameter")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        if "." in x or "e" in x.lower():
            raise ValueError(f"decimal {x!r} refused in exact mode; use p/q")
        return Fraction(x)
    if isinstance(x, float):
        raise TypeError(f"float {x!r} refused in exact mode; pass a Fraction")
    return Fraction(x)


def _num(x):
    # floats stay floats; everything else is promoted to an exact rational
    return x if isinstance(x, float) else as_exact(x)


def _check_backend(backend):
    if backend not in BACKENDS:
        raise ValueError(f"backend must be one of {BACKENDS}, got {backend!r}")


@dataclass(frozen=True)
class Measure:
    """A probability vector over the canonically ordered partitions of k."""

    index: object
    probs: object
    backend: str = "exact"

    @property
    def k(self):
        return self.index.k

    def __len__(self):
        return len(self.index)

    def __getitem__(self, lam):
        return self.probs[self.index.index(Partition(lam))]

    def items(self):
        return zip(self.index, self.probs)

    def total(self):
        return sum(self.probs) if self.backend == "exact" else float(np.sum(self.probs))

    def as_float(self):
        return np.array([float(p) for p in self.probs], dtype=float)

    def to_csv(self, fh=None, digits=6):
        """Write ``partition, fraction, decimal`` rows; returns the text if ``fh`` is None."""
        out = fh if fh is not None else io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["partition", "fraction", "probability"])
        for lam, p in self.items():
            frac = str(p) if self.backend == "exact" else ""
            w.writerow([str(lam), frac, f"{float(p):.{digits}f}"])
        if fh is None:
            return out.getvalue()

    def to_json(self):
        return json.dumps(
            {
                "k": self.k,
                "backend": self.backend,
                "partitions": [str(lam) for lam in self.index],
                "probabilities": [str(p) if self.backend == "exact" else float(p) for p in self.probs],
            },
            indent=1,
        )


def z_qt(lam, q, t):
    """Macdonald weight ``z_lam * prod_i (1 - q^lam_i) / (1 - t^lam_i)``."""
    q, t = _num(q), _num(t)
    z = float(z_classical(lam)) if isinstance(q, float) or isinstance(t, float) else Fraction(z_classical(lam))
    for p in lam:
        den = 1 - t**p
        if den == 0:
            raise ZeroDivisionError(f"t^{p} = 1")
        z = z * (1 - q**p) / den
    return z


def pochhammer_xy(x, y, k):
    """``(x, y)_k = prod_{i<k} (1 - x y^i)``."""
    x, y = _num(x), _num(y)
    r = 1.0 if isinstance(x, float) or isinstance(y, float) else Fraction(1)
    yi = 1
    for _ in range(k):
        r *= 1 - x * yi
        yi *= y
    return r


def qt_weights(k, q, t):
    """Per-part weights ``eta_i = (t^i - 1)/(q^i - 1)`` for ``i = 1..k`` (index 0 unused)."""
    return [None] + [(t**i - 1) / (q**i - 1) for i in range(1, k + 1)]


def _check_qt(q, t):
    if not (q > 1 and t > 1):
        raise ValueError(f"exact mode needs q, t > 1 (got q={q}, t={t})")


def pi_qt(lam, q, t):
    """Single exact value of the stationary law at ``lam``."""
    q, t = as_exact(q), as_exact(t)
    _check_qt(q, t)
    k = sum(lam)
    return pochhammer_xy(q, q, k) / pochhammer_xy(t, q, k) / z_qt(lam, q, t)


def _log_multiplicative(index, log_eta):
    """Unnormalized log weights ``sum_i a_i (log eta_i - log i) - sum_i log a_i!``."""
    a = index.multiplicity_matrix()
    k = index.k
    i = np.arange(1, k + 1, dtype=float)
    coef = np.zeros(k + 1)
    coef[1:] = np.asarray(log_eta[1:], dtype=float) - np.log(i)
    logfact = np.array([lgamma(n + 1) for n in range(k + 1)])
    return a.astype(float) @ coef - logfact[a].sum(axis=1)


def _normalize_log(logw):
    m = logw.max()
    w = np.exp(logw - m)
    return w / w.sum()


def pi_qt_table(k, q, t, backend="exact"):
    """The law proportional to ``1/z_lam(q,t)`` on partitions of k.

    Exact entries use ``Z = (q,q)_k / (t,q)_k`` without renormalizing.
    """
    _check_backend(backend)
    index = enumerate_partitions(k)
    if backend == "exact":
        q, t = as_exact(q), as_exact(t)
        _check_qt(q, t)
        eta = qt_weights(k, q, t)
        zc = pochhammer_xy(q, q, k) / pochhammer_xy(t, q, k)
        probs = [zc * _exact_multiplicative_weight(lam, eta) for lam in index]
        return Measure(index, probs, backend)
    q, t = float(q), float(t)
    log_eta = [0.0]
    for i in range(1, k + 1):
        eta = _float_qt_eta(i, q, t)
        if eta <= 0:
            raise ValueError(f"eta_{i} = {eta} is not positive for q={q}, t={t}")
        log_eta.append(log(eta))
    return Measure(index, _normalize_log(_log_multiplicative(index, log_eta)), backend)


def _float_qt_eta(i, q, t):
    # ratio (t^i-1)/(q^i-1) evaluated without overflow for large i
    if q > 1 and t > 1:
        return float(np.exp(i * (log(t) - log(q)) + np.log1p(-t**-i) - np.log1p(-q**-i)))
    return (t**i - 1) / (q**i - 1)


def _exact_multiplicative_weight(lam, eta):
    w = Fraction(1, z_classical(lam))
    for p in lam:
        w *= eta[p]
    return w


def pi_ewens(k, alpha, backend="exact"):
    """Ewens law ``Z alpha^{-l(lam)} / z_lam`` with its closed-form constant."""
    _check_backend(backend)
    index = enumerate_partitions(k)
    if backend == "exact":
        alpha = as_exact(alpha)
        if alpha <= 0:
            raise ValueError("alpha must be positive")
        zc = alpha**k * factorial(k)
        for i in range(1, k):
            zc /= i * alpha + 1
        probs = [zc / alpha ** len(lam) / z_classical(lam) for lam in index]
        return Measure(index, probs, backend)
    alpha = float(alpha)
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    log_eta = [0.0] + [-log(alpha)] * k
    return Measure(index, _normalize_log(_log_multiplicative(index, log_eta)), backend)


def pi_multiplicative(k, eta, backend="exact"):
    """Multiplicative law ``Z / z_lam * prod_i eta_i^{a_i}``.

    ``eta`` is a sequence ``eta_1..eta_k`` (length k) of positive weights.
    """
    _check_backend(backend)
    eta = list(eta)
    if len(eta) < k:
        raise ValueError(f"need {k} weights, got {len(eta)}")
    if any(e <= 0 for e in eta[:k]):
        raise ValueError("weights must be positive")
    index = enumerate_partitions(k)
    if backend == "exact":
        eta = [None] + [as_exact(e) for e in eta[:k]]
        w = [_exact_multiplicative_weight(lam, eta) for lam in index]
        s = sum(w)
        return Measure(index, [x / s for x in w], backend)
    log_eta = [0.0] + [log(float(e)) for e in eta[:k]]
    return Measure(index, _normalize_log(_log_multiplicative(index, log_eta)), backend)


def pi_inf_t(r, t, backend="exact"):
    """Replacement law ``t/(t-1) / z_mu * prod_i (1 - t^{-i})^{a_i}`` on partitions of r."""
    _check_backend(backend)
    if r < 1:
        raise ValueError("r must be at least 1")
    index = enumerate_partitions(r)
    if backend == "exact":
        t = as_exact(t)
        if t <= 1:
            raise ValueError("t must exceed 1")
        eta = [None] + [1 - t ** (-i) for i in range(1, r + 1)]
        c = t / (t - 1)
        return Measure(index, [c * _exact_multiplicative_weight(mu, eta) for mu in index], backend)
    t = float(t)
    if t <= 1:
        raise ValueError("t must exceed 1")
    log_eta = [0.0] + [float(np.log1p(-(t ** -i))) for i in range(1, r + 1)]
    return Measure(index, _normalize_log(_log_multiplicative(index, log_eta)), backend)


def w_given(lam, kept, q):
    """Probability that the retained sub-multiset is ``kept`` given ``lam``.

    ``(q^k - 1)^{-1} prod_i C(a_i(lam), a_i(kept)) (q^i - 1)^{a_i(lam) - a_i(kept)}``
    """
    a = multiplicities(lam)
    b = multiplicities(kept)
    if any(b[i] > a.get(i, 0) for i in b):
        raise ValueError(f"{kept} is not a sub-multiset of {lam}")
    if sum(kept) == sum(lam):
        raise ValueError("at least one part must be discarded")
    k = sum(lam)
    q = _num(q)
    w = 1 / (q**k - 1)
    for i, ai in a.items():
        bi = b.get(i, 0)
        w *= comb(ai, bi) * (q**i - 1) ** (ai - bi)
    return w


def multiplicative_partition_function(eta, k):
    """Coefficients ``f_n = sum_{lam |- n} prod eta_i^{a_i} / z_lam`` for n = 0..k.

    Uses ``n f_n = sum_{i=1}^n eta_i f_{n-i}`` from ``F = exp(sum eta_i x^i / i)``;
    ``eta`` is indexed from 1 (``eta[0]`` ignored).
    """
    f = [1.0 if isinstance(eta[1], float) else Fraction(1)]
    for n in range(1, k + 1):
        f.append(sum(eta[i] * f[n - i] for i in range(1, n + 1)) / n)
    return f
