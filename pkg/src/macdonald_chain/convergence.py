"""Distances to stationarity, spectral identities, bounds and mixing times."""

import json
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from math import exp, log

import numpy as np

from .exact_chain import power_dist
from .measures import Measure, as_exact, multiplicative_partition_function
from .partitions import Partition
from .samplers import STEPPERS, RngStream
from .spectral import beta, fbar2_k1_at_ones

__all__ = [
    "DistanceReport",
    "BoundReport",
    "MixingCapExceeded",
    "tv_distance",
    "chi2_distance",
    "chi2_spectral",
    "thm51_bound",
    "upper_bound_constants",
    "chi2_lower_bound_1k",
    "chi2_lead_term_1k",
    "tv_lower_bound_1k",
    "bound_report",
    "pk_sequence",
    "mixing_profile",
    "mixing_time",
    "empirical_profile",
    "prob_no_singletons",
    "singleton_event_tv",
    "binned_pi_qt",
]


def _json_value(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, Partition):
        return str(v)
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    return v


@dataclass
class DistanceReport:
    """Distance of the law after ``ell`` steps to the target."""

    start: Partition
    ell: int
    tv: object
    chi2: object = None
    backend: str = "exact"
    method: str = "exact-matrix"
    mc_error: float = None

    def __post_init__(self):
        if not 0 <= float(self.tv) <= 1 + 1e-12:
            raise ValueError(f"total variation {self.tv} outside [0, 1]")

    def to_dict(self):
        return {k: _json_value(v) for k, v in asdict(self).items()}


@dataclass
class BoundReport:
    """Upper and lower bounds for the auxiliary chain at one parameter point."""

    k: int
    q: object
    t: object
    ell: int
    upper: float = None
    upper_terms: tuple = ()
    chi2_lower: float = None
    tv_lower: float = None
    theta: float = None
    caveats: list = field(default_factory=list)

    def to_json(self):
        d = {k: _json_value(v) for k, v in asdict(self).items()}
        d["upper_terms"] = list(self.upper_terms)
        return json.dumps(d, indent=1)


class MixingCapExceeded(RuntimeError):
    """The distance did not drop below the threshold within the step cap."""


def _vectors(p, pi):
    if isinstance(p, Measure) and isinstance(pi, Measure):
        if p.index is not pi.index and list(p.index) != list(pi.index):
            raise ValueError("measures live on different index sets")
        return p.probs, pi.probs
    a = p.probs if isinstance(p, Measure) else p
    b = pi.probs if isinstance(pi, Measure) else pi
    if len(a) != len(b):
        raise ValueError(f"length mismatch {len(a)} vs {len(b)}")
    return a, b


def _is_float(v):
    return isinstance(v, np.ndarray) and v.dtype.kind == "f"


def tv_distance(p, pi, accumulate="exact"):
    """Total variation ``(1/2) sum |p - pi|``.

    Exact inputs are summed exactly unless ``accumulate="float"``, in which
    case each exact difference is rounded before the (float) sum; that is
    much faster for hundreds of thousands of states.
    """
    a, b = _vectors(p, pi)
    if _is_float(a) or _is_float(b):
        return 0.5 * float(np.abs(np.asarray(a, float) - np.asarray(b, float)).sum())
    if accumulate == "float":
        return 0.5 * float(np.sum([abs(float(x - y)) for x, y in zip(a, b)]))
    return sum(abs(x - y) for x, y in zip(a, b)) / 2


def chi2_distance(p, pi):
    """Chi-square distance ``sum (p - pi)^2 / pi``."""
    a, b = _vectors(p, pi)
    if any(y == 0 for y in b):
        raise ZeroDivisionError("target has a zero entry")
    if _is_float(a) or _is_float(b):
        a, b = np.asarray(a, float), np.asarray(b, float)
        return float(((a - b) ** 2 / b).sum())
    return sum((x - y) ** 2 / y for x, y in zip(a, b))


def chi2_spectral(table, start, ell):
    """``sum_{lam != (k)} fbar_lam(start)^2 beta_lam^{2 ell}`` from a spectral table."""
    s = table.position(start)
    top = table.position((table.k,))
    total = Fraction(0)
    for i in range(len(table.index)):
        if i != top:
            total += table.f[i][s] ** 2 / table.norms[i] * table.beta[i] ** (2 * ell)
    return total


def _floats(q, t):
    q, t = float(Fraction(q) if isinstance(q, str) else q), float(Fraction(t) if isinstance(t, str) else t)
    if not (q > 1 and t > 1):
        raise ValueError("need q, t > 1")
    return q, t


def thm51_bound(k, q, t, ell):
    """Upper bound on ``4 TV^2`` after ``ell`` steps from ``(k)``.

    ``(1-1/q)^{-3/2} (1-1/q^2)^{-2} (1/q + 1/(t q^{k/2}))^{2 ell}
    + k t/(t-1) (2/q^{k/4})^{2 ell}``.  Returns a :class:`BoundReport`.
    """
    if k < 4:
        raise ValueError("the bound is stated for k >= 4")
    if ell < 2:
        raise ValueError("the bound is stated for ell >= 2")
    qf, tf = _floats(q, t)
    coef = (1 - 1 / qf) ** -1.5 * (1 - qf**-2) ** -2
    base = 1 / qf + 1 / (tf * qf ** (k / 2))
    first = coef * base ** (2 * ell)
    second = k * tf / (tf - 1) * (2 / qf ** (k / 4)) ** (2 * ell)
    return BoundReport(k, q, t, ell, upper=first + second, upper_terms=(first, second))


def upper_bound_constants(k, q, t):
    """``(coefficient, base)`` of the leading term of :func:`thm51_bound`."""
    qf, tf = _floats(q, t)
    return (1 - 1 / qf) ** -1.5 * (1 - qf**-2) ** -2, 1 / qf + 1 / (tf * qf ** (k / 2))


def chi2_lower_bound_1k(k, q, t, ell):
    """``(1-1/q)/(1-1/t) k^2 / q^{2 ell}``: lower bound on chi-square from ``(1^k)``."""
    if k < 2 or ell < 0:
        raise ValueError("need k >= 2 and ell >= 0")
    if isinstance(q, float) or isinstance(t, float):
        q, t = _floats(q, t)
    else:
        q, t = as_exact(q), as_exact(t)
    return (1 - 1 / q) / (1 - 1 / t) * k**2 / q ** (2 * ell)


def chi2_lead_term_1k(k, q, t, ell):
    """``beta_{(k-1,1)}^{2 ell} fbar_{(k-1,1)}((1^k))^2``, a lower bound on chi-square from ``(1^k)``.

    Every term of the spectral sum is non-negative, so this always holds.
    :func:`chi2_lower_bound_1k` replaces ``fbar^2`` by its large-k limit
    ``(1-1/q)/(1-1/t) k^2``, which overestimates it at every finite k.
    """
    if k < 2 or ell < 0:
        raise ValueError("need k >= 2 and ell >= 0")
    lam = Partition((k - 1, 1))
    return beta(lam, q, t) ** (2 * ell) * fbar2_k1_at_ones(k, q, t)


def tv_lower_bound_1k(q, t, theta):
    """Asymptotic TV lower bound ``e^{-(t-1)/(q-1)} - e^{-q^{-theta}}`` from ``(1^k)``.

    Valid for large k at ``ell = log_q k + theta``; the vanishing correction
    is not included.  Returns ``(value, caveat)``.
    """
    qf, tf = _floats(q, t)
    value = exp(-(tf - 1) / (qf - 1)) - exp(-(qf ** (-theta)))
    caveat = "asymptotic in k; o(1) correction omitted"
    if not theta < -(tf - 1) / (qf - 1):
        caveat += f"; theta={theta} is outside the stated range theta < {-(tf - 1) / (qf - 1):.4f}"
    return value, caveat


def bound_report(k, q, t, ell):
    """All bounds at one point; ``theta = ell - log_q k``."""
    qf, _ = _floats(q, t)
    rep = thm51_bound(k, q, t, ell) if k >= 4 and ell >= 2 else BoundReport(k, q, t, ell)
    if k < 4 or ell < 2:
        rep.caveats.append("upper bound needs k >= 4 and ell >= 2")
    rep.chi2_lower = float(chi2_lower_bound_1k(k, q, t, ell))
    rep.theta = ell - log(k) / log(qf)
    rep.tv_lower, cav = tv_lower_bound_1k(q, t, rep.theta)
    rep.caveats.append(cav)
    return rep


def pk_sequence(k, q, t):
    """``[P_1, ..., P_k]`` with ``P_j = prod_{i<j} (1 - t^{-1} q^{-i}) / (1 - q^{-i})``."""
    if isinstance(q, float) or isinstance(t, float):
        q, t = _floats(q, t)
        out, p = [], 1.0
    else:
        q, t = as_exact(q), as_exact(t)
        if not (q > 1 and t > 1):
            raise ValueError("need q, t > 1")
        out, p = [], Fraction(1)
    for j in range(1, k + 1):
        out.append(p)
        p *= (1 - 1 / (t * q**j)) / (1 - q ** (-j))
    return out


def mixing_profile(M, start, pi, max_steps, accumulate="exact"):
    """Exact distances after ``0..max_steps`` steps, as :class:`DistanceReport` objects."""
    start = Partition(start)
    out = []
    for ell in range(max_steps + 1):
        d = power_dist(M, start, ell)
        tv = tv_distance(d, pi, accumulate)
        out.append(DistanceReport(start, ell, tv, chi2_distance(d, pi), d.backend, "exact-matrix"))
    return out


def _matrix_mixing(M, start, eps, pi, max_steps):
    start = Partition(start)
    index = M.index
    float_mode = M.backend == "float"
    v = {index.index(start): 1.0 if float_mode else Fraction(1)}
    target = pi.probs if isinstance(pi, Measure) else pi
    for ell in range(max_steps + 1):
        tv = 0.5 * sum(abs(v.get(j, 0) - target[j]) for j in range(len(index)))
        if tv < eps:
            return ell
        nxt = {}
        for i, x in v.items():
            for j, m in M.row_items(i):
                nxt[j] = nxt.get(j, 0) + x * m
        v = nxt
    raise MixingCapExceeded(f"TV still >= {eps} after {max_steps} steps")


def empirical_profile(stepper, params, start, pi, max_steps, chains, seed=0):
    """Monte Carlo distance profile from ``chains`` independent runs.

    Chain ``c`` uses stream ``c`` of ``seed``.  Reported TV is against the
    full partition histogram and is biased upward by roughly
    ``sqrt(n_states / chains)``; ``mc_error`` is a binomial standard error
    summed over states (a crude bound).
    """
    if stepper not in STEPPERS:
        raise ValueError(f"unknown stepper {stepper!r}")
    step = STEPPERS[stepper]
    start = Partition(start)
    index = pi.index
    target = np.asarray(pi.as_float())
    states = [start] * chains
    rngs = [RngStream(seed, c) for c in range(chains)]
    out = []
    for ell in range(max_steps + 1):
        counts = np.zeros(len(index))
        for s in states:
            counts[index.index(s)] += 1
        freq = counts / chains
        tv = 0.5 * float(np.abs(freq - target).sum())
        err = 0.5 * float(np.sqrt(freq * (1 - freq) / chains).sum())
        out.append(DistanceReport(start, ell, tv, None, "float", "empirical", err))
        if ell < max_steps:
            states = [step(s, params, r)[0] for s, r in zip(states, rngs)]
    return out


def mixing_time(chain, start, eps, pi, max_steps=1000, params=None, chains=10000, seed=0):
    """Smallest ``ell`` with ``TV(law after ell steps, pi) < eps``.

    ``chain`` is a transition matrix or lazy kernel (exact computation) or a
    stepper name such as ``"aux"`` (Monte Carlo, using ``params``, ``chains``
    and ``seed``).  The Monte Carlo variant returns ``(ell, mc_error)``.
    """
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    if hasattr(chain, "row_items"):
        return _matrix_mixing(chain, start, eps, pi, max_steps)
    if params is None:
        raise ValueError("params are required for a sampler-based estimate")
    prof = empirical_profile(chain, params, start, pi, max_steps, chains, seed)
    for rep in prof:
        if rep.tv < eps:
            return rep.ell, rep.mc_error
    raise MixingCapExceeded(f"empirical TV still >= {eps} after {max_steps} steps")


def prob_no_singletons(k, q, t):
    """Exact ``pi_{q,t}(a_1 = 0)`` from the partition generating function."""
    q, t = as_exact(q), as_exact(t)
    eta = [None] + [(t**i - 1) / (q**i - 1) for i in range(1, k + 1)]
    full = multiplicative_partition_function(eta, k)[k]
    no1 = multiplicative_partition_function([None, Fraction(0)] + eta[2:], k)[k]
    return no1 / full


def singleton_event_tv(k, q, t, ell, chains, seed=0, start=None):
    """Monte Carlo lower bound on TV from ``(1^k)`` using the event ``a_1 > 0``.

    Returns ``(estimate, standard_error, pi_event)`` where ``estimate`` is
    ``|P(a_1 > 0 after ell steps) - pi(a_1 > 0)|``.
    """
    from .samplers import aux_step

    start = Partition(start or (1,) * k)
    pi_event = 1 - float(prob_no_singletons(k, q, t))
    hits = 0
    for c in range(chains):
        rng = RngStream(seed, c)
        lam = start
        for _ in range(ell):
            lam = aux_step(lam, q, t, rng)
        hits += lam[-1] == 1
    p = hits / chains
    return abs(p - pi_event), (p * (1 - p) / chains) ** 0.5, pi_event


def binned_pi_qt(k, q, t):
    """Float law of ``(largest part, number of parts)`` under ``pi_{q,t}``.

    Dynamic programme over part sizes using the weights ``(eta_i/i)^a / a!``,
    so no partition list is needed.  Returns a 2-D array ``P[m, l]``.
    """
    qf, tf = _floats(q, t)
    i = np.arange(1, k + 1, dtype=float)
    log_w = i * (log(tf) - log(qf)) + np.log1p(-(tf**-i)) - np.log1p(-(qf**-i)) - np.log(i)
    # f[s, c]: weight of partitions using parts < current size, sum s, c parts
    f = np.zeros((k + 1, k + 1))
    f[0, 0] = 1.0
    out = np.zeros((k + 1, k + 1))
    for m in range(1, k + 1):
        g = np.zeros_like(f)
        w = 1.0
        for a in range(1, k // m + 1):
            w *= exp(log_w[m - 1]) / a
            g[a * m :, a:] += w * f[: k + 1 - a * m, : k + 1 - a]
        out[m] = g[k]
        f = f + g
        s = f.max()
        if s > 1e200:
            f /= s
            out /= s
    return out / out.sum()
