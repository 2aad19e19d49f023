"""Random generation on partitions: the auxiliary-variables chain and baselines.

All samplers take an :class:`RngStream`.  Parameters given as Fractions (or
ints) drive exact-probability Bernoulli trials; floats switch to ordinary
floating-point coins.
"""

import csv
import io
import json
import random
from bisect import bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import accumulate, groupby
from math import comb

import numpy as np

from .measures import as_exact
from .partitions import Partition, multiset_union

__all__ = [
    "RngStream",
    "RetryLimitExceeded",
    "ChainTrace",
    "stick_breaking",
    "chinese_restaurant",
    "sample_w",
    "sample_pi_inf_t",
    "sample_multiplicative_rejection",
    "aux_step",
    "metropolis_step",
    "hanlon_step",
    "run_chain",
    "STEPPERS",
]

DEFAULT_MAX_RETRIES = 10**9


class RetryLimitExceeded(RuntimeError):
    """A rejection loop hit its retry cap without accepting."""


class RngStream:
    """Seeded random stream; ``(seed, stream)`` pairs give independent streams.

    The state is derived with :class:`numpy.random.SeedSequence` and drives a
    Mersenne Twister, which is much faster than numpy for scalar draws.
    """

    def __init__(self, seed=0, stream=0):
        self.seed = int(seed)
        self.stream = int(stream)
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream,))
        self._rand = random.Random(int.from_bytes(ss.generate_state(8, np.uint32).tobytes(), "little"))

    def spawn(self, stream):
        return RngStream(self.seed, stream)

    def randint(self, lo, hi):
        """Uniform integer in ``[lo, hi]``."""
        return self._rand.randint(lo, hi)

    def randrange(self, n):
        return self._rand.randrange(n)

    def random(self):
        return self._rand.random()

    def bernoulli(self, p):
        """True with probability ``p``; exact when ``p`` is a Fraction."""
        if isinstance(p, Fraction):
            if p >= 1:
                return True
            if p <= 0:
                return False
            return self._rand.randrange(p.denominator) < p.numerator
        return self._rand.random() < p

    def all_heads(self, m, p):
        """Whether ``m`` independent coins of heads-probability ``p`` all land heads.

        Flips stop at the first tail, so the cost is geometric rather than ``m``.
        """
        for _ in range(m):
            if not self.bernoulli(p):
                return False
        return True

    def __repr__(self):
        return f"RngStream(seed={self.seed}, stream={self.stream})"


def _coerce(x):
    return x if isinstance(x, float) else as_exact(x)


def stick_breaking(k, rng):
    """Draw a partition of k with probability ``1/z_lam`` by uniform stick-breaking."""
    if k < 1:
        raise ValueError("k must be at least 1")
    parts = []
    rem = k
    while rem:
        u = rng.randint(1, rem)
        parts.append(u)
        rem -= u
    parts.sort(reverse=True)
    return Partition._trusted(tuple(parts))


def chinese_restaurant(k, theta, rng):
    """Table sizes of a Chinese restaurant process with k customers.

    Customer ``j + 1`` opens a new table with probability ``theta/(j + theta)``
    and otherwise sits next to a uniformly chosen earlier customer.  The
    result has the Ewens law with ``alpha = 1/theta``.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    theta = _coerce(theta)
    if theta <= 0:
        raise ValueError("theta must be positive")
    sizes = [1]
    table_of = [0]
    for j in range(1, k):
        if rng.bernoulli(theta / (j + theta)):
            table_of.append(len(sizes))
            sizes.append(1)
        else:
            tab = table_of[rng.randrange(j)]
            table_of.append(tab)
            sizes[tab] += 1
    sizes.sort(reverse=True)
    return Partition._trusted(tuple(sizes))


def sample_w(lam, q, rng, *, max_retries=DEFAULT_MAX_RETRIES, return_retries=False):
    """Split ``lam`` into discarded parts and kept parts.

    Each part of size ``m`` is discarded unless all ``m`` of its ``1/q`` coins
    come up heads; the draw is repeated while nothing is discarded.  Returns
    ``(discarded, kept)``, plus the number of rejected rounds when
    ``return_retries`` is set.
    """
    q = _coerce(q)
    if q <= 1:
        raise ValueError("q must exceed 1")
    p = 1 / q
    retries = 0
    groups = [(m, len(list(g))) for m, g in groupby(lam)]
    while True:
        disc, kept = [], []
        if isinstance(p, float):
            # one uniform per part against p^m: same law, far fewer calls
            rnd = rng.random
            for m, c in groups:
                pm = p**m
                n_kept = sum(1 for _ in range(c) if rnd() < pm)
                kept += [m] * n_kept
                disc += [m] * (c - n_kept)
        else:
            for m in lam:
                (kept if rng.all_heads(m, p) else disc).append(m)
        if disc:
            break
        retries += 1
        if retries >= max_retries:
            raise RetryLimitExceeded(f"sample_w: {retries} empty draws for {lam}")
    out = (Partition._trusted(tuple(disc)), Partition._trusted(tuple(kept)))
    return (out, retries) if return_retries else out


def sample_pi_inf_t(r, t, rng, *, max_retries=DEFAULT_MAX_RETRIES, return_retries=False):
    """Rejection sampler for the replacement law on partitions of r.

    Propose by stick-breaking; reject if some part of size ``m`` sees ``m``
    heads in a row from a ``1/t`` coin.
    """
    if r < 1:
        raise ValueError("r must be at least 1")
    t = _coerce(t)
    if t <= 1:
        raise ValueError("t must exceed 1")
    p = 1 / t
    retries = 0
    while True:
        mu = stick_breaking(r, rng)
        if not any(rng.all_heads(m, p) for m in mu):
            break
        retries += 1
        if retries >= max_retries:
            raise RetryLimitExceeded(f"sample_pi_inf_t: {retries} rejections at r={r}")
    return (mu, retries) if return_retries else mu


def sample_multiplicative_rejection(k, eta, rng, *, max_retries=DEFAULT_MAX_RETRIES, return_retries=False):
    """Rejection sampler for the multiplicative law with weights ``eta_1..eta_k``.

    A stick-breaking proposal is accepted part by part with probability
    ``eta_i / c^i`` where ``c = max(1, max_i eta_i^{1/i})``.  Since the part
    sizes sum to k, the constant ``c^k`` cancels and the target is unchanged.
    """
    eta = [None] + [_coerce(e) for e in list(eta)[:k]]
    if len(eta) <= k:
        raise ValueError(f"need {k} weights")
    if any(e <= 0 for e in eta[1:]):
        raise ValueError("weights must be positive")
    if all(e <= 1 for e in eta[1:]):
        accept = eta
    else:
        c = max(1.0, max(float(e) ** (1.0 / i) for i, e in enumerate(eta) if i))
        accept = [None] + [min(1.0, float(e) / c**i) for i, e in enumerate(eta) if i]
    retries = 0
    while True:
        lam = stick_breaking(k, rng)
        if all(rng.bernoulli(accept[m]) for m in lam):
            break
        retries += 1
        if retries >= max_retries:
            raise RetryLimitExceeded(f"multiplicative rejection: {retries} rejections at k={k}")
    return (lam, retries) if return_retries else lam


def aux_step(lam, q, t, rng, *, max_retries=DEFAULT_MAX_RETRIES, return_retries=False):
    """One move of the auxiliary-variables chain.

    Discard parts by :func:`sample_w`, redraw the discarded mass from the
    replacement law, and merge it with the kept parts.
    """
    (disc, kept), r1 = sample_w(lam, q, rng, max_retries=max_retries, return_retries=True)
    mu, r2 = sample_pi_inf_t(sum(disc), t, rng, max_retries=max_retries, return_retries=True)
    nu = multiset_union(kept, mu)
    return (nu, (r1, r2)) if return_retries else nu


def _eta(i, q, t):
    return (t**i - 1) / (q**i - 1)


def _transposition_move(lam, rng):
    """Cycle-type effect of a uniform transposition on a permutation of type lam.

    Returns ``("merge", i, j)`` for parts at positions i < j, or
    ``("split", i, d)`` for part i split into ``(d, lam_i - d)``.
    """
    k = sum(lam)
    x = rng.randrange(k)
    y = rng.randrange(k - 1)
    if y >= x:
        y += 1
    if x > y:
        x, y = y, x
    ends = list(accumulate(lam))
    i = bisect_right(ends, x)
    j = bisect_right(ends, y)
    if i != j:
        return "merge", i, j
    return "split", i, y - x


def _apply_move(lam, move):
    kind, i, j = move
    parts = list(lam)
    if kind == "merge":
        a, b = parts[i], parts[j]
        del parts[j]
        del parts[i]
        parts.append(a + b)
    else:
        a = parts.pop(i)
        parts.extend((j, a - j))
    return Partition.from_parts(parts)


def _move_ratio(lam, move, weight):
    kind, i, j = move
    if kind == "merge":
        a, b = lam[i], lam[j]
        return weight(a + b) / (weight(a) * weight(b))
    a = lam[i]
    return weight(j) * weight(a - j) / weight(a)


def metropolis_step(lam, q, t, rng, *, return_retries=False):
    """Metropolis move for the lifted law on permutations, tracked by cycle type.

    A uniform transposition either merges two cycles or splits one; it is
    accepted with ``min(1, ratio)`` of per-permutation weights
    ``prod_i eta_i^{a_i}`` with ``eta_i = (t^i-1)/(q^i-1)``.
    """
    q, t = _coerce(q), _coerce(t)
    if sum(lam) < 2:
        raise ValueError("k must be at least 2")
    move = _transposition_move(lam, rng)
    ratio = _move_ratio(lam, move, lambda i: _eta(i, q, t))
    if ratio >= 1 or rng.bernoulli(ratio):
        nu, rej = _apply_move(lam, move), 0
    else:
        nu, rej = lam, 1
    return (nu, (rej, 0)) if return_retries else nu


def hanlon_step(lam, alpha, rng, *, return_retries=False):
    """Metropolis move targeting the Ewens law ``alpha^{-l(lam)}/z_lam``.

    Merges (one fewer cycle) are always taken; splits are taken with
    probability ``1/alpha``.  Requires ``alpha >= 1``.
    """
    alpha = _coerce(alpha)
    if alpha < 1:
        raise ValueError("alpha must be at least 1")
    if sum(lam) < 2:
        raise ValueError("r must be at least 2")
    move = _transposition_move(lam, rng)
    if move[0] == "merge" or rng.bernoulli(1 / alpha):
        nu, rej = _apply_move(lam, move), 0
    else:
        nu, rej = lam, 1
    return (nu, (rej, 0)) if return_retries else nu


def _aux(lam, params, rng):
    return aux_step(lam, params["q"], params["t"], rng, return_retries=True)


def _metropolis(lam, params, rng):
    return metropolis_step(lam, params["q"], params["t"], rng, return_retries=True)


def _hanlon(lam, params, rng):
    return hanlon_step(lam, params["alpha"], rng, return_retries=True)


STEPPERS = {"aux": _aux, "metropolis": _metropolis, "hanlon": _hanlon}


@dataclass
class ChainTrace:
    """Visited states of one chain run and per-step rejection counts."""

    start: Partition
    stepper: str
    params: dict
    seed: int
    stream: int
    states: list = field(default_factory=list)
    rejections: list = field(default_factory=list)

    def __len__(self):
        return len(self.states)

    def occupancy(self):
        counts = {}
        for s in self.states:
            counts[s] = counts.get(s, 0) + 1
        return counts

    def to_csv(self, fh=None):
        out = fh if fh is not None else io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["step", "partition"])
        for i, s in enumerate(self.states):
            w.writerow([i, str(s)])
        if fh is None:
            return out.getvalue()

    def to_json(self):
        return json.dumps(
            {
                "start": str(self.start),
                "stepper": self.stepper,
                "params": {k: str(v) for k, v in self.params.items()},
                "seed": self.seed,
                "stream": self.stream,
                "states": [str(s) for s in self.states],
                "rejections": [list(r) for r in self.rejections],
            },
            indent=1,
        )


def run_chain(start, steps, stepper, params, rng):
    """Run ``steps`` moves of the named stepper from ``start``."""
    if stepper not in STEPPERS:
        raise ValueError(f"unknown stepper {stepper!r}; choose from {sorted(STEPPERS)}")
    step = STEPPERS[stepper]
    lam = Partition(start)
    trace = ChainTrace(lam, stepper, dict(params), rng.seed, rng.stream, [lam], [])
    for _ in range(steps):
        lam, rej = step(lam, params, rng)
        trace.states.append(lam)
        trace.rejections.append(rej)
    return trace
