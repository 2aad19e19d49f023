from collections import Counter

import numpy as np


def empirical(draws, index):
    counts = Counter(draws)
    freq = np.zeros(len(index))
    for lam, c in counts.items():
        freq[index.index(lam)] = c
    return freq / len(draws)


def tv(p, q):
    return 0.5 * float(np.abs(np.asarray(p, float) - np.asarray(q, float)).sum())


def envelope(pi, n):
    """Concentration envelope ``4 max sqrt(pi/N) + 0.003`` for an empirical TV."""
    return 4 * float(np.sqrt(np.asarray(pi, float) / n).max()) + 0.003


def row_vector(M, lam):
    """Dense float row of a transition matrix at ``lam``."""
    out = np.zeros(len(M.index))
    for nu, v in M.row(lam).items():
        out[M.index.index(nu)] = float(v)
    return out
