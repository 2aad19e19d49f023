"""Machine checks of the exact identities, reported as pass/fail records.

Each check returns a list of :class:`CheckResult`.  ``corrupt`` hooks let the
negative-control tests inject a damaged matrix and confirm the check fails.
"""

from dataclasses import asdict, dataclass
from fractions import Fraction

from .exact_chain import (
    TransitionMatrix,
    aux_matrix,
    aux_matrix_via_operator,
    check_reversibility,
    hanlon_ell_matrix,
    hanlon_matrix,
    stationarity_residual,
)
from .measures import as_exact, pi_ewens, pi_qt_table
from .spectral import beta, eigen_table, gram_check, x_special

__all__ = [
    "CheckResult",
    "k2_matrix",
    "check_k2",
    "check_chain",
    "check_constructions",
    "check_spectral",
    "check_hanlon",
    "run_suite",
    "corrupt_matrix",
]


@dataclass
class CheckResult:
    check: str
    k: int
    params: str
    residual: str
    passed: bool

    def to_dict(self):
        return asdict(self)


def _result(check, k, params, residual):
    return CheckResult(check, k, params, str(residual), residual == 0)


def corrupt_matrix(M, eps=Fraction(1, 1000)):
    """Copy of ``M`` with ``eps`` moved between the first two entries of row 0."""
    rows = [dict(r) for r in M.rows]
    cols = sorted(rows[0])
    if len(cols) >= 2:
        rows[0][cols[0]] += eps
        rows[0][cols[1]] -= eps
    else:
        rows[0][cols[0]] += eps
    return TransitionMatrix(M.index, rows, M.backend, M.name + "-corrupt")


def k2_matrix(q, t):
    """Closed-form auxiliary kernel on partitions of 2, rows ``(2)`` then ``(1,1)``."""
    q, t = as_exact(q), as_exact(t)
    u = 1 / t
    return [
        [(1 + u) / 2, (1 - u) / 2],
        [(1 + u) * (q - 1) / (2 * (q + 1)), (3 + q + u - u * q) / (2 * (q + 1))],
    ]


def check_k2(q, t, corrupt=None):
    q, t = as_exact(q), as_exact(t)
    tag = f"q={q},t={t}"
    M = aux_matrix(2, q, t)
    if corrupt:
        M = corrupt(M)
    dense = M.to_dense()
    want = k2_matrix(q, t)
    out = [_result("k2-matrix", 2, tag, max(abs(dense[i][j] - want[i][j]) for i in range(2) for j in range(2)))]
    T = eigen_table(2, q, t, M=aux_matrix(2, q, t))
    f_want = [
        [(1 - q) ** 2 * (1 + q), (1 - q) ** 2 * (1 + q)],
        [(t - 1) * (1 - q**2), (t + 1) * (1 - q) ** 2],
    ]
    out.append(_result("k2-eigenvectors", 2, tag, max(abs(T.f[i][j] - f_want[i][j]) for i in range(2) for j in range(2))))
    b_want = [Fraction(1), (1 + 1 / t) / (1 + q)]
    out.append(_result("k2-eigenvalues", 2, tag, max(abs(x - y) for x, y in zip(T.beta, b_want))))
    return out


def check_chain(k, q, t, corrupt=None):
    q, t = as_exact(q), as_exact(t)
    tag = f"q={q},t={t}"
    M = aux_matrix(k, q, t)
    if corrupt:
        M = corrupt(M)
    pi = pi_qt_table(k, q, t)
    return [
        _result("pi-total", k, tag, abs(pi.total() - 1)),
        _result("row-sums", k, tag, max(abs(s - 1) for s in M.row_sums())),
        _result("stationarity", k, tag, stationarity_residual(M, pi)),
        _result("detailed-balance", k, tag, check_reversibility(M, pi)),
    ]


def check_constructions(k, q, t, corrupt=None):
    q, t = as_exact(q), as_exact(t)
    tag = f"q={q},t={t}"
    A = aux_matrix(k, q, t)
    if corrupt:
        A = corrupt(A)
    out = []
    for n in (k, k + 3):
        B = aux_matrix_via_operator(k, q, t, n)
        res = max(abs(A.rows[i].get(j, 0) - B.rows[i].get(j, 0)) for i in range(len(A)) for j in range(len(A)))
        out.append(_result(f"operator-agreement(n={n})", k, tag, res))
    return out


def check_spectral(k, q, t, corrupt=None):
    q, t = as_exact(q), as_exact(t)
    tag = f"q={q},t={t}"
    M = aux_matrix(k, q, t)
    T = eigen_table(k, q, t, M=M)
    if corrupt:
        M = corrupt(M)
    eig = Fraction(0)
    for b, f in zip(T.beta, T.f):
        eig = max(eig, max(abs(x - b * y) for x, y in zip(M.apply(f), f)))
    row_k = max(abs(T.X[0][j] - x_special("row_k", rho, q, t)) for j, rho in enumerate(T.index))
    row_1k = max(abs(T.X[-1][j] - x_special("row_1k", rho, q, t)) for j, rho in enumerate(T.index))
    closed = max(abs(b - beta(lam, q, t)) for b, lam in zip(T.beta, T.index))
    return [
        _result("eigen-equation", k, tag, eig),
        _result("gram", k, tag, gram_check(T)),
        _result("X-row-k", k, tag, row_k),
        _result("X-row-1k", k, tag, row_1k),
        _result("eigenvalue-closed-form", k, tag, closed),
    ]


def check_hanlon(r, alpha, corrupt=None):
    alpha = as_exact(alpha)
    tag = f"alpha={alpha}"
    H = hanlon_matrix(r, alpha)
    if corrupt:
        H = corrupt(H)
    out = [_result("hanlon-reversible", r, tag, check_reversibility(H, pi_ewens(r, alpha)))]
    for n in (r, r + 5):
        L = hanlon_ell_matrix(r, alpha, n)
        res = max(abs(H.rows[i].get(j, 0) - L.rows[i].get(j, 0)) for i in range(len(H)) for j in range(len(H)))
        out.append(_result(f"hanlon-operator(n={n})", r, tag, res))
    return out


def run_suite(k_max, params, alphas=(1, 2, Fraction(7, 2)), corrupt=None, k_min=2):
    """All checks for ``k_min <= k <= k_max`` at each ``(q, t)`` in ``params``.

    Size caps: operator agreement up to k=6, spectral checks up to k=8,
    Hanlon checks up to r=8.
    """
    results = []
    for q, t in params:
        if k_min <= 2:
            results += check_k2(q, t, corrupt)
        for k in range(max(k_min, 1), k_max + 1):
            results += check_chain(k, q, t, corrupt)
            if k <= 6:
                results += check_constructions(k, q, t, corrupt)
            if 2 <= k <= 8:
                results += check_spectral(k, q, t, corrupt)
    for alpha in alphas:
        for r in range(max(k_min, 2), min(k_max, 8) + 1):
            results += check_hanlon(r, alpha, corrupt)
    return results
