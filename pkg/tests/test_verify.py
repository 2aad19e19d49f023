from fractions import Fraction as F

import pytest

from macdonald_chain.exact_chain import aux_matrix
from macdonald_chain.verify import (
    check_chain,
    check_constructions,
    check_hanlon,
    check_k2,
    check_spectral,
    corrupt_matrix,
    run_suite,
)


def test_suite_passes():
    results = run_suite(6, [(F(4), F(2)), (F(7, 2), F(9, 4))])
    assert results and all(r.passed for r in results)
    assert {r.check for r in results} >= {"k2-matrix", "detailed-balance", "gram", "hanlon-reversible"}


@pytest.mark.parametrize(
    "check,args",
    [
        (check_k2, (4, 2)),
        (check_chain, (5, 4, 2)),
        (check_constructions, (4, 4, 2)),
        (check_spectral, (4, 4, 2)),
        (check_hanlon, (5, 2)),
    ],
)
def test_corruption_is_detected(check, args):
    results = check(*args, corrupt=corrupt_matrix)
    assert any(not r.passed and F(r.residual) != 0 for r in results)


def test_corrupt_matrix_keeps_row_sum_but_breaks_balance():
    M = corrupt_matrix(aux_matrix(3, 4, 2))
    assert M.row_sums() == [1, 1, 1]
    assert M.rows[0] != aux_matrix(3, 4, 2).rows[0]
