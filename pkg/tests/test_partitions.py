from collections import Counter
from fractions import Fraction as F
from itertools import permutations
from math import factorial

import pytest
from hypothesis import given
from hypothesis import strategies as st

from macdonald_chain.partitions import (
    Partition,
    arm_leg,
    dominance_leq,
    enumerate_partitions,
    mn_character,
    multiplicities,
    multiset_difference,
    multiset_union,
    sub_multisets,
    z_classical,
)


def cycle_type(perm):
    seen, parts = set(), []
    for s in range(len(perm)):
        if s not in seen:
            n, x = 0, s
            while x not in seen:
                seen.add(x)
                x = perm[x]
                n += 1
            parts.append(n)
    return tuple(sorted(parts, reverse=True))


partitions = st.integers(1, 14).flatmap(lambda k: st.sampled_from(list(enumerate_partitions(k))))


def test_partition_counts():
    known = {1: 1, 2: 2, 3: 3, 4: 5, 5: 7, 10: 42, 20: 627, 30: 5604}
    for k, p in known.items():
        assert len(enumerate_partitions(k)) == p


def test_reverse_lex_order():
    assert list(enumerate_partitions(4)) == [(4,), (3, 1), (2, 2), (2, 1, 1), (1, 1, 1, 1)]
    idx = enumerate_partitions(12)
    assert all(a > b for a, b in zip(idx, list(idx)[1:]))


def test_parse_and_validation():
    assert Partition.parse("5,3,1,1") == (5, 3, 1, 1)
    assert Partition.parse("10") == (10,)
    for bad in ["3,4", "2,0", "a,b", "-1"]:
        with pytest.raises(ValueError):
            Partition.parse(bad)
    assert Partition.from_parts([1, 3, 2]) == (3, 2, 1)
    assert Partition.parse("") == ()


def test_index_lookup():
    idx = enumerate_partitions(6)
    for i, lam in enumerate(idx):
        assert idx.index(lam) == i
    with pytest.raises((KeyError, ValueError)):
        idx.index((5,))


@pytest.mark.parametrize("k", [3, 4, 5, 6])
def test_z_counts_centralizers(k):
    # k!/z_lam permutations of each cycle type
    counts = Counter(cycle_type(p) for p in permutations(range(k)))
    for lam in enumerate_partitions(k):
        assert counts[lam] * z_classical(lam) == factorial(k)


def test_z_values():
    assert z_classical((1, 1, 1)) == 6
    assert z_classical((2, 1)) == 2
    assert z_classical((3, 3, 1)) == 18


@given(partitions)
def test_sum_of_inverse_z(lam):
    k = sum(lam)
    assert sum(F(1, z_classical(mu)) for mu in enumerate_partitions(k)) == 1


@given(partitions)
def test_conjugate_involution(lam):
    lam = Partition(lam)
    assert lam.conjugate().conjugate() == lam
    assert sum(lam.conjugate()) == sum(lam)


@given(partitions)
def test_dominance_reverses_under_conjugation(lam):
    k = sum(lam)
    for mu in enumerate_partitions(k):
        assert dominance_leq(mu, lam) == dominance_leq(Partition(lam).conjugate(), Partition(mu).conjugate())


@given(partitions)
def test_arm_leg_hook_lengths(lam):
    # hook lengths a + l + 1 multiply to k!/f^lam with f^lam = chi^lam(1^k)
    k = sum(lam)
    prod = 1
    for i, row in enumerate(lam, 1):
        for j in range(1, row + 1):
            box = arm_leg(lam, i, j)
            prod *= box.arm + box.leg + 1
    assert factorial(k) // prod == mn_character(lam, (1,) * k)


@pytest.mark.parametrize("k", [3, 4, 5, 6, 7])
def test_character_orthogonality(k):
    idx = list(enumerate_partitions(k))
    for lam in idx:
        for mu in idx:
            s = sum(F(mn_character(lam, rho) * mn_character(mu, rho), z_classical(rho)) for rho in idx)
            assert s == (1 if lam == mu else 0)


def test_character_values():
    assert mn_character((2, 1), (3,)) == -1
    assert mn_character((2, 1), (2, 1)) == 0
    assert mn_character((3, 2), (1,) * 5) == 5
    assert mn_character((1,) * 4, (2, 1, 1)) == -1


@given(partitions)
def test_sub_multisets(lam):
    subs = sub_multisets(lam)
    a = multiplicities(lam)
    expected = 1
    for c in a.values():
        expected *= c + 1
    assert len(subs) == len({s for s, _ in subs}) == expected
    # binomial weights count labelled subsets of the parts
    assert sum(w for _, w in subs) == 2 ** len(lam)
    for s, _ in subs:
        assert multiset_union(s, multiset_difference(lam, s)) == tuple(lam)
