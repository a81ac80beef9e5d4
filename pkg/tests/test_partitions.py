from math import comb

import pytest
from hypothesis import given, strategies as st

from jackgas.partitions import (
    Partition, box_count, cell_stats, conjugate, enumerate_box, partitions_of, reverse_lex_compare,
)

partitions = st.lists(st.integers(0, 8), max_size=7).map(lambda xs: Partition(sorted(xs, reverse=True)))


def test_conjugate_examples():
    assert conjugate((3, 1)) == Partition((2, 1, 1))
    assert conjugate(()) == Partition(())
    assert conjugate((2, 2)) == Partition((2, 2))


@given(partitions)
def test_conjugation_is_an_involution(lam):
    mu = conjugate(lam)
    assert conjugate(mu) == lam
    assert mu.weight() == lam.weight()
    assert mu.length() == lam.part(1)


def test_cell_stats():
    assert cell_stats((3, 1), 1, 1) == (2, 1, 0, 0)
    assert cell_stats((3, 1), 1, 3) == (0, 0, 2, 0)
    assert cell_stats((1,), 1, 1) == (0, 0, 0, 0)
    with pytest.raises(ValueError):
        cell_stats((3, 1), 2, 2)


def test_enumerate_box_examples():
    assert set(enumerate_box(2, 1)) == {Partition(()), Partition((1,)), Partition((1, 1))}
    assert list(enumerate_box(1, 3)) == [Partition((3,)), Partition((2,)), Partition((1,)), Partition(())]
    assert len(list(enumerate_box(2, 2))) == 6


def test_enumerate_needs_a_bound():
    with pytest.raises(ValueError):
        list(enumerate_box(3))


@given(st.integers(0, 5), st.integers(0, 5))
def test_box_count_and_order(K, R):
    states = list(enumerate_box(K, R))
    assert len(states) == len(set(states)) == comb(K + R, K) == box_count(K, R)
    assert all(reverse_lex_compare(a, b) == 1 for a, b in zip(states, states[1:]))
    assert all(s.length() <= K and s.part(1) <= R for s in states)


def test_max_weight_cut():
    states = list(enumerate_box(3, None, max_weight=4))
    assert len(states) == sum(len(partitions_of(n, 3)) for n in range(5))


def test_reverse_lex():
    assert reverse_lex_compare((2,), (1, 1)) == 1
    assert reverse_lex_compare((3, 1), (3, 1)) == 0
    assert reverse_lex_compare((2, 2), (3,)) == -1
    assert Partition((2, 2)) < Partition((3,))


def test_partition_counts():
    assert [len(partitions_of(n)) for n in range(9)] == [1, 1, 2, 3, 5, 7, 11, 15, 22]


def test_json_round_trip():
    lam = Partition((4, 2, 2, 1))
    assert Partition.from_json(lam.to_json()) == lam
    assert lam.padded(6) == (4, 2, 2, 1, 0, 0)


def test_copy_and_pickle():
    import copy
    import pickle
    lam = Partition((3, 3, 1))
    assert copy.deepcopy(lam) == lam
    assert pickle.loads(pickle.dumps(lam)) == lam
