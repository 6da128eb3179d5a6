import numpy as np
import pytest
from hypothesis import given, strategies as st

from fixedstart.core import (BitString, BudgetExhausted, EvalCounter, counted_eval,
                             distance_to_optimum, hamming, onemax)

bitstrings = st.lists(st.integers(0, 1), min_size=1, max_size=64).map(BitString)


@pytest.mark.parametrize("s, fitness, distance", [("11111", 5, 0), ("00000", 0, 5), ("10110", 3, 2)])
def test_onemax_and_distance(s, fitness, distance):
    x = BitString.from_str(s)
    assert onemax(x) == fitness
    assert distance_to_optimum(x) == distance


def test_bitstring_validation():
    with pytest.raises(ValueError):
        BitString([])
    with pytest.raises(ValueError):
        BitString([0, 2, 1])


def test_bitstring_is_immutable():
    x = BitString.from_str("0101")
    with pytest.raises(ValueError):
        x.bits[0] = 1
    src = np.array([1, 0, 1], dtype=np.uint8)
    y = BitString(src)
    src[0] = 0
    assert str(y) == "101"


def test_flipped_returns_new_string():
    x = BitString.from_str("0000")
    y = x.flipped([0, 3])
    assert str(y) == "1001" and str(x) == "0000"


def test_counter_examples():
    c = EvalCounter()
    counted_eval(BitString.ones(3), c)
    assert c.count == 1
    for _ in range(9):
        counted_eval(BitString.zeros(3), c)
    assert c.count == 10


def test_counter_budget_boundary():
    c = EvalCounter(budget=2)
    counted_eval(BitString.ones(2), c)
    counted_eval(BitString.ones(2), c)
    with pytest.raises(BudgetExhausted):
        counted_eval(BitString.ones(2), c)
    assert c.count == 2


def test_hamming_length_mismatch():
    with pytest.raises(ValueError):
        hamming(BitString.ones(3), BitString.ones(4))


@given(bitstrings)
def test_fitness_plus_distance_is_n(x):
    assert onemax(x) + distance_to_optimum(x) == x.n
    assert distance_to_optimum(x) == hamming(x, BitString.ones(x.n))


@given(bitstrings)
def test_str_roundtrip_and_hash(x):
    y = BitString.from_str(str(x))
    assert y == x and hash(y) == hash(x)


@given(st.integers(1, 20), st.integers(0, 30))
def test_counter_never_exceeds_budget(budget, calls):
    c = EvalCounter(budget)
    for _ in range(calls):
        try:
            counted_eval(BitString.ones(1), c)
        except BudgetExhausted:
            pass
        assert c.count <= budget
    assert c.count == min(budget, calls)
