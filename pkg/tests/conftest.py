from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import strategies as st

from seqauction import Instance
from seqauction.instances import random_corpus


@st.composite
def valuations(draw, T: int, denominator: int | None = None, max_value: int = 3):
    d = denominator or draw(st.sampled_from([1, 2, 3, 4]))
    nums = draw(st.lists(st.integers(0, d * max_value), min_size=T, max_size=T))
    return [Fraction(n, d) for n in sorted(nums, reverse=True)]


@st.composite
def instances(draw, min_t: int = 1, max_t: int = 5):
    T = draw(st.integers(min_t, max_t))
    d = draw(st.sampled_from([1, 2, 3, 4]))
    return Instance.of(draw(valuations(T, d)), draw(valuations(T, d)), name=f"hyp-T{T}")


@pytest.fixture(scope="session")
def small_corpus() -> list[Instance]:
    return random_corpus(60, 6, seed=2024) + random_corpus(40, 6, seed=99, max_value=5)
