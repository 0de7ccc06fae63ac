"""Named example instances and the seeded random instance generator."""

from __future__ import annotations

import random
from fractions import Fraction

from .valuations import Instance, Rational, as_fraction

DEFAULT_DELTA = Fraction(1, 100)
DEFAULT_EPSILON = Fraction(3, 200)


def example1() -> Instance:
    return Instance.of([10, 9], [8, 5], name="ex1")


def example2(T: int = 10, epsilon: Rational = Fraction(1, 1000)) -> Instance:
    """Buyer 1 values every item at 1; buyer 2 at 1 - epsilon except the last, worth 0."""
    eps = as_fraction(epsilon)
    if T < 2:
        raise ValueError("example 2 needs T >= 2")
    return Instance.of([1] * T, [1 - eps] * (T - 1) + [0], name="ex2")


def example3() -> Instance:
    return Instance.of([1, 1, 1, 0], [1, 1, 1, 0], name="ex3")


def example4(delta: Rational = DEFAULT_DELTA, epsilon: Rational = DEFAULT_EPSILON) -> Instance:
    """Three items; the small parameters are expected to satisfy 2*epsilon = 3*delta."""
    d, e = as_fraction(delta), as_fraction(epsilon)
    return Instance.of([1, 1, 1], [Fraction(2, 3) - d, Fraction(1, 2) + e, 0], name="ex4")


EXAMPLES = {"ex1": example1, "ex2": example2, "ex3": example3, "ex4": example4}


def random_valuation(rng: random.Random, T: int, denominator: int, max_value: int = 1) -> list[Fraction]:
    """``T`` values drawn from {0, 1/D, ..., max_value}, sorted descending."""
    hi = denominator * max_value
    nums = sorted((rng.randint(0, hi) for _ in range(T)), reverse=True)
    return [Fraction(n, denominator) for n in nums]


def random_instance(
    rng: random.Random, max_t: int, min_t: int = 1, denominators: tuple[int, ...] = (1, 2, 4),
    max_value: int = 1,
) -> Instance:
    """Draw T uniformly in [min_t, max_t], a denominator, then both valuations."""
    T = rng.randint(min_t, max_t)
    D = rng.choice(denominators)
    v1 = random_valuation(rng, T, D, max_value)
    v2 = random_valuation(rng, T, D, max_value)
    return Instance.of(v1, v2, name=f"rand-T{T}-D{D}")


def random_corpus(
    count: int, max_t: int, seed: int, min_t: int = 1, denominators: tuple[int, ...] = (1, 2, 4),
    max_value: int = 1,
) -> list[Instance]:
    rng = random.Random(seed)
    out = []
    for n in range(count):
        inst = random_instance(rng, max_t, min_t, denominators, max_value)
        out.append(Instance(inst.v1, inst.v2, name=f"rand{seed}-{n}-T{inst.T}"))
    return out
