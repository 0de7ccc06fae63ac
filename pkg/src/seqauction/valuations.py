"""Buyer valuations, index-shifted increments and their real-line extension.

Every quantity is an exact :class:`fractions.Fraction`. Floats are rejected at
construction time because tie detection between bids must be exact.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Union

from .lattice import Node

Rational = Union[Fraction, int, str]


def as_fraction(value: Rational) -> Fraction:
    """Coerce ``value`` to a Fraction, refusing binary floats."""
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, float):
        raise TypeError(f"float {value!r} is not exact; pass a Fraction, int or 'p/q' string")
    if isinstance(value, (Fraction, int)):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if any(c in text for c in ".eE"):
            raise ValueError(f"{value!r}: decimal notation is not accepted, use 'p/q'")
        return Fraction(text)
    raise TypeError(f"cannot interpret {value!r} as a rational")


class Role(enum.Enum):
    """Which real extension formula applies to a buyer."""

    MONOPSONIST = "monopsonist-side"
    OPPONENT = "opponent-side"


@dataclass(frozen=True)
class Valuation:
    """Incremental values ``v(1..T)`` of one buyer.

    ``increments[k-1]`` holds v(k). The sequence must be nonnegative and weakly
    decreasing (a normalised, concave, nondecreasing total value).
    """

    increments: tuple[Fraction, ...]
    _prefix: tuple[Fraction, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        incs = tuple(as_fraction(v) for v in self.increments)
        if not incs:
            raise ValueError("a valuation needs at least one item (T >= 1)")
        for k, v in enumerate(incs, start=1):
            if v < 0:
                raise ValueError(f"v({k}) = {v} is negative; valuations must be nondecreasing")
        for k in range(1, len(incs)):
            if incs[k] > incs[k - 1]:
                raise ValueError(
                    f"v({k + 1}) = {incs[k]} exceeds v({k}) = {incs[k - 1]}; "
                    "incremental values must be weakly decreasing (concave valuation)"
                )
        prefix = [Fraction(0)]
        for v in incs:
            prefix.append(prefix[-1] + v)
        object.__setattr__(self, "increments", incs)
        object.__setattr__(self, "_prefix", tuple(prefix))

    @classmethod
    def of(cls, values: Iterable[Rational]) -> "Valuation":
        return cls(tuple(values))

    @property
    def T(self) -> int:
        return len(self.increments)

    def __len__(self) -> int:
        return len(self.increments)

    def at(self, k: int) -> Fraction:
        """v(k) for 1 <= k <= T."""
        if not 1 <= k <= self.T:
            raise IndexError(f"incremental index {k} outside 1..{self.T}")
        return self.increments[k - 1]

    def total(self, k: int) -> Fraction:
        """V(k), the value of exactly ``k`` items."""
        if not 0 <= k <= self.T:
            raise IndexError(f"cumulative index {k} outside 0..{self.T}")
        return self._prefix[k]


@dataclass(frozen=True)
class Instance:
    """Two buyers' valuations over the same horizon ``T``."""

    v1: Valuation
    v2: Valuation
    name: str = ""

    def __post_init__(self) -> None:
        if self.v1.T != self.v2.T:
            raise ValueError(f"valuation lengths differ: {self.v1.T} vs {self.v2.T}")

    @classmethod
    def of(cls, v1: Iterable[Rational], v2: Iterable[Rational], name: str = "") -> "Instance":
        return cls(Valuation.of(v1), Valuation.of(v2), name)

    @property
    def T(self) -> int:
        return self.v1.T

    @property
    def root(self) -> Node:
        return Node(0, 0, self.T)

    def valuation(self, i: int) -> Valuation:
        if i == 1:
            return self.v1
        if i == 2:
            return self.v2
        raise ValueError(f"buyer id must be 1 or 2, got {i}")

    def v(self, i: int, k: int, x: Node) -> Fraction:
        """v_i(k|x): buyer i's value for a k-th additional item at node x."""
        return incremental(self.valuation(i), i, k, x)

    def V(self, i: int, k: int, x: Node) -> Fraction:
        """Sum of v_i(1|x) .. v_i(k|x)."""
        val = self.valuation(i)
        xi = x[i - 1]
        if k < 0 or xi + k > val.T:
            raise IndexError(f"cannot take {k} more items for buyer {i} at {tuple(x[:2])}")
        return val.total(xi + k) - val.total(xi)


def incremental(v: Valuation, i: int, k: int, x: Node) -> Fraction:
    """v_i(k|x) = V_i(x_i + k) - V_i(x_i + k - 1)."""
    if k < 1:
        raise IndexError(f"k must be at least 1, got {k}")
    return v.at(x[i - 1] + k)


def cumulative(v: Valuation, k: int) -> Fraction:
    return v.total(k)


def real_incremental(v: Valuation, i: int, role: Role, tau: Rational, x: Node) -> Fraction:
    """Piecewise-constant extension of v_i(.|x) to tau in [0, t].

    The monopsonist side uses v(ceil(tau)) and the opponent side v(floor(tau) + 1).
    Endpoints take the value of the adjacent unit cell: tau = 0 maps to v(1) on the
    monopsonist side and tau = t maps to v(t) on the opponent side.
    """
    tau = as_fraction(tau)
    t = x.t
    if not 0 <= tau <= t:
        raise ValueError(f"tau = {tau} outside [0, {t}]")
    if role is Role.MONOPSONIST:
        k = max(math.ceil(tau), 1)
    else:
        k = min(math.floor(tau) + 1, t)
    return incremental(v, i, k, x)


def real_cumulative(v: Valuation, i: int, role: Role, ell: Rational, x: Node) -> Fraction:
    """Integral of the real extension over [0, ell], summed over unit rectangles.

    Both roles integrate to the same value; they only differ on a null set.
    """
    ell = as_fraction(ell)
    t = x.t
    if not 0 <= ell <= t:
        raise ValueError(f"ell = {ell} outside [0, {t}]")
    whole = math.floor(ell)
    area = sum((incremental(v, i, j, x) for j in range(1, whole + 1)), Fraction(0))
    frac = ell - whole
    if frac:
        area += frac * incremental(v, i, whole + 1, x)
    return area


def real_integral(v: Valuation, i: int, role: Role, lo: Rational, hi: Rational, x: Node) -> Fraction:
    """Integral of the real extension over [lo, hi]."""
    return real_cumulative(v, i, role, hi, x) - real_cumulative(v, i, role, lo, x)
