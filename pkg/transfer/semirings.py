"""
Semirings for dynamic programming over transfer matrices.

Counting strands and tracking the largest tube radius are the same
recursion over different semirings.
"""
from __future__ import annotations


class Semiring:
    zero = None
    one = None

    def __add__(self, other):
        raise NotImplementedError

    def __mul__(self, other):
        raise NotImplementedError

    @classmethod
    def sum(cls, xs):
        y = cls.zero
        for x in xs:
            y = y + x
        return y

    @classmethod
    def product(cls, xs):
        y = cls.one
        for x in xs:
            y = y * x
        return y


class Counting(Semiring):
    """(N, +, x)."""

    def __init__(self, value: int):
        self.value = int(value)

    def __add__(self, other):
        return Counting(self.value + other.value)

    def __mul__(self, other):
        return Counting(self.value * other.value)

    def __eq__(self, other):
        return isinstance(other, Counting) and self.value == other.value

    def __hash__(self):
        return hash(self.value)

    def __repr__(self):
        return f"Counting({self.value})"


Counting.zero = Counting(0)
Counting.one = Counting(1)


class MaxTimes(Semiring):
    """([0, inf), max, x): largest product of scales along a path."""

    def __init__(self, value: float):
        self.value = float(value)

    def __add__(self, other):
        return MaxTimes(max(self.value, other.value))

    def __mul__(self, other):
        return MaxTimes(self.value * other.value)

    def __eq__(self, other):
        return isinstance(other, MaxTimes) and self.value == other.value

    def __hash__(self):
        return hash(self.value)

    def __repr__(self):
        return f"MaxTimes({self.value})"


MaxTimes.zero = MaxTimes(0.0)
MaxTimes.one = MaxTimes(1.0)


def step(weights: dict, vector: dict, semiring: type[Semiring]) -> dict:
    """
    One backward step ``out[P] = sum_c weight(c) * vector[c.source]`` where
    ``weights`` maps each target port to ``[(source_port, weight), ...]``.
    """
    return {
        port: semiring.sum(w * vector.get(source, semiring.zero) for source, w in incoming)
        for port, incoming in weights.items()
    }
