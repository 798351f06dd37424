"""Exact arithmetic on dyadic rationals of the unit interval.

A point ``p / 2**n`` is stored as an integer numerator and a scale. Every
expansion used here is the terminating one (trailing digits are zero), so
digit extraction and dyadic addition reduce to integer bit operations.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

MAX_SCALE = 40

_STR_RE = re.compile(r"^\s*(\d+)\s*/\s*2\^(\d+)\s*$")


class ScaleError(ValueError):
    """Raised when a scale exceeds the configured maximum."""


def _check_scale(scale: int, max_scale: int | None = None) -> None:
    limit = MAX_SCALE if max_scale is None else max_scale
    if scale < 0:
        raise ValueError(f"scale must be nonnegative, got {scale}")
    if scale > limit:
        raise ScaleError(f"scale {scale} exceeds maximum {limit}")


@dataclass(frozen=True, eq=False)
class DyadicRational:
    """The point ``num / 2**scale`` of ``[0, 1)``.

    Equality and hashing use the canonical form, so ``DyadicRational(2, 2)``
    equals ``DyadicRational(1, 1)``.
    """

    num: int
    scale: int

    def __post_init__(self) -> None:
        _check_scale(self.scale)
        if not 0 <= self.num < (1 << self.scale):
            raise ValueError(f"{self.num}/2^{self.scale} is not in [0, 1)")

    @classmethod
    def zero(cls) -> DyadicRational:
        return cls(0, 0)

    @classmethod
    def from_fraction(cls, value: Fraction | int | str) -> DyadicRational:
        q = Fraction(value)
        den = q.denominator
        if den & (den - 1):
            raise ValueError(f"{q} is not a dyadic rational")
        return cls(q.numerator, den.bit_length() - 1)

    @classmethod
    def parse(cls, text: str) -> DyadicRational:
        """Parse ``"p/2^n"`` or any string :class:`fractions.Fraction` accepts."""
        m = _STR_RE.match(text)
        if m:
            return cls(int(m.group(1)), int(m.group(2)))
        return cls.from_fraction(text)

    @classmethod
    def from_json(cls, obj: dict) -> DyadicRational:
        return cls(int(obj["num"]), int(obj["scale"]))

    def canonical(self) -> tuple[int, int]:
        num, scale = self.num, self.scale
        if num == 0:
            return 0, 0
        while not num & 1:
            num >>= 1
            scale -= 1
        return num, scale

    def at_scale(self, scale: int) -> DyadicRational:
        """Re-express the point at a finer (or equal) scale."""
        num, s = self.canonical()
        if scale < s:
            raise ValueError(f"{self} is not representable at scale {scale}")
        return DyadicRational(num << (scale - s), scale)

    def to_fraction(self) -> Fraction:
        return Fraction(self.num, 1 << self.scale)

    def __float__(self) -> float:
        return self.num / (1 << self.scale)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DyadicRational):
            return NotImplemented
        return self.canonical() == other.canonical()

    def __hash__(self) -> int:
        return hash(self.canonical())

    def __lt__(self, other: DyadicRational) -> bool:
        s = max(self.scale, other.scale)
        return self.num << (s - self.scale) < other.num << (s - other.scale)

    def __le__(self, other: DyadicRational) -> bool:
        return self == other or self < other

    def __str__(self) -> str:
        return f"{self.num}/2^{self.scale}"

    def __repr__(self) -> str:
        return f"DyadicRational({self.num}, {self.scale})"

    def to_json(self) -> dict:
        return {"num": self.num, "scale": self.scale}


@dataclass(frozen=True)
class DyadicInterval:
    """``[index * 2**-level, (index + 1) * 2**-level)``."""

    level: int
    index: int

    def __post_init__(self) -> None:
        _check_scale(self.level)
        if not 0 <= self.index < (1 << self.level):
            raise ValueError(f"index {self.index} out of range at level {self.level}")

    @property
    def left(self) -> DyadicRational:
        return DyadicRational(self.index, self.level)

    @property
    def right(self) -> Fraction:
        # may equal 1, which is not a point of [0, 1)
        return Fraction(self.index + 1, 1 << self.level)

    def __contains__(self, x: DyadicRational) -> bool:
        q = x.to_fraction()
        return self.left.to_fraction() <= q < self.right

    def __str__(self) -> str:
        return f"[{self.left}, {self.right})"


def digits(x: DyadicRational, count: int) -> list[int]:
    """First ``count`` binary digits x_0, x_1, ... of the terminating expansion."""
    if count < 1:
        raise ValueError("count must be positive")
    out = []
    for k in range(count):
        out.append(digit(x, k))
    return out


def digit(x: DyadicRational, k: int) -> int:
    """The digit x_k, i.e. the coefficient of ``2**-(k+1)``."""
    if k >= x.scale:
        return 0
    return (x.num >> (x.scale - 1 - k)) & 1


def dyadic_add(x: DyadicRational, y: DyadicRational) -> DyadicRational:
    """Digitwise XOR of the two expansions, at the larger of the two scales."""
    s = max(x.scale, y.scale)
    return DyadicRational((x.num << (s - x.scale)) ^ (y.num << (s - y.scale)), s)


def interval_of(x: DyadicRational, level: int) -> DyadicInterval:
    """The dyadic interval of length ``2**-level`` containing ``x``."""
    _check_scale(level)
    if level >= x.scale:
        index = x.num << (level - x.scale)
    else:
        index = x.num >> (x.scale - level)
    return DyadicInterval(level, index)


def grid(scale: int) -> list[DyadicRational]:
    """All points ``j / 2**scale`` of [0, 1) in increasing order."""
    _check_scale(scale)
    return [DyadicRational(j, scale) for j in range(1 << scale)]


def common_scale(*points: DyadicRational) -> int:
    return max((p.scale for p in points), default=0)
