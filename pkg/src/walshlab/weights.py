"""Weight sequences ``Lambda = {lambda_n}`` for the generalized variations."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

Generator = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class WeightSequence:
    """A nondecreasing sequence with ``lambda_1 >= 1``.

    Raw generator values are regularized at evaluation time: first floored at
    1, then replaced by their running maximum. ``clamped_count`` reports how
    many of the leading values were changed. ``offset`` implements the tail
    sequences ``Lambda_n = {lambda_k}_{k >= n}`` (``offset = n - 1``).

    ``divergent_reciprocals`` is ``True`` for built-in families known to have
    ``sum 1/lambda_n = inf``, ``False`` when known to converge, and ``None``
    for user rules (not machine-checkable).
    """

    generator: Generator = field(repr=False)
    name: str
    divergent_reciprocals: bool | None = None
    offset: int = 0
    params: tuple = ()

    def raw(self, count: int) -> np.ndarray:
        n = np.arange(1, self.offset + count + 1, dtype=float)
        return np.asarray(self.generator(n), dtype=float)

    def _regularized(self, count: int) -> np.ndarray:
        return np.maximum.accumulate(np.maximum(self.raw(count), 1.0))

    def values(self, count: int) -> np.ndarray:
        """``lambda_{offset+1}, ..., lambda_{offset+count}``."""
        if count < 0:
            raise ValueError("count must be nonnegative")
        return self._regularized(count)[self.offset:]

    def reciprocals(self, count: int) -> np.ndarray:
        return 1.0 / self.values(count)

    def __getitem__(self, n: int) -> float:
        """``lambda_n`` of this (possibly shifted) sequence, 1-based."""
        if n < 1:
            raise IndexError("weights are indexed from 1")
        return float(self.values(n)[-1])

    def clamped_count(self, count: int) -> int:
        raw = self.raw(count)
        return int(np.count_nonzero(self._regularized(count) != raw))

    def tail(self, n: int) -> WeightSequence:
        """``Lambda_n``: the sequence starting at ``lambda_n`` (``n = 1`` is the identity)."""
        if n < 1:
            raise ValueError("tail index starts at 1")
        return WeightSequence(self.generator, self.name, self.divergent_reciprocals, self.offset + n - 1, self.params)

    def doubling_ratio(self, n: int) -> float:
        """``lambda_{2n} / lambda_n``."""
        vals = self.values(2 * n)
        return float(vals[2 * n - 1] / vals[n - 1])

    def describe(self) -> dict:
        return {"name": self.name, "params": dict(self.params), "offset": self.offset}


def ones() -> WeightSequence:
    # Hardy case; the usual requirement 1 < lambda_1 is relaxed to lambda_1 = 1 here
    return WeightSequence(lambda n: np.ones_like(n), "ones", True)


def harmonic() -> WeightSequence:
    return WeightSequence(lambda n: n, "harmonic", True)


def n_over_log() -> WeightSequence:
    """``n / log(n + 1)``."""
    return WeightSequence(lambda n: n / np.log(n + 1), "nlog", True)


def power(gamma: float) -> WeightSequence:
    """``n**gamma``; reciprocals diverge iff ``gamma <= 1``."""
    return WeightSequence(lambda n: n**gamma, "power", gamma <= 1, params=(("gamma", gamma),))


def sqrt_log(n: np.ndarray) -> np.ndarray:
    return np.sqrt(np.log(n + 1))


def divergence_class(alpha_seq: Generator = sqrt_log) -> WeightSequence:
    """``n * alpha_n / log(n + 1)``; default ``alpha_n = sqrt(log(n + 1))``.

    Reciprocals diverge for the default (``sum sqrt(log n) / n``); user
    choices of ``alpha_n`` are left unverified.
    """
    divergent = True if alpha_seq is sqrt_log else None
    return WeightSequence(lambda n: n * alpha_seq(n) / np.log(n + 1), "sqrtlog", divergent)


def cesaro_class(alpha: float, beta: float, xi: Generator = sqrt_log) -> WeightSequence:
    """``n**(1 - (alpha + beta)) * xi_n``; default ``xi_n = sqrt(log(n + 1))``."""
    gamma = 1.0 - (alpha + beta)
    divergent = True if xi is sqrt_log and gamma < 1 else None
    return WeightSequence(
        lambda n: n**gamma * xi(n), "cesaro", divergent, params=(("alpha", alpha), ("beta", beta))
    )


FAMILIES = ("ones", "harmonic", "nlog", "power", "sqrtlog", "cesaro")


def by_name(name: str, gamma: float = 0.5, alpha: float = 0.3, beta: float = 0.3) -> WeightSequence:
    if name == "ones":
        return ones()
    if name == "harmonic":
        return harmonic()
    if name == "nlog":
        return n_over_log()
    if name == "power":
        return power(gamma)
    if name == "sqrtlog":
        return divergence_class()
    if name == "cesaro":
        return cesaro_class(alpha, beta)
    raise ValueError(f"unknown weight family {name!r}; expected one of {', '.join(FAMILIES)}")


def harmonic_number(n: int) -> float:
    return math.fsum(1.0 / k for k in range(1, n + 1))
