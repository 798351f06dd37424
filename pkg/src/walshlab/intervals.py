"""Interval-system optimization on a line of ``L`` sample points.

An increment matrix ``D`` (``D[a, b] >= 0`` for ``a < b``) scores each interval
between sample points ``a`` and ``b``. A system is a chain
``a_1 < b_1 <= a_2 < b_2 <= ...``; neighbouring intervals may share an
endpoint because the intervals of the variation functionals are open.

Weighted value of a system: sort its increments in decreasing order and pair
them with ``1/lambda_1 >= 1/lambda_2 >= ...`` (rearrangement).

Scores are the correctly rounded exact weighted sums of the float
increments, and dominance compares exact prefix sums. Both depend only on
the increments, never on the order of floating-point additions, so a pruned
system can never round above the system that pruned it.

Why grid endpoints suffice: every represented function is affine (or
constant) between breakpoints, so for fixed other endpoints an increment is
monotone in an endpoint's position within a cell, and the extremes sit at
breakpoints.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

Interval = tuple[int, int]
System = tuple[Interval, ...]


@dataclass(frozen=True)
class IntervalSystem:
    """Nonoverlapping intervals with optional per-interval anchors, in grid coordinates."""

    intervals: tuple[tuple[float, float], ...]
    anchors: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        ivs = tuple(sorted((float(l), float(r)) for l, r in self.intervals))
        for l, r in ivs:
            if not l < r:
                raise ValueError(f"empty interval ({l}, {r})")
        for (_, r0), (l1, _) in zip(ivs, ivs[1:]):
            if l1 < r0:
                raise ValueError("intervals overlap")
        if self.anchors is not None and len(self.anchors) != len(self.intervals):
            raise ValueError("one anchor per interval expected")
        if self.anchors is not None:
            order = sorted(range(len(self.intervals)), key=lambda i: tuple(self.intervals[i]))
            object.__setattr__(self, "anchors", tuple(float(self.anchors[i]) for i in order))
        object.__setattr__(self, "intervals", ivs)

    @classmethod
    def from_indices(cls, system: Iterable[Interval], positions: Sequence[float],
                     anchors: Sequence[int] | None = None, anchor_positions: Sequence[float] | None = None) -> IntervalSystem:
        system = list(system)
        ivs = [(positions[a], positions[b]) for a, b in system]
        anc = None
        if anchors is not None:
            anc = [anchor_positions[k] for k in anchors]
        return cls(tuple(ivs), None if anc is None else tuple(anc))

    def __len__(self) -> int:
        return len(self.intervals)

    def to_json(self) -> list:
        anchors = self.anchors if self.anchors is not None else [None] * len(self.intervals)
        return [[l, r, a] for (l, r), a in zip(self.intervals, anchors)]


def increment_matrix(samples: np.ndarray) -> np.ndarray:
    s = np.asarray(samples, dtype=float)
    return np.triu(np.abs(s[None, :] - s[:, None]), 1)


def sharp_increment_matrix(S: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``D[a, b] = max_y |S[b, y] - S[a, y]|`` and the (first) maximizing anchor."""
    S = np.asarray(S, dtype=float)
    L = S.shape[0]
    D = np.zeros((L, L))
    anchor = np.zeros((L, L), dtype=np.int64)
    for b in range(1, L):
        diff = np.abs(S[b][None, :] - S[:b])
        anchor[:b, b] = np.argmax(diff, axis=1)
        D[:b, b] = diff[np.arange(b), anchor[:b, b]]
    return D, anchor


_SPLIT = 134217729.0  # 2**27 + 1


def _split(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    c = _SPLIT * a
    hi = c - (c - a)
    return hi, a - hi


def exact_dot(a: np.ndarray, b: np.ndarray) -> float:
    """Correctly rounded ``sum a_i b_i`` (Dekker products fed to ``math.fsum``)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    e = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return math.fsum(np.concatenate([p, e]).tolist())


def weighted_value(increments: Sequence[float], recip: np.ndarray) -> float:
    """``sum_i d_(i) / lambda_i`` with increments sorted in decreasing order."""
    d = np.sort(np.asarray(increments, dtype=float))[::-1]
    if d.size > recip.size:
        raise ValueError("not enough weights for the system")
    return exact_dot(d, recip[: d.size])


def system_increments(D: np.ndarray, system: System) -> list[float]:
    return [float(D[a, b]) for a, b in system]


def _dominates(p: tuple, q: tuple) -> bool:
    """Prefix sums of ``p`` dominate those of ``q`` (weak majorization).

    Equivalent to ``sum w_i p_i >= sum w_i q_i`` for every nonincreasing
    ``w >= 0``, and preserved when both profiles gain the same increment.
    """
    diff = Fraction(0)
    for i in range(len(q)):
        if i < len(p):
            diff += Fraction(p[i])
        diff -= Fraction(q[i])
        if diff < 0:
            return False
    return True


def _prune(cands: list[tuple[tuple, System]]) -> list[tuple[tuple, System]]:
    # larger totals first so dominators are usually seen before the dominated
    order = sorted(range(len(cands)), key=lambda i: (-sum(cands[i][0]), i))
    kept: list[tuple[tuple, System]] = []
    for i in order:
        prof = cands[i][0]
        if any(_dominates(k[0], prof) for k in kept):
            continue
        kept = [k for k in kept if not _dominates(prof, k[0])]
        kept.append(cands[i])
    return kept


def pareto_frontier(D: np.ndarray) -> list[tuple[tuple, System]]:
    """All undominated sorted increment profiles, with one witness system each.

    A profile ``p`` dominates ``q`` when each prefix sum of ``p`` is at least
    the matching prefix sum of ``q``. Every weight sequence with nonincreasing reciprocals is
    maximized by some profile on the frontier, so the frontier answers the
    weighted problem exactly for all such sequences at once.
    """
    L = D.shape[0]
    front: list[list[tuple[tuple, System]]] = [[((), ())]]
    for p in range(1, L):
        cands = list(front[p - 1])
        for a in range(p):
            d = float(D[a, p])
            if d <= 0:
                continue
            for prof, sys in front[a]:
                cands.append((tuple(sorted(prof + (d,), reverse=True)), sys + ((a, p),)))
        front.append(_prune(cands))
    return front[L - 1]


def best_on_frontier(frontier: list[tuple[tuple, System]], recip: np.ndarray) -> tuple[float, System]:
    best, best_sys = 0.0, ()
    for prof, sys in frontier:
        val = weighted_value(prof, recip)
        if val > best:
            best, best_sys = val, sys
    return best, best_sys


def max_k_systems(D: np.ndarray, k_max: int) -> tuple[np.ndarray, list[System]]:
    """``v[k]``: largest unweighted sum of at most ``k`` intervals, with witnesses.

    Dynamic programming over (interval count, last endpoint), ``O(k_max L**2)``.
    Ties go to the leftmost endpoint.
    """
    L = D.shape[0]
    k_max = max(0, min(k_max, L - 1))
    best = np.zeros((k_max + 1, L))
    # choice[k, p] = start of the interval ending at p, or -1 if p is unused
    choice = np.full((k_max + 1, L), -1, dtype=np.int64)
    upper = np.triu(np.ones((L, L), dtype=bool), 1)
    for k in range(1, k_max + 1):
        cand = np.where(upper, best[k - 1][:, None] + D, -np.inf)
        start = np.argmax(cand, axis=0)
        ending = cand[start, np.arange(L)]
        ending[0] = 0.0
        row = np.maximum.accumulate(ending)
        taken = np.zeros(L, dtype=bool)
        taken[1:] = ending[1:] > row[:-1]
        choice[k, taken] = start[taken]
        best[k] = row
    values = best[:, L - 1].copy()
    systems: list[System] = []
    for k in range(k_max + 1):
        sys: list[Interval] = []
        kk, p = k, L - 1
        while kk > 0 and p > 0:
            if choice[kk, p] >= 0:
                a = int(choice[kk, p])
                sys.append((a, p))
                kk, p = kk - 1, a
            else:
                p -= 1
        systems.append(tuple(reversed(sys)))
    return values, systems


def upper_from_topk(bounds: np.ndarray, recip: np.ndarray) -> float:
    """Certified bound ``sum_k (w_k - w_{k+1}) B_k`` with ``w_{K+1} = 0``.

    ``bounds[k-1]`` must bound the sum of the ``k`` largest increments of any
    system, for ``k = 1..K``, where ``K`` is the largest possible number of
    intervals with nonzero increment.
    """
    B = np.asarray(bounds, dtype=float)
    w = np.asarray(recip[: B.size], dtype=float)
    diffs = w - np.append(w[1:], 0.0)
    return float(np.dot(diffs, B))


def oscillation_bounds(elementary: np.ndarray, span: float, count: int) -> np.ndarray:
    """``B_k = min(k * span, sum of elementary increments)``.

    ``span`` bounds any single increment; the elementary increments are
    additive upper bounds over adjacent sample pairs.
    """
    total = float(np.sum(elementary))
    return np.minimum(span * np.arange(1, count + 1), total)


def greedy_system(D: np.ndarray) -> System:
    """Largest increments first, skipping intervals that overlap chosen ones."""
    L = D.shape[0]
    a_idx, b_idx = np.triu_indices(L, 1)
    vals = D[a_idx, b_idx]
    # stable sort on -value keeps leftmost endpoints first among ties
    order = np.argsort(-vals, kind="stable")
    chosen: list[Interval] = []
    for i in order:
        if vals[i] <= 0:
            break
        a, b = int(a_idx[i]), int(b_idx[i])
        if all(b <= c or d <= a for c, d in chosen):
            chosen.append((a, b))
    return tuple(sorted(chosen))


def _system_value(D: np.ndarray, system: System, recip: np.ndarray) -> float:
    return weighted_value(system_increments(D, system), recip) if system else 0.0


def local_moves(D: np.ndarray, system: System, recip: np.ndarray, max_rounds: int = 50) -> System:
    """Shift single endpoints by one sample, drop or split intervals while it helps."""
    L = D.shape[0]
    cur = tuple(sorted(system))
    cur_val = _system_value(D, cur, recip)
    for _ in range(max_rounds):
        improved = False
        for i in range(len(cur)):
            a, b = cur[i]
            lo = cur[i - 1][1] if i else 0
            hi = cur[i + 1][0] if i + 1 < len(cur) else L - 1
            moves = [(a + da, b + db) for da in (-1, 0, 1) for db in (-1, 0, 1) if (da, db) != (0, 0)]
            options = [cur[:i] + (m,) + cur[i + 1:] for m in moves if lo <= m[0] < m[1] <= hi]
            options.append(cur[:i] + cur[i + 1:])
            options += [cur[:i] + ((a, c), (c, b)) + cur[i + 1:] for c in range(a + 1, b)]
            for opt in options:
                val = _system_value(D, opt, recip)
                if val > cur_val + 1e-15:
                    cur, cur_val, improved = opt, val, True
                    break
            if improved:
                break
        if not improved:
            break
    return cur


def turning_points(samples: np.ndarray) -> list[int]:
    """Indices where the sample sequence changes monotonicity, plus both ends."""
    s = np.asarray(samples, dtype=float)
    pts = [0]
    direction = 0
    for t in range(1, len(s)):
        step = np.sign(s[t] - s[t - 1])
        if step == 0:
            continue
        if direction and step != direction:
            pts.append(t - 1)
        direction = step
    if len(s) - 1 != pts[-1]:
        pts.append(len(s) - 1)
    return pts


def monotone_piece_system(samples: np.ndarray) -> System:
    """One interval per monotone piece (between consecutive turning points)."""
    pts = turning_points(samples)
    s = np.asarray(samples, dtype=float)
    return tuple((a, b) for a, b in zip(pts, pts[1:]) if s[a] != s[b])
