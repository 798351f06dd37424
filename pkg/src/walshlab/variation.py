"""Generalized variations of two-variable grid and separable functions.

Every functional reduces to sample matrices: breakpoint values (including
the closure at ``x = 1``) for separable piecewise-linear inputs, and cell
values for grid step functions. Only endpoints and anchors at sample
positions are searched.

Lemma (endpoint restriction). Between neighbouring breakpoints a
represented function is affine (separable case) or constant (grid case) in
each variable. Hence an increment, or a mixed difference, is monotone in any
single endpoint while it moves inside one cell. The supremum over that
endpoint is attained or approached at a cell end, i.e. at a sample.

Two modes are offered. ``exact`` solves the finite problem completely and
has size caps (see :class:`ExactCaps`). ``heuristic`` returns a lower value
achieved by an explicit witness and a certified upper bound.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .funcrep import GridFunction2D, SeparableFunction2D
from .intervals import (
    IntervalSystem,
    System,
    best_on_frontier,
    greedy_system,
    increment_matrix,
    local_moves,
    max_k_systems,
    oscillation_bounds,
    pareto_frontier,
    sharp_increment_matrix,
    upper_from_topk,
    weighted_value,
)
from .weights import WeightSequence

MODES = ("exact", "heuristic")


class CapExceededError(ValueError):
    """Input too large for the requested mode."""


@dataclass(frozen=True)
class ExactCaps:
    """Size limits, counted in samples along an axis.

    ``line``: one-axis functionals in exact mode (Pareto frontier DP).
    ``mixed``: the mixed functional, which enumerates ordered row systems.
    ``star``: rectangle packings.
    ``v_sharp``: the ``v#`` dynamic program (grid resolution 10).
    ``topk_dp``: largest axis for which heuristic upper bounds use the
    exact top-k sums instead of the oscillation budget.
    ``heuristic`` and ``heuristic_2d``: memory limits of the heuristic mode
    (dense ``L x L`` increment tables, ``L**4`` mixed-difference tables).
    """

    line: int = 17
    mixed: int = 5
    star: int = 4
    v_sharp: int = 1025
    topk_dp: int = 129
    heuristic: int = 2049
    heuristic_2d: int = 33


CAPS = ExactCaps()


@dataclass(frozen=True)
class RectangleSystem:
    """Nonoverlapping rectangles ``[x0, x1] x [y0, y1]``."""

    rectangles: tuple[tuple[float, float, float, float], ...]

    def __len__(self) -> int:
        return len(self.rectangles)

    def to_json(self) -> list:
        return [list(r) for r in self.rectangles]


@dataclass(frozen=True)
class VariationResult:
    lower: float
    upper: float
    exact: bool
    witness: IntervalSystem | RectangleSystem | None = None
    cross_witness: IntervalSystem | None = None
    parts: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "lower", float(self.lower))
        object.__setattr__(self, "upper", float(self.upper))
        # rounding in the two evaluation orders may differ in the last ulp
        if self.lower > self.upper * (1 + 1e-12) + 1e-300:
            raise ValueError(f"lower {self.lower} exceeds upper {self.upper}")
        if self.exact and self.lower != self.upper:
            raise ValueError("exact result must have lower == upper")

    @property
    def value(self) -> float:
        return self.lower

    def to_json(self) -> dict:
        out = {"lower": self.lower, "upper": self.upper, "exact": self.exact,
               "witness": self.witness.to_json() if self.witness is not None else []}
        if self.cross_witness is not None:
            out["cross_witness"] = self.cross_witness.to_json()
        if self.parts:
            out["parts"] = self.parts
        return out


# ---------------------------------------------------------------- samples


def sample_matrix(f) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Samples ``S[i, j]`` with their x and y positions."""
    if isinstance(f, SeparableFunction2D):
        S = f.samples()
        rx, ry = f.resolutions
        return S, np.arange(S.shape[0]) / (1 << rx), np.arange(S.shape[1]) / (1 << ry)
    if isinstance(f, GridFunction2D):
        n = 1 << f.resolution
        pos = np.arange(n) / n
        return np.asarray(f.cell_values, dtype=float), pos, pos
    raise TypeError(f"unsupported function type {type(f).__name__}")


def _oriented(f, axis: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Samples with the varied axis first."""
    if axis not in (1, 2):
        raise ValueError("axis must be 1 or 2")
    S, px, py = sample_matrix(f)
    return (S, px, py) if axis == 1 else (S.T, py, px)


def _rank_one(f, axis: int) -> tuple[np.ndarray, float] | None:
    """``(samples of the varied factor, max |other factor|)`` for one-term separable input."""
    if not isinstance(f, SeparableFunction2D) or len(f.terms) != 1:
        return None
    g = f.refined()
    u, v = g.terms[0]
    if axis == 2:
        u, v = v, u
    return np.asarray(u.values, dtype=float), float(np.max(np.abs(v.values)))


def _check_mode(mode: str) -> None:
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; expected exact or heuristic")


def _cap(size: int, cap: int, what: str) -> None:
    if size > cap:
        raise CapExceededError(f"{what}: {size} samples exceed the cap {cap} (see ExactCaps)")


# ---------------------------------------------------------- one-axis core


@dataclass(frozen=True)
class _LineSolution:
    lower: float
    upper: float
    system: System


def _solve_line(D: np.ndarray, recip_of, mode: str, elementary: np.ndarray | None = None) -> _LineSolution:
    """Weighted interval problem for one increment matrix."""
    L = D.shape[0]
    if L < 2:
        return _LineSolution(0.0, 0.0, ())
    recip = recip_of(L - 1)
    if mode == "exact":
        val, sys = best_on_frontier(pareto_frontier(D), recip)
        return _LineSolution(val, val, sys)
    cands = [local_moves(D, greedy_system(D), recip)]
    if L <= CAPS.topk_dp:
        v, systems = max_k_systems(D, L - 1)
        cands += systems[1:]
        upper = upper_from_topk(v[1:], recip)
    else:
        if elementary is None:
            elementary = np.diagonal(D, 1)
        count = max(1, int(np.count_nonzero(elementary)))
        upper = upper_from_topk(oscillation_bounds(elementary, float(D.max()), count), recip)
    best_sys, best = (), 0.0
    for sys in cands:
        val = weighted_value([D[a, b] for a, b in sys], recip) if sys else 0.0
        if val > best:
            best, best_sys = val, sys
    return _LineSolution(best, max(upper, best), best_sys)


def _finish(sol: _LineSolution, mode: str, pos: np.ndarray, anchors=None, anchor_pos=None) -> VariationResult:
    witness = IntervalSystem.from_indices(sol.system, pos, anchors, anchor_pos)
    exact = mode == "exact"
    upper = sol.lower if exact else sol.upper
    return VariationResult(sol.lower, upper, exact, witness)


def _line_variation(f, axis: int, lam: WeightSequence, mode: str) -> VariationResult:
    _check_mode(mode)
    S, pos, other = _oriented(f, axis)
    _cap(S.shape[0], CAPS.line if mode == "exact" else CAPS.heuristic, "lambda variation")
    r1 = _rank_one(f, axis)
    if r1 is not None:
        u, scale = r1
        sol = _solve_line(increment_matrix(u) * scale, lam.reciprocals, mode)
        col = int(np.argmax(np.abs(f.refined().terms[0][1 if axis == 1 else 0].values)))
        return _finish(sol, mode, pos, [col] * len(sol.system), other)
    best: tuple[_LineSolution, int] | None = None
    upper = 0.0
    for j in range(S.shape[1]):
        sol = _solve_line(increment_matrix(S[:, j]), lam.reciprocals, mode)
        upper = max(upper, sol.upper)
        if best is None or sol.lower > best[0].lower:
            best = (sol, j)
    sol, j = best
    return _finish(_LineSolution(sol.lower, upper, sol.system), mode, pos, [j] * len(sol.system), other)


def lambda_var_1(f, lam: WeightSequence, mode: str = "exact") -> VariationResult:
    """``Lambda V_1``: weighted increments in x along one horizontal line."""
    return _line_variation(f, 1, lam, mode)


def lambda_var_2(f, lam: WeightSequence, mode: str = "exact") -> VariationResult:
    return _line_variation(f, 2, lam, mode)


def _sharp_matrix(f, axis: int) -> tuple[np.ndarray, np.ndarray | None, np.ndarray, np.ndarray, np.ndarray]:
    """Anchored increment matrix, anchors, positions, elementary bounds."""
    r1 = _rank_one(f, axis)
    S, pos, other = _oriented(f, axis)
    if r1 is not None:
        u, scale = r1
        D = increment_matrix(u) * scale
        v = f.refined().terms[0][1 if axis == 1 else 0].values
        anchor = np.full(D.shape, int(np.argmax(np.abs(v))), dtype=np.int64)
        return D, anchor, pos, other, np.abs(np.diff(u)) * scale
    D, anchor = sharp_increment_matrix(S)
    return D, anchor, pos, other, np.max(np.abs(np.diff(S, axis=0)), axis=1)


def sharp_var(f, axis: int, lam: WeightSequence, mode: str = "exact") -> VariationResult:
    """``Lambda# V_s``: every interval picks its own anchor in the other variable."""
    _check_mode(mode)
    _cap(_oriented(f, axis)[0].shape[0], CAPS.line if mode == "exact" else CAPS.heuristic, "sharp variation")
    D, anchor, pos, other, elem = _sharp_matrix(f, axis)
    sol = _solve_line(D, lam.reciprocals, mode, elem)
    anchors = [int(anchor[a, b]) for a, b in sol.system]
    return _finish(sol, mode, pos, anchors, other)


def tail_sharp_var(f, axis: int, lam: WeightSequence, n: int, mode: str = "exact") -> VariationResult:
    """``Lambda_n# V_s`` with the shifted weights ``lambda_n, lambda_{n+1}, ...``."""
    return sharp_var(f, axis, lam.tail(max(1, n)), mode)


def v_sharp(f, axis: int, n: int) -> float:
    """``v_s#(n, f)``: largest unweighted sum of ``n`` anchored increments."""
    return float(v_sharp_profile(f, axis, n)[n])


def v_sharp_profile(f, axis: int, n_max: int) -> np.ndarray:
    """``[v#(0), v#(1), ..., v#(n_max)]``; constant once ``n`` exceeds the sample count."""
    if n_max < 1:
        raise ValueError("n must be positive")
    S, _, _ = _oriented(f, axis)
    _cap(S.shape[0], CAPS.v_sharp, "v_sharp")
    D = _sharp_matrix(f, axis)[0]
    v, _ = max_k_systems(D, n_max)
    if v.size < n_max + 1:
        v = np.concatenate([v, np.full(n_max + 1 - v.size, v[-1])])
    return v


# ------------------------------------------------------------ mixed (1,2)


def mixed_differences(S: np.ndarray) -> np.ndarray:
    """``M[a, b, c, d] = S[a,c] - S[a,d] - S[b,c] + S[b,d]``."""
    S = np.asarray(S, dtype=float)
    return (S[:, None, :, None] - S[:, None, None, :] - S[None, :, :, None] + S[None, :, None, :])


def all_systems(L: int) -> list[System]:
    """Every chain ``a1 < b1 <= a2 < b2 ...`` on ``L`` points, the empty one first."""
    out: list[System] = []

    def extend(start: int, acc: tuple) -> None:
        out.append(acc)
        for a in range(start, L - 1):
            for b in range(a + 1, L):
                extend(b, acc + ((a, b),))

    extend(0, ())
    return out


def _ordered_value(W: np.ndarray, rows: System, recip_r: np.ndarray, cols: System, recip_c: np.ndarray) -> float:
    total = 0.0
    for i, (a, b) in enumerate(rows):
        for j, (c, d) in enumerate(cols):
            total += W[a, b, c, d] * recip_r[i] * recip_c[j]
    return total


def _best_order(D: np.ndarray, system: System) -> System:
    """Order intervals by decreasing increment (rearrangement)."""
    return tuple(sorted(system, key=lambda ab: -D[ab]))


def lambda_var_12(f, lam1: WeightSequence, lam2: WeightSequence, mode: str = "exact") -> VariationResult:
    """``(Lambda1 Lambda2) V_{1,2}``: doubly weighted mixed differences over ``E x F``.

    The index ``i`` of an interval in ``E`` selects ``lambda1_i``; for a
    fixed ordered ``E`` the inner problem over ``F`` is a one-axis weighted
    problem with increments ``sum_i |f(Delta_i, J)| / lambda1_i``.
    """
    _check_mode(mode)
    S, px, py = sample_matrix(f)
    Lx, Ly = S.shape
    _cap(max(Lx, Ly), CAPS.mixed if mode == "exact" else CAPS.heuristic_2d, "mixed variation")
    W = np.abs(mixed_differences(S))
    rx = lam1.reciprocals(max(1, Lx - 1))
    ry = lam2.reciprocals(max(1, Ly - 1))
    if Lx < 2 or Ly < 2:
        return VariationResult(0.0, 0.0, mode == "exact", IntervalSystem(()), IntervalSystem(()))

    def best_cols(rows: System, exact: bool) -> tuple[float, System]:
        DF = np.einsum("kcd,k->cd", np.array([W[a, b] for a, b in rows]), rx[: len(rows)]) if rows else np.zeros((Ly, Ly))
        DF = np.triu(DF, 1)
        if exact:
            return best_on_frontier(pareto_frontier(DF), ry)
        sol = _solve_line(DF, lambda n: ry[:n], "heuristic")
        return sol.lower, _best_order(DF, sol.system)

    if mode == "exact":
        best, best_rows, best_cols_sys = 0.0, (), ()
        for sys in all_systems(Lx):
            if not sys:
                continue
            for rows in itertools.permutations(sys):
                val, cols = best_cols(rows, True)
                if val > best:
                    best, best_rows, best_cols_sys = val, rows, cols
        cols = _order_cols(W, best_rows, rx, best_cols_sys, ry)
        return VariationResult(best, best, True, IntervalSystem.from_indices(best_rows, px),
                               IntervalSystem.from_indices(cols, py))

    # coordinate ascent from the best single rectangle
    flat = int(np.argmax(W))
    a, b, c, d = np.unravel_index(flat, W.shape)
    rows: System = ((int(min(a, b)), int(max(a, b))),)
    cols: System = ((int(min(c, d)), int(max(c, d))),)
    best = _ordered_value(W, rows, rx, cols, ry)
    for _ in range(8):
        _, new_cols = best_cols(rows, False)
        new_cols = new_cols or cols
        WT = W.transpose(2, 3, 0, 1)
        DE = np.triu(np.einsum("kab,k->ab", np.array([WT[c0, d0] for c0, d0 in new_cols]), ry[: len(new_cols)]), 1)
        sol = _solve_line(DE, lambda n: rx[:n], "heuristic")
        new_rows = _best_order(DE, sol.system) or rows
        val = _ordered_value(W, new_rows, rx, new_cols, ry)
        if val <= best:
            break
        best, rows, cols = val, new_rows, new_cols
    upper = vitali_variation(S) * rx[0] * ry[0]
    return VariationResult(best, max(upper, best), False, IntervalSystem.from_indices(rows, px),
                           IntervalSystem.from_indices(cols, py))


def _order_cols(W, rows: System, rx, cols: System, ry) -> System:
    """Column order used by an optimal value for ``rows`` (rearrangement)."""
    if not rows or not cols:
        return cols
    DF = sum(W[a, b] * rx[i] for i, (a, b) in enumerate(rows))
    return _best_order(DF, cols)


def vitali_variation(S: np.ndarray) -> float:
    """Sum of absolute mixed differences over elementary sample rectangles."""
    S = np.asarray(S, dtype=float)
    return float(np.abs(np.diff(np.diff(S, axis=0), axis=1)).sum())


# ------------------------------------------------------------------ star


def _rectangles(Lx: int, Ly: int) -> list[tuple[int, int, int, int]]:
    return [(a, b, c, d) for a in range(Lx) for b in range(a + 1, Lx)
            for c in range(Ly) for d in range(c + 1, Ly)]


def _rect_mask(r: tuple[int, int, int, int], Ly: int) -> int:
    a, b, c, d = r
    mask = 0
    for i in range(a, b):
        for j in range(c, d):
            mask |= 1 << (i * (Ly - 1) + j)
    return mask


def star_var(f, lam: WeightSequence, mode: str = "exact") -> VariationResult:
    """``Lambda* V``: weighted mixed differences over nonoverlapping rectangles."""
    _check_mode(mode)
    S, px, py = sample_matrix(f)
    Lx, Ly = S.shape
    _cap(max(Lx, Ly), CAPS.star if mode == "exact" else CAPS.heuristic_2d, "star variation")
    if Lx < 2 or Ly < 2:
        return VariationResult(0.0, 0.0, mode == "exact", RectangleSystem(()))
    W = np.abs(mixed_differences(S))
    cells = (Lx - 1) * (Ly - 1)
    recip = lam.reciprocals(cells)
    rects = [r for r in _rectangles(Lx, Ly) if W[r[0], r[1], r[2], r[3]] > 0]
    vals = [float(W[r[0], r[1], r[2], r[3]]) for r in rects]

    def witness(chosen) -> RectangleSystem:
        return RectangleSystem(tuple((float(px[a]), float(px[b]), float(py[c]), float(py[d])) for a, b, c, d in chosen))

    if mode == "exact":
        masks = [_rect_mask(r, Ly) for r in rects]
        best = [0.0, ()]

        def dfs(start: int, used: int, chosen: tuple, incs: tuple) -> None:
            if incs:
                v = weighted_value(incs, recip)
                if v > best[0]:
                    best[0], best[1] = v, chosen
            for k in range(start, len(rects)):
                if not masks[k] & used:
                    dfs(k + 1, used | masks[k], chosen + (rects[k],), incs + (vals[k],))

        dfs(0, 0, (), ())
        return VariationResult(best[0], best[0], True, witness(best[1]))

    order = sorted(range(len(rects)), key=lambda k: -vals[k])
    used, chosen, incs = 0, [], []
    for k in order:
        m = _rect_mask(rects[k], Ly)
        if not m & used:
            used |= m
            chosen.append(rects[k])
            incs.append(vals[k])
    lower = weighted_value(incs, recip) if incs else 0.0
    elementary = np.abs(np.diff(np.diff(S, axis=0), axis=1)).ravel()
    count = max(1, int(np.count_nonzero(elementary)))
    span = max(vals) if vals else 0.0
    upper = upper_from_topk(oscillation_bounds(elementary, span, count), recip)
    return VariationResult(lower, max(upper, lower), False, witness(chosen))


# ------------------------------------------------------------- composites


def _sum_results(parts: dict[str, VariationResult]) -> VariationResult:
    lower = float(sum(p.lower for p in parts.values()))
    upper = float(sum(p.upper for p in parts.values()))
    exact = all(p.exact for p in parts.values())
    return VariationResult(lower, lower if exact else upper, exact, None, None,
                           {k: v.to_json() for k, v in parts.items()})


def partial_lambda_var(f, lam: WeightSequence, mode: str = "exact") -> VariationResult:
    """``P Lambda BV(f) = Lambda V_1 + Lambda V_2``."""
    return _sum_results({"V1": lambda_var_1(f, lam, mode), "V2": lambda_var_2(f, lam, mode)})


def lambda_bv(f, lam1: WeightSequence, lam2: WeightSequence | None = None, mode: str = "exact") -> VariationResult:
    """``(Lambda1, Lambda2) V = Lambda1 V_1 + Lambda2 V_2 + (Lambda1 Lambda2) V_{1,2}``."""
    lam2 = lam1 if lam2 is None else lam2
    return _sum_results({
        "V1": lambda_var_1(f, lam1, mode),
        "V2": lambda_var_2(f, lam2, mode),
        "V12": lambda_var_12(f, lam1, lam2, mode),
    })


def sharp_bv(f, lam: WeightSequence, mode: str = "exact") -> VariationResult:
    """``Lambda# V_1 + Lambda# V_2``."""
    return _sum_results({"V1#": sharp_var(f, 1, lam, mode), "V2#": sharp_var(f, 2, lam, mode)})


# ------------------------------------------------------- budgets, series


def tent_train_budget(pieces: int, amplitude: float, lam: WeightSequence) -> float:
    """Certified bound ``sum_{i <= P} 2A / lambda_i`` for ``P`` monotone pieces of oscillation ``<= A``.

    Disjoint intervals inside one piece have increments summing to at most
    its oscillation, so the ``k`` largest increments of any system sum to at
    most ``min(2Ak, PA)``; pairing with the top-k bound gives the estimate.
    """
    if pieces < 0 or amplitude < 0:
        raise ValueError("pieces and amplitude must be nonnegative")
    if pieces == 0:
        return 0.0
    return float(2.0 * amplitude * np.sum(lam.reciprocals(pieces)))


def embedding_diagnostic(f, kind: str, alpha: float = 0.3, beta: float = 0.3, J: int = 10) -> dict[str, np.ndarray]:
    """Partial sums of the series in the embedding conditions, for both axes.

    ``thm2``: ``sum_{n <= N} v#(n) log(n+1) / n**2`` for ``N = 1..2**J``.
    ``thm4``: ``sum_{j <= t} v#(2**j) / 2**(j (1 - (alpha + beta)))`` for ``t = 0..J``.
    """
    if J < 0:
        raise ValueError("J must be nonnegative")
    if kind == "thm2":
        n = np.arange(1, (1 << J) + 1)
        out = {}
        for axis in (1, 2):
            v = v_sharp_profile(f, axis, int(n[-1]))[1:]
            out[f"axis{axis}"] = np.cumsum(v * np.log(n + 1) / n.astype(float) ** 2)
        return out
    if kind == "thm4":
        if not (0 < alpha < 1 and 0 < beta < 1 and alpha + beta < 1):
            raise ValueError("thm4 needs alpha, beta in (0, 1) with alpha + beta < 1")
        j = np.arange(J + 1)
        out = {}
        for axis in (1, 2):
            v = v_sharp_profile(f, axis, 1 << J)[1 << j]
            out[f"axis{axis}"] = np.cumsum(v / 2.0 ** (j * (1 - (alpha + beta))))
        return out
    raise ValueError(f"unknown kind {kind!r}; expected thm2 or thm4")
