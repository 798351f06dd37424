"""Exact representations of test functions on dyadic breakpoints.

``PiecewiseLinear1D`` stores values at the ``2**M + 1`` breakpoints ``k 2**-M``
(the last one is the left limit at 1) and is affine in between.
``SeparableFunction2D`` is a finite sum of products ``u(x) v(y)``;
``GridFunction2D`` is constant on the ``2**M x 2**M`` dyadic cells.

Every quadrature here is exact: the mean of an affine function over a cell is
its midpoint value, and the kernels we integrate against are step functions
on dyadic cells.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .dyadic import MAX_SCALE, DyadicRational

PAIRWISE_THRESHOLD = 1 << 15


def ordered_sum(values: np.ndarray) -> float:
    """Sum in ascending index order; pairwise for long inputs.

    Both paths are deterministic for a given input array.
    """
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return 0.0
    if values.size > PAIRWISE_THRESHOLD:
        return float(np.add.reduce(values))
    return float(np.cumsum(values)[-1])


@dataclass(frozen=True, eq=False)
class PiecewiseLinear1D:
    resolution: int
    values: np.ndarray

    def __post_init__(self) -> None:
        vals = np.array(self.values, dtype=float)
        if vals.shape != ((1 << self.resolution) + 1,):
            raise ValueError(f"expected {(1 << self.resolution) + 1} breakpoint values, got {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("values must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def constant(cls, c: float, resolution: int = 0) -> PiecewiseLinear1D:
        return cls(resolution, np.full((1 << resolution) + 1, float(c)))

    @classmethod
    def identity(cls) -> PiecewiseLinear1D:
        """The ramp ``x``."""
        return cls(0, np.array([0.0, 1.0]))

    @classmethod
    def from_callable(cls, fn: Callable[[np.ndarray], np.ndarray], resolution: int) -> PiecewiseLinear1D:
        xs = np.arange((1 << resolution) + 1) / (1 << resolution)
        return cls(resolution, fn(xs))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PiecewiseLinear1D):
            return NotImplemented
        return self.resolution == other.resolution and np.array_equal(self.values, other.values)

    def __hash__(self) -> int:
        return hash((self.resolution, self.values.tobytes()))

    @property
    def breakpoints(self) -> np.ndarray:
        return np.arange((1 << self.resolution) + 1) / (1 << self.resolution)

    def refine(self, resolution: int) -> PiecewiseLinear1D:
        """The same function described on a finer breakpoint grid."""
        if resolution < self.resolution:
            raise ValueError("cannot coarsen a piecewise-linear function")
        if resolution == self.resolution:
            return self
        step = 1 << (resolution - self.resolution)
        t = np.arange(step) / step
        left = self.values[:-1, None]
        right = self.values[1:, None]
        inner = (left + (right - left) * t[None, :]).ravel()
        return PiecewiseLinear1D(resolution, np.append(inner, self.values[-1]))

    def eval_at(self, nums, scale: int) -> np.ndarray:
        """Values at the grid points ``nums / 2**scale``."""
        nums = np.asarray(nums, dtype=np.int64)
        m = self.resolution
        if scale <= m:
            return self.values[nums << (m - scale)]
        shift = scale - m
        cell = nums >> shift
        t = (nums & ((1 << shift) - 1)) / float(1 << shift)
        left = self.values[cell]
        right = self.values[cell + 1]
        return left + (right - left) * t

    def __call__(self, x: DyadicRational) -> float:
        return float(self.eval_at([x.num], x.scale)[0])

    def fine_cell_averages(self) -> np.ndarray:
        return 0.5 * (self.values[:-1] + self.values[1:])

    def with_cell_signs(self, signs: Sequence[float], scale: int) -> PiecewiseLinear1D:
        """Multiply by a step function that is constant on cells at ``scale``.

        The product must stay continuous, so the function has to vanish at
        every cell boundary where the sign changes.
        """
        signs = np.asarray(signs, dtype=float)
        if signs.shape != (1 << scale,):
            raise ValueError("one sign per cell expected")
        f = self.refine(max(self.resolution, scale))
        m = f.resolution
        k = np.arange((1 << m) + 1)
        left_cell = np.minimum(k >> (m - scale), (1 << scale) - 1)
        right_cell = np.maximum((k - 1) >> (m - scale), 0)
        boundary = (k & ((1 << (m - scale)) - 1)) == 0
        clash = boundary & (signs[left_cell] != signs[right_cell]) & (f.values != 0)
        if np.any(clash):
            raise ValueError("sign change at a breakpoint where the function is nonzero")
        return PiecewiseLinear1D(m, f.values * signs[left_cell])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["breakpoint", "value"])
        den = 1 << self.resolution
        for k, v in enumerate(self.values):
            w.writerow([f"{k}/2^{self.resolution}" if k < den else "1", f"{v:.17g}"])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> PiecewiseLinear1D:
        rows = list(csv.reader(io.StringIO(text)))[1:]
        values = np.array([float(r[1]) for r in rows])
        n = len(values) - 1
        if n < 1 or n & (n - 1):
            raise ValueError("breakpoint count must be 2^M + 1")
        return cls(n.bit_length() - 1, values)


def eval1d(f: PiecewiseLinear1D, x: DyadicRational) -> float:
    return f(x)


def cell_average(f: PiecewiseLinear1D, target_scale: int) -> np.ndarray:
    """Exact averages of ``f`` over the ``2**target_scale`` dyadic cells."""
    if target_scale > f.resolution:
        raise ValueError(f"target scale {target_scale} is finer than resolution {f.resolution}")
    fine = f.fine_cell_averages()
    group = 1 << (f.resolution - target_scale)
    return fine.reshape(-1, group).mean(axis=1)


def cell_integrals(f: PiecewiseLinear1D, scale: int) -> np.ndarray:
    """Exact integrals of ``f`` over the cells at ``scale``; refines ``f`` if needed."""
    g = f.refine(max(scale, f.resolution))
    return cell_average(g, scale) / (1 << scale)


def integrate_against_step(f: PiecewiseLinear1D, step: Sequence[float]) -> float:
    """``∫ f(x) s(x) dx`` for a step function ``s`` given by its cell values."""
    step = np.asarray(step, dtype=float)
    n = step.shape[0]
    if n < 1 or n & (n - 1):
        raise ValueError("step length must be a power of two")
    scale = n.bit_length() - 1
    return ordered_sum(step * cell_integrals(f, scale))


@dataclass(frozen=True, eq=False)
class SeparableFunction2D:
    """``f(x, y) = sum_i u_i(x) v_i(y)``."""

    terms: tuple[tuple[PiecewiseLinear1D, PiecewiseLinear1D], ...]

    def __post_init__(self) -> None:
        terms = tuple((u, v) for u, v in self.terms)
        if not terms:
            raise ValueError("at least one term is required")
        object.__setattr__(self, "terms", terms)

    @classmethod
    def product(cls, u: PiecewiseLinear1D, v: PiecewiseLinear1D) -> SeparableFunction2D:
        return cls(((u, v),))

    @property
    def resolution(self) -> int:
        return max(max(u.resolution, v.resolution) for u, v in self.terms)

    @property
    def resolutions(self) -> tuple[int, int]:
        return (max(u.resolution for u, _ in self.terms), max(v.resolution for _, v in self.terms))

    def refined(self) -> SeparableFunction2D:
        rx, ry = self.resolutions
        return SeparableFunction2D(tuple((u.refine(rx), v.refine(ry)) for u, v in self.terms))

    def samples(self) -> np.ndarray:
        """Breakpoint values on the common grid, shape ``(2**Mx + 1, 2**My + 1)``."""
        g = self.refined()
        return sum(np.outer(u.values, v.values) for u, v in g.terms)

    def eval_at(self, xnums, xscale: int, ynums, yscale: int) -> np.ndarray:
        return sum(u.eval_at(xnums, xscale) * v.eval_at(ynums, yscale) for u, v in self.terms)

    def __call__(self, x: DyadicRational, y: DyadicRational) -> float:
        return float(sum(u(x) * v(y) for u, v in self.terms))


@dataclass(frozen=True, eq=False)
class GridFunction2D:
    """Step function equal to ``cell_values[i, j]`` on ``I_M^i x I_M^j``."""

    resolution: int
    cell_values: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        vals = np.array(self.cell_values, dtype=float)
        n = 1 << self.resolution
        if vals.shape != (n, n):
            raise ValueError(f"expected a {n}x{n} matrix, got {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("cell values must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "cell_values", vals)

    @classmethod
    def random(cls, resolution: int, rng: np.random.Generator, low: float = -1.0, high: float = 1.0) -> GridFunction2D:
        n = 1 << resolution
        return cls(resolution, rng.uniform(low, high, size=(n, n)))

    @classmethod
    def from_callable(cls, fn: Callable[[np.ndarray, np.ndarray], np.ndarray], resolution: int) -> GridFunction2D:
        n = 1 << resolution
        xs = np.arange(n) / n
        return cls(resolution, fn(xs[:, None], xs[None, :]))

    def samples(self) -> np.ndarray:
        return self.cell_values

    def refine(self, resolution: int) -> GridFunction2D:
        if resolution < self.resolution:
            raise ValueError("cannot coarsen a grid function")
        rep = 1 << (resolution - self.resolution)
        return GridFunction2D(resolution, np.kron(self.cell_values, np.ones((rep, rep))))

    def eval_at(self, xnums, xscale: int, ynums, yscale: int) -> np.ndarray:
        m = self.resolution
        xnums = np.asarray(xnums, dtype=np.int64)
        ynums = np.asarray(ynums, dtype=np.int64)
        i = xnums << (m - xscale) if xscale <= m else xnums >> (xscale - m)
        j = ynums << (m - yscale) if yscale <= m else ynums >> (yscale - m)
        return self.cell_values[i, j]

    def __call__(self, x: DyadicRational, y: DyadicRational) -> float:
        return float(self.eval_at([x.num], x.scale, [y.num], y.scale)[0])

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# walshlab grid2d M={self.resolution}\n")
        w = csv.writer(buf, lineterminator="\n")
        for row in self.cell_values:
            w.writerow([f"{v:.17g}" for v in row])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> GridFunction2D:
        lines = text.splitlines()
        header = lines[0].strip()
        prefix = "# walshlab grid2d M="
        if not header.startswith(prefix):
            raise ValueError("missing grid2d header")
        m = int(header[len(prefix):])
        rows = [[float(v) for v in r] for r in csv.reader(lines[1:]) if r]
        return cls(m, np.array(rows))


Function2D = SeparableFunction2D | GridFunction2D


def _probe_points(x: DyadicRational, depth: int, mode: str) -> tuple[np.ndarray, np.ndarray, int]:
    """Numerators of ``x`` and its probes at a common scale, with the offset level of each."""
    s = max(x.scale, depth)
    base = x.num << (s - x.scale)
    nums, levels = [base], [0]
    for j in range(1, depth + 1):
        step = 1 << (s - j)
        if mode == "dyadic":
            cands = [base ^ step]
        else:
            cands = [c for c in (base + step, base - step) if 0 <= c < (1 << s)]
        nums.extend(cands)
        levels.extend([j] * len(cands))
    return np.array(nums, dtype=np.int64), np.array(levels), s


def continuity_profile(f, x: DyadicRational, y: DyadicRational, probe_depth: int, mode: str = "dyadic") -> np.ndarray:
    """``e_k = max |f(x', y') - f(x, y)|`` over probes with offsets ``2**-j``, ``k <= j <= depth``.

    In ``"dyadic"`` mode ``x' = x ∔ h``; in ``"ordinary"`` mode ``x' = x ± h``.
    The sequence is nonincreasing in ``k`` by construction.
    """
    if probe_depth < 1:
        raise ValueError("probe_depth must be at least 1")
    if probe_depth > MAX_SCALE:
        raise ValueError(f"probe_depth cannot exceed {MAX_SCALE}")
    if mode not in ("dyadic", "ordinary"):
        raise ValueError(f"unknown mode {mode!r}")
    xn, xl, xs = _probe_points(x, probe_depth, mode)
    yn, yl, ys = _probe_points(y, probe_depth, mode)
    vals = np.asarray(f.eval_at(xn[:, None], xs, yn[None, :], ys), dtype=float)
    err = np.abs(vals - vals[0, 0])
    profile = np.empty(probe_depth)
    for k in range(1, probe_depth + 1):
        rows = (xl == 0) | (xl >= k)
        cols = (yl == 0) | (yl >= k)
        profile[k - 1] = err[np.ix_(rows, cols)].max()
    return profile


def w_continuous_at(f, x: DyadicRational, y: DyadicRational, probe_depth: int = 36,
                    tol: float = 1e-6, mode: str = "dyadic") -> bool:
    """Probe continuity at ``(x, y)``: the deepest probe error must fall below ``tol``.

    For piecewise-linear inputs the probe error decays like ``slope * 2**-k``,
    so ``tol`` has to exceed ``slope * 2**-probe_depth``.
    """
    return continuity_profile(f, x, y, probe_depth, mode)[-1] <= tol
