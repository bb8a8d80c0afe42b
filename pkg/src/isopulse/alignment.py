"""Map registration: shifts, trims, and MSE comparison of landscapes.

Two probability maps are resampled onto a common grid, then an integer
shift (applied to the second map) and non-negative per-side trims (four
per map) are chosen to minimize the mean squared error over the maximal
region where both maps still overlap. The search is a deterministic
derivative-free coordinate descent on the integer lattice.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ContractError, DomainError
from .landscape import AxisSpec, Landscape

__all__ = ["AlignParams", "Bounds", "AlignmentResult", "mse", "objective",
           "shift_map", "resample_bilinear", "align"]

_TRIM_SIDES = ("left", "right", "bottom", "top")


@dataclass(frozen=True)
class AlignParams:
    """Registration parameters.

    dx and dy shift the second map along columns and rows; content at
    b[r, c] is compared against a at [r - dy, c - dx]. Trims are
    (left, right, bottom, top) margins excluded from each map before
    the overlap is taken; bottom is the row-0 side.
    """

    dx: int = 0
    dy: int = 0
    trims_a: tuple[int, int, int, int] = (0, 0, 0, 0)
    trims_b: tuple[int, int, int, int] = (0, 0, 0, 0)

    def __post_init__(self):
        for t in (*self.trims_a, *self.trims_b):
            if t < 0:
                raise ContractError("trims must be non-negative")

    @property
    def l1(self) -> int:
        return (abs(self.dx) + abs(self.dy)
                + sum(self.trims_a) + sum(self.trims_b))

    def _flat(self) -> tuple[int, ...]:
        return (self.dx, self.dy, *self.trims_a, *self.trims_b)


@dataclass(frozen=True)
class Bounds:
    """Box constraints for the search, in pixels per dimension."""

    max_dx: int
    max_dy: int
    max_trim_x: int
    max_trim_y: int

    def __post_init__(self):
        if min(self.max_dx, self.max_dy, self.max_trim_x, self.max_trim_y) < 0:
            raise ContractError("bounds must be non-negative")

    @classmethod
    def fraction_of(cls, shape: tuple[int, int], pct: float = 5.0) -> "Bounds":
        """Bounds at pct percent of each dimension, at least 1 pixel."""
        h, w = shape
        bx = max(1, int(w * pct / 100.0))
        by = max(1, int(h * pct / 100.0))
        return cls(bx, by, bx, by)


@dataclass(frozen=True, eq=False)
class AlignmentResult:
    params: AlignParams
    mse_pre: float
    mse_post: float
    overlap_size: int
    difference_map: np.ndarray | None = None


def _grid(m) -> np.ndarray:
    values = m.values if isinstance(m, Landscape) else np.asarray(m, float)
    if values.ndim != 2 or min(values.shape) < 1:
        raise ContractError("maps must be non-empty 2D grids")
    return values


def mse(a, b) -> float:
    """Mean squared difference of two equal-shape maps."""
    va, vb = _grid(a), _grid(b)
    if va.shape != vb.shape:
        raise ContractError(f"shape mismatch: {va.shape} vs {vb.shape}")
    return float(np.mean((va - vb) ** 2))


def shift_map(m, dx: int, dy: int) -> np.ndarray:
    """Translate a map by whole pixels, zero-filling vacated cells.

    out[r, c] = in[r - dy, c - dx] wherever the source index is valid.
    """
    v = _grid(m)
    out = np.zeros_like(v)
    h, w = v.shape
    r0, r1 = max(0, dy), min(h, h + dy)
    c0, c1 = max(0, dx), min(w, w + dx)
    if r0 < r1 and c0 < c1:
        out[r0:r1, c0:c1] = v[r0 - dy:r1 - dy, c0 - dx:c1 - dx]
    return out


def _overlap(shape, flat):
    dx, dy = flat[0], flat[1]
    al, ar, ab, at = flat[2:6]
    bl, br, bb, bt = flat[6:10]
    h, w = shape
    r0 = max(ab, bb - dy)
    r1 = min(h - at, h - bt - dy)
    c0 = max(al, bl - dx)
    c1 = min(w - ar, w - br - dx)
    return r0, r1, c0, c1


def _objective_flat(va, vb, flat) -> float:
    r0, r1, c0, c1 = _overlap(va.shape, flat)
    if r0 >= r1 or c0 >= c1:
        raise DomainError("empty overlap for the given shift and trims")
    dx, dy = flat[0], flat[1]
    diff = va[r0:r1, c0:c1] - vb[r0 + dy:r1 + dy, c0 + dx:c1 + dx]
    return float(np.mean(diff * diff))


def objective(a, b, params: AlignParams) -> float:
    """MSE of a against the shifted-and-trimmed b over their overlap.

    Raises
    ------
    ContractError
        On shape mismatch (resample first).
    DomainError
        When no pixels remain in the overlap.
    """
    va, vb = _grid(a), _grid(b)
    if va.shape != vb.shape:
        raise ContractError(f"shape mismatch: {va.shape} vs {vb.shape}")
    return _objective_flat(va, vb, params._flat())


# ----------------------------------------------------------- resampling

def _resample_array(v: np.ndarray, n_rows: int, n_cols: int) -> np.ndarray:
    h, w = v.shape
    if n_rows < 2 or n_cols < 2:
        raise ContractError("resample targets must be at least 2")
    # corner-aligned source coordinates
    ys = np.linspace(0.0, h - 1.0, n_rows)
    xs = np.linspace(0.0, w - 1.0, n_cols)
    y0 = np.minimum(ys.astype(int), h - 2)
    x0 = np.minimum(xs.astype(int), w - 2)
    fy = (ys - y0)[:, None]
    fx = (xs - x0)[None, :]
    v00 = v[np.ix_(y0, x0)]
    v01 = v[np.ix_(y0, x0 + 1)]
    v10 = v[np.ix_(y0 + 1, x0)]
    v11 = v[np.ix_(y0 + 1, x0 + 1)]
    return ((1 - fy) * (1 - fx) * v00 + (1 - fy) * fx * v01
            + fy * (1 - fx) * v10 + fy * fx * v11)


def resample_bilinear(land: Landscape, n_alpha: int, n_beta: int) -> Landscape:
    """Bilinear resample onto an (n_beta, n_alpha) grid over the same
    axis ranges. Corners are preserved exactly and no value leaves the
    convex hull of its four neighbours."""
    values = _resample_array(land.values, n_beta, n_alpha)
    return Landscape(values,
                     AxisSpec(land.alpha_axis.start, land.alpha_axis.stop, n_alpha),
                     AxisSpec(land.beta_axis.start, land.beta_axis.stop, n_beta),
                     land.klass, land.row, land.picture)


# --------------------------------------------------------------- search

def _search_key(va, vb, flat):
    try:
        j = _objective_flat(va, vb, flat)
    except DomainError:
        return (math.inf, math.inf, flat)
    l1 = sum(abs(t) for t in flat)
    return (j, l1, flat)


def _coordinate_descent(va, vb, start, lows, highs, max_sweeps=200):
    theta = start
    best = _search_key(va, vb, theta)
    for _ in range(max_sweeps):
        moved = False
        for k in range(len(theta)):
            for d in (1, -1):
                step = 1
                while True:
                    v = theta[k] + d * step
                    if v < lows[k] or v > highs[k]:
                        if step == 1:
                            break
                        step = 1
                        continue
                    cand = theta[:k] + (v,) + theta[k + 1:]
                    key = _search_key(va, vb, cand)
                    if key < best:
                        best, theta, moved = key, cand, True
                        step *= 2
                    elif step == 1:
                        break
                    else:
                        step = 1
        if not moved:
            break
    return best


def align(a, b, bounds: Bounds | None = None,
          keep_difference: bool = False) -> AlignmentResult:
    """Register map b onto map a.

    Parameters
    ----------
    a, b : Landscape or 2D array
        b is resampled to a's grid when the shapes differ.
    bounds : Bounds, optional
        Search box; defaults to 5 percent of each dimension.
    keep_difference : bool
        Attach the post-alignment difference over the overlap.

    Returns
    -------
    AlignmentResult
        Optimal parameters (ties broken toward smaller L1 norm, then
        lexicographically), the unaligned MSE on the full grid, the MSE
        over the final overlap, and the overlap pixel count.
    """
    va = _grid(a)
    vb = _grid(b)
    if vb.shape != va.shape:
        vb = _resample_array(vb, *va.shape)
    if bounds is None:
        bounds = Bounds.fraction_of(va.shape)

    lows = (-bounds.max_dx, -bounds.max_dy) + (0,) * 8
    highs = (bounds.max_dx, bounds.max_dy,
             bounds.max_trim_x, bounds.max_trim_x,
             bounds.max_trim_y, bounds.max_trim_y,
             bounds.max_trim_x, bounds.max_trim_x,
             bounds.max_trim_y, bounds.max_trim_y)

    zero = (0,) * 10
    starts = [zero]
    for sx in (bounds.max_dx, -bounds.max_dx):
        for sy in (bounds.max_dy, -bounds.max_dy):
            starts.append((sx, sy) + (0,) * 8)

    best = None
    for start in starts:
        key = _coordinate_descent(va, vb, start, lows, highs)
        if best is None or key < best:
            best = key
    j, _, flat = best
    if not math.isfinite(j):
        raise ContractError("no feasible alignment within the given bounds")

    params = AlignParams(flat[0], flat[1], tuple(flat[2:6]), tuple(flat[6:10]))
    r0, r1, c0, c1 = _overlap(va.shape, flat)
    diff = None
    if keep_difference:
        diff = (va[r0:r1, c0:c1]
                - vb[r0 + flat[1]:r1 + flat[1], c0 + flat[0]:c1 + flat[0]])
    return AlignmentResult(params, mse(va, vb), j,
                           (r1 - r0) * (c1 - c0), diff)