"""Excitation landscapes: scan P(alpha, beta) over a grid, persist, render.

The on-disk format is a small commented CSV:

    # <class>,<row>,<picture>
    # alpha,<start>,<stop>,<count>
    # beta,<start>,<stop>,<count>
    <count_beta rows of count_alpha comma-separated probabilities>

Axis bounds round-trip exactly (written with repr); probabilities carry
9 significant digits.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import catalog, dynamics
from .catalog import CLASSES, Policy
from .dynamics import DEFAULT_CONFIG, IntegratorConfig
from .errors import ContractError, MapFormatError, ScanError

__all__ = ["AxisSpec", "Landscape", "scan", "format_csv", "save_csv",
           "load_csv", "render_heatmap"]

PICTURES = ("detuning", "phase")


@dataclass(frozen=True)
class AxisSpec:
    """Uniform grid start..stop with count nodes."""

    start: float
    stop: float
    count: int

    def __post_init__(self):
        if self.count < 2:
            raise ContractError("axis count must be at least 2")
        if not self.stop > self.start:
            raise ContractError("axis stop must exceed start")
        if not (math.isfinite(self.start) and math.isfinite(self.stop)):
            raise ContractError("axis bounds must be finite")

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.count)

    def refined(self) -> "AxisSpec":
        """Doubled resolution sharing every existing node."""
        return AxisSpec(self.start, self.stop, 2 * self.count - 1)


@dataclass(frozen=True, eq=False)
class Landscape:
    """Grid of transition probabilities, row-major over (beta, alpha)."""

    values: np.ndarray
    alpha_axis: AxisSpec
    beta_axis: AxisSpec
    klass: str
    row: int
    picture: str

    def __post_init__(self):
        expect = (self.beta_axis.count, self.alpha_axis.count)
        if self.values.shape != expect:
            raise ContractError(
                f"values shape {self.values.shape} does not match axes {expect}")

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape


def _scan_point(args) -> float:
    klass, row, alpha, beta, picture, cfg, truncation = args
    try:
        model = catalog.model_from_alpha_beta(klass, row, alpha, beta,
                                              truncation=truncation)
        return dynamics.transition_probability(model, picture, cfg)
    except Exception as exc:
        raise ScanError(
            f"scan failed at alpha={alpha:.9g}, beta={beta:.9g}: {exc}"
        ) from exc


def scan(klass: str, row: int, alpha_axis: AxisSpec, beta_axis: AxisSpec,
         picture: str = "detuning", cfg: IntegratorConfig = DEFAULT_CONFIG,
         truncation: Policy | None = None, workers: int = 1) -> Landscape:
    """Compute the excitation landscape of one catalog model.

    Parameters
    ----------
    klass, row : str, int
        Model identity.
    alpha_axis, beta_axis : AxisSpec
        Dimensionless parameter grids; values[i, j] corresponds to
        (alpha_axis[j], beta_axis[i]).
    picture : str
        "detuning" or "phase".
    cfg : IntegratorConfig
    truncation : policy, optional
        Forwarded to model construction at every grid point.
    workers : int
        Grid points are independent; with workers > 1 they are farmed
        out to processes. Assembly preserves grid order, so results are
        identical for any worker count.

    Raises
    ------
    ScanError
        On the first failing grid point, naming its (alpha, beta).
    """
    if picture not in PICTURES:
        raise ContractError(f"unknown picture {picture!r}")
    if workers < 1:
        raise ContractError("workers must be at least 1")
    alphas = alpha_axis.values()
    betas = beta_axis.values()
    points = [(klass, row, float(a), float(b), picture, cfg, truncation)
              for b in betas for a in alphas]
    if workers == 1:
        flat = [_scan_point(p) for p in points]
    else:
        chunk = max(1, len(points) // (8 * workers))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            flat = list(pool.map(_scan_point, points, chunksize=chunk))
    values = np.array(flat, dtype=float).reshape(len(betas), len(alphas))
    return Landscape(values, alpha_axis, beta_axis, klass, row, picture)


# ------------------------------------------------------------- CSV I/O

def format_csv(land: Landscape) -> str:
    """Serialize the landscape to the commented-CSV layout above."""
    lines = [
        f"# {land.klass},{land.row},{land.picture}",
        f"# alpha,{land.alpha_axis.start!r},{land.alpha_axis.stop!r},"
        f"{land.alpha_axis.count}",
        f"# beta,{land.beta_axis.start!r},{land.beta_axis.stop!r},"
        f"{land.beta_axis.count}",
    ]
    for grid_row in land.values:
        lines.append(",".join(f"{v:.9g}" for v in grid_row))
    return "\n".join(lines) + "\n"


def save_csv(land: Landscape, path) -> None:
    """Write the landscape in the commented-CSV layout above."""
    with open(path, "w") as fh:
        fh.write(format_csv(land))


def _header_fields(raw: str, lineno: int, tag: str | None,
                   width: int) -> list[str]:
    if not raw.startswith("# "):
        raise MapFormatError("expected a '# ' header line", lineno)
    fields = [f.strip() for f in raw[2:].split(",")]
    if len(fields) != width:
        raise MapFormatError(
            f"expected {width} comma-separated header fields, "
            f"got {len(fields)}", lineno)
    if tag is not None and fields[0] != tag:
        raise MapFormatError(f"expected axis tag {tag!r}, got {fields[0]!r}",
                             lineno)
    return fields


def _axis_from_header(raw: str, lineno: int, tag: str) -> AxisSpec:
    fields = _header_fields(raw, lineno, tag, 4)
    try:
        start, stop = float(fields[1]), float(fields[2])
        count = int(fields[3])
    except ValueError as exc:
        raise MapFormatError(f"bad axis numbers: {exc}", lineno) from None
    try:
        return AxisSpec(start, stop, count)
    except ContractError as exc:
        raise MapFormatError(str(exc), lineno) from None


def load_csv(path) -> Landscape:
    """Read a landscape written by save_csv.

    Raises
    ------
    MapFormatError
        On malformed headers, ragged rows, non-finite or out-of-range
        values, or a row-count mismatch; the message carries the 1-based
        line number.
    """
    with open(path) as fh:
        raw_lines = fh.read().splitlines()
    if len(raw_lines) < 4:
        raise MapFormatError("file too short for headers and data",
                             len(raw_lines) + 1)

    ident = _header_fields(raw_lines[0], 1, None, 3)
    klass, picture = ident[0], ident[2]
    if klass not in CLASSES:
        raise MapFormatError(f"unknown class {klass!r}", 1)
    if picture not in PICTURES:
        raise MapFormatError(f"unknown picture {picture!r}", 1)
    try:
        row = int(ident[1])
    except ValueError:
        raise MapFormatError(f"row must be an integer, got {ident[1]!r}",
                             1) from None

    alpha_axis = _axis_from_header(raw_lines[1], 2, "alpha")
    beta_axis = _axis_from_header(raw_lines[2], 3, "beta")

    data = raw_lines[3:]
    if len(data) != beta_axis.count:
        bad = min(len(data), beta_axis.count) + 4
        raise MapFormatError(
            f"expected {beta_axis.count} data rows, found {len(data)}", bad)
    values = np.empty((beta_axis.count, alpha_axis.count))
    for i, line in enumerate(data):
        lineno = i + 4
        parts = line.split(",")
        if len(parts) != alpha_axis.count:
            raise MapFormatError(
                f"expected {alpha_axis.count} values per row, "
                f"got {len(parts)}", lineno)
        try:
            grid_row = [float(p) for p in parts]
        except ValueError as exc:
            raise MapFormatError(f"bad probability: {exc}", lineno) from None
        for v in grid_row:
            if not math.isfinite(v) or not 0.0 <= v <= 1.0:
                raise MapFormatError(
                    f"probability {v!r} outside [0, 1]", lineno)
        values[i] = grid_row
    return Landscape(values, alpha_axis, beta_axis, klass, row, picture)


# ------------------------------------------------------------ rendering

def _intensity_rows(land: Landscape) -> np.ndarray:
    # top raster row = largest beta, matching the usual plot orientation
    levels = np.rint(np.clip(land.values, 0.0, 1.0) * 255.0)
    return levels.astype(np.uint8)[::-1]


def render_heatmap(land: Landscape, path, fmt: str | None = None) -> None:
    """Write a grayscale raster with intensity linear in probability.

    PGM (binary P5) needs nothing beyond the standard library and is
    bit-exact across runs; PNG requires the optional pillow dependency.
    """
    if fmt is None:
        fmt = "png" if str(path).lower().endswith(".png") else "pgm"
    rows = _intensity_rows(land)
    h, w = rows.shape
    if fmt == "pgm":
        with open(path, "wb") as fh:
            fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
            fh.write(rows.tobytes())
        return
    if fmt == "png":
        try:
            from PIL import Image
        except ImportError:
            raise ContractError(
                "PNG output requires the optional pillow dependency; "
                "install isopulse[png] or write a .pgm file") from None
        Image.fromarray(rows, mode="L").save(path, format="PNG")
        return
    raise ContractError(f"unknown raster format {fmt!r}")