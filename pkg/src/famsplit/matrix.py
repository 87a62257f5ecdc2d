"""Cross-generalization matrix: parsing, validation, row statistics, synthesis.

The matrix is oriented rows = training family, columns = testing family:
``values[t][v]`` is the recall of a detector trained only on family ``t``
when tested on samples of family ``v``. Values are fractions in [0, 1],
never percentages; loaders reject values above 1 instead of rescaling.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from famsplit.errors import MatrixFormatError
from famsplit.families import FAMILY_NAMES

HEADER_CELL = "family"


@dataclass(frozen=True)
class CrossErrorMatrix:
    """K x K recall grid over an ordered list of unique family names."""

    families: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self) -> None:
        families = tuple(self.families)
        object.__setattr__(self, "families", families)
        k = len(families)
        if k < 2:
            raise MatrixFormatError(f"need at least 2 families, got {k}")
        seen: set[str] = set()
        for i, name in enumerate(families):
            if not name:
                raise MatrixFormatError(f"empty family name at index {i}")
            if "," in name or "\n" in name:
                raise MatrixFormatError(f"family name {name!r} contains a delimiter")
            if name in seen:
                raise MatrixFormatError(f"duplicate family name {name!r}")
            seen.add(name)
        values = np.asarray(self.values, dtype=np.float64)
        if values.shape != (k, k):
            raise MatrixFormatError(
                f"value grid is {values.shape}, expected ({k}, {k}) for {k} families"
            )
        if not np.all(np.isfinite(values)):
            t, v = map(int, np.argwhere(~np.isfinite(values))[0])
            raise MatrixFormatError(f"non-finite entry at row {t}, column {v}")
        if np.any(values < 0.0) or np.any(values > 1.0):
            bad = np.argwhere((values < 0.0) | (values > 1.0))[0]
            t, v = int(bad[0]), int(bad[1])
            raise MatrixFormatError(
                f"entry {values[t, v]} at row {t}, column {v} outside [0, 1]"
            )
        values = values.copy()
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @property
    def k(self) -> int:
        return len(self.families)

    def index_of(self, family: str) -> int:
        try:
            return self.families.index(family)
        except ValueError:
            raise MatrixFormatError(f"unknown family {family!r}") from None


def load_matrix(path: str | Path) -> CrossErrorMatrix:
    """Parse a matrix CSV (header line + one row per family)."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise MatrixFormatError(f"{path}: empty file")
    header = lines[0].split(",")
    if header[0] != HEADER_CELL:
        raise MatrixFormatError(
            f"{path}: line 1 must start with {HEADER_CELL!r}, got {header[0]!r}"
        )
    families = header[1:]
    k = len(families)
    if len(lines) - 1 != k:
        raise MatrixFormatError(
            f"{path}: header names {k} families but file has {len(lines) - 1} data rows"
        )
    values = np.empty((k, k), dtype=np.float64)
    for t, line in enumerate(lines[1:], start=2):
        cells = line.split(",")
        if len(cells) != k + 1:
            raise MatrixFormatError(
                f"{path}: line {t} has {len(cells) - 1} entries, expected {k}"
            )
        if cells[0] != families[t - 2]:
            raise MatrixFormatError(
                f"{path}: line {t} row name {cells[0]!r} does not match header "
                f"name {families[t - 2]!r}"
            )
        for v, cell in enumerate(cells[1:]):
            try:
                values[t - 2, v] = float(cell)
            except ValueError:
                raise MatrixFormatError(
                    f"{path}: unparseable number {cell!r} at line {t}, column {v}"
                ) from None
            if not 0.0 <= values[t - 2, v] <= 1.0:
                raise MatrixFormatError(
                    f"{path}: entry {cell} at line {t}, column {v} outside [0, 1]"
                )
    return CrossErrorMatrix(tuple(families), values)


def save_matrix(m: CrossErrorMatrix, path: str | Path) -> None:
    """Write the canonical CSV form (fixed 6-digit decimals, LF newlines)."""
    path = Path(path)
    lines = [",".join((HEADER_CELL, *m.families))]
    for t, family in enumerate(m.families):
        row = ",".join(f"{x:.6f}" for x in m.values[t])
        lines.append(f"{family},{row}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def row_mean_recall(m: CrossErrorMatrix, family_index: int, include_self: bool = False) -> float:
    """Mean recall of one training family's row, diagonal excluded by default."""
    if not 0 <= family_index < m.k:
        raise IndexError(f"family index {family_index} out of range for K={m.k}")
    row = m.values[family_index]
    if include_self:
        return float(row.mean())
    mask = np.ones(m.k, dtype=bool)
    mask[family_index] = False
    return float(row[mask].mean())


@dataclass(frozen=True)
class SynthParams:
    """Knobs for the planted-structure synthetic matrix generator.

    Off-diagonal entries follow a noisy rank-one model: a per-row generality
    factor g times a per-column detectability factor d. A fraction of rows is
    forced to near-zero generality (dark horizontal bands) and a fraction of
    columns to near-zero detectability (dark vertical bands); diagonals are
    floored near 1 to mimic self-recall.
    """

    k: int
    seed: int = 0
    generality_range: tuple[float, float] = (0.3, 1.0)
    detectability_range: tuple[float, float] = (0.3, 1.0)
    noise_sd: float = 0.02
    diag_floor: float = 0.99
    loner_fraction: float = 0.1
    hermit_fraction: float = 0.1

    def __post_init__(self) -> None:
        if self.k < 2:
            raise MatrixFormatError(f"k must be >= 2, got {self.k}")
        if not 0 <= self.seed < 2**64:
            raise MatrixFormatError(f"seed must be an unsigned 64-bit value, got {self.seed}")
        for name in ("generality_range", "detectability_range"):
            lo, hi = getattr(self, name)
            if not (0.0 <= lo <= hi <= 1.0):
                raise MatrixFormatError(f"{name} must satisfy 0 <= lo <= hi <= 1, got ({lo}, {hi})")
        for name in ("noise_sd", "diag_floor", "loner_fraction", "hermit_fraction"):
            x = getattr(self, name)
            if not 0.0 <= x <= 1.0:
                raise MatrixFormatError(f"{name} must be a fraction in [0, 1], got {x}")


LOW_FACTOR_MAX = 0.1  # forced generality/detectability ceiling for loners/hermits


@dataclass(frozen=True)
class PlantedStructure:
    """Latent factors behind a synthetic matrix, for diagnostics and tests."""

    generality: np.ndarray
    detectability: np.ndarray
    loner_rows: tuple[int, ...]
    hermit_cols: tuple[int, ...]


def synth_structure(p: SynthParams) -> PlantedStructure:
    """Draw the latent row/column factors for the given params (deterministic)."""
    rng = np.random.default_rng(p.seed)
    g = rng.uniform(p.generality_range[0], p.generality_range[1], p.k)
    d = rng.uniform(p.detectability_range[0], p.detectability_range[1], p.k)
    n_loners = int(round(p.loner_fraction * p.k))
    n_hermits = int(round(p.hermit_fraction * p.k))
    loners = np.sort(rng.choice(p.k, size=n_loners, replace=False)) if n_loners else np.array([], dtype=int)
    hermits = np.sort(rng.choice(p.k, size=n_hermits, replace=False)) if n_hermits else np.array([], dtype=int)
    if n_loners:
        g[loners] = rng.uniform(0.0, LOW_FACTOR_MAX, n_loners)
    if n_hermits:
        d[hermits] = rng.uniform(0.0, LOW_FACTOR_MAX, n_hermits)
    return PlantedStructure(g, d, tuple(int(i) for i in loners), tuple(int(i) for i in hermits))


def synth_family_names(k: int) -> tuple[str, ...]:
    """First k canonical family names, extended with numbered names past 184."""
    if k <= len(FAMILY_NAMES):
        return FAMILY_NAMES[:k]
    extra = tuple(f"fam{i:04d}" for i in range(len(FAMILY_NAMES), k))
    return FAMILY_NAMES + extra


def synth_matrix(p: SynthParams) -> CrossErrorMatrix:
    """Generate a planted-structure matrix; pure function of the params."""
    structure = synth_structure(p)
    # Separate noise stream so factor-count knobs do not shift the noise draws.
    rng = np.random.default_rng((p.seed, 0xA5))
    noise = rng.normal(0.0, 1.0, (p.k, p.k)) * p.noise_sd
    values = np.outer(structure.generality, structure.detectability) + noise
    np.clip(values, 0.0, 1.0, out=values)
    diag = np.maximum(p.diag_floor, structure.generality * structure.detectability)
    np.fill_diagonal(values, diag)
    return CrossErrorMatrix(synth_family_names(p.k), values)
