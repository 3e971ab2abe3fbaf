"""Aggregation across seeds: IQM, bootstrap CIs, threshold crossings, CSV IO.

Run files are one CSV per (config, seed) named <config_hash>_seed<k>.csv.
Comment lines at the top echo the full config in the key=value grammar
plus a code_version tag, so a run file alone reconstructs its TrainConfig.
Summary files (<config_hash>_summary.csv) carry per-checkpoint IQM and a
percentile-bootstrap confidence interval; they repeat the config echo
(minus seed) so downstream plotting can label groups without the runs.

Infinity is a first-class value here: a seed that never reaches a success
threshold contributes math.inf, and IQM/bootstrap propagate it naturally
(an interval whose upper end is inf means "not reliably reached").
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import __version__
from .config import canonical_items, config_from_items, config_hash
from .trainer import RunRecord, TrainConfig

RUN_HEADER = "env_steps,update_count,success_rate"
SUMMARY_HEADER = "x,iqm,ci_lo,ci_hi,n_seeds"
BOOTSTRAP_DEFAULT_B = 2000
# Fixed stream for summary bootstraps keeps aggregate outputs byte-stable.
BOOTSTRAP_SEED = 20240 + 817


class CurveAlignmentError(ValueError):
    """Runs grouped under one config disagree on their checkpoint grid."""


class SchemaError(ValueError):
    """A results CSV does not match the expected header or echo block."""


def iqm(values: Sequence[float]) -> float:
    """Interquartile mean: drop floor(n/4) lowest and highest, average rest.

    Infinities propagate; NaN is rejected because a curve can never
    legitimately produce one.
    """
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("iqm needs a non-empty 1-d collection")
    if np.isnan(arr).any():
        raise ValueError("iqm input contains NaN")
    k = arr.size // 4
    arr = np.sort(arr)
    return float(np.mean(arr[k: arr.size - k]))


def bootstrap_ci(
    values: Sequence[float],
    b: int = BOOTSTRAP_DEFAULT_B,
    confidence: float = 0.95,
    rng: np.random.Generator | None = None,
) -> tuple[float, float]:
    """Percentile bootstrap interval for the IQM of `values`.

    Resamples n points with replacement b times, computes the IQM of each
    resample, and returns the (1-confidence)/2 and (1+confidence)/2
    percentiles of that distribution.
    """
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1 or arr.size < 2:
        raise ValueError("bootstrap_ci needs at least two values")
    if np.isnan(arr).any():
        raise ValueError("bootstrap_ci input contains NaN")
    if b < 1:
        raise ValueError("bootstrap_ci needs b >= 1")
    if not 0.0 < confidence < 1.0:
        raise ValueError("confidence must be in (0, 1)")
    if rng is None:
        rng = np.random.default_rng(BOOTSTRAP_SEED)
    n = arr.size
    k = n // 4
    resamples = arr[rng.integers(0, n, size=(b, n))]
    resamples.sort(axis=1)
    stats = resamples[:, k: n - k].mean(axis=1)
    lo = (1.0 - confidence) / 2.0 * 100.0
    return (
        float(np.percentile(stats, lo)),
        float(np.percentile(stats, 100.0 - lo)),
    )


@dataclass
class CurveSet:
    """Aligned success-rate curves for one config hash across seeds."""

    config: TrainConfig
    hash: str
    env_steps: np.ndarray
    update_counts: np.ndarray
    rates: dict[int, np.ndarray] = field(default_factory=dict)

    @property
    def n_seeds(self) -> int:
        return len(self.rates)

    @property
    def seeds(self) -> list[int]:
        return sorted(self.rates)

    def axis(self, name: str) -> np.ndarray:
        if name == "env_steps":
            return self.env_steps
        if name == "update_count":
            return self.update_counts
        raise ValueError(f"unknown axis {name!r}")

    def matrix(self) -> np.ndarray:
        """Rates stacked seed-major, shape (n_seeds, n_checkpoints)."""
        return np.stack([self.rates[s] for s in self.seeds])


@dataclass(frozen=True)
class ThresholdResult:
    """First checkpoint at or above a success threshold, per seed."""

    threshold: float
    axis: str
    per_seed: dict[int, float]
    iqm_finite: float

    @property
    def values(self) -> list[float]:
        """All per-seed crossings (inf included), seed-sorted."""
        return [self.per_seed[s] for s in sorted(self.per_seed)]


def steps_to_threshold(
    curves: CurveSet, threshold: float, axis: str = "env_steps"
) -> ThresholdResult:
    """Per-seed first crossing of `threshold`; math.inf when never reached.

    iqm_finite summarizes only the seeds that crossed; it is inf when none
    did. For interval work use ThresholdResult.values, where the infs
    penalize the statistic honestly.
    """
    xs = curves.axis(axis)
    per_seed: dict[int, float] = {}
    for seed, rates in curves.rates.items():
        hits = np.nonzero(rates >= threshold)[0]
        per_seed[seed] = float(xs[hits[0]]) if hits.size else math.inf
    finite = [v for v in per_seed.values() if math.isfinite(v)]
    return ThresholdResult(
        threshold=threshold,
        axis=axis,
        per_seed=per_seed,
        iqm_finite=iqm(finite) if finite else math.inf,
    )


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def run_filename(cfg: TrainConfig) -> str:
    return f"{config_hash(cfg)}_seed{cfg.seed}.csv"


def write_run_csv(record: RunRecord, out_dir: str | Path) -> Path:
    """Persist one run; returns the path. Writes are atomic."""
    cfg = record.config
    lines = [f"# {k}={v}" for k, v in canonical_items(cfg, include_seed=True)]
    lines.append(f"# code_version={__version__}")
    lines.append(RUN_HEADER)
    for env_steps, update_count, rate in record.rows:
        lines.append(f"{env_steps},{update_count},{rate!r}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / run_filename(cfg)
    _atomic_write(path, "\n".join(lines) + "\n")
    return path


def read_run_csv(path: str | Path) -> RunRecord:
    """Parse a run file back into a RunRecord (counters are not persisted)."""
    path = Path(path)
    echo: dict[str, str] = {}
    rows: list[tuple[int, int, float]] = []
    header_seen = False
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line.lstrip("#").strip()
            if "=" not in body:
                raise SchemaError(f"{path.name}:{lineno}: bad echo line {line!r}")
            key, value = body.split("=", 1)
            echo[key.strip()] = value.strip()
            continue
        if not header_seen:
            if line != RUN_HEADER:
                raise SchemaError(
                    f"{path.name}:{lineno}: expected header {RUN_HEADER!r}, got {line!r}"
                )
            header_seen = True
            continue
        parts = line.split(",")
        if len(parts) != 3:
            raise SchemaError(f"{path.name}:{lineno}: expected 3 columns, got {line!r}")
        rows.append((int(parts[0]), int(parts[1]), float(parts[2])))
    if not header_seen:
        raise SchemaError(f"{path.name}: missing {RUN_HEADER!r} header")
    echo.pop("code_version", None)
    config = config_from_items(echo)
    return RunRecord(config=config, seed=config.seed, rows=rows)


def aggregate(paths: Iterable[str | Path]) -> dict[str, CurveSet]:
    """Group run files by config hash into aligned CurveSets.

    Two runs under one hash must share the exact checkpoint grid; a
    duplicate (hash, seed) pair is ambiguous and rejected.
    """
    groups: dict[str, CurveSet] = {}
    for path in sorted(Path(p) for p in paths):
        record = read_run_csv(path)
        h = config_hash(record.config)
        arr = np.asarray(record.rows, dtype=float)
        if arr.size == 0:
            raise SchemaError(f"{path.name}: run file has no checkpoint rows")
        env_steps = arr[:, 0].astype(int)
        update_counts = arr[:, 1].astype(int)
        rates = arr[:, 2]
        group = groups.get(h)
        if group is None:
            groups[h] = CurveSet(
                config=record.config,
                hash=h,
                env_steps=env_steps,
                update_counts=update_counts,
                rates={record.seed: rates},
            )
            continue
        if record.seed in group.rates:
            raise SchemaError(f"duplicate run for config {h} seed {record.seed}")
        if not (
            np.array_equal(group.env_steps, env_steps)
            and np.array_equal(group.update_counts, update_counts)
        ):
            raise CurveAlignmentError(
                f"config {h}: seed {record.seed} checkpoints differ from the group"
            )
        group.rates[record.seed] = rates
    return groups


@dataclass(frozen=True)
class CheckpointStat:
    x: int
    iqm: float
    ci_lo: float
    ci_hi: float
    n_seeds: int


def curve_statistics(
    curves: CurveSet,
    axis: str = "env_steps",
    b: int = BOOTSTRAP_DEFAULT_B,
    confidence: float = 0.95,
    rng: np.random.Generator | None = None,
) -> list[CheckpointStat]:
    """Per-checkpoint IQM with bootstrap interval along the chosen axis."""
    if curves.n_seeds < 2:
        raise ValueError("curve_statistics needs at least two seeds")
    if rng is None:
        rng = np.random.default_rng(BOOTSTRAP_SEED)
    xs = curves.axis(axis)
    mat = curves.matrix()
    out = []
    for j in range(mat.shape[1]):
        col = mat[:, j]
        lo, hi = bootstrap_ci(col, b=b, confidence=confidence, rng=rng)
        out.append(
            CheckpointStat(
                x=int(xs[j]), iqm=iqm(col), ci_lo=lo, ci_hi=hi, n_seeds=col.size
            )
        )
    return out


def summary_filename(curves: CurveSet) -> str:
    return f"{curves.hash}_summary.csv"


def write_summary_csv(
    curves: CurveSet,
    out_dir: str | Path,
    axis: str = "env_steps",
    b: int = BOOTSTRAP_DEFAULT_B,
    confidence: float = 0.95,
) -> Path:
    """Write per-checkpoint stats for one group; echoes the config sans seed.

    The bootstrap stream is fixed, so rewriting the same group reproduces
    the file byte for byte.
    """
    stats = curve_statistics(
        curves, axis=axis, b=b, confidence=confidence,
        rng=np.random.default_rng(BOOTSTRAP_SEED),
    )
    lines = [f"# {k}={v}" for k, v in canonical_items(curves.config, include_seed=False)]
    lines.append(f"# axis={axis}")
    lines.append(f"# code_version={__version__}")
    lines.append(SUMMARY_HEADER)
    for s in stats:
        lines.append(f"{s.x},{s.iqm!r},{s.ci_lo!r},{s.ci_hi!r},{s.n_seeds}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / summary_filename(curves)
    _atomic_write(path, "\n".join(lines) + "\n")
    return path


def summary_table(groups: dict[str, CurveSet]) -> str:
    """Human-readable one-line-per-group digest for CLI output."""
    lines = ["hash          seeds  checkpoints  final_iqm"]
    for h in sorted(groups):
        g = groups[h]
        final = iqm(g.matrix()[:, -1]) if g.n_seeds else float("nan")
        lines.append(
            f"{h}  {g.n_seeds:5d}  {g.env_steps.size:11d}  {final:9.4f}"
        )
    return "\n".join(lines)
