"""Data-driven objective models: dataset ingestion, log-feature space,
a k-nearest-neighbor surrogate with empirical 90% interval bounds, and
a synthetic dataset generator with step-dependent response surfaces.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence, TextIO

import numpy as np
from scipy.spatial import cKDTree

LOG_SHIFT = 1e-5
DESIGN_COLUMNS = ("freshness", "views", "likes", "comments")
OBJECTIVE_COLUMNS = ("clicks", "dwell_ms")
SCHEMA_COLUMNS = DESIGN_COLUMNS + OBJECTIVE_COLUMNS + ("time_step",)
MAX_TIME_STEPS = 4


@dataclass(frozen=True)
class FeatureSpace:
    """The fixed log-feature mapping and its column order."""

    design_columns: tuple[str, ...] = DESIGN_COLUMNS
    objective_columns: tuple[str, ...] = OBJECTIVE_COLUMNS
    shift: float = LOG_SHIFT

    def transform(self, values) -> np.ndarray:
        return np.log(np.asarray(values, dtype=np.float64) + self.shift)

    def inverse(self, values) -> np.ndarray:
        return np.exp(np.asarray(values, dtype=np.float64)) - self.shift


FEATURE_SPACE = FeatureSpace()


@dataclass(eq=False)
class Dataset:
    """Column-oriented activity/engagement records.

    ``time_step`` holds 1..4 per row, or 0 where the row carries no step
    (static data). Rows violating schema invariants are dropped during
    ingestion and counted in ``dropped_rows``.
    """

    freshness: np.ndarray
    views: np.ndarray
    likes: np.ndarray
    comments: np.ndarray
    clicks: np.ndarray
    dwell_ms: np.ndarray
    time_step: np.ndarray
    provenance: str = ""
    dropped_rows: int = 0

    def __post_init__(self):
        n = len(self.freshness)
        for name in ("views", "likes", "comments", "clicks", "dwell_ms", "time_step"):
            if len(getattr(self, name)) != n:
                raise ValueError(f"column {name} length differs from freshness")

    @property
    def row_count(self) -> int:
        return len(self.freshness)

    def design_matrix(self) -> np.ndarray:
        return np.column_stack([self.freshness, self.views, self.likes, self.comments])

    def objective_matrix(self) -> np.ndarray:
        return np.column_stack([self.clicks, self.dwell_ms])

    def steps_present(self) -> list[int]:
        return sorted(int(s) for s in np.unique(self.time_step) if s > 0)

    def subset_for_step(self, step: int) -> "Dataset":
        mask = self.time_step == step
        if not np.any(mask):
            raise ValueError(f"no rows for time step {step}")
        return Dataset(
            freshness=self.freshness[mask],
            views=self.views[mask],
            likes=self.likes[mask],
            comments=self.comments[mask],
            clicks=self.clicks[mask],
            dwell_ms=self.dwell_ms[mask],
            time_step=self.time_step[mask],
            provenance=f"{self.provenance}[step={step}]",
        )

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(SCHEMA_COLUMNS)
            for i in range(self.row_count):
                step = int(self.time_step[i])
                writer.writerow(
                    [
                        repr(float(self.freshness[i])),
                        int(self.views[i]),
                        int(self.likes[i]),
                        int(self.comments[i]),
                        int(self.clicks[i]),
                        repr(float(self.dwell_ms[i])),
                        step if step > 0 else "",
                    ]
                )


def _parse_row(row: dict[str, str]) -> tuple[float, ...] | None:
    try:
        freshness = float(row["freshness"])
        views = float(row["views"])
        likes = float(row["likes"])
        comments = float(row["comments"])
        clicks = float(row["clicks"])
        dwell = float(row["dwell_ms"])
    except (ValueError, TypeError):
        return None
    values = (freshness, views, likes, comments, clicks, dwell)
    if not all(np.isfinite(v) for v in values):
        return None
    if any(v < 0 for v in values):
        return None
    raw_step = (row.get("time_step") or "").strip()
    if not raw_step:
        step = 0
    else:
        try:
            step = int(raw_step)
        except ValueError:
            return None
        if not 1 <= step <= MAX_TIME_STEPS:
            return None
    return values + (step,)


def load_dataset(source: str | Path | TextIO, provenance: str | None = None) -> Dataset:
    """Parse a schema CSV into a Dataset, dropping invalid rows.

    Raises on a missing required column or when no valid rows remain.
    """
    if isinstance(source, (str, Path)):
        with open(source, "r", newline="") as fh:
            return load_dataset(fh, provenance=provenance or str(source))
    reader = csv.DictReader(source)
    header = reader.fieldnames or []
    for col in DESIGN_COLUMNS + OBJECTIVE_COLUMNS:
        if col not in header:
            raise ValueError(f"dataset is missing required column: {col}")

    parsed: list[tuple[float, ...]] = []
    dropped = 0
    for row in reader:
        values = _parse_row(row)
        if values is None:
            dropped += 1
        else:
            parsed.append(values)
    if not parsed:
        raise ValueError("dataset contains no valid rows")
    cols = np.array(parsed, dtype=np.float64)
    return Dataset(
        freshness=cols[:, 0],
        views=cols[:, 1],
        likes=cols[:, 2],
        comments=cols[:, 3],
        clicks=cols[:, 4],
        dwell_ms=cols[:, 5],
        time_step=cols[:, 6].astype(np.int64),
        provenance=provenance or "<stream>",
        dropped_rows=dropped,
    )


def derive_log_features(dataset: Dataset) -> tuple[np.ndarray, np.ndarray]:
    """Design and objective matrices mapped through log(x + 1e-5)."""
    X = FEATURE_SPACE.transform(dataset.design_matrix())
    Y = FEATURE_SPACE.transform(dataset.objective_matrix())
    return X, Y


@dataclass(frozen=True, eq=False)
class KnnSurrogate:
    """KNN regressor per objective over a transformed design matrix.

    Predictions are neighbour-target means; the 90% interval is the
    empirical 5th/95th percentile of the k neighbour targets, widened
    to bracket the mean when a skewed neighbourhood would not.
    """

    k: int
    points: np.ndarray
    targets: np.ndarray
    tree: cKDTree = field(repr=False, compare=False)

    @classmethod
    def fit(cls, points, targets, k: int) -> "KnnSurrogate":
        P = np.ascontiguousarray(points, dtype=np.float64)
        T = np.ascontiguousarray(targets, dtype=np.float64)
        if P.ndim != 2 or T.ndim != 2 or P.shape[0] != T.shape[0]:
            raise ValueError("points and targets must be 2-D with matching row counts")
        if not 1 <= k <= P.shape[0]:
            raise ValueError(f"k must lie in [1, {P.shape[0]}], got {k}")
        return cls(k=k, points=P, targets=T, tree=cKDTree(P))

    def neighbors(self, queries: np.ndarray) -> np.ndarray:
        """(B, k) nearest training-row indices per query."""
        Q = np.atleast_2d(np.asarray(queries, dtype=np.float64))
        _, idx = self.tree.query(Q, k=self.k)
        if self.k == 1:
            idx = idx[:, None]
        return idx

    def predict(self, queries) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Per-objective mean and (lo90, hi90) bounds, each of shape (B, m)."""
        idx = self.neighbors(queries)
        neigh = self.targets[idx]  # (B, k, m)
        mean = neigh.mean(axis=1)
        lo = np.percentile(neigh, 5.0, axis=1)
        hi = np.percentile(neigh, 95.0, axis=1)
        return mean, np.minimum(lo, mean), np.maximum(hi, mean)


def knn_predict(model: KnnSurrogate, x) -> list[tuple[float, float, float]]:
    """(mean, lo90, hi90) per objective for one transformed design vector."""
    mean, lo, hi = model.predict(np.asarray(x, dtype=np.float64)[None, :])
    return [(float(mean[0, j]), float(lo[0, j]), float(hi[0, j])) for j in range(mean.shape[1])]


# Response surfaces live in a 2-D latent plane: a popularity axis
# (views plus some likes) and an age axis (freshness plus some
# comments). Clicks and dwell follow orthogonal directions in that
# plane, so every step carries a genuine trade-off. Consecutive time
# steps rotate the pair by 45 degrees (day/night alternation), which
# moves the optimal designs at every transition while keeping the
# achievable front size comparable across steps.
_Z_CENTER = np.array([3.5, 7.0, 4.0, 2.0])
_Z_SCALE = np.array([1.5, 2.0, 2.0, 2.0])
_Z_CLIP = 2.0
_STEP_ANGLE_DEG = {1: 15.0, 2: 60.0, 3: 15.0, 4: 60.0}
_CLICK_BASE, _CLICK_SPAN = 12.3, 1.05
_DWELL_BASE, _DWELL_SPAN = 10.4, 0.85
_NOISE_SIGMA = 0.15


def _latent_plane(z_std: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    clipped = np.clip(z_std, -_Z_CLIP, _Z_CLIP)
    popularity = clipped[:, 1] + 0.4 * clipped[:, 2]
    age = clipped[:, 0] + 0.4 * clipped[:, 3]
    return popularity, age


def generate_synthetic(seed: int, sizes: Sequence[int]) -> Dataset:
    """Deterministic synthetic dataset with per-step response surfaces.

    One entry of ``sizes`` per time step (a single entry produces static
    data with no step labels). Clicks and dwell time follow
    step-rotated directions in the popularity/age latent plane, so the
    trade-off between them moves at every step transition.
    """
    if not sizes or any(s < 1 for s in sizes):
        raise ValueError("sizes must be positive row counts, one per time step")
    if len(sizes) > MAX_TIME_STEPS:
        raise ValueError(f"at most {MAX_TIME_STEPS} time steps are supported")
    rng = np.random.default_rng(seed)
    blocks = []
    for step_index, size in enumerate(sizes, start=1):
        freshness = rng.gamma(shape=2.0, scale=24.0, size=size)
        views = np.floor(rng.lognormal(mean=7.0, sigma=1.6, size=size))
        likes = np.floor(views * rng.beta(2.0, 30.0, size=size))
        comments = np.floor(likes * rng.beta(2.0, 12.0, size=size))

        z = FEATURE_SPACE.transform(np.column_stack([freshness, views, likes, comments]))
        popularity, age = _latent_plane((z - _Z_CENTER) / _Z_SCALE)
        theta = math.radians(_STEP_ANGLE_DEG[step_index])
        click_axis = math.cos(theta) * popularity + math.sin(theta) * age
        dwell_axis = -math.sin(theta) * popularity + math.cos(theta) * age
        ln_clicks = _CLICK_BASE + _CLICK_SPAN * click_axis + rng.normal(0.0, _NOISE_SIGMA, size=size)
        ln_dwell = _DWELL_BASE + _DWELL_SPAN * dwell_axis + rng.normal(0.0, _NOISE_SIGMA, size=size)
        clicks = np.round(np.exp(ln_clicks))
        dwell_ms = np.exp(ln_dwell)
        step_col = np.full(size, step_index if len(sizes) > 1 else 0, dtype=np.int64)
        blocks.append((freshness, views, likes, comments, clicks, dwell_ms, step_col))

    stacked = [np.concatenate([b[i] for b in blocks]) for i in range(7)]
    return Dataset(
        freshness=stacked[0],
        views=stacked[1],
        likes=stacked[2],
        comments=stacked[3],
        clicks=stacked[4],
        dwell_ms=stacked[5],
        time_step=stacked[6],
        provenance=f"synthetic(seed={seed}, sizes={tuple(int(s) for s in sizes)})",
    )


def split_indices(
    n_rows: int, seed: int, fractions: tuple[float, float, float] = (0.8, 0.1, 0.1)
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Shuffled train/test/validation index split."""
    if abs(sum(fractions) - 1.0) > 1e-9:
        raise ValueError("split fractions must sum to 1")
    perm = np.random.default_rng(seed).permutation(n_rows)
    n_train = int(round(fractions[0] * n_rows))
    n_test = int(round(fractions[1] * n_rows))
    return perm[:n_train], perm[n_train : n_train + n_test], perm[n_train + n_test :]


def fit_report(dataset: Dataset, k: int, seed: int = 0) -> list[dict[str, float]]:
    """Informational R^2 / MSE per objective on a held-out validation split."""
    X, Y = derive_log_features(dataset)
    train_idx, _, val_idx = split_indices(dataset.row_count, seed)
    if train_idx.size < k or val_idx.size == 0:
        raise ValueError("dataset too small for a fit report at this k")
    model = KnnSurrogate.fit(X[train_idx], Y[train_idx], k=k)
    pred, _, _ = model.predict(X[val_idx])
    report = []
    for j in range(Y.shape[1]):
        truth = Y[val_idx, j]
        resid = truth - pred[:, j]
        mse = float(np.mean(resid**2))
        denom = float(np.sum((truth - truth.mean()) ** 2))
        r2 = float(1.0 - np.sum(resid**2) / denom) if denom > 0 else 0.0
        report.append({"r2": r2, "mse": mse})
    return report
