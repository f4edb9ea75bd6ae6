"""Tabular credit data: ingestion, normalization, and amplitude encoding.

The pipeline is a two-step normalization. First every non-Boolean variable is
min-max scaled to [0, 1] across the dataset; then each observation's feature
vector (zero-padded to a power-of-two length) is turned into a quantum state
whose amplitudes are sqrt(feature / feature-sum). Seven credit variables plus
one zero pad fill a 3-qubit register, so the last amplitude of every encoded
sample is zero.
"""
from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field

import numpy as np

from .qsim import StateVector

CSV_COLUMNS = ("x1", "x2", "x3", "x4", "x5", "x6", "x7")
CSV_HEADER = CSV_COLUMNS + ("y",)

# x1 arrears, x2 current dues, x3 days overdue, x4 declared payment:
# continuous. x5 reliability, x6 entity evaluation, x7 promissory note:
# Boolean, exempt from min-max scaling.
DEFAULT_BOOLEAN_MASK = (False, False, False, False, True, True, True)


class CsvFormatError(ValueError):
    """Raised when a data file cannot be parsed; messages carry row numbers."""


@dataclass(frozen=True)
class RawObservation:
    """One credit-sale decision case: seven factors and a binary outcome.

    ``label`` is 0 when goods may be issued and 1 when the sale is blocked.
    """

    x1: float  # customer's arrears (currency)
    x2: float  # all current dues (currency)
    x3: float  # days of delay on the oldest overdue invoice
    x4: float  # declared but not yet posted payment (currency)
    x5: bool  # past reliability
    x6: bool  # evaluation of cooperating entities
    x7: bool  # promissory note present
    label: int

    def __post_init__(self) -> None:
        for name in ("x1", "x2", "x3", "x4"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative, got {getattr(self, name)!r}")
        if self.label not in (0, 1):
            raise ValueError(f"label must be 0 or 1, got {self.label!r}")

    def features(self) -> tuple[float, ...]:
        return (self.x1, self.x2, self.x3, self.x4,
                float(self.x5), float(self.x6), float(self.x7))


@dataclass(frozen=True)
class Dataset:
    """Feature matrix with binary labels and a per-column Boolean marker."""

    features: np.ndarray  # (n_observations, n_features) float64
    labels: np.ndarray  # (n_observations,) int
    boolean_mask: np.ndarray = field(default=None)  # (n_features,) bool

    def __post_init__(self) -> None:
        feats = np.array(self.features, dtype=float)
        labels = np.array(self.labels, dtype=int)
        if feats.ndim != 2:
            raise ValueError("features must be a 2-D matrix")
        if labels.shape != (feats.shape[0],):
            raise ValueError(
                f"labels shape {labels.shape} does not match {feats.shape[0]} observations"
            )
        if not np.all(np.isfinite(feats)):
            raise ValueError("features must be finite")
        if np.any(feats < 0):
            raise ValueError("features must be non-negative")
        if not np.all(np.isin(labels, (0, 1))):
            raise ValueError("labels must be 0 or 1")
        mask = self.boolean_mask
        if mask is None:
            mask = np.zeros(feats.shape[1], dtype=bool)
            if feats.shape[1] == len(DEFAULT_BOOLEAN_MASK):
                mask = np.array(DEFAULT_BOOLEAN_MASK, dtype=bool)
        else:
            mask = np.array(mask, dtype=bool)
            if mask.shape != (feats.shape[1],):
                raise ValueError("boolean_mask length does not match feature count")
        for a in (feats, labels, mask):
            a.flags.writeable = False
        object.__setattr__(self, "features", feats)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "boolean_mask", mask)

    @classmethod
    def from_observations(cls, observations) -> "Dataset":
        obs = list(observations)
        feats = np.array([o.features() for o in obs], dtype=float).reshape(len(obs), -1)
        labels = np.array([o.label for o in obs], dtype=int)
        return cls(feats, labels)

    @property
    def n_observations(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]


@dataclass(frozen=True)
class EncodedSample:
    """A 3-qubit amplitude-encoded observation with its label."""

    state: StateVector
    label: int
    source_index: int


def minmax_normalize(data: Dataset) -> Dataset:
    """Scale every non-Boolean variable to [0, 1] across all observations.

    Boolean variables pass through unchanged. A constant non-Boolean column
    has no scale to divide by; it maps to all zeros with a warning.
    """
    if data.n_observations < 2:
        raise ValueError("min-max normalization needs at least 2 observations")
    out = data.features.copy()
    for j in range(data.n_features):
        if data.boolean_mask[j]:
            continue
        col = out[:, j]
        lo, hi = float(col.min()), float(col.max())
        if hi == lo:
            warnings.warn(
                f"column {j + 1} is constant ({lo!r}); normalizing it to all zeros",
                stacklevel=2,
            )
            out[:, j] = 0.0
        else:
            out[:, j] = (col - lo) / (hi - lo)
    return Dataset(out, data.labels, data.boolean_mask)


def pad_features(data: Dataset, n_qubits: int) -> Dataset:
    """Append zero-valued variables until there are 2**n_qubits features."""
    target = 2 ** int(n_qubits)
    if data.n_features > target:
        raise ValueError(
            f"{data.n_features} features do not fit {n_qubits} qubits ({target} amplitudes)"
        )
    pad = target - data.n_features
    if pad == 0:
        return data
    feats = np.hstack([data.features, np.zeros((data.n_observations, pad))])
    mask = np.concatenate([data.boolean_mask, np.zeros(pad, dtype=bool)])
    return Dataset(feats, data.labels, mask)


def amplitude_encode(features) -> StateVector:
    """Encode 2**n non-negative values as state amplitudes sqrt(x_i / sum x).

    The all-zero vector has no defined encoding and is rejected.
    """
    f = np.array(features, dtype=float)
    if f.ndim != 1 or len(f) < 2 or len(f) & (len(f) - 1):
        raise ValueError(f"feature count must be a power of two >= 2, got shape {f.shape}")
    if np.any(f < 0):
        raise ValueError("features must be non-negative")
    total = float(f.sum())
    if total <= 0.0:
        raise ValueError("all-zero feature vector cannot be amplitude-encoded")
    n = int(len(f)).bit_length() - 1
    return StateVector(n, np.sqrt(f / total).astype(complex))


def encode_dataset(data: Dataset) -> list[EncodedSample]:
    """Amplitude-encode every observation of a normalized, padded dataset."""
    if data.n_features & (data.n_features - 1):
        raise ValueError("dataset must be padded to a power-of-two feature count first")
    if float(data.features.max(initial=0.0)) > 1.0 + 1e-9:
        raise ValueError("dataset must be min-max normalized before encoding")
    samples = []
    for i in range(data.n_observations):
        try:
            state = amplitude_encode(data.features[i])
        except ValueError as exc:
            raise ValueError(f"observation {i}: {exc}") from exc
        samples.append(EncodedSample(state, int(data.labels[i]), i))
    return samples


def export_encoded(samples, path) -> None:
    """Write encoded samples as a JSON array of {index, label, amplitudes}."""
    import json

    rows = [
        {
            "index": s.source_index,
            "label": s.label,
            "amplitudes": [float(a.real) for a in s.state.amplitudes],
        }
        for s in samples
    ]
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(rows, fh, indent=2)
        fh.write("\n")


def load_csv(path) -> Dataset:
    """Parse a credit data file with header x1,x2,x3,x4,x5,x6,x7,y."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CsvFormatError(f"{path}: empty file, expected header {','.join(CSV_HEADER)}")
        if tuple(h.strip() for h in header) != CSV_HEADER:
            raise CsvFormatError(
                f"{path}: bad header {header!r}, expected {','.join(CSV_HEADER)}"
            )
        observations = []
        for row_no, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(CSV_HEADER):
                raise CsvFormatError(f"{path}:{row_no}: expected {len(CSV_HEADER)} fields")
            try:
                values = [float(c) for c in row]
            except ValueError:
                raise CsvFormatError(f"{path}:{row_no}: non-numeric cell in {row!r}")
            x = values[:7]
            y = values[7]
            if y not in (0.0, 1.0):
                raise CsvFormatError(f"{path}:{row_no}: label must be 0 or 1, got {y!r}")
            for j in (4, 5, 6):
                if x[j] not in (0.0, 1.0):
                    raise CsvFormatError(
                        f"{path}:{row_no}: x{j + 1} is Boolean and must be 0 or 1, got {x[j]!r}"
                    )
            try:
                observations.append(
                    RawObservation(x[0], x[1], x[2], x[3],
                                   bool(x[4]), bool(x[5]), bool(x[6]), int(y))
                )
            except ValueError as exc:
                raise CsvFormatError(f"{path}:{row_no}: {exc}")
    if not observations:
        return Dataset(np.zeros((0, 7)), np.zeros(0, dtype=int))
    return Dataset.from_observations(observations)


def _format_cell(value: float) -> str:
    if value == int(value):
        return str(int(value))
    return repr(float(value))


def save_csv(data: Dataset, path) -> None:
    """Write a dataset in the load_csv format with stable cell formatting."""
    if data.n_features != 7:
        raise ValueError(f"CSV export requires 7 features, got {data.n_features}")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for i in range(data.n_observations):
            writer.writerow(
                [_format_cell(v) for v in data.features[i]] + [int(data.labels[i])]
            )


def risk_label(
    x1: float, x2: float, x3: float, x4: float, x5: bool, x6: bool, x7: bool,
    *,
    arrears_ratio: float = 0.2,
    max_delay_days: int = 6,
    min_mitigations: int = 2,
) -> int:
    """Deterministic sale-blocking rule used by the synthetic generator.

    Threats: arrears above ``arrears_ratio`` of current dues, or an overdue
    invoice older than ``max_delay_days``. A declared payment covering the
    arrears and each positive qualitative factor count as mitigations; at
    least ``min_mitigations`` of them offset one threat. The sale is blocked
    (label 1) when threats outweigh the offset.
    """
    threats = int(x1 > arrears_ratio * x2) + int(x3 > max_delay_days)
    mitigations = int(x4 >= x1) + int(bool(x5)) + int(bool(x6)) + int(bool(x7))
    return int(threats > (1 if mitigations >= min_mitigations else 0))


# Recurring customer profiles: (arrears-to-dues ratio band, delay-days band,
# current-dues band, probability of a declared covering payment, x5, x6, x7).
# Values within a profile jitter inside narrow bands so encoded samples form
# tight, well-separated groups; the class label is never taken from the
# profile but always recomputed from the drawn features via risk_label.
_SAFE_PROFILES = (
    ((0.00, 0.00), (0, 0), (60_000, 95_000), 0.0, 0, 1, 0),   # clean, vouched
    ((0.00, 0.00), (0, 0), (10_000, 30_000), 0.0, 0, 1, 1),   # clean, vouched + note
    ((0.03, 0.10), (0, 2), (40_000, 70_000), 0.9, 0, 0, 0),   # small arrears, covered
    ((0.00, 0.00), (3, 6), (30_000, 60_000), 0.0, 0, 1, 1),   # slightly late, vouched
    ((0.00, 0.00), (0, 0), (35_000, 55_000), 0.0, 0, 0, 1),   # note only
    ((0.35, 0.50), (0, 0), (6_000, 12_000), 1.0, 1, 0, 0),    # covered arrears, reliable
)
_RISKY_PROFILES = (
    ((0.35, 0.50), (10, 18), (30_000, 70_000), 0.0, 0, 0, 0),  # heavy arrears, late
    ((0.22, 0.30), (25, 40), (10_000, 40_000), 0.0, 0, 0, 0),  # arrears, very late
    ((0.28, 0.40), (8, 14), (50_000, 90_000), 0.0, 0, 0, 1),   # arrears + note only
    ((0.25, 0.32), (12, 20), (60_000, 90_000), 0.0, 0, 0, 0),  # large dues, late
    ((0.02, 0.08), (28, 45), (40_000, 80_000), 0.0, 0, 0, 0),  # stale small arrears
)


def generate_synthetic(seed: int, count: int) -> Dataset:
    """Draw ``count`` synthetic credit cases; labels follow ``risk_label``.

    Each row instantiates one of eleven recurring customer profiles (five of
    them risky) with narrow within-profile jitter, so the two classes form
    separated groups of similar cases. The label is always recomputed from
    the drawn features by the rule, never taken from the profile.
    Deterministic in ``seed``; x1, x2, x4 stay in [0, 100000] currency units
    and x3 in [0, 60] days.
    """
    count = int(count)
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    rng = np.random.default_rng(int(seed))
    observations = []
    for _ in range(count):
        profiles = _RISKY_PROFILES if rng.random() < 0.5 else _SAFE_PROFILES
        ratio_band, delay_band, dues_band, pay_prob, x5, x6, x7 = profiles[
            rng.integers(len(profiles))
        ]
        x2 = float(rng.uniform(*dues_band))
        x1 = float(rng.uniform(*ratio_band)) * x2
        x3 = float(rng.integers(delay_band[0], delay_band[1] + 1))
        if x1 > 0 and rng.random() < pay_prob:
            x4 = float(rng.uniform(x1, min(1.2 * x1, 100_000.0)))
        else:
            x4 = 0.0
        label = risk_label(x1, x2, x3, x4, bool(x5), bool(x6), bool(x7))
        observations.append(
            RawObservation(x1, x2, x3, x4, bool(x5), bool(x6), bool(x7), label)
        )
    return Dataset.from_observations(observations)
