"""Grouping of raw records by unique binary input vector.

Records with identical bit vectors are collected into one group each; the
per-group target vectors are then summarised into distribution parameters,
producing the derived training set that the parameter regressors consume.
Group identity is exact bit equality and group order is first appearance,
so downstream training is deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distributions import DistFamily, fit_gamma, fit_gaussian
from .errors import DapienError, EmptyDataset, RaggedFeatures


@dataclass(frozen=True)
class Sample:
    """One record: a binary feature vector and a real-valued target."""

    x: tuple[int, ...]
    y: float

    def __post_init__(self):
        bits = tuple(int(b) for b in self.x)
        if any(b not in (0, 1) for b in bits):
            raise ValueError(f"feature vector must be binary, got {self.x}")
        object.__setattr__(self, "x", bits)
        if not math.isfinite(self.y):
            raise ValueError(f"target must be finite, got {self.y}")
        object.__setattr__(self, "y", float(self.y))


@dataclass(frozen=True)
class GroupedDataset:
    """Distinct input vectors paired with all targets observed for each."""

    groups: tuple[tuple[tuple[int, ...], np.ndarray], ...]
    d: int

    def __len__(self):
        return len(self.groups)

    def sizes(self):
        return [ys.size for _, ys in self.groups]


@dataclass(frozen=True)
class DistDataset:
    """Per-unique-input distribution parameters, one row per group."""

    rows: tuple
    family: DistFamily


def group_by_unique_input(samples) -> GroupedDataset:
    """Partition samples into one group per distinct input vector.

    Group contents keep the original sample order; group order is first
    appearance.

    Raises
    ------
    EmptyDataset
        If no samples are given.
    RaggedFeatures
        If feature vectors differ in length.
    """
    samples = list(samples)
    if not samples:
        raise EmptyDataset("no samples to group")
    d = len(samples[0].x)
    buckets: dict[tuple[int, ...], list[float]] = {}
    for s in samples:
        if len(s.x) != d:
            raise RaggedFeatures(
                f"feature length {len(s.x)} differs from first sample's {d}"
            )
        buckets.setdefault(s.x, []).append(s.y)
    groups = tuple(
        (x, np.asarray(ys, dtype=np.float64)) for x, ys in buckets.items()
    )
    return GroupedDataset(groups=groups, d=d)


def build_dist_dataset(grouped: GroupedDataset, family: DistFamily) -> DistDataset:
    """Fit the chosen family to every group's targets.

    Fit errors are re-raised with the offending input vector attached.
    """
    rows = []
    for x, ys in grouped.groups:
        try:
            if family is DistFamily.GAUSSIAN:
                params = fit_gaussian(ys)
            else:
                params = fit_gamma(ys)
        except DapienError as exc:
            raise type(exc)(f"group {''.join(map(str, x))}: {exc}") from exc
        rows.append((x, params))
    return DistDataset(rows=tuple(rows), family=family)


def mean_group_size(grouped: GroupedDataset) -> float:
    """Arithmetic mean of group sizes; the degrees of freedom for t intervals."""
    sizes = grouped.sizes()
    return float(sum(sizes)) / len(sizes)
