"""Misinformation exposure metrics over recommendation lists.

Three list-level measures at a cutoff N:

- count share: labeled items in the top N divided by N (the divisor stays
  N even when fewer than N items were returned);
- ratio difference: labeled share of the top min(len, N) recommended items
  minus the labeled share of the user's training profile (undefined for
  users with empty profiles, who are skipped by the aggregate);
- concentration spread: one minus the Gini index of how recommendations
  distribute over the labeled catalog, computed on a probability vector
  with one slot per labeled item plus a single pooled slot for all
  unlabeled recommendations. Higher means exposure is spread more evenly
  across distinct labeled items.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .dataset import Dataset
from .errors import UndefinedMetricError
from .recommenders import RecommendationList


def misinformation_count(items: np.ndarray, misinfo_mask: np.ndarray, cutoff: int) -> float:
    """Share of the top-`cutoff` slots holding labeled items, out of `cutoff`."""
    if cutoff < 1:
        raise ValueError("cutoff must be at least 1")
    top = np.asarray(items, dtype=np.int64)[:cutoff]
    return float(np.count_nonzero(misinfo_mask[top])) / cutoff


def misinformation_ratio_difference(
    profile_items: np.ndarray,
    rec_items: np.ndarray,
    misinfo_mask: np.ndarray,
    cutoff: int,
) -> Optional[float]:
    """Labeled share of the recommendations minus that of the profile.

    Returns None when the profile is empty (the profile share is undefined).
    An empty recommendation list contributes a recommendation share of 0.
    """
    if cutoff < 1:
        raise ValueError("cutoff must be at least 1")
    profile = np.asarray(profile_items, dtype=np.int64)
    if profile.size == 0:
        return None
    top = np.asarray(rec_items, dtype=np.int64)[:cutoff]
    rec_share = float(np.count_nonzero(misinfo_mask[top])) / top.size if top.size else 0.0
    prof_share = float(np.count_nonzero(misinfo_mask[profile])) / profile.size
    return rec_share - prof_share


def misinformation_gini(
    lists: Iterable[np.ndarray], misinfo_mask: np.ndarray, cutoff: int
) -> float:
    """One minus the Gini index of recommendation mass over labeled items.

    Mass is counted per labeled catalog item, with every unlabeled
    recommendation pooled into one extra slot, so the vector has
    (labeled catalog size + 1) entries. Raises when the catalog has no
    labeled items or no recommendations were made at all.
    """
    if cutoff < 1:
        raise ValueError("cutoff must be at least 1")
    mask = np.asarray(misinfo_mask, dtype=bool)
    labeled = np.flatnonzero(mask)
    if labeled.size == 0:
        raise UndefinedMetricError("no labeled items in the catalog")
    slot_of = np.full(mask.size, -1, dtype=np.int64)
    slot_of[labeled] = np.arange(labeled.size)

    counts = np.zeros(labeled.size + 1, dtype=np.float64)
    for items in lists:
        top = np.asarray(items, dtype=np.int64)[:cutoff]
        if top.size == 0:
            continue
        hits = mask[top]
        np.add.at(counts, slot_of[top[hits]], 1.0)
        counts[-1] += float(np.count_nonzero(~hits))
    total = counts.sum()
    if total == 0:
        raise UndefinedMetricError("no recommendations to measure concentration on")

    p = np.sort(counts / total)
    n = p.size  # labeled catalog + pooled slot, so always >= 2
    ranks = np.arange(1, n + 1, dtype=np.float64)
    gini = float(np.sum((2.0 * ranks - n - 1.0) * p) / (n - 1))
    return 1.0 - gini


@dataclass(frozen=True)
class MetricReport:
    cutoff: int
    mc: float
    mrd: float
    mg: float
    per_user_mc: np.ndarray  # one entry per evaluated list
    per_user_mrd: np.ndarray  # only users with non-empty profiles


def aggregate_report(ds: Dataset, lists: Sequence[RecommendationList], cutoff: int) -> MetricReport:
    """Mean metrics over the given users' lists at one cutoff.

    Every list counts toward the count share; the ratio difference averages
    only users whose training profile is non-empty. Raises when `lists` is
    empty or when the concentration metric is undefined.
    """
    if not lists:
        raise UndefinedMetricError("no recommendation lists to aggregate")
    mask = ds.item_misinfo
    mc_values = []
    mrd_values = []
    for lst in lists:
        mc_values.append(misinformation_count(lst.items, mask, cutoff))
        mrd = misinformation_ratio_difference(ds.profile(lst.user), lst.items, mask, cutoff)
        if mrd is not None:
            mrd_values.append(mrd)
    if not mrd_values:
        raise UndefinedMetricError("every evaluated user has an empty profile")
    mg = misinformation_gini((lst.items for lst in lists), mask, cutoff)
    per_mc = np.asarray(mc_values, dtype=np.float64)
    per_mrd = np.asarray(mrd_values, dtype=np.float64)
    return MetricReport(
        cutoff=cutoff,
        mc=float(per_mc.mean()),
        mrd=float(per_mrd.mean()),
        mg=mg,
        per_user_mc=per_mc,
        per_user_mrd=per_mrd,
    )
