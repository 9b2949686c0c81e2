"""Ratio-controlled profile rebuilding.

Every user profile is downsampled so that the fraction of misinformative
items equals a target ratio exactly, in integer arithmetic. The target is an
exact rational p/q; the largest profile satisfying it keeps m*p misinformative
and m*(q-p) neutral items with m = min(avail_mis // p, avail_neu // (q-p)).
Users for which no such m >= 1 exists are dropped. The special unconstrained
ratio passes every profile through untouched.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .dataset import Dataset
from .errors import ConfigError, EmptyDatasetError
from .seeds import substream


@dataclass(frozen=True)
class RatioSpec:
    """Target misinformation ratio; value None means no filtering."""

    value: Optional[Fraction] = None

    @classmethod
    def unconstrained(cls) -> "RatioSpec":
        return cls(None)

    @classmethod
    def parse(cls, text: str) -> "RatioSpec":
        token = text.strip().lower()
        if token in ("none", "unconstrained", ""):
            return cls(None)
        try:
            value = Fraction(token)
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"cannot parse ratio {text!r}: {exc}") from exc
        if not 0 < value < 1:
            raise ConfigError(f"ratio must lie strictly between 0 and 1, got {text!r}")
        return cls(value)

    @property
    def is_unconstrained(self) -> bool:
        return self.value is None

    def label(self) -> str:
        if self.value is None:
            return "none"
        return f"{self.value.numerator}/{self.value.denominator}"


@dataclass(frozen=True)
class ProfileCounts:
    """Target item counts for one rebuilt profile."""

    misinfo: int
    neutral: int

    @property
    def total(self) -> int:
        return self.misinfo + self.neutral


@dataclass(frozen=True)
class UserProfile:
    """One user's interacted items, partitioned by label (sorted indices)."""

    user: int
    misinfo_items: np.ndarray
    neutral_items: np.ndarray

    @property
    def size(self) -> int:
        return len(self.misinfo_items) + len(self.neutral_items)


def resolve_profile_counts(
    misinfo_avail: int, neutral_avail: int, ratio: Fraction
) -> Optional[ProfileCounts]:
    """Largest (misinfo, neutral) pair with misinfo/(misinfo+neutral) == ratio
    exactly and both counts at least 1; None when unattainable."""
    if not 0 < ratio < 1:
        raise ValueError(f"ratio must lie strictly in (0, 1), got {ratio}")
    if misinfo_avail < 0 or neutral_avail < 0:
        raise ValueError("availabilities must be non-negative")
    p, q = ratio.numerator, ratio.denominator
    m = min(misinfo_avail // p, neutral_avail // (q - p))
    if m == 0:
        return None
    return ProfileCounts(misinfo=m * p, neutral=m * (q - p))


def profile_of(ds: Dataset, u: int) -> UserProfile:
    items = ds.profile(u)
    mask = ds.item_misinfo[items]
    return UserProfile(user=u, misinfo_items=items[mask], neutral_items=items[~mask])


def generate_profile(
    profile: UserProfile, ratio: RatioSpec, seed: int
) -> Optional[UserProfile]:
    """Rebuild one profile at the target ratio; None means the user is dropped.

    Sampling is uniform without replacement within each partition, from a
    substream keyed by (seed, user index).
    """
    if ratio.is_unconstrained:
        return profile
    counts = resolve_profile_counts(
        len(profile.misinfo_items), len(profile.neutral_items), ratio.value
    )
    if counts is None:
        return None
    rng = substream(seed, profile.user)
    kept_mis = rng.choice(profile.misinfo_items, size=counts.misinfo, replace=False)
    kept_neu = rng.choice(profile.neutral_items, size=counts.neutral, replace=False)
    return UserProfile(
        user=profile.user,
        misinfo_items=np.sort(kept_mis),
        neutral_items=np.sort(kept_neu),
    )


def build_ratio_dataset(ds: Dataset, ratio: RatioSpec, seed: int) -> Dataset:
    """Apply generate_profile to every user; drop unattainable users, drop items
    left with zero interactions, and re-index deterministically."""
    if ratio.is_unconstrained:
        return ds

    survivors: list[tuple[int, np.ndarray]] = []
    for u in range(ds.n_users):
        rebuilt = generate_profile(profile_of(ds, u), ratio, seed)
        if rebuilt is None:
            continue
        items = np.concatenate([rebuilt.misinfo_items, rebuilt.neutral_items])
        survivors.append((u, np.sort(items)))
    if not survivors:
        raise EmptyDatasetError(
            f"ratio {ratio.label()} drops every user in the dataset"
        )

    kept_items = np.unique(np.concatenate([items for _, items in survivors]))
    item_remap = {int(old): new for new, old in enumerate(kept_items)}
    user_ids = tuple(ds.user_ids[u] for u, _ in survivors)
    item_ids = tuple(ds.item_ids[i] for i in kept_items)

    rows: list[np.ndarray] = []
    cols: list[np.ndarray] = []
    for new_u, (_, items) in enumerate(survivors):
        rows.append(np.full(len(items), new_u, dtype=np.int64))
        cols.append(np.array([item_remap[int(i)] for i in items], dtype=np.int64))

    return Dataset.from_indices(
        user_ids,
        item_ids,
        ds.item_misinfo[kept_items],
        np.concatenate(rows),
        np.concatenate(cols),
    )
