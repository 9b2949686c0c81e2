"""Top-N recommenders over binary interaction data.

Five families share one contract: rank unseen items per user, descending
score with ties broken by ascending item index, and return the top `cutoff`.

- Rnd: seeded uniform shuffle of the unseen items.
- Pop: global interaction counts, identical ordering for every user.
- UB:  s(u,i) = sum over the k nearest users v of w(u,v)^q * R[v,i].
- IB:  s(u,i) = sum over the k nearest items j of w(i,j)^q * R[u,j].
- MF:  dot products of implicit-feedback ALS factors.

The neighborhood models drop candidates whose score is exactly zero (no
positive-similarity neighbor reaches them); Rnd, Pop and MF rank every
unseen item. Score accumulation always walks neighbors in ascending index
order so results do not depend on sparse storage order.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from scipy import sparse

from .als import ALSConfig, FactorModel, fit_als
from .dataset import Dataset
from .errors import ConfigError, EmptyDatasetError
from .seeds import substream
from .similarity import SimilarityKind, neighborhood_matrix

RECOMMENDER_KINDS = ("Rnd", "Pop", "UB", "IB", "MF")


@dataclass(frozen=True)
class RecommenderConfig:
    kind: str
    neighbors: int = 50
    similarity: SimilarityKind = SimilarityKind.PEARSON
    exponent: int = 1
    seed: int = 0
    als: Optional[ALSConfig] = None

    def validate(self) -> None:
        if self.kind not in RECOMMENDER_KINDS:
            raise ConfigError(
                f"unknown recommender {self.kind!r}; expected one of: {', '.join(RECOMMENDER_KINDS)}"
            )
        if self.seed < 0:
            raise ConfigError("seed must be non-negative")
        if self.kind in ("UB", "IB"):
            if self.neighbors < 1:
                raise ConfigError("neighbors must be at least 1")
            if self.exponent < 1:
                raise ConfigError("similarity exponent must be at least 1")
        if self.kind == "MF":
            if self.als is None:
                raise ConfigError("MF configuration requires ALS settings")
            self.als.validate()

    def params_label(self) -> str:
        """Stable human-readable parameter summary used in result rows."""
        if self.kind == "Rnd":
            return f"seed={self.seed}"
        if self.kind == "Pop":
            return "-"
        if self.kind in ("UB", "IB"):
            return f"k={self.neighbors};sim={self.similarity.value};q={self.exponent}"
        assert self.als is not None
        a = self.als
        return (
            f"factors={a.factors};lambda={_fmt_float(a.regularization)};iters={a.iterations};"
            f"alpha={_fmt_float(a.alpha)};scale={_fmt_float(a.init_scale)};seed={a.seed}"
        )

    def reseeded(self, seed: int) -> "RecommenderConfig":
        if self.kind == "MF":
            assert self.als is not None
            return replace(self, seed=seed, als=self.als.reseeded(seed))
        return replace(self, seed=seed)


def _fmt_float(x: float) -> str:
    return f"{x:g}"


def _integer_power(data: np.ndarray, q: int) -> np.ndarray:
    # left-associated repeated multiplication: exactly reproducible, unlike
    # libm pow which may differ across call paths by an ulp
    out = data.copy()
    for _ in range(q - 1):
        out *= data
    return out


def parse_params_label(label: str) -> dict[str, str]:
    """Invert params_label into a key/value dict ('-' gives an empty dict)."""
    out: dict[str, str] = {}
    if label.strip() == "-":
        return out
    for part in label.split(";"):
        if "=" not in part:
            raise ValueError(f"malformed params field {label!r}")
        key, value = part.split("=", 1)
        out[key.strip()] = value.strip()
    return out


@dataclass(frozen=True)
class RecommendationList:
    user: int
    items: np.ndarray
    scores: np.ndarray
    cutoff: int

    def __len__(self) -> int:
        return int(self.items.size)


class Recommender:
    kind: str = "?"

    def __init__(self, cfg: RecommenderConfig):
        cfg.validate()
        if cfg.kind != self.kind:
            raise ConfigError(f"configuration kind {cfg.kind!r} does not match {self.kind!r}")
        self.cfg = cfg
        self.ds: Optional[Dataset] = None

    def fit(self, ds: Dataset) -> "Recommender":
        if ds.n_users == 0 or ds.n_items == 0 or ds.n_interactions == 0:
            raise EmptyDatasetError("cannot fit a recommender on an empty dataset")
        self.ds = ds
        self._fit(ds)
        return self

    def _fit(self, ds: Dataset) -> None:  # pragma: no cover - overridden
        raise NotImplementedError

    def _scores(self, user: int) -> tuple[np.ndarray, bool]:
        """Dense per-item scores and whether zero scores are rankable."""
        raise NotImplementedError

    def recommend(self, user: int, cutoff: int) -> RecommendationList:
        ds = self._fitted()
        if not 0 <= user < ds.n_users:
            raise ValueError(f"user index {user} out of range")
        if cutoff < 1:
            raise ValueError("cutoff must be at least 1")
        scores, rank_zeros = self._scores(user)
        unseen = np.ones(ds.n_items, dtype=bool)
        unseen[ds.profile(user)] = False
        cand = np.flatnonzero(unseen if rank_zeros else (unseen & (scores > 0)))
        order = np.lexsort((cand, -scores[cand]))[:cutoff]
        chosen = cand[order]
        return RecommendationList(
            user=user, items=chosen, scores=scores[chosen].astype(np.float64), cutoff=cutoff
        )

    def recommend_all(self, cutoff: int) -> list[RecommendationList]:
        return [self.recommend(u, cutoff) for u in range(self._fitted().n_users)]

    def _fitted(self) -> Dataset:
        if self.ds is None:
            raise ValueError("recommender is not fitted")
        return self.ds


class RandomRecommender(Recommender):
    """Seeded uniform shuffle of each user's unseen items.

    Scores are (m - rank)/m over the m candidates so that prefixes agree
    across cutoffs; the stream is keyed by (seed, user), making results
    independent of recommendation order.
    """

    kind = "Rnd"

    def _fit(self, ds: Dataset) -> None:
        pass

    def _scores(self, user: int) -> tuple[np.ndarray, bool]:
        ds = self._fitted()
        unseen = np.ones(ds.n_items, dtype=bool)
        unseen[ds.profile(user)] = False
        cand = np.flatnonzero(unseen)
        scores = np.zeros(ds.n_items)
        if cand.size:
            rng = substream(self.cfg.seed, user)
            shuffled = cand[rng.permutation(cand.size)]
            scores[shuffled] = (cand.size - np.arange(cand.size)) / cand.size
        return scores, False  # zeros are exactly the seen items


class PopularityRecommender(Recommender):
    """Ranks unseen items by their global interaction count."""

    kind = "Pop"

    def _fit(self, ds: Dataset) -> None:
        self._counts = ds.item_interaction_counts().astype(np.float64)

    def _scores(self, user: int) -> tuple[np.ndarray, bool]:
        return self._counts, True


class UserBasedRecommender(Recommender):
    """k-nearest-neighbor scoring over user similarities."""

    kind = "UB"

    def _fit(self, ds: Dataset) -> None:
        weights = neighborhood_matrix(ds, "users", self.cfg.neighbors, self.cfg.similarity)
        weights.data = _integer_power(weights.data, self.cfg.exponent)
        self._weights = weights  # csr: row u -> neighbors v, ascending v

    def _scores(self, user: int) -> tuple[np.ndarray, bool]:
        ds = self._fitted()
        w = self._weights
        scores = np.zeros(ds.n_items)
        lo, hi = w.indptr[user], w.indptr[user + 1]
        for v, wt in zip(w.indices[lo:hi], w.data[lo:hi]):
            scores[ds.profile(int(v))] += wt
        return scores, False

    def score(self, user: int, item: int) -> float:
        ds = self._fitted()
        if not 0 <= item < ds.n_items:
            raise ValueError(f"item index {item} out of range")
        w = self._weights
        lo, hi = w.indptr[user], w.indptr[user + 1]
        total = 0.0
        for v, wt in zip(w.indices[lo:hi], w.data[lo:hi]):
            prof = ds.profile(int(v))
            pos = np.searchsorted(prof, item)
            if pos < prof.size and prof[pos] == item:
                total += wt
        return total


class ItemBasedRecommender(Recommender):
    """k-nearest-neighbor scoring over item similarities."""

    kind = "IB"

    def _fit(self, ds: Dataset) -> None:
        weights = neighborhood_matrix(ds, "items", self.cfg.neighbors, self.cfg.similarity)
        weights.data = _integer_power(weights.data, self.cfg.exponent)
        self._by_anchor = weights  # csr: row i -> neighbor items j
        self._by_member = weights.tocsc()  # column j -> anchors i scored via j

    def _scores(self, user: int) -> tuple[np.ndarray, bool]:
        ds = self._fitted()
        col = self._by_member
        scores = np.zeros(ds.n_items)
        for j in ds.profile(user):  # ascending j keeps accumulation canonical
            lo, hi = col.indptr[j], col.indptr[j + 1]
            scores[col.indices[lo:hi]] += col.data[lo:hi]
        return scores, False

    def score(self, user: int, item: int) -> float:
        ds = self._fitted()
        if not 0 <= item < ds.n_items:
            raise ValueError(f"item index {item} out of range")
        prof = ds.profile(user)
        w = self._by_anchor
        lo, hi = w.indptr[item], w.indptr[item + 1]
        total = 0.0
        for j, wt in zip(w.indices[lo:hi], w.data[lo:hi]):
            pos = np.searchsorted(prof, j)
            if pos < prof.size and prof[pos] == j:
                total += wt
        return total


class FactorRecommender(Recommender):
    """Scores by dot products of ALS user and item factors."""

    kind = "MF"

    model: FactorModel

    def _fit(self, ds: Dataset) -> None:
        assert self.cfg.als is not None
        self.model = fit_als(ds, self.cfg.als)

    def _scores(self, user: int) -> tuple[np.ndarray, bool]:
        scores = self.model.user_factors[user] @ self.model.item_factors.T
        return scores, True

    def score(self, user: int, item: int) -> float:
        ds = self._fitted()
        if not 0 <= user < ds.n_users:
            raise ValueError(f"user index {user} out of range")
        if not 0 <= item < ds.n_items:
            raise ValueError(f"item index {item} out of range")
        return float(self.model.user_factors[user] @ self.model.item_factors[item])


_CLASSES = {
    "Rnd": RandomRecommender,
    "Pop": PopularityRecommender,
    "UB": UserBasedRecommender,
    "IB": ItemBasedRecommender,
    "MF": FactorRecommender,
}


def build_recommender(cfg: RecommenderConfig) -> Recommender:
    cfg.validate()
    return _CLASSES[cfg.kind](cfg)


def fit_recommender(ds: Dataset, cfg: RecommenderConfig) -> Recommender:
    return build_recommender(cfg).fit(ds)
