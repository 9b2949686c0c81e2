"""Similarities between binary interaction vectors, and top-k neighborhoods.

All three measures depend only on the two set sizes, the intersection size,
and (for the correlation) the size of the interaction universe, so the
batched path works off sparse intersection counts. Pairs with an empty
intersection can never score positive under any of the measures (for the
binary correlation the numerator is then -|A||B| <= 0), which is why the
sparse co-occurrence structure covers every candidate neighbor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import sparse

from .dataset import Dataset
from .errors import ConfigError


class SimilarityKind(Enum):
    JACCARD = "jac"
    COSINE = "cos"
    PEARSON = "pearson"

    @classmethod
    def parse(cls, token: str) -> "SimilarityKind":
        try:
            return cls(token.strip().lower())
        except ValueError:
            valid = ", ".join(kind.value for kind in cls)
            raise ConfigError(f"unknown similarity {token!r}; expected one of: {valid}") from None


def similarity(a, b, kind: SimilarityKind, universe_size: int) -> float:
    """Similarity between two sets of interaction indices.

    Degenerate 0/0 cases (either side empty, or constant vectors under the
    correlation) evaluate to 0.
    """
    set_a, set_b = set(map(int, a)), set(map(int, b))
    if universe_size < 1:
        raise ValueError("universe_size must be at least 1")
    if set_a | set_b:
        if max(set_a | set_b) >= universe_size or min(set_a | set_b) < 0:
            raise ValueError("index out of range of the universe")
    na, nb = len(set_a), len(set_b)
    c = len(set_a & set_b)
    if kind is SimilarityKind.JACCARD:
        union = na + nb - c
        return c / union if union else 0.0
    if kind is SimilarityKind.COSINE:
        return c / math.sqrt(na * nb) if na and nb else 0.0
    n = universe_size
    den_sq = na * (n - na) * nb * (n - nb)
    if den_sq == 0:
        return 0.0
    return (n * c - na * nb) / math.sqrt(den_sq)


@dataclass(frozen=True)
class Neighborhood:
    """Top-k neighbors of one anchor, strongest first, ties by lower index."""

    anchor: int
    indices: np.ndarray
    weights: np.ndarray


def _axis_view(ds: Dataset, axis: str) -> tuple[sparse.csr_matrix, int]:
    if axis == "users":
        return ds.matrix.astype(np.int64), ds.n_items
    if axis == "items":
        return ds.matrix.T.tocsr().astype(np.int64), ds.n_users
    raise ValueError(f"axis must be 'users' or 'items', got {axis!r}")


def _weights_from_counts(
    counts: np.ndarray,
    size_anchor: int,
    sizes: np.ndarray,
    universe: int,
    kind: SimilarityKind,
) -> np.ndarray:
    c = counts.astype(np.float64)
    other = sizes.astype(np.float64)
    na = float(size_anchor)
    if kind is SimilarityKind.JACCARD:
        union = na + other - c
        with np.errstate(divide="ignore", invalid="ignore"):
            w = np.where(union > 0, c / union, 0.0)
        return w
    if kind is SimilarityKind.COSINE:
        with np.errstate(divide="ignore", invalid="ignore"):
            w = np.where((na > 0) & (other > 0), c / np.sqrt(na * other), 0.0)
        return w
    n = float(universe)
    den_sq = na * (n - na) * other * (n - other)
    with np.errstate(divide="ignore", invalid="ignore"):
        w = np.where(den_sq > 0, (n * c - na * other) / np.sqrt(den_sq), 0.0)
    return w


def _rank_row(
    anchor: int, cols: np.ndarray, weights: np.ndarray, k: int
) -> tuple[np.ndarray, np.ndarray]:
    keep = (weights > 0) & (cols != anchor)
    cols, weights = cols[keep], weights[keep]
    order = np.lexsort((cols, -weights))[:k]
    return cols[order], weights[order]


def top_k_neighbors(ds: Dataset, axis: str, anchor: int, k: int, kind: SimilarityKind) -> Neighborhood:
    """Strict top-k positive-similarity neighbors of `anchor` along `axis`.

    The anchor itself and non-positive similarities are excluded; equal
    weights rank by ascending index. Fewer than k may remain.
    """
    mat, universe = _axis_view(ds, axis)
    if not 0 <= anchor < mat.shape[0]:
        raise ValueError(f"anchor {anchor} out of range for axis {axis!r}")
    if k < 1:
        raise ValueError("k must be at least 1")
    sizes = np.diff(mat.indptr)
    inter = (mat @ mat[anchor].T).tocoo()
    cols, counts = inter.row, inter.data
    weights = _weights_from_counts(counts, int(sizes[anchor]), sizes[cols], universe, kind)
    top_idx, top_w = _rank_row(anchor, cols, weights, k)
    return Neighborhood(anchor=anchor, indices=top_idx, weights=top_w)


def neighborhood_matrix(ds: Dataset, axis: str, k: int, kind: SimilarityKind) -> sparse.csr_matrix:
    """All top-k neighborhoods along `axis` as a sparse weight matrix.

    Row a holds the weights of a's neighbors; each row of the result carries
    at most k nonzeros and matches `top_k_neighbors(ds, axis, a, k, kind)`.
    """
    mat, universe = _axis_view(ds, axis)
    if k < 1:
        raise ValueError("k must be at least 1")
    sizes = np.diff(mat.indptr)
    inter = (mat @ mat.T).tocsr()
    rows: list[np.ndarray] = []
    cols: list[np.ndarray] = []
    data: list[np.ndarray] = []
    for anchor in range(mat.shape[0]):
        lo, hi = inter.indptr[anchor], inter.indptr[anchor + 1]
        cand = inter.indices[lo:hi]
        counts = inter.data[lo:hi]
        weights = _weights_from_counts(counts, int(sizes[anchor]), sizes[cand], universe, kind)
        top_idx, top_w = _rank_row(anchor, cand, weights, k)
        rows.append(np.full(top_idx.size, anchor, dtype=np.int64))
        cols.append(top_idx)
        data.append(top_w)
    n = mat.shape[0]
    out = sparse.csr_matrix(
        (np.concatenate(data) if data else np.empty(0),
         (np.concatenate(rows) if rows else np.empty(0, dtype=np.int64),
          np.concatenate(cols) if cols else np.empty(0, dtype=np.int64))),
        shape=(n, n),
    )
    out.sort_indices()
    return out
