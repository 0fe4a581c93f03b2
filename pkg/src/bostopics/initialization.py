"""Seeded, portable randomness and k-means++ center seeding.

All randomness in a fit flows through :class:`Rng`, which splits a single
64-bit seed into independent, addressable streams:

* the center-seeding stream is PCG64 keyed by ``SeedSequence(seed,
  spawn_key=(0,))``;
* the uniform exploration draw of epoch e for the group with global
  index g is SplitMix64 applied to (seed, e, g).

Both generators are fixed, named algorithms with platform-independent
output, so identical seeds reproduce identical draws everywhere and the
draws do not depend on scheduling or worker count.
"""

from __future__ import annotations

import numpy as np

from .embeddings import EmbeddingMatrix
from .errors import DegenerateInputError, InvalidConfigError, ValidationError

_SM_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_SM_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_SM_MIX2 = np.uint64(0x94D049BB133111EB)


def _splitmix64(x: np.ndarray) -> np.ndarray:
    """SplitMix64 finalizer over uint64 arrays (wrapping arithmetic)."""
    z = x + _SM_GAMMA
    z = (z ^ (z >> np.uint64(30))) * _SM_MIX1
    z = (z ^ (z >> np.uint64(27))) * _SM_MIX2
    return z ^ (z >> np.uint64(31))


class Rng:
    """Deterministic random source for one fit, keyed by a 64-bit seed."""

    def __init__(self, seed: int):
        self.seed = int(seed) & 0xFFFFFFFFFFFFFFFF

    def init_generator(self) -> np.random.Generator:
        """PCG64 stream used by k-means++ seeding."""
        ss = np.random.SeedSequence(self.seed, spawn_key=(0,))
        return np.random.Generator(np.random.PCG64(ss))

    def exploration_uniforms(self, epoch: int, indices) -> np.ndarray:
        """Uniform [0, 1) exploration draw per unit for a given epoch.

        ``indices`` may be any integer array; element order is irrelevant
        because each draw depends only on (seed, epoch, index), which is
        what makes the E-step independent of scheduling.
        """
        units = np.asarray(indices, dtype=np.uint64)
        with np.errstate(over="ignore"):
            h = _splitmix64(np.uint64(self.seed) ^ _splitmix64(np.uint64(epoch)))
            words = _splitmix64(units ^ h)
        return words.astype(np.float64) / 2.0**64

    def exploration_uniform(self, epoch: int, index: int) -> float:
        return float(self.exploration_uniforms(epoch, [index])[0])


def kmeanspp_init(embeddings, k: int, rng: Rng) -> np.ndarray:
    """Choose k initial topic vectors from the embedding rows.

    k-means++ under cosine dissimilarity with greedy candidate selection:
    the first center is uniform; each later step samples 2 + floor(ln k)
    candidates with probability proportional to D(x)^2, where D(x) is
    1 - max cosine to the centers chosen so far, and keeps the candidate
    that minimizes the summed squared distance. The greedy step is what
    standard k-means implementations ship; plain single-draw sampling
    duplicates a cluster often enough (e.g. ~12% for five equal disjoint
    clusters) to derail the downstream fit. Chosen rows get weight
    exactly zero and cannot repeat; when every remaining weight is zero
    (duplicate-heavy input) the next center is drawn uniformly from the
    unchosen rows. Returned vectors are exact copies of embedding rows.
    """
    rows = embeddings.rows if isinstance(embeddings, EmbeddingMatrix) else None
    if rows is None:
        rows = np.ascontiguousarray(embeddings, dtype=np.float32)
    n = rows.shape[0]
    if k < 1:
        raise InvalidConfigError(f"k must be >= 1, got {k}")
    if k > n:
        raise InvalidConfigError(f"k={k} exceeds the {n} available rows")
    if k > 1 and bool(np.all(rows == rows[0])):
        raise DegenerateInputError("all embedding rows are identical")

    norms = np.linalg.norm(rows.astype(np.float64), axis=1)
    if np.any(norms == 0.0):
        raise ValidationError("zero rows are not allowed")
    unit = rows.astype(np.float64) / norms[:, None]

    gen = rng.init_generator()
    n_trials = 2 + int(np.log(k))
    chosen = [int(gen.integers(n))]
    best_dist = _clipped_distance(unit @ unit[chosen[0]])
    best_dist[chosen[0]] = 0.0
    while len(chosen) < k:
        weights = best_dist * best_dist
        cumulative = np.cumsum(weights)
        total = cumulative[-1]
        if total > 0.0:
            draws = gen.random(n_trials) * total
            candidates = np.searchsorted(cumulative, draws, side="right")
            best_idx, best_pot, best_cand_dist = -1, np.inf, None
            for cand in candidates:
                cand = int(cand)
                cand_dist = np.minimum(
                    best_dist, _clipped_distance(unit @ unit[cand])
                )
                cand_dist[cand] = 0.0
                potential = float(np.sum(cand_dist * cand_dist))
                if potential < best_pot:
                    best_idx, best_pot, best_cand_dist = cand, potential, cand_dist
            idx, best_dist = best_idx, best_cand_dist
        else:
            unchosen = np.setdiff1d(np.arange(n), chosen)
            idx = int(unchosen[gen.integers(unchosen.size)])
            best_dist = np.minimum(best_dist, _clipped_distance(unit @ unit[idx]))
            best_dist[idx] = 0.0
        chosen.append(idx)
    return rows[chosen].copy()


def _clipped_distance(cos_values: np.ndarray) -> np.ndarray:
    """Cosine dissimilarity 1 - cos, clamped into [0, 2]."""
    return 1.0 - np.clip(cos_values, -1.0, 1.0)
