"""Illumination patterns: random generation, enumeration, counting,
relaxation, quantization, and coverage repair.

A pattern is a binary (N_s, M) matrix; entry (n, t) = 1 means beam
position n is illuminated in slot t.  The random-search generator fills
every slot with exactly K beams and lights every beam exactly once, so
it requires the exact partition K * M = N_s; the alternating-optimization
path only requires column sums <= K plus row coverage.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import InvalidDimensions, TooLarge, Unrepairable

ENUMERATION_BOUND = 100_000


@dataclass(frozen=True)
class IlluminationPattern:
    """Binary illumination indicator matrix of shape (N_s, M)."""

    x: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x)
        if x.ndim != 2:
            raise InvalidDimensions("pattern must be a 2-D matrix")
        if not np.all((x == 0) | (x == 1)):
            raise InvalidDimensions("pattern entries must be 0 or 1")
        x = np.ascontiguousarray(x.astype(np.int64))
        x.flags.writeable = False
        object.__setattr__(self, "x", x)

    @property
    def n_beams(self) -> int:
        return self.x.shape[0]

    @property
    def m_slots(self) -> int:
        return self.x.shape[1]

    def column_sums(self) -> np.ndarray:
        return self.x.sum(axis=0)

    def row_sums(self) -> np.ndarray:
        return self.x.sum(axis=1)

    def weights(self) -> np.ndarray:
        """The indicator as float weights for the rate evaluator."""
        return self.x.astype(float)

    def to_json(self) -> str:
        return json.dumps(self.x.tolist())

    @classmethod
    def from_json(cls, text: str) -> "IlluminationPattern":
        return cls(x=np.asarray(json.loads(text)))

    def __eq__(self, other) -> bool:
        return isinstance(other, IlluminationPattern) and np.array_equal(self.x, other.x)

    def __hash__(self):
        return hash(self.x.tobytes() + bytes(str(self.x.shape), "ascii"))


@dataclass(frozen=True)
class RelaxedPattern:
    """Continuous relaxation, stacked per-slot: index n + N_s * t."""

    x_vec: np.ndarray
    n_s: int
    m: int

    def __post_init__(self):
        v = np.asarray(self.x_vec, dtype=float)
        if v.shape != (self.n_s * self.m,):
            raise InvalidDimensions("relaxed vector length must be n_s * m")
        if np.any(v < -1e-12) or np.any(v > 1 + 1e-12):
            raise InvalidDimensions("relaxed entries must lie in [0, 1]")
        v = np.clip(v, 0.0, 1.0)
        v.flags.writeable = False
        object.__setattr__(self, "x_vec", v)

    @classmethod
    def from_weights(cls, weights) -> "RelaxedPattern":
        w = np.asarray(weights, dtype=float)
        n_s, m = w.shape
        return cls(x_vec=w.T.reshape(-1), n_s=n_s, m=m)

    @classmethod
    def uniform(cls, n_s: int, k: int, m: int) -> "RelaxedPattern":
        return cls(x_vec=np.full(n_s * m, k / n_s), n_s=n_s, m=m)

    def weights(self) -> np.ndarray:
        """Reshape back to the (N_s, M) weight matrix."""
        return self.x_vec.reshape(self.m, self.n_s).T.copy()


def random_pattern(n_s: int, k: int, m: int, rng) -> IlluminationPattern:
    """One random pattern with exactly K beams per slot, each beam once.

    Slots draw without replacement from the shrinking set of not-yet-lit
    beams, so the construction needs k * m = n_s.
    """
    if k * m < n_s:
        raise InvalidDimensions(f"k*m = {k * m} cannot cover {n_s} beams")
    if k * m != n_s:
        raise InvalidDimensions(
            "random_pattern requires the exact partition k*m == n_s; "
            "see random_pattern_with_remainder for the general case"
        )
    remaining = np.arange(n_s)
    x = np.zeros((n_s, m), dtype=np.int64)
    for t in range(m):
        chosen = rng.choice(remaining, size=k, replace=False)
        x[chosen, t] = 1
        remaining = np.setdiff1d(remaining, chosen)
    return IlluminationPattern(x=x)


def random_pattern_with_remainder(n_s: int, k: int, rng) -> IlluminationPattern:
    """Random pattern when K does not divide N_s.

    Uses floor(n_s / k) full slots of K beams plus one extra slot carrying
    the remainder, so every beam is still lit exactly once.
    """
    m_full, rem = divmod(n_s, k)
    if rem == 0:
        return random_pattern(n_s, k, m_full, rng)
    remaining = np.arange(n_s)
    x = np.zeros((n_s, m_full + 1), dtype=np.int64)
    for t in range(m_full):
        chosen = rng.choice(remaining, size=k, replace=False)
        x[chosen, t] = 1
        remaining = np.setdiff1d(remaining, chosen)
    x[remaining, m_full] = 1
    return IlluminationPattern(x=x)


def _ordered_count(n_s: int, k: int, m: int) -> int:
    count = 1
    for j in range(m):
        count *= math.comb(n_s - j * k, k)
    return count


def enumerate_patterns(n_s: int, k: int, m: int) -> list:
    """All ordered patterns with K beams per slot and each beam lit once."""
    if k * m != n_s:
        raise InvalidDimensions("enumeration requires k*m == n_s")
    if _ordered_count(n_s, k, m) > ENUMERATION_BOUND:
        raise TooLarge(f"more than {ENUMERATION_BOUND} ordered patterns")

    patterns = []

    def recurse(remaining: tuple, columns: list):
        if len(columns) == m:
            x = np.zeros((n_s, m), dtype=np.int64)
            for t, beams in enumerate(columns):
                x[list(beams), t] = 1
            patterns.append(IlluminationPattern(x=x))
            return
        for beams in combinations(remaining, k):
            rest = tuple(b for b in remaining if b not in beams)
            recurse(rest, columns + [beams])

    recurse(tuple(range(n_s)), [])
    return patterns


def count_unordered_patterns(n_s: int, k: int, m: int) -> int:
    """Number of patterns up to slot reordering: prod C(n_s - j*k, k) / m!."""
    if k * m != n_s:
        raise InvalidDimensions("counting requires k*m == n_s")
    return _ordered_count(n_s, k, m) // math.factorial(m)


def quantize(relaxed: RelaxedPattern, n_s: int, k: int, m: int) -> IlluminationPattern:
    """Round the relaxation to binary and trim overfull columns.

    Rounds each entry at 0.5; any column that ends up with more than K
    ones is replaced by the K largest relaxed entries (ties broken by
    lowest beam index).
    """
    weights = relaxed.weights()
    if weights.shape != (n_s, m):
        raise InvalidDimensions("relaxed pattern shape disagrees with (n_s, m)")
    x = np.floor(weights + 0.5).astype(np.int64)
    for t in range(m):
        if x[:, t].sum() > k:
            # Stable sort on the negated values keeps the lowest beam index
            # first among ties.
            keep = np.argsort(-weights[:, t], kind="stable")[:k]
            x[:, t] = 0
            x[keep, t] = 1
    return IlluminationPattern(x=x)


def repair_coverage(pattern: IlluminationPattern, relaxed: RelaxedPattern,
                    k: int) -> IlluminationPattern:
    """Ensure every beam is lit at least once after quantization.

    Each uncovered beam goes to the slot where its relaxed value is
    largest among slots with spare capacity.  With every slot full, the
    smallest-relaxed-value entry of the target slot is displaced instead,
    restricted to rows lit elsewhere so no new hole opens.
    """
    x = pattern.x.copy()
    n_s, m = x.shape
    if k * m < n_s:
        raise Unrepairable(f"capacity k*m = {k * m} below {n_s} beams")
    weights = relaxed.weights()

    for n in range(n_s):
        if x[n].sum() > 0:
            continue
        spare = [t for t in range(m) if x[:, t].sum() < k]
        if spare:
            t_best = max(spare, key=lambda t: (weights[n, t], -t))
            x[n, t_best] = 1
            continue
        # All slots full: displace, but only rows that stay covered.
        movable = [t for t in range(m) if np.any((x[:, t] == 1) & (x.sum(axis=1) >= 2))]
        if not movable:
            raise Unrepairable("no displaceable entry found")
        t_best = max(movable, key=lambda t: (weights[n, t], -t))
        rows = [r for r in range(n_s) if x[r, t_best] == 1 and x[r].sum() >= 2]
        victim = min(rows, key=lambda r: (weights[r, t_best], r))
        x[victim, t_best] = 0
        x[n, t_best] = 1
    return IlluminationPattern(x=x)
