"""Belief-function machinery on a finite frame of link types.

Subsets of the frame are encoded as integer bitmasks (element i of the
frame corresponds to bit i), so a mass function is a sparse map from
bitmask to mass. Everything here is an immutable value; all functions
are pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping

import numpy as np

SUM_TOL = 1e-9
MAX_FRAME_SIZE = 20


@dataclass(frozen=True)
class Frame:
    """Ordered set of link-type labels. Order fixes the bitmask encoding."""

    elements: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))
        if len(self.elements) < 1:
            raise ValueError("frame needs at least one element")
        if any(not isinstance(e, str) or not e for e in self.elements):
            raise ValueError("frame labels must be non-empty strings")
        if len(set(self.elements)) != len(self.elements):
            raise ValueError("frame labels must be unique")

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, label: str) -> bool:
        return label in self.elements

    def index(self, label: str) -> int:
        try:
            return self.elements.index(label)
        except ValueError:
            raise ValueError(f"{label!r} is not in frame {self.elements}") from None

    @property
    def full_mask(self) -> int:
        return (1 << len(self.elements)) - 1

    def mask_of(self, labels: Iterable[str]) -> int:
        """Bitmask of the subset containing the given labels."""
        mask = 0
        for label in labels:
            mask |= 1 << self.index(label)
        return mask

    def labels_of(self, mask: int) -> tuple[str, ...]:
        """Labels of the subset encoded by ``mask``, in frame order."""
        if not 0 <= mask <= self.full_mask:
            raise ValueError(f"mask {mask} out of range for frame of size {len(self)}")
        return tuple(e for i, e in enumerate(self.elements) if mask >> i & 1)


@dataclass(frozen=True)
class ProbDistribution:
    """Probability distribution over the frame's elements."""

    frame: Frame
    values: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if len(self.values) != len(self.frame):
            raise ValueError("one value per frame element required")
        if any(v < 0.0 or v > 1.0 for v in self.values):
            raise ValueError("probabilities must lie in [0, 1]")
        if abs(sum(self.values) - 1.0) > SUM_TOL:
            raise ValueError(f"probabilities sum to {sum(self.values)}, expected 1")

    def value(self, label: str) -> float:
        return self.values[self.frame.index(label)]


def uniform_distribution(frame: Frame) -> ProbDistribution:
    n = len(frame)
    return ProbDistribution(frame, (1.0 / n,) * n)


@dataclass(frozen=True)
class MassFunction:
    """Basic belief assignment: masses on subsets (bitmasks) of the frame.

    Only focal sets are stored; entries equal to zero are dropped at
    construction. The constructor checks structure (masks in range) but
    not the sum-to-one invariant -- use :func:`validate_mass` for that,
    so that malformed assignments can be built and diagnosed.
    """

    frame: Frame
    masses: Mapping[int, float]

    def __post_init__(self):
        cleaned = {}
        for mask, mass in self.masses.items():
            mask = int(mask)
            if not 0 <= mask <= self.frame.full_mask:
                raise ValueError(
                    f"mask {mask} out of range for frame of size {len(self.frame)}"
                )
            if mass != 0.0:
                cleaned[mask] = float(mass)
        object.__setattr__(self, "masses", MappingProxyType(cleaned))

    def mass(self, mask: int) -> float:
        return self.masses.get(mask, 0.0)

    def focal_sets(self) -> tuple[int, ...]:
        return tuple(sorted(self.masses))


def vacuous_mass(frame: Frame) -> MassFunction:
    return MassFunction(frame, {frame.full_mask: 1.0})


def validate_mass(m: MassFunction) -> list[str]:
    """Check the mass-function invariants; return the violations (empty = ok)."""
    violations = []
    for mask, mass in m.masses.items():
        if mass < 0.0 or mass > 1.0:
            violations.append(
                f"mass {mass} on {m.frame.labels_of(mask)} outside [0, 1]"
            )
    total = math.fsum(m.masses.values())
    if abs(total - 1.0) > SUM_TOL:
        violations.append(f"masses sum to {total}, expected 1")
    if m.mass(0) != 0.0:
        violations.append(f"empty set carries mass {m.mass(0)}")
    return violations


def consonant_transform(p: ProbDistribution) -> MassFunction:
    """Build the consonant BBA whose pignistic transform is ``p``.

    Elements are sorted by descending probability (ties broken by frame
    order, which provably does not change the masses); the k-th nested
    set receives k times the gap between the k-th and (k+1)-th sorted
    probabilities.
    """
    n = len(p.frame)
    order = sorted(range(n), key=lambda i: -p.values[i])
    masses = {}
    mask = 0
    for k, i in enumerate(order):
        mask |= 1 << i
        nxt = p.values[order[k + 1]] if k + 1 < n else 0.0
        gap = (k + 1) * (p.values[i] - nxt)
        if gap > 0.0:
            masses[mask] = gap
    return MassFunction(p.frame, masses)


def pignistic(m: MassFunction) -> ProbDistribution:
    """Pignistic transform BetP: split each focal set's mass among its elements."""
    if m.mass(0) != 0.0:
        raise ValueError("mass function assigns mass to the empty set")
    n = len(m.frame)
    values = [0.0] * n
    for mask, mass in m.masses.items():
        share = mass / mask.bit_count()
        for i in range(n):
            if mask >> i & 1:
                values[i] += share
    return ProbDistribution(m.frame, tuple(values))


def euclidean_distance(p1: ProbDistribution, p2: ProbDistribution) -> float:
    """Euclidean distance between two distributions on the same frame."""
    if p1.frame != p2.frame:
        raise ValueError("distributions are defined on different frames")
    return math.sqrt(sum((a - b) ** 2 for a, b in zip(p1.values, p2.values)))


@dataclass(frozen=True)
class SimilarityMatrix:
    """Jaccard set-similarity matrix over all 2^n subsets of a frame."""

    frame: Frame
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        size = 1 << len(self.frame)
        if self.entries.shape != (size, size):
            raise ValueError(f"expected a {size}x{size} matrix")
        self.entries.setflags(write=False)


def build_similarity_matrix(frame: Frame) -> SimilarityMatrix:
    """Jaccard similarity |A∩B| / |A∪B| between all subset pairs.

    Convention for the empty set: similarity 1 with itself, 0 with any
    non-empty set (inert here, since no BBA assigns mass to the empty set).
    """
    n = len(frame)
    if n > MAX_FRAME_SIZE:
        raise ValueError(f"frame of size {n} exceeds the supported maximum {MAX_FRAME_SIZE}")
    size = 1 << n
    popcount = [mask.bit_count() for mask in range(size)]
    entries = np.empty((size, size))
    for a in range(size):
        for b in range(a, size):
            union = popcount[a | b]
            sim = popcount[a & b] / union if union else 1.0
            entries[a, b] = sim
            entries[b, a] = sim
    return SimilarityMatrix(frame, entries)


def jousselme_distance(
    m1: MassFunction, m2: MassFunction, similarity: SimilarityMatrix
) -> float:
    """Jousselme distance sqrt(0.5 * d^T D d) with d = m1 - m2 over subsets."""
    if m1.frame != m2.frame:
        raise ValueError("mass functions are defined on different frames")
    if similarity.frame != m1.frame:
        raise ValueError("similarity matrix is defined on a different frame")
    masks = sorted(set(m1.masses) | set(m2.masses))
    diff = [m1.mass(a) - m2.mass(a) for a in masks]
    entries = similarity.entries
    quad = 0.0
    for i, a in enumerate(masks):
        row = entries[a]
        di = diff[i]
        for j, b in enumerate(masks):
            quad += di * diff[j] * row[b]
    # rounding can push an exact zero slightly negative
    return math.sqrt(0.5 * quad) if quad > 0.0 else 0.0
