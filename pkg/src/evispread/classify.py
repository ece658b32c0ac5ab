"""Nearest-profile classification of a propagation trace, per level.

The trace is profiled exactly like a training set of one, then compared
to each strategy profile level by level: Euclidean distance between the
probability distributions (probabilistic classifier) and Jousselme
distance between the BBAs (evidential classifier).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .belief import (
    SimilarityMatrix,
    build_similarity_matrix,
    euclidean_distance,
    jousselme_distance,
)
from .learning import LevelProfile, learn_profile
from .propagation import PropagationTrace

TIE_TOL = 1e-12


@dataclass(frozen=True)
class ClassificationResult:
    """Per-level decisions of both classifiers, with the full distance table."""

    strategies: tuple[str, ...]
    levels: int
    prob_classes: tuple[str, ...]
    bba_classes: tuple[str, ...]
    prob_distances: tuple[tuple[float, ...], ...]  # [level][strategy]
    bba_distances: tuple[tuple[float, ...], ...]
    prob_ties: tuple[bool, ...]
    bba_ties: tuple[bool, ...]

    def to_dict(self) -> dict:
        per_level = []
        for l in range(self.levels):
            per_level.append(
                {
                    "level": l + 1,
                    "prob_class": self.prob_classes[l],
                    "bba_class": self.bba_classes[l],
                    "prob_distances": dict(zip(self.strategies, self.prob_distances[l])),
                    "bba_distances": dict(zip(self.strategies, self.bba_distances[l])),
                    "prob_tie": self.prob_ties[l],
                    "bba_tie": self.bba_ties[l],
                }
            )
        return {"strategies": list(self.strategies), "levels": self.levels,
                "per_level": per_level}


def _argmin(distances: Sequence[float]) -> tuple[int, bool]:
    """Index of the minimum; ties within TIE_TOL flagged, first index wins."""
    best = min(distances)
    winners = [i for i, d in enumerate(distances) if d <= best + TIE_TOL]
    return winners[0], len(winners) > 1


def classify(
    trace: PropagationTrace,
    models: Sequence[LevelProfile],
    similarity: SimilarityMatrix | None = None,
) -> ClassificationResult:
    """Classify ``trace`` against >= 2 strategy profiles, per level."""
    if len(models) < 2:
        raise ValueError("need at least two strategy profiles")
    frame = models[0].frame
    levels = models[0].levels
    for model in models:
        if model.frame != frame or model.levels != levels:
            raise ValueError("profiles disagree on frame or level count")
    if trace.frame != frame:
        raise ValueError("trace and profiles are defined on different frames")
    if trace.levels != levels:
        raise ValueError(f"trace has {trace.levels} levels, profiles have {levels}")
    if similarity is None:
        similarity = build_similarity_matrix(frame)
    elif similarity.frame != frame:
        raise ValueError("similarity matrix is defined on a different frame")

    query = learn_profile([trace], levels, "query")
    prob_classes, bba_classes = [], []
    prob_distances, bba_distances = [], []
    prob_ties, bba_ties = [], []
    for l in range(levels):
        d_prob = tuple(
            euclidean_distance(query.probs[l], model.probs[l]) for model in models
        )
        d_bba = tuple(
            jousselme_distance(query.bbas[l], model.bbas[l], similarity)
            for model in models
        )
        i_prob, tie_prob = _argmin(d_prob)
        i_bba, tie_bba = _argmin(d_bba)
        prob_classes.append(models[i_prob].class_name)
        bba_classes.append(models[i_bba].class_name)
        prob_distances.append(d_prob)
        bba_distances.append(d_bba)
        prob_ties.append(tie_prob)
        bba_ties.append(tie_bba)
    return ClassificationResult(
        strategies=tuple(model.class_name for model in models),
        levels=levels,
        prob_classes=tuple(prob_classes),
        bba_classes=tuple(bba_classes),
        prob_distances=tuple(prob_distances),
        bba_distances=tuple(bba_distances),
        prob_ties=tuple(prob_ties),
        bba_ties=tuple(bba_ties),
    )
