"""Turn propagation traces into per-level probability and BBA profiles.

Receiver counts per (link type, level) are summed over the training
traces, accrued level by level to preserve propagation history, then
normalized into one probability distribution per level and mapped to a
consonant BBA.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .belief import (
    Frame,
    MassFunction,
    ProbDistribution,
    consonant_transform,
    uniform_distribution,
)
from .propagation import PropagationTrace


def count_effectives(
    traces: Sequence[PropagationTrace], levels: int, frame: Frame | None = None
) -> np.ndarray:
    """Raw receiver counts, shape (levels, frame size); row l-1 is level l."""
    if levels < 1:
        raise ValueError("levels must be >= 1")
    if frame is None:
        if not traces:
            raise ValueError("need a frame when the trace set is empty")
        frame = traces[0].frame
    counts = np.zeros((levels, len(frame)), dtype=np.int64)
    for trace in traces:
        if trace.frame != frame:
            raise ValueError("traces are defined on different frames")
        if trace.levels > levels:
            raise ValueError(f"trace has {trace.levels} levels, expected <= {levels}")
        for event in trace.events:
            counts[event.level - 1, frame.index(event.link_type)] += 1
    return counts


def accrue(raw: np.ndarray) -> np.ndarray:
    """Accrued counts: prefix sums over levels, level 1 unchanged."""
    return np.cumsum(np.asarray(raw, dtype=np.int64), axis=0)


@dataclass(frozen=True)
class LevelProfile:
    """Per-level accrued counts with their probability and BBA forms."""

    class_name: str
    frame: Frame
    levels: int
    counts: tuple[tuple[int, ...], ...]
    probs: tuple[ProbDistribution, ...]
    bbas: tuple[MassFunction, ...]

    def __post_init__(self):
        if not (len(self.counts) == len(self.probs) == len(self.bbas) == self.levels):
            raise ValueError("counts, probs and bbas must cover every level")


def to_profile(accrued: np.ndarray, frame: Frame, class_name: str) -> LevelProfile:
    """Normalize accrued counts per level; a dead level falls back to uniform.

    The uniform fallback encodes total ignorance: it maps to the vacuous
    BBA under the consonant transform.
    """
    accrued = np.asarray(accrued, dtype=np.int64)
    if accrued.ndim != 2 or accrued.shape[1] != len(frame):
        raise ValueError("accrued counts must be (levels, frame size)")
    probs = []
    for row in accrued:
        total = int(row.sum())
        if total > 0:
            probs.append(ProbDistribution(frame, tuple(v / total for v in row)))
        else:
            probs.append(uniform_distribution(frame))
    bbas = tuple(consonant_transform(p) for p in probs)
    return LevelProfile(
        class_name=class_name,
        frame=frame,
        levels=accrued.shape[0],
        counts=tuple(tuple(int(v) for v in row) for row in accrued),
        probs=tuple(probs),
        bbas=bbas,
    )


def learn_profile(
    traces: Sequence[PropagationTrace],
    levels: int,
    class_name: str,
    frame: Frame | None = None,
) -> LevelProfile:
    """Full pipeline: count, accrue, normalize, consonant-transform."""
    if frame is None and traces:
        frame = traces[0].frame
    return to_profile(accrue(count_effectives(traces, levels, frame)), frame, class_name)


def profile_to_dict(profile: LevelProfile) -> dict:
    return {
        "class_name": profile.class_name,
        "frame": list(profile.frame.elements),
        "levels": profile.levels,
        "counts": [list(row) for row in profile.counts],
        "probs": [list(p.values) for p in profile.probs],
        "bbas": [
            {str(mask): mass for mask, mass in sorted(m.masses.items())}
            for m in profile.bbas
        ],
    }


def profile_from_dict(data: dict) -> LevelProfile:
    frame = Frame(tuple(data["frame"]))
    return LevelProfile(
        class_name=data["class_name"],
        frame=frame,
        levels=int(data["levels"]),
        counts=tuple(tuple(int(v) for v in row) for row in data["counts"]),
        probs=tuple(ProbDistribution(frame, tuple(row)) for row in data["probs"]),
        bbas=tuple(
            MassFunction(frame, {int(mask): mass for mask, mass in entry.items()})
            for entry in data["bbas"]
        ),
    )


def save_profile(profile: LevelProfile, path) -> None:
    Path(path).write_text(
        json.dumps(profile_to_dict(profile), indent=2) + "\n", encoding="utf-8"
    )


def load_profile(path) -> LevelProfile:
    return profile_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
