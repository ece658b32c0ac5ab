"""Seeded cascade simulation of a message spreading over typed links.

A node forwards at most once, in the iteration after it first receives
the message; the trace records each receiver's first receipt together
with the link type it arrived over and its level (number of links from
the source).
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

from .belief import Frame, SUM_TOL
from .network import HeteroNetwork

TRACE_HEADER = ["receiver", "sender", "link_type", "level"]


@dataclass(frozen=True)
class PropagationStrategy:
    """A message class's split of forwarding effort across link types."""

    name: str
    frame: Frame
    proportions: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "proportions", tuple(float(v) for v in self.proportions))
        if not self.name:
            raise ValueError("strategy name must be non-empty")
        if len(self.proportions) != len(self.frame):
            raise ValueError("one proportion per frame element required")
        if any(v < 0.0 or v > 1.0 for v in self.proportions):
            raise ValueError("proportions must lie in [0, 1]")
        if abs(sum(self.proportions) - 1.0) > SUM_TOL:
            raise ValueError(f"proportions sum to {sum(self.proportions)}, expected 1")

    def proportion(self, link_type: str) -> float:
        return self.proportions[self.frame.index(link_type)]


class TraceEvent(NamedTuple):
    receiver: int
    sender: int
    link_type: str
    level: int


@dataclass(frozen=True)
class PropagationTrace:
    """Record of one simulated spread: first receipts only, level-annotated."""

    frame: Frame
    source: int
    levels: int
    events: tuple[TraceEvent, ...]

    def __post_init__(self):
        object.__setattr__(self, "events", tuple(TraceEvent(*e) for e in self.events))
        if self.levels < 1:
            raise ValueError("levels must be >= 1")
        level_of = {self.source: 0}
        for event in self.events:
            if not 1 <= event.level <= self.levels:
                raise ValueError(f"event level {event.level} outside 1..{self.levels}")
            if event.receiver in level_of:
                raise ValueError(f"node {event.receiver} received more than once")
            if event.link_type not in self.frame:
                raise ValueError(f"unknown link type {event.link_type!r}")
            if level_of.get(event.sender) != event.level - 1:
                raise ValueError(
                    f"sender {event.sender} of {event} was not first reached "
                    f"at level {event.level - 1}"
                )
            level_of[event.receiver] = event.level

    def receivers(self) -> frozenset[int]:
        return frozenset(e.receiver for e in self.events)


def _round_half_up(value: float) -> int:
    return math.floor(value + 0.5)


def simulate(
    net: HeteroNetwork,
    source: int,
    strategy: PropagationStrategy,
    iterations: int,
    seed: int | random.Random | None = 0,
) -> PropagationTrace:
    """Run the cascade for ``iterations`` rounds from ``source``.

    Each frontier node first draws whether it relays at all (Bernoulli
    on its relay probability); if it does, it forwards over each link
    type to round(type_out_degree * tendency * proportion) not-yet-
    reached neighbors of that type, chosen uniformly without
    replacement. Identical inputs and seed give identical traces.
    """
    if source not in net:
        raise ValueError(f"unknown source node {source}")
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    if strategy.frame != net.frame:
        raise ValueError("strategy and network are defined on different frames")
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)

    reached = {source}
    frontier = [source]
    events: list[TraceEvent] = []
    for level in range(1, iterations + 1):
        next_frontier: list[int] = []
        for node in frontier:
            params = net.params(node)
            if rng.random() >= params.relay_probability:
                continue
            for i, link_type in enumerate(net.frame):
                neighbors = net.out_neighbors(node, link_type)
                count = _round_half_up(
                    len(neighbors) * params.tendency * strategy.proportions[i]
                )
                if count <= 0:
                    continue
                fresh = [v for v in neighbors if v not in reached]
                if not fresh:
                    continue
                for receiver in rng.sample(fresh, min(count, len(fresh))):
                    events.append(TraceEvent(receiver, node, link_type, level))
                    reached.add(receiver)
                    next_frontier.append(receiver)
        frontier = sorted(next_frontier)
    return PropagationTrace(net.frame, source, iterations, tuple(events))


def trace_level_counts(
    trace: PropagationTrace, levels: int | None = None
) -> dict[tuple[str, int], int]:
    """Number of receivers per (link type, level), zero-filled over the grid."""
    if levels is None:
        levels = trace.levels
    counts = {
        (link_type, level): 0
        for link_type in trace.frame
        for level in range(1, levels + 1)
    }
    for event in trace.events:
        counts[event.link_type, event.level] += 1
    return counts


def save_trace(
    trace: PropagationTrace,
    csv_path,
    seed: int | None = None,
    strategy_name: str = "",
) -> None:
    """Write a trace CSV plus its JSON sidecar (same path, .json suffix)."""
    csv_path = Path(csv_path)
    lines = [",".join(TRACE_HEADER)]
    lines += [f"{e.receiver},{e.sender},{e.link_type},{e.level}" for e in trace.events]
    csv_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    sidecar = {
        "source": trace.source,
        "iterations": trace.levels,
        "seed": seed,
        "strategy_name": strategy_name,
        "frame": list(trace.frame.elements),
    }
    csv_path.with_suffix(".json").write_text(
        json.dumps(sidecar, indent=2) + "\n", encoding="utf-8"
    )


def load_trace(csv_path, frame: Frame | None = None) -> PropagationTrace:
    """Read a trace CSV and its sidecar back into a trace."""
    csv_path = Path(csv_path)
    sidecar = json.loads(csv_path.with_suffix(".json").read_text(encoding="utf-8"))
    if frame is None:
        frame = Frame(tuple(sidecar["frame"]))
    events = []
    lines = csv_path.read_text(encoding="utf-8").splitlines()
    if not lines or lines[0].split(",") != TRACE_HEADER:
        raise ValueError(f"{csv_path}: expected header {','.join(TRACE_HEADER)!r}")
    for lineno, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        fields = line.split(",")
        if len(fields) != 4:
            raise ValueError(f"{csv_path}: line {lineno}: expected 4 fields")
        try:
            events.append(
                TraceEvent(int(fields[0]), int(fields[1]), fields[2], int(fields[3]))
            )
        except ValueError as exc:
            raise ValueError(f"{csv_path}: line {lineno}: {exc}") from None
    return PropagationTrace(frame, sidecar["source"], sidecar["iterations"], tuple(events))
