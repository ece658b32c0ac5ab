"""Experiment harness: noisy strategies, dataset generation, PCC curves.

One experiment sweeps a grid of noise rates, repeating the whole
train/test cycle several times: per repetition and noise rate it learns
one profile per strategy from freshly simulated traces, classifies a
fresh test set with both classifiers, and records the percentage of
correctly classified traces (PCC) per propagation level. Everything is
driven by seeds derived from the master seed, so a config reproduces
its report byte for byte.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from .belief import Frame, build_similarity_matrix
from .classify import classify
from .learning import learn_profile
from .network import HeteroNetwork, generate_synthetic_network, load_edge_list
from .propagation import PropagationStrategy, PropagationTrace, simulate

DEFAULT_FRAME = Frame(("Professional", "Familial", "Friendly", "Undefined"))

# Class-to-link-type affinities: spam rides mostly undefined links,
# professional and familial messages favor their namesake links.
DEFAULT_STRATEGY_PROPORTIONS = (
    ("Spam", (0.1, 0.1, 0.1, 0.7)),
    ("Professional", (0.7, 0.1, 0.1, 0.1)),
    ("Familial", (0.1, 0.6, 0.2, 0.1)),
)

DEFAULT_NOISE_RATES = (0.0, 0.1, 0.2, 0.3, 0.4, 0.5)

CLASSIFIERS = ("prob", "bba")

NOISE_MODES = ("additive", "multiplicative")


def default_strategies(frame: Frame = DEFAULT_FRAME) -> tuple[PropagationStrategy, ...]:
    return tuple(
        PropagationStrategy(name, frame, props)
        for name, props in DEFAULT_STRATEGY_PROPORTIONS
    )


@dataclass(frozen=True)
class ExperimentConfig:
    """Full experiment specification; mirrors the JSON config file."""

    frame: Frame = DEFAULT_FRAME
    strategies: tuple[PropagationStrategy, ...] = field(default_factory=default_strategies)
    noise_rates: tuple[float, ...] = DEFAULT_NOISE_RATES
    levels: int = 3
    train_size: int = 100
    test_size: int = 100
    repetitions: int = 10
    master_seed: int = 0
    noise_mode: str = "multiplicative"
    noisy_test: bool = True
    # network source: a file path, or a synthetic graph spec when no path
    network_path: str | None = None
    network_params_path: str | None = None
    network_nodes: int = 97
    network_edges: int = 350
    network_active: int = 30
    network_core_bias: float = 0.65
    network_seed: int = 1

    def __post_init__(self):
        object.__setattr__(self, "noise_rates", tuple(float(r) for r in self.noise_rates))
        object.__setattr__(self, "strategies", tuple(self.strategies))
        if len(self.strategies) < 2:
            raise ValueError("need at least two strategies")
        for strategy in self.strategies:
            if strategy.frame != self.frame:
                raise ValueError("strategy frame does not match the experiment frame")
        if any(not 0.0 <= r <= 1.0 for r in self.noise_rates):
            raise ValueError("noise rates must lie in [0, 1]")
        if list(self.noise_rates) != sorted(self.noise_rates):
            raise ValueError("noise rates must be sorted ascending")
        if min(self.levels, self.train_size, self.test_size, self.repetitions) < 1:
            raise ValueError("levels, train_size, test_size and repetitions must be >= 1")
        if self.noise_mode not in NOISE_MODES:
            raise ValueError(f"noise_mode must be one of {NOISE_MODES}")

    def load_network(self) -> HeteroNetwork:
        if self.network_path is not None:
            return load_edge_list(
                self.network_path,
                self.frame,
                params_path=self.network_params_path,
                params_seed=self.network_seed,
            )
        return generate_synthetic_network(
            self.frame,
            self.network_nodes,
            self.network_edges,
            seed=self.network_seed,
            active_count=self.network_active,
            core_bias=self.network_core_bias,
        )

    def to_dict(self) -> dict:
        return {
            "frame": list(self.frame.elements),
            "strategies": [
                {"name": s.name, "proportions": list(s.proportions)}
                for s in self.strategies
            ],
            "noise_rates": list(self.noise_rates),
            "levels": self.levels,
            "train_size": self.train_size,
            "test_size": self.test_size,
            "repetitions": self.repetitions,
            "master_seed": self.master_seed,
            "noise_mode": self.noise_mode,
            "noisy_test": self.noisy_test,
            "network_path": self.network_path,
            "network_params_path": self.network_params_path,
            "network_nodes": self.network_nodes,
            "network_edges": self.network_edges,
            "network_active": self.network_active,
            "network_core_bias": self.network_core_bias,
            "network_seed": self.network_seed,
        }


def config_from_dict(data: Mapping) -> ExperimentConfig:
    data = dict(data)
    frame = Frame(tuple(data.pop("frame", DEFAULT_FRAME.elements)))
    raw_strategies = data.pop("strategies", None)
    if raw_strategies is None:
        strategies = default_strategies(frame)
    else:
        strategies = tuple(
            PropagationStrategy(s["name"], frame, tuple(s["proportions"]))
            for s in raw_strategies
        )
    known = {
        "noise_rates", "levels", "train_size", "test_size", "repetitions",
        "master_seed", "noise_mode", "noisy_test", "network_path",
        "network_params_path", "network_nodes", "network_edges",
        "network_active", "network_core_bias", "network_seed",
    }
    unknown = set(data) - known
    if unknown:
        raise ValueError(f"unknown config fields: {sorted(unknown)}")
    return ExperimentConfig(frame=frame, strategies=strategies, **data)


def load_config(path) -> ExperimentConfig:
    return config_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def save_config(config: ExperimentConfig, path) -> None:
    Path(path).write_text(
        json.dumps(config.to_dict(), indent=2) + "\n", encoding="utf-8"
    )


def derive_seed(*parts) -> int:
    """Stable 63-bit seed from a tuple of primitives (never Python's hash)."""
    digest = hashlib.sha256("|".join(repr(p) for p in parts).encode()).digest()
    return int.from_bytes(digest[:8], "big") >> 1


def make_noisy_strategy(
    base: PropagationStrategy,
    noise_rate: float,
    rng: random.Random,
    mode: str = "multiplicative",
) -> PropagationStrategy:
    """Perturb each proportion by an independent +/- noise term.

    Multiplicative mode scales each proportion by (1 +/- noise_rate);
    additive mode shifts it by +/- noise_rate. The result is clamped to
    [0, 1] and renormalized; if everything clamps to zero the base is
    returned unchanged. Zero noise returns the base exactly.
    """
    if not 0.0 <= noise_rate <= 1.0:
        raise ValueError("noise_rate must lie in [0, 1]")
    if mode not in NOISE_MODES:
        raise ValueError(f"noise mode must be one of {NOISE_MODES}")
    if noise_rate == 0.0:
        return base
    perturbed = []
    for p in base.proportions:
        sign = 1.0 if rng.random() < 0.5 else -1.0
        if mode == "multiplicative":
            value = p + sign * noise_rate * p
        else:
            value = p + sign * noise_rate
        perturbed.append(min(1.0, max(0.0, value)))
    total = sum(perturbed)
    if total <= 0.0:
        return base
    return PropagationStrategy(
        base.name, base.frame, tuple(v / total for v in perturbed)
    )


def eligible_sources(net: HeteroNetwork) -> tuple[int, ...]:
    """Nodes a spread can start from: out-degree at least one."""
    return tuple(n for n in net.node_ids() if net.out_degree(n) > 0)


def _make_trace(
    net: HeteroNetwork,
    sources: Sequence[int],
    strategy: PropagationStrategy,
    index: int,
    role: str,
    *,
    levels: int,
    noise_rate: float,
    noise_mode: str,
    master_seed: int,
    repetition: int,
) -> PropagationTrace:
    child = derive_seed(master_seed, role, strategy.name, index, repetition, noise_rate)
    rng = random.Random(child)
    noisy = make_noisy_strategy(strategy, noise_rate, rng, noise_mode)
    source = sources[rng.randrange(len(sources))]
    return simulate(net, source, noisy, levels, rng)


def generate_dataset(
    net: HeteroNetwork,
    strategy: PropagationStrategy,
    count: int,
    role: str,
    *,
    levels: int,
    noise_rate: float,
    noise_mode: str = "multiplicative",
    master_seed: int = 0,
    repetition: int = 0,
) -> list[PropagationTrace]:
    """Simulate ``count`` traces of one strategy, each with fresh noise.

    Every trace gets its own seed derived from (master seed, role,
    strategy, index, repetition, noise rate), an independently perturbed
    strategy, and a source drawn uniformly from nodes that can forward.
    """
    sources = eligible_sources(net)
    if not sources:
        raise ValueError("network has no node with out-degree >= 1")
    return [
        _make_trace(
            net, sources, strategy, index, role,
            levels=levels, noise_rate=noise_rate, noise_mode=noise_mode,
            master_seed=master_seed, repetition=repetition,
        )
        for index in range(count)
    ]


@dataclass(frozen=True)
class PccReport:
    """Mean PCC and 95% confidence half-width per (noise, classifier, level)."""

    noise_rates: tuple[float, ...]
    levels: int
    repetitions: int
    per_rep: Mapping[tuple[float, str, int], tuple[float, ...]]

    def cells(self):
        """Present cells in deterministic order: noise, classifier, level."""
        return sorted(
            self.per_rep, key=lambda key: (key[0], CLASSIFIERS.index(key[1]), key[2])
        )

    def pccs(self, noise: float, classifier: str, level: int) -> tuple[float, ...]:
        return self.per_rep[noise, classifier, level]

    def mean(self, noise: float, classifier: str, level: int) -> float:
        values = self.pccs(noise, classifier, level)
        return sum(values) / len(values)

    def ci_halfwidth(self, noise: float, classifier: str, level: int) -> float:
        values = self.pccs(noise, classifier, level)
        n = len(values)
        if n < 2:
            return 0.0
        mean = sum(values) / n
        var = sum((v - mean) ** 2 for v in values) / (n - 1)
        return 1.96 * math.sqrt(var) / math.sqrt(n)


def run_experiment(config: ExperimentConfig, progress=None) -> PccReport:
    """Full train/classify sweep over noise rates and repetitions.

    Per repetition and noise rate: learn one profile per strategy from a
    fresh training set, draw test labels uniformly over strategies,
    simulate and classify each test trace, and score both classifiers
    per level.
    """
    net = config.load_network()
    sources = eligible_sources(net)
    if not sources:
        raise ValueError("network has no node with out-degree >= 1")
    similarity = build_similarity_matrix(config.frame)
    levels = config.levels
    per_rep: dict[tuple[float, str, int], list[float]] = {
        (noise, classifier, level): []
        for noise in config.noise_rates
        for classifier in CLASSIFIERS
        for level in range(1, levels + 1)
    }
    for rep in range(config.repetitions):
        for noise in config.noise_rates:
            models = [
                learn_profile(
                    generate_dataset(
                        net, strategy, config.train_size, "train",
                        levels=levels, noise_rate=noise, noise_mode=config.noise_mode,
                        master_seed=config.master_seed, repetition=rep,
                    ),
                    levels,
                    strategy.name,
                )
                for strategy in config.strategies
            ]
            label_rng = random.Random(
                derive_seed(config.master_seed, "test-labels", rep, noise)
            )
            labels = [
                label_rng.randrange(len(config.strategies))
                for _ in range(config.test_size)
            ]
            test_noise = noise if config.noisy_test else 0.0
            correct = {
                (classifier, level): 0
                for classifier in CLASSIFIERS
                for level in range(1, levels + 1)
            }
            for index, label in enumerate(labels):
                strategy = config.strategies[label]
                trace = _make_trace(
                    net, sources, strategy, index, "test",
                    levels=levels, noise_rate=test_noise, noise_mode=config.noise_mode,
                    master_seed=config.master_seed, repetition=rep,
                )
                result = classify(trace, models, similarity)
                for level in range(1, levels + 1):
                    if result.prob_classes[level - 1] == strategy.name:
                        correct["prob", level] += 1
                    if result.bba_classes[level - 1] == strategy.name:
                        correct["bba", level] += 1
            for classifier in CLASSIFIERS:
                for level in range(1, levels + 1):
                    pcc = 100.0 * correct[classifier, level] / config.test_size
                    per_rep[noise, classifier, level].append(pcc)
            if progress is not None:
                progress(rep, noise)
    return PccReport(
        noise_rates=config.noise_rates,
        levels=levels,
        repetitions=config.repetitions,
        per_rep={key: tuple(values) for key, values in per_rep.items()},
    )


REPORT_HEADER = ["noise_rate", "classifier", "level", "mean_pcc", "ci95_halfwidth",
                 "repetitions"]


def emit_report(report: PccReport, path) -> None:
    """Write the PCC report CSV: one row per (noise, classifier, level) cell."""
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(REPORT_HEADER)
        for noise, classifier, level in report.cells():
            writer.writerow(
                [
                    f"{noise:.4f}",
                    classifier,
                    level,
                    f"{report.mean(noise, classifier, level):.4f}",
                    f"{report.ci_halfwidth(noise, classifier, level):.4f}",
                    report.repetitions,
                ]
            )


def random_baseline(
    n_strategies: int, test_size: int, repetitions: int, seed: int = 0
) -> list[float]:
    """Per-repetition PCC of a classifier that guesses labels uniformly."""
    rng = random.Random(derive_seed(seed, "random-baseline"))
    pccs = []
    for _ in range(repetitions):
        correct = sum(
            rng.randrange(n_strategies) == rng.randrange(n_strategies)
            for _ in range(test_size)
        )
        pccs.append(100.0 * correct / test_size)
    return pccs
