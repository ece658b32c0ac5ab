"""Experiment harness tests: noise operator, datasets, PCC report, config."""

import math
import random

import pytest

from evispread.belief import Frame
from evispread.experiment import (
    DEFAULT_FRAME,
    ExperimentConfig,
    PccReport,
    config_from_dict,
    default_strategies,
    derive_seed,
    emit_report,
    generate_dataset,
    load_config,
    make_noisy_strategy,
    random_baseline,
    run_experiment,
    save_config,
)
from evispread.network import generate_synthetic_network
from evispread.propagation import PropagationStrategy


class ScriptedRandom:
    """Stub RNG whose random() returns scripted values (sign control)."""

    def __init__(self, values):
        self._values = list(values)

    def random(self):
        return self._values.pop(0)


UNIFORM = PropagationStrategy("u", DEFAULT_FRAME, (0.25, 0.25, 0.25, 0.25))


# ---------------------------------------------------------- noise operator

def test_zero_noise_returns_base_exactly():
    assert make_noisy_strategy(UNIFORM, 0.0, random.Random(1)) is UNIFORM


def test_multiplicative_signs_fixture():
    # signs (+, +, -, -) on a uniform base with rate 0.2:
    # (0.3, 0.3, 0.2, 0.2) already sums to one
    rng = ScriptedRandom([0.4, 0.4, 0.6, 0.6])
    noisy = make_noisy_strategy(UNIFORM, 0.2, rng, mode="multiplicative")
    assert noisy.proportions == pytest.approx((0.3, 0.3, 0.2, 0.2))


def test_multiplicative_keeps_zeros():
    base = PropagationStrategy("z", DEFAULT_FRAME, (0.0, 0.0, 0.3, 0.7))
    rng = random.Random(3)
    for _ in range(20):
        noisy = make_noisy_strategy(base, 0.4, rng, mode="multiplicative")
        assert noisy.proportions[0] == 0.0 and noisy.proportions[1] == 0.0


def test_additive_clamps_and_renormalizes():
    base = PropagationStrategy("s", DEFAULT_FRAME, (0.1, 0.1, 0.1, 0.7))
    rng = ScriptedRandom([0.9, 0.9, 0.9, 0.9])  # all minus
    noisy = make_noisy_strategy(base, 0.5, rng, mode="additive")
    # (-0.4, -0.4, -0.4, 0.2) clamps to (0, 0, 0, 0.2) -> (0, 0, 0, 1)
    assert noisy.proportions == pytest.approx((0.0, 0.0, 0.0, 1.0))


def test_all_zero_perturbation_falls_back_to_base():
    base = PropagationStrategy("s", DEFAULT_FRAME, (0.25, 0.25, 0.25, 0.25))
    rng = ScriptedRandom([0.9, 0.9, 0.9, 0.9])  # all minus at rate 1.0
    noisy = make_noisy_strategy(base, 1.0, rng, mode="multiplicative")
    assert noisy.proportions == base.proportions


def test_noise_rate_validation():
    with pytest.raises(ValueError):
        make_noisy_strategy(UNIFORM, 1.5, random.Random(0))
    with pytest.raises(ValueError):
        make_noisy_strategy(UNIFORM, 0.5, random.Random(0), mode="bogus")


# ---------------------------------------------------------------- datasets

def test_generate_dataset_contracts():
    net = generate_synthetic_network(DEFAULT_FRAME, 40, 120, seed=2)
    strategy = default_strategies()[0]
    assert generate_dataset(net, strategy, 0, "train", levels=3, noise_rate=0.1) == []
    a = generate_dataset(net, strategy, 20, "train", levels=3, noise_rate=0.2,
                         master_seed=7, repetition=1)
    b = generate_dataset(net, strategy, 20, "train", levels=3, noise_rate=0.2,
                         master_seed=7, repetition=1)
    assert a == b
    c = generate_dataset(net, strategy, 20, "train", levels=3, noise_rate=0.2,
                         master_seed=8, repetition=1)
    assert a != c
    assert all(t.levels == 3 for t in a)
    assert all(max((e.level for e in t.events), default=0) <= 3 for t in a)


def test_generate_dataset_requires_forwarding_node():
    frame = Frame(("t",))
    from evispread.network import HeteroNetwork, NodeParams

    net = HeteroNetwork(frame, {0: NodeParams()}, [])
    with pytest.raises(ValueError, match="out-degree"):
        generate_dataset(net, PropagationStrategy("s", frame, (1.0,)), 1, "train",
                         levels=1, noise_rate=0.0)


def test_derive_seed_is_stable_and_sensitive():
    assert derive_seed(1, "train", "Spam", 0, 0, 0.2) == derive_seed(1, "train", "Spam", 0, 0, 0.2)
    assert derive_seed(1, "train", "Spam", 0, 0, 0.2) != derive_seed(2, "train", "Spam", 0, 0, 0.2)
    assert derive_seed(1, "train", "Spam", 0, 0, 0.2) != derive_seed(1, "test", "Spam", 0, 0, 0.2)


# ------------------------------------------------------------------ config

def test_config_json_roundtrip(tmp_path):
    config = ExperimentConfig(noise_rates=(0.0, 0.3), repetitions=2, master_seed=9)
    path = tmp_path / "config.json"
    save_config(config, path)
    assert load_config(path) == config


def test_config_validation():
    with pytest.raises(ValueError, match="two strategies"):
        ExperimentConfig(strategies=default_strategies()[:1])
    with pytest.raises(ValueError, match="ascending"):
        ExperimentConfig(noise_rates=(0.3, 0.1))
    with pytest.raises(ValueError, match=">= 1"):
        ExperimentConfig(test_size=0)
    with pytest.raises(ValueError, match="noise_mode"):
        ExperimentConfig(noise_mode="secret")
    with pytest.raises(ValueError, match="unknown config fields"):
        config_from_dict({"frame": list(DEFAULT_FRAME.elements), "bogus": 1})


# ------------------------------------------------------------------ report

def make_cell_report(noise, classifier, level, mean, ci, reps):
    # symmetric +/- c values give exactly the requested mean and CI
    c = ci * math.sqrt(reps - 1) / 1.96
    values = tuple(mean + c if i % 2 == 0 else mean - c for i in range(reps))
    return PccReport(
        noise_rates=(noise,), levels=level, repetitions=reps,
        per_rep={(noise, classifier, level): values},
    )


def test_report_mean_and_ci():
    report = make_cell_report(0.2, "bba", 3, 70.7, 4.33, 10)
    assert report.mean(0.2, "bba", 3) == pytest.approx(70.7)
    assert report.ci_halfwidth(0.2, "bba", 3) == pytest.approx(4.33, abs=1e-9)


def test_ci_with_single_repetition_is_zero():
    report = PccReport(noise_rates=(0.0,), levels=1, repetitions=1,
                       per_rep={(0.0, "prob", 1): (88.0,)})
    assert report.ci_halfwidth(0.0, "prob", 1) == 0.0


def test_emit_report_single_cell_fixture(tmp_path):
    report = make_cell_report(0.2, "bba", 3, 70.7, 4.33, 10)
    path = tmp_path / "report.csv"
    emit_report(report, path)
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines == [
        "noise_rate,classifier,level,mean_pcc,ci95_halfwidth,repetitions",
        "0.2000,bba,3,70.7000,4.3300,10",
    ]


def test_emit_empty_report_is_header_only(tmp_path):
    report = PccReport(noise_rates=(), levels=0, repetitions=0, per_rep={})
    path = tmp_path / "empty.csv"
    emit_report(report, path)
    assert path.read_text(encoding="utf-8") == (
        "noise_rate,classifier,level,mean_pcc,ci95_halfwidth,repetitions\n"
    )


def test_emit_report_is_deterministic(tmp_path):
    config = small_config()
    report = run_experiment(config)
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    emit_report(report, p1)
    emit_report(report, p2)
    assert p1.read_bytes() == p2.read_bytes()


# ------------------------------------------------------------- experiment

def small_config(**overrides):
    defaults = dict(
        noise_rates=(0.0, 0.3),
        train_size=12,
        test_size=12,
        repetitions=2,
        master_seed=5,
        network_nodes=40,
        network_edges=140,
        network_active=12,
        network_seed=1,
    )
    defaults.update(overrides)
    return ExperimentConfig(**defaults)


def test_run_experiment_shape_and_bounds():
    report = run_experiment(small_config())
    cells = list(report.cells())
    assert len(cells) == 2 * 2 * 3  # noise x classifier x level
    for cell in cells:
        values = report.pccs(*cell)
        assert len(values) == 2
        assert all(0.0 <= v <= 100.0 for v in values)
        assert report.mean(*cell) == pytest.approx(sum(values) / len(values))


def test_run_experiment_deterministic_end_to_end(tmp_path):
    r1 = run_experiment(small_config())
    r2 = run_experiment(small_config())
    assert r1 == r2
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    emit_report(r1, a)
    emit_report(r2, b)
    assert a.read_bytes() == b.read_bytes()


def test_separated_strategies_classify_perfectly_at_zero_noise(tmp_path):
    # complete graph, types dealt round-robin per node: every source can
    # forward over every type, so maximally separated strategies never mix
    frame = DEFAULT_FRAME
    path = tmp_path / "dense.csv"
    rows = ["source,target,link_type"]
    n = 16
    for s in range(n):
        targets = [t for t in range(n) if t != s]
        for j, t in enumerate(targets):
            rows.append(f"{s},{t},{frame.elements[(j + s) % 4]}")
    path.write_text("\n".join(rows) + "\n", encoding="utf-8")
    strategies = (
        PropagationStrategy("left", frame, (1.0, 0.0, 0.0, 0.0)),
        PropagationStrategy("right", frame, (0.0, 0.0, 0.0, 1.0)),
    )
    config = small_config(
        strategies=strategies, noise_rates=(0.0,), network_path=str(path),
    )
    report = run_experiment(config)
    for classifier in ("prob", "bba"):
        for level in (1, 2, 3):
            assert report.mean(0.0, classifier, level) == pytest.approx(100.0)


def test_random_baseline_converges_to_uniform_rate():
    pccs = random_baseline(3, 100, 200, seed=4)
    mean = sum(pccs) / len(pccs)
    # sigma of the mean for Binomial(100, 1/3) percentages over 200 reps
    sigma = 100 * math.sqrt((1 / 3) * (2 / 3) / 100) / math.sqrt(200)
    assert abs(mean - 100 / 3) <= 3 * sigma
