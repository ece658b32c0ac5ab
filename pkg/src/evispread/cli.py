"""Command-line interface.

Subcommands: generate-network, metrics, simulate, learn, classify,
experiment. Exit codes: 0 success, 1 input or validation error, 2 I/O
error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from .belief import Frame
from .classify import classify
from .experiment import (
    ExperimentConfig,
    emit_report,
    load_config,
    run_experiment,
    DEFAULT_FRAME,
)
from .learning import learn_profile, load_profile, save_profile
from .network import (
    assign_random_link_types,
    compute_metrics,
    generate_synthetic_network,
    load_edge_list,
    load_untyped_edge_list,
    save_edge_list,
    save_node_params,
)
from .propagation import PropagationStrategy, load_trace, save_trace, simulate

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_IO = 2


def _parse_frame(text: str) -> Frame:
    return Frame(tuple(label.strip() for label in text.split(",")))


def _parse_weights(text: str) -> list[float]:
    return [float(w) for w in text.split(",")]


def _load_strategy(path, frame: Frame | None = None) -> PropagationStrategy:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if frame is None:
        frame = Frame(tuple(data["frame"]))
    return PropagationStrategy(data["name"], frame, tuple(data["proportions"]))


def _say(args, message: str) -> None:
    if not getattr(args, "quiet", False):
        print(message)


def cmd_generate_network(args) -> int:
    frame = _parse_frame(args.frame)
    weights = _parse_weights(args.weights) if args.weights else None
    if args.edges:
        pairs = load_untyped_edge_list(args.edges)
        net = assign_random_link_types(pairs, frame, weights, seed=args.seed)
    else:
        net = generate_synthetic_network(
            frame, args.nodes, args.num_edges, seed=args.seed, weights=weights
        )
    save_edge_list(net, args.out)
    if args.params_out:
        save_node_params(net, args.params_out)
    _say(args, f"wrote {net.node_count} nodes / {net.edge_count} edges to {args.out}")
    return EXIT_OK


def cmd_metrics(args) -> int:
    frame = _parse_frame(args.frame)
    net = load_edge_list(
        args.network, frame, params_path=args.params, params_seed=args.params_seed
    )
    metrics = compute_metrics(net)
    payload = json.dumps(metrics.to_dict(), indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(payload, encoding="utf-8")
        _say(args, f"wrote metrics to {args.out}")
    else:
        print(payload, end="")
    return EXIT_OK


def cmd_simulate(args) -> int:
    frame = _parse_frame(args.frame)
    net = load_edge_list(
        args.network, frame, params_path=args.params, params_seed=args.params_seed
    )
    strategy = _load_strategy(args.strategy, frame)
    trace = simulate(net, args.source, strategy, args.iterations, seed=args.seed)
    save_trace(trace, args.out, seed=args.seed, strategy_name=strategy.name)
    _say(args, f"simulated {len(trace.events)} receipts from node {args.source}")
    return EXIT_OK


def cmd_learn(args) -> int:
    frame = _parse_frame(args.frame)
    traces = [load_trace(path, frame) for path in args.traces]
    profile = learn_profile(traces, args.levels, args.name, frame=frame)
    save_profile(profile, args.out)
    _say(args, f"learned profile {args.name!r} from {len(traces)} traces")
    return EXIT_OK


def cmd_classify(args) -> int:
    models = [load_profile(path) for path in args.profiles]
    if not models:
        raise ValueError("need at least one profile")
    trace = load_trace(args.trace, models[0].frame)
    result = classify(trace, models)
    payload = json.dumps(result.to_dict(), indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(payload, encoding="utf-8")
        _say(args, f"wrote classification to {args.out}")
    else:
        print(payload, end="")
    return EXIT_OK


def cmd_experiment(args) -> int:
    config = load_config(args.config) if args.config else ExperimentConfig()
    if args.seed is not None:
        config = replace(config, master_seed=args.seed)
    report = run_experiment(config)
    emit_report(report, args.out)
    _say(args, f"wrote report to {args.out}")
    if not args.no_figures:
        from .plots import render_report_figures

        figures_dir = args.figures_dir or Path(args.out).parent
        for path in render_report_figures(report, figures_dir):
            _say(args, f"wrote figure {path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="evispread",
        description="Simulate typed message spreads and classify them by shape.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    frame_default = ",".join(DEFAULT_FRAME.elements)

    p = sub.add_parser("generate-network", help="type untyped edges or synthesize a graph")
    p.add_argument("--edges", help="untyped edge-list CSV (source,target)")
    p.add_argument("--nodes", type=int, default=97, help="synthetic node count")
    p.add_argument("--num-edges", type=int, default=350, help="synthetic edge count")
    p.add_argument("--frame", default=frame_default)
    p.add_argument("--weights", help="comma-separated per-type weights")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="typed edge-list CSV to write")
    p.add_argument("--params-out", help="also write the drawn node params CSV")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_generate_network)

    p = sub.add_parser("metrics", help="structural metrics of a network CSV")
    p.add_argument("--network", required=True)
    p.add_argument("--frame", default=frame_default)
    p.add_argument("--params", help="node-params CSV")
    p.add_argument("--params-seed", type=int, default=0)
    p.add_argument("--out", help="metrics JSON (stdout when omitted)")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("simulate", help="simulate one spread, write trace CSV + sidecar")
    p.add_argument("--network", required=True)
    p.add_argument("--frame", default=frame_default)
    p.add_argument("--params", help="node-params CSV")
    p.add_argument("--params-seed", type=int, default=0)
    p.add_argument("--strategy", required=True, help="strategy JSON")
    p.add_argument("--source", type=int, required=True)
    p.add_argument("--iterations", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="trace CSV to write")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("learn", help="learn a strategy profile from trace CSVs")
    p.add_argument("traces", nargs="+", help="trace CSV paths")
    p.add_argument("--frame", default=frame_default)
    p.add_argument("--levels", type=int, default=3)
    p.add_argument("--name", required=True, help="class name for the profile")
    p.add_argument("--out", required=True, help="profile JSON to write")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_learn)

    p = sub.add_parser("classify", help="classify a trace against strategy profiles")
    p.add_argument("--trace", required=True, help="trace CSV")
    p.add_argument("--profiles", nargs="+", required=True, help="profile JSONs")
    p.add_argument("--out", help="result JSON (stdout when omitted)")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("experiment", help="run the PCC-vs-noise experiment")
    p.add_argument("--config", help="experiment config JSON")
    p.add_argument("--seed", type=int, help="override the master seed")
    p.add_argument("--out", required=True, help="report CSV to write")
    p.add_argument("--figures-dir", help="directory for figures (default: next to CSV)")
    p.add_argument("--no-figures", action="store_true", help="skip figure rendering")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_experiment)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        return args.func(args)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
