"""Command-line entry point.

    delaylearn run --config configs/table1.cfg --seed 7 --out results/run7
    delaylearn sweep --config configs/table1.cfg -n 20 --jobs 4 --out results/sweep
    delaylearn raster --config configs/table1.cfg --seed 7 --phase trained --instances 0:25
    delaylearn encode-preview --config configs/table1.cfg --index 3

Exit status: 0 success, 1 configuration error, 2 data error, 3 internal fault.
"""
import argparse
import sys
from pathlib import Path

import numpy as np

from . import reports
from ._accel import BACKENDS, ENV_FLAG
from .config import ExperimentConfig, load_config, override_value
from .dataio import Instance, downscale, load_dataset
from .encoder import encode
from .errors import ConfigError, DataError, DelayLearnError
from .experiment import prepare, readout_neurons, run_single, run_sweep, train_network
from .simulator import run_trial
from .topology import format_topology

EXIT_CONFIG, EXIT_DATA, EXIT_FAULT = 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _common(p):
    p.add_argument("--config", type=Path, help="key = value config file (built-in defaults otherwise)")
    p.add_argument("--data-dir", help="directory of IDX files (default: $DELAYLEARN_DATA)")
    p.add_argument("--seed", type=int, help="master seed override")
    p.add_argument("--train-count", type=int, help="training instances per class")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override any config key; repeatable")
    p.add_argument("--backend", choices=BACKENDS, help=f"kernel backend (default: ${ENV_FLAG} or numba)")


def build_parser():
    parser = _Parser(prog="delaylearn", description="Delay-plasticity spiking network experiments")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("run", help="one network: baseline, train, retest")
    _common(p)
    p.add_argument("--out", type=Path, required=True, help="output directory")
    p.add_argument("--dump-delays", action="store_true", help="also write initial and trained delays")

    p = sub.add_parser("sweep", help="many seeded networks and summary statistics")
    _common(p)
    p.add_argument("-n", "--networks", type=int, required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("raster", help="spike raster of selected test trials")
    _common(p)
    p.add_argument("--phase", choices=("baseline", "trained"), default="baseline")
    p.add_argument("--instances", default="all", help="'all', an index, 'a:b' or 'i,j,k'")
    p.add_argument("--include-input", action="store_true", help="also dump input-layer spikes")
    p.add_argument("--out", type=Path, help="output directory (default: stdout)")

    p = sub.add_parser("encode-preview", help="latency code of one image")
    _common(p)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--index", type=int, help="image index in the dataset file")
    g.add_argument("--synthetic", choices=("zeros", "ramp"), help="built-in test image")
    p.add_argument("--out", type=Path, help="output directory (default: stdout)")
    return parser


def _config(args):
    config = load_config(args.config) if args.config else ExperimentConfig()
    overrides = {}
    for item in args.set:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        key, value = (s.strip() for s in item.split("=", 1))
        overrides[key] = override_value(key, value)
    overrides["seed"] = args.seed
    overrides["train_instances"] = args.train_count
    try:
        return config.with_overrides(**overrides)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def _dataset(args, config):
    return load_dataset(args.data_dir, config.images_file, config.labels_file)


def _write(out_dir, name, text):
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / name).write_text(text)


def cmd_run(args):
    config = _config(args)
    dataset = _dataset(args, config)
    report = run_single(config, dataset, args.backend)
    delays_file = None
    if args.dump_delays:
        delays_file = "delays_trained.txt"
        _write(args.out, "delays_initial.txt", format_topology(report.initial_topology))
        _write(args.out, delays_file, format_topology(report.topology))
    _write(args.out, "report.txt", reports.format_report(report, config.pgp_thresholds, delays_file))
    for theta in config.pgp_thresholds:
        b, a = report.scores["baseline"][theta], report.scores["trained"][theta]
        print(f"theta {theta:.2f}: trained classes {b.trained_accuracy:.3f} -> {a.trained_accuracy:.3f}, "
              f"unseen {b.unseen_accuracy:.3f} -> {a.unseen_accuracy:.3f}")
    return 0


def cmd_sweep(args):
    config = _config(args)
    if args.networks < 1:
        raise ConfigError("-n must be at least 1")
    if args.jobs < 1:
        raise ConfigError("--jobs must be at least 1")
    dataset = _dataset(args, config)
    results, summary = run_sweep(config, args.networks, dataset, args.jobs, args.backend)
    for k, report in enumerate(results):
        _write(args.out, f"network_{k:03d}.txt", reports.format_report(report, config.pgp_thresholds))
    _write(args.out, "summary.txt", reports.format_summary(summary, [r.seed for r in results]))
    for name, text in reports.histogram_files(summary).items():
        _write(args.out, name, text)
    for theta in config.pgp_thresholds:
        rows = summary.rows
        print(f"theta {theta:.2f}: improved-or-equal {rows[theta, 'improved_or_equal_count']}"
              f"/{rows[theta, 'both_separable_count']}, mean improvement "
              f"{rows[theta, 'mean_improvement']:+.3f}, non-separable after training "
              f"{rows[theta, 'trained.trained.non_separable_fraction']:.2f}")
    return 0


def parse_selector(text, n):
    """Indices selected by 'all', 'k', 'a:b' or 'i,j,k'; out of range -> ConfigError."""
    text = text.strip()
    try:
        if text == "all":
            return list(range(n))
        if ":" in text:
            a, b = text.split(":", 1)
            a = int(a) if a else 0
            b = int(b) if b else n
            if not 0 <= a <= b <= n:
                raise IndexError
            return list(range(a, b))
        out = [int(x) for x in text.split(",")]
    except ValueError:
        raise ConfigError(f"bad instance selector {text!r}") from None
    except IndexError:
        raise ConfigError(f"instance selector {text!r} outside 0..{n - 1}") from None
    if any(not 0 <= i < n for i in out):
        raise ConfigError(f"instance selector {text!r} outside 0..{n - 1}")
    return out


def cmd_raster(args):
    config = _config(args)
    dataset = _dataset(args, config)
    topology, train_set, test_set = prepare(config, dataset)
    selected = parse_selector(args.instances, len(test_set))
    if args.phase == "trained":
        topology, _ = train_network(topology, train_set, config, args.backend)
    neurons = set(readout_neurons(config, topology))
    if args.include_input:
        neurons |= set(topology.layer_range(0))
    rows = []
    for k in selected:
        inst = test_set[k]
        pattern = encode(inst, t_max=config.t_max, dt=config.dt, invert=config.invert)
        record, _ = run_trial(topology, pattern, config.duration, False, config.plasticity,
                              config.params, config.dt, config.impulse_ms, args.backend)
        for n, t in zip(record.neuron.tolist(), record.time.tolist()):
            if n in neurons:
                rows.append((t, n, inst.index, inst.label))
    lines = reports.raster_lines(rows)
    _emit(args.out, f"raster_{args.phase}_seed{config.seed}.txt", lines, reports.RASTER_SCHEMA)
    return 0


def cmd_encode_preview(args):
    config = _config(args)
    if args.synthetic == "zeros":
        pixels = np.zeros((10, 10))
    elif args.synthetic == "ramp":
        pixels = np.linspace(0.0, 1.0, 100).reshape(10, 10)
    else:
        dataset = _dataset(args, config)
        if not 0 <= args.index < len(dataset.images):
            raise ConfigError(f"image index {args.index} outside 0..{len(dataset.images) - 1}")
        pixels = downscale(dataset.images[args.index])
    pattern = encode(Instance(pixels, -1), t_max=config.t_max, dt=config.dt, invert=config.invert)
    _emit(args.out, "encoding.txt", pattern.lines(), reports.ENCODING_SCHEMA)
    return 0


def _emit(out_dir, name, lines, schema):
    if out_dir is None:
        for line in lines:
            print(line)
        return
    _write(out_dir, name, "\n".join(lines + [schema]) + "\n")


COMMANDS = {
    "run": cmd_run,
    "sweep": cmd_sweep,
    "raster": cmd_raster,
    "encode-preview": cmd_encode_preview,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except DelayLearnError as exc:
        print(f"internal fault: {exc}", file=sys.stderr)
        return EXIT_FAULT
    except Exception as exc:  # noqa: BLE001 - any other failure is an internal fault
        print(f"internal fault: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAULT


if __name__ == "__main__":
    sys.exit(main())
