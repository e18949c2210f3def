import argparse
import json
import logging
import os
import sys
from typing import List, Optional

import pandas as pd

from evaluation.plots import plot_summary
from evaluation.summarize import summarize, write_summary
from model import METHODS, learn, learner_result_to_json
from training.benchmark import read_results, run_experiment, write_results
from training.config import PRESETS, ConfigError, ExperimentConfig, load_config, preset_config
from training.dataset_generation import generate_clean, generate_instance
from training.utils import setup_logging
from WeakSINDy.dictionary import build_spec
from WeakSINDy.ode_bench import load_trajectory_csv, save_trajectory_csv
from WeakSINDy.spectral import multitaper_psd, periodogram

OUTPUT_CONFIG = {
    'LOG_DIR': 'training/log',
    'TRAJECTORY_FILE': 'trajectory.csv',
    'PSD_FILE': 'psd_x{}.csv',
    'RESULT_FILE': 'result.json',
    'RESULTS_FILE': 'results.csv',
    'SUMMARY_FILE': 'summary.csv',
}


def parse_arguments(argv: Optional[List[str]] = None) -> argparse.Namespace:
    """Parse command line arguments for the equation learning pipeline.

    Returns:
        argparse.Namespace: Parsed command line arguments
    """
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=str, help="Path to an experiment config JSON")
    common.add_argument("--preset", type=str, choices=sorted(PRESETS), help="Named experiment preset")
    common.add_argument("--seed", type=int, help="Base seed (unsigned 64-bit) overriding the config")
    common.add_argument("--out-dir", dest="out_dir", type=str,
                        help="Output directory (default: the numbered log directory of this run)")
    common.add_argument("--jobs", type=int, default=1, help="Worker processes")
    common.add_argument("--log-dir", dest="log_dir", type=str, default=OUTPUT_CONFIG['LOG_DIR'],
                        help="Directory for saving logs")

    parser = argparse.ArgumentParser(description="Fourier weak SINDy equation learning and benchmarks")
    parser.add_argument("--print-default-config", action="store_true", default=False,
                        help="Print the default Lorenz protocol as JSON and exit")
    commands = parser.add_subparsers(dest="command")

    simulate = commands.add_parser("simulate", parents=[common], help="Simulate a (noisy) trajectory to CSV")
    simulate.add_argument("--noise-ratio", dest="noise_ratio", type=float, default=0.0)

    psd = commands.add_parser("psd", parents=[common], help="Power spectral density of a trajectory CSV")
    psd.add_argument("--input", type=str, required=True, help="Trajectory CSV")
    psd.add_argument("--estimator", choices=["multitaper", "periodogram"], default="multitaper")
    psd.add_argument("--nw", type=float, default=4.0, help="Time-bandwidth product")

    learn_cmd = commands.add_parser("learn", parents=[common], help="Learn one model and emit JSON")
    learn_cmd.add_argument("--method", choices=METHODS, default="wsindy_fourier_sde")
    learn_cmd.add_argument("--input", type=str, help="Trajectory CSV (default: simulate from the config)")
    learn_cmd.add_argument("--clean", type=str, help="Clean trajectory CSV for oracle selection")
    learn_cmd.add_argument("--noise-ratio", dest="noise_ratio", type=float, default=0.0)
    learn_cmd.add_argument("--degree", type=int, help="Dictionary degree overriding the config")
    learn_cmd.add_argument("--params", type=str, default="{}",
                           help='Method parameters as JSON, e.g. \'{"K": 100, "nw": 4}\'')

    benchmark = commands.add_parser("benchmark", parents=[common], help="Full sweep to CSV and SVG")
    benchmark.add_argument("--no-timing", dest="timing", action="store_false", default=True,
                           help="Omit wall times so the CSV is byte-reproducible")

    summary = commands.add_parser("summarize", parents=[common], help="Summarize a results CSV")
    summary.add_argument("--input", type=str, required=True, help="Results CSV")
    summary.add_argument("--plot", action="store_true", default=False, help="Also write SVG plots")

    args = parser.parse_args(argv)
    if args.command is None and not args.print_default_config:
        parser.error("a command is required")
    return args


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    """Build the experiment config from --config, --preset and --seed."""
    if args.config and args.preset:
        raise ConfigError("Use either --config or --preset, not both")
    if args.config:
        cfg = load_config(args.config)
    elif args.preset:
        cfg = preset_config(args.preset)
    else:
        cfg = ExperimentConfig()
    if args.seed is not None:
        cfg.seed = args.seed
        cfg.validate()
    return cfg


def output_dir(args: argparse.Namespace) -> str:
    run_dir = setup_logging(args.log_dir, message=f"starting {args.command}")
    out_dir = args.out_dir or run_dir
    os.makedirs(out_dir, exist_ok=True)
    return out_dir


def run_simulate(args, cfg: ExperimentConfig) -> str:
    out_dir = output_dir(args)
    _, clean = generate_clean(cfg)
    data = generate_instance(clean, args.noise_ratio, cfg.seed, 0, 0)
    path = save_trajectory_csv(data, os.path.join(out_dir, OUTPUT_CONFIG['TRAJECTORY_FILE']))
    logging.info(f"wrote {data.k} samples with noise ratio {args.noise_ratio:g} to {path}")
    return str(path)


def run_psd(args) -> List[str]:
    out_dir = output_dir(args)
    data = load_trajectory_csv(args.input)
    paths = []
    for i in range(data.n):
        if args.estimator == "multitaper":
            estimate = multitaper_psd(data.states[:, i], data.dt, args.nw)
        else:
            estimate = periodogram(data.states[:, i], data.dt)
        path = os.path.join(out_dir, OUTPUT_CONFIG['PSD_FILE'].format(i + 1))
        pd.DataFrame({"freq_hz": estimate.freqs, "power": estimate.power}).to_csv(
            path, index=False, float_format="%.17g", lineterminator="\n")
        paths.append(path)
    logging.info(f"wrote {args.estimator} PSD of {data.n} components to {out_dir}")
    return paths


def run_learn(args, cfg: ExperimentConfig) -> str:
    out_dir = output_dir(args)
    try:
        params = json.loads(args.params)
    except json.JSONDecodeError as err:
        raise ConfigError(f"--params is not valid JSON: {err}") from err
    if not isinstance(params, dict):
        raise ConfigError("--params must be a JSON object")

    if args.input:
        data = load_trajectory_csv(args.input)
        clean = load_trajectory_csv(args.clean) if args.clean else None
    else:
        _, clean = generate_clean(cfg)
        data = generate_instance(clean, args.noise_ratio, cfg.seed, 0, 0)
    if args.method == "wsindy_fourier_oracle" and clean is None:
        raise ConfigError("wsindy_fourier_oracle needs --clean when --input is given")

    spec = build_spec(data.n, cfg.degree if args.degree is None else args.degree)
    result = learn(args.method, data, spec, cfg.solver_config(), params, clean=clean)
    document = learner_result_to_json(result)
    path = os.path.join(out_dir, OUTPUT_CONFIG['RESULT_FILE'])
    with open(path, "w") as fp:
        fp.write(document + "\n")
    print(document)
    return path


def run_benchmark(args, cfg: ExperimentConfig) -> str:
    out_dir = output_dir(args)
    logging.info(f"config: {json.dumps(cfg.to_dict())}")
    with open(os.path.join(out_dir, "config.json"), "w") as fp:
        fp.write(cfg.to_json() + "\n")
    table = run_experiment(cfg, jobs=args.jobs)
    write_results(table, os.path.join(out_dir, OUTPUT_CONFIG['RESULTS_FILE']), timing=args.timing)
    summary = summarize(table)
    write_summary(summary, os.path.join(out_dir, OUTPUT_CONFIG['SUMMARY_FILE']))
    plot_summary(summary, out_dir)
    print("Results written to {}".format(out_dir))
    return out_dir


def run_summarize(args) -> str:
    out_dir = output_dir(args)
    summary = summarize(read_results(args.input))
    path = os.path.join(out_dir, OUTPUT_CONFIG['SUMMARY_FILE'])
    write_summary(summary, path)
    if args.plot:
        plot_summary(summary, out_dir)
    return path


def main(args: argparse.Namespace) -> int:
    """Dispatch a CLI command.

    Args:
        args: Command line arguments

    Returns:
        int: exit code (2 for configuration errors)
    """
    try:
        if args.print_default_config:
            print(ExperimentConfig().to_json())
            return 0
        if args.command == "psd":
            run_psd(args)
        elif args.command == "summarize":
            run_summarize(args)
        else:
            cfg = resolve_config(args)
            if args.command == "simulate":
                run_simulate(args, cfg)
            elif args.command == "learn":
                run_learn(args, cfg)
            elif args.command == "benchmark":
                run_benchmark(args, cfg)
            else:
                raise ConfigError(f"Unsupported command: {args.command}")
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as err:
        logging.error(str(err))
        print(f"error: {err}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    args = parse_arguments()
    sys.exit(main(args))
