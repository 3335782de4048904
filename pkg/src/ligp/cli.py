# SPDX-FileCopyrightText: Copyright (c) 2025 The ligp authors. All rights reserved.
# SPDX-License-Identifier: Apache-2.0
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
# http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""
Command Line Interface
`ligp bench`, `ligp predict`, `ligp template` and `ligp validate`.
"""

import argparse
import dataclasses
import json
import logging
import os
import sys
import time
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from . import __version__, bench, local_design, predictor, validation
from .gp_core import Domain
from .system_info import default_seed, default_workers
from .timing import TimingSummary

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_PARTIAL = 2
LOG_LEVEL_ENV = "LIGP_LOG_LEVEL"

CONFIG_KEYS = {
    "method": "method",
    "m": "m",
    "n": "n",
    "theta": "theta_mode",
    "g": "g",
    "seed": "seed",
    "workers": "workers",
    "n_starts": "n_starts",
    "tol": "tol",
    "fixed_sfd": "fixed_sfd",
    "n0": "lagp_n0",
    "cand_factor": "lagp_cand_factor",
    "label": "label",
}
SPEC_KEYS = {
    "problem", "N", "N_prime", "replicates", "seed", "csv_path", "response_column",
    "prescale", "subset_size", "folds", "configs", "workers",
    "m_values", "n_values", "count", "x2", "M0", "M_max", "criterion", "grid_size",
}


class ConfigError(ValueError):
    """Malformed experiment file; message carries file and line"""


def setup_logging(verbose: int = 0, quiet: bool = False):
    level = logging.INFO
    env = os.environ.get(LOG_LEVEL_ENV)
    if env:
        level = getattr(logging, env.upper(), logging.INFO)
    if verbose:
        level = logging.DEBUG
    elif quiet:
        level = logging.WARNING
    logging.basicConfig(
        level=level, format="%(asctime)s - %(name)s - %(levelname)s - %(message)s"
    )


def _line_of(text: str, key: str) -> int:
    needle = f'"{key}"'
    for lineno, line in enumerate(text.splitlines(), start=1):
        if needle in line:
            return lineno
    return 1


def load_experiment_file(path) -> Tuple[Dict, str]:
    """Parse the JSON experiment file, raising ConfigError with a line number."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ConfigError(f"{path}: cannot read ({e})") from e
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}:{e.lineno}: {e.msg}") from e
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}:1: expected a JSON object")
    for key in doc:
        if key not in SPEC_KEYS:
            raise ConfigError(f"{path}:{_line_of(text, key)}: unknown key '{key}'")
    return doc, text


def parse_predict_config(entry: Dict, defaults: Dict) -> predictor.PredictConfig:
    if not isinstance(entry, dict):
        raise ValueError(f"config entries must be objects, got {entry!r}")
    kwargs = dict(defaults)
    for key, value in entry.items():
        if key not in CONFIG_KEYS:
            raise ValueError(f"unknown config key '{key}'")
        kwargs[CONFIG_KEYS[key]] = value
    return predictor.PredictConfig(**kwargs)


def _configs_from(doc: Dict, text: str, path, defaults: Dict):
    valid, invalid = [], {}
    for i, entry in enumerate(doc.get("configs", [])):
        try:
            valid.append(parse_predict_config(entry, defaults))
        except (TypeError, ValueError) as e:
            label = entry.get("label") if isinstance(entry, dict) else None
            label = label or f"config[{i}]"
            line = _line_of(text, "configs")
            logger.error(f"{path}:{line}: {label} rejected: {e}")
            invalid[label] = f"ValueError: {e}"
    return valid, invalid


def _spec_from(doc: Dict, configs, path, text) -> bench.ExperimentSpec:
    keys = (
        "problem",
        "N",
        "N_prime",
        "replicates",
        "seed",
        "csv_path",
        "response_column",
        "prescale",
        "subset_size",
        "folds",
    )
    fields = {k: doc[k] for k in keys if k in doc}
    try:
        return bench.ExperimentSpec(configs=tuple(configs), **fields)
    except (TypeError, ValueError) as e:
        key = "problem" if "problem" in str(e) else next(iter(fields), "problem")
        raise ConfigError(f"{path}:{_line_of(text, key)}: {e}") from e


def cmd_bench(args) -> int:
    try:
        doc, text = load_experiment_file(args.config)
    except ConfigError as e:
        logger.error(f"❌ {e}")
        return EXIT_ERROR
    seed = args.seed if args.seed is not None else doc.get("seed", default_seed())
    workers = args.workers or doc.get("workers") or default_workers()
    defaults = {"seed": seed, "workers": workers}
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    try:
        if args.study == "grid":
            table = bench.run_grid_study(
                doc.get("problem", "herbie"),
                doc.get("m_values", [5, 10, 20]),
                doc.get("n_values", [50, 100]),
                N=doc.get("N", 10000),
                N_prime=doc.get("N_prime", 1000),
                seed=seed,
                workers=workers,
            )
            table.to_csv(out / "grid.csv", index=False, float_format="%.17g")
            print(table.to_string(index=False))
            return EXIT_OK

        if args.study == "global":
            path = bench.global_alc_path(
                N=doc.get("N", 100),
                M0=doc.get("M0", 5),
                M_max=doc.get("M_max", 85),
                N_prime=doc.get("N_prime", 200),
                seed=seed,
                criterion=doc.get("criterion", "alc"),
                grid_size=doc.get("grid_size", 21),
            )
            path.table.to_csv(out / "global_path.csv", index=False, float_format="%.17g")
            summary = {"full_gp_rmse": path.full_gp_rmse, "theta": path.theta}
            (out / "global_summary.json").write_text(json.dumps(summary, indent=2) + "\n")
            print(path.table.to_string(index=False))
            print(f"Full GP RMSE: {path.full_gp_rmse:.4g}")
            return EXIT_OK

        configs, invalid = _configs_from(doc, text, args.config, defaults)

        if args.study == "slice":
            study = bench.run_slice_study(
                configs,
                N=doc.get("N", 40000),
                count=doc.get("count", 99),
                x2=doc.get("x2", 0.6),
                seed=seed,
            )
            study.table.to_csv(out / "slice.csv", index=False, float_format="%.17g")
            (out / "report.json").write_text(json.dumps({"rmse": study.rmse}, indent=2) + "\n")
            seconds = json.dumps({"seconds": study.seconds}, indent=2)
            (out / "timings.json").write_text(seconds + "\n")
            for label, score in study.rmse.items():
                print(f"{label:<40} RMSE {score:.4e}  ({study.seconds[label]:.1f}s)")
            return EXIT_PARTIAL if invalid else EXIT_OK

        spec = _spec_from(doc, configs, args.config, text)
    except ConfigError as e:
        logger.error(f"❌ {e}")
        return EXIT_ERROR
    except (TypeError, ValueError) as e:
        logger.error(f"❌ {args.config}: {e}")
        return EXIT_ERROR

    report = bench.run_experiment(spec, invalid=invalid)
    bench.write_report(report, out)
    for c in report.configs:
        if c.error and not c.rmse_values:
            print(f"{c.label:<40} FAILED: {c.error}")
        else:
            lo, hi = c.rmse_interval
            print(f"{c.label:<40} RMSE {c.rmse:.4e}  90% [{lo:.4e}, {hi:.4e}]")
    return EXIT_PARTIAL if report.failed else EXIT_OK


def _resolve_template(args):
    """Load --template and reconcile --method/--m with it; returns (template, method, m)."""
    if not args.template:
        return None, args.method or "ligp-qnorm", 10 if args.m is None else args.m
    template = local_design.load_template(args.template)
    if args.method and args.method != "ligp-wimse-template":
        raise ValueError(f"--template needs --method ligp-wimse-template, got {args.method}")
    if args.m is not None and args.m != template.m:
        raise ValueError(f"--m {args.m} disagrees with the template's m={template.m}")
    if args.prescale and template.scale_lengths is None:
        raise ValueError(
            "template was built on unscaled inputs; rebuild it with 'ligp template --prescale'"
        )
    logger.info(
        f"Loaded {template.kind} template from {args.template}: m={template.m}, d={template.d}"
    )
    return template, "ligp-wimse-template", template.m


def cmd_predict(args) -> int:
    try:
        X, Y = bench.load_csv(args.train, args.response)
        X_test = bench.load_inputs(args.test, X.shape[1], args.response)
        template, method, m = _resolve_template(args)
        if template is not None and template.d != X.shape[1]:
            raise ValueError(f"template has d={template.d}, training data has d={X.shape[1]}")
        config = predictor.PredictConfig(
            method=method,
            m=m,
            n=args.n,
            theta_mode=args.theta,
            g=args.g,
            seed=args.seed,
            workers=args.workers or default_workers(),
        )
        if config.n > X.shape[0]:
            raise ValueError(f"n={config.n} exceeds the {X.shape[0]} training rows")
    except (OSError, ValueError) as e:
        logger.error(f"❌ {e}")
        return EXIT_ERROR

    domain = Domain.enclosing(X, X_test)
    X_fit, X_site = X, X_test
    scaled = None
    if template is not None and template.scale_lengths is not None:
        # offsets are in the units the template was built in
        scaled = predictor.ScaledDesign.from_lengths(X, Y, template.scale_lengths, domain)
    elif args.prescale:
        scaled = predictor.prescale(X, Y, seed=args.seed, domain=domain)
    if scaled is not None:
        X_fit, X_site, domain = scaled.x_scaled, scaled.transform(X_test), scaled.scaled_domain()

    results = predictor.predict_sites(config, X_site, X_fit, Y, domain, template=template)
    inline = args.timings == "inline"
    frame = predictor.results_frame(results, X_test, timings=inline)
    out = Path(args.out)
    frame.to_csv(out, index=False, float_format="%.17g")
    if args.timings == "sidecar":
        timing_cols = predictor.results_frame(results, X_test, timings=True)
        timing_cols = timing_cols[[c for c in timing_cols.columns if c.startswith("t_")]]
        timing_cols.to_csv(out.with_suffix(".timings.csv"), index=False, float_format="%.6g")
    summary = TimingSummary()
    summary.extend(r.timings for r in results)
    logger.info(summary.summary())
    failed = sum(not r.ok for r in results)
    logger.info(f"💾 {len(results)} predictions written to {out}")
    return EXIT_PARTIAL if failed else EXIT_OK


def cmd_template(args) -> int:
    try:
        X, Y = bench.load_csv(args.train, args.response)
        if not 1 <= args.m <= args.n <= X.shape[0]:
            raise ValueError(f"need m <= n <= N, got m={args.m}, n={args.n}, N={X.shape[0]}")
        start = time.perf_counter()
        domain = Domain.enclosing(X)
        scaled = None
        if args.prescale:
            scaled = predictor.prescale(X, Y, seed=args.seed, domain=domain)
            X, domain = scaled.x_scaled, scaled.scaled_domain()
        if args.kind == "wimse":
            template = local_design.build_wimse_template(
                args.m, args.n, X, Y, domain, seed=args.seed
            )
        else:
            template = local_design.build_sfd_template(
                args.kind, args.m, args.n, X, Y, seed=args.seed
            )
        if scaled is not None:
            template = dataclasses.replace(template, scale_lengths=scaled.scale_lengths)
        elapsed = time.perf_counter() - start
    except (OSError, ValueError) as e:
        logger.error(f"❌ {e}")
        return EXIT_ERROR
    local_design.save_template(template, args.out)
    print(f"theta0: {template.theta0:.6g}")
    print(f"build time: {elapsed:.3f} s")
    return EXIT_OK


def cmd_validate(args) -> int:
    results = validation.run_suites(quick=args.quick, seed=args.seed, names=args.suite)
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{r.name:<12} {status}  max error {r.max_error:.3e}  (tol {r.tolerance:.0e}, "
              f"{r.instances} instances, {r.seconds:.1f}s)")
    return EXIT_OK if results and all(r.passed for r in results) else EXIT_ERROR


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ligp",
        description="Locally induced Gaussian process prediction and benchmarks",
        epilog="Examples:\n"
        "  ligp bench experiments/borehole.json --out results/borehole\n"
        "  ligp bench experiments/herbie.json --study slice --out results/slice\n"
        "  ligp predict train.csv test.csv --method ligp-qnorm --m 10 --n 100 --out pred.csv\n"
        "  ligp template train.csv --m 10 --n 100 --out template.txt\n"
        "  ligp predict train.csv test.csv --template template.txt --out pred.csv\n"
        "  ligp validate --quick\n"
        "\n"
        "Environment:\n"
        "  LIGP_WORKERS    default worker count (default: physical cores)\n"
        "  LIGP_SEED       default seed (default: 42)\n"
        "  LIGP_LOG_LEVEL  DEBUG, INFO, WARNING or ERROR (default: INFO)",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="Debug logging")
    parser.add_argument("-q", "--quiet", action="store_true", help="Warnings and errors only")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser(
        "bench",
        help="Run a benchmark experiment described by a JSON file",
        description=(
            "Writes report.json (metrics), timings.json (timings and host) and one CSV per config."
        ),
    )
    p.add_argument("config", help="JSON experiment file")
    p.add_argument(
        "--study",
        choices=["experiment", "grid", "slice", "global"],
        default="experiment",
        help="Which study to run (default: experiment)",
    )
    p.add_argument("--out", default="results", help="Output directory (default: results)")
    p.add_argument("--seed", type=int, default=None, help="Overrides the file's seed")
    p.add_argument("--workers", type=int, default=None, help="Worker processes per batch")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser(
        "predict",
        help="Predict at every row of a test CSV",
        description="Output columns: x1..xd, mean, variance, theta_hat, nu_hat, error; "
        "t_<phase> timing columns go inline or to <out>.timings.csv.",
    )
    p.add_argument("train", help="Training CSV (inputs and response)")
    p.add_argument("test", help="Test CSV (inputs, optionally with the response column)")
    p.add_argument("--response", default="-1", help="Response column index or name (default: last)")
    p.add_argument(
        "--method",
        choices=predictor.METHODS,
        default=None,
        help="(default: ligp-qnorm, or ligp-wimse-template with --template)",
    )
    p.add_argument(
        "--m", type=int, default=None, help="Inducing points (default: 10, or the template's m)"
    )
    p.add_argument("--n", type=int, default=100, help="Neighborhood size (default: 100)")
    p.add_argument("--theta", default="mle", help="'mle' or 'fixed:<value>' (default: mle)")
    p.add_argument("--g", type=float, default=1e-6, help="Nugget (default: 1e-6)")
    p.add_argument(
        "--seed", type=int, default=default_seed(), help="Seed (default: 42 or LIGP_SEED)"
    )
    p.add_argument("--workers", type=int, default=None, help="Worker processes")
    p.add_argument(
        "--prescale", action="store_true", help="Pre-scale inputs by separable lengthscales"
    )
    p.add_argument(
        "--template",
        default=None,
        help="Saved template (from 'ligp template') displaced to every site",
    )
    p.add_argument(
        "--timings",
        choices=["sidecar", "inline", "none"],
        default="sidecar",
        help="Where per-phase timings go (default: sidecar, keeping predictions reproducible)",
    )
    p.add_argument("--out", default="predictions.csv", help="Output CSV (default: predictions.csv)")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("template", help="Build and save an inducing-point template")
    p.add_argument("train", help="Training CSV")
    p.add_argument("--response", default="-1", help="Response column index or name (default: last)")
    p.add_argument("--m", type=int, default=10, help="Inducing points (default: 10)")
    p.add_argument("--n", type=int, default=100, help="Neighborhood size (default: 100)")
    p.add_argument(
        "--kind", choices=local_design.TEMPLATE_KINDS, default="wimse", help="(default: wimse)"
    )
    p.add_argument(
        "--seed", type=int, default=default_seed(), help="Seed (default: 42 or LIGP_SEED)"
    )
    p.add_argument(
        "--prescale",
        action="store_true",
        help="Build on pre-scaled inputs; the scale lengths are saved with the template",
    )
    p.add_argument("--out", required=True, help="Template file to write")
    p.set_defaults(func=cmd_template)

    p = sub.add_parser("validate", help="Run the numerical oracle suites")
    p.add_argument("--quick", action="store_true", help="Fewer random instances")
    p.add_argument(
        "--seed", type=int, default=default_seed(), help="Seed (default: 42 or LIGP_SEED)"
    )
    p.add_argument(
        "--suite", action="append", choices=list(validation.SUITES), help="Run only these suites"
    )
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point"""
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.verbose, args.quiet)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
