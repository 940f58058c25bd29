"""Command-line driver: configures an experiment, runs it through the library
modules, and writes results.csv / manifest.json / samples-<method>.csv.

Exit status: 0 success, 1 bad config or IO failure, 2 an assertion-style
experiment missed its threshold.
"""

import argparse
import configparser
import csv
import json
import math
import os
import subprocess
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__, diagnostics, integrators, models, verification
from .geometry import RiemannianTarget
from .integrators import IntegratorConfig
from .sampler import ChainConfig, run_chain

EXPERIMENTS = (
    "order-study",
    "properties",
    "jacobian-check",
    "harmonic-esjd",
    "sample",
    "robustness",
)
METHODS = ("hmc", "rmhmc", "lmc", "ilmc")
MODELS = ("banana", "logistic", "student-t", "harmonic")

RESULTS_HEADER = ("experiment", "model", "method", "trial", "metric", "value")

# (step size, leapfrog steps) per model and method when not set explicitly.
STEP_DEFAULTS = {
    "banana": {"hmc": (0.1, 10), "rmhmc": (0.04, 20), "lmc": (0.1, 20), "ilmc": (0.1, 20)},
    "logistic": {"hmc": (0.1, 10), "rmhmc": (0.04, 20), "lmc": (0.1, 20), "ilmc": (0.1, 20)},
    "student-t": {"hmc": (0.7, 20), "rmhmc": (0.7, 20), "lmc": (0.7, 20), "ilmc": (0.7, 20)},
    "harmonic": {"hmc": (0.5, 10), "rmhmc": (0.5, 10), "lmc": (0.5, 10), "ilmc": (0.5, 10)},
}
# The perturbed-derivative force error grows with trajectory time, not step
# count, so the robustness chains take shorter paths to keep acceptance usable.
ROBUSTNESS_STEPS = {
    "hmc": (0.1, 10), "rmhmc": (0.04, 20), "lmc": (0.05, 20), "ilmc": (0.05, 20),
}
METHOD_DEFAULTS = {
    "banana": ("hmc", "rmhmc", "lmc", "ilmc"),
    "logistic": ("hmc", "rmhmc", "lmc", "ilmc"),
    "student-t": ("rmhmc", "lmc", "ilmc"),
    "harmonic": ("hmc",),
}

_STEPPER_BY_METHOD = {
    "hmc": integrators.standard_leapfrog_step,
    "rmhmc": integrators.generalized_leapfrog_step,
    "lmc": integrators.lagrangian_leapfrog_step,
    "ilmc": integrators.inverted_lagrangian_leapfrog_step,
}


class ConfigError(Exception):
    """Invalid configuration; message starts with the offending field path."""

    def __init__(self, field, reason):
        super().__init__("%s: %s" % (field, reason))
        self.field = field
        self.reason = reason


@dataclass
class ExperimentConfig:
    experiment: str
    model: str
    methods: tuple
    step_size: Optional[float]  # None -> per-method defaults
    num_steps: Optional[int]
    samples: int
    trials: int
    seed: int
    threads: int
    out: str
    delta: float
    burn_in: Optional[int]

    def normalized(self):
        """Nested dict mirroring the config-file schema; None keys omitted."""
        experiment = {
            "name": self.experiment,
            "model": self.model,
            "methods": ", ".join(self.methods),
            "trials": self.trials,
            "seed": self.seed,
            "threads": self.threads,
            "out": self.out,
        }
        sampling = {"samples": self.samples}
        if self.step_size is not None:
            sampling["step_size"] = self.step_size
        if self.num_steps is not None:
            sampling["num_steps"] = self.num_steps
        if self.burn_in is not None:
            sampling["burn_in"] = self.burn_in
        return {
            "experiment": experiment,
            "sampling": sampling,
            "robustness": {"delta": self.delta},
        }


# ---------------------------------------------------------------------------
# parsing

_FILE_SCHEMA = {
    "experiment": {"name", "model", "methods", "trials", "seed", "threads", "out"},
    "sampling": {"step_size", "num_steps", "samples", "burn_in"},
    "robustness": {"delta"},
}


def _read_config_file(path):
    parser = configparser.ConfigParser()
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except configparser.Error as exc:
        raise ConfigError(str(path), "unparseable config: %s" % exc) from exc
    values = {}
    for section in parser.sections():
        if section not in _FILE_SCHEMA:
            raise ConfigError(section, "unknown section")
        for key, raw in parser.items(section):
            if key not in _FILE_SCHEMA[section]:
                raise ConfigError("%s.%s" % (section, key), "unknown option")
            values["%s.%s" % (section, key)] = raw
    return values


def _coerce(field, raw, kind):
    try:
        return kind(raw)
    except (TypeError, ValueError):
        raise ConfigError(field, "expected %s, got %r" % (kind.__name__, raw)) from None


def _split_methods(raw):
    return tuple(tok for tok in raw.replace(",", " ").split() if tok)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="geomc", description="Geometric MCMC experiment runner."
    )
    parser.add_argument("experiment", choices=EXPERIMENTS)
    parser.add_argument("--config", metavar="FILE", default=None)
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--threads", type=int, default=None)
    parser.add_argument("--out", default=None)
    parser.add_argument("--model", default=None)
    parser.add_argument("--method", action="append", default=None)
    parser.add_argument("--step-size", type=float, default=None)
    parser.add_argument("--num-steps", type=int, default=None)
    parser.add_argument("--samples", type=int, default=None)
    parser.add_argument("--trials", type=int, default=None)
    parser.add_argument("--burn-in", type=int, default=None)
    parser.add_argument("--delta", type=float, default=None)
    return parser


def parse_config(argv=None):
    """Merge config file, flags, and environment into a validated config.

    Precedence per field: flag, then file, then GEOMC_SEED (seed only), then
    built-in defaults.
    """
    args = build_parser().parse_args(argv)
    file_values = _read_config_file(args.config) if args.config else {}

    def pick(flag_value, field, kind, default):
        if flag_value is not None:
            return flag_value
        if field in file_values:
            return _coerce(field, file_values[field], kind)
        return default

    experiment = args.experiment
    if "experiment.name" in file_values:
        named = file_values["experiment.name"]
        if named != experiment:
            raise ConfigError(
                "experiment.name",
                "file says %r but the command line ran %r" % (named, experiment),
            )

    seed = args.seed
    if seed is None and "experiment.seed" in file_values:
        seed = _coerce("experiment.seed", file_values["experiment.seed"], int)
    if seed is None and os.environ.get("GEOMC_SEED"):
        seed = _coerce("GEOMC_SEED", os.environ["GEOMC_SEED"], int)
    if seed is None:
        seed = 0

    model = pick(args.model, "experiment.model", str, None)
    if model is None:
        model = "harmonic" if experiment == "harmonic-esjd" else "banana"
    if model not in MODELS:
        raise ConfigError("experiment.model", "unknown model %r" % (model,))

    if args.method is not None:
        methods = tuple(args.method)
    elif "experiment.methods" in file_values:
        methods = _split_methods(file_values["experiment.methods"])
    elif experiment == "robustness":
        methods = ("rmhmc", "lmc", "ilmc")
    else:
        methods = METHOD_DEFAULTS[model]
    for name in methods:
        if name not in METHODS:
            raise ConfigError("experiment.methods", "unknown method %r" % (name,))
    if not methods:
        raise ConfigError("experiment.methods", "at least one method required")

    trials = pick(args.trials, "experiment.trials", int, None)
    if trials is None:
        trials = 100 if experiment in ("properties", "jacobian-check") else 1
    threads = pick(args.threads, "experiment.threads", int, None)
    if threads is None:
        threads = os.cpu_count() or 1
    out = pick(args.out, "experiment.out", str, "out")

    step_size = pick(args.step_size, "sampling.step_size", float, None)
    num_steps = pick(args.num_steps, "sampling.num_steps", int, None)
    samples = pick(args.samples, "sampling.samples", int, None)
    if samples is None:
        samples = 30000 if experiment == "robustness" else 2000
    burn_in = pick(args.burn_in, "sampling.burn_in", int, None)
    delta = pick(args.delta, "robustness.delta", float, 0.3)

    if step_size is not None and not (step_size > 0 and math.isfinite(step_size)):
        raise ConfigError("sampling.step_size", "must be a positive finite number")
    if num_steps is not None and num_steps < 1:
        raise ConfigError("sampling.num_steps", "must be >= 1")
    if samples < 1:
        raise ConfigError("sampling.samples", "must be >= 1")
    if burn_in is not None and burn_in < 0:
        raise ConfigError("sampling.burn_in", "must be >= 0")
    if trials < 1:
        raise ConfigError("experiment.trials", "must be >= 1")
    if threads < 1:
        raise ConfigError("experiment.threads", "must be >= 1")

    return ExperimentConfig(
        experiment=experiment,
        model=model,
        methods=methods,
        step_size=step_size,
        num_steps=num_steps,
        samples=samples,
        trials=trials,
        seed=seed,
        threads=threads,
        out=out,
        delta=delta,
        burn_in=burn_in,
    )


# ---------------------------------------------------------------------------
# model plumbing


def build_model(name):
    if name == "banana":
        return models.BananaModel.default()
    if name == "logistic":
        x, y = models.make_logistic_data(100, 8, seed=0)
        return models.LogisticModel(x, y)
    if name == "student-t":
        return models.StudentTModel()
    if name == "harmonic":
        return models.HarmonicModel()
    raise ConfigError("experiment.model", "unknown model %r" % (name,))


def initial_position(name, model):
    if name == "banana":
        return np.array([0.5, 0.7])
    return np.zeros(model.dim)


def integrator_settings(cfg, method, table=None):
    eps, steps = (table or STEP_DEFAULTS[cfg.model])[method]
    if cfg.step_size is not None:
        eps = cfg.step_size
    if cfg.num_steps is not None:
        steps = cfg.num_steps
    return IntegratorConfig(step_size=eps, num_steps=steps)


def _sampling_target(model, method):
    # HMC ignores the geometry; give it a flat metric when the model has one.
    if method == "hmc" and not getattr(model, "euclidean", False):
        return RiemannianTarget(models.FlatMetric(model))
    return RiemannianTarget(model)


# ---------------------------------------------------------------------------
# experiments; each returns (rows, manifest_extra, failures)


def _run_order_study(cfg):
    steppers = [
        ("rmhmc", integrators.generalized_leapfrog_step),
        ("lmc", integrators.lagrangian_leapfrog_step),
        ("ilmc", integrators.inverted_lagrangian_leapfrog_step),
    ]
    rows = []
    failures = []
    slopes = {}
    for method, stepper in steppers:
        result = verification.run_order_study(stepper)
        slopes[method] = result.fitted_slope
        for i, eps in enumerate(result.step_sizes):
            rows.append(("order-study", "geodesic", method, i, "eps", eps))
            rows.append(
                ("order-study", "geodesic", method, i, "sq_error", result.local_errors[i])
            )
        rows.append(("order-study", "geodesic", method, 0, "slope", result.fitted_slope))
        if result.degenerate or not (2.8 <= result.fitted_slope <= 3.2):
            failures.append(
                "order-study: %s slope %.3f outside [2.8, 3.2]"
                % (method, result.fitted_slope)
            )
    return rows, {"slopes": slopes}, failures


# The structure bench pairs each stepper with geometry it can integrate
# cleanly: the two Lagrangian steppers get the curved banana metric, the
# generalized leapfrog gets the milder student-t metric (its fixed-point
# iteration does not contract on stationary banana states), and every stepper
# gets a flat-metric banana pass at a small step, where an unpreconditioned
# stiff potential would otherwise amplify reversibility roundoff.
# Entries: (method, model label, model factory, eps, fp tol, self/invol tol).
_PROPERTY_BENCH = (
    ("hmc", "banana-flat", "flat-banana", 0.02, 1e-12, 1e-10),
    ("inverted-leapfrog", "banana-flat", "flat-banana", 0.02, 1e-12, 1e-10),
    ("rmhmc", "student-t", "student-t", 0.7, 1e-6, 1e-5),
    ("rmhmc", "banana-flat", "flat-banana", 0.02, 1e-12, 1e-10),
    ("lmc", "banana", "banana", 0.1, 1e-12, 1e-10),
    ("lmc", "banana-flat", "flat-banana", 0.02, 1e-12, 1e-10),
    ("ilmc", "banana", "banana", 0.1, 1e-12, 1e-10),
    ("ilmc", "banana-flat", "flat-banana", 0.02, 1e-12, 1e-10),
)

_PROPERTY_STEPPERS = dict(
    _STEPPER_BY_METHOD, **{"inverted-leapfrog": integrators.inverted_leapfrog_step}
)


def property_bench_targets():
    banana = models.BananaModel.default()
    return {
        "banana": RiemannianTarget(banana),
        "flat-banana": RiemannianTarget(models.FlatMetric(banana)),
        "student-t": RiemannianTarget(models.StudentTModel()),
    }


def _run_properties(cfg):
    targets = property_bench_targets()
    rows = []
    failures = []
    for method, label, target_key, eps, fp_tol, tol in _PROPERTY_BENCH:
        suite = verification.run_property_suite(
            _PROPERTY_STEPPERS[method],
            targets[target_key],
            IntegratorConfig(eps, 5, fp_tol, 200),
            trials=cfg.trials,
            seed=cfg.seed,
            self_adjoint_tol=tol,
            involution_tol=tol,
        )
        rows.append(("properties", label, method, 0, "self_adjoint_residual",
                     suite.self_adjoint_residual))
        rows.append(("properties", label, method, 0, "involution_residual",
                     suite.involution_residual))
        if suite.euclidean_residual is not None:
            rows.append(("properties", label, method, 0, "euclidean_residual",
                         suite.euclidean_residual))
        rows.append(("properties", label, method, 0, "energy_halving_ratio",
                     suite.energy_halving_ratio))
        rows.append(("properties", label, method, 0, "passed", float(suite.passed)))
        for reason in suite.failures:
            failures.append("properties: %s on %s: %s" % (method, label, reason))
    return rows, {}, failures


def _random_banana_states(model, count, seed):
    target = RiemannianTarget(model)
    rng = np.random.default_rng(seed)
    positions = model.reference_sampler(count, rng)
    states = []
    for q in positions:
        point = target.point(q)
        p = point.metric_chol @ rng.standard_normal(target.dim)
        states.append((q, p))
    return target, states


def _run_jacobian_check(cfg):
    model = build_model(cfg.model)
    if not hasattr(model, "reference_sampler"):
        raise ConfigError("experiment.model", "jacobian-check needs a reference sampler")
    target, states = _random_banana_states(model, cfg.trials, cfg.seed)
    eps = cfg.step_size if cfg.step_size is not None else 0.1
    # The generalized leapfrog is probed at a smaller step: its fixed-point
    # iteration does not contract on every stationary banana state at 0.1.
    glf_eps = eps if cfg.step_size is not None else 0.02
    checks = [
        ("lmc", integrators.lagrangian_leapfrog_step, IntegratorConfig(eps)),
        ("ilmc", integrators.inverted_lagrangian_leapfrog_step, IntegratorConfig(eps)),
        ("rmhmc", integrators.generalized_leapfrog_step,
         IntegratorConfig(glf_eps, fixed_point_tol=1e-13, fixed_point_max_iters=500)),
    ]
    rows = []
    failures = []
    for method, stepper, icfg in checks:
        worst_rel = 0.0
        worst_abs = 0.0
        for i, (q, p) in enumerate(states):
            try:
                check = verification.finite_difference_jacobian(
                    target, q, p, icfg, stepper, h=3e-4
                )
            except RuntimeError:
                failures.append("jacobian-check: %s diverged at state %d" % (method, i))
                continue
            rows.append(("jacobian-check", cfg.model, method, i, "analytic",
                         check.analytic_log_abs_det))
            rows.append(("jacobian-check", cfg.model, method, i, "fd",
                         check.fd_log_abs_det))
            rows.append(("jacobian-check", cfg.model, method, i, "rel_error",
                         verification.scaled_rel_error(check)))
            worst_rel = max(worst_rel, verification.scaled_rel_error(check))
            worst_abs = max(worst_abs, abs(check.fd_log_abs_det))
        if method == "rmhmc":
            # Volume preservation: the finite-difference determinant itself
            # must vanish, so the absolute value is the meaningful residual.
            if worst_abs > 1e-4:
                failures.append("jacobian-check: rmhmc |fd log det| %.2e" % worst_abs)
        elif worst_rel > 1e-4:
            failures.append("jacobian-check: %s rel error %.2e" % (method, worst_rel))
    return rows, {}, failures


_ESJD_EPS_GRID = tuple(round(0.1 + 0.2 * i, 1) for i in range(10))  # 0.1 .. 1.9


def _run_harmonic_esjd(cfg):
    rows = []
    failures = []
    idx = 0
    min_diff = math.inf
    for eps in _ESJD_EPS_GRID:
        for k in range(1, 101):
            lf = models.k_step_esjd_from_propagators(1.0, eps, k, "leapfrog")
            inv = models.k_step_esjd_from_propagators(1.0, eps, k, "inverted")
            diff = lf - inv
            min_diff = min(min_diff, diff)
            for method, value in (("leapfrog", lf), ("inverted", inv),
                                  ("difference", diff)):
                rows.append(("harmonic-esjd", "harmonic", method, idx, "eps", eps))
                rows.append(("harmonic-esjd", "harmonic", method, idx, "k", float(k)))
                rows.append(("harmonic-esjd", "harmonic", method, idx, "esjd", value))
            idx += 1
    if min_diff < -1e-12:
        failures.append("harmonic-esjd: leapfrog - inverted dips to %.3e" % min_diff)

    rng = np.random.default_rng(cfg.seed)
    for j, eps in enumerate((0.5, 1.0, 1.5)):
        for method in ("leapfrog", "inverted"):
            closed = models.one_step_esjd_closed_form(1.0, eps, method)
            measured = verification.one_step_esjd_empirical(
                1.0, eps, method, 1000000, rng
            )
            rel = abs(measured - closed) / closed
            label = method + "-onestep"
            rows.append(("harmonic-esjd", "harmonic", label, j, "eps", eps))
            rows.append(("harmonic-esjd", "harmonic", label, j, "closed_form", closed))
            rows.append(("harmonic-esjd", "harmonic", label, j, "empirical", measured))
            rows.append(("harmonic-esjd", "harmonic", label, j, "rel_error", rel))
            if rel > 0.02:
                failures.append(
                    "harmonic-esjd: %s at eps=%.1f off by %.1f%%"
                    % (method, eps, 100 * rel)
                )
    return rows, {"min_esjd_difference": min_diff}, failures


def _run_one_chain(task):
    model, method, cfg, chain_index = task
    target = _sampling_target(model, method)
    chain_cfg = ChainConfig(
        method=method,
        integrator=integrator_settings(cfg, method),
        num_samples=cfg.samples,
        initial_position=initial_position(cfg.model, model),
        burn_in=cfg.burn_in,
        seed=cfg.seed,
    )
    return run_chain(target, chain_cfg, chain_index=chain_index)


def _run_sample(cfg):
    model = build_model(cfg.model)
    reference = None
    if hasattr(model, "reference_sampler"):
        reference = model.reference_sampler(
            100000, np.random.default_rng(np.random.SeedSequence((cfg.seed, 101)))
        )
    tasks = [
        (model, method, cfg, trial)
        for method in cfg.methods
        for trial in range(cfg.trials)
    ]
    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            outputs = list(pool.map(_run_one_chain, tasks))
    else:
        outputs = [_run_one_chain(task) for task in tasks]

    rows = []
    ess_per_second = {}
    sample_files = {}
    for (_, method, _, trial), (samples, records) in zip(tasks, outputs):
        report = diagnostics.build_report(
            records, samples, iid_samples=reference, seed=cfg.seed
        )
        rows.append(("sample", cfg.model, method, trial, "esjd", report.esjd))
        rows.append(("sample", cfg.model, method, trial, "acceptance_rate",
                     report.acceptance_rate))
        rows.append(("sample", cfg.model, method, trial, "min_ess", report.min_ess))
        rows.append(("sample", cfg.model, method, trial, "mean_ess", report.mean_ess))
        if report.ks_mean is not None:
            rows.append(("sample", cfg.model, method, trial, "ks_mean", report.ks_mean))
            if trial == 0:
                for d, stat in enumerate(report.ks_stats):
                    rows.append(("sample", cfg.model, method, d, "ks_stat", stat))
        if trial == 0:
            ess_per_second[method] = report.ess_per_second_mean
        sample_files.setdefault(method, []).append(samples)
    extra = {"ess_per_second": ess_per_second}
    return rows, extra, [], sample_files


def _run_robustness(cfg):
    model = build_model(cfg.model)
    if not hasattr(model, "reference_sampler"):
        raise ConfigError("experiment.model", "robustness needs a reference sampler")
    chain_cfgs = [
        ChainConfig(
            method=method,
            integrator=integrator_settings(cfg, method, ROBUSTNESS_STEPS),
            num_samples=cfg.samples,
            initial_position=initial_position(cfg.model, model),
            burn_in=cfg.burn_in,
            seed=cfg.seed,
        )
        for method in cfg.methods
    ]
    result = verification.run_robustness_experiment(
        model, cfg.delta, chain_cfgs, ks_seed=cfg.seed
    )
    rows = []
    failures = []
    for method, stats in result.per_method.items():
        rows.append(("robustness", cfg.model, method, 0, "ks_mean", stats["ks_mean"]))
        rows.append(("robustness", cfg.model, method, 0, "acceptance_rate",
                     stats["acceptance_rate"]))
        for d, stat in enumerate(stats["ks_stats"]):
            rows.append(("robustness", cfg.model, method, d, "ks_stat", stat))
    for method in ("lmc", "ilmc"):
        if method in result.per_method and result.per_method[method]["ks_mean"] >= 0.05:
            failures.append(
                "robustness: %s ks mean %.3f >= 0.05"
                % (method, result.per_method[method]["ks_mean"])
            )
    if {"rmhmc", "lmc", "ilmc"} <= result.per_method.keys():
        rows.append(("robustness", cfg.model, "all", 0, "ordering_ok",
                     float(result.ordering_ok)))
        if not result.ordering_ok:
            failures.append("robustness: rmhmc did not degrade past lmc/ilmc")

    # The Jacobian correction must stay exact under the misspecified partials.
    wrong = models.MisspecifiedModel(model, cfg.delta)
    target, states = _random_banana_states(wrong, 20, cfg.seed + 1)
    icfg = IntegratorConfig(integrator_settings(cfg, "lmc").step_size)
    worst = 0.0
    for i, (q, p) in enumerate(states):
        check = verification.finite_difference_jacobian(
            target, q, p, icfg, integrators.lagrangian_leapfrog_step, h=3e-4
        )
        rows.append(("robustness", cfg.model, "lmc-misspecified", i, "rel_error",
                     verification.scaled_rel_error(check)))
        worst = max(worst, verification.scaled_rel_error(check))
    if worst > 1e-4:
        failures.append("robustness: misspecified lmc jacobian rel error %.2e" % worst)
    return rows, {"ordering_ok": result.ordering_ok}, failures


# ---------------------------------------------------------------------------
# artifact writing


def _format_value(value):
    return repr(float(value))


def write_results_csv(path, rows):
    ordered = sorted(
        enumerate(rows), key=lambda item: (item[1][0], item[1][1], item[1][2], item[1][3], item[0])
    )
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(RESULTS_HEADER)
        for _, (experiment, model, method, trial, metric, value) in ordered:
            writer.writerow(
                [experiment, model, method, str(int(trial)), metric, _format_value(value)]
            )


def write_samples_csv(path, chains):
    dim = chains[0].shape[1]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["q%d" % i for i in range(dim)])
        for block in chains:
            for row in block:
                writer.writerow([_format_value(v) for v in row])


def version_string():
    root = Path(__file__).resolve().parents[2]
    try:
        rev = subprocess.run(
            ["git", "rev-parse", "--short", "HEAD"],
            cwd=root,
            capture_output=True,
            text=True,
            timeout=5,
        )
        if rev.returncode == 0:
            return "%s+g%s" % (__version__, rev.stdout.strip())
    except OSError:
        pass
    return __version__


def run_experiment(cfg):
    """Execute the configured experiment and write its artifacts."""
    start = time.perf_counter()
    runners = {
        "order-study": _run_order_study,
        "properties": _run_properties,
        "jacobian-check": _run_jacobian_check,
        "harmonic-esjd": _run_harmonic_esjd,
        "sample": _run_sample,
        "robustness": _run_robustness,
    }
    output = runners[cfg.experiment](cfg)
    sample_files = {}
    if cfg.experiment == "sample":
        rows, extra, failures, sample_files = output
    else:
        rows, extra, failures = output

    out_dir = Path(cfg.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_results_csv(out_dir / "results.csv", rows)
    for method, chains in sample_files.items():
        write_samples_csv(out_dir / ("samples-%s.csv" % method), chains)
    manifest = {
        "experiment": cfg.experiment,
        "config": cfg.normalized(),
        "seed": cfg.seed,
        "version": version_string(),
        "wall_clock_seconds": time.perf_counter() - start,
        "failures": failures,
    }
    manifest.update(extra)
    with open(out_dir / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True, default=float)
        fh.write("\n")

    for line in failures:
        print("FAIL %s" % line)
    print(
        "%s: wrote %d result rows to %s (%s)"
        % (cfg.experiment, len(rows), out_dir / "results.csv",
           "FAIL" if failures else "ok")
    )
    return 2 if failures else 0


def main(argv=None):
    try:
        cfg = parse_config(argv)
    except ConfigError as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return 1
    try:
        return run_experiment(cfg)
    except OSError as exc:
        print("io error: %s" % exc, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
