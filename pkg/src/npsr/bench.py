"""Experiment harness: sweep noise levels, run all solvers, emit CSV.

For each (noise level, trial) pair a child seed is derived from
(master_seed, level index, trial index); dictionary, signal, and noise are
freshly drawn from it and every solver runs on the identical instance.
Records are canonically sorted before writing so the output is independent
of execution order.

The results CSV columns are, exactly and in order:
solver_id,noise_level,snr_db,rel_error,iterations,wall_time_s,trial_index,seed
Floats carry 9 significant digits. A solver failure yields a sentinel row
(rel_error = nan) instead of aborting the sweep; summarize() excludes
sentinels from the means and reports their count. The solver_id column is
an open vocabulary, so rows from external solvers (e.g. a Bayesian one)
can be merged into the same file.

noise_level is the variance of the base noise component: the full variance
for gaussian and laplace kinds, and the non-impulse component's variance
for the mixture kind (its total variance is (1-eps+eps*kappa) times that).
"""

import argparse
import csv
import logging
import sys
import time
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .baselines import LassoConfig, OmpConfig, lasso_ista_with_stats, omp_with_stats
from .model import (
    NoiseModel,
    make_instance,
    reconstruction_error,
    snr_db,
)
from .solver import NpsrConfig, solve

log = logging.getLogger(__name__)

CSV_COLUMNS = (
    "solver_id",
    "noise_level",
    "snr_db",
    "rel_error",
    "iterations",
    "wall_time_s",
    "trial_index",
    "seed",
)
SUMMARY_COLUMNS = (
    "solver_id",
    "noise_level",
    "mean_snr_db",
    "mean_rel_error",
    "std_rel_error",
    "trials",
    "errors",
)

BENCH_NOISE_KINDS = ("gaussian", "laplace", "mixture")
DEFAULT_SOLVERS = ("npsr", "omp", "lasso")


@dataclass(frozen=True)
class ExperimentSpec:
    m: int
    n: int
    k: int
    noise_kind: str
    noise_levels: tuple
    trials: int
    master_seed: int
    solvers: tuple = DEFAULT_SOLVERS
    solver_params: dict = field(default_factory=dict)
    mixture_epsilon: float = 0.01
    mixture_kappa: float = 1000.0
    timing: bool = True

    def __post_init__(self):
        if not 1 <= self.m < self.n:
            raise ValueError(f"need 1 <= M < N, got M={self.m}, N={self.n}")
        if not 1 <= self.k <= self.n // 4:
            raise ValueError(f"need 1 <= K <= N/4, got K={self.k}, N={self.n}")
        if self.noise_kind not in BENCH_NOISE_KINDS:
            raise ValueError(f"noise_kind must be one of {BENCH_NOISE_KINDS}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if len(self.noise_levels) == 0:
            raise ValueError("noise level grid must be nonempty")
        if any(not lv > 0 for lv in self.noise_levels):
            raise ValueError("noise levels must be positive variances")
        unknown = set(self.solvers) - set(DEFAULT_SOLVERS)
        if unknown:
            raise ValueError(f"unknown solver ids: {sorted(unknown)}")


@dataclass(frozen=True)
class TrialRecord:
    solver_id: str
    noise_level: float
    snr_db: float
    rel_error: float
    iterations: int
    wall_time_s: float
    trial_index: int
    seed: int


def _level_grid(snr_db_hi, snr_db_lo, count, signal_power):
    # variance values whose nominal SNR spans [hi, lo] dB for this problem size
    hi = signal_power / 10.0 ** (snr_db_hi / 10.0)
    lo = signal_power / 10.0 ** (snr_db_lo / 10.0)
    return tuple(float(x) for x in np.geomspace(hi, lo, count))


def desk_spec(noise_kind="gaussian", master_seed=2024):
    """Small sweep sized for CI: M=100, N=300, K=10, 50 trials, 10 levels
    spanning roughly -5..25 dB nominal SNR."""
    return ExperimentSpec(
        m=100, n=300, k=10,
        noise_kind=noise_kind,
        noise_levels=_level_grid(25.0, -5.0, 10, 10 / 300),
        trials=50,
        master_seed=master_seed,
    )


def paper_spec(noise_kind="gaussian", master_seed=2024):
    """Full-size sweep: M=300, N=1000, K=20, 1000 trials, 10 levels."""
    return ExperimentSpec(
        m=300, n=1000, k=20,
        noise_kind=noise_kind,
        noise_levels=_level_grid(25.0, -5.0, 10, 20 / 1000),
        trials=1000,
        master_seed=master_seed,
    )


def _noise_model(spec, level):
    if spec.noise_kind == "gaussian":
        return NoiseModel.gaussian(np.sqrt(level))
    if spec.noise_kind == "laplace":
        return NoiseModel.double_exponential(np.sqrt(level / 2.0))
    return NoiseModel.impulsive_mixture(
        np.sqrt(level), epsilon=spec.mixture_epsilon, kappa=spec.mixture_kappa
    )


def trial_seed(master_seed, level_index, trial_index):
    """Collision-free child seed for one (level, trial) cell."""
    ss = np.random.SeedSequence((master_seed, level_index, trial_index))
    return int(ss.generate_state(1, np.uint64)[0])


def _npsr_config(params):
    kwargs = {}
    if "lambda" in params:
        kwargs["lam"] = float(params["lambda"])
    if "lambda_rel" in params:
        kwargs["lam_rel"] = float(params["lambda_rel"])
    if "score" in params:
        kwargs["score"] = str(params["score"])
    if "max_iter" in params:
        kwargs["max_iter"] = int(params["max_iter"])
    if "xi" in params:
        kwargs["xi"] = float(params["xi"])
    if "stall_tol" in params:
        kwargs["stall_tol"] = float(params["stall_tol"])
    return NpsrConfig(**kwargs)


def _omp_config(params, k):
    return OmpConfig(
        max_atoms=int(params.get("max_atoms", k)),
        residual_threshold=float(params.get("residual_threshold", 0.0)),
    )


def _lasso_config(params):
    kwargs = {}
    if "lambda" in params:
        kwargs["lam"] = float(params["lambda"])
    if "lambda_rel" in params:
        kwargs["lam_rel"] = float(params["lambda_rel"])
    if "max_iter" in params:
        kwargs["max_iter"] = int(params["max_iter"])
    if "tol" in params:
        kwargs["tol"] = float(params["tol"])
    return LassoConfig(**kwargs)


def _run_solver(solver_id, instance, spec):
    params = spec.solver_params.get(solver_id, {})
    if solver_id == "npsr":
        result = solve(instance, _npsr_config(params))
        return result.estimate, result.iterations
    if solver_id == "omp":
        return omp_with_stats(instance, _omp_config(params, spec.k))
    if solver_id == "lasso":
        return lasso_ista_with_stats(instance, _lasso_config(params))
    raise ValueError(f"unknown solver id {solver_id!r}")


def run_experiment(spec: ExperimentSpec):
    """All trial records for the sweep, canonically sorted."""
    records = []
    for level_index, level in enumerate(spec.noise_levels):
        model = _noise_model(spec, level)
        for trial_index in range(spec.trials):
            seed = trial_seed(spec.master_seed, level_index, trial_index)
            instance = make_instance(spec.m, spec.n, spec.k, model, seed)
            inst_snr_db = snr_db(instance.truth, instance.noise)
            for solver_id in spec.solvers:
                t0 = time.perf_counter()
                try:
                    estimate, iterations = _run_solver(solver_id, instance, spec)
                    rel = reconstruction_error(instance.truth, estimate)
                except Exception:  # sentinel row; never abort the sweep
                    log.warning(
                        "solver %s failed on level=%g trial=%d",
                        solver_id, level, trial_index, exc_info=True,
                    )
                    rel, iterations = float("nan"), 0
                wall = time.perf_counter() - t0 if spec.timing else 0.0
                records.append(TrialRecord(
                    solver_id=solver_id,
                    noise_level=level,
                    snr_db=inst_snr_db,
                    rel_error=rel,
                    iterations=iterations,
                    wall_time_s=wall,
                    trial_index=trial_index,
                    seed=seed,
                ))
    records.sort(key=lambda rec: (rec.solver_id, rec.noise_level, rec.trial_index))
    return records


@dataclass(frozen=True)
class SummaryRow:
    solver_id: str
    noise_level: float
    mean_snr_db: float
    mean_rel_error: float
    std_rel_error: float
    trials: int
    errors: int


def summarize(records):
    """Per (solver, level) means; sentinel-error records are excluded from
    the means but counted. Output is independent of record order."""
    if not records:
        raise ValueError("cannot summarize an empty record set")
    groups = {}
    for rec in records:
        groups.setdefault((rec.solver_id, rec.noise_level), []).append(rec)
    rows = []
    for (solver_id, level), recs in sorted(groups.items()):
        ok = [r for r in recs if np.isfinite(r.rel_error)]
        errors = len(recs) - len(ok)
        # sort values so the float accumulation order is canonical
        rels = np.sort([r.rel_error for r in ok])
        snrs = np.sort([r.snr_db for r in ok])
        rows.append(SummaryRow(
            solver_id=solver_id,
            noise_level=level,
            mean_snr_db=float(np.mean(snrs)) if ok else float("nan"),
            mean_rel_error=float(np.mean(rels)) if ok else float("nan"),
            std_rel_error=float(np.std(rels, ddof=1)) if len(ok) > 1 else 0.0,
            trials=len(ok),
            errors=errors,
        ))
    return rows


def _fmt(x):
    return format(float(x), ".9g")


def write_records_csv(records, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for r in records:
            writer.writerow([
                r.solver_id, _fmt(r.noise_level), _fmt(r.snr_db), _fmt(r.rel_error),
                r.iterations, _fmt(r.wall_time_s), r.trial_index, r.seed,
            ])


def read_records_csv(path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ValueError(f"{path}: empty results file")
        if tuple(header) != CSV_COLUMNS:
            expected, got = set(CSV_COLUMNS), set(header)
            missing = sorted(expected - got)
            extra = sorted(got - expected)
            detail = []
            if missing:
                detail.append(f"missing columns {missing}")
            if extra:
                detail.append(f"unexpected columns {extra}")
            if not detail:
                detail.append(f"column order must be {','.join(CSV_COLUMNS)}")
            raise ValueError(f"{path}: results schema mismatch: " + "; ".join(detail))
        records = []
        for row in reader:
            records.append(TrialRecord(
                solver_id=row[0],
                noise_level=float(row[1]),
                snr_db=float(row[2]),
                rel_error=float(row[3]),
                iterations=int(row[4]),
                wall_time_s=float(row[5]),
                trial_index=int(row[6]),
                seed=int(row[7]),
            ))
    return records


def write_summary_csv(rows, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SUMMARY_COLUMNS)
        for r in rows:
            writer.writerow([
                r.solver_id, _fmt(r.noise_level), _fmt(r.mean_snr_db),
                _fmt(r.mean_rel_error), _fmt(r.std_rel_error), r.trials, r.errors,
            ])


_SPEC_SCALARS = {
    "m": int,
    "n": int,
    "k": int,
    "noise_kind": str,
    "trials": int,
    "master_seed": int,
}


def parse_spec_text(text):
    """Parse the plain-text key-value experiment format.

    One `key = value` per line; '#' starts a comment. Dotted keys carry
    per-solver parameters (npsr.lambda, npsr.score, lasso.lambda,
    omp.max_atoms, ...) and the mixture parameters (mixture.epsilon,
    mixture.kappa).
    """
    fields = {}
    solver_params = {}
    extras = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"spec line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if "." in key:
            prefix, sub = key.split(".", 1)
            if prefix == "mixture":
                extras[sub] = float(value)
            else:
                solver_params.setdefault(prefix, {})[sub] = value
            continue
        if key in _SPEC_SCALARS:
            fields[key] = _SPEC_SCALARS[key](value)
        elif key == "noise_levels":
            fields["noise_levels"] = tuple(
                float(part) for part in value.split(",") if part.strip()
            )
        elif key == "solvers":
            fields["solvers"] = tuple(
                part.strip() for part in value.split(",") if part.strip()
            )
        elif key == "timing":
            fields["timing"] = value.lower() in ("on", "true", "1", "yes")
        else:
            raise ValueError(f"spec line {lineno}: unknown key {key!r}")
    missing = [k for k in ("m", "n", "k", "noise_kind", "noise_levels", "trials", "master_seed")
               if k not in fields]
    if missing:
        raise ValueError(f"spec is missing required keys: {missing}")
    bad = set(solver_params) - set(DEFAULT_SOLVERS)
    if bad:
        raise ValueError(f"spec has parameters for unknown solvers: {sorted(bad)}")
    if "epsilon" in extras:
        fields["mixture_epsilon"] = extras["epsilon"]
    if "kappa" in extras:
        fields["mixture_kappa"] = extras["kappa"]
    return ExperimentSpec(solver_params=solver_params, **fields)


def parse_spec_file(path):
    with open(path) as fh:
        return parse_spec_text(fh.read())


def spec_to_text(spec):
    """Serialize a spec back to the plain-text key-value format."""
    lines = [
        f"m = {spec.m}",
        f"n = {spec.n}",
        f"k = {spec.k}",
        f"noise_kind = {spec.noise_kind}",
        "noise_levels = " + ", ".join(_fmt(lv) for lv in spec.noise_levels),
        f"trials = {spec.trials}",
        f"master_seed = {spec.master_seed}",
        "solvers = " + ",".join(spec.solvers),
        f"timing = {'on' if spec.timing else 'off'}",
    ]
    if spec.noise_kind == "mixture":
        lines.append(f"mixture.epsilon = {_fmt(spec.mixture_epsilon)}")
        lines.append(f"mixture.kappa = {_fmt(spec.mixture_kappa)}")
    for solver_id in sorted(spec.solver_params):
        for key, value in sorted(spec.solver_params[solver_id].items()):
            lines.append(f"{solver_id}.{key} = {value}")
    return "\n".join(lines) + "\n"


def _cmd_run(args):
    if args.spec and args.scale:
        raise SystemExit("pass either --spec or --scale, not both")
    if args.spec:
        spec = parse_spec_file(args.spec)
    else:
        spec = desk_spec() if (args.scale or "desk") == "desk" else paper_spec()
    if args.seed is not None:
        spec = replace(spec, master_seed=args.seed)
    if args.solvers:
        chosen = tuple(s.strip() for s in args.solvers.split(",") if s.strip())
        spec = replace(spec, solvers=chosen)
    if args.no_timing:
        spec = replace(spec, timing=False)
    records = run_experiment(spec)
    write_records_csv(records, args.out)
    print(f"wrote {len(records)} records to {args.out}")


def _cmd_summarize(args):
    records = read_records_csv(args.infile)
    rows = summarize(records)
    write_summary_csv(rows, args.out)
    print(f"wrote {len(rows)} summary rows to {args.out}")


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="bench",
        description="Noise-robustness benchmark for sparse recovery solvers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a sweep and write the results CSV")
    p_run.add_argument("--spec", help="experiment spec file (key = value lines)")
    p_run.add_argument("--scale", choices=("desk", "paper"),
                       help="built-in preset used when no --spec is given")
    p_run.add_argument("--out", required=True, help="output results CSV path")
    p_run.add_argument("--seed", type=int, help="override the master seed")
    p_run.add_argument("--solvers", help="comma-separated subset of npsr,omp,lasso")
    p_run.add_argument("--no-timing", action="store_true",
                       help="write wall_time_s as 0 for byte-reproducible output")
    p_run.set_defaults(func=_cmd_run)

    p_sum = sub.add_parser("summarize", help="aggregate a results CSV")
    p_sum.add_argument("--in", dest="infile", required=True, help="results CSV")
    p_sum.add_argument("--out", required=True, help="output summary CSV path")
    p_sum.set_defaults(func=_cmd_summarize)

    args = parser.parse_args(argv)
    args.func(args)
    return 0


if __name__ == "__main__":
    sys.exit(main())
