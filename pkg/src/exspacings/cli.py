"""Command-line surface.

Every command resolves its configuration from an optional JSON file
(``--config``) overlaid by explicitly passed flags, validates it, runs the
corresponding library operation, writes a JSON summary (plus CSV/TSV detail
files where applicable) into ``--output-dir``, and echoes the summary to
stdout.  Floating-point values are serialized with 17 significant digits so
identical runs produce byte-identical reports.

Exit codes: 0 success; 2 validation error (bad flags or config); 3 domain or
condition error (e.g. a weight whose spacing ratio is unbounded).
"""

from __future__ import annotations

import json
import math
import sys
from pathlib import Path

import click
import numpy as np

from . import __version__
from .asymptotics import (
    MdpConfig,
    clt_check,
    gz_equivalence_check,
    verify_ldp,
    verify_mdp,
)
from .entropy import (
    EntropySpec,
    empirical_entropy,
    entropy_direct,
    read_sample,
)
from .errors import (
    ConditionError,
    DivergenceError,
    ExspacingsError,
    ValidationError,
)
from .rate import (
    build_engine,
    check_steepness,
    lambda_w,
    lambda_w_prime,
    lambda_w_second,
    legendre,
    m_minimizer,
    m_upper_bound,
    moment_summary,
)
from .sampler import SimConfig, sample_cn, sample_cn_tilted
from .weights import (
    ScoreFunction,
    box_score,
    check_condition1,
    check_condition2,
    jtilde_score,
    parse_weight,
)

__all__ = ["main", "cli"]


# ---------------------------------------------------------------------------
# deterministic serialization


def _fmt_float(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return format(x, ".17g")


def _dump_json(obj, indent: int = 0) -> str:
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            f"{inner}{json.dumps(str(k))}: {_dump_json(v, indent + 1)}"
            for k, v in obj.items()
        ]
        return "{\n" + ",\n".join(items) + f"\n{pad}}}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{inner}{_dump_json(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + f"\n{pad}]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    return json.dumps(obj)


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        x = float(v)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return format(x, ".17g")
    return str(v)


def _write_csv(path: Path, header, rows):
    lines = [",".join(header)]
    lines += [",".join(_csv_cell(c) for c in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")


def _write_tsv(path: Path, pairs):
    lines = [f"{_csv_cell(a)}\t{_csv_cell(b)}" for a, b in pairs]
    path.write_text("\n".join(lines) + "\n")


def _emit_summary(command: str, config: dict, payload: dict, outdir: Path):
    # the worker-thread cap is an execution detail, not part of the
    # experiment: identical configs must give byte-identical reports at any
    # thread count
    config = {k: v for k, v in config.items() if k != "threads"}
    summary = {
        "command": command,
        "version": __version__,
        "config": config,
        "result": payload,
    }
    text = _dump_json(summary) + "\n"
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / f"{command}.json").write_text(text)
    click.echo(text, nl=False)


# ---------------------------------------------------------------------------
# config resolution


def _resolve_config(ctx: click.Context, names) -> dict:
    """Defaults < JSON config file < explicitly passed flags; unknown config
    keys are rejected."""
    resolved = {name: ctx.params[name] for name in names}
    config_path = ctx.params.get("config")
    if config_path is not None:
        try:
            data = json.loads(Path(config_path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ValidationError(f"cannot read config {config_path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ValidationError("config file must hold a JSON object")
        unknown = sorted(set(data) - set(names))
        if unknown:
            raise ValidationError(f"unknown config keys: {', '.join(unknown)}")
        resolved.update(data)
    explicit = {
        name
        for name in names
        if ctx.get_parameter_source(name) == click.core.ParameterSource.COMMANDLINE
    }
    for name in explicit:
        resolved[name] = ctx.params[name]
    return resolved


def _floats(v, flag: str):
    if v is None:
        raise ValidationError(f"missing required parameter {flag}")
    if isinstance(v, str):
        v = [p for p in v.split(",") if p.strip()]
    try:
        out = [float(x) for x in v]
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"bad numeric list for {flag}: {v!r}") from exc
    if not out:
        raise ValidationError(f"empty list for {flag}")
    return out


def _ints(v, flag: str):
    out = _floats(v, flag)
    ints = [int(x) for x in out]
    if any(i != x for i, x in zip(ints, out)):
        raise ValidationError(f"{flag} must hold integers, got {v!r}")
    return ints


def _require(cfg: dict, key: str):
    if cfg.get(key) is None:
        raise ValidationError(f"missing required parameter --{key.replace('_', '-')}")
    return cfg[key]


def _positive(value: float, flag: str) -> float:
    value = float(value)
    if not value > 0.0:
        raise ValidationError(f"{flag} must be positive, got {value}")
    return value


def _apply_threads(threads):
    if threads is None:
        return
    threads = int(threads)
    if threads < 1:
        raise ValidationError(f"--threads must be >= 1, got {threads}")
    try:
        import numba

        # cap at the thread budget numba sized at startup; results are
        # thread-count invariant either way
        numba.set_num_threads(min(threads, numba.config.NUMBA_NUM_THREADS))
    except ImportError:
        pass


def parse_score(name: str) -> ScoreFunction:
    s = name.strip().lower()
    if s == "jtilde":
        return jtilde_score()
    parts = s.split(":")
    if parts[0] == "box":
        try:
            if len(parts) == 1:
                return box_score()
            if len(parts) == 3:
                return box_score(float(parts[1]), float(parts[2]))
        except ValueError as exc:
            raise ValidationError(f"bad score parameter in {name!r}: {exc}") from exc
    raise ValidationError(f"unknown score function {name!r}")


# ---------------------------------------------------------------------------
# shared options


def _common_options(fn):
    fn = click.option(
        "--output-dir",
        "output_dir",
        default=".",
        show_default=True,
        help="Directory for report files.",
    )(fn)
    fn = click.option(
        "--config",
        "config",
        default=None,
        help="JSON config file; flags override its values.",
    )(fn)
    fn = click.option(
        "--threads",
        "threads",
        type=int,
        default=None,
        help="Worker thread cap for Monte Carlo kernels.",
    )(fn)
    return fn


def _weight_lambda_options(fn):
    fn = click.option(
        "--weight",
        "weight",
        default=None,
        help="Weight family: w1, w2, w3, poly:<beta>, fgce:<alpha>, fcre:<q>, score:<name>.",
    )(fn)
    fn = click.option("--lambda", "lam", type=float, default=1.0, show_default=True)(fn)
    return fn


@click.group()
def cli():
    """Weighted exponential-spacing statistics: rate functions, simulation,
    deviation-principle verification, and entropy estimation."""


# ---------------------------------------------------------------------------
# check


@cli.command("check")
@_weight_lambda_options
@_common_options
@click.pass_context
def cmd_check(ctx, **_kwargs):
    cfg = _resolve_config(ctx, ["weight", "lam", "output_dir", "threads"])
    _apply_threads(cfg["threads"])
    wf = parse_weight(_require(cfg, "weight"))
    lam = _positive(cfg["lam"], "--lambda")
    c1 = check_condition1(wf)
    c2 = check_condition2(wf, lam)
    payload = {
        "weight": wf.name,
        "condition1": c1.holds,
        "condition1_witness": c1.witness,
        "condition2": c2.holds,
        "sup_h": c2.sup_h,
        "inf_h": c2.inf_h,
        "steep": None,
        "boundary_slope": None,
    }
    if c2.holds:
        engine = build_engine(wf, lam)
        rep = check_steepness(engine)
        payload["steep"] = rep.steep
        payload["boundary_slope"] = rep.boundary_slope
    _emit_summary("check", cfg, payload, Path(cfg["output_dir"]))


# ---------------------------------------------------------------------------
# rate


@cli.command("rate")
@_weight_lambda_options
@click.option("--theta", type=float, default=None, help="Evaluate at a single theta.")
@click.option(
    "--theta-points", "theta_points", type=int, default=50, show_default=True
)
@click.option(
    "--y-grid",
    "y_grid",
    default=None,
    help="Comma-separated y values for the transform table.",
)
@_common_options
@click.pass_context
def cmd_rate(ctx, **_kwargs):
    cfg = _resolve_config(
        ctx,
        ["weight", "lam", "theta", "theta_points", "y_grid", "output_dir", "threads"],
    )
    _apply_threads(cfg["threads"])
    wf = parse_weight(_require(cfg, "weight"))
    lam = _positive(cfg["lam"], "--lambda")
    engine = build_engine(wf, lam)
    summary = moment_summary(engine)
    steep = check_steepness(engine)

    if cfg["theta"] is not None:
        thetas = [float(cfg["theta"])]
    else:
        pts = int(cfg["theta_points"])
        if pts < 2:
            raise ValidationError("--theta-points must be >= 2")
        lo = engine.theta_min if math.isfinite(engine.theta_min) else -5.0 * lam
        hi = 0.99 * engine.theta_max if math.isfinite(engine.theta_max) else 5.0 * lam
        thetas = list(np.linspace(lo, hi, pts))
    theta_rows = [
        (
            th,
            lambda_w(engine, th),
            lambda_w_prime(engine, th),
            lambda_w_second(engine, th),
        )
        for th in thetas
    ]

    if cfg["y_grid"] is not None:
        ys = _floats(cfg["y_grid"], "--y-grid")
    else:
        ys = list(np.linspace(0.1 / lam, 10.0 / lam, 50))
    y_rows = [(y, legendre(engine, y), m_upper_bound(engine, y)) for y in ys]

    try:
        y_bar = m_minimizer(engine)
    except DivergenceError:
        y_bar = None

    outdir = Path(cfg["output_dir"])
    outdir.mkdir(parents=True, exist_ok=True)
    _write_csv(
        outdir / "rate_theta.csv",
        ["theta", "lambda_w", "lambda_w_prime", "lambda_w_second"],
        theta_rows,
    )
    _write_csv(outdir / "rate_y.csv", ["y", "legendre", "m_upper"], y_rows)
    payload = {
        "weight": wf.name,
        "mu": summary.mu,
        "sigma2": summary.sigma2,
        "gamma": summary.gamma,
        "lyapunov": summary.lyapunov,
        "steep": steep.steep,
        "boundary_slope": steep.boundary_slope,
        "theta_domain": [engine.theta_min, engine.theta_max],
        "y_bar": y_bar,
    }
    _emit_summary("rate", cfg, payload, outdir)


# ---------------------------------------------------------------------------
# simulate


@cli.command("simulate")
@_weight_lambda_options
@click.option("--n", type=int, default=None, help="Sample size.")
@click.option("--replicates", type=int, default=10_000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--theta", type=float, default=None, help="Importance-sampling tilt.")
@_common_options
@click.pass_context
def cmd_simulate(ctx, **_kwargs):
    cfg = _resolve_config(
        ctx,
        ["weight", "lam", "n", "replicates", "seed", "theta", "output_dir", "threads"],
    )
    _apply_threads(cfg["threads"])
    wf = parse_weight(_require(cfg, "weight"))
    lam = _positive(cfg["lam"], "--lambda")
    n = int(_require(cfg, "n"))
    sim = SimConfig(
        n=n,
        lam=lam,
        seed=int(cfg["seed"]),
        replicates=int(cfg["replicates"]),
        tilt_theta=None if cfg["theta"] is None else float(cfg["theta"]),
    )
    if sim.tilt_theta is None:
        values = sample_cn(wf, sim)
        log_weights = [None] * values.size
    else:
        draws = sample_cn_tilted(wf, sim)
        values = draws.values
        log_weights = list(draws.log_weights)
    outdir = Path(cfg["output_dir"])
    outdir.mkdir(parents=True, exist_ok=True)
    _write_csv(
        outdir / "simulate.csv",
        ["replicate", "value", "log_weight"],
        [(i, float(v), lw) for i, (v, lw) in enumerate(zip(values, log_weights))],
    )
    payload = {
        "weight": wf.name,
        "n": n,
        "replicates": sim.replicates,
        "mean": float(np.mean(values)),
        "variance": float(np.var(values)),
        "tilted": sim.tilt_theta is not None,
    }
    _emit_summary("simulate", cfg, payload, outdir)


# ---------------------------------------------------------------------------
# verify-ldp


@cli.command("verify-ldp")
@_weight_lambda_options
@click.option("--y-grid", "y_grid", default=None, help="Comma-separated thresholds.")
@click.option("--n-list", "n_list", default=None, help="Comma-separated sample sizes.")
@click.option("--replicates", type=int, default=100_000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@_common_options
@click.pass_context
def cmd_verify_ldp(ctx, **_kwargs):
    cfg = _resolve_config(
        ctx,
        [
            "weight",
            "lam",
            "y_grid",
            "n_list",
            "replicates",
            "seed",
            "output_dir",
            "threads",
        ],
    )
    _apply_threads(cfg["threads"])
    wf = parse_weight(_require(cfg, "weight"))
    lam = _positive(cfg["lam"], "--lambda")
    ys = _floats(_require(cfg, "y_grid"), "--y-grid")
    ns = _ints(_require(cfg, "n_list"), "--n-list")
    report = verify_ldp(
        wf, lam, ys, ns, replicates=int(cfg["replicates"]), seed=int(cfg["seed"])
    )
    outdir = Path(cfg["output_dir"])
    outdir.mkdir(parents=True, exist_ok=True)
    _write_csv(
        outdir / "ldp.csv",
        [
            "n",
            "y",
            "p_hat",
            "std_error",
            "emp_rate",
            "analytic_rate",
            "theta",
            "ess",
            "low_ess",
        ],
        [
            (
                r.n,
                r.y,
                r.p_hat,
                r.std_error,
                r.emp_rate,
                r.analytic_rate,
                r.theta,
                r.ess,
                r.low_ess,
            )
            for r in report.rows
        ],
    )
    by_n = {}
    for r in report.rows:
        by_n.setdefault(r.n, []).append(abs(r.emp_rate - r.analytic_rate))
    _write_tsv(
        outdir / "ldp_gap.tsv",
        [(n, float(np.mean(g))) for n, g in sorted(by_n.items())],
    )
    n_max = max(ns)
    _write_tsv(
        outdir / "ldp_rate.tsv",
        [(r.y, r.emp_rate) for r in report.rows if r.n == n_max],
    )
    payload = {
        "weight": wf.name,
        "rows": len(report.rows),
        "max_abs_gap": max(abs(r.emp_rate - r.analytic_rate) for r in report.rows),
        "any_low_ess": any(r.low_ess for r in report.rows),
    }
    _emit_summary("verify-ldp", cfg, payload, outdir)


# ---------------------------------------------------------------------------
# verify-mdp


@cli.command("verify-mdp")
@_weight_lambda_options
@click.option("--rho", type=float, default=0.5, show_default=True)
@click.option("--n-list", "n_list", default=None, help="Comma-separated sample sizes.")
@click.option("--y-grid", "y_grid", default=None, help="Comma-separated thresholds.")
@click.option("--replicates", type=int, default=100_000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@_common_options
@click.pass_context
def cmd_verify_mdp(ctx, **_kwargs):
    cfg = _resolve_config(
        ctx,
        [
            "weight",
            "lam",
            "rho",
            "n_list",
            "y_grid",
            "replicates",
            "seed",
            "output_dir",
            "threads",
        ],
    )
    _apply_threads(cfg["threads"])
    wf = parse_weight(_require(cfg, "weight"))
    lam = _positive(cfg["lam"], "--lambda")
    mdp_cfg = MdpConfig(
        rho=float(cfg["rho"]),
        n_list=_ints(_require(cfg, "n_list"), "--n-list"),
        y_grid=_floats(_require(cfg, "y_grid"), "--y-grid"),
        replicates=int(cfg["replicates"]),
        seed=int(cfg["seed"]),
    )
    report = verify_mdp(wf, lam, mdp_cfg)
    outdir = Path(cfg["output_dir"])
    outdir.mkdir(parents=True, exist_ok=True)
    _write_csv(
        outdir / "mdp.csv",
        [
            "n",
            "y",
            "a_n",
            "p_hat",
            "std_error",
            "emp_rate",
            "analytic_rate",
            "theta",
            "ess",
            "zero_count",
        ],
        [
            (
                r.n,
                r.y,
                r.a_n,
                r.p_hat,
                r.std_error,
                r.emp_rate,
                r.analytic_rate,
                r.theta,
                r.ess,
                r.zero_count,
            )
            for r in report.rows
        ],
    )
    by_n = {}
    for r in report.rows:
        by_n.setdefault(r.n, []).append(abs(r.emp_rate - r.analytic_rate))
    _write_tsv(
        outdir / "mdp_gap.tsv",
        [(n, float(np.mean(g))) for n, g in sorted(by_n.items())],
    )
    n_max = max(mdp_cfg.n_list)
    _write_tsv(
        outdir / "mdp_rate.tsv",
        [(r.y, r.emp_rate) for r in report.rows if r.n == n_max],
    )
    payload = {
        "weight": wf.name,
        "rho": report.rho,
        "sigma2": report.sigma2,
        "rows": len(report.rows),
        "any_zero_count": any(r.zero_count for r in report.rows),
    }
    _emit_summary("verify-mdp", cfg, payload, outdir)


# ---------------------------------------------------------------------------
# clt


@cli.command("clt")
@_weight_lambda_options
@click.option("--n", type=int, default=10_000, show_default=True)
@click.option("--replicates", type=int, default=10_000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@_common_options
@click.pass_context
def cmd_clt(ctx, **_kwargs):
    cfg = _resolve_config(
        ctx, ["weight", "lam", "n", "replicates", "seed", "output_dir", "threads"]
    )
    _apply_threads(cfg["threads"])
    wf = parse_weight(_require(cfg, "weight"))
    lam = _positive(cfg["lam"], "--lambda")
    report = clt_check(
        wf, lam, n=int(cfg["n"]), replicates=int(cfg["replicates"]), seed=int(cfg["seed"])
    )
    payload = {
        "weight": wf.name,
        "n": report.n,
        "replicates": report.replicates,
        "sample_var": report.sample_var,
        "target_sigma2": report.target_sigma2,
        "ks_distance": report.ks_distance,
    }
    _emit_summary("clt", cfg, payload, Path(cfg["output_dir"]))


# ---------------------------------------------------------------------------
# entropy


@cli.command("entropy")
@click.option("--input", "input_file", default=None, help="Sample file (text or CSV).")
@click.option("--column", default=None, help="CSV column holding the sample.")
@click.option(
    "--kind",
    type=click.Choice(["ce", "fgce", "fcre"]),
    default="ce",
    show_default=True,
)
@click.option("--alpha", type=float, default=None)
@click.option("--q", type=float, default=None)
@_common_options
@click.pass_context
def cmd_entropy(ctx, **_kwargs):
    cfg = _resolve_config(
        ctx, ["input_file", "column", "kind", "alpha", "q", "output_dir", "threads"]
    )
    _apply_threads(cfg["threads"])
    spec = EntropySpec(kind=cfg["kind"], alpha=cfg["alpha"], q=cfg["q"])
    sample = read_sample(_require(cfg, "input_file"), column=cfg["column"])
    estimate = empirical_entropy(spec, sample)
    direct = entropy_direct(spec, sample)
    payload = {
        "estimate": estimate,
        "estimate_direct": direct,
        "n": int(sample.size),
        "spec": spec.label(),
    }
    _emit_summary("entropy", cfg, payload, Path(cfg["output_dir"]))


# ---------------------------------------------------------------------------
# bridge


@cli.command("bridge")
@click.option("--score", default=None, help="Score function: jtilde or box[:a:b].")
@click.option("--lambda", "lam", type=float, default=1.0, show_default=True)
@click.option("--tol", type=float, default=1e-5, show_default=True)
@_common_options
@click.pass_context
def cmd_bridge(ctx, **_kwargs):
    cfg = _resolve_config(ctx, ["score", "lam", "tol", "output_dir", "threads"])
    _apply_threads(cfg["threads"])
    J = parse_score(_require(cfg, "score"))
    lam = _positive(cfg["lam"], "--lambda")
    report = gz_equivalence_check(J, lam, tol=float(cfg["tol"]))
    payload = {
        "score": J.name,
        "m_gz": report.m_gz,
        "mu_weight": report.mu_weight,
        "sigma2_gz": report.sigma2_gz,
        "sigma2_weight": report.sigma2_weight,
        "max_abs_gap": report.max_abs_gap,
        "pass": report.max_abs_gap <= float(cfg["tol"]),
    }
    _emit_summary("bridge", cfg, payload, Path(cfg["output_dir"]))


# ---------------------------------------------------------------------------
# entry point


def main(argv=None):
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Abort:
        sys.exit(130)
    except click.exceptions.ClickException as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        sys.exit(2)
    except ValidationError as exc:
        click.echo(f"validation error: {exc}", err=True)
        sys.exit(2)
    except ExspacingsError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(3)
    sys.exit(0)


if __name__ == "__main__":
    main()
