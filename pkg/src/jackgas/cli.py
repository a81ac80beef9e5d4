"""Command line interface.

Every command reads an optional JSON config whose keys are the same as the
long flags (with dashes or underscores); flags given on the command line win.
Exit codes: 0 success, 1 a check failed, 2 bad configuration or usage.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Optional

import click
import numpy as np

from . import __version__
from .ensemble import CaseParams, ParameterError, build_model
from .sampler import ChainConfig, ConfigurationError, empirical_measure, run_chains

PARAM_KEYS = ("case", "theta", "N", "M", "a", "b", "t", "t1", "t2", "d", "cutoff")


class CheckFailed(Exception):
    pass


def fmt(x) -> str:
    """17 significant digits, so values round-trip exactly."""
    return format(float(x), ".17g")


def sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def write_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def emit(obj, out: Optional[str] = None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True)
    if out:
        Path(out).write_text(text + "\n")
    click.echo(text)


# -- configuration -------------------------------------------------------------


def _load_config(path) -> dict:
    if path is None:
        return {}
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigurationError("config must be a JSON object")
    if "config" in data and "version" in data:
        # a run manifest: re-use its resolved config
        data = dict(data["config"])
    params = data.pop("params", {})
    merged = {k.replace("-", "_"): v for k, v in data.items()}
    merged.update(params)
    return merged


def resolve(config_path, flags: dict) -> dict:
    """Config file values overridden by explicitly given flags."""
    cfg = _load_config(config_path)
    for k, v in flags.items():
        if v is not None:
            cfg[k] = v
    return cfg


def case_params(cfg: dict) -> CaseParams:
    """Build CaseParams; a ratio m may stand in for M."""
    vals = {k: cfg[k] for k in PARAM_KEYS if cfg.get(k) is not None}
    m = cfg.get("m")
    if m is not None and "M" not in vals:
        if "N" in vals:
            M = m * vals["N"]
            if abs(M - round(M)) > 1e-9:
                raise ParameterError(f"m * N = {M} is not an integer")
            vals["M"] = int(round(M))
        else:
            q = Fraction(m).limit_denominator(10**6)
            vals["N"], vals["M"] = q.denominator, q.numerator
    if "case" not in vals:
        raise ParameterError("no case given")
    return CaseParams.from_dict(vals)


def param_options(f):
    opts = [
        click.option("--config", "config", type=click.Path(dir_okay=False), help="JSON config file."),
        click.option("--case", type=click.Choice(["I", "II", "III", "IV", "V", "VI"])),
        click.option("--theta", type=float),
        click.option("--N", "N", type=int),
        click.option("--M", "M", type=int),
        click.option("--m", "m", type=float, help="M/N, used when M is not given."),
        click.option("--a", type=float),
        click.option("--b", type=float),
        click.option("--t", type=float),
        click.option("--t1", type=float),
        click.option("--t2", type=float),
        click.option("--d", type=int, help="Box multiplier (Cases IV-VI)."),
        click.option("--cutoff", type=float, help="Part cutoff as a multiple of N (Cases I, III)."),
    ]
    for o in reversed(opts):
        f = o(f)
    return f


def chain_options(f):
    opts = [
        click.option("--steps", type=int, help="Total sweeps per chain."),
        click.option("--burnin", type=int),
        click.option("--thin", type=int),
        click.option("--seed", type=int),
        click.option("--chains", type=int),
        click.option("--start", type=click.Choice(["empty", "full", "classical"])),
        click.option("--R", "R", type=int, help="Override the box bound on parts."),
    ]
    for o in reversed(opts):
        f = o(f)
    return f


def chain_config(cfg: dict) -> ChainConfig:
    return ChainConfig(steps=int(cfg.get("steps", 1000)), burnin=int(cfg.get("burnin", 0)),
                       thin=int(cfg.get("thin", 1)), seed=int(cfg.get("seed", 0)),
                       chains=int(cfg.get("chains", 1)))


def resolved_config(cfg: dict, p: CaseParams, extra=()) -> dict:
    out = {"params": p.to_dict()}
    for k in ("steps", "burnin", "thin", "seed", "chains", "start", "R", *extra):
        if cfg.get(k) is not None:
            out[k] = cfg[k]
    return out


def write_manifest(path, config: dict, outputs, started: float, **extra) -> None:
    man = {
        "config": config,
        "version": __version__,
        "wall_time": time.time() - started,
        "outputs": {str(o): sha256(o) for o in outputs},
    }
    man.update(extra)
    Path(path).write_text(json.dumps(man, indent=2, sort_keys=True) + "\n")


def _run(cfg):
    p = case_params(cfg)
    model = build_model(p, R=cfg.get("R"))
    conf = chain_config(cfg)
    res = run_chains(model, conf, start=cfg.get("start", "empty"))
    return p, model, conf, res


# -- commands ------------------------------------------------------------------


@click.group()
@click.version_option(__version__)
def cli():
    """Jack measures, their beta-ensembles and limit shapes."""


@cli.command()
@param_options
@chain_options
@click.option("--out", type=click.Path(dir_okay=False), help="Sample CSV.")
@click.option("--manifest", type=click.Path(dir_okay=False))
def sample(config, out, manifest, **flags):
    """Run Metropolis chains and write every sample as a CSV row."""
    started = time.time()
    cfg = resolve(config, dict(flags, out=out, manifest=manifest))
    p, model, conf, res = _run(cfg)
    out = cfg.get("out") or "samples.csv"
    rows = []
    for c in range(conf.chains):
        for k, sw in enumerate(res.sweeps):
            rows.append([c, int(sw), " ".join(str(int(v)) for v in res.samples[c, k] if v > 0)])
    write_csv(out, ["chain", "sweep", "lambda"], rows)
    seeds = [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(conf.seed).spawn(conf.chains)]
    write_manifest(cfg.get("manifest") or f"{out}.manifest.json",
                   resolved_config(cfg, p, ("out",)), [out], started,
                   seed=conf.seed, chain_seeds=seeds, K=model.K, box=model.R,
                   acceptance=[float(a) for a in res.acceptance])
    click.echo(f"wrote {len(rows)} samples to {out}")


def _grid(cfg, lo, hi):
    n = int(cfg.get("grid") or 1000)
    if n < 2:
        raise ConfigurationError("grid needs at least two points")
    lo = cfg["lo"] if cfg.get("lo") is not None else lo
    hi = cfg["hi"] if cfg.get("hi") is not None else hi
    return np.linspace(lo, hi, n)


def _grid_options(f):
    for o in reversed([
        click.option("--grid", type=int, help="Number of grid points."),
        click.option("--lo", type=float),
        click.option("--hi", type=float),
        click.option("--out", type=click.Path(dir_okay=False)),
        click.option("--meta", type=click.Path(dir_okay=False), help="JSON metadata file."),
    ]):
        f = o(f)
    return f


@cli.command()
@param_options
@_grid_options
def density(config, grid, lo, hi, out, meta, **flags):
    """Equilibrium density on a grid, in particle coordinates l/K."""
    from .equilibrium import EquilibriumDensity, right_edge
    started = time.time()
    cfg = resolve(config, dict(flags, grid=grid, lo=lo, hi=hi, out=out, meta=meta))
    p = case_params(cfg)
    mu = EquilibriumDensity(p)
    xs = _grid(cfg, 0.0, right_edge(p))
    ys = mu(xs)
    out = cfg.get("out") or "density.csv"
    write_csv(out, ["x", "density"], [[fmt(x), fmt(y)] for x, y in zip(xs, ys)])
    info = {
        "band_endpoints": list(mu.band_endpoints()),
        "regions": [{"lo": r.lo, "hi": r.hi, "kind": r.kind} for r in mu.regions],
        "mass": mu.mass(),
    }
    write_manifest(cfg.get("meta") or f"{out}.json", resolved_config(cfg, p, ("grid", "lo", "hi")),
                   [out], started, **info)
    click.echo(f"wrote {len(xs)} rows to {out}")


@cli.command("nu-density")
@param_options
@_grid_options
def nu_density_cmd(config, grid, lo, hi, out, meta, **flags):
    """Limit density of Z_i/N, Z_i = lam_i - i theta."""
    from .equilibrium import nu_density, right_edge
    started = time.time()
    cfg = resolve(config, dict(flags, grid=grid, lo=lo, hi=hi, out=out, meta=meta))
    p = case_params(cfg)
    span = right_edge(p) * (p.box_multiplier() if p.case in ("IV", "V", "VI") else 1)
    xs = _grid(cfg, -2 * span, span)
    ys = nu_density(p, xs)
    out = cfg.get("out") or "nu_density.csv"
    write_csv(out, ["x", "density"], [[fmt(x), fmt(y)] for x, y in zip(xs, ys)])
    write_manifest(cfg.get("meta") or f"{out}.json", resolved_config(cfg, p, ("grid", "lo", "hi")),
                   [out], started)
    click.echo(f"wrote {len(xs)} rows to {out}")


@cli.command()
@click.option("--suite", default="all",
              type=click.Choice(["all", "jack", "normalization", "pmf", "moments", "nekrasov",
                                 "plancherel", "duality"]))
@click.option("--max-degree", default=6, type=int)
@click.option("--out", type=click.Path(dir_okay=False), help="Also write the report here.")
def verify(suite, max_degree, out):
    """Exact small-instance checks; JSON report array."""
    from .oracle import run_suite
    reports = run_suite(suite, max_degree)
    emit([r.to_dict() for r in reports], out)
    if not all(r.ok for r in reports):
        raise CheckFailed(f"{sum(not r.ok for r in reports)} check(s) did not pass")


def _coeffs(text: str):
    try:
        return [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise ConfigurationError(f"bad polynomial coefficients {text!r}") from exc


@cli.command("clt-cov")
@param_options
@click.option("--f", "f", default="0,1", help="Coefficients of f, increasing degree.")
@click.option("--g", "g", default="0,1", help="Coefficients of g, increasing degree.")
@click.option("--nodes", default=2048, type=int)
@click.option("--out", type=click.Path(dir_okay=False))
def clt_cov(config, f, g, nodes, out, **flags):
    """Limit covariance of linear statistics (Case II)."""
    from .asymptotics import clt_covariance, clt_covariance_series, endpoints
    p = case_params(resolve(config, flags))
    fc, gc = _coeffs(f), _coeffs(g)
    res = clt_covariance(fc, gc, p, nodes=nodes)
    alpha, beta = endpoints(p)
    emit({"value": res.value, "error_estimate": res.error_estimate, "nodes": res.nodes,
          "series": clt_covariance_series(fc, gc, alpha, beta, p.theta)}, out)


@cli.command("edge-rate")
@param_options
@click.option("--x", "x", type=float, required=True, help="Position of l_1/N.")
@click.option("--out", type=click.Path(dir_okay=False))
def edge_rate_cmd(config, x, out, **flags):
    """Edge large-deviation rate at x (Case II)."""
    from .asymptotics import edge_rate_detail
    p = case_params(resolve(config, flags))
    val, err, neval = edge_rate_detail(x, p)
    emit({"value": val, "error_estimate": err, "nodes": neval}, out)


def _density_from_csv(path):
    try:
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    except (OSError, ValueError) as exc:
        raise ConfigurationError(f"cannot read density {path}: {exc}") from exc
    xs, ys = data[:, 0], data[:, 1]
    return lambda z: np.interp(z, xs, ys, left=0.0, right=0.0)


@cli.command()
@param_options
@click.option("--density-csv", type=click.Path(dir_okay=False), help="Density (x, density) to evaluate.")
@click.option("--cells", default=4000, type=int)
@click.option("--out", type=click.Path(dir_okay=False))
def energy(config, density_csv, cells, out, **flags):
    """Global energy functional and rate (Case II); defaults to the equilibrium measure."""
    from .asymptotics import global_energy
    from .equilibrium import EquilibriumDensity
    p = case_params(resolve(config, flags))
    mu = EquilibriumDensity(p)
    nu = _density_from_csv(density_csv) if density_csv else mu
    val = global_energy(nu, p, cells)
    coarse = global_energy(nu, p, cells // 2)
    ref = global_energy(mu, p, cells)
    emit({"value": val, "error_estimate": abs(val - coarse), "nodes": cells,
          "rate": p.theta * (val - ref)}, out)


@cli.command("edge-compare")
@param_options
@chain_options
@click.option("--draws", type=int, help="GbetaE samples (default: number of chains).")
@click.option("--threshold", type=float, help="Exit 1 if the KS distance exceeds this.")
@click.option("--out", type=click.Path(dir_okay=False))
def edge_compare_cmd(config, draws, threshold, out, **flags):
    """KS distance between the rescaled top particle and the GbetaE top eigenvalue."""
    from .asymptotics import edge_compare, gbe_sample
    cfg = resolve(config, flags)
    p, model, conf, res = _run(cfg)
    top = res.samples[:, -1, 0] + (model.K - 1) * model.theta
    rng = np.random.default_rng(np.random.SeedSequence(conf.seed).spawn(conf.chains + 1)[-1])
    n = draws or conf.chains
    gbe = np.array([gbe_sample(p.N, 2 * p.theta, rng)[0] for _ in range(n)])
    ks = edge_compare(top, gbe, p)
    emit({"value": ks, "error_estimate": math.sqrt(1 / len(top) + 1 / n), "nodes": int(len(top))}, out)
    if threshold is not None and ks > threshold:
        raise CheckFailed(f"KS {ks:.4f} exceeds {threshold}")


@cli.command()
@param_options
@chain_options
@click.option("--tolerance", type=float, help="Exit 1 if the KS distance exceeds this.")
@click.option("--out", type=click.Path(dir_okay=False), help="CSV of empirical and limit CDF.")
def compare(config, tolerance, out, **flags):
    """KS distance between pooled chain samples of l_i/K and the equilibrium CDF."""
    from .equilibrium import EquilibriumDensity
    cfg = resolve(config, flags)
    p, model, conf, res = _run(cfg)
    mu = EquilibriumDensity(p)
    emp = empirical_measure(res.samples, model.theta, model.K)
    ks = emp.ks(mu.cdf)
    if out:
        xs = np.unique(emp.positions)
        write_csv(out, ["x", "empirical_cdf", "limit_cdf"],
                  [[fmt(x), fmt(e), fmt(c)] for x, e, c in zip(xs, emp.cdf(xs), mu.cdf(xs))])
    click.echo(json.dumps({"ks": ks, "samples": emp.n_samples,
                           "acceptance": [float(a) for a in res.acceptance]}, indent=2))
    if tolerance is not None and ks > tolerance:
        raise CheckFailed(f"KS {ks:.4f} exceeds {tolerance}")


def main(argv=None) -> int:
    try:
        cli.main(args=argv, prog_name="jackgas", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.ClickException as exc:
        exc.show()
        return 2
    except click.Abort:
        return 2
    except CheckFailed as exc:
        click.echo(f"check failed: {exc}", err=True)
        return 1
    except (ConfigurationError, ParameterError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
