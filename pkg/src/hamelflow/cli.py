"""Command-line interface.

Exit codes: 0 success, 1 invalid input or failed verification, 2 solver
non-convergence.  Reports are deterministic: rerunning a command with the
same config and seed reproduces every output byte for byte.
"""

from __future__ import annotations

import json
import os
import sys

import click
import numpy as np

from . import __version__
from .config import ConfigError, build_boundary, load_config, solver_config
from .field import (asymptotic_circulation, decay_fit, ns_residual,
                    reconstruct)
from .flows import ReferenceFlow
from .grid import synthesize_boundary
from .report import (dumps, report_payload, solution_payload, write_field_csv,
                     write_json, write_modes_csv)
from .solve import (SolverConvergenceError, branch_sweep, picard_solve,
                    shoot_mu)
from .verify import run_battery

CONVERGENCE_EXIT = 2


@click.group()
@click.version_option(version=__version__, prog_name="hamelflow")
def main():
    """Spectral solver and checks for steady exterior planar flows."""


def _load(config_path, quick, overrides):
    try:
        cfg = load_config(config_path)
        flow_cfg = dict(cfg["flow"])
        for key, val in overrides.items():
            if val is not None:
                flow_cfg[key] = val
        cfg["flow"] = flow_cfg
        sc = solver_config(cfg, quick=quick)
        boundary = build_boundary(cfg, sc)
        return cfg, sc, boundary
    except ConfigError as exc:
        raise click.ClickException(str(exc)) from exc


def _diagnostics(solution):
    fit = asymptotic_circulation(solution)
    prof = decay_fit(solution)
    nanlist = lambda arr: [None if not np.isfinite(v) else float(v)
                           for v in arr]
    return {
        "ns_residual": ns_residual(solution),
        "circulation_fit": {
            "mu_effective": fit.mu_effective,
            "decay_exponent": (fit.decay_exponent
                               if np.isfinite(fit.decay_exponent) else None),
            "amplitude": fit.amplitude,
            "rms": fit.rms,
        },
        "decay": {
            "gamma_slopes": nanlist(prof.gamma_slopes),
            "w_slopes": nanlist(prof.w_slopes),
            "gamma_ceilings": nanlist(prof.gamma_ceilings),
            "w_ceilings": nanlist(prof.w_ceilings),
            "beta0": prof.beta0 if np.isfinite(prof.beta0) else None,
            "beta1": prof.beta1 if np.isfinite(prof.beta1) else None,
            "beta_sup1": (prof.beta_sup1
                          if np.isfinite(prof.beta_sup1) else None),
        },
    }


def _write_solution(outdir, solution, report, cfg, seed, extra=None):
    os.makedirs(outdir, exist_ok=True)
    extras = {"seed": seed, "config": cfg}
    extras.update(_diagnostics(solution))
    if extra:
        extras.update(extra)
    write_json(os.path.join(outdir, "report.json"),
               report_payload(report, extras))
    write_json(os.path.join(outdir, "modes.json"), solution_payload(solution))
    write_modes_csv(os.path.join(outdir, "modes.csv"), solution)
    out_cfg = cfg.get("output", {})
    if out_cfg.get("write_field", False):
        field = reconstruct(solution, out_cfg.get("theta_points", 128))
        write_field_csv(os.path.join(outdir, "field.csv"), field)


@main.command()
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "outdir", default="out", show_default=True,
              type=click.Path(file_okay=False))
@click.option("--phi0", type=float, default=None, help="Override flow.phi0.")
@click.option("--mu0", type=float, default=None, help="Override flow.mu0.")
@click.option("--mu", type=float, default=None, help="Override flow.mu.")
@click.option("--quick", is_flag=True, help="Coarser grid and fewer modes.")
@click.option("--seed", type=int, default=0, show_default=True)
def solve(config_path, outdir, phi0, mu0, mu, quick, seed):
    """Solve one flow: shooting closure for phi0 <= 2, fixed mu above."""
    cfg, sc, boundary = _load(config_path, quick,
                              {"phi0": phi0, "mu0": mu0, "mu": mu})
    try:
        if boundary.phi0 <= 2.0:
            solution, report = shoot_mu(boundary, sc)
        else:
            flow = ReferenceFlow(boundary.phi0, boundary.mu)
            solution, report = picard_solve(flow, boundary, sc)
    except SolverConvergenceError as exc:
        click.echo(f"solver did not converge: {exc}", err=True)
        sys.exit(CONVERGENCE_EXIT)
    _write_solution(outdir, solution, report, cfg, seed)
    click.echo(f"converged in {report.iterations} iterations "
               f"(mu={report.mu:.12g}); wrote {outdir}/report.json")


@main.command()
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "outdir", default="out", show_default=True,
              type=click.Path(file_okay=False))
@click.option("--mu", "mu_extra", type=float, multiple=True,
              help="Append a circulation to the sweep.")
@click.option("--quick", is_flag=True)
@click.option("--seed", type=int, default=0, show_default=True)
def branch(config_path, outdir, mu_extra, quick, seed):
    """Sweep circulations against one trace (non-uniqueness, phi0 > 2)."""
    cfg, sc, boundary = _load(config_path, quick, {})
    mu_values = list(cfg.get("branch", {}).get("mu_values", []))
    mu_values.extend(mu_extra)
    if not mu_values:
        raise click.ClickException("no circulations: give branch.mu_values "
                                   "in the config or --mu")
    if boundary.phi0 <= 2.0:
        raise click.ClickException("branch sweeps need phi0 > 2")
    members = branch_sweep(boundary, mu_values, sc)
    os.makedirs(outdir, exist_ok=True)
    summary = []
    failed = 0
    for idx, member in enumerate(members):
        entry = {"mu": member.mu, "converged": member.solution is not None}
        if member.solution is None:
            failed += 1
            entry["error"] = member.error
        else:
            sub = os.path.join(outdir, f"mu_{idx:02d}")
            _write_solution(sub, member.solution, member.report, cfg, seed)
            fit = asymptotic_circulation(member.solution)
            entry["mu_effective"] = fit.mu_effective
            entry["iterations"] = member.report.iterations
            trace_ur, trace_ut = synthesize_boundary(
                member.solution.boundary, 64)
            entry["trace_checksum"] = [float(np.sum(trace_ur)),
                                       float(np.sum(trace_ut))]
        summary.append(entry)
    write_json(os.path.join(outdir, "summary.json"),
               {"seed": seed, "members": summary, "failed": failed})
    click.echo(f"{len(members) - failed}/{len(members)} members converged; "
               f"wrote {outdir}/summary.json")
    if failed:
        sys.exit(CONVERGENCE_EXIT)


@main.command()
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "outdir", default="out", show_default=True,
              type=click.Path(file_okay=False))
@click.option("--quick", is_flag=True)
@click.option("--seed", type=int, default=0, show_default=True)
def shoot(config_path, outdir, quick, seed):
    """Find the circulation closing the mean-mode trace (phi0 <= 2)."""
    cfg, sc, boundary = _load(config_path, quick, {})
    if boundary.phi0 > 2.0:
        raise click.ClickException("shooting applies to phi0 <= 2")
    try:
        solution, report = shoot_mu(boundary, sc)
    except SolverConvergenceError as exc:
        click.echo(f"shooting failed: {exc}", err=True)
        sys.exit(CONVERGENCE_EXIT)
    _write_solution(outdir, solution, report, cfg, seed,
                    extra={"mu_solved": report.mu})
    click.echo(f"closed at mu={report.mu:.12g} "
               f"({len(report.mu_history)} candidates); "
               f"wrote {outdir}/report.json")


@main.command()
@click.option("--out", "outdir", default=None,
              type=click.Path(file_okay=False),
              help="Also write verify_report.json here.")
@click.option("--quick", is_flag=True, help="Reduced sample counts.")
@click.option("--seed", type=int, default=0, show_default=True)
def verify(outdir, quick, seed):
    """Run the oracle battery: kernels, traces, residuals, inequalities."""
    battery = run_battery(quick=quick, seed=seed)
    for check in battery["checks"]:
        status = "PASS" if check["passed"] else "FAIL"
        click.echo(f"[{status}] {check['name']}: {check['detail']}")
    if outdir:
        os.makedirs(outdir, exist_ok=True)
        write_json(os.path.join(outdir, "verify_report.json"), battery)
    if not battery["all_passed"]:
        click.echo("verification FAILED", err=True)
        sys.exit(1)
    click.echo(f"all {len(battery['checks'])} checks passed")


@main.command()
@click.option("--solution", "soldir", required=True,
              type=click.Path(exists=True),
              help="Directory written by solve/shoot/branch, or a modes.json.")
@click.option("--format", "fmt", default="csv", show_default=True,
              help="csv or json")
@click.option("--out", "outpath", required=True, type=click.Path())
def export(soldir, fmt, outpath):
    """Re-emit stored mode profiles in another format."""
    if fmt not in ("csv", "json"):
        raise click.ClickException(f"unknown format {fmt!r}: use csv or json")
    src = soldir if os.path.isfile(soldir) else os.path.join(soldir,
                                                             "modes.json")
    if not os.path.exists(src):
        raise click.ClickException(f"{soldir} has no modes.json")
    with open(src) as fh:
        payload = json.load(fh)
    if fmt == "json":
        with open(outpath, "w", newline="\n") as fh:
            fh.write(dumps(payload))
    else:
        lines = ["n,r,gamma_re,gamma_im,dgamma_re,dgamma_im,"
                 "w_re,w_im,dw_re,dw_im"]
        from .report import fmt_float as f
        for mode in payload["modes"]:
            rows = zip(payload["r"], mode["gamma"], mode["dgamma"],
                       mode["w"], mode["dw"])
            for r, g, dg, w, dw in rows:
                lines.append(",".join(
                    [str(mode["n"]), f(r), f(g[0]), f(g[1]), f(dg[0]),
                     f(dg[1]), f(w[0]), f(w[1]), f(dw[0]), f(dw[1])]))
        with open(outpath, "w", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
    click.echo(f"wrote {outpath}")


if __name__ == "__main__":
    main()
