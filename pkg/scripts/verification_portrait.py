#!/usr/bin/env python3
"""Run the verification battery and draw the decay/inequality portrait.

Three panels, all printed as plain tables:

1. the built-in check battery (manufactured solutions, exact kernel
   responses, finite-difference residuals, trace reproduction);
2. fitted large-radius decay rates of a generic linear solve against the
   closed-form mode exponents;
3. the uniqueness-window inequalities: randomized Hardy checks with the
   sharpness of the constant, the positivity window of the weight factor,
   and the measured constant in the high-mode lower bound.

With --out, the full portrait is also written as JSON.
"""

import argparse
import json
import pathlib
import sys

import numpy as np

from hamelflow import (BoundarySpectrum, ReferenceFlow, build_grid, decay_fit,
                       hardy_check, hardy_sharpness, mode_exponents,
                       positivity_roots, probe_q1_negativity, q_form,
                       random_stream, random_w_profile,
                       re_zeta_minus_closed_form, solve_linear)
from hamelflow.verify import run_battery


def battery_panel(quick, seed):
    report = run_battery(quick=quick, seed=seed)
    print("== check battery ==")
    for check in report["checks"]:
        tag = "PASS" if check["passed"] else "FAIL"
        print(f"[{tag}] {check['name']}: metric {check['metric']:.3e} "
              f"(threshold {check['threshold']:.1e})")
    print(f"all passed: {report['all_passed']}")
    return report


def decay_panel(phi0, mu):
    flow = ReferenceFlow(phi0, mu)
    grid = build_grid(1e6, 24)
    n_max = 4
    vr = np.zeros(n_max + 1, dtype=complex)
    vt = np.zeros(n_max + 1, dtype=complex)
    vr[1:] = [0.01, 0.008, 0.006, 0.004]
    vt[1:] = [0.005, 0.004j, 0.003, 0.002]
    boundary = BoundarySpectrum(n_max, vr, vt, phi0, mu, mu)
    profile = decay_fit(solve_linear(flow, grid, boundary))
    print(f"\n== decay rates at phi0={phi0}, mu={mu} ==")
    print(f"{'n':>3} {'stream fit':>11} {'stream pred':>12} "
          f"{'vort fit':>11} {'vort pred':>11}")
    rows = []
    for n in range(1, n_max + 1):
        zeta = mode_exponents(flow, n).zeta_minus
        g_pred = max(-float(n), zeta.real + 2.0)
        w_pred = re_zeta_minus_closed_form(phi0, mu, n)
        print(f"{n:3d} {profile.gamma_slopes[n]:11.4f} {g_pred:12.4f} "
              f"{profile.w_slopes[n]:11.4f} {w_pred:11.4f}")
        rows.append({"n": n, "gamma_fit": float(profile.gamma_slopes[n]),
                     "gamma_predicted": g_pred,
                     "w_fit": float(profile.w_slopes[n]),
                     "w_predicted": float(w_pred)})
    return rows


def inequality_panel(seed, n_hardy, n_streams):
    rng = np.random.default_rng(seed)
    grid = build_grid(1e4, 24)
    violations = sum(
        not hardy_check(grid, *random_w_profile(grid, rng), alpha).ok
        for _ in range(n_hardy) for alpha in (2.0, 3.0, 4.0))
    sharp = hardy_sharpness()
    print("\n== uniqueness-window inequalities ==")
    print(f"hardy: {violations} violations in {3 * n_hardy} randomized "
          f"checks; constant attained to ratio {sharp.ratio:.4f}")

    panel = {"hardy_violations": violations, "hardy_sharpness": sharp.ratio,
             "backgrounds": []}
    q_grid = build_grid(1e4, 16)
    for phi0 in (2.1, 2.5, 3.0):
        roots = positivity_roots(phi0)
        min_c = min(q_form(random_stream(q_grid, rng), phi0).c_measured
                    for _ in range(n_streams))
        probe = probe_q1_negativity(phi0, n_samples=200, seed=seed)
        print(f"phi0={phi0}: weight positive on "
              f"({roots[0]:.6f}, {roots[1]:.6f}); high-mode constant "
              f">= {min_c:.4f} over {n_streams} streams; "
              f"negativity probe: {probe.verdict} "
              f"(min value {probe.min_value:.3e})")
        panel["backgrounds"].append(
            {"phi0": phi0, "positivity_window": list(roots),
             "min_high_mode_constant": min_c,
             "q1_probe_verdict": probe.verdict,
             "q1_probe_min": probe.min_value})
    return panel


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--quick", action="store_true",
                        help="run the battery on coarser grids")
    parser.add_argument("--seed", type=int, default=2026)
    parser.add_argument("--phi0", type=float, default=2.5)
    parser.add_argument("--mu", type=float, default=0.2)
    parser.add_argument("--hardy-samples", type=int, default=200)
    parser.add_argument("--stream-samples", type=int, default=100)
    parser.add_argument("--out", type=pathlib.Path, default=None,
                        help="JSON file for the whole portrait")
    args = parser.parse_args(argv)

    battery = battery_panel(args.quick, args.seed)
    decay = decay_panel(args.phi0, args.mu)
    inequalities = inequality_panel(args.seed, args.hardy_samples,
                                    args.stream_samples)

    if args.out is not None:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        portrait = {"battery": battery, "decay": decay,
                    "inequalities": inequalities}
        args.out.write_text(json.dumps(portrait, indent=2) + "\n")
        print(f"\nwrote {args.out}")

    return 0 if battery["all_passed"] else 1


if __name__ == "__main__":
    sys.exit(main())
