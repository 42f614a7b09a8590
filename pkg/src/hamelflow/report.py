"""Deterministic serialization of solutions and reports.

Identical inputs must produce byte-identical artifacts, so everything here
avoids wall-clock fields, hash randomization, and locale-dependent
formatting: dict keys are emitted sorted, floats carry 17 significant
digits, newlines are '\\n', and non-finite floats are written as null
(reports should not contain them; nulls make an accidental one visible).
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "fmt_float",
    "dumps",
    "write_json",
    "solution_payload",
    "report_payload",
    "write_modes_csv",
    "write_field_csv",
]


def fmt_float(x: float) -> str:
    x = float(x)
    if not np.isfinite(x):
        return "null"
    if x == int(x) and abs(x) < 1e16:
        return f"{x:.1f}"
    return f"{x:.17g}"


def _encode(obj, out, indent):
    pad = " " * indent
    if obj is None:
        out.append("null")
    elif isinstance(obj, bool) or isinstance(obj, np.bool_):
        out.append("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(fmt_float(obj))
    elif isinstance(obj, (complex, np.complexfloating)):
        out.append(f"[{fmt_float(obj.real)}, {fmt_float(obj.imag)}]")
    elif isinstance(obj, str):
        out.append('"' + obj.replace("\\", "\\\\").replace('"', '\\"') + '"')
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        keys = sorted(obj.keys())
        for i, k in enumerate(keys):
            out.append(pad + "  " + '"' + str(k) + '": ')
            _encode(obj[k], out, indent + 2)
            out.append(",\n" if i + 1 < len(keys) else "\n")
        out.append(pad + "}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            out.append("[]")
            return
        simple = all(isinstance(v, (int, float, complex, np.integer,
                                    np.floating, np.complexfloating))
                     for v in seq) and len(seq) <= 8
        if simple:
            out.append("[" + ", ".join(_scalar(v) for v in seq) + "]")
            return
        out.append("[\n")
        for i, v in enumerate(seq):
            out.append(pad + "  ")
            _encode(v, out, indent + 2)
            out.append(",\n" if i + 1 < len(seq) else "\n")
        out.append(pad + "]")
    else:
        raise TypeError(f"cannot serialize {type(obj)!r}")


def _scalar(v):
    parts = []
    _encode(v, parts, 0)
    return "".join(parts)


def dumps(obj) -> str:
    out = []
    _encode(obj, out, 0)
    out.append("\n")
    return "".join(out)


def write_json(path, obj):
    with open(path, "w", newline="\n") as fh:
        fh.write(dumps(obj))


def solution_payload(solution) -> dict:
    """Mode arrays and grid as plain structures (complex -> [re, im])."""
    return {
        "phi0": solution.flow.phi0,
        "mu": solution.flow.mu,
        "mu0": solution.boundary.mu0,
        "n_max": solution.n_max,
        "r": [float(v) for v in solution.grid.r],
        "modes": [
            {
                "n": n,
                "gamma": [complex(v) for v in solution.gamma[n]],
                "dgamma": [complex(v) for v in solution.dgamma[n]],
                "w": [complex(v) for v in solution.w[n]],
                "dw": [complex(v) for v in solution.dw[n]],
                "gamma_bar": complex(solution.gamma_bar[n]),
                "w_bar": complex(solution.w_bar[n]),
                "resonant": bool(solution.resonant[n]),
            }
            for n in range(solution.n_max + 1)
        ],
    }


def report_payload(report, extras=None) -> dict:
    payload = {
        "converged": report.converged,
        "iterations": report.iterations,
        "increments": [float(v) for v in report.increments],
        "contraction_ratio": report.contraction_ratio,
        "alpha": report.alpha,
        "alpha_feasible": report.alpha_feasible,
        "phi0": report.phi0,
        "mu": report.mu,
        "mu0": report.mu0,
        "mu_history": [float(v) for v in report.mu_history],
        "shoot_residual": (report.shoot_residual
                           if np.isfinite(report.shoot_residual) else None),
        "warnings": list(report.warnings),
    }
    if extras:
        payload.update(extras)
    return payload


def write_modes_csv(path, solution):
    cols = ("n,r,gamma_re,gamma_im,dgamma_re,dgamma_im,"
            "w_re,w_im,dw_re,dw_im")
    lines = [cols]
    f = fmt_float
    for n in range(solution.n_max + 1):
        for j, r in enumerate(solution.grid.r):
            g = solution.gamma[n, j]
            dg = solution.dgamma[n, j]
            w = solution.w[n, j]
            dw = solution.dw[n, j]
            lines.append(",".join([str(n), f(r), f(g.real), f(g.imag),
                                   f(dg.real), f(dg.imag), f(w.real),
                                   f(w.imag), f(dw.real), f(dw.imag)]))
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def write_field_csv(path, field):
    lines = ["r,theta,u_r,u_theta,w"]
    f = fmt_float
    for i, r in enumerate(field.r):
        for k, th in enumerate(field.theta):
            lines.append(",".join([f(r), f(th), f(field.ur[i, k]),
                                   f(field.utheta[i, k]), f(field.w[i, k])]))
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
