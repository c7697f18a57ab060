"""Command-line front end.

Every subcommand writes CSV tables (17 significant digits, header row) and
a ``manifest.json`` recording the command line, the resolved settings,
timings and SHA-256 digests of the files produced.  Exit status is 0 on
success, 1 when a computation fails and 2 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (
    DEFAULT_MIN_N,
    MinGapResult,
    gamma_scan,
    min_gap_sweep,
    scaling_fit,
    table1_pipeline,
)
from .errors import AnnealGapError, InvalidModelError, NoTransitionError
from .grover import lowest_two_levels, min_gap_asymptotic
from .instanton import sharp_wall_alpha, tanh_instanton_alpha
from .model import INFINITY, check_order, zero_T_critical_point
from .sector import PRECISIONS
from .statics import phase_boundary, pinf_transition_line

EXIT_OK, EXIT_FAILURE, EXIT_USAGE = 0, 1, 2
TABLE1_P = (3, 5, 7, 9, 11, 13, 15, 17, 19, 21, 23, 25, 31)


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- parsing


def parse_order(text) -> float | int:
    s = str(text).strip().lower()
    if s in ("inf", "infinity", "+inf"):
        return INFINITY
    try:
        return int(s)
    except ValueError:
        raise UsageError(f"cannot parse interaction order {text!r}") from None


def parse_int_list(text) -> list[int]:
    """``"40:120:10"`` (inclusive range) or ``"10,14,18"``."""
    if isinstance(text, (list, tuple)):
        return [int(x) for x in text]
    s = str(text).strip()
    if not s:
        return []
    try:
        if ":" in s:
            parts = [int(x) for x in s.split(":")]
            if len(parts) == 2:
                parts.append(1)
            start, stop, step = parts
            if step <= 0:
                raise UsageError(f"range step must be positive in {text!r}")
            return list(range(start, stop + 1, step))
        return [int(x) for x in s.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"cannot parse integer list {text!r}") from None


def parse_float_list(text) -> list[float]:
    if isinstance(text, (list, tuple)):
        return [float(x) for x in text]
    try:
        return [float(x) for x in str(text).split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"cannot parse number list {text!r}") from None


def load_config(path: str | None) -> dict:
    """JSON object, or ``key = value`` lines with ``#`` comments."""
    if not path:
        return {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config {path!r}: {exc}") from None
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise UsageError(f"invalid JSON config: {exc}") from None
        return {str(k).replace("-", "_"): v for k, v in data.items()}
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"config line {lineno}: expected key=value")
        k, v = (x.strip() for x in line.split("=", 1))
        out[k.replace("-", "_")] = v
    return out


# ---------------------------------------------------------------- output


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return ""
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return format(x, ".17g")
    return str(x)


class Run:
    def __init__(self, out: Path, argv: list[str], settings: dict):
        self.out = out
        self.argv = argv
        self.settings = settings
        self.files: list[Path] = []
        self.timings: dict[str, float] = {}

    def write_csv(self, name: str, header: list[str], rows) -> Path:
        path = self.out / name
        with path.open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            for row in rows:
                w.writerow([fmt(x) for x in row])
        self.files.append(path)
        return path

    def write_json(self, name: str, data) -> Path:
        path = self.out / name
        path.write_text(json.dumps(data, indent=2, sort_keys=True, default=fmt) + "\n", encoding="utf-8")
        self.files.append(path)
        return path

    def write_text(self, name: str, text: str) -> Path:
        path = self.out / name
        path.write_text(text, encoding="utf-8")
        self.files.append(path)
        return path

    def timed(self, label, fn, *args, **kwargs):
        t0 = time.perf_counter()
        try:
            return fn(*args, **kwargs)
        finally:
            self.timings[label] = self.timings.get(label, 0.0) + time.perf_counter() - t0

    def manifest(self, status: int) -> None:
        digests = {p.name: hashlib.sha256(p.read_bytes()).hexdigest() for p in self.files}
        data = {
            "tool": "annealgap",
            "version": __version__,
            "command_line": self.argv,
            "settings": self.settings,
            "determinism": "no random numbers are used; identical inputs give byte-identical CSV files",
            "timings_seconds": self.timings,
            "outputs_sha256": digests,
            "exit_status": status,
        }
        (self.out / "manifest.json").write_text(json.dumps(data, indent=2, sort_keys=True, default=fmt) + "\n")


_PLOT_HEAD = '''"""Plot {csv} (requires matplotlib)."""
import csv
import sys

import matplotlib.pyplot as plt

rows = list(csv.DictReader(open(sys.argv[1] if len(sys.argv) > 1 else "{csv}")))
'''

PLOT_PHASE = _PLOT_HEAD + '''rows = [r for r in rows if r["gamma_star"]]
plt.plot([float(r["gamma_star"]) for r in rows], [1.0 / float(r["beta"]) for r in rows], "o-")
plt.xlabel("Gamma")
plt.ylabel("T = 1/beta")
plt.title("{title}")
plt.savefig("phase_diagram.png", dpi=150)
'''

PLOT_GAP = _PLOT_HEAD + '''rows = [r for r in rows if r["resolved"] == "true"]
plt.semilogy([float(r["gamma"]) for r in rows], [float(r["delta"]) for r in rows], "o-")
plt.axvline({gamma_c!r}, color="k")
plt.xlabel("Gamma")
plt.ylabel("gap")
plt.title("{title}")
plt.savefig("gap.png", dpi=150)
'''

PLOT_MINGAP = _PLOT_HEAD + '''rows = [r for r in rows if r["resolved"] == "true"]
N = [float(r["N"]) for r in rows]
plt.semilogy(N, [float(r["delta_min"]) / n for r, n in zip(rows, N)], "o-")
plt.xlabel("N")
plt.ylabel("delta_min / N")
plt.title("{title}")
plt.savefig("mingap.png", dpi=150)
'''


# ---------------------------------------------------------------- commands


def _order_label(p) -> str:
    return "inf" if p == INFINITY else str(p)


def cmd_phase_diagram(run: Run, s: dict) -> int:
    p = parse_order(s["p"])
    check_order(p)
    if s.get("betas"):
        betas = parse_float_list(s["betas"])
    else:
        betas = list(np.geomspace(float(s["beta_min"]), float(s["beta_max"]), int(s["beta_points"])))
    if not betas:
        raise UsageError("empty beta grid")
    rows = []
    for b in betas:
        try:
            if p == INFINITY:
                g = run.timed("pinf_transition_line", pinf_transition_line, b)
                rows.append((b, g, 1.0))
            else:
                pt = run.timed("phase_boundary", phase_boundary, p, b)
                rows.append((b, pt.gamma_star, pt.m_jump))
        except NoTransitionError:
            rows.append((b, None, None))
    run.write_csv("phase_diagram.csv", ["beta", "gamma_star", "m_jump"], rows)
    run.write_text("plot_phase_diagram.py", PLOT_PHASE.format(csv="phase_diagram.csv", title=f"p = {_order_label(p)}"))
    return EXIT_OK


def cmd_gap(run: Run, s: dict) -> int:
    p = parse_order(s["p"])
    check_order(p)
    N = int(s["N"])
    gc = 1.0 if p == INFINITY else zero_T_critical_point(p).gamma_c
    lo = float(s["gamma_lo"]) if s.get("gamma_lo") is not None else gc - 0.3
    hi = float(s["gamma_hi"]) if s.get("gamma_hi") is not None else gc + 0.3
    points = int(s["points"])
    if not lo < hi or points < 3 or lo < 0:
        raise UsageError(f"invalid window [{lo}, {hi}] with {points} points")
    curve = run.timed("gamma_scan", gamma_scan, p, N, lo, hi, points, s["precision"], threads=s.get("threads"))
    run.write_csv(
        "gap.csv", ["gamma", "delta", "resolved"], [(q.gamma, q.delta, q.resolved) for q in curve.points]
    )
    run.write_text(
        "plot_gap.py",
        PLOT_GAP.format(csv="gap.csv", gamma_c=gc, title=f"p = {_order_label(p)}, N = {N}"),
    )
    return EXIT_OK


def cmd_mingap(run: Run, s: dict) -> int:
    p = parse_order(s["p"])
    check_order(p)
    Ns = parse_int_list(s["N_list"])
    if not Ns or min(Ns) < 2:
        raise UsageError("N list must be non-empty with N >= 2")
    min_N = s.get("min_N")
    min_N = (0 if p == INFINITY else DEFAULT_MIN_N) if min_N is None else int(min_N)
    res = run.timed("min_gap", min_gap_sweep, p, Ns, s["precision"], threads=s.get("threads"))
    rows = []
    for N, r in res:
        if isinstance(r, MinGapResult):
            rows.append((N, r.gamma_min, r.delta_min, True, ""))
        else:
            rows.append((N, None, None, False, str(r)))
    run.write_csv("mingap.csv", ["N", "gamma_min", "delta_min", "resolved", "note"], rows)
    run.write_text("plot_mingap.py", PLOT_MINGAP.format(csv="mingap.csv", title=f"p = {_order_label(p)}"))
    pts = [(N, r.delta_min) for N, r in res if isinstance(r, MinGapResult)]
    summary = {"p": _order_label(p), "min_N": min_N, "prefactor": not s.get("no_prefactor")}
    status = EXIT_OK
    try:
        fit = scaling_fit(pts, prefactor=not s.get("no_prefactor"), min_N=min_N)
        summary.update(alpha=fit.alpha, intercept=fit.intercept, residual=fit.residual, n_points=len(fit.points))
    except AnnealGapError as exc:
        summary["error"] = str(exc)
        status = EXIT_FAILURE
    run.write_json("fit.json", summary)
    return status


def cmd_table1(run: Run, s: dict) -> int:
    p_list = [parse_order(x) if str(x).strip().lower() in ("inf", "infinity") else _int_or_raw(x)
              for x in str(s["p_list"]).split(",") if str(x).strip()]
    if not p_list:
        raise UsageError("empty p list")
    rows = run.timed(
        "table1",
        table1_pipeline,
        p_list,
        N_list=parse_int_list(s["N_list"]),
        precision=s["precision"],
        with_simu=not s.get("no_simu"),
        threads=s.get("threads"),
    )
    out = []
    for r in rows:
        out.append((
            _order_label(r.p) if not isinstance(r.p, str) else r.p,
            r.gamma_c, r.m_c, r.alpha_sharp, r.alpha_tanh, r.alpha_simu,
            "; ".join(f"{k}: {v}" for k, v in r.provenance.items()),
            "; ".join(f"{k}: {v}" for k, v in r.errors.items()),
        ))
    run.write_csv(
        "table1.csv",
        ["p", "gamma_c", "m_c", "alpha_sharp", "alpha_tanh", "alpha_simu", "provenance", "errors"],
        out,
    )
    return EXIT_OK if all(r.ok for r in rows) else EXIT_FAILURE


def _int_or_raw(x):
    try:
        return int(str(x).strip())
    except ValueError:
        raise UsageError(f"cannot parse interaction order {x!r}") from None


def cmd_grover(run: Run, s: dict) -> int:
    Ns = parse_int_list(s["N_list"])
    if not Ns or min(Ns) < 2:
        raise UsageError("N list must be non-empty with N >= 2")
    gamma = float(s["gamma"])
    if not gamma > 0:
        raise UsageError("gamma must be positive")
    rows = []
    for N in Ns:
        lp = run.timed("lowest_two_levels", lowest_two_levels, N, gamma)
        asym = min_gap_asymptotic(N)
        rows.append((N, gamma, lp.lambda0, lp.lambda1, lp.eta, lp.gap, asym, lp.gap / asym))
    run.write_csv(
        "grover.csv", ["N", "gamma", "lambda0", "lambda1", "eta", "gap", "gap_asymptotic", "gap_ratio"], rows
    )
    return EXIT_OK


def cmd_instanton(run: Run, s: dict) -> int:
    ps = [_int_or_raw(x) for x in str(s["p_list"]).split(",") if x.strip()]
    if not ps:
        raise UsageError("empty p list")
    rows = []
    status = EXIT_OK
    for p in ps:
        try:
            cp = zero_T_critical_point(p)
            sharp = run.timed("sharp_wall_alpha", sharp_wall_alpha, p)
            r = run.timed("tanh_instanton_alpha", tanh_instanton_alpha, p)
            rows.append((p, cp.gamma_c, cp.m_c, sharp, r.alpha, r.width, r.G, ""))
        except AnnealGapError as exc:
            rows.append((p, None, None, None, None, None, None, str(exc)))
            status = EXIT_FAILURE
    run.write_csv(
        "instanton.csv", ["p", "gamma_c", "m_c", "alpha_sharp", "alpha_tanh", "width", "G", "error"], rows
    )
    return status


# ---------------------------------------------------------------- driver

COMMANDS = {
    "phase-diagram": (cmd_phase_diagram, {"p": "3", "betas": None, "beta_min": 1.0, "beta_max": 1000.0, "beta_points": 25}),
    "gap": (cmd_gap, {"p": "3", "N": 14, "gamma_lo": None, "gamma_hi": None, "points": 61}),
    "mingap": (cmd_mingap, {"p": "3", "N_list": "40:120:10", "min_N": None, "no_prefactor": False}),
    "table1": (cmd_table1, {"p_list": ",".join(map(str, TABLE1_P)), "N_list": "40:120:10", "no_simu": False}),
    "grover": (cmd_grover, {"N_list": "10:60:10", "gamma": 1.0}),
    "instanton": (cmd_instanton, {"p_list": "3,7,15,21,31"}),
}
COMMON = {"precision": "extended", "threads": None}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="annealgap", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"annealgap {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=".", help="output directory (created if missing)")
    common.add_argument("--precision", choices=PRECISIONS, default=None)
    common.add_argument("--config", default=None, help="JSON or key=value file of default settings")
    common.add_argument("--threads", type=int, default=None, help="worker cap (else ANNEALGAP_THREADS)")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("phase-diagram", parents=[common], help="first-order boundary Gamma*(beta)")
    sp.add_argument("--p")
    sp.add_argument("--betas", help="comma-separated beta values")
    sp.add_argument("--beta-min", type=float)
    sp.add_argument("--beta-max", type=float)
    sp.add_argument("--beta-points", type=int)

    sp = sub.add_parser("gap", parents=[common], help="gap along a Gamma window")
    sp.add_argument("--p")
    sp.add_argument("--N", type=int)
    sp.add_argument("--gamma-lo", type=float)
    sp.add_argument("--gamma-hi", type=float)
    sp.add_argument("--points", type=int)

    sp = sub.add_parser("mingap", parents=[common], help="minimum gap versus N and exponent fit")
    sp.add_argument("--p")
    sp.add_argument("--N-list", help="e.g. 40:120:10 or 40,60,80")
    sp.add_argument("--min-N", type=int, help="smallest N used in the fit")
    sp.add_argument("--no-prefactor", action="store_true", default=None, help="fit log2(delta) without the N prefactor")

    sp = sub.add_parser("table1", parents=[common], help="critical points and gap exponents per p")
    sp.add_argument("--p-list")
    sp.add_argument("--N-list")
    sp.add_argument("--no-simu", action="store_true", default=None, help="skip the diagonalisation fits")

    sp = sub.add_parser("grover", parents=[common], help="p = infinity levels and gap")
    sp.add_argument("--N-list")
    sp.add_argument("--gamma", type=float)

    sp = sub.add_parser("instanton", parents=[common], help="sharp-wall and tanh instanton exponents")
    sp.add_argument("--p-list")
    return parser


def resolve_settings(command: str, args: argparse.Namespace) -> dict:
    """Built-in defaults, then the config file, then explicit flags."""
    _, defaults = COMMANDS[command]
    settings = {**COMMON, **defaults}
    config = load_config(args.config)
    unknown = set(config) - set(settings)
    if unknown:
        raise UsageError(f"unknown config keys for {command}: {sorted(unknown)}")
    settings.update(config)
    for key in settings:
        val = getattr(args, key, None)
        if val is not None:
            settings[key] = val
    if settings["precision"] not in PRECISIONS:
        raise UsageError(f"precision must be one of {PRECISIONS}")
    if settings.get("threads") is not None:
        settings["threads"] = int(settings["threads"])
    for flag in ("no_prefactor", "no_simu"):
        if flag in settings and isinstance(settings[flag], str):
            settings[flag] = settings[flag].strip().lower() in ("1", "true", "yes", "on")
    return settings


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        settings = resolve_settings(args.command, args)
    except UsageError as exc:
        print(f"annealgap: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    run = Run(out, ["annealgap", *argv], settings)
    fn, _ = COMMANDS[args.command]
    try:
        status = fn(run, settings)
    except UsageError as exc:
        print(f"annealgap: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InvalidModelError as exc:
        print(f"annealgap: error: {exc}", file=sys.stderr)
        status = EXIT_USAGE
    except AnnealGapError as exc:
        print(f"annealgap: computation failed: {exc}", file=sys.stderr)
        status = EXIT_FAILURE
    except ValueError as exc:
        print(f"annealgap: error: {exc}", file=sys.stderr)
        status = EXIT_USAGE
    run.manifest(status)
    return status


if __name__ == "__main__":
    sys.exit(main())
