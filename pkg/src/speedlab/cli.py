"""Command-line interface: run simulations, sample the stationary law,
tabulate the exact formulas, and execute verification suites.

Outputs are plot-ready CSV ('.' decimal separator, newline-only line
endings, header row always present) or JSON (verification reports).  Every
subcommand is deterministic given its flags and seed; the ``SPEEDLAB_SEED``
environment variable supplies the default ``--seed``.  A flat ``key = value``
config file can prefill any flag of its subcommand; explicit command-line
flags win.  Exit status: 0 on success (for ``verify``, only if every claim
passes), 2 on usage or validation errors.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import os
import re
import sys
from pathlib import Path

import numpy as np

from .engine import run_endpoint_batch
from .formulas import (
    asep_values,
    convoy_gap_pmf,
    convoy_gap_tail,
    dist2,
    joint2_density,
    joint3_density,
    ordered_density,
    rightmost_prob,
)
from .harness import full_suite, quick_suite, run_claims, two_point_masses
from .multiline import sample_stationary_batch

SEED_ENV_VAR = "SPEEDLAB_SEED"


def _env_seed(fallback):
    raw = os.environ.get(SEED_ENV_VAR)
    if raw is None:
        return fallback
    try:
        return int(raw)
    except ValueError as err:
        raise ValueError(f"{SEED_ENV_VAR} must be an integer, got {raw!r}") from err


def _parse_window(text: str) -> tuple[int, int]:
    try:
        lo_s, hi_s = text.split(":")
        lo, hi = int(lo_s), int(hi_s)
    except ValueError as err:
        raise ValueError(f"window must look like lo:hi, got {text!r}") from err
    if lo >= hi:
        raise ValueError("window must satisfy lo < hi")
    return lo, hi


def _parse_track(text: str) -> list[int]:
    try:
        if ":" in text:
            a_s, b_s = text.split(":")
            a, b = int(a_s), int(b_s)
            if a > b:
                raise ValueError
            return list(range(a, b + 1))
        return [int(tok) for tok in text.split(",") if tok != ""]
    except ValueError as err:
        raise ValueError(
            f"track must be a comma list (0,1,5) or a range (0:10), got {text!r}"
        ) from err


def _parse_floats(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok != ""]
    except ValueError as err:
        raise ValueError(f"expected a comma-separated float list, got {text!r}") from err


def _fmt(x) -> str:
    return str(float(x))


@contextlib.contextmanager
def _open_out(path):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", newline="") as handle:
            yield handle


def _load_config(path, parser) -> dict:
    if path is None:
        return {}
    file = Path(path)
    if not file.is_file():
        parser.error(f"config file not found: {path}")
    values: dict[str, str] = {}
    for lineno, raw in enumerate(file.read_text().splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            parser.error(f"{path}:{lineno}: expected 'key = value'")
        key, _, val = line.partition("=")
        values[key.strip().replace("-", "_")] = val.strip()
    return values


def _resolve(args, parser, spec: dict) -> dict:
    """Three-way merge per key: explicit flag, then config file, then
    default (callables are evaluated lazily)."""
    config = _load_config(args.config, parser)
    unknown = set(config) - set(spec)
    if unknown:
        parser.error(f"unknown config key(s): {', '.join(sorted(unknown))}")
    out = {}
    for key, (convert, default) in spec.items():
        flag_value = getattr(args, key)
        if flag_value is not None:
            out[key] = flag_value
        elif key in config:
            try:
                out[key] = convert(config[key])
            except ValueError as err:
                parser.error(f"config key {key}: {err}")
        else:
            out[key] = default() if callable(default) else default
    return out


def _jobs_default() -> int:
    return os.cpu_count() or 1


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------

_SIMULATE_SPEC = {
    "mode": (str, "tasep"),
    "p": (float, 1.0),
    "t": (float, 100.0),
    "window": (_parse_window, (-100, 100)),
    "seed": (int, lambda: _env_seed(0)),
    "replicas": (int, 1),
    "track": (_parse_track, None),
    "jobs": (int, _jobs_default),
    "out": (str, None),
}


def _cmd_simulate(args, parser) -> int:
    vals = _resolve(args, parser, _SIMULATE_SPEC)
    mode, p = vals["mode"], vals["p"]
    if mode not in ("tasep", "asep"):
        raise ValueError("mode must be tasep or asep")
    if mode == "asep" and not 0.5 < p <= 1.0:
        raise ValueError("p must be in (0.5, 1]")
    if mode == "tasep" and p != 1.0:
        raise ValueError("tasep runs at p = 1; use --mode asep to set p")
    lo, hi = vals["window"]
    t = vals["t"]
    if t <= 0:
        raise ValueError("horizon t must be positive")
    tracked = vals["track"] if vals["track"] is not None else range(lo, hi + 1)
    batch = run_endpoint_batch(
        mode, lo, hi, t, vals["replicas"], tracked, vals["seed"], p=p,
        jobs=vals["jobs"],
    )
    speeds = batch.speeds()
    inside = (batch.positions > batch.cert_left[:, None]) & (
        batch.positions < batch.cert_right[:, None]
    )
    with _open_out(vals["out"]) as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["replica", "particle", "position", "speed", "certificate_ok"])
        for r in range(vals["replicas"]):
            for k in range(batch.tracked.size):
                writer.writerow([
                    r,
                    int(batch.tracked[k]),
                    int(batch.positions[r, k]),
                    _fmt(speeds[r, k]),
                    int(inside[r, k]),
                ])
    return 0


# ---------------------------------------------------------------------------
# stationary
# ---------------------------------------------------------------------------

_STATIONARY_SPEC = {
    "densities": (_parse_floats, None),
    "length": (int, 100),
    "burn_in": (int, None),
    "samples": (int, 200),
    "seed": (int, lambda: _env_seed(0)),
    "jobs": (int, _jobs_default),
    "out": (str, None),
}


def _cmd_stationary(args, parser) -> int:
    vals = _resolve(args, parser, _STATIONARY_SPEC)
    densities = vals["densities"]
    if densities is None:
        raise ValueError("missing --densities (comma list of class densities)")
    classes = sample_stationary_batch(
        densities, vals["length"], vals["samples"], vals["burn_in"],
        np.random.default_rng(vals["seed"]),
    )
    nclasses = len(densities)
    samples, length = classes.shape
    with _open_out(vals["out"]) as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["kind", "sample", "site", "class", "pair", "frequency"])
        for s in range(samples):
            for i in range(length):
                writer.writerow(["class", s, i, int(classes[s, i]), "", ""])
        if length >= 2:
            left = classes[:, :-1].ravel() - 1
            right = classes[:, 1:].ravel() - 1
            counts = np.bincount(
                left * nclasses + right, minlength=nclasses * nclasses
            ).reshape(nclasses, nclasses)
            total = samples * (length - 1)
            for a in range(nclasses):
                for b in range(nclasses):
                    writer.writerow([
                        "pair", "", "", "", f"{a + 1}:{b + 1}",
                        _fmt(counts[a, b] / total),
                    ])
    return 0


# ---------------------------------------------------------------------------
# density
# ---------------------------------------------------------------------------

_DENSITY_SPEC = {
    "which": (str, None),
    "grid": (float, None),
    "k": (int, 2),
    "x": (float, 0.2),
    "y": (float, 0.6),
    "uhat": (_parse_floats, None),
    "n": (int, 3),
    "u": (float, 0.0),
    "max_m": (int, 50),
    "p": (float, 0.7),
    "out": (str, None),
}


def _grid_points(step: float) -> np.ndarray:
    if not 0.0 < step <= 1.0:
        raise ValueError("grid step must lie in (0, 1]")
    n = int(round(2.0 / step)) + 1
    return np.linspace(-1.0, 1.0, n)


def _density_joint2(vals, writer) -> None:
    points = _grid_points(vals["grid"] if vals["grid"] is not None else 0.01)
    writer.writerow(["u0", "u1", "continuous", "diagonal"])
    for u0 in points:
        for u1 in points:
            d = joint2_density(u0, u1)
            writer.writerow([
                _fmt(u0), _fmt(u1), _fmt(d.continuous),
                _fmt(d.diagonal) if u0 == u1 else "",
            ])
    swapped, unswapped, diagonal = two_point_masses()
    writer.writerow(["mass_swapped", "", _fmt(swapped), ""])
    writer.writerow(["mass_unswapped", "", _fmt(unswapped), ""])
    writer.writerow(["mass_diagonal", "", _fmt(diagonal), ""])


def _density_dist2(vals, writer) -> None:
    k, x, y = vals["k"], vals["x"], vals["y"]
    writer.writerow(["region", "value"])
    total = 0.0
    for region in ("below", "diag", "above"):
        value = dist2(k, region, x, y)
        total += value
        writer.writerow([region, _fmt(value)])
    writer.writerow(["total", _fmt(total)])


def _density_joint3(vals, writer) -> None:
    points = _grid_points(vals["grid"] if vals["grid"] is not None else 0.1)
    writer.writerow(["u0", "u1", "u2", "value", "dim"])
    for u0 in points:
        for u1 in points:
            for u2 in points:
                d = joint3_density(u0, u1, u2)
                writer.writerow([_fmt(u0), _fmt(u1), _fmt(u2), _fmt(d.value), d.dim])


def _density_ordered(vals, writer) -> None:
    uhat = vals["uhat"]
    if uhat is None:
        raise ValueError("ordered needs --uhat (comma list, strictly increasing)")
    writer.writerow([f"uhat_{i + 1}" for i in range(len(uhat))] + ["density"])
    writer.writerow([_fmt(u) for u in uhat] + [_fmt(ordered_density(uhat))])


def _density_rightmost(vals, writer) -> None:
    n = vals["n"]
    writer.writerow(["rank", "probability"])
    for k in range(1, n + 1):
        writer.writerow([k, _fmt(rightmost_prob(n, k))])


def _density_convoy(vals, writer) -> None:
    u, max_m = vals["u"], vals["max_m"]
    if max_m < 1:
        raise ValueError("max-m must be >= 1")
    writer.writerow(["distance", "probability"])
    for m in range(1, max_m + 1):
        writer.writerow([m, _fmt(convoy_gap_pmf(u, m))])
    writer.writerow(["tail", _fmt(convoy_gap_tail(u, max_m))])


def _density_asep(vals, writer) -> None:
    values = asep_values(vals["p"])
    if vals["grid"] is not None:
        step = vals["grid"]
        if not 0.0 < step <= values.rho:
            raise ValueError("grid step must lie in (0, rho]")
        n = int(round(2.0 * values.rho / step)) + 1
        points = np.linspace(-values.rho, values.rho, n)
        writer.writerow(["x", "y", "signed_density"])
        for x in points:
            for y in points:
                writer.writerow([_fmt(x), _fmt(y), _fmt(values.signed_density(x, y))])
        return
    writer.writerow(["quantity", "value"])
    writer.writerow(["rho", _fmt(values.rho)])
    writer.writerow(["unswapped_limit", _fmt(values.swap_limit)])
    writer.writerow(["overtake_slope", _fmt(values.r_slope)])


_DENSITY_TABLES = {
    "joint2": _density_joint2,
    "dist2": _density_dist2,
    "joint3": _density_joint3,
    "ordered": _density_ordered,
    "rightmost": _density_rightmost,
    "convoy": _density_convoy,
    "asep": _density_asep,
}


def _cmd_density(args, parser) -> int:
    vals = _resolve(args, parser, _DENSITY_SPEC)
    which = vals["which"]
    if which not in _DENSITY_TABLES:
        raise ValueError(
            f"--which must be one of {', '.join(sorted(_DENSITY_TABLES))}"
        )
    with _open_out(vals["out"]) as handle:
        writer = csv.writer(handle, lineterminator="\n")
        _DENSITY_TABLES[which](vals, writer)
    return 0


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

_VERIFY_SPEC = {
    "suite": (str, "quick"),
    "seed": (int, lambda: _env_seed(None)),
    "jobs": (int, _jobs_default),
    "out": (str, None),
}


def _cmd_verify(args, parser) -> int:
    vals = _resolve(args, parser, _VERIFY_SPEC)
    suite = vals["suite"]
    if suite == "quick":
        specs = quick_suite()
    elif suite == "full":
        specs = full_suite() if vals["seed"] is None else full_suite(seed=vals["seed"])
    else:
        raise ValueError("suite must be quick or full")
    report = run_claims(specs, parallelism=vals["jobs"])
    payload = report.to_json()
    if vals["out"] is not None:
        Path(vals["out"]).write_text(payload + "\n")
        print(report.text_table())
    else:
        print(payload)
    return 0 if report.all_passed else 1


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="speedlab",
        description="Simulate multi-type exclusion dynamics, sample the "
                    "stationary class law, tabulate exact speed formulas, "
                    "and run verification suites.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="replicated runs; per-particle CSV")
    sim.add_argument("--mode", choices=["tasep", "asep"], default=None,
                     help="driver: tasep (p = 1) or asep (needs --p)")
    sim.add_argument("--p", type=float, default=None,
                     help="asymmetry parameter in (0.5, 1]")
    sim.add_argument("--t", type=float, default=None, help="time horizon")
    sim.add_argument("--window", type=_parse_window, default=None,
                     metavar="LO:HI", help="lattice window (inclusive)")
    sim.add_argument("--seed", type=int, default=None)
    sim.add_argument("--replicas", type=int, default=None)
    sim.add_argument("--track", type=_parse_track, default=None,
                     metavar="LIST|RANGE",
                     help="labels to report: 0,1,5 or 0:10 (default: all)")
    sim.add_argument("--jobs", type=int, default=None,
                     help="replica parallelism (default: logical cores)")
    sim.add_argument("--out", default=None, help="CSV path (default: stdout)")
    sim.add_argument("--config", default=None, help="key = value defaults file")
    sim.set_defaults(func=_cmd_simulate)

    stat = sub.add_parser("stationary",
                          help="stationary class sequences + pair frequencies")
    stat.add_argument("--densities", type=_parse_floats, default=None,
                      metavar="L1,L2,...", help="class densities (sum to 1)")
    stat.add_argument("--length", type=int, default=None,
                      help="sites per sequence")
    stat.add_argument("--burn-in", dest="burn_in", type=int, default=None,
                      help="override the automatic burn-in column count")
    stat.add_argument("--samples", type=int, default=None,
                      help="independent sequences")
    stat.add_argument("--seed", type=int, default=None)
    stat.add_argument("--jobs", type=int, default=None,
                      help="accepted for symmetry; sampling is vectorized")
    stat.add_argument("--out", default=None, help="CSV path (default: stdout)")
    stat.add_argument("--config", default=None, help="key = value defaults file")
    stat.set_defaults(func=_cmd_stationary)

    den = sub.add_parser("density", help="tabulate exact formulas as CSV")
    den.add_argument("--which", default=None,
                     choices=sorted(_DENSITY_TABLES),
                     help="which formula family to tabulate")
    den.add_argument("--grid", type=float, default=None,
                     help="grid step for tabulated families")
    den.add_argument("--k", type=int, default=None,
                     help="label separation (dist2)")
    den.add_argument("--x", type=float, default=None, help="cell low edge (dist2)")
    den.add_argument("--y", type=float, default=None, help="cell high edge (dist2)")
    den.add_argument("--uhat", type=_parse_floats, default=None,
                     metavar="U1,U2,...", help="ordered coordinates (ordered)")
    den.add_argument("--n", type=int, default=None,
                     help="pack size (rightmost)")
    den.add_argument("--u", type=float, default=None,
                     help="shared speed (convoy)")
    den.add_argument("--max-m", dest="max_m", type=int, default=None,
                     help="largest tabulated distance (convoy)")
    den.add_argument("--p", type=float, default=None,
                     help="asymmetry parameter (asep)")
    den.add_argument("--out", default=None, help="CSV path (default: stdout)")
    den.add_argument("--config", default=None, help="key = value defaults file")
    den.set_defaults(func=_cmd_density)

    ver = sub.add_parser("verify", help="run a claim suite; JSON report")
    ver.add_argument("--suite", choices=["quick", "full"], default=None,
                     help="quick: exact identities (seconds); full: adds "
                          "Monte Carlo claims (minutes)")
    ver.add_argument("--config", default=None, help="key = value defaults file")
    ver.add_argument("--seed", type=int, default=None,
                     help="base seed for the full suite's claims")
    ver.add_argument("--jobs", type=int, default=None,
                     help="claim-level parallelism (default: logical cores)")
    ver.add_argument("--out", default=None,
                     help="JSON path (text table then goes to stdout)")
    ver.set_defaults(func=_cmd_verify)

    # let values like "-500:500" or "-1:1" follow --window/--track with a
    # space: treat any token starting with a minus and a digit as a value
    # (no option string here is numeric, so nothing else matches)
    matcher = re.compile(r"^-\d")
    for p in (parser, sim, stat, den, ver):
        p._negative_number_matcher = matcher

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, parser)
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except BrokenPipeError:
        # the downstream consumer (say, `head`) closed the pipe; swallow the
        # error and keep the interpreter from whining at shutdown
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return 0


if __name__ == "__main__":
    sys.exit(main())
