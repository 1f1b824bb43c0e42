"""Command-line front end.

Configs are flat ``key = value`` files with dotted sections; values are
ints, floats, bare words, or bracketed lists of those. Unknown keys are
rejected. Subcommands: ball-spectrum, spectrum, verify, sweep. JSON
output is deterministic (insertion-ordered keys, floats at 17
significant digits) and embeds the sha256 of the config text together
with the artifact version. Exit codes: 0 success, 2 config/usage error,
3 numerical failure, 4 verification failure.
"""

import argparse
import csv
import hashlib
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

from . import __version__
from .geometry import StarDomain, SurfaceMetric, WarpFunction
from .radial import ball_spectrum
from .dtn import steklov_spectrum
from .bounds import BoundFormula
from .verify import (VerificationCase, verify_case, sharpness_study,
                     random_domain_suite)

__all__ = ["ConfigError", "RunConfig", "parse_config", "main"]

ARTIFACT_NAME = "steklov-bounds"


class ConfigError(ValueError):
    """Malformed, unknown, or missing configuration."""


_KNOWN_KEYS = {
    "surface.kind",
    "surface.domain_max",
    "surface.knots",
    "surface.values",
    "domain.constant",
    "domain.cos",
    "domain.sin",
    "ball.radius",
    "ball.count",
    "ball.dim",
    "spectrum.l_max",
    "solver.k_init",
    "solver.k_cap",
    "solver.tol",
    "solver.gram_drop",
    "solver.quad_min",
    "solver.rtol",
    "solver.grid_size",
    "verify.formulas",
    "verify.l",
    "verify.rel_slack",
    "verify.suite.count",
    "verify.suite.max_mode",
    "verify.suite.max_eps",
    "verify.suite.r0",
    "sweep.eps",
    "sweep.profile_cos",
    "sweep.profile_sin",
    "sweep.l",
    "sweep.r0",
    "seed",
    "jobs",
}


def _parse_scalar(token):
    token = token.strip()
    if not token:
        raise ConfigError("empty value")
    try:
        return int(token)
    except ValueError:
        pass
    try:
        return float(token)
    except ValueError:
        pass
    return token


def _format_scalar(value):
    if isinstance(value, bool):
        raise ConfigError("booleans are not part of the config format")
    if isinstance(value, float):
        return repr(value)
    return str(value)


class RunConfig:
    """Parsed configuration: an ordered mapping of dotted keys to values."""

    def __init__(self, entries):
        for key in entries:
            if key not in _KNOWN_KEYS:
                raise ConfigError(f"unknown config key {key!r}")
        self.entries = dict(entries)

    def __eq__(self, other):
        if not isinstance(other, RunConfig):
            return NotImplemented
        return list(self.entries.items()) == list(other.entries.items())

    def emit(self):
        lines = []
        for key, value in self.entries.items():
            if isinstance(value, list):
                body = ", ".join(_format_scalar(v) for v in value)
                lines.append(f"{key} = [{body}]")
            else:
                lines.append(f"{key} = {_format_scalar(value)}")
        return "\n".join(lines) + "\n"

    def get(self, key, default=None):
        return self.entries.get(key, default)

    def require(self, key):
        if key not in self.entries:
            raise ConfigError(f"missing required config key {key!r}")
        return self.entries[key]

    def get_number(self, key, default=None):
        value = self.get(key, default)
        if value is None or isinstance(value, (int, float)):
            return value
        raise ConfigError(f"{key} must be a number, got {value!r}")

    def get_int(self, key, default=None):
        value = self.get(key, default)
        if value is None or isinstance(value, int):
            return value
        raise ConfigError(f"{key} must be an integer, got {value!r}")

    def get_list(self, key, default=None):
        value = self.get(key)
        if value is None:
            return default
        if not isinstance(value, list):
            raise ConfigError(f"{key} must be a list, got {value!r}")
        return value


def parse_config(text):
    """Parse config text into a RunConfig; duplicate/unknown keys reject."""
    entries = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, _, body = line.partition("=")
        key, body = key.strip(), body.strip()
        if key in entries:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        if body.startswith("["):
            if not body.endswith("]"):
                raise ConfigError(f"line {lineno}: unterminated list")
            inner = body[1:-1].strip()
            value = [_parse_scalar(t) for t in inner.split(",")] if inner else []
        else:
            value = _parse_scalar(body)
        entries[key] = value
    return RunConfig(entries)


# ---------------------------------------------------------------------------
# deterministic JSON


def _json_fragment(obj, out):
    if obj is None:
        out.append("null")
    elif isinstance(obj, bool):
        out.append("true" if obj else "false")
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        if math.isfinite(obj):
            out.append(format(obj, ".17g"))
        else:
            out.append('"%s"' % repr(obj))
    elif isinstance(obj, str):
        out.append('"' + obj.replace("\\", "\\\\").replace('"', '\\"') + '"')
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, item in enumerate(obj):
            if i:
                out.append(", ")
            _json_fragment(item, out)
        out.append("]")
    elif isinstance(obj, dict):
        out.append("{")
        for i, (key, val) in enumerate(obj.items()):
            if i:
                out.append(", ")
            _json_fragment(str(key), out)
            out.append(": ")
            _json_fragment(val, out)
        out.append("}")
    else:
        raise TypeError(f"cannot serialize {type(obj)!r}")


def to_json(obj):
    out = []
    _json_fragment(obj, out)
    out.append("\n")
    return "".join(out)


def _header(config_text, command):
    return {
        "artifact": {"name": ARTIFACT_NAME, "version": __version__},
        "config_sha256": hashlib.sha256(config_text.encode()).hexdigest(),
        "command": command,
    }


# ---------------------------------------------------------------------------
# config -> model objects


def build_surface(config):
    kind = config.require("surface.kind")
    dmax = config.get_number("surface.domain_max")
    if kind == "plane":
        return SurfaceMetric.plane(dmax if dmax is not None else math.inf)
    if kind == "sphere":
        return SurfaceMetric.sphere(dmax if dmax is not None else math.pi / 2)
    if kind == "tanh":
        return SurfaceMetric.tanh(dmax if dmax is not None else math.inf)
    if kind == "paraboloid":
        return SurfaceMetric.paraboloid()
    if kind == "spline":
        knots = config.get_list("surface.knots")
        values = config.get_list("surface.values")
        if knots is None or values is None:
            raise ConfigError("spline surface needs surface.knots and surface.values")
        warp = WarpFunction.from_table(knots, values, dmax)
        return SurfaceMetric.warped(warp)
    raise ConfigError(f"unknown surface.kind {kind!r}")


def build_domain(config):
    constant = config.get_number("domain.constant")
    if constant is not None:
        return StarDomain.constant(constant)
    cos_coeffs = config.get_list("domain.cos")
    if cos_coeffs is None:
        raise ConfigError("need domain.constant or domain.cos")
    return StarDomain(cos_coeffs, config.get_list("domain.sin", []))


def solver_options(config):
    opts = {}
    for name, key, kind in (
        ("k_init", "solver.k_init", int),
        ("k_cap", "solver.k_cap", int),
        ("tol", "solver.tol", float),
        ("gram_drop", "solver.gram_drop", float),
        ("quad_min", "solver.quad_min", int),
        ("rtol", "solver.rtol", float),
        ("grid_size", "solver.grid_size", int),
    ):
        value = config.get(key)
        if value is not None:
            opts[name] = kind(value)
    return opts


def _parse_formulas(config, surface):
    tokens = config.get_list("verify.formulas")
    if tokens is None:
        return [f for f in BoundFormula if f.applies_to(surface)]
    formulas = []
    for token in tokens:
        try:
            formulas.append(BoundFormula(token))
        except ValueError:
            raise ConfigError(f"unknown bound formula {token!r}") from None
    return formulas


# ---------------------------------------------------------------------------
# output helpers


def _write_text(path, text):
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write(text)


def _write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        writer.writerows(rows)


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


# ---------------------------------------------------------------------------
# subcommands


def cmd_ball_spectrum(config, config_text, out_json, out_csv):
    surface = build_surface(config)
    radius = config.require("ball.radius")
    count = config.get_int("ball.count", 9)
    dim = config.get_int("ball.dim", 2)
    spec = ball_spectrum(surface, float(radius), count, n=dim)
    payload = _header(config_text, "ball-spectrum")
    payload.update({
        "surface": surface.label,
        "R": spec.radius,
        "n": spec.n,
        "eigenvalues": spec.eigenvalues.tolist(),
    })
    if out_json:
        _write_text(out_json, to_json(payload))
    if out_csv:
        _write_csv(out_csv, ["l", "eigenvalue"],
                   [[l + 1, _fmt(v)] for l, v in enumerate(spec.eigenvalues)])
    return 0


def cmd_spectrum(config, config_text, out_json, out_csv):
    surface = build_surface(config)
    domain = build_domain(config)
    l_max = config.get_int("spectrum.l_max", 8)
    spectrum = steklov_spectrum(surface, domain, l_max, **solver_options(config))
    payload = _header(config_text, "spectrum")
    payload.update({
        "surface": surface.label,
        "eigenvalues": spectrum.eigenvalues.tolist(),
        "max_mode": spectrum.max_mode,
        "quad_points": spectrum.quad_points,
        "regularization_drop": spectrum.regularization_drop,
        "converged": spectrum.converged,
        "est_error": spectrum.est_error,
    })
    if out_json:
        _write_text(out_json, to_json(payload))
    if out_csv:
        _write_csv(out_csv, ["l", "eigenvalue"],
                   [[l + 1, _fmt(v)] for l, v in enumerate(spectrum.eigenvalues)])
    return 0 if spectrum.converged else 3


def cmd_verify(config, config_text, out_json, out_csv, jobs, seed):
    surface = build_surface(config)
    formulas = _parse_formulas(config, surface)
    l_values = tuple(config.get_list("verify.l", [2, 3, 4, 5, 6, 7, 8]))
    rel_slack = float(config.get_number("verify.rel_slack", 1e-6))
    opts = solver_options(config)

    suite_count = config.get_int("verify.suite.count", 0)
    if suite_count > 0:
        suite = random_domain_suite(
            surface, suite_count,
            config.get_int("verify.suite.max_mode", 3),
            float(config.get_number("verify.suite.max_eps", 0.15)),
            seed, r0=float(config.get_number("verify.suite.r0", 1.0)))
        domains = list(suite)
    else:
        domains = [build_domain(config)]

    cases = [VerificationCase(surface, dom, l_values, tuple(formulas),
                              rel_slack, opts) for dom in domains]
    if jobs > 1 and len(cases) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(verify_case, cases))
    else:
        reports = [verify_case(c) for c in cases]

    totals = {"pass": 0, "marginal": 0, "fail": 0, "undefined": 0}
    for report in reports:
        for status, num in report.counts.items():
            totals[status] += num

    payload = _header(config_text, "verify")
    payload.update({
        "surface": surface.label,
        "cases": [r.to_dict() for r in reports],
        "summary": totals,
    })
    if out_json:
        _write_text(out_json, to_json(payload))
    if out_csv:
        rows = []
        for report in reports:
            for e in report.entries:
                passes = "" if e.passed is None else str(e.passed).lower()
                rows.append([e.formula.value, e.l, _fmt(e.mu), _fmt(e.bound),
                             _fmt(e.ratio), passes, _fmt(e.est_error)])
        _write_csv(out_csv, ["formula", "l", "mu", "bound", "ratio", "pass",
                             "est_error"], rows)

    if totals["undefined"] > 0:
        return 3
    if totals["fail"] > 0:
        return 4
    return 0


def cmd_sweep(config, config_text, out_json, out_csv):
    surface = build_surface(config)
    eps_list = config.get_list("sweep.eps")
    if not eps_list:
        raise ConfigError("sweep.eps must be a non-empty list")
    result = sharpness_study(
        surface,
        float(config.get_number("sweep.r0", 1.0)),
        config.get_list("sweep.profile_cos", []),
        config.get_list("sweep.profile_sin", []),
        [float(e) for e in eps_list],
        config.get_int("sweep.l", 2),
        solver_opts=solver_options(config))

    payload = _header(config_text, "sweep")
    payload.update({
        "surface": surface.label,
        "formula": result.formula.value,
        "l": result.l,
        "points": [{"eps": e, "ratio": r} for e, r in result.points],
        "extrapolated": result.extrapolated,
    })
    if out_json:
        _write_text(out_json, to_json(payload))
    if out_csv:
        rows = [[_fmt(e), _fmt(r)] for e, r in result.points]
        rows.append(["extrapolated", _fmt(result.extrapolated)])
        _write_csv(out_csv, ["eps", "ratio"], rows)
    return 0


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog=ARTIFACT_NAME,
        description="Steklov spectra and lower-bound verification on "
                    "surfaces of revolution")
    parser.add_argument("command",
                        choices=["ball-spectrum", "spectrum", "verify", "sweep"])
    parser.add_argument("--config", required=True, help="path to the config file")
    parser.add_argument("--out-json", default=None)
    parser.add_argument("--out-csv", default=None)
    parser.add_argument("--jobs", type=int, default=None,
                        help="worker pool size for verify (default: config or cores)")
    parser.add_argument("--seed", type=int, default=None,
                        help="seed override for random suites")
    args = parser.parse_args(argv)

    try:
        with open(args.config, "r", encoding="utf-8") as handle:
            config_text = handle.read()
        config = parse_config(config_text)
        jobs = args.jobs if args.jobs is not None else \
            config.get_int("jobs", os.cpu_count() or 1)
        seed = args.seed if args.seed is not None else config.get_int("seed", 0)
    except (OSError, ConfigError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    try:
        if args.command == "ball-spectrum":
            return cmd_ball_spectrum(config, config_text, args.out_json,
                                     args.out_csv)
        if args.command == "spectrum":
            return cmd_spectrum(config, config_text, args.out_json,
                                args.out_csv)
        if args.command == "verify":
            return cmd_verify(config, config_text, args.out_json,
                              args.out_csv, jobs, seed)
        return cmd_sweep(config, config_text, args.out_json, args.out_csv)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # numerical failures -> exit 3
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
