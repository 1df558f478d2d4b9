"""``quartic-det`` command line.

    quartic-det {det|laurent|zeros|validate|square-check} --config FILE
                [--out FILE] [--format csv|json] [--convention propagator|printed]
                [--emit-gnuplot]

Exit codes: 0 success, 2 configuration error, 3 numerical error,
4 validation failure (route disagreement, failed criterion, ...).
Output is a pure function of the configuration; every row carries the
configuration hash.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field
from typing import Any

from .determinant import CONVENTIONS, det_halfline, det_line, laurent_at_zero
from .exceptions import ConfigurationError, DomainError, QuarticDetError, RegionError
from .ode import IntegratorConfig
from .parallel import pmap
from .potentials import SQUARE, CoefficientPair
from .schrodinger import square_halfline_sides, square_line_sides
from .validation import DEFAULT_TOLERANCES, Context, run_suite
from .zeros import SearchRegion, entire_target, locate_zeros

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_VALIDATION = 0, 2, 3, 4
COMMANDS = ("det", "laurent", "zeros", "validate", "square-check")
DET_COLUMNS = ("k_re", "k_im", "D_re", "D_im", "route", "residual", "config_hash")

_KNOWN = {
    "potential", "case", "integrator", "k", "route_threshold", "laurent",
    "region", "validate", "format", "out", "convention",
}
_LAURENT_KEYS = {"radius", "n_nodes", "max_nodes", "drift_tol", "rel_eps", "match_rtol", "route"}
_VALIDATE_KEYS = {"criteria", "seed", "tolerances"}


class ValidationFailure(Exception):
    pass


def _finite(value, name):
    try:
        x = float(value)
    except (TypeError, ValueError):
        raise ConfigurationError(f"{name} must be a number, got {value!r}") from None
    if not math.isfinite(x):
        raise ConfigurationError(f"{name} must be finite")
    return x


def _check_finite_tree(obj, path="config"):
    if isinstance(obj, float) and not math.isfinite(obj):
        raise ConfigurationError(f"{path} contains a non-finite number")
    if isinstance(obj, dict):
        for key, v in obj.items():
            _check_finite_tree(v, f"{path}.{key}")
    elif isinstance(obj, list):
        for j, v in enumerate(obj):
            _check_finite_tree(v, f"{path}[{j}]")


def _parse_k(item) -> complex:
    if isinstance(item, (int, float)):
        return complex(_finite(item, "k"))
    if isinstance(item, (list, tuple)) and len(item) == 2:
        return complex(_finite(item[0], "k real part"), _finite(item[1], "k imaginary part"))
    raise ConfigurationError(f"k entries are numbers or [re, im] pairs, got {item!r}")


@dataclass
class RunConfig:
    potential: CoefficientPair
    case: str = "halfline"
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    k: list = field(default_factory=list)
    route_threshold: float = 1e-6
    laurent: dict = field(default_factory=dict)
    region: SearchRegion | None = None
    validate: dict = field(default_factory=dict)
    format: str = "csv"
    out: str | None = None
    convention: str | None = None
    raw: dict = field(default_factory=dict, repr=False)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "RunConfig":
        if not isinstance(data, dict):
            raise ConfigurationError("config must be a JSON object")
        unknown = set(data) - _KNOWN
        if unknown:
            raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
        _check_finite_tree(data)
        if "potential" not in data:
            raise ConfigurationError("config needs a 'potential'")
        cp = CoefficientPair.from_dict(data["potential"])
        case = data.get("case", "halfline")
        if case not in ("halfline", "line"):
            raise ConfigurationError("case must be 'halfline' or 'line'")
        integ = IntegratorConfig.from_dict(data.get("integrator", {}))
        ks = [_parse_k(item) for item in data.get("k", [])]
        thr = _finite(data.get("route_threshold", 1e-6), "route_threshold")
        laurent = dict(data.get("laurent", {}))
        bad = set(laurent) - _LAURENT_KEYS
        if bad:
            raise ConfigurationError(f"unknown laurent keys: {sorted(bad)}")
        region = None
        if "region" in data:
            try:
                region = SearchRegion.from_dict(data["region"])
            except RegionError as exc:
                raise ConfigurationError(str(exc)) from None
        validate = dict(data.get("validate", {}))
        bad = set(validate) - _VALIDATE_KEYS
        if bad:
            raise ConfigurationError(f"unknown validate keys: {sorted(bad)}")
        bad = set(validate.get("tolerances", {})) - set(DEFAULT_TOLERANCES)
        if bad:
            raise ConfigurationError(f"unknown tolerance names: {sorted(bad)}")
        fmt = data.get("format", "csv")
        if fmt not in ("csv", "json"):
            raise ConfigurationError("format must be 'csv' or 'json'")
        conv = data.get("convention")
        if conv is not None and conv not in CONVENTIONS:
            raise ConfigurationError(f"convention must be one of {CONVENTIONS}")
        return cls(cp, case, integ, ks, thr, laurent, region, validate, fmt, data.get("out"), conv, dict(data))

    def digest(self) -> str:
        """Hash of the canonical configuration (output location excluded)."""
        body = {k: v for k, v in self.raw.items() if k not in ("out", "format")}
        body["convention"] = self.convention
        text = json.dumps(body, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()[:16]


def _num(x: float) -> str:
    return repr(float(x))


def _csv(rows, columns) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_num(row[c]) if isinstance(row[c], float) else row[c] for c in columns])
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


# ------------------------------------------------------------ commands


def cmd_det(rc: RunConfig) -> tuple[list[dict], bool]:
    if not rc.k:
        raise ConfigurationError("det needs a non-empty 'k' list")
    if any(k == 0 for k in rc.k):
        raise ConfigurationError("k = 0 is a pole of D; use the 'laurent' command for the behaviour at 0")
    fn = det_halfline if rc.case == "halfline" else det_line
    h = rc.digest()

    def one(k):
        a = fn(rc.potential, k, "direct", rc.integrator).D
        b = fn(rc.potential, k, "minor", rc.integrator, rc.convention).D
        res = abs(a - b) / max(abs(a), abs(b), 1e-300)
        return [
            {"k_re": k.real, "k_im": k.imag, "D_re": v.real, "D_im": v.imag, "route": route, "residual": res, "config_hash": h}
            for route, v in (("direct", a), ("minor", b))
        ]

    rows = [r for chunk in pmap(one, rc.k) for r in chunk]
    ok = all(r["residual"] <= rc.route_threshold for r in rows)
    return rows, ok


def cmd_square_check(rc: RunConfig) -> tuple[list[dict], bool]:
    if rc.potential.q_spec != SQUARE:
        raise ConfigurationError(f"square-check needs q = {SQUARE!r}")
    if not rc.k or any(k == 0 for k in rc.k):
        raise ConfigurationError("square-check needs a non-empty 'k' list without 0")
    sides = square_halfline_sides if rc.case == "halfline" else square_line_sides
    h = rc.digest()

    def one(k):
        D, prod = sides(rc.potential, k, rc.integrator)
        res = abs(D - prod) / max(1.0, abs(D))
        return [
            {"k_re": k.real, "k_im": k.imag, "D_re": v.real, "D_im": v.imag, "route": route, "residual": res, "config_hash": h}
            for route, v in (("determinant", D), ("jost_product", prod))
        ]

    rows = [r for chunk in pmap(one, rc.k) for r in chunk]
    return rows, all(r["residual"] <= rc.route_threshold for r in rows)


def cmd_laurent(rc: RunConfig) -> dict:
    opts = dict(rc.laurent)
    r = opts.pop("radius", None)
    rep = laurent_at_zero(rc.potential, rc.case, r, rc.integrator, convention=rc.convention, **opts)
    return {**rep.to_dict(), "config_hash": rc.digest()}


def cmd_zeros(rc: RunConfig) -> list[dict]:
    if rc.region is None:
        raise ConfigurationError("zeros needs a 'region'")
    f = entire_target(rc.potential, rc.case, rc.integrator, rc.convention)
    return [{**z.to_dict(), "config_hash": rc.digest()} for z in locate_zeros(rc.region, f)]


def cmd_validate(rc: RunConfig):
    opts = rc.validate
    tol = dict(DEFAULT_TOLERANCES)
    tol.update({k: float(v) for k, v in opts.get("tolerances", {}).items()})
    ctx = Context(rc.integrator, rc.convention, int(opts.get("seed", Context.seed)), tol)
    only = opts.get("criteria")
    results = run_suite(ctx, only)
    for r in results:
        print(r.line(), file=sys.stderr)
    return results


# ------------------------------------------------------------ output


def _gnuplot(csv_path: str, command: str) -> str:
    title = "determinant routes" if command == "det" else "Schrodinger-square check"
    return (
        f"# plot script for {os.path.basename(csv_path)}\n"
        "set datafile separator ','\n"
        f"set title '{title}'\n"
        "set xlabel 'Re k'\nset ylabel 'D'\nset key outside\n"
        f"plot '{csv_path}' every ::1 using 1:3 with points title 'Re D', \\\n"
        f"     '{csv_path}' every ::1 using 1:4 with points title 'Im D'\n"
    )


def _render(command: str, payload, fmt: str, h: str) -> str:
    if command in ("det", "square-check"):
        return _csv(payload, DET_COLUMNS) if fmt == "csv" else _json(payload)
    if command == "laurent":
        if fmt == "json":
            return _json(payload)
        rows = [
            {"m": m, "a_re": float(v[0]), "a_im": float(v[1]), "config_hash": h}
            for m, v in sorted(payload["coefficients"].items(), key=lambda kv: int(kv[0]))
        ]
        return _csv(rows, ("m", "a_re", "a_im", "config_hash"))
    if command == "zeros":
        if fmt == "json":
            return _json(payload)
        rows = [
            {"k_re": z["k"][0], "k_im": z["k"][1], "lambda_re": z["lambda"][0], "lambda_im": z["lambda"][1],
             "multiplicity": z["multiplicity"], "classification": z["classification"], "residual": z["residual"],
             "config_hash": h}
            for z in payload
        ]
        return _csv(rows, ("k_re", "k_im", "lambda_re", "lambda_im", "multiplicity", "classification", "residual", "config_hash"))
    # validate: elapsed times go to stderr only, so the file stays deterministic
    items = [{**r.to_dict(), "config_hash": h} for r in payload]
    if fmt == "json":
        return _json(items)
    return _csv(items, ("number", "name", "passed", "detail", "config_hash"))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="quartic-det", description="Determinants of fourth-order operators with compactly supported coefficients.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", required=True, help="JSON run configuration")
    ap.add_argument("--out", help="output file (default: stdout)")
    ap.add_argument("--format", choices=("csv", "json"))
    ap.add_argument("--convention", choices=CONVENTIONS, help="orientation of the transfer matrix for minor formulas")
    ap.add_argument("--emit-gnuplot", action="store_true", help="write a gnuplot script next to the CSV output")
    return ap


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with open(args.config) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        if isinstance(data, dict) and args.convention:
            data = {**data, "convention": args.convention}
        rc = RunConfig.from_dict(data)
        fmt = args.format or rc.format
        out = args.out or rc.out
        if args.emit_gnuplot and (fmt != "csv" or not out or args.command not in ("det", "square-check")):
            raise ConfigurationError("--emit-gnuplot needs CSV output to a file from 'det' or 'square-check'")
        h = rc.digest()
        status = EXIT_OK
        if args.command == "det":
            payload, ok = cmd_det(rc)
            status = EXIT_OK if ok else EXIT_VALIDATION
        elif args.command == "square-check":
            payload, ok = cmd_square_check(rc)
            status = EXIT_OK if ok else EXIT_VALIDATION
        elif args.command == "laurent":
            payload = cmd_laurent(rc)
        elif args.command == "zeros":
            payload = cmd_zeros(rc)
        else:
            payload = cmd_validate(rc)
            status = EXIT_OK if all(r.passed for r in payload) else EXIT_VALIDATION
        text = _render(args.command, payload, fmt, h)
    except (ConfigurationError, DomainError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (QuarticDetError, ArithmeticError) as exc:
        print(f"numerical error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC

    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
        if args.emit_gnuplot:
            with open(os.path.splitext(out)[0] + ".gp", "w") as fh:
                fh.write(_gnuplot(out, args.command))
    else:
        sys.stdout.write(text)
    if status == EXIT_VALIDATION:
        print("validation failure", file=sys.stderr)
    return status


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
