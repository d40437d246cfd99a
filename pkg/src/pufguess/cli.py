"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 runtime or data error (including a
failed ``oracle-validate`` run).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, replace
from datetime import datetime, timezone

import numpy as np

from . import __version__, analytic, metrics, strong_puf
from . import rng as _rng
from .bits import BitVector
from .puf_model import PRESETS, Population, PufSpec, sample_population
from .validate import run_validation

TOOL = "pufguess"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _metadata(args, config: dict) -> dict:
    return {
        "tool": TOOL,
        "version": __version__,
        "config": config,
        "seed": args.seed,
        "created": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }


def _config(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "output")}


def _emit(text: str, path: str | None):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _csv_text(meta: dict, header, rows) -> str:
    buf = io.StringIO()
    buf.write(f"# tool: {meta['tool']} {meta['version']}\n")
    buf.write(f"# config: {json.dumps(meta['config'], sort_keys=True)}\n")
    buf.write(f"# seed: {meta['seed']}\n")
    buf.write(f"# created: {meta['created']}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _json_text(meta: dict, body: dict) -> str:
    return json.dumps({**meta, **body}, indent=1, default=_jsonable) + "\n"


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    raise TypeError(type(obj).__name__)


def _fmt(x) -> str:
    return "" if x is None else repr(float(x))


# ---------------------------------------------------------------------------


def cmd_simulate(args) -> int:
    if args.preset:
        spec = PRESETS[args.preset].spec
    else:
        spec = PufSpec()
    overrides = {k: v for k, v in (("m", args.bits), ("p", args.p), ("D", args.D), ("e", args.e)) if v is not None}
    spec = replace(spec, **overrides)
    pop = sample_population(spec, args.devices, args.resamples, args.seed, threads=args.threads)
    meta = _metadata(args, _config(args))
    _emit(json.dumps({**meta, **pop.to_dict()}, indent=1) + "\n", args.output)
    if args.output not in (None, "-"):
        flips = [metrics.fhd(d.truth, r) for d in pop.devices for r in d.reads]
        ones, _ = metrics.bias_level(pop.truths)
        print(f"{len(pop.devices)} devices x {len(pop.devices[0].reads)} reads x {spec.m} bits "
              f"(p={spec.p}, D={spec.D}); ones fraction {ones:.4f}; "
              f"mean read-vs-truth FHD {np.mean(flips):.4f}; written to {args.output}")
    return 0


def cmd_report(args) -> int:
    pop = Population.load(args.population)
    rep = metrics.security_report(pop, rho=args.rho)
    meta = _metadata(args, {**_config(args), "population_seed": pop.seed})
    if args.format == "csv":
        text = _csv_text(meta, rep.CSV_FIELDS, [rep.csv_row()])
    else:
        text = _json_text(meta, {"report": rep.to_dict()})
    _emit(text, args.output)
    if args.histogram:
        if len(pop.devices) < 2:
            raise ValueError("inter-FHD histogram needs at least 2 devices")
        summary = metrics.inter_fhd(pop.truths, bins=args.bins)
        rows = [(_fmt(edge), count) for edge, count in summary.histogram_rows()]
        _emit(_csv_text(meta, ("inter_fhd_bin_left", "count"), rows), args.histogram)
    return 0


def _sweep(start: float, stop: float, step: float) -> list[float]:
    if step <= 0 or stop < start:
        raise UsageError("need step > 0 and stop >= start")
    n = int(math.floor((stop - start) / step + 1e-9))
    return [round(start + i * step, 10) for i in range(n + 1)]


CURVES = {
    # name: (x label, default (start, stop, step))
    "renyi-half": ("p", (0.0, 1.0, 0.01)),
    "one-minus-hd": ("D", (0.0, 0.5, 0.01)),
    "min-entropy": ("p", (0.0, 0.5, 0.01)),
    "theorem2-rate": ("s", (None, 1.0, 0.01)),
    "auth-cdf": ("l", (0, 20, 1)),
    "mac-eta": ("N", (0, 10, 1)),
}


def _curve_value(args, x: float) -> float:
    name = args.curve
    if name == "renyi-half":
        return analytic.renyi_entropy(x, 0.5)
    if name == "one-minus-hd":
        return 1.0 - analytic.binary_entropy(x)
    if name == "min-entropy":
        return analytic.min_entropy_distortion_rate(x, args.D)
    if name == "theorem2-rate":
        return analytic.failure_constrained_rate(args.p, args.D, args.rho, x).upper_bound_on_rate
    if name == "auth-cdf":
        return analytic.auth_success_cdf(args.h_inf, int(x))
    if name == "mac-eta":
        return analytic.mac_avg_guesswork(int(x), args.L, args.p, "identity").log2_guesses
    raise UsageError(f"unknown curve {name!r}")


def cmd_analytic(args) -> int:
    label, (start, stop, step) = CURVES[args.curve]
    if args.curve == "theorem2-rate" and start is None:
        start = round(args.p + (args.step or step), 10)
    xs = _sweep(start if args.start is None else args.start,
                stop if args.stop is None else args.stop,
                step if args.step is None else args.step)
    rows = [(x, _curve_value(args, x)) for x in xs]
    meta = _metadata(args, _config(args))
    if args.format == "json":
        text = _json_text(meta, {"curve": args.curve, "x": label,
                                 "rows": [{"x": x, "value": v} for x, v in rows]})
    else:
        text = _csv_text(meta, (label, args.curve), [(repr(x), repr(v)) for x, v in rows])
    _emit(text, args.output)
    return 0


def cmd_oracle_validate(args) -> int:
    result = run_validation(max_m=args.max_m, seed=args.seed, tolerance=args.tolerance,
                            distributions=args.distributions)
    meta = _metadata(args, _config(args))
    _emit(_json_text(meta, result), args.output)
    status = "PASS" if result["passed"] else "FAIL"
    print(f"oracle-validate: {status} ({len(result['checks']) - len(result['failed'])}"
          f"/{len(result['checks'])} checks)", file=sys.stderr)
    return 0 if result["passed"] else 2


def cmd_strong_respond(args) -> int:
    key = BitVector.from_hex(args.key_hex)
    device = strong_puf.build_device(key)
    tag = strong_puf.respond(device, strong_puf.Challenge.from_hex(args.challenge_hex))
    print(tag.to_hex())
    return 0


def cmd_strong_avalanche(args) -> int:
    device = strong_puf.build_device(BitVector.from_hex(args.key_hex) if args.key_hex
                                     else strong_puf._random_key(_rng.stream(args.seed, _rng.DEVICES, 1)))
    rows = []
    for k in range(args.k_min, args.k_max + 1):
        s = strong_puf.avalanche_experiment(device, k, args.challenges, args.seed)
        rows.append((k, _fmt(s.mean), _fmt(s.std_dev)))
    _emit(_csv_text(_metadata(args, _config(args)), ("k", "mean_fhd", "std_fhd"), rows), args.output)
    return 0


def cmd_strong_noise(args) -> int:
    rows = []
    for d in args.d:
        s = strong_puf.noise_propagation(d, args.trials, args.seed)
        rows.append((repr(d), _fmt(s.mean), _fmt(s.std_dev), _fmt(strong_puf.expected_noise_propagation(d))))
    header = ("d", "mean_fhd", "std_fhd", "expected_fhd")
    _emit(_csv_text(_metadata(args, _config(args)), header, rows), args.output)
    return 0


def cmd_strong_inter(args) -> int:
    s = strong_puf.inter_distance(args.devices, args.seed)
    meta = _metadata(args, _config(args))
    if args.format == "csv":
        text = _csv_text(meta, ("mean_fhd", "std_fhd", "pairs"), [(_fmt(s.mean), _fmt(s.std_dev), s.count)])
    else:
        text = _json_text(meta, {"inter_fhd": asdict(s)})
    _emit(text, args.output)
    return 0


# ---------------------------------------------------------------------------


def _floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _common() -> argparse.ArgumentParser:
    # fresh per subcommand: parents share action objects, so set_defaults would leak
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--output", "-o", default=None, help="output path (default: stdout)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--threads", type=int, default=1, help="worker cap; results do not depend on it")
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog=TOOL, description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"{TOOL} {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", parents=[_common()], help="simulate a PUF population")
    p.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("--bits", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--D", type=float)
    p.add_argument("--e", type=float)
    p.add_argument("--devices", type=int, default=10)
    p.add_argument("--resamples", type=int, default=1)
    p.set_defaults(func=cmd_simulate, output="population.json")

    p = sub.add_parser("report", parents=[_common()], help="quality metrics and growth rates")
    p.add_argument("population")
    p.add_argument("--rho", type=float, default=1.0)
    p.add_argument("--histogram", help="write the inter-FHD histogram as CSV to this path")
    p.add_argument("--bins", type=int, default=50)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("analytic", parents=[_common()], help="sweep a closed-form curve")
    p.add_argument("curve", choices=sorted(CURVES))
    p.add_argument("--start", type=float)
    p.add_argument("--stop", type=float)
    p.add_argument("--step", type=float)
    p.add_argument("--p", type=float, default=0.3)
    p.add_argument("--D", type=float, default=0.0)
    p.add_argument("--rho", type=float, default=1.0)
    p.add_argument("--h-inf", type=float, default=1.0)
    p.add_argument("--L", type=int, default=8)
    p.set_defaults(func=cmd_analytic, format="csv")

    p = sub.add_parser("oracle-validate", parents=[_common()], help="run the oracle cross-check suite")
    p.add_argument("--max-m", type=int, default=12)
    p.add_argument("--distributions", type=int, default=100)
    p.add_argument("--tolerance", type=float, default=1e-9)
    p.set_defaults(func=cmd_oracle_validate)

    sp = sub.add_parser("strong-puf", help="strong PUF operations and experiments")
    ssub = sp.add_subparsers(dest="strong_command", required=True, parser_class=_Parser)
    q = ssub.add_parser("respond", parents=[_common()])
    q.add_argument("--key-hex", required=True, help="512-bit key as 128 hex digits")
    q.add_argument("--challenge-hex", required=True)
    q.set_defaults(func=cmd_strong_respond)
    q = ssub.add_parser("avalanche", parents=[_common()])
    q.add_argument("--key-hex")
    q.add_argument("--k-min", type=int, default=0)
    q.add_argument("--k-max", type=int, default=8)
    q.add_argument("--challenges", type=int, default=1000)
    q.set_defaults(func=cmd_strong_avalanche)
    q = ssub.add_parser("noise", parents=[_common()])
    q.add_argument("--d", type=_floats, default=[0.0, 1e-4, 1e-3, 1e-2, 1e-1])
    q.add_argument("--trials", type=int, default=1000)
    q.set_defaults(func=cmd_strong_noise)
    q = ssub.add_parser("inter", parents=[_common()])
    q.add_argument("--devices", type=int, default=1000)
    q.set_defaults(func=cmd_strong_inter)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"{TOOL}: error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, KeyError, OSError, json.JSONDecodeError, TypeError) as exc:
        print(f"{TOOL}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
