"""Command-line front end: ``run``, ``sweep`` and ``compare``."""

from __future__ import annotations

import argparse
import os
import re
import sys
from pathlib import Path

from . import experiments as ex
from .config import ConfigError, Protocol, load_config, scenario

EXIT_CONFIG = 2
EXIT_IO = 3
OUT_ENV = "MRPGTCO_OUT"


def parse_seeds(text: str) -> list[int]:
    """``"1,2,5"`` or ranges such as ``"1-10"``; seeds are non-negative."""
    seeds: list[int] = []
    for part in filter(None, (p.strip() for p in text.split(","))):
        m = re.fullmatch(r"(\d+)(?:-(\d+))?", part)
        if not m:
            raise ConfigError(f"bad seed list {text!r}")
        lo = int(m.group(1))
        seeds.extend(range(lo, int(m.group(2) or lo) + 1))
    if not seeds:
        raise ConfigError("at least one seed is required")
    return seeds


def _split(text: str | None) -> list[str]:
    return [v.strip() for v in text.split(",") if v.strip()] if text else []


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mrpgtco", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", type=Path, help="key = value config file (default: 200 m reference scenario)")
        p.add_argument("--out", type=Path, help=f"output directory (default: ${OUT_ENV} or ./results)")
        p.add_argument("--seeds", default="1", help="comma-separated seeds, ranges allowed (1-10)")
        p.add_argument("--jobs", type=int, default=1, help="worker processes")

    p = sub.add_parser("run", help="simulate one configuration per seed")
    common(p)
    p.add_argument("--protocol", help="override the configured protocol")

    p = sub.add_parser("sweep", help="vary one parameter")
    common(p)
    p.add_argument("--axis", required=True, choices=[a for a in ex.AXES if a != "none"])
    p.add_argument("--values", help="comma-separated sweep values (default depends on the axis)")
    p.add_argument("--protocol", help="override the configured protocol")

    p = sub.add_parser("compare", help="run several protocols on identical seeds")
    common(p)
    p.add_argument("--protocol", default=",".join(p.value for p in Protocol if p is not Protocol.MRP_GTCO_NORELAY),
                   help="comma-separated protocols to compare")
    return parser


def _base(args):
    base = load_config(args.config) if args.config else scenario(200)
    if args.command != "compare" and args.protocol:
        base = base.replace(protocol=Protocol.parse(args.protocol))
    return base


def _out(args) -> Path:
    if args.out is not None:
        return args.out
    return Path(os.environ.get(OUT_ENV) or "results")


def _fmt(v) -> str:
    if v is None:
        return "-"
    return f"{v:.6g}" if isinstance(v, float) else str(v)


def _report(label: str, results) -> None:
    for r in results:
        s = r.summary
        print(f"{label} seed={r.config.rng_seed} FDN={_fmt(s.fdn)} HDN={_fmt(s.hdn)} LDN={_fmt(s.ldn)}")
    med = ex.aggregate(results, ex.median_of)
    mean = ex.aggregate(results, ex.mean_of)
    print(f"{label} median FDN={_fmt(med[0])} HDN={_fmt(med[1])} LDN={_fmt(med[2])}")
    print(f"{label} mean   FDN={_fmt(mean[0])} HDN={_fmt(mean[1])} LDN={_fmt(mean[2])} "
          f"energy/round={_fmt(mean[4])} J")


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        base = _base(args)
        seeds = parse_seeds(args.seeds)
        if args.command == "run":
            spec = ex.ExperimentSpec(base, seeds=seeds, out=_out(args))
            results, paths = ex.run_experiment(spec, args.jobs)
            _report(base.protocol.value, results)
        elif args.command == "sweep":
            spec = ex.ExperimentSpec(base, args.axis, _split(args.values), seeds, _out(args))
            grouped, paths = ex.sweep_experiment(spec, args.jobs)
            for (value, proto), group in grouped.items():
                _report(f"{args.axis}={value} {proto}", group)
        else:
            protocols = list(dict.fromkeys(Protocol.parse(p) for p in _split(args.protocol)))
            spec = ex.ExperimentSpec(base, seeds=seeds, out=_out(args))
            by_proto, paths = ex.compare_experiment(spec, protocols, args.jobs)
            for proto, group in by_proto.items():
                _report(proto.value, group)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    for path in paths:
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
