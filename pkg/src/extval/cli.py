"""Command-line entry point: ``extval {measure,model,grid,ranks,sweep}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import characterization as ch
from .classic_measures import all_measures
from .errors import ExtvalError, InvalidParameterError
from .model_family import ModelParams, build_joint, validate
from .reports import (
    CSV_MEASURES,
    fmt,
    grid_rows,
    measure_json,
    rank_rows,
    read_labels_csv,
    summary_text,
    sweep_rows,
    to_csv,
    write_csv,
)
from .tables import build_contingency, expected_table

log = logging.getLogger("extval")


class UsageError(ExtvalError):
    pass


def _number_list(text: str) -> list[float]:
    try:
        return [ch.parse_number(v) for v in text.split(",") if v.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"bad number list {text!r}: {exc}") from None


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad integer list {text!r}: {exc}") from None


def _rational(text: str) -> float:
    try:
        return ch.parse_number(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text, encoding="utf-8")


def cmd_measure(args) -> int:
    source = sys.stdin if args.labels == "-" else args.labels
    table = build_contingency(read_labels_csv(source))
    vector = all_measures(table)
    if args.format == "csv":
        rows = [[short for _, short in CSV_MEASURES], [fmt(vector[m]) for m, _ in CSV_MEASURES]]
        _emit(to_csv(rows), args.out)
    else:
        _emit(measure_json(vector) + "\n", args.out)
    return 0


def cmd_model(args) -> int:
    params = ModelParams(args.classes, args.useful, args.noise, args.eps1, args.eps2)
    reasons = validate(params)
    if reasons:
        raise InvalidParameterError(reasons)
    joint = build_joint(params)
    out = joint.to_dict()
    if args.n is not None:
        if args.n < 1:
            raise UsageError("--n must be a positive integer")
        out["expected_table"] = expected_table(joint, args.n).to_dict()
    _emit(json.dumps(out, indent=2) + "\n", args.out)
    return 0


def _grid_spec(args) -> ch.GridSpec:
    data = {}
    if args.spec is not None:
        try:
            data = json.loads(Path(args.spec).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read grid spec {args.spec}: {exc}") from None
        if not isinstance(data, dict):
            raise UsageError("grid spec must be a JSON object")
    for key in ("num_classes", "n", "useful", "noise", "eps1", "eps2"):
        value = getattr(args, key, None)
        if value is not None:
            data[key] = value
    return ch.GridSpec.from_dict(data)


def cmd_grid(args) -> int:
    spec = _grid_spec(args)
    others = [c for c in ch.PAIR_CONVENTIONS if c != args.pair_convention]
    results = [ch.evaluate_grid(spec, c, args.workers) for c in [args.pair_convention, *others]]
    reports = [ch.violation_report(r) for r in results]
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_csv(out_dir / "grid.csv", grid_rows(results[0]))
    for rep in reports:
        (out_dir / f"violations_{rep.pair_convention}.json").write_text(rep.to_json() + "\n", encoding="utf-8")
    sys.stdout.write(f"{len(results[0])} valid combinations; wrote {out_dir}\n")
    sys.stdout.write(summary_text(reports))
    return 0


def cmd_ranks(args) -> int:
    result = ch.evaluate_grid(_grid_spec(args), args.pair_convention, args.workers)
    _emit(to_csv(rank_rows(result)), args.out)
    return 0


def cmd_sweep(args) -> int:
    points = ch.sweep_eps1(
        args.eps1 if args.eps1 is not None else ch.DEFAULT_SWEEP,
        num_classes=args.classes,
        useful=args.useful,
        noise=args.noise,
        eps2=args.eps2,
        n=args.n,
        pair_convention=args.pair_convention,
    )
    _emit(to_csv(sweep_rows(points)), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="extval",
        description="External cluster-validity measures and their characterization on a model family.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("measure", help="all seven measures for a class,cluster CSV file")
    p.add_argument("labels", help="CSV file with header 'class,cluster' ('-' for stdin)")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("model", help="joint distribution p(c,k) of one model")
    p.add_argument("--classes", type=int, required=True)
    p.add_argument("--useful", type=int, required=True)
    p.add_argument("--noise", type=int, default=0)
    p.add_argument("--eps1", type=_rational, default=0.0)
    p.add_argument("--eps2", type=_rational, default=0.0)
    p.add_argument("--n", type=int, help="also emit the expected contingency table for n objects")
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_model)

    def grid_flags(p):
        p.add_argument("--spec", help="JSON grid spec (keys: num_classes, n, useful, noise, eps1, eps2)")
        p.add_argument("--classes", dest="num_classes", type=int)
        p.add_argument("--n", type=int)
        p.add_argument("--useful", type=_int_list, help="comma-separated list")
        p.add_argument("--noise", type=_int_list, help="comma-separated list")
        p.add_argument("--eps1", type=_number_list, help="comma-separated list; '1/15' allowed")
        p.add_argument("--eps2", type=_number_list, help="comma-separated list")
        p.add_argument("--pair-convention", choices=ch.PAIR_CONVENTIONS, default="expected")
        p.add_argument("--workers", type=int, default=None)

    p = sub.add_parser("grid", help="evaluate the model grid and check the desiderata")
    grid_flags(p)
    p.add_argument("--out-dir", default=".", help="directory for grid.csv and violations_*.json")
    p.set_defaults(func=cmd_grid)

    p = sub.add_parser("ranks", help="per-measure ranks of every grid model")
    grid_flags(p)
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_ranks)

    p = sub.add_parser("sweep", help="measures along an eps1 sweep")
    p.add_argument("--eps1", type=_number_list, help="ascending comma-separated list (default 0..0.8 step 0.05)")
    p.add_argument("--classes", type=int, default=5)
    p.add_argument("--useful", type=int, default=5)
    p.add_argument("--noise", type=int, default=0)
    p.add_argument("--eps2", type=_rational, default=0.0)
    p.add_argument("--n", type=int, default=500)
    p.add_argument("--pair-convention", choices=ch.PAIR_CONVENTIONS, default="expected")
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ExtvalError, ValueError, OSError) as exc:
        sys.stderr.write(f"extval {args.command}: error: {exc}\n")
        return 2
    except AssertionError as exc:
        log.exception("internal invariant failed")
        sys.stderr.write(f"extval {args.command}: internal error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
