"""Command-line front end.

Exit codes: 0 success, 1 usage or input-format error, 2 validation failure,
3 indeterminate classification.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import report
from .cantor import build, five_interval_check, write_intervals_csv
from .classification import battery, classify, render_table
from .equivalence import (four_condition_crosscheck, sequence_equivalent, tail_equivalent,
                          weak_tail_equivalent)
from .errors import (CantorDimError, DomainError, ParameterDomainError, SequenceValidationError,
                     SpecFormatError, SynthesisInfeasibleError)
from .sequences import validate
from .specfiles import load_config, load_sequence_spec, parse_gauge, split_gauges
from .synthesis import sequence_from_function
from .tails import box_dimension_oracle, dimensions, tail_table

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_INDETERMINATE = 0, 1, 2, 3

DEFAULTS = {
    "max_n": 100_000,
    "depth": None,
    "seed": 0,
    "jmax": 64,
    "samples": 200,
    "head": "strict",
    "format": "text",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common(p):
    p.add_argument("--config", help="key = value file of defaults; flags win")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--seed", type=int, help="seed for sampled checks (default 0)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cantordim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("validate", help="check positivity, monotonicity and tails")
    p.add_argument("spec")
    p.add_argument("--max-n", type=int)
    _common(p)

    p = sub.add_parser("build", help="build the interval tree to a depth")
    p.add_argument("spec")
    p.add_argument("--depth", type=int)
    p.add_argument("--dump", help="CSV file for the deepest generation")
    p.add_argument("--samples", type=int)
    _common(p)

    p = sub.add_parser("dims", help="Hausdorff and packing dimension estimates")
    p.add_argument("spec")
    p.add_argument("--max-n", type=int)
    p.add_argument("--box-depth", type=int, help="also run the box-counting oracle")
    _common(p)

    p = sub.add_parser("classify", help="partition cell of one gauge")
    p.add_argument("spec")
    p.add_argument("--gauge")
    p.add_argument("--depth", type=int)
    p.add_argument("--max-n", type=int)
    _common(p)

    p = sub.add_parser("table", help="partition table over several gauges")
    p.add_argument("spec")
    p.add_argument("--gauges", nargs="+")
    p.add_argument("--depth", type=int)
    p.add_argument("--max-n", type=int)
    p.add_argument("--format", choices=("text", "json"))
    _common(p)

    p = sub.add_parser("compare", help="equivalence verdicts for two sequences")
    p.add_argument("spec_a")
    p.add_argument("spec_b")
    p.add_argument("--jmax", type=int)
    p.add_argument("--max-n", type=int)
    _common(p)

    p = sub.add_parser("synthesize", help="sequence whose associated gauge is given")
    p.add_argument("--gauge")
    p.add_argument("--count", type=int)
    p.add_argument("--head", choices=("strict", "envelope"))
    _common(p)

    p = sub.add_parser("export", help="CSV of tail functionals for plotting")
    p.add_argument("spec")
    p.add_argument("--gauge")
    p.add_argument("--max-n", type=int)
    _common(p)
    return parser


def _settings(args) -> dict:
    """Merge hard defaults, then the config file, then explicit flags."""
    cfg = load_config(args.config) if args.config else {}
    out = dict(DEFAULTS)
    out.update(cfg)
    for key, value in vars(args).items():
        if value is not None:
            out[key] = value
    for key in ("max_n", "depth", "seed", "jmax", "samples", "count", "box_depth"):
        if out.get(key) is not None:
            try:
                out[key] = int(out[key])
            except (TypeError, ValueError):
                raise UsageError(f"{key} must be an integer") from None
    return out


def _require(settings, key, flag):
    if settings.get(key) is None:
        raise UsageError(f"missing {flag}")
    return settings[key]


def _emit(text: str, settings: dict):
    if settings.get("out"):
        Path(settings["out"]).write_text(text)
    else:
        sys.stdout.write(text)


def _cell_json(rep):
    est = rep.estimate
    out = {
        "sequence_spec": rep.sequence_spec,
        "gauge_spec": rep.gauge_spec,
        "cell": ({"H": rep.cell.hausdorff.label, "P": rep.cell.packing.label}
                 if rep.cell else None),
        "liminf": {"window_value": est.window_inf, "trend": est.trend_inf.value,
                   "slope": est.slope_inf,
                   "class": est.liminf_class.label if est.liminf_class is not None else None},
        "limsup": {"window_value": est.window_sup, "trend": est.trend_sup.value,
                   "slope": est.slope_sup,
                   "class": est.limsup_class.label if est.limsup_class is not None else None},
        "oracles": [{"depth": r.depth, "cover": r.cover, "packing": r.packing}
                    for r in rep.oracles],
        "sandwich": rep.sandwich,
        "verdicts": {"classification": rep.verdict, "regular": rep.regular, "reason": rep.reason},
    }
    return out


def _verdict_json(v):
    return {"verdict": v.verdict, "probe_bound": v.probe_bound, "witnesses": v.witnesses,
            "counterexample": v.counterexample, "slope": v.slope}


def cmd_validate(settings):
    spec = load_sequence_spec(settings["spec"])
    rep = validate(spec.sequence, settings["max_n"])
    _emit(report.to_json({
        "sequence_spec": spec.text,
        "family": spec.sequence.family,
        "checked_up_to": rep.checked_up_to,
        "ok": rep.ok,
        "positive_ok": rep.positive_ok,
        "monotone_ok": rep.monotone_ok,
        "tail_ok": rep.tail_ok,
        "tail_consistency_max_err": rep.tail_consistency_max_err,
        "failures": [list(f) for f in rep.failures],
    }), settings)
    return EXIT_OK if rep.ok else EXIT_INVALID


def cmd_build(settings):
    spec = load_sequence_spec(settings["spec"])
    depth = _require(settings, "depth", "--depth")
    approx = build(spec.sequence, depth)
    body = {
        "sequence_spec": spec.text,
        "depth": depth,
        "root_length": approx.total_length,
        "tail_1": spec.sequence.tail(1),
        "generation_length_sum": float(sum(approx.leaf_length)),
    }
    if depth >= 1:
        check = five_interval_check(approx, samples=settings["samples"], seed=settings["seed"])
        body["ball_check"] = {"samples": check.samples, "seed": settings["seed"],
                              "worst_ratio": check.worst_ratio, "ok": check.ok}
    if settings.get("dump"):
        with open(settings["dump"], "w", newline="") as fh:
            write_intervals_csv(approx, fh)
    _emit(report.to_json(body), settings)
    return EXIT_OK


def cmd_dims(settings):
    spec = load_sequence_spec(settings["spec"])
    est = dimensions(spec.sequence, settings["max_n"])
    body = {"sequence_spec": spec.text, "max_n": settings["max_n"], "dim_H": est.dim_h,
            "dim_P": est.dim_p, "diagnostics": est.diagnostics}
    if settings.get("box_depth"):
        body["box_dimension"] = box_dimension_oracle(build(spec.sequence, settings["box_depth"]))
    _emit(report.to_json(body), settings)
    return EXIT_OK


def cmd_classify(settings):
    spec = load_sequence_spec(settings["spec"])
    gauge = parse_gauge(_require(settings, "gauge", "--gauge"))
    rep = classify(spec.sequence, gauge, settings["max_n"], settings.get("depth"),
                   sequence_spec=spec.text)
    _emit(report.to_json(_cell_json(rep)), settings)
    return EXIT_OK if rep.cell is not None else EXIT_INDETERMINATE


def cmd_table(settings):
    spec = load_sequence_spec(settings["spec"])
    raw = _require(settings, "gauges", "--gauges")
    names = split_gauges([raw] if isinstance(raw, str) else raw)
    gauges = [parse_gauge(g) for g in names]
    rows = battery(spec.sequence, gauges, settings["max_n"], settings.get("depth"),
                   sequence_spec=spec.text)
    if settings["format"] == "json":
        _emit(report.to_json({"sequence_spec": spec.text,
                              "rows": [_cell_json(r) for r in rows]}), settings)
    else:
        _emit(render_table(rows) + "\n", settings)
    return EXIT_OK if all(r.cell is not None for r in rows) else EXIT_INDETERMINATE


def cmd_compare(settings):
    a = load_sequence_spec(settings["spec_a"])
    b = load_sequence_spec(settings["spec_b"])
    max_n = settings["max_n"]
    cross = four_condition_crosscheck(a.sequence, b.sequence, max_n=max_n, jmax=settings["jmax"])
    body = {
        "sequence_a": a.text,
        "sequence_b": b.text,
        "sequence": _verdict_json(sequence_equivalent(a.sequence, b.sequence, max_n)),
        "tail": _verdict_json(tail_equivalent(a.sequence, b.sequence, max_n)),
        "weak_tail": _verdict_json(
            weak_tail_equivalent(a.sequence, b.sequence, max_n, settings["jmax"])),
        "crosscheck": {"conditions": cross.conditions, "consistent": cross.consistent,
                       "verdict": cross.verdict,
                       "cells_a": cross.details["cells_a"], "cells_b": cross.details["cells_b"]},
    }
    _emit(report.to_json(body), settings)
    return EXIT_OK if cross.verdict != "indeterminate" else EXIT_INDETERMINATE


def cmd_synthesize(settings):
    gauge_text = _require(settings, "gauge", "--gauge")
    count = _require(settings, "count", "--count")
    out = _require(settings, "out", "--out (path of the spec file to write)")
    gauge = parse_gauge(gauge_text)
    seq = sequence_from_function(gauge, count, head=settings["head"])
    out = Path(out)
    terms_path = out.with_suffix(".terms")
    terms = seq.term(list(range(1, count + 1)))
    terms_path.write_text("".join(f"{t:.17g}\n" for t in terms))
    out.write_text(
        f"# synthesized from gauge {gauge.spec()}; count = {count}; head = {settings['head']}\n"
        f"# tails past the last term are truncated to 0\n"
        f"family = explicit\n"
        f"terms_file = {terms_path.name}\n")
    sys.stdout.write(report.to_json({"gauge_spec": gauge.spec(), "count": count,
                                     "head_length": seq.head_length, "spec_file": str(out),
                                     "terms_file": str(terms_path)}))
    return EXIT_OK


def cmd_export(settings):
    spec = load_sequence_spec(settings["spec"])
    gauge = parse_gauge(_require(settings, "gauge", "--gauge"))
    rows = tail_table(spec.sequence, gauge, settings["max_n"])
    _emit(report.to_csv(["n", "r_n", "b_n", "n_h_b_n", "dim_ratio"], rows), settings)
    return EXIT_OK


COMMANDS = {
    "validate": cmd_validate, "build": cmd_build, "dims": cmd_dims, "classify": cmd_classify,
    "table": cmd_table, "compare": cmd_compare, "synthesize": cmd_synthesize,
    "export": cmd_export,
}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        settings = _settings(args)
        return COMMANDS[args.command](settings)
    except (UsageError, SpecFormatError) as exc:
        print(f"cantordim: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SequenceValidationError, ParameterDomainError, DomainError,
            SynthesisInfeasibleError) as exc:
        print(f"cantordim: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except CantorDimError as exc:
        print(f"cantordim: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
