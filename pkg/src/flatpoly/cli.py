"""Command-line front end: ``flatpoly analyze|sweep|verify|covariance``."""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from .covariance import ORACLE_MAX_Q
from .experiments import (
    COVARIANCE_COLUMNS,
    VERIFIERS,
    SweepConfig,
    covariance_row,
    provenance_header,
    run_sweep,
    sweep_columns,
    write_csv,
)
from .generators import FAMILY_KINDS, FamilySpec
from .sequences import BinarySequence, SequenceParseError, SignSequence, parse_sequences, to_binary
from .spectral import DEFAULT_ALPHAS, flatness_report


class CLIError(Exception):
    pass


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _add_family_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("family")
    g.add_argument("--family", choices=FAMILY_KINDS)
    g.add_argument("--config", help="family as key=value pairs, or a file holding them")
    g.add_argument("--p", type=float, help="target frequency of -1 (random_p)")
    g.add_argument("--density", type=float, help="interior density of ones (nb_density)")
    g.add_argument("--prime", type=int, help="odd prime (legendre)")
    g.add_argument("--k", type=int, help="exponent, length 2**k (rudin_shapiro)")
    g.add_argument("--seed", type=int)
    g.add_argument("--endpoint-convention", action="store_true", default=None,
                   help="force first and last entries to +1 (random_p)")  # fmt: skip


def _family_from_args(args) -> FamilySpec | None:
    kw = {}
    if args.config:
        path = Path(args.config)
        text = path.read_text() if path.is_file() else args.config
        kw.update(FamilySpec.from_config(text).as_dict())
    if args.family:
        kw["kind"] = args.family
    for key in ("p", "density", "prime", "k", "seed", "endpoint_convention"):
        val = getattr(args, key)
        if val is not None:
            kw[key] = val
    if not kw:
        return None
    if "kind" not in kw:
        raise CLIError("family parameters given without --family")
    defaults = FamilySpec(kind=kw["kind"])
    merged = {**defaults.as_dict(), **kw}
    try:
        return FamilySpec(**merged)
    except ValueError as exc:
        raise CLIError(str(exc))


def _read_sequences(path: str) -> list:
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    try:
        return parse_sequences(text)
    except SequenceParseError as exc:
        raise CLIError(f"{path}: {exc}")
    except ValueError as exc:
        raise CLIError(f"{path}: {exc}")


def _open_out(path: str | None):
    if path is None:
        return sys.stdout
    try:
        return open(path, "w", newline="")
    except OSError as exc:
        raise CLIError(f"cannot write {path}: {exc}")


def _json_safe(d: dict) -> dict:
    return {k: ("inf" if isinstance(v, float) and math.isinf(v) else v) for k, v in d.items()}


# subcommands


def cmd_analyze(args) -> int:
    if args.input:
        seqs = _read_sequences(args.input)
        if len(seqs) != 1:
            raise CLIError(f"{args.input}: expected exactly one sequence, found {len(seqs)}")
        s = seqs[0]
        if isinstance(s, BinarySequence):
            raise CLIError("analyze expects a +/- sequence; use 'covariance' for 0/1 input")
    else:
        family = _family_from_args(args)
        if family is None:
            raise CLIError("give a sequence file or a --family")
        if family.is_binary:
            raise CLIError("nb_density produces 0/1 sequences; use 'covariance'")
        q = args.q_list[0] if args.q_list else None
        try:
            s = family.generate(q)
        except ValueError as exc:
            raise CLIError(str(exc))
    alphas = args.alphas if args.alphas is not None else DEFAULT_ALPHAS
    report = flatness_report(s, alphas)
    out = _open_out(args.out)
    try:
        json.dump(_json_safe(report.to_dict()), out, indent=2)
        out.write("\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def cmd_sweep(args) -> int:
    family = _family_from_args(args)
    if family is None:
        raise CLIError("sweep needs a --family")
    if not args.q_list:
        raise CLIError("sweep needs a non-empty --q-list")
    alphas = tuple(args.alphas) if args.alphas is not None else DEFAULT_ALPHAS
    try:
        config = SweepConfig(family, args.q_list, alphas, args.trials, args.out, jobs=args.jobs)
        for q in config.q_list:
            family.generate(q, 0)
    except ValueError as exc:
        raise CLIError(str(exc))
    out = _open_out(config.out)
    try:
        rows = run_sweep(config)
        header = provenance_header(
            "sweep", family,
            {"q_list": ",".join(map(str, config.q_list)), "trials": config.trials,
             "alphas": ",".join(f"{a:g}" for a in alphas)},
            timestamp=not args.no_timestamp,
        )  # fmt: skip
        write_csv(rows, sweep_columns(rows), header, out)
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def cmd_verify(args) -> int:
    result = VERIFIERS[args.theorem]()
    text = "\n".join(result.lines()) + "\n"
    if args.out:
        out = _open_out(args.out)
        with out:
            out.write(text)
    sys.stdout.write(text)
    return 0 if result.passed else 1


def cmd_covariance(args) -> int:
    if args.input:
        seqs = [to_binary(s) if isinstance(s, SignSequence) else s for s in _read_sequences(args.input)]
        family = None
        if not seqs:
            raise CLIError(f"{args.input}: no sequences found")
    else:
        family = _family_from_args(args)
        if family is None:
            raise CLIError("give a sequence file or a --family")
        if not args.q_list:
            raise CLIError("covariance with a family needs --q-list")
        try:
            seqs = [family.generate(q, t) for q in args.q_list for t in range(args.trials)]
        except ValueError as exc:
            raise CLIError(str(exc))
        seqs = [to_binary(s) if isinstance(s, SignSequence) else s for s in seqs]
    if args.oracle:
        too_big = [b.q for b in seqs if b.q > ORACLE_MAX_Q]
        if too_big:
            raise CLIError(f"--oracle is limited to q <= {ORACLE_MAX_Q}; got q = {max(too_big)}")
    if any(b.m == 0 for b in seqs):
        raise CLIError("a 0/1 sequence of weight 0 has no covariance diagnostics")
    trials = args.trials if family is not None else 1
    rows = [covariance_row(b, i % trials if family else i, args.oracle) for i, b in enumerate(seqs)]
    out = _open_out(args.out)
    try:
        params = {"oracle": int(args.oracle)}
        if args.q_list:
            params["q_list"] = ",".join(map(str, args.q_list))
        header = provenance_header("covariance", family, params, timestamp=not args.no_timestamp)
        write_csv(rows, COVARIANCE_COLUMNS, header, out)
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="flatpoly", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output file (default stdout)")
    common.add_argument("--no-timestamp", action="store_true", help="omit the timestamp header line")

    a = sub.add_parser("analyze", parents=[common], help="flatness report of one sequence (JSON)")
    a.add_argument("input", nargs="?", help="sequence file, '-' for stdin")
    a.add_argument("--q-list", type=_int_list, help="size for families that need one")
    a.add_argument("--alphas", type=_float_list)
    _add_family_flags(a)
    a.set_defaults(func=cmd_analyze)

    s = sub.add_parser("sweep", parents=[common], help="reports over a family and q ladder (CSV)")
    s.add_argument("--q-list", type=_int_list)
    s.add_argument("--alphas", type=_float_list)
    s.add_argument("--trials", type=int, default=1)
    s.add_argument("--jobs", type=int, default=1, help="worker processes")
    _add_family_flags(s)
    s.set_defaults(func=cmd_sweep)

    v = sub.add_parser("verify", parents=[common], help="run a canned desk-scale check")
    v.add_argument("theorem", choices=sorted(VERIFIERS))
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("covariance", parents=[common], help="covariance diagnostics (CSV)")
    c.add_argument("input", nargs="?", help="sequence file; +/- lines are mapped to 0/1")
    c.add_argument("--q-list", type=_int_list)
    c.add_argument("--trials", type=int, default=1)
    c.add_argument("--oracle", action="store_true", help=f"quadrature cross-check (q <= {ORACLE_MAX_Q})")
    _add_family_flags(c)
    c.set_defaults(func=cmd_covariance)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CLIError as exc:
        print(f"flatpoly {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
