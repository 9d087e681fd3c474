"""``kmk`` command-line interface.

Exit status: 0 success, 1 usage or input error, 2 a mathematical check failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import warnings
from typing import Sequence

from . import cache
from .dualizing import boundary_weight_check, dualizing_descriptor
from .engine import (LocalizationEngine, convention_fingerprint, duality_oracle,
                     rank_one_pin)
from .errors import (DictionaryPinFailure, KMKError, NonClearingEntry,
                     NonZeroRemainder, VerificationFailure)
from .parabolic import ScanConfig, positivity_scan
from .ring import RTElement
from .rootdatum import build_realization, load_gcm, parabolic_type, preset
from .weyl import WeylGroup

EXIT_OK, EXIT_USAGE, EXIT_VERIFY = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _labels(text: str | None) -> tuple[int, ...]:
    if not text:
        return ()
    try:
        return tuple(int(t) for t in text.replace(",", " ").split())
    except ValueError:
        raise UsageError(f"--parabolic expects node labels like '1' or '1,2', got {text!r}") from None


def _group(type_name: str) -> WeylGroup:
    try:
        gcm = load_gcm(type_name)
    except (ValueError, KMKError) as exc:
        raise UsageError(str(exc)) from None
    return WeylGroup(build_realization(gcm))


def _indices(W: WeylGroup, labels: Sequence[int]) -> frozenset[int]:
    try:
        return W.gcm.indices(labels)
    except (ValueError, KeyError) as exc:
        raise UsageError(f"bad parabolic labels {list(labels)}: {exc}") from None


def _parse(W: WeylGroup, text: str):
    try:
        return W.parse(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _csv(rows: list[list]) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


# -- selftest ------------------------------------------------------------------------

def run_selftest() -> tuple[bool, list[str]]:
    """Rank-1 pin, rank-1 product table, duality oracle on A1/A2/B2, affine A1 reference values."""
    lines = []
    ok = True

    pin = rank_one_pin()
    lines.append(f"rank-1 dictionary pin: {'pass' if not pin else 'FAIL ' + '; '.join(pin)}")
    ok &= not pin

    W = WeylGroup(build_realization(preset("A1")))
    eng = LocalizationEngine(W, check_conventions=False)
    e, s = W.e, W.s(0)
    q = RTElement.monomial((-1,))
    one = RTElement.one(1)
    want = {(s, s): {s: one - q}, (e, s): {s: q}, (e, e): {e: one, s: -q}}
    table_ok = all(eng.product_constants(u, v, 1).entries == ent for (u, v), ent in want.items())
    lines.append(f"rank-1 product table: {'pass' if table_ok else 'FAIL'}")
    ok &= table_ok

    for name in ("A1", "A2", "B2"):
        Wn = WeylGroup(build_realization(preset(name)))
        bad = duality_oracle(Wn)
        lines.append(f"duality oracle {name}: {'pass' if not bad else f'FAIL ({len(bad)} pairs)'}")
        ok &= not bad

    Wa = WeylGroup(build_realization(preset("affine:A1")))
    Y = Wa.gcm.indices([1])
    got = []
    for w in ("e", "s0", "s1*s0"):
        d = dualizing_descriptor(Wa, Wa.parse(w), Y)
        got.append(d.divisor[0][2])
    app_ok = got == [1, 0, -1]
    lines.append(f"affine A1 dualizing coefficients: {got} {'pass' if app_ok else 'FAIL'}")
    ok &= app_ok
    lines.append(f"convention fingerprint: {convention_fingerprint()}")
    return ok, lines


# -- subcommands ---------------------------------------------------------------------

def cmd_selftest(args, out) -> int:
    ok, lines = run_selftest()
    if args.format == "json":
        out.write(_dump_json({"version": 1, "passed": ok, "checks": lines}))
    else:
        out.write("\n".join(lines) + f"\nselftest {'PASSED' if ok else 'FAILED'}\n")
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_roots(args, out) -> int:
    W = _group(args.type)
    rd = W.rd
    data = {
        "version": 1,
        "type": args.type,
        "labels": list(rd.labels),
        "gcm": [list(r) for r in rd.gcm.entries],
        "symmetrizer": list(rd.gcm.symmetrizer),
        "finite_type": rd.is_finite,
        "dim_h": rd.dim_h,
        "simple_roots": [list(a) for a in rd.simple_roots],
        "simple_coroots": [list(a) for a in rd.simple_coroots],
        "fundamental_weights": [list(a) for a in rd.fundamental_weights],
        "rho": list(rd.rho),
    }
    if args.parabolic:
        pt = parabolic_type(rd, _indices(W, _labels(args.parabolic)))
        data["parabolic"] = {
            "Y": sorted(rd.labels[i] for i in pt.Y),
            "rho_Y": list(pt.rho_Y),
            "rho_hat_Y": list(pt.rho_hat_Y),
            "two_rho_sup_Y": list(pt.two_rho_sup_Y),
            "levi_positive_roots": [list(r) for r in pt.levi_positive_roots],
        }
    if args.format == "json":
        out.write(_dump_json(data))
    elif args.format == "csv":
        rows = [["kind", "label", "vector"]]
        for kind in ("simple_roots", "simple_coroots", "fundamental_weights"):
            for lab, vec in zip(rd.labels, data[kind]):
                rows.append([kind, lab, " ".join(map(str, vec))])
        rows.append(["rho", "", " ".join(map(str, rd.rho))])
        out.write(_csv(rows))
    else:
        for key, val in data.items():
            if key != "version":
                out.write(f"{key}: {val}\n")
    return EXIT_OK


def cmd_weyl(args, out) -> int:
    W = _group(args.type)
    Y = _indices(W, _labels(args.parabolic))
    if args.element:
        w = _parse(W, args.element)
        data = {
            "version": 1,
            "w": W.format(w),
            "length": w.length,
            "in_WP": W.in_WP(w, Y),
            "min_coset_rep": W.format(W.min_coset_rep(w, Y)),
            "inversion_set": [list(r.coords) for r in W.inversion_set(w)],
            "covers": [{"v": W.format(v), "beta": list(b.coords)}
                       for v, b in W.covers_in_WP(W.min_coset_rep(w, Y), Y)],
        }
        if args.format == "json":
            out.write(_dump_json(data))
        elif args.format == "csv":
            out.write(_csv([list(data)[1:], [json.dumps(v) if isinstance(v, list) else v
                                             for v in list(data.values())[1:]]]))
        else:
            for key, val in data.items():
                if key != "version":
                    out.write(f"{key}: {val}\n")
        return EXIT_OK
    interval = W.enumerate_interval(args.max_length, Y)
    rows = [(W.format(w), w.length) for w in interval]
    if args.format == "json":
        out.write(_dump_json({"version": 1, "type": args.type, "Y": list(_labels(args.parabolic)),
                              "max_length": args.max_length,
                              "elements": [{"w": a, "length": b} for a, b in rows]}))
    elif args.format == "csv":
        out.write(_csv([["w", "length"], *[list(r) for r in rows]]))
    else:
        for a, b in rows:
            out.write(f"{b}  {a}\n")
        out.write(f"{len(rows)} elements\n")
    return EXIT_OK


def _engine(W: WeylGroup, L: int, use_cache: bool) -> LocalizationEngine:
    eng = LocalizationEngine(W)
    if use_cache:
        cache.load_engine_cache(eng, L)
    return eng


def _emit_report(report, fmt: str, out) -> None:
    if fmt == "json":
        out.write(_dump_json(report.to_json()))
    elif fmt == "csv":
        out.write(report.to_csv())
    else:
        out.write(report.to_text())


def _run_scan(cfg: ScanConfig, use_cache: bool):
    W = _group(cfg.type)
    _indices(W, cfg.Y)
    eng = _engine(W, cfg.max_length, use_cache)
    report = positivity_scan(cfg, engine=eng)
    if use_cache:
        cache.store_engine_cache(eng, cfg.max_length)
    return report


def cmd_constants(args, out) -> int:
    route = "pullback" if args.route == "pullback" else "coset-sum"
    cfg = ScanConfig(type=args.type, max_length=args.max_length, Y=_labels(args.parabolic),
                     pairs=[(args.u, args.v)], route=route,
                     shadow=True if args.route == "both" else args.shadow)
    W = _group(cfg.type)
    Y = _indices(W, cfg.Y)
    for t in (args.u, args.v):
        w = _parse(W, t)
        if not W.in_WP(w, Y):
            raise UsageError(f"{t} is not a minimal coset representative for Y={list(cfg.Y)}")
        if w.length > cfg.max_length:
            raise UsageError(f"l({t}) exceeds --max-length")
    report = _run_scan(cfg, not args.no_cache)
    _emit_report(report, args.format, out)
    return EXIT_OK if report.passed else EXIT_VERIFY


def cmd_scan(args, out) -> int:
    try:
        cfg = ScanConfig.from_toml(args.config)
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read scan config: {exc}") from None
    fmt = args.format or cfg.format
    report = _run_scan(cfg, not args.no_cache)
    target = args.output or cfg.output
    if target:
        with open(target, "w") as fh:
            _emit_report(report, fmt, fh)
        out.write(f"report written to {target}; passed={report.passed}\n")
    else:
        _emit_report(report, fmt, out)
    return EXIT_OK if report.passed else EXIT_VERIFY


def cmd_dualizing(args, out) -> int:
    W = _group(args.type)
    Y = _indices(W, _labels(args.parabolic))
    w = _parse(W, args.w)
    if not W.in_WP(w, Y):
        raise UsageError(f"{args.w} is not a minimal coset representative")
    desc = dualizing_descriptor(W, w, Y)
    check = boundary_weight_check(W, w, Y)
    if args.format == "json":
        data = desc.to_json()
        data["boundary_weight_check"] = check.passed
        out.write(_dump_json(data))
    elif args.format == "csv":
        rows = [["w", "v", "beta", "m"]]
        rows += [[W.format(w), W.format(v), " ".join(map(str, b.coords)), m] for v, b, m in desc.divisor]
        out.write(_csv(rows))
    else:
        out.write(desc.to_text())
        out.write(f"boundary weight check: {'pass' if check.passed else 'FAIL'}\n")
    return EXIT_OK if check.passed else EXIT_VERIFY


# -- entry point ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="kmk", description="Structure constants of the ideal-sheaf basis "
                "in equivariant K-theory of Kac-Moody flag varieties.")
    p.add_argument("--verified", action="store_true",
                   help="run the selftest first and refuse to continue if it fails")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, formats=("text", "json", "csv"), default="text"):
        sp.add_argument("--format", choices=formats, default=default)

    sp = sub.add_parser("selftest", help="convention pins, duality oracle and affine A1 reference values")
    common(sp, ("text", "json"))

    sp = sub.add_parser("roots", help="realization data of a GCM")
    sp.add_argument("--type", required=True, help="preset name or JSON matrix")
    sp.add_argument("--parabolic", help="node labels of Y, e.g. '1' or '1,2'")
    common(sp)

    sp = sub.add_parser("weyl", help="Bruhat intervals, inversion sets and covers")
    sp.add_argument("--type", required=True)
    sp.add_argument("--parabolic")
    sp.add_argument("--max-length", type=int, default=3)
    sp.add_argument("--element", help="describe one element instead of listing the interval")
    common(sp)

    sp = sub.add_parser("constants", help="d^w_{u,v}(P) with sign verdicts")
    sp.add_argument("--type", required=True)
    sp.add_argument("--parabolic")
    sp.add_argument("--u", required=True)
    sp.add_argument("--v", required=True)
    sp.add_argument("--max-length", type=int, required=True)
    sp.add_argument("--route", choices=("coset-sum", "pullback", "both"), default="coset-sum")
    sp.add_argument("--shadow", action=argparse.BooleanOptionalAction, default=None,
                    help="cross-check with the other route (default: on for max-length <= 6)")
    sp.add_argument("--no-cache", action="store_true")
    common(sp)

    sp = sub.add_parser("scan", help="positivity scan from a TOML config")
    sp.add_argument("--config", required=True)
    sp.add_argument("--output")
    sp.add_argument("--no-cache", action="store_true")
    sp.add_argument("--format", choices=("text", "json", "csv"))

    sp = sub.add_parser("dualizing", help="dualizing-sheaf descriptor of X^w_P")
    sp.add_argument("--type", required=True)
    sp.add_argument("--parabolic", default="")
    sp.add_argument("--w", required=True)
    common(sp)
    return p


COMMANDS = {
    "selftest": cmd_selftest, "roots": cmd_roots, "weyl": cmd_weyl,
    "constants": cmd_constants, "scan": cmd_scan, "dualizing": cmd_dualizing,
}


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    warnings.simplefilter("default")
    try:
        if args.verified and args.command != "selftest":
            ok, lines = run_selftest()
            if not ok:
                sys.stderr.write("selftest failed; refusing --verified run\n" + "\n".join(lines) + "\n")
                return EXIT_VERIFY
        return COMMANDS[args.command](args, out)
    except UsageError as exc:
        sys.stderr.write(f"kmk: {exc}\n")
        return EXIT_USAGE
    except (DictionaryPinFailure, NonClearingEntry, NonZeroRemainder, VerificationFailure) as exc:
        sys.stderr.write(f"kmk: verification failure: {type(exc).__name__}: {exc}\n")
        return EXIT_VERIFY
    except (KMKError, ValueError) as exc:
        sys.stderr.write(f"kmk: {type(exc).__name__}: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
