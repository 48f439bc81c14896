"""Command-line front end: ingest -> build -> solve -> codes -> report.

Human-readable text goes to stdout; machine formats (grid, monitor,
placement, CSV, LP) go to files.  Every error class maps to its own exit
code so scripts can branch without parsing messages.
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import replace
from pathlib import Path

from . import fixtures
from .codes import AlarmPattern, assign_codes, decode, read_placement, signature_csv, signature_table, write_placement
from .construct import BUS_DISTANCE, NODE_DISTANCE, ReachRule, build_monitor, read_monitor, site_hops, write_monitor
from .errors import (
    ConfigError, DegenerateSignalError, DomainError, GridCodesError,
    InfeasibleError, NotACodeError, NotFoundError, ParseError, SchemaError,
    TooLargeError,
)
from .graphs import GridGraph, MonitorInstance
from .ingest import TransformerRule, build_grid, parse_case, read_grid, write_grid
from .snr import SignalSpec, alarm, read_signal_csv, read_signal_spec, snr_series, synth_signal, write_signal_csv, write_snr_csv
from .solver import check_feasible, enumerate_optima, export_lp, solve_bruteforce, solve_exact, solve_greedy, to_set_cover, verify

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_CODES = {
    ParseError: 2,
    SchemaError: 3,
    ConfigError: 4,
    InfeasibleError: 5,
    NotFoundError: 6,
    DegenerateSignalError: 7,
    DomainError: 8,
    TooLargeError: 9,
    NotACodeError: 10,
}
EXIT_NO_MATCH = 11

# published benchmark results: system -> (transformers, sensors k=1, sensors k=2)
PUBLISHED_COUNTS = {
    "ieee14": (5, 4, 3),
    "ieee30": (7, 6, 4),
    "ieee57": (14, 13, 10),
    "pegase89": (10, 10, 6),
    "ieee118": (9, 9, 5),
    "polish2383": (155, 155, 106),
}
PUBLISHED_AVG_SAVINGS = (6.90, 37.90)  # percent, k=1 and k=2, over the six systems


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help()
        return EXIT_OK
    try:
        return args.func(args)
    except GridCodesError as exc:
        for klass, code in EXIT_CODES.items():
            if isinstance(exc, klass):
                print(f"error ({klass.__name__}): {exc}", file=sys.stderr)
                return code
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNEXPECTED


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="gridcodes",
        description="Minimum sensor placement for unique identification of failing transformers.")
    p.set_defaults(command=None)
    sub = p.add_subparsers(dest="command")

    q = sub.add_parser("ingest", help="parse a case file and write the native grid format")
    q.add_argument("--case", required=True, help="MATPOWER-subset case file")
    q.add_argument("--rule", default="tap-ratio", choices=TransformerRule.MODES,
                   help="transformer classification rule")
    q.add_argument("--transformers", default="",
                   help="comma-separated 0-based branch row indices (explicit-list rule)")
    q.add_argument("--name", default=None, help="override the grid name")
    q.add_argument("--out", required=True, help="output grid file")
    q.set_defaults(func=cmd_ingest)

    q = sub.add_parser("build", help="build the bipartite observation instance")
    _grid_args(q)
    q.add_argument("--out", required=True, help="output monitor file")
    q.set_defaults(func=cmd_build)

    q = sub.add_parser("solve", help="compute a minimum sensor placement")
    _grid_args(q, grid_required=False)
    q.add_argument("--monitor", default=None, help="solve a prebuilt monitor file instead")
    q.add_argument("--solver", default="exact", choices=("exact", "greedy", "bruteforce"))
    q.add_argument("--cap", type=int, default=20, help="brute-force viable-candidate cap")
    q.add_argument("--all-optima", type=int, default=0, metavar="N",
                   help="also list up to N alternative optimal site sets")
    q.add_argument("--export-lp", default=None, metavar="FILE",
                   help="also write the integer program in CPLEX LP format")
    q.add_argument("--out-solution", default=None, metavar="FILE", help="write solution text")
    q.add_argument("--out-signatures", default=None, metavar="FILE", help="write signature CSV")
    q.add_argument("--out-placement", default=None, metavar="FILE", help="write placement file")
    q.set_defaults(func=cmd_solve)

    q = sub.add_parser("table2", help="summarize sensor counts and savings on bundled systems")
    q.add_argument("--systems", default=",".join(PUBLISHED_COUNTS),
                   help="comma-separated system names")
    q.add_argument("--out-csv", default=None, metavar="FILE", help="write the table as CSV")
    q.set_defaults(func=cmd_table2)

    q = sub.add_parser("decode", help="map an alarm pattern to the failing transformer")
    q.add_argument("--placement", required=True, help="placement file from solve")
    q.add_argument("--alarms", default="", help="comma-separated raised labels, e.g. A,B")
    q.set_defaults(func=cmd_decode)

    q = sub.add_parser("snr", help="windowed SNR analysis of a signal")
    q.add_argument("--input", default=None, help="two-column CSV (timestamp, value)")
    q.add_argument("--synth", default=None, help="generator spec JSON (alternative to --input)")
    q.add_argument("--out-signal", default=None, metavar="FILE", help="write the synthetic signal CSV")
    q.add_argument("--window", type=int, default=30, help="window length in samples")
    q.add_argument("--stride", type=int, default=None, help="window stride (default: window)")
    q.add_argument("--threshold", type=float, default=None, help="alarm threshold, dB")
    q.add_argument("--out", default=None, metavar="FILE", help="write per-window SNR CSV")
    q.set_defaults(func=cmd_snr)

    q = sub.add_parser("demo", help="end-to-end failure injection, alarms, and decoding")
    _grid_args(q)
    q.add_argument("--target", default=None, help="transformer name to fail (default: all in turn)")
    q.add_argument("--threshold", type=float, default=None,
                   help="alarm threshold, dB (default: midpoint separating reach-k hops)")
    q.add_argument("--seed", type=int, default=0)
    q.set_defaults(func=cmd_demo)

    q = sub.add_parser("export-lp", help="write the integer program in CPLEX LP format")
    _grid_args(q, grid_required=False)
    q.add_argument("--monitor", default=None, help="export a prebuilt monitor file instead")
    q.add_argument("--out", default=None, metavar="FILE", help="output file (default: stdout)")
    q.set_defaults(func=cmd_export_lp)

    return p


def _grid_args(q: argparse.ArgumentParser, grid_required: bool = True) -> None:
    q.add_argument("--grid", required=grid_required, default=None,
                   help="bundled fixture name or grid file path")
    q.add_argument("--k", type=int, default=2, help="hop reach (1 or 2)")
    q.add_argument("--metric", default=BUS_DISTANCE, choices=(BUS_DISTANCE, NODE_DISTANCE))
    q.add_argument("--allow-any-k", action="store_true",
                   help="permit experimental reach values outside {1, 2}")


def _load_monitor(args) -> MonitorInstance:
    if getattr(args, "monitor", None):
        return read_monitor(Path(args.monitor).read_text(encoding="utf-8"))
    if not args.grid:
        raise ConfigError("either --grid or --monitor is required")
    g = fixtures.load(args.grid)
    rule = ReachRule(k=args.k, metric=args.metric, allow_any_k=args.allow_any_k)
    return build_monitor(g, rule=rule)


# -- subcommands ---------------------------------------------------------------


def cmd_ingest(args) -> int:
    case = parse_case(Path(args.case).read_text(encoding="utf-8"))
    if args.rule == "explicit-list":
        if not args.transformers:
            raise ConfigError("--transformers is required with the explicit-list rule")
        indices = frozenset(int(tok) for tok in args.transformers.split(","))
        rule = TransformerRule(mode=args.rule, explicit_list=indices)
    else:
        rule = TransformerRule(mode=args.rule)
    g = build_grid(case, rule, name=args.name)
    Path(args.out).write_text(write_grid(g), encoding="utf-8")
    print(f"{g.name or 'grid'}: {len(g.buses)} buses, {len(g.lines)} lines, "
          f"{len(g.transformers)} transformers -> {args.out}")
    return EXIT_OK


def cmd_build(args) -> int:
    m = _load_monitor(args)
    Path(args.out).write_text(write_monitor(m), encoding="utf-8")
    print(f"monitor instance: {len(m.targets)} targets, {len(m.candidates)} candidates "
          f"({len(m.viable_candidates)} viable), {m.edge_count} edges, "
          f"k={m.k}, metric={m.metric} -> {args.out}")
    return EXIT_OK


def cmd_solve(args) -> int:
    m = _load_monitor(args)
    sc = to_set_cover(m)
    print(f"instance: {len(m.targets)} targets, {len(m.candidates)} candidates "
          f"({len(m.viable_candidates)} viable), k={m.k}, metric={m.metric}")
    report = check_feasible(sc)
    if not report.feasible:
        raise InfeasibleError(report)

    t0 = time.perf_counter()
    if args.solver == "exact":
        sol = solve_exact(sc)
    elif args.solver == "greedy":
        sol = solve_greedy(sc)
    else:
        sol = solve_bruteforce(sc, cap=args.cap)
    elapsed = time.perf_counter() - t0

    placement = assign_codes(m, sol.selected)
    print(f"{sol.size} sensors ({'optimal' if sol.optimal else 'upper bound'}, "
          f"{args.solver}, {elapsed:.3f}s, {sol.stats.nodes} nodes)")
    for s in placement.sites:
        branch, host = placement.site_info.get(s, (None, None))
        where = f" branch {branch}, bus {host}" if branch is not None else ""
        print(f"  site {s} = {placement.labels[s]}{where}")
    print(signature_table(placement))

    if args.all_optima:
        optima = enumerate_optima(sc, cap=args.all_optima)
        print(f"optimal site sets ({len(optima)}{'+' if len(optima) == args.all_optima else ''}):")
        for sel in optima:
            print("  " + ", ".join(map(str, sel)))

    if args.export_lp:
        Path(args.export_lp).write_text(export_lp(sc, name=args.grid or "monitor"),
                                        encoding="utf-8")
        print(f"LP written to {args.export_lp}")
    if args.out_solution:
        lines = [f"size {sol.size}", f"optimal {sol.optimal}",
                 "sites " + ",".join(map(str, sol.selected))]
        Path(args.out_solution).write_text("\n".join(lines) + "\n", encoding="utf-8")
    if args.out_signatures:
        Path(args.out_signatures).write_text(signature_csv(placement), encoding="utf-8")
    if args.out_placement:
        Path(args.out_placement).write_text(write_placement(placement), encoding="utf-8")
    return EXIT_OK


def cmd_table2(args) -> int:
    names = [n for n in args.systems.split(",") if n]
    if not names:
        raise ConfigError("no systems requested")
    bundled = set(fixtures.available())
    rows = []
    have_any = False
    for name in names:
        pub = PUBLISHED_COUNTS.get(name)
        if name not in bundled:
            rows.append((name, None, pub))
            continue
        have_any = True
        g = fixtures.load(name)
        counts = {}
        for k in (1, 2):
            t0 = time.perf_counter()
            sol = solve_exact(to_set_cover(build_monitor(g, rule=ReachRule(k=k))))
            counts[k] = (sol.size, time.perf_counter() - t0)
        rows.append((name, (len(g.transformers), counts), pub))
    if not have_any:
        raise ConfigError(f"none of the requested systems has a bundled fixture: {names}")

    header = (f"{'system':<12} {'transf':>6} {'k=1':>5} {'k=2':>5} "
              f"{'save1%':>7} {'save2%':>7} {'time1':>7} {'time2':>7}  published(T/k1/k2)")
    print(header)
    print("-" * len(header))
    csv_rows = [["system", "transformers", "k1", "k2", "save1_pct", "save2_pct", "published"]]
    save1, save2 = [], []
    for name, got, pub in rows:
        pub_s = "/".join(map(str, pub)) if pub else "-"
        if got is None:
            print(f"{name:<12} {'fixture unavailable in this build (see README)':<47}  {pub_s}")
            csv_rows.append([name, "", "", "", "", "", pub_s])
            continue
        m, counts = got
        s1 = 100.0 * (m - counts[1][0]) / m
        s2 = 100.0 * (m - counts[2][0]) / m
        save1.append(s1)
        save2.append(s2)
        match = "" if pub is None else (" match" if (m, counts[1][0], counts[2][0]) == pub
                                        else " DEVIATION")
        print(f"{name:<12} {m:>6} {counts[1][0]:>5} {counts[2][0]:>5} "
              f"{s1:>7.2f} {s2:>7.2f} {counts[1][1]:>6.2f}s {counts[2][1]:>6.2f}s  {pub_s}{match}")
        csv_rows.append([name, m, counts[1][0], counts[2][0], f"{s1:.2f}", f"{s2:.2f}", pub_s])
    if save1:
        print(f"average savings over {len(save1)} bundled system(s): "
              f"{sum(save1) / len(save1):.2f}% (k=1), {sum(save2) / len(save2):.2f}% (k=2)")
    print(f"published average savings over all six systems: "
          f"{PUBLISHED_AVG_SAVINGS[0]:.2f}% (k=1), {PUBLISHED_AVG_SAVINGS[1]:.2f}% (k=2)")
    if args.out_csv:
        import csv as _csv
        with open(args.out_csv, "w", newline="", encoding="utf-8") as fh:
            _csv.writer(fh, lineterminator="\n").writerows(csv_rows)
    return EXIT_OK


def cmd_decode(args) -> int:
    placement = read_placement(Path(args.placement).read_text(encoding="utf-8"))
    labels = [tok.strip() for tok in args.alarms.split(",") if tok.strip()]
    result = decode(placement, AlarmPattern.from_labels(labels))
    print(str(result))
    return EXIT_OK


def cmd_snr(args) -> int:
    if (args.input is None) == (args.synth is None):
        raise ConfigError("exactly one of --input or --synth is required")
    if args.input:
        signal = read_signal_csv(Path(args.input).read_text(encoding="utf-8"))
        rate = 30.0
    else:
        spec = read_signal_spec(Path(args.synth).read_text(encoding="utf-8"))
        signal = synth_signal(spec)
        rate = spec.rate
        if args.out_signal:
            Path(args.out_signal).write_text(write_signal_csv(signal, rate), encoding="utf-8")
    series = snr_series(signal, window_len=args.window, stride=args.stride)
    print(f"{len(series.values)} windows of {series.window_len} samples "
          f"(stride {series.stride})")
    print(f"SNR range {series.values.min():.2f}..{series.values.max():.2f} dB, "
          f"band width {series.band_width:.2f} dB, band sigma {series.band_sigma:.2f} dB")
    if args.threshold is not None:
        state = alarm(series, args.threshold)
        print(f"alarm (threshold {args.threshold:.2f} dB): {'RAISED' if state else 'normal'}")
    if args.out:
        Path(args.out).write_text(write_snr_csv(series), encoding="utf-8")
    return EXIT_OK


DEMO_SPEC = SignalSpec(growth=0.05, attenuation=0.25)
_CALIBRATION_SEED = 987654321


def calibrated_threshold(spec: SignalSpec, k: int, window_len: int = 30) -> float:
    """Alarm threshold separating reach-k sensors from farther ones.

    Midpoint of the band widths measured on two reference streams, one at
    hop k and one at hop k+1, generated with a fixed calibration seed; the
    measured midpoint absorbs the estimator bias a closed-form midpoint of
    noise-free widths would miss.
    """
    widths = []
    for hop in (k, k + 1):
        stream = synth_signal(replace(spec, hop=hop, seed=_CALIBRATION_SEED))
        widths.append(snr_series(stream, window_len=window_len).band_width)
    return (widths[0] + widths[1]) / 2.0


def cmd_demo(args) -> int:
    g = fixtures.load(args.grid)
    rule = ReachRule(k=args.k, metric=args.metric, allow_any_k=args.allow_any_k)
    m = build_monitor(g, rule=rule)
    sol = solve_exact(to_set_cover(m))
    placement = assign_codes(m, sol.selected)
    hops = site_hops(g, rule, max_hop=rule.k + 2)
    threshold = args.threshold
    if threshold is None:
        threshold = calibrated_threshold(DEMO_SPEC, rule.k)

    print(f"{g.name or args.grid}: {len(m.targets)} transformers monitored by "
          f"{sol.size} sensors (k={m.k}, {m.metric}, alarm threshold {threshold:.2f} dB)")
    for s in placement.sites:
        branch, host = placement.site_info[s]
        print(f"  lamp {placement.labels[s]}: site {s} on branch {branch} at bus {host}")
    print(signature_table(placement))

    names = {m.target_name(t): t for t in m.targets}
    if args.target is not None:
        if args.target not in names:
            raise NotFoundError(f"unknown transformer {args.target!r}; "
                                f"have {', '.join(sorted(names))}")
        chosen = [args.target]
    else:
        chosen = [m.target_name(t) for t in m.targets]

    all_ok = True
    for pos, name in enumerate(chosen):
        t = names[name]
        raised = []
        print(f"\ninjecting failure at {name}:")
        for s in placement.sites:
            hop = hops.get((t, s))
            spec = replace(DEMO_SPEC.at_hop(hop if hop is not None else rule.k + 3),
                           seed=args.seed * 7919 + s)
            series = snr_series(synth_signal(spec), window_len=30)
            state = alarm(series, threshold)
            if state:
                raised.append(placement.labels[s])
            hop_s = f"hop {hop}" if hop is not None else f"hop > {rule.k + 2}"
            print(f"  sensor {placement.labels[s]} ({hop_s}): band width "
                  f"{series.band_width:.2f} dB -> {'RED' if state else 'green'}")
        result = decode(placement, AlarmPattern.from_labels(raised))
        print(f"  lamps {'{' + ','.join(sorted(raised)) + '}' if raised else '{}'} -> {result}")
        if not (result.identified and result.target == t):
            all_ok = False
    if not all_ok:
        print("\ndecoding FAILED for at least one injected failure", file=sys.stderr)
        return EXIT_NO_MATCH
    return EXIT_OK


def cmd_export_lp(args) -> int:
    m = _load_monitor(args)
    text = export_lp(to_set_cover(m), name=args.grid or "monitor")
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"LP written to {args.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
