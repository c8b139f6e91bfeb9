"""Command line interface.

    movoid params --p0 3 --p 3 --l 3 --t 2
    movoid construct --p 3 --l 3 --t 2 --b 1 -o out/
    movoid verify out/ --modes character,perp,generators
    movoid conjecture --p 3 --p0 5 --t 2 --l0 1..3
    movoid export out/ --format intersections
    movoid tables --k 1

Exit codes: 0 success, 2 bad parameters, 3 budget exceeded, 4 a
verification check failed (the certificate is still written).
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import bundle
from .construct import (
    TABLE_1,
    TABLE_2,
    ConstructionParams,
    all_table_rows,
    build_candidate,
    case_analysis,
    conjecture_m,
    conjecture_ratio,
    table_row,
)
from .errors import BadParameters, BudgetExceeded, CountMismatch, MovoidError
from .gf import MAX_ORDER
from .verify import MODES, PERP_FULL_LIMIT, certify

EXIT_OK, EXIT_FAIL, EXIT_PARAMS, EXIT_BUDGET, EXIT_MISMATCH = 0, 1, 2, 3, 4
PROGRESS_STEP = 10**6

# defaults applied after the config file, so that flags > config > defaults
DEFAULTS = {
    "b": 1, "modes": ",".join(MODES), "seed": 0, "k": 1, "format": "csv",
    "max_order": MAX_ORDER, "sample_limit": PERP_FULL_LIMIT, "l0": "1..3",
}


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _range(text: str) -> list[int]:
    if ".." in text:
        lo, hi = text.split("..")
        return list(range(int(lo), int(hi) + 1))
    return _int_list(text)


def read_config(path) -> dict:
    """key=value lines; '#' starts a comment."""
    out = {}
    for n, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise BadParameters(f"{path}:{n}: expected key=value")
        key, value = (x.strip() for x in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def _threads(args) -> int:
    if args.threads is not None:
        return int(args.threads)
    env = os.environ.get("THREADS")
    return int(env) if env else 1


class Progress:
    """Prints a running count to stderr every PROGRESS_STEP operations."""

    def __init__(self, quiet: bool):
        self.quiet = quiet
        self.next = {}

    def __call__(self, name: str, count: int):
        if self.quiet:
            return
        mark = self.next.get(name, PROGRESS_STEP)
        if count >= mark:
            print(f"[{name}] {count:,} operations", file=sys.stderr, flush=True)
            self.next[name] = (count // PROGRESS_STEP + 1) * PROGRESS_STEP


def _params_from_args(args) -> ConstructionParams:
    orbits = _int_list(args.orbits) if args.orbits else None
    return ConstructionParams.resolve(int(args.p), ell=_opt(args.l), t=_opt(args.t),
                                      e=_opt(args.e), r=_opt(args.r), b=int(args.b),
                                      orbits=orbits)


def _opt(v):
    return None if v is None else int(v)


# ---------------------------------------------------------------------------
# commands

def cmd_params(args) -> int:
    rep = case_analysis(int(args.p0), int(args.p), int(args.l), int(args.t))
    print(f"p0={rep.p0} p={rep.p} l={rep.ell} t={rep.t} e={rep.e}")
    print(f"case: {rep.case}")
    print(f"d0: {rep.d0}")
    if rep.applies:
        print(f"m: {rep.m_unit}*b for 1 <= b <= {rep.d0 - 1}")
        menu = rep.m_menu()
        shown = ", ".join(str(m) for m in menu[:12]) + (", ..." if len(menu) > 12 else "")
        print(f"m-menu: {shown}")
    else:
        print("no construction (d0 = 1)")
    for note in rep.notes:
        print(f"note: {note}")
    for row in TABLE_1 + TABLE_2:
        if row.p0 != rep.p0 or row.ell != rep.ell or rep.t % row.t_per_k:
            continue
        if row.p is not None and row.p != rep.p:
            continue
        chk = table_row(row, rep.p, rep.t // row.t_per_k)
        verdict = "matches" if chk.ok else "flagged: " + "; ".join(chk.mismatches)
        print(f"{chk.label}: {verdict}")
    return EXIT_OK


def cmd_construct(args) -> int:
    params = _params_from_args(args)
    cand = build_candidate(params, max_order=int(args.max_order))
    cert = certify(cand, modes=())
    out = bundle.write_bundle(args.output, cand, cert)
    prm = cand.params
    print(f"W({2 * prm.r - 1}, {prm.p}^{prm.e}) over GF({prm.p}^{prm.s}), N={prm.N}, d0={prm.d0}")
    print(f"orbits: {list(cand.orbit_indices)}")
    print(f"J: {cand.J.sorted()}")
    print(f"|M| = {len(cand.M)}")
    print(f"m = {cand.m_claimed}")
    for label in cand.labels:
        print(f"label: {label}")
    print(f"bundle: {out}")
    return EXIT_OK


def cmd_verify(args) -> int:
    modes = [m.strip() for m in args.modes.split(",") if m.strip()]
    for m in modes:
        if m not in MODES:
            raise BadParameters(f"unknown mode {m!r}; choose from {', '.join(MODES)}")
    cand = bundle.load_bundle(args.bundle, max_order=int(args.max_order))
    cert = certify(cand, modes=modes, threads=_threads(args), early_exit=args.early_exit,
                   full_limit=int(args.sample_limit), seed=int(args.seed),
                   progress=Progress(args.quiet))
    bundle.write_certificate(args.bundle, cert)
    for c in cert.checks:
        extra = f" ({c.status})" if c.status != "certified" else ""
        print(f"{c.name}: {'pass' if c.passed else 'FAIL'}{extra} [{c.seconds:.2f}s]")
        if not c.passed:
            wit = {k: v for k, v in c.witness.items() if k in ("first_bad", "problems")}
            if wit:
                print(f"  witness: {wit}")
    print(f"overall: {'pass' if cert.passed else 'FAIL'} ({cert.status})")
    return EXIT_OK if cert.passed else EXIT_MISMATCH


def cmd_conjecture(args) -> int:
    p, p0, t, b = int(args.p), int(args.p0), int(args.t), int(args.b)
    ratios = []
    for ell0 in _range(args.l0):
        r = conjecture_ratio(p, p0, t, ell0, b)
        ratios.append(r)
        print(f"l0={ell0}: m={conjecture_m(p, p0, t, ell0, b)} ratio={r} (~{float(r):.6g})")
    if len(ratios) > 1:
        dec = all(a > b_ for a, b_ in zip(ratios, ratios[1:]))
        print(f"strictly decreasing: {'yes' if dec else 'no'}")
    return EXIT_OK


def cmd_export(args) -> int:
    cand = bundle.load_bundle(args.bundle, max_order=int(args.max_order))
    if args.format == "csv":
        text = bundle.points_csv(cand.M)
    elif args.format == "intersections":
        text = bundle.dump_text(bundle.intersection_summary(cand))
    else:
        raise BadParameters(f"unknown export format {args.format!r}")
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_tables(args) -> int:
    k = int(args.k)
    checks = all_table_rows(k)
    flagged = 0
    for chk in checks:
        if chk.ok:
            print(f"{chk.label}: d0={chk.d0} m/b={chk.m_unit} matches")
        else:
            flagged += 1
            print(f"{chk.label}: d0={chk.d0} m/b={chk.m_unit} FLAGGED: {'; '.join(chk.mismatches)}")
    t2 = [c for c in checks if c.row.table == 2]
    print(f"Table 2: {sum(c.ok for c in t2)}/{len(t2)} rows match")
    print(f"flagged entries: {flagged}")
    return EXIT_OK


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="movoid", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="key=value file; flags take precedence")
    sub = parser.add_subparsers(dest="command", required=True)

    def construction_flags(sp):
        sp.add_argument("--p", required=False)
        sp.add_argument("--l")
        sp.add_argument("--t")
        sp.add_argument("--e")
        sp.add_argument("--r")
        sp.add_argument("--b")
        sp.add_argument("--orbits", help="comma separated orbit indices")
        sp.add_argument("--max-order", dest="max_order")

    sp = sub.add_parser("params", help="case analysis, d0 and m-menu")
    sp.add_argument("--p0")
    sp.add_argument("--p")
    sp.add_argument("--l")
    sp.add_argument("--t")
    sp.set_defaults(func=cmd_params, required=("p0", "p", "l", "t"))

    sp = sub.add_parser("construct", help="build a candidate and write a bundle")
    construction_flags(sp)
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_construct, required=("p", "output"))

    sp = sub.add_parser("verify", help="certify a bundle")
    sp.add_argument("bundle")
    sp.add_argument("--modes")
    sp.add_argument("--threads")
    sp.add_argument("--seed")
    sp.add_argument("--sample-limit", dest="sample_limit")
    sp.add_argument("--early-exit", action="store_true", default=None)
    sp.add_argument("--quiet", action="store_true", default=None)
    sp.add_argument("--max-order", dest="max_order")
    sp.set_defaults(func=cmd_verify, required=())

    sp = sub.add_parser("conjecture", help="exact ratios m / p^(e(p0-2))")
    sp.add_argument("--p")
    sp.add_argument("--p0")
    sp.add_argument("--t")
    sp.add_argument("--l0", help="range such as 1..3 or a list 1,2")
    sp.add_argument("--b")
    sp.set_defaults(func=cmd_conjecture, required=("p", "p0", "t"))

    sp = sub.add_parser("export", help="point CSV or two-intersection summary")
    sp.add_argument("bundle")
    sp.add_argument("--format", choices=("csv", "intersections"))
    sp.add_argument("-o", "--output")
    sp.add_argument("--max-order", dest="max_order")
    sp.set_defaults(func=cmd_export, required=())

    sp = sub.add_parser("tables", help="recompute every printed table row")
    sp.add_argument("--k")
    sp.set_defaults(func=cmd_tables, required=())
    return parser


def _merge(args, config: dict) -> None:
    for key, value in config.items():
        if getattr(args, key, None) is None:
            if key in ("early_exit", "quiet"):
                value = value.lower() in ("1", "true", "yes", "on")
            setattr(args, key, value)
    for key, value in DEFAULTS.items():
        if getattr(args, key, None) is None:
            setattr(args, key, value)
    for flag in ("early_exit", "quiet"):
        if hasattr(args, flag) and getattr(args, flag) is None:
            setattr(args, flag, False)
    for attr in ("threads", "orbits", "output", "l", "t", "e", "r"):
        if not hasattr(args, attr):
            setattr(args, attr, None)
    missing = [k for k in args.required if getattr(args, k, None) is None]
    if missing:
        raise BadParameters("missing " + ", ".join("--" + k for k in missing))


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _merge(args, read_config(args.config) if args.config else {})
        return args.func(args)
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except CountMismatch as exc:
        print(f"count mismatch: {exc} {exc.witness}", file=sys.stderr)
        return EXIT_MISMATCH
    except (BadParameters, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAMS
    except MovoidError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
