"""Command-line front end.

Exit codes: 0 success, 1 domain failure (verification, contradiction,
size limit, infeasible table), 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .data import DATA_DIR, ManifestError, TABLE_NAMES, bundled_table, check_manifest
from .engine import ContradictionError, FactError
from .grid import DEFAULT_MAX_GRID, GridError, GridSizeError, NotDivisibleError, hat_homology, parse_grid
from .pdcode import PDError, TwistSite, alexander_polynomial, insert_full_twist, parse_pd
from .session import Session, SessionError, render_report, run_session
from .tables import HfkTable, TableFormatError, euler_characteristic, read_hfk, table_to_json, verify_table, write_hfk
from .torsion import EmptyIntervalError, InfeasibleTableError, bound_report

EXIT_OK, EXIT_DOMAIN, EXIT_USAGE = 0, 1, 2


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _emit(args, text: str) -> None:
    if getattr(args, "out", None):
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise argparse.ArgumentTypeError(f"cannot read {path}: {exc.strerror}") from None


def _load_table(source: str) -> HfkTable:
    if source.startswith("bundled:"):
        return bundled_table(source.split(":", 1)[1])
    return read_hfk(_read(source), name=Path(source).stem)


# ---------------------------------------------------------------- commands


def cmd_compute_hfk(args) -> int:
    g = parse_grid(_read(args.grid))
    tab = hat_homology(g, max_grid=args.max_grid, workers=args.workers, name=Path(args.grid).stem)
    report = verify_table(tab)
    if args.json:
        text = _dump({"grid": {"n": g.n, "X": list(g.xs), "O": list(g.os)}, "table": table_to_json(tab), "verification": report.to_dict()})
    else:
        text = write_hfk(tab, comment=f"HFK-hat of grid {Path(args.grid).name} (n = {g.n})")
        text += f"# verified: {'yes' if report.ok else 'no'}; Euler characteristic {euler_characteristic(tab).normalized()}\n"
        for f in report.failures():
            text += f"# failure: {f}\n"
    _emit(args, text)
    return EXIT_OK if report.ok else EXIT_DOMAIN


def _cells(cells) -> str:
    return ", ".join(f"({m},{a})" for m, a in cells) or "none"


def cmd_bounds(args) -> int:
    tab = _load_table(args.table)
    ver = verify_table(tab)
    if not ver.ok:
        out = {"table": tab.name, "verification": ver.to_dict(), "error": "table failed verification"}
        _emit(args, _dump(out) if args.json else "table failed verification:\n" + "\n".join(ver.failures()) + "\n")
        return EXIT_DOMAIN
    rep = bound_report(ver.table, args.external_upper)
    if args.json:
        _emit(args, _dump(rep))
        return EXIT_OK
    lem = rep["lemma"]
    hi = rep["interval"]["upper"]
    lines = [
        f"table {rep['table']}: total dimension {rep['total_dim']}",
        f"diagonal check: t >= {lem['value']}  (green (0,0) dim {lem['green']['dim']}; red {_cells(lem['red'])})",
        f"minmax pairing bound: t >= {rep['minmax']['value']}",
        f"maxmax pairing bound: t <= {rep['maxmax']['value']}",
        f"torsion interval: [{rep['interval']['lower']}, {'inf' if hi is None else hi}]",
        "minmax certificate:",
    ]
    cert = rep["minmax"]["certificate"]
    lines.append(f"  unpaired {tuple(cert['unpaired']) if cert['unpaired'] else None}")
    for p in cert["pairs"]:
        lines.append(f"  n={p['n']}: {tuple(p['lower'])} -> {tuple(p['upper'])} x{p['count']}")
    _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_alexander(args) -> int:
    pd = parse_pd(_read(args.pd))
    poly = alexander_polynomial(pd)
    if args.json:
        _emit(args, _dump({"crossings": len(pd.crossings), "alexander": str(poly), "coefficients": {str(k): v for k, v in poly.coeffs.items()}}))
    else:
        _emit(args, f"{poly}\n")
    return EXIT_OK


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _directions(text: str) -> list[int]:
    table = {"+": 1, "+1": 1, "up": 1, "u": 1, "-": -1, "-1": -1, "down": -1, "d": -1}
    out = []
    for t in text.replace(",", " ").split():
        if t.lower() not in table:
            raise argparse.ArgumentTypeError(f"direction must be up/down or +/-, got {t!r}")
        out.append(table[t.lower()])
    return out


def cmd_twist(args) -> int:
    pd = parse_pd(_read(args.pd))
    site = TwistSite(tuple(args.edges), tuple(args.directions), args.sign)
    out = insert_full_twist(pd, site)
    poly = alexander_polynomial(out)
    if args.json:
        _emit(args, _dump({"crossings": [list(c) for c in out.crossings], "added": len(out.crossings) - len(pd.crossings), "alexander": str(poly)}))
    else:
        _emit(args, f"# full twist ({'+' if args.sign > 0 else '-'}) on edges {' '.join(map(str, args.edges))}; Alexander polynomial {poly}\n" + out.to_text())
    return EXIT_OK


def cmd_derive(args) -> int:
    session = Session.load(args.session)
    try:
        _, report = run_session(session)
    except ContradictionError as exc:
        _emit(args, _dump({"error": "contradiction", "detail": str(exc)}) if args.json else f"contradiction: {exc}\n")
        return EXIT_DOMAIN
    _emit(args, _dump(report) if args.json else render_report(report))
    return EXIT_DOMAIN if report["audit"] else EXIT_OK


def cmd_verify_data(args) -> int:
    root = Path(args.root) if args.root else DATA_DIR
    result = {"manifest": [], "tables": []}
    try:
        result["manifest"] = check_manifest(root)
    except ManifestError as exc:
        result["manifest"] = [str(exc)]
    for name in TABLE_NAMES:
        try:
            tab = bundled_table(name, root=root, check=False)
        except (ManifestError, TableFormatError) as exc:
            result["tables"].append({"name": name.upper(), "verified": False, "failures": [str(exc)]})
            continue
        result["tables"].append(verify_table(tab).to_dict())
    ok = not result["manifest"] and all(t["verified"] for t in result["tables"])
    result["ok"] = ok
    if args.json:
        _emit(args, _dump(result))
    else:
        lines = [f"manifest: {'ok' if not result['manifest'] else 'FAIL'}"]
        lines += [f"  {p}" for p in result["manifest"]]
        for t in result["tables"]:
            status = "ok" if t["verified"] else "FAIL"
            extra = f" total {t['total']}, Euler {t['euler_characteristic']}" if "total" in t else ""
            lines.append(f"{t['name']}: {status}{extra}")
            lines += [f"  {f}" for f in t["failures"]]
        lines.append("all checks passed" if ok else "verification failed")
        _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK if ok else EXIT_DOMAIN


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hfktorsion", description="Knot Floer torsion bounds and unknotting-number derivations.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--json", action="store_true", help="emit a JSON report")
        p.add_argument("--out", help="write the report to this file instead of stdout")
        return p

    p = common(sub.add_parser("compute-hfk", help="HFK-hat of a grid diagram (.grd)"))
    p.add_argument("grid")
    p.add_argument("--max-grid", type=int, default=DEFAULT_MAX_GRID)
    p.add_argument("--workers", type=int, default=1, help="processes for the per-Alexander-grading blocks")
    p.set_defaults(func=cmd_compute_hfk)

    p = common(sub.add_parser("bounds", help="torsion bounds from an .hfk table (or bundled:mmN)"))
    p.add_argument("table")
    p.add_argument("--external-upper", type=int, default=None)
    p.set_defaults(func=cmd_bounds)

    p = common(sub.add_parser("alexander", help="Alexander polynomial of a .pd diagram"))
    p.add_argument("pd")
    p.set_defaults(func=cmd_alexander)

    p = common(sub.add_parser("twist", help="insert a full twist into a .pd diagram"))
    p.add_argument("pd")
    p.add_argument("--edges", type=_int_list, required=True, help="edge labels through the disk, e.g. 1,4")
    p.add_argument("--directions", type=_directions, required=True, help="per edge: up/down or +/-")
    p.add_argument("--sign", type=int, choices=(1, -1), default=1)
    p.set_defaults(func=cmd_twist)

    p = common(sub.add_parser("derive", help="run a bound-derivation session (.json)"))
    p.add_argument("session")
    p.set_defaults(func=cmd_derive)

    p = common(sub.add_parser("verify-data", help="check the bundled tables and manifest"))
    p.add_argument("--root", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_verify_data)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except argparse.ArgumentTypeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (GridSizeError, NotDivisibleError, InfeasibleTableError, EmptyIntervalError, ContradictionError, ManifestError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (PDError, GridError, TableFormatError, SessionError, FactError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
