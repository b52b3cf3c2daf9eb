"""Command line entry point: ``qbw <command> ...``.

Exit codes: 0 when every requested certification passes, 1 on a certification
failure, 2 on usage or parse errors, 3 when a search budget runs out.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path

from . import bgw as bgwlib
from . import construct, scheme, search, verify
from .matrixcore import GridMatrix, NonUnitEntryError, abs_matrix, read_qbw, write_qbw
from .report import DesignReport

OK, FAIL, USAGE, BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _digest(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


class Run:
    """Collects inputs, outputs and reports for the JSON output and the manifest."""

    def __init__(self, argv: list[str]):
        self.argv = argv
        self.inputs: dict[str, str] = {}
        self.outputs: dict[str, str] = {}
        self.reports: list[dict] = []
        self.extra: dict = {}
        self.start = time.perf_counter()

    def read(self, path: str) -> Path:
        p = Path(path)
        if not p.exists():
            raise UsageError(f"no such file: {path}")
        self.inputs[str(p)] = _digest(p)
        return p

    def wrote(self, path: Path) -> None:
        self.outputs[str(path)] = _digest(path)

    def report(self, rep: DesignReport) -> bool:
        self.reports.append(rep.to_json())
        return rep.passed

    def payload(self, code: int) -> dict:
        d = {"format": "qbw-report/1", "exit": code, "reports": self.reports}
        d.update(self.extra)
        if self.outputs:
            d["outputs"] = self.outputs
        return d

    def manifest(self, code: int) -> dict:
        return {
            "format": "qbw-manifest/1",
            "argv": self.argv,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "outcome": {"exit": code, "passed": [r["pass"] for r in self.reports]},
            "elapsed": round(time.perf_counter() - self.start, 3),
        }


def _load_matrix(run: Run, path: str) -> GridMatrix:
    p = run.read(path)
    try:
        return read_qbw(p)
    except (ValueError, IndexError) as exc:
        raise UsageError(f"cannot parse {path}: {exc}") from exc


def _load_bgw(run: Run, path: str) -> bgwlib.BgwMatrix:
    p = run.read(path)
    try:
        return bgwlib.read_bgw(p)
    except (ValueError, IndexError) as exc:
        raise UsageError(f"cannot parse {path}: {exc}") from exc


def _print_reports(run: Run) -> None:
    for r in run.reports:
        status = "PASS" if r["pass"] else "FAIL"
        params = ",".join(str(p) for p in r["params"])
        print(f"{r['kind']}: {status} ({params})")


# -- construct -------------------------------------------------------------------------------


def cmd_construct(args, run: Run) -> int:
    H = _load_bgw(run, args.bgw) if args.bgw else None
    core = _load_matrix(run, args.core) if args.core else None
    try:
        W, recipe, siamese = construct.build(args.family, args.q, H, core)
    except construct.IngredientError as exc:
        run.extra["error"] = str(exc)
        return FAIL
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    out = Path(args.out or (f"{args.family}_q{args.q}.qbw" if args.q else f"{args.family}.qbw"))
    write_qbw(W, out)
    run.wrote(out)
    rpath = out.with_suffix(".recipe.json")
    rpath.write_text(recipe.to_json() + "\n")
    run.wrote(rpath)
    if args.siamese_dir and siamese:
        d = Path(args.siamese_dir)
        d.mkdir(parents=True, exist_ok=True)
        for ell, M in enumerate(siamese):
            p = d / f"{out.stem}_siamese{ell}.qbw"
            write_qbw(M, p)
            run.wrote(p)
    ok = run.report(verify.is_weighing(W))
    if not args.json:
        print(f"wrote {out} ({W.rows}x{W.cols}, {W.kind})")
    return OK if ok else FAIL


# -- verify ---------------------------------------------------------------------------------------


VERIFY_KINDS = ("weighing", "quasi-balanced", "srg", "srg-balanced", "gdd", "ddg", "j-property", "deza",
                "siamese", "bgw", "fixtures")


def cmd_verify(args, run: Run) -> int:
    kind = args.kind
    if kind == "fixtures":
        reps = search.verify_fixture_signings()
        return OK if all([run.report(r) for r in reps]) else FAIL
    if not args.files:
        raise UsageError("verify needs at least one input file")
    if kind == "bgw":
        H = _load_bgw(run, args.files[0])
        rep = bgwlib.bgw_check(H)
        rep.detail["skew"] = bgwlib.skew_check(H)
        rep.detail["symmetric"] = bgwlib.symmetric_check(H)
        return OK if run.report(rep) else FAIL
    mats = [_load_matrix(run, f) for f in args.files]
    if kind == "siamese":
        return OK if run.report(verify.siamese_check(mats)) else FAIL
    W = mats[0]
    if kind in ("gdd", "ddg", "j-property") and (args.m is None or args.n is None):
        raise UsageError(f"--kind {kind} needs --m and --n")
    try:
        if kind == "weighing":
            rep = verify.is_weighing(W, args.roots)
        elif kind == "quasi-balanced":
            rep = verify.quasi_balanced_profile(W)
        elif kind == "srg":
            rep = verify.srg_check(abs_matrix(W))
        elif kind == "srg-balanced":
            rep = verify.srg_balanced_check(W, n=args.roots or 2)
        elif kind == "gdd":
            rep = verify.gdd_check(abs_matrix(W), args.m, args.n)
        elif kind == "ddg":
            rep = verify.ddg_check(abs_matrix(W), args.m, args.n)
        elif kind == "j-property":
            rep = verify.j_property_check(abs_matrix(W), args.m, args.n, args.case)
        else:
            rep = verify.deza_check(abs_matrix(W))
    except NonUnitEntryError as exc:
        rep = DesignReport(kind, False, (), detail={"reason": str(exc)})
    except ValueError as exc:
        rep = DesignReport(kind, False, (), detail={"reason": str(exc)})
    return OK if run.report(rep) else FAIL


# -- scheme ------------------------------------------------------------------------------------------


def _parse_compare(value: str) -> tuple[str, tuple]:
    try:
        family, params = value.split(":")
        values = tuple(int(x) for x in params.split(","))
    except ValueError as exc:
        raise UsageError(f"bad --compare value {value!r}; expected family:a,b,c") from exc
    if family not in scheme.FAMILIES or len(values) != 3:
        raise UsageError(f"bad --compare value {value!r}")
    return family, values


def cmd_scheme(args, run: Run) -> int:
    if args.scheme_cmd == "build":
        W = _load_matrix(run, args.input)
        try:
            S = scheme.build_scheme(args.family, W, args.m, args.n)
        except scheme.SchemeError as exc:
            run.extra["error"] = str(exc)
            return FAIL
        rep = scheme.verify_scheme(S)
        rep.detail.pop("p", None)
        ok = run.report(rep)
        run.extra["intersection_numbers"] = S.p.tolist() if S.p is not None else None
        out = Path(args.out or Path(args.input).with_suffix(".scheme").name)
        scheme.write_scheme(S, out)
        run.wrote(out)
        return OK if ok else FAIL
    p = run.read(args.input)
    try:
        S = scheme.read_scheme(p)
    except (ValueError, IndexError) as exc:
        raise UsageError(f"cannot parse {args.input}: {exc}") from exc
    rep = scheme.verify_scheme(S)
    rep.detail.pop("p", None)
    if not run.report(rep):
        return FAIL
    if args.scheme_cmd == "eig":
        E = scheme.eigenmatrices(S)
        ok = True
        if args.compare:
            family, params = _parse_compare(args.compare)
            try:
                ok = run.report(scheme.compare_closed_form(E, family, params))
            except ValueError as exc:
                raise UsageError(str(exc)) from exc
        P, Q = E.rounded()
        run.extra.update({"P": P, "Q": Q, "B": S.p.tolist(), "matching": E.matching})
        if not args.json:
            print("P =")
            for row in P:
                print("  " + " ".join(f"{x:10.4f}" for x in row))
        return OK if ok else FAIL
    # extract
    try:
        W = scheme.extract_from_scheme(S, args.family)
    except scheme.SchemeError as exc:
        run.extra["error"] = str(exc)
        return FAIL
    out = Path(args.out or Path(args.input).with_suffix(".qbw").name)
    write_qbw(W, out)
    run.wrote(out)
    return OK if run.report(verify.is_weighing(W)) else FAIL


# -- search and table ---------------------------------------------------------------------------------------


def _graph(run: Run, name: str) -> GridMatrix:
    if Path(name).exists():
        return _load_matrix(run, name)
    try:
        return search.srg_fixture(name)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def cmd_search(args, run: Run) -> int:
    A = _graph(run, args.graph)
    mode = {"balanced": "srg_balanced", "weighing": "weighing_only"}[args.mode]
    try:
        prob = search.SearchProblem(A, args.roots, mode, "general" if args.general else "symmetric",
                                    args.budget, args.normalization)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    out = search.search_signing(prob)
    run.extra["outcome"] = out.to_dict(timings=args.timings)
    if out.W is not None:
        run.report(verify.srg_balanced_check(out.W, prob.A, prob.n) if mode == "srg_balanced"
                   else verify.is_weighing(out.W, prob.n))
        if args.out:
            write_qbw(out.W, Path(args.out))
            run.wrote(Path(args.out))
    if not args.json:
        print(f"{args.graph} over R_{args.roots}: {out.status} after {out.nodes} nodes")
    if out.status == "budget_exceeded":
        return BUDGET
    return OK


def cmd_table(args, run: Run) -> int:
    rows = args.rows.split(",") if args.rows else list(search.TABLE_PARAMS)
    roots = [int(x) for x in args.roots.split(",")]
    cells = []
    for r in rows:
        if r not in search.TABLE_PARAMS and r not in search.TABLE_GRAPHS:
            raise UsageError(f"unknown table row {r!r}")
        for n in roots:
            cell = search.table_cell(r, n, args.budget, args.symmetry)
            cells.append(cell.to_dict())
            if not args.json:
                print(f"{r:>12}  Z{n}: {cell.verdict}", flush=True)
    run.extra["table"] = cells
    return BUDGET if any(c["verdict"] == "?" for c in cells) else OK


# -- parser -------------------------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qbw", description="Quasi-balanced weighing matrices: build, certify, search.")
    ap.add_argument("--json", action="store_true", help="print a JSON report on stdout")
    ap.add_argument("--manifest", help="write a run manifest (argv, input and output digests) to this file")
    # the same flags after the subcommand; SUPPRESS keeps the top-level value when absent
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS)
    common.add_argument("--manifest", default=argparse.SUPPRESS)
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("construct", parents=[common], help="build a weighing matrix from a named construction")
    c.add_argument("family", choices=construct.FAMILIES)
    c.add_argument("--q", type=int)
    c.add_argument("--bgw", help="BGW ingredient file (gdd families)")
    c.add_argument("--core", help="core matrix file")
    c.add_argument("--out")
    c.add_argument("--siamese-dir", help="also write the Siamese family here")

    v = sub.add_parser("verify", parents=[common], help="certify a matrix file")
    v.add_argument("files", nargs="*")
    v.add_argument("--kind", choices=VERIFY_KINDS, default="weighing")
    v.add_argument("--roots", type=int)
    v.add_argument("--m", type=int)
    v.add_argument("--n", type=int)
    v.add_argument("--case", choices=("kJ/m", "k(J-Jmn)/(m-1)"), default="kJ/m")

    s = sub.add_parser("scheme", help="association schemes")
    ssub = s.add_subparsers(dest="scheme_cmd", required=True)
    sb = ssub.add_parser("build", parents=[common])
    sb.add_argument("input")
    sb.add_argument("--family", choices=scheme.FAMILIES, required=True)
    sb.add_argument("--m", type=int)
    sb.add_argument("--n", type=int)
    sb.add_argument("--out")
    se = ssub.add_parser("eig", parents=[common])
    se.add_argument("input")
    se.add_argument("--compare", help="family:a,b,c e.g. srg:12,2,-4 or gdd1:16,16,2")
    sx = ssub.add_parser("extract", parents=[common])
    sx.add_argument("input")
    sx.add_argument("--family", choices=scheme.FAMILIES, required=True)
    sx.add_argument("--out")

    sr = sub.add_parser("search", help="signing search")
    srsub = sr.add_subparsers(dest="search_cmd", required=True)
    sg = srsub.add_parser("sign", parents=[common])
    sg.add_argument("--graph", required=True, help="fixture name such as clebsch or triangular(6), or a file")
    sg.add_argument("--roots", type=int, default=2)
    sg.add_argument("--mode", choices=("balanced", "weighing"), default="balanced")
    sg.add_argument("--general", action="store_true", help="do not require W = W^T")
    sg.add_argument("--budget", type=int, default=search.DEFAULT_BUDGET)
    sg.add_argument("--normalization", choices=search.NORMALIZATIONS, default="tree")
    sg.add_argument("--timings", action="store_true", help="include elapsed time in the outcome")
    sg.add_argument("--out")

    t = sub.add_parser("table", parents=[common], help="reproduce rows of the srg-balanced signing table")
    t.add_argument("--rows", help="comma separated parameter sets, e.g. 16-5-0-2,15-8-4-4")
    t.add_argument("--roots", default="2", help="comma separated root orders")
    t.add_argument("--budget", type=int, default=10**7)
    t.add_argument("--symmetry", choices=("both", "symmetric", "general"), default="both")
    return ap


COMMANDS = {"construct": cmd_construct, "verify": cmd_verify, "scheme": cmd_scheme, "search": cmd_search,
            "table": cmd_table}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    run = Run(argv)
    try:
        code = COMMANDS[args.command](args, run)
    except UsageError as exc:
        print(f"qbw: error: {exc}", file=sys.stderr)
        code = USAGE
    if args.json:
        print(json.dumps(run.payload(code), indent=2, sort_keys=True))
    elif args.command in ("verify", "scheme", "construct"):
        _print_reports(run)
        if "error" in run.extra:
            print(f"error: {run.extra['error']}")
    if args.manifest:
        Path(args.manifest).write_text(json.dumps(run.manifest(code), indent=2, sort_keys=True) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
