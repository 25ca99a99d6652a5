"""Command-line front end.

    pmreduce generate --n 6 --k 3 --seed 7 -o inst.json
    pmreduce reduce sat inst.json -o inst.cnf
    pmreduce reduce subset-sum inst.cnf -o inst.ss.json
    pmreduce solve direct|ppsz|enumerate|mitm|brute <input>
    pmreduce report expansion|ratios|accessibility --n 6
    pmreduce verify inst.json [inst.cnf] [inst.ss.json]

Exit status is 0 on success, 1 when a solve or check fails, 2 on bad usage.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from . import instance as ic
from . import metrics, reduction, solvers
from .errors import PipelineError
from .seeds import derive_seed

VARMAP_SUFFIX = ".varmap.json"
DECODE_SUFFIX = ".decode.json"


class CliError(Exception):
    """Reported on stderr; exits with status 1."""


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _write(text: str, output: Path | None) -> None:
    if output is None:
        sys.stdout.write(text)
    else:
        output.write_text(text)


def _read(path: Path) -> str:
    try:
        return path.read_text()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}") from exc


def _sidecar(path: Path, suffix: str) -> Path:
    return path.with_name(path.name + suffix)


def _load_varmap(path: Path | None) -> reduction.VarMap | None:
    if path is None or not path.exists():
        return None
    return reduction.VarMap.from_dict(json.loads(path.read_text()))


# generate

def cmd_generate(args) -> int:
    n = args.n
    k = args.k if args.k is not None else (n + 1) // 2
    if not 1 <= k <= n:
        raise CliError(f"--k must lie in 1..{n}")
    inst = ic.generate_unique_violation(n, k, args.seed)
    ic.verify_unique_violation(inst, limit=args.verify_limit, jobs=args.jobs)
    if args.redact:
        inst = inst.redacted()
    _write(ic.dump_instance(inst), args.output)
    return 0


# reduce

def cmd_reduce(args) -> int:
    text = _read(args.input)
    if args.target == "sat":
        inst = ic.load_instance(text)
        formula, vm = reduction.encode_sat(inst)
        _write(reduction.emit_dimacs(formula), args.output)
        if args.output is not None:
            _sidecar(args.output, VARMAP_SUFFIX).write_text(json.dumps(vm.to_dict(), indent=2) + "\n")
    else:
        formula = reduction.parse_dimacs(text)
        ss, dmap = reduction.encode_subset_sum(formula)
        _write(reduction.emit_subset_sum(ss), args.output)
        if args.output is not None:
            _sidecar(args.output, DECODE_SUFFIX).write_text(json.dumps(dmap.to_dict(), indent=2) + "\n")
            vm = _load_varmap(_sidecar(args.input, VARMAP_SUFFIX))
            if vm is not None:
                _sidecar(args.output, VARMAP_SUFFIX).write_text(json.dumps(vm.to_dict(), indent=2) + "\n")
    return 0


# solve

def _emit_solution(args, doc: dict, log: solvers.TrialLog) -> None:
    doc["log"] = json.loads(log.to_json_line(timing=args.timing))
    _write(json.dumps(doc, indent=2) + "\n", args.output)
    if args.log is not None:
        with args.log.open("a") as fh:
            fh.write(log.to_json_line(timing=args.timing) + "\n")


def cmd_solve(args) -> int:
    text = _read(args.input)
    seed = derive_seed(args.seed, "solve")
    found = True
    if args.solver == "direct":
        inst = ic.load_instance(text)
        blind = inst.redacted()
        order = "random" if args.order == "random" else "lexicographic"
        mask, trials = ic.direct_search(blind, order, seed)
        log = solvers.TrialLog("Direct Matrix", inst.n, inst.n, args.seed, trials, "found", 0)
        doc = {"solver": "direct", "order": order, "witness": mask.indices()}
        if inst.witness is not None:
            doc["matches_stored_witness"] = mask == inst.witness
        print(f"witness: {mask}")
    elif args.solver in ("ppsz", "enumerate"):
        formula = reduction.parse_dimacs(text)
        vm = _load_varmap(args.varmap or _sidecar(args.input, VARMAP_SUFFIX))
        n = vm.n if vm else formula.var_count
        if args.solver == "ppsz":
            model, log = solvers.ppsz_solve(formula, seed, args.max_trials, n=n)
            log.seed = args.seed
            models = [] if model is None else [model]
        else:
            models = solvers.sat_enumerate(formula)
            log = solvers.TrialLog("3-SAT (enumeration)", n, formula.var_count, None,
                                   max(1, len(models)), "found" if models else "exhausted", 0)
        found = bool(models)
        doc = {"solver": args.solver, "models": [[int(b) for b in m] for m in models]}
        if vm is not None and models:
            witnesses = [reduction.decode_sat_solution(m, vm) for m in models]
            doc["witnesses"] = [w.indices() for w in witnesses]
            for w in witnesses:
                print(f"witness: {w}")
    else:
        ss = reduction.parse_subset_sum(text)
        dmap_path = args.decode_map or _sidecar(args.input, DECODE_SUFFIX)
        dmap = (reduction.DecodeMap.from_dict(json.loads(dmap_path.read_text()))
                if dmap_path.exists() else None)
        if args.solver == "mitm":
            sol, log = solvers.mitm_subset_sum(ss)
            solutions = [] if sol is None else [sol]
        else:
            solutions = solvers.brute_force_subset_sum(ss)
            log = solvers.TrialLog("Subset Sum (brute force)", len(ss), len(ss), None,
                                   1 << len(ss), "found" if solutions else "exhausted", 0)
        found = bool(solutions)
        doc = {"solver": args.solver, "solutions": [list(s) for s in solutions]}
        if dmap is not None and solutions:
            assignments = [reduction.decode_subset_sum_solution(s, dmap) for s in solutions]
            doc["assignments"] = [[int(b) for b in a] for a in assignments]
            vm = _load_varmap(args.varmap or _sidecar(args.input, VARMAP_SUFFIX))
            if vm is not None:
                doc["witnesses"] = [reduction.decode_sat_solution(a, vm).indices() for a in assignments]
                for w in doc["witnesses"]:
                    print(f"witness: {ic.SubsetMask.from_indices(w, vm.n)}")
    _emit_solution(args, doc, log)
    if not found:
        print(f"error: {args.solver} found no solution", file=sys.stderr)
        return 1
    return 0


# report

def _render_rows(header: list[str], rows: list[list], fmt: str) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        return buf.getvalue()
    if fmt == "json":
        return json.dumps([dict(zip(header, r)) for r in rows], indent=2) + "\n"
    lines = ["| " + " | ".join(header) + " |", "|---|" + "---:|" * (len(header) - 1)]
    lines += ["| " + " | ".join(map(str, r)) + " |" for r in rows]
    return "\n".join(lines) + "\n"


def ratio_table_text(n: int, fmt: str) -> str:
    rows = solvers.trial_ratio_table(n)
    if fmt == "md":
        header = ["Reduction Shape", "Dimension (d)", "Typical Time Complexity", f"Ratio to 2^N (N={n})"]
        body = [[r.stage, r.d, f"O(2^{r.time_exponent * r.d:.4g}) ~ {solvers.sig3(r.trials)}", f"{r.ratio:.1f}"]
                for r in rows]
    else:
        header = ["stage", "d", "time_exponent", "trials", "ratio", "space_exponent", "space", "mechanism"]
        body = [[r.stage, r.d, r.time_exponent, solvers.sig3(r.trials), f"{r.ratio:.1f}",
                 "" if r.space_exponent is None else r.space_exponent,
                 "poly" if r.space is None else solvers.sig3(r.space), r.mechanism] for r in rows]
    return _render_rows(header, body, fmt)


def cmd_report(args) -> int:
    n = args.n
    if args.kind == "expansion":
        if args.mode == "nominal":
            report = reduction.expansion_nominal(n)
        else:
            if args.instance is not None:
                inst = ic.load_instance(_read(args.instance))
                n = inst.n
            else:
                inst = ic.generate_unique_violation(n, args.k or (n + 1) // 2, args.seed)
            formula, _ = reduction.encode_sat(inst)
            ss, _ = reduction.encode_subset_sum(formula)
            report = reduction.expansion_measured(formula, ss, n)
        text = {"csv": report.to_csv, "md": report.to_markdown,
                "json": lambda: json.dumps(report.to_dict(), indent=2) + "\n"}[args.format]()
    elif args.kind == "ratios":
        text = ratio_table_text(n, args.format)
    else:
        prior = metrics.Prior(args.k)
        text = metrics.render_accessibility(metrics.accessibility_rows(n, prior), args.format)
    _write(text, args.output)
    return 0


# verify

def _classify(path: Path, text: str) -> str:
    stripped = text.lstrip()
    if stripped.startswith("{"):
        doc = json.loads(text)
        if "items" in doc:
            return "subset-sum"
        if "base" in doc and "u" in doc:
            return "instance"
        raise CliError(f"{path}: unrecognized JSON artifact")
    return "cnf"


def audit(inst, formula, ss, varmap, jobs: int = 1) -> list[tuple[str, bool, str]]:
    """Run every applicable round-trip check; returns ``(name, ok, detail)`` rows."""
    checks: list[tuple[str, bool, str]] = []

    def check(name, fn):
        try:
            detail = fn() or ""
            checks.append((name, True, detail))
        except (PipelineError, AssertionError, ValueError) as exc:
            checks.append((name, False, str(exc)))

    witness = None
    if inst is not None:
        def unique():
            nonlocal witness
            witness = ic.verify_unique_violation(inst, jobs=jobs)
            return f"witness {witness}"
        check("unique-violation", unique)
        if formula is None and inst.witness is not None:
            formula, varmap = reduction.encode_sat(inst)
        elif formula is not None and inst.witness is not None:
            def cnf_matches():
                expected, _ = reduction.encode_sat(inst)
                assert formula == expected, "CNF differs from the encoding of the instance"
            check("cnf-matches-instance", cnf_matches)
    if formula is not None and varmap is None and inst is not None and formula.var_count == 3 * inst.n:
        varmap = reduction.VarMap(inst.n)

    model = None
    if formula is not None:
        if formula.var_count <= solvers.SAT_ENUM_LIMIT:
            def sat_unique():
                nonlocal model
                models = solvers.sat_enumerate(formula)
                assert len(models) == 1, f"expected exactly one model, found {len(models)}"
                model = models[0]
                return f"{formula.var_count} vars, {len(formula.clauses)} clauses"
            check("sat-unique-model", sat_unique)
        else:
            checks.append(("sat-unique-model", True, "skipped: above enumeration limit"))
        if varmap is not None and model is not None:
            def sat_decode():
                decoded = reduction.decode_sat_solution(model, varmap)
                expected = witness if witness is not None else (inst.witness if inst else None)
                assert expected is None or decoded == expected, f"model decodes to {decoded}, not {expected}"
                return f"decodes to {decoded}"
            check("sat-decode-roundtrip", sat_decode)
        if ss is None:
            ss, _ = reduction.encode_subset_sum(formula)
        else:
            def ss_matches():
                expected, _ = reduction.encode_subset_sum(formula)
                assert ss == expected, "subset-sum items differ from the encoding of the CNF"
            check("subset-sum-matches-cnf", ss_matches)

    if ss is not None:
        def carry_free():
            assert ss.is_carry_free(), f"column sums {max(ss.column_sums())} reach base {ss.base}"
            return f"max column sum {max(ss.column_sums(), default=0)}"
        check("carry-free", carry_free)
        if formula is not None and model is not None:
            def forward():
                dmap = reduction.DecodeMap(formula.var_count, len(formula.clauses), ss.labels)
                chosen = reduction.encode_assignment(formula, dmap, model)
                assert ss.is_solution(chosen), "induced item subset does not sum to the target"
                back = reduction.decode_subset_sum_solution(chosen, dmap)
                assert back == model, "subset-sum decode does not return the SAT model"
                return f"{len(chosen)} of {len(ss.items)} items chosen"
            check("forward-sum", forward)
    return checks


def cmd_verify(args) -> int:
    inst = formula = ss = varmap = None
    for path in args.inputs:
        text = _read(path)
        kind = _classify(path, text)
        if kind == "instance":
            inst = ic.load_instance(text)
        elif kind == "cnf":
            formula = reduction.parse_dimacs(text)
            varmap = varmap or _load_varmap(_sidecar(path, VARMAP_SUFFIX))
        else:
            ss = reduction.parse_subset_sum(text)
    checks = audit(inst, formula, ss, varmap, jobs=args.jobs)
    lines = [f"[{'PASS' if ok else 'FAIL'}] {name}" + (f": {detail}" if detail else "")
             for name, ok, detail in checks]
    _write("\n".join(lines) + "\n", args.output)
    failed = [name for name, ok, _ in checks if not ok]
    if failed:
        print(f"error: failed checks: {', '.join(failed)}", file=sys.stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pmreduce", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("-o", "--output", type=Path)
    common.add_argument("--jobs", type=_positive, default=1)

    g = sub.add_parser("generate", parents=[common], help="write a verified unique-violation instance")
    g.add_argument("--n", type=_positive, required=True)
    g.add_argument("--k", type=_positive)
    g.add_argument("--redact", action="store_true", help="null the witness field")
    g.add_argument("--verify-limit", type=_positive, default=ic.EXHAUSTIVE_LIMIT)
    g.set_defaults(func=cmd_generate)

    r = sub.add_parser("reduce", parents=[common], help="P-matrix -> 3-SAT or 3-SAT -> Subset Sum")
    r.add_argument("target", choices=["sat", "subset-sum"])
    r.add_argument("input", type=Path)
    r.set_defaults(func=cmd_reduce)

    s = sub.add_parser("solve", parents=[common], help="run a solver")
    s.add_argument("solver", choices=["direct", "ppsz", "enumerate", "mitm", "brute"])
    s.add_argument("input", type=Path)
    s.add_argument("--order", choices=["lexicographic", "random"], default="random")
    s.add_argument("--max-trials", type=_positive, default=100_000)
    s.add_argument("--varmap", type=Path)
    s.add_argument("--decode-map", type=Path)
    s.add_argument("--log", type=Path, help="append the trial log as a JSON line")
    s.add_argument("--timing", action="store_true", help="record wall time (output no longer byte-stable)")
    s.set_defaults(func=cmd_solve)

    rep = sub.add_parser("report", parents=[common], help="emit a table")
    rep.add_argument("kind", choices=["expansion", "ratios", "accessibility"])
    rep.add_argument("--n", type=_positive, required=True)
    rep.add_argument("--k", type=_positive)
    rep.add_argument("--mode", choices=["nominal", "measured"], default="nominal")
    rep.add_argument("--format", choices=["json", "csv", "md"], default="md")
    rep.add_argument("--instance", type=Path, help="instance file for measured expansion")
    rep.set_defaults(func=cmd_report)

    v = sub.add_parser("verify", parents=[common], help="audit pipeline artifacts")
    v.add_argument("inputs", type=Path, nargs="+")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (PipelineError, CliError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
