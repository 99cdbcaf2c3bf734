"""Command-line front end: check, oracle, run and corpus.

Exit codes: 0 pass, 1 fail, 2 inconclusive, 3 usage or input error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from importlib import resources
from typing import Optional

import jsonschema

from . import __version__
from .checker import (
    FAIL,
    INCONCLUSIVE,
    PASS,
    check_correctness_ks,
    check_correctness_wfs,
    check_stable_proposition,
    covered,
)
from .engine import (
    FAILS,
    SEMANTICS,
    SLDNF,
    SUCCEEDS,
    Budget,
    NonProperSpec,
    answers,
    build_main_tree,
    check_semi_completeness_empirical,
)
from .oracles import (
    DEFAULT_STABLE_CAP,
    IterationLimit,
    NotDefinite,
    StableCapExceeded,
    fitting_fixpoint,
    least_model,
    stable_models,
    well_founded_model,
)
from .specification import DEFAULT_WITNESS_CAP, LevelError, SpecError, check_proper, load_spec
from .syntax import ArityError, ParseError, Program, format_query, parse_atom, parse_program, parse_query
from .terms import format_term, term_key
from .universe import GroundUniverse, UniverseTooLarge, ground_program

EXIT_PASS, EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_USAGE = 0, 1, 2, 3
SCHEMA_VERSION = 1
_EXIT = {PASS: EXIT_PASS, FAIL: EXIT_FAIL, INCONCLUSIVE: EXIT_INCONCLUSIVE}

# errors reported as exit 3 with a diagnostic
INPUT_ERRORS = (
    OSError,
    ParseError,
    SpecError,
    LevelError,
    ArityError,
    NotDefinite,
    NonProperSpec,
    UniverseTooLarge,
    StableCapExceeded,
    IterationLimit,
    jsonschema.ValidationError,
    ValueError,
)


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    program: Optional[str] = None
    spec: Optional[str] = None
    depth: Optional[int] = None
    budget_depth: int = Budget().max_depth
    budget_nodes: int = Budget().max_nodes
    budget_rank: int = Budget().max_rank
    semantics: str = SLDNF
    stability_check: bool = False
    witness_cap: int = DEFAULT_WITNESS_CAP
    format: str = "text"
    allow_nonproper: bool = False

    def __post_init__(self):
        if self.depth is not None and self.depth < 1:
            raise UsageError("--depth must be at least 1")
        for path in (self.program, self.spec):
            if path is not None and not os.path.exists(path):
                raise UsageError(f"no such file: {path}")

    @property
    def budget(self) -> Budget:
        return Budget(self.budget_depth, self.budget_nodes, self.budget_rank)

    def echo(self) -> dict:
        out = asdict(self)
        for key in ("program", "spec"):
            if out[key] is not None:
                out[key] = os.path.basename(out[key])
        return out


# -- reports -------------------------------------------------------------------------


def load_schema() -> dict:
    text = resources.files("lpspec").joinpath("report.schema.json").read_text(encoding="utf-8")
    return json.loads(text)


def envelope(command: str, config: dict, status: str, result: dict) -> dict:
    report = {
        "schema_version": SCHEMA_VERSION,
        "tool": "lpspec",
        "version": __version__,
        "command": command,
        "config": config,
        "status": status,
        "result": result,
    }
    jsonschema.validate(report, load_schema())
    return report


def dump_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False)


def digest(atoms) -> dict:
    """Canonical sorted atom list with its SHA-256."""
    texts = [format_term(a) for a in sorted(atoms, key=term_key)]
    h = hashlib.sha256("\n".join(texts).encode("utf-8")).hexdigest()
    return {"atoms": texts, "count": len(texts), "sha256": h}


def load_program(path: str) -> Program:
    with open(path, encoding="utf-8") as fh:
        return parse_program(fh.read())


def parse_symbols(text: Optional[str]) -> set:
    """``a/0, s/1`` into ``{("a", 0), ("s", 1)}``."""
    out = set()
    if not text:
        return out
    for part in text.replace(" ", "").split(","):
        if not part:
            continue
        name, _, arity = part.rpartition("/")
        if not name or not arity.isdigit():
            raise UsageError(f"bad symbol {part!r}; expected name/arity")
        out.add((name, int(arity)))
    return out


def _universe(program: Program, spec, depth, symbols) -> GroundUniverse:
    if spec is not None:
        u = spec.make_universe(program, depth)
    else:
        u = GroundUniverse.for_program(program, depth or 1)
    return u.with_functions(symbols).with_predicates(program.predicates)


# -- commands --------------------------------------------------------------------------


def do_check(kind: str, cfg: RunConfig) -> tuple:
    program = load_program(cfg.program)
    spec = load_spec(cfg.spec)
    u = spec.make_universe(program, cfg.depth)
    es = spec.evaluate(u)
    k = cfg.witness_cap
    result: dict = {"depth": u.depth}
    proper = check_proper(es, k)
    result["proper"] = {
        "proper": proper.proper,
        "count": proper.count,
        "witnesses": [format_term(a) for a in proper.witnesses],
    }
    if es.dropped:
        result["dropped"] = [format_term(a) for a in es.dropped[:k]]
    text = []
    if kind == "stable":
        rep = check_stable_proposition(es, program, k=k)
        result["stable"] = rep.to_dict()
        status = rep.status
        text.append(rep.describe())
    else:
        if kind == "ks":
            rep = check_correctness_ks(es, program, k)
        else:
            if es.level is None:
                raise UsageError("check wfs needs a [level] section in the spec")
            rep = check_correctness_wfs(es, program, k=k)
        result["correctness"] = rep.to_dict()
        status = rep.overall
        text.append(rep.describe())
        if cfg.stability_check:
            srep = check_stable_proposition(es, program, k=k)
            result["stable"] = srep.to_dict()
            text.append(srep.describe())
            if srep.status == FAIL:
                status = FAIL
    if not proper.proper:
        shown = ", ".join(format_term(a) for a in proper.witnesses)
        text.append(f"spec is not proper: {proper.count} atom(s) in Snf but not in St: {shown}")
    return status, result, "\n".join(text)


def do_oracle(which: str, program: Program, spec, depth, symbols, cap: int = DEFAULT_STABLE_CAP) -> tuple:
    u = _universe(program, spec, depth, symbols)
    gp = ground_program(program, u)
    hb = list(u.herbrand_base())
    result: dict = {"which": which, "depth": u.depth, "ground_clauses": len(gp)}
    lines = []
    if which == "lm":
        m = least_model(gp)
        result["model"] = digest(m)
        lines.append("empty model" if not m else "\n".join(result["model"]["atoms"]))
    elif which in ("fitting", "wfs"):
        if which == "fitting":
            fr = fitting_fixpoint(gp, hb)
            interp = fr.interp
            result["iterations"] = fr.iterations
        else:
            interp = well_founded_model(gp, hb)
        values = {}
        for a in sorted(set(hb) | interp.true_set | interp.false_set, key=term_key):
            v = "t" if a in interp.true_set else "f" if a in interp.false_set else "u"
            values[format_term(a)] = v
            lines.append(f"{format_term(a)} = {v}")
        result["true"] = digest(interp.true_set)
        result["false"] = digest(interp.false_set)
        result["values"] = values
        if not values:
            lines.append("empty Herbrand base")
    elif which == "stable":
        models = stable_models(gp, hb, cap=cap)
        result["models"] = [digest(m) for m in models]
        if not models:
            lines.append("no stable models")
        for i, m in enumerate(models, 1):
            body = ", ".join(format_term(a) for a in sorted(m, key=term_key))
            lines.append(f"model {i}: {{{body}}}")
    else:
        raise UsageError(f"unknown oracle {which!r}")
    return PASS, result, "\n".join(lines)


def do_run(cfg: RunConfig, query: Optional[str], symbols=()) -> tuple:
    program = load_program(cfg.program)
    if query is not None:
        q = parse_query(query)
        u = None
        if cfg.semantics == "sls":
            spec = load_spec(cfg.spec) if cfg.spec else None
            u = _universe(program, spec, cfg.depth, symbols)
        tree = build_main_tree(program, q, cfg.budget, cfg.semantics, u)
        result = {
            "query": format_query(q),
            "status": tree.status,
            "answers": [format_query(a) for a in answers(tree)],
            "tree": tree.to_dict(),
        }
        text = tree.to_text() + f"\nstatus: {tree.status}"
        for a in result["answers"]:
            text += f"\nanswer: {a}"
        # a finitely failed query is an answer; only undecided trees are inconclusive
        decided = tree.status in (SUCCEEDS, FAILS)
        return (PASS if decided else INCONCLUSIVE), result, text
    if cfg.spec is None:
        raise UsageError("run needs a query, or --spec for the semi-completeness check")
    spec = load_spec(cfg.spec)
    es = spec.evaluate(spec.make_universe(program, cfg.depth))
    rep = check_semi_completeness_empirical(
        es, program, cfg.budget, cfg.semantics, cfg.allow_nonproper, k=cfg.witness_cap
    )
    return rep.status, rep.to_dict(), rep.describe()


# -- corpus ------------------------------------------------------------------------------


def load_manifest_schema() -> dict:
    text = resources.files("lpspec").joinpath("manifest.schema.json").read_text(encoding="utf-8")
    return json.loads(text)


def default_manifest() -> str:
    return str(resources.files("lpspec").joinpath("corpus", "manifest.json"))


def _atoms_text(atoms) -> list:
    return sorted(format_term(parse_atom(a)) for a in atoms)


def _eval_check(entry: dict, check: dict, base: str, cache: dict) -> dict:
    """Run one manifest expectation; returns {kind, ok, expected, actual}."""
    kind = check["kind"]
    prog_path = os.path.join(base, check.get("program", entry["program"]))
    spec_rel = check.get("spec", entry.get("spec"))
    spec_path = os.path.join(base, spec_rel) if spec_rel else None
    depth = check.get("depth", entry.get("depth"))
    program = load_program(prog_path)
    spec = load_spec(spec_path) if spec_path else None
    # the universe depends on the program only through its symbols
    key = None
    if spec is not None:
        key = (
            spec_path,
            depth,
            frozenset(spec.symbols() | program.function_symbols()),
            frozenset(spec.predicates() | set(program.predicates)),
        )

    def evaluated():
        if key not in cache:
            cache[key] = spec.evaluate(spec.make_universe(program, depth))
        return cache[key]

    out = {"kind": kind, "program": os.path.basename(prog_path)}
    if kind == "check":
        es = evaluated()
        if check["semantics"] == "ks":
            rep = check_correctness_ks(es, program)
        else:
            rep = check_correctness_wfs(es, program)
        actual = {"overall": rep.overall, "condition1": rep.condition1.status, "condition2": rep.condition2.status}
        witnesses = [w.text for w in rep.condition1.witnesses + rep.condition2.witnesses]
        expected = {"overall": check["expect"]}
        for c in ("condition1", "condition2"):
            if c in check:
                expected[c] = check[c]
        ok = all(actual[k] == v for k, v in expected.items())
        if "witness" in check:
            expected["witness"] = check["witness"]
            actual["witnesses"] = witnesses
            ok = ok and check["witness"] in witnesses
        out.update(semantics=check["semantics"], expected=expected, actual=actual, ok=ok)
    elif kind == "stable-proposition":
        rep = check_stable_proposition(evaluated(), program)
        out.update(expected=check["expect"], actual=rep.status, ok=rep.status == check["expect"])
    elif kind == "proper":
        pr = check_proper(evaluated())
        actual = {"proper": pr.proper, "witnesses": [format_term(a) for a in pr.witnesses]}
        expected = {"proper": check["expect"]}
        ok = pr.proper == check["expect"]
        if "witnesses" in check:
            expected["witnesses"] = _atoms_text(check["witnesses"])
            ok = ok and actual["witnesses"] == expected["witnesses"]
        out.update(expected=expected, actual=actual, ok=ok)
    elif kind == "covered":
        es = evaluated()
        atom = parse_atom(check["atom"])
        clause = program.clauses[check["clause"] - 1]
        cov = covered(atom, clause, es)
        actual = str(cov.instance) if cov.covered else None
        out.update(atom=check["atom"], expected=check["instance"], actual=actual, ok=actual == check["instance"])
    elif kind == "oracle":
        symbols = parse_symbols(",".join(check.get("symbols", [])))
        _, res, _ = do_oracle(check["which"], program, spec, depth, symbols)
        ok = True
        actual: dict = {}
        expected: dict = {}
        if "values" in check:
            expected["values"] = check["values"]
            actual["values"] = {}
            for a, v in check["values"].items():
                got = res["values"].get(format_term(parse_atom(a)), "absent")
                actual["values"][a] = got
                ok = ok and got == v
        if "true_exact" in check:
            pred = check.get("predicate")
            got = res["true"]["atoms"] if "true" in res else res["model"]["atoms"]
            if pred:
                got = [a for a in got if a.startswith(pred.split("/")[0] + "(")]
            expected["true_exact"] = _atoms_text(check["true_exact"])
            actual["true_exact"] = sorted(got)
            ok = ok and actual["true_exact"] == expected["true_exact"]
        if "models" in check:
            got = [sorted(m["atoms"]) for m in res["models"]]
            expected["models"] = [_atoms_text(m) for m in check["models"]]
            actual["models"] = got
            ok = ok and got == expected["models"]
        out.update(which=check["which"], expected=expected, actual=actual, ok=ok)
    elif kind == "run":
        budget = Budget(
            check.get("budget_depth", Budget().max_depth),
            check.get("budget_nodes", Budget().max_nodes),
            check.get("budget_rank", Budget().max_rank),
        )
        sem = check.get("semantics", SLDNF)
        u = spec.make_universe(program, depth) if (sem == "sls" and spec is not None) else None
        if sem == "sls" and u is None:
            u = GroundUniverse.for_program(program, depth or 1)
        tree = build_main_tree(program, parse_query(check["query"]), budget, sem, u)
        actual = {"status": tree.status}
        expected = {"status": check["status"]}
        if "answers" in check:
            actual["answers"] = [format_query(a) for a in answers(tree)]
            expected["answers"] = [format_query(parse_query(a)) for a in check["answers"]]
        if "nodes" in check:
            actual["nodes"] = len(tree.nodes)
            expected["nodes"] = check["nodes"]
        out.update(query=check["query"], semantics=sem, expected=expected, actual=actual, ok=actual == expected)
    elif kind == "semi":
        budget = Budget(
            check.get("budget_depth", Budget().max_depth),
            check.get("budget_nodes", Budget().max_nodes),
            check.get("budget_rank", Budget().max_rank),
        )
        rep = check_semi_completeness_empirical(
            evaluated(), program, budget, check["semantics"], check.get("allow_nonproper", False)
        )
        actual = {"status": rep.status, "skipped": sorted(format_term(o.atom) for o in rep.skipped)}
        expected = {"status": check["expect"], "skipped": _atoms_text(check.get("skipped", []))}
        out.update(semantics=check["semantics"], expected=expected, actual=actual, ok=actual == expected)
    else:
        raise UsageError(f"unknown check kind {kind!r}")
    return out


def run_entry(args: tuple) -> dict:
    entry, base = args
    cache: dict = {}
    results = []
    for check in entry.get("checks", []):
        try:
            results.append(_eval_check(entry, check, base, cache))
        except INPUT_ERRORS as e:
            results.append({"kind": check.get("kind"), "ok": False, "error": f"{type(e).__name__}: {e}"})
    return {"name": entry["name"], "ok": all(r["ok"] for r in results), "checks": results}


def run_corpus(manifest_path: str, jobs: int = 1) -> dict:
    with open(manifest_path, encoding="utf-8") as fh:
        manifest = json.load(fh)
    jsonschema.validate(manifest, load_manifest_schema())
    base = os.path.dirname(os.path.abspath(manifest_path))
    tasks = [(e, base) for e in manifest["entries"]]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            entries = list(pool.map(run_entry, tasks))
    else:
        entries = [run_entry(t) for t in tasks]
    failed = [e["name"] for e in entries if not e["ok"]]
    return {
        "manifest": os.path.basename(manifest_path),
        "entries": entries,
        "checks": sum(len(e["checks"]) for e in entries),
        "failed": failed,
    }


def do_corpus(path: Optional[str], jobs: int) -> tuple:
    res = run_corpus(path or default_manifest(), jobs)
    lines = []
    for e in res["entries"]:
        lines.append(f"{'ok  ' if e['ok'] else 'FAIL'} {e['name']} ({len(e['checks'])} checks)")
        for c in e["checks"]:
            if not c["ok"]:
                detail = c.get("error") or f"expected {c.get('expected')!r}, got {c.get('actual')!r}"
                lines.append(f"       {c['kind']}: {detail}")
    lines.append(f"{res['checks']} checks, {len(res['failed'])} failing entries")
    return (FAIL if res["failed"] else PASS), res, "\n".join(lines)


# -- argument parsing -------------------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--depth", type=int, help="term depth bound d (default: the spec's, else 1)")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--witness-cap", type=int, default=DEFAULT_WITNESS_CAP)


def _add_budget(p: argparse.ArgumentParser) -> None:
    p.add_argument("--semantics", choices=SEMANTICS, default=SLDNF)
    p.add_argument("--budget-depth", type=int, default=Budget().max_depth)
    p.add_argument("--budget-nodes", type=int, default=Budget().max_nodes)
    p.add_argument("--budget-rank", type=int, default=Budget().max_rank)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lpspec", description="Verify normal logic programs against approximate specifications."
    )
    parser.add_argument("--version", action="version", version=f"lpspec {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="static correctness check")
    p.add_argument("semantics_kind", choices=("ks", "wfs", "stable"))
    p.add_argument("program")
    p.add_argument("spec")
    p.add_argument("--stability-check", action="store_true", help="also check the stable-model proposition")
    _add_common(p)

    p = sub.add_parser("oracle", help="print a reference model")
    p.add_argument("which", choices=("lm", "fitting", "wfs", "stable"))
    p.add_argument("program")
    p.add_argument("--spec", help="take the universe (symbols, sorts, depth) from a spec file")
    p.add_argument("--symbols", help="extra function symbols, e.g. 'c/0, s/1'")
    p.add_argument("--stable-cap", type=int, default=DEFAULT_STABLE_CAP)
    _add_common(p)

    p = sub.add_parser("run", help="build a main SLDNF/SLS tree, or check semi-completeness")
    p.add_argument("program")
    p.add_argument("query", nargs="?")
    p.add_argument("--spec", help="with no query: check semi-completeness against this spec")
    p.add_argument("--symbols", help="extra function symbols for the SLS oracle universe")
    p.add_argument("--allow-nonproper", action="store_true")
    _add_budget(p)
    _add_common(p)

    p = sub.add_parser("corpus", help="run a corpus manifest")
    p.add_argument("manifest", nargs="?", help="manifest path (default: the shipped corpus)")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--format", choices=("text", "json"), default="text")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    fmt = args.format
    try:
        if args.command == "corpus":
            config = {"manifest": os.path.basename(args.manifest or default_manifest())}
            status, result, text = do_corpus(args.manifest, args.jobs)
        else:
            if getattr(args, "witness_cap", 1) < 1:
                raise UsageError("--witness-cap must be positive")
            cfg = RunConfig(
                program=args.program,
                spec=getattr(args, "spec", None),
                depth=args.depth,
                budget_depth=getattr(args, "budget_depth", Budget().max_depth),
                budget_nodes=getattr(args, "budget_nodes", Budget().max_nodes),
                budget_rank=getattr(args, "budget_rank", Budget().max_rank),
                semantics=getattr(args, "semantics", SLDNF),
                stability_check=getattr(args, "stability_check", False),
                witness_cap=args.witness_cap,
                format=fmt,
                allow_nonproper=getattr(args, "allow_nonproper", False),
            )
            config = cfg.echo()
            if args.command == "check":
                config["kind"] = args.semantics_kind
                status, result, text = do_check(args.semantics_kind, cfg)
            elif args.command == "oracle":
                config["which"] = args.which
                program = load_program(cfg.program)
                spec = load_spec(cfg.spec) if cfg.spec else None
                status, result, text = do_oracle(
                    args.which, program, spec, cfg.depth, parse_symbols(args.symbols), args.stable_cap
                )
            else:
                config["query"] = args.query
                status, result, text = do_run(cfg, args.query, parse_symbols(args.symbols))
        report = envelope(args.command, config, status, result)
    except UsageError as e:
        print(f"lpspec: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except INPUT_ERRORS as e:
        print(f"lpspec: error: {_describe_error(e)}", file=sys.stderr)
        return EXIT_USAGE
    print(dump_json(report) if fmt == "json" else text)
    return _EXIT[status]


def _describe_error(e: Exception) -> str:
    if isinstance(e, ParseError):
        return f"parse error at line {e.line}, column {e.column}: {e.message}"
    if isinstance(e, jsonschema.ValidationError):
        return f"invalid manifest: {e.message}"
    return str(e)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
