"""Command-line front end.

Exit codes: 0 success (or "yes" for decide), 1 "no", 2 unknown because the
search budget ran out, 64 usage error, 65 malformed input document.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from .characterizations import threshold_set
from .decision import (
    DecisionQuery,
    Problem,
    decide,
    gen_comparison_example,
    gen_lazy_poa,
    gen_rc_vs_rv,
    gen_truth_poa,
    poa_additive,
)
from .documents import (
    DocumentError,
    ElectionDocument,
    MsiDocument,
    parse_bcbs,
    parse_document,
    parse_msi,
    serialize_document,
    serialize_msi,
)
from .election import ABSTAIN, TieRule, TrivialPolicy, lottery, tally
from .game import DEFAULT_BUDGET, BudgetExceeded, GameSpec, Setting, enumerate_pne, outcome_of
from .hardness import bcbs_to_msi, msi_to_election

EXIT_YES, EXIT_NO, EXIT_UNKNOWN, EXIT_USAGE, EXIT_DATA = 0, 1, 2, 64, 65

GENERATORS = ("comparison-example", "lazy-poa", "truth-poa", "rc-vs-rv")
REDUCTIONS = ("msi-to-election", "bcbs-to-msi")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _frac(x: Fraction) -> str:
    return str(Fraction(x))


def _ballots(doc: ElectionDocument, b: Sequence[Optional[int]]) -> List[str]:
    return ["-" if x is ABSTAIN else doc.candidates[x] for x in b]


def _names(doc: ElectionDocument, cands) -> List[str]:
    return [doc.candidates[c] for c in cands]


def _game(doc: ElectionDocument, args) -> GameSpec:
    return GameSpec(doc.election(), Setting(args.setting), TieRule(args.tie),
                    doc.principled_profile(), TrivialPolicy(getattr(args, "trivial_policy", "full-tie")))


def _load(path: str) -> ElectionDocument:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return parse_document(text)
    except DocumentError as exc:
        raise DocumentError(f"{path}: {exc}") from None


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _index(doc: ElectionDocument, name: str) -> int:
    if name not in doc.candidates:
        raise UsageError(f"unknown candidate {name!r}")
    return doc.candidates.index(name)


def _board(doc: ElectionDocument, board) -> Dict[str, Any]:
    return {
        "scores": dict(zip(doc.candidates, board.scores)),
        "M": board.M,
        "W": _names(doc, board.W),
        "H": _names(doc, board.H),
        "Hprime": _names(doc, board.Hprime),
    }


def _lottery(doc: ElectionDocument, p) -> Optional[Dict[str, str]]:
    if p is None:
        return None
    return {doc.candidates[c]: _frac(p[c]) for c in range(len(p)) if p[c]}


def _query(args, **extra) -> Dict[str, Any]:
    q = {"command": args.command, "file": getattr(args, "file", None)}
    for key in ("setting", "tie", "trivial_policy"):
        if hasattr(args, key):
            q[key.replace("_", "-")] = getattr(args, key)
    q.update(extra)
    return q


def cmd_analyze(args) -> Dict[str, Any]:
    doc = _load(args.file)
    g = _game(doc, args)
    e, p = g.election, g.principled
    truthful = tally(e.m, e.tops + p.tops)
    result: Dict[str, Any] = {
        "truthful": {
            "ballots": _ballots(doc, e.tops),
            **_board(doc, truthful),
            "lottery": _lottery(doc, lottery(e, e.tops, g.rule, p, g.trivial_policy)),
        }
    }
    status = {"limit": args.budget, "status": "ok"}
    try:
        pne = enumerate_pne(g, args.budget)
    except BudgetExceeded as exc:
        status.update(status="exceeded", required=exc.required)
        result["pne"] = None
        return {"query": _query(args), "result": result, "method": "oracle", "budget": status}
    rows = []
    for b in pne:
        out = outcome_of(g, b)
        row = {"ballots": _ballots(doc, b),
               "W": _names(doc, out.winning_set) if out else None,
               "lottery": _lottery(doc, out.lottery) if out else None}
        if g.setting is Setting.TRUTH and g.rule is TieRule.LEX and p.s == 0 and b != e.tops:
            row["threshold"] = _names(doc, sorted(threshold_set(e, b)))
        rows.append(row)
    result["pne"] = rows
    return {"query": _query(args), "result": result, "method": "oracle", "budget": status}


def cmd_decide(args) -> Dict[str, Any]:
    doc = _load(args.file)
    problem = Problem(args.problem)
    if problem is not Problem.EXIST and args.target is None:
        raise UsageError(f"{problem.value} needs --target")
    if problem is Problem.EXIST and args.target is not None:
        raise UsageError("exist-ne takes no --target")
    target = None if args.target is None else _index(doc, args.target)
    q = DecisionQuery(problem, Setting(args.setting), TieRule(args.tie), target)
    status = {"limit": args.budget, "status": "ok"}
    query = _query(args, problem=problem.value, target=args.target)
    try:
        res = decide(q, doc.election(), args.budget, doc.principled_profile())
    except BudgetExceeded as exc:
        status.update(status="exceeded", required=exc.required)
        return {"query": query, "result": {"answer": "unknown", "witness": None},
                "method": "search", "budget": status}
    return {
        "query": query,
        "result": {"answer": "yes" if res.answer else "no",
                   "witness": _ballots(doc, res.witness) if res.witness else None,
                   "complete": res.complete},
        "method": res.method,
        "budget": status,
    }


def cmd_poa(args) -> Dict[str, Any]:
    doc = _load(args.file)
    g = _game(doc, args)
    status = {"limit": args.budget, "status": "ok"}
    try:
        rep = poa_additive(g, args.budget)
    except BudgetExceeded as exc:
        status.update(status="exceeded", required=exc.required)
        return {"query": _query(args), "result": {"defined": None}, "method": "search", "budget": status}
    plain = g.principled.s == 0 and g.trivial_policy is TrivialPolicy.FULL_TIE
    return {
        "query": _query(args),
        "result": {
            "defined": rep.defined,
            "gap": rep.gap,
            "truthful_winner_score": rep.truthful_winner_score,
            "worst_pne_winner_truthful_score": rep.worst_pne_winner_truthful_score,
            "witness": _ballots(doc, rep.witness) if rep.witness else None,
            "pne_count": rep.pne_count,
        },
        "method": ("poly" if g.setting is Setting.LAZY and g.rule is TieRule.LEX else "search") if plain else "oracle",
        "budget": status,
    }


def cmd_lottery(args) -> Dict[str, Any]:
    doc = _load(args.file)
    g = _game(doc, args)
    e = g.election
    raw = [x.strip() for x in args.ballots.split(",")]
    if len(raw) != e.n:
        raise UsageError(f"--ballots lists {len(raw)} ballots for {e.n} voters")
    b = tuple(ABSTAIN if x in ("-", "") else _index(doc, x) for x in raw)
    board = tally(e.m, b + g.principled.tops)
    p = lottery(e, b, g.rule, g.principled, g.trivial_policy)
    return {
        "query": _query(args, ballots=_ballots(doc, b)),
        "result": {**_board(doc, board), "lottery": _lottery(doc, p), "void": p is None},
        "method": "direct",
        "budget": {"limit": None, "status": "ok"},
    }


def _write(text: str, args) -> None:
    if args.output:
        Path(args.output).write_text(text)
    else:
        args.stream.write(text)


def cmd_gen(args) -> Dict[str, Any]:
    name = args.name
    needs_n = name in ("lazy-poa", "truth-poa")
    if needs_n and args.n is None:
        raise UsageError(f"gen {name} needs a size argument")
    if not needs_n and args.n is not None:
        raise UsageError(f"gen {name} takes no size argument")
    try:
        if name == "comparison-example":
            doc = ElectionDocument.from_election(gen_comparison_example())
        elif name == "lazy-poa":
            doc = ElectionDocument.from_election(gen_lazy_poa(args.n))
        elif name == "truth-poa":
            doc = ElectionDocument.from_election(gen_truth_poa(args.n))
        else:
            e, p = gen_rc_vs_rv()
            doc = ElectionDocument.from_election(e, principled=p)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _write(serialize_document(doc), args)
    return {"query": {"command": "gen", "name": name, "n": args.n},
            "result": {"output": args.output or "-"}, "method": "direct",
            "budget": {"limit": None, "status": "ok"}}


def cmd_reduce(args) -> Dict[str, Any]:
    text = _read(args.file)
    try:
        if args.kind == "msi-to-election":
            inst = parse_msi(text).instance()
            try:
                r = msi_to_election(inst)
            except ValueError as exc:
                raise UsageError(str(exc)) from None
            doc = ElectionDocument.from_election(r.election, r.candidate_names())
            _write(serialize_document(doc), args)
            info = {"target": "w2", "s": r.s, "sets_after_padding": r.msi.m, "voters": r.election.n}
        else:
            inst = bcbs_to_msi(parse_bcbs(text).instance())
            _write(serialize_msi(MsiDocument.from_instance(inst)), args)
            info = {"elements": inst.n, "sets": inst.m, "k": inst.k, "q": inst.q}
    except DocumentError as exc:
        raise DocumentError(f"{args.file}: {exc}") from None
    return {"query": {"command": "reduce", "kind": args.kind, "file": args.file},
            "result": {"output": args.output or "-", **info}, "method": "direct",
            "budget": {"limit": None, "status": "ok"}}


def _add_game_flags(p: argparse.ArgumentParser, policy: bool = False) -> None:
    p.add_argument("--setting", choices=[s.value for s in Setting], default="lazy")
    p.add_argument("--tie", choices=[r.value for r in TieRule], default="lex")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    if policy:
        p.add_argument("--trivial-policy", choices=[t.value for t in TrivialPolicy], default="full-tie")
    p.add_argument("--format", choices=["table", "machine"], default="table")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="plurality-ne", description="Equilibria of Plurality voting games.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("analyze", help="scores, lotteries and every PNE of an election")
    p.add_argument("file")
    _add_game_flags(p, policy=True)

    p = sub.add_parser("decide", help="ExistNE / TieNE / SingleNE")
    p.add_argument("file")
    p.add_argument("problem", choices=[x.value for x in Problem])
    p.add_argument("--target")
    _add_game_flags(p)

    p = sub.add_parser("poa", help="additive price of anarchy")
    p.add_argument("file")
    _add_game_flags(p, policy=True)

    p = sub.add_parser("lottery", help="winning lottery of a given ballot vector")
    p.add_argument("file")
    p.add_argument("--ballots", required=True, help="comma-separated names, '-' for abstain")
    _add_game_flags(p, policy=True)

    p = sub.add_parser("gen", help="write a named example election")
    p.add_argument("name", choices=GENERATORS)
    p.add_argument("n", nargs="?", type=int)
    p.add_argument("-o", "--output")
    p.add_argument("--format", choices=["table", "machine"], default="table")

    p = sub.add_parser("reduce", help="apply a hardness reduction to an instance file")
    p.add_argument("kind", choices=REDUCTIONS)
    p.add_argument("file")
    p.add_argument("-o", "--output")
    p.add_argument("--format", choices=["table", "machine"], default="table")
    return parser


COMMANDS = {
    "analyze": cmd_analyze,
    "decide": cmd_decide,
    "poa": cmd_poa,
    "lottery": cmd_lottery,
    "gen": cmd_gen,
    "reduce": cmd_reduce,
}


def render_table(report: Dict[str, Any]) -> str:
    q, r = report["query"], report["result"]
    lines = []
    head = " ".join(f"{k}={','.join(v) if isinstance(v, list) else v}"
                    for k, v in q.items() if v is not None and k != "command")
    lines.append(f"{q['command']}: {head}")
    if q["command"] == "analyze":
        t = r["truthful"]
        lines.append("truthful ballots: (" + ",".join(t["ballots"]) + ")")
        lines.append("scores: " + " ".join(f"{c}={s}" for c, s in t["scores"].items()))
        lines.append(f"W={{{','.join(t['W'])}}} H={{{','.join(t['H'])}}} H'={{{','.join(t['Hprime'])}}}")
        lines.append("truthful lottery: " + _fmt_lottery(t["lottery"]))
        if r["pne"] is None:
            lines.append("PNE: unknown (budget exceeded)")
        else:
            lines.append(f"PNE ({len(r['pne'])}):")
            for row in r["pne"]:
                extra = f"  threshold={{{','.join(row['threshold'])}}}" if "threshold" in row else ""
                W = "void" if row["W"] is None else "{" + ",".join(row["W"]) + "}"
                lines.append(f"  ({','.join(row['ballots'])})  W={W}  lottery={_fmt_lottery(row['lottery'])}{extra}")
    elif q["command"] == "decide":
        lines.append(f"answer: {r['answer']}")
        if r.get("witness"):
            lines.append("witness: (" + ",".join(r["witness"]) + ")")
    elif q["command"] == "poa":
        if r["defined"] is None:
            lines.append("gap: unknown (budget exceeded)")
        elif not r["defined"]:
            lines.append("gap: undefined (no PNE)")
        else:
            lines.append(f"gap: {r['gap']}")
            lines.append(f"truthful winner score: {r['truthful_winner_score']}")
            lines.append(f"worst PNE winner truthful score: {r['worst_pne_winner_truthful_score']}")
            lines.append("witness: (" + ",".join(r["witness"]) + ")")
    elif q["command"] == "lottery":
        lines.append("scores: " + " ".join(f"{c}={s}" for c, s in r["scores"].items()))
        lines.append(f"W={{{','.join(r['W'])}}}")
        lines.append("lottery: " + _fmt_lottery(r["lottery"]))
    else:
        lines.append(" ".join(f"{k}={v}" for k, v in r.items()))
    lines.append(f"method: {report['method']}")
    b = report["budget"]
    if b.get("status") == "exceeded":
        lines.append(f"budget: exceeded (needs {b['required']}, limit {b['limit']})")
    lines.append(f"time: {report['timing']['seconds']:.3f}s")
    return "\n".join(lines) + "\n"


def _fmt_lottery(lot: Optional[Dict[str, str]]) -> str:
    if lot is None:
        return "void (every voter gets -inf)"
    return " ".join(f"{c}:{p}" for c, p in lot.items())


def exit_code(report: Dict[str, Any]) -> int:
    if report["budget"].get("status") == "exceeded":
        return EXIT_UNKNOWN
    if report["query"]["command"] == "decide":
        return EXIT_YES if report["result"]["answer"] == "yes" else EXIT_NO
    return 0


def run(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    args.stream = out
    start = time.perf_counter()
    try:
        report = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"plurality-ne: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DocumentError as exc:
        print(f"plurality-ne: invalid document: {exc}", file=sys.stderr)
        return EXIT_DATA
    report["timing"] = {"seconds": round(time.perf_counter() - start, 6)}
    if args.command in ("gen", "reduce") and not getattr(args, "output", None):
        return 0
    if getattr(args, "format", "table") == "machine":
        out.write(json.dumps(report, sort_keys=True, indent=2) + "\n")
    else:
        out.write(render_table(report))
    return exit_code(report)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
