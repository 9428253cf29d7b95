"""Command-line interface: ``rlfg check|trace|batch|solve``.

Exit codes: 0 grammatical (or success), 1 ungrammatical, 2 no parse,
3 undecided, 4 usage, file or syntax error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from importlib.resources import files
from pathlib import Path
from typing import Optional, Sequence

from . import classical
from .classical import FDescriptionSyntaxError, parse_fdescription
from .fterm import serialize_fterm
from .grammar import (
    LFG, Grammar, GrammarError, UnknownWord, instantiate_lfg, instantiate_rlfg,
    load_grammar, parse_sentence,
)
from .reduction import SearchConfig, Verdict, reduce_search, trace_witness

GRAMMATICAL = "Grammatical"
UNGRAMMATICAL = "Ungrammatical"
NO_PARSE = "NoParse"
UNDECIDED = "Undecided"

EXIT_CODES = {GRAMMATICAL: 0, UNGRAMMATICAL: 1, NO_PARSE: 2, UNDECIDED: 3}
EXIT_USAGE = 4


class UsageError(Exception):
    pass


@dataclass
class CheckReport:
    sentence: list
    parses: int
    verdict: str
    per_parse: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)
    error: Optional[str] = None

    def to_json(self) -> dict:
        out = {"sentence": self.sentence, "parses": self.parses, "verdict": self.verdict,
               "perParse": self.per_parse, "timings": self.timings}
        if self.error:
            out["error"] = self.error
        return out

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.verdict]


def shipped_path(name: str) -> Path:
    return Path(str(files("rlfg") / "grammars" / name))


def resolve(path: str) -> Path:
    """``path`` itself if it exists, else the shipped file of that name."""
    p = Path(path)
    if p.exists():
        return p
    shipped = shipped_path(path)
    if shipped.exists():
        return shipped
    raise UsageError(f"no such file: {path}")


def read_grammar(path: str) -> Grammar:
    p = resolve(path)
    try:
        return load_grammar(p.read_text(encoding="utf-8"))
    except GrammarError as exc:
        raise UsageError(f"{p}: {exc}") from None


def check_sentence(g: Grammar, sentence: str, cfg: SearchConfig = SearchConfig()) -> CheckReport:
    tokens = sentence.split()
    t0 = time.perf_counter()
    try:
        trees = parse_sentence(g, tokens) if tokens else []
    except UnknownWord as exc:
        return CheckReport(tokens, 0, NO_PARSE, timings=_ms(t0=t0), error=str(exc))
    t1 = time.perf_counter()
    per_parse = []
    verdicts = []
    for tree in trees:
        if g.mode == LFG:
            desc = instantiate_lfg(tree)
            solutions = classical.solve(desc)
            verdict = GRAMMATICAL if solutions else UNGRAMMATICAL
            per_parse.append({"tree": str(tree), "fdescription": str(desc), "verdict": verdict,
                              "solutions": [s.to_dict() for s in solutions]})
        else:
            term = instantiate_rlfg(tree)
            result = reduce_search(term, cfg)
            verdict = result.verdict.value
            per_parse.append({"tree": str(tree), "fterm": serialize_fterm(term),
                              **result.to_json()})
        verdicts.append(verdict)
    if not trees:
        overall = NO_PARSE
    elif GRAMMATICAL in verdicts:
        overall = GRAMMATICAL
    elif UNDECIDED in verdicts:
        overall = UNDECIDED
    else:
        overall = UNGRAMMATICAL
    return CheckReport(tokens, len(trees), overall, per_parse, _ms(t0, t1))


def _ms(t0: float, t1: Optional[float] = None) -> dict:
    t2 = time.perf_counter()
    t1 = t2 if t1 is None else t1
    return {"parseMs": round((t1 - t0) * 1000, 3), "checkMs": round((t2 - t1) * 1000, 3),
            "totalMs": round((t2 - t0) * 1000, 3)}


def _human(report: CheckReport) -> str:
    n = report.parses
    lines = [f"{' '.join(report.sentence)}: {report.verdict} ({n} parse{'' if n == 1 else 's'})"]
    if report.error:
        lines.append(f"  {report.error}")
    for k, p in enumerate(report.per_parse, 1):
        lines.append(f"  parse {k}: {p['tree']}")
        if "fterm" in p:
            lines.append(f"    f-term: {p['fterm']}")
            lines.append(f"    {p['verdict']} after {p['statesExplored']} states")
        else:
            lines.append(f"    f-description: {p['fdescription']}")
            for s in p["solutions"]:
                lines.append(f"    solution: {json.dumps(s, ensure_ascii=False, sort_keys=True)}")
            lines.append(f"    {p['verdict']}")
    return "\n".join(lines)


def _config(args) -> SearchConfig:
    try:
        return SearchConfig(max_states=args.max_states, max_depth=args.max_depth)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_check(args, out) -> int:
    g = read_grammar(args.grammar)
    report = check_sentence(g, args.sentence, _config(args))
    if args.json:
        print(json.dumps(report.to_json(), ensure_ascii=False), file=out)
    else:
        print(_human(report), file=out)
    return report.exit_code


def cmd_trace(args, out) -> int:
    g = read_grammar(args.grammar)
    if g.mode == LFG:
        raise UsageError("trace needs an rlfg grammar")
    cfg = _config(args)
    tokens = args.sentence.split()
    try:
        trees = parse_sentence(g, tokens) if tokens else []
    except UnknownWord as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CODES[NO_PARSE]
    if not trees:
        print("error: no parse", file=sys.stderr)
        return EXIT_CODES[NO_PARSE]
    undecided = False
    for tree in trees:
        result = reduce_search(instantiate_rlfg(tree), cfg)
        if result.grammatical:
            print(trace_witness(result), file=out)
            return 0
        undecided |= result.verdict is Verdict.UNDECIDED
    verdict = UNDECIDED if undecided else UNGRAMMATICAL
    print(f"error: {args.sentence!r} is {verdict}", file=sys.stderr)
    return EXIT_CODES[verdict]


def read_corpus(path: Path) -> list[tuple[int, str, Optional[bool]]]:
    """Lines of ``sentence`` or ``sentence<TAB>+`` / ``sentence<TAB>-``."""
    rows = []
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        sentence, _, mark = line.partition("\t")
        mark = mark.strip()
        if mark not in ("", "+", "-"):
            raise UsageError(f"{path}:{lineno}: expectation must be '+' or '-'")
        rows.append((lineno, sentence.strip(), None if not mark else mark == "+"))
    return rows


def cmd_batch(args, out) -> int:
    g = read_grammar(args.grammar)
    cfg = _config(args)
    rows = read_corpus(resolve(args.corpus))
    reports = []
    mismatches = 0
    for lineno, sentence, expected in rows:
        report = check_sentence(g, sentence, cfg)
        entry = report.to_json()
        entry["line"] = lineno
        if expected is not None:
            entry["expected"] = GRAMMATICAL if expected else UNGRAMMATICAL
            ok = (report.verdict == GRAMMATICAL) == expected and report.verdict != UNDECIDED
            entry["ok"] = ok
            if not ok:
                mismatches += 1
                print(f"line {lineno}: expected {entry['expected']}, got {report.verdict}: {sentence}",
                      file=sys.stderr)
        reports.append(entry)
    print(json.dumps(reports, ensure_ascii=False, indent=None if args.compact else 2), file=out)
    return 1 if mismatches else 0


def cmd_solve(args, out) -> int:
    p = Path(args.fdescription)
    text = sys.stdin.read() if args.fdescription == "-" else resolve(args.fdescription).read_text(encoding="utf-8")
    try:
        desc = parse_fdescription(text)
    except FDescriptionSyntaxError as exc:
        raise UsageError(f"{p}: {exc}") from None
    if args.relaxed:
        payload = [c.to_json() for c in classical.solve_relaxed(desc)]
    else:
        payload = [s.to_dict() for s in classical.solve(desc)]
    print(json.dumps(payload, ensure_ascii=False, sort_keys=True), file=out)
    return 0


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="rlfg", description="Check sentences against R-LFG and LFG grammars.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    def limits(p):
        p.add_argument("--max-states", type=int, default=SearchConfig.max_states,
                       help="state limit for the reduction search")
        p.add_argument("--max-depth", type=int, default=SearchConfig.max_depth,
                       help="depth limit for the reduction search")

    p = sub.add_parser("check", help="judge one sentence")
    p.add_argument("grammar", help="grammar file, or the name of a shipped grammar")
    p.add_argument("sentence")
    p.add_argument("--json", action="store_true", help="print a JSON report")
    limits(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("trace", help="print a shortest derivation to t")
    p.add_argument("grammar")
    p.add_argument("sentence")
    limits(p)
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("batch", help="check a corpus file, one sentence per line")
    p.add_argument("grammar")
    p.add_argument("corpus")
    p.add_argument("--json", action="store_true", help="accepted for symmetry; output is always JSON")
    p.add_argument("--compact", action="store_true", help="single-line JSON")
    limits(p)
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("solve", help="solve an f-description file ('-' for stdin)")
    p.add_argument("fdescription")
    p.add_argument("--relaxed", action="store_true", help="drop functionality across annotation sites")
    p.set_defaults(func=cmd_solve)
    return parser


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
