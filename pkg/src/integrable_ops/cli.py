"""Command-line interface.

Exit codes: 0 success, 1 an analysis verdict (not certifiable, identity
fails, terms differ, witness not confirmed), 2 usage or parse errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path
from typing import Sequence

from .certify import JOIN_MAX, JOIN_SUM, NotCertifiable, classify, infer_bound
from .dsl import ParseError, parse
from .evaluation import (
    MissingVariable, SchemaNotMonotone, SignatureMismatch, StabilityWarning, evaluate,
    free_eq,
)
from .exact import Interval, IrrationalLiteral, format_rational, rational
from .models import CATALOG, MUTATIONS, check_identity, get_identity, parse_model
from .synthesis import (
    AllOf, AnyOf, DominatorTooSmall, NonpositiveThreshold, SimpleFunctionSpec, ThresholdSet,
    indicator_ge, indicator_gt, simple_term,
)
from .terms import Signature, SignatureViolation, TermError, arity
from .witness import (
    DIVERGES, Mode, NotFound, SearchConfig, WitnessConfig, WitnessFormatError, build_witness,
    format_witness, parse_witness, verify_witness,
)


class UsageError(Exception):
    pass


class Output:
    """Collects result records and renders them as text or JSON lines."""

    def __init__(self, fmt: str, stream):
        self.fmt = fmt
        self.stream = stream

    def emit(self, text: str, **record) -> None:
        if self.fmt == "json-lines":
            record.setdefault("text", text)
            self.stream.write(json.dumps(record, sort_keys=True) + "\n")
        else:
            self.stream.write(text + "\n")


# -- helpers -----------------------------------------------------------------------------


def _term(args, text: str | None = None):
    sig = None if args.sig is None else Signature.parse(args.sig)
    if text is None:
        text = args.expr
        if text is None:
            try:
                text = Path(args.term).read_text()
            except OSError as exc:
                raise UsageError(f"cannot read term file: {exc}") from None
    return parse(text, sig)


def _parse_assignments(text: str) -> dict:
    """``x0=1,x1=-2/3`` -> {0: 1, 1: -2/3}."""
    point = {}
    for item in filter(None, (s.strip() for s in text.split(","))):
        name, sep, value = item.partition("=")
        name = name.strip()
        if not sep or not name.startswith("x") or not name[1:].isdigit():
            raise UsageError(f"bad assignment {item!r}; expected x<i>=<rational>")
        point[int(name[1:])] = rational(value.strip())
    return point


def _parse_box(items: Sequence[str]) -> dict:
    """Repeated ``i=lo,hi`` entries."""
    box = {}
    for item in items:
        var, sep, rest = item.partition("=")
        bounds = rest.split(",")
        if not sep or len(bounds) != 2:
            raise UsageError(f"bad box {item!r}; expected <i>=<lo>,<hi>")
        index = int(var.strip().lstrip("x"))
        lo, hi = (rational(b.strip()) for b in bounds)
        if lo > hi:
            raise UsageError(f"empty box side {item!r}")
        box[index] = Interval(lo, hi)
    return box


def _seed(args) -> int:
    if args.seed is None:
        if args.strict:
            raise UsageError("--strict requires an explicit --seed for randomized commands")
        return 0
    return args.seed


# -- subcommands -------------------------------------------------------------------------


def cmd_eval(args, out: Output) -> int:
    t = _term(args)
    point = _parse_assignments(args.at)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", StabilityWarning)
        value = evaluate(t, point)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    out.emit(format_rational(value), value=format_rational(value))
    return 0


def cmd_certify(args, out: Output) -> int:
    t = _term(args)
    try:
        cert = infer_bound(t, args.join)
    except NotCertifiable as exc:
        out.emit(f"not certifiable: {exc}", certifiable=False)
        return 1
    out.emit(str(cert), certifiable=True, k=format_rational(cert.k),
             lam={str(i): format_rational(c) for i, c in cert.lam.items()})
    return 0


def cmd_classify(args, out: Output) -> int:
    t = _term(args)
    boxes = [_parse_box(args.box)] if args.box else None
    c = classify(t, boxes)
    out.emit(c.flags_line(), integrability=c.preserves_integrability,
             finite=c.preserves_finite_measure_integrability,
             infty=c.preserves_infty_integrability)
    if c.certificate is not None:
        out.emit(f"certificate {c.certificate}", certificate=str(c.certificate))
    elif c.box_bound_witness is not None:
        box, enc = c.box_bound_witness
        where = " ".join(f"x{i} in [{format_rational(iv.lo)}, {format_rational(iv.hi)}]"
                         for i, iv in sorted(box.items()))
        text = f"enclosure [{format_rational(enc.lo)}, {format_rational(enc.hi)}] on {where}"
        out.emit(text, enclosure=[format_rational(enc.lo), format_rational(enc.hi)])
    if c.certificate is None:
        out.emit("no linear bound: run `witness` to search for a refutation",
                 note="p-integrability flags are unproven, not refuted")
    return 0


def _witness_config(args, atoms: int | None = None) -> WitnessConfig:
    search = SearchConfig(directions=args.directions, base=rational(args.base),
                          budget=args.budget, seed=_seed(args))
    return WitnessConfig(p=rational(args.p), mode=Mode(args.mode),
                         atoms=args.atoms if atoms is None else atoms, search=search)


def cmd_witness(args, out: Output) -> int:
    t = _term(args)
    cfg = _witness_config(args)
    try:
        build = build_witness(t, cfg)
    except NotFound as exc:
        print(f"inconclusive: {exc}; the operation may satisfy a linear bound", file=sys.stderr)
        return 1
    text = format_witness(build, cfg)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        out.emit(f"wrote {len(build.space.atoms)} atoms to {args.out}", atoms=len(build.space.atoms))
    else:
        for line in text.splitlines():
            out.emit(line)
    return 0


def cmd_verify(args, out: Output) -> int:
    t = _term(args)
    with open(args.witness, encoding="utf-8") as fh:
        text = fh.read()
    cfg, space, tables = parse_witness(text)
    threshold = None if args.threshold is None else rational(args.threshold)
    report = verify_witness(space, tables, t, cfg, threshold, arity=max(len(tables), arity(t)))
    for line in report.lines():
        out.emit(line)
    return 0 if report.verdict == DIVERGES else 1


def _region_from_json(obj):
    if isinstance(obj, str):
        parts = obj.split()
        if len(parts) != 3 or not parts[0].startswith("x"):
            raise UsageError(f"bad threshold {obj!r}; expected 'x<i> > <lambda>'")
        return ThresholdSet(int(parts[0][1:]), parts[1], rational(parts[2]))
    if isinstance(obj, dict) and len(obj) == 1:
        (kind, items), = obj.items()
        cls = {"all": AllOf, "any": AnyOf}.get(kind)
        if cls is not None:
            return cls(tuple(_region_from_json(i) for i in items))
    raise UsageError(f"bad region {obj!r}")


def load_simple_spec(path: str) -> SimpleFunctionSpec:
    """JSON: ``{"dominator": TERM, "entries": [{"coef": "3/2", "region": REGION}, ...]}``.

    A region is ``"x0 > 1"``, ``{"all": [...]}`` or ``{"any": [...]}``.
    """
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    try:
        g = parse(data["dominator"], Signature.TRUNCATED)
        entries = tuple((rational(e["coef"]), _region_from_json(e["region"]))
                        for e in data["entries"])
    except (KeyError, TypeError) as exc:
        raise UsageError(f"bad spec file: missing {exc}") from None
    return SimpleFunctionSpec(entries, g)


def cmd_synth(args, out: Output) -> int:
    if args.kind == "ind-gt":
        t = indicator_gt(args.var, rational(args.lam), args.sig or "t")
    elif args.kind == "ind-ge":
        t = indicator_ge(args.var, rational(args.lam))
    else:
        if not args.spec:
            raise UsageError("synth simple needs --spec FILE")
        t = simple_term(load_simple_spec(args.spec))
    text = str(t)
    out.emit(text, term=text)
    return 0


def cmd_axioms(args, out: Output) -> int:
    model = parse_model(args.model)
    seed = _seed(args)
    if args.id:
        identities = [get_identity(i) for i in args.id]
    else:
        identities = list(CATALOG)
    if args.mutations:
        identities = [MUTATIONS[i.ident] for i in identities]
    failed = False
    for ident in identities:
        r = check_identity(model, ident, args.samples, seed)
        failed |= not r.holds
        out.emit(r.line(), id=r.ident, holds=r.holds, samples=r.samples)
    return 1 if failed else 0


def cmd_free_eq(args, out: Output) -> int:
    t1, t2 = _term(args, args.lhs), _term(args, args.rhs)
    r = free_eq(t1, t2, args.samples, _seed(args), args.sig)
    if r.agree:
        out.emit(f"agree samples={r.samples}", agree=True, samples=r.samples)
        return 0
    at = ",".join(f"x{i}={format_rational(v)}" for i, v in sorted(r.point.items()))
    out.emit(f"differ at {at}: {format_rational(r.values[0])} vs {format_rational(r.values[1])}",
             agree=False, samples=r.samples, at=at)
    return 1


# -- parser ------------------------------------------------------------------------------

HELP = {
    "eval": "Exact value of a term at a rational point (pointwise semantics of the operations).",
    "certify": ("Linear-bound certificate |t(v)| <= k + sum lambda_j |v_j|: with k = 0 the "
                "operation preserves p-integrability over every measure space, with k >= 0 "
                "over every finite measure space."),
    "classify": ("Classify by preserved integrability: linear bound for p-integrability, "
                 "boundedness on bounded boxes for infinity-integrability."),
    "witness": ("Build a discrete measure space on which an operation without a linear bound "
                "sends p-integrable inputs to a non-integrable output."),
    "verify": "Recompute the exact partial sums of a witness file and report divergence.",
    "synth": ("Generate indicator and simple-function terms: every measurable function "
              "dominated by a generated term is itself generated."),
    "axioms": ("Check the truncated-supremum, truncation and weak-unit identities on concrete "
               "models; the variety is generated by the real line."),
    "free-eq": ("Randomized equality test in the free algebra, which is the algebra of "
                "functions generated by the projections."),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json-lines"), default="text")
    common.add_argument("--seed", type=int, default=None, help="seed for randomized steps")
    common.add_argument("--strict", action="store_true",
                        help="require an explicit --seed for randomized commands")
    common.add_argument("--sig", choices=("t", "u", "ext"), default=None,
                        help="signature the input terms must belong to")

    parser = argparse.ArgumentParser(
        prog="integrable-ops",
        description="Exact analysis of operations that preserve p-integrability.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn):
        p = sub.add_parser(name, parents=[common], help=HELP[name], description=HELP[name])
        p.set_defaults(func=fn)
        return p

    def term_source(p):
        g = p.add_mutually_exclusive_group(required=True)
        g.add_argument("--expr", help="term in the text syntax")
        g.add_argument("--term", metavar="FILE", help="file holding the term")

    p = add("eval", cmd_eval)
    term_source(p)
    p.add_argument("--at", default="", help="x0=1,x1=-2/3")

    p = add("certify", cmd_certify)
    term_source(p)
    p.add_argument("--join", choices=(JOIN_MAX, JOIN_SUM), default=JOIN_MAX)

    p = add("classify", cmd_classify)
    term_source(p)
    p.add_argument("--box", action="append", default=[], help="i=lo,hi (repeatable)")

    def witness_flags(p):
        p.add_argument("--p", default="1", help="exponent p >= 1")
        p.add_argument("--mode", choices=("A", "F"), default="A",
                       help="A: arbitrary measure, F: finite measure")
        p.add_argument("--budget", type=int, default=10_000, help="probes per atom")
        p.add_argument("--base", default="2", help="magnitude ladder base")
        p.add_argument("--directions", type=int, default=8, help="random directions")

    p = add("witness", cmd_witness)
    term_source(p)
    p.add_argument("--atoms", type=int, default=10)
    p.add_argument("--out", default=None)
    witness_flags(p)

    p = add("verify", cmd_verify)
    term_source(p)
    p.add_argument("--witness", required=True, help="witness file")
    p.add_argument("--threshold", default=None, help="image-sum threshold (default: N)")

    p = add("synth", cmd_synth)
    p.add_argument("kind", choices=("ind-gt", "ind-ge", "simple"))
    p.add_argument("--var", type=int, default=0)
    p.add_argument("--lambda", dest="lam", default="1")
    p.add_argument("--spec", default=None, help="JSON simple-function spec")

    p = add("axioms", cmd_axioms)
    p.add_argument("--model", default="r", help="r, power:K or quotient:K:i,j")
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--id", action="append", default=None, help="identity id (repeatable)")
    p.add_argument("--mutations", action="store_true",
                   help="check the deliberately broken variants instead")

    p = add("free-eq", cmd_free_eq)
    p.add_argument("--lhs", required=True)
    p.add_argument("--rhs", required=True)
    p.add_argument("--samples", type=int, default=10_000)
    return parser


def main(argv: Sequence[str] | None = None, stdout=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    out = Output(args.format, stdout or sys.stdout)
    try:
        return args.func(args, out)
    except (UsageError, ParseError, SignatureViolation, SignatureMismatch, IrrationalLiteral,
            MissingVariable, WitnessFormatError, NonpositiveThreshold, DominatorTooSmall,
            SchemaNotMonotone, TermError, KeyError, ValueError, OSError) as exc:
        message = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {message}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
