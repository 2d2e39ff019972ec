"""Command-line entry point: ``ppa check|abstract|cegaar|oracle``."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from dataclasses import dataclass, field

from . import __version__
from . import ctl as C
from .abstraction import PreconditionViolated, build_abstract_model
from .approx import VERIFIED, VIOLATED_FINITE, check_approx
from .cegaar import EXHAUSTED, VIOLATED, Config, cegaar, witness_json
from .frontend import ParseError, PredicateSet, format_model, parse_ctl, parse_model, parse_predicates
from .oracle import check_explicit

EXIT_CODES = {VERIFIED: 0, VIOLATED: 1, "Inconclusive": 2, EXHAUSTED: 2}
EXIT_USAGE = 64
EXIT_IO = 66
EXIT_INPUT = 65


class UsageError(Exception):
    def __init__(self, message: str, status: int = EXIT_USAGE):
        super().__init__(message)
        self.status = status


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


@dataclass
class Report:
    verdict: str
    property: str
    predicates: list[str] = field(default_factory=list)
    abst: int = 0
    appr: int = 0
    iterations: int = 0
    witness: list[dict] | None = None
    elapsed_ms: int = 0

    def to_json(self) -> str:
        out = {"verdict": self.verdict, "property": self.property,
               "predicates": self.predicates,
               "refinements": {"abst": self.abst, "appr": self.appr},
               "iterations": self.iterations, "elapsed_ms": self.elapsed_ms}
        if self.witness is not None:
            out["witness"] = self.witness
        return json.dumps(out, sort_keys=True, indent=2)

    def summary(self) -> str:
        lines = [self.verdict, f"property: {self.property}"]
        if self.predicates:
            lines.append("predicates: " + "; ".join(self.predicates))
        lines.append(f"refinements: abst={self.abst} appr={self.appr}")
        lines.append(f"iterations: {self.iterations}")
        return "\n".join(lines)


def _nonneg(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be nonnegative: {v}")
    return v


def _box(text: str) -> tuple[str, tuple[int, int]]:
    try:
        name, rng = text.split("=", 1)
        lo, hi = rng.split(":", 1)
        return name.strip(), (int(lo), int(hi))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected VAR=LO:HI, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ppa", description="Partial predicate abstraction model checker.")
    p.add_argument("--version", action="version", version=f"ppa {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, preds: bool = False):
        sp.add_argument("model", help="model file (.ppa)")
        sp.add_argument("--prop", help="CTL property; defaults to the model's first prop")
        if preds:
            sp.add_argument("--preds", help="predicate file")
        sp.add_argument("--json", action="store_true", help="print the report as JSON")

    sp = sub.add_parser("check", help="approximate model checking on the concrete model")
    common(sp)
    sp.add_argument("--widening-seed", type=_nonneg, default=1)
    sp.add_argument("--over-approx-bound", type=_nonneg, default=5)

    sp = sub.add_parser("abstract", help="print the partially abstracted model")
    sp.add_argument("model")
    sp.add_argument("--preds", required=True)

    sp = sub.add_parser("cegaar", help="abstraction and approximation refinement loop")
    common(sp, preds=True)
    sp.add_argument("--widening-seed", type=_nonneg, default=1)
    sp.add_argument("--over-approx-bound", type=_nonneg, default=5)
    sp.add_argument("--max-worklist", type=_nonneg, default=64)
    sp.add_argument("--interp-coeff-bound", type=_nonneg, default=2)
    sp.add_argument("--interp-const-bound", type=_nonneg, default=64)
    sp.add_argument("--time-budget", type=float, default=None, help="seconds")
    sp.add_argument("--jobs", type=_nonneg, default=1,
                    help="accepted for compatibility; entries are checked in order")
    sp.add_argument("--dump-witness", metavar="PATH")

    sp = sub.add_parser("oracle", help="explicit-state check of a bounded model")
    common(sp)
    sp.add_argument("--box", type=_box, action="append", default=[], metavar="VAR=LO:HI",
                    help="finite range for an unbounded variable")
    return p


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}", EXIT_IO) from None


def _load(args):
    m = parse_model(_read(args.model))
    if getattr(args, "prop", None):
        f = parse_ctl(args.prop, m)
    elif m.props:
        f = m.props[0]
    else:
        raise UsageError("the model has no prop; pass --prop")
    return m, f


def _preds(args, m) -> PredicateSet:
    if not getattr(args, "preds", None):
        return PredicateSet(())
    return parse_predicates(_read(args.preds), m)


@dataclass
class RunConfig:
    command: str
    model: str
    preds: str | None = None
    prop: str | None = None
    json: bool = False
    widening_seed: int | None = 1
    over_approx_bound: int | None = 5
    max_worklist: int = 64
    interp_coeff_bound: int = 2
    interp_const_bound: int = 64
    time_budget: float | None = None
    jobs: int = 1
    dump_witness: str | None = None
    box: list = field(default_factory=list)

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        known = {k: v for k, v in vars(args).items() if k in cls.__dataclass_fields__}
        return cls(**known)


def run(cfg: RunConfig) -> tuple[int, str]:
    """Exit status and report text for one validated configuration."""
    start = time.monotonic()
    if cfg.command == "abstract":
        m = parse_model(_read(cfg.model))
        am, _ = build_abstract_model(m, parse_predicates(_read(cfg.preds), m))
        return 0, format_model(am)
    rep = {"check": run_check, "cegaar": run_cegaar, "oracle": run_oracle}[cfg.command](cfg)
    rep.elapsed_ms = int((time.monotonic() - start) * 1000)
    return EXIT_CODES[rep.verdict], (rep.to_json() if cfg.json else rep.summary()) + "\n"


def run_check(args) -> Report:
    m, f = _load(args)
    res = check_approx(m, f, args.widening_seed, args.over_approx_bound)
    verdict = {VERIFIED: VERIFIED, VIOLATED_FINITE: VIOLATED}.get(res.verdict, "Inconclusive")
    return Report(verdict, C.to_text(f), iterations=res.iters.total())


def run_cegaar(args) -> Report:
    m, f = _load(args)
    cfg = Config(widening_seed=args.widening_seed, over_approx_bound=args.over_approx_bound,
                 max_worklist=args.max_worklist, time_budget=args.time_budget,
                 interp_coeff_bound=args.interp_coeff_bound,
                 interp_const_bound=args.interp_const_bound)
    out = cegaar(m, f, _preds(args, m), cfg)
    rep = Report(out.verdict, out.property, out.preds.texts, out.abst_refinements,
                 out.appr_refinements, out.iterations)
    if out.verdict == VIOLATED:
        rep.witness = witness_json(out.witness)
    if args.dump_witness:
        try:
            with open(args.dump_witness, "w", encoding="utf-8") as fh:
                json.dump(witness_json(out.witness), fh, sort_keys=True, indent=2)
                fh.write("\n")
        except OSError as e:
            raise UsageError(f"cannot write {args.dump_witness}: {e.strerror}", EXIT_IO) from None
    return rep


def run_oracle(args) -> Report:
    m, f = _load(args)
    try:
        ok = check_explicit(m, f, dict(args.box))
    except ValueError as e:
        raise UsageError(str(e)) from None
    return Report(VERIFIED if ok else VIOLATED, C.to_text(f))


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=os.environ.get("PPA_LOG", "WARNING").upper(),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        code, text = run(RunConfig.from_args(build_parser().parse_args(argv)))
    except UsageError as e:
        print(e, file=sys.stderr)
        return e.status
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (PreconditionViolated, C.NotACTL) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except SystemExit as e:  # --help and --version
        return e.code if isinstance(e.code, int) else 0
    sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
