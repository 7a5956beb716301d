"""Command line front end: translate, check, prove, status.

Exit codes partition outcomes: 0 success, 2 omissions present, 3
invariant violation or counterexample, 4 execution error, 5 proof
failures, 64 usage error, 65 unparseable input, 66 missing file.
"""
from __future__ import annotations

import argparse
import os
import sys

from . import fpstore, mcheck, pluscal, proofman
from .errors import (ExecutionError, PetrelError, StateLimitExceeded,
                     UnboundedDomain)

EX_OK = 0
EX_OMITTED = 2
EX_VIOLATION = 3
EX_EXECERROR = 4
EX_FAILED = 5
EX_USAGE = 64
EX_DATA = 65
EX_NOINPUT = 66

_COLORS = {
    proofman.PROVED: "\x1b[32m",
    proofman.FAILED: "\x1b[31m",
    proofman.OMITTED: "\x1b[33m",
    proofman.CANCELED: "\x1b[35m",
    proofman.PENDING: "\x1b[2m",
}


def _paint(status, enabled):
    if not enabled:
        return status
    return _COLORS.get(status, "") + status + "\x1b[0m"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(EX_USAGE, f"{self.prog}: error: {message}\n")


def _build_parser():
    top = _Parser(prog="petrel", description=__doc__.splitlines()[0])
    sub = top.add_subparsers(dest="command", metavar="command",
                             parser_class=_Parser)
    sub.required = True

    def common(p):
        p.add_argument("file", help="module file")
        p.add_argument("--machine", action="store_true",
                       help="line-oriented output with stable fields")

    p = sub.add_parser("translate",
                       help="rewrite the algorithm translation block",
                       description="Rewrite the BEGIN/END TRANSLATION "
                                   "region of FILE in place.")
    common(p)

    p = sub.add_parser("check",
                       help="explore states / test inductiveness",
                       description="Model-check an invariant by "
                                   "reachability, or test a candidate "
                                   "for inductiveness.")
    common(p)
    p.add_argument("--invariant", metavar="NAME",
                   help="definition to check over reachable states")
    p.add_argument("--inductive", metavar="NAME",
                   help="definition to test for inductiveness")
    p.add_argument("--limit", type=int, default=mcheck.DEFAULT_STATE_LIMIT,
                   metavar="N", help="abort beyond N reachable states")

    p = sub.add_parser("prove",
                       help="prove theorem obligations",
                       description="Elaborate proofs and dispatch "
                                   "obligations to a back-end, skipping "
                                   "those already proved in the "
                                   "fingerprint store.")
    common(p)
    p.add_argument("--theorem", type=int, metavar="N",
                   help="restrict to the N-th theorem (1-based)")
    p.add_argument("--step", metavar="LABEL",
                   help='restrict to one proof step, e.g. "<2>3"')
    p.add_argument("--force", action="store_true",
                   help="re-prove even when the store already answers")
    p.add_argument("--timeout", type=float, default=10.0, metavar="SECS",
                   help="per-obligation time limit")
    p.add_argument("--backend", choices=("ground", "smtlib"),
                   default="ground")
    p.add_argument("--enum-budget", type=int, default=10 ** 7, metavar="N",
                   help="valuation budget for the ground back-end")
    p.add_argument("--smt-cmd", metavar="CMD",
                   default=os.environ.get("PETREL_SMT_CMD"),
                   help="solver command reading SMT-LIB on stdin")
    p.add_argument("--trust-failures", action="store_true",
                   help="do not retry obligations recorded as failed")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--fp-store", metavar="PATH",
                   help="fingerprint store location")
    g.add_argument("--no-fp", action="store_true",
                   help="disable the fingerprint store")

    p = sub.add_parser("status",
                       help="report stored proof statuses without proving",
                       description="Join the module's obligations against "
                                   "the fingerprint store.")
    common(p)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--fp-store", metavar="PATH")
    g.add_argument("--no-fp", action="store_true")

    return top


def _read(path):
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _parse_module(path):
    from . import parser
    return parser.parse_module(_read(path))


# --- translate ---------------------------------------------------------------


def _cmd_translate(args):
    text = _read(args.file)
    block, line, col = pluscal.locate_algorithm(text)
    alg = pluscal.parse_algorithm(block, line, col)
    variables, defs = pluscal.translate(alg)
    new_text = pluscal.splice(text, pluscal.render_block(variables, defs))
    with open(args.file, "w", encoding="utf-8") as fh:
        fh.write(new_text)
    n = sum(1 for _ in pluscal._walk_segments(alg.body))
    if args.machine:
        print(f"event=translated actions={n} definitions={len(defs)}")
    else:
        print(pluscal.summary(alg, defs))
    return EX_OK


# --- check -------------------------------------------------------------------


def _require_def(defs, name):
    if name not in defs:
        raise PetrelError(f"no definition named {name}")
    return defs[name].body


def _print_trace(trace, machine):
    for i, (action, state) in enumerate(trace, 1):
        shown = action or "initial"
        if machine:
            print(f"event=trace index={i} action={shown} "
                  f"state={mcheck.format_state(state)}")
        else:
            print(f"  {i}. {shown}:  {mcheck.format_state(state)}")


def _cmd_check(args):
    if not args.invariant and not args.inductive:
        raise UsageError("check needs --invariant and/or --inductive")
    module = _parse_module(args.file)
    defs = module.def_map()
    code = EX_OK

    if args.invariant:
        init = _require_def(defs, "Init")
        nxt = _require_def(defs, "Next")
        inv = _require_def(defs, args.invariant)
        r = mcheck.check_invariant(init, nxt, inv, module.variables, defs,
                                   inv_name=args.invariant,
                                   limit=args.limit)
        if isinstance(r, mcheck.CheckOK):
            if args.machine:
                print(f"event=check invariant={args.invariant} "
                      f"states={r.states} result=ok")
            else:
                print(f"states: {r.states}")
                print(f"invariant {args.invariant}: OK")
        elif isinstance(r, mcheck.Violation):
            if args.machine:
                print(f"event=check invariant={args.invariant} "
                      f"states={r.states} result=violation")
            else:
                print(f"states: {r.states}")
                print(f"invariant {args.invariant}: violated")
            _print_trace(r.trace, args.machine)
            code = EX_VIOLATION
        else:
            if args.machine:
                print(f"event=error kind={r.kind} message={r.message}")
            else:
                print(f"execution error: {r.kind}: {r.message}")
            _print_trace(r.trace, args.machine)
            return EX_EXECERROR

    if args.inductive:
        nxt = _require_def(defs, "Next")
        cand = _require_def(defs, args.inductive)
        r = mcheck.check_inductive(cand, nxt, module.variables, defs)
        if isinstance(r, mcheck.InductiveOK):
            if args.machine:
                print(f"event=inductive invariant={args.inductive} "
                      f"candidates={r.candidates} result=ok")
            else:
                print(f"candidates: {r.candidates}")
                print(f"inductive {args.inductive}: OK")
        else:
            if args.machine:
                print(f"event=inductive invariant={args.inductive} "
                      f"candidates={r.candidates} result=cti")
                print(f"event=cti part=state "
                      f"state={mcheck.format_state(r.state)}")
                print(f"event=cti part=action action={r.action}")
                print(f"event=cti part=successor "
                      f"state={mcheck.format_state(r.successor)}")
            else:
                print(f"candidates: {r.candidates}")
                print(f"inductive {args.inductive}: "
                      "counterexample to induction")
                print(f"  state:     {mcheck.format_state(r.state)}")
                print(f"  action:    {r.action}")
                print(f"  successor: {mcheck.format_state(r.successor)}")
            code = code or EX_VIOLATION

    return code


# --- prove / status ----------------------------------------------------------


def _open_store(args):
    if getattr(args, "no_fp", False):
        return None
    path = getattr(args, "fp_store", None) or fpstore.store_path(args.file)
    return fpstore.load(path)


def _result_lines(res, color, machine):
    ob = res.obligation
    short = fpstore.short(res.fingerprint)
    ms = res.ms
    backend = "cache" if res.cached else res.backend
    if machine:
        line = (f"event=obligation step={ob.label} kind={ob.kind} "
                f"status={res.status} backend={backend} time_ms={ms} "
                f"cached={int(res.cached)} fp={short}")
        if res.detail:
            line += f" detail={res.detail}"
        return [line]
    shown = _paint(res.status, color)
    lines = [f"STEP {ob.label} {shown} backend={backend} "
             f"time={ms}ms fp={short}"]
    if res.status == proofman.FAILED:
        if res.detail:
            lines.append(f"  reason: {res.detail}")
        for dl in proofman.print_obligation(ob).splitlines():
            lines.append("  " + dl)
    elif res.status == proofman.CANCELED and res.detail:
        lines.append(f"  reason: {res.detail}")
    return lines


def _report_exit(report, proving):
    tally = report.counts()
    if tally[proofman.FAILED] or tally[proofman.CANCELED]:
        return EX_FAILED
    if proving and tally[proofman.PENDING]:
        return EX_FAILED
    if tally[proofman.OMITTED]:
        return EX_OMITTED
    return EX_OK


def _print_report(report, args, proving):
    color = sys.stdout.isatty() and not args.machine
    for res in report.results:
        for line in _result_lines(res, color, args.machine):
            print(line)
    for root in report.roots:
        status = report.statuses.get(root.label, proofman.PENDING)
        if args.machine:
            print(f"event=theorem status={status} name={root.label}")
        else:
            print(f"{root.label}: {_paint(status, color)}")
    t = report.counts()
    if args.machine:
        print(f"event=summary proved={t[proofman.PROVED]} "
              f"omitted={t[proofman.OMITTED]} failed={t[proofman.FAILED]} "
              f"canceled={t[proofman.CANCELED]} "
              f"pending={t[proofman.PENDING]} "
              f"dispatched={report.dispatched}")
    else:
        print(f"proved {t[proofman.PROVED]}  omitted {t[proofman.OMITTED]}  "
              f"failed {t[proofman.FAILED]}  "
              f"canceled {t[proofman.CANCELED]}  "
              f"pending {t[proofman.PENDING]}")
    return _report_exit(report, proving)


def _cmd_prove(args):
    module = _parse_module(args.file)
    store = _open_store(args)
    report = proofman.check(module, store,
                            theorem=args.theorem, step=args.step,
                            force=args.force, timeout=args.timeout,
                            backend=args.backend,
                            enum_budget=args.enum_budget,
                            smt_cmd=args.smt_cmd,
                            trust_failures=args.trust_failures)
    if store is not None and store.dirty:
        store.save()
    return _print_report(report, args, proving=True)


def _cmd_status(args):
    module = _parse_module(args.file)
    store = _open_store(args)
    report = proofman.status_only(module, store)
    return _print_report(report, args, proving=False)


# --- entry point ---------------------------------------------------------------


class UsageError(Exception):
    pass


_COMMANDS = {
    "translate": _cmd_translate,
    "check": _cmd_check,
    "prove": _cmd_prove,
    "status": _cmd_status,
}


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"petrel: error: {exc}", file=sys.stderr)
        return EX_USAGE
    except FileNotFoundError as exc:
        name = exc.filename or args.file
        print(f"petrel: {name}: no such file", file=sys.stderr)
        return EX_NOINPUT
    except IsADirectoryError as exc:
        print(f"petrel: {exc.filename}: is a directory", file=sys.stderr)
        return EX_NOINPUT
    except StateLimitExceeded as exc:
        print(f"petrel: {exc}", file=sys.stderr)
        return EX_EXECERROR
    except (ExecutionError, UnboundedDomain) as exc:
        print(f"petrel: execution error: {exc}", file=sys.stderr)
        return EX_EXECERROR
    except PetrelError as exc:
        print(f"petrel: {exc}", file=sys.stderr)
        return EX_DATA


if __name__ == "__main__":
    sys.exit(main())
