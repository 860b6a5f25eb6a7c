"""Command-line front end.

Subcommands ``check``, ``decide``, ``normalize``, ``reduce``, ``eval`` and
``dualize``.  The exit code is the machine contract:

    0  ok / equivalent
    1  rejected / not equivalent
    2  parse or typing error in the input
    3  unknown
    4  outside the supported fragment

``--format structured`` prints ``key: value`` lines in a fixed order
(``command``, ``verdict``, then command-specific keys, then
``certificate``, ``countermodel`` and ``time``).  Multi-line values start on
the next line and are indented by two spaces.  ``--format text`` prints the
same content for people.
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from .parsing import ParseError, parse_equation, parse_signature, parse_term, print_signature
from .syntax import DecorError, Theory, decorate, print_term

EXIT = {"ok": 0, "equivalent": 0, "rejected": 1, "not-equivalent": 1, "unknown": 3}
PARSE_ERROR, FRAGMENT = 2, 4


@dataclass
class Report:
    command: str
    verdict: str = "ok"
    fields: list = field(default_factory=list)       # (key, text)
    certificates: list = field(default_factory=list)  # (key, path or inline text)
    countermodel: str | None = None
    timing: float = 0.0

    def add(self, key, value):
        self.fields.append((key, str(value)))

    @property
    def exit_code(self):
        return EXIT[self.verdict]

    def render(self, fmt="text"):
        entries = [("command", self.command), ("verdict", self.verdict)]
        entries += self.fields + self.certificates
        if self.countermodel is not None:
            entries.append(("countermodel", self.countermodel))
        entries.append(("time", f"{self.timing:.3f}s"))
        out = []
        for key, value in entries:
            if fmt == "structured":
                if "\n" in value.rstrip("\n"):
                    out.append(f"{key}:")
                    out += ["  " + ln for ln in value.rstrip("\n").split("\n")]
                else:
                    out.append(f"{key}: {value.rstrip()}")
            else:
                label = key.replace("-", " ")
                if "\n" in value.rstrip("\n"):
                    out.append(f"{label}:")
                    out += ["    " + ln for ln in value.rstrip("\n").split("\n")]
                else:
                    out.append(f"{label:>13}  {value.rstrip()}")
        return "\n".join(out) + "\n"


class _Fragment(Exception):
    pass


def _read(path):
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}", 0, 0) from None


def _theory(args, sig):
    if args.theory:
        return Theory.parse(args.theory)
    return Theory.EXC if sig.exceptions and not sig.locations else Theory.ST


def _emit(report, key, text, path):
    if path:
        Path(path).write_text(text)
        report.certificates.append((key, str(path)))
    else:
        report.certificates.append((key, text))


def _countermodel_text(cm):
    from .semantics import format_value, print_model
    m, w = cm
    return print_model(m) + f"-- witness input: {format_value(w)}\n"


# ---------------------------------------------------------------- commands

def cmd_check(args):
    from .kernel import check_derivation, parse_derivation
    sig = parse_signature(_read(args.sig))
    d = parse_derivation(_read(args.drv), sig)
    r = Report("check")
    res = check_derivation(d, sig)
    r.add("theory", d.theory.value)
    r.add("steps", len(d.steps))
    if res.ok:
        if d.steps:
            r.add("conclusion", d.steps[-1].conclusion)
    else:
        r.verdict = "rejected"
        r.add("step", res.step)
        r.add("rule", res.rule)
        r.add("error", res.message)
    return r


def cmd_decide(args):
    from .exc import ExcDecider
    from .kernel import print_derivation
    from .state import Decider
    sig = parse_signature(_read(args.sig))
    th = _theory(args, sig)
    e = parse_equation(args.equation, sig)
    r = Report("decide")
    r.add("theory", th.value)
    r.add("equation", e)
    if th == Theory.ST:
        dec = Decider(sig, args.oracle, args.max_size)
        dec.ctx.check(e.lhs, e.rhs)
        v = dec.decide(e, certificate=True)
    elif th == Theory.EXC:
        v = ExcDecider(sig, args.oracle, args.max_size).decide(e, certificate=True)
    else:
        raise _Fragment("decide supports --theory st and --theory exc")
    r.verdict = v.status
    if v.obligations:
        r.add("obligations", "\n".join(str(o) for o in v.obligations))
    if v.failed is not None:
        r.add("failed", v.failed)
    if v.message:
        r.add("message", v.message)
    if v.certificate is not None:
        _emit(r, "certificate", print_derivation(v.certificate), args.emit_cert)
    if v.countermodel is not None:
        r.countermodel = _countermodel_text(v.countermodel)
    return r


def cmd_normalize(args):
    from .exc import dualize
    from .kernel import print_derivation
    from .state import normalize_accessor, normalize_modifier
    sig = parse_signature(_read(args.sig))
    th = _theory(args, sig)
    t = parse_term(args.term, sig)
    if th not in (Theory.ST, Theory.EXC):
        raise _Fragment("normalize supports --theory st and --theory exc")
    work_sig, work = (sig, t) if th == Theory.ST else (dualize(sig), _dual_or_fragment(t))
    run = normalize_accessor if decorate(work, Theory.ST) <= 1 else normalize_modifier
    canon, d = run(work, work_sig)
    form, cert = canon.term, d
    if th == Theory.EXC:
        form, cert = dualize(form), dualize(d)
    r = Report("normalize")
    r.add("theory", th.value)
    r.add("term", print_term(t))
    r.add("canonical", print_term(form))
    _emit(r, "certificate", print_derivation(cert), args.emit_cert)
    return r


def _dual_or_fragment(t):
    from .exc import DualityError, dualize
    try:
        return dualize(t)
    except DualityError as exc:
        raise _Fragment(str(exc)) from None


def cmd_reduce(args):
    from .kernel import print_derivation
    from .state import reduce_equation
    sig = parse_signature(_read(args.sig))
    th = _theory(args, sig)
    if th != Theory.ST:
        raise _Fragment("reduce supports --theory st")
    e = parse_equation(args.equation, sig)
    res = reduce_equation(e, sig)
    r = Report("reduce")
    r.add("equation", e)
    r.add("count", len(res))
    r.add("pure-equations", "\n".join(str(p) for p in res.pure_equations) or "(none)")
    back = None
    if args.emit_cert:
        p = Path(args.emit_cert)
        back = p.with_name(p.stem + ".backward" + (p.suffix or ".drv"))
    _emit(r, "certificate", print_derivation(res.forward), args.emit_cert)
    _emit(r, "backward", print_derivation(res.backward), back)
    return r


def cmd_eval(args):
    from .semantics import EXCEPTION, evaluate, parse_model
    sig = parse_signature(_read(args.sig))
    m = parse_model(_read(args.model), sig)
    t = parse_term(args.term, sig)
    decorate(t, Theory.EXC if m.kind == EXCEPTION else Theory.ST)
    r = Report("eval")
    r.add("term", print_term(t))
    r.add("model", m.kind)
    r.add("table", str(evaluate(t, m)))
    return r


def cmd_dualize(args):
    from .exc import DualityMap, dualize
    from .kernel import parse_derivation, print_derivation
    dm = DualityMap.parse(args.map)
    r = Report("dualize")
    if args.sig:
        sig = parse_signature(_read(args.sig))
        d = parse_derivation(_read(args.file), sig)
        text = print_derivation(dualize(d, dm))
    else:
        text = print_signature(dualize(parse_signature(_read(args.file)), dm))
    if args.output:
        Path(args.output).write_text(text)
        r.add("output", args.output)
    else:
        r.add("output", text)
    return r


# ---------------------------------------------------------------- entry point

def build_parser():
    p = argparse.ArgumentParser(prog="decor", description=__doc__.split("\n\n")[0])
    p.add_argument("--format", choices=("text", "structured"), default="text")
    sub = p.add_subparsers(dest="cmd", required=True)

    def common(sp, theory=True):
        sp.add_argument("--format", choices=("text", "structured"), default=argparse.SUPPRESS)
        if theory:
            sp.add_argument("--theory", choices=("com", "mon", "st", "exc"))

    sp = sub.add_parser("check", help="replay a derivation in the kernel")
    sp.add_argument("sig")
    sp.add_argument("drv")
    common(sp, theory=False)
    sp.set_defaults(run=cmd_check)

    sp = sub.add_parser("decide", help="decide an equation")
    sp.add_argument("sig")
    sp.add_argument("equation")
    sp.add_argument("--oracle", choices=("syntactic", "semantic"), default="syntactic")
    sp.add_argument("--max-size", type=int, default=3)
    sp.add_argument("--emit-cert", metavar="PATH")
    common(sp)
    sp.set_defaults(run=cmd_decide)

    sp = sub.add_parser("normalize", help="canonical form of a term")
    sp.add_argument("sig")
    sp.add_argument("term")
    sp.add_argument("--emit-cert", metavar="PATH")
    common(sp)
    sp.set_defaults(run=cmd_normalize)

    sp = sub.add_parser("reduce", help="reduce an equation to pure equations")
    sp.add_argument("sig")
    sp.add_argument("equation")
    sp.add_argument("--emit-cert", metavar="PATH")
    common(sp)
    sp.set_defaults(run=cmd_reduce)

    sp = sub.add_parser("eval", help="interpret a term in a finite model")
    sp.add_argument("sig")
    sp.add_argument("term")
    sp.add_argument("--model", required=True)
    common(sp, theory=False)
    sp.set_defaults(run=cmd_eval)

    sp = sub.add_parser("dualize", help="exchange states and exceptions")
    sp.add_argument("file", help="a signature, or a derivation when --sig is given")
    sp.add_argument("--sig", help="signature of the derivation being dualized")
    sp.add_argument("--map", action="append", metavar="X=T", default=[])
    sp.add_argument("--output", "-o")
    common(sp, theory=False)
    sp.set_defaults(run=cmd_dualize)
    return p


def main(argv=None, out=None):
    from .semantics import ModelError
    from .state import FragmentError, MissingInhabitant
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    try:
        report = args.run(args)
    except (_Fragment, FragmentError, MissingInhabitant) as exc:
        report = _failure(args, "fragment", exc)
        code = FRAGMENT
    except (ParseError, ModelError, DecorError) as exc:
        report = _failure(args, "parse", exc)
        code = PARSE_ERROR
    else:
        code = report.exit_code
    report.timing = time.perf_counter() - start
    out.write(report.render(args.format))
    return code


def _failure(args, kind, exc):
    r = Report(args.cmd, verdict="rejected")
    r.add("error", f"{kind}: {exc}")
    return r


if __name__ == "__main__":
    sys.exit(main())
