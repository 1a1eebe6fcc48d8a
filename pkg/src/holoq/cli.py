"""``holoq`` command-line front end."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import qlin
from .errors import (
    ConstraintViolation,
    HoloqError,
    ModelFileError,
    ParseError,
    PresetError,
    SamplerExhausted,
    UnresolvedName,
)
from .gatelib import pseudo_gate_tree
from .holistic import evaluate, evaluation_report, first_occurrence, render_text
from .judgments import (
    COUNTEREXAMPLE,
    AgentScope,
    SampledScope,
    check_consequence,
    claim_from_dict,
    parse_scope,
    replay,
)
from .lang import atomic_complexity, atoms_of, build_syntactical_tree, parse_sentence, print_sentence
from .modelfile import PerspectiveTable, load_json, load_model
from .situations import POOL_NAMES, SOUND_POOL, ScenarioPresets, run_situation

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CONSTRAINT = 2
EXIT_COUNTEREXAMPLE = 3
EXIT_EXHAUSTED = 4
EXIT_PRESET = 5


def _fmt_p(p):
    return format(float(p), ".12g")


def _emit(args, payload, text):
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True, default=str))
    else:
        print(text)


def _perspective(args, table=None, qm=None):
    ref = args.perspective or "I"
    if ref.lstrip().startswith("["):
        ref = json.loads(ref)
    scope = parse_scope(ref, table)
    if isinstance(scope, AgentScope):
        if qm is None:
            raise UnresolvedName("a per-agent perspective needs --model")
        return qm.resolve(scope.agent, scope.time).perspective
    if isinstance(scope, SampledScope):
        raise HoloqError("'sampled' is only meaningful for claim checks")
    return scope.perspective


# --------------------------------------------------------------------------
# commands


def cmd_parse(args):
    s = parse_sentence(args.sentence)
    text = print_sentence(s)
    payload = {
        "sentence": text,
        "atomic_complexity": atomic_complexity(s),
        "atoms": sorted({print_sentence(a) for a in atoms_of(s)}),
    }
    _emit(args, payload, text)
    return EXIT_OK


def cmd_tree(args):
    s = parse_sentence(args.sentence)
    tree = build_syntactical_tree(s)
    levels = []
    lines = []
    for i in range(tree.height, 0, -1):
        occ = [print_sentence(b) for b in tree.level(i)]
        levels.append({"level": i, "occurrences": occ, "spans": [list(sp) for sp in tree.spans[i - 1]]})
        lines.append(f"Level_{i} = (" + ", ".join(occ) + ")")
    payload = {"sentence": print_sentence(s), "height": tree.height, "qubits": tree.n_qubits, "levels": levels}
    if args.model or args.perspective:
        qm, _, table = load_model(args.model) if args.model else (None, None, PerspectiveTable())
        p = _perspective(args, table, qm)
        gates = pseudo_gate_tree(tree, p, qm)
        descr = [g.describe() for g in gates]
        payload["perspective"] = p.name
        payload["pseudo_gates"] = [
            {"into_level": tree.height - 1 - j, "gate": d} for j, d in enumerate(descr)
        ]
        lines.append("pseudo-gates:")
        for j, d in enumerate(descr):
            lines.append(f"  O^({tree.height - 1 - j}) = {d}")
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK


def _contextual_lines(ev):
    """One line per distinct proper subformula, at its first occurrence."""
    out = []
    seen = set()
    for path in ev.tree.paths():
        b = ev.tree.occupant(path)
        if path.level == 1 or b in seen:
            continue
        seen.add(b)
        path = first_occurrence(ev, b)
        start, stop = ev.tree.span(path)
        rho = qlin.reduce_span(ev.levels[path.level - 1], start, stop)
        d = rho.shape[0]
        if qlin.qumix_close(rho, np.eye(d) / d, 1e-9):
            kind = "maximally mixed"
        elif abs(np.trace(rho @ rho).real - 1) < 1e-9:
            kind = "pure"
        else:
            kind = "mixed"
        p = qlin.probability(ev.perspective.u, rho, check=False)
        out.append((print_sentence(b), kind, p))
    return out


def cmd_eval(args):
    if not args.model:
        raise ModelFileError("eval needs --model")
    qm, assignment, table = load_model(args.model)
    s = parse_sentence(args.sentence)
    p = _perspective(args, table, qm)
    try:
        top = assignment.top_for(s, p)
    except KeyError as exc:
        raise ModelFileError(str(exc.args[0])) from None
    ev = evaluate(qm, p, s, top)
    payload = evaluation_report(ev)
    payload["probability_text"] = _fmt_p(ev.probability)
    ctx = _contextual_lines(ev)
    payload["contextual"] = [{"sentence": b, "state": k, "probability": q} for b, k, q in ctx]
    text = render_text(ev)
    if ctx:
        text += "\n" + "\n".join(f"contextual {b} = {k} (p = {_fmt_p(q)})" for b, k, q in ctx)
    _emit(args, payload, text)
    return EXIT_OK


def _load_claim(args):
    path = Path(args.claim)
    doc = load_json(path)
    if args.model:
        doc["quasi_model"] = str(Path(args.model).resolve())
    if args.perspective:
        ref = args.perspective
        doc["perspective"] = json.loads(ref) if ref.lstrip().startswith("[") else ref
    claim, cfg = claim_from_dict(doc, base_dir=path.parent)
    if args.seed is not None:
        cfg.seed = args.seed
    if args.samples is not None:
        cfg.count = args.samples
    return claim, cfg


def _write_replay(args, verdict):
    out = Path(args.replay_out) if args.replay_out else Path(args.claim).with_suffix(".countermodel.json")
    out.write_text(json.dumps(verdict.countermodel, indent=1, sort_keys=True) + "\n")
    return str(out)


def _verdict_text(claim, v, replay_path):
    lines = [f"claim: {claim.describe()}", f"verdict: {v.outcome}", f"samples: {v.samples}, antecedent true in {v.satisfied}"]
    d = v.diagnostics
    if v.outcome == COUNTEREXAMPLE:
        lines.append(f"first counterexample at sample {d['first_counterexample']}")
        lines.append(
            "antecedent p = "
            + ", ".join(_fmt_p(x) for x in d["antecedent_probabilities"])
            + f"; consequent p = {_fmt_p(d['consequent_probability'])}"
        )
        lines.append(f"replay file: {replay_path}")
    else:
        lines.append(f"lowest consequent p among satisfying samples: {_fmt_p(d['min_consequent_probability'])}")
    return "\n".join(lines)


def _run_claim(args, stop_at_first):
    claim, cfg = _load_claim(args)
    try:
        v = check_consequence(claim, cfg, stop_at_first=stop_at_first)
    except SamplerExhausted as exc:
        _emit(args, {"outcome": "sampler-exhausted", "message": str(exc)}, f"sampler exhausted: {exc}")
        return EXIT_EXHAUSTED
    replay_path = _write_replay(args, v) if v.countermodel else None
    payload = {"claim": claim.describe(), **v.to_dict(), "replay_file": replay_path}
    _emit(args, payload, _verdict_text(claim, v, replay_path))
    return EXIT_COUNTEREXAMPLE if v.refuted else EXIT_OK


def cmd_check(args):
    return _run_claim(args, stop_at_first=True)


def cmd_search(args):
    return _run_claim(args, stop_at_first=False)


def cmd_replay(args):
    r = replay(load_json(args.file))
    payload = {
        "antecedent_probabilities": r.antecedent_probabilities,
        "consequent_probability": r.consequent_probability,
        "max_deviation": r.max_deviation,
        "reproduces": r.reproduces,
    }
    text = (
        "antecedent p = "
        + ", ".join(_fmt_p(x) for x in r.antecedent_probabilities)
        + f"\nconsequent p = {_fmt_p(r.consequent_probability)}"
        + f"\nmax deviation from recorded witness = {r.max_deviation:.3g}"
        + f"\nreproduces: {'yes' if r.reproduces else 'no'}"
    )
    _emit(args, payload, text)
    return EXIT_OK if r.reproduces else EXIT_COUNTEREXAMPLE


def _scenario_text(reports):
    lines = []
    for r in reports:
        lines.append(f"situation {r.k}: {'pass' if r.passed else 'FAIL'}  ({r.title})")
        for c in r.checks:
            d = c.detail
            bits = []
            for key in ("samples", "satisfied", "distance", "probability", "replay_deviation"):
                if key in d:
                    v = d[key]
                    bits.append(f"{key} = {_fmt_p(v) if isinstance(v, float) else v}")
            if "max_probability" in d.get("diagnostics", {}):
                bits.append(f"max p = {_fmt_p(d['diagnostics']['max_probability'])}")
            lines.append(f"  [{'ok' if c.passed else 'FAIL'}] {c.name}" + (f"  ({', '.join(bits)})" if bits else ""))
        for a in r.artifacts:
            lines.append(f"  wrote {a}")
    if len(reports) > 1:
        lines.append("")
        lines.append("summary")
        for r in reports:
            lines.append(f"  {r.k}  {'pass' if r.passed else 'FAIL'}  {r.title}")
    return "\n".join(lines)


def cmd_scenario(args):
    if args.all == (args.k is not None):
        args.parser.error("give a situation number 1..9 or --all")
    presets = ScenarioPresets(
        seed=args.seed or 0,
        samples=args.samples or 200,
        pool=tuple(args.pool.split(",")) if args.pool else SOUND_POOL,
        out_dir=args.out_dir,
    )
    ks = range(1, 10) if args.all else [args.k]
    reports = [run_situation(k, presets) for k in ks]
    payload = [r.to_dict() for r in reports]
    _emit(args, payload if len(payload) > 1 else payload[0], _scenario_text(reports))
    return EXIT_OK if all(r.passed for r in reports) else EXIT_COUNTEREXAMPLE


# --------------------------------------------------------------------------
# argument parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # argparse would exit with 2, which is reserved for constraint violations
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--model", help="model file (holoq-model/1 JSON)")
    common.add_argument("--perspective", help="I, H, X, a declared name, a JSON 2x2 matrix, or per-agent:a@t")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--samples", type=int, default=None)
    common.add_argument("--json", action="store_true", help="machine-readable output")

    ap = _Parser(prog="holoq", description="Holistic epistemic quantum logic engine.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("parse", parents=[common], help="parse and print a sentence")
    p.add_argument("sentence")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("tree", parents=[common], help="syntactical tree and pseudo-gates")
    p.add_argument("sentence")
    p.set_defaults(func=cmd_tree)

    p = sub.add_parser("eval", parents=[common], help="evaluate a sentence in a model file")
    p.add_argument("sentence")
    p.set_defaults(func=cmd_eval)

    for name, func, hlp in (
        ("check", cmd_check, "look for a counterexample to a claim"),
        ("search", cmd_search, "count every counterexample among the samples"),
    ):
        p = sub.add_parser(name, parents=[common], help=hlp)
        p.add_argument("claim", help="claim file (JSON)")
        p.add_argument("--replay-out", help="where to write the countermodel file")
        p.set_defaults(func=func)

    p = sub.add_parser("scenario", parents=[common], help="run the epistemic situations")
    p.add_argument("k", nargs="?", type=int, choices=range(1, 10), metavar="K")
    p.add_argument("--all", action="store_true")
    p.add_argument("--pool", help=f"comma-separated agent presets from {', '.join(POOL_NAMES)}")
    p.add_argument("--out-dir", help="directory for countermodel files")
    p.set_defaults(func=cmd_scenario, parser=p)

    p = sub.add_parser("replay", parents=[common], help="re-run a countermodel file")
    p.add_argument("file")
    p.set_defaults(func=cmd_replay)
    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except ConstraintViolation as exc:
        print(f"constraint violation: {exc}", file=sys.stderr)
        return EXIT_CONSTRAINT
    except PresetError as exc:
        print(f"preset error: {exc}", file=sys.stderr)
        return EXIT_PRESET
    except SamplerExhausted as exc:
        print(f"sampler exhausted: {exc}", file=sys.stderr)
        return EXIT_EXHAUSTED
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (HoloqError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
