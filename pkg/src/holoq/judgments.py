"""Truth, contextual truth and consequence over sampled holistic models.

Quantification over all models is finitized: a claim is checked on a
seeded stream of normal models whose top states come from
``holoq.sampler``.  A refutation is certain (it ships a replayable model
file); a clean run only says that no sample refuted the claim.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol

import numpy as np

from . import modelfile, qlin
from .errors import HoloqError, ModelFileError, NotFactorizable, SamplerExhausted, TableMiss
from .gatelib import (
    HADAMARD_PERSPECTIVE,
    IDENTITY,
    QuasiModel,
    TruthPerspective,
    pseudo_gate_tree,
    random_perspective,
)
from .holistic import (
    HolisticEvaluation,
    ModelAssignment,
    check_normal,
    contextual_probability,
    evaluate,
    first_occurrence,
)
from .lang import (
    Not,
    Sentence,
    build_syntactical_tree,
    conj,
    parse_sentence,
    print_sentence,
    subformulas,
)
from .sampler import GENERATORS, TopSampler, truth_effect_at

TRUTH_TOL = 1e-9  # p >= 1 - TRUTH_TOL counts as true
REFUTE_TOL = 1e-6  # a refutation needs p <= 1 - REFUTE_TOL

COUNTEREXAMPLE = "counterexample"
NO_COUNTEREXAMPLE = "no-counterexample"
HOLDS = "holds"

CLAIM_KINDS = ("truth", "contextual-truth", "consequence", "harmonic-consequence")


# --------------------------------------------------------------------------
# single models


def is_true(qm, perspective, s: Sentence, assignment: ModelAssignment) -> bool:
    top = assignment.top_for(s, perspective)
    return evaluate(qm, perspective, s, top).probability >= 1 - TRUTH_TOL


def is_true_contextual(ev: HolisticEvaluation, pos) -> bool:
    return contextual_probability(ev, pos) >= 1 - TRUTH_TOL


# --------------------------------------------------------------------------
# claims and scopes


@dataclass(frozen=True)
class FixedScope:
    perspective: TruthPerspective


@dataclass(frozen=True)
class AgentScope:
    agent: str
    time: str


@dataclass(frozen=True)
class SampledScope:
    """Cycle through ``I``, ``H`` and seeded random perspectives."""

    count: int = 5


class ModelFamily(Protocol):
    """Anything that yields a (perspective, quasi-model) pair per sample index."""

    def draw(self, index: int, rng: np.random.Generator) -> tuple[TruthPerspective, QuasiModel]: ...


@dataclass(frozen=True)
class Claim:
    """A judgment to test.

    ``antecedents`` and ``consequent`` are read as occurrences inside
    ``context``.  When one of them is not a subformula of the context, the
    context is widened to the conjunction of the context with it, which
    keeps every judgment inside a single holistic model; ``widened``
    records that this happened.
    """

    kind: str
    context: Sentence
    consequent: Sentence
    antecedents: tuple[Sentence, ...] = ()
    scope: object = FixedScope(IDENTITY)
    quasi_model: object = None  # QuasiModel or ModelFamily
    widened: bool = False

    def __post_init__(self):
        if self.kind not in CLAIM_KINDS:
            raise HoloqError(f"unknown claim kind {self.kind!r}")
        if self.kind.endswith("consequence") and not self.antecedents:
            raise HoloqError("a consequence claim needs at least one antecedent")
        subs = subformulas(self.context)
        missing = [x for x in (*self.antecedents, self.consequent) if x not in subs]
        if missing:
            ctx = self.context
            for x in dict.fromkeys(missing):
                ctx = conj(ctx, x)
            object.__setattr__(self, "context", ctx)
            object.__setattr__(self, "widened", True)

    @classmethod
    def truth(cls, s, **kw):
        return cls("truth", s, s, (), **kw)

    @classmethod
    def consequence(cls, context, alpha, beta, harmonic=False, **kw):
        alphas = tuple(alpha) if isinstance(alpha, (list, tuple)) else (alpha,)
        kind = "harmonic-consequence" if harmonic else "consequence"
        return cls(kind, context, beta, alphas, **kw)

    def describe(self):
        body = print_sentence(self.consequent)
        if self.antecedents:
            body = ", ".join(print_sentence(a) for a in self.antecedents) + " ⊨ " + body
        else:
            body = "⊨ " + body
        return f"{body} in context {print_sentence(self.context)}"


@dataclass
class SamplerConfig:
    seed: int = 0
    count: int = 200
    generators: tuple[str, ...] = GENERATORS
    perspectives: int = 5

    def __post_init__(self):
        if self.count < 1:
            raise HoloqError("sample count must be at least 1")
        for g in self.generators:
            if g not in (*GENERATORS, "adversarial"):
                raise HoloqError(f"unknown generator {g!r}")

    def rng(self, index):
        return np.random.default_rng([self.seed, index])


@dataclass
class Verdict:
    outcome: str
    samples: int
    satisfied: int = 0
    diagnostics: dict = field(default_factory=dict)
    countermodel: dict | None = None

    @property
    def refuted(self):
        return self.outcome == COUNTEREXAMPLE

    def to_dict(self):
        return {
            "outcome": self.outcome,
            "samples": self.samples,
            "satisfied": self.satisfied,
            "diagnostics": self.diagnostics,
        }


def sampled_perspectives(count, seed):
    """``I``, ``H`` and then seeded random perspectives, ``count`` in all."""
    rng = np.random.default_rng([seed, 0x7E57])
    base = [IDENTITY, HADAMARD_PERSPECTIVE]
    return (base + [random_perspective(rng) for _ in range(max(0, count - 2))])[: max(count, 1)]


def _model_for(claim: Claim, index, rng, perspectives):
    source = claim.quasi_model
    if hasattr(source, "draw"):
        return source.draw(index, rng)
    qm = source
    scope = claim.scope
    if isinstance(scope, FixedScope):
        p = scope.perspective
    elif isinstance(scope, AgentScope):
        if qm is None:
            raise HoloqError("an agent-relative perspective needs a quasi-model")
        p = qm.resolve(scope.agent, scope.time).perspective
    elif isinstance(scope, SampledScope):
        p = perspectives[index % len(perspectives)]
    else:
        raise HoloqError(f"unknown perspective scope {scope!r}")
    if claim.kind == "harmonic-consequence" and qm is not None:
        qm = qm.harmonized(p)
    return p, qm


# --------------------------------------------------------------------------
# sampled checking


class _Run:
    """Shared per-claim state: tree, sampler and a gate cache."""

    def __init__(self, context):
        self.tree = build_syntactical_tree(context)
        self.sampler = TopSampler(self.tree)
        self._gates = {}

    def gates(self, p, qm):
        key = (id(qm), p.u.tobytes())
        if key not in self._gates:
            if len(self._gates) > 64:
                self._gates.clear()
            self._gates[key] = (qm, tuple(pseudo_gate_tree(self.tree, p, qm)))
        return self._gates[key][1]

    def target(self, gates, p, sentences):
        """Compressed mean truth effect of the first occurrences of ``sentences``."""
        if not all(g.is_linear for g in gates):
            return None
        effs = []
        for s in sentences:
            path = _first_path(self.tree, s)
            effs.append(truth_effect_at(self.tree, gates, p, path))
        return self.sampler.compress(sum(effs) / len(effs), p)

    def draw(self, kind, p, gates, rng, sentences):
        if kind in ("targeted", "adversarial"):
            if not sentences:
                kind = "mixed"
            else:
                tgt = self.target(gates, p, sentences)
                if tgt is None:
                    # table maps only accept unentangled blocks
                    kind = "basis"
                else:
                    top = self.sampler.draw(kind, p, rng, tgt)
                    if top is not None:
                        return top, kind
                    kind = "mixed"
        return self.sampler.draw(kind, p, rng), kind


def _first_path(tree, sub):
    for i, level in enumerate(tree.levels, start=1):
        for j, b in enumerate(level, start=1):
            if b == sub:
                return (i, j)
    raise KeyError(f"{print_sentence(sub)} does not occur in {print_sentence(tree.sentence)}")


def _probabilities(ev, sentences):
    return [contextual_probability(ev, first_occurrence(ev, s)) for s in sentences]


def check_consequence(claim: Claim, cfg: SamplerConfig, stop_at_first=True) -> Verdict:
    """Search sampled normal models of the context for a refutation.

    A sample refutes the claim when every antecedent is contextually true
    and the consequent has probability at most ``1 - REFUTE_TOL``.  Raises
    ``SamplerExhausted`` when no sample makes the antecedents true.
    """
    run = _Run(claim.context)
    perspectives = sampled_perspectives(cfg.perspectives, cfg.seed)
    satisfied = 0
    borderline = 0
    refutations = []
    generated = {}
    abnormal = 0
    inapplicable = 0  # table maps met an entangled or unlisted input
    min_consequent = 1.0
    first = None
    for i in range(cfg.count):
        rng = cfg.rng(i)
        p, qm = _model_for(claim, i, rng, perspectives)
        gates = run.gates(p, qm)
        kind = cfg.generators[i % len(cfg.generators)]
        top, used = run.draw(kind, p, gates, rng, claim.antecedents)
        generated[used] = generated.get(used, 0) + 1
        try:
            ev = evaluate(qm, p, claim.context, top, run.tree, gates)
        except (NotFactorizable, TableMiss):
            inapplicable += 1
            continue
        if not check_normal(ev).passed:
            abnormal += 1
            continue
        ps_a = _probabilities(ev, claim.antecedents)
        if any(x < 1 - TRUTH_TOL for x in ps_a):
            continue
        satisfied += 1
        p_b = _probabilities(ev, [claim.consequent])[0]
        min_consequent = min(min_consequent, p_b)
        if p_b > 1 - TRUTH_TOL:
            continue
        if p_b > 1 - REFUTE_TOL:
            borderline += 1
            continue
        refutations.append(i)
        if first is None:
            first = (i, p, qm, top, ps_a, p_b)
            if stop_at_first:
                break
    diagnostics = {
        "generators": dict(sorted(generated.items())),
        "abnormal": abnormal,
        "inapplicable": inapplicable,
        "borderline": borderline,
        "min_consequent_probability": float(min_consequent),
        "widened_context": print_sentence(claim.context) if claim.widened else None,
    }
    n = i + 1
    if first is not None:
        i0, p, qm, top, ps_a, p_b = first
        diagnostics.update(
            first_counterexample=i0,
            counterexamples=len(refutations),
            antecedent_probabilities=ps_a,
            consequent_probability=p_b,
        )
        doc = countermodel_document(claim, i0, p, qm, top, ps_a, p_b)
        return Verdict(COUNTEREXAMPLE, n, satisfied, diagnostics, doc)
    if satisfied == 0 and claim.antecedents:
        raise SamplerExhausted(
            f"none of {n} samples made the antecedents of {claim.describe()} true"
        )
    return Verdict(NO_COUNTEREXAMPLE, n, satisfied, diagnostics)


def verify_witness(claim: Claim, perspective, qm, top) -> Verdict:
    """Evaluate a hand-built model; a refutation comes with its replay file."""
    ev = evaluate(qm, perspective, claim.context, top)
    normal = check_normal(ev).passed
    ps_a = _probabilities(ev, claim.antecedents)
    p_b = _probabilities(ev, [claim.consequent])[0]
    diagnostics = {
        "normal": normal,
        "antecedent_probabilities": ps_a,
        "consequent_probability": p_b,
    }
    holds_a = all(x >= 1 - TRUTH_TOL for x in ps_a)
    if normal and holds_a and p_b <= 1 - REFUTE_TOL:
        doc = countermodel_document(claim, 0, perspective, qm, top, ps_a, p_b)
        return Verdict(COUNTEREXAMPLE, 1, 1, diagnostics, doc)
    return Verdict(NO_COUNTEREXAMPLE, 1, int(holds_a), diagnostics)


# --------------------------------------------------------------------------
# countermodel files


def countermodel_document(claim, index, perspective, qm, top, ps_a, p_b):
    table = modelfile.PerspectiveTable()
    name = table.name_for(perspective)
    assignment = ModelAssignment()
    assignment.assign(claim.context, perspective, top)
    if qm is None:
        qm = QuasiModel((), (), {})
    doc = modelfile.model_to_dict(qm, assignment, table)
    doc["claim"] = {
        "kind": claim.kind,
        "context": print_sentence(claim.context),
        "alpha": [print_sentence(a) for a in claim.antecedents],
        "beta": print_sentence(claim.consequent),
        "perspective": name,
    }
    doc["witness"] = {
        "sample": index,
        "antecedent_probabilities": [float(x) for x in ps_a],
        "consequent_probability": float(p_b),
    }
    return doc


@dataclass
class ReplayResult:
    antecedent_probabilities: list
    consequent_probability: float
    max_deviation: float

    @property
    def reproduces(self):
        return (
            self.max_deviation <= 1e-12
            and all(x >= 1 - TRUTH_TOL for x in self.antecedent_probabilities)
            and self.consequent_probability <= 1 - REFUTE_TOL
        )


def replay(doc) -> ReplayResult:
    """Reload a countermodel document and recompute its witness probabilities."""
    try:
        c = doc["claim"]
        w = doc["witness"]
    except KeyError as exc:
        raise ModelFileError(f"countermodel file is missing {exc}") from None
    qm, assignment, table = modelfile.model_from_dict(doc)
    p = table.lookup(c["perspective"])
    context = parse_sentence(c["context"])
    top = assignment.top_for(context, p)
    ev = evaluate(qm, p, context, top)
    ps_a = _probabilities(ev, [parse_sentence(a) for a in c["alpha"]])
    p_b = _probabilities(ev, [parse_sentence(c["beta"])])[0]
    expected = list(w["antecedent_probabilities"]) + [w["consequent_probability"]]
    dev = max(abs(x - y) for x, y in zip(ps_a + [p_b], expected))
    return ReplayResult(ps_a, p_b, dev)


# --------------------------------------------------------------------------
# non-contradiction


def contradiction(alpha: Sentence) -> Sentence:
    """``alpha ∧ ¬alpha`` as the reversible conjunction."""
    return conj(alpha, Not(alpha))


def search_truth(s: Sentence, cfg: SamplerConfig, source=None) -> Verdict:
    """Look for sampled normal models in which ``s`` is true.

    ``source`` is a quasi-model (evaluated under sampled perspectives) or a
    model family.  The adversarial generator draws from the top eigenspace
    of the twirled truth effect, so it finds the largest probability any
    label-symmetric top state can reach.  A model reaching
    ``1 - REFUTE_TOL`` is reported as a counterexample to "never true".
    """
    claim = Claim.truth(s, scope=SampledScope(cfg.perspectives), quasi_model=source)
    run = _Run(s)
    perspectives = sampled_perspectives(cfg.perspectives, cfg.seed)
    gens = tuple(cfg.generators) + ("adversarial",)
    best = (-1.0, None)
    hits = []
    used_perspectives = set()
    for i in range(cfg.count):
        rng = cfg.rng(i)
        p, model = _model_for(claim, i, rng, perspectives)
        used_perspectives.add(np.round(p.u, 9).tobytes())
        gates = run.gates(p, model)
        kind = gens[i % len(gens)]
        top, _ = run.draw(kind, p, gates, rng, [s])
        try:
            ev = evaluate(model, p, s, top, run.tree, gates)
        except (NotFactorizable, TableMiss):
            continue
        if not check_normal(ev).passed:
            continue
        prob = ev.probability
        if prob > best[0]:
            best = (prob, i)
        if prob >= 1 - REFUTE_TOL:
            hits.append((i, p, model, top, prob))
    diagnostics = {
        "max_probability": float(best[0]),
        "argmax_sample": best[1],
        "perspectives": len(used_perspectives),
    }
    if hits:
        i, p, model, top, prob = hits[0]
        diagnostics["violations"] = len(hits)
        doc = countermodel_document(claim, i, p, model, top, [], prob)
        return Verdict(COUNTEREXAMPLE, cfg.count, cfg.count, diagnostics, doc)
    return Verdict(NO_COUNTEREXAMPLE, cfg.count, cfg.count, diagnostics)


def lemma_noncontradiction(alpha: Sentence, cfg: SamplerConfig, qm=None) -> Verdict:
    """``alpha ∧ ¬alpha`` should never be true; records the largest probability seen."""
    return search_truth(contradiction(alpha), cfg, qm)


def brute_force_pair_bound(samples, rng, perspective=IDENTITY):
    """Largest ``p(q ∧ ¬q)`` over random two-qubit states with equal marginals.

    Each draw is symmetrized under the swap, which is exactly what the
    normality of a model of ``q ∧ ¬q`` requires of its atom register.
    Returns ``(max over symmetric states, max over raw states)``.
    """
    s = contradiction(parse_sentence("q"))
    tree = build_syntactical_tree(s)
    sampler = TopSampler(tree)
    gates = tuple(pseudo_gate_tree(tree, perspective))
    best_sym = best_raw = 0.0
    for k in range(samples):
        if k % 2:
            v = qlin.random_pure(2, rng)
            rho = np.outer(v, v.conj())
        else:
            rho = qlin.random_mixed(2, rng, rank=int(rng.integers(1, 5)))
        sym = (rho + qlin.permute_qubits(rho, [1, 0])) / 2
        for target, state in (("sym", sym), ("raw", rho)):
            ev = evaluate(None, perspective, s, sampler.assemble(state, perspective), tree, gates)
            if target == "sym":
                best_sym = max(best_sym, ev.probability)
            else:
                best_raw = max(best_raw, ev.probability)
    return best_sym, best_raw


# --------------------------------------------------------------------------
# claim files


def parse_scope(ref, table=None):
    table = table or modelfile.PerspectiveTable()
    if ref is None:
        return FixedScope(IDENTITY)
    if isinstance(ref, str) and ref.startswith("per-agent:"):
        agent, _, time = ref[len("per-agent:") :].partition("@")
        if not agent or not time:
            raise ModelFileError(f"per-agent scope needs 'agent@time', got {ref!r}")
        return AgentScope(agent, time)
    if ref == "sampled":
        return SampledScope()
    return FixedScope(table.lookup(ref))


def claim_from_dict(doc, base_dir=None):
    """Build ``(claim, sampler_config)`` from a claim-file document."""
    if not isinstance(doc, dict):
        raise ModelFileError("claim document must be a JSON object")
    kind = doc.get("kind", "consequence")
    if kind not in CLAIM_KINDS:
        raise ModelFileError(f"unknown claim kind {kind!r}")
    qm_ref = doc.get("quasi_model")
    qm = None
    table = modelfile.PerspectiveTable()
    if isinstance(qm_ref, str):
        path = Path(qm_ref)
        if base_dir is not None and not path.is_absolute():
            path = Path(base_dir) / path
        qm, _, table = modelfile.load_model(path)
    elif isinstance(qm_ref, dict):
        qm, _, table = modelfile.model_from_dict(qm_ref)
    scope = parse_scope(doc.get("perspective"), table)
    try:
        if kind == "truth":
            s = parse_sentence(doc.get("sentence") or doc["context"])
            claim = Claim.truth(s, scope=scope, quasi_model=qm)
        elif kind == "contextual-truth":
            claim = Claim(
                kind,
                parse_sentence(doc["context"]),
                parse_sentence(doc["beta"]),
                scope=scope,
                quasi_model=qm,
            )
        else:
            alpha = doc["alpha"]
            alphas = [alpha] if isinstance(alpha, str) else list(alpha)
            claim = Claim.consequence(
                parse_sentence(doc["context"]),
                [parse_sentence(a) for a in alphas],
                parse_sentence(doc["beta"]),
                harmonic=kind == "harmonic-consequence",
                scope=scope,
                quasi_model=qm,
            )
    except KeyError as exc:
        raise ModelFileError(f"claim is missing field {exc}") from None
    sc = doc.get("sampler", {})
    cfg = SamplerConfig(
        seed=int(sc.get("seed", 0)),
        count=int(sc.get("count", 200)),
        generators=tuple(sc.get("generators", GENERATORS)),
        perspectives=int(sc.get("perspectives", 5)),
    )
    return claim, cfg
