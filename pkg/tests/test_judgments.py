import json
from pathlib import Path

import numpy as np
import pytest

from holoq import qlin
from holoq.errors import HoloqError, ModelFileError, SamplerExhausted
from holoq.gatelib import (
    HADAMARD_PERSPECTIVE,
    IDENTITY,
    EpistemicSituation,
    KrausMap,
    QuasiModel,
    TableMap,
    random_sound_kraus,
    single_agent_model,
)
from holoq.holistic import ModelAssignment, evaluate
from holoq.judgments import (
    COUNTEREXAMPLE,
    NO_COUNTEREXAMPLE,
    AgentScope,
    Claim,
    FixedScope,
    SampledScope,
    SamplerConfig,
    brute_force_pair_bound,
    check_consequence,
    claim_from_dict,
    contradiction,
    is_true,
    is_true_contextual,
    lemma_noncontradiction,
    parse_scope,
    replay,
    sampled_perspectives,
    verify_witness,
)
from holoq.lang import FALSE, TRUE, Atom, Knows, Not, conj, parse_sentence

from conftest import entangled_top, worked_top

ROOT = Path(__file__).resolve().parents[1]
P0 = np.diag([1, 0]).astype(complex)
P1 = np.diag([0, 1]).astype(complex)
q = Atom("q")
IDENT_MODEL = single_agent_model(KrausMap(preset="identity"))


def sound_model(rng, arities=(1, 2, 3), perspective=IDENTITY):
    know = KrausMap({a: random_sound_kraus(a, perspective, rng) for a in arities})
    return single_agent_model(know, perspective)


def table_model():
    return single_agent_model(TableMap({1: [(P1, P0)]}))


# --------------------------------------------------------------------------
# single models


def test_is_true_examples(rng):
    qm = sound_model(rng)
    s = parse_sentence("K[a@t] t")
    a = ModelAssignment({(s, IDENTITY): P1})
    assert is_true(qm, IDENTITY, s, a)
    a.assign(FALSE, IDENTITY, P0)
    assert not is_true(qm, IDENTITY, FALSE, a)
    worked = parse_sentence("K[a@t] not (q /\\ not q)")
    a.assign(worked, IDENTITY, worked_top())
    assert not is_true(IDENT_MODEL, IDENTITY, worked, a)


def test_is_true_contextual_examples():
    gamma = parse_sentence("T(q, not q, f)")
    # level 2 is P1 ⊗ P0 ⊗ P0: a true and a false control
    ev = evaluate(IDENT_MODEL, IDENTITY, gamma, qlin.kron_all([P1, P1, P0]))
    assert is_true_contextual(ev, (2, 1))
    assert not is_true_contextual(ev, (2, 2))
    assert not is_true_contextual(ev, (1, 1))
    assert is_true_contextual(evaluate(None, IDENTITY, TRUE, P1), (1, 1))


# --------------------------------------------------------------------------
# consequence


def test_known_sentences_are_true(rng):
    ctx = parse_sentence("K[a@t] q")
    claim = Claim.consequence(ctx, ctx, q, harmonic=True, scope=SampledScope(), quasi_model=sound_model(rng, (1,)))
    verdict = check_consequence(claim, SamplerConfig(seed=1, count=100))
    assert verdict.outcome == NO_COUNTEREXAMPLE
    assert verdict.satisfied > 0


def test_knowing_a_conjunction_without_its_members():
    ctx = parse_sentence("K[a@t] (q /\\ r)")
    beta = parse_sentence("K[a@t] q")
    claim = Claim.consequence(ctx, ctx, beta, quasi_model=table_model())
    assert claim.widened and claim.context == conj(ctx, beta)
    verdict = check_consequence(claim, SamplerConfig(seed=6, count=200))
    assert verdict.refuted
    assert verdict.diagnostics["consequent_probability"] <= 1 - 1e-6
    assert replay(json.loads(json.dumps(verdict.countermodel))).reproduces


def test_reflexive_consequence():
    claim = Claim.consequence(q, q, q)
    assert not claim.widened
    verdict = check_consequence(claim, SamplerConfig(count=40))
    assert verdict.outcome == NO_COUNTEREXAMPLE and verdict.satisfied > 0


def test_plain_consequence_refuted():
    claim = Claim.consequence(parse_sentence("q (+) r"), q, Atom("r"))
    verdict = check_consequence(claim, SamplerConfig(count=50))
    assert verdict.refuted
    assert replay(verdict.countermodel).reproduces


def test_seed_determinism(rng):
    ctx = parse_sentence("K[a@t] (q (+) r)")
    qm = sound_model(rng, (1, 2))
    claim = Claim.consequence(ctx, ctx, parse_sentence("q (+) r"), scope=SampledScope(), quasi_model=qm)
    cfg = SamplerConfig(seed=11, count=60)
    a = check_consequence(claim, cfg, stop_at_first=False)
    b = check_consequence(claim, cfg, stop_at_first=False)
    assert a.to_dict() == b.to_dict()
    c = check_consequence(claim, SamplerConfig(seed=12, count=60), stop_at_first=False)
    assert a.diagnostics["generators"] == c.diagnostics["generators"]


def test_exhaustion():
    claim = Claim.consequence(parse_sentence("T(q, f, f)"), parse_sentence("T(q, f, f)"), q)
    with pytest.raises(SamplerExhausted):
        check_consequence(claim, SamplerConfig(count=20))


def test_agent_scope_uses_agent_perspective(rng):
    qm = sound_model(rng, (1,), HADAMARD_PERSPECTIVE)
    ctx = parse_sentence("K[a@t] q")
    claim = Claim.consequence(ctx, ctx, q, scope=AgentScope("a", "t"), quasi_model=qm)
    verdict = check_consequence(claim, SamplerConfig(count=30))
    assert verdict.outcome == NO_COUNTEREXAMPLE


def test_claim_validation():
    with pytest.raises(HoloqError):
        Claim("validity", q, q)
    with pytest.raises(HoloqError):
        Claim("consequence", q, q)
    with pytest.raises(HoloqError):
        SamplerConfig(count=0)
    with pytest.raises(HoloqError):
        SamplerConfig(generators=("quantum",))


def test_sampled_perspectives_start_with_presets():
    ps = sampled_perspectives(5, 0)
    assert ps[0] == IDENTITY and ps[1] == HADAMARD_PERSPECTIVE and len(ps) == 5
    assert len({p.u.tobytes() for p in ps}) == 5


def test_verify_witness():
    gamma = parse_sentence("T(q, not q, f)")
    claim = Claim.consequence(gamma, q, gamma)
    verdict = verify_witness(claim, IDENTITY, IDENT_MODEL, qlin.kron_all([P1, P1, P0]))
    assert verdict.refuted
    assert verdict.countermodel["witness"]["consequent_probability"] == 0
    held = verify_witness(claim, IDENTITY, IDENT_MODEL, qlin.kron_all([P0, P0, P0]))
    assert held.outcome == NO_COUNTEREXAMPLE and held.satisfied == 0


def test_replay_detects_tampering():
    claim = Claim.consequence(parse_sentence("q (+) r"), q, Atom("r"))
    doc = check_consequence(claim, SamplerConfig(count=50)).countermodel
    doc["witness"]["consequent_probability"] += 1e-6
    assert not replay(doc).reproduces
    del doc["witness"]
    with pytest.raises(ModelFileError):
        replay(doc)


# --------------------------------------------------------------------------
# the non-contradiction lemma


@pytest.mark.parametrize("alpha", ["q", "q (+) r", "sqrtid q"])
def test_lemma_bound(alpha):
    verdict = lemma_noncontradiction(parse_sentence(alpha), SamplerConfig(seed=8, count=150))
    assert verdict.outcome == NO_COUNTEREXAMPLE
    assert verdict.diagnostics["max_probability"] <= 0.5 + 1e-9
    assert verdict.diagnostics["perspectives"] >= 5


def test_lemma_true_constant():
    verdict = lemma_noncontradiction(TRUE, SamplerConfig(count=60))
    assert verdict.diagnostics["max_probability"] <= 1e-12


def test_lemma_on_the_entangled_model():
    ev = evaluate(IDENT_MODEL, IDENTITY, contradiction(q), entangled_top())
    assert ev.probability == pytest.approx(0.5, abs=1e-12)


def test_lemma_under_knowledge(rng):
    s = Knows("a", "t", contradiction(q))
    verdict = lemma_noncontradiction(q, SamplerConfig(count=60), sound_model(rng, (1, 3)))
    assert verdict.outcome == NO_COUNTEREXAMPLE
    assert s.child == contradiction(q) == conj(q, Not(q))


def test_brute_force_pair_bound(rng):
    sym, raw = brute_force_pair_bound(2000, rng)
    assert sym <= 0.5 + 1e-9
    assert raw > 0.5  # the bound needs normality


# --------------------------------------------------------------------------
# claim files


def test_parse_scope():
    assert parse_scope(None) == FixedScope(IDENTITY)
    assert parse_scope("per-agent:a@t") == AgentScope("a", "t")
    assert parse_scope("sampled") == SampledScope()
    assert parse_scope("H") == FixedScope(HADAMARD_PERSPECTIVE)
    with pytest.raises(ModelFileError):
        parse_scope("per-agent:a")


@pytest.mark.parametrize(
    "name, outcome", [("reflexive", NO_COUNTEREXAMPLE), ("situation1", NO_COUNTEREXAMPLE), ("situation6", COUNTEREXAMPLE)]
)
def test_example_claim_files(name, outcome):
    path = ROOT / "claims" / f"{name}.json"
    claim, cfg = claim_from_dict(json.loads(path.read_text()), path.parent)
    assert check_consequence(claim, cfg).outcome == outcome


def test_claim_file_errors():
    with pytest.raises(ModelFileError):
        claim_from_dict({"kind": "consequence", "context": "q"})
    with pytest.raises(ModelFileError):
        claim_from_dict({"kind": "belief"})
    claim, cfg = claim_from_dict({"kind": "truth", "sentence": "t", "sampler": {"count": 3}})
    assert claim.kind == "truth" and cfg.count == 3


def test_nested_knowledge_of_two_agents():
    sit = {
        ("a", "t"): EpistemicSituation.build("a", "t", IDENTITY, KrausMap(preset="identity")),
        ("b", "t"): EpistemicSituation.build("b", "t", IDENTITY, KrausMap(preset="dephase-in-basis")),
    }
    qm = QuasiModel(("t",), ("a", "b"), sit)
    ctx = parse_sentence("K[a@t] K[b@t] q")
    claim = Claim.consequence(ctx, ctx, q, quasi_model=qm)
    verdict = check_consequence(claim, SamplerConfig(count=100))
    assert verdict.outcome == NO_COUNTEREXAMPLE and verdict.satisfied > 0
    converse = Claim.consequence(ctx, q, ctx, quasi_model=qm)
    assert not check_consequence(converse, SamplerConfig(count=100)).refuted
