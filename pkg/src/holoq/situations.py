"""The nine epistemic situations as executable checks.

Positive situations are sampled consequence or truth checks over families
of harmonic models whose agents are sound for truth; negative ones replay
hand-built countermodels and write them as replay files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import qlin
from .errors import PresetError
from .gatelib import (
    HADAMARD_PERSPECTIVE,
    IDENTITY,
    EpistemicSituation,
    KrausMap,
    QuasiModel,
    TableMap,
    classical_kraus,
    epistemic_distance,
    fixes_truth_values,
    precedes,
    preset_kraus,
    random_kraus,
    random_perspective,
    random_sound_kraus,
    truth_dominating,
)
from .holistic import evaluate
from .judgments import (
    COUNTEREXAMPLE,
    REFUTE_TOL,
    TRUTH_TOL,
    Claim,
    SamplerConfig,
    check_consequence,
    contradiction,
    replay,
    search_truth,
    verify_witness,
)
from .lang import Knows, Understands, atomic_complexity, parse_sentence, subformulas

SOUND_POOL = ("identity", "dephase", "random-sound")
POOL_NAMES = SOUND_POOL + ("flip", "reset", "random")
TITLES = {
    1: "known sentences are true",
    2: "knowing of knowing implies knowing, not conversely",
    3: "non-harmonic models keep the agent-relative forms",
    4: "knowing that another knows implies truth, not own knowledge",
    5: "some sentences are known by every agent",
    6: "knowing a conjunction does not give knowledge of its members",
    7: "knowing the members does not give knowledge of their conjunction",
    8: "contradictions are never known",
    9: "one agent can know that another is wrong",
}
ALPHAS = ("q", "not q", "sqrtid q", "q (+) r", "q /\\ r", "U[a@t] q")


@dataclass
class ScenarioPresets:
    seed: int = 0
    samples: int = 200
    contradiction_samples: int = 500
    pool: tuple[str, ...] = SOUND_POOL
    out_dir: str | None = None


@dataclass
class Check:
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)


@dataclass
class ScenarioReport:
    k: int
    title: str
    checks: list = field(default_factory=list)
    artifacts: list = field(default_factory=list)

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def to_dict(self):
        return {
            "situation": self.k,
            "title": self.title,
            "passed": self.passed,
            "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in self.checks],
            "artifacts": self.artifacts,
        }


# --------------------------------------------------------------------------
# agent pools and model families


def _agent_kraus(name, arities, perspective, rng):
    """Realization named by ``name`` for every arity in ``arities``."""
    if name == "identity":
        return KrausMap(preset="identity")
    if name == "dephase":
        return KrausMap(preset="dephase-in-basis")
    if name == "flip":
        return KrausMap(preset="flip-in-basis")
    if name == "reset":
        return KrausMap(preset="reset-false-in-basis")
    if name == "random-sound":
        return KrausMap(
            {a: random_sound_kraus(a, perspective, rng, rank=int(rng.integers(1, 3))) for a in arities}
        )
    if name == "random":
        return KrausMap({a: random_kraus(a, rng, rank=int(rng.integers(1, 3))) for a in arities})
    raise PresetError(f"unknown agent preset {name!r}; choose from {', '.join(POOL_NAMES)}")


def epistemic_arities(*sentences):
    """Arities at which some K or U of the sentences acts."""
    out = {1}
    for s in sentences:
        for b in subformulas(s):
            if isinstance(b, (Knows, Understands)):
                out.add(atomic_complexity(b.child))
    return sorted(out)


def _perspective_for(index, rng):
    if index % 3 == 0:
        return IDENTITY
    if index % 3 == 1:
        return HADAMARD_PERSPECTIVE
    return random_perspective(rng)


@dataclass
class HarmonicFamily:
    """Harmonic models with agents drawn from a pool, one time ``t``."""

    agents: tuple[str, ...]
    arities: tuple[int, ...]
    pool: tuple[str, ...] = SOUND_POOL

    def draw(self, index, rng):
        p = _perspective_for(index, rng)
        epsit = {}
        for a in self.agents:
            name = self.pool[int(rng.integers(len(self.pool)))]
            know = _agent_kraus(name, self.arities, p, rng)
            epsit[(a, "t")] = EpistemicSituation.build(a, "t", p, know)
        return p, QuasiModel(("t",), tuple(self.agents), epsit)


@dataclass
class NonHarmonicFamily:
    """Each agent has its own perspective and a channel sound for it.

    The evaluation perspective is that of the first agent.
    """

    agents: tuple[str, ...]
    arities: tuple[int, ...]
    pool: tuple[str, ...] = SOUND_POOL

    def draw(self, index, rng):
        epsit = {}
        first = None
        for j, a in enumerate(self.agents):
            p = _perspective_for(index + j, rng) if j == 0 else random_perspective(rng)
            first = first or p
            name = self.pool[int(rng.integers(len(self.pool)))]
            epsit[(a, "t")] = EpistemicSituation.build(a, "t", p, _agent_kraus(name, self.arities, p, rng))
        return first, QuasiModel(("t",), tuple(self.agents), epsit)


def audit_pool(pool, arities, seed, sound_required=True):
    """Check that every pool entry is sound for truth; ``PresetError`` otherwise."""
    rng = np.random.default_rng([seed, 0xA0D1])
    rows = {}
    for name in pool:
        flags = []
        for p in (IDENTITY, HADAMARD_PERSPECTIVE, random_perspective(rng)):
            sit = EpistemicSituation.build("a", "t", p, _agent_kraus(name, arities, p, rng))
            flags.append(
                fixes_truth_values(sit.know)
                and truth_dominating(sit.know, arities, rng, samples=40)
            )
        rows[name] = all(flags)
    bad = [n for n, ok in rows.items() if not ok]
    if sound_required and bad:
        raise PresetError(
            f"agent preset(s) {', '.join(bad)} are not sound for truth; "
            "this situation needs sound epistemic capacities"
        )
    return rows


# --------------------------------------------------------------------------
# helpers


def _sampled_check(name, claim, cfg):
    v = check_consequence(claim, cfg)
    detail = {"claim": claim.describe(), **v.to_dict()}
    return Check(name, v.outcome != COUNTEREXAMPLE and v.samples >= cfg.count, detail)


def _witness_check(name, claim, perspective, qm, top, presets, report, slug):
    v = verify_witness(claim, perspective, qm, top)
    detail = {"claim": claim.describe(), **v.to_dict()}
    ok = v.outcome == COUNTEREXAMPLE
    if ok:
        doc = json.loads(json.dumps(v.countermodel))  # what a reader of the file sees
        r = replay(doc)
        detail["replay_deviation"] = r.max_deviation
        ok = r.reproduces
        if presets.out_dir:
            path = Path(presets.out_dir) / f"situation-{slug}.json"
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(json.dumps(v.countermodel, indent=1, sort_keys=True) + "\n")
            report.artifacts.append(str(path))
    return Check(name, ok, detail), v


def _cfg(presets, count=None, salt=0):
    return SamplerConfig(seed=presets.seed * 1000 + salt, count=count or presets.samples)


def _one_agent(know, perspective=IDENTITY, agents=("a",)):
    epsit = {
        (a, "t"): EpistemicSituation.build(a, "t", perspective, k) for a, k in zip(agents, know)
    }
    return QuasiModel(("t",), tuple(agents), epsit)


def _ket(bits):
    return qlin.pure_qumix(qlin.basis_ket(bits))


# --------------------------------------------------------------------------
# the situations


def _situation_1(presets, report):
    for i, a in enumerate(ALPHAS):
        alpha = parse_sentence(a)
        ctx = parse_sentence(f"K[a@t] ({a})")
        fam = HarmonicFamily(("a",), tuple(epistemic_arities(ctx)), presets.pool)
        claim = Claim.consequence(ctx, ctx, alpha, harmonic=True, quasi_model=fam)
        report.checks.append(_sampled_check(f"K a α ⊨ α, α = {a}", claim, _cfg(presets, salt=10 + i)))


def _situation_2(presets, report):
    for i, a in enumerate(("q", "q (+) r", "not q")):
        inner = parse_sentence(f"K[a@t] ({a})")
        ctx = parse_sentence(f"K[a@t] K[a@t] ({a})")
        fam = HarmonicFamily(("a",), tuple(epistemic_arities(ctx)), presets.pool)
        claim = Claim.consequence(ctx, ctx, inner, harmonic=True, quasi_model=fam)
        report.checks.append(_sampled_check(f"K a K a α ⊨ K a α, α = {a}", claim, _cfg(presets, salt=20 + i)))
    # converse: a sound-for-truth agent that relabels its inputs
    shift = KrausMap({1: np.eye(2)[None], 2: classical_kraus({"01": "11", "11": "10"}, 2)})
    qm = _one_agent([shift])
    rng = np.random.default_rng([presets.seed, 2])
    dominating = truth_dominating(qm.resolve("a", "t").know, [1, 2], rng)
    ctx = parse_sentence("K[a@t] K[a@t] (q (+) r)")
    claim = Claim.consequence(ctx, parse_sentence("K[a@t] (q (+) r)"), ctx, quasi_model=qm)
    v = check_consequence(claim, _cfg(presets, salt=29))
    detail = {"claim": claim.describe(), "agent_sound_for_truth": dominating, **v.to_dict()}
    ok = v.outcome == COUNTEREXAMPLE and dominating
    if ok:
        r = replay(json.loads(json.dumps(v.countermodel)))
        detail["replay_deviation"] = r.max_deviation
        ok = r.reproduces
        if presets.out_dir:
            path = Path(presets.out_dir) / "situation-2-converse.json"
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(json.dumps(v.countermodel, indent=1, sort_keys=True) + "\n")
            report.artifacts.append(str(path))
    report.checks.append(Check("K a α ⊭ K a K a α (countermodel)", ok, detail))


def _situation_3(presets, report):
    alphas = ("q", "q (+) r", "K[b@t] q")
    for i, a in enumerate(alphas):
        alpha = parse_sentence(a)
        ctx = parse_sentence(f"K[a@t] ({a})")
        fam = NonHarmonicFamily(("a", "b"), tuple(epistemic_arities(ctx)), presets.pool)
        claim = Claim.consequence(ctx, ctx, alpha, quasi_model=fam)
        report.checks.append(_sampled_check(f"3.1 K a α ⊨ α under T_a, α = {a}", claim, _cfg(presets, salt=30 + i)))
    for i, a in enumerate(alphas):
        inner = parse_sentence(f"K[a@t] ({a})")
        ctx = parse_sentence(f"K[a@t] K[a@t] ({a})")
        fam = NonHarmonicFamily(("a", "b"), tuple(epistemic_arities(ctx)), presets.pool)
        claim = Claim.consequence(ctx, ctx, inner, quasi_model=fam)
        report.checks.append(_sampled_check(f"3.2 K a K a α ⊨ K a α under T_a, α = {a}", claim, _cfg(presets, salt=35 + i)))


def _situation_4(presets, report):
    for i, a in enumerate(("q", "q (+) r")):
        alpha = parse_sentence(a)
        ctx = parse_sentence(f"K[a@t] K[b@t] ({a})")
        fam = HarmonicFamily(("a", "b"), tuple(epistemic_arities(ctx)), presets.pool)
        claim = Claim.consequence(ctx, ctx, alpha, harmonic=True, quasi_model=fam)
        report.checks.append(_sampled_check(f"K a K b α ⊨ α, α = {a}", claim, _cfg(presets, salt=40 + i)))
    ident = np.eye(2)[None]
    kb = KrausMap({1: ident, 2: classical_kraus({"01": "11"}, 2)})
    ka = KrausMap({1: ident, 2: classical_kraus({"01": "00"}, 2)})
    qm = _one_agent([ka, kb], agents=("a", "b"))
    rng = np.random.default_rng([presets.seed, 4])
    sound = all(truth_dominating(qm.resolve(x, "t").know, [1, 2], rng) for x in ("a", "b"))
    ctx = parse_sentence("T(K[a@t] K[b@t] (q (+) r), K[a@t] (q (+) r), f)")
    claim = Claim.consequence(
        ctx, parse_sentence("K[a@t] K[b@t] (q (+) r)"), parse_sentence("K[a@t] (q (+) r)"), quasi_model=qm
    )
    check, _ = _witness_check(
        "K a K b α ⊭ K a α (countermodel)", claim, IDENTITY, qm, _ket("01010"), presets, report, "4-negative"
    )
    check.detail["agents_sound_for_truth"] = sound
    check.passed = check.passed and sound
    report.checks.append(check)


def _situation_5(presets, report):
    for i, text in enumerate(("K[a@t] t", "K[a@t] not f")):
        s = parse_sentence(text)
        fam = HarmonicFamily(("a",), tuple(epistemic_arities(s)), presets.pool)
        claim = Claim.truth(s, quasi_model=fam)
        report.checks.append(_sampled_check(f"⊨ {text}", claim, _cfg(presets, salt=50 + i)))


def _situation_6(presets, report):
    table = TableMap({1: [(qlin.P1, qlin.P0)]})
    qm = _one_agent([table])
    conj = parse_sentence("K[a@t] (q /\\ r)")
    for member, bits in (("q", "11010"), ("r", "11010")):
        beta = parse_sentence(f"K[a@t] {member}")
        ctx = parse_sentence(f"T(K[a@t] (q /\\ r), K[a@t] {member}, f)")
        claim = Claim.consequence(ctx, conj, beta, quasi_model=qm)
        check, _ = _witness_check(
            f"K a (q ∧ r) ⊭ K a {member} (countermodel)", claim, IDENTITY, qm, _ket(bits), presets, report, f"6-{member}"
        )
        report.checks.append(check)


def _situation_7(presets, report):
    know = KrausMap({1: np.eye(2)[None], 3: preset_kraus("reset-false-in-basis", 3, IDENTITY)})
    qm = _one_agent([know])
    ctx = parse_sentence("T(T(K[a@t] q, K[a@t] r, f), K[a@t] (q /\\ r), f)")
    claim = Claim.consequence(
        ctx,
        [parse_sentence("K[a@t] q"), parse_sentence("K[a@t] r")],
        parse_sentence("K[a@t] (q /\\ r)"),
        quasi_model=qm,
    )
    check, _ = _witness_check(
        "K a q, K a r ⊭ K a (q ∧ r) (countermodel)", claim, IDENTITY, qm, _ket("1101100"), presets, report, "7"
    )
    report.checks.append(check)


def _situation_8(presets, report):
    for i, a in enumerate(("q", "q (+) r")):
        s = Knows("a", "t", contradiction(parse_sentence(a)))
        fam = HarmonicFamily(("a",), tuple(epistemic_arities(s)), presets.pool)
        cfg = SamplerConfig(seed=presets.seed * 1000 + 80 + i, count=presets.contradiction_samples)
        v = search_truth(s, cfg, fam)
        detail = {"sentence": str(s), **v.to_dict()}
        ok = v.outcome != COUNTEREXAMPLE and v.samples >= 500 and v.diagnostics["perspectives"] >= 5
        report.checks.append(Check(f"no model knows a contradiction, α = {a}", ok, detail))


def _situation_9(presets, report):
    ta, tb = IDENTITY, HADAMARD_PERSPECTIVE
    kb = KrausMap(preset="flip-in-basis", basis=ta)
    ka = KrausMap(preset="identity")
    qm = QuasiModel(
        ("t",),
        ("a", "b"),
        {
            ("a", "t"): EpistemicSituation.build("a", "t", ta, ka),
            ("b", "t"): EpistemicSituation.build("b", "t", tb, kb),
        },
    )
    d = epistemic_distance(ta, tb)
    report.checks.append(Check("epistemic distance d(T_a, T_b) ≥ ½", d >= 0.5, {"distance": d}))
    flipped = qlin.apply_kraus_local(qlin.P0, 0, kb.kraus(1, tb))
    report.checks.append(
        Check("K_b maps T_a-falsity to T_a-truth", qlin.qumix_close(flipped, qlin.P1), {})
    )
    report.checks.append(
        Check("K_a fixes T_a truth values", fixes_truth_values(qm.resolve("a", "t").know), {})
    )
    s = parse_sentence("K[a@t] K[b@t] f")
    ev = evaluate(qm, ta, s, qlin.P0)
    level2 = ev.level_meaning(2)
    p_tb = qlin.probability(tb.u, level2)
    report.checks.append(
        Check(
            "⊨ K a K b f under T_a",
            abs(ev.probability - 1) <= 1e-12,
            {"probability": ev.probability},
        )
    )
    report.checks.append(
        Check(
            "T_b-probability of the level-2 meaning is not 1",
            p_tb < 1 - REFUTE_TOL,
            {"probability": p_tb, "Ta_truth_precedes_Ta_falsity_under_Tb": precedes(qlin.P1, qlin.P0, tb)},
        )
    )
    own = evaluate(qm, tb, parse_sentence("K[b@t] f"), qlin.pure_qumix(tb.falsity))
    report.checks.append(
        Check(
            "K b f is not true under T_b",
            own.probability < 1 - TRUTH_TOL,
            {"probability": own.probability},
        )
    )


_RUNNERS = {
    1: _situation_1,
    2: _situation_2,
    3: _situation_3,
    4: _situation_4,
    5: _situation_5,
    6: _situation_6,
    7: _situation_7,
    8: _situation_8,
    9: _situation_9,
}
_NEEDS_SOUND = {1, 2, 3, 4, 5, 8}


def run_situation(k, presets: ScenarioPresets | None = None) -> ScenarioReport:
    presets = presets or ScenarioPresets()
    if k not in _RUNNERS:
        raise PresetError(f"situations are numbered 1 to 9, got {k}")
    for name in presets.pool:
        if name not in POOL_NAMES:
            raise PresetError(f"unknown agent preset {name!r}; choose from {', '.join(POOL_NAMES)}")
    report = ScenarioReport(k, TITLES[k])
    if k in _NEEDS_SOUND:
        flags = audit_pool(presets.pool, [1, 2, 3], presets.seed)
        report.checks.append(Check("agent pool is sound for truth", all(flags.values()), flags))
    _RUNNERS[k](presets, report)
    return report


def run_all(presets: ScenarioPresets | None = None) -> list[ScenarioReport]:
    return [run_situation(k, presets) for k in range(1, 10)]
