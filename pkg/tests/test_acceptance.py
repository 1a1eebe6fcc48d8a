"""Acceptance criteria, one test per criterion, each reporting PASS or FAIL."""

import json
import time

import numpy as np

from holoq import qlin
from holoq.cli import main
from holoq.gatelib import (
    HADAMARD_PERSPECTIVE,
    IDENTITY,
    EpistemicSituation,
    GateSpec,
    KrausMap,
    QuasiModel,
    apply_epistemic,
    epistemic_distance,
    gate_unitary,
    random_perspective,
    single_agent_model,
    truth_projectors,
)
from holoq.holistic import check_commutation, check_normal, compositional_image, contextual_meaning, evaluate
from holoq.judgments import (
    NO_COUNTEREXAMPLE,
    Claim,
    SamplerConfig,
    brute_force_pair_bound,
    check_consequence,
    contradiction,
    lemma_noncontradiction,
    replay,
)
from holoq.lang import Atom, parse_sentence, print_sentence

from conftest import entangled_top, worked_top, random_sentence, record_acceptance, commutation_triple

P0 = np.diag([1, 0]).astype(complex)
MIX = np.eye(2, dtype=complex) / 2
IDENT_MODEL = single_agent_model(KrausMap(preset="identity"))


def ket(labels):
    return qlin.pure_qumix(qlin.ket_from_labels(labels))


def close(a, b, tol=1e-9):
    return float(np.max(np.abs(a - b))) <= tol


def test_criterion_1_worked_example():
    start = time.perf_counter()
    ev = evaluate(IDENT_MODEL, IDENTITY, parse_sentence("K[a@t] not T(q, not q, f)"), worked_top())
    elapsed = time.perf_counter() - start
    state_ok = close(ev.meaning, ket({"011": 1, "001": 1, "110": 1, "101": 1}))
    p_ok = abs(ev.probability - 0.75) <= 1e-12
    ok = state_ok and p_ok and elapsed < 1.0
    assert record_acceptance(1, "worked example", ok, f"p = {ev.probability!r}, {elapsed:.3f} s")


def test_criterion_2_holism_counterexample():
    start = time.perf_counter()
    gamma = parse_sentence("T(q, not q, f)")
    ev = evaluate(IDENT_MODEL, IDENTITY, gamma, entangled_top())
    root_ok = close(ev.meaning, ket({"000": 1, "111": 1}))
    p_ok = abs(ev.probability - 0.5) <= 1e-12
    parts_ok = all(close(contextual_meaning(ev, path), MIX) for path in [(3, 1), (3, 2), (2, 1), (2, 2)])
    p_product = qlin.probability(IDENTITY.u, compositional_image(ev, (1, 1)))
    product_ok = abs(p_product - 0.25) <= 1e-12
    elapsed = time.perf_counter() - start
    ok = root_ok and p_ok and parts_ok and product_ok and elapsed < 1.0
    detail = f"holistic p = {ev.probability!r}, compositional p = {p_product!r}, {elapsed:.3f} s"
    assert record_acceptance(2, "holism counterexample", ok, detail)


def test_criterion_3_situation_nine():
    ta, tb = IDENTITY, HADAMARD_PERSPECTIVE
    sits = {
        ("a", "t"): EpistemicSituation.build("a", "t", ta, KrausMap(preset="identity")),
        ("b", "t"): EpistemicSituation.build("b", "t", tb, KrausMap(preset="flip-in-basis", basis=ta)),
    }
    qm = QuasiModel(("t",), ("a", "b"), sits)
    distance = epistemic_distance(ta, tb)
    f_a, t_a = truth_projectors(ta)
    flip_ok = close(apply_epistemic(sits[("b", "t")].know, f_a), t_a)
    ev = evaluate(qm, ta, parse_sentence("K[a@t] K[b@t] f"), f_a)
    p_a = ev.probability
    p_b = qlin.probability(tb.u, ev.level_meaning(2))
    ok = distance == 0.5 and flip_ok and abs(p_a - 1) <= 1e-12 and p_b < 1 - 1e-6
    detail = f"distance = {distance!r}, p_Ta = {p_a!r}, p_Tb(level 2) = {p_b:.12g}"
    assert record_acceptance(3, "one agent knows another is wrong", ok, detail)


def test_criterion_4_commutation_suite():
    rng = np.random.default_rng(4)
    start = time.perf_counter()
    triples = normal = 0
    per_connective = {}
    failures = []
    depth_seen = qubits_seen = 0
    while triples < 300:
        qm, p, s, top = commutation_triple(rng, max_depth=4, max_qubits=5)
        triples += 1
        ev = evaluate(qm, p, s, top)
        qubits_seen = max(qubits_seen, ev.tree.n_qubits)
        depth_seen = max(depth_seen, ev.height - 1)
        if not check_normal(ev).passed:
            continue
        normal += 1
        report = check_commutation(ev)
        for c, n in report.checked.items():
            per_connective[c] = per_connective.get(c, 0) + n
        failures += [(print_sentence(s), f) for f in report.failures]
    elapsed = time.perf_counter() - start
    ok = (
        normal >= 200
        and not failures
        and len(per_connective) == 6
        and all(per_connective.values())
        and depth_seen <= 4
        and qubits_seen <= 5
        and elapsed < 60
    )
    detail = f"{normal} normal triples, checks per connective {per_connective}, {elapsed:.1f} s"
    assert record_acceptance(4, "connectives commute with contextual meanings", ok, detail), failures[:3]


def test_criterion_5_noncontradiction():
    q = Atom("q")
    v = lemma_noncontradiction(q, SamplerConfig(seed=5, count=500))
    max_p = v.diagnostics["max_probability"]
    sampled_ok = (
        v.outcome == NO_COUNTEREXAMPLE
        and v.samples >= 500
        and v.diagnostics["perspectives"] >= 5
        and max_p <= 0.5 + 1e-9
    )
    p_entangled = evaluate(IDENT_MODEL, IDENTITY, contradiction(q), entangled_top()).probability
    entangled_ok = abs(p_entangled - 0.5) <= 1e-12
    sym, raw = brute_force_pair_bound(10_000, np.random.default_rng(55))
    brute_ok = sym <= 0.5 + 1e-9
    ok = sampled_ok and entangled_ok and brute_ok
    detail = (
        f"sampled max {max_p:.12g} over {v.diagnostics['perspectives']} perspectives, "
        f"entangled {p_entangled!r}, brute-force symmetric max {sym:.6f} (unrestricted {raw:.6f})"
    )
    assert record_acceptance(5, "no contradiction is true", ok, detail)


def test_criterion_6_scenario_battery(tmp_path, capsys):
    start = time.perf_counter()
    code = main(["scenario", "--all", "--json", "--out-dir", str(tmp_path)])
    elapsed = time.perf_counter() - start
    reports = json.loads(capsys.readouterr().out)
    passed = [r["situation"] for r in reports if r["passed"]]
    files = sorted(tmp_path.glob("*.json"))
    replays = [replay(json.loads(f.read_text())).reproduces for f in files]
    witnesses = {r["situation"] for r in reports if r["artifacts"]}
    ok = code == 0 and len(passed) == 9 and all(replays) and {4, 6, 7} <= witnesses and elapsed < 300
    detail = f"{len(passed)}/9 situations, {len(files)} replayable countermodels, {elapsed:.1f} s"
    assert record_acceptance(6, "scenario battery", ok, detail)


def test_criterion_7_infrastructure():
    rng = np.random.default_rng(7)
    round_trips = sum(
        parse_sentence(print_sentence(s)) == s for s in (random_sentence(rng, 6) for _ in range(1000))
    )
    trace_ok = True
    unitary_ok = True
    for _ in range(100):
        n = int(rng.integers(1, 6))
        rho = qlin.random_mixed(n, rng)
        keep = sorted(int(x) + 1 for x in rng.choice(n, size=int(rng.integers(1, n + 1)), replace=False))
        trace_ok &= abs(np.trace(qlin.reduce(rho, keep)) - 1) <= 1e-9
        kind = ["not", "sqrtid", "toffoli", "xor"][int(rng.integers(4))]
        arities = {"toffoli": (1, 1, 1), "xor": (1, 2)}.get(kind, (n,))
        u = gate_unitary(GateSpec(kind, arities, random_perspective(rng)))
        unitary_ok &= float(np.max(np.abs(u.conj().T @ u - np.eye(len(u))))) <= 1e-9
    claim = Claim.consequence(parse_sentence("q (+) r"), Atom("q"), Atom("r"))
    doc = json.loads(json.dumps(check_consequence(claim, SamplerConfig(count=50)).countermodel))
    rep = replay(doc)
    ok = round_trips == 1000 and trace_ok and unitary_ok and rep.reproduces and rep.max_deviation <= 1e-12
    detail = f"{round_trips}/1000 round trips, replay deviation {rep.max_deviation:.1e}"
    assert record_acceptance(7, "infrastructure properties", ok, detail)
