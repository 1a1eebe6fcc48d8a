import numpy as np
import pytest

from holoq import qlin
from holoq.lang import Atom, FALSE, TRUE, Knows, Not, SqrtId, Toffoli, Understands, Xor


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def sup():
    return np.array([1, 1], dtype=complex) / np.sqrt(2)


def worked_top():
    """P_psi with psi = sup ⊗ sup ⊗ |0>."""
    return qlin.pure_qumix(np.kron(np.kron(sup(), sup()), qlin.basis_ket("0")))


def entangled_top():
    return qlin.pure_qumix(qlin.ket_from_labels({"010": 1, "100": 1}))


ATOM_NAMES = ("q", "r", "s")


def random_sentence(rng, depth, epistemic=True):
    """Random AST of at most ``depth`` connective layers."""
    if depth == 0 or rng.random() < 0.25:
        roll = rng.random()
        if roll < 0.1:
            return TRUE
        if roll < 0.2:
            return FALSE
        return Atom(ATOM_NAMES[int(rng.integers(len(ATOM_NAMES)))])
    kinds = ["not", "sqrtid", "toffoli", "xor"] + (["K", "U"] if epistemic else [])
    kind = kinds[int(rng.integers(len(kinds)))]
    sub = lambda: random_sentence(rng, depth - 1, epistemic)  # noqa: E731
    if kind == "not":
        return Not(sub())
    if kind == "sqrtid":
        return SqrtId(sub())
    if kind == "toffoli":
        return Toffoli(sub(), sub(), sub())
    if kind == "xor":
        return Xor(sub(), sub())
    agent = "ab"[int(rng.integers(2))]
    return (Knows if kind == "K" else Understands)(agent, "t", sub())


def random_channel_model(rng, sentence, rank=2):
    """Agents a and b at time t with random channels at every arity ``sentence`` needs."""
    from holoq.gatelib import EpistemicSituation, KrausMap, QuasiModel, random_kraus, random_perspective
    from holoq.situations import epistemic_arities

    arities = epistemic_arities(sentence)
    epsit = {}
    for agent in "ab":
        p = random_perspective(rng)
        know = KrausMap({a: random_kraus(a, rng, rank) for a in arities})
        understand = KrausMap({a: random_kraus(a, rng, rank) for a in arities})
        epsit[(agent, "t")] = EpistemicSituation.build(agent, "t", p, know, understand)
    return QuasiModel(("t",), ("a", "b"), epsit)


def commutation_triple(rng, max_depth=4, max_qubits=5):
    """(quasi-model, perspective, sentence, normal top state) for the commutation suite."""
    from holoq.gatelib import random_perspective
    from holoq.lang import atomic_complexity, build_syntactical_tree
    from holoq.sampler import GENERATORS, TopSampler

    while True:
        s = random_sentence(rng, int(rng.integers(1, max_depth + 1)))
        if s.children and atomic_complexity(s) <= max_qubits:
            break
    qm = random_channel_model(rng, s)
    perspective = random_perspective(rng)
    sampler = TopSampler(build_syntactical_tree(s))
    kind = GENERATORS[int(rng.integers(len(GENERATORS) - 1))]  # all but targeted
    return qm, perspective, s, sampler.draw(kind, perspective, rng)


ACCEPTANCE_LINES: list[str] = []


def record_acceptance(number, title, passed, detail=""):
    line = f"criterion {number} {'PASS' if passed else 'FAIL'}: {title}" + (f" ({detail})" if detail else "")
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
