"""Holistic evaluation of a sentence: level meanings and contextual meanings.

A top-level qumix on the atomic occurrences of a sentence is pushed down
its pseudo-gate tree; each level's global meaning determines the meanings
of its occurrences by partial trace.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from . import qlin
from .errors import ConstraintViolation, DimensionError, InvalidQumix
from .gatelib import (
    GateSpec,
    PseudoGate,
    QuasiModel,
    TruthPerspective,
    apply_epistemic,
    apply_gate,
    apply_pseudo_gate,
    pseudo_gate_tree,
    truth_projectors,
)
from .lang import (
    FalseConst,
    Knows,
    Not,
    OccurrencePath,
    Sentence,
    SqrtId,
    SyntacticalTree,
    Toffoli,
    TrueConst,
    Understands,
    Xor,
    atomic_complexity,
    build_syntactical_tree,
    is_atomic,
    print_sentence,
)

TOL = 1e-9


@dataclass(frozen=True, eq=False)
class HolisticEvaluation:
    sentence: Sentence
    perspective: TruthPerspective
    quasi_model: QuasiModel | None
    tree: SyntacticalTree
    gates: tuple[PseudoGate, ...]  # O^(k-1) ... O^(1)
    levels: tuple[np.ndarray, ...]  # levels[i - 1] is the meaning of Level_i
    constraint_defects: tuple = ()  # (path, sentence, defect) per t/f occurrence

    @property
    def height(self):
        return self.tree.height

    @property
    def meaning(self):
        """Global meaning of the sentence (its level-1 qumix)."""
        return self.levels[0]

    def level_meaning(self, i):
        return self.levels[i - 1]

    def gate_into(self, i):
        """The pseudo-gate producing level ``i`` from level ``i + 1``."""
        return self.gates[self.height - 1 - i]

    @property
    def probability(self):
        return qlin.probability(self.perspective.u, self.meaning, check=False)


def _constraint_defects(tree, levels, perspective):
    false_p, true_p = truth_projectors(perspective)
    out = []
    for path in tree.paths():
        b = tree.occupant(path)
        if isinstance(b, (TrueConst, FalseConst)):
            target = true_p if isinstance(b, TrueConst) else false_p
            start, stop = tree.span(path)
            local = qlin.reduce_span(levels[path.level - 1], start, stop)
            out.append((path, b, float(np.max(np.abs(local - target)))))
    return tuple(out)


def evaluate(qm, perspective, s, top, tree=None, gates=None, check=True) -> HolisticEvaluation:
    """Push ``top`` through the pseudo-gate tree of ``s``.

    Raises ``ConstraintViolation`` when some ``t``/``f`` occurrence does not
    carry the perspective's truth/falsity projector.
    """
    tree = tree or build_syntactical_tree(s)
    top = np.asarray(top, dtype=complex)
    if qlin.n_qubits(top) != tree.n_qubits:
        raise DimensionError(
            f"top state has {qlin.n_qubits(top)} qubits, the sentence needs {tree.n_qubits}"
        )
    if check:
        report = qlin.validate_qumix(top)
        if not report.passed:
            raise InvalidQumix(report.describe())
    gates = tuple(gates if gates is not None else pseudo_gate_tree(tree, perspective, qm))
    chain = [top]
    for g in gates:
        chain.append(apply_pseudo_gate(g, chain[-1]))
    levels = tuple(reversed(chain))
    defects = _constraint_defects(tree, levels, perspective)
    if check:
        for path, b, defect in defects:
            if defect > TOL:
                raise ConstraintViolation(path, b, defect)
    return HolisticEvaluation(s, perspective, qm, tree, gates, levels, defects)


def contextual_meaning(ev: HolisticEvaluation, path) -> np.ndarray:
    path = ev.tree.check_path(path)
    start, stop = ev.tree.span(path)
    return qlin.reduce_span(ev.levels[path.level - 1], start, stop)


def contextual_probability(ev: HolisticEvaluation, path) -> float:
    return qlin.probability(ev.perspective.u, contextual_meaning(ev, path), check=False)


def first_occurrence(ev: HolisticEvaluation, sub: Sentence) -> OccurrencePath:
    """Occurrence of ``sub`` at the lowest-numbered level, leftmost first."""
    for i, level in enumerate(ev.tree.levels, start=1):
        for j, b in enumerate(level, start=1):
            if b == sub:
                return OccurrencePath(i, j)
    raise KeyError(f"{print_sentence(sub)} does not occur in {print_sentence(ev.sentence)}")


# --------------------------------------------------------------------------
# normality


@dataclass
class NormalityReport:
    passed: bool
    groups: dict = field(default_factory=dict)  # sentence -> [paths]
    violations: list = field(default_factory=list)  # (sentence, path_a, path_b, distance)


def check_normal(ev: HolisticEvaluation, tol=TOL) -> NormalityReport:
    groups = defaultdict(list)
    for path in ev.tree.paths():
        groups[ev.tree.occupant(path)].append(path)
    violations = []
    for sub, paths in groups.items():
        if len(paths) < 2:
            continue
        ref = contextual_meaning(ev, paths[0])
        for other in paths[1:]:
            dist = float(np.max(np.abs(contextual_meaning(ev, other) - ref)))
            if dist > tol:
                violations.append((sub, paths[0], other, dist))
    return NormalityReport(not violations, dict(groups), violations)


# --------------------------------------------------------------------------
# commutation of contextual meanings with connectives

CONNECTIVES = {
    Not: "not",
    SqrtId: "sqrtid",
    Toffoli: "toffoli",
    Xor: "xor",
    Understands: "U",
    Knows: "K",
}


@dataclass
class CommutationReport:
    checked: dict = field(default_factory=lambda: dict.fromkeys(CONNECTIVES.values(), 0))
    failures: list = field(default_factory=list)  # (connective, path, distance)
    max_defect: float = 0.0

    @property
    def passed(self):
        return not self.failures


def connective_image(ev: HolisticEvaluation, path) -> np.ndarray:
    """The principal connective applied to the joint meaning of the parts.

    For unary connectives this is the operation applied to the child's
    contextual meaning; for ``T`` and ``(+)`` it acts on the joint
    reduction of the children, which is the parent's span one level up.
    """
    path = ev.tree.check_path(path)
    b = ev.tree.occupant(path)
    if is_atomic(b) or path.level == ev.height:
        raise ValueError("atomic occurrences have no principal connective")
    start, stop = ev.tree.span(path)
    below = qlin.reduce_span(ev.levels[path.level], start, stop)
    if isinstance(b, (Understands, Knows)):
        sit = ev.quasi_model.resolve(b.agent, b.time)
        op = sit.know if isinstance(b, Knows) else sit.understand
        return apply_epistemic(op, below)
    return apply_gate(_gate_for(b, ev.perspective), below)


def _gate_for(b, perspective):
    if isinstance(b, Not):
        return GateSpec("not", (atomic_complexity(b.child),), perspective)
    if isinstance(b, SqrtId):
        return GateSpec("sqrtid", (atomic_complexity(b.child),), perspective)
    arities = tuple(atomic_complexity(c) for c in b.children)
    return GateSpec("toffoli" if isinstance(b, Toffoli) else "xor", arities, perspective)


def compositional_image(ev: HolisticEvaluation, path) -> np.ndarray:
    """The connective applied to the tensor product of the parts' separate meanings.

    Differs from the holistic meaning whenever the parts are entangled.
    """
    path = ev.tree.check_path(path)
    b = ev.tree.occupant(path)
    parts = [contextual_meaning(ev, c) for c in ev.tree.child_paths(path)]
    joined = qlin.kron_all(parts)
    if isinstance(b, (Understands, Knows)):
        sit = ev.quasi_model.resolve(b.agent, b.time)
        op = sit.know if isinstance(b, Knows) else sit.understand
        return apply_epistemic(op, joined)
    return apply_gate(_gate_for(b, ev.perspective), joined)


def check_commutation(ev: HolisticEvaluation, tol=TOL) -> CommutationReport:
    report = CommutationReport()
    for path in ev.tree.paths():
        b = ev.tree.occupant(path)
        name = CONNECTIVES.get(type(b))
        if name is None or path.level == ev.height:
            continue
        lhs = contextual_meaning(ev, path)
        rhs = connective_image(ev, path)
        dist = float(np.max(np.abs(lhs - rhs)))
        report.checked[name] += 1
        report.max_defect = max(report.max_defect, dist)
        if dist > tol:
            report.failures.append((name, path, dist))
    return report


# --------------------------------------------------------------------------
# assignments and reports


class ModelAssignment:
    """Top-level meanings per sentence and perspective: the finite part of a model."""

    def __init__(self, entries=None):
        self._entries: dict[Sentence, list[tuple[TruthPerspective, np.ndarray]]] = {}
        for (s, perspective), top in (entries or {}).items():
            self.assign(s, perspective, top)

    def assign(self, s, perspective, top):
        top = np.asarray(top, dtype=complex)
        if qlin.n_qubits(top) != atomic_complexity(s):
            raise DimensionError(
                f"{print_sentence(s)} lives on {atomic_complexity(s)} qubits, "
                f"got a {qlin.n_qubits(top)}-qubit state"
            )
        rows = self._entries.setdefault(s, [])
        rows[:] = [(p, t) for p, t in rows if p != perspective]
        rows.append((perspective, top))

    def top_for(self, s, perspective):
        for p, top in self._entries.get(s, ()):
            if p == perspective:
                return top
        raise KeyError(
            f"no assignment for {print_sentence(s)} under perspective {perspective.name}"
        )

    def items(self):
        for s, rows in self._entries.items():
            for p, top in rows:
                yield s, p, top

    def __contains__(self, key):
        s, perspective = key
        return any(p == perspective for p, _ in self._entries.get(s, ()))

    def __len__(self):
        return sum(len(r) for r in self._entries.values())


def _state_digest(rho, elide):
    n = qlin.n_qubits(rho)
    if n > elide:
        return {
            "qubits": n,
            "elided": True,
            "purity": float(np.real(np.trace(rho @ rho))),
            "diagonal_max": float(np.max(np.real(np.diag(rho)))),
        }
    return {"qubits": n, "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in rho]}


def evaluation_report(ev: HolisticEvaluation, elide_above=6, commutation=True) -> dict:
    normal = check_normal(ev)
    out = {
        "sentence": print_sentence(ev.sentence),
        "perspective": ev.perspective.name,
        "height": ev.height,
        "qubits": ev.tree.n_qubits,
        "probability": ev.probability,
        "levels": [
            {
                "level": i,
                "occurrences": [print_sentence(b) for b in ev.tree.level(i)],
                "state": _state_digest(ev.level_meaning(i), elide_above),
            }
            for i in range(ev.height, 0, -1)
        ],
        "constraint": {
            "passed": all(d <= TOL for _, _, d in ev.constraint_defects),
            "occurrences": [
                {"level": p.level, "position": p.position, "sentence": print_sentence(b), "defect": d}
                for p, b, d in ev.constraint_defects
            ],
        },
        "normality": {
            "passed": normal.passed,
            "violations": [
                {"sentence": print_sentence(s), "a": list(a), "b": list(b), "distance": d}
                for s, a, b, d in normal.violations
            ],
        },
    }
    if commutation:
        comm = check_commutation(ev)
        out["commutation"] = {
            "passed": comm.passed,
            "checked": {str(k): v for k, v in comm.checked.items()},
            "max_defect": comm.max_defect,
        }
    return out


def _fmt_state(rho):
    n = qlin.n_qubits(rho)
    lines = []
    for row in rho:
        cells = []
        for z in row:
            if abs(z.imag) < 1e-12:
                cells.append(f"{z.real: .4f}")
            else:
                cells.append(f"{z.real: .3f}{z.imag:+.3f}j")
        lines.append("    [" + " ".join(cells) + "]")
    return f"  ({n} qubits)\n" + "\n".join(lines)


def render_text(ev: HolisticEvaluation, elide_above=6) -> str:
    rep = evaluation_report(ev, elide_above)
    lines = [f"sentence: {rep['sentence']}", f"perspective: {rep['perspective']}"]
    for entry in rep["levels"]:
        i = entry["level"]
        lines.append(f"Level_{i}: (" + ", ".join(entry["occurrences"]) + ")")
        if entry["state"].get("elided"):
            st = entry["state"]
            lines.append(f"  ({st['qubits']} qubits, elided; purity {st['purity']:.6g})")
        else:
            lines.append(_fmt_state(ev.level_meaning(i)))
    lines.append(f"p = {rep['probability']:.12g}")
    lines.append("constraint: " + ("ok" if rep["constraint"]["passed"] else "VIOLATED"))
    lines.append("normal: " + ("yes" if rep["normality"]["passed"] else "no"))
    if "commutation" in rep:
        lines.append("commutation: " + ("ok" if rep["commutation"]["passed"] else "FAILED"))
    return "\n".join(lines)
