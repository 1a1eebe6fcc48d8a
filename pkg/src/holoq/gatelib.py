"""Truth-perspectives, gates, epistemic operations and pseudo-gate trees.

Canonical (identity-perspective) gate actions on blocks of qubits:

* ``NOT^(n)  = I^(n-1) ⊗ X``  flips the last qubit;
* ``SQRT^(n) = I^(n-1) ⊗ H``  acts as Hadamard on the last qubit;
* ``T^(u,v,w)`` flips the last qubit of block 3 when the last qubits of
  blocks 1 and 2 are both set;
* ``XOR^(u,v)`` flips the last qubit of block 2 when the last qubit of
  block 1 is set.

Under a truth-perspective ``T`` every gate is conjugated by ``T^{⊗n}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Union

import numpy as np

from . import qlin
from .errors import (
    DimensionError,
    HoloqError,
    InvalidQumix,
    MissingArity,
    NonUnitaryError,
    NotFactorizable,
    PresetError,
    TableMiss,
    UnresolvedName,
)
from .lang import (
    Knows,
    Not,
    SqrtId,
    SyntacticalTree,
    Toffoli,
    Understands,
    Xor,
    atomic_complexity,
    build_syntactical_tree,
    is_atomic,
)

UNITARY_TOL = 1e-9
X = np.array([[0, 1], [1, 0]], dtype=complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


# --------------------------------------------------------------------------
# truth-perspectives


@dataclass(frozen=True, eq=False)
class TruthPerspective:
    """A 2×2 unitary whose columns are the falsity and truth kets."""

    u: np.ndarray
    name: str = ""

    def __post_init__(self):
        u = np.array(self.u, dtype=complex)
        if u.shape != (2, 2):
            raise DimensionError(f"a truth-perspective is 2×2, got {u.shape}")
        defect = np.max(np.abs(u.conj().T @ u - np.eye(2)))
        if defect > UNITARY_TOL:
            raise NonUnitaryError(f"perspective matrix is not unitary (defect {defect:.3e})")
        u.setflags(write=False)
        object.__setattr__(self, "u", u)
        if not self.name:
            object.__setattr__(self, "name", _matrix_label(u))

    def __eq__(self, other):
        if not isinstance(other, TruthPerspective):
            return NotImplemented
        return bool(np.allclose(self.u, other.u, atol=UNITARY_TOL, rtol=0))

    def __hash__(self):
        return hash(np.round(self.u, 9).tobytes())

    def __repr__(self):
        return f"TruthPerspective({self.name})"

    @property
    def falsity(self):
        return self.u[:, 0]

    @property
    def truth(self):
        return self.u[:, 1]

    def power(self, n):
        """``T^{⊗n}``."""
        return qlin.kron_all([self.u] * n)

    @property
    def is_identity(self):
        return bool(np.allclose(self.u, np.eye(2), atol=UNITARY_TOL, rtol=0))


def _matrix_label(u):
    flat = ",".join(f"{z.real:.6g}{z.imag:+.6g}j" for z in u.reshape(-1))
    return f"matrix[{flat}]"


PRESET_PERSPECTIVES = {
    "I": np.eye(2, dtype=complex),
    "H": HADAMARD,
    "X": X,
}


def perspective_from_matrix(entries, name=""):
    """Build a perspective from a 2×2 matrix or a preset name (``I``, ``H``, ``X``)."""
    if isinstance(entries, str):
        try:
            return TruthPerspective(PRESET_PERSPECTIVES[entries], entries)
        except KeyError:
            raise PresetError(f"unknown perspective preset {entries!r}") from None
    return TruthPerspective(np.asarray(entries, dtype=complex), name)


IDENTITY = perspective_from_matrix("I")
HADAMARD_PERSPECTIVE = perspective_from_matrix("H")


def random_perspective(rng, name=""):
    return TruthPerspective(qlin.random_unitary(2, rng), name)


def truth_projectors(perspective):
    """(T-falsity, T-truth) single-qubit projectors."""
    u = perspective.u
    return (u @ qlin.P0 @ u.conj().T, u @ qlin.P1 @ u.conj().T)


def epistemic_distance(pa, pb):
    """``1 - |<1_b|1_a>|^2``: how far a's truth lies from b's truth.

    Averaged with the equal quantity ``|<1_b|0_a>|^2`` so the rounding of the
    two forms cancels (``d(I, H)`` comes out as exactly 0.5).
    """
    truth_overlap = abs(np.vdot(pb.truth, pa.truth)) ** 2
    cross_overlap = abs(np.vdot(pb.truth, pa.falsity)) ** 2
    return float(((1.0 - truth_overlap) + cross_overlap) / 2)


def precedes(rho, sigma, perspective):
    """Surrogate preorder: rho ⪯ sigma iff p(rho) <= p(sigma) under the perspective."""
    return qlin.probability(perspective.u, rho) <= qlin.probability(perspective.u, sigma) + 1e-12


# --------------------------------------------------------------------------
# gates

GATE_KINDS = ("identity", "not", "sqrtid", "toffoli", "xor")


@dataclass(frozen=True)
class GateSpec:
    kind: str
    arities: tuple[int, ...]
    perspective: TruthPerspective = IDENTITY

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        expected = {"toffoli": 3, "xor": 2}.get(self.kind, 1)
        if len(self.arities) != expected or min(self.arities) < 1:
            raise ValueError(f"{self.kind} needs {expected} positive arities, got {self.arities}")

    @property
    def width(self):
        return sum(self.arities)

    def describe(self):
        label = {"identity": "I", "not": "NOT", "sqrtid": "SQRT_I", "toffoli": "T", "xor": "XOR"}[self.kind]
        sub = "" if self.kind == "identity" else f"_{self.perspective.name}"
        return f"{label}{sub}^({','.join(map(str, self.arities))})"


def _canonical_unitary(kind, arities):
    n = sum(arities)
    d = 2**n
    if kind == "identity":
        return np.eye(d, dtype=complex)
    if kind == "sqrtid":
        return np.kron(np.eye(d // 2), HADAMARD)
    perm = np.arange(d)
    if kind == "not":
        perm = perm ^ 1
    elif kind == "toffoli":
        u, v, _ = arities
        c1 = 1 << (n - u)  # last qubit of block 1
        c2 = 1 << (n - u - v)  # last qubit of block 2
        hit = ((perm & c1) != 0) & ((perm & c2) != 0)
        perm = np.where(hit, perm ^ 1, perm)
    elif kind == "xor":
        u, _ = arities
        c1 = 1 << (n - u)
        perm = np.where((perm & c1) != 0, perm ^ 1, perm)
    out = np.zeros((d, d), dtype=complex)
    out[perm, np.arange(d)] = 1.0
    return out


_UNITARY_CACHE: dict = {}


def gate_unitary(g: GateSpec) -> np.ndarray:
    """Matrix of a gate under its perspective: ``T^{⊗n} U_canon T^{⊗n†}``."""
    qlin.check_width(g.width)
    key = (g.kind, g.arities, g.perspective.u.tobytes())
    cached = _UNITARY_CACHE.get(key)
    if cached is not None:
        return cached
    u = _canonical_unitary(g.kind, g.arities)
    if not g.perspective.is_identity and g.kind != "identity":
        tn = g.perspective.power(g.width)
        u = tn @ u @ tn.conj().T
    u.setflags(write=False)
    if len(_UNITARY_CACHE) > 512:
        _UNITARY_CACHE.clear()
    _UNITARY_CACHE[key] = u
    return u


def apply_gate(g: GateSpec, rho):
    n = qlin.n_qubits(rho)
    if n != g.width:
        raise DimensionError(f"gate of width {g.width} applied to {n} qubits")
    if g.kind == "identity":
        return np.array(rho, dtype=complex)
    return qlin.apply_kraus_local(rho, 0, gate_unitary(g))


def and_op(perspective, rho, sigma):
    """Reversible conjunction: Toffoli on ``rho ⊗ sigma ⊗ T-falsity``."""
    m, n = qlin.n_qubits(rho), qlin.n_qubits(sigma)
    qlin.check_width(m + n + 1)
    false_p, _ = truth_projectors(perspective)
    joined = qlin.kron_all([rho, sigma, false_p])
    return apply_gate(GateSpec("toffoli", (m, n, 1), perspective), joined)


# --------------------------------------------------------------------------
# epistemic operations

KRAUS_PRESETS = ("identity", "flip-in-basis", "dephase-in-basis", "reset-false-in-basis")


def _last_qubit_ops(arity, singles):
    pad = np.eye(2 ** (arity - 1), dtype=complex)
    return np.stack([np.kron(pad, s) for s in singles])


def preset_kraus(name, arity, basis: TruthPerspective):
    b = basis.u
    bd = b.conj().T
    if name == "identity":
        return np.eye(2**arity, dtype=complex)[None]
    if name == "flip-in-basis":
        return _last_qubit_ops(arity, [b @ X @ bd])
    if name == "dephase-in-basis":
        return _last_qubit_ops(arity, [b @ qlin.P0 @ bd, b @ qlin.P1 @ bd])
    if name == "reset-false-in-basis":
        lower = np.array([[0, 1], [0, 0]], dtype=complex)
        return _last_qubit_ops(arity, [b @ qlin.P0 @ bd, b @ lower @ bd])
    raise PresetError(f"unknown epistemic preset {name!r}")


def check_completeness(stack, tol=1e-9):
    total = sum(k.conj().T @ k for k in stack)
    defect = np.max(np.abs(total - np.eye(stack.shape[1])))
    if defect > tol:
        raise HoloqError(f"Kraus operators are not trace preserving (defect {defect:.3e})")


@dataclass(frozen=True, eq=False)
class KrausMap:
    """Channel realization: explicit Kraus lists per arity, or a named preset.

    A preset with ``basis=None`` is read in the owning agent's perspective.
    """

    operators: dict = field(default_factory=dict)
    preset: str | None = None
    basis: TruthPerspective | None = None

    def __post_init__(self):
        ops = {}
        for arity, stack in self.operators.items():
            stack = np.ascontiguousarray(np.asarray(stack, dtype=complex))
            if stack.ndim == 2:
                stack = stack[None]
            if stack.shape[1:] != (2 ** int(arity), 2 ** int(arity)):
                raise DimensionError(f"Kraus operators for arity {arity} have shape {stack.shape[1:]}")
            check_completeness(stack)
            ops[int(arity)] = stack
        object.__setattr__(self, "operators", ops)
        if self.preset is not None and self.preset not in KRAUS_PRESETS:
            raise PresetError(f"unknown epistemic preset {self.preset!r}")

    def supports(self, arity):
        return self.preset is not None or arity in self.operators

    def kraus(self, arity, perspective):
        if arity in self.operators:
            return self.operators[arity]
        if self.preset is None:
            raise MissingArity(f"no Kraus operators at arity {arity}")
        return preset_kraus(self.preset, arity, self.basis or perspective)


@dataclass(frozen=True, eq=False)
class TableMap:
    """Finite lookup of (input, output) qumix pairs per arity."""

    pairs: dict = field(default_factory=dict)
    fallback: str = "identity"

    def __post_init__(self):
        if self.fallback not in ("identity", "error"):
            raise ValueError(f"fallback must be 'identity' or 'error', not {self.fallback!r}")
        clean = {}
        for arity, entries in self.pairs.items():
            rows = []
            for rho_in, rho_out in entries:
                rho_in = np.asarray(rho_in, dtype=complex)
                rho_out = np.asarray(rho_out, dtype=complex)
                for r in (rho_in, rho_out):
                    if qlin.n_qubits(r) != int(arity):
                        raise DimensionError(f"table entry has the wrong arity for {arity}")
                    report = qlin.validate_qumix(r)
                    if not report.passed:
                        raise InvalidQumix(report.describe())
                rows.append((rho_in, rho_out))
            clean[int(arity)] = tuple(rows)
        object.__setattr__(self, "pairs", clean)

    def supports(self, arity):
        return self.fallback == "identity" or arity in self.pairs

    def apply(self, rho):
        arity = qlin.n_qubits(rho)
        for rho_in, rho_out in self.pairs.get(arity, ()):
            if qlin.qumix_close(rho, rho_in, 1e-9):
                return rho_out.copy()
        if self.fallback == "identity":
            return np.array(rho, dtype=complex)
        if arity not in self.pairs:
            raise MissingArity(f"table map has no entries at arity {arity}")
        raise TableMiss(f"no table entry matches the {arity}-qubit input")


Realization = Union[KrausMap, TableMap]


@dataclass(frozen=True, eq=False)
class EpistemicDomain:
    """Declared epistemic domain: every qumix, or an explicit finite list."""

    states: tuple | None = None

    def contains(self, rho, tol=1e-9):
        if self.states is None:
            return True
        n = qlin.n_qubits(rho)
        return any(
            qlin.n_qubits(s) == n and qlin.qumix_close(s, rho, tol) for s in self.states
        )


ALL_STATES = EpistemicDomain()


@dataclass(frozen=True, eq=False)
class EpistemicOp:
    agent: str
    time: str
    kind: str  # "U" or "K"
    realization: Realization
    perspective: TruthPerspective = IDENTITY
    domain: EpistemicDomain = ALL_STATES

    def supports(self, arity):
        return self.realization.supports(arity)

    def kraus(self, arity):
        if not isinstance(self.realization, KrausMap):
            raise HoloqError("table-realized operations have no Kraus form")
        return self.realization.kraus(arity, self.perspective)

    def describe(self):
        return f"{self.kind}_{self.agent}@{self.time}"

    def rebased(self, perspective):
        return replace(self, perspective=perspective)


def apply_epistemic(op: EpistemicOp, rho):
    arity = qlin.n_qubits(rho)
    if not op.supports(arity):
        raise MissingArity(f"{op.describe()} has no realization at arity {arity}")
    if isinstance(op.realization, TableMap):
        return op.realization.apply(rho)
    return qlin.apply_kraus_local(rho, 0, op.kraus(arity))


@dataclass(frozen=True, eq=False)
class EpistemicSituation:
    agent: str
    time: str
    perspective: TruthPerspective
    domain: EpistemicDomain
    understand: EpistemicOp
    know: EpistemicOp

    @classmethod
    def build(cls, agent, time, perspective, know, understand=None, domain=ALL_STATES):
        """Bind realizations to an agent at a time under its perspective."""
        understand = understand if understand is not None else KrausMap(preset="identity")
        return cls(
            agent,
            time,
            perspective,
            domain,
            EpistemicOp(agent, time, "U", understand, perspective, domain),
            EpistemicOp(agent, time, "K", know, perspective, domain),
        )

    def rebased(self, perspective):
        return replace(
            self,
            perspective=perspective,
            understand=self.understand.rebased(perspective),
            know=self.know.rebased(perspective),
        )


@dataclass(frozen=True, eq=False)
class QuasiModel:
    """Times, agents, epistemic situations and the naming function ``den``."""

    times: tuple[str, ...]
    agents: tuple[str, ...]
    epsit: dict
    den: dict = field(default_factory=dict)

    def resolve(self, agent_name, time_name) -> EpistemicSituation:
        agent = self.den.get(agent_name, agent_name)
        time = self.den.get(time_name, time_name)
        if agent not in self.agents:
            raise UnresolvedName(f"agent name {agent_name!r} does not denote an agent")
        if time not in self.times:
            raise UnresolvedName(f"time name {time_name!r} does not denote a time")
        try:
            return self.epsit[(agent, time)]
        except KeyError:
            raise UnresolvedName(f"no epistemic situation for {agent}@{time}") from None

    @property
    def is_harmonic(self):
        ps = [s.perspective for s in self.epsit.values()]
        return all(p == ps[0] for p in ps)

    def harmonized(self, perspective):
        """Same model with every agent moved to one shared perspective."""
        return replace(
            self, epsit={k: s.rebased(perspective) for k, s in self.epsit.items()}
        )


def single_agent_model(know, perspective=IDENTITY, agent="a", time="t", understand=None):
    sit = EpistemicSituation.build(agent, time, perspective, know, understand)
    return QuasiModel((time,), (agent,), {(agent, time): sit})


# --------------------------------------------------------------------------
# pseudo-gates


@dataclass(frozen=True, eq=False)
class EpistemicStep:
    op: EpistemicOp
    arity: int

    @property
    def width(self):
        return self.arity

    def describe(self):
        return f"{self.op.describe()}^({self.arity})"


Component = Union[GateSpec, EpistemicStep]


@dataclass(frozen=True, eq=False)
class PseudoGate:
    components: tuple

    @property
    def width(self):
        return sum(c.width for c in self.components)

    def blocks(self):
        start = 0
        for c in self.components:
            yield start, c
            start += c.width

    def describe(self):
        return " ⊗ ".join(c.describe() for c in self.components)

    @property
    def is_linear(self):
        return not any(
            isinstance(c, EpistemicStep) and isinstance(c.op.realization, TableMap)
            for c in self.components
        )


def _component_kraus(c):
    if isinstance(c, GateSpec):
        return None if c.kind == "identity" else gate_unitary(c)[None]
    return c.op.kraus(c.arity)


def _is_table(c):
    return isinstance(c, EpistemicStep) and isinstance(c.op.realization, TableMap)


def _split_block(rho, n, start, stop):
    """Block marginal, complement marginal and the order restoring the layout."""
    block = qlin.reduce_span(rho, start, stop)
    rest_idx = [q for q in range(n) if not start <= q < stop]
    rest = qlin.reduce(rho, [q + 1 for q in rest_idx])
    layout = list(range(start, stop)) + rest_idx
    restore = [layout.index(q) for q in range(n)]
    return block, rest, restore


def apply_pseudo_gate(pg: PseudoGate, rho):
    rho = np.asarray(rho, dtype=complex)
    n = qlin.n_qubits(rho)
    if pg.width != n:
        raise DimensionError(f"pseudo-gate of width {pg.width} applied to {n} qubits")
    # table maps act on exact factors, so they go first
    for start, c in pg.blocks():
        if not _is_table(c):
            continue
        if c.width == n:
            rho = apply_epistemic(c.op, rho)
            continue
        block, rest, restore = _split_block(rho, n, start, start + c.width)
        rebuilt = qlin.permute_qubits(np.kron(block, rest), restore)
        if not qlin.qumix_close(rebuilt, rho, 1e-9):
            raise NotFactorizable(
                f"{c.describe()} needs its block [{start}, {start + c.width}) unentangled"
            )
        out_block = apply_epistemic(c.op, block)
        rho = qlin.permute_qubits(np.kron(out_block, rest), restore)
    for start, c in pg.blocks():
        if _is_table(c):
            continue
        stack = _component_kraus(c)
        if stack is not None:
            rho = qlin.apply_kraus_local(rho, start, stack)
    return rho


def pull_back_effect(pg: PseudoGate, effect):
    """Heisenberg-picture adjoint: ``sum_k K_k^† effect K_k`` over the product channel."""
    if not pg.is_linear:
        raise HoloqError("pseudo-gates containing table maps have no adjoint")
    for start, c in pg.blocks():
        stack = _component_kraus(c)
        if stack is not None:
            adjoint = np.ascontiguousarray(np.conj(np.transpose(stack, (0, 2, 1))))
            effect = qlin.apply_kraus_local(effect, start, adjoint)
    return effect


def _component_for(b, perspective, qm):
    r = atomic_complexity(b)
    if is_atomic(b):
        return GateSpec("identity", (r,), perspective)
    if isinstance(b, Not):
        return GateSpec("not", (r,), perspective)
    if isinstance(b, SqrtId):
        return GateSpec("sqrtid", (r,), perspective)
    if isinstance(b, Toffoli):
        return GateSpec("toffoli", tuple(atomic_complexity(c) for c in b.children), perspective)
    if isinstance(b, Xor):
        return GateSpec("xor", tuple(atomic_complexity(c) for c in b.children), perspective)
    if isinstance(b, (Understands, Knows)):
        if qm is None:
            raise UnresolvedName(f"{b.agent}@{b.time} needs a quasi-model")
        sit = qm.resolve(b.agent, b.time)
        op = sit.know if isinstance(b, Knows) else sit.understand
        arity = atomic_complexity(b.child)
        if not op.supports(arity):
            raise MissingArity(f"{op.describe()} has no realization at arity {arity}")
        return EpistemicStep(op, arity)
    raise TypeError(f"not a sentence: {b!r}")


def pseudo_gate_tree(s, perspective, qm=None) -> list[PseudoGate]:
    """Pseudo-gates from the top level downwards: ``[O^(k-1), ..., O^(1)]``.

    ``s`` may be a sentence or an already built syntactical tree.
    """
    tree = s if isinstance(s, SyntacticalTree) else build_syntactical_tree(s)
    qlin.check_width(tree.n_qubits)
    gates = []
    for i in range(tree.height - 1, 0, -1):
        level = tree.levels[i - 1]
        gates.append(PseudoGate(tuple(_component_for(b, perspective, qm) for b in level)))
    return gates


# --------------------------------------------------------------------------
# soundness surrogates


def fixes_truth_values(op: EpistemicOp, perspective=None, tol=1e-9):
    """Whether the 1-qubit op fixes both truth projectors of the perspective."""
    perspective = perspective or op.perspective
    if not op.supports(1):
        return False
    return all(
        qlin.qumix_close(apply_epistemic(op, p), p, tol) for p in truth_projectors(perspective)
    )


def _states_in_subspace(basis_vectors, rng):
    k = basis_vectors.shape[1]
    rank = int(rng.integers(1, k + 1))
    coeffs = rng.normal(size=(k, rank)) + 1j * rng.normal(size=(k, rank))
    vecs = basis_vectors @ coeffs
    rho = vecs @ vecs.conj().T
    return rho / np.trace(rho).real


def truth_dominating(op: EpistemicOp, arities, rng, samples=200, perspective=None):
    """Check by sampling that ``p(K rho) = 1`` never occurs with ``p(rho) < 1``.

    Half of the samples are drawn from states that the op maps to truth
    (the eigenvalue-1 space of its pulled-back truth effect) when that
    space is non-empty.
    """
    perspective = perspective or op.perspective
    for arity in arities:
        if not op.supports(arity):
            return False
        candidates = None
        if isinstance(op.realization, KrausMap):
            eff = qlin.embed_effect(qlin.truth_effect(perspective.u), arity - 1, arity)
            stack = op.kraus(arity)
            pulled = sum(k.conj().T @ eff @ k for k in stack)
            w, v = np.linalg.eigh((pulled + pulled.conj().T) / 2)
            candidates = v[:, w >= 1 - 1e-9]
        else:
            table_inputs = [r for r, _ in op.realization.pairs.get(arity, ())]
        for i in range(samples):
            if candidates is not None and candidates.shape[1] and i % 2 == 0:
                rho = _states_in_subspace(candidates, rng)
            elif candidates is None and table_inputs and i % 2 == 0:
                rho = table_inputs[(i // 2) % len(table_inputs)]
            else:
                rho = qlin.random_mixed(arity, rng, rank=int(rng.integers(1, 2**arity + 1)))
            p_out = qlin.probability(perspective.u, apply_epistemic(op, rho), check=False)
            if p_out >= 1 - 1e-9:
                if qlin.probability(perspective.u, rho, check=False) < 1 - 1e-6:
                    return False
    return True


# --------------------------------------------------------------------------
# channel constructors


def _random_isometry_blocks(d, rank, rng):
    """``rank`` operators d×d with ``sum K^† K = I`` (columns of a random isometry)."""
    z = rng.normal(size=(rank * d, d)) + 1j * rng.normal(size=(rank * d, d))
    q, _ = np.linalg.qr(z)
    return q.reshape(rank, d, d)


def random_kraus(arity, rng, rank=2):
    """A random CPTP map on ``arity`` qubits with ``rank`` Kraus operators."""
    return _random_isometry_blocks(2**arity, rank, rng)


def random_sound_kraus(arity, perspective, rng, rank=2):
    """A random channel that preserves the truth probability of every input.

    Each Kraus operator is block-diagonal with respect to the perspective's
    falsity/truth split of the last qubit, so ``p(K rho) = p(rho)``; in
    particular ``p(K rho) = 1`` forces ``p(rho) = 1`` and both single-qubit
    truth projectors are fixed.
    """
    d = 2 ** (arity - 1)
    lows = _random_isometry_blocks(d, rank, rng)
    highs = _random_isometry_blocks(d, rank, rng)
    tn = perspective.power(arity)
    ops = [tn @ (np.kron(a, qlin.P0) + np.kron(b, qlin.P1)) @ tn.conj().T for a, b in zip(lows, highs)]
    return np.stack(ops)


def classical_kraus(mapping, arity, perspective=IDENTITY):
    """Measure-and-relabel channel ``|x> -> |f(x)>`` in the perspective's basis.

    ``mapping`` sends bit strings to bit strings; unlisted strings are fixed.
    """
    d = 2**arity
    tn = perspective.power(arity)
    ops = []
    for x in range(d):
        label = format(x, f"0{arity}b")
        y = int(mapping.get(label, label), 2)
        k = np.zeros((d, d), dtype=complex)
        k[y, x] = 1.0
        ops.append(tn @ k @ tn.conj().T)
    return np.stack(ops)
