"""Top-level states for sampled holistic models.

Every generated state puts the exact truth/falsity projector on each
``t``/``f`` occurrence and a state on the atomic occurrences that is
invariant under every permutation of equally-labelled atoms.  Distinct
occurrences of one subformula occupy disjoint spans that such a
permutation maps onto each other (and the pseudo-gates commute with it),
so the resulting models are normal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import permutations, product

import numpy as np

from . import qlin
from .gatelib import TruthPerspective, pull_back_effect
from .lang import Atom, FalseConst, SyntacticalTree, TrueConst

GENERATORS = ("basis", "pure", "mixed", "entangled", "targeted")
MAX_GROUP = 720
EIG_TOL = 1e-9


@dataclass(frozen=True)
class AtomLayout:
    n: int
    atom_positions: tuple[int, ...]  # 0-based top-level qubits holding atoms
    labels: tuple[str, ...]  # atom name per entry of atom_positions
    constants: tuple[tuple[int, bool], ...]  # (qubit, is_true) for t/f

    @property
    def m(self):
        return len(self.atom_positions)


def atom_layout(tree: SyntacticalTree) -> AtomLayout:
    top = tree.levels[-1]
    atoms, labels, consts = [], [], []
    for q, b in enumerate(top):
        if isinstance(b, Atom):
            atoms.append(q)
            labels.append(b.name)
        elif isinstance(b, (TrueConst, FalseConst)):
            consts.append((q, isinstance(b, TrueConst)))
    return AtomLayout(len(top), tuple(atoms), tuple(labels), tuple(consts))


def label_group(labels) -> list[tuple[int, ...]] | None:
    """Permutations of positions that preserve labels; ``None`` when too large."""
    classes = {}
    for i, name in enumerate(labels):
        classes.setdefault(name, []).append(i)
    size = math.prod(math.factorial(len(c)) for c in classes.values())
    if size > MAX_GROUP:
        return None
    groups = list(classes.values())
    out = []
    for choice in product(*(permutations(c) for c in groups)):
        perm = list(range(len(labels)))
        for cls, image in zip(groups, choice):
            for src, dst in zip(cls, image):
                perm[src] = dst
        out.append(tuple(perm))
    return out


def twirl(rho, group):
    if len(group) == 1 or qlin.n_qubits(rho) == 0:
        return rho
    return sum(qlin.permute_qubits(rho, list(p)) for p in group) / len(group)


def embedding(layout: AtomLayout, perspective: TruthPerspective) -> np.ndarray:
    """Isometry from the atom register into the full top level.

    Columns are indexed by atom basis states; the constants carry the
    perspective's truth or falsity ket.
    """
    n, m = layout.n, layout.m
    const_ket = qlin.kron_all(
        [(perspective.truth if t else perspective.falsity).reshape(2, 1) for _, t in layout.constants]
    )
    v = np.kron(np.eye(2**m, dtype=complex), const_ket)  # atoms first, constants last
    order_old = list(layout.atom_positions) + [q for q, _ in layout.constants]
    # new qubit i is old register slot order_old.index(i)
    restore = [order_old.index(q) for q in range(n)]
    t = v.reshape([2] * n + [2**m]).transpose(restore + [n])
    return np.ascontiguousarray(t.reshape(2**n, 2**m))


def truth_effect_at(tree: SyntacticalTree, gates, perspective, path) -> np.ndarray:
    """Top-level effect whose expectation is the truth probability at ``path``."""
    i = path[0]
    start, stop = tree.span(path)
    eff = qlin.embed_effect(qlin.truth_effect(perspective.u), stop - 1, tree.n_qubits)
    k = tree.height
    for g in gates[k - 1 - i :: -1] if i < k else ():
        eff = pull_back_effect(g, eff)
    return eff


def _product_state(layout, perspective, rng):
    """Same single-qubit state for every occurrence of each atom name."""
    basis = [
        perspective.falsity,
        perspective.truth,
        (perspective.falsity + perspective.truth) / np.sqrt(2),
        (perspective.falsity - 1j * perspective.truth) / np.sqrt(2),
    ]
    classical = rng.random() < 0.5
    per_name = {}
    for name in dict.fromkeys(layout.labels):
        if classical:
            v = basis[int(rng.integers(2))]
        elif rng.random() < 0.75:
            v = basis[int(rng.integers(len(basis)))]
        else:
            v = qlin.random_pure(1, rng)
        per_name[name] = np.outer(v, v.conj())
    return qlin.kron_all([per_name[name] for name in layout.labels])


def _entangled_pairs(layout, perspective, rng):
    """Bell-type pairs across occurrences, in the perspective's basis."""
    m = layout.m
    order = list(rng.permutation(m))
    f, t = perspective.falsity, perspective.truth
    bells = [
        (np.kron(f, f) + np.kron(t, t)) / np.sqrt(2),
        (np.kron(f, t) + np.kron(t, f)) / np.sqrt(2),
        (np.kron(f, t) - np.kron(t, f)) / np.sqrt(2),
    ]
    factors, slots = [], []
    while len(order) >= 2:
        a, b = order.pop(), order.pop()
        v = bells[int(rng.integers(len(bells)))]
        factors.append(np.outer(v, v.conj()))
        slots += [a, b]
    if order:
        factors.append(qlin.random_mixed(1, rng))
        slots.append(order.pop())
    rho = qlin.kron_all(factors)
    return qlin.permute_qubits(rho, [slots.index(q) for q in range(m)])


def _in_subspace(vectors, rng):
    k = vectors.shape[1]
    rank = int(rng.integers(1, k + 1))
    coeffs = rng.normal(size=(k, rank)) + 1j * rng.normal(size=(k, rank))
    w = vectors @ coeffs
    rho = w @ w.conj().T
    return rho / np.trace(rho).real


class TopSampler:
    """Draws normal top states with exact t/f projectors for one sentence."""

    def __init__(self, tree: SyntacticalTree):
        self.tree = tree
        self.layout = atom_layout(tree)
        self.group = label_group(self.layout.labels)
        self._embeddings = {}

    def _embed(self, perspective):
        key = perspective.u.tobytes()
        if key not in self._embeddings:
            self._embeddings[key] = embedding(self.layout, perspective)
        return self._embeddings[key]

    def assemble(self, rho_atoms, perspective):
        v = self._embed(perspective)
        top = v @ rho_atoms @ v.conj().T
        return (top + top.conj().T) / 2

    def compress(self, effect, perspective):
        """Effect restricted to the atom register and averaged over the label group."""
        v = self._embed(perspective)
        a = v.conj().T @ effect @ v
        a = (a + a.conj().T) / 2
        return twirl(a, self.group) if self.group else a

    def atom_state(self, kind, perspective, rng, target=None):
        lay = self.layout
        if lay.m == 0:
            return np.ones((1, 1), dtype=complex)
        if self.group is None and kind != "basis":
            kind = "basis"
        if kind == "basis":
            return _product_state(lay, perspective, rng)
        if kind == "pure":
            v = qlin.random_pure(lay.m, rng)
            rho = np.outer(v, v.conj())
        elif kind == "mixed":
            rho = qlin.random_mixed(lay.m, rng, rank=int(rng.integers(1, 2**lay.m + 1)))
        elif kind == "entangled":
            rho = _entangled_pairs(lay, perspective, rng)
        elif kind in ("targeted", "adversarial"):
            if target is None:
                raise ValueError(f"the {kind} generator needs a compressed effect")
            w, vecs = np.linalg.eigh(target)
            if kind == "targeted":
                sel = vecs[:, w >= 1 - EIG_TOL]
                if sel.shape[1] == 0:
                    return None
            else:
                sel = vecs[:, w >= w[-1] - EIG_TOL]
            rho = _in_subspace(sel, rng)
        else:
            raise ValueError(f"unknown generator {kind!r}")
        return twirl(rho, self.group)

    def draw(self, kind, perspective, rng, target=None):
        """A top state, or ``None`` when a targeted draw has nothing to aim at."""
        rho = self.atom_state(kind, perspective, rng, target)
        if rho is None:
            return None
        return self.assemble(rho, perspective)
