"""JSON serialization of quasi-models, assignments and claims.

Complex numbers are stored as ``[re, im]`` pairs and floats are written with
``repr`` precision by the ``json`` module, so a dump/load round-trip is
bit-exact.  Sentences are stored as canonical printed text.

Schema ``holoq-model/1``::

    {"version": "holoq-model/1",
     "times": ["t"], "agents": ["a"], "den": {"alice": "a"},
     "perspectives": {"T0": [[[re, im], [re, im]], [[re, im], [re, im]]]},
     "epsit": [{"agent": "a", "time": "t", "perspective": "I",
                "domain": "all" | {"states": [state, ...]},
                "U": realization, "K": realization}],
     "assignments": {"K[a@t] q": {"I": state}}}

A perspective reference is ``"I"``, ``"H"``, ``"X"``, a name declared under
``"perspectives"``, or an inline 2×2 matrix.  A state is ``{"ket": [...]}``
or ``{"matrix": [[...], ...]}``.  A realization is one of::

    {"kind": "preset", "name": "identity", "basis": perspective-or-null}
    {"kind": "kraus", "arities": {"2": [matrix, ...]}}
    {"kind": "table", "arity": 3, "pairs": [{"in": state, "out": state}],
     "fallback": "identity"}

A table may instead carry ``"arities": {"1": [pairs], "3": [pairs]}``.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from . import qlin
from .errors import HoloqError, ModelFileError, ParseError
from .gatelib import (
    ALL_STATES,
    PRESET_PERSPECTIVES,
    EpistemicDomain,
    EpistemicSituation,
    KrausMap,
    QuasiModel,
    TableMap,
    TruthPerspective,
    perspective_from_matrix,
)
from .holistic import ModelAssignment
from .lang import parse_sentence, print_sentence

VERSION = "holoq-model/1"


# --------------------------------------------------------------------------
# numbers and matrices


def encode_matrix(m):
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def decode_matrix(rows):
    try:
        arr = np.asarray(rows, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ModelFileError(f"malformed complex matrix: {exc}") from None
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise ModelFileError(f"complex matrix must be rows of [re, im] pairs, got shape {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def encode_state(rho):
    return {"matrix": encode_matrix(rho)}


def decode_state(obj):
    if not isinstance(obj, dict):
        raise ModelFileError(f"state literal must be an object, got {type(obj).__name__}")
    if "ket" in obj:
        arr = np.asarray(obj["ket"], dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise ModelFileError("ket must be a list of [re, im] pairs")
        ket = arr[:, 0] + 1j * arr[:, 1]
        try:
            return qlin.pure_qumix(ket)
        except HoloqError as exc:
            raise ModelFileError(str(exc)) from None
    if "matrix" in obj:
        rho = decode_matrix(obj["matrix"])
        try:
            qlin.n_qubits(rho)
        except HoloqError as exc:
            raise ModelFileError(str(exc)) from None
        report = qlin.validate_qumix(rho)
        if not report.passed:
            raise ModelFileError(report.describe())
        return rho
    raise ModelFileError("state literal needs a 'ket' or 'matrix' field")


# --------------------------------------------------------------------------
# perspectives


class PerspectiveTable:
    """Names for the perspectives a document refers to."""

    def __init__(self, declared=None):
        self.named = {k: perspective_from_matrix(k) for k in PRESET_PERSPECTIVES}
        for name, rows in (declared or {}).items():
            self.named[name] = self._build(decode_matrix(rows), name)
        self.extra = {}

    @staticmethod
    def _build(u, name):
        try:
            return TruthPerspective(u, name)
        except HoloqError as exc:
            raise ModelFileError(f"perspective {name!r}: {exc}") from None

    def lookup(self, ref):
        if isinstance(ref, str):
            if ref not in self.named:
                raise ModelFileError(f"undefined perspective {ref!r}")
            return self.named[ref]
        return self._build(decode_matrix(ref), "")

    def name_for(self, p: TruthPerspective):
        for name, q in self.named.items():
            if q == p:
                return name
        name = f"T{len(self.extra)}"
        while name in self.named:
            name += "'"
        self.named[name] = p
        self.extra[name] = p
        return name

    def declared(self):
        return {k: encode_matrix(p.u) for k, p in self.extra.items()}


# --------------------------------------------------------------------------
# realizations


def encode_realization(r, perspectives: PerspectiveTable):
    if isinstance(r, KrausMap):
        if r.preset is not None and not r.operators:
            basis = None if r.basis is None else perspectives.name_for(r.basis)
            return {"kind": "preset", "name": r.preset, "basis": basis}
        if r.preset is not None:
            raise ModelFileError("a Kraus map mixing a preset with explicit operators cannot be stored")
        return {
            "kind": "kraus",
            "arities": {str(a): [encode_matrix(k) for k in stack] for a, stack in sorted(r.operators.items())},
        }
    if isinstance(r, TableMap):
        return {
            "kind": "table",
            "fallback": r.fallback,
            "arities": {
                str(a): [{"in": encode_state(i), "out": encode_state(o)} for i, o in rows]
                for a, rows in sorted(r.pairs.items())
            },
        }
    raise ModelFileError(f"cannot serialize realization {r!r}")


def _decode_pairs(rows):
    return [(decode_state(p["in"]), decode_state(p["out"])) for p in rows]


def decode_realization(obj, perspectives: PerspectiveTable):
    if obj is None:
        return KrausMap(preset="identity")
    kind = obj.get("kind")
    try:
        if kind == "preset":
            basis = obj.get("basis")
            return KrausMap(
                preset=obj["name"],
                basis=None if basis is None else perspectives.lookup(basis),
            )
        if kind == "kraus":
            return KrausMap(
                {int(a): np.stack([decode_matrix(k) for k in ks]) for a, ks in obj["arities"].items()}
            )
        if kind == "table":
            if "arities" in obj:
                pairs = {int(a): _decode_pairs(rows) for a, rows in obj["arities"].items()}
            else:
                pairs = {int(obj["arity"]): _decode_pairs(obj["pairs"])}
            return TableMap(pairs, obj.get("fallback", "identity"))
    except KeyError as exc:
        raise ModelFileError(f"{kind} realization is missing field {exc}") from None
    except ModelFileError:
        raise
    except HoloqError as exc:
        raise ModelFileError(f"{kind} realization: {exc}") from exc
    raise ModelFileError(f"unknown realization kind {kind!r}")


# --------------------------------------------------------------------------
# models


def model_to_dict(qm: QuasiModel, assignment: ModelAssignment | None = None, perspectives=None):
    perspectives = perspectives or PerspectiveTable()
    epsit = []
    for (agent, time), sit in sorted(qm.epsit.items()):
        domain = (
            "all"
            if sit.domain.states is None
            else {"states": [encode_state(s) for s in sit.domain.states]}
        )
        epsit.append(
            {
                "agent": agent,
                "time": time,
                "perspective": perspectives.name_for(sit.perspective),
                "domain": domain,
                "U": encode_realization(sit.understand.realization, perspectives),
                "K": encode_realization(sit.know.realization, perspectives),
            }
        )
    assignments = {}
    if assignment is not None:
        for s, p, top in assignment.items():
            assignments.setdefault(print_sentence(s), {})[perspectives.name_for(p)] = encode_state(top)
    return {
        "version": VERSION,
        "times": list(qm.times),
        "agents": list(qm.agents),
        "den": dict(sorted(qm.den.items())),
        "perspectives": perspectives.declared(),
        "epsit": epsit,
        "assignments": assignments,
    }


def model_from_dict(doc):
    """Return ``(quasi_model, assignment, perspective_table)``."""
    if not isinstance(doc, dict):
        raise ModelFileError("model document must be a JSON object")
    if doc.get("version") != VERSION:
        raise ModelFileError(f"unsupported model version {doc.get('version')!r}, expected {VERSION!r}")
    perspectives = PerspectiveTable(doc.get("perspectives"))
    times = tuple(doc.get("times", ()))
    agents = tuple(doc.get("agents", ()))
    den = dict(doc.get("den", {}))
    for name, target in den.items():
        if target not in times and target not in agents:
            raise ModelFileError(f"den binds {name!r} to undefined {target!r}")
    epsit = {}
    for entry in doc.get("epsit", ()):
        try:
            agent, time = entry["agent"], entry["time"]
        except KeyError as exc:
            raise ModelFileError(f"epistemic situation is missing field {exc}") from None
        if agent not in agents or time not in times:
            raise ModelFileError(f"epistemic situation {agent}@{time} names an undeclared agent or time")
        domain = entry.get("domain", "all")
        if domain == "all":
            domain = ALL_STATES
        else:
            domain = EpistemicDomain(tuple(decode_state(s) for s in domain["states"]))
        epsit[(agent, time)] = EpistemicSituation.build(
            agent,
            time,
            perspectives.lookup(entry.get("perspective", "I")),
            decode_realization(entry.get("K"), perspectives),
            decode_realization(entry.get("U"), perspectives),
            domain,
        )
    qm = QuasiModel(times, agents, epsit, den)
    assignment = ModelAssignment()
    for text, by_perspective in doc.get("assignments", {}).items():
        try:
            s = parse_sentence(text)
        except ParseError as exc:
            raise ModelFileError(f"assignment key {text!r}: {exc}") from None
        for ref, state in by_perspective.items():
            assignment.assign(s, perspectives.lookup(ref), decode_state(state))
    return qm, assignment, perspectives


def dumps(doc) -> str:
    return json.dumps(doc, indent=1, sort_keys=True)


def load_json(path):
    path = Path(path)
    try:
        return json.loads(path.read_text())
    except FileNotFoundError:
        raise ModelFileError(f"no such file: {path}") from None
    except json.JSONDecodeError as exc:
        raise ModelFileError(f"{path}: invalid JSON ({exc})") from None


def load_model(path):
    return model_from_dict(load_json(path))


def save_model(path, qm, assignment=None):
    Path(path).write_text(dumps(model_to_dict(qm, assignment)) + "\n")
