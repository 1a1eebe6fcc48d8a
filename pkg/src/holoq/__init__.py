"""Holistic semantics for an epistemic quantum computational logic.

Sentences are parsed by :mod:`holoq.lang`, compiled to pseudo-gate trees by
:mod:`holoq.gatelib`, evaluated level by level by :mod:`holoq.holistic`
and judged over sampled models by :mod:`holoq.judgments`.
"""

from .gatelib import (
    HADAMARD_PERSPECTIVE,
    IDENTITY,
    EpistemicSituation,
    KrausMap,
    QuasiModel,
    TableMap,
    TruthPerspective,
    perspective_from_matrix,
    pseudo_gate_tree,
    single_agent_model,
)
from .holistic import (
    ModelAssignment,
    check_commutation,
    check_normal,
    contextual_meaning,
    evaluate,
)
from .judgments import (
    Claim,
    SamplerConfig,
    Verdict,
    check_consequence,
    is_true,
    is_true_contextual,
    lemma_noncontradiction,
)
from .lang import build_syntactical_tree, parse_sentence, print_sentence
from .qlin import BACKEND

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "Claim",
    "EpistemicSituation",
    "HADAMARD_PERSPECTIVE",
    "IDENTITY",
    "KrausMap",
    "ModelAssignment",
    "QuasiModel",
    "SamplerConfig",
    "TableMap",
    "TruthPerspective",
    "Verdict",
    "build_syntactical_tree",
    "check_commutation",
    "check_consequence",
    "check_normal",
    "contextual_meaning",
    "evaluate",
    "is_true",
    "is_true_contextual",
    "lemma_noncontradiction",
    "parse_sentence",
    "perspective_from_matrix",
    "print_sentence",
    "pseudo_gate_tree",
    "single_agent_model",
]
