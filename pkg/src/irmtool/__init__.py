"""Requirements-to-architecture pipeline.

Turns a controlled-English requirements outline into an invariant
decomposition model: components and their knowledge attributes, typed
invariants (abstract, process, exchange, assumption), knowledge flow
signatures with inferred parameter directions, OR-group alternatives for
situation-specific behavior, and a configuration-level dataflow check.
Human choices live in an append-only decision journal that makes every
run replayable byte for byte.
"""

from .document import RequirementsDocument, effective_sentences, segment_document
from .entities import (ComponentCatalog, EntityCandidate, build_catalog,
                       cluster_aliases, detect_appositions, extract_candidates,
                       hint_kinds)
from .errors import (ConfigurationExplosion, CyclicParse, DanglingInvariant,
                     IrmError, MalformedConllu, MissingSection, NoOutputOwner,
                     RevisionConflict, SchemaViolation, StateLocked,
                     UnknownDecision, UnknownWord, UnparsableSentence,
                     UnresolvedDecision, UnresolvedProposal)
from .journal import Decision, DecisionJournal
from .classify import ClassifiedRequirement, classify_requirements
from .flow import (FlowParameter, FlowSignature, build_signatures,
                   format_signature, infer_directions, needs_exchange,
                   parse_signature)
from .model import (Decomposition, Invariant, IrmModel, compose,
                    deserialize_model, serialize_model)
from .pipeline import Pipeline, StageStatus, STAGES
from .sentences import SentenceGraph, ingest_conllu
from .shallow import shallow_parse
from .validate import check_flows, enumerate_configurations, render_report

__version__ = "0.1.0"

__all__ = [
    "RequirementsDocument", "effective_sentences", "segment_document",
    "ComponentCatalog", "EntityCandidate", "build_catalog", "cluster_aliases",
    "detect_appositions", "extract_candidates", "hint_kinds",
    "ConfigurationExplosion", "CyclicParse", "DanglingInvariant", "IrmError",
    "MalformedConllu", "MissingSection", "NoOutputOwner", "RevisionConflict",
    "SchemaViolation", "StateLocked", "UnknownDecision", "UnknownWord",
    "UnparsableSentence", "UnresolvedDecision", "UnresolvedProposal",
    "Decision", "DecisionJournal",
    "ClassifiedRequirement", "classify_requirements",
    "FlowParameter", "FlowSignature", "build_signatures", "format_signature",
    "infer_directions", "needs_exchange", "parse_signature",
    "Decomposition", "Invariant", "IrmModel", "compose",
    "deserialize_model", "serialize_model",
    "Pipeline", "StageStatus", "STAGES",
    "SentenceGraph", "ingest_conllu", "shallow_parse",
    "check_flows", "enumerate_configurations", "render_report",
    "__version__",
]
