"""Toolkit for n-ary description logic knowledge bases with attribute-labelled tuples."""

from .model import (
    Bot,
    ConceptAnd,
    ConceptIncl,
    ConceptName,
    ConceptOr,
    DlrError,
    ExistsAttr,
    GlobalReify,
    KnowledgeBase,
    LocalReify,
    Not,
    Project,
    RelAnd,
    RelDiff,
    RelIncl,
    RelOr,
    RelationName,
    RenamingGroup,
    RenamingSchema,
    Select,
    Signature,
    Top,
)
from .parser import ParseError, format_kb, parse, parse_axiom, parse_concept, parse_relation
from .renaming import canonicalize, check_well_founded, induce_partition
from .wellformed import arity, tau, union_compatible, validate

__all__ = [
    "Bot", "ConceptAnd", "ConceptIncl", "ConceptName", "ConceptOr", "DlrError",
    "ExistsAttr", "GlobalReify", "KnowledgeBase", "LocalReify", "Not", "ParseError",
    "Project", "RelAnd", "RelDiff", "RelIncl", "RelOr", "RelationName",
    "RenamingGroup", "RenamingSchema", "Select", "Signature", "Top",
    "arity", "canonicalize", "check_well_founded", "format_kb", "induce_partition",
    "parse", "parse_axiom", "parse_concept", "parse_relation", "tau",
    "union_compatible", "validate",
]
