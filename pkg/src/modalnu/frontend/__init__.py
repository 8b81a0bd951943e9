"""Text format, Graphviz export and command-line interface."""
from .dot import to_dot
from .parser import ParseError, SpecError, SpecFile, parse, parse_formula
from .serialize import serialize, serialize_system

__all__ = [
    "ParseError",
    "SpecError",
    "SpecFile",
    "parse",
    "parse_formula",
    "serialize",
    "serialize_system",
    "to_dot",
]
