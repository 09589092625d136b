"""Convergence analysis of behavior trees over finite state spaces."""
from ._btconv import (
    Analysis,
    Convergence,
    Doa,
    Error,
    Flavor,
    Model,
    NodeKind,
    Region,
    Spec,
    SpecError,
    Status,
    analyze,
    backchain,
    check,
    export_dot,
    generate,
    load_spec,
    parse_spec,
    substitute,
)

__all__ = [
    "Analysis",
    "Convergence",
    "Doa",
    "Error",
    "Flavor",
    "Model",
    "NodeKind",
    "Region",
    "Spec",
    "SpecError",
    "Status",
    "analyze",
    "backchain",
    "check",
    "export_dot",
    "generate",
    "load_spec",
    "parse_spec",
    "substitute",
]
