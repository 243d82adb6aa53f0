"""Fault-tolerant toolkit for parallel-markup MathML.

Parse (strictly or leniently), serialize, split, clean, and query MathML
documents that carry presentation markup, content markup, and TeX annotations
side by side; compare formulas with histogram, tree-edit, earth-mover, and
cosine measures; manage gold-standard formula collections; and drive external
TeX-to-MathML converters through a small adapter registry.
"""

from .errors import (
    DuplicateId,
    DuplicateName,
    EmptyHistogram,
    InvalidGoldMathML,
    MalformedInput,
    MissingBranch,
    MmlError,
    OutputNotMathML,
    PathSyntaxError,
    SchemaError,
    ToolFailed,
    ToolTimeout,
    ToolUnavailable,
    UnknownConverter,
    UnknownName,
    WouldBeEmpty,
)
from .core import (
    MATHML_NS,
    MathDoc,
    MathNode,
    ParseReport,
    Repair,
    clean,
    extract_identifiers,
    get_tex,
    iter_subtree,
    parse,
    resolve_xref,
    serialize,
    serialize_node,
    split_content,
    split_presentation,
)
from .query import (
    PathExpr,
    PathLibrary,
    PathUnion,
    Step,
    library_get,
    parse_path,
    parse_selector,
    render,
    select,
)
from .similarity import (
    CostConfig,
    GroundDistance,
    Histogram,
    accumulate,
    cosine_similarity,
    document_distance,
    emd,
    hist_distance_absolute,
    hist_distance_relative,
    histogram,
    tree_edit_distance,
)
from .gold import Finding, GoldEntry, load_gold, save_gold, validate_entry
from .convert import (
    ConversionResult,
    ConverterRegistry,
    ConverterSpec,
    canonicalize,
    convert,
    list_converters,
    load_converters,
    register,
    stub_registry,
)

__version__ = "0.1.0"

__all__ = [
    "MATHML_NS",
    "MathDoc",
    "MathNode",
    "ParseReport",
    "Repair",
    "parse",
    "serialize",
    "serialize_node",
    "split_presentation",
    "split_content",
    "get_tex",
    "extract_identifiers",
    "clean",
    "resolve_xref",
    "iter_subtree",
    "Step",
    "PathExpr",
    "PathUnion",
    "parse_path",
    "parse_selector",
    "render",
    "select",
    "PathLibrary",
    "library_get",
    "Histogram",
    "histogram",
    "accumulate",
    "hist_distance_absolute",
    "hist_distance_relative",
    "CostConfig",
    "tree_edit_distance",
    "GroundDistance",
    "emd",
    "cosine_similarity",
    "document_distance",
    "GoldEntry",
    "Finding",
    "load_gold",
    "save_gold",
    "validate_entry",
    "ConverterSpec",
    "ConverterRegistry",
    "ConversionResult",
    "register",
    "convert",
    "list_converters",
    "load_converters",
    "stub_registry",
    "canonicalize",
    "MmlError",
    "MalformedInput",
    "DuplicateId",
    "MissingBranch",
    "WouldBeEmpty",
    "PathSyntaxError",
    "UnknownName",
    "EmptyHistogram",
    "SchemaError",
    "InvalidGoldMathML",
    "DuplicateName",
    "UnknownConverter",
    "ToolUnavailable",
    "ToolFailed",
    "ToolTimeout",
    "OutputNotMathML",
]
