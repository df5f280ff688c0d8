"""Shape-level type system for neural network operations and search spaces.

Operations are typed by their per-axis dimension functions. Two operations
share a type when those functions are equal, which makes them
interchangeable anywhere in a network.

    >>> from optypes import conv, make_identity, type_equiv
    >>> type_equiv(conv(3, p=2, d=2), make_identity())
    True
"""

from .algebra import (
    Composite,
    DimensionFunction,
    FloorAffine,
    ReverseAffine,
    Shape,
    Verdict,
    canonicalize,
    compare_functions,
    compose,
    evaluate,
    functions_equal,
    signature,
)
from .errors import (
    AmbiguousRegion,
    AxisMismatch,
    CycleDetected,
    InputBelowMinimum,
    InvalidGrid,
    InvalidParams,
    InvalidSeed,
    NoPath,
    NotTypeEquivalent,
    OpTypesError,
    ParseError,
    SchemaVersionMismatch,
    ShapeMismatch,
    UnknownPreset,
)
from .generator import (
    GenerationGrid,
    GenerationReport,
    compare_modes,
    expand_space,
    generate_type_equivalent_convs,
    preset_grid,
)
from .graph import OpGraph, interchange, propagate, subgraph_dimfn, validate
from .kernels import BACKEND
from .ops import (
    ConvParams,
    Kind,
    Operation,
    conv,
    conv_t,
    make_conv,
    make_conv_transpose,
    make_identity,
    make_pool,
    parse_op,
    pool,
)
from .relations import (
    ShapeDomain,
    TypeClass,
    complete_compat,
    complete_equiv,
    dedup,
    forward_compat,
    instant_equiv,
    partition_types,
    type_equiv,
)
from .space import Provenance, SearchSpace, baseline_space, preset_space


__version__ = "0.1.0"
