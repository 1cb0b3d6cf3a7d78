"""arsys: exact decision procedures for arithmetic root systems of
diagonal bicharacters, with the rank-2 and rank-3 classification tables
as machine-checked data."""

from .exponents import (
    ContextMismatchError,
    GroupContext,
    GroupElement,
    has_int_exponent,
    solve_min_exponent,
)
from .bicharacter import (
    Basis,
    Bicharacter,
    CartanVerdict,
    DynkinDiagram,
    UndefinedMValueError,
    cartan_verdict,
    connected_components,
    diagram,
    m_value,
    reflect_basis,
    reflect_diagram,
)
from .groupoid import (
    ArithmeticVerdict,
    Caps,
    ExplorationResult,
    GroupoidObject,
    explore,
    is_arithmetic,
    positive_roots,
)
from .equivalence import (
    CapExceededError,
    DiagramGraph,
    FinitenessReport,
    GroupDescriptor,
    WBGroup,
    build_diagram_graph,
    describe_group,
    finiteness_criterion,
    generate_WB,
    twist_equivalent,
    weyl_equivalent,
)
from .subsystems import Subsystem, check_lbasis, restrict
from .catalog import (
    CatalogEntry,
    classify_rank3,
    instantiate,
    load_catalog,
    verify_tables,
)

__all__ = [name for name in dir() if not name.startswith("_")]
