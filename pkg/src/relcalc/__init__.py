"""Linear relations between finite-dimensional Hilbert spaces and their Hyers-Ulam stability."""

__version__ = "0.1.0"

from .decomposition import (
    OperatorPart,
    abs_relation,
    cogram,
    gamma,
    gram,
    hus_constant,
    moore_penrose,
    quotient_operator_norm,
    reconstruct,
    regular_part,
    resolvent_contraction,
    sqrt_nonneg,
    z_transform,
)
from .documents import DocumentError, parse_document, read_document, relation_to_document, write_document
from .errors import NotInDomainError, NumericalInconsistencyError, PreconditionError
from .relation import (
    CosetElement,
    LinearRelation,
    adjoint,
    cartesian_product,
    compose,
    from_generators,
    from_graph,
    from_parts,
    from_stacked,
    identity,
    image_of,
    inverse,
    minkowski_sum,
    multivalued,
    preimage_of,
    relations_equal,
    restrict,
    scalar_mul,
    shift,
    zero_relation,
)
from .relation import sum as relation_sum
from .spectral import SpectrumReport, point_spectrum, verify_spectral_identity
from .stability import (
    FamilySpec,
    StabilityReport,
    block_matrix,
    certify_hus,
    check_product_stability,
    check_sum_stability,
    hus_oracle,
    truncation_probe,
    verify_algebra,
    verify_equivalences,
)
from .subspace import Subspace, complement, intersect, orthonormalize, sum_span

__all__ = [name for name in dir() if not name.startswith("_")]
