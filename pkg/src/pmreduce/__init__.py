"""Unique-witness P-matrix violation search and its reductions to 3-SAT and Subset Sum."""

from .errors import PipelineError
from .instance import (
    PMatrixInstance,
    SubsetMask,
    direct_search,
    generate_unique_violation,
    is_p_matrix,
    oracle_query_equality,
    oracle_query_sign,
    principal_minor,
    verify_unique_violation,
)
from .reduction import (
    CnfFormula,
    DecodeMap,
    SubsetSumInstance,
    VarMap,
    decode_sat_solution,
    decode_subset_sum_solution,
    emit_dimacs,
    emit_subset_sum,
    encode_sat,
    encode_subset_sum,
    expansion_measured,
    expansion_nominal,
)

__version__ = "0.1.0"
