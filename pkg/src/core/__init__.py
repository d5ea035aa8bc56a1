"""
Core algebra: prime fields and dense matrices over them.
"""

from src.core.field import (
    DivisionByZeroError,
    FieldCtx,
    FieldError,
    FieldOp,
    NotPrimeError,
    OrderNotDividingError,
    OutOfRangeError,
    bits_per_element,
    ceil_log,
    digit_reverse,
    digits,
    fe_arith,
    find_generator,
    get_field,
    root_of_unity,
)
from src.core.matrix import (
    BadShapeError,
    DuplicatePointsError,
    Mat,
    MatrixError,
    OracleOp,
    ShapeMismatchError,
    SingularMatrixError,
    ZeroScalarError,
    build_cauchy_like,
    build_permuted_dft,
    build_vandermonde,
    concat_rows,
    mat_oracle,
    systematic_grs_A,
)

__all__ = [
    "BadShapeError",
    "DivisionByZeroError",
    "DuplicatePointsError",
    "FieldCtx",
    "FieldError",
    "FieldOp",
    "Mat",
    "MatrixError",
    "NotPrimeError",
    "OracleOp",
    "OrderNotDividingError",
    "OutOfRangeError",
    "ShapeMismatchError",
    "SingularMatrixError",
    "ZeroScalarError",
    "bits_per_element",
    "build_cauchy_like",
    "build_permuted_dft",
    "build_vandermonde",
    "ceil_log",
    "concat_rows",
    "digit_reverse",
    "digits",
    "fe_arith",
    "find_generator",
    "get_field",
    "mat_oracle",
    "root_of_unity",
    "systematic_grs_A",
]
