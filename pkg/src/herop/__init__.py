"""Hereditary functional calculus and (A,m)-isometric tuples of commuting matrices."""
from ._kernels import USE_NUMBA
from .errors import (
    ANotPositive,
    DimensionError,
    GenerationFailed,
    HeropError,
    IllConditionedDecomposition,
    InputNotAmIsometry,
    NonCommutingError,
    NotA2Isometric,
    NotTwoIsometric,
    PreconditionFailed,
    SingularBasis,
    StructureViolation,
    TupleFileError,
)
from .gen import (
    A2Instance,
    gen_A2_construction,
    gen_block_example,
    gen_jordan_isometry,
    gen_spherical_unitary,
    gen_two_isometry_sum,
)
from .hereditary import (
    HereditaryPolynomial,
    evaluate,
    format_polynomial,
    isosymmetry_polynomial,
    m_isometry_polynomial,
    multi_indices,
    parse_polynomial,
    poly_mul,
    toral_polynomials,
    tuple_power,
)
from .matcore import cluster_points, coordinates_in_basis, null_space, spectrum
from .spectral import (
    JointSpectralDecomposition,
    SNDecomposition,
    joint_decomposition,
    split_SN,
    verify_decomposition_theorem,
    verify_pairing_vanishing,
    verify_radical_inclusion,
)
from .structure2 import (
    TwoIsometryBlock,
    TwoIsometryStructure,
    classify_2_isometric,
    classify_A2,
    reconstruct,
)
from .tuples import (
    CheckReport,
    CommutingTuple,
    check_A_m_isometric,
    check_A_n_nilpotent,
    check_isosymmetric,
    check_spherical_A_isometry,
    check_toral,
    direct_sum,
    isometry_order,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
