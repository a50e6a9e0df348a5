from .linalg import LinearSolution, Rational, RationalResult, SparseMatrix, format_rational, rank, rat_arith, solve_linear
from .cohomology import (
    GradedClass,
    ProductModel,
    VarietyModel,
    betti,
    euler_char,
    cup,
    integrate,
    make_model,
    model_from_spec,
    product_model,
    pullback,
    pushforward,
)
from .correspondences import Correspondence, ProjectorSet, act, ck_projectors, compose, diagonal, small_diagonal, tau, transpose
from .tautological import NormalMonomial, RelationTable, TautExpr, basis, bootstrap_relations, evaluate, normalize
from .motives import GradedDims, MotiveExpr, dims_of, signed_sym_square, verify_decomposition
