from typing import Literal


CheckKind = Literal[
  "model",
  "projectors",
  "mck",
  "lieberman",
  "relations",
  "injectivity",
  "matching-sum",
  "delta-h",
  "pure-degree",
  "abel-jacobi",
  "betti-zy",
  "yf",
  "zf",
  "andthis",
  "sym-square-split",
  "middle-iso",
  "normalize",
]

# every check kind is backed by exactly one library operation
CHECK_OPERATIONS: dict[CheckKind, str] = {
  "model": "fano_mck.algebra.cohomology.model_integrity",
  "projectors": "fano_mck.algebra.correspondences.projectors_report",
  "mck": "fano_mck.algebra.correspondences.check_mck",
  "lieberman": "fano_mck.algebra.correspondences.check_lieberman",
  "relations": "fano_mck.algebra.tautological.relations_report",
  "injectivity": "fano_mck.algebra.tautological.injectivity_report",
  "matching-sum": "fano_mck.algebra.tautological.matching_sum",
  "delta-h": "fano_mck.algebra.correspondences.delta_h_decomposition",
  "pure-degree": "fano_mck.algebra.correspondences.check_pure_degree",
  "abel-jacobi": "fano_mck.algebra.correspondences.check_abel_jacobi",
  "betti-zy": "fano_mck.algebra.cohomology.compare_betti",
  "yf": "fano_mck.algebra.motives.verify_yf",
  "zf": "fano_mck.algebra.motives.verify_zf",
  "andthis": "fano_mck.algebra.motives.verify_abelian_surface",
  "sym-square-split": "fano_mck.algebra.motives.verify_symmetric_square_split",
  "middle-iso": "fano_mck.algebra.motives.verify_middle_isomorphism",
  "normalize": "fano_mck.algebra.tautological.normalize",
}

# kinds that only make sense on a tate-odd model with a nonzero odd part
NEEDS_ODD_PART: frozenset[CheckKind] = frozenset({
  "lieberman",
  "relations",
  "pure-degree",
  "abel-jacobi",
})

# kinds that need a tate-odd model
NEEDS_TATE_ODD: frozenset[CheckKind] = frozenset({
  "lieberman",
  "relations",
  "injectivity",
  "delta-h",
  "pure-degree",
  "abel-jacobi",
  "normalize",
})
