"""Covering moduli, point-finite covers and c0+ embeddings of finite metric spaces."""
from .catalog import (
    C0PlusGridCover, GridCellIndex, LinfGridCover, RootedTree, c0_lower_bound_witness,
    clique_cover, greedy_separable_cover, last_common_ancestor, tree_cover,
)
from .covers import (
    Cover, CoverMetrics, cover_diameter, lebesgue_number, max_multiplicity,
    prune_cover, pullback_cover, scale_cover,
)
from .embedding import (
    CoordinateId, DistortionReport, EmbeddingConfig, ScaleFamily, build_scale_family,
    certify_distortion, embed, embed_space, fold_to_positive,
)
from .errors import (
    AsymmetricMatrix, BadParams, BadTree, CliqueCapExceeded, NegativeDistance, NotACover,
    NotVectorSpace, StoneError, TooLarge, TriangleViolation, UncertifiableScale,
)
from .metric import (
    FiniteMetricSpace, MapModuli, SkeletonParams, ball, generate_space, greedy_skeleton,
    map_moduli, nearest_point_reduction, validate_space,
)
from .moduli import (
    ModulusCurve, check_duality, check_linear_type, check_small_c, delta_coarse,
    delta_oracle, delta_uniform, modulus_curve,
)
from .sequences import SparseNonnegativeSequence

__version__ = "0.1.0"
