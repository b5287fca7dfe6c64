"""Wasserstein-type self-similarity analysis of discrete measures.

The library computes local transport distances between normalized blow-ups
of a weighted point cloud, derives self-similarity and flatness coefficients
from them, sweeps those coefficients across dyadic scales to form truncated
Dini sums, and classifies support points into atoms and d-rectifiable
strata.  A verification harness numerically certifies the comparison
inequalities between the plain and smoothed distances.
"""

from .alpha import (
    AlphaProfile,
    GroupWindow,
    SearchConfig,
    alpha_D,
    alpha_flat,
    alpha_G,
    alpha_G_star,
    alpha_min,
    compute_profile,
)
from .classify import (
    ClassificationReport,
    StratumLabel,
    classify_point,
    decompose,
    detect_atom,
    tangent_plane,
)
from .errors import (
    BadBasis,
    DegenerateSpectrum,
    DepthOverflow,
    DimensionMismatch,
    EmptyBall,
    EmptyMeasure,
    InnerBallEmpty,
    InsufficientData,
    NotNormalized,
    TangentiaError,
    UnsupportedDim,
)
from .generators import (
    IfsSpec,
    SnowflakeSpec,
    cantor_measure,
    flat_measure,
    ifs_measure,
    mix,
    sierpinski_measure,
    snowflake_measure,
    spiral_measure,
)
from .measure import (
    BallQuery,
    DiscreteMeasure,
    SimilarityMap,
    ball_mass,
    blowup,
    blowup_restricted,
    doubling_constant,
    load_measure,
    measure_from_dict,
    measure_to_dict,
    pushforward,
    save_measure,
    support_distance,
)
from .multiscale import (
    DiniReport,
    ScaleLadder,
    ahlfors_check,
    density_profile,
    dimension_slope,
    dini_report,
    dini_sum,
    local_dimension,
    sweep,
    tangent_uniqueness_diagnostic,
)
from .transport import BumpFunction, DualSolution, default_bump, w1, w_phi
from .verify import (
    CheckReport,
    check_lemma_5_1,
    check_lemma_5_2,
    check_lemma_5_3,
    check_w1_axioms,
    check_wphi_bounds,
    random_measure,
    run_all,
    validity_suite,
    witness_bump_linear,
    witness_bump_slope,
    witness_pair_rings,
    witness_pair_slope,
)

__version__ = "0.1.0"
