"""Numerical certification of 2x2 block matrix positivity, partial
transposes, and the geometric-mean inequalities they satisfy."""

from .blocks import (
    Block2x2,
    assemble,
    average_diagonal,
    ando_mix,
    cartesian_parts,
    geometric_mean_block,
    is_positive,
    is_ppt,
    negate_offdiag,
    offdiag_compression,
    partial_transpose,
    ppt_variants,
    rotate_offdiag,
    schur_criterion,
    split,
    swap_blocks,
)
from .certificates import Certificate, Link
from .errors import (
    BudgetExhaustedError,
    ConvergenceError,
    MatrixError,
    NotHermitianError,
    NotPDError,
    NotPPTError,
    NotPSDError,
)
from .linalg import (
    EigenSystem,
    PolarFactors,
    SvdSystem,
    frac_power_quarter_half,
    geometric_mean,
    geometric_mean_reg,
    herm_eig,
    loewner_leq,
    min_eig,
    pd_inverse,
    polar,
    psd_sqrt,
    svd,
)
from .sampling import (
    SampleSpec,
    child_seed,
    random_ginibre,
    random_pd,
    random_ppt_rejection,
    random_ppt_separable,
    random_psd,
    random_psd_block,
    random_unitary,
)
from .functionals import Functional, evaluate, parse_functional
from .verify import (
    BlockContext,
    verify_extremal_gm,
    verify_half_index,
    verify_hiroshima,
    verify_lee,
    verify_lieb_gm,
    verify_main,
    verify_norm_chain,
    verify_re_im,
    verify_singular_product_chain,
    verify_trace_chain,
)
from .hunt import HuntReport, hunt_sj_counterexample, independent_violation_check
from .campaign import VerificationReport, run_campaign, verify_block

__version__ = "0.1.0"
