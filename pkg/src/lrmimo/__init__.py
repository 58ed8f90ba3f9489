"""Lattice-reduction-aided MIMO detection toolkit.

Modules: matcore (matrix kernels), reduction (LLL variants), mimo
(constellation/channel/noise), detect (ZF, LR-aided ZF, ML), flops (cost
model), simharness (Monte Carlo driver), cli (command line).
"""

from .detect import (
    DetectionResult,
    SearchSpaceTooLarge,
    ml_detect,
    quantize_z_domain,
    zf_detect,
    zf_lr_detect,
    zf_lr_detect_real,
)
from .flops import (
    ChargeSchedule,
    ComplexityRow,
    CostModel,
    FlopCounter,
    complex_op_cost,
    complexity_report,
    instrument,
    schedule_for,
    step_cost,
)
from .matcore import (
    GaussIntMatrix,
    GivensTheta,
    QRFactorization,
    RankDeficient,
    ZeroPivot,
    apply_givens_left,
    apply_givens_right,
    back_substitute,
    givens_theta,
    integer_determinant,
    is_unimodular,
    pseudo_inverse_apply,
    qr_decompose,
    real_embedding,
    real_embedding_vector,
    round_gaussian,
    round_half_away,
)
from .mimo import (
    ChannelRealization,
    Constellation,
    InvalidSize,
    LengthMismatch,
    NoiseSpec,
    add_noise,
    build_constellation,
    demodulate,
    generate_channel,
    modulate,
    snr_to_noise_variance,
)
from .reduction import (
    ReductionParams,
    ReductionResult,
    ReductionState,
    ZeroDiagonal,
    factorization_error,
    fclll_wen,
    is_lll_reduced,
    is_siegel_reduced,
    is_size_reduced,
    lll_reduce_real,
    lovasz_check,
    mclll,
    siegel_check,
    size_reduce_column,
)
from .simharness import (
    BerRecord,
    SimConfig,
    emit_csv,
    load_matrix,
    run_frame,
    run_sweep,
    save_matrix,
)

__version__ = "0.1.0"
