"""Covariance-matrix correlation measure for multipartite Gaussian states."""

from .channels import (
    GaussianChannel,
    SymplecticTransform,
    apply_channel,
    apply_symplectic,
    check_channel,
    make_random_channel,
)
from .errors import *  # noqa: F401,F403
from .gaussian import (
    PartitionedCovariance,
    PureFactors,
    SstsParams,
    StandardFormParams,
    is_physical,
    make_pure,
    make_random_physical,
    make_ssts,
    merge_parties,
    permute_parties,
    reduce,
    standard_form,
    standard_form_state,
    symplectic_eigenvalues,
    tensor,
    vacuum,
)
from .measure import (
    MeasureReport,
    closed_form_channelled,
    closed_form_pure,
    closed_form_two_mode,
    ssts_diff_sweep,
    ssts_measure,
    ssts_nf,
)

__version__ = "0.1.0"
