"""Macomss: matrix completion for data with one structured missing block and
heterogeneous, rank-one-modeled sporadic missingness."""

__version__ = "0.1.0"

from .baselines import ImputedMatrix, knn_impute, mean_impute, rs_impute
from .completion import (CompletionOptions, CompletionResult, RotatedBlocks, assemble,
                         build_stacks, choose_r0, macomss, rotate, select_rank)
from .core import BlockId, BlockPartition, MaskedMatrix, block_view, new_masked_matrix
from .evaluation import (ConditionReport, LogisticFit, auc, condition_report,
                         cv_logistic_auc, fit_logistic, nmse, recovery_losses)
from .missingness import ThetaEstimate, estimate_theta, normalize
from .numerics import (KERNEL_BACKEND, SvdResult, frobenius_norm, invert_leading,
                       spectral_norm, svd)
from .synthgen import (GenSpec, LogisticTruth, MissSpec, add_gaussian_noise,
                       apply_scenario_block, gen_approx_lowrank, gen_logistic,
                       gen_lowrank, gen_poisson, gen_poisson_lowrank, gen_theta,
                       rng_stream, sample_mask)

__all__ = [name for name in dir() if not name.startswith("_")]
