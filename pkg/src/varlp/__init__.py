"""Variable-exponent Lebesgue norms on step functions over [0, 1].

Nakano, Musielak-Orlicz and ODE-determined norms, the boxplus algebra and its
constants, rearrangement and decomposition bounds, and a seeded harness that
certifies the associated inequalities.
"""

from .decompose import (
    ChainSpec,
    Partition,
    certify_decomposition,
    chain_value,
    decomposition_comparisons,
    level_comparisons,
    make_partition,
    partition_by_levels,
)
from .errors import VarLpError
from .halfline import HalfLineInstance, load_halfline, to_unit_interval, verify_isometry
from .harness import GenConfig, generate_instance, replay, run_suite
from .instances import instance_dict, load_instance
from .luxemburg import NormResult, norm_mo, norm_nakano, norm_weighted
from .modular import modular_lambda_derivative, modular_mo, modular_nakano, modular_weighted
from .ode_norm import AccumulationCurve, accumulation, norm_ode, phi_exact_step, phi_numeric, varying_lambda_curve
from .rearrange import aux_transform, certify_rearrangement, permute, sort_by_exponent
from .report import CheckReport, Witness
from .scalars import boxplus, constant_a, constant_bp, equivalence_constant, fold, nested_fold_compare
from .stepfn import ExponentProfile, StepFunction, WeightProfile, common_refinement, normalize, restrict

__version__ = "0.1.0"
