"""Adaptive parallel tempering with policy-gradient ladder tuning."""

from .adaptation import (
    PolicyState,
    VousdenState,
    epsilon_schedule,
    policy_log_grad,
    sample_action,
    update_policy,
    vousden_update,
)
from .diagnostics import autocorr, integrated_act, mean_act, nll_trace, spearman
from .ensemble import Ensemble, StretchConfig, draw_stretch_z, stretch_sweep
from .rewards import (
    HistoryRing,
    WindowStats,
    reward_esjd,
    reward_neg_acc_std,
    reward_swap_mean_distance,
    swap_mean_distance,
)
from .targets import (
    BoundedDomain,
    EggBox,
    GaussianMixture,
    Rosenbrock,
    StandardNormal,
    TargetDistribution,
    make_gaussian_mixture,
    uniform_init,
)
from .tempering import (
    LogDiffAction,
    PtState,
    TemperatureLadder,
    acceptance_rates,
    geometric_ladder,
    ladder_from_log_diffs,
    pt_step,
    swap_log_accept,
    swap_round,
)

__version__ = "0.1.0"
