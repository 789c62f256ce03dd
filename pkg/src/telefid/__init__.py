"""Fidelity / deviation / success-probability trade-offs of heralded
continuous-variable teleportation under a correlated-Gaussian record-noise
model: closed-form primitives, deterministic quadrature, Monte Carlo
cross-checks, parameter sweeps and a CLI."""

from .model import (AcceptAll, AdditiveNoiseBaseline, FilterSpec, MbNla,
                    PriorSpec, SurrogateParams, additive_noise_fidelity,
                    conditional_overlap, deterministic_baseline,
                    filter_weight, noise_density)
from .quadrature import (DiskPair, QuadConfig, QuadratureError, disk_average,
                         disk_pair_log, log_sum_guard, radial_prior_average)
from .profile import (FidelityProfile, Protocol, conditional_fidelity,
                      default_radii, phase_invariance_probe, profile_table,
                      success_probability, tail_bound)
from .ensemble import (MeritTriple, RobustObjective, SelectivityReport,
                       binary_entropy, cantelli_guarantee,
                       conditional_moments, effective_prior_density,
                       heralding_mutual_information, robust_objective,
                       selectivity_divergence, selectivity_indices,
                       throughput_bound)
from .oracle import (MCEnsemble, MCPoint, OracleConfig, mc_ensemble, mc_point,
                     mc_success_flag_mi, sample_effective_prior)
from .tradeoff import (SlopeEstimate, SweepRecord, constrained_best,
                       objective_best, pareto_frontier, slope_estimate, sweep,
                       sweep_pairs)

__version__ = "0.1.0"
