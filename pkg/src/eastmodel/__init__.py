"""East kinetically constrained spin chain: simulation and exact analysis.

A site of the chain may refresh only while its East neighbor is empty; the
rightmost window site sees a permanently empty boundary site.  Refreshes draw
occupied with probability p = 1 - q, so the product Bernoulli(p)-occupancy
measure is reversible.  The package covers:

- ``core``: configurations, windows, parameters, renewal laws, time ladders,
  and the seed derivation shared by every random stream;
- ``simulate``: the faithful per-site-clock scheduler and the rejection-free
  event scheduler, plus persistence / activity / hitting-time estimators and
  distinguished-zero tracking;
- ``exact``: sparse generators, spectral gaps with certified residuals,
  Dirichlet/entropy forms, semigroup evolution, hitting-time tails, block
  dynamics, tilted eigenvalues, and log-Sobolev bounds;
- ``reach``: constrained-reachability enumeration under a vacancy budget;
- ``limits``: the coarsening limit laws (Laplace transforms, densities,
  moments);
- ``experiments``: quench plateau / aging / domain-length experiments and
  relaxation from product measures, reported with declared verdict bands;
- ``cli``: the ``east`` command wrapping all of the above.
"""

__version__ = "0.1.0"

from .core import (
    Boundary,
    Configuration,
    Interval,
    ModelParams,
    RenewalKind,
    RenewalLaw,
    TimeScale,
    constraint,
    dynamics_rng,
    replica_rng,
    sample_bernoulli_product,
    sample_renewal,
    site_rng,
)
from .exact import (
    BlockSpectrum,
    LsiBounds,
    SpectrumResult,
    activity_phi,
    activity_scgf,
    block_dynamics_spectrum,
    build_generator,
    dirichlet_form,
    entropy,
    gap_asymptotics_check,
    hitting_time_tail,
    lsi_bounds,
    persistence_exponent,
    semigroup_apply,
    spectral_gap,
    stationary_activity_rate,
    stationary_vector,
    variance,
)
from .experiments import (
    EstimateCI,
    ExperimentReport,
    Verdict,
    aging_experiment,
    convergence_experiment,
    domain_length_experiment,
    plateau_experiment,
    quench_time_grid,
    renewal_vacancy_profile,
)
from .limits import (
    LimitKind,
    LimitLaw,
    alternating_differences_ok,
    density_p,
    exp_integral_E1,
    laplace_X,
    laplace_Y,
)
from .reach import Certification, ReachResult, certify_energy_barrier, enumerate_reachable
from .simulate import (
    MAX_HORIZON,
    NO_ZERO,
    ActivityEstimate,
    DistinguishedZeroPath,
    HittingSample,
    PersistenceCurve,
    RingEvent,
    SimMode,
    TrajectoryStats,
    hitting_time,
    measure_activity,
    measure_persistence,
    run_graphical,
    track_distinguished,
)

__all__ = [
    "__version__",
    # core
    "Boundary",
    "Configuration",
    "Interval",
    "ModelParams",
    "RenewalKind",
    "RenewalLaw",
    "TimeScale",
    "constraint",
    "dynamics_rng",
    "replica_rng",
    "sample_bernoulli_product",
    "sample_renewal",
    "site_rng",
    # exact
    "BlockSpectrum",
    "LsiBounds",
    "SpectrumResult",
    "activity_phi",
    "activity_scgf",
    "block_dynamics_spectrum",
    "build_generator",
    "dirichlet_form",
    "entropy",
    "gap_asymptotics_check",
    "hitting_time_tail",
    "lsi_bounds",
    "persistence_exponent",
    "semigroup_apply",
    "spectral_gap",
    "stationary_activity_rate",
    "stationary_vector",
    "variance",
    # experiments
    "EstimateCI",
    "ExperimentReport",
    "Verdict",
    "aging_experiment",
    "convergence_experiment",
    "domain_length_experiment",
    "plateau_experiment",
    "quench_time_grid",
    "renewal_vacancy_profile",
    # limits
    "LimitKind",
    "LimitLaw",
    "alternating_differences_ok",
    "density_p",
    "exp_integral_E1",
    "laplace_X",
    "laplace_Y",
    # reach
    "Certification",
    "ReachResult",
    "certify_energy_barrier",
    "enumerate_reachable",
    # simulate
    "ActivityEstimate",
    "DistinguishedZeroPath",
    "HittingSample",
    "MAX_HORIZON",
    "NO_ZERO",
    "PersistenceCurve",
    "RingEvent",
    "SimMode",
    "TrajectoryStats",
    "hitting_time",
    "measure_activity",
    "measure_persistence",
    "run_graphical",
    "track_distinguished",
]
