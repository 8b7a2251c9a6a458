"""Monte Carlo valuation of modularity-stage transitions (M+ operators)."""

from archval.architecture import (
    ArchitectureSpec,
    Catalog,
    ComponentSpec,
    FractionSpec,
    ModularityStage,
    deployment_cost,
    stage_of,
    validate,
)
from archval.errors import ArchvalError, CatalogError, ConfigError, ParameterError, ScenarioError
from archval.mplus import TransitionDecision, ValueDistribution, decide, mplus_value, value_trajectory
from archval.renewal import (
    RunResult,
    SimulationConfig,
    cost_trajectory,
    discounted_cost,
    simulate_many,
    simulate_run,
)
from archval.replacement import min_of, replacement_distribution
from archval.scenario import Scenario, f6_demo, load_scenario
from archval.stats import CostDistribution
from archval.stochastic import (
    ComposedMin,
    LifetimeDistribution,
    LognormalMoments,
    PointMass,
    Weibull,
    lognormal_from_moments,
    point_mass,
    weibull,
    weibull_scale_from_mean,
)
from archval.streams import RngStream

__version__ = "0.1.0"
