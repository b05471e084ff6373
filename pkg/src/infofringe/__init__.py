"""Two-outcome interference from a constant-information-rate rule.

Modules
-------
oracle      amplitude model of the Mach-Zehnder interferometer (reference)
geometry    statistical distance, fringe law, ODE solver, k selection
trials      seeded Monte Carlo clicks, frequency estimates, delayed choice
fitting     maximum-likelihood wavenumber estimate
estimator   scikit-learn style ``FringeClassifier``
io          CSV / report formats and run manifests
cli         ``infofringe`` command line
"""
__version__ = "0.1.0"

from .exceptions import (
    BoundarySingularityError,
    DomainError,
    InfoFringeError,
    InvalidStateError,
    NonIdentifiableError,
    ParseError,
)
from .pairs import ProbabilityPair
from .oracle import (
    ModeState,
    ScalePreparation,
    SetupConfig,
    SetupKind,
    apply_beam_splitter,
    detection_probabilities,
    propagate_phases,
)
from .geometry import (
    FringeLaw,
    FringeTable,
    KChoice,
    KSelection,
    MetricSample,
    Sign,
    choose_k,
    closed_form_fringe,
    constant_metric_ode_solve,
    infer_distribution,
    information_rate,
    information_speed,
    metric_density,
    reparametrized_fringe,
    setup1_inference,
    statistical_distance,
)
from .trials import (
    ClickRecord,
    ClickStream,
    delayed_choice_run,
    empirical_distribution,
    empirical_statistical_distance,
    run_trials,
)
from .fitting import KEstimate, fit_k
from .estimator import FringeClassifier
