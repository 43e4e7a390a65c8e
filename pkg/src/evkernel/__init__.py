"""Conditionalization of interval-valued and belief-function evidence.

Prior knowledge is a lower-bound function on the subsets of a finite frame;
conditional knowledge is a set of interval rules ``p(x | y) >= v``. The
package refines the prior with several engines (generalised Bayes bounds,
optimistic and general consistency regimes, partition bounds, mass
redistribution) and checks every result against an exact linear-programming
oracle.
"""

from .errors import *  # noqa: F401,F403
from .evidence import (
    BELIEF,
    ENVELOPE,
    RAW,
    MassFunction,
    SupportFunction,
    belief_from_mass,
    conflict,
    dempster_combine,
    is_more_specific,
    mass_from_belief,
    plausibility,
    simple_support,
)
from .lattice import (
    Frame,
    Partition,
    PropSet,
    bell_number,
    complement,
    enumerate_partitions,
    is_subset,
    join,
    make_frame,
    meet,
    restricted_growth_strings,
)
from .rules import (
    ConditionalMass,
    Rule,
    RuleBase,
    conditional_mass,
    lookup,
    make_rulebase,
    vacuous_rulebase,
)
from .interval import (
    ConsistencyReport,
    ProbabilityInterval,
    Violation,
    alpha_interval,
    bayes_lower_bound,
    cheap_closure,
    check_bayes,
    check_general,
    check_optimistic,
    general_lower_conditional,
    optimistic_lower_conditional,
    refine_bayes,
    refine_optimistic,
    refine_optimistic_closed,
)
from .belief import (
    TransferCoefficient,
    conditionalize_mass,
    partition_bound,
    refine_partition,
    transfer_coefficient,
    transfer_coefficients,
)
from .oracle import (
    CredalPolytope,
    ProbabilityVector,
    build_polytope,
    check_consistency_definition,
    is_envelope,
    max_prob,
    min_conditional,
    min_prob,
    natural_extension,
)

__version__ = "0.1.0"
