"""Exact combinatorics of ancestral configurations on matching tree topologies."""

__version__ = "0.1.0"

from .errors import (
    CapacityError,
    DataError,
    DegenerateDistributionError,
    NewickError,
    TreeDomainError,
)
from .trees import (
    History,
    LabeledTopology,
    OrderedShape,
    Shape,
    canonicalize,
    catalan,
    count_histories,
    count_ordered,
    enumerate_shapes,
    iter_histories,
    iter_ordered,
    nodes,
    subtree,
    wedderburn_etherington,
)
from .newick import parse_history, parse_labeled, parse_shape, serialize
from .configs import (
    node_configs,
    oracle_configurations,
    oracle_realizations,
    root_configs,
    total_configs,
)
from .weights import (
    UNIFORM,
    YULE,
    ShapeWeights,
    induced_distribution,
    lab,
    labeled_count,
    ouh,
    out,
    shape_weights,
    split_probability,
    yule_prob,
)
from .moments import (
    MomentTable,
    estimate_exponential_order,
    estimate_subexp_constant,
    exhaustive_moments,
    uniform_moments,
    yule_moments,
)
from .series import (
    Series,
    Sqrt3,
    catalan_gf,
    gf_uniform,
    gf_yule_R,
    verify_functional_systems,
)
from .stats import (
    ExactDistribution,
    ExtremalReport,
    SampleRun,
    exact_correlation,
    exact_distribution,
    extremal_shapes,
    make_rng,
    monte_carlo_log_moments,
    sample_tree,
    standardized_log_cdf,
)
