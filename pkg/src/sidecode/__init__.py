"""Zero-error and epsilon-error coding for computing functions at two
decoders with complementary side information, and index coding with
correlated sources."""

from ._config import CapExceeded, caps_override, get_caps, set_caps
from .coloring import Coloring, min_entropy_coloring
from .confusion import (
    CompatibilityWitness,
    FunctionPair,
    IndexCodingInstance,
    complementary_delivery_graph,
    complementary_pair,
    index_confusion_graph,
    is_compatible,
    n_instance_graph,
    one_receiver_graph,
    rooks_graph,
)
from .gentropy import (
    AuxiliaryChannel,
    EntropyBracket,
    chromatic_entropy,
    complementary_entropy_bracket,
    graph_entropy,
    koerner_union,
    union_rate_min,
)
from .graphs import (
    Graph,
    and_power,
    chromatic_number,
    clique_number,
    is_perfect,
    maximal_independent_sets,
    or_power,
    union,
)
from .pmf import (
    JointPmf,
    MultiPmf,
    PmfError,
    conditional_entropy,
    dsbs,
    entropy,
    function_conditional_entropy,
    iid_extension,
    typical_set,
)
from .rates import (
    RateReport,
    analyze,
    complementary_delivery_rate,
    converse_RO,
    cutset_bound,
    eps_error_exact,
    index_coding_rate,
    inner_bound_RI,
    zero_error_bounds,
)

__version__ = "0.1.0"
