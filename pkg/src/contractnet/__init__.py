"""Exact tooling for extremal contract paths in multiagent resource allocation.

The package builds the worst-case negotiation instances in which rational,
structurally restricted deal sequences are provably long, searches the
implicit contract-net graph exactly, and verifies the constructions'
uniqueness and length claims at desk scale.
"""

from .constructions import (
    ConstructedInstance,
    FIXTURE_CYCLE_3,
    FIXTURE_SNAKE_3,
    FIXTURE_SNAKE_4,
    build_cor1,
    build_cor2,
    build_cor3,
    build_mk_path,
    build_multi,
    build_thm3,
    build_thm4,
    build_thm5,
    build_thm6,
    classify_labels,
    ext_transform,
    reappearance_r,
)
from .deals import (
    Deal,
    NotADealError,
    O_CONTRACT,
    Rationality,
    SWAP,
    StructuralClass,
    UNRESTRICTED,
    involved_agents,
    is_rational,
    is_structural,
    m_contract,
)
from .explore import (
    PathQuery,
    PathResult,
    is_pareto_optimal,
    l_max_scan,
    phi_successors,
    run_maximal_path,
    shortest_path,
    unrestricted_o_path,
    verify_unique_path,
)
from .files import InstanceFile, load_instance, save_instance
from .hypercube import HamCycle, SnakePath, ham_cycle, has_sc_property, snake_search
from .model import (
    AdditiveUtility,
    Allocation,
    ClosedFormUtility,
    ResourceSetting,
    TableUtility,
    ZeroOneUtility,
    evaluate,
    is_monotone,
    sigma_e,
    sigma_u,
)
from .verify import ClaimReport, verify_claims

__version__ = "0.1.0"
