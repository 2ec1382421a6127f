"""recdyn: recurrence analysis for dynamical systems and their hyperspace
and fuzzy-set extensions.

The package decides and certifies return-set membership in Furstenberg-style
families on three linked layers: a base system on a computable metric space,
the induced map on finite compact subsets under the Hausdorff metric, and
the induced map on step fuzzy sets under the supremum and Skorokhod-style
metrics.  Finite systems are handled exactly (with eventual-periodicity
certificates); continuous benchmark systems use witnessed semantics, where
inclusions are certified by explicit sample points and absences are
inconclusive.
"""

from .spaces import (
    TOL,
    ArcUnion,
    BallUnion,
    Circle,
    DoublingSystem,
    DynSystem,
    FiniteSpace,
    FiniteSubset,
    FiniteSystem,
    MetricSpace,
    NStepSystem,
    OpenSet,
    ProductBox,
    ProductSpace,
    ProductSystem,
    RotationSystem,
    dist,
    iterate,
    n_fold,
    open_contains,
    sample_points,
)
from .hyperspace import (
    CompactSet,
    HyperSystem,
    VietorisOpen,
    enumerate_compacts,
    hausdorff,
    hausdorff_ball_contains,
    hyper_apply,
    product_embed,
    vietoris_contains,
)
from .fuzzy import (
    FuzzyMetric,
    Reparametrization,
    StepFuzzySet,
    ZadehSystem,
    d_inf,
    d_skorokhod,
    fuzzy_to_hyper_witness,
    level_set,
    relabel,
    skorokhod_witness,
    stratify,
    witness_fuzzy,
    zadeh_apply,
)
from .recurrence import (
    FamilyKind,
    FamilySpec,
    InternalCheckError,
    ReturnWindow,
    arc_probes,
    ell_return_set,
    family_eval,
    fuzzy_rec_witness,
    hyper_rec_witness,
    is_rec_system,
    point_recurrence,
    quasi_rigidity_search,
    return_set,
    singleton_probes,
)
from .oracle import (
    EquivalenceReport,
    check_fuzzy_equivalence,
    check_hyperspace_equivalence,
    check_point_recurrence_descent,
    sweep_fuzzy_equivalence,
    sweep_hyperspace_equivalence,
)
from .catalog import build_system, catalog_entries

__version__ = "0.1.0"
