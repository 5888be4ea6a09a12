"""certsel: prover/verifier certificate selection on tripartite graphs."""

from .errors import (
    BudgetExceededError,
    CertselError,
    InfeasibleError,
    NoProverError,
    ParseError,
    UndefinedMetricError,
    UnknownVertexError,
    ValidationError,
)
from .generators import RandomCsiParams, gadget_zoo, letters_digits, random_csi
from .metrics import (
    AfcWitness,
    afc_exact,
    afc_greedy,
    afc_kappa,
    afc_of_set,
    best_completeness,
    certificate_precision,
    completeness,
    prover_precision,
    set_precision,
    soundness,
    verifier_precision,
    verifier_precision_formula,
)
from .model import (
    CsInstance,
    ProverAssignment,
    VerifierAcceptance,
    max_features_per_datapoint,
    neighbors,
    set_neighbors,
    validate,
)
from .reductions import (
    ReductionArtifact,
    SetSystem,
    SourceGraph,
    dks_brute,
    lift_dks,
    lift_mku,
    mku_brute,
    reduce_dks,
    reduce_mku,
)
from .solvers import (
    DcsSolution,
    is_eps_csi,
    optimal_prover_given_verifier,
    solve_dcs2_exact,
    solve_dcs2_greedy,
    solve_dcs_exact,
    solve_dcs_greedy,
)

__version__ = "0.1.0"
