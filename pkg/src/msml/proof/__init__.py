from .builder import (
    BuildError,
    ProofBuilder,
    derive_box_conj,
    derive_cong,
    derive_dia_disj,
    derive_mono,
)
from .checker import (
    MP,
    UG,
    AddInst,
    Axiom,
    Checker,
    DualInst,
    GlobalMode,
    Hyp,
    KInst,
    LocalMode,
    Mono,
    NormInst,
    Proof,
    Step,
    Taut,
    Verdict,
    check_proof,
    cited_instances,
    delete_step,
    instance_formula,
    lambda_instances,
    prune,
)
from .schemes import (
    GUARDS,
    AxiomScheme,
    AxiomSet,
    SchemeError,
    add_instance,
    dual_instance,
    instantiate_scheme,
    k_instance,
    make_scheme,
    norm_instance,
)
from .taut import TooManyAtoms, taut_check
from .transform import (
    DeductionResult,
    GlobalizeResult,
    TransformError,
    Witness,
    dt_global,
    dt_local,
    dt_local_inverse,
    gamma_closure,
    globalize,
)
from .files import (
    parse_axioms,
    parse_formula_list,
    parse_justification,
    parse_proof,
    print_axioms,
    print_formula_list,
    print_justification,
    print_proof,
)
