"""The SMC machine instance: signature, axioms, interpreter, term model and
the proof of the worked example."""
from .axioms import expand_boxes, pbox, smc_axioms
from .machine import (
    DEFAULT_BUDGET,
    RunResult,
    SmcConfig,
    config_term,
    mem_term,
    run_ctrl,
    smc_run,
    smc_step,
    stack_term,
    term_config,
    term_memory,
)
from .prover import (
    Elaboration,
    MutationReport,
    PgmProver,
    elaborate_pgm_proof,
    mem_get_goal,
    mem_get_theorem,
    mutation_check,
    pgm_conclusion,
    pgm_term,
    prove_program,
    symbolic_finals,
)
from .syntax import (
    PGM_TEXT,
    SmcError,
    canon_ctrl,
    expand,
    parse_program,
    show_program,
    signature_for,
    smc_signature,
    to_term,
)
from .termmodel import (
    CoherenceReport,
    TermModel,
    build_term_model,
    check_coherence,
    mem_countermodel,
    mem_fragment,
    scheme_instances,
)
