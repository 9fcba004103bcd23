from .formula import (
    App,
    Formula,
    Not,
    Or,
    Var,
    as_box,
    as_conjunction,
    as_iff,
    as_implication,
    bot_of,
    box,
    conj,
    depth,
    guarded,
    iff,
    implies,
    land,
    lor,
    neg,
    size,
    subformulas,
    variables,
)
from .parser import ParseError, parse_formula, parse_signature, print_signature, strip_comment
from .printer import print_formula, print_plain
from .signature import (
    OpDecl,
    Signature,
    SignatureError,
    SortError,
    mk_bot,
    mk_dual,
    mk_top,
    sort_of,
    substitute,
)
