"""Equations over free inverse monoids.

Scheiblich-pair arithmetic and the word problem, typed equation systems
with idempotent and reduced variables, language equations with one-sided
concatenation and their bounded solvers, the sat-preserving hardness
surgeries, and the one-variable decision procedure through balance
certificates.  The fimeq command line fronts the same operations on files.
"""

from .equations import (
    Assignment,
    EqWord,
    TypedSystem,
    VarSymbol,
    check_solution,
    evaluate_side,
    format_eq_word,
    involute_eq_word,
    join_assignment,
    reduce_pattern,
    split_assignment,
    split_general_variables,
    substitute_group_solution,
    substitute_tokens,
    underlying_group_equation,
)
from .errors import BudgetExceeded, FimeqError, InvalidInput, ParseError, PreconditionError
from .fim import (
    ScheiblichPair,
    format_pair,
    group_image,
    identity,
    inverse,
    is_idempotent,
    multiply,
    word_problem,
    word_to_fim,
)
from .langeq import (
    LangEquation,
    LangSystem,
    LangTerm,
    add_terms,
    combine_to_single,
    eval_term,
    holds,
    lang_var,
    make_term,
    prefix_term,
    system_size,
)
from .onevar import (
    BalanceProfile,
    ParametricFamily,
    balance_profile,
    decide_onevar,
    is_balanced,
    is_unbalanced_untyped,
    k_bound,
    parametric_families,
    reduce_to_strong,
    strong_unbalance_kind,
)
from .pipeline import IdemEquation, decide_idempotent_system, decide_lifting, idem_equations
from .serialize import (
    format_system,
    load_system,
    parse_group_assignment,
    system_to_json,
    verdict_to_json,
    witness_to_json,
)
from .solver import (
    SAT,
    UNKNOWN,
    UNSAT_WITHIN_BOUND,
    SolverBudget,
    Verdict,
    bounded_solve,
    brute_force,
    decompose_simple,
    marking_reduction,
    solve_over_group,
)
from .surgery import (
    SurgeryReport,
    alphabet_control,
    fim_encode,
    full_hardness_chain,
    normalize_s1,
    pad_s2,
)
from .words import (
    InvAlphabet,
    ReducedWord,
    Word,
    WordSet,
    concat_group,
    epsilon,
    factor_balance,
    factor_count,
    format_word,
    group_power,
    involute,
    is_cyclically_reduced,
    parse_reduced,
    parse_word,
    prefix_closure,
    primitive_root,
    reduce_set,
    reduce_word,
    reduced_words_upto,
    word_set,
    words_upto,
)

__version__ = "0.1.0"
