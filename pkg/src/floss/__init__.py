"""Forgetting operators, loss measures, and stratified-program compilation
for propositional and finite-domain first-order theories."""

from .errors import (
    CapacityError,
    EmptyDomainError,
    FlossError,
    OpenFormulaError,
    ParseError,
    UnknownAtomError,
    UnstratifiableError,
)
from .formulas import (
    DEFAULT_CAP,
    FALSE,
    TRUE,
    And,
    Atom,
    Const,
    Equiv,
    Exists,
    Forall,
    Formula,
    Implies,
    Not,
    Or,
    Theory,
    Var,
    Vocabulary,
    World,
    conj,
    disj,
    entails,
    equivalent,
    evaluate,
    ground,
    ground_vocabulary,
    simplify,
    substitute_bool,
    vocabulary_of,
    world_from_dict,
    worlds,
)
from .forgetting import (
    ForgettingPolicy,
    expand_policy,
    forget_fo,
    forget_strong,
    forget_weak,
)
from .measure import (
    LossReport,
    ProbabilitySpec,
    SampleEstimate,
    estimate_probability,
    format_probability,
    loss_measures,
    model_count,
    theory_probability,
    world_probability,
)
from .parsing import TheoryFile, parse_formula, parse_theory_file, render
from .programs import (
    Literal,
    Rule,
    StratifiedProgram,
    check_stratification,
    compile_fo,
    compile_prop,
    emit_problog,
    least_model,
    least_model_masks,
)

__version__ = "0.1.0"
