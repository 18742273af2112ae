"""FNM process terms: syntax, parser and static checks."""
from .checks import (
    admissible,
    bound_names,
    constants_of,
    free_name_pairs,
    free_names,
    free_vars,
    rename,
    substitute_name,
    substitute_restricted,
    substitute_var,
    well_formed,
    well_formed_violations,
)
from .parser import Program, parse, parse_program, parse_term
from .syntax import (
    NIL,
    TAU,
    Action,
    Const,
    ConstEnv,
    Nil,
    Par,
    Prefix,
    Restrict,
    Strong,
    Sum,
    Term,
    Var,
    category,
    inp,
    is_guarded,
    is_restriction_free,
    is_sequential,
    out,
    par_components,
    par_of,
    restrict_all,
    show,
    sum_components,
    sum_of,
)
