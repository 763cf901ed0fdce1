"""chronolog: a DatalogMTL reasoning engine.

Parses metric temporal Datalog programs, classifies their termination
behavior, and materializes finite representations (finite, eventually
constant, or eventually periodic) of their possibly infinite models for
the forward-propagating fragment.
"""

from .analysis import (
    Cycle,
    DepGraph,
    Edge,
    FragmentFlags,
    FragmentReport,
    RuleClass,
    classify_rules,
    dependency_graph,
    fragment_checks,
    max_applications,
    pattern_length,
    simple_cycles,
)
from .errors import (
    CapExceeded,
    ChronologError,
    CycleCapExceeded,
    InputError,
    NotForwardPropagating,
    ParseError,
    StepCapExceeded,
    WindowCapExceeded,
)
from .intervals import (
    Interval,
    IntervalSet,
    NEG_INF,
    POS_INF,
    TimePoint,
    box_minus_apply,
    diamond_minus_apply,
    insert_coalesce,
    lcm_rationals,
    parse_interval,
    parse_rational,
)
from .reasoner import (
    Model,
    Pattern,
    PeriodicModel,
    RuleGroup,
    apply_rule,
    entails,
    extend,
    group_and_sort,
    max_time_point,
    min_time_point,
    naive_fixpoint_bounded,
    normalize,
    reason,
    simplify,
)
from .syntax import (
    Atom,
    Bottom,
    BoxMinus,
    BoxPlus,
    Constant,
    DiamondMinus,
    DiamondPlus,
    Fact,
    Literal,
    Program,
    Rule,
    Since,
    Top,
    Until,
    Variable,
    ground,
    parse_database,
    parse_fact,
    parse_program,
    program_text,
    to_normal_form,
)

__version__ = "0.1.0"
