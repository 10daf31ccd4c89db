"""counterchain: paired correct/corrupted reasoning chains with verified
first-error positions, aligned natural-language realization, and step-level
judge evaluation."""

from .logic import (
    And,
    Atom,
    Expr,
    ExprSyntaxError,
    FactId,
    Implication,
    Literal,
    Or,
    Rule,
    RuleShapeError,
    RuleTemplate,
    State,
    TruthValue,
    Xor,
    XorConstraint,
    eval_expr,
    make_rule,
    parse_expr,
    parse_literal,
    parse_rule,
    render_expr,
    render_rule,
)
from .prover import (
    Direction,
    EntailmentResult,
    InferencePattern,
    Status,
    Theory,
    count_models,
    entails,
    licensed_patterns,
    propagate,
    theory_for,
)
from .synthesis import (
    ChainReport,
    CorrectChain,
    Step,
    SynthesisConfig,
    SynthesisExhausted,
    check_step_semantic,
    step_supports,
    synthesize_chain,
    topological_order,
    verify_chain,
)
from .injection import (
    DownstreamStuck,
    ErroneousChain,
    ErrorGroup,
    ErrorType,
    InjectionConfig,
    InjectionInfeasible,
    Instance,
    InstanceReport,
    Rejection,
    applicable_errors,
    build_counterfactual,
    inject,
    recompute_downstream,
    sample_error_type,
    verify_first_error,
)
from .dataset import (
    DEFAULT_ERROR_WEIGHTS,
    CorpusConfig,
    CorpusExhausted,
    CorpusStats,
    InstanceLabels,
    MalformedRecordError,
    SchemaMismatchError,
    StepLabel,
    deserialize_instance,
    generate_corpus,
    hash_split,
    label_steps,
    read_corpus,
    serialize_instance,
    type_quotas,
)
from .realize import (
    ContextProfile,
    LeakViolation,
    PredicateEntry,
    PredicateMap,
    PredicateMapInvalid,
    PromptBundle,
    ScriptedTranslator,
    TranslatorSettings,
    build_predicate_map,
    leak_lint,
    realize_instance,
    realized,
)
from .evaluation import (
    Candidate,
    CandidatePool,
    ConstantJudge,
    EvalReport,
    JudgeContext,
    LabelWordJudge,
    OracleJudge,
    all_step_accuracy,
    bestofk_select,
    evaluate_instances,
    evaluate_pools,
    first_error_accuracy,
    majority_at_k,
    make_judge,
    oracle_at_k,
    predict_first_error,
)

__version__ = "0.1.0"
