"""minirepair: test-driven program repair for the Mini language.

The engine mines code templates from the program under repair, scores
variable bindings with a name co-occurrence model, and explores the
candidate patch space by weighted random search, validating candidates
against the project's own test suite.
"""

from minirepair.faultloc import (
    EmptySuspiciousSet,
    FaultLocConfig,
    NoFailingTests,
    Spectrum,
    SuspiciousStatement,
    collect_spectra,
    ochiai,
    rank_statements,
)
from minirepair.modpoints import (
    DEFAULT_TARGET_KINDS,
    ModificationPoint,
    TargetConfig,
    extract_modification_points,
    variables_in_scope,
)
from minirepair.namemodel import (
    NameCooccurrenceTable,
    NameModel,
    NameModelCache,
    build_model,
    build_table,
    statement_names,
)
from minirepair.search import (
    AllZeroWeights,
    Patch,
    RepairResult,
    SearchConfig,
    SterileTemplate,
    TemplateInstance,
    apply_report_patch,
    enumerate_adequate_patches,
    instantiate,
    patch_kind,
    prioritize,
    repair_loop,
    run_repair,
    synthesize,
    validate,
    weighted_choice,
)
from minirepair.templates import (
    Placeholder,
    Template,
    TemplatePool,
    build_pool,
    mine_template,
    query,
    template_weight,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # fault localization
    "Spectrum", "SuspiciousStatement", "FaultLocConfig",
    "ochiai", "collect_spectra", "rank_statements",
    "NoFailingTests", "EmptySuspiciousSet",
    # modification points
    "ModificationPoint", "TargetConfig", "DEFAULT_TARGET_KINDS",
    "extract_modification_points", "variables_in_scope",
    # templates
    "Placeholder", "Template", "TemplatePool",
    "mine_template", "build_pool", "query", "template_weight",
    # name model
    "NameCooccurrenceTable", "NameModel", "NameModelCache",
    "statement_names", "build_table", "build_model",
    # search
    "SearchConfig", "TemplateInstance", "Patch", "RepairResult",
    "AllZeroWeights", "SterileTemplate",
    "weighted_choice", "instantiate", "prioritize", "synthesize",
    "patch_kind", "validate", "run_repair", "repair_loop",
    "enumerate_adequate_patches", "apply_report_patch",
]
