"""subsum: interactive extractive and query-focused visual summarization
via submodular maximization over precomputed analysis databases."""

from .analysisdb import (
    AnalysisDatabase,
    EntityRecord,
    FrameRecord,
    VideoMeta,
    load_database,
    save_database,
    validate_database,
)
from .errors import (
    DatabaseFormatError,
    DatabaseValidationError,
    EmptyGroundSetError,
    EmptyQueryResultError,
    IncompatibleRequestError,
    SubsumError,
    UnknownDatabaseError,
)
from .functions import (
    DisparityMin,
    FacilityLocation,
    FeatureBased,
    ProbabilisticSetCover,
    SetCover,
    SubmodularObjective,
    make_objective,
)
from .groundset import (
    GroundSet,
    Item,
    Query,
    QueryTerm,
    build_entity_groundset,
    build_keyframe_groundset,
    build_snippet_groundset,
    filter_by_query,
)
from .kernels import KernelRecipe, SimilarityKernel, build_kernel, distance
from .optimize import (
    Constraint,
    SummaryResult,
    brute_force_cover,
    brute_force_opt,
    greedy_cardinality,
    greedy_cover,
    greedy_knapsack,
    lazy_greedy,
)
from .selectors import SubmodularSelector
from .service import BenchSpec, Engine, SummaryRequest, bench, database_stats
from .synthetic import SyntheticSpec, SyntheticVideo, generate_synthetic

__version__ = "0.1.0"

__all__ = [
    "AnalysisDatabase",
    "BenchSpec",
    "Constraint",
    "DatabaseFormatError",
    "DatabaseValidationError",
    "DisparityMin",
    "EmptyGroundSetError",
    "EmptyQueryResultError",
    "Engine",
    "EntityRecord",
    "FacilityLocation",
    "FeatureBased",
    "FrameRecord",
    "GroundSet",
    "IncompatibleRequestError",
    "Item",
    "KernelRecipe",
    "ProbabilisticSetCover",
    "Query",
    "QueryTerm",
    "SetCover",
    "SimilarityKernel",
    "SubmodularObjective",
    "SubmodularSelector",
    "SubsumError",
    "SummaryRequest",
    "SummaryResult",
    "SyntheticSpec",
    "SyntheticVideo",
    "UnknownDatabaseError",
    "VideoMeta",
    "bench",
    "brute_force_cover",
    "brute_force_opt",
    "build_entity_groundset",
    "build_kernel",
    "build_keyframe_groundset",
    "build_snippet_groundset",
    "database_stats",
    "distance",
    "filter_by_query",
    "generate_synthetic",
    "greedy_cardinality",
    "greedy_cover",
    "greedy_knapsack",
    "lazy_greedy",
    "load_database",
    "make_objective",
    "save_database",
    "validate_database",
]
