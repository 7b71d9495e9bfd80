"""Theme clustering for time-sliced citation graphs.

The library slices a dated citation corpus into snapshots, weights
paper pairs by co-citation and bibliographic coupling, partitions each
snapshot with the EqRank rule plus its reindexing refinement, and
quantifies how the resulting classification scheme evolves between
snapshots (stable, new, and absorbed themes; scheme-stability
coefficients; indexing-migration rates; theme lineage).
"""

from ._kernels import BACKEND, available_backends
from .core import Partition, eqrank_partition
from .corpus import (
    CitationEdge,
    CorpusStore,
    PaperRecord,
    Snapshot,
    YearMonth,
    ingest,
    ingest_files,
    snapshot,
)
from .dynamics import (
    DynamicsReport,
    Lineage,
    SnapshotPair,
    build_maps,
    classify_themes,
    csc,
    induce,
    lineage,
    tmc,
)
from .errors import (
    DuplicatePaperError,
    EmptySnapshotError,
    EqRankError,
    NoEligiblePapersError,
    ParseError,
)
from .pipeline import SnapshotResult, run_series, run_snapshot
from .quality import (
    ModularityScore,
    ThemeSummary,
    authority_papers,
    build_theme_summaries,
    generate_planted_series,
    modularity,
    theme_keywords,
)
from .reindex import (
    ReindexConfig,
    ReindexResult,
    closeness,
    proper_coalition_violations,
    reindex_step,
    reindex_to_limit,
)
from .weights import SimilarityGraph, bibcoupling, cocitation, combine, similarity_graph

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "available_backends",
    "Partition",
    "eqrank_partition",
    "CitationEdge",
    "CorpusStore",
    "PaperRecord",
    "Snapshot",
    "YearMonth",
    "ingest",
    "ingest_files",
    "snapshot",
    "DynamicsReport",
    "Lineage",
    "SnapshotPair",
    "build_maps",
    "classify_themes",
    "csc",
    "induce",
    "lineage",
    "tmc",
    "DuplicatePaperError",
    "EmptySnapshotError",
    "EqRankError",
    "NoEligiblePapersError",
    "ParseError",
    "SnapshotResult",
    "run_series",
    "run_snapshot",
    "ModularityScore",
    "ThemeSummary",
    "authority_papers",
    "build_theme_summaries",
    "generate_planted_series",
    "modularity",
    "theme_keywords",
    "ReindexConfig",
    "ReindexResult",
    "closeness",
    "proper_coalition_violations",
    "reindex_step",
    "reindex_to_limit",
    "SimilarityGraph",
    "bibcoupling",
    "cocitation",
    "combine",
    "similarity_graph",
    "__version__",
]
