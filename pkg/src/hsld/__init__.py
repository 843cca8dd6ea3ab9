"""Heat-source layout benchmark toolkit.

Layout sampling under the non-overlapping constraint, finite-difference
temperature fields for three boundary-condition cases, dataset assembly and
an evaluation suite for temperature-field predictions.
"""

__version__ = "0.1.0"

from hsld.geometry import (
    CATALOG,
    ComponentSpec,
    GridSystem,
    Layout,
    LayoutError,
    Placement,
    check_layout,
    contact,
    find_violations,
    fits_container,
    load_layout,
    overlaps,
    rasterize,
)
from hsld.seqls import SamplingError, SeqLSConfig, SeqLSResult, seqls_batch, seqls_sample
from hsld.gibls import GibLSConfig, feasible_segments, gibls_chain
from hsld.special import GROUPS, Window, corner_sample, group_sample, part_space_sample, special_sample
from hsld.solver import CaseConfig, SolveSettings, SolverError, convergence_study, solve
from hsld.metrics import (
    MetricsReport,
    derivative_metrics,
    evaluate_pair,
    masked_metrics,
    pointwise_metrics,
    spearman_batches,
)
from hsld.io import (
    MatrixFormatError,
    StandardizationParams,
    load_matrix,
    noisy_oracle_predict,
    read_matrix,
    render_heatmap,
    save_matrix,
    standardize,
    unstandardize,
    write_matrix,
)
from hsld.dataset import DEFAULT_COMPOSITION, assemble_dataset, evaluate_dataset, plan_dataset

__all__ = [
    "CATALOG", "CaseConfig", "ComponentSpec", "DEFAULT_COMPOSITION", "GROUPS", "GibLSConfig",
    "GridSystem", "Layout", "LayoutError", "MatrixFormatError", "MetricsReport", "Placement",
    "SamplingError", "SeqLSConfig", "SeqLSResult", "SolveSettings", "SolverError",
    "StandardizationParams", "Window", "assemble_dataset", "check_layout", "contact",
    "convergence_study", "corner_sample", "derivative_metrics", "evaluate_dataset", "evaluate_pair",
    "feasible_segments", "find_violations", "fits_container", "gibls_chain", "group_sample",
    "load_layout", "load_matrix", "masked_metrics", "noisy_oracle_predict", "overlaps",
    "part_space_sample", "plan_dataset", "pointwise_metrics", "rasterize", "read_matrix",
    "render_heatmap", "save_matrix", "seqls_batch", "seqls_sample", "solve", "special_sample",
    "spearman_batches", "standardize", "unstandardize", "write_matrix",
]
