from .assembler import (
    UNDETERMINED,
    AssemblyError,
    AssemblyReport,
    FailureReason,
    PartialLabeling,
    assemble,
    corner_candidates,
    extend_from_unique,
    grow_corner,
    run_assembly,
    step1_corner,
    step2_percolate,
    step3_finish,
)
from .openness import OpennessStats, box_family, box_family_positions, openness_stats, unique_subbox_grid
from .subbox_index import SubboxIndex, build_subbox_index, corner_offsets, is_unique_subbox, unique_codes
from .union_find import ArrayUnionFind

__all__ = [
    "UNDETERMINED",
    "ArrayUnionFind",
    "AssemblyError",
    "AssemblyReport",
    "FailureReason",
    "OpennessStats",
    "PartialLabeling",
    "SubboxIndex",
    "assemble",
    "box_family",
    "box_family_positions",
    "build_subbox_index",
    "corner_candidates",
    "corner_offsets",
    "extend_from_unique",
    "grow_corner",
    "is_unique_subbox",
    "openness_stats",
    "run_assembly",
    "step1_corner",
    "step2_percolate",
    "step3_finish",
    "unique_codes",
    "unique_subbox_grid",
]
