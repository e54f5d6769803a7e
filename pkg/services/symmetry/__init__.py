from .transforms import (
    BoxTransform,
    all_transforms,
    automorphism_batch,
    canonical_batch,
    canonical_form,
    has_automorphism,
    orbit,
    transform_labeling,
    transform_pattern,
)
from .symmetric import (
    assemble_symmetric,
    automorphism_bound,
    automorphism_frequency,
    build_symmetric_index,
    corner_classes,
    equal_up_to_isomorphism,
    find_symmetric_swap,
    shatter_symmetric,
    spoil_1d_symmetric,
    step1_corner_symmetric,
    verify_nonidentifiable_symmetric,
)

__all__ = [
    "BoxTransform",
    "all_transforms",
    "assemble_symmetric",
    "automorphism_batch",
    "automorphism_bound",
    "automorphism_frequency",
    "build_symmetric_index",
    "canonical_batch",
    "canonical_form",
    "corner_classes",
    "equal_up_to_isomorphism",
    "find_symmetric_swap",
    "has_automorphism",
    "orbit",
    "shatter_symmetric",
    "spoil_1d_symmetric",
    "step1_corner_symmetric",
    "transform_labeling",
    "transform_pattern",
    "verify_nonidentifiable_symmetric",
]
