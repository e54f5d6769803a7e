from .codec import CodecError
from .core import (
    BoxRegion,
    ConfigMismatchError,
    InvalidConfigError,
    Labeling,
    LatticeConfig,
    LatticeError,
    Pattern,
    PatternShapeError,
    RegionOutOfBoundsError,
    Vertex,
    box_corners,
    check_vertex,
    decode_pattern,
    encode_pattern,
    enumerate_boxes,
    extract_pattern,
    linear_index,
    sample_labeling,
    shift_labeling,
    vertex_at,
)
from .rng import derive_seed, make_rng

__all__ = [
    "BoxRegion",
    "CodecError",
    "ConfigMismatchError",
    "InvalidConfigError",
    "Labeling",
    "LatticeConfig",
    "LatticeError",
    "Pattern",
    "PatternShapeError",
    "RegionOutOfBoundsError",
    "Vertex",
    "box_corners",
    "check_vertex",
    "decode_pattern",
    "derive_seed",
    "encode_pattern",
    "enumerate_boxes",
    "extract_pattern",
    "linear_index",
    "make_rng",
    "sample_labeling",
    "shift_labeling",
    "vertex_at",
]
