from .profile import Profile, count_rows, profiles_equal, shatter
from .punctured import (
    PuncturedDomainError,
    PuncturedProfile,
    combine_keys,
    grid_points,
    in_inner_domain,
    puncture_offsets,
    punctured_keys,
    punctured_profile,
)
from .shard_file import (
    ShardFileError,
    dump_profile,
    load_profile,
    read_shard_file,
    write_shard_file,
)

__all__ = [
    "Profile",
    "PuncturedDomainError",
    "PuncturedProfile",
    "ShardFileError",
    "combine_keys",
    "count_rows",
    "dump_profile",
    "grid_points",
    "in_inner_domain",
    "load_profile",
    "profiles_equal",
    "puncture_offsets",
    "punctured_keys",
    "punctured_profile",
    "read_shard_file",
    "shatter",
    "write_shard_file",
]
