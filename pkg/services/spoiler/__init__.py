from .certificates import (
    CertificateRecordError,
    SwapCertificate1D,
    SwapCertificateND,
    splice_intervals,
    verify_certificate_record,
    verify_nonidentifiable,
)
from .interval_swap import find_interval_swap, packed_starts, spoil_1d
from .label_swap import (
    SearchMetrics,
    SwapPreconditionError,
    apply_swap,
    find_multiset_swap,
    find_singleton_swap,
    signature,
)
from .oracle import (
    InstanceTooLargeError,
    brute_force_identifiable,
    decode_indices,
    enumeration_size,
    find_profile_twin,
    identifiable_census,
    labeling_index,
    profile_rows,
)

__all__ = [
    "CertificateRecordError",
    "InstanceTooLargeError",
    "SearchMetrics",
    "SwapCertificate1D",
    "SwapCertificateND",
    "SwapPreconditionError",
    "apply_swap",
    "brute_force_identifiable",
    "decode_indices",
    "enumeration_size",
    "find_interval_swap",
    "find_multiset_swap",
    "find_profile_twin",
    "find_singleton_swap",
    "identifiable_census",
    "labeling_index",
    "packed_starts",
    "profile_rows",
    "signature",
    "splice_intervals",
    "spoil_1d",
    "verify_certificate_record",
    "verify_nonidentifiable",
]
