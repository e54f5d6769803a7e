from .labeling_file import (
    LabelingFileError,
    dump_labeling,
    load_labeling,
    read_labeling_file,
    write_labeling_file,
)
from .sweep import (
    CSV_HEADER,
    SweepMetrics,
    SweepRow,
    SweepRunner,
    TrialResult,
    TrialTask,
    aggregate,
    rows_to_csv,
    run_sweep,
    run_trial,
)
from .sweep_spec import SweepSpec, SweepSpecError, load_sweep_spec
from .threshold import critical_r, implied_epsilon

__all__ = [
    "CSV_HEADER",
    "LabelingFileError",
    "SweepMetrics",
    "SweepRow",
    "SweepRunner",
    "SweepSpec",
    "SweepSpecError",
    "TrialResult",
    "TrialTask",
    "aggregate",
    "critical_r",
    "dump_labeling",
    "implied_epsilon",
    "load_labeling",
    "load_sweep_spec",
    "read_labeling_file",
    "rows_to_csv",
    "run_sweep",
    "run_trial",
    "write_labeling_file",
]
