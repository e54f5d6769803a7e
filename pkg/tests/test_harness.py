import asyncio
import math
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import pytest

from services.harness import (
    CSV_HEADER,
    SweepRunner,
    SweepSpec,
    SweepSpecError,
    TrialTask,
    critical_r,
    implied_epsilon,
    load_sweep_spec,
    rows_to_csv,
    run_sweep,
    run_trial,
)
from services.harness import sweep as sweep_module
from services.lattice import InvalidConfigError

SWEEPS_DIR = Path(__file__).resolve().parent.parent / "data" / "sweeps"


# === threshold ===

def test_critical_r_1d():
    assert critical_r(1, 64, 64) == pytest.approx(2.0)
    assert critical_r(1, 1024, 2) == pytest.approx(20.0)


def test_critical_r_2d():
    assert critical_r(2, 100, 2) == pytest.approx(3.6452, abs=1e-3)
    assert critical_r(2, math.e, math.e) == pytest.approx(math.sqrt(2))
    assert critical_r(2, 64, 2) == pytest.approx(math.sqrt(12))


def test_critical_r_monotone_in_n():
    assert critical_r(2, 32, 4) < critical_r(2, 64, 4) < critical_r(2, 128, 4)


def test_critical_r_rejects_degenerate():
    with pytest.raises(InvalidConfigError):
        critical_r(2, 1, 4)
    with pytest.raises(InvalidConfigError):
        critical_r(2, 16, 1)


def test_implied_epsilon_sign():
    assert implied_epsilon(2, 16, 4, 2) == pytest.approx(0.0)
    assert implied_epsilon(2, 16, 4, 3) > 0
    assert implied_epsilon(2, 64, 2, 2) < 0


def test_implied_epsilon_zero_at_critical_r():
    r = critical_r(3, 50, 3)
    assert (r ** 3) * math.log(3) / (3 * math.log(50)) - 1 == pytest.approx(0.0)


# === SweepSpec ===

SPEC_TEXT = """
# пример
d = 2
n = 32, 16
q = 4
r = 2..4        # диапазон
trials = 3
tasks = openness, assemble
"""


def test_spec_parsing():
    spec = SweepSpec.from_text(SPEC_TEXT)
    assert spec.d == (2,)
    assert spec.n == (16, 32)
    assert spec.r == (2, 3, 4)
    assert spec.trials == 3
    assert spec.tasks == ("assemble", "openness")
    assert spec.mode == "oriented"
    assert spec.cell_count == 6
    assert list(spec.cells())[0] == (2, 16, 4, 2)


def test_spec_to_dict():
    record = SweepSpec.from_text(SPEC_TEXT).to_dict()
    assert record["r"] == [2, 3, 4]
    assert record["tasks"] == ["assemble", "openness"]


@pytest.mark.parametrize("text", [
    "d =\nn = 4\nq = 2\nr = 2",
    "d = 1\nn = 4\nq = 2",
    "d = 1\nn = 4\nq = 2\nr = 2\nr = 3",
    "d = 1\nn = 4\nq = 2\nr = 2\ncolour = red",
    "d = 1\nn = 4\nq = 2\nr = 5..2",
    "d = 1\nn = four\nq = 2\nr = 2",
    "d = 1\nn = 4\nq = 2\nr = 2\nmode = mirrored",
    "d = 1\nn = 4\nq = 2\nr = 2\ntasks = fly",
    "d = 1\nn = 4\nq = 2\nr = 2\ntrials = 0",
    "d = 1\nn = 4\nq = 2\nr = 2\nno equals sign",
])
def test_spec_errors(text):
    with pytest.raises(SweepSpecError):
        SweepSpec.from_text(text)


def test_spec_files_load():
    for name in ("threshold.txt", "spoil.txt", "symmetric.txt", "spoil_1d.txt"):
        spec = load_sweep_spec(SWEEPS_DIR / name)
        assert spec.cell_count >= 1


def test_spec_missing_file(tmp_path):
    with pytest.raises(SweepSpecError):
        load_sweep_spec(tmp_path / "nope.txt")


# === trials ===

def _task(cell, index=0, tasks=("assemble", "openness"), symmetric=False, seed=0):
    return TrialTask(
        cell=cell, index=index, seed=seed, symmetric=symmetric,
        tasks=tasks, budget=1000, max_size=2,
    )


def test_run_trial_is_deterministic():
    task = _task((2, 10, 3, 3), index=4)
    assert run_trial(task) == run_trial(task)


def test_run_trial_seeds_differ_by_index():
    a = run_trial(_task((2, 10, 4, 2), index=0, tasks=("openness",)))
    b = run_trial(_task((2, 10, 4, 2), index=1, tasks=("openness",)))
    assert a.index != b.index
    assert a.assembled is None
    assert a.open_fraction is not None


def test_run_trial_spoil_on_short_1d_line():
    result = run_trial(_task((1, 8, 2, 2), tasks=("spoil",)))
    assert result.spoiled is False


# === sweep ===

def test_sweep_single_shard_always_succeeds():
    spec = SweepSpec(d=(2,), n=(3,), q=(4,), r=(3,), trials=5)
    (row,) = run_sweep(spec, workers=1, timeout=0)
    assert row.trials == 5
    assert row.assemble_success_rate == 1.0
    assert row.mean_determined_after_step2 == 1.0
    assert math.isnan(row.spoil_success_rate)


def test_sweep_symmetric_single_shard():
    spec = SweepSpec(d=(2,), n=(3,), q=(4,), r=(3,), trials=3, mode="symmetric")
    (row,) = run_sweep(spec, workers=1, timeout=0)
    assert row.assemble_success_rate == 1.0


def test_sweep_csv_is_deterministic():
    spec = SweepSpec(d=(1, 2), n=(8,), q=(3,), r=(2, 3), trials=4, tasks=("assemble", "openness"))
    first = rows_to_csv(run_sweep(spec, workers=1, timeout=0))
    second = rows_to_csv(run_sweep(spec, workers=1, timeout=0))
    assert first == second
    lines = first.splitlines()
    assert lines[0] == CSV_HEADER
    assert len(lines) == 1 + spec.cell_count
    assert first.endswith("\n")


def test_sweep_parallel_matches_serial():
    spec = SweepSpec(d=(2,), n=(8,), q=(3, 4), r=(2, 3), trials=3)
    serial = rows_to_csv(run_sweep(spec, workers=1, timeout=0))
    parallel = rows_to_csv(run_sweep(spec, workers=2, timeout=0))
    assert serial == parallel


def test_sweep_nan_columns():
    spec = SweepSpec(d=(2,), n=(8,), q=(4,), r=(2,), trials=2, tasks=("openness",))
    csv = rows_to_csv(run_sweep(spec, workers=1, timeout=0))
    fields = csv.splitlines()[1].split(",")
    assert fields[6] == "nan"
    assert fields[7] == "nan"
    assert fields[8] != "nan"
    assert fields[9] == "nan"


def test_sweep_size_skip():
    spec = SweepSpec(d=(2,), n=(4, 8), q=(2,), r=(2,), trials=2)
    runner = SweepRunner(spec, workers=1, timeout=0, max_vertices=20)
    small, large = asyncio.run(runner.run())
    assert small.trials == 2
    assert large.trials == 0
    assert large.skipped == 2
    assert math.isnan(large.assemble_success_rate)
    assert runner.metrics.get_stats()["skipped_size"] == 2


def test_sweep_invalid_cells_skipped():
    spec = SweepSpec(d=(1,), n=(4,), q=(1, 2), r=(2,), trials=1)
    invalid, valid = run_sweep(spec, workers=1, timeout=0)
    assert invalid.q == 1
    assert invalid.skipped == 1
    assert math.isnan(invalid.implied_epsilon)
    assert valid.trials == 1


def test_sweep_timeout_skip():
    spec = SweepSpec(d=(2,), n=(40,), q=(2,), r=(3,), trials=2, tasks=("assemble", "openness"))
    runner = SweepRunner(spec, workers=1, timeout=1e-6)
    (row,) = asyncio.run(runner.run())
    assert row.trials == 0
    assert row.skipped == 2
    assert runner.metrics.get_stats()["skipped_timeout"] == 2


def test_sweep_timeout_does_not_stall_next_trials(monkeypatch):
    real_trial = sweep_module.run_trial

    def hanging_first(task):
        if task.index == 0:
            time.sleep(1.0)
        return real_trial(task)

    monkeypatch.setattr(sweep_module, "run_trial", hanging_first)
    spec = SweepSpec(d=(1,), n=(3,), q=(4,), r=(3,), trials=3)
    runner = SweepRunner(spec, workers=1, timeout=0.3)
    (row,) = asyncio.run(runner.run())
    stats = runner.metrics.get_stats()
    assert stats["trials_run"] == 2
    assert stats["skipped_timeout"] == 1
    assert row.trials == 2
    assert row.assemble_success_rate == 1.0


def test_sweep_unexpected_error_is_counted(monkeypatch):
    real_trial = sweep_module.run_trial

    def failing_second(task):
        if task.index == 1:
            raise MemoryError("trial 1")
        return real_trial(task)

    monkeypatch.setattr(sweep_module, "run_trial", failing_second)
    spec = SweepSpec(d=(1,), n=(3,), q=(4,), r=(3,), trials=3)
    runner = SweepRunner(spec, workers=1, timeout=0)
    (row,) = asyncio.run(runner.run())
    assert row.trials == 2
    assert row.skipped == 1
    assert runner.metrics.get_stats()["failures"] == 1


def test_runner_rejects_zero_workers():
    spec = SweepSpec(d=(1,), n=(4,), q=(2,), r=(2,))
    with pytest.raises(ValueError):
        SweepRunner(spec, workers=0)


@pytest.mark.asyncio
async def test_runner_async():
    spec = SweepSpec(d=(1,), n=(3,), q=(4,), r=(3,), trials=3)
    runner = SweepRunner(spec, workers=2, timeout=0)
    runner._make_executor = lambda: ThreadPoolExecutor(max_workers=2)
    (row,) = await runner.run()
    assert row.assemble_success_rate == 1.0
    stats = runner.metrics.get_stats()
    assert stats["trials_run"] == 3
    assert stats["failures"] == 0
