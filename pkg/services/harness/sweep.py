"""
Sweep Runner
Прогон сетки (d, n, q, r) x trials с агрегированием в строки CSV

- очередь trial'ов (asyncio.Queue) и пул воркеров
- ограничение параллелизма через asyncio.Semaphore
- сами trial'ы выполняются в executor (процессы при SWEEP_WORKERS > 1)
- таймаут trial'а и лимит n^d -> skipped, а не ошибка
- порядок строк задаётся при сериализации, поэтому результат не зависит
  от параллелизма
"""

import asyncio
import logging
import math
import time
from concurrent.futures import Executor, ProcessPoolExecutor, ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from config.settings import MAX_VERTICES, SWEEP_WORKERS, TRIAL_TIMEOUT
from services.assembly import assemble, openness_stats
from services.lattice import (
    InvalidConfigError,
    LatticeConfig,
    LatticeError,
    derive_seed,
    sample_labeling,
)
from services.profile import shatter
from services.spoiler import find_multiset_swap, spoil_1d
from services.symmetry import (
    assemble_symmetric,
    equal_up_to_isomorphism,
    find_symmetric_swap,
    shatter_symmetric,
    spoil_1d_symmetric,
)

from .sweep_spec import SweepSpec
from .threshold import implied_epsilon

logger = logging.getLogger(__name__)

Cell = Tuple[int, int, int, int]

CSV_HEADER = (
    "d,n,q,r,implied_epsilon,trials,assemble_success_rate,spoil_success_rate,"
    "mean_open_fraction,mean_determined_after_step2"
)

SKIP_SIZE = "size"
SKIP_TIMEOUT = "timeout"
SKIP_INVALID = "invalid"
SKIP_ERROR = "error"


# ============================================================================
# TRIAL
# ============================================================================

@dataclass(frozen=True)
class TrialTask:
    """Один trial: ячейка сетки, номер и параметры задач (передаётся в процесс)"""

    cell: Cell
    index: int
    seed: int
    symmetric: bool
    tasks: Tuple[str, ...]
    budget: int
    max_size: int


@dataclass(frozen=True)
class TrialResult:
    cell: Cell
    index: int
    assembled: Optional[bool] = None
    spoiled: Optional[bool] = None
    open_fraction: Optional[float] = None
    determined_after_step2: Optional[float] = None
    skipped: Optional[str] = None


def _spoil(task: TrialTask, labeling, trial_seed: int) -> bool:
    """Стратегия выбирается по d и режиму"""
    config = labeling.config
    search_seed = derive_seed(trial_seed, 1)
    try:
        if config.d == 1:
            cert = spoil_1d_symmetric(labeling) if task.symmetric else spoil_1d(labeling)
        elif task.symmetric:
            cert = find_symmetric_swap(
                labeling, max_size=task.max_size, budget=task.budget, seed=search_seed
            )
        else:
            cert = find_multiset_swap(
                labeling, max_size=task.max_size, budget=task.budget, seed=search_seed
            )
    except InvalidConfigError as e:
        # n < 6r (8r): интервальная стратегия неприменима
        logger.debug(f"spoil неприменим для {config.to_dict()}: {e}")
        return False
    return cert is not None


def run_trial(task: TrialTask) -> TrialResult:
    """
    Выполнить trial: sample -> shatter -> assemble / spoil / openness

    Seed trial'а = hash(base, d, n, q, r, index); результат полностью
    определяется задачей.
    """
    d, n, q, r = task.cell
    config = LatticeConfig(d=d, n=n, q=q, r=r)
    trial_seed = derive_seed(task.seed, d, n, q, r, task.index)
    truth = sample_labeling(config, trial_seed)

    assembled = spoiled = open_fraction = determined = None

    if "assemble" in task.tasks:
        if task.symmetric:
            result, report = assemble_symmetric(shatter_symmetric(truth))
            assembled = result is not None and equal_up_to_isomorphism(truth, result)
        else:
            result, report = assemble(shatter(truth))
            assembled = result is not None and result == truth
        if report.success and not assembled:
            logger.error(f"❌ Несостоятельная сборка {config.to_dict()} trial={task.index}")
        determined = report.determined_after_step[1] / config.vertex_count

    if "spoil" in task.tasks:
        spoiled = _spoil(task, truth, trial_seed)

    if "openness" in task.tasks:
        open_fraction = openness_stats(truth).open_fraction

    return TrialResult(
        cell=task.cell,
        index=task.index,
        assembled=assembled,
        spoiled=spoiled,
        open_fraction=open_fraction,
        determined_after_step2=determined,
    )


# ============================================================================
# AGGREGATION
# ============================================================================

@dataclass(frozen=True)
class SweepRow:
    """Агрегат по ячейке; nan — задача не запускалась или все trial'ы пропущены"""

    d: int
    n: int
    q: int
    r: int
    implied_epsilon: float
    trials: int
    assemble_success_rate: float
    spoil_success_rate: float
    mean_open_fraction: float
    mean_determined_after_step2: float
    skipped: int = 0

    def to_csv(self) -> str:
        return (
            f"{self.d},{self.n},{self.q},{self.r},{self.implied_epsilon:.6f},{self.trials},"
            f"{self.assemble_success_rate:.6f},{self.spoil_success_rate:.6f},"
            f"{self.mean_open_fraction:.6f},{self.mean_determined_after_step2:.6f}"
        )


def _mean(values: Sequence[Optional[float]]) -> float:
    present = [float(v) for v in values if v is not None]
    if not present:
        return math.nan
    return math.fsum(present) / len(present)


def _epsilon(cell: Cell) -> float:
    d, n, q, r = cell
    if n < 2 or q < 2:
        return math.nan
    return implied_epsilon(d, n, q, r)


def aggregate(spec: SweepSpec, results: Sequence[TrialResult]) -> List[SweepRow]:
    """Строки по ячейкам spec.cells(), trial'ы внутри ячейки по номеру"""
    by_cell: Dict[Cell, List[TrialResult]] = {cell: [] for cell in spec.cells()}
    for result in results:
        by_cell[result.cell].append(result)

    rows = []
    for cell in sorted(by_cell):
        cell_results = sorted(by_cell[cell], key=lambda t: t.index)
        done = [t for t in cell_results if t.skipped is None]
        rows.append(SweepRow(
            *cell,
            implied_epsilon=_epsilon(cell),
            trials=len(done),
            assemble_success_rate=_mean([t.assembled for t in done]),
            spoil_success_rate=_mean([t.spoiled for t in done]),
            mean_open_fraction=_mean([t.open_fraction for t in done]),
            mean_determined_after_step2=_mean([t.determined_after_step2 for t in done]),
            skipped=len(cell_results) - len(done),
        ))
    return rows


def rows_to_csv(rows: Sequence[SweepRow]) -> str:
    ordered = sorted(rows, key=lambda row: (row.d, row.n, row.q, row.r))
    return "\n".join([CSV_HEADER] + [row.to_csv() for row in ordered]) + "\n"


# ============================================================================
# RUNNER
# ============================================================================

class SweepMetrics:
    """Метрики прогона"""

    def __init__(self):
        self.trials_run = 0
        self.skipped_timeout = 0
        self.skipped_size = 0
        self.skipped_invalid = 0
        self.failures = 0
        self.start_time = time.time()

    def record(self, result: TrialResult):
        if result.skipped is None:
            self.trials_run += 1
        elif result.skipped == SKIP_TIMEOUT:
            self.skipped_timeout += 1
        elif result.skipped == SKIP_SIZE:
            self.skipped_size += 1
        elif result.skipped == SKIP_INVALID:
            self.skipped_invalid += 1
        else:
            self.failures += 1

    def get_stats(self) -> Dict:
        return {
            'trials_run': self.trials_run,
            'skipped_timeout': self.skipped_timeout,
            'skipped_size': self.skipped_size,
            'skipped_invalid': self.skipped_invalid,
            'failures': self.failures,
            'elapsed_seconds': round(time.time() - self.start_time, 3),
        }


class SweepRunner:
    """
    Асинхронный прогон sweep

    Воркеры берут trial'ы из очереди; не более `workers` trial'ов
    выполняются одновременно. Trial, превысивший таймаут, учитывается как
    skipped; его вычисление не прерывается, а executor заменяется новым.
    """

    def __init__(
            self,
            spec: SweepSpec,
            workers: int = SWEEP_WORKERS,
            timeout: float = TRIAL_TIMEOUT,
            max_vertices: int = MAX_VERTICES
    ):
        if workers < 1:
            raise ValueError(f"workers должен быть >= 1, получено {workers}")
        self.spec = spec
        self.workers = workers
        self.timeout = timeout
        self.max_vertices = max_vertices
        self.metrics = SweepMetrics()
        self.results: List[TrialResult] = []
        self._executor: Optional[Executor] = None
        self._retired: List[Executor] = []

    def _tasks(self) -> List[TrialTask]:
        spec = self.spec
        return [
            TrialTask(
                cell=cell,
                index=index,
                seed=spec.seed,
                symmetric=spec.symmetric,
                tasks=spec.tasks,
                budget=spec.budget,
                max_size=spec.max_size,
            )
            for cell in spec.cells()
            for index in range(spec.trials)
        ]

    def _precheck(self, task: TrialTask) -> Optional[str]:
        d, n, q, r = task.cell
        try:
            LatticeConfig(d=d, n=n, q=q, r=r)
        except InvalidConfigError as e:
            logger.debug(f"Ячейка {task.cell} пропущена: {e}")
            return SKIP_INVALID
        if n ** d > self.max_vertices:
            return SKIP_SIZE
        return None

    async def _execute(self, task: TrialTask) -> TrialResult:
        skipped = self._precheck(task)
        if skipped is not None:
            return TrialResult(task.cell, task.index, skipped=skipped)

        executor = self._executor
        loop = asyncio.get_running_loop()
        future = loop.run_in_executor(executor, run_trial, task)
        try:
            if self.timeout > 0:
                return await asyncio.wait_for(future, self.timeout)
            return await future
        except asyncio.TimeoutError:
            logger.warning(f"⚠️  Trial {task.cell} #{task.index}: таймаут {self.timeout}s")
            self._replace_executor(executor)
            return TrialResult(task.cell, task.index, skipped=SKIP_TIMEOUT)
        except LatticeError as e:
            logger.error(f"❌ Trial {task.cell} #{task.index}: {e}")
            return TrialResult(task.cell, task.index, skipped=SKIP_ERROR)
        except Exception as e:
            logger.error(f"❌ Trial {task.cell} #{task.index}: {type(e).__name__}: {e}")
            return TrialResult(task.cell, task.index, skipped=SKIP_ERROR)

    def _replace_executor(self, stale: Executor):
        """Зависший trial остаётся в старом executor, новые trial'ы идут в новый"""
        if stale is not self._executor:
            return
        self._retired.append(stale)
        self._executor = self._make_executor()
        stale.shutdown(wait=False)

    async def _worker(
            self,
            worker_id: int,
            queue: asyncio.Queue,
            sem: asyncio.Semaphore
    ):
        logger.debug(f"Sweep worker #{worker_id} запущен")
        while True:
            task = await queue.get()
            if task is None:
                queue.task_done()
                break
            async with sem:
                result = await self._execute(task)
            self.results.append(result)
            self.metrics.record(result)
            queue.task_done()
        logger.debug(f"Sweep worker #{worker_id} завершён")

    def _make_executor(self) -> Executor:
        if self.workers > 1:
            return ProcessPoolExecutor(max_workers=self.workers)
        return ThreadPoolExecutor(max_workers=1)

    async def run(self) -> List[SweepRow]:
        tasks = self._tasks()
        logger.info(
            f"🚀 Sweep: {self.spec.cell_count} ячеек, {len(tasks)} trials, "
            f"workers={self.workers}"
        )

        queue: asyncio.Queue = asyncio.Queue()
        sem = asyncio.Semaphore(self.workers)
        for task in tasks:
            queue.put_nowait(task)
        for _ in range(self.workers):
            queue.put_nowait(None)

        self._executor = self._make_executor()
        self._retired = []
        try:
            workers = [
                asyncio.create_task(
                    self._worker(i + 1, queue, sem), name=f"sweep_worker_{i + 1}"
                )
                for i in range(self.workers)
            ]
            await asyncio.gather(*workers)
        finally:
            self._executor.shutdown(wait=False, cancel_futures=True)

        if self._retired:
            logger.warning(f"⚠️  Executor заменён после таймаута: {len(self._retired)} раз")
        rows = aggregate(self.spec, self.results)
        logger.info(f"📊 Sweep завершён: {self.metrics.get_stats()}")
        return rows


def run_sweep(
        spec: SweepSpec,
        workers: int = SWEEP_WORKERS,
        timeout: float = TRIAL_TIMEOUT,
        max_vertices: int = MAX_VERTICES
) -> List[SweepRow]:
    """Синхронная обёртка над SweepRunner.run()"""
    runner = SweepRunner(spec, workers=workers, timeout=timeout, max_vertices=max_vertices)
    return asyncio.run(runner.run())
