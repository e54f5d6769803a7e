"""
CLI command handlers
Один cmd_* на подкоманду; каждый возвращает код выхода
"""

import json
import logging
import sys
from argparse import Namespace
from pathlib import Path
from typing import Any, Dict, Optional

import numpy as np

from services.assembly import assemble, openness_stats
from services.harness import (
    load_sweep_spec,
    read_labeling_file,
    rows_to_csv,
    run_sweep,
    write_labeling_file,
)
from services.lattice import Labeling, LatticeConfig, sample_labeling
from services.profile import read_shard_file, shatter, write_shard_file
from services.spoiler import (
    SearchMetrics,
    brute_force_identifiable,
    find_multiset_swap,
    find_singleton_swap,
    spoil_1d,
    verify_certificate_record,
)
from services.symmetry import (
    assemble_symmetric,
    find_symmetric_swap,
    shatter_symmetric,
    spoil_1d_symmetric,
    verify_nonidentifiable_symmetric,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NOT_FOUND = 1
EXIT_USAGE = 2


def _emit(text: str, output: Optional[str] = None):
    """Записать результат в файл или stdout"""
    if output:
        path = Path(output)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
        logger.info(f"✅ Результат записан: {path}")
    else:
        sys.stdout.write(text)
        sys.stdout.flush()


def _emit_json(record: Dict[str, Any], output: Optional[str] = None):
    _emit(json.dumps(record, indent=2, ensure_ascii=False) + "\n", output)


def cmd_generate(args: Namespace) -> int:
    config = LatticeConfig(d=args.d, n=args.n, q=args.q, r=args.r)
    labeling = sample_labeling(config, args.seed)
    write_labeling_file(args.output, labeling)
    return EXIT_OK


def cmd_shatter(args: Namespace) -> int:
    labeling = read_labeling_file(args.labeling, r=args.r)
    profile = shatter_symmetric(labeling) if args.symmetric else shatter(labeling)
    write_shard_file(args.output, profile)
    logger.info(f"📊 {profile}")
    return EXIT_OK


def cmd_assemble(args: Namespace) -> int:
    profile = read_shard_file(args.shards)
    if profile.symmetric != args.symmetric:
        logger.error(
            f"❌ Профиль symmetric={profile.symmetric}, а флаг --symmetric={args.symmetric}"
        )
        return EXIT_USAGE

    runner = assemble_symmetric if args.symmetric else assemble
    labeling, report = runner(profile, discipline=args.discipline)
    record = {"config": profile.config.to_dict(), "report": report.to_dict()}

    if labeling is None:
        logger.warning(f"⚠️  Сборка не удалась: {report.failure_reason.value}")
        _emit_json(record, args.report)
        return EXIT_NOT_FOUND

    write_labeling_file(args.output, labeling)
    _emit_json(record, args.report)
    return EXIT_OK


def _spoil_certificate(args: Namespace, labeling: Labeling, metrics: SearchMetrics):
    if args.strategy == "1d":
        return spoil_1d_symmetric(labeling) if args.symmetric else spoil_1d(labeling)

    if args.strategy == "singleton":
        if args.symmetric:
            return find_singleton_swap(
                labeling, verify=verify_nonidentifiable_symmetric, metrics=metrics, symmetric=True
            )
        return find_singleton_swap(labeling, metrics=metrics)

    search = find_symmetric_swap if args.symmetric else find_multiset_swap
    return search(
        labeling, max_size=args.max_size, budget=args.budget, seed=args.seed, metrics=metrics
    )


def cmd_spoil(args: Namespace) -> int:
    labeling = read_labeling_file(args.labeling, r=args.r)
    metrics = SearchMetrics()
    cert = _spoil_certificate(args, labeling, metrics)

    if cert is None:
        logger.warning(f"⚠️  Сертификат не найден: {metrics.get_stats()}")
        return EXIT_NOT_FOUND

    record = cert.to_record()
    record["stats"] = metrics.get_stats()
    _emit_json(record, args.output)
    return EXIT_OK


def cmd_verify(args: Namespace) -> int:
    try:
        record = json.loads(Path(args.certificate).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        logger.error(f"❌ Не удалось прочитать сертификат: {e}")
        return EXIT_USAGE

    if verify_certificate_record(record):
        _emit("valid\n")
        return EXIT_OK
    _emit("invalid\n")
    return EXIT_NOT_FOUND


def _oracle_labeling(args: Namespace) -> Labeling:
    if args.file:
        return read_labeling_file(args.file, r=args.r)
    if args.labels is None or None in (args.d, args.n, args.q):
        raise ValueError("oracle: укажите --file или --labels вместе с --d, --n, --q")
    config = LatticeConfig(d=args.d, n=args.n, q=args.q, r=args.r)
    values = [int(v) for v in args.labels.split(",") if v.strip()]
    if len(values) != config.vertex_count:
        raise ValueError(f"oracle: ожидалось {config.vertex_count} меток, получено {len(values)}")
    return Labeling.from_values(config, np.reshape(values, config.shape))


def cmd_oracle(args: Namespace) -> int:
    labeling = _oracle_labeling(args)
    if brute_force_identifiable(labeling.config, labeling):
        _emit("identifiable\n")
        return EXIT_OK
    _emit("non-identifiable\n")
    return EXIT_NOT_FOUND


def cmd_sweep(args: Namespace) -> int:
    spec = load_sweep_spec(args.spec)
    kwargs = {}
    if args.workers is not None:
        kwargs["workers"] = args.workers
    if args.timeout is not None:
        kwargs["timeout"] = args.timeout
    rows = run_sweep(spec, **kwargs)
    _emit(rows_to_csv(rows), args.output)
    return EXIT_OK


def cmd_stats(args: Namespace) -> int:
    labeling = read_labeling_file(args.labeling, r=args.r)
    stats = openness_stats(labeling)
    _emit_json({"config": labeling.config.to_dict(), "openness": stats.to_dict()}, args.output)
    return EXIT_OK
