#!/usr/bin/env python3
"""
lattice-shotgun CLI
Генерация разметок, профили, сборка, поиск сертификатов, оракул и sweep

Коды выхода:
    0  успех
    1  не найдено, сборка не удалась или разметка неидентифицируема
    2  ошибка использования или валидации
"""

import argparse
import logging
import sys
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import List, Optional

from config.settings import (
    LOG_BACKUP_COUNT,
    LOG_FILE,
    LOG_LEVEL,
    LOG_MAX_BYTES,
    SPOIL_BUDGET,
    SPOIL_MAX_SIZE,
    SPOIL_SEED,
)
from services.assembly.assembler import DISCIPLINES
from services.harness import sweep_spec
from services.lattice import LatticeError

from .handlers import commands

logger = logging.getLogger(__name__)


# === Настройка логирования ===
def setup_logging(level: str = LOG_LEVEL, log_file: Optional[Path] = LOG_FILE):
    """Файл с ротацией + stderr; stdout остаётся под результаты"""
    formatter = logging.Formatter(
        '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S'
    )

    root_logger = logging.getLogger()
    root_logger.setLevel(level)
    root_logger.handlers.clear()

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(formatter)
    root_logger.addHandler(console_handler)

    if log_file:
        log_file = Path(log_file)
        log_file.parent.mkdir(parents=True, exist_ok=True)
        file_handler = RotatingFileHandler(
            log_file, maxBytes=LOG_MAX_BYTES, backupCount=LOG_BACKUP_COUNT, encoding="utf-8"
        )
        file_handler.setFormatter(formatter)
        root_logger.addHandler(file_handler)


def _lattice_args(parser: argparse.ArgumentParser, required: bool = True):
    parser.add_argument("--d", type=int, required=required, help="размерность")
    parser.add_argument("--n", type=int, required=required, help="сторона Λ_n")
    parser.add_argument("--q", type=int, required=required, help="алфавит")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lattice-shotgun",
        description="Shotgun-сборка разметок решётки по мультимножеству r-боксов",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="уровень DEBUG")
    parser.add_argument(
        "--log-file", default=str(LOG_FILE), help="файл логов ('' — только stderr)"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="случайная разметка -> файл разметки")
    _lattice_args(p)
    p.add_argument("--r", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(handler=commands.cmd_generate)

    p = sub.add_parser("shatter", help="файл разметки -> shard-файл")
    p.add_argument("labeling")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--symmetric", action="store_true")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(handler=commands.cmd_shatter)

    p = sub.add_parser("assemble", help="shard-файл -> файл разметки + отчёт JSON")
    p.add_argument("shards")
    p.add_argument("--symmetric", action="store_true")
    p.add_argument("--discipline", choices=DISCIPLINES, default="fifo")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--report", help="файл отчёта (по умолчанию stdout)")
    p.set_defaults(handler=commands.cmd_assemble)

    p = sub.add_parser("spoil", help="файл разметки -> сертификат JSON")
    p.add_argument("labeling")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--strategy", choices=("1d", "singleton", "multiset"), default="multiset")
    p.add_argument("--symmetric", action="store_true")
    p.add_argument("--budget", type=int, default=SPOIL_BUDGET)
    p.add_argument("--max-size", type=int, default=SPOIL_MAX_SIZE)
    p.add_argument("--seed", type=int, default=SPOIL_SEED)
    p.add_argument("-o", "--output")
    p.set_defaults(handler=commands.cmd_spoil)

    p = sub.add_parser("verify", help="перепроверить сертификат JSON")
    p.add_argument("certificate")
    p.set_defaults(handler=commands.cmd_verify)

    p = sub.add_parser("oracle", help="полный перебор: identifiable / non-identifiable")
    _lattice_args(p, required=False)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--labels", help="1-based метки через запятую, row-major")
    p.add_argument("--file", help="файл разметки вместо --labels")
    p.set_defaults(handler=commands.cmd_oracle)

    p = sub.add_parser(
        "sweep",
        help="spec-файл -> CSV",
        description=sweep_spec.__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    p.add_argument("spec")
    p.add_argument("--workers", type=int)
    p.add_argument("--timeout", type=float)
    p.add_argument("-o", "--output")
    p.set_defaults(handler=commands.cmd_sweep)

    p = sub.add_parser("stats", help="файл разметки -> openness JSON")
    p.add_argument("labeling")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(handler=commands.cmd_stats)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else commands.EXIT_USAGE

    setup_logging(
        "DEBUG" if args.verbose else LOG_LEVEL,
        Path(args.log_file) if args.log_file else None,
    )

    try:
        return args.handler(args)
    except (LatticeError, ValueError) as e:
        logger.error(f"❌ {e}")
        return commands.EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
