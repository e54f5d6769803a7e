"""
Configuration Settings
Централизованные настройки симулятора с валидацией
"""

import os
import logging
from pathlib import Path
from dotenv import load_dotenv

# Загружаем .env файл
load_dotenv()

logger = logging.getLogger(__name__)

# ============================================================================
# LOGGING SETTINGS
# ============================================================================

# Уровень логирования
LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO").upper()

# Файл логов
LOG_FILE = Path(os.getenv("LOG_FILE", "logs/lattice.log"))

# Максимальный размер файла логов (байты)
LOG_MAX_BYTES = int(os.getenv("LOG_MAX_BYTES", "10485760"))  # 10MB

# Количество backup файлов
LOG_BACKUP_COUNT = int(os.getenv("LOG_BACKUP_COUNT", "5"))

# ============================================================================
# ORACLE SETTINGS
# ============================================================================

# Максимум перебираемых разметок q^(n^d)
ORACLE_ENUMERATION_CAP = int(os.getenv("ORACLE_ENUMERATION_CAP", str(2 ** 24)))

# Размер чанка векторизованного перебора
ORACLE_CHUNK_SIZE = int(os.getenv("ORACLE_CHUNK_SIZE", "65536"))

# ============================================================================
# SPOILER SETTINGS
# ============================================================================

# Бюджет кандидатов рандомизированного поиска
SPOIL_BUDGET = int(os.getenv("SPOIL_BUDGET", "1000000"))

# Максимальный размер множеств V'_1 / V'_2
SPOIL_MAX_SIZE = int(os.getenv("SPOIL_MAX_SIZE", "4"))

# Seed рандомизированного поиска
SPOIL_SEED = int(os.getenv("SPOIL_SEED", "0"))

# ============================================================================
# SWEEP SETTINGS
# ============================================================================

# Количество воркеров (> 1 — пул процессов)
SWEEP_WORKERS = int(os.getenv("SWEEP_WORKERS", "1"))

# Таймаут одного trial (секунды, 0 — без таймаута)
TRIAL_TIMEOUT = float(os.getenv("TRIAL_TIMEOUT", "600"))

# Максимум вершин n^d в одном trial (больше — skipped)
MAX_VERTICES = int(os.getenv("MAX_VERTICES", str(2 ** 20)))


# ============================================================================
# VALIDATION
# ============================================================================

class ConfigValidationError(Exception):
    """Ошибка валидации конфигурации"""
    pass


def validate_settings() -> bool:
    """
    Проверить критичные настройки

    Returns:
        True если все настройки корректны

    Raises:
        ConfigValidationError: При обнаружении критических ошибок
    """
    errors = []
    warnings = []

    if LOG_LEVEL not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
        errors.append(f"LOG_LEVEL={LOG_LEVEL} не является уровнем logging")

    if LOG_MAX_BYTES <= 0:
        errors.append("LOG_MAX_BYTES должен быть > 0")

    # Оракул
    if ORACLE_ENUMERATION_CAP < 1:
        errors.append("ORACLE_ENUMERATION_CAP должен быть >= 1")

    if ORACLE_ENUMERATION_CAP > 2 ** 28:
        warnings.append("ORACLE_ENUMERATION_CAP > 2^28: перебор займёт очень много времени")

    if ORACLE_CHUNK_SIZE < 1:
        errors.append("ORACLE_CHUNK_SIZE должен быть >= 1")

    # Spoiler
    if SPOIL_BUDGET < 1:
        errors.append("SPOIL_BUDGET должен быть >= 1")

    if SPOIL_MAX_SIZE < 1:
        errors.append("SPOIL_MAX_SIZE должен быть >= 1")

    # Sweep
    if SWEEP_WORKERS < 1:
        errors.append("SWEEP_WORKERS должен быть >= 1")

    if TRIAL_TIMEOUT < 0:
        errors.append("TRIAL_TIMEOUT должен быть >= 0")

    if TRIAL_TIMEOUT == 0:
        warnings.append("TRIAL_TIMEOUT=0: subcritical поиск может не завершиться")

    if MAX_VERTICES < 1:
        errors.append("MAX_VERTICES должен быть >= 1")

    # === Логирование результатов ===

    if errors:
        for error in errors:
            logger.error(f"❌ {error}")
        raise ConfigValidationError(
            f"Найдено {len(errors)} критических ошибок в настройках"
        )

    if warnings:
        for warning in warnings:
            logger.warning(f"⚠️  {warning}")

    logger.info("✅ Все критичные настройки корректны")

    if warnings:
        logger.info(f"ℹ️  Найдено {len(warnings)} предупреждений (не критично)")

    return True


def log_settings_summary():
    """Логировать сводку текущих настроек"""
    logger.info("=" * 70)
    logger.info("📋 КОНФИГУРАЦИЯ")
    logger.info("=" * 70)

    logger.info(f"Oracle Cap: {ORACLE_ENUMERATION_CAP}")
    logger.info(f"Oracle Chunk: {ORACLE_CHUNK_SIZE}")
    logger.info("")

    logger.info(f"Spoil Budget: {SPOIL_BUDGET}")
    logger.info(f"Spoil Max Size: {SPOIL_MAX_SIZE}")
    logger.info(f"Spoil Seed: {SPOIL_SEED}")
    logger.info("")

    logger.info(f"Sweep Workers: {SWEEP_WORKERS}")
    logger.info(f"Trial Timeout: {TRIAL_TIMEOUT}s")
    logger.info(f"Max Vertices: {MAX_VERTICES}")
    logger.info("")

    logger.info(f"Log Level: {LOG_LEVEL}")
    logger.info(f"Log File: {LOG_FILE}")

    logger.info("=" * 70)


# ============================================================================
# MAIN (для проверки)
# ============================================================================

if __name__ == "__main__":
    logging.basicConfig(
        level=logging.INFO,
        format='%(asctime)s - %(levelname)s - %(message)s'
    )

    try:
        validate_settings()
        log_settings_summary()

    except ConfigValidationError as e:
        logger.error(f"\n❌ ОШИБКА КОНФИГУРАЦИИ: {e}")
        logger.error("Исправьте ошибки в .env файле")
        exit(1)
