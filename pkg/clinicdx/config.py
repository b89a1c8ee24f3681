# config.py
import os
from dataclasses import dataclass, field
from typing import FrozenSet, Optional

REPORT_NAMES = ("provider", "date", "half", "gantt")


@dataclass
class IngestConfig:
    """Конфигурация предобработки выгрузки"""
    min_patients: int = 5  # Минимум пациентов в день у врача


@dataclass
class DiagnosisConfig:
    """Конфигурация диагностики"""
    epsilon: int = 0  # Допуск по времени окончания, минуты
    oracle_max_patients: int = 10  # Перекрестная проверка перебором только для коротких дней
    brute_force_max_patients: int = 12  # 2^(2n) вариантов


@dataclass
class InterpretationConfig:
    """Пороги интерпретации результата диагностики"""
    pervasive_share: float = 0.5  # Доля δAe, начиная с которой проблема в планировании блоков
    concentrated_share: float = 0.2  # Доля δAe, до которой переработки считаются единичными


@dataclass
class RunConfig:
    """Параметры одного запуска CLI"""
    input_path: str
    output_dir: Optional[str] = None
    epsilon: int = 0
    min_patients: int = 5
    oracle_check: bool = False
    report_set: FrozenSet[str] = field(default_factory=lambda: frozenset(REPORT_NAMES))
    workers: int = 1

    def __post_init__(self):
        if self.epsilon < 0:
            raise ValueError(f"epsilon must be >= 0, got {self.epsilon}")
        if self.min_patients < 1:
            raise ValueError(f"min_patients must be >= 1, got {self.min_patients}")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")
        unknown = set(self.report_set) - set(REPORT_NAMES)
        if unknown:
            raise ValueError(f"Unknown reports: {', '.join(sorted(unknown))}")
        self.report_set = frozenset(self.report_set)


@dataclass
class Config:
    """Главная конфигурация приложения"""
    ingest: IngestConfig
    diagnosis: DiagnosisConfig
    interpretation: InterpretationConfig

    # Логирование
    log_level: str = os.getenv("LOG_LEVEL", "INFO")
    log_file: str = os.getenv("LOG_FILE", "")


# Глобальный экземпляр конфигурации
config = Config(
    ingest=IngestConfig(),
    diagnosis=DiagnosisConfig(),
    interpretation=InterpretationConfig()
)
