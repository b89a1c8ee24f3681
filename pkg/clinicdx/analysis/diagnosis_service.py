# analysis/diagnosis_service.py
"""
Сервис диагностики набора дней: диагноз, интерпретация, сверка с перебором.
Результаты всегда упорядочены по (provider_id, date), независимо от числа процессов.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial
from typing import Dict, List, Optional, Sequence

from ..config import DiagnosisConfig, InterpretationConfig
from ..core.exceptions import Infeasible
from ..core.models import Diagnosis, DiagnosisAnnotation, ProviderDay, ProviderPattern
from .brute_force import MAX_BRUTE_FORCE_PATIENTS, brute_force_diagnose
from .diagnosis import diagnose
from .interpretation import classify_diagnosis, classify_providers

logger = logging.getLogger(__name__)

ORACLE_AGREE = "agree"
ORACLE_DISAGREE = "disagree"
ORACLE_SKIPPED = "skipped"


@dataclass(frozen=True)
class DayResult:
    """Итог по одному дню врача"""
    day: ProviderDay
    diagnosis: Optional[Diagnosis] = None
    annotation: Optional[DiagnosisAnnotation] = None
    failed_index: Optional[int] = None  # Для дней без решения
    oracle_agrees: Optional[bool] = None  # None - сверка не выполнялась

    @property
    def included(self) -> bool:
        return self.diagnosis is not None

    def to_dict(self) -> Dict:
        payload = {
            'provider_id': self.day.provider_id,
            'date': self.day.date.isoformat(),
            'patients': len(self.day),
            'objective': self.diagnosis.objective if self.diagnosis else None,
            'failed_index': self.failed_index,
            'oracle': _oracle_label(self.oracle_agrees),
        }
        if self.annotation is not None:
            payload.update(self.annotation.to_dict())
        return payload


def _oracle_label(agrees: Optional[bool]) -> str:
    if agrees is None:
        return ORACLE_SKIPPED
    return ORACLE_AGREE if agrees else ORACLE_DISAGREE


def _oracle_check(day: ProviderDay, epsilon: int, diagnosis: Optional[Diagnosis],
                  failed_index: Optional[int], max_patients: int) -> bool:
    """Сравнить результат поиска с полным перебором"""
    try:
        expected = brute_force_diagnose(day, epsilon, max_patients)
    except Infeasible as e:
        return diagnosis is None and failed_index == e.index

    if diagnosis is None:
        return False
    return expected.objective == diagnosis.objective and expected.changes == diagnosis.changes


def diagnose_day(day: ProviderDay, epsilon: int, oracle_check: bool = False,
                 oracle_max_patients: int = 10,
                 brute_force_max_patients: int = MAX_BRUTE_FORCE_PATIENTS,
                 interpretation: Optional[InterpretationConfig] = None) -> DayResult:
    """
    Диагностика одного дня. Функция верхнего уровня, чтобы ее можно было
    передать в пул процессов.
    """
    diagnosis = None
    annotation = None
    failed_index = None

    try:
        diagnosis = diagnose(day, epsilon)
        annotation = classify_diagnosis(diagnosis, interpretation)
    except Infeasible as e:
        failed_index = e.index
        logger.warning(f"⚠️ {day.provider_id} {day.date}: infeasible at appointment {e.index}")

    oracle_agrees = None
    if oracle_check and len(day) <= min(oracle_max_patients, brute_force_max_patients):
        oracle_agrees = _oracle_check(day, epsilon, diagnosis, failed_index, brute_force_max_patients)
        if not oracle_agrees:
            logger.error(f"❌ {day.provider_id} {day.date}: search and brute force disagree")

    return DayResult(
        day=day,
        diagnosis=diagnosis,
        annotation=annotation,
        failed_index=failed_index,
        oracle_agrees=oracle_agrees
    )


class DiagnosisService:
    """
    Диагностика всех дней набора данных
    """

    def __init__(self, diagnosis_config: Optional[DiagnosisConfig] = None,
                 interpretation_config: Optional[InterpretationConfig] = None):
        self.diagnosis_config = diagnosis_config or DiagnosisConfig()
        self.interpretation_config = interpretation_config or InterpretationConfig()

    def diagnose_days(self, days: Sequence[ProviderDay], epsilon: Optional[int] = None,
                      oracle_check: bool = False, workers: int = 1) -> List[DayResult]:
        """
        Диагностировать дни, при workers > 1 - в пуле процессов

        Args:
            days: корректные дни врачей
            epsilon: допуск, по умолчанию из DiagnosisConfig
            oracle_check: сверять с перебором дни с n <= min(oracle_max_patients, brute_force_max_patients)
            workers: число процессов

        Returns:
            List[DayResult]: по одному на день, в порядке (provider_id, date)
        """
        if epsilon is None:
            epsilon = self.diagnosis_config.epsilon
        if epsilon < 0:
            raise ValueError(f"epsilon must be >= 0, got {epsilon}")

        task = partial(
            diagnose_day,
            epsilon=epsilon,
            oracle_check=oracle_check,
            oracle_max_patients=self.diagnosis_config.oracle_max_patients,
            brute_force_max_patients=self.diagnosis_config.brute_force_max_patients,
            interpretation=self.interpretation_config
        )

        ordered = sorted(days, key=lambda d: d.key)
        logger.info(f"🔍 Diagnosing {len(ordered)} provider-days (eps={epsilon}, workers={workers})")

        if workers > 1 and len(ordered) > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(task, ordered))
        else:
            results = [task(day) for day in ordered]

        infeasible = sum(1 for r in results if not r.included)
        logger.info(f"✅ Diagnosed {len(results) - infeasible} days, {infeasible} infeasible")

        return results

    def provider_patterns(self, results: Sequence[DayResult]) -> Dict[str, ProviderPattern]:
        """Сводка по врачам на основе включенных дней"""
        return classify_providers(
            ((r.day.provider_id, r.annotation) for r in results if r.included),
            self.interpretation_config
        )

    @staticmethod
    def oracle_status(results: Sequence[DayResult]) -> str:
        """agree / disagree / skipped по всем дням"""
        checked = [r.oracle_agrees for r in results if r.oracle_agrees is not None]
        if not checked:
            return ORACLE_SKIPPED
        return ORACLE_AGREE if all(checked) else ORACLE_DISAGREE
