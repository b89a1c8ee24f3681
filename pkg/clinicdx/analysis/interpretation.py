# analysis/interpretation.py
"""
Интерпретация диагноза дня и сводка по врачу.

Много δAp - проблема в опозданиях пациентов.
Единичные δAe - непредсказуемые приемы (не лечится планированием).
δAe у большинства пациентов - плановая длительность блока занижена.
"""

import math
import logging
from typing import Dict, Iterable, Optional, Tuple

from ..config import InterpretationConfig
from ..core.models import Diagnosis, DiagnosisAnnotation, DiagnosisPattern, ProviderPattern

logger = logging.getLogger(__name__)

# Порядок при равенстве числа дней
_PATTERN_PRIORITY = [
    DiagnosisPattern.LATE_PATIENTS,
    DiagnosisPattern.BLOCK_TIME,
    DiagnosisPattern.UNPREDICTABLE,
    DiagnosisPattern.MIXED,
]


def concentrated_limit(patients: int, share: float) -> int:
    """Сколько δAe еще считаются единичными: max(1, ceil(share * n))"""
    # round() убирает хвосты вида 3.0000000000000004
    return max(1, math.ceil(round(share * patients, 9)))


def classify_diagnosis(diagnosis: Diagnosis,
                       settings: Optional[InterpretationConfig] = None) -> DiagnosisAnnotation:
    """
    Отнести диагноз дня к одному из шаблонов

    Правила проверяются по порядку:
    1. objective = 0 -> on-schedule
    2. δAp больше, чем δAe -> late-patients
    3. доля δAe >= pervasive_share -> block-time-planning
    4. число δAe <= max(1, ceil(concentrated_share * n)) -> unpredictable-appointment
    5. иначе mixed

    Args:
        diagnosis: результат diagnose()
        settings: пороги, по умолчанию InterpretationConfig()

    Returns:
        DiagnosisAnnotation
    """
    settings = settings or InterpretationConfig()

    patients = len(diagnosis.changes)
    ap_count = sum(diagnosis.changes.delta_ap)
    ae_count = sum(diagnosis.changes.delta_ae)
    ap_share = ap_count / patients if patients else 0.0
    ae_share = ae_count / patients if patients else 0.0

    pervasive = ae_share >= settings.pervasive_share
    concentrated = 0 < ae_count <= concentrated_limit(patients, settings.concentrated_share)

    if diagnosis.objective == 0:
        pattern = DiagnosisPattern.ON_SCHEDULE
    elif ap_count > ae_count:
        pattern = DiagnosisPattern.LATE_PATIENTS
    elif pervasive:
        pattern = DiagnosisPattern.BLOCK_TIME
    elif concentrated:
        pattern = DiagnosisPattern.UNPREDICTABLE
    else:
        pattern = DiagnosisPattern.MIXED

    return DiagnosisAnnotation(
        patients=patients,
        ap_count=ap_count,
        ae_count=ae_count,
        ap_share=round(ap_share, 4),
        ae_share=round(ae_share, 4),
        concentrated=concentrated,
        pervasive=pervasive,
        pattern=pattern
    )


def classify_provider(provider_id: str,
                      annotations: Iterable[DiagnosisAnnotation],
                      settings: Optional[InterpretationConfig] = None) -> ProviderPattern:
    """
    Сводка по всем диагностированным дням врача

    Args:
        provider_id: ID врача
        annotations: аннотации его дней
        settings: пороги интерпретации

    Returns:
        ProviderPattern: преобладающий шаблон и устойчивые признаки
    """
    settings = settings or InterpretationConfig()

    clinic_days = 0
    patients_seen = 0
    sum_ap = 0
    sum_ae = 0
    pattern_days: Dict[str, int] = {}

    for annotation in annotations:
        clinic_days += 1
        patients_seen += annotation.patients
        sum_ap += annotation.ap_count
        sum_ae += annotation.ae_count

        key = annotation.pattern.value
        if key not in pattern_days:
            pattern_days[key] = 0
        pattern_days[key] += 1

    dominant = DiagnosisPattern.ON_SCHEDULE
    best_days = 0
    for pattern in _PATTERN_PRIORITY:
        days = pattern_days.get(pattern.value, 0)
        if days > best_days:
            dominant, best_days = pattern, days

    off_schedule_days = clinic_days - pattern_days.get(DiagnosisPattern.ON_SCHEDULE.value, 0)
    unpredictable_days = pattern_days.get(DiagnosisPattern.UNPREDICTABLE.value, 0)

    consistent_overrun = patients_seen > 0 and sum_ae / patients_seen >= settings.pervasive_share
    consistent_unpredictability = off_schedule_days > 0 and 2 * unpredictable_days >= off_schedule_days

    return ProviderPattern(
        provider_id=provider_id,
        clinic_days=clinic_days,
        patients_seen=patients_seen,
        sum_delta_ap=sum_ap,
        sum_delta_ae=sum_ae,
        pattern_days=pattern_days,
        dominant_pattern=dominant,
        consistent_overrun=consistent_overrun,
        consistent_unpredictability=consistent_unpredictability
    )


def classify_providers(items: Iterable[Tuple[str, DiagnosisAnnotation]],
                       settings: Optional[InterpretationConfig] = None) -> Dict[str, ProviderPattern]:
    """Сгруппировать аннотации по врачам и построить сводку для каждого"""
    grouped: Dict[str, list] = {}
    for provider_id, annotation in items:
        if provider_id not in grouped:
            grouped[provider_id] = []
        grouped[provider_id].append(annotation)

    patterns = {
        provider_id: classify_provider(provider_id, grouped[provider_id], settings)
        for provider_id in sorted(grouped)
    }

    for pattern in patterns.values():
        logger.debug(f"📋 {pattern.provider_id}: {pattern.dominant_pattern.value} over {pattern.clinic_days} days")

    return patterns
