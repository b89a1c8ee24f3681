# analysis/gantt_export.py
"""
Экспорт дня для диаграммы Ганта: план, факт и пересчитанный день по каждому приему.
Рендеринга нет - только JSON, который читает любой инструмент построения графиков.
"""

import logging
from datetime import date as date_type
from typing import List
from urllib.parse import quote

from pydantic import BaseModel, ConfigDict, Field

from ..core.models import Diagnosis, ProviderDay

logger = logging.getLogger(__name__)


class GanttAppointment(BaseModel):
    """Один прием: все интервалы в минутах от полуночи"""
    model_config = ConfigDict(frozen=True)

    index: int = Field(ge=0)
    planned_start: int
    planned_end: int
    arrival: int
    observed_start: int
    observed_end: int
    revised_arrival: int
    revised_start: int
    revised_end: int
    flip_arrival: bool = Field(description="δAp_i = 1")
    flip_duration: bool = Field(description="δAe_i = 1")


class GanttDocument(BaseModel):
    model_config = ConfigDict(frozen=True)

    provider_id: str
    date: date_type
    epsilon: int = Field(ge=0)
    objective: int = Field(ge=0)
    appointments: List[GanttAppointment] = Field(default_factory=list)


def export_gantt(day: ProviderDay, diagnosis: Diagnosis) -> GanttDocument:
    """
    Собрать документ для диаграммы

    Args:
        day: диагностированный день
        diagnosis: его диагноз

    Returns:
        GanttDocument
    """
    revised = diagnosis.revised
    appointments = []

    for i, (planned, observed) in enumerate(day.appointments):
        appointments.append(GanttAppointment(
            index=i,
            planned_start=planned.scheduled_start,
            planned_end=planned.planned_end,
            arrival=observed.arrival,
            observed_start=observed.actual_start,
            observed_end=observed.actual_end,
            revised_arrival=revised.revised_arrival[i],
            revised_start=revised.revised_start[i],
            revised_end=revised.revised_end[i],
            flip_arrival=bool(diagnosis.changes.delta_ap[i]),
            flip_duration=bool(diagnosis.changes.delta_ae[i])
        ))

    return GanttDocument(
        provider_id=day.provider_id,
        date=day.date,
        epsilon=diagnosis.epsilon,
        objective=diagnosis.objective,
        appointments=appointments
    )


def gantt_to_json(document: GanttDocument) -> str:
    """Сериализация с фиксированным порядком полей"""
    return document.model_dump_json(indent=2) + "\n"


def parse_gantt(text: str) -> GanttDocument:
    """Разбор JSON обратно в документ (ошибки - pydantic.ValidationError)"""
    return GanttDocument.model_validate_json(text)


def gantt_filename(day: ProviderDay) -> str:
    """
    Имя файла: {provider_id}_{date}.json

    Символы вне [A-Za-z0-9._~-] кодируются как %XX (UTF-8), поэтому
    разные provider_id всегда дают разные имена.
    """
    safe = quote(day.provider_id, safe="-.")
    return f"{safe}_{day.date.isoformat()}.json"
