# core/timeline.py
"""
Базовая модель дня врача: отклонения начала и длительности, время окончания,
время цикла пациента и его отклонение от плана.
Все функции чистые и не меняют входные данные.
"""
import logging
from typing import Iterable, List

from .models import (
    MINUTES_PER_DAY, DerivedTimeline, IssueCode, ObservationSummary,
    ProviderDay, ValidationIssue
)

logger = logging.getLogger(__name__)


def compute_start_deviation(day: ProviderDay) -> List[int]:
    """
    Отклонение фактического начала от планового (As)

    Первый прием задерживается только опозданием пациента, остальные -
    опозданием пациента или переработкой предыдущего приема.

    Args:
        day: корректный день врача

    Returns:
        List[int]: As_i >= 0 для каждого приема
    """
    deviations = []
    previous_end = None

    for planned, observed in day.appointments:
        late_arrival = observed.arrival - planned.scheduled_start
        if previous_end is None:
            deviations.append(max(0, late_arrival))
        else:
            deviations.append(max(0, previous_end - planned.scheduled_start, late_arrival))
        previous_end = observed.actual_start + observed.actual_duration

    return deviations


def compute_duration_deviation(day: ProviderDay) -> List[int]:
    """Отклонение длительности Ae_i = Ad_i - D_i, может быть отрицательным"""
    return [
        observed.actual_duration - planned.scheduled_duration
        for planned, observed in day.appointments
    ]


def compute_timeline(day: ProviderDay) -> DerivedTimeline:
    """
    Полный набор производных величин дня

    Args:
        day: корректный день врача

    Returns:
        DerivedTimeline: As, Ae, F, C, W
    """
    start_deviation = compute_start_deviation(day)
    duration_deviation = compute_duration_deviation(day)

    end_time = []
    cycle_time = []
    cycle_deviation = []
    for (planned, observed), ae in zip(day.appointments, duration_deviation):
        finish = observed.actual_start + planned.scheduled_duration + ae
        cycle = finish - observed.arrival
        end_time.append(finish)
        cycle_time.append(cycle)
        cycle_deviation.append(cycle - planned.scheduled_duration)

    return DerivedTimeline(
        start_deviation=tuple(start_deviation),
        duration_deviation=tuple(duration_deviation),
        end_time=tuple(end_time),
        cycle_time=tuple(cycle_time),
        cycle_deviation=tuple(cycle_deviation)
    )


def _in_day(value: int) -> bool:
    return 0 <= value <= MINUTES_PER_DAY


def validate_day(day: ProviderDay) -> List[ValidationIssue]:
    """
    Проверка инвариантов дня врача

    Нарушения возвращаются списком, исключения не выбрасываются.

    Args:
        day: день врача в любом состоянии

    Returns:
        List[ValidationIssue]: пустой список для корректного дня
    """
    issues: List[ValidationIssue] = []

    if len(day) == 0:
        issues.append(ValidationIssue(IssueCode.EMPTY_DAY, None, "Provider day has no appointments"))
        return issues

    for i, (planned, observed) in enumerate(day.appointments):
        fields = {
            'scheduled_start': planned.scheduled_start,
            'scheduled_duration': planned.scheduled_duration,
            'arrival': observed.arrival,
            'actual_start': observed.actual_start,
            'actual_duration': observed.actual_duration,
        }
        for name, value in fields.items():
            if not _in_day(value):
                issues.append(ValidationIssue(
                    IssueCode.FIELD_RANGE, i,
                    f"Appointment {i}: {name}={value} outside [0, {MINUTES_PER_DAY}]"
                ))

        if planned.planned_end > MINUTES_PER_DAY:
            issues.append(ValidationIssue(
                IssueCode.CROSSES_MIDNIGHT, i,
                f"Appointment {i}: planned end {planned.planned_end} crosses midnight"
            ))
        if observed.actual_end > MINUTES_PER_DAY:
            issues.append(ValidationIssue(
                IssueCode.CROSSES_MIDNIGHT, i,
                f"Appointment {i}: actual end {observed.actual_end} crosses midnight"
            ))

        if observed.arrival > observed.actual_start:
            issues.append(ValidationIssue(
                IssueCode.ARRIVAL_AFTER_START, i,
                f"Appointment {i}: arrival {observed.arrival} is after actual start "
                f"{observed.actual_start} (patient roomed before arriving)"
            ))

    for i in range(1, len(day)):
        _, previous = day.appointments[i - 1]
        _, current = day.appointments[i]

        if current.actual_start < previous.actual_start:
            issues.append(ValidationIssue(
                IssueCode.UNSORTED, i,
                f"Appointment {i}: actual start {current.actual_start} precedes "
                f"appointment {i - 1} start {previous.actual_start}"
            ))
        elif current.actual_start < previous.actual_end:
            issues.append(ValidationIssue(
                IssueCode.SEQUENTIAL_SERVICE, i,
                f"Appointment {i}: starts at {current.actual_start} before appointment "
                f"{i - 1} ends at {previous.actual_end} (provider sees one patient at a time)"
            ))

    if issues:
        logger.debug(f"Day {day.provider_id} {day.date}: {len(issues)} validation issues")

    return issues


def summarize_observations(days: Iterable[ProviderDay]) -> ObservationSummary:
    """
    Описательные счетчики по фактическим данным

    Args:
        days: корректные дни врачей

    Returns:
        ObservationSummary: опоздания пациентов, поздние начала, переработки и недоработки
    """
    appointments = late_arrivals = late_starts = overruns = underruns = 0

    for day in days:
        start_deviation = compute_start_deviation(day)
        for (planned, observed), as_i in zip(day.appointments, start_deviation):
            appointments += 1
            if observed.arrival > planned.scheduled_start:
                late_arrivals += 1
            if as_i > 0:
                late_starts += 1
            if observed.actual_duration > planned.scheduled_duration:
                overruns += 1
            elif observed.actual_duration < planned.scheduled_duration:
                underruns += 1

    return ObservationSummary(
        appointments=appointments,
        late_arrivals=late_arrivals,
        late_starts=late_starts,
        overruns=overruns,
        underruns=underruns
    )
