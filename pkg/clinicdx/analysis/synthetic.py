# analysis/synthetic.py
"""
Генератор синтетических дней врача и выгрузок двух систем трекинга.
Нужен для тестов, прогонов на масштабе месяца и демонстрации без клинических данных.
Все функции детерминированы при одинаковом numpy.random.Generator.
"""

import logging
from datetime import date as date_type, timedelta
from typing import List, Optional, Tuple

import numpy as np

from ..core.models import (
    MINUTES_PER_DAY, ObservedAppointment, PlannedAppointment, ProviderDay,
    RawAppointmentRecord
)

logger = logging.getLogger(__name__)

DEFAULT_DATE = date_type(2017, 3, 27)
DAY_START = 420  # 07:00
PLANNED_DURATIONS = (10, 15, 20, 30)
MAX_PATIENTS = 16


def _plan(rng: np.random.Generator, n: int, gap_prob: float, start: int = DAY_START) -> List[PlannedAppointment]:
    """Внутренне согласованный план: T_i >= T_{i-1} + D_{i-1}"""
    planned = []
    t = start
    for i in range(n):
        if i > 0 and rng.random() < gap_prob:
            t += int(rng.integers(5, 16))
        duration = int(rng.choice(PLANNED_DURATIONS))
        planned.append(PlannedAppointment(scheduled_start=t, scheduled_duration=duration))
        t += duration
    return planned


def _replay(planned: List[PlannedAppointment], arrivals: List[int], durations: List[int]) -> List[ObservedAppointment]:
    """Один врач: At_0 = Ap_0, At_i = max(F_{i-1}, Ap_i)"""
    observed = []
    previous_end = None
    for arrival, duration in zip(arrivals, durations):
        start = arrival if previous_end is None else max(previous_end, arrival)
        observed.append(ObservedAppointment(arrival=arrival, actual_start=start, actual_duration=duration))
        previous_end = start + duration
    return observed


def _check_size(n: int):
    if not 1 <= n <= MAX_PATIENTS:
        raise ValueError(f"n must be in [1, {MAX_PATIENTS}], got {n}")


def generate_provider_day(rng: np.random.Generator, n: int, provider_id: str = "P1",
                          day_date: date_type = DEFAULT_DATE,
                          late_prob: float = 0.2, overrun_prob: float = 0.3,
                          underrun_prob: float = 0.1, gap_prob: float = 0.2,
                          early_prob: float = 0.3) -> ProviderDay:
    """
    Случайный корректный день врача

    Опоздания до 30 минут, ранние приходы до 15 минут,
    переработки до 20 минут, недоработки до трети плановой длительности.

    Args:
        rng: генератор numpy
        n: число приемов, 1..16
        provider_id: ID врача
        day_date: дата
        late_prob, overrun_prob, underrun_prob, gap_prob, early_prob: вероятности возмущений

    Returns:
        ProviderDay
    """
    _check_size(n)
    planned = _plan(rng, n, gap_prob)

    arrivals = []
    durations = []
    for appointment in planned:
        roll = rng.random()
        if roll < late_prob:
            arrivals.append(appointment.scheduled_start + int(rng.integers(1, 31)))
        elif roll < late_prob + early_prob:
            arrivals.append(appointment.scheduled_start - int(rng.integers(1, 16)))
        else:
            arrivals.append(appointment.scheduled_start)

        d = appointment.scheduled_duration
        roll = rng.random()
        if roll < overrun_prob:
            durations.append(d + int(rng.integers(1, 21)))
        elif roll < overrun_prob + underrun_prob:
            durations.append(d - int(rng.integers(1, d // 3 + 1)))
        else:
            durations.append(d)

    return ProviderDay(provider_id, day_date, list(zip(planned, _replay(planned, arrivals, durations))))


def generate_on_plan_day(rng: np.random.Generator, n: int, provider_id: str = "P1",
                         day_date: date_type = DEFAULT_DATE, gap_prob: float = 0.2) -> ProviderDay:
    """День, полностью совпадающий с планом"""
    _check_size(n)
    planned = _plan(rng, n, gap_prob)
    observed = [
        ObservedAppointment(p.scheduled_start, p.scheduled_start, p.scheduled_duration)
        for p in planned
    ]
    return ProviderDay(provider_id, day_date, list(zip(planned, observed)))


def generate_single_late_day(rng: np.random.Generator, n: int, provider_id: str = "P1",
                             day_date: date_type = DEFAULT_DATE,
                             late_index: Optional[int] = None) -> Tuple[ProviderDay, int]:
    """
    Ровно один опоздавший пациент, остальные по плану; задержка переходит по цепочке

    Returns:
        Tuple[ProviderDay, int]: день и индекс опоздавшего
    """
    _check_size(n)
    planned = _plan(rng, n, gap_prob=0.2)
    k = int(rng.integers(0, n)) if late_index is None else late_index
    lateness = int(rng.integers(1, 31))

    arrivals = [p.scheduled_start for p in planned]
    arrivals[k] += lateness
    durations = [p.scheduled_duration for p in planned]

    return ProviderDay(provider_id, day_date, list(zip(planned, _replay(planned, arrivals, durations)))), k


def generate_single_overrun_day(rng: np.random.Generator, n: int, provider_id: str = "P1",
                                day_date: date_type = DEFAULT_DATE,
                                overrun_index: Optional[int] = None) -> Tuple[ProviderDay, int]:
    """Ровно один прием дольше плана, все пациенты вовремя"""
    _check_size(n)
    planned = _plan(rng, n, gap_prob=0.2)
    k = int(rng.integers(0, n)) if overrun_index is None else overrun_index

    arrivals = [p.scheduled_start for p in planned]
    durations = [p.scheduled_duration for p in planned]
    durations[k] += int(rng.integers(1, 21))

    return ProviderDay(provider_id, day_date, list(zip(planned, _replay(planned, arrivals, durations)))), k


def _business_days(start: date_type, count: int) -> List[date_type]:
    dates = []
    current = start
    while len(dates) < count:
        if current.weekday() < 5:
            dates.append(current)
        current += timedelta(days=1)
    return dates


def _second_system(rng: np.random.Generator, value: int, missing_prob: float = 0.3) -> Optional[int]:
    """Вторая система отмечает позже или не отмечает совсем"""
    if rng.random() < missing_prob:
        return None
    return min(MINUTES_PER_DAY, value + int(rng.integers(0, 4)))


def day_to_records(rng: np.random.Generator, day: ProviderDay, overlap_prob: float = 0.1) -> List[RawAppointmentRecord]:
    """
    Выгрузка дня в формате двух систем

    Первая система отмечает точно, вторая - с задержкой или пропуском.
    Иногда отметка выхода из кабинета заходит на следующий прием (до 5 минут).
    """
    records = []
    n = len(day)
    for i, (planned, observed) in enumerate(day.appointments):
        room_out = observed.actual_end
        if i + 1 < n and rng.random() < overlap_prob:
            room_out = min(MINUTES_PER_DAY, room_out + int(rng.integers(1, 6)))

        records.append(RawAppointmentRecord(
            provider_id=day.provider_id,
            date=day.date,
            scheduled_start=planned.scheduled_start,
            scheduled_duration=planned.scheduled_duration,
            arrival_sys1=observed.arrival,
            arrival_sys2=_second_system(rng, observed.arrival),
            roomin_sys1=observed.actual_start,
            roomin_sys2=_second_system(rng, observed.actual_start),
            roomout_sys1=room_out,
            roomout_sys2=_second_system(rng, room_out)
        ))
    return records


def generate_month(rng: np.random.Generator, providers: int = 14, days: int = 20,
                   max_patients: int = MAX_PATIENTS, min_patients: int = 3,
                   start_date: date_type = DEFAULT_DATE,
                   clinic_prob: float = 0.7) -> List[RawAppointmentRecord]:
    """
    Синтетический месяц: врачи x рабочие дни, строки перемешаны

    Args:
        rng: генератор numpy
        providers: число врачей
        days: число рабочих дней
        max_patients: максимум приемов в день
        min_patients: минимум приемов в день (ниже порога фильтра - тоже бывают)
        start_date: первая дата
        clinic_prob: вероятность приема у врача в конкретный день

    Returns:
        List[RawAppointmentRecord]
    """
    if not 1 <= min_patients <= max_patients <= MAX_PATIENTS:
        raise ValueError(f"Need 1 <= min_patients <= max_patients <= {MAX_PATIENTS}")

    records: List[RawAppointmentRecord] = []
    for p in range(providers):
        provider_id = f"P{p + 1:02d}"
        for day_date in _business_days(start_date, days):
            if rng.random() >= clinic_prob:
                continue
            n = int(rng.integers(min_patients, max_patients + 1))
            day = generate_provider_day(rng, n, provider_id=provider_id, day_date=day_date)
            records.extend(day_to_records(rng, day))

    order = rng.permutation(len(records))
    shuffled = [records[i] for i in order]

    logger.info(f"✅ Generated {len(shuffled)} appointment rows for {providers} providers x {days} days")
    return shuffled
