# analysis/brute_force.py
"""
Эталонный перебор всех 2^(2n) векторов изменений для маленьких дней.
Используется для сверки с точным поиском (флаг --oracle-check и тесты).
"""

import logging

import numpy as np

from ..core.exceptions import Infeasible, InstanceTooLarge
from ..core.models import ChangeVector, Diagnosis, ProviderDay
from .diagnosis import all_flips_failure_index, simulate_revised

logger = logging.getLogger(__name__)

MAX_BRUTE_FORCE_PATIENTS = 12
_CHUNK_ROWS = 1 << 16


def brute_force_diagnose(day: ProviderDay, epsilon: int = 0,
                         max_patients: int = MAX_BRUTE_FORCE_PATIENTS) -> Diagnosis:
    """
    Полный перебор векторов изменений

    Номер вектора - целое число, старший бит которого δAp_0, младший δAe_{n-1}.
    Порядок чисел совпадает с лексикографическим порядком строк флагов,
    поэтому среди оптимумов берется наименьший номер.

    Args:
        day: корректный день врача
        epsilon: допуск, минуты
        max_patients: предельный размер дня

    Returns:
        Diagnosis: тот же результат, что и diagnose()

    Raises:
        InstanceTooLarge: n > max_patients
        Infeasible: ни один вектор не подходит
    """
    if epsilon < 0:
        raise ValueError(f"epsilon must be >= 0, got {epsilon}")
    n = len(day)
    if n == 0:
        raise ValueError("Cannot diagnose an empty provider day")
    if n > max_patients:
        raise InstanceTooLarge(n, max_patients)

    scheduled_start = np.array(day.scheduled_starts, dtype=np.int64)
    scheduled_duration = np.array(day.scheduled_durations, dtype=np.int64)
    arrival = np.array(day.arrivals, dtype=np.int64)
    actual_duration = np.array(day.actual_durations, dtype=np.int64)
    planned_end = scheduled_start + scheduled_duration

    width = 2 * n
    total = 1 << width
    shifts = np.arange(width - 1, -1, -1, dtype=np.int64)

    best_cost = None
    best_code = None

    for chunk_start in range(0, total, _CHUNK_ROWS):
        codes = np.arange(chunk_start, min(total, chunk_start + _CHUNK_ROWS), dtype=np.int64)
        bits = (codes[:, None] >> shifts[None, :]) & 1

        revised_arrival = np.where(bits[:, :n] == 1, scheduled_start, arrival)
        revised_duration = np.where(bits[:, n:] == 1, scheduled_duration, actual_duration)

        first_failure = np.full(len(codes), n, dtype=np.int64)
        previous_end = None
        for i in range(n):
            if previous_end is None:
                start = revised_arrival[:, i]
            else:
                start = np.maximum(np.maximum(previous_end, 0), revised_arrival[:, i])
            end = start + revised_duration[:, i]

            failed = (np.abs(end - planned_end[i]) > epsilon) & (first_failure == n)
            first_failure[failed] = i
            previous_end = end

        feasible = first_failure == n
        if feasible.any():
            costs = bits[feasible].sum(axis=1)
            candidates = codes[feasible]
            chunk_cost = int(costs.min())
            chunk_code = int(candidates[costs == chunk_cost].min())
            if best_cost is None or (chunk_cost, chunk_code) < (best_cost, best_code):
                best_cost, best_code = chunk_cost, chunk_code

    if best_code is None:
        raise Infeasible(all_flips_failure_index(day, epsilon), epsilon)

    flags = tuple((best_code >> (width - 1 - k)) & 1 for k in range(width))
    changes = ChangeVector.from_bits(flags)

    logger.debug(f"Brute force {day.provider_id} {day.date}: objective={best_cost}, 2^{width} vectors")

    return Diagnosis(
        changes=changes,
        revised=simulate_revised(day, changes),
        objective=best_cost,
        epsilon=epsilon
    )
