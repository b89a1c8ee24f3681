# analysis/diagnosis.py
"""
Диагностика дня врача: минимальное число изменений (пациент пришел вовремя,
прием уложился в плановую длительность), при котором каждый прием
заканчивается по плану с допуском epsilon.
Точный поиск: ветви и границы по приемам в порядке дня.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from ..core.exceptions import Infeasible
from ..core.models import (
    ChangeVector, Diagnosis, ObservedAppointment, PlannedAppointment,
    ProviderDay, RevisedTimeline
)

logger = logging.getLogger(__name__)


def revise_arrival(planned: PlannedAppointment, observed: ObservedAppointment, flag: int) -> int:
    """RAp_i: фактический приход или плановое начало, если флаг δAp_i = 1"""
    return planned.scheduled_start if flag else observed.arrival


def revise_duration(planned: PlannedAppointment, observed: ObservedAppointment, flag: int) -> int:
    """RAd_i: фактическая длительность D_i + Ae_i или плановая D_i, если флаг δAe_i = 1"""
    if flag:
        return planned.scheduled_duration
    return planned.scheduled_duration + (observed.actual_duration - planned.scheduled_duration)


def simulate_revised(day: ProviderDay, changes: ChangeVector) -> RevisedTimeline:
    """
    Пересчет дня с примененными изменениями

    RAt_0 = RAp_0, далее RAt_i = max(0, RAt_{i-1} + RAd_{i-1}, RAp_i).

    Args:
        day: день врача
        changes: флаги изменений длины n

    Returns:
        RevisedTimeline: RAp, RAd, RAt
    """
    if len(changes) != len(day):
        raise ValueError(f"Change vector length {len(changes)} != {len(day)} appointments")

    arrivals, durations, starts = [], [], []
    previous_end = None

    for i, (planned, observed) in enumerate(day.appointments):
        rap = revise_arrival(planned, observed, changes.delta_ap[i])
        rad = revise_duration(planned, observed, changes.delta_ae[i])
        rat = rap if previous_end is None else max(0, previous_end, rap)

        arrivals.append(rap)
        durations.append(rad)
        starts.append(rat)
        previous_end = rat + rad

    return RevisedTimeline(
        revised_arrival=tuple(arrivals),
        revised_duration=tuple(durations),
        revised_start=tuple(starts)
    )


def is_on_schedule(day: ProviderDay, revised: RevisedTimeline, epsilon: int) -> List[bool]:
    """
    Проверка окончания по плану: |(RAt_i + RAd_i) - (T_i + D_i)| <= epsilon

    Раннее окончание - такое же отклонение, как и позднее.
    """
    if len(revised.revised_start) != len(day):
        raise ValueError("Revised timeline length does not match the day")

    return [
        abs(end - planned.planned_end) <= epsilon
        for (planned, _), end in zip(day.appointments, revised.revised_end)
    ]


def all_flips_failure_index(day: ProviderDay, epsilon: int) -> int:
    """
    Первый прием, который не укладывается в окно даже при всех флагах = 1

    Returns:
        int: индекс приема или -1, если вектор из единиц допустим
    """
    revised = simulate_revised(day, ChangeVector.ones(len(day)))
    for i, passed in enumerate(is_on_schedule(day, revised, epsilon)):
        if not passed:
            return i
    return -1


@dataclass(frozen=True)
class _Solution:
    cost: int
    delta_ap: Tuple[int, ...]
    delta_ae: Tuple[int, ...]

    def bit(self, k: int, n: int) -> int:
        return self.delta_ap[k] if k < n else self.delta_ae[k - n]


class BranchAndBound:
    """
    Поиск в глубину по приемам с состоянием "время окончания предыдущего приема"

    Отсечения:
    - окончание приема вне окна [T_i + D_i - eps, T_i + D_i + eps];
    - частичная стоимость не меньше лучшего найденного решения;
    - в состояние (i, окончание) уже заходили с не большей стоимостью.
    Окно ограничивает число различных состояний на шаге величиной 2 * eps + 1,
    поэтому поиск остается точным и быстрым.
    """

    def __init__(self, day: ProviderDay, epsilon: int, fixed: Optional[Dict[int, int]] = None):
        """
        Args:
            day: день врача
            epsilon: допуск, минуты
            fixed: зафиксированные биты строки (δAp_0..δAp_{n-1}, δAe_0..δAe_{n-1})
        """
        self.day = day
        self.epsilon = epsilon
        self.n = len(day)
        fixed = fixed or {}

        self._arrival_choices = []
        self._duration_choices = []
        for i, (planned, observed) in enumerate(day.appointments):
            ap_flags = (fixed[i],) if i in fixed else (0, 1)
            ae_flags = (fixed[self.n + i],) if self.n + i in fixed else (0, 1)
            self._arrival_choices.append(
                [(flag, revise_arrival(planned, observed, flag)) for flag in ap_flags]
            )
            self._duration_choices.append(
                [(flag, revise_duration(planned, observed, flag)) for flag in ae_flags]
            )

        self._planned_ends = [planned.planned_end for planned, _ in day.appointments]
        self._visited: Dict[Tuple[int, Optional[int]], int] = {}
        self._best: Optional[_Solution] = None
        self._bound = 0
        self.deepest_failure = -1
        self.nodes = 0

    def solve(self, upper_bound: Optional[int] = None) -> Optional[_Solution]:
        """
        Найти решение минимальной стоимости

        Args:
            upper_bound: принимать только решения со стоимостью <= upper_bound

        Returns:
            _Solution или None, если допустимых решений нет
        """
        self._visited.clear()
        self._best = None
        self._bound = (2 * self.n + 1) if upper_bound is None else upper_bound + 1
        self.deepest_failure = -1
        self.nodes = 0

        self._search(0, None, 0, [], [])
        return self._best

    def _search(self, i: int, previous_end: Optional[int], cost: int,
                ap_flags: List[int], ae_flags: List[int]):
        if cost >= self._bound:
            return

        if i == self.n:
            self._best = _Solution(cost, tuple(ap_flags), tuple(ae_flags))
            self._bound = cost
            return

        state = (i, previous_end)
        seen = self._visited.get(state)
        if seen is not None and seen <= cost:
            return
        self._visited[state] = cost
        self.nodes += 1

        planned_end = self._planned_ends[i]
        # Сначала дешевые ветви: быстрее находим хорошую верхнюю границу
        branches = sorted(
            ((ap, rap, ae, rad)
             for ap, rap in self._arrival_choices[i]
             for ae, rad in self._duration_choices[i]),
            key=lambda b: (b[0] + b[2], b[0], b[2])
        )

        for ap, rap, ae, rad in branches:
            start = rap if previous_end is None else max(0, previous_end, rap)
            end = start + rad
            if abs(end - planned_end) > self.epsilon:
                self.deepest_failure = max(self.deepest_failure, i)
                continue

            ap_flags.append(ap)
            ae_flags.append(ae)
            self._search(i + 1, end, cost + ap + ae, ap_flags, ae_flags)
            ap_flags.pop()
            ae_flags.pop()


def diagnose(day: ProviderDay, epsilon: int = 0) -> Diagnosis:
    """
    Минимальный по числу изменений вектор R = <δAe, δAp>

    Среди решений минимальной стоимости возвращается лексикографически
    наименьшая строка (δAp_0..δAp_{n-1}, δAe_0..δAe_{n-1}): биты фиксируются
    по очереди, для каждого проверяется, остается ли оптимум достижимым с нулем.

    Args:
        day: корректный день врача
        epsilon: допуск по окончанию приема, минуты

    Returns:
        Diagnosis: изменения, пересчитанный день, значение цели

    Raises:
        Infeasible: ни один вектор не возвращает день в расписание
    """
    if epsilon < 0:
        raise ValueError(f"epsilon must be >= 0, got {epsilon}")
    n = len(day)
    if n == 0:
        raise ValueError("Cannot diagnose an empty provider day")

    solver = BranchAndBound(day, epsilon)
    current = solver.solve()
    if current is None:
        index = all_flips_failure_index(day, epsilon)
        logger.debug(
            f"Day {day.provider_id} {day.date} infeasible: all-flips fails at {index}, "
            f"search reached {solver.deepest_failure}"
        )
        raise Infeasible(index, epsilon)

    optimum = current.cost
    nodes = solver.nodes

    fixed: Dict[int, int] = {}
    for k in range(2 * n):
        if current.bit(k, n) == 0:
            fixed[k] = 0
            continue

        fixed[k] = 0
        constrained = BranchAndBound(day, epsilon, fixed)
        candidate = constrained.solve(upper_bound=optimum)
        nodes += constrained.nodes
        if candidate is None:
            fixed[k] = 1
        else:
            current = candidate

    changes = ChangeVector(current.delta_ap, current.delta_ae)
    revised = simulate_revised(day, changes)

    logger.debug(
        f"🔍 Diagnosed {day.provider_id} {day.date}: objective={optimum}, "
        f"n={n}, eps={epsilon}, nodes={nodes}"
    )

    return Diagnosis(changes=changes, revised=revised, objective=optimum, epsilon=epsilon)
