# utils/time_utils.py
"""
Утилиты для работы со временем приема
Все времена в системе хранятся как целые минуты от полуночи
"""

import re
import logging
from datetime import date
from typing import Optional

from ..core.models import MINUTES_PER_DAY

logger = logging.getLogger(__name__)

_HHMM_RE = re.compile(r"^(\d{1,2}):(\d{2})(?::(\d{2})(?:\.\d+)?)?$")


def hhmm_to_minutes(token: str) -> int:
    """
    Переводит время HH:MM (24 часа) в минуты от полуночи

    Секунды, если есть, отбрасываются (округление вниз до минуты).

    Args:
        token: строка вида "09:05" или "09:05:42"

    Returns:
        int: минуты от полуночи в диапазоне [0, 1440]

    Raises:
        ValueError: если строка не в формате HH:MM
    """
    match = _HHMM_RE.match(token.strip())
    if not match:
        raise ValueError(f"expected HH:MM, got '{token}'")

    hours = int(match.group(1))
    minutes = int(match.group(2))
    seconds = int(match.group(3) or 0)

    if minutes > 59 or seconds > 59:
        raise ValueError(f"minutes/seconds out of range in '{token}'")

    total = hours * 60 + minutes
    if total > MINUTES_PER_DAY or (total == MINUTES_PER_DAY and seconds):
        raise ValueError(f"time '{token}' is outside 00:00-24:00")

    return total


def minutes_to_hhmm(minutes: int) -> str:
    """Обратное преобразование: 545 -> "09:05" """
    if not 0 <= minutes <= MINUTES_PER_DAY:
        raise ValueError(f"minutes {minutes} outside [0, {MINUTES_PER_DAY}]")
    return f"{minutes // 60:02d}:{minutes % 60:02d}"


def optional_hhmm_to_minutes(token: Optional[str]) -> Optional[int]:
    """Пустая ячейка - отсутствующая отметка"""
    if token is None or not token.strip():
        return None
    return hhmm_to_minutes(token)


def parse_iso_date(token: str) -> date:
    """
    Разбор даты в формате YYYY-MM-DD

    Raises:
        ValueError: если дата некорректна
    """
    return date.fromisoformat(token.strip())


def parse_minutes_count(token: str) -> int:
    """
    Длительность в минутах: целое неотрицательное число

    Raises:
        ValueError: если значение не целое или отрицательное
    """
    value = token.strip()
    if not value.isdigit():
        raise ValueError(f"expected a whole number of minutes, got '{token}'")
    return int(value)
