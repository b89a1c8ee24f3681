from datetime import date
from typing import List, Optional

import pytest

from clinicdx.core.models import ObservedAppointment, PlannedAppointment, ProviderDay
from clinicdx.integrations.timestamp_loader import CSV_COLUMNS

DAY = date(2017, 3, 27)


def make_day(T: List[int], D: List[int], Ap: List[int], At: List[int], Ad: List[int],
             provider_id: str = "P1", day_date: date = DAY) -> ProviderDay:
    """День из пяти списков, как в примерах модели"""
    appointments = [
        (PlannedAppointment(t, d), ObservedAppointment(ap, at, ad))
        for t, d, ap, at, ad in zip(T, D, Ap, At, Ad)
    ]
    return ProviderDay(provider_id, day_date, appointments)


def csv_text(rows: List[List[Optional[str]]]) -> str:
    lines = [",".join(CSV_COLUMNS)]
    for row in rows:
        lines.append(",".join("" if v is None else v for v in row))
    return "\n".join(lines) + "\n"


@pytest.fixture
def late_first_patient_day() -> ProviderDay:
    return make_day(T=[540, 570], D=[30, 30], Ap=[555, 570], At=[555, 585], Ad=[30, 30])


@pytest.fixture
def overrun_day() -> ProviderDay:
    return make_day(T=[540, 570], D=[30, 30], Ap=[540, 570], At=[540, 585], Ad=[45, 30])


@pytest.fixture
def inconsistent_plan_day() -> ProviderDay:
    return make_day(T=[540, 560], D=[30, 30], Ap=[540, 560], At=[540, 570], Ad=[30, 30])


@pytest.fixture
def on_time_day() -> ProviderDay:
    return make_day(T=[540, 570, 600], D=[30, 30, 30], Ap=[540, 570, 600],
                    At=[540, 570, 600], Ad=[30, 30, 30])
