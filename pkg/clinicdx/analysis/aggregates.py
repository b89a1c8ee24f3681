# analysis/aggregates.py
"""
Сводные отчеты по диагнозам: по врачам, по датам, по половинам расписания.
Дни без решения в сводки не входят и пишутся отдельным файлом исключений.
"""

import logging
from pathlib import Path
from typing import Iterable, List, Sequence, Tuple, Union

import pandas as pd

from ..core.models import DateAggregate, Diagnosis, HalfAggregate, ProviderAggregate, ProviderDay
from ..utils.file_utils import atomic_write_csv, atomic_write_text
from .gantt_export import export_gantt, gantt_filename, gantt_to_json

logger = logging.getLogger(__name__)

PROVIDER_COLUMNS = ['provider_id', 'sum_delta_ap', 'sum_delta_ae', 'clinic_days', 'patients_seen']
DATE_COLUMNS = ['date', 'sum_delta_ap', 'sum_delta_ae', 'patients_seen', 'provider_count']
HALF_COLUMNS = ['half', 'sum_delta_ap', 'sum_delta_ae']
EXCLUSION_COLUMNS = ['provider_id', 'date', 'patients', 'failed_index']

REPORT_FILES = {
    'provider': 'by_provider.csv',
    'date': 'by_date.csv',
    'half': 'by_half.csv',
}
EXCLUSIONS_FILE = 'exclusions.csv'
GANTT_DIR = 'gantt'

DiagnosedDays = Iterable[Tuple[ProviderDay, Diagnosis]]


def _day_frame(diagnoses: DiagnosedDays) -> pd.DataFrame:
    """Одна строка на день: суммы флагов и число пациентов"""
    rows = [{
        'provider_id': day.provider_id,
        'date': day.date,
        'patients': len(day),
        'sum_delta_ap': sum(diagnosis.changes.delta_ap),
        'sum_delta_ae': sum(diagnosis.changes.delta_ae),
    } for day, diagnosis in diagnoses]

    return pd.DataFrame(rows, columns=['provider_id', 'date', 'patients', 'sum_delta_ap', 'sum_delta_ae'])


def aggregate_by_provider(diagnoses: DiagnosedDays) -> List[ProviderAggregate]:
    """
    Сводка по врачам

    Args:
        diagnoses: пары (день, диагноз)

    Returns:
        List[ProviderAggregate]: по убыванию числа пациентов, при равенстве - по provider_id
    """
    df = _day_frame(diagnoses)
    if df.empty:
        return []

    grouped = df.groupby('provider_id', sort=True).agg(
        sum_delta_ap=('sum_delta_ap', 'sum'),
        sum_delta_ae=('sum_delta_ae', 'sum'),
        clinic_days=('date', 'nunique'),
        patients_seen=('patients', 'sum'),
    ).reset_index()

    grouped = grouped.sort_values(
        ['patients_seen', 'provider_id'], ascending=[False, True], kind='mergesort'
    )

    return [
        ProviderAggregate(
            provider_id=str(row.provider_id),
            sum_delta_ap=int(row.sum_delta_ap),
            sum_delta_ae=int(row.sum_delta_ae),
            clinic_days=int(row.clinic_days),
            patients_seen=int(row.patients_seen)
        )
        for row in grouped.itertuples(index=False)
    ]


def aggregate_by_date(diagnoses: DiagnosedDays) -> List[DateAggregate]:
    """Сводка по датам в календарном порядке"""
    df = _day_frame(diagnoses)
    if df.empty:
        return []

    grouped = df.groupby('date', sort=True).agg(
        sum_delta_ap=('sum_delta_ap', 'sum'),
        sum_delta_ae=('sum_delta_ae', 'sum'),
        patients_seen=('patients', 'sum'),
        provider_count=('provider_id', 'nunique'),
    ).reset_index()

    return [
        DateAggregate(
            date=row.date,
            sum_delta_ap=int(row.sum_delta_ap),
            sum_delta_ae=int(row.sum_delta_ae),
            patients_seen=int(row.patients_seen),
            provider_count=int(row.provider_count)
        )
        for row in grouped.itertuples(index=False)
    ]


def half_boundary(n: int) -> int:
    """Приемы с индексом < n // 2 - первая половина, нечетный остаток уходит во вторую"""
    return n // 2


def aggregate_by_half(diagnoses: DiagnosedDays) -> HalfAggregate:
    """
    Флаги по положению приема в расписании дня

    δAp и δAe одного приема считаются в своих колонках независимо.
    """
    first_ap = first_ae = second_ap = second_ae = 0

    for day, diagnosis in diagnoses:
        boundary = half_boundary(len(day))
        delta_ap = diagnosis.changes.delta_ap
        delta_ae = diagnosis.changes.delta_ae
        first_ap += sum(delta_ap[:boundary])
        first_ae += sum(delta_ae[:boundary])
        second_ap += sum(delta_ap[boundary:])
        second_ae += sum(delta_ae[boundary:])

    return HalfAggregate(
        first_half_ap=first_ap,
        first_half_ae=first_ae,
        second_half_ap=second_ap,
        second_half_ae=second_ae
    )


# ===== CSV =====

def providers_to_frame(rows: Sequence[ProviderAggregate]) -> pd.DataFrame:
    return pd.DataFrame(
        [[r.provider_id, r.sum_delta_ap, r.sum_delta_ae, r.clinic_days, r.patients_seen] for r in rows],
        columns=PROVIDER_COLUMNS
    )


def dates_to_frame(rows: Sequence[DateAggregate]) -> pd.DataFrame:
    return pd.DataFrame(
        [[r.date.isoformat(), r.sum_delta_ap, r.sum_delta_ae, r.patients_seen, r.provider_count] for r in rows],
        columns=DATE_COLUMNS
    )


def halves_to_frame(half: HalfAggregate) -> pd.DataFrame:
    return pd.DataFrame(
        [
            ['first', half.first_half_ap, half.first_half_ae],
            ['second', half.second_half_ap, half.second_half_ae],
        ],
        columns=HALF_COLUMNS
    )


def exclusions_to_frame(excluded: Iterable[Tuple[ProviderDay, int]]) -> pd.DataFrame:
    return pd.DataFrame(
        [[day.provider_id, day.date.isoformat(), len(day), index] for day, index in excluded],
        columns=EXCLUSION_COLUMNS
    )


def write_reports(diagnoses: Sequence[Tuple[ProviderDay, Diagnosis]],
                  excluded: Sequence[Tuple[ProviderDay, int]],
                  output_dir: Union[str, Path],
                  report_set: Iterable[str]) -> List[Path]:
    """
    Записать запрошенные отчеты

    Args:
        diagnoses: включенные дни с диагнозами
        excluded: дни без решения и индекс первого непроходимого приема
        output_dir: каталог для отчетов
        report_set: подмножество {provider, date, half, gantt}

    Returns:
        List[Path]: записанные файлы в порядке записи
    """
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    requested = set(report_set)
    written: List[Path] = []

    ordered = sorted(diagnoses, key=lambda pair: pair[0].key)

    if 'provider' in requested:
        frame = providers_to_frame(aggregate_by_provider(ordered))
        written.append(atomic_write_csv(out / REPORT_FILES['provider'], frame))

    if 'date' in requested:
        frame = dates_to_frame(aggregate_by_date(ordered))
        written.append(atomic_write_csv(out / REPORT_FILES['date'], frame))

    if 'half' in requested:
        frame = halves_to_frame(aggregate_by_half(ordered))
        written.append(atomic_write_csv(out / REPORT_FILES['half'], frame))

    if 'gantt' in requested:
        written.extend(write_gantt_documents(ordered, out / GANTT_DIR))

    exclusions = sorted(excluded, key=lambda pair: pair[0].key)
    written.append(atomic_write_csv(out / EXCLUSIONS_FILE, exclusions_to_frame(exclusions)))

    logger.info(f"💾 Wrote {len(written)} report files to {out} ({len(exclusions)} excluded days)")
    return written


def write_gantt_documents(diagnoses: Sequence[Tuple[ProviderDay, Diagnosis]],
                          gantt_dir: Union[str, Path]) -> List[Path]:
    """Один JSON на день врача: gantt/{provider_id}_{date}.json"""
    directory = Path(gantt_dir)
    paths = []
    for day, diagnosis in sorted(diagnoses, key=lambda pair: pair[0].key):
        document = export_gantt(day, diagnosis)
        paths.append(atomic_write_text(directory / gantt_filename(day), gantt_to_json(document)))
    return paths
