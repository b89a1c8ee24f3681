# integrations/timestamp_loader.py
"""
Загрузка выгрузки отметок двух систем трекинга пациентов и сборка дней врачей
CSV -> слияние систем -> деление перекрытий кабинета -> группировка по (врач, дата)
"""
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, IO, List, Optional, Tuple, Union

import pandas as pd

from ..core.exceptions import (
    IngestError, MissingCheckpoint, NestedBeyondRepair, OrderingViolation,
    ParseError, SchemaError
)
from ..core.models import (
    MINUTES_PER_DAY, FindingSeverity, IngestFinding, MergedRecord,
    ObservedAppointment, PlannedAppointment, ProviderDay, RawAppointmentRecord
)
from ..core.timeline import validate_day
from ..utils.file_utils import atomic_write_csv
from ..utils.time_utils import (
    hhmm_to_minutes, minutes_to_hhmm, optional_hhmm_to_minutes,
    parse_iso_date, parse_minutes_count
)

logger = logging.getLogger(__name__)

CSV_COLUMNS = [
    'provider_id', 'date', 'scheduled_start', 'scheduled_duration_min',
    'arrival_sys1', 'arrival_sys2', 'roomin_sys1', 'roomin_sys2',
    'roomout_sys1', 'roomout_sys2'
]

# Контрольная точка -> поля двух систем
CHECKPOINTS = {
    'arrival': ('arrival_sys1', 'arrival_sys2'),
    'room_in': ('roomin_sys1', 'roomin_sys2'),
    'room_out': ('roomout_sys1', 'roomout_sys2'),
}

Source = Union[str, Path, IO[str]]


@dataclass(frozen=True)
class OverlapSplit:
    """Одно деление перекрытия: граница между приемами index и index + 1"""
    index: int
    overlap_start: int
    overlap_end: int
    boundary: int


@dataclass
class IngestResult:
    """Результат предобработки выгрузки"""
    days: List[ProviderDay] = field(default_factory=list)
    findings: List[IngestFinding] = field(default_factory=list)
    rows_read: int = 0
    rows_rejected: int = 0
    days_below_min_patients: int = 0
    days_rejected: int = 0

    @property
    def violations(self) -> List[IngestFinding]:
        return [f for f in self.findings if f.severity == FindingSeverity.VIOLATION]


# ===== CSV =====

def parse_csv(source: Source) -> List[RawAppointmentRecord]:
    """
    Разбор CSV выгрузки

    Args:
        source: путь к файлу или текстовый поток

    Returns:
        List[RawAppointmentRecord]: одна запись на строку данных

    Raises:
        SchemaError: нет обязательной колонки или есть неизвестная
        ParseError: значение ячейки не разбирается (строка, колонка, токен)
    """
    try:
        df = pd.read_csv(source, dtype=str, keep_default_na=False, encoding='utf-8')
    except pd.errors.EmptyDataError as e:
        raise SchemaError("Input has no header row") from e
    except pd.errors.ParserError as e:
        raise SchemaError(f"Malformed CSV: {e}") from e

    columns = [c.strip() for c in df.columns]
    df.columns = columns

    missing = [c for c in CSV_COLUMNS if c not in columns]
    unknown = [c for c in columns if c not in CSV_COLUMNS]
    if missing:
        raise SchemaError(f"Missing columns: {', '.join(missing)}")
    if unknown:
        raise SchemaError(f"Unknown columns: {', '.join(unknown)}")

    records = []
    # Строка 1 - заголовок, данные начинаются со строки 2
    for row_number, row in enumerate(df.to_dict(orient='records'), start=2):
        records.append(_parse_row(row, row_number))

    logger.info(f"📋 Parsed {len(records)} rows")
    return records


def _parse_cell(row: Dict[str, str], row_number: int, column: str, parser):
    token = row[column]
    try:
        return parser(token)
    except ValueError as e:
        raise ParseError(row_number, column, token, str(e)) from e


def _parse_row(row: Dict[str, str], row_number: int) -> RawAppointmentRecord:
    provider_id = row['provider_id'].strip()
    if not provider_id:
        raise ParseError(row_number, 'provider_id', row['provider_id'], "provider_id is empty")

    optional_times = {
        column: _parse_cell(row, row_number, column, optional_hhmm_to_minutes)
        for column in CSV_COLUMNS[4:]
    }

    return RawAppointmentRecord(
        provider_id=provider_id,
        date=_parse_cell(row, row_number, 'date', parse_iso_date),
        scheduled_start=_parse_cell(row, row_number, 'scheduled_start', hhmm_to_minutes),
        scheduled_duration=_parse_cell(row, row_number, 'scheduled_duration_min', parse_minutes_count),
        row=row_number,
        **optional_times
    )


def write_csv(records: List[RawAppointmentRecord], path: Union[str, Path]) -> Path:
    """
    Записать записи в формате входной выгрузки (обратное к parse_csv)

    Args:
        records: сырые записи
        path: путь к CSV

    Returns:
        Path: путь к файлу
    """
    def fmt(value: Optional[int]) -> str:
        return "" if value is None else minutes_to_hhmm(value)

    rows = [{
        'provider_id': r.provider_id,
        'date': r.date.isoformat(),
        'scheduled_start': minutes_to_hhmm(r.scheduled_start),
        'scheduled_duration_min': str(r.scheduled_duration),
        'arrival_sys1': fmt(r.arrival_sys1),
        'arrival_sys2': fmt(r.arrival_sys2),
        'roomin_sys1': fmt(r.roomin_sys1),
        'roomin_sys2': fmt(r.roomin_sys2),
        'roomout_sys1': fmt(r.roomout_sys1),
        'roomout_sys2': fmt(r.roomout_sys2),
    } for r in records]

    df = pd.DataFrame(rows, columns=CSV_COLUMNS)
    return atomic_write_csv(path, df)


# ===== MERGE =====

def merge_timestamps(record: RawAppointmentRecord) -> MergedRecord:
    """
    Слияние двух систем: для каждой контрольной точки берется более ранняя отметка

    Args:
        record: сырая запись

    Returns:
        MergedRecord: одна отметка на контрольную точку

    Raises:
        MissingCheckpoint: нет отметки ни в одной системе
        OrderingViolation: arrival > room_in или room_in > room_out
    """
    merged = {}
    for checkpoint, (sys1, sys2) in CHECKPOINTS.items():
        present = [v for v in (getattr(record, sys1), getattr(record, sys2)) if v is not None]
        if not present:
            raise MissingCheckpoint(checkpoint, record.row)
        merged[checkpoint] = min(present)

    if merged['arrival'] > merged['room_in']:
        raise OrderingViolation(
            f"Arrival {merged['arrival']} is after room-in {merged['room_in']}", record.row
        )
    if merged['room_in'] > merged['room_out']:
        raise OrderingViolation(
            f"Room-in {merged['room_in']} is after room-out {merged['room_out']}", record.row
        )

    return MergedRecord(
        provider_id=record.provider_id,
        date=record.date,
        scheduled_start=record.scheduled_start,
        scheduled_duration=record.scheduled_duration,
        arrival=merged['arrival'],
        room_in=merged['room_in'],
        room_out=merged['room_out'],
        row=record.row
    )


# ===== SINGLE SERVER =====

def resolve_overlaps_with_log(records: List[MergedRecord]) -> Tuple[List[MergedRecord], List[OverlapSplit]]:
    """
    Приведение дня к одному приему в момент времени

    Если предыдущий пациент вышел из кабинета позже, чем вошел следующий,
    оба считаются сменившимися в середине перекрытия. Нечетная середина
    округляется вниз, лишняя минута достается следующему пациенту.
    Один проход слева направо; сдвиг room_in может создать перекрытие
    со следующей записью, оно обрабатывается на следующем шаге.

    Args:
        records: записи одного дня врача, отсортированные по room_in

    Returns:
        Tuple: записи без перекрытий и список выполненных делений

    Raises:
        NestedBeyondRepair: интервал приема стал пустым после деления
    """
    resolved = list(records)
    splits: List[OverlapSplit] = []

    for i in range(len(resolved) - 1):
        current = resolved[i]
        following = resolved[i + 1]
        if current.room_out <= following.room_in:
            continue

        overlap_start, overlap_end = following.room_in, current.room_out
        boundary = (overlap_start + overlap_end) // 2

        current = replace(current, room_out=boundary)
        following = replace(following, room_in=boundary)

        if current.room_in >= current.room_out:
            raise NestedBeyondRepair(i, current.room_in, current.room_out)
        if following.room_in >= following.room_out:
            raise NestedBeyondRepair(i + 1, following.room_in, following.room_out)

        resolved[i] = current
        resolved[i + 1] = following
        splits.append(OverlapSplit(i, overlap_start, overlap_end, boundary))

    return resolved, splits


def resolve_overlaps(records: List[MergedRecord]) -> List[MergedRecord]:
    """См. resolve_overlaps_with_log"""
    resolved, _ = resolve_overlaps_with_log(records)
    return resolved


# ===== PROVIDER DAYS =====

def _room_order(record: MergedRecord):
    return (record.room_in, record.room_out, record.row if record.row is not None else 0)


def _group_by_day(records: List[MergedRecord]) -> Dict[tuple, List[MergedRecord]]:
    """Группируем записи по (врач, дата)"""
    groups: Dict[tuple, List[MergedRecord]] = {}
    for record in records:
        key = (record.provider_id, record.date)
        if key not in groups:
            groups[key] = []
        groups[key].append(record)
    return groups


def build_provider_days(records: List[MergedRecord], min_patients: int = 5) -> List[ProviderDay]:
    """
    Сборка дней врачей из очищенных записей

    Args:
        records: слитые записи без перекрытий
        min_patients: дни с меньшим числом приемов отбрасываются

    Returns:
        List[ProviderDay]: дни в порядке (provider_id, date)
    """
    days = []
    for key, group in sorted(_group_by_day(records).items()):
        if len(group) < min_patients:
            logger.debug(f"Skipping {key[0]} {key[1]}: {len(group)} < {min_patients} patients")
            continue

        appointments = [
            (
                PlannedAppointment(r.scheduled_start, r.scheduled_duration),
                ObservedAppointment(r.arrival, r.room_in, r.room_out - r.room_in)
            )
            for r in sorted(group, key=_room_order)
        ]
        days.append(ProviderDay(provider_id=key[0], date=key[1], appointments=appointments))

    return days


class TimestampLoader:
    """Полный цикл предобработки выгрузки с журналом замечаний"""

    def __init__(self, min_patients: int = 5):
        self.min_patients = min_patients

    def load(self, source: Source) -> IngestResult:
        """
        Загрузить выгрузку и собрать корректные дни врачей

        Ошибки отдельных строк и дней не прерывают загрузку, а попадают
        в замечания. SchemaError и ParseError пробрасываются.

        Args:
            source: путь к CSV или поток

        Returns:
            IngestResult: дни, замечания и счетчики
        """
        raw_records = parse_csv(source)
        result = IngestResult(rows_read=len(raw_records))

        merged = self._merge_rows(raw_records, result)

        resolved: List[MergedRecord] = []
        for (provider_id, day_date), group in sorted(_group_by_day(merged).items()):
            group = sorted(group, key=_room_order)
            try:
                fixed, splits = resolve_overlaps_with_log(group)
            except NestedBeyondRepair as e:
                logger.warning(f"⚠️ Dropping {provider_id} {day_date}: {e}")
                result.days_rejected += 1
                result.findings.append(IngestFinding(
                    FindingSeverity.VIOLATION, str(e), provider_id, day_date, group[e.index].row
                ))
                continue

            for split in splits:
                result.findings.append(IngestFinding(
                    FindingSeverity.INFO,
                    f"Overlap [{split.overlap_start}, {split.overlap_end}] split at {split.boundary} "
                    f"between appointments {split.index} and {split.index + 1}",
                    provider_id, day_date, fixed[split.index + 1].row
                ))

            if len(fixed) < self.min_patients:
                result.days_below_min_patients += 1
                result.findings.append(IngestFinding(
                    FindingSeverity.INFO,
                    f"Excluded: {len(fixed)} patients < min_patients={self.min_patients}",
                    provider_id, day_date
                ))
            resolved.extend(fixed)

        for day in build_provider_days(resolved, self.min_patients):
            issues = validate_day(day)
            if issues:
                result.days_rejected += 1
                for issue in issues:
                    result.findings.append(IngestFinding(
                        FindingSeverity.VIOLATION, issue.message, day.provider_id, day.date
                    ))
                continue
            result.days.append(day)

        logger.info(
            f"✅ Loaded {len(result.days)} provider-days from {result.rows_read} rows "
            f"({result.rows_rejected} rows rejected, {result.days_rejected} days rejected, "
            f"{result.days_below_min_patients} below min_patients)"
        )
        return result

    def _merge_rows(self, raw_records: List[RawAppointmentRecord], result: IngestResult) -> List[MergedRecord]:
        merged = []
        for record in raw_records:
            try:
                merged_record = merge_timestamps(record)
            except IngestError as e:
                self._reject(result, record, str(e))
                continue

            if merged_record.scheduled_start + merged_record.scheduled_duration > MINUTES_PER_DAY:
                self._reject(result, record, f"Planned appointment crosses midnight (row {record.row})")
                continue

            merged.append(merged_record)
        return merged

    def _reject(self, result: IngestResult, record: RawAppointmentRecord, message: str):
        logger.warning(f"⚠️ Rejected row: {message}")
        result.rows_rejected += 1
        result.findings.append(IngestFinding(
            FindingSeverity.VIOLATION, message, record.provider_id, record.date, record.row
        ))


def load_provider_days(source: Source, min_patients: int = 5) -> IngestResult:
    """Загрузить выгрузку целиком, см. TimestampLoader.load"""
    return TimestampLoader(min_patients=min_patients).load(source)
