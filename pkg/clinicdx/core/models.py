# core/models.py
"""
Доменные типы: план и факт приема, день врача, производные временные ряды,
векторы изменений и результаты диагностики.
Все времена - целые минуты от полуночи в диапазоне [0, 1440].
"""
from dataclasses import dataclass, field
from datetime import date as date_type
from enum import Enum
from typing import Dict, Optional, Tuple

MINUTES_PER_DAY = 1440


class IssueCode(str, Enum):
    EMPTY_DAY = "empty_day"
    FIELD_RANGE = "field_range"
    CROSSES_MIDNIGHT = "crosses_midnight"
    ARRIVAL_AFTER_START = "arrival_after_start"
    UNSORTED = "unsorted_by_actual_start"
    SEQUENTIAL_SERVICE = "sequential_service"


class FindingSeverity(str, Enum):
    INFO = "info"
    VIOLATION = "violation"


class DiagnosisPattern(str, Enum):
    ON_SCHEDULE = "on-schedule"
    LATE_PATIENTS = "late-patients"
    UNPREDICTABLE = "unpredictable-appointment"
    BLOCK_TIME = "block-time-planning"
    MIXED = "mixed"


# ===== SCHEDULE MODEL =====

@dataclass(frozen=True)
class PlannedAppointment:
    """Плановый прием: начало T_i и длительность D_i"""
    scheduled_start: int
    scheduled_duration: int

    @property
    def planned_end(self) -> int:
        return self.scheduled_start + self.scheduled_duration


@dataclass(frozen=True)
class ObservedAppointment:
    """Фактический прием: приход пациента Ap_i, начало At_i, длительность Ad_i"""
    arrival: int
    actual_start: int
    actual_duration: int

    @property
    def actual_end(self) -> int:
        return self.actual_start + self.actual_duration


@dataclass(frozen=True)
class ProviderDay:
    """Все приемы одного врача за одну дату, упорядоченные по фактическому началу"""
    provider_id: str
    date: date_type
    appointments: Tuple[Tuple[PlannedAppointment, ObservedAppointment], ...]

    def __post_init__(self):
        # Списки превращаем в кортежи, чтобы день можно было передавать между потоками
        object.__setattr__(self, "appointments", tuple(tuple(pair) for pair in self.appointments))

    def __len__(self) -> int:
        return len(self.appointments)

    @property
    def key(self) -> Tuple[str, date_type]:
        return (self.provider_id, self.date)

    @property
    def scheduled_starts(self) -> Tuple[int, ...]:
        return tuple(p.scheduled_start for p, _ in self.appointments)

    @property
    def scheduled_durations(self) -> Tuple[int, ...]:
        return tuple(p.scheduled_duration for p, _ in self.appointments)

    @property
    def arrivals(self) -> Tuple[int, ...]:
        return tuple(o.arrival for _, o in self.appointments)

    @property
    def actual_starts(self) -> Tuple[int, ...]:
        return tuple(o.actual_start for _, o in self.appointments)

    @property
    def actual_durations(self) -> Tuple[int, ...]:
        return tuple(o.actual_duration for _, o in self.appointments)


@dataclass(frozen=True)
class DerivedTimeline:
    """Производные величины дня: As, Ae, F, C, W"""
    start_deviation: Tuple[int, ...]
    duration_deviation: Tuple[int, ...]
    end_time: Tuple[int, ...]
    cycle_time: Tuple[int, ...]
    cycle_deviation: Tuple[int, ...]


@dataclass(frozen=True)
class ValidationIssue:
    """Нарушенный инвариант дня"""
    code: IssueCode
    index: Optional[int]
    message: str


@dataclass(frozen=True)
class ObservationSummary:
    """Описательная статистика по фактическим данным до диагностики"""
    appointments: int = 0
    late_arrivals: int = 0
    late_starts: int = 0
    overruns: int = 0
    underruns: int = 0

    def to_dict(self) -> Dict[str, int]:
        return {
            'appointments': self.appointments,
            'late_arrivals': self.late_arrivals,
            'late_starts': self.late_starts,
            'overruns': self.overruns,
            'underruns': self.underruns
        }


# ===== INGEST =====

@dataclass(frozen=True)
class RawAppointmentRecord:
    """Строка выгрузки: отметки двух систем трекинга по трем контрольным точкам"""
    provider_id: str
    date: date_type
    scheduled_start: int
    scheduled_duration: int
    arrival_sys1: Optional[int] = None
    arrival_sys2: Optional[int] = None
    roomin_sys1: Optional[int] = None
    roomin_sys2: Optional[int] = None
    roomout_sys1: Optional[int] = None
    roomout_sys2: Optional[int] = None
    row: Optional[int] = None  # Номер строки в файле, для сообщений


@dataclass(frozen=True)
class MergedRecord:
    """Запись после слияния систем: одна отметка на контрольную точку"""
    provider_id: str
    date: date_type
    scheduled_start: int
    scheduled_duration: int
    arrival: int
    room_in: int
    room_out: int
    row: Optional[int] = None


@dataclass(frozen=True)
class IngestFinding:
    """Замечание предобработки (информационное или нарушение)"""
    severity: FindingSeverity
    message: str
    provider_id: Optional[str] = None
    date: Optional[date_type] = None
    row: Optional[int] = None


# ===== DIAGNOSIS =====

@dataclass(frozen=True)
class ChangeVector:
    """Бинарные флаги изменений R = <δAe, δAp>"""
    delta_ap: Tuple[int, ...]
    delta_ae: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "delta_ap", tuple(int(v) for v in self.delta_ap))
        object.__setattr__(self, "delta_ae", tuple(int(v) for v in self.delta_ae))
        if len(self.delta_ap) != len(self.delta_ae):
            raise ValueError(
                f"delta_ap and delta_ae lengths differ: {len(self.delta_ap)} != {len(self.delta_ae)}"
            )
        if any(v not in (0, 1) for v in self.delta_ap + self.delta_ae):
            raise ValueError("Change flags must be 0 or 1")

    @classmethod
    def zeros(cls, n: int) -> "ChangeVector":
        return cls((0,) * n, (0,) * n)

    @classmethod
    def ones(cls, n: int) -> "ChangeVector":
        return cls((1,) * n, (1,) * n)

    @classmethod
    def from_bits(cls, bits: Tuple[int, ...]) -> "ChangeVector":
        """Обратное к bits(): первая половина δAp, вторая δAe"""
        n = len(bits) // 2
        return cls(tuple(bits[:n]), tuple(bits[n:]))

    def __len__(self) -> int:
        return len(self.delta_ap)

    @property
    def objective(self) -> int:
        return sum(self.delta_ap) + sum(self.delta_ae)

    def bits(self) -> Tuple[int, ...]:
        """Строка (δAp_0..δAp_{n-1}, δAe_0..δAe_{n-1}) для лексикографического сравнения"""
        return self.delta_ap + self.delta_ae


@dataclass(frozen=True)
class RevisedTimeline:
    """Контрфактический день после применения изменений: RAp, RAd, RAt"""
    revised_arrival: Tuple[int, ...]
    revised_duration: Tuple[int, ...]
    revised_start: Tuple[int, ...]

    @property
    def revised_end(self) -> Tuple[int, ...]:
        return tuple(s + d for s, d in zip(self.revised_start, self.revised_duration))


@dataclass(frozen=True)
class Diagnosis:
    """Минимальный набор изменений, при котором все приемы заканчиваются по плану"""
    changes: ChangeVector
    revised: RevisedTimeline
    objective: int
    epsilon: int


@dataclass(frozen=True)
class DiagnosisAnnotation:
    """Интерпретация диагноза: опоздания пациентов или длительности приемов"""
    patients: int
    ap_count: int
    ae_count: int
    ap_share: float
    ae_share: float
    concentrated: bool
    pervasive: bool
    pattern: DiagnosisPattern

    def to_dict(self) -> Dict:
        return {
            'patients': self.patients,
            'ap_count': self.ap_count,
            'ae_count': self.ae_count,
            'ap_share': self.ap_share,
            'ae_share': self.ae_share,
            'concentrated': self.concentrated,
            'pervasive': self.pervasive,
            'pattern': self.pattern.value
        }


@dataclass(frozen=True)
class ProviderPattern:
    """Сводная интерпретация по всем дням врача"""
    provider_id: str
    clinic_days: int
    patients_seen: int
    sum_delta_ap: int
    sum_delta_ae: int
    pattern_days: Dict[str, int] = field(default_factory=dict)
    dominant_pattern: DiagnosisPattern = DiagnosisPattern.ON_SCHEDULE
    consistent_overrun: bool = False
    consistent_unpredictability: bool = False

    def to_dict(self) -> Dict:
        return {
            'provider_id': self.provider_id,
            'clinic_days': self.clinic_days,
            'patients_seen': self.patients_seen,
            'sum_delta_ap': self.sum_delta_ap,
            'sum_delta_ae': self.sum_delta_ae,
            'pattern_days': dict(sorted(self.pattern_days.items())),
            'dominant_pattern': self.dominant_pattern.value,
            'consistent_overrun': self.consistent_overrun,
            'consistent_unpredictability': self.consistent_unpredictability
        }


# ===== REPORT =====

@dataclass(frozen=True)
class ProviderAggregate:
    provider_id: str
    sum_delta_ap: int
    sum_delta_ae: int
    clinic_days: int
    patients_seen: int


@dataclass(frozen=True)
class DateAggregate:
    date: date_type
    sum_delta_ap: int
    sum_delta_ae: int
    patients_seen: int
    provider_count: int


@dataclass(frozen=True)
class HalfAggregate:
    first_half_ap: int = 0
    first_half_ae: int = 0
    second_half_ap: int = 0
    second_half_ae: int = 0
