# core/exceptions.py
"""
Иерархия ошибок. Все наследуются от ValueError, как и остальной код проекта.
"""
from typing import Optional


class ClinicDxError(ValueError):
    """Базовая ошибка"""


# ===== INGEST =====

class IngestError(ClinicDxError):
    """Ошибка предобработки выгрузки"""


class SchemaError(IngestError):
    """Отсутствует обязательная или присутствует неизвестная колонка"""


class ParseError(IngestError):
    """Не удалось разобрать значение ячейки"""

    def __init__(self, row: int, column: str, token: str, reason: str = ""):
        self.row = row
        self.column = column
        self.token = token
        details = f": {reason}" if reason else ""
        super().__init__(f"Row {row}, column '{column}': cannot parse '{token}'{details}")


class MissingCheckpoint(IngestError):
    """Нет отметки контрольной точки ни в одной из систем"""

    def __init__(self, checkpoint: str, row: Optional[int] = None):
        self.checkpoint = checkpoint
        self.row = row
        where = f" (row {row})" if row is not None else ""
        super().__init__(f"No timestamp for checkpoint '{checkpoint}' in either system{where}")


class OrderingViolation(IngestError):
    """Нарушен порядок arrival <= room_in <= room_out"""

    def __init__(self, message: str, row: Optional[int] = None):
        self.row = row
        where = f" (row {row})" if row is not None else ""
        super().__init__(f"{message}{where}")


class NestedBeyondRepair(IngestError):
    """После деления перекрытия интервал приема стал пустым"""

    def __init__(self, index: int, room_in: int, room_out: int):
        self.index = index
        self.room_in = room_in
        self.room_out = room_out
        super().__init__(
            f"Appointment {index} has empty room interval [{room_in}, {room_out}] after overlap split"
        )


# ===== DIAGNOSIS =====

class DiagnosisError(ClinicDxError):
    """Ошибка диагностики"""


class Infeasible(DiagnosisError):
    """Ни один вектор изменений не возвращает день в расписание"""

    def __init__(self, index: int, epsilon: int):
        self.index = index
        self.epsilon = epsilon
        super().__init__(
            f"No change vector puts appointment {index} on schedule (epsilon={epsilon})"
        )


class InstanceTooLarge(DiagnosisError):
    """Перебор 2^(2n) вариантов слишком велик"""

    def __init__(self, n: int, limit: int):
        self.n = n
        self.limit = limit
        super().__init__(f"Brute force supports at most {limit} appointments, got {n}")
