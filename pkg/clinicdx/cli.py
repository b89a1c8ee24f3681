# cli.py
"""
Командная строка: validate -> diagnose -> report, плюс generate для синтетики.

Коды выхода: 0 - успех, 1 - ошибка ввода/вывода или схемы, 2 - найдены нарушения.
"""

import os
import sys
import logging
import argparse
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np
from dotenv import load_dotenv

from .config import REPORT_NAMES, RunConfig, config
from .core.exceptions import IngestError
from .core.timeline import summarize_observations
from .analysis.aggregates import write_gantt_documents, write_reports
from .analysis.diagnosis_service import DayResult, DiagnosisService
from .analysis.synthetic import MAX_PATIENTS, generate_month
from .integrations.timestamp_loader import IngestResult, load_provider_days, write_csv
from .utils.file_utils import atomic_write_json

logger = logging.getLogger("clinicdx")

EXIT_OK = 0
EXIT_FATAL = 1
EXIT_VIOLATIONS = 2

MANIFEST_FILE = "manifest.json"


def setup_logging():
    """Логи только в stderr (и LOG_FILE, если задан) - в артефакты не попадают"""
    level_name = os.getenv("LOG_LEVEL", config.log_level).upper()
    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]

    log_file = os.getenv("LOG_FILE", config.log_file)
    if log_file:
        Path(log_file).parent.mkdir(parents=True, exist_ok=True)
        handlers.append(logging.FileHandler(log_file, encoding="utf-8"))

    logging.basicConfig(
        level=getattr(logging, level_name, logging.INFO),
        format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
        handlers=handlers,
        force=True,
    )


def _parse_reports(value: str) -> frozenset:
    names = frozenset(part.strip() for part in value.split(",") if part.strip())
    unknown = names - set(REPORT_NAMES)
    if unknown:
        raise argparse.ArgumentTypeError(f"unknown reports: {', '.join(sorted(unknown))}")
    return names


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", required=True, help="CSV-выгрузка отметок двух систем")
    common.add_argument("--epsilon", type=int, default=config.diagnosis.epsilon,
                        help="Допуск по окончанию приема, минуты")
    common.add_argument("--min-patients", type=int, default=config.ingest.min_patients,
                        help="Минимум пациентов в день у врача")
    common.add_argument("--oracle-check", action="store_true",
                        help="Сверять с полным перебором дни с n <= %d" % config.diagnosis.oracle_max_patients)
    common.add_argument("--reports", type=_parse_reports, default=frozenset(REPORT_NAMES),
                        help="Подмножество provider,date,half,gantt")
    common.add_argument("--workers", type=int, default=1, help="Число процессов диагностики")

    parser = argparse.ArgumentParser(
        prog="clinicdx",
        description="Диагностика отклонений амбулаторного приема от расписания"
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    subparsers.add_parser("validate", parents=[common], help="Только проверка выгрузки")

    diagnose = subparsers.add_parser("diagnose", parents=[common], help="Диагнозы и диаграммы Ганта")
    diagnose.add_argument("--out", required=True, help="Каталог результатов")

    report = subparsers.add_parser("report", parents=[common], help="Сводные CSV-отчеты")
    report.add_argument("--out", required=True, help="Каталог отчетов")

    generate = subparsers.add_parser("generate", help="Синтетическая выгрузка за месяц")
    generate.add_argument("--out", required=True, help="Путь к CSV")
    generate.add_argument("--providers", type=int, default=14)
    generate.add_argument("--days", type=int, default=20)
    generate.add_argument("--max-patients", type=int, default=MAX_PATIENTS)
    generate.add_argument("--seed", type=int, default=0)

    return parser


def _run_config(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        input_path=args.input,
        output_dir=getattr(args, "out", None),
        epsilon=args.epsilon,
        min_patients=args.min_patients,
        oracle_check=args.oracle_check,
        report_set=args.reports,
        workers=args.workers
    )


def _load(run: RunConfig) -> IngestResult:
    return load_provider_days(run.input_path, run.min_patients)


def _diagnose(run: RunConfig, ingest: IngestResult) -> List[DayResult]:
    service = DiagnosisService(config.diagnosis, config.interpretation)
    return service.diagnose_days(ingest.days, run.epsilon, run.oracle_check, run.workers)


def cmd_validate(run: RunConfig) -> int:
    """
    Разбор и предобработка без диагностики

    Печатает замечания по строкам и дням; 2 - если есть нарушения.
    """
    ingest = _load(run)

    for finding in ingest.findings:
        where = []
        if finding.provider_id is not None:
            where.append(finding.provider_id)
        if finding.date is not None:
            where.append(finding.date.isoformat())
        if finding.row is not None:
            where.append(f"row {finding.row}")
        print(f"[{finding.severity.value}] {' '.join(where)}: {finding.message}")

    violations = len(ingest.violations)
    print(f"{len(ingest.days)} provider-days, {ingest.rows_read} rows, {violations} violations")
    return EXIT_VIOLATIONS if violations else EXIT_OK


def build_manifest(run: RunConfig, ingest: IngestResult, results: Sequence[DayResult]) -> Dict:
    """Сводка запуска: только детерминированные значения, без времени запуска"""
    included = [r for r in results if r.included]
    excluded = [r for r in results if not r.included]
    patterns = DiagnosisService(config.diagnosis, config.interpretation).provider_patterns(results)

    return {
        'days': len(results),
        'included_days': len(included),
        'infeasible_days': len(excluded),
        'sum_delta_ap': sum(sum(r.diagnosis.changes.delta_ap) for r in included),
        'sum_delta_ae': sum(sum(r.diagnosis.changes.delta_ae) for r in included),
        'epsilon': run.epsilon,
        'min_patients': run.min_patients,
        'rows_read': ingest.rows_read,
        'rows_rejected': ingest.rows_rejected,
        'days_below_min_patients': ingest.days_below_min_patients,
        'observations': summarize_observations(ingest.days).to_dict(),
        'oracle': DiagnosisService.oracle_status(results),
        'day_annotations': [r.to_dict() for r in results],
        'provider_patterns': [p.to_dict() for p in patterns.values()],
        'exclusions': [
            {
                'provider_id': r.day.provider_id,
                'date': r.day.date.isoformat(),
                'patients': len(r.day),
                'failed_index': r.failed_index,
            }
            for r in excluded
        ],
    }


def cmd_diagnose(run: RunConfig) -> int:
    """Диаграммы Ганта по каждому дню + manifest.json"""
    ingest = _load(run)
    results = _diagnose(run, ingest)
    out = Path(run.output_dir)

    diagnosed = [(r.day, r.diagnosis) for r in results if r.included]
    write_gantt_documents(diagnosed, out / "gantt")

    manifest = build_manifest(run, ingest, results)
    atomic_write_json(out / MANIFEST_FILE, manifest)

    print(
        f"{manifest['included_days']} days diagnosed, {manifest['infeasible_days']} infeasible, "
        f"sum_delta_ap={manifest['sum_delta_ap']}, sum_delta_ae={manifest['sum_delta_ae']}, "
        f"oracle: {manifest['oracle']}"
    )
    return EXIT_OK


def cmd_report(run: RunConfig) -> int:
    """Запрошенные сводные CSV и файл исключений"""
    ingest = _load(run)
    results = _diagnose(run, ingest)

    diagnosed = [(r.day, r.diagnosis) for r in results if r.included]
    excluded = [(r.day, r.failed_index) for r in results if not r.included]
    written = write_reports(diagnosed, excluded, run.output_dir, run.report_set)

    for path in written:
        print(path)
    return EXIT_OK


def cmd_generate(args: argparse.Namespace) -> int:
    """Синтетический месяц в формате входной выгрузки"""
    rng = np.random.default_rng(args.seed)
    records = generate_month(rng, providers=args.providers, days=args.days, max_patients=args.max_patients)
    path = write_csv(records, args.out)
    print(f"{len(records)} rows written to {path}")
    return EXIT_OK


COMMANDS = {
    'validate': cmd_validate,
    'diagnose': cmd_diagnose,
    'report': cmd_report,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Точка входа: возвращает код выхода"""
    if Path(".env").exists():
        load_dotenv()
    setup_logging()

    args = build_parser().parse_args(argv)

    try:
        if args.command == 'generate':
            return cmd_generate(args)
        run = _run_config(args)
        return COMMANDS[args.command](run)
    except (IngestError, ValueError, OSError) as e:
        logger.error(f"❌ {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FATAL


if __name__ == "__main__":
    sys.exit(main())
