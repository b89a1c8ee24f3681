# utils/file_utils.py
"""
Атомарная запись артефактов: временный файл рядом с целевым + rename.
Прерванный запуск не оставляет частично записанных отчетов.
"""

import os
import json
import logging
import tempfile
from pathlib import Path
from typing import Any, Union

import pandas as pd

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def atomic_write_text(path: PathLike, text: str) -> Path:
    """
    Записать текст атомарно

    Args:
        path: целевой путь
        text: содержимое (UTF-8, переводы строк \\n)

    Returns:
        Path: путь к записанному файлу
    """
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)

    fd, tmp_name = tempfile.mkstemp(prefix=f".{target.name}.", suffix=".tmp", dir=target.parent)
    try:
        with os.fdopen(fd, 'w', encoding='utf-8', newline='\n') as f:
            f.write(text)
        os.replace(tmp_name, target)
    except Exception:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise

    logger.debug(f"💾 Wrote {target}")
    return target


def atomic_write_json(path: PathLike, payload: Any) -> Path:
    """JSON с сортировкой ключей - одинаковый вход дает побайтно одинаковый файл"""
    text = json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    return atomic_write_text(path, text)


def atomic_write_csv(path: PathLike, df: pd.DataFrame) -> Path:
    """Записать DataFrame в CSV без индекса"""
    return atomic_write_text(path, df.to_csv(index=False, lineterminator='\n'))
