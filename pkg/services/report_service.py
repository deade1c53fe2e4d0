"""
Report service: CSV / JSON result writers and golden fixtures.

Files are written to a temporary sibling and renamed into place, so a failed
command never leaves a partial output behind.
"""
import csv
import io
import json
import logging
import math
import os
import sys
import tempfile
from contextlib import contextmanager
from typing import Any, Dict, Iterable, Iterator, List, Optional, Sequence, TextIO

from config import settings
from models.schemas import OutputFormat

logger = logging.getLogger(__name__)


def format_value(value: Any) -> Any:
    """Shortest round-trip text for floats; inf becomes the token "inf" """
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return repr(float(value))
    if hasattr(value, "item"):
        return format_value(value.item())
    return value


def _json_value(value: Any) -> Any:
    if isinstance(value, (list, tuple)):
        return [_json_value(v) for v in value]
    if isinstance(value, dict):
        return {k: _json_value(v) for k, v in value.items()}
    if getattr(value, "ndim", 0):
        return _json_value(value.tolist())
    if hasattr(value, "item"):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return "inf" if value > 0 else ("-inf" if value < 0 else None)
    return value


@contextmanager
def atomic_open(path: str) -> Iterator[TextIO]:
    """Text handle whose content replaces `path` only when the block succeeds"""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            yield handle
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def render_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(v) for v in row])
    return buffer.getvalue()


def render_json(header: Sequence[str], rows: Iterable[Sequence[Any]],
                meta: Optional[Dict[str, Any]] = None) -> str:
    records = [{key: _json_value(v) for key, v in zip(header, row)} for row in rows]
    document: Dict[str, Any] = {"rows": records}
    if meta:
        document = {"meta": {k: _json_value(v) for k, v in meta.items()}, **document}
    return json.dumps(document, indent=2) + "\n"


def write_table(header: Sequence[str], rows: Iterable[Sequence[Any]], path: Optional[str] = None,
                output_format: OutputFormat = OutputFormat.CSV, meta: Optional[Dict[str, Any]] = None) -> None:
    """Write a result table to `path`, or stdout when no path is given"""
    rows = list(rows)
    if output_format == OutputFormat.JSON:
        text = render_json(header, rows, meta)
    else:
        text = render_csv(header, rows)
    if path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with atomic_open(path) as handle:
        handle.write(text)
    logger.info("Wrote %d rows to %s", len(rows), path)


def write_json(document: Dict[str, Any], path: Optional[str] = None) -> None:
    text = json.dumps(_json_value(document), indent=2) + "\n"
    if path is None:
        sys.stdout.write(text)
        return
    with atomic_open(path) as handle:
        handle.write(text)
    logger.info("Wrote %s", path)


def write_json_stream(header: Dict[str, Any], records: Iterable[Dict[str, Any]], path: str,
                      records_key: str = "codewords") -> int:
    """Write {"header": ..., records_key: [...]} one record at a time"""
    count = 0
    with atomic_open(path) as handle:
        handle.write('{"header": ')
        handle.write(json.dumps(header))
        handle.write(f', "{records_key}": [')
        for record in records:
            handle.write(",\n" if count else "\n")
            handle.write(json.dumps(record))
            count += 1
        handle.write("\n]}\n")
    logger.info("Wrote %d %s to %s", count, records_key, path)
    return count


def golden_path(name: str, output_format: OutputFormat = OutputFormat.CSV) -> str:
    return os.path.join(settings.GOLDEN_DIR, f"{name}.{output_format.value}")


def write_golden(name: str, header: Sequence[str], rows: List[Sequence[Any]],
                 output_format: OutputFormat = OutputFormat.CSV) -> str:
    path = golden_path(name, output_format)
    write_table(header, rows, path, output_format)
    logger.info("Regenerated golden fixture %s", path)
    return path
