"""
Result writers. Floats are written with repr so files are byte-stable.
"""
import csv
import json
import logging
from pathlib import Path
from typing import Iterable, List, Sequence, Union

from pydantic import BaseModel

logger = logging.getLogger(__name__)


def _cell(value) -> str:
    if isinstance(value, bool) or value is None:
        return str(value)
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return " ".join(_cell(v) for v in value)
    return str(value)


def write_csv(path: Union[str, Path], header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])
    logger.info(f"Wrote {path}")
    return path


def write_json(path: Union[str, Path], report: Union[BaseModel, List[BaseModel], dict]) -> Path:
    """Pydantic reports (or lists of them) as indented JSON."""
    path = Path(path)
    if isinstance(report, BaseModel):
        text = report.model_dump_json(indent=2)
    elif isinstance(report, list):
        text = json.dumps([item.model_dump(mode="json") for item in report], indent=2)
    else:
        text = json.dumps(report, indent=2)
    path.write_text(text + "\n", encoding="utf-8")
    logger.info(f"Wrote {path}")
    return path


def write_jsonl(path: Union[str, Path], lines: Iterable[str]) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8") as f:
        for line in lines:
            f.write(line + "\n")
    logger.info(f"Wrote {path}")
    return path


def read_json(path: Union[str, Path]):
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)
