"""Curve tables (CSV) and report (JSON-lines) storage."""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass
from typing import Any, Iterable, Optional, Protocol, Sequence, TextIO

import numpy as np
import orjson

from zpd.domain.errors import FormatError

logger = logging.getLogger("zpd.storage")

_JSON_OPTIONS = orjson.OPT_SERIALIZE_NUMPY | orjson.OPT_APPEND_NEWLINE


def dumps_line(record: dict[str, Any]) -> bytes:
    """One JSON-lines record, newline included."""
    return orjson.dumps(record, option=_JSON_OPTIONS)


def write_table(handle: TextIO, header: Sequence[str], columns: Sequence[np.ndarray]) -> None:
    rows = np.column_stack([np.asarray(col, dtype=float).reshape(-1) for col in columns])
    np.savetxt(handle, rows, fmt="%.17g", delimiter=",", header=",".join(header), comments="")


class CurveRepository(Protocol):
    """Storage boundary for curve tables, reports and manifests."""

    root: str

    def save_table(self, name: str, header: Sequence[str], columns: Sequence[np.ndarray]) -> str: ...

    def load_table(self, name: str) -> tuple[list[str], np.ndarray]: ...

    def append_reports(self, name: str, records: Iterable[dict[str, Any]]) -> str: ...

    def save_json(self, name: str, data: dict[str, Any]) -> str: ...

    def save_text(self, name: str, text: str) -> str: ...


@dataclass
class FileSystemCurveRepository:
    """CSV tables with 17 significant digits, so values re-read bit-exactly."""

    root: str = "."

    def path_for(self, name: str) -> str:
        return os.path.join(self.root, name)

    def _replace(self, name: str, payload: bytes) -> str:
        path = self.path_for(name)
        os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
        tmp_path = f"{path}.tmp"
        with open(tmp_path, "wb") as handle:
            handle.write(payload)
        os.replace(tmp_path, path)
        return path

    def save_table(self, name: str, header: Sequence[str], columns: Sequence[np.ndarray]) -> str:
        if len(header) != len(columns):
            raise FormatError(f"{len(header)} column names for {len(columns)} columns")
        path = self.path_for(name)
        os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
        tmp_path = f"{path}.tmp"
        with open(tmp_path, "w", encoding="utf-8", newline="\n") as handle:
            write_table(handle, header, columns)
        os.replace(tmp_path, path)
        logger.debug("Wrote table %s (%d columns)", path, len(columns))
        return path

    def load_table(self, name: str) -> tuple[list[str], np.ndarray]:
        path = self.path_for(name)
        with open(path, "r", encoding="utf-8") as handle:
            header = handle.readline().strip().split(",")
            try:
                rows = np.loadtxt(handle, delimiter=",", ndmin=2)
            except ValueError as exc:
                raise FormatError(f"{path}: malformed row ({exc})") from exc
        if rows.size and rows.shape[1] != len(header):
            raise FormatError(f"{path}: {len(header)} header fields but {rows.shape[1]} columns")
        return header, rows

    def append_reports(self, name: str, records: Iterable[dict[str, Any]]) -> str:
        path = self.path_for(name)
        os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
        with open(path, "ab") as handle:
            for record in records:
                handle.write(dumps_line(record))
        return path

    def save_json(self, name: str, data: dict[str, Any]) -> str:
        return self._replace(name, orjson.dumps(data, option=orjson.OPT_SERIALIZE_NUMPY | orjson.OPT_INDENT_2))

    def save_text(self, name: str, text: str) -> str:
        return self._replace(name, text.encode("utf-8"))

    def load_json(self, name: str) -> Optional[dict[str, Any]]:
        path = self.path_for(name)
        if not os.path.exists(path):
            return None
        with open(path, "rb") as handle:
            return orjson.loads(handle.read())


__all__ = ["CurveRepository", "FileSystemCurveRepository", "dumps_line", "write_table"]
