"""
Sample batch storage interfaces and filesystem implementation.

Two on-disk formats:

- CSV: header ``re,im`` then one ``%.17g`` pair per line (exact round trip).
- ZPD1: the magic ``b"ZPD1"``, the count as a little-endian uint64, then
  count x (re, im) little-endian float64 pairs.
"""

from __future__ import annotations

import logging
import os
import struct
from dataclasses import dataclass
from typing import Optional, Protocol, Union

import numpy as np

from zpd.domain.errors import FormatError
from zpd.domain.types import OutputFormat
from zpd.services.simulate import SampleBatch

logger = logging.getLogger("zpd.storage")

MAGIC = b"ZPD1"
_COUNT = struct.Struct("<Q")
_HEADER_SIZE = len(MAGIC) + _COUNT.size
_PAIR_DTYPE = np.dtype("<f8")
CSV_HEADER = "re,im"

Samples = Union[SampleBatch, np.ndarray]


def infer_format(path: str) -> OutputFormat:
    return OutputFormat.CSV if path.lower().endswith(".csv") else OutputFormat.BINARY


class BatchRepository(Protocol):
    """Storage boundary for sampled realizations of Z."""

    root: str

    def save(self, samples: Samples, name: str, fmt: Optional[OutputFormat] = None) -> str: ...

    def load(self, name: str, fmt: Optional[OutputFormat] = None) -> np.ndarray: ...


@dataclass
class FileSystemBatchRepository:
    """Writes batches atomically (temp file, then os.replace)."""

    root: str = "."

    def path_for(self, name: str) -> str:
        return os.path.join(self.root, name)

    def save(self, samples: Samples, name: str, fmt: Optional[OutputFormat] = None) -> str:
        z = samples.z if isinstance(samples, SampleBatch) else np.asarray(samples, dtype=complex)
        z = z.reshape(-1)
        path = self.path_for(name)
        fmt = infer_format(path) if fmt is None else OutputFormat(fmt)
        os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
        tmp_path = f"{path}.tmp"
        pairs = np.column_stack((z.real, z.imag))
        if fmt is OutputFormat.CSV:
            with open(tmp_path, "w", encoding="utf-8", newline="\n") as handle:
                np.savetxt(handle, pairs, fmt="%.17g", delimiter=",", header=CSV_HEADER, comments="")
        else:
            with open(tmp_path, "wb") as handle:
                handle.write(MAGIC)
                handle.write(_COUNT.pack(z.size))
                handle.write(pairs.astype(_PAIR_DTYPE).tobytes())
        os.replace(tmp_path, path)
        logger.info("Wrote %d samples to %s (%s)", z.size, path, fmt.value)
        return path

    def load(self, name: str, fmt: Optional[OutputFormat] = None) -> np.ndarray:
        path = self.path_for(name)
        fmt = infer_format(path) if fmt is None else OutputFormat(fmt)
        if fmt is OutputFormat.CSV:
            return self._load_csv(path)
        return self._load_binary(path)

    def _load_binary(self, path: str) -> np.ndarray:
        with open(path, "rb") as handle:
            data = handle.read()
        if len(data) < _HEADER_SIZE or data[: len(MAGIC)] != MAGIC:
            raise FormatError(f"{path}: not a ZPD1 sample file (bad magic)")
        (count,) = _COUNT.unpack_from(data, len(MAGIC))
        expected = _HEADER_SIZE + 16 * count
        if len(data) != expected:
            raise FormatError(f"{path}: header promises {count} samples but payload has {len(data) - _HEADER_SIZE} bytes")
        pairs = np.frombuffer(data, dtype=_PAIR_DTYPE, offset=_HEADER_SIZE).reshape(count, 2)
        return pairs[:, 0] + 1j * pairs[:, 1]

    def _load_csv(self, path: str) -> np.ndarray:
        with open(path, "r", encoding="utf-8") as handle:
            header = handle.readline().strip()
            if header != CSV_HEADER:
                raise FormatError(f"{path}: expected header {CSV_HEADER!r}, got {header!r}")
            try:
                pairs = np.loadtxt(handle, delimiter=",", ndmin=2)
            except ValueError as exc:
                raise FormatError(f"{path}: malformed sample row ({exc})") from exc
        if pairs.size == 0:
            return np.zeros(0, dtype=complex)
        if pairs.shape[1] != 2:
            raise FormatError(f"{path}: expected 2 columns, got {pairs.shape[1]}")
        return pairs[:, 0] + 1j * pairs[:, 1]


__all__ = ["BatchRepository", "CSV_HEADER", "FileSystemBatchRepository", "MAGIC", "infer_format"]
