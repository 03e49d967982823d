"""Exact flat nearest-neighbour search under squared L2.

Vectors are kept as float32 (the on-disk precision) so that a saved and
reloaded index answers queries exactly like the one that was built.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .embedding import _sq_dists
from .errors import FormatError, InvalidInput

MAGIC = b"MVFI"
VERSION = 1
_HEADER = struct.Struct("<4sIIQ")


class FlatIndex:
    def __init__(self, dims: int):
        if dims < 1:
            raise InvalidInput("dims must be >= 1")
        self.dims = dims
        self.ids: list[str] = []
        self._pos: dict[str, int] = {}
        self._rows: list[np.ndarray] = []
        self._matrix: np.ndarray | None = None
        self.frozen = False

    def __len__(self) -> int:
        return len(self.ids)

    def __contains__(self, id_: str) -> bool:
        return id_ in self._pos

    def add(self, id_: str, vector) -> "FlatIndex":
        if self.frozen:
            raise InvalidInput("index is frozen")
        v = np.asarray(vector, dtype=np.float32)
        if v.shape != (self.dims,):
            raise InvalidInput(f"dimension mismatch: got {v.shape}, index has dims={self.dims}")
        if id_ in self._pos:
            raise InvalidInput(f"duplicate id {id_!r}")
        self._pos[id_] = len(self.ids)
        self.ids.append(id_)
        self._rows.append(v)
        self._matrix = None
        return self

    def freeze(self) -> "FlatIndex":
        self.matrix  # materialize
        self.frozen = True
        return self

    @property
    def matrix(self) -> np.ndarray:
        if self._matrix is None:
            if self._rows:
                self._matrix = np.vstack(self._rows).astype(np.float32, copy=False)
            else:
                self._matrix = np.zeros((0, self.dims), dtype=np.float32)
        return self._matrix

    def get(self, id_: str) -> np.ndarray:
        return self.matrix[self._pos[id_]]

    def search_top_k(self, query, k: int) -> list[tuple[str, float]]:
        """Return the ``min(k, len)`` nearest entries, ascending by distance.

        Equal distances keep insertion order.  An empty index yields ``[]``.
        """
        q = np.asarray(query)
        if q.shape != (self.dims,):
            raise InvalidInput(f"dimension mismatch: query {q.shape}, index dims={self.dims}")
        if k < 0:
            raise InvalidInput("k must be non-negative")
        if not self.ids or k == 0:
            return []
        d = _sq_dists(self.matrix, q)
        order = np.argsort(d, kind="stable")[:k]
        return [(self.ids[i], float(d[i])) for i in order]

    # persistence -------------------------------------------------------

    def save(self, vectors_path: str | Path, ids_path: str | Path) -> None:
        m = self.matrix
        with open(vectors_path, "wb") as fh:
            fh.write(_HEADER.pack(MAGIC, VERSION, self.dims, len(self.ids)))
            fh.write(m.astype("<f4").tobytes())
        with open(ids_path, "w", encoding="utf-8", newline="\n") as fh:
            for id_ in self.ids:
                fh.write(id_ + "\n")

    @classmethod
    def load(cls, vectors_path: str | Path, ids_path: str | Path, dims: int | None = None) -> "FlatIndex":
        raw = Path(vectors_path).read_bytes()
        if len(raw) < _HEADER.size:
            raise FormatError(f"{vectors_path}: truncated header")
        magic, version, file_dims, count = _HEADER.unpack_from(raw)
        if magic != MAGIC:
            raise FormatError(f"{vectors_path}: bad magic {magic!r}")
        if version != VERSION:
            raise FormatError(f"{vectors_path}: unsupported version {version}")
        if dims is not None and file_dims != dims:
            raise FormatError(f"{vectors_path}: dims header {file_dims} != expected {dims}")
        body = raw[_HEADER.size :]
        if len(body) != count * file_dims * 4:
            raise FormatError(f"{vectors_path}: body size does not match count={count}, dims={file_dims}")
        ids = Path(ids_path).read_text(encoding="utf-8").splitlines()
        if len(ids) != count:
            raise FormatError(f"{ids_path}: {len(ids)} ids for {count} vectors")
        index = cls(file_dims)
        matrix = np.frombuffer(body, dtype="<f4").reshape(count, file_dims).astype(np.float32)
        for id_, row in zip(ids, matrix):
            index.add(id_, row)
        return index.freeze()
