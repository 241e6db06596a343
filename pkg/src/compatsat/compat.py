"""Compatibility matrix over the satisfying rows of each equation."""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterator

from .boolmat import BoolMatrix, transpose_rows
from .formula import BooleanSystem, Row, satisfying_rows


@dataclass(frozen=True)
class BoxCoord:
    i: int
    j: int
    alpha: int
    beta: int


def rows_compatible(r1: Row | dict, r2: Row | dict) -> bool:
    """True iff the two partial assignments agree on every shared variable."""
    a = dict(r1)
    return all(a.get(v, val) == val for v, val in dict(r2).items())


class CompatMatrix:
    """m x m grid of boxes; box (i, j) relates rows of equation i to rows of equation j.

    Both orientations are kept and every write goes to the cell and its mirror,
    so box(j, i) is always the transpose of box(i, j).
    """

    def __init__(self, row_tables: list[list[Row]], boxes: list[list[list[int]]], variable_count: int = 0):
        self.row_tables = row_tables
        self.sizes = [len(t) for t in row_tables]
        self._boxes = boxes
        self.variable_count = variable_count

    @property
    def m(self) -> int:
        return len(self.row_tables)

    def box(self, i: int, j: int) -> BoolMatrix:
        return BoolMatrix(self.sizes[i], self.sizes[j], self._boxes[i][j])

    def packed(self, i: int, j: int) -> list[int]:
        """Live packed rows of box (i, j). Do not mutate; use ``set_cell``."""
        return self._boxes[i][j]

    def cell(self, i: int, j: int, alpha: int, beta: int) -> bool:
        return self.box(i, j)[alpha, beta]

    def set_cell(self, i: int, j: int, alpha: int, beta: int, value: bool, mirror: bool = True) -> None:
        """Write one cell; ``mirror=False`` deliberately breaks symmetry (test hook)."""
        self.box(i, j)[alpha, beta]  # bounds check
        bit = 1 << beta
        rows = self._boxes[i][j]
        rows[alpha] = rows[alpha] | bit if value else rows[alpha] & ~bit
        if mirror:
            bit = 1 << alpha
            rows = self._boxes[j][i]
            rows[beta] = rows[beta] | bit if value else rows[beta] & ~bit

    def diagonal_mask(self, i: int) -> int:
        """Bit alpha set iff box(i, i)(alpha, alpha) is true."""
        mask = 0
        for a, word in enumerate(self._boxes[i][i]):
            mask |= word & (1 << a)
        return mask

    def true_count(self) -> int:
        return sum(w.bit_count() for line in self._boxes for box in line for w in box)

    def any_true(self) -> bool:
        return any(any(box) for line in self._boxes for box in line)

    def any_diagonal_true(self) -> bool:
        return any(self.diagonal_mask(i) for i in range(self.m))

    def true_cells(self) -> Iterator[BoxCoord]:
        for i in range(self.m):
            for j in range(self.m):
                for a, b in self.box(i, j).true_cells():
                    yield BoxCoord(i, j, a, b)

    def copy(self) -> "CompatMatrix":
        boxes = [[list(box) for box in line] for line in self._boxes]
        return CompatMatrix(self.row_tables, boxes, self.variable_count)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CompatMatrix):
            return NotImplemented
        return self.sizes == other.sizes and self._boxes == other._boxes

    def snapshot(self) -> dict:
        """Structured dump of box shapes and true-cell coordinates (i <= j only)."""
        boxes = []
        for i in range(self.m):
            for j in range(i, self.m):
                box = self.box(i, j)
                boxes.append({"i": i, "j": j, "shape": list(box.shape),
                              "true": [list(c) for c in box.true_cells()]})
        return {
            "m": self.m,
            "rows": [[[v, val] for v, val in row] for row in _flat_tables(self.row_tables)],
            "sizes": self.sizes,
            "true_count": self.true_count(),
            "boxes": boxes,
        }

    def to_bytes(self) -> bytes:
        """Canonical serialization of the full cell state."""
        return json.dumps(self.snapshot(), sort_keys=True, separators=(",", ":")).encode()

    def census(self) -> dict[str, int]:
        """True-cell count per box (i <= j), keyed ``"i,j"``."""
        return {f"{i},{j}": self.box(i, j).count() for i in range(self.m) for j in range(i, self.m)}


def _flat_tables(tables):
    for table in tables:
        yield from table


def build_compat_matrix(s: BooleanSystem, limit: int | None = None) -> CompatMatrix:
    tables = [satisfying_rows(e, limit) for e in s.equations]
    return compat_from_tables(tables, s.variable_count)


def compat_from_tables(tables: list[list[Row]], variable_count: int = 0) -> CompatMatrix:
    m = len(tables)
    varsets = [set(e_vars for e_vars, _ in t[0]) if t else set() for t in tables]
    boxes: list[list[list[int] | None]] = [[None] * m for _ in range(m)]
    for i in range(m):
        boxes[i][i] = [1 << a for a in range(len(tables[i]))]
        for j in range(i + 1, m):
            shared = sorted(varsets[i] & varsets[j])
            cols = len(tables[j])
            if not shared:
                full = (1 << cols) - 1
                rows = [full] * len(tables[i])
            else:
                by_key: dict[tuple, int] = {}
                for b, row in enumerate(tables[j]):
                    d = dict(row)
                    key = tuple(d[v] for v in shared)
                    by_key[key] = by_key.get(key, 0) | (1 << b)
                rows = []
                for row in tables[i]:
                    d = dict(row)
                    rows.append(by_key.get(tuple(d[v] for v in shared), 0))
            boxes[i][j] = rows
            boxes[j][i] = transpose_rows(rows, cols)
    return CompatMatrix(tables, boxes, variable_count)


def verify_symmetry(t: CompatMatrix) -> bool:
    """box(j, i) is the transpose of box(i, j), and diagonal boxes are diagonal."""
    for i in range(t.m):
        diag = t.packed(i, i)
        if any(word & ~(1 << a) for a, word in enumerate(diag)):
            return False
        for j in range(i + 1, t.m):
            if transpose_rows(t.packed(i, j), t.sizes[j]) != t.packed(j, i):
                return False
    return True
