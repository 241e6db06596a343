"""Dense Boolean matrices with AND-OR algebra.

Each row is packed into a Python ``int`` whose bit ``c`` holds cell ``(r, c)``,
so row-level OR/AND run word-parallel inside the interpreter.
"""
from __future__ import annotations

from typing import Iterable, Sequence


class BoolMatrix:
    """Rectangular matrix of truth values.

    Zero-dimension matrices are allowed; a matrix with no rows or no columns
    is vacuously all-false.
    """

    __slots__ = ("rows", "cols", "_data")

    def __init__(self, rows: int, cols: int, data: Sequence[int] | None = None):
        if rows < 0 or cols < 0:
            raise ValueError(f"negative matrix shape ({rows}, {cols})")
        self.rows = rows
        self.cols = cols
        if data is None:
            self._data = [0] * rows
        else:
            if len(data) != rows:
                raise ValueError(f"expected {rows} packed rows, got {len(data)}")
            limit = 1 << cols
            for word in data:
                if word < 0 or word >= limit:
                    raise ValueError(f"packed row {word:#x} has bits outside {cols} columns")
            self._data = list(data)

    # construction helpers
    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BoolMatrix":
        return cls(rows, cols)

    @classmethod
    def ones(cls, rows: int, cols: int) -> "BoolMatrix":
        full = (1 << cols) - 1
        return cls(rows, cols, [full] * rows)

    @classmethod
    def identity(cls, n: int) -> "BoolMatrix":
        return cls(n, n, [1 << k for k in range(n)])

    @classmethod
    def diagonal(cls, flags: Sequence[bool]) -> "BoolMatrix":
        n = len(flags)
        return cls(n, n, [(1 << k) if flag else 0 for k, flag in enumerate(flags)])

    @classmethod
    def from_lists(cls, cells: Sequence[Sequence[bool]], cols: int | None = None) -> "BoolMatrix":
        if cols is None:
            cols = len(cells[0]) if cells else 0
        data = []
        for r, row in enumerate(cells):
            if len(row) != cols:
                raise ValueError(f"ragged row {r}: {len(row)} cells, expected {cols}")
            word = 0
            for c, v in enumerate(row):
                if v:
                    word |= 1 << c
            data.append(word)
        return cls(len(cells), cols, data)

    def to_lists(self) -> list[list[bool]]:
        return [[bool((word >> c) & 1) for c in range(self.cols)] for word in self._data]

    def copy(self) -> "BoolMatrix":
        return BoolMatrix(self.rows, self.cols, self._data)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def row_bits(self, r: int) -> int:
        """Packed row ``r``."""
        self._check_row(r)
        return self._data[r]

    def _check_row(self, r: int) -> None:
        if not 0 <= r < self.rows:
            raise IndexError(f"row {r} outside [0, {self.rows})")

    def __getitem__(self, rc: tuple[int, int]) -> bool:
        r, c = rc
        self._check_row(r)
        if not 0 <= c < self.cols:
            raise IndexError(f"column {c} outside [0, {self.cols})")
        return bool((self._data[r] >> c) & 1)

    def __setitem__(self, rc: tuple[int, int], value: bool) -> None:
        r, c = rc
        self._check_row(r)
        if not 0 <= c < self.cols:
            raise IndexError(f"column {c} outside [0, {self.cols})")
        if value:
            self._data[r] |= 1 << c
        else:
            self._data[r] &= ~(1 << c)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BoolMatrix):
            return NotImplemented
        return self.shape == other.shape and self._data == other._data

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, tuple(self._data)))

    def __repr__(self) -> str:
        body = "; ".join("".join("1" if v else "0" for v in row) for row in self.to_lists())
        return f"BoolMatrix({self.rows}x{self.cols}: {body})"

    def count(self) -> int:
        """Number of true cells."""
        return sum(word.bit_count() for word in self._data)

    def true_cells(self) -> Iterable[tuple[int, int]]:
        for r, word in enumerate(self._data):
            while word:
                low = word & -word
                yield r, low.bit_length() - 1
                word ^= low

    def __matmul__(self, other: "BoolMatrix") -> "BoolMatrix":
        return product(self, other)

    def __and__(self, other: "BoolMatrix") -> "BoolMatrix":
        return conjoin(self, other)

    @property
    def T(self) -> "BoolMatrix":
        return transpose(self)

    def iconjoin(self, other: "BoolMatrix") -> int:
        """In-place elementwise AND with ``other``; returns the number of cells flipped."""
        _check_same_shape(self, other)
        flips = 0
        data = self._data
        for r, word in enumerate(other._data):
            old = data[r]
            new = old & word
            if new != old:
                flips += (old ^ new).bit_count()
                data[r] = new
        return flips


def _check_same_shape(a: BoolMatrix, b: BoolMatrix) -> None:
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")


def mul_rows(a_rows: Sequence[int], b_rows: Sequence[int]) -> list[int]:
    """AND-OR product on packed rows: row r of the result ORs ``b_rows[k]`` over set bits k of ``a_rows[r]``."""
    out = []
    for word in a_rows:
        acc = 0
        while word:
            low = word & -word
            acc |= b_rows[low.bit_length() - 1]
            word ^= low
        out.append(acc)
    return out


def product(a: BoolMatrix, b: BoolMatrix) -> BoolMatrix:
    """Boolean product: ``out[i, j] = OR_k a[i, k] AND b[k, j]``."""
    if a.cols != b.rows:
        raise ValueError(f"cannot multiply {a.shape} by {b.shape}: inner dimensions differ")
    return BoolMatrix(a.rows, b.cols, mul_rows(a._data, b._data))


def conjoin(a: BoolMatrix, b: BoolMatrix) -> BoolMatrix:
    _check_same_shape(a, b)
    return BoolMatrix(a.rows, a.cols, [x & y for x, y in zip(a._data, b._data)])


def transpose_rows(rows: Sequence[int], cols: int) -> list[int]:
    out = [0] * cols
    for r, word in enumerate(rows):
        bit = 1 << r
        while word:
            low = word & -word
            out[low.bit_length() - 1] |= bit
            word ^= low
    return out


def transpose(a: BoolMatrix) -> BoolMatrix:
    return BoolMatrix(a.cols, a.rows, transpose_rows(a._data, a.cols))


def is_all_false(a: BoolMatrix) -> bool:
    return not any(a._data)
