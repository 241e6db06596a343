"""Solution grids: one surviving row per equation, pairwise compatible.

The depleted matrix is used only to prune; the backtracking search itself is
complete, so verdicts never depend on depletion reaching grid cells only.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .compat import CompatMatrix


class Status(str, enum.Enum):
    SAT = "SAT"
    UNSAT = "UNSAT"
    CLAIM_VIOLATED = "CLAIM_VIOLATED"


@dataclass(frozen=True)
class SolutionGrid:
    gamma: tuple[int, ...]

    def __len__(self):
        return len(self.gamma)

    def holds_on(self, t: CompatMatrix) -> bool:
        """Direct check of every one of the m*m grid cells."""
        g = self.gamma
        if len(g) != t.m:
            return False
        for i in range(t.m):
            if not 0 <= g[i] < t.sizes[i]:
                return False
            for j in range(t.m):
                if not (t.packed(i, j)[g[i]] >> g[j]) & 1:
                    return False
        return True


@dataclass
class Witness:
    assignment: dict[int, bool]
    free_variables: list[int]

    def v_lines(self, width: int = 10) -> list[str]:
        lits = [v if val else -v for v, val in sorted(self.assignment.items())]
        lines = []
        for start in range(0, len(lits), width):
            lines.append("v " + " ".join(str(x) for x in lits[start:start + width]))
        if lines:
            lines[-1] += " 0"
        else:
            lines.append("v 0")
        return lines


@dataclass
class Verdict:
    status: Status
    witness: Optional[Witness] = None
    grid: Optional[SolutionGrid] = None
    any_true: bool = False
    diagonal_true: bool = False
    backtracks: int = 0
    evidence: dict = field(default_factory=dict)

    @property
    def satisfiable(self) -> Optional[bool]:
        if self.status is Status.CLAIM_VIOLATED:
            return None
        return self.status is Status.SAT

    @property
    def tests_agree(self) -> bool:
        """Diagonal-only test and any-true test give the same answer."""
        return self.any_true == self.diagonal_true


class _Search:
    def __init__(self, t: CompatMatrix):
        self.t = t
        self.backtracks = 0
        self.domains = [t.diagonal_mask(i) for i in range(t.m)]
        self.order = sorted(range(t.m), key=lambda i: (self.domains[i].bit_count(), i))

    def run(self) -> Iterator[tuple[int, ...]]:
        m = self.t.m
        if m == 0:
            yield ()
            return
        if any(d == 0 for d in self.domains):
            return
        gamma = [-1] * m
        yield from self._extend(0, self.domains, gamma)

    def _extend(self, depth, domains, gamma):
        t, order = self.t, self.order
        i = order[depth]
        if depth == len(order) - 1:
            word = domains[i]
            while word:
                low = word & -word
                gamma[i] = low.bit_length() - 1
                yield tuple(gamma)
                word ^= low
            return
        rest = order[depth + 1:]
        word = domains[i]
        found = False
        while word:
            low = word & -word
            a = low.bit_length() - 1
            word ^= low
            boxes = t._boxes[i]
            narrowed = list(domains)
            dead = False
            for k in rest:
                narrowed[k] &= boxes[k][a]
                if not narrowed[k]:
                    dead = True
                    break
            if dead:
                self.backtracks += 1
                continue
            gamma[i] = a
            for g in self._extend(depth + 1, narrowed, gamma):
                found = True
                yield g
        gamma[i] = -1
        if not found:
            self.backtracks += 1


def find_grid(t: CompatMatrix) -> Optional[SolutionGrid]:
    grid, _ = find_grid_counted(t)
    return grid


def find_grid_counted(t: CompatMatrix) -> tuple[Optional[SolutionGrid], int]:
    """Like ``find_grid`` but also returns the number of dead ends hit."""
    search = _Search(t)
    for g in search.run():
        return SolutionGrid(g), search.backtracks
    return None, search.backtracks


@dataclass
class GridEnumeration:
    grids: list[SolutionGrid]
    truncated: bool

    @property
    def count(self) -> int:
        return len(self.grids)


def enumerate_grids(t: CompatMatrix, cap: int = 100_000) -> GridEnumeration:
    grids = []
    for g in _Search(t).run():
        if len(grids) >= cap:
            return GridEnumeration(grids, truncated=True)
        grids.append(SolutionGrid(g))
    return GridEnumeration(grids, truncated=False)


def glue(grid: SolutionGrid, t: CompatMatrix) -> Witness:
    """Union of the chosen partial assignments; unused variables default to false."""
    if len(grid.gamma) != t.m:
        raise ValueError(f"grid has {len(grid.gamma)} entries for {t.m} equations")
    assignment: dict[int, bool] = {}
    for i, a in enumerate(grid.gamma):
        for var, val in t.row_tables[i][a]:
            if assignment.setdefault(var, val) != val:
                raise ValueError(f"grid is corrupt: x{var} gets both values (equation {i}, row {a})")
    top = max([t.variable_count, *assignment.keys()], default=0)
    free = [v for v in range(1, top + 1) if v not in assignment]
    for v in free:
        assignment[v] = False
    return Witness(dict(sorted(assignment.items())), free)


def decide(t: CompatMatrix) -> Verdict:
    """Classify a depleted matrix as UNSAT, SAT with a glued witness, or CLAIM_VIOLATED.

    CLAIM_VIOLATED means true cells survived depletion but no grid extends
    them, i.e. depletion alone did not settle the instance.
    """
    any_true = t.any_true()
    diagonal_true = t.any_diagonal_true()
    if not any_true:
        return Verdict(Status.UNSAT, any_true=False, diagonal_true=diagonal_true)
    grid, backtracks = find_grid_counted(t)
    if grid is not None:
        return Verdict(Status.SAT, witness=glue(grid, t), grid=grid, any_true=True,
                       diagonal_true=diagonal_true, backtracks=backtracks)
    evidence = {
        "true_count": t.true_count(),
        "surviving_rows": [t.diagonal_mask(i).bit_count() for i in range(t.m)],
        "census": {k: v for k, v in t.census().items() if v},
    }
    return Verdict(Status.CLAIM_VIOLATED, any_true=True, diagonal_true=diagonal_true,
                   backtracks=backtracks, evidence=evidence)


def induced_grid(t: CompatMatrix, assignment: dict[int, bool]) -> SolutionGrid:
    """Grid picked out by a total assignment: each equation's row is its restriction."""
    gamma = []
    for i, table in enumerate(t.row_tables):
        for a, row in enumerate(table):
            if all(assignment[v] == val for v, val in row):
                gamma.append(a)
                break
        else:
            raise ValueError(f"assignment falsifies equation {i}")
    return SolutionGrid(tuple(gamma))
