"""Exact solution space of pairwise additivity on a finite rational grid.

Unknowns are the values H(v) for v in a grid; every adjacent-merge instance
inside the grid gives one linear equation

    H(v) - H(merge_j v) - s**alpha H(conditional pair) = 0.

The kernel of this system over the rationals contains every grid restriction
of a solution. A one-dimensional kernel means the equations alone pin H
down on the grid up to scale; extra dimensions are candidate counterexample
germs. Finite grids cannot exclude unbounded pathological solutions, so the
output is evidence about the alpha = 2 question, never a resolution.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

from .errors import SizeLimit
from .lab import f_map
from .simplex import (
    StochasticVector,
    conditional_pair,
    delta2_vectors,
    format_rational,
    format_vector,
    grid_up_to,
    merge_adjacent,
    pair,
    pair_mass,
    swap,
)
from .values import as_alpha

DEFAULT_GRID_CAP = 20_000


@dataclass
class GridIndex:
    b: int
    L: int
    vectors: list[StochasticVector]
    index: dict[StochasticVector, int]

    def __len__(self):
        return len(self.vectors)

    def id_of(self, v: StochasticVector) -> int | None:
        return self.index.get(v)


def grid_size(b: int, L: int) -> int:
    """Number of length-<=L vectors on the 1/b lattice (before two-point extras)."""
    return sum(comb(b + n - 1, n - 1) for n in range(1, L + 1))


def enumerate_grid(b: int, L: int, cap: int = DEFAULT_GRID_CAP) -> GridIndex:
    if b < 2 or L < 2:
        raise ValueError("enumerate_grid needs b >= 2 and L >= 2")
    if grid_size(b, L) > cap:
        raise SizeLimit(f"grid b={b}, L={L} has {grid_size(b, L)} lattice vectors (cap {cap})")
    vecs = set(grid_up_to(b, L))
    vecs.update(delta2_vectors(b))
    ordered = sorted(vecs, key=StochasticVector.sort_key)
    return GridIndex(b, L, ordered, {v: i for i, v in enumerate(ordered)})


@dataclass
class ConstraintSystem:
    grid: GridIndex
    alpha: int
    rows: list[dict[int, Fraction]]
    provenance: list[tuple[int, int]]
    dropped_instances: int = 0

    @property
    def unknowns(self) -> int:
        return len(self.grid)


def build_constraints(grid: GridIndex, alpha=2) -> ConstraintSystem:
    """One row per (v, j) with v in the grid; rows leaving the grid are dropped and counted."""
    alpha = as_alpha(alpha)
    if not alpha.is_exact_integer:
        raise ValueError("kernel search needs a positive integer alpha")
    a = alpha.integer
    rows, prov, dropped = [], [], 0
    for vid, v in enumerate(grid.vectors):
        for j in range(1, len(v)):
            s = pair_mass(v, j)
            mid = grid.id_of(merge_adjacent(v, j))
            cid = grid.id_of(conditional_pair(v, j)) if s != 0 else None
            if mid is None or (s != 0 and cid is None):
                dropped += 1
                continue
            row: dict[int, Fraction] = {}
            for col, coef in ((vid, Fraction(1)), (mid, Fraction(-1))):
                row[col] = row.get(col, 0) + coef
            if s != 0:
                row[cid] = row.get(cid, 0) - s ** a
            rows.append({k: c for k, c in sorted(row.items()) if c != 0})
            prov.append((vid, j))
    return ConstraintSystem(grid, a, rows, prov, dropped)


def _reduce(row: dict, pivots: dict[int, dict]) -> dict:
    row = dict(row)
    while row:
        lead = min(row)
        piv = pivots.get(lead)
        if piv is None:
            return row
        factor = row[lead]
        for col, c in piv.items():
            nv = row.get(col, 0) - factor * c
            if nv:
                row[col] = nv
            else:
                row.pop(col, None)
    return row


def row_reduce(rows, ncols: int) -> dict[int, dict[int, Fraction]]:
    """Reduced row echelon form as {pivot column: row}, pivot coefficient 1.

    Pivot rule: first nonzero column in the fixed column order.
    """
    pivots: dict[int, dict] = {}
    for r in rows:
        red = _reduce(r, pivots)
        if red:
            lead = min(red)
            inv = 1 / red[lead]
            pivots[lead] = {c: v * inv for c, v in red.items()}
    # back-substitute from the last pivot so every pivot column is cleared elsewhere
    for p in sorted(pivots, reverse=True):
        prow = pivots[p]
        for q in pivots:
            if q < p and p in pivots[q]:
                target = pivots[q]
                factor = target[p]
                for col, c in prow.items():
                    nv = target.get(col, 0) - factor * c
                    if nv:
                        target[col] = nv
                    else:
                        target.pop(col, None)
    return pivots


@dataclass
class KernelReport:
    b: int
    L: int
    alpha: int
    unknowns: int
    constraints: int
    dropped_instances: int
    rank: int
    kernel_dimension: int
    basis: list[list[tuple[int, Fraction]]]
    grid: list[str] = field(default_factory=list)
    closed_form_member: bool | None = None
    closed_form_family_only: bool | None = None
    basis_symmetry_defects: list[dict] = field(default_factory=list)
    orbit_consistent: bool | None = None

    def to_json(self) -> dict:
        return {
            "b": self.b,
            "L": self.L,
            "alpha": self.alpha,
            "unknowns": self.unknowns,
            "constraints": self.constraints,
            "dropped_instances": self.dropped_instances,
            "rank": self.rank,
            "kernel_dimension": self.kernel_dimension,
            "basis": [[[i, format_rational(c)] for i, c in vec] for vec in self.basis],
            "closed_form_member": self.closed_form_member,
            "closed_form_family_only": self.closed_form_family_only,
            "basis_symmetry_defects": self.basis_symmetry_defects,
            "orbit_consistent": self.orbit_consistent,
            "grid": self.grid,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


def solve_kernel(system: ConstraintSystem) -> KernelReport:
    n = system.unknowns
    pivots = row_reduce(system.rows, n)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        vec = {f: Fraction(1)}
        for p, row in pivots.items():
            c = row.get(f)
            if c:
                vec[p] = -c
        basis.append(sorted(vec.items()))
    g = system.grid
    return KernelReport(
        b=g.b, L=g.L, alpha=system.alpha, unknowns=n, constraints=len(system.rows),
        dropped_instances=system.dropped_instances, rank=len(pivots),
        kernel_dimension=len(free), basis=basis, grid=[format_vector(v) for v in g.vectors],
    )


def closed_form_assignment(grid: GridIndex, alpha: int = 2) -> list[Fraction]:
    """H(v) = 1 - sum p_i**alpha on every grid vector (the c-scaled family at c = 1/2 for alpha = 2)."""
    return [1 - sum(p ** alpha for p in v) for v in grid.vectors]


def satisfies(system: ConstraintSystem, values) -> bool:
    return all(sum(c * values[k] for k, c in row.items()) == 0 for row in system.rows)


def _dense(vec, n):
    out = [Fraction(0)] * n
    for i, c in vec:
        out[i] = c
    return out


def _in_span(basis_dense, target) -> bool:
    rows = [{i: c for i, c in enumerate(b) if c} for b in basis_dense]
    pivots = row_reduce(rows, len(target))
    return not _reduce({i: c for i, c in enumerate(target) if c}, pivots)


def analyze_solutions(report: KernelReport, grid: GridIndex, system: ConstraintSystem) -> KernelReport:
    """Closed-form membership, per-basis two-point symmetry defects, orbit cross-check."""
    n = len(grid)
    cf = closed_form_assignment(grid, system.alpha)
    report.closed_form_member = satisfies(system, cf)

    dense = [_dense(vec, n) for vec in report.basis]
    report.closed_form_family_only = (
        report.kernel_dimension == 1 and report.closed_form_member and _in_span(dense, cf)
    )

    upper = [v for v in grid.vectors if len(v) == 2 and v[0] >= Fraction(1, 2)]
    defects = []
    consistent = True
    for k, x in enumerate(dense):
        def D(v):
            return abs(x[grid.index[v]] - x[grid.index[swap(v)]])
        nonzero = []
        max_d = Fraction(0)
        for v in upper:
            d = D(v)
            if d:
                nonzero.append([format_rational(v[0]), format_rational(d)])
                max_d = max(max_d, d)
            # one-step relation D(p) = p**2 D(f(p)) wherever its 3-vector lies in the grid
            p = v[0]
            if _defect_row_present(grid, p):
                if D(v) != p * p * D(pair(f_map(p))):
                    consistent = False
        defects.append({"basis_index": k, "max_defect": format_rational(max_d),
                        "nonzero": nonzero})
    report.basis_symmetry_defects = defects
    report.orbit_consistent = consistent
    return report


def _defect_row_present(grid: GridIndex, p: Fraction) -> bool:
    try:
        three = StochasticVector((1 - p, 2 * p - 1, 1 - p))
    except ValueError:
        return False
    return three in grid.index and pair(f_map(p)) in grid.index


def run_experiment(b: int, L: int, alpha=2, cap: int = DEFAULT_GRID_CAP) -> KernelReport:
    grid = enumerate_grid(b, L, cap)
    system = build_constraints(grid, alpha)
    return analyze_solutions(solve_kernel(system), grid, system)


def projected_dimension(report: KernelReport, grid: GridIndex, vectors) -> int:
    """Dimension of the kernel restricted to the coordinates of ``vectors``.

    For nested grids every constraint of the smaller grid is also emitted for
    the larger one, so this number cannot grow as the grid is refined.
    """
    cols = {grid.index[v]: k for k, v in enumerate(vectors)}
    rows = []
    for vec in report.basis:
        r = {cols[i]: c for i, c in vec if i in cols}
        if r:
            rows.append(r)
    return len(row_reduce(rows, len(cols)))
