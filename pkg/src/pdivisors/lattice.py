"""Free abelian groups, dual pairs, integer maps and their splittings.

A lattice is just a rank with a name; vectors are tuples of Fraction.  The
interesting content is `smith_split`, which splits a surjection of lattices
into a section, a compatible cosection and a kernel basis, canonicalized so
that repeated runs (and hand-written tests) see identical matrices.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm

from .errors import NotSurjective, ZeroVector
from .linalg import (
    Vec,
    frac,
    identity,
    mat,
    mat_mul,
    mat_vec,
    primitive,
    smith_normal_form,
    transpose,
    vec,
)


@dataclass(frozen=True)
class Lattice:
    rank: int
    name: str = "N"

    def __post_init__(self):
        if self.rank < 0:
            raise ValueError("lattice rank must be >= 0")

    def dual(self) -> "Lattice":
        if self.name.endswith("*"):
            return Lattice(self.rank, self.name[:-1])
        return Lattice(self.rank, self.name + "*")

    def zero(self) -> Vec:
        return (Fraction(0),) * self.rank


class LatticeMap:
    """Integer-matrix map between lattices; rows = target, columns = source."""

    def __init__(self, source: Lattice, target: Lattice, matrix):
        self.source = source
        self.target = target
        self.matrix = mat(matrix) if matrix else ()
        if len(self.matrix) != target.rank:
            raise ValueError("matrix row count must equal target rank")
        for row in self.matrix:
            if len(row) != source.rank:
                raise ValueError("matrix column count must equal source rank")
            for x in row:
                if frac(x).denominator != 1:
                    raise ValueError("lattice maps must have integer entries")

    def __call__(self, v: Vec) -> Vec:
        return mat_vec(self.matrix, vec(v))

    def __eq__(self, other):
        return (
            isinstance(other, LatticeMap)
            and self.source.rank == other.source.rank
            and self.target.rank == other.target.rank
            and self.matrix == other.matrix
        )

    def __hash__(self):
        return hash((self.source.rank, self.target.rank, self.matrix))

    def __repr__(self):
        rows = "; ".join(" ".join(str(x) for x in row) for row in self.matrix)
        return f"LatticeMap({self.source.name}->{self.target.name}: [{rows}])"

    def compose(self, other: "LatticeMap") -> "LatticeMap":
        """self after other."""
        if other.target.rank != self.source.rank:
            raise ValueError("composition rank mismatch")
        return LatticeMap(other.source, self.target, mat_mul(self.matrix, other.matrix))

    def dual_map(self) -> "LatticeMap":
        return LatticeMap(self.target.dual(), self.source.dual(), transpose(self.matrix))

    @staticmethod
    def identity_on(lat: Lattice) -> "LatticeMap":
        return LatticeMap(lat, lat, identity(lat.rank))

    def int_rows(self):
        return [[int(x) for x in row] for row in self.matrix]

    def is_surjective(self) -> bool:
        _, d, _ = smith_normal_form(self.int_rows()) if self.matrix else (None, [], None)
        k = self.target.rank
        diag = [d[i][i] for i in range(min(len(d), len(d[0]) if d else 0))] if d else []
        nonzero = [x for x in diag if x != 0]
        return len(nonzero) == k and all(abs(x) == 1 for x in nonzero)


def multiplicity(v) -> int:
    """Smallest positive integer m with m*v integral (1 for the zero vector)."""
    denoms = [frac(x).denominator for x in v]
    return lcm(*denoms) if denoms else 1


def primitive_and_multiplicity(v) -> tuple[Vec, int]:
    """Primitive integer direction of v together with its multiplicity.

    Raises ZeroVector when a direction is requested of v = 0.
    """
    v = vec(v)
    if all(x == 0 for x in v):
        raise ZeroVector("zero vector has no primitive direction")
    return primitive(v), multiplicity(v)


def _hnf_columns(cols: list[list[int]]) -> list[list[int]]:
    """Column Hermite normal form (lower-triangular style), as column list."""
    cols = [list(c) for c in cols]
    if not cols:
        return []
    m = len(cols[0])
    j = 0
    for i in range(m):
        piv = next((k for k in range(j, len(cols)) if cols[k][i] != 0), None)
        if piv is None:
            continue
        cols[j], cols[piv] = cols[piv], cols[j]
        # clear row i on the right of the pivot column via gcd steps
        for k in range(j + 1, len(cols)):
            while cols[k][i] != 0:
                q = cols[j][i] // cols[k][i]
                cols[j] = [a - q * b for a, b in zip(cols[j], cols[k])]
                cols[j], cols[k] = cols[k], cols[j]
        if cols[j][i] < 0:
            cols[j] = [-a for a in cols[j]]
        for k in range(j):
            q = cols[k][i] // cols[j][i]
            if q:
                cols[k] = [a - q * b for a, b in zip(cols[k], cols[j])]
        j += 1
    return [c for c in cols if any(c)]


def _reduce_mod_columns(col: list[int], hnf_cols: list[list[int]]) -> list[int]:
    """Canonical representative of col modulo the column lattice (HNF input)."""
    col = list(col)
    for h in hnf_cols:
        i = next(k for k in range(len(h)) if h[k] != 0)
        q = col[i] // h[i]
        if q:
            col = [a - q * b for a, b in zip(col, h)]
    return col


def smith_split(pr: LatticeMap, *, canonical: bool = True, pivot_order=None):
    """Split a surjection pr: M -> Mbar of lattices.

    Returns (s_star, t, kernel) where s_star is a section (pr . s_star = id),
    kernel is a LatticeMap embedding ker(pr) (columns form a basis), and t is
    the cosection M -> ker-coordinates with t . kernel = id and
    kernel . t + s_star . pr = id, so M = ker + s_star(Mbar) exactly.

    With canonical=True the section is reduced modulo the kernel columnwise
    (fixed column-echelon procedure), making the result independent of pivot
    choices; pivot_order only matters with canonical=False.
    """
    a = pr.int_rows()
    mbar, m = pr.target.rank, pr.source.rank
    if mbar == 0:
        kern = LatticeMap(pr.source, pr.source, identity(m))
        t = LatticeMap(pr.source, pr.source, identity(m))
        s_star = LatticeMap(pr.target, pr.source, [[] for _ in range(m)])
        return s_star, t, kern
    u, d, v = smith_normal_form(a, col_order=pivot_order)
    diag = [d[i][i] for i in range(min(mbar, m))]
    if len([x for x in diag if x != 0]) < mbar or any(abs(x) != 1 for x in diag if x != 0):
        raise NotSurjective(f"invariant factors {diag} are not all unit")
    # normalize signs so that D = [I | 0]
    for i in range(mbar):
        if d[i][i] == -1:
            for r in range(m):
                v[r][i] = -v[r][i]
    # section: columns 0..mbar-1 of V * U ; kernel: columns mbar.. of V
    vmat = mat(v)
    umat = mat(u)
    sec_cols = [[int(vmat[r][i]) for r in range(m)] for i in range(mbar)]
    s_mat = mat_mul(mat([[c[r] for c in sec_cols] for r in range(m)]), umat)
    ker_cols = [[int(vmat[r][i]) for r in range(m)] for i in range(mbar, m)]
    # the kernel basis is always canonical (column HNF), so Cl-style
    # coordinates agree across pivot choices; only the section varies
    ker_cols = _hnf_columns(ker_cols)
    if canonical:
        s_cols = [[int(s_mat[r][i]) for r in range(m)] for i in range(mbar)]
        s_cols = [_reduce_mod_columns(c, ker_cols) for c in s_cols]
        s_mat = mat([[s_cols[j][r] for j in range(mbar)] for r in range(m)])
    kern_rank = m - mbar
    ker_lat = Lattice(kern_rank, pr.source.name + "'")
    kern = LatticeMap(ker_lat, pr.source, [[ker_cols[j][r] for j in range(kern_rank)] for r in range(m)])
    s_star = LatticeMap(pr.target, pr.source, s_mat)
    # cosection t with kernel . t = id - s_star . pr  (exact integer solve)
    idm = identity(m)
    sp = mat_mul(s_mat, pr.matrix)
    target_mat = [[idm[r][c2] - sp[r][c2] for c2 in range(m)] for r in range(m)]
    kcolmat = [[frac(ker_cols[j][r]) for j in range(kern_rank)] for r in range(m)]
    from .linalg import solve as lin_solve

    t_cols = []
    for c2 in range(m):
        col = [target_mat[r][c2] for r in range(m)]
        sol = lin_solve(kcolmat, col) if kern_rank else ()
        if sol is None or any(frac(x).denominator != 1 for x in sol):
            raise NotSurjective("kernel basis does not span id - s*pr (internal)")
        t_cols.append([int(x) for x in sol])
    t = LatticeMap(pr.source, ker_lat, [[t_cols[c2][r] for c2 in range(m)] for r in range(kern_rank)])
    return s_star, t, kern
