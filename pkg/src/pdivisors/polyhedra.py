"""Exact convex geometry: cones, polyhedra and polyhedral complexes in Q^n.

Both representations (generators and halfspaces) are kept in sync on every
object.  Conversion runs the double description method on exact rationals;
canonicalization is by double dualization, so structural equality of the
stored data coincides with equality of the underlying sets.

The empty polyhedron is a first-class value: sums and intersections treat it
as absorbing, images of it are empty.  Infinity never appears here; divisor
coefficients handle it in `base`.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

from .errors import AmbientMismatch, NotConcave
from .linalg import (
    F0,
    F1,
    Vec,
    frac,
    is_zero_vec,
    kernel_basis,
    mat_vec,
    primitive,
    rank,
    row_space_basis,
    rref,
    transpose,
    vadd,
    vdot,
    vec,
    vscale,
    vsub,
    zero_vec,
)

# ---------------------------------------------------------------------------
# double description core
# ---------------------------------------------------------------------------


def _dd_pointed(rows: list[Vec], d: int) -> list[Vec]:
    """Extreme rays of the pointed cone {w in Q^d : <row, w> >= 0 for all rows}.

    Requires rank(rows) == d.  Classic incremental double description with
    the combinatorial adjacency test.
    """
    if d == 0:
        return []
    # greedy lex-first independent subset as the initial simplicial cone
    base_idx: list[int] = []
    cur: list[Vec] = []
    for i, r in enumerate(rows):
        if rank(cur + [r]) > len(cur):
            base_idx.append(i)
            cur.append(r)
        if len(cur) == d:
            break
    if len(cur) < d:
        raise ValueError("cone is not pointed (constraint rank deficient)")
    # rays = columns of the inverse of the base matrix
    aug = [list(cur[i]) + [F1 if j == i else F0 for j in range(d)] for i in range(d)]
    red, _ = rref(aug)
    inv_cols = [tuple(red[i][d + j] for i in range(d)) for j in range(d)]
    rays = [primitive(c) for c in inv_cols]
    processed = list(base_idx)
    tight = []
    for j, r in enumerate(rays):
        tight.append(frozenset(i for i in processed if vdot(rows[i], r) == 0))
    for i, a in enumerate(rows):
        if i in base_idx:
            continue
        vals = [vdot(a, r) for r in rays]
        if all(v >= 0 for v in vals):
            processed.append(i)
            tight = [
                t | {i} if v == 0 else t for t, v in zip(tight, vals)
            ]
            continue
        plus = [j for j, v in enumerate(vals) if v > 0]
        zero = [j for j, v in enumerate(vals) if v == 0]
        minus = [j for j, v in enumerate(vals) if v < 0]
        new_rays: list[Vec] = []
        new_tight: list[frozenset] = []
        seen = set()
        for p, q in itertools.product(plus, minus):
            common = tight[p] & tight[q]
            adjacent = True
            for k in range(len(rays)):
                if k != p and k != q and common <= tight[k]:
                    adjacent = False
                    break
            if not adjacent:
                continue
            r = primitive(vsub(vscale(vals[p], rays[q]), vscale(vals[q], rays[p])))
            if r in seen:
                continue
            seen.add(r)
            new_rays.append(r)
            new_tight.append(frozenset(k for k in processed if vdot(rows[k], r) == 0) | {i})
        processed.append(i)
        rays = [rays[j] for j in plus] + [rays[j] for j in zero] + new_rays
        tight = (
            [tight[j] for j in plus]
            + [tight[j] | {i} for j in zero]
            + new_tight
        )
    return rays


def dd_cone(ineqs, eqs, n: int) -> tuple[list[Vec], list[Vec]]:
    """Extreme rays and lineality basis of {x : eqs.x = 0, ineqs.x >= 0}."""
    ineqs = [vec(a) for a in ineqs if not is_zero_vec(vec(a))]
    eqs = [vec(a) for a in eqs if not is_zero_vec(vec(a))]
    if eqs:
        sbasis = kernel_basis(eqs, n)
    else:
        sbasis = [tuple(F1 if j == i else F0 for j in range(n)) for i in range(n)]
    s = len(sbasis)
    if s == 0:
        return [], []
    aprime = [tuple(vdot(a, bj) for bj in sbasis) for a in ineqs]
    aprime = [r for r in aprime if not is_zero_vec(r)]
    if not aprime:
        return [], sorted(row_space_basis(sbasis))
    lprime = kernel_basis(aprime, s)
    lines = row_space_basis([mix_basis(lv, sbasis) for lv in lprime]) if lprime else []
    rspace = row_space_basis(aprime)
    d = len(rspace)
    a2 = [tuple(vdot(ap, w) for w in rspace) for ap in aprime]
    wrays = _dd_pointed(a2, d)
    rays = []
    for w in wrays:
        zv = mix_basis(w, rspace)
        rays.append(primitive(mix_basis(zv, sbasis)))
    return sorted(set(rays)), sorted(set(lines))


def mix_basis(coords: Vec, basis: list[Vec]) -> Vec:
    out = zero_vec(len(basis[0]))
    for c, b in zip(coords, basis):
        if c != 0:
            out = vadd(out, vscale(c, b))
    return out


def dual_rep(rays, lines, n: int) -> tuple[list[Vec], list[Vec]]:
    """Facet normals and span equations of pos(rays) + span(lines)."""
    return dd_cone(rays, lines, n)


# ---------------------------------------------------------------------------
# cones
# ---------------------------------------------------------------------------


class Cone:
    """Rational polyhedral cone, canonical on both sides."""

    __slots__ = ("n", "rays", "lines", "ineqs", "eqs")

    def __init__(self, n, rays, lines, ineqs, eqs):
        self.n = n
        self.rays = tuple(rays)
        self.lines = tuple(lines)
        self.ineqs = tuple(ineqs)
        self.eqs = tuple(eqs)

    @classmethod
    def from_rays(cls, rays, lines=(), n=None) -> "Cone":
        rays = [vec(r) for r in rays]
        lines = [vec(l) for l in lines]
        if n is None:
            src = rays + lines
            if not src:
                raise ValueError("ambient dimension required for the zero cone")
            n = len(src[0])
        gens = [primitive(r) for r in rays if not is_zero_vec(r)]
        ineqs, eqs = dual_rep(gens, [l for l in lines if not is_zero_vec(l)], n)
        crays, clines = dd_cone(ineqs, eqs, n)
        return cls(n, crays, clines, ineqs, eqs)

    @classmethod
    def from_inequalities(cls, ineqs, eqs=(), n=None) -> "Cone":
        ineqs = [vec(a) for a in ineqs]
        eqs = [vec(a) for a in eqs]
        if n is None:
            src = ineqs + eqs
            if not src:
                raise ValueError("ambient dimension required for the full cone")
            n = len(src[0])
        crays, clines = dd_cone(ineqs, eqs, n)
        cineqs, ceqs = dual_rep(crays, clines, n)
        return cls(n, crays, clines, cineqs, ceqs)

    @classmethod
    def zero(cls, n: int) -> "Cone":
        return cls.from_rays([], [], n)

    @classmethod
    def full(cls, n: int) -> "Cone":
        return cls.from_inequalities([], [], n)

    def __eq__(self, other):
        return (
            isinstance(other, Cone)
            and self.n == other.n
            and self.rays == other.rays
            and self.lines == other.lines
        )

    def __hash__(self):
        return hash((self.n, self.rays, self.lines))

    def __repr__(self):
        return f"Cone(rays={[tuple(map(str, r)) for r in self.rays]}, lines={len(self.lines)})"

    def dual(self) -> "Cone":
        # facets of a canonical cone are the extreme rays of its dual and
        # vice versa, so the stored data swaps sides directly
        return Cone(
            self.n,
            tuple(sorted(self.ineqs)),
            tuple(sorted(self.eqs)),
            tuple(sorted(self.rays)),
            tuple(sorted(self.lines)),
        )

    def contains(self, x) -> bool:
        x = vec(x)
        return all(vdot(a, x) >= 0 for a in self.ineqs) and all(
            vdot(a, x) == 0 for a in self.eqs
        )

    def contains_cone(self, other: "Cone") -> bool:
        return all(self.contains(r) for r in other.rays) and all(
            self.contains(l) and self.contains(vscale(-1, l)) for l in other.lines
        )

    def is_pointed(self) -> bool:
        return not self.lines

    def dim(self) -> int:
        return rank(list(self.rays) + list(self.lines)) if (self.rays or self.lines) else 0

    def is_fulldim(self) -> bool:
        return self.dim() == self.n

    def relint_point(self) -> Vec:
        out = zero_vec(self.n)
        for r in self.rays:
            out = vadd(out, r)
        return out

    def as_polyhedron(self) -> "Polyhedron":
        return Polyhedron.from_generators([zero_vec(self.n)], self.rays, self.lines, self.n)

    def intersect(self, other: "Cone") -> "Cone":
        if self.n != other.n:
            raise AmbientMismatch("cone ambient dimensions differ")
        return Cone.from_inequalities(
            list(self.ineqs) + list(other.ineqs), list(self.eqs) + list(other.eqs), self.n
        )

    def faces(self) -> list["Cone"]:
        """All faces, the cone itself included (via facet intersections)."""
        seen = {self: None}
        frontier = [self]
        while frontier:
            nxt = []
            for c in frontier:
                for a in c.ineqs:
                    f = Cone.from_inequalities(c.ineqs, list(c.eqs) + [a], c.n)
                    if f not in seen:
                        seen[f] = None
                        nxt.append(f)
            frontier = nxt
        return list(seen)

    def map_image(self, rows) -> "Cone":
        rows = [vec(r) for r in rows]
        rays = [mat_vec(rows, r) for r in self.rays]
        lines = [mat_vec(rows, l) for l in self.lines]
        return Cone.from_rays(
            [r for r in rays if not is_zero_vec(r)],
            [l for l in lines if not is_zero_vec(l)],
            len(rows),
        )


def dual_cone(c: Cone) -> Cone:
    return c.dual()


# ---------------------------------------------------------------------------
# polyhedra
# ---------------------------------------------------------------------------


class Polyhedron:
    """Rational polyhedron with synchronized V- and H-representations.

    `vertices` are the canonical minimal-face representatives (orthogonal to
    the lineality space), `rays` the extreme ray directions modulo lineality,
    `lines` a canonical lineality basis.  H-side: `ineqs` are (a, b) pairs
    meaning <a, x> >= b, `eqs` the same with equality.
    """

    __slots__ = ("n", "empty", "vertices", "rays", "lines", "ineqs", "eqs")

    def __init__(self, n, empty, vertices, rays, lines, ineqs, eqs):
        self.n = n
        self.empty = empty
        self.vertices = tuple(vertices)
        self.rays = tuple(rays)
        self.lines = tuple(lines)
        self.ineqs = tuple(ineqs)
        self.eqs = tuple(eqs)

    # -- construction --------------------------------------------------

    @classmethod
    def empty_polyhedron(cls, n: int) -> "Polyhedron":
        return cls(n, True, (), (), (), (), ())

    @classmethod
    def from_generators(cls, vertices, rays=(), lines=(), n=None) -> "Polyhedron":
        vertices = [vec(v) for v in vertices]
        rays = [vec(r) for r in rays]
        lines = [vec(l) for l in lines]
        if n is None:
            src = vertices + rays + lines
            if not src:
                raise ValueError("ambient dimension required for empty input")
            n = len(src[0])
        if not vertices:
            return cls.empty_polyhedron(n)
        hom_rays = [v + (F1,) for v in vertices] + [
            r + (F0,) for r in rays if not is_zero_vec(r)
        ]
        hom_lines = [l + (F0,) for l in lines if not is_zero_vec(l)]
        hc = Cone.from_rays(hom_rays, hom_lines, n + 1)
        return cls._from_hom_cone(hc, n)

    @classmethod
    def from_H(cls, ineqs, eqs=(), n=None) -> "Polyhedron":
        """ineqs/eqs are (a, b) pairs encoding <a, x> >= b resp. == b."""
        ineqs = [(vec(a), frac(b)) for a, b in ineqs]
        eqs = [(vec(a), frac(b)) for a, b in eqs]
        if n is None:
            src = ineqs + eqs
            if not src:
                raise ValueError("ambient dimension required for the full space")
            n = len(src[0][0])
        hom_ineqs = [a + (-b,) for a, b in ineqs]
        hom_ineqs.append(zero_vec(n) + (F1,))
        hom_eqs = [a + (-b,) for a, b in eqs]
        hc = Cone.from_inequalities(hom_ineqs, hom_eqs, n + 1)
        return cls._from_hom_cone(hc, n)

    @classmethod
    def _from_hom_cone(cls, hc: Cone, n: int) -> "Polyhedron":
        verts = []
        rays = []
        for r in hc.rays:
            t = r[n]
            if t > 0:
                verts.append(tuple(x / t for x in r[:n]))
            else:
                rays.append(primitive(r[:n]))
        if not verts:
            return cls.empty_polyhedron(n)
        lines = sorted(row_space_basis([l[:n] for l in hc.lines])) if hc.lines else []
        ineqs = []
        eqs = []
        for a in hc.ineqs:
            head, c = a[:n], a[n]
            if is_zero_vec(head):
                continue
            ineqs.append((head, -c))
        for a in hc.eqs:
            head, c = a[:n], a[n]
            if is_zero_vec(head):
                continue
            eqs.append((head, -c))
        return cls(
            n,
            False,
            sorted(verts),
            sorted(rays),
            sorted(lines),
            sorted(ineqs),
            sorted(eqs),
        )

    @classmethod
    def point(cls, p) -> "Polyhedron":
        p = vec(p)
        return cls.from_generators([p], n=len(p))

    # -- basics ---------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, Polyhedron):
            return NotImplemented
        if self.n != other.n:
            return False
        if self.empty or other.empty:
            return self.empty and other.empty
        return (
            self.vertices == other.vertices
            and self.rays == other.rays
            and self.lines == other.lines
        )

    def __hash__(self):
        return hash((self.n, self.empty, self.vertices, self.rays, self.lines))

    def __repr__(self):
        if self.empty:
            return f"Polyhedron.empty({self.n})"
        def fmt(v):
            return "(" + ",".join(str(x) for x in v) + ")"
        s = "conv{" + ", ".join(fmt(v) for v in self.vertices) + "}"
        if self.rays:
            s += " + pos{" + ", ".join(fmt(r) for r in self.rays) + "}"
        if self.lines:
            s += " + span{" + ", ".join(fmt(l) for l in self.lines) + "}"
        return s

    def is_empty(self) -> bool:
        return self.empty

    def dim(self) -> int:
        if self.empty:
            return -1
        v0 = self.vertices[0]
        gens = [vsub(v, v0) for v in self.vertices[1:]] + list(self.rays) + list(self.lines)
        return rank(gens) if gens else 0

    def tail(self) -> Cone:
        if self.empty:
            raise ValueError("tailcone of the empty polyhedron is undefined")
        if not self.rays and not self.lines:
            return Cone.zero(self.n)
        return Cone.from_rays(self.rays, self.lines, self.n)

    def is_pointed(self) -> bool:
        return not self.lines

    def is_bounded(self) -> bool:
        return not self.empty and not self.rays and not self.lines

    def contains_point(self, x) -> bool:
        if self.empty:
            return False
        x = vec(x)
        return all(vdot(a, x) >= b for a, b in self.ineqs) and all(
            vdot(a, x) == b for a, b in self.eqs
        )

    def contains(self, other: "Polyhedron") -> bool:
        if other.empty:
            return True
        if self.empty:
            return False
        for v in other.vertices:
            if not self.contains_point(v):
                return False
        for r in other.rays:
            if any(vdot(a, r) < 0 for a, _ in self.ineqs) or any(
                vdot(a, r) != 0 for a, _ in self.eqs
            ):
                return False
        for l in other.lines:
            if any(vdot(a, l) != 0 for a, _ in self.ineqs) or any(
                vdot(a, l) != 0 for a, _ in self.eqs
            ):
                return False
        return True

    def relint_point(self) -> Vec:
        if self.empty:
            raise ValueError("empty polyhedron has no relative interior")
        acc = zero_vec(self.n)
        for v in self.vertices:
            acc = vadd(acc, v)
        acc = vscale(Fraction(1, len(self.vertices)), acc)
        for r in self.rays:
            acc = vadd(acc, r)
        return acc

    # -- calculus --------------------------------------------------------

    def intersect(self, other: "Polyhedron") -> "Polyhedron":
        if self.n != other.n:
            raise AmbientMismatch("polyhedra live in different ambient spaces")
        if self.empty or other.empty:
            return Polyhedron.empty_polyhedron(self.n)
        return Polyhedron.from_H(
            list(self.ineqs) + list(other.ineqs),
            list(self.eqs) + list(other.eqs),
            self.n,
        )

    def minkowski(self, other: "Polyhedron") -> "Polyhedron":
        if self.n != other.n:
            raise AmbientMismatch("polyhedra live in different ambient spaces")
        if self.empty or other.empty:
            return Polyhedron.empty_polyhedron(self.n)
        verts = [vadd(v, w) for v in self.vertices for w in other.vertices]
        rays = list(self.rays) + list(other.rays)
        lines = list(self.lines) + list(other.lines)
        return Polyhedron.from_generators(verts, rays, lines, self.n)

    def translate(self, w) -> "Polyhedron":
        if self.empty:
            return self
        w = vec(w)
        return Polyhedron.from_generators(
            [vadd(v, w) for v in self.vertices], self.rays, self.lines, self.n
        )

    def scale(self, s) -> "Polyhedron":
        """s*P for s > 0; for s = 0 the tail polyhedron (the limit)."""
        if self.empty:
            return self
        s = frac(s)
        if s < 0:
            raise ValueError("only nonnegative scaling is defined here")
        if s == 0:
            return Polyhedron.from_generators([zero_vec(self.n)], self.rays, self.lines, self.n)
        return Polyhedron.from_generators(
            [vscale(s, v) for v in self.vertices], self.rays, self.lines, self.n
        )

    def map_image(self, rows, shift=None) -> "Polyhedron":
        """Image under x -> A x (+ shift)."""
        rows = [vec(r) for r in rows]
        m = len(rows)
        if self.empty:
            return Polyhedron.empty_polyhedron(m)
        shift = vec(shift) if shift is not None else zero_vec(m)
        verts = [vadd(mat_vec(rows, v), shift) for v in self.vertices]
        rays = [mat_vec(rows, r) for r in self.rays]
        lines = [mat_vec(rows, l) for l in self.lines]
        return Polyhedron.from_generators(
            verts,
            [r for r in rays if not is_zero_vec(r)],
            [l for l in lines if not is_zero_vec(l)],
            m,
        )

    def preimage(self, rows, source_dim: int) -> "Polyhedron":
        """Preimage under x -> A x (A has len(rows) = self.n rows)."""
        rows = [vec(r) for r in rows]
        if self.empty:
            return Polyhedron.empty_polyhedron(source_dim)
        cols = transpose(rows)
        ineqs = [(mat_vec(cols, a), b) for a, b in self.ineqs]
        eqs = [(mat_vec(cols, a), b) for a, b in self.eqs]
        ineqs = [(a, b) for a, b in ineqs if not (is_zero_vec(a) and b <= 0)]
        for a, b in list(eqs):
            if is_zero_vec(a) and b != 0:
                return Polyhedron.empty_polyhedron(source_dim)
        for a, b in list(ineqs):
            if is_zero_vec(a) and b > 0:
                return Polyhedron.empty_polyhedron(source_dim)
        eqs = [(a, b) for a, b in eqs if not is_zero_vec(a)]
        return Polyhedron.from_H(ineqs, eqs, source_dim)

    def slice_at(self, functional, value) -> "Polyhedron":
        """Intersection with the hyperplane <functional, x> = value."""
        if self.empty:
            return self
        return Polyhedron.from_H(
            self.ineqs, list(self.eqs) + [(vec(functional), frac(value))], self.n
        )

    def with_equalities(self, tight_ineqs) -> "Polyhedron":
        if self.empty:
            return self
        return Polyhedron.from_H(self.ineqs, list(self.eqs) + list(tight_ineqs), self.n)

    # -- faces -----------------------------------------------------------

    def is_face_of(self, other: "Polyhedron") -> bool:
        if self.empty:
            return True
        if not other.contains(self):
            return False
        tight = [
            (a, b)
            for a, b in other.ineqs
            if all(vdot(a, v) == b for v in self.vertices)
            and all(vdot(a, r) == 0 for r in self.rays)
            and all(vdot(a, l) == 0 for l in self.lines)
        ]
        return other.with_equalities(tight) == self

    def faces(self) -> list["Polyhedron"]:
        """All nonempty faces, the polyhedron itself included."""
        if self.empty:
            return []
        seen = {self: None}
        frontier = [self]
        while frontier:
            nxt = []
            for c in frontier:
                for a, b in c.ineqs:
                    f = c.with_equalities([(a, b)])
                    if not f.empty and f not in seen:
                        seen[f] = None
                        nxt.append(f)
            frontier = nxt
        return list(seen)

    # -- lattice points ----------------------------------------------------

    def lattice_points(self) -> list[Vec]:
        """All integer points; requires boundedness."""
        if self.empty:
            return []
        if self.rays or self.lines:
            raise ValueError("lattice point enumeration needs a bounded polyhedron")
        bounds = []
        for i in range(self.n):
            vals = [v[i] for v in self.vertices]
            bounds.append((min(vals), max(vals)))
        ranges = [range(math.ceil(lo), math.floor(hi) + 1) for lo, hi in bounds]
        out = []
        for pt in itertools.product(*ranges):
            fp = vec(pt)
            if self.contains_point(fp):
                out.append(fp)
        return sorted(out)

    def lattice_window(self, ray_steps: int = 1) -> list[Vec]:
        """Lattice points of conv(vertices) + ray_steps * (unit ray zonotope).

        For bounded polyhedra this is just `lattice_points`.  The window is a
        canonical finite probe set for searches over unbounded domains.
        """
        if self.empty:
            return []
        box = Polyhedron.from_generators(self.vertices, n=self.n)
        for g in list(self.rays) + [l for l in self.lines] + [vscale(-1, l) for l in self.lines]:
            seg = Polyhedron.from_generators([zero_vec(self.n), vscale(ray_steps, g)], n=self.n)
            box = box.minkowski(seg)
        pts = box.lattice_points()
        return [p for p in pts if self.contains_point(p)]


# ---------------------------------------------------------------------------
# operations of the module surface
# ---------------------------------------------------------------------------


def hull(vertices, rays=(), n=None) -> Polyhedron:
    return Polyhedron.from_generators(vertices, rays, (), n)


def minkowski_sum(a: Polyhedron, b: Polyhedron) -> Polyhedron:
    return a.minkowski(b)


def intersect(a: Polyhedron, b: Polyhedron) -> Polyhedron:
    return a.intersect(b)


def map_image(p: Polyhedron, rows, shift=None) -> Polyhedron:
    return p.map_image(rows, shift)


def map_fiber_slice(p: Polyhedron, rows, target_point, retraction_rows) -> Polyhedron:
    """retraction image of p intersected with the fiber {x : A x = target}."""
    if p.empty:
        return Polyhedron.empty_polyhedron(len(retraction_rows))
    rows = [vec(r) for r in rows]
    target_point = vec(target_point)
    eqs = [(a, t) for a, t in zip(rows, target_point)]
    fiber = Polyhedron.from_H(p.ineqs, list(p.eqs) + eqs, p.n)
    return fiber.map_image(retraction_rows)


def cross_section(c: Cone, functional, value, chart_rows=None) -> Polyhedron:
    """c intersected with the affine hyperplane <functional, x> = value."""
    p = c.as_polyhedron().slice_at(functional, value)
    if chart_rows is not None:
        return p.map_image(chart_rows)
    return p


class PolyhedralComplex:
    """Finite polyhedral complex, stored by its maximal cells."""

    def __init__(self, cells, validate: bool = False):
        cells = [c for c in cells if not c.empty]
        # drop cells contained in another cell
        keep = []
        for c in cells:
            if any(d is not c and d.contains(c) and d != c for d in cells):
                continue
            keep.append(c)
        uniq = sorted(set(keep), key=_cell_key)
        self.cells = tuple(uniq)
        if validate:
            self.validate()

    def __eq__(self, other):
        return isinstance(other, PolyhedralComplex) and self.cells == other.cells

    def __hash__(self):
        return hash(self.cells)

    def __repr__(self):
        return f"PolyhedralComplex({len(self.cells)} maximal cells)"

    def __iter__(self):
        return iter(self.cells)

    def n(self) -> int:
        return self.cells[0].n if self.cells else 0

    def validate(self):
        for a, b in itertools.combinations(self.cells, 2):
            i = a.intersect(b)
            if i.empty:
                continue
            if not (i.is_face_of(a) and i.is_face_of(b)):
                raise ValueError(
                    f"cells intersect in a non-face: {a!r} vs {b!r}"
                )

    def all_faces(self) -> list[Polyhedron]:
        seen = {}
        for c in self.cells:
            for f in c.faces():
                seen[f] = None
        return list(seen)

    def vertices(self) -> list[Vec]:
        out = {}
        for c in self.cells:
            if c.lines:
                continue
            for v in c.vertices:
                out[v] = None
        return sorted(out)

    def rays(self) -> list[Vec]:
        out = {}
        for c in self.cells:
            t = c.tail()
            for r in t.rays:
                out[r] = None
        return sorted(out)

    def support_contains(self, x) -> bool:
        return any(c.contains_point(x) for c in self.cells)

    def locate(self, x) -> Polyhedron | None:
        for c in self.cells:
            if c.contains_point(x):
                return c
        return None


def _cell_key(c: Polyhedron):
    return (c.vertices, c.rays, c.lines)


def common_refinement(complexes) -> PolyhedralComplex:
    """Cells are the nonempty intersections, one maximal cell per complex."""
    complexes = list(complexes)
    if not complexes:
        return PolyhedralComplex([])
    cells = list(complexes[0].cells)
    for other in complexes[1:]:
        cells = [
            a.intersect(b) for a in cells for b in other.cells
        ]
        cells = [c for c in cells if not c.empty]
    return PolyhedralComplex(cells)


def chamber_complex(pieces) -> PolyhedralComplex:
    """Chamber complex of a projected-face family.

    `pieces` must be the images of all faces of a polyhedron under a fixed
    linear map (or a union of such families with common support).  For such
    families every chamber equals the intersection of the members containing
    it, so the intersection closure filtered by a relative-interior
    membership test yields exactly the chamber cells.
    """
    family = sorted({p for p in pieces if not p.empty}, key=_cell_key)
    if not family:
        return PolyhedralComplex([])
    closure = dict.fromkeys(family)
    frontier = list(family)
    while frontier:
        nxt = []
        for c in frontier:
            for f in family:
                i = c.intersect(f)
                if not i.empty and i not in closure:
                    closure[i] = None
                    nxt.append(i)
        frontier = nxt
    cells = []
    for c in closure:
        rp = c.relint_point()
        ok = True
        for f in family:
            if f.contains_point(rp) and not f.contains(c):
                ok = False
                break
        if ok:
            cells.append(c)
    return PolyhedralComplex(cells)


def linearity_regions(pieces, domain: Polyhedron) -> PolyhedralComplex:
    """Subdivision of `domain` by the argmin regions of min-of-affine pieces.

    `pieces` is a list of (a, c) with the function x -> <a, x> + c; the cells
    are the maximal regions where one piece attains the minimum.
    """
    if domain.empty:
        return PolyhedralComplex([])
    pieces = [(vec(a), frac(c)) for a, c in pieces]
    if not pieces:
        raise NotConcave("no affine pieces supplied")
    uniq = sorted(set(pieces))
    ddim = domain.dim()
    regions = []
    for i, (ai, ci) in enumerate(uniq):
        ineqs = [
            (vsub(aj, ai), ci - cj)
            for j, (aj, cj) in enumerate(uniq)
            if j != i
        ]
        reg = Polyhedron.from_H(list(domain.ineqs) + ineqs, domain.eqs, domain.n)
        if not reg.empty and reg.dim() == ddim:
            regions.append(reg)
    return PolyhedralComplex(regions)
