"""Divisorial fans, invariant divisors, and the section machinery.

An invariant divisor on the variety of a contraction-free divisorial fan is
a coefficient vector indexed by tail rays and slice vertices.  It induces a
weight polyhedron (from the ray inequalities) and, per prime, a concave
piecewise-affine function (min over the vertex pieces); graded sections,
base-point-freeness and sharpness all run through that data.

Vertex coefficients are stored unweighted: the Weil coefficient of the
vertical prime at (P, v) is mu(v) * b_{P,v}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .base import (
    INF,
    BaseVariety,
    CurveFunction,
    QDivisor,
    SectionSpace,
    global_sections as base_global_sections,
    is_inf,
    order_along,
    point_label,
)
from .errors import (
    NotContractionFree,
    NotQCartier,
    UnsupportedBase,
    WeightOutsideBox,
)
from .linalg import Vec, frac, solve, vdot, vec, vsub, zero_vec
from .polyhedra import (
    Cone,
    PolyhedralComplex,
    Polyhedron,
)

# ---------------------------------------------------------------------------
# divisorial fans
# ---------------------------------------------------------------------------


class DivisorialFan:
    """Finite compatible set of polyhedral divisors on a common base."""

    def __init__(self, base: BaseVariety, members, validate=True, semicomplete=None):
        self.base = base
        self.members = tuple(members)
        if not self.members:
            raise ValueError("a divisorial fan needs at least one member")
        self.n = self.members[0].n
        for m in self.members:
            if m.base != base or m.n != self.n:
                raise ValueError("members must share base and lattice")
        self.semicomplete = semicomplete
        self._slices = {}
        for label in self.marked_primes():
            cells = []
            for m in self.members:
                p = m.coefficient(label)
                if not p.empty:
                    cells.append(p)
            self._slices[label] = PolyhedralComplex(cells, validate=validate)
        self._tailfan = PolyhedralComplex(
            [m.tail.as_polyhedron() for m in self.members], validate=validate
        )
        if validate:
            for label, sl in self._slices.items():
                for c in sl.cells:
                    if c.tail().as_polyhedron() not in set(self._tailfan.all_faces()):
                        raise ValueError(
                            f"slice cell tail at {label.id} missing from the tailfan"
                        )

    def marked_primes(self):
        out = {}
        for m in self.members:
            for label in m.coeffs:
                out[label] = None
        return sorted(out, key=lambda l: l.id)

    def slice_of(self, label) -> PolyhedralComplex:
        if label in self._slices:
            return self._slices[label]
        return self._tailfan

    def slices(self) -> dict:
        return dict(self._slices)

    def tailfan(self) -> PolyhedralComplex:
        return self._tailfan

    def is_contraction_free(self) -> bool:
        return all(self.member_locus_affine(m) for m in self.members)

    def member_locus_affine(self, member) -> bool:
        base = self.base
        empties = member.empty_primes()
        if base.kind == "open_p1":
            return True
        if base.kind == "P1":
            return bool(empties)
        if base.kind == "toric":
            removed = [l.ray for l in empties if l.kind == "ray"]
            if len(removed) != len(empties):
                return False  # declared primes do not cut out toric opens
            sub = base.subfan_without_rays(removed)
            return len(sub) == 1
        raise UnsupportedBase(base.kind)

    def rays(self) -> list[Vec]:
        return self._tailfan.rays()

    def vertices_of(self, label) -> list[Vec]:
        return self.slice_of(label).vertices()

    def __eq__(self, other):
        return (
            isinstance(other, DivisorialFan)
            and self.base == other.base
            and set(self.members) == set(other.members)
        )

    def __hash__(self):
        return hash((self.base, frozenset(self.members)))

    def __repr__(self):
        return f"DivisorialFan({len(self.members)} members on {self.base.name})"


def contraction_free_refinement(fan: DivisorialFan) -> DivisorialFan:
    """Split members with non-affine locus, preserving all slices.

    Implemented for curve bases: a member without an empty coefficient is
    replaced by one copy per marked point, each with the empty set there (a
    fresh extra point is used when fewer than two points are marked).
    """
    from .pdivisor import PolyhedralDivisor
    from .polyhedra import Polyhedron as _P

    if fan.base.kind not in ("P1", "open_p1"):
        raise UnsupportedBase("the splitting is implemented for curve bases")
    marked = [l for l in fan.marked_primes() if l.kind == "point"]
    if len(marked) < 2:
        extra = next(
            point_label(Fraction(k))
            for k in range(0, 50)
            if point_label(Fraction(k)) not in set(marked)
        )
        marked = marked + [extra]
    members = []
    for m in fan.members:
        if fan.member_locus_affine(m):
            members.append(m)
            continue
        for label in marked:
            coeffs = dict(m.coeffs)
            coeffs[label] = _P.empty_polyhedron(fan.n)
            members.append(PolyhedralDivisor(fan.base, fan.n, m.tail, coeffs))
    return DivisorialFan(fan.base, members, semicomplete=fan.semicomplete)


def invariant_prime_divisors(s: DivisorialFan):
    """(tail rays, slice vertices per marked prime) of a contraction-free fan.

    Every unmarked prime implicitly has the single vertex 0 of the trivial
    slice; those never carry nonzero data and are left implicit.
    """
    if not s.is_contraction_free():
        raise NotContractionFree("invariant prime divisors need affine loci")
    rays = s.rays()
    verts = {label: s.vertices_of(label) for label in s.marked_primes()}
    return rays, verts


# ---------------------------------------------------------------------------
# invariant divisors
# ---------------------------------------------------------------------------


class TInvariantDivisor:
    """D = sum a_rho D_rho + sum mu(v) b_{P,v} D_{P,v} on X(S)."""

    def __init__(self, fan: DivisorialFan, ray_coeffs=None, vertex_coeffs=None, rays=None, verts=None):
        self.fan = fan
        if rays is None or verts is None:
            frays, fverts = invariant_prime_divisors(fan)
            rays = frays if rays is None else [vec(r) for r in rays]
            verts = dict(fverts) if verts is None else dict(verts)
        else:
            verts = dict(verts)
        self.rays = tuple(vec(r) for r in rays)
        zero = zero_vec(fan.n)
        for (label, v) in (vertex_coeffs or {}):
            v = vec(v)
            if label not in verts:
                # an unmarked prime carries the trivial slice with vertex 0
                if v != zero:
                    raise ValueError(
                        f"({label.id}, {v}) is not a vertex of a trivial slice"
                    )
                verts[label] = (zero,)
        self.verts = {label: tuple(vec(v) for v in vs) for label, vs in verts.items()}
        rc = {vec(r): Fraction(0) for r in self.rays}
        for r, a in (ray_coeffs or {}).items():
            r = vec(r)
            if r not in rc:
                raise ValueError(f"{r} is not an invariant ray")
            rc[r] = frac(a)
        self.ray_coeffs = rc
        vc = {}
        for label, vs in self.verts.items():
            for v in vs:
                vc[(label, v)] = Fraction(0)
        for (label, v), b in (vertex_coeffs or {}).items():
            key = (label, vec(v))
            if key not in vc:
                raise ValueError(f"({label.id}, {v}) is not an invariant vertex")
            vc[key] = frac(b)
        self.vertex_coeffs = vc

    def __eq__(self, other):
        return (
            isinstance(other, TInvariantDivisor)
            and self.fan == other.fan
            and self.ray_coeffs == other.ray_coeffs
            and self.vertex_coeffs == other.vertex_coeffs
        )

    def __hash__(self):
        return hash(
            (
                self.fan,
                tuple(sorted(self.ray_coeffs.items())),
                tuple(sorted((l.id, v, b) for (l, v), b in self.vertex_coeffs.items())),
            )
        )

    def add(self, other: "TInvariantDivisor") -> "TInvariantDivisor":
        rc = dict(self.ray_coeffs)
        for r, a in other.ray_coeffs.items():
            rc[r] = rc.get(r, Fraction(0)) + a
        vc = dict(self.vertex_coeffs)
        for k, b in other.vertex_coeffs.items():
            vc[k] = vc.get(k, Fraction(0)) + b
        verts = dict(self.verts)
        for label, vs in other.verts.items():
            if label not in verts:
                verts[label] = vs
        return TInvariantDivisor(self.fan, rc, vc, rays=self.rays, verts=verts)

    def scale(self, s) -> "TInvariantDivisor":
        s = frac(s)
        return TInvariantDivisor(
            self.fan,
            {r: s * a for r, a in self.ray_coeffs.items()},
            {k: s * b for k, b in self.vertex_coeffs.items()},
            rays=self.rays,
            verts=self.verts,
        )

    def is_zero(self) -> bool:
        return all(a == 0 for a in self.ray_coeffs.values()) and all(
            b == 0 for b in self.vertex_coeffs.values()
        )


def principal_invariant_divisor(fan: DivisorialFan, f, u) -> TInvariantDivisor:
    """Div(f chi^u): ray part <v_rho, u>, vertex part <v, u> + ord_P(f).

    Zeros and poles of f at unmarked points contribute through the trivial
    slice's vertex 0 there.
    """
    u = vec(u)
    rays, verts = invariant_prime_divisors(fan)
    verts = dict(verts)
    if isinstance(f, CurveFunction):
        zero = zero_vec(fan.n)
        marked = set(verts)
        for label, c in f.divisor(fan.base).coeffs.items():
            if label not in marked:
                verts[label] = (zero,)
    rc = {r: vdot(r, u) for r in rays}
    vc = {}
    for label, vs in verts.items():
        o = order_along(f, label)
        for v in vs:
            vc[(label, v)] = vdot(v, u) + o
    return TInvariantDivisor(fan, rc, vc, rays=rays, verts=verts)


# ---------------------------------------------------------------------------
# concave piecewise-affine machinery
# ---------------------------------------------------------------------------


class ConcavePL:
    """min of finitely many affine pieces restricted to a domain polyhedron.

    Canonical via the hypograph {(u,t) : u in dom, t <= value(u)}; equality
    of two of these is equality of functions with equal domains.
    """

    __slots__ = ("domain", "pieces", "hypo")

    def __init__(self, domain: Polyhedron, pieces):
        pieces = [(vec(a), frac(c)) for a, c in pieces]
        if not pieces:
            raise ValueError("a concave piece list must be nonempty")
        n = domain.n
        ineqs = [(a + (Fraction(-1),), -c) for a, c in pieces]
        ineqs += [(a + (Fraction(0),), b) for a, b in domain.ineqs]
        eqs = [(a + (Fraction(0),), b) for a, b in domain.eqs]
        self.hypo = Polyhedron.from_H(ineqs, eqs, n + 1)
        hypo = self.hypo
        self.domain = domain
        canon = []
        for a, b in hypo.ineqs:
            lam = a[n]
            if lam < 0:
                scale = -lam
                canon.append((tuple(x / scale for x in a[:n]), b / lam))
        self.pieces = tuple(sorted(set(canon)))

    @classmethod
    def from_hypograph(cls, hypo: Polyhedron) -> "ConcavePL":
        n = hypo.n - 1
        proj = [tuple(Fraction(1) if j == i else Fraction(0) for j in range(n + 1)) for i in range(n)]
        domain = hypo.map_image(proj)
        pieces = []
        for a, b in hypo.ineqs:
            lam = a[n]
            if lam < 0:
                pieces.append((tuple(x / -lam for x in a[:n]), b / lam))
        if not pieces:
            raise ValueError("hypograph is not bounded above by affine pieces")
        return cls(domain, pieces)

    def __eq__(self, other):
        return isinstance(other, ConcavePL) and self.hypo == other.hypo

    def __hash__(self):
        return hash(self.hypo)

    def __repr__(self):
        return f"ConcavePL({len(self.pieces)} pieces on {self.domain!r})"

    def value(self, u) -> Fraction:
        u = vec(u)
        if not self.domain.contains_point(u):
            raise WeightOutsideBox(f"{u} is outside the domain")
        return min(vdot(a, u) + c for a, c in self.pieces)

    def scale(self, k) -> "ConcavePL":
        k = frac(k)
        if k <= 0:
            raise ValueError("only positive scaling")
        return ConcavePL(self.domain, [(tuple(k * x for x in a), k * c) for a, c in self.pieces])

    def lineality(self) -> list[Vec]:
        """Directions w with domain and value translation-invariant."""
        n = self.domain.n
        out = []
        for l in self.hypo.lines:
            if l[n] == 0:
                out.append(l[:n])
        # lines with a slant contribute nothing to the strict lineality
        return out

    def graph_vertices(self) -> list[tuple[Vec, Fraction]]:
        """Canonical minimal-face representatives of the graph."""
        n = self.domain.n
        return [(v[:n], v[n]) for v in self.hypo.vertices]

    def linear_part(self, w) -> Fraction:
        """Slope at infinity along a tail direction of the domain."""
        w = vec(w)
        return min(vdot(a, w) for a, _ in self.pieces)

    def sup_convolve(self, other: "ConcavePL") -> "ConcavePL":
        return ConcavePL.from_hypograph(self.hypo.minkowski(other.hypo))


def zero_function_on(domain: Polyhedron) -> ConcavePL:
    return ConcavePL(domain, [(zero_vec(domain.n), Fraction(0))])


class PLDivisorMap:
    """Concave piecewise-affine map Box -> divisors: u |-> sum Psi_P(u) P."""

    def __init__(self, base: BaseVariety, box: Polyhedron, per_prime=None):
        self.base = base
        self.box = box
        data = {}
        for label, f in (per_prime or {}).items():
            if is_inf(f):
                data[label] = INF
            else:
                if f.domain != box:
                    raise ValueError("all prime functions must share the Box domain")
                data[label] = f
        self.per_prime = dict(sorted(data.items(), key=lambda kv: kv[0].id))

    def __eq__(self, other):
        return (
            isinstance(other, PLDivisorMap)
            and self.base == other.base
            and self.box == other.box
            and self.per_prime == other.per_prime
        )

    def __hash__(self):
        return hash((self.base, self.box, tuple(self.per_prime.items())))

    def __repr__(self):
        return f"PLDivisorMap({len(self.per_prime)} primes on {self.box!r})"

    def marked(self):
        return list(self.per_prime)

    def psi(self, label) -> ConcavePL:
        got = self.per_prime.get(label)
        if got is None:
            return zero_function_on(self.box)
        return got

    def evaluate(self, u) -> QDivisor:
        u = vec(u)
        if not self.box.contains_point(u):
            raise WeightOutsideBox(f"{u} not in Box")
        out = {}
        for label, f in self.per_prime.items():
            out[label] = INF if is_inf(f) else f.value(u)
        return QDivisor(self.base, out)

    def drop_trivial(self) -> "PLDivisorMap":
        data = {}
        for label, f in self.per_prime.items():
            if not is_inf(f) and f == zero_function_on(self.box):
                continue
            data[label] = f
        return PLDivisorMap(self.base, self.box, data)


def sum_psi(a: PLDivisorMap, b: PLDivisorMap) -> PLDivisorMap:
    """Sup-convolution sum: Box_a + Box_b, per prime the hypograph sum."""
    if a.base != b.base:
        raise ValueError("summands live over different bases")
    box = a.box.minkowski(b.box)
    labels = {l: None for l in list(a.per_prime) + list(b.per_prime)}
    out = {}
    for label in labels:
        fa = a.per_prime.get(label)
        fb = b.per_prime.get(label)
        if is_inf(fa) or is_inf(fb):
            out[label] = INF
            continue
        fa = fa if fa is not None else zero_function_on(a.box)
        fb = fb if fb is not None else zero_function_on(b.box)
        out[label] = fa.sup_convolve(fb)
    return PLDivisorMap(a.base, box, out)


# ---------------------------------------------------------------------------
# Box^D and Psi^D
# ---------------------------------------------------------------------------


def box_and_psi(d: TInvariantDivisor) -> PLDivisorMap:
    """Weight polyhedron from the ray inequalities and the vertex minima."""
    fan = d.fan
    n = fan.n
    ineqs = [(r, -a) for r, a in d.ray_coeffs.items()]
    box = Polyhedron.from_H(ineqs, (), n) if ineqs else Polyhedron.from_H((), (), n)
    per = {}
    labels = {l: None for l in fan.marked_primes()}
    labels.update({l: None for l in d.verts})
    for label in labels:
        vs = d.verts.get(label, ())
        pieces = []
        for v in vs:
            b = d.vertex_coeffs[(label, v)]
            pieces.append((v, b))
        if not pieces or box.empty:
            per[label] = INF
        else:
            per[label] = ConcavePL(box, pieces)
    return PLDivisorMap(fan.base, box, per)


def psi0_pdivisor(fan: DivisorialFan):
    """The zero divisor's weight data as a polyhedral divisor.

    Tailcone = convex hull of the tailfan support, coefficient at P = convex
    hull of the slice support.
    """
    from .pdivisor import PolyhedralDivisor

    tail = Cone.from_rays(fan.rays(), n=fan.n) if fan.rays() else Cone.zero(fan.n)
    coeffs = {}
    for label in fan.marked_primes():
        sl = fan.slice_of(label)
        if not sl.cells:
            coeffs[label] = Polyhedron.empty_polyhedron(fan.n)
            continue
        verts = []
        rays = []
        lines = []
        for c in sl.cells:
            verts.extend(c.vertices)
            rays.extend(c.rays)
            lines.extend(c.lines)
        coeffs[label] = Polyhedron.from_generators(verts, rays, lines, fan.n)
    return PolyhedralDivisor(fan.base, fan.n, tail, coeffs)


def graded_sections(d: TInvariantDivisor, u, pole_bound=None) -> SectionSpace:
    """The weight-u piece of L(D), via sections of Psi^D(u) on the base."""
    pl = box_and_psi(d)
    u = vec(u)
    if not pl.box.contains_point(u):
        raise WeightOutsideBox(f"{u} is outside Box^D")
    if any(frac(x).denominator != 1 for x in u):
        raise WeightOutsideBox("graded pieces live at lattice points")
    dv = pl.evaluate(u)
    return base_global_sections(dv, pole_bound=pole_bound)


# ---------------------------------------------------------------------------
# support functions
# ---------------------------------------------------------------------------


@dataclass
class SupportFunction:
    """Per prime, per slice cell: an affine piece (a, c) with h = <a,.> + c."""

    pieces: dict  # label -> tuple of (cell, a, c)

    def value(self, label, x):
        for cell, a, c in self.pieces.get(label, ()):
            if cell.contains_point(x):
                return vdot(a, x) + c
        raise ValueError(f"{x} is not in the slice of {label.id}")


def support_functions(d: TInvariantDivisor) -> SupportFunction:
    """Solve for the affine pieces h(v) = -b, slope_rho = -a per slice cell."""
    fan = d.fan
    n = fan.n
    out = {}
    for label in fan.marked_primes():
        sl = fan.slice_of(label)
        per_cell = []
        for cell in sl.cells:
            rows = []
            rhs = []
            for v in cell.vertices:
                rows.append(list(v) + [1])
                rhs.append(-d.vertex_coeffs.get((label, v), Fraction(0)))
            for r in cell.tail().rays:
                rows.append(list(r) + [0])
                rhs.append(-d.ray_coeffs.get(r, Fraction(0)))
            sol = solve(rows, rhs)
            if sol is None:
                raise NotQCartier(cell)
            a, c = sol[:n], sol[n]
            per_cell.append((cell, a, c))
        out[label] = tuple(per_cell)
    return SupportFunction(out)


def support_function_concave(d: TInvariantDivisor, label) -> bool:
    """h_P concave <=> each cell's piece dominates h on every other cell."""
    sf = support_functions(d)
    cells = sf.pieces.get(label, ())
    for cell_i, a_i, c_i in cells:
        for cell_j, a_j, c_j in cells:
            for v in cell_j.vertices:
                if vdot(a_i, v) + c_i < vdot(a_j, v) + c_j:
                    return False
            for r in cell_j.tail().rays:
                if vdot(a_i, r) < vdot(a_j, r):
                    return False
    return True


# ---------------------------------------------------------------------------
# base-point freeness
# ---------------------------------------------------------------------------


@dataclass
class BpfReport:
    status: str  # "free" | "not_free" | "inconclusive"
    witnesses: dict  # (member index, class id) -> (u, section)
    failing: tuple = ()

    @property
    def free(self) -> bool:
        return self.status == "free"


def _section_with_orders(base, required, psi_values, slack_points):
    """A curve function with prescribed orders at `required` and
    ord >= ceil(-psi) elsewhere; degree balanced at a slack point.

    Returns None when no such section exists.
    """
    orders = dict(required)
    for label, val in psi_values.items():
        if label in orders:
            continue
        if is_inf(val):
            continue  # removed from the locus: unconstrained pole allowed
        orders[label] = Fraction(math.ceil(-val))
    if any(is_inf(v) for v in orders.values()):
        return None
    total = sum(orders.values(), Fraction(0))
    if base.kind == "open_p1":
        # absorb any excess at a removed point
        slack_pt = base.removed[0]
        factors = {l.point: int(o) for l, o in orders.items() if not is_inf(l.point)}
        need = -total
        factors[slack_pt] = factors.get(slack_pt, 0) + int(need)
        return CurveFunction(factors)
    inf_primes = [l for l in psi_values if is_inf(psi_values[l]) and l not in required]
    if total > 0:
        if not inf_primes:
            return None
        # unlimited poles are allowed off the locus; dump the excess there
        lab = inf_primes[0]
        orders[lab] = orders.get(lab, Fraction(0)) - total
        total = Fraction(0)
    slack = -total
    factors = {l.point: int(o) for l, o in orders.items() if not is_inf(l.point)}
    if slack:
        pt = next(p for p in slack_points if point_label(p) not in orders)
        factors[pt] = factors.get(pt, 0) + int(slack)
    return CurveFunction(factors)


def is_basepoint_free(d: TInvariantDivisor, window_steps: int = 1) -> BpfReport:
    """Search for section witnesses member by member and class by class.

    For each member and each point class of the base (the marked points plus
    one generic class), a weight u and section s must exist with
    Psi_P(u) + ord_P(s) = 0 and the member's coefficient flat at u.  The
    search enumerates lattice weights in a window of Box^D; an exhausted
    unbounded window yields "inconclusive", never "not_free".
    """
    fan = d.fan
    if fan.base.kind not in ("P1", "open_p1"):
        raise UnsupportedBase("base-point-freeness search runs on curve bases")
    if not fan.is_contraction_free():
        raise NotContractionFree("the criterion needs a contraction-free fan")
    pl = box_and_psi(d)
    box = pl.box
    if box.empty:
        return BpfReport("not_free", {}, failing=(("(no weights)", "Box is empty"),))
    marked = [l for l in pl.marked() if l.kind == "point"]
    slack_candidates = [Fraction(k) for k in range(0, 50)]
    slack_points = [
        p for p in slack_candidates if point_label(p) not in set(marked)
    ]
    witnesses = {}
    inconclusive = False
    for mi, member in enumerate(fan.members):
        classes = [l for l in marked if not member.coefficient(l).empty]
        classes.append(None)  # the generic class
        for label in classes:
            found = None
            constraint_eqs = []
            if label is None:
                tail_rays = member.tail.rays
                for r in tail_rays:
                    constraint_eqs.append((r, -d.ray_coeffs.get(r, Fraction(0))))
                region = Polyhedron.from_H(box.ineqs, list(box.eqs) + constraint_eqs, box.n)
            else:
                coeff = member.coefficient(label)
                vs = list(coeff.vertices)
                for r in coeff.tail().rays:
                    constraint_eqs.append((r, -d.ray_coeffs.get(r, Fraction(0))))
                for v in vs[1:]:
                    constraint_eqs.append(
                        (vsub(v, vs[0]), d.vertex_coeffs[(label, vs[0])] - d.vertex_coeffs[(label, v)])
                    )
                region = Polyhedron.from_H(box.ineqs, list(box.eqs) + constraint_eqs, box.n)
                # the member's vertices must attain the slice minimum
                v0 = vs[0]
                b0 = d.vertex_coeffs[(label, v0)]
                attain_ineqs = []
                for w in d.verts.get(label, ()):
                    bw = d.vertex_coeffs[(label, w)]
                    attain_ineqs.append((vsub(w, v0), b0 - bw))
                region = Polyhedron.from_H(
                    list(region.ineqs) + attain_ineqs, region.eqs, box.n
                )
            if region.empty:
                return BpfReport(
                    "not_free",
                    witnesses,
                    failing=((mi, label.id if label else "generic"),),
                )
            bounded = region.is_bounded()
            for u in region.lattice_window(window_steps):
                dv = pl.evaluate(u)
                required = {}
                if label is not None:
                    val = dv.coefficient(label)
                    if is_inf(val) or val.denominator != 1:
                        continue
                    required[label] = -val
                else:
                    required = {}
                psi_vals = {l: dv.coefficient(l) for l in marked}
                s = _section_with_orders(fan.base, required, psi_vals, slack_points)
                if s is None:
                    continue
                # any slack zeros of s sit at unmarked points; generic-class
                # instances at those points use a shifted slack point instead
                found = (u, s)
                break
            if found is None:
                if bounded:
                    return BpfReport(
                        "not_free",
                        witnesses,
                        failing=((mi, label.id if label else "generic"),),
                    )
                inconclusive = True
            else:
                witnesses[(mi, label.id if label else "generic")] = found
    if inconclusive:
        return BpfReport("inconclusive", witnesses)
    return BpfReport("free", witnesses)


# ---------------------------------------------------------------------------
# sharpness
# ---------------------------------------------------------------------------


def sharpness(psi: PLDivisorMap, k_bound: int = 12, window_steps: int = 1) -> str:
    """Classify a divisor map as sharp / asymptotically_sharp / fails /
    inconclusive by searching section witnesses at the vertices of each
    prime's function modulo its lineality space.
    """
    base = psi.base
    if base.kind not in ("P1", "open_p1"):
        raise UnsupportedBase("sharpness search runs on curve bases")
    marked = [l for l in psi.marked() if l.kind == "point"]
    slack_points = [Fraction(k) for k in range(0, 50)]
    slack_points = [p for p in slack_points if point_label(p) not in set(marked)]
    overall = "sharp"
    for label, f in psi.per_prime.items():
        if is_inf(f):
            continue
        lin = f.lineality()
        for (ubar, _val) in f.graph_vertices():
            found_k = None
            slab = Polyhedron.from_generators([ubar], lines=lin, n=psi.box.n)
            region = psi.box.intersect(slab)
            if region.empty:
                continue
            bounded = region.is_bounded()
            for k in range(1, k_bound + 1):
                for u in region.lattice_window(window_steps):
                    dv = psi.evaluate(u)
                    val = dv.coefficient(label)
                    if is_inf(val):
                        continue
                    target = -k * val
                    if target.denominator != 1:
                        continue
                    scaled = {}
                    for l2 in marked:
                        c2 = dv.coefficient(l2)
                        scaled[l2] = INF if is_inf(c2) else k * c2
                    s = _section_with_orders(base, {label: target}, scaled, slack_points)
                    if s is not None:
                        found_k = k
                        break
                if found_k is not None:
                    break
            if found_k is None:
                if bounded:
                    return "fails"
                return "inconclusive"
            if found_k > 1:
                overall = "asymptotically_sharp"
    return overall
