"""Divisorial polyhedra and the complexity-one downgrade.

A divisorial polyhedron is a concave piecewise-affine map from a weight
polyhedron into semiample divisors on a curve.  Dualizing each prime's
function produces slice subdivisions and support data of a variety over the
curve; restricting a polyhedral divisor to weight fibers produces such maps,
and assembling the dual data over one interior weight per linearity chamber
recovers the same variety for the subtorus action.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .base import is_inf, point_label
from .errors import (
    BoxNotFullDimensional,
    MarksMissingSupport,
    NotProper,
    WeightOutsideCone,
)
from .lattice import LatticeMap, smith_split
from .linalg import transpose, vdot, vec
from .pdivisor import PolyhedralDivisor
from .polyhedra import (
    Cone,
    PolyhedralComplex,
    Polyhedron,
    chamber_complex,
    linearity_regions,
    map_fiber_slice,
)
from .tvariety import (
    ConcavePL,
    DivisorialFan,
    PLDivisorMap,
    TInvariantDivisor,
    sum_psi,
    zero_function_on,
)
from .upgrade import InvariantPDivisorOnFan


@dataclass
class DowngradeContext:
    """Split data of a weight projection pr: M -> Mbar.

    Carries the section s_star, the kernel inclusion, the cosection t, and
    the dual-side projection pi: N -> N' and retraction s: N -> Nbar.
    """

    pr: LatticeMap
    s_star: LatticeMap
    t: LatticeMap
    kernel: LatticeMap

    @staticmethod
    def from_projection(pr: LatticeMap) -> "DowngradeContext":
        s_star, t, kernel = smith_split(pr)
        return DowngradeContext(pr, s_star, t, kernel)

    @property
    def pi_rows(self):
        return transpose(self.kernel.matrix)

    @property
    def s_rows(self):
        return transpose(self.s_star.matrix)

    @property
    def fiber_rank(self) -> int:
        return self.kernel.source.rank


def linear_part(f: ConcavePL, w) -> Fraction:
    """Slope of the eventually-affine tail of lambda -> f(u + lambda w)."""
    return f.linear_part(w)


def dualize(f: ConcavePL):
    """(Box*, Psi*) of one prime's concave function.

    Box* collects the linear functionals dominating the linear part on the
    domain's tailcone; Psi*(v) = min over the domain of <v,u> - f(u), with
    one affine piece per vertex of the graph.
    """
    n = f.domain.n
    flip = [
        tuple(Fraction(1) if j == i else Fraction(0) for j in range(n + 1))
        for i in range(n)
    ]
    flip.append(tuple([Fraction(0)] * n + [Fraction(-1)]))
    epi = f.hypo.map_image(flip)  # epigraph of -f
    rec = epi.tail()
    ineqs = []
    eqs = []
    for g in rec.rays:
        w, r = g[:n], g[n]
        if all(x == 0 for x in w):
            continue  # the vertical ray only says t can grow
        ineqs.append((w, -r))
    for g in rec.lines:
        w, r = g[:n], g[n]
        eqs.append((w, -r))
    box_star = Polyhedron.from_H(ineqs, eqs, n)
    pieces = [(u, t) for (u, t) in ((v[:n], v[n]) for v in epi.vertices)]
    psi_star = ConcavePL(box_star, pieces)
    return box_star, psi_star


def subdivision_of_dual(f: ConcavePL) -> PolyhedralComplex:
    """Xi(Psi*) as a complex of pointed polyhedra (domain must be full-dim)."""
    if f.domain.dim() != f.domain.n:
        raise BoxNotFullDimensional("the dual subdivision needs a full-dimensional Box")
    box_star, psi_star = dualize(f)
    return linearity_regions(psi_star.pieces, box_star)


def fan_from(psi: PLDivisorMap, marks):
    """Contraction-free fan from the dual subdivisions over the marked points.

    Members are the cells of each Xi(Psi_P*) attached to P with the empty
    set at the other marks.  Returns (fan, per-prime dual data, the support
    divisor read off from the dual values).
    """
    marks = list(marks)
    if not marks:
        raise MarksMissingSupport("need a nonempty set of marked points")
    box = psi.box
    if box.dim() != box.n:
        raise BoxNotFullDimensional("Box must be full-dimensional")
    mark_labels = [point_label(p) if not hasattr(p, "kind") else p for p in marks]
    if psi.base.kind == "P1" and len(mark_labels) < 2:
        # members need an empty coefficient somewhere for affine loci
        from .base import INF as _INF

        have = {l.id for l in mark_labels}
        extra = point_label(_INF) if "inf" not in have else next(
            point_label(Fraction(k)) for k in range(0, 50) if str(k) not in have
        )
        mark_labels.append(extra)
    support = {l for l, g in psi.per_prime.items() if is_inf(g) or g.pieces != zero_function_on(box).pieces}
    if not support <= set(mark_labels):
        raise MarksMissingSupport(
            f"marks must contain the support {[l.id for l in support]}"
        )
    duals = {}
    for label in mark_labels:
        f = psi.psi(label)
        if is_inf(f):
            raise MarksMissingSupport("divisorial polyhedra take finite values")
        box_star, psi_star = dualize(f)
        cells = linearity_regions(psi_star.pieces, box_star)
        duals[label] = (box_star, psi_star, cells)
    # tailfan independence across the marks (compared face-closed)
    tails = None
    for label, (_, _, cells) in duals.items():
        t = set()
        for c in cells:
            for f in c.tail().faces():
                t.add(f)
        if tails is None:
            tails = t
        elif tails != t:
            raise ValueError("dual subdivision tailfans differ between primes")
    members = []
    n = psi.box.n
    for label, (_, _, cells) in duals.items():
        others = [l for l in mark_labels if l != label]
        for cell in cells:
            coeffs = {label: cell}
            for o in others:
                coeffs[o] = Polyhedron.empty_polyhedron(n)
            members.append(PolyhedralDivisor(psi.base, n, cell.tail(), coeffs))
    fan = DivisorialFan(psi.base, members)
    # support divisor from the dual values: h_P = Psi_P*
    ray_coeffs = {}
    for r in fan.rays():
        ray_coeffs[r] = -min(vdot(r, u) for u, _ in _graph_points(psi))
    vertex_coeffs = {}
    for label, (_, psi_star, cells) in duals.items():
        for c in cells:
            for v in c.vertices:
                vertex_coeffs[(label, v)] = -psi_star.value(v)
    dstar = TInvariantDivisor(fan, ray_coeffs, vertex_coeffs)
    return fan, duals, dstar


def _graph_points(psi: PLDivisorMap):
    box = psi.box
    pts = [(v, Fraction(0)) for v in box.vertices]
    return pts


# ---------------------------------------------------------------------------
# the downgrade itself
# ---------------------------------------------------------------------------


def downgrade_box_psi(d: PolyhedralDivisor, ctx: DowngradeContext, ubar) -> PLDivisorMap:
    """Box[ubar] and Psi[ubar]: the fiber weight polyhedron and the divisor
    map u' -> D(u' + s*(ubar))."""
    ubar = vec(ubar)
    omega = d.weight_cone().as_polyhedron()
    image = omega.map_image(ctx.pr.matrix)
    if not image.contains_point(ubar):
        raise WeightOutsideCone(f"{ubar} is outside the projected weight cone")
    box = map_fiber_slice(omega, ctx.pr.matrix, ubar, ctx.t.matrix)
    lift = ctx.s_star(ubar)
    pi_rows = ctx.pi_rows
    per = {}
    for label, p in d.coeffs.items():
        if p.empty:
            raise NotProper("the downgrade needs locus equal to the whole curve")
        pieces = []
        for v in p.vertices:
            a = tuple(vdot(row, v) for row in pi_rows)
            c = vdot(v, lift)
            pieces.append((a, c))
        per[label] = ConcavePL(box, pieces)
    return PLDivisorMap(d.base, box, per)


def _relint_lattice_point(cell: Polyhedron, rows):
    img = cell.map_image(rows)
    t = img.tail()
    acc = [Fraction(0)] * img.n
    for r in t.rays:
        acc = [a + x for a, x in zip(acc, r)]
    return tuple(acc)


def downgrade(d: PolyhedralDivisor, ctx: DowngradeContext):
    """Restrict the torus action along ctx.pr.

    Returns (fan, dbar): the divisorial fan describing the intermediate
    quotient over the curve, and the downgraded divisor on it with fiber
    coefficients.  The slices are computed both from the dual subdivisions
    and from the projected faces; the two routes must agree.
    """
    if d.base.kind not in ("P1", "open_p1"):
        raise NotProper("the downgrade runs over smooth curve bases")
    report = d.is_proper()
    if not report.proper:
        raise NotProper(f"input is not a p-divisor: {report.as_dict()}")
    chambers = d.evaluation_chambers()
    ubars = {}
    for cell in chambers:
        ub = _relint_lattice_point(cell, ctx.pr.matrix)
        ubars[ub] = None
    total = None
    for ub in ubars:
        pl = downgrade_box_psi(d, ctx, ub)
        total = pl if total is None else sum_psi(total, pl)
    marks = [l for l in d.marked() if l.kind == "point"]
    if not marks:
        marks = [point_label(Fraction(0))]
    fan, duals, dstar = fan_from(total, marks)
    # second route: chamber complexes of the projected coefficient faces
    pi_rows = ctx.pi_rows
    for label in marks:
        coeff = d.coefficient(label)
        pieces = [f.map_image(pi_rows) for f in coeff.faces()]
        xi = chamber_complex(pieces)
        if set(xi.cells) != set(fan.slice_of(label).cells):
            raise ValueError(
                f"slice routes disagree at {label.id}: {xi.cells} vs {fan.slice_of(label).cells}"
            )
    # coefficients from the fiber formulas
    s_rows = ctx.s_rows
    nbar = ctx.pr.target.rank
    tail_poly = d.tail.as_polyhedron()
    fiber0 = map_fiber_slice(tail_poly, pi_rows, (Fraction(0),) * ctx.fiber_rank, s_rows)
    sigma_bar = Cone.from_rays(list(fiber0.rays), list(fiber0.lines), nbar)
    ray_coeffs = {}
    for r in fan.rays():
        p = map_fiber_slice(tail_poly, pi_rows, r, s_rows)
        ray_coeffs[r] = p
    vertex_coeffs = {}
    for label in fan.marked_primes():
        coeff = d.coefficient(label)
        for v in fan.vertices_of(label):
            p = map_fiber_slice(coeff, pi_rows, v, s_rows)
            vertex_coeffs[(label, v)] = p
    dbar = InvariantPDivisorOnFan(
        fan, nbar, sigma_bar, ray_coeffs=ray_coeffs, vertex_coeffs=vertex_coeffs
    )
    return fan, dbar
