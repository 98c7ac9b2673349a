"""Polyhedral divisors: evaluation, properness, degree, pullback, downgrade.

A polyhedral divisor assigns to finitely many primes of a base variety a
polyhedron with a common tailcone (or the empty set); all other primes
implicitly carry the tailcone itself.  Evaluation at a weight u in the dual
of the tailcone produces a Q-divisor, with the empty coefficient evaluating
to infinity.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .base import (
    INF,
    BaseVariety,
    PrimeDivisorLabel,
    QDivisor,
    is_inf,
    positivity,
    ray_label,
)
from .errors import (
    AmbientMismatch,
    EmptyCoefficient,
    IndeterminateBaseMap,
    NoDegreeMap,
    NotSplit,
    UnsupportedBase,
    WeightOutsideCone,
)
from .lattice import Lattice, LatticeMap
from .linalg import is_zero_vec, solve, vdot, vec
from .polyhedra import (
    Cone,
    PolyhedralComplex,
    Polyhedron,
    chamber_complex,
    common_refinement,
    linearity_regions,
    map_fiber_slice,
)


class PolyhedralDivisor:
    """Formal sum of coefficient polyhedra over primes, with tailcone."""

    def __init__(self, base: BaseVariety, n: int, tail: Cone, coeffs=None):
        if tail.n != n:
            raise AmbientMismatch("tailcone must live in the divisor lattice")
        self.base = base
        self.n = n
        self.tail = tail
        trivial = tail.as_polyhedron()
        data = {}
        for label, p in (coeffs or {}).items():
            if p.empty:
                data[label] = p
                continue
            if p.n != n:
                raise AmbientMismatch("coefficient has the wrong ambient dimension")
            if p.tail() != tail:
                raise ValueError(
                    f"coefficient at {label.id} has tailcone {p.tail()!r} != {tail!r}"
                )
            if p == trivial:
                continue
            data[label] = p
        self.coeffs = dict(sorted(data.items(), key=lambda kv: kv[0].id))

    # -- basics -----------------------------------------------------------

    def __eq__(self, other):
        return (
            isinstance(other, PolyhedralDivisor)
            and self.base == other.base
            and self.n == other.n
            and self.tail == other.tail
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.base, self.n, self.tail, tuple(self.coeffs.items())))

    def __repr__(self):
        bits = [f"{p!r}(x){l.id}" for l, p in self.coeffs.items()]
        return "PDiv[" + " + ".join(bits) + f"; tail rays {self.tail.rays}]"

    def weight_cone(self) -> Cone:
        return self.tail.dual()

    def marked(self) -> list[PrimeDivisorLabel]:
        return list(self.coeffs)

    def coefficient(self, label) -> Polyhedron:
        return self.coeffs.get(label, self.tail.as_polyhedron())

    def empty_primes(self) -> list[PrimeDivisorLabel]:
        return [l for l, p in self.coeffs.items() if p.empty]

    def locus_is_all(self) -> bool:
        return not self.empty_primes()

    # -- evaluation ---------------------------------------------------------

    def evaluate(self, u) -> QDivisor:
        u = vec(u)
        if not self.weight_cone().contains(u):
            raise WeightOutsideCone(f"{u} is outside the weight cone")
        out = {}
        for label, p in self.coeffs.items():
            if p.empty:
                out[label] = INF
            else:
                out[label] = min(vdot(v, u) for v in p.vertices)
        return QDivisor(self.base, out)

    def evaluation_chambers(self) -> PolyhedralComplex:
        """Domains of linearity of u -> D(u) inside the weight cone."""
        omega = self.weight_cone().as_polyhedron()
        complexes = []
        for label, p in self.coeffs.items():
            if p.empty:
                continue
            pieces = [(v, Fraction(0)) for v in p.vertices]
            complexes.append(linearity_regions(pieces, omega))
        if not complexes:
            return PolyhedralComplex([omega])
        return common_refinement(complexes)

    def convexity_check(self, samples=()) -> bool:
        omega = self.weight_cone()
        gens = list(omega.rays) + [l for l in omega.lines] + [
            tuple(-x for x in l) for l in omega.lines
        ]
        probes = []
        for i, a in enumerate(gens):
            for b in gens[i:]:
                probes.append((vec(a), vec(b)))
        for a, b in list(probes) + [(vec(a), vec(b)) for a, b in samples]:
            da, db = self.evaluate(a), self.evaluate(b)
            dab = self.evaluate(tuple(x + y for x, y in zip(a, b)))
            if not da.add(db).leq(dab):
                return False
        return True

    # -- properness -----------------------------------------------------------

    def is_proper(self) -> "PropernessReport":
        omega = self.weight_cone()
        fulldim = omega.dim() == self.n
        loc_semiproj = self._locus_semiprojective()
        chambers = self.evaluation_chambers()
        qc = True
        sa = True
        big = True
        failures = []
        probe_rays = {r for c in chambers for r in c.tail().rays}
        probe_rays.update(omega.rays)
        for u in sorted(probe_rays):
            fl = positivity(self.evaluate(u))
            if not fl.qcartier:
                qc = False
                failures.append(("qcartier", u))
            if not fl.semiample:
                sa = False
                failures.append(("semiample", u))
        for c in chambers:
            if c.dim() < omega.dim():
                continue
            u = c.relint_point()
            fl = positivity(self.evaluate(u))
            if not fl.big:
                big = False
                failures.append(("big", u))
        return PropernessReport(
            qcartier=qc,
            semiample=sa,
            big=big,
            loc_semiprojective=loc_semiproj,
            fulldim_weightcone=fulldim,
            failures=tuple(failures),
        )

    def _locus_semiprojective(self) -> bool:
        base = self.base
        empties = self.empty_primes()
        if base.kind == "P1":
            return True  # projective, or affine after removing points
        if base.kind == "open_p1":
            return True  # affine curves
        if base.kind == "toric":
            removed = [l.ray for l in empties if l.kind == "ray"]
            if any(l.kind != "ray" for l in empties):
                return base.semiprojective
            if not removed:
                return base.semiprojective
            sub = base.subfan_without_rays(removed)
            if len(sub) == 1:
                return True  # affine locus
            return base.semiprojective
        raise UnsupportedBase(base.kind)

    # -- degree ----------------------------------------------------------------

    def degree_polyhedron(self) -> Polyhedron:
        if self.empty_primes():
            raise EmptyCoefficient("degree needs all coefficients nonempty")
        base = self.base
        if not (base.kind == "P1" or (base.kind == "toric" and base.has_degree_map())):
            raise NoDegreeMap("degree polyhedron needs a projective base with degrees")
        out = self.tail.as_polyhedron()
        for label, p in self.coeffs.items():
            out = out.minkowski(p.scale(base.label_degree(label)))
        return out

    # -- shifting and pullback ----------------------------------------------

    def shift_by_principal(self, fshift) -> "PolyhedralDivisor":
        """Add Div(f) for f = sum v_i (x) f_i; coefficients translate."""
        moved = dict(self.coeffs)
        shifts = _principal_shifts(fshift, self.base)
        for label, w in shifts.items():
            cur = moved.get(label, self.tail.as_polyhedron())
            if not cur.empty:
                moved[label] = cur.translate(w)
        return PolyhedralDivisor(self.base, self.n, self.tail, moved)

    def lattice_preimage(self, fmap: LatticeMap) -> "PolyhedralDivisor":
        """Coefficientwise preimage under F: N_new -> N."""
        rows = fmap.matrix
        if len(rows) != self.n:
            raise AmbientMismatch("lattice map target must be the divisor lattice")
        new_n = fmap.source.rank
        tail_p = self.tail.as_polyhedron().preimage(rows, new_n)
        new_tail = Cone.from_rays(tail_p.rays, tail_p.lines, new_n)
        coeffs = {}
        for label, p in self.coeffs.items():
            coeffs[label] = p.preimage(rows, new_n)
        return PolyhedralDivisor(self.base, new_n, new_tail, coeffs)

    def pullback(self, triple: "PullbackTriple") -> "PolyhedralDivisor":
        d = self
        if triple.base_map is not None:
            d = _toric_base_pullback(d, triple.base_map, triple.target_base)
        if triple.shift:
            d = d.shift_by_principal(triple.shift)
        if triple.lattice_map is not None:
            d = d.lattice_preimage(triple.lattice_map)
        return d


@dataclass(frozen=True)
class PropernessReport:
    qcartier: bool
    semiample: bool
    big: bool
    loc_semiprojective: bool
    fulldim_weightcone: bool
    failures: tuple = ()

    @property
    def proper(self) -> bool:
        return (
            self.qcartier
            and self.semiample
            and self.big
            and self.loc_semiprojective
            and self.fulldim_weightcone
        )

    def as_dict(self) -> dict:
        return {
            "qcartier": self.qcartier,
            "semiample": self.semiample,
            "big": self.big,
            "loc_semiprojective": self.loc_semiprojective,
            "fulldim_weightcone": self.fulldim_weightcone,
            "proper": self.proper,
        }


@dataclass(frozen=True)
class PullbackTriple:
    """(psi, F, f): base morphism, lattice map, principal shift."""

    base_map: LatticeMap | None = None
    target_base: BaseVariety | None = None
    lattice_map: LatticeMap | None = None
    shift: tuple = ()  # tuple of (vector, rational function)


def _principal_shifts(fshift, base) -> dict:
    shifts = {}
    for v, f in fshift:
        v = vec(v)
        dv = f.divisor(base)
        for label, c in dv.coeffs.items():
            if is_inf(c):
                raise ValueError("principal parts cannot be infinite")
            w = tuple(c * x for x in v)
            if label in shifts:
                shifts[label] = tuple(a + b for a, b in zip(shifts[label], w))
            else:
                shifts[label] = w
    return {l: w for l, w in shifts.items() if not is_zero_vec(w)}


def principal_pdivisor(fshift, base: BaseVariety, n: int) -> PolyhedralDivisor:
    """Div(f)(u) = sum <v_i, u> div(f_i), as a divisor with point coefficients."""
    shifts = _principal_shifts(fshift, base)
    tail = Cone.zero(n)
    coeffs = {l: Polyhedron.point(w) for l, w in shifts.items()}
    return PolyhedralDivisor(base, n, tail, coeffs)


def evaluate(d: PolyhedralDivisor, u) -> QDivisor:
    return d.evaluate(u)


def convexity_check(d: PolyhedralDivisor, samples=()) -> bool:
    return d.convexity_check(samples)


def evaluation_table_convex(table: dict) -> bool:
    """Convexity of a raw weight -> divisor table.

    Checks D(u) + D(u') <= D(u + u') for every pair of table weights whose
    sum is again a table key.  A divisor built from polyhedral coefficients
    passes automatically; a hand-built table need not.
    """
    keys = list(table)
    for u in keys:
        for v in keys:
            w = tuple(a + b for a, b in zip(u, v))
            if w not in table:
                continue
            if not table[u].add(table[v]).leq(table[w]):
                return False
    return True


def is_proper(d: PolyhedralDivisor) -> PropernessReport:
    return d.is_proper()


def degree_polyhedron(d: PolyhedralDivisor) -> Polyhedron:
    return d.degree_polyhedron()


def pullback(d: PolyhedralDivisor, triple: PullbackTriple) -> PolyhedralDivisor:
    return d.pullback(triple)


def _toric_base_pullback(d, base_map: LatticeMap, new_base: BaseVariety):
    """psi^* for a toric morphism of bases, via ray-image multiplicities."""
    if d.base.kind != "toric" or new_base is None or new_base.kind != "toric":
        raise IndeterminateBaseMap("base pullback implemented for toric maps only")
    rows = base_map.matrix
    coeffs = {}
    for r in new_base.rays():
        img = tuple(vdot(row, r) for row in rows)
        carrier = None
        for c in d.base.fan:
            if c.contains(img):
                for f in c.faces():
                    if f.contains(img) and (carrier is None or f.dim() < carrier.dim()):
                        carrier = f
        if carrier is None:
            raise IndeterminateBaseMap(f"ray image {img} misses the target fan")
        rays = list(carrier.rays)
        if not rays:
            continue
        lam = solve([list(x) for x in zip(*rays)], img)
        if lam is None or any(x < 0 for x in lam):
            raise IndeterminateBaseMap("ray image is not a nonnegative ray combination")
        total = None
        for mult, rho in zip(lam, rays):
            if mult == 0:
                continue
            p = d.coefficient(ray_label(rho, d.base.ray_degree(rho))).scale(mult)
            total = p if total is None else total.minkowski(p)
        if total is not None and total != d.tail.as_polyhedron():
            coeffs[new_base.ray(r)] = total
    # declared primes of the source pull back by matching label
    for label, p in d.coeffs.items():
        if label.kind == "declared":
            coeffs[label] = p
    return PolyhedralDivisor(new_base, d.n, d.tail, coeffs)


def as_curve_divisor(d: PolyhedralDivisor) -> PolyhedralDivisor:
    """Move a divisor on a one-dimensional toric base to the projective line.

    The ray +1 becomes the point 0 and the ray -1 the point at infinity; an
    affine base (single ray) leaves the other point unmarked.
    """
    from .base import INF, point_label

    base = d.base
    if base.kind != "toric" or base.rank_n != 1:
        raise UnsupportedBase("curve conversion needs a one-dimensional toric base")
    p1 = BaseVariety.projective_line()
    mapping = {(Fraction(1),): point_label(0), (Fraction(-1),): point_label(INF)}
    coeffs = {}
    for label, p in d.coeffs.items():
        if label.kind != "ray":
            raise UnsupportedBase("only invariant labels convert")
        coeffs[mapping[label.ray]] = p
    return PolyhedralDivisor(p1, d.n, d.tail, coeffs)


# ---------------------------------------------------------------------------
# toric downgrade
# ---------------------------------------------------------------------------


def toric_downgrade(delta: Cone, sub: LatticeMap):
    """Describe the toric variety of `delta` under the subtorus of `sub`.

    `sub` embeds the subtorus cocharacter lattice Nbar into the big lattice.
    Returns (base, divisor, report): the toric base on the image fan of the
    quotient projection, the polyhedral divisor with fiber coefficients, and
    its properness report.
    """
    if not delta.is_pointed():
        raise ValueError("toric downgrade needs a pointed cone")
    ntilde = delta.n
    k = sub.source.rank
    sub_cols = [[int(sub.matrix[r][c]) for c in range(k)] for r in range(ntilde)]
    # quotient projection killing the sublattice, from a splitting
    quot_rank = ntilde - k
    big = Lattice(ntilde, "Ntilde")
    # build the projection via smith_split of the transpose route:
    # find Q with Q . sub = 0 and Q surjective onto Z^{ntilde-k}
    from .linalg import smith_normal_form

    u, dmat, v = smith_normal_form(sub_cols)
    diag = [dmat[i][i] for i in range(min(ntilde, k))]
    if any(abs(x) != 1 for x in diag[:k]):
        raise NotSplit("sublattice is not saturated (torsion quotient)")
    # rows k.. of U kill the image and are unimodular onto the quotient
    q_rows = [u[i] for i in range(k, ntilde)]
    quot = Lattice(quot_rank, "Nquot")
    q_map = LatticeMap(big, quot, q_rows)
    # retraction onto Nbar: s = V . D^+ . U (first k rows pattern)
    dplus = [[1 if (i == j and i < k) else 0 for j in range(ntilde)] for i in range(k)]
    vd = [[sum(v[i][t] * dplus[t][j] for t in range(k)) for j in range(ntilde)] for i in range(k)]
    s_rows = [
        [sum(vd[i][t] * u[t][j] for t in range(ntilde)) for j in range(ntilde)]
        for i in range(k)
    ]
    s_map = LatticeMap(big, sub.source, s_rows)
    # image fan: chamber complex of the projected faces
    pieces = [f.as_polyhedron().map_image(q_rows) for f in delta.faces()]
    chambers = chamber_complex(pieces)
    maximal = list(chambers.cells)
    cones = []
    for c in maximal:
        t = c.tail()
        if not t.is_pointed():
            raise UnsupportedBase("image fan is not pointed; base is not a toric variety")
        cones.append(t)
    base = BaseVariety.toric(cones, name="chow-quotient")
    # divisor: coefficient at each ray = retracted fiber over its generator
    dpoly = delta.as_polyhedron()
    fiber0 = map_fiber_slice(dpoly, q_rows, (Fraction(0),) * quot_rank, s_rows)
    tail = Cone.from_rays(list(fiber0.rays), list(fiber0.lines), k)
    coeffs = {}
    for r in base.rays():
        p = map_fiber_slice(dpoly, q_rows, r, s_rows)
        coeffs[base.ray(r)] = p
    divisor = PolyhedralDivisor(base, k, tail, coeffs)
    return base, divisor, divisor.is_proper()
