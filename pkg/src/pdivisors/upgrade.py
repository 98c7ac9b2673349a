"""Enlarging the acting torus: the tailcone/coefficient construction.

Input: a polyhedral divisor whose coefficients attach to the invariant
primes (tail rays and slice vertices) of a divisorial fan describing the
base.  Output: a polyhedral divisor in the product lattice over the fan's
own base, together with a properness report and hypothesis flags.  The
construction accepts fans that are not contraction-free and simply reports
the violated hypotheses; the failure mode itself is informative output.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .base import INF, BaseVariety
from .errors import NoDegreeMap
from .linalg import vec, zero_vec
from .pdivisor import PolyhedralDivisor, PropernessReport
from .polyhedra import Cone, Polyhedron
from .tvariety import DivisorialFan, invariant_prime_divisors


class InvariantPDivisorOnFan:
    """Polyhedral divisor with coefficients on the invariant primes of a fan.

    ray_coeffs maps tail rays to polyhedra in the acting lattice N,
    vertex_coeffs maps (prime, vertex) pairs to polyhedra or the empty set;
    missing keys default to the tailcone.  The vertex coefficient at (P, v)
    weights the Weil divisor mu(v) D_{P,v}.
    """

    def __init__(self, fan: DivisorialFan, n: int, tail: Cone, ray_coeffs=None,
                 vertex_coeffs=None, rays=None, verts=None):
        self.fan = fan
        self.n = n
        self.tail = tail
        if rays is None or verts is None:
            frays, fverts = invariant_prime_divisors(fan)
            rays = frays if rays is None else rays
            verts = fverts if verts is None else verts
        self.rays = tuple(vec(r) for r in rays)
        self.verts = {label: tuple(vec(v) for v in vs) for label, vs in verts.items()}
        trivial = tail.as_polyhedron()
        rc = {}
        for r, p in (ray_coeffs or {}).items():
            r = vec(r)
            if r not in set(self.rays):
                raise ValueError(f"{r} is not an invariant ray of the fan")
            if p.empty:
                raise ValueError("ray coefficients must be nonempty")
            if p.tail() != tail:
                raise ValueError("ray coefficient tail differs from the tailcone")
            if p != trivial:
                rc[r] = p
        self.ray_coeffs = rc
        vc = {}
        for (label, v), p in (vertex_coeffs or {}).items():
            key = (label, vec(v))
            if key[0] not in self.verts or key[1] not in self.verts[key[0]]:
                raise ValueError(f"({label.id}, {v}) is not an invariant vertex")
            if not p.empty:
                if p.tail() != tail:
                    raise ValueError("vertex coefficient tail differs from the tailcone")
                if p == trivial:
                    continue
            vc[key] = p
        self.vertex_coeffs = vc

    def ray_coefficient(self, r) -> Polyhedron:
        return self.ray_coeffs.get(vec(r), self.tail.as_polyhedron())

    def vertex_coefficient(self, label, v) -> Polyhedron:
        return self.vertex_coeffs.get((label, vec(v)), self.tail.as_polyhedron())

    def __eq__(self, other):
        return (
            isinstance(other, InvariantPDivisorOnFan)
            and self.fan == other.fan
            and self.n == other.n
            and self.tail == other.tail
            and self.ray_coeffs == other.ray_coeffs
            and self.vertex_coeffs == other.vertex_coeffs
        )

    def __hash__(self):
        return hash(
            (
                self.fan,
                self.n,
                self.tail,
                tuple(sorted(self.ray_coeffs.items())),
                tuple(sorted(((l.id, v), p) for (l, v), p in self.vertex_coeffs.items())),
            )
        )

    def weights_at(self, u):
        """(ray -> a_rho(u), (label, v) -> b(u) or INF) at a weight u."""
        u = vec(u)
        ra = {}
        for r in self.rays:
            p = self.ray_coefficient(r)
            ra[r] = min(vdotv(x, u) for x in p.vertices)
        vb = {}
        for label, vs in self.verts.items():
            for v in vs:
                p = self.vertex_coefficient(label, v)
                if p.empty:
                    vb[(label, v)] = INF
                else:
                    vb[(label, v)] = min(vdotv(x, u) for x in p.vertices)
        return ra, vb


def vdotv(a, b):
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def upgrade_tailcone(d: InvariantPDivisorOnFan) -> Cone:
    """pos of (tail x 0) together with each ray coefficient at its height."""
    nprime = d.fan.n
    gens = []
    lines = []
    for g in d.tail.rays:
        gens.append(tuple(g) + zero_vec(nprime))
    for l in d.tail.lines:
        lines.append(tuple(l) + zero_vec(nprime))
    for r in d.rays:
        p = d.ray_coefficient(r)
        for w in p.vertices:
            gens.append(tuple(w) + tuple(r))
        for ry in p.rays:
            gens.append(tuple(ry) + zero_vec(nprime))
        for l in p.lines:
            lines.append(tuple(l) + zero_vec(nprime))
    return Cone.from_rays(gens, lines, d.n + nprime)


def upgrade_coefficients(d: InvariantPDivisorOnFan) -> PolyhedralDivisor:
    """conv of the vertex coefficients at their heights, plus the tailcone."""
    sigma_t = upgrade_tailcone(d)
    nprime = d.fan.n
    ntot = d.n + nprime
    sig_poly = sigma_t.as_polyhedron()
    coeffs = {}
    for label, vs in d.verts.items():
        verts = []
        rays = []
        lines = []
        any_nonempty = False
        for v in vs:
            p = d.vertex_coefficient(label, v)
            if p.empty:
                continue
            any_nonempty = True
            for w in p.vertices:
                verts.append(tuple(w) + tuple(v))
            for ry in p.rays:
                rays.append(tuple(ry) + zero_vec(nprime))
            for l in p.lines:
                lines.append(tuple(l) + zero_vec(nprime))
        if not any_nonempty:
            coeffs[label] = Polyhedron.empty_polyhedron(ntot)
            continue
        hullpart = Polyhedron.from_generators(verts, rays, lines, ntot)
        coeffs[label] = hullpart.minkowski(sig_poly)
    return PolyhedralDivisor(d.fan.base, ntot, sigma_t, coeffs)


@dataclass
class UpgradeResult:
    divisor: PolyhedralDivisor
    report: PropernessReport
    contraction_free: bool
    base_smooth: bool

    @property
    def hypotheses_hold(self) -> bool:
        return self.contraction_free and self.base_smooth


def upgrade(d: InvariantPDivisorOnFan) -> UpgradeResult:
    """Tailcone and coefficients combined, with hypothesis bookkeeping."""
    out = upgrade_coefficients(d)
    fan = d.fan
    cf = fan.is_contraction_free()
    if fan.base.kind == "toric":
        smooth = fan.base.fan_is_smooth()
    else:
        smooth = True  # curves here are P^1 or opens in it
    return UpgradeResult(out, out.is_proper(), cf, smooth)


def correct_pic_z(d: PolyhedralDivisor) -> tuple[PolyhedralDivisor, PropernessReport]:
    """Enlarge the tailcone by the cone over the degree polyhedron.

    Needs a projective base with a degree map whose effective cone is the
    nonnegative ray; the result evaluates to nonnegative-degree divisors
    everywhere and X is unchanged.
    """
    base = d.base
    if not (base.kind == "P1" or (base.kind == "toric" and base.has_degree_map())):
        raise NoDegreeMap("the correction needs a projective base with degrees")
    degp = d.degree_polyhedron()
    gens = list(degp.vertices) + list(degp.rays)
    gens = [g for g in gens if any(x != 0 for x in g)]
    sigma_hat = Cone.from_rays(gens, degp.lines, d.n)
    new_tail = Cone.from_rays(
        list(d.tail.rays) + list(sigma_hat.rays),
        list(d.tail.lines) + list(sigma_hat.lines),
        d.n,
    )
    hat_poly = sigma_hat.as_polyhedron()
    coeffs = {}
    for label, p in d.coeffs.items():
        coeffs[label] = p if p.empty else p.minkowski(hat_poly)
    out = PolyhedralDivisor(d.base, d.n, new_tail, coeffs)
    return out, out.is_proper()


# ---------------------------------------------------------------------------
# resolution of a toric base by stellar subdivision
# ---------------------------------------------------------------------------


def resolve_toric(base: BaseVariety, max_rounds: int = 64) -> BaseVariety:
    """Stellar-subdivide simplicial non-smooth cones until the fan is smooth.

    The subdivision point is the lexicographically least nonzero lattice
    point of the half-open generator parallelotope of the lexicographically
    first non-smooth maximal cone; deterministic but not canonical.
    """
    from .base import cone_is_smooth

    if base.kind != "toric":
        return base
    cones = list(base.fan)
    for _ in range(max_rounds):
        bad = sorted(
            (c for c in cones if not cone_is_smooth(c)), key=lambda c: c.rays
        )
        if not bad:
            break
        c = bad[0]
        w = _parallelotope_point(c)
        cones = _stellar(cones, w)
    else:
        raise ValueError("resolution did not terminate in the round budget")
    return BaseVariety.toric(cones, semiprojective=base.semiprojective, name=base.name + "~")


def _parallelotope_point(c: Cone):
    from itertools import product

    rays = list(c.rays)
    k = len(rays)
    if k != len(set(rays)) or k == 0:
        raise ValueError("stellar step needs a simplicial cone")
    # lattice points sum lambda_i r_i with 0 <= lambda_i < 1, denominators
    # bounded by the index; scan a rational grid exactly
    from .linalg import det as _det

    denom = None
    sq = [list(r) for r in rays]
    if len(sq) == c.n:
        denom = abs(int(_det(sq)))
    grid = denom if denom else 12
    candidates = []
    for coeffs in product(range(grid), repeat=k):
        if not any(coeffs):
            continue
        lam = [Fraction(x, grid) for x in coeffs]
        pt = tuple(
            sum(l * r[i] for l, r in zip(lam, rays)) for i in range(c.n)
        )
        if all(x.denominator == 1 for x in pt):
            candidates.append(tuple(int(x) for x in pt))
    if not candidates:
        raise ValueError("no subdivision point found (cone already smooth?)")
    from .linalg import primitive

    return vec(primitive(sorted(candidates)[0]))


def _stellar(cones, w):
    out = []
    for c in cones:
        if not c.contains(w):
            out.append(c)
            continue
        for f in c.faces():
            if f.contains(w) or f.dim() != c.dim() - 1:
                continue
            out.append(Cone.from_rays(list(f.rays) + [w], f.lines, c.n))
    return out
