"""The total-coordinate-ring divisor of a complexity-one variety.

From a contraction-free fan over a base with class group Z, an exact
sequence presents the dual class group of X as the kernel of an integer
matrix built from slice vertices and tail rays.  A splitting of that
sequence produces a raw divisor with singleton coefficients, its upgrade to
the base, and the degree correction making the result proper.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .base import point_label
from .errors import FormsDisagree, NoDegreeMap, TorsionCokernel
from .lattice import Lattice, LatticeMap, multiplicity, smith_split
from .linalg import mat_vec, smith_normal_form, vec
from .pdivisor import PolyhedralDivisor
from .polyhedra import Cone, Polyhedron
from .tvariety import DivisorialFan, invariant_prime_divisors
from .upgrade import InvariantPDivisorOnFan, correct_pic_z, upgrade_coefficients


@dataclass
class CoxData:
    fan: DivisorialFan
    primes: tuple  # chosen prime labels, ordered
    pairs: tuple  # ordered (label, vertex) pairs
    rays: tuple  # ordered tail rays
    quotient_rows: tuple  # Z^P -> Z^(p-1) killing the degree vector
    pi: LatticeMap  # Z^(pairs+rays) -> Z^(p-1) + N
    section: LatticeMap  # t*: target -> middle
    retraction: LatticeMap  # s: middle -> Cl(X)* coordinates
    kernel: LatticeMap  # Cl(X)* -> middle
    cl_rank: int
    asserted_flags: dict = field(default_factory=dict)

    def basis_vector(self, index: int):
        m = self.pi.source.rank
        return tuple(Fraction(1) if i == index else Fraction(0) for i in range(m))


def cox_sequence(fan: DivisorialFan, primes=None, *, canonical=True, pivot_order=None,
                 asserted_flags=None) -> CoxData:
    """Assemble and split the presentation of the class-group dual.

    `primes` must include every prime with a nontrivial slice; when omitted
    the marked primes are used (padded to two on the projective line so the
    degree quotient is nontrivial).  Smith pivots can be permuted to probe
    section dependence; the kernel basis is always canonical.
    """
    base = fan.base
    if base.kind != "P1":
        raise NoDegreeMap("the construction needs a base with class group Z")
    rays, verts = invariant_prime_divisors(fan)
    if primes is None:
        primes = list(fan.marked_primes())
    primes = [point_label(p) if not hasattr(p, "kind") else p for p in primes]
    for label in fan.marked_primes():
        if fan.slice_of(label).cells and label not in primes:
            raise ValueError(f"primes must contain the marked prime {label.id}")
    if not primes:
        raise ValueError("the prime set must be nonempty")
    if len(primes) < 2:
        extra = point_label(
            next(
                Fraction(k)
                for k in range(0, 50)
                if point_label(Fraction(k)) not in set(primes)
            )
        )
        primes.append(extra)
    primes = sorted(primes, key=lambda l: l.id)
    zero = (Fraction(0),) * fan.n
    pairs = []
    for label in primes:
        vs = verts.get(label, (zero,))
        for v in vs:
            pairs.append((label, v))
    pairs = tuple(pairs)
    rays = tuple(rays)
    p = len(primes)
    n = fan.n
    # quotient Z^P / Z * (deg P): degrees are 1 on P^1
    degs = [[1] for _ in range(p)]
    u, dmat, _ = smith_normal_form(degs)
    diag = [dmat[i][i] for i in range(min(p, 1))]
    if any(abs(x) != 1 for x in diag if x != 0):
        raise TorsionCokernel("degree vector is not primitive")
    q_rows = [u[i] for i in range(1, p)]
    # the presentation matrix
    cols = []
    for label, v in pairs:
        mu = multiplicity(v)
        e_p = [Fraction(0)] * p
        e_p[primes.index(label)] = Fraction(mu)
        q_part = [sum(Fraction(r[j]) * e_p[j] for j in range(p)) for r in q_rows]
        n_part = [mu * x for x in v]
        cols.append(q_part + n_part)
    for r in rays:
        cols.append([Fraction(0)] * (p - 1) + list(r))
    m = len(cols)
    target_rank = (p - 1) + n
    matrix = [[cols[j][i] for j in range(m)] for i in range(target_rank)]
    mid = Lattice(m, "E")
    tgt = Lattice(target_rank, "Q+N")
    pi = LatticeMap(mid, tgt, matrix)
    try:
        s_star, t, kernel = smith_split(pi, canonical=canonical, pivot_order=pivot_order)
    except Exception as exc:  # invariant factors beyond 1 mean torsion
        raise TorsionCokernel(str(exc))
    cl_rank = m - target_rank
    assert cl_rank == len(pairs) + len(rays) - (p - 1) - n
    return CoxData(
        fan=fan,
        primes=tuple(primes),
        pairs=pairs,
        rays=rays,
        quotient_rows=tuple(tuple(Fraction(x) for x in r) for r in q_rows),
        pi=pi,
        section=s_star,
        retraction=t,
        kernel=kernel,
        cl_rank=cl_rank,
        asserted_flags=dict(asserted_flags or {}),
    )


def cox_raw(cd: CoxData) -> InvariantPDivisorOnFan:
    """Singleton coefficients from the retraction; far from proper."""
    k = cd.cl_rank
    tail = Cone.zero(k)
    ray_coeffs = {}
    vertex_coeffs = {}
    idx = 0
    for label, v in cd.pairs:
        mu = multiplicity(v)
        e = cd.basis_vector(idx)
        pt = cd.retraction(e)
        vertex_coeffs[(label, v)] = Polyhedron.point(tuple(x / mu for x in pt))
        idx += 1
    for r in cd.rays:
        e = cd.basis_vector(idx)
        ray_coeffs[r] = Polyhedron.point(cd.retraction(e))
        idx += 1
    verts = {}
    for label, v in cd.pairs:
        verts.setdefault(label, []).append(v)
    return InvariantPDivisorOnFan(
        cd.fan,
        k,
        tail,
        ray_coeffs=ray_coeffs,
        vertex_coeffs=vertex_coeffs,
        rays=cd.rays,
        verts=verts,
    )


def cox_upgrade(cd: CoxData) -> PolyhedralDivisor:
    """Upgrade of the raw divisor; both displayed forms computed and compared."""
    raw = cox_raw(cd)
    first = upgrade_coefficients(raw)
    second = _second_form(cd)
    if first != second:
        raise FormsDisagree("the two coefficient formulas disagree")
    return first


def _second_form(cd: CoxData) -> PolyhedralDivisor:
    """conv{e(P,v)/mu} + Q_{>=0}^rays - t~*(e(P)bar), pushed into Cl* + N."""
    k = cd.cl_rank
    n = cd.fan.n
    m = cd.pi.source.rank
    p = len(cd.primes)
    # derived second-sequence cosection: the quotient-block columns of t*
    # (sections of the quotient part), i.e. t~*(y) = t*(y, 0_N)
    def ttilde_star(yq):
        full = tuple(yq) + (Fraction(0),) * n
        return cd.section(full)

    # push into Cl(X)* + N coordinates via (retraction, N-part of pi)
    push_rows = list(cd.retraction.matrix) + list(cd.pi.matrix[p - 1:])
    npairs = len(cd.pairs)
    tail_gens = [list(cd.basis_vector(npairs + j)) for j in range(len(cd.rays))]
    per_prime_points = {}
    for i, (label, v) in enumerate(cd.pairs):
        mu = multiplicity(v)
        pt = tuple(x / mu for x in cd.basis_vector(i))
        per_prime_points.setdefault(label, []).append(pt)
    out = {}
    qpart_rows = cd.pi.matrix[: p - 1]
    for label in cd.primes:
        pts = per_prime_points.get(label, [])
        idx = cd.primes.index(label)
        yq = [r[idx] for r in cd.quotient_rows]
        shift = ttilde_star(yq)
        verts = [tuple(a - b for a, b in zip(pt, shift)) for pt in pts]
        # the shifted points lie in the kernel of the quotient part
        for w in verts:
            img = mat_vec(qpart_rows, vec(w))
            if any(x != 0 for x in img):
                raise FormsDisagree("shifted generators miss the kernel sublattice")
        poly = Polyhedron.from_generators(verts, tail_gens, (), m)
        out[label] = poly.map_image(push_rows)
    sigma_t = Cone.from_rays([mat_vec(push_rows, vec(g)) for g in tail_gens], n=k + n)
    return PolyhedralDivisor(cd.fan.base, k + n, sigma_t, out)


def cox_correct(cd: CoxData):
    """Degree correction of the upgraded divisor, with properness report."""
    up = cox_upgrade(cd)
    out, rep = correct_pic_z(up)
    return out, rep
