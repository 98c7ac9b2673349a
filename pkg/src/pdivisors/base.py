"""Base varieties and Q-divisors with infinity coefficients.

Supported bases are exactly the desk-scale ones the constructions need: the
projective line, open subsets of it, and toric varieties given by fans.
Divisor coefficients live in Q union {infinity}; every predicate silently
restricts to the locus (the complement of the infinity-coefficient primes).

Rational functions on the projective line are formal products of linear
factors; a factor at the infinity point means 1/x, so div(f) always has
degree zero.  On toric bases functions are products of characters and
declared binomial primes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    NoDegreeMap,
    NonIntegral,
    UnsupportedBase,
    ZeroFunction,
)
from .linalg import Vec, frac, integral_solve, rank, solve, vdot, vec
from .polyhedra import Cone, Polyhedron


class _PlusInfinity:
    """The single infinity used in divisor coefficients."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "inf"

    def __eq__(self, other):
        return isinstance(other, _PlusInfinity)

    def __hash__(self):
        return hash("pdiv-infinity")

    def __gt__(self, other):
        return not isinstance(other, _PlusInfinity)

    def __ge__(self, other):
        return True

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return isinstance(other, _PlusInfinity)

    def __add__(self, other):
        return self

    __radd__ = __add__

    def __mul__(self, other):
        if isinstance(other, _PlusInfinity) or other > 0:
            return self
        raise ValueError("infinity times a nonpositive scalar is undefined here")

    __rmul__ = __mul__

    def __neg__(self):
        raise ValueError("negative infinity never occurs in divisor coefficients")


INF = _PlusInfinity()


def is_inf(x) -> bool:
    return isinstance(x, _PlusInfinity)


# ---------------------------------------------------------------------------
# prime divisor labels and base varieties
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PrimeDivisorLabel:
    """A prime divisor on a base variety.

    kind "point": a point of P^1 (geometry = rational number or INF).
    kind "ray": a torus-invariant divisor of a toric base (geometry = ray).
    kind "declared": a non-invariant prime on a toric base, carried with an
    invariant linear-equivalence representative (ray -> coefficient) so that
    class-level predicates can substitute it.
    """

    id: str
    kind: str
    point: object = None
    ray: tuple | None = None
    class_rep: tuple = ()  # tuple of (ray, Fraction) pairs for declared kind
    degree: Fraction | None = None

    def degree_or_raise(self) -> Fraction:
        if self.degree is None:
            raise NoDegreeMap(f"prime {self.id} has no declared degree")
        return self.degree


def point_label(x) -> PrimeDivisorLabel:
    x = INF if is_inf(x) else frac(x)
    pid = "inf" if is_inf(x) else str(x)
    return PrimeDivisorLabel(id=pid, kind="point", point=x, degree=Fraction(1))


def ray_label(ray, degree=None) -> PrimeDivisorLabel:
    r = vec(ray)
    pid = "ray(" + ",".join(str(x) for x in r) + ")"
    return PrimeDivisorLabel(
        id=pid, kind="ray", ray=r, degree=frac(degree) if degree is not None else None
    )


def declared_label(name, class_rep, degree=None) -> PrimeDivisorLabel:
    rep = tuple(sorted((vec(r), frac(c)) for r, c in class_rep))
    return PrimeDivisorLabel(
        id=name,
        kind="declared",
        class_rep=rep,
        degree=frac(degree) if degree is not None else None,
    )


def binomial_label(name, a, b, rays, degree=None) -> PrimeDivisorLabel:
    """Prime cut out by the (assumed irreducible) binomial chi^a - chi^b.

    Its divisor class representative follows from
    div(chi^a - chi^b) = D + sum_rho min(<v_rho,a>, <v_rho,b>) D_rho.
    """
    a, b = vec(a), vec(b)
    rep = []
    for r in rays:
        r = vec(r)
        m = min(vdot(r, a), vdot(r, b))
        if m != 0:
            rep.append((r, -m))
    return declared_label(name, rep, degree)


class BaseVariety:
    """P^1, an open subset of P^1, or a toric variety given by a fan."""

    def __init__(self, kind, removed=(), fan=(), rank_n=0, semiprojective=True, name=""):
        self.kind = kind  # "P1" | "open_p1" | "toric"
        self.removed = tuple(removed)
        self.fan = tuple(fan)  # maximal cones (Cone objects)
        self.rank_n = rank_n
        self.semiprojective = semiprojective
        self.name = name or kind
        self._declared: dict[str, PrimeDivisorLabel] = {}
        if kind == "open_p1" and not removed:
            raise ValueError("an open subset of P^1 must remove at least one point")

    # -- constructors ----------------------------------------------------

    @staticmethod
    def projective_line() -> "BaseVariety":
        return BaseVariety("P1", name="P1")

    @staticmethod
    def open_projective_line(removed) -> "BaseVariety":
        pts = tuple(INF if is_inf(x) else frac(x) for x in removed)
        return BaseVariety("open_p1", removed=pts, name="P1 minus points")

    @staticmethod
    def toric(max_cones, degrees=None, semiprojective=True, name="toric") -> "BaseVariety":
        cones = tuple(max_cones)
        if not cones:
            raise ValueError("a toric base needs at least one cone")
        n = cones[0].n
        for c in cones:
            if not c.is_pointed():
                raise UnsupportedBase("toric base fans must be pointed")
        bv = BaseVariety("toric", fan=cones, rank_n=n, semiprojective=semiprojective, name=name)
        bv._degrees = {}
        if degrees:
            for r, d in degrees.items():
                bv._degrees[vec(r)] = frac(d)
        return bv

    # -- structure --------------------------------------------------------

    def __eq__(self, other):
        return (
            isinstance(other, BaseVariety)
            and self.kind == other.kind
            and self.removed == other.removed
            and self.fan == other.fan
        )

    def __hash__(self):
        return hash((self.kind, self.removed, self.fan))

    def __repr__(self):
        return f"BaseVariety({self.name})"

    def is_projective(self) -> bool:
        if self.kind == "P1":
            return True
        if self.kind == "toric":
            return self.fan_is_complete()
        return False

    def is_affine(self) -> bool:
        if self.kind == "open_p1":
            return True
        if self.kind == "toric":
            return len(self.fan) == 1
        return False

    def rays(self) -> list[Vec]:
        out = {}
        for c in self.fan:
            for r in c.rays:
                out[r] = None
        return sorted(out)

    def ray_degree(self, ray) -> Fraction | None:
        return getattr(self, "_degrees", {}).get(vec(ray))

    def has_degree_map(self) -> bool:
        if self.kind == "P1":
            return True
        if self.kind == "toric":
            degs = getattr(self, "_degrees", {})
            return bool(degs) and all(vec(r) in degs for r in self.rays())
        return False

    def label_degree(self, label: PrimeDivisorLabel) -> Fraction:
        if self.kind == "P1":
            return Fraction(1)
        if label.degree is not None:
            return label.degree
        if label.kind == "ray":
            d = self.ray_degree(label.ray)
            if d is not None:
                return d
        raise NoDegreeMap(f"no degree for prime {label.id} on {self.name}")

    def declare_prime(self, label: PrimeDivisorLabel):
        if self.kind != "toric":
            raise UnsupportedBase("declared primes only live on toric bases")
        self._declared[label.id] = label
        return label

    def point(self, x) -> PrimeDivisorLabel:
        if self.kind not in ("P1", "open_p1"):
            raise UnsupportedBase("point labels only live on curve bases")
        x = INF if is_inf(x) else frac(x)
        if self.kind == "open_p1" and x in self.removed:
            raise ValueError(f"point {x} was removed from the base")
        return point_label(x)

    def ray(self, r) -> PrimeDivisorLabel:
        if self.kind != "toric":
            raise UnsupportedBase("ray labels live on toric bases")
        r = vec(r)
        if r not in set(self.rays()):
            raise ValueError(f"{r} is not a ray of the fan")
        return ray_label(r, self.ray_degree(r))

    # -- fan predicates ----------------------------------------------------

    def fan_is_complete(self) -> bool:
        if self.kind != "toric":
            return False
        n = self.rank_n
        maxes = [c for c in self.fan]
        if any(c.dim() != n for c in maxes):
            return False
        # complete iff no maximal cone has a boundary facet
        for c in maxes:
            for a in c.ineqs:
                facet = Cone.from_inequalities(c.ineqs, list(c.eqs) + [a], c.n)
                shared = sum(1 for d in maxes if d.contains_cone(facet))
                if shared < 2:
                    return False
        return True

    def fan_is_smooth(self) -> bool:
        if self.kind != "toric":
            return True
        for c in self.fan:
            if not cone_is_smooth(c):
                return False
        return True

    def subfan_without_rays(self, removed_rays) -> list[Cone]:
        removed = {vec(r) for r in removed_rays}
        keep = []
        for c in self.fan:
            faces = [c] if not (set(c.rays) & removed) else [
                f for f in c.faces() if not (set(f.rays) & removed)
            ]
            keep.extend(faces)
        out = []
        for c in keep:
            if not any(d is not c and d.contains_cone(c) and d != c for d in keep):
                out.append(c)
        uniq = []
        for c in sorted(out, key=lambda c: (c.rays, c.lines)):
            if c not in uniq:
                uniq.append(c)
        return uniq


def cone_is_smooth(c: Cone) -> bool:
    """Simplicial with an extendable lattice basis (all SNF factors 1)."""
    if not c.is_pointed():
        return False
    k = len(c.rays)
    if k == 0:
        return True
    if rank(list(c.rays)) != k:
        return False
    from .linalg import smith_normal_form

    a = [[int(x) for x in r] for r in c.rays]
    _, d, _ = smith_normal_form(a)
    diag = [d[i][i] for i in range(min(len(d), len(d[0])))]
    return all(abs(x) == 1 for x in diag[:k])


# ---------------------------------------------------------------------------
# divisors
# ---------------------------------------------------------------------------


class QDivisor:
    """Finite formal sum of primes with coefficients in Q union {INF}."""

    def __init__(self, base: BaseVariety, coeffs=None):
        self.base = base
        data = {}
        for label, c in (coeffs or {}).items():
            c = c if is_inf(c) else frac(c)
            if not is_inf(c) and c == 0:
                continue
            data[label] = c
        self.coeffs = dict(sorted(data.items(), key=lambda kv: kv[0].id))

    def __eq__(self, other):
        return (
            isinstance(other, QDivisor)
            and self.base == other.base
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.base, tuple(self.coeffs.items())))

    def __repr__(self):
        if not self.coeffs:
            return "0"
        return " + ".join(f"({c})*{l.id}" for l, c in self.coeffs.items())

    def coefficient(self, label) -> Fraction:
        return self.coeffs.get(label, Fraction(0))

    def support(self):
        return list(self.coeffs)

    def finite_part(self) -> dict:
        return {l: c for l, c in self.coeffs.items() if not is_inf(c)}

    def infinity_primes(self):
        return [l for l, c in self.coeffs.items() if is_inf(c)]

    def add(self, other: "QDivisor") -> "QDivisor":
        out = dict(self.coeffs)
        for l, c in other.coeffs.items():
            if l in out:
                if is_inf(out[l]) or is_inf(c):
                    out[l] = INF
                else:
                    out[l] = out[l] + c
            else:
                out[l] = c
        return QDivisor(self.base, out)

    def scale(self, s) -> "QDivisor":
        s = frac(s)
        if s == 0:
            return QDivisor(self.base, {})
        if s < 0 and self.infinity_primes():
            raise ValueError("cannot negate an infinity coefficient")
        return QDivisor(self.base, {l: (c if is_inf(c) else s * c) for l, c in self.coeffs.items()})

    def floor(self) -> "QDivisor":
        return QDivisor(
            self.base,
            {l: (c if is_inf(c) else Fraction(math.floor(c))) for l, c in self.coeffs.items()},
        )

    def is_effective(self) -> bool:
        return all(is_inf(c) or c >= 0 for c in self.coeffs.values())

    def leq(self, other: "QDivisor") -> bool:
        labels = set(self.coeffs) | set(other.coeffs)
        for l in labels:
            a = self.coeffs.get(l, Fraction(0))
            b = other.coeffs.get(l, Fraction(0))
            if is_inf(a) and not is_inf(b):
                return False
            if is_inf(b):
                continue
            if a > b:
                return False
        return True


def degree(d: QDivisor):
    """Sum of coefficient * degree(P); INF if any coefficient is infinite."""
    base = d.base
    if base.kind == "P1":
        pass
    elif base.kind == "toric" and base.fan_is_complete() and base.has_degree_map():
        pass
    else:
        raise NoDegreeMap(f"base {base.name} is not projective with a degree map")
    if d.infinity_primes():
        return INF
    total = Fraction(0)
    for l, c in d.coeffs.items():
        total += c * base.label_degree(l)
    return total


# ---------------------------------------------------------------------------
# rational functions
# ---------------------------------------------------------------------------


class CurveFunction:
    """Formal product prod (x - a_i)^{n_i} on P^1; a factor at INF is 1/x."""

    def __init__(self, factors=None):
        data = {}
        for a, k in (factors or {}).items():
            a = INF if is_inf(a) else frac(a)
            k = int(k)
            if k:
                data[a] = data.get(a, 0) + k
        self.factors = {a: k for a, k in data.items() if k}

    @staticmethod
    def one() -> "CurveFunction":
        return CurveFunction({})

    @staticmethod
    def coordinate() -> "CurveFunction":
        return CurveFunction({Fraction(0): 1})

    def is_one(self) -> bool:
        return not self.factors

    def mul(self, other: "CurveFunction") -> "CurveFunction":
        out = dict(self.factors)
        for a, k in other.factors.items():
            out[a] = out.get(a, 0) + k
        return CurveFunction(out)

    def inverse(self) -> "CurveFunction":
        return CurveFunction({a: -k for a, k in self.factors.items()})

    def power(self, k: int) -> "CurveFunction":
        return CurveFunction({a: k * n for a, n in self.factors.items()})

    def order_at(self, x) -> int:
        x = INF if is_inf(x) else frac(x)
        fin = {a: k for a, k in self.factors.items() if not is_inf(a)}
        at_inf = self.factors.get(INF, 0)
        if is_inf(x):
            return at_inf - sum(fin.values())
        out = fin.get(x, 0)
        if x == 0:
            out -= at_inf
        return out

    def divisor(self, base: BaseVariety) -> QDivisor:
        pts = set(self.factors)
        pts.add(INF)
        if any(not is_inf(a) and a == 0 for a in self.factors) or INF in self.factors:
            pts.add(Fraction(0))
        coeffs = {}
        for a in pts:
            o = self.order_at(a)
            if o:
                coeffs[point_label(a)] = Fraction(o)
        return QDivisor(base, coeffs)

    def __eq__(self, other):
        return isinstance(other, CurveFunction) and self.factors == other.factors

    def __hash__(self):
        return hash(tuple(sorted(self.factors.items(), key=lambda kv: (is_inf(kv[0]), kv[0] if not is_inf(kv[0]) else 0))))

    def __repr__(self):
        if not self.factors:
            return "1"
        bits = []
        for a, k in self.factors.items():
            if is_inf(a):
                bits.append(f"(1/x)^{k}" if k != 1 else "(1/x)")
            elif a == 0:
                bits.append(f"x^{k}" if k != 1 else "x")
            else:
                bits.append(f"(x-{a})^{k}" if k != 1 else f"(x-{a})")
        return "*".join(bits)


class ToricFunction:
    """Product of characters and declared binomial primes on a toric base."""

    def __init__(self, char_exponents=None, declared_factors=None):
        # char_exponents: dict m-vector -> int ; declared_factors: dict label -> int
        chars = {}
        for m, k in (char_exponents or {}).items():
            m = vec(m)
            k = int(k)
            if k:
                chars[m] = chars.get(m, 0) + k
        self.chars = {m: k for m, k in chars.items() if k}
        decl = {}
        for lab, k in (declared_factors or {}).items():
            k = int(k)
            if k:
                decl[lab] = decl.get(lab, 0) + k
        self.declared = decl

    def order_along(self, label: PrimeDivisorLabel, declared_span=None) -> int:
        if label.kind == "ray":
            total = 0
            for m, k in self.chars.items():
                total += k * int(vdot(label.ray, m))
            for lab, k in self.declared.items():
                rep = dict(lab.class_rep)
                # ord of a declared prime's equation along an invariant ray
                total += k * int(-rep.get(label.ray, Fraction(0)))
            return total
        if label.kind == "declared":
            return self.declared.get(label, 0)
        raise UnsupportedBase("toric functions have no orders at curve points")

    def divisor(self, base: BaseVariety) -> QDivisor:
        coeffs = {}
        for r in base.rays():
            lab = ray_label(r, base.ray_degree(r))
            o = self.order_along(lab)
            if o:
                coeffs[lab] = Fraction(o)
        for lab, k in self.declared.items():
            coeffs[lab] = coeffs.get(lab, Fraction(0)) + k
        return QDivisor(base, coeffs)


def order_along(f, label: PrimeDivisorLabel) -> int:
    if f is None:
        raise ZeroFunction("the zero function has no order")
    if isinstance(f, CurveFunction):
        if label.kind != "point":
            raise UnsupportedBase("curve functions have orders at points only")
        return f.order_at(label.point)
    if isinstance(f, ToricFunction):
        return f.order_along(label)
    raise ZeroFunction("not a rational function")


# ---------------------------------------------------------------------------
# sections
# ---------------------------------------------------------------------------


@dataclass
class SectionSpace:
    dimension: int | None
    basis: tuple
    polytope: Polyhedron | None = None
    truncated: bool = False


def global_sections(d: QDivisor, pole_bound: int | None = None, box=None) -> SectionSpace:
    """Basis description of L(d) = {f : div(f) + d >= 0}.

    P^1: explicit rational-function basis of dimension deg(floor d) + 1.
    Open subsets of P^1 (or infinite coefficients): poles at removed primes
    are unbounded; they are truncated at `pole_bound`.
    Toric with invariant d: characters in the section polytope, enumerated
    inside `box` when unbounded.
    """
    base = d.base
    if base.kind in ("P1", "open_p1"):
        removed = set(base.removed)
        removed.update(l.point for l in d.infinity_primes())
        work = {l.point: c for l, c in d.finite_part().items()}
        truncated = False
        if removed:
            if pole_bound is None:
                raise UnsupportedBase(
                    "sections on an open curve need a pole bound at the removed points"
                )
            truncated = True
            for x in removed:
                work[x] = work.get(x, Fraction(0)) + pole_bound
        floor_c = {a: Fraction(math.floor(c)) for a, c in work.items()}
        deg = sum(floor_c.values(), Fraction(0))
        if deg < 0:
            return SectionSpace(0, (), truncated=truncated)
        f0_factors = {a: int(-c) for a, c in floor_c.items() if not is_inf(a)}
        f0 = CurveFunction(f0_factors)
        x = CurveFunction.coordinate()
        basis = []
        cur = f0
        for _ in range(int(deg) + 1):
            basis.append(cur)
            cur = cur.mul(x)
        return SectionSpace(int(deg) + 1, tuple(basis), truncated=truncated)
    if base.kind == "toric":
        if any(l.kind != "ray" for l in d.coeffs):
            raise UnsupportedBase("toric sections need a torus-invariant divisor")
        n = base.rank_n
        locus_removed = [l.ray for l in d.infinity_primes()]
        rays = [r for r in base.rays() if r not in set(locus_removed)]
        ineqs = []
        for r in rays:
            lab = ray_label(r, base.ray_degree(r))
            c = d.coefficient(lab)
            ineqs.append((r, -c))
        poly = Polyhedron.from_H(ineqs, (), n)
        if poly.empty:
            return SectionSpace(0, (), polytope=poly)
        if poly.is_bounded():
            pts = poly.lattice_points()
            basis = tuple(ToricFunction({m: 1}) for m in pts)
            return SectionSpace(len(pts), basis, polytope=poly)
        if box is None:
            return SectionSpace(None, (), polytope=poly)
        boxed = poly.intersect(box)
        pts = boxed.lattice_points() if boxed.is_bounded() else []
        basis = tuple(ToricFunction({m: 1}) for m in pts)
        return SectionSpace(None, basis, polytope=poly, truncated=True)
    raise UnsupportedBase(base.kind)


# ---------------------------------------------------------------------------
# principality and positivity
# ---------------------------------------------------------------------------


def is_principal(d: QDivisor):
    """Decide principality for integral divisors; returns (bool, witness)."""
    for c in d.coeffs.values():
        if is_inf(c) or c.denominator != 1:
            raise NonIntegral("principality needs integral finite coefficients")
    base = d.base
    if base.kind in ("P1", "open_p1"):
        total = sum(d.coeffs.values(), Fraction(0))
        if total != 0:
            return False, None
        factors = {l.point: int(c) for l, c in d.coeffs.items() if not is_inf(l.point)}
        return True, CurveFunction(factors)
    if base.kind == "toric":
        # substitute declared primes by their invariant representatives
        cr = {vec(r): Fraction(0) for r in base.rays()}
        declared_part = {}
        for l, c in d.coeffs.items():
            if l.kind == "ray":
                cr[l.ray] += c
            elif l.kind == "declared":
                declared_part[l] = int(c)
                for r, rc in l.class_rep:
                    cr[vec(r)] += c * rc
            else:
                raise UnsupportedBase("mixed labels")
        rays = base.rays()
        a = [[int(x) for x in r] for r in rays]
        b = [int(cr[r]) for r in rays]
        m = integral_solve(a, b)
        if m is None:
            return False, None
        wit = ToricFunction({tuple(m): 1}, declared_part)
        return True, wit
    raise UnsupportedBase(base.kind)


@dataclass(frozen=True)
class PositivityFlags:
    qcartier: bool
    semiample: bool
    big: bool


def positivity(d: QDivisor) -> PositivityFlags:
    """Q-Cartier / semiample / big flags of d restricted to its locus."""
    base = d.base
    if base.kind in ("P1", "open_p1"):
        if base.kind == "open_p1" or d.infinity_primes():
            return PositivityFlags(True, True, True)
        deg = sum(d.coeffs.values(), Fraction(0))
        return PositivityFlags(True, deg >= 0, deg > 0)
    if base.kind == "toric":
        return _toric_positivity(base, d)
    raise UnsupportedBase(base.kind)


def _toric_positivity(base: BaseVariety, d: QDivisor) -> PositivityFlags:
    # invariant representative of the class, restricted to the locus subfan
    removed = [l.ray for l in d.infinity_primes() if l.kind == "ray"]
    if any(l.kind == "declared" and is_inf(c) for l, c in d.coeffs.items()):
        raise UnsupportedBase("infinite coefficients on declared primes")
    cr = {}
    for l, c in d.coeffs.items():
        if is_inf(c):
            continue
        if l.kind == "ray":
            cr[l.ray] = cr.get(l.ray, Fraction(0)) + c
        elif l.kind == "declared":
            for r, rc in l.class_rep:
                cr[vec(r)] = cr.get(vec(r), Fraction(0)) + c * rc
        else:
            raise UnsupportedBase("mixed labels")
    subfan = base.subfan_without_rays(removed) if removed else list(base.fan)
    rays = sorted({r for c in subfan for r in c.rays})
    a = {r: cr.get(r, Fraction(0)) for r in rays}
    qcartier = True
    cone_solutions = []
    for c in subfan:
        rows = [list(r) for r in c.rays]
        rhs = [-a[r] for r in c.rays]
        sol = solve(rows, rhs) if rows else ()
        if sol is None:
            qcartier = False
            break
        cone_solutions.append(sol)
    semiample = qcartier
    if qcartier:
        for sol in cone_solutions:
            for r in rays:
                if vdot(sol, r) < -a[r]:
                    semiample = False
                    break
            if not semiample:
                break
    # section polytope full-dimensional <=> big
    ineqs = [(r, -a[r]) for r in rays]
    poly = Polyhedron.from_H(ineqs, (), base.rank_n) if rays else Polyhedron.from_H(
        (), (), base.rank_n
    )
    big = (not poly.empty) and poly.dim() == base.rank_n
    return PositivityFlags(qcartier, semiample, big)
