from __future__ import annotations

import random
from fractions import Fraction

import pytest

from pdivisors.base import (
    INF,
    BaseVariety,
    CurveFunction,
    QDivisor,
    ToricFunction,
    binomial_label,
    degree,
    global_sections,
    is_principal,
    order_along,
    point_label,
    positivity,
    ray_label,
)
from pdivisors.errors import NoDegreeMap, NonIntegral, UnsupportedBase
from pdivisors.polyhedra import Cone

F = Fraction
P1 = BaseVariety.projective_line()


def bl0_a2() -> BaseVariety:
    return BaseVariety.toric(
        [Cone.from_rays([(1, 0), (1, 1)]), Cone.from_rays([(1, 1), (0, 1)])],
        name="Bl0(A2)",
    )


def qdiv(base, pairs):
    return QDivisor(base, dict(pairs))


# -- degree ------------------------------------------------------------


def test_degree_principal_divisor_is_zero():
    d = qdiv(P1, [(point_label(0), 1), (point_label(INF), -1)])
    assert degree(d) == 0


def test_degree_rational_sum():
    d = qdiv(P1, [(point_label(1), F(1, 2)), (point_label(2), F(1, 3)), (point_label(3), F(1, 6))])
    assert degree(d) == 1


def test_degree_needs_projective_base():
    y = bl0_a2()
    e = qdiv(y, [(ray_label((1, 1)), 1)])
    with pytest.raises(NoDegreeMap):
        degree(e)


# -- sections ----------------------------------------------------------


def test_sections_trivial():
    s = global_sections(QDivisor(P1, {}))
    assert s.dimension == 1
    assert s.basis[0].is_one()


def test_sections_two_zero():
    d = qdiv(P1, [(point_label(0), 2)])
    s = global_sections(d)
    assert s.dimension == 3
    # basis {1/x^2, 1/x, 1}
    orders = sorted(f.order_at(0) for f in s.basis)
    assert orders == [-2, -1, 0]
    for f in s.basis:
        dv = f.divisor(P1).add(d)
        assert dv.is_effective()


def test_sections_round_down():
    d = qdiv(P1, [(point_label(0), F(1, 2))])
    s = global_sections(d)
    assert s.dimension == 1


def test_sections_negative_degree():
    d = qdiv(P1, [(point_label(0), -1)])
    assert global_sections(d).dimension == 0


def test_sections_riemann_roch_random():
    rng = random.Random(17)
    for _ in range(30):
        pts = rng.sample([0, 1, 2, 3, INF], k=rng.randint(1, 4))
        d = qdiv(P1, [(point_label(p), F(rng.randint(-6, 6), rng.randint(1, 3))) for p in pts])
        s = global_sections(d)
        dfl = d.floor()
        dd = degree(dfl)
        assert s.dimension == max(0, int(dd) + 1)
        for f in s.basis:
            assert f.divisor(P1).add(d).is_effective()


def test_sections_open_curve_truncated():
    base = BaseVariety.open_projective_line([INF])
    d = QDivisor(base, {})
    s = global_sections(d, pole_bound=2)
    assert s.truncated and s.dimension == 3


def test_sections_toric_polytope():
    y = bl0_a2()
    d = qdiv(y, [(ray_label((1, 1)), 1)])
    s = global_sections(d)
    assert s.dimension is None  # unbounded polytope
    assert not s.polytope.empty


# -- orders ------------------------------------------------------------


def test_order_of_x_squared():
    f = CurveFunction({0: 2})
    assert order_along(f, point_label(0)) == 2
    assert order_along(f, point_label(INF)) == -2


def test_divisor_of_function_degree_zero():
    rng = random.Random(29)
    for _ in range(25):
        factors = {F(rng.randint(-3, 3)): rng.randint(-2, 2) for _ in range(3)}
        if rng.random() < 0.5:
            factors[INF] = rng.randint(-2, 2)
        f = CurveFunction(factors)
        assert degree(f.divisor(P1)) == 0


def test_binomial_prime_order_one():
    # D = V(x1^k - y x0^k) on P^1 x A^1, entered via its toric fan
    cones = [
        Cone.from_rays([(1, 0), (0, 1)]),
        Cone.from_rays([(-1, 0), (0, 1)]),
    ]
    y = BaseVariety.toric(cones, name="P1xA1")
    k = 2
    lab = y.declare_prime(binomial_label("D1", (k, 0), (0, 1), y.rays()))
    f = ToricFunction({}, {lab: 1})
    assert order_along(f, lab) == 1
    # div(chi^(k,0) - chi^(0,1)) = D1 - k * D_inf, with D_inf the (-1,0) ray
    dv = f.divisor(y)
    assert dv.coefficient(ray_label((-1, 0))) == -k
    assert dv.coefficient(ray_label((1, 0))) == 0
    assert dv.coefficient(ray_label((0, 1))) == 0


# -- principality ------------------------------------------------------


def test_principal_on_p1():
    d = qdiv(P1, [(point_label(0), 1), (point_label(INF), -1)])
    ok, wit = is_principal(d)
    assert ok and wit == CurveFunction.coordinate()
    d2 = qdiv(P1, [(point_label(0), 1)])
    ok, _ = is_principal(d2)
    assert not ok
    with pytest.raises(NonIntegral):
        is_principal(qdiv(P1, [(point_label(0), F(1, 2))]))


def test_principal_toric():
    y = bl0_a2()
    # div(u) = D_(1,0) + D_(1,1)
    d = qdiv(y, [(ray_label((1, 0)), 1), (ray_label((1, 1)), 1)])
    ok, wit = is_principal(d)
    assert ok
    assert wit.chars == {(1, 0): 1}
    # E alone is not principal
    ok, _ = is_principal(qdiv(y, [(ray_label((1, 1)), 1)]))
    assert not ok


# -- positivity --------------------------------------------------------


def test_positivity_p1():
    d0 = qdiv(P1, [(point_label(0), 1), (point_label(INF), -1)])
    f = positivity(d0)
    assert f.semiample and not f.big and f.qcartier
    dp = qdiv(P1, [(point_label(0), F(1, 3))])
    f = positivity(dp)
    assert f.semiample and f.big


def test_positivity_monotone_effective():
    rng = random.Random(37)
    for _ in range(20):
        d = qdiv(P1, [(point_label(k), F(rng.randint(-4, 4))) for k in range(3)])
        e = qdiv(P1, [(point_label(k), F(rng.randint(0, 3))) for k in range(3)])
        if positivity(d).semiample:
            assert positivity(d.add(e)).semiample


def test_positivity_exceptional_big_not_semiample():
    y = bl0_a2()
    e = qdiv(y, [(ray_label((1, 1)), 1)])
    fl = positivity(e)
    assert fl.big and not fl.semiample and fl.qcartier


def test_positivity_minus_exceptional_semiample():
    y = bl0_a2()
    d = qdiv(y, [(ray_label((1, 0)), 1)])  # strict transform class ~ -E
    fl = positivity(d)
    assert fl.semiample and fl.qcartier and fl.big


def test_positivity_affine_toric():
    a2 = BaseVariety.toric([Cone.from_rays([(1, 0), (0, 1)])], name="A2")
    d = qdiv(a2, [(ray_label((1, 0)), F(-5, 2))])
    fl = positivity(d)
    assert fl.qcartier and fl.semiample and fl.big


def test_positivity_with_infinity_coefficient_restricts_to_locus():
    d = qdiv(P1, [(point_label(0), -7), (point_label(INF), INF)])
    fl = positivity(d)
    assert fl.semiample and fl.big


def test_c3_like_evaluation_at_one_flags():
    # the threefold datum evaluated at u=1: (1/2) D1 + (1/3) D2 + 0*E with
    # D2 a non-invariant curve equivalent to -E
    y = bl0_a2()
    from pdivisors.base import declared_label

    d2 = declared_label("D2", [((1, 1), -1)])
    d = qdiv(y, [(ray_label((1, 0)), F(1, 2)), (d2, F(1, 3))])
    fl = positivity(d)
    assert fl.qcartier and fl.semiample and fl.big


def test_fan_predicates():
    y = bl0_a2()
    assert not y.fan_is_complete()
    assert y.fan_is_smooth()
    p2 = BaseVariety.toric(
        [
            Cone.from_rays([(1, 0), (0, 1)]),
            Cone.from_rays([(0, 1), (-1, -1)]),
            Cone.from_rays([(-1, -1), (1, 0)]),
        ],
        degrees={(1, 0): 1, (0, 1): 1, (-1, -1): 1},
        name="P2",
    )
    assert p2.fan_is_complete()
    assert p2.fan_is_smooth()
    assert degree(qdiv(p2, [(ray_label((1, 0), 1), 2)])) == 2
    wp = BaseVariety.toric(
        [
            Cone.from_rays([(1, 0), (0, 1)]),
            Cone.from_rays([(0, 1), (-1, -2)]),
            Cone.from_rays([(-1, -2), (1, 0)]),
        ],
        name="P(1,1,2)",
    )
    assert wp.fan_is_complete()
    assert not wp.fan_is_smooth()
