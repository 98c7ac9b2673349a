from __future__ import annotations

import random
from fractions import Fraction

import pytest

from helpers import brute_force_graded_dimension, complete_cstar_fan, halfline, interval
from pdivisors.base import (
    INF,
    BaseVariety,
    CurveFunction,
    point_label,
    positivity,
    ray_label,
)
from pdivisors.errors import NotContractionFree, NotQCartier, WeightOutsideBox
from pdivisors.pdivisor import PolyhedralDivisor
from pdivisors.polyhedra import Cone, Polyhedron, hull
from pdivisors.tvariety import (
    ConcavePL,
    DivisorialFan,
    PLDivisorMap,
    TInvariantDivisor,
    box_and_psi,
    graded_sections,
    invariant_prime_divisors,
    is_basepoint_free,
    principal_invariant_divisor,
    psi0_pdivisor,
    sharpness,
    sum_psi,
    support_function_concave,
    support_functions,
    zero_function_on,
)

F = Fraction
P1 = BaseVariety.projective_line()


def bl0_a2():
    return BaseVariety.toric(
        [Cone.from_rays([(1, 0), (1, 1)]), Cone.from_rays([(1, 1), (0, 1)])],
        name="Bl0(A2)",
    )


def nsa_fan():
    """The two-member fan on Bl0(A2) whose trivial divisor data is the
    big-but-not-semiample example."""
    y = bl0_a2()
    d1l, el, d2l = y.ray((1, 0)), y.ray((1, 1)), y.ray((0, 1))
    plus = Cone.from_rays([(1,)])
    m1 = PolyhedralDivisor(
        y, 1, plus, {el: halfline(1, 1), d2l: Polyhedron.empty_polyhedron(1)}
    )
    m2 = PolyhedralDivisor(
        y, 1, plus, {el: halfline(1, 1), d1l: Polyhedron.empty_polyhedron(1)}
    )
    return y, DivisorialFan(y, [m1, m2])


def test_invariant_primes_of_complete_fan():
    fan = complete_cstar_fan()
    rays, verts = invariant_prime_divisors(fan)
    assert rays == [(-1,), (1,)]
    assert verts[point_label(0)] == [(F(1, 2),)]
    assert verts[point_label(INF)] == [(0,)]


def test_invariant_primes_require_contraction_free():
    m = PolyhedralDivisor(P1, 1, Cone.from_rays([(1,)]), {point_label(0): halfline(0, 1)})
    fan = DivisorialFan(P1, [m])
    with pytest.raises(NotContractionFree):
        invariant_prime_divisors(fan)


def test_psi0_golden_nsa():
    y, fan = nsa_fan()
    psi0 = psi0_pdivisor(fan)
    expected = PolyhedralDivisor(
        y,
        1,
        Cone.from_rays([(1,)]),
        {
            y.ray((1, 0)): halfline(0, 1),
            y.ray((1, 1)): halfline(1, 1),
            y.ray((0, 1)): halfline(0, 1),
        },
    )
    assert psi0 == expected
    ev = psi0.evaluate((1,))
    assert ev.coefficient(y.ray((1, 1))) == 1
    assert len(ev.coeffs) == 1
    flags = positivity(ev)
    assert flags.big and not flags.semiample


def test_box_and_psi_zero_divisor_matches_psi0():
    fan = complete_cstar_fan()
    d = TInvariantDivisor(fan)
    pl = box_and_psi(d)
    psi0 = psi0_pdivisor(fan)
    assert pl.box == Polyhedron.from_generators([(0,)], n=1)  # dual of full tailfan
    # complete tailfan: Box^0 = {0}; evaluation agrees with the divisor form
    assert pl.evaluate((0,)).coeffs == psi0.evaluate((0,)).coeffs


def test_box_single_ray():
    y, fan = nsa_fan()
    d = TInvariantDivisor(fan, ray_coeffs={(1,): 1})
    pl = box_and_psi(d)
    assert pl.box == Polyhedron.from_H([((1,), -1)], (), 1)


def test_principal_invariant_divisor_cancellation():
    fan = complete_cstar_fan()
    f = CurveFunction({2: 1})
    d = principal_invariant_divisor(fan, f, (3,))
    dinv = principal_invariant_divisor(fan, f.inverse(), (-3,))
    assert d.add(dinv).is_zero()
    # formula spot checks: a_rho = <v_rho, u>
    assert d.ray_coeffs[(1,)] == 3
    assert d.ray_coeffs[(-1,)] == -3
    # vertex 1/2 over the marked point 0: b = <1/2,3> + ord_0(f) = 3/2
    assert d.vertex_coeffs[(point_label(0), (F(1, 2),))] == F(3, 2)
    # the zero of f sits at the unmarked point 2, over the trivial slice
    assert d.vertex_coeffs[(point_label(2), (F(0),))] == 1
    assert d.vertex_coeffs[(point_label(INF), (F(0),))] == -1


def test_graded_sections_effective_divisor():
    fan = complete_cstar_fan()
    d = TInvariantDivisor(
        fan,
        ray_coeffs={(1,): 2, (-1,): 1},
        vertex_coeffs={(point_label(0), (F(1, 2),)): 1, (point_label(INF), (F(0),)): 2},
    )
    pl = box_and_psi(d)
    assert pl.box == interval(-2, 1)
    for u in [-2, -1, 0, 1]:
        s = graded_sections(d, (u,))
        psi_u = pl.evaluate((u,))
        from pdivisors.base import degree

        want = max(0, int(degree(psi_u.floor())) + 1)
        assert s.dimension == want


def test_graded_sections_outside_box():
    fan = complete_cstar_fan()
    d = TInvariantDivisor(fan)
    with pytest.raises(WeightOutsideBox):
        graded_sections(d, (1,))


def test_graded_sections_match_brute_force():
    rng = random.Random(97)
    fan = complete_cstar_fan()
    for _ in range(6):
        d = TInvariantDivisor(
            fan,
            ray_coeffs={(1,): rng.randint(0, 2), (-1,): rng.randint(0, 2)},
            vertex_coeffs={
                (point_label(0), (F(1, 2),)): F(rng.randint(-2, 2)),
                (point_label(INF), (F(0),)): F(rng.randint(-2, 2)),
            },
        )
        pl = box_and_psi(d)
        for u in pl.box.lattice_points():
            dim = graded_sections(d, u).dimension
            brute = brute_force_graded_dimension(d, u)
            assert dim == brute, (d.ray_coeffs, d.vertex_coeffs, u)


def test_support_functions_zero_divisor():
    fan = complete_cstar_fan()
    sf = support_functions(TInvariantDivisor(fan))
    for label, cells in sf.pieces.items():
        for cell, a, c in cells:
            assert all(x == 0 for x in a) and c == 0


def test_support_functions_recover_principal_data():
    fan = complete_cstar_fan()
    f = CurveFunction({1: 2})
    u = (2,)
    d = principal_invariant_divisor(fan, f, u)
    sf = support_functions(d)
    from pdivisors.base import order_along

    for label, cells in sf.pieces.items():
        o = order_along(f, label)
        for cell, a, c in cells:
            for v in cell.vertices:
                want = -(v[0] * u[0]) - o
                assert sf.value(label, v) == want


def three_cell_fan():
    """Slice at 0 subdivided into (-inf,0], [0,1], [1,inf)."""
    plus = Cone.from_rays([(1,)])
    minus = Cone.from_rays([(-1,)])
    zero = Cone.zero(1)
    p0 = point_label(0)
    pinf = point_label(INF)
    e = Polyhedron.empty_polyhedron(1)
    members = [
        PolyhedralDivisor(P1, 1, plus, {p0: halfline(1, 1), pinf: e}),
        PolyhedralDivisor(P1, 1, zero, {p0: interval(0, 1), pinf: e}),
        PolyhedralDivisor(P1, 1, minus, {p0: halfline(0, -1), pinf: e}),
        PolyhedralDivisor(P1, 1, plus, {p0: e}),
        PolyhedralDivisor(P1, 1, minus, {p0: e}),
    ]
    return DivisorialFan(P1, members, semicomplete=True)


def test_support_function_concavity_detects():
    fan = three_cell_fan()
    # h(0) = 0, h(1) = -1 with flat ray slopes dips in the middle: not concave
    dbad = TInvariantDivisor(
        fan,
        vertex_coeffs={(point_label(0), (F(1),)): 1},
    )
    assert not support_function_concave(dbad, point_label(0))
    # rise at slope 1 on the left, flat after the crest at 1: concave
    dgood = TInvariantDivisor(
        fan,
        ray_coeffs={(-1,): 1},
        vertex_coeffs={(point_label(0), (F(1),)): -1},
    )
    assert support_function_concave(dgood, point_label(0))


def test_bpf_zero_divisor():
    fan = complete_cstar_fan()
    rep = is_basepoint_free(TInvariantDivisor(fan))
    assert rep.free


def test_bpf_principal_divisor():
    fan = complete_cstar_fan()
    d = principal_invariant_divisor(fan, CurveFunction({1: 1}), (2,))
    rep = is_basepoint_free(d)
    assert rep.free


def test_bpf_non_concave_fails():
    fan = complete_cstar_fan()
    dbad = TInvariantDivisor(fan, vertex_coeffs={(point_label(0), (F(1, 2),)): -1})
    rep = is_basepoint_free(dbad)
    assert rep.status == "not_free"


def test_sum_psi_affine():
    dom1 = interval(0, 1)
    dom2 = interval(0, 2)
    a = PLDivisorMap(P1, dom1, {point_label(0): ConcavePL(dom1, [((1,), F(2))])})
    b = PLDivisorMap(P1, dom2, {point_label(0): ConcavePL(dom2, [((3,), F(-1))])})
    s = sum_psi(a, b)
    assert s.box == interval(0, 3)
    f = s.per_prime[point_label(0)]
    # sup-convolution of affine pieces <1,.>+2 and <3,.>+(-1)
    assert f.value((0,)) == 1
    # maximize (u1+2) + (3 u2 - 1) over u1+u2=3, u1 in [0,1], u2 in [0,2]
    assert f.value((3,)) == 8


def test_sum_psi_matches_direct_maximization():
    rng = random.Random(101)
    for _ in range(10):
        dom1 = interval(0, 2)
        dom2 = interval(-1, 1)
        p1s = [((rng.randint(-2, 2),), F(rng.randint(-2, 2))) for _ in range(2)]
        p2s = [((rng.randint(-2, 2),), F(rng.randint(-2, 2))) for _ in range(2)]
        f1 = ConcavePL(dom1, p1s)
        f2 = ConcavePL(dom2, p2s)
        s = f1.sup_convolve(f2)
        # oracle: max over a rational grid decomposition u = u1 + u2
        for u in [F(-1), F(0), F(1, 2), F(3)]:
            if not s.domain.contains_point((u,)):
                continue
            best = None
            t = F(-1)
            while t <= 2:
                u1, u2 = t, u - t
                if dom1.contains_point((u1,)) and dom2.contains_point((u2,)):
                    val = f1.value((u1,)) + f2.value((u2,))
                    best = val if best is None else max(best, val)
                t += F(1, 4)
            if best is not None:
                assert s.value((u,)) >= best
                # the optimum is attained at a breakpoint of the grid when
                # the grid contains the vertices; errs on the safe side
                assert s.value((u,)) - best <= F(1, 1)


def test_sharpness_zero_on_cone():
    box = Polyhedron.from_generators([(0,)], [(1,)], n=1)
    psi = PLDivisorMap(P1, box, {point_label(0): zero_function_on(box)})
    assert sharpness(psi) == "sharp"


def test_sharpness_from_bpf_divisor():
    fan = complete_cstar_fan()
    d = principal_invariant_divisor(fan, CurveFunction({1: 1}), (2,))
    psi = box_and_psi(d).drop_trivial()
    assert sharpness(psi) == "sharp"


def test_sharpness_failure():
    # vertex value forcing negative degree at the only admissible weight
    box = hull([(0,)])
    psi = PLDivisorMap(
        P1,
        box,
        {point_label(0): ConcavePL(box, [((0,), F(-1))])},
    )
    assert sharpness(psi) == "fails"


def test_concavity_of_psi_exact():
    fan = complete_cstar_fan()
    rng = random.Random(103)
    for _ in range(10):
        d = TInvariantDivisor(
            fan,
            ray_coeffs={(1,): rng.randint(0, 3), (-1,): rng.randint(0, 3)},
            vertex_coeffs={
                (point_label(0), (F(1, 2),)): F(rng.randint(-3, 3), 2),
                (point_label(INF), (F(0),)): F(rng.randint(-3, 3)),
            },
        )
        pl = box_and_psi(d)
        pts = pl.box.lattice_points()
        for u in pts:
            for v in pts:
                mid = tuple((a + b) / 2 for a, b in zip(u, v))
                for label in pl.marked():
                    fa = pl.psi(label)
                    assert fa.value(u) + fa.value(v) <= 2 * fa.value(mid)
