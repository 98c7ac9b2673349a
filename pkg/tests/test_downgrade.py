from __future__ import annotations

import itertools
import random
from fractions import Fraction

import pytest

from helpers import interval, point_poly
from pdivisors.base import BaseVariety, global_sections, point_label
from pdivisors.downgrade import (
    DowngradeContext,
    downgrade,
    downgrade_box_psi,
    dualize,
    fan_from,
    linear_part,
    subdivision_of_dual,
)
from pdivisors.errors import NotProper, WeightOutsideCone
from pdivisors.lattice import Lattice, LatticeMap
from pdivisors.linalg import mat_vec, vdot, vec
from pdivisors.pdivisor import PolyhedralDivisor
from pdivisors.polyhedra import Cone, Polyhedron, hull
from pdivisors.tvariety import (
    ConcavePL,
    PLDivisorMap,
    box_and_psi,
    graded_sections,
    zero_function_on,
)
from pdivisors.upgrade import upgrade

F = Fraction
P1 = BaseVariety.projective_line()


# -- linear part and dual ------------------------------------------------


def test_linear_part_affine():
    dom = Polyhedron.from_generators([(0,)], [(1,)], n=1)
    f = ConcavePL(dom, [((2,), F(5))])
    assert linear_part(f, (1,)) == 2


def test_linear_part_min_pieces():
    dom = Polyhedron.from_generators([(0,)], [(1,)], n=1)
    f = ConcavePL(dom, [((0,), F(0)), ((-1,), F(1))])
    # oracle: slopes at lambda = 10^3, 10^6 agree
    for lam in (10**3, 10**6):
        val = f.value((F(lam),))
        assert val == 1 - lam
    assert linear_part(f, (1,)) == -1


def test_linear_part_bounded_box():
    dom = interval(0, 1)
    f = ConcavePL(dom, [((3,), F(2))])
    assert linear_part(f, (0,)) == 0


def test_dualize_zero_on_interval():
    dom = interval(0, 1)
    f = zero_function_on(dom)
    box_star, psi_star = dualize(f)
    assert box_star == Polyhedron.from_H([], [], 1)  # all of Q
    # psi*(v) = min(0, v); oracle: grid minimization
    for v in range(-3, 4):
        want = min(min(0, v), 0)
        grid = [F(k, 4) for k in range(0, 5)]
        oracle = min(v * u for u in grid)
        assert psi_star.value((v,)) == oracle == want


def test_dualize_zero_on_point():
    dom = hull([(0,)])
    box_star, psi_star = dualize(zero_function_on(dom))
    assert box_star == Polyhedron.from_H([], [], 1)
    for v in range(-2, 3):
        assert psi_star.value((v,)) == 0


def test_dual_linear_part_is_box_support():
    # (Psi_P*)^lin(w) = min_{u in Box} <w, u>
    dom = interval(-1, 2)
    f = ConcavePL(dom, [((1,), F(0)), ((0,), F(1))])
    box_star, psi_star = dualize(f)
    for w in [(1,), (-1,)]:
        want = min(vdot(w, (u,)) for u in (F(-1), F(2)))
        assert psi_star.linear_part(w) == want


def test_subdivision_of_dual_pointed():
    dom = interval(0, 1)
    cells = subdivision_of_dual(zero_function_on(dom))
    assert all(c.is_pointed() for c in cells)
    assert set(cells.cells) == {
        Polyhedron.from_generators([(0,)], [(1,)], n=1),
        Polyhedron.from_generators([(0,)], [(-1,)], n=1),
    }


def test_fan_from_zero_map():
    box = Polyhedron.from_generators([(0,)], [(1,)], n=1)
    psi = PLDivisorMap(P1, box, {point_label(0): zero_function_on(box)})
    fan, duals, dstar = fan_from(psi, [F(0)])
    # single slice = the dual cone complex of tail(Box)
    assert fan.slice_of(point_label(0)).cells == (
        Polyhedron.from_generators([(0,)], [(1,)], n=1),
    )
    assert dstar.is_zero()


# -- downgrade ------------------------------------------------------------


def ctx_second_coordinate():
    pr = LatticeMap(Lattice(2, "M"), Lattice(1, "Mbar"), [[0, 1]])
    return DowngradeContext.from_projection(pr)


def quadric_cone_total_space():
    """A proper rank-2 divisor on P^1 with three marked points."""
    sigma = Cone.from_rays([(1, 0), (0, 1)])
    sp = sigma.as_polyhedron()
    c0 = hull([(1, 0), (0, 1)]).minkowski(sp)
    c1 = hull([(0, 0), (1, 1)]).minkowski(sp)
    cinf = point_poly_2(F(1, 2), F(0)).minkowski(sp)
    return PolyhedralDivisor(
        P1,
        2,
        sigma,
        {point_label(0): c0, point_label(1): c1, point_label(F(99)): cinf},
    )


def point_poly_2(a, b):
    return hull([(a, b)])


def test_downgrade_box_psi_fiber():
    d = quadric_cone_total_space()
    ctx = ctx_second_coordinate()
    pl = downgrade_box_psi(d, ctx, (1,))
    # Box[1] = t(pr^{-1}(1) cap omega): omega = dual orthant = orthant
    assert pl.box == Polyhedron.from_generators([(0,)], [(1,)], n=1)
    # oracle: enumerate lattice points of omega at pr = 1 and minimize
    for label, p in d.coeffs.items():
        f = pl.psi(label)
        for u1 in range(0, 4):
            lifted = (F(u1), F(1))
            want = min(vdot(v, lifted) for v in p.vertices)
            assert f.value((F(u1),)) == want


def test_downgrade_box_psi_outside():
    d = quadric_cone_total_space()
    ctx = ctx_second_coordinate()
    with pytest.raises(WeightOutsideCone):
        downgrade_box_psi(d, ctx, (-1,))


def test_downgrade_requires_proper():
    bad = PolyhedralDivisor(P1, 2, Cone.from_rays([(1, 0), (0, 1)]), {})
    with pytest.raises(NotProper):
        downgrade(bad, ctx_second_coordinate())


def test_downgrade_quadric_cone_graded_match():
    d = quadric_cone_total_space()
    ctx = ctx_second_coordinate()
    fan, dbar = downgrade(d, ctx)
    _assert_graded_roundtrip(d, ctx, fan, dbar, ubar_range=range(0, 3), uprime_range=range(0, 4))


def _assert_graded_roundtrip(d, ctx, fan, dbar, ubar_range, uprime_range):
    for ub in ubar_range:
        ub = (F(ub),)
        ra, vb = dbar.weights_at(ub)
        from pdivisors.tvariety import TInvariantDivisor

        dv = TInvariantDivisor(
            fan,
            ray_coeffs=ra,
            vertex_coeffs={k: v for k, v in vb.items()},
        )
        pl = box_and_psi(dv)
        for up in uprime_range:
            up = (F(up),)
            lift = tuple(
                a + b
                for a, b in zip(ctx.kernel(up), ctx.s_star(ub))
            )
            in_box = pl.box.contains_point(up)
            in_omega = d.weight_cone().contains(lift)
            assert in_box == in_omega, (ub, up)
            if not in_box:
                continue
            left = graded_sections(dv, up).dimension
            right = global_sections(d.evaluate(lift)).dimension
            assert left == right, (ub, up)


def test_downgrade_roundtrip_upgrade_identity():
    d = quadric_cone_total_space()
    ctx = ctx_second_coordinate()
    fan, dbar = downgrade(d, ctx)
    res = upgrade(dbar)
    assert res.report.proper
    # the upgrade must reassemble the image of d under (s, pi)
    rows = list(ctx.s_rows) + list(ctx.pi_rows)
    expected_tail = d.tail.map_image(rows)
    assert res.divisor.tail == expected_tail
    for label, p in d.coeffs.items():
        assert res.divisor.coefficient(label) == p.map_image(rows)
    assert set(res.divisor.coeffs) <= set(d.coeffs)


def test_downgrade_dcoeff_duality_samples():
    # the vertex coefficients encode the duals: -Psi_P[ubar]*(v) equals
    # min <Delta_{P,v}, ubar>, and the linear part matches the ray data
    d = quadric_cone_total_space()
    ctx = ctx_second_coordinate()
    fan, dbar = downgrade(d, ctx)
    for ub in [(F(1),), (F(2),)]:
        pl = downgrade_box_psi(d, ctx, ub)
        for label in fan.marked_primes():
            if label not in set(pl.marked()):
                continue
            _, psi_star = dualize(pl.psi(label))
            for v in fan.vertices_of(label):
                delta = dbar.vertex_coefficient(label, v)
                want = min(vdot(x, ub) for x in delta.vertices)
                assert -psi_star.value(v) == want
        for r in fan.rays():
            delta = dbar.ray_coefficient(r)
            want = min(vdot(x, ub) for x in delta.vertices)
            lin = min(vdot(r, u) for u in pl.box.vertices)
            assert -lin == want


def test_dcoeff_sign_on_skew_cone():
    # independent check of the sign convention on a skew tailcone
    sigma = Cone.from_rays([(1, -3), (0, 1)])
    sp = sigma.as_polyhedron()
    d = PolyhedralDivisor(
        P1,
        2,
        sigma,
        {point_label(0): hull([(1, 0), (0, 1)]).minkowski(sp)},
    )
    ctx = ctx_second_coordinate()
    fan, dbar = downgrade(d, ctx)
    ub = (F(1),)
    pl = downgrade_box_psi(d, ctx, ub)
    ray = vec((1,))
    delta = dbar.ray_coefficient(ray)
    # Delta_rho = s(sigma cap pi^{-1}(1)) = [-3, inf)
    assert delta == Polyhedron.from_generators([(-3,)], [(1,)], n=1)
    lin = min(vdot(ray, u) for u in pl.box.vertices)
    assert lin == 3 and min(vdot(x, ub) for x in delta.vertices) == -3


def test_downgrade_random_rank2(count=12):
    rng = random.Random(2024)
    ctxs = [
        DowngradeContext.from_projection(
            LatticeMap(Lattice(2, "M"), Lattice(1, "Mbar"), row)
        )
        for row in ([[0, 1]], [[1, 0]], [[1, 1]])
    ]
    found = 0
    tried = 0
    while found < count and tried < 400:
        tried += 1
        d = _random_proper_rank2(rng)
        if d is None:
            continue
        ctx = rng.choice(ctxs)
        fan, dbar = downgrade(d, ctx)
        _assert_graded_roundtrip(
            d, ctx, fan, dbar, ubar_range=range(0, 2), uprime_range=range(-2, 3)
        )
        res = upgrade(dbar)
        rows = list(ctx.s_rows) + list(ctx.pi_rows)
        assert res.divisor.tail == d.tail.map_image(rows)
        for label, p in d.coeffs.items():
            assert res.divisor.coefficient(label) == p.map_image(rows)
        found += 1
    assert found == count


def _random_proper_rank2(rng):
    sigma = Cone.from_rays([(1, 0), (0, 1)])
    sp = sigma.as_polyhedron()
    pts = [point_label(0), point_label(1), point_label(2), point_label(F(-1))]
    k = rng.randint(2, 4)
    coeffs = {}
    for label in pts[:k]:
        nv = rng.randint(1, 3)
        verts = [
            (F(rng.randint(0, 4), rng.choice([1, 2])), F(rng.randint(0, 4), rng.choice([1, 2])))
            for _ in range(nv)
        ]
        coeffs[label] = hull(verts).minkowski(sp)
    d = PolyhedralDivisor(P1, 2, sigma, coeffs)
    rep = d.is_proper()
    if not rep.proper:
        return None
    return d
