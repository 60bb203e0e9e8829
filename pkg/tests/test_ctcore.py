import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ctexpand.ctcore import (
    CTError,
    Form,
    LMat,
    build_generating_set,
    find_sl2_pair,
    form_defect,
    form_inverse,
    form_value,
    is_form_preserving,
    is_gtau_member,
    l0_embed,
    lift_conditions,
    lift_transvection,
    shift_generator,
    sl2_elements,
    solve_F,
    solve_F_chain,
    solve_F_linear,
    transvection_matrix,
    trivial_specializations,
)
from ctexpand.ff import Fe, admissible_lambdas, base_field, unit_root
from ctexpand.laurent import LPoly, sigma
from ctexpand.specialize import finite_transvection, specialize, unitary_context

GRID = [(2, 1), (2, 2), (3, 1), (5, 1)]


def vec(form, coeffs):
    return [LPoly(form.field, lo, cs) for lo, cs in coeffs]


def test_form_values():
    form = Form(2, 2)
    F = form.field
    e1, e2, f1 = (form.basis_vector(form.basis_index(x)) for x in ("e1", "e2", "f1"))
    assert form_value(form, e1, f1) == LPoly.t(F)
    assert form_value(form, e1, e2).is_zero()
    assert form_value(form, f1, e1) == LPoly.one(F)


def test_basis_labels():
    form = Form(3, 2)
    assert [form.basis_label(i) for i in range(6)] == ["e1", "e2", "e3", "f1", "f2", "f3"]
    assert form.basis_index("f2") == 4
    with pytest.raises(CTError):
        form.basis_index("g1")


@settings(max_examples=30, deadline=None)
@given(st.data())
def test_form_is_sesquilinear(data):
    form = Form(2, 3)
    F = form.field
    poly = st.builds(lambda lo, cs: LPoly(F, lo, cs), st.integers(-3, 3), st.lists(st.integers(0, 2), max_size=4))
    x, x2, y = (data.draw(st.lists(poly, min_size=4, max_size=4)) for _ in range(3))
    c = data.draw(poly)
    xs = [u + v for u, v in zip(x, x2)]
    assert form_value(form, xs, y) == form_value(form, x, y) + form_value(form, x2, y)
    assert form_value(form, [c * u for u in x], y) == c * form_value(form, x, y)
    assert form_value(form, x, [c * u for u in y]) == sigma(c) * form_value(form, x, y)


def test_is_form_preserving_examples():
    form = Form(2, 2)
    F = form.field
    assert is_form_preserving(form, LMat.identity(F, 4))
    assert is_form_preserving(form, shift_generator(form))
    rows = [list(r) for r in LMat.identity(F, 4).rows]
    rows[0][0] = LPoly.t(F)
    assert not is_form_preserving(form, LMat(F, rows))


def test_identity_membership():
    form = Form(3, 3)
    rep = is_gtau_member(form, LMat.identity(form.field, 6))
    assert rep.form_preserving and rep.det_one and rep.member


def test_shift_generator_n2():
    form = Form(2, 2)
    F = form.field
    s = shift_generator(form)
    nz = {(i, j): s[i, j] for i in range(4) for j in range(4) if s[i, j]}
    e1, e2, f1, f2 = 0, 1, 2, 3
    assert nz == {
        (e2, e1): LPoly.one(F),
        (f1, e2): LPoly.one(F),
        (f2, f1): LPoly.one(F),
        (e1, f2): LPoly.monomial(F, -1),
    }


@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("q", [2, 3, 5])
def test_shift_power_and_det(n, q):
    form = Form(n, q)
    F = form.field
    s = shift_generator(form)
    p = LMat.identity(F, 2 * n)
    for _ in range(2 * n):
        p = p @ s
    tinv = LPoly.monomial(F, -1)
    assert p == LMat(F, [[tinv if i == j else LPoly.zero(F) for j in range(2 * n)] for i in range(2 * n)])
    rep = is_gtau_member(form, s)
    assert rep.form_preserving
    assert rep.det == LPoly.monomial(F, -1, F.neg(1))
    assert not rep.det_one


def test_l0_embed_examples():
    form = Form(2, 2)
    assert l0_embed(form, ((1, 0), (0, 1))).is_identity()
    rep = is_gtau_member(form, l0_embed(form, ((0, 1), (1, 0))))
    assert rep.member
    with pytest.raises(CTError):
        l0_embed(Form(2, 3), ((2, 0), (0, 1)))


@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("q", [2, 3])
def test_all_l0_images_are_members(n, q):
    form = Form(n, q)
    for A in sl2_elements(base_field(q)):
        assert is_gtau_member(form, l0_embed(form, A)).member


def test_generating_set_q2():
    S = build_generating_set(Form(2, 2))
    assert S.x == ((0, 1), (1, 0)) and S.y == ((0, 1), (1, 1))
    assert S.involution and len(S) == 5
    assert S.labels == ("x", "y", "y^-1", "s", "s^-1")


def test_generating_set_q3_fallback():
    F = base_field(3)
    ident = ((1, 0), (0, 1))

    def sq(g):
        return tuple(tuple(F.add(F.mul(g[i][0], g[0][j]), F.mul(g[i][1], g[1][j])) for j in range(2)) for i in range(2))

    invs = [g for g in sl2_elements(F) if g != ident and sq(g) == ident]
    # the only involution in SL_2(3) is -I, which is central
    assert invs == [((2, 0), (0, 2))]
    x, y, inv = find_sl2_pair(3)
    assert not inv
    S = build_generating_set(Form(2, 3))
    assert len(S) == 6 and not S.involution


@pytest.mark.parametrize("n,q", [(2, 2), (3, 2), (2, 3), (3, 3), (2, 4), (2, 5)])
def test_generating_set_closed_under_inverse(n, q):
    form = Form(n, q)
    S = build_generating_set(form)
    F = form.field
    ident = LMat.identity(F, 2 * n)
    gens = set(S.gens)
    assert ident not in gens
    for g in S.gens:
        assert is_form_preserving(form, g)
        assert form_inverse(form, g) in gens
        assert (g @ form_inverse(form, g)).is_identity()


def test_solve_F_q2_example():
    ctx, a = unit_root(2, 1)
    F2 = base_field(2)
    known = LPoly(F2, -1, (1, 1))
    assert lift_conditions(known, a, a) == (True, True)
    assert all(lift_conditions(solve_F(a, a, 2, 1), a, a))
    assert all(lift_conditions(solve_F_linear(a, a, 2, 1), a, a))


@pytest.mark.parametrize("q,s", GRID)
def test_solve_F_zero_lambda(q, s):
    ctx, a = unit_root(q, s)
    F = solve_F(Fe(ctx, 0), a, q, s)
    assert all(lift_conditions(F, Fe(ctx, 0), a))


@pytest.mark.parametrize("q,s", GRID)
def test_chain_and_linear_solver_agree_on_conditions(q, s):
    ctx, a = unit_root(q, s)
    for lam in admissible_lambdas(ctx, a.code, q, s):
        lam = Fe(ctx, lam)
        sol = solve_F_chain(lam, a, q, s)
        assert not sol.fallback
        assert all(lift_conditions(sol.F, lam, a))
        assert all(lift_conditions(solve_F_linear(lam, a, q, s), lam, a))


def test_solve_F_rejects_inadmissible():
    ctx, a = unit_root(3, 1)
    bad = next(x for x in range(1, ctx.order) if x not in admissible_lambdas(ctx, a.code, 3, 1))
    with pytest.raises(CTError):
        solve_F(Fe(ctx, bad), a, 3, 1)
    with pytest.raises(CTError):
        solve_F_linear(Fe(ctx, bad), a, 3, 1)


def test_lift_transvection_shape():
    form = Form(2, 2)
    F = form.field
    ctx, a = unit_root(2, 1)
    Fp = solve_F(a, a, 2, 1)
    Phi = lift_transvection(form, 0, a, a, 2, 1)
    for i in range(4):
        for j in range(4):
            want = LPoly.one(F) if i == j else LPoly.zero(F)
            if (i, j) == (0, 2):
                want = Fp
            assert Phi[i, j] == want
    assert lift_transvection(form, 0, Fe(ctx, 0), a, 2, 1).is_identity()


def test_form_defect_formula():
    form = Form(2, 3)
    F = form.field
    rng = random.Random(3)
    for _ in range(20):
        Fp = LPoly(F, rng.randint(-3, 1), [rng.randrange(3) for _ in range(4)])
        v = rng.randrange(4)
        x = [LPoly(F, rng.randint(-2, 2), [rng.randrange(3) for _ in range(3)]) for _ in range(4)]
        y = [LPoly(F, rng.randint(-2, 2), [rng.randrange(3) for _ in range(3)]) for _ in range(4)]
        ev = form.basis_vector(v)
        expect = (sigma(Fp) + LPoly.t(F) * Fp) * form_value(form, x, ev) * sigma(form_value(form, y, ev))
        # the defect carries a minus sign, invisible in characteristic 2
        assert form_defect(form, Fp, v, x, y) == -expect


@pytest.mark.parametrize("n", [2, 3])
def test_lifts_commute_when_orthogonal(n):
    form = Form(n, 2)
    ctx, a = unit_root(2, 1)
    P1 = lift_transvection(form, form.e(1), a, a, 2, 1)
    P2 = lift_transvection(form, form.e(2), a, a, 2, 1)
    assert P1 @ P2 == P2 @ P1


@pytest.mark.parametrize("q,s", [(2, 1), (2, 2), (3, 1), (3, 2)])
def test_lift_specialises_to_finite_transvection(q, s):
    form = Form(2, q)
    spec = unitary_context(2, q, s)
    a = spec.a_fe
    for lam in admissible_lambdas(spec.ctx, a.code, q, s):
        for v in range(4):
            Phi = lift_transvection(form, v, Fe(spec.ctx, lam), a, q, s)
            assert specialize(Phi, a) == finite_transvection(spec, v, lam)


def test_trivial_specializations_examples():
    form = Form(2, 2)
    ctx, a = unit_root(2, 1)
    Phi = lift_transvection(form, 0, a, a, 2, 1)
    hits, bound = trivial_specializations(Phi, 2, 4)
    assert hits == [] and bound == solve_F(a, a, 2, 1).width()
    F = form.field
    rows = [list(r) for r in LMat.identity(F, 4).rows]
    rows[0][2] = LPoly(F, -1, (1, 1))
    hits, bound = trivial_specializations(LMat(F, rows), 2, 4)
    assert hits == [] and bound == 1
    hits, _ = trivial_specializations(shift_generator(form), 2, 4)
    assert hits == []
    with pytest.raises(CTError):
        trivial_specializations(LMat.identity(form.field, 4), 2, 4)


def test_trivial_specializations_finds_kernel():
    # (t^3 - 1) vanishes at every cube root of unity, so diag-shear by it dies at s=1
    form = Form(2, 2)
    F = form.field
    rows = [list(r) for r in LMat.identity(F, 4).rows]
    rows[0][2] = LPoly(F, 0, (1, 0, 0, 1))
    hits, bound = trivial_specializations(LMat(F, rows), 2, 4)
    assert 1 in hits and bound == 3


def test_transvection_matrix_form_preserving_iff_condition():
    form = Form(2, 2)
    F = form.field
    good = LPoly(F, -1, (1, 1))
    bad = LPoly.one(F)
    assert is_form_preserving(form, transvection_matrix(form, 0, good))
    assert not is_form_preserving(form, transvection_matrix(form, 0, bad))
