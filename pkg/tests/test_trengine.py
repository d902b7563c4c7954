import dataclasses
from fractions import Fraction

import pytest

from modtr.coeffring import CoeffElem, EvenPoly
from modtr.kernels import BetaScaled, FormalMoments, Kontsevich, Mirzakhani
from modtr.trengine import (
    AIRY_RELATIONS,
    AiryTensors,
    CapExhausted,
    UnstableError,
    airy_tensors,
    check_airy_relations,
    check_integrated_symmetry,
    ks_recursion,
    laplace_export,
    poly_data,
    psi_intersections,
    stable_range,
    twisted_volume,
    volume,
    volume_rows,
)

M, K = Mirzakhani(), Kontsevich()


def test_base_cases():
    assert volume(0, 3, M) == EvenPoly.constant(3, 1)
    assert volume(1, 1, M) == EvenPoly(1, {(0,): CoeffElem.pi2(1, Fraction(1, 12)), (1,): Fraction(1, 48)})
    assert volume(1, 1, K) == EvenPoly(1, {(1,): Fraction(1, 48)})


def test_four_holed_sphere():
    terms = {(0, 0, 0, 0): CoeffElem.pi2(1, 2)}
    for i in range(4):
        e = [0] * 4
        e[i] = 1
        terms[tuple(e)] = Fraction(1, 2)
    assert volume(0, 4, M) == EvenPoly(4, terms)


def test_one_torus_two_holes_closed_form():
    # (4 pi^2 + a)(12 pi^2 + a) / 192 with a = L1^2 + L2^2
    a = EvenPoly(2, {(1, 0): 1, (0, 1): 1})
    p = (a + EvenPoly.constant(2, CoeffElem.pi2(1, 4))) * (a + EvenPoly.constant(2, CoeffElem.pi2(1, 12)))
    assert volume(1, 2, M) == p.scale(Fraction(1, 192))


def test_five_holed_sphere_closed_form():
    terms = {(0,) * 5: CoeffElem.pi2(2, 10)}
    for i in range(5):
        e = [0] * 5
        e[i] = 1
        terms[tuple(e)] = CoeffElem.pi2(1, 3)
        e[i] = 2
        terms[tuple(e)] = Fraction(1, 8)
        for j in range(i + 1, 5):
            e = [0] * 5
            e[i] = e[j] = 1
            terms[tuple(e)] = Fraction(1, 2)
    assert volume(0, 5, M) == EvenPoly(5, terms)


def test_genus_two_one_hole():
    expect = EvenPoly(
        1,
        {
            (0,): CoeffElem.pi2(4, Fraction(29, 192)),
            (1,): CoeffElem.pi2(3, Fraction(169, 2880)),
            (2,): CoeffElem.pi2(2, Fraction(139, 23040)),
            (3,): CoeffElem.pi2(1, Fraction(29, 138240)),
            (4,): Fraction(1, 442368),
        },
    )
    assert volume(2, 1, M) == expect


def test_unstable_rejected():
    for g, n in [(0, 2), (1, 0), (0, 0), (-1, 4)]:
        with pytest.raises(UnstableError):
            volume(g, n, M)


def test_psi_numbers():
    assert psi_intersections(1, 1) == {(1,): Fraction(1, 24)}
    assert psi_intersections(0, 4)[(1, 0, 0, 0)] == 1
    assert psi_intersections(2, 1) == {(4,): Fraction(1, 1152)}
    assert psi_intersections(1, 2)[(1, 1)] == Fraction(1, 24)


def test_laplace_export_of_torus():
    assert laplace_export(volume(1, 1, K)) == {(1,): CoeffElem.const(Fraction(1, 24))}


def test_symmetric_and_degree():
    for g, n in stable_range(4):
        if n == 0:
            continue
        v = volume(g, n, M)
        assert v.is_symmetric()
        assert v.degree() == 6 * g - 6 + 2 * n


def test_volume_rows_shape():
    rows = list(volume_rows(1, 1, volume(1, 1, M)))
    assert rows[0] == {"g": 1, "n": 1, "d": [0], "pi2": 1, "num": "1", "den": "12"}


def test_ks_matches_recursion():
    for fam in (M, K, BetaScaled(3)):
        t = airy_tensors(fam, 10)
        for g, n in stable_range(3):
            if n:
                assert ks_recursion(t, g, n) == volume(g, n, fam).terms


def test_ks_cap_exhausted():
    t = airy_tensors(M, 2)
    with pytest.raises(CapExhausted):
        ks_recursion(t, 2, 1)


@pytest.mark.parametrize("fam", [M, K, BetaScaled(3)], ids=lambda f: f.id)
def test_airy_relations_hold(fam):
    rep = check_airy_relations(airy_tensors(fam, 10), 3)
    assert rep.passed, rep.failing()
    assert set(rep.residuals) == set(AIRY_RELATIONS)


def test_airy_window_beyond_cap():
    with pytest.raises(CapExhausted):
        check_airy_relations(airy_tensors(M, 3), 3)


def test_airy_mutation_detected():
    # every single entry inside the window matters
    t = airy_tensors(M, 10)
    for name in "ABCD":
        table = getattr(t, name)
        for key in sorted(table):
            ix = key if isinstance(key, tuple) else (key,)
            if max(ix) > 3:
                continue
            bad = t.copy()
            getattr(bad, name)[key] = table[key] + 1
            assert not check_airy_relations(bad, 3).passed, (name, key)


def test_airy_declared_symmetry_mutation():
    t = airy_tensors(M, 10)
    bad = t.copy()
    bad.A[(0, 1, 0)] = CoeffElem.const(1)
    assert bad.check_declared_symmetries()
    assert "A-symmetry" in check_airy_relations(bad, 3).failing()


def test_airy_json_round_trip():
    t = airy_tensors(K, 6)
    u = AiryTensors.from_json(t.to_json())
    assert (u.A, u.B, u.C, u.D, u.cap) == (t.A, t.B, t.C, t.D, t.cap)


@pytest.mark.parametrize("fam", [M, K, BetaScaled(2)], ids=lambda f: f.id)
def test_integrated_symmetry(fam):
    res = check_integrated_symmetry(fam, 3)
    assert all(not r for r in res.values()), {k: len(v) for k, v in res.items()}


def test_integrated_symmetry_mutation():
    data = poly_data(M)
    bad = dataclasses.replace(data, id="mutant-A", A=data.A + EvenPoly(3, {(1, 0, 0): 1}))
    res = check_integrated_symmetry(bad, 2)
    assert res["AB"]
    bad = dataclasses.replace(data, id="mutant-D", VD=data.VD + EvenPoly(1, {(0,): 1}))
    assert check_integrated_symmetry(bad, 2)["BD-CA"]


def test_scaling_law():
    for g, n in stable_range(3):
        if not n:
            continue
        for b in (Fraction(2), Fraction(1, 3)):
            assert volume(g, n, BetaScaled(b)) == volume(g, n, M).rescale(b).scale(b ** -(6 * g - 6 + 2 * n))


def test_top_degree_is_kontsevich():
    for g, n in stable_range(4):
        if n:
            assert volume(g, n, M).top_degree_part() == volume(g, n, K)


def test_twisted_torus():
    v = twisted_volume(1, 1, M, FormalMoments())
    assert v == volume(1, 1, M) + EvenPoly.constant(1, CoeffElem.symbol("u_0_0", 1, Fraction(1, 2)))
