import math

import pytest

from modtr.hyperbolic import (
    FNTorus,
    PantsMetric,
    boundary_from_seams,
    christoffel_spectrum,
    corrected_seam_bound,
    count_curves,
    count_small_pants_bound_check,
    fit_growth,
    mcshane_partial_sums,
    mcshane_sum,
    pants_grid,
    seam_length,
    seam_lengths,
    torus_spectrum,
)

SAMPLES = [FNTorus(1.0, 0.0, 1.0), FNTorus(2.0, 0.7, 2.0), FNTorus(0.8, 1.3, 3.0), FNTorus(1.5, -0.4, 4.0)]


def test_seam_example():
    assert seam_length(PantsMetric(2, 2, 2)) == pytest.approx(1.70491, abs=1e-5)


def test_seam_inverse():
    p = PantsMetric(1.2, 0.7, 2.5)
    d12, _, _ = seam_lengths(p)
    assert boundary_from_seams(1.2, 0.7, d12) == pytest.approx(2.5, rel=1e-12)


def test_pants_validation():
    with pytest.raises(ValueError):
        PantsMetric(0, 1, 1)
    with pytest.raises(ValueError):
        FNTorus(1, 0, -1)


@pytest.mark.parametrize("t", SAMPLES)
def test_commutator_is_boundary(t):
    assert t.commutator_trace() == pytest.approx(-2 * math.cosh(t.boundary / 2), rel=1e-10)
    x, y, z = t.traces()
    # Fricke: x^2 + y^2 + z^2 - xyz - 2 = tr[X, Y]
    assert x * x + y * y + z * z - x * y * z - 2 == pytest.approx(t.commutator_trace(), rel=1e-9)


def test_holonomy_invariants_random():
    import random

    rng = random.Random(3)
    for _ in range(100):
        t = FNTorus(rng.uniform(0.2, 4), rng.uniform(-3, 3), rng.uniform(0.2, 4))
        X, Y = t.holonomy()
        x, y = X[0] + X[3], Y[0] + Y[3]
        XY = (X[0] * Y[0] + X[1] * Y[2], 0, 0, X[2] * Y[1] + X[3] * Y[3])
        z = XY[0] + XY[3]
        c = t.commutator_trace()
        assert x * x + y * y + z * z - x * y * z - 2 == pytest.approx(c, rel=1e-10)
        assert 2 * math.cosh(t.boundary / 2) == pytest.approx(abs(c), rel=1e-10)
        assert c <= -2


def test_spectrum_matches_words():
    t = FNTorus(2.0, 0.7, 2.0)
    tree = torus_spectrum(t, 8.0)
    words = christoffel_spectrum(t, 8.0, 40)
    assert len(tree) == len(words)
    for a, b in zip(tree, words):
        assert a[:2] == b[:2]
        assert a[2] == pytest.approx(b[2], abs=1e-9)


def test_dehn_twist_invariance():
    t = FNTorus(1.3, 0.2, 2.0)
    a = [c[2] for c in torus_spectrum(t, 12.0)]
    b = [c[2] for c in torus_spectrum(t.dehn_twist(), 12.0)]
    assert len(a) == len(b)
    assert max(abs(x - y) for x, y in zip(a, b)) < 1e-9


@pytest.mark.parametrize("t", SAMPLES)
def test_mcshane(t):
    rows = mcshane_partial_sums(t, 25.0)
    sums = [r[3] for r in rows]
    assert all(b > a for a, b in zip(sums, sums[1:]))
    assert sums[-1] <= 1 + 1e-9
    assert abs(sums[-1] - 1) < 1e-3
    assert mcshane_sum(t, 25.0) == pytest.approx(sums[-1], abs=1e-12)


@pytest.mark.parametrize("t", SAMPLES)
def test_mcshane_tail_decay(t):
    # fit K on short cutoffs, check the bound on longer ones
    rows = mcshane_partial_sums(t, 30.0)

    def tail(cut):
        s = 0.0
        for r in rows:
            if r[2] <= cut:
                s = r[3]
        return 1 - s

    def shape(cut):
        return cut * cut * math.exp(-(cut - t.boundary) / 2)

    K = max(tail(c) / shape(c) for c in range(6, 13))
    for c in range(13, 31):
        assert 0 <= tail(c) <= K * shape(c)


def test_empty_cutoff():
    t = SAMPLES[0]
    assert torus_spectrum(t, 0) == []
    assert mcshane_sum(t, 0) == 0


def test_kontsevich_variant_runs():
    assert mcshane_sum(SAMPLES[0], 15.0, "kontsevich") >= 0


def test_growth():
    t = SAMPLES[0]
    cut = [5 + 2.5 * i for i in range(11)]
    counts = count_curves(t, cut)
    assert counts == [8, 16, 28, 46, 66, 86, 112, 146, 180, 218, 256]
    fit = fit_growth(cut, counts)
    assert 1.5 < fit["slope"] < 2.5
    assert all(c <= fit["N"] * L * L for L, c in zip(cut, counts))


def test_corrected_seam_bound_holds():
    for eps in (0.5, 1.0):
        rep = count_small_pants_bound_check(pants_grid(eps), eps, corrected_seam_bound(eps))
        assert rep["checked"] > 0 and rep["violations"] == []


def test_stated_seam_bound_has_counterexample():
    # L = (1, 1, 2) at eps = 1: d12 = 3.029 > 2 ln 4 = 2.773
    d = seam_length(PantsMetric(1.0, 1.0, 2.0))
    assert d > 2 * math.log(4)
    rep = count_small_pants_bound_check([(1.0, 1.0, 2.0)], 1.0)
    assert len(rep["violations"]) == 1


def test_precondition_skips():
    rep = count_small_pants_bound_check([(0.1, 1, 1), (1, 1, 3)], 0.5)
    assert rep["checked"] == 0 and rep["skipped"] == 2
