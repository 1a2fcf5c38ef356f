import math
from fractions import Fraction as F

import pytest

from qpp.densities import (
    eval_density,
    make_model,
    mk_dense_stieltjes_closed,
    quadrature,
    stieltjes_numeric,
    verify_p_relation,
)
from qpp.errors import BadParams, OutOfDomain, TooCloseToSupport
from qpp.freeprob import beta_moments
from qpp.limits import (
    PhiSpec,
    PsiSpec,
    char_presets,
    inf_correction_moments,
    limit_moments,
)

TOL = 1e-9


def test_uniform_moment():
    m = make_model("uniform")
    assert abs(quadrature(m, 3) - 0.25) < 1e-10


def test_beta_q_moments_match_series():
    for q in (F(1, 2), F(-1, 2), F(1, 3)):
        m = make_model("beta_q", q=q)
        bm = beta_moments(q, 6)
        for k in range(7):
            assert abs(quadrature(m, k) - float(bm[k])) < TOL


def test_beta_q_degenerate_endpoints_are_atoms():
    assert make_model("beta_q", q=1).atoms == ((0.0, 1.0),)
    assert make_model("beta_q", q=-1).atoms == ((1.0, 1.0),)


def test_semicircle_mass_and_variance():
    m = make_model("semicircle", gamma=F(3, 2), center=0)
    assert abs(quadrature(m, 0) - 1.0) < 1e-10
    assert abs(quadrature(m, 1)) < 1e-10
    assert abs(quadrature(m, 2) - 1.5) < 1e-10


def test_mp_atom_bookkeeping():
    small = make_model("marchenko_pastur", gamma=F(1, 4))
    assert small.atoms == ((0.0, 0.75),)
    assert abs(quadrature(small, 0) - 1.0) < 1e-10
    big = make_model("marchenko_pastur", gamma=4)
    assert big.atoms == ()
    assert abs(quadrature(big, 1) - 4.0) < 1e-8


def test_interp_matches_exact_series_moments():
    for gamma in (F(1, 4), F(4)):
        psi, _ = char_presets("poisson", {"gamma": gamma}, order=7)
        for q in (F(0), F(1, 2), F(-1, 2), F(1), F(-1)):
            model = make_model("interp", gamma=gamma, q=q)
            for k in range(7):
                want = float(limit_moments(psi, q, k))
                assert abs(quadrature(model, k) - want) < 1e-8, (gamma, q, k)


def test_interp_small_q_approaches_plancherel():
    mi = make_model("interp", gamma=F(1, 4), q=F(1, 10**10))
    mp = make_model("plancherel", gamma=F(1, 4))
    for t in (0.05, 0.12, 0.3, 0.6, 1.1, 1.7, 2.1):
        assert abs(eval_density(mi, t) - eval_density(mp, t)) < 1e-9


def test_interp_endpoints_equal_mp_and_shifted_semicircle():
    for gamma in (F(1, 4), F(4)):
        g = float(gamma)
        sg = math.sqrt(g)
        grid = [(1 - sg) ** 2 + 4 * sg * i / 20 for i in range(1, 20)]
        mp = make_model("marchenko_pastur", gamma=gamma)
        plus = make_model("interp", gamma=gamma, q=1)
        assert plus.atoms == mp.atoms
        sc = make_model("semicircle", gamma=gamma, center=g + 1)
        minus = make_model("interp", gamma=gamma, q=-1)
        assert minus.atoms == ()
        for t in grid:
            assert abs(eval_density(plus, t) - eval_density(mp, t)) < 1e-12
            assert abs(eval_density(minus, t) - eval_density(sc, t)) < 1e-12


def test_plancherel_plateau_value_is_one():
    m = make_model("plancherel", gamma=F(1, 4))
    assert eval_density(m, 0.1) == 1.0
    assert abs(quadrature(m, 0) - 1.0) < 1e-10


def test_corr_semicircle_value_and_moments():
    m = make_model("corr_semicircle")
    assert abs(eval_density(m, 2.0) + 1.0 / (2 * math.pi)) < 1e-14
    assert abs(quadrature(m, 0)) < 1e-10
    psi, phi = char_presets("poisson_with_corr", {"gamma": 1}, order=6)
    for k in range(1, 6):
        want = float(inf_correction_moments(psi, phi, F(-1), k))
        assert abs(quadrature(m, k) - want) < 1e-7


def test_corr_semicircle_shifted_moments():
    m = make_model("corr_semicircle_shifted")
    assert abs(quadrature(m, 0)) < 1e-10
    data = [F(0)] + [F((-1) ** k * math.factorial(k)) for k in range(1, 7)]
    psi, phi = PsiSpec.of(data), PhiSpec.of(data)
    for k in range(1, 6):
        want = float(inf_correction_moments(psi, phi, F(1), k))
        assert abs(quadrature(m, k) - want) < 1e-7


@pytest.mark.parametrize(
    "gamma,alpha,has_atom",
    [(F(4), F(3, 2), True), (F(2), F(3, 2), True), (F(9), F(1), False), (F(4), F(1, 2), False)],
)
def test_corr_rank_one(gamma, alpha, has_atom):
    m = make_model("corr_rank_one", gamma=gamma, alpha=alpha)
    assert bool(m.atoms) == has_atom
    if has_atom:
        pos, w = m.atoms[0]
        g, a = float(gamma), float(alpha)
        assert abs(pos - (g / (a + 1) - g + a + 1)) < 1e-12
        assert abs(w - (a + 1) / a) < 1e-12
    assert abs(quadrature(m, 0)) < 1e-10
    psi, phi = char_presets("rank_one", {"gamma": gamma, "alpha": alpha}, order=6)
    for k in range(1, 6):
        want = float(inf_correction_moments(psi, phi, F(-1), k))
        assert abs(quadrature(m, k) - want) < 1e-7


def test_corr_rank_one_rejects_atomic_base():
    with pytest.raises(BadParams):
        make_model("corr_rank_one", gamma=F(1, 2), alpha=1)


def test_mk_dense_single_interval():
    m = make_model("mk_dense", alphas=[0], betas=[1], q=F(1, 2))
    assert abs(quadrature(m, 0) - 1.0) < 1e-10
    # coincides with beta(1-q, 1+q)
    bm = beta_moments(F(1, 2), 5)
    for k in range(6):
        assert abs(quadrature(m, k) - float(bm[k])) < TOL
    g = stieltjes_numeric(m, 2 + 0j)
    closed = 1 / 0.5 - 1 / 0.5 * ((2 - 1) / 2) ** 0.5
    assert abs(g - closed) < 1e-9


def test_mk_dense_two_intervals():
    m = make_model("mk_dense", alphas=[0, F(3, 4)], betas=[F(1, 2), F(5, 4)], q=F(1, 3))
    assert abs(quadrature(m, 0) - 1.0) < 1e-10
    z = 3.0 + 0.7j
    assert abs(stieltjes_numeric(m, z) - mk_dense_stieltjes_closed(m, z)) < 1e-8


def test_mk_dense_q_zero_is_the_uniform_union():
    m = make_model("mk_dense", alphas=[0], betas=[1], q=0)
    assert eval_density(m, 0.3) == 1.0
    assert abs(quadrature(m, 0) - 1.0) < 1e-12
    two = make_model("mk_dense", alphas=[F(-1), F(1)], betas=[F(-1, 2), F(3, 2)], q=0)
    assert eval_density(two, -0.75) == 1.0
    assert eval_density(two, 0.0) == 0.0
    z = 4.0 + 0j
    assert abs(stieltjes_numeric(two, z) - mk_dense_stieltjes_closed(two, z)) < 1e-9


def test_mk_dense_validation():
    with pytest.raises(BadParams):
        make_model("mk_dense", alphas=[0], betas=[F(1, 2)], q=F(1, 2))  # length != 1
    with pytest.raises(BadParams):
        make_model("mk_dense", alphas=[0, F(1, 4)], betas=[F(1, 2), F(5, 4)], q=F(1, 2))


def test_verify_p_relation():
    m = make_model("mk_dense", alphas=[0], betas=[1], q=F(1, 2))
    assert verify_p_relation(m, F(1, 2), points=(2.0, 3.0, 5.0))
    m2 = make_model("mk_dense", alphas=[0, F(3, 4)], betas=[F(1, 2), F(5, 4)], q=F(1, 3))
    assert verify_p_relation(m2, F(1, 3))
    with pytest.raises(OutOfDomain):
        verify_p_relation(m, 1)


def test_stieltjes_atom_model():
    m = make_model("beta_q", q=-1)  # delta(1)
    assert abs(stieltjes_numeric(m, 3 + 0j) - 0.5) < 1e-12


def test_stieltjes_uniform_log():
    m = make_model("uniform")
    assert abs(stieltjes_numeric(m, 2 + 0j) - math.log(2)) < 1e-10


def test_stieltjes_distance_guard():
    m = make_model("uniform")
    with pytest.raises(TooCloseToSupport):
        stieltjes_numeric(m, 1.05 + 0j)


def test_eval_density_outside_support_is_zero():
    m = make_model("semicircle", gamma=1, center=0)
    assert eval_density(m, 5.0) == 0.0
    assert eval_density(m, -5.0) == 0.0


def test_quadrature_power_cap():
    m = make_model("uniform")
    with pytest.raises(BadParams):
        quadrature(m, 13)


def test_quadrature_failure_reports_estimate():
    from qpp.densities import _integrate_piece
    from qpp.errors import QuadratureFailure

    with pytest.raises(QuadratureFailure) as exc:
        _integrate_piece(
            lambda x, dl, dh: dl ** -0.95, 0.0, 1.0, tol=1e-14, max_level=2
        )
    assert exc.value.estimate > 0
    assert exc.value.value is not None


def test_bad_params():
    with pytest.raises(BadParams):
        make_model("semicircle", gamma=float("nan"))
    with pytest.raises(BadParams):
        make_model("interp", gamma=1, q=F(1, 2))  # gamma = 1 excluded
    with pytest.raises(BadParams):
        make_model("nonsense")
