import random
from fractions import Fraction as F

import pytest

from qpp.errors import InsufficientOrder, OutOfDomain, UnknownPreset
from qpp.freeprob import (
    MomentSeq,
    beta_moments,
    beta_r_series,
    cumulants_to_moments,
    free_convolve,
    inf_moments_from_cumulants,
    otimes_q,
)
from qpp.limits import (
    PhiSpec,
    PsiSpec,
    char_presets,
    inf_correction_moments,
    inf_cumulants,
    inf_pair_from_profiles,
    inf_transfer,
    limit_cumulants,
    limit_moments,
    limit_moments_alt,
    p_map,
    psi_invert_argument,
    q_map,
    q_transfer,
    reflect_moments,
)
from qpp.series import Series

Q_GRID = (F(0), F(1), F(-1), F(1, 2), F(-1, 2), F(1, 3))


def rng_psi(rng, order=8):
    return PsiSpec((F(0),) + tuple(F(rng.randint(-9, 9), rng.choice((1, 2, 3))) for _ in range(order)))


def rng_phi(rng, order=8):
    return PhiSpec((F(0),) + tuple(F(rng.randint(-9, 9), rng.choice((1, 2, 3))) for _ in range(order)))


def test_zero_profile_gives_beta_moments():
    psi = PsiSpec((F(0),) * 10)
    for q in Q_GRID:
        bm = beta_moments(q, 8)
        for k in range(9):
            assert limit_moments(psi, q, k) == bm[k]


def test_first_moment_with_linear_profile():
    g = F(7, 3)
    psi, _ = char_presets("poisson", {"gamma": g}, order=4)
    for q in Q_GRID:
        assert limit_moments(psi, q, 1) == g + F(1 - q, 2)


def test_uniform_at_q0():
    psi = PsiSpec((F(0),) * 4)
    assert limit_moments(psi, 0, 2) == F(1, 3)


def test_mp_mean_at_q1():
    g = F(5, 4)
    psi, _ = char_presets("poisson", {"gamma": g}, order=4)
    assert limit_moments_alt(psi, 1, 1) == g


def test_moment_formulas_agree():
    rng = random.Random(51)
    for _ in range(8):
        psi = rng_psi(rng)
        for q in Q_GRID:
            for k in range(9):
                assert limit_moments(psi, q, k) == limit_moments_alt(psi, q, k)


def test_insufficient_order_raises():
    psi = PsiSpec((F(0), F(1)))
    with pytest.raises(InsufficientOrder):
        limit_moments(psi, F(1, 2), 2)
    with pytest.raises(InsufficientOrder):
        limit_cumulants(psi, F(1, 2), 5)


def test_cumulant_low_orders_and_reconstruction():
    rng = random.Random(53)
    for _ in range(5):
        psi = rng_psi(rng)
        a = psi.a
        for q in (F(0), F(1), F(-1), F(1, 2)):
            kap = limit_cumulants(psi, q, 8)
            assert kap[1] == a[1] + F(1 - q, 2)
            assert kap[2] == a[2] + a[1] + F(1 - q * q, 12)
            assert cumulants_to_moments(kap).mu == tuple(
                limit_moments(psi, q, k) for k in range(9)
            )


def test_q0_r_transform_exponential_form():
    rng = random.Random(59)
    psi = rng_psi(rng)
    eu = Series.identity(7).exp()
    manual = eu * psi.prime_series(7).compose(eu - 1) + beta_r_series(0, 7)
    assert limit_cumulants(psi, 0, 8).r_series() == manual


def test_shifted_q_minus_one_r_transform():
    # with the unit shift removed, R becomes (z+1) Psi'(z+1)
    rng = random.Random(61)
    psi = rng_psi(rng)
    kap = limit_cumulants(psi, -1, 8)
    shifted = (kap[1] - 1,) + kap.kappa[1:]
    zp1 = Series.of([1, 1], order=7)
    expect = zp1 * psi.prime_series(7).compose(Series.of([0, 1], order=7))
    assert shifted == expect.coeffs


def test_correction_moments_zero_profiles():
    psi = PsiSpec((F(0),) * 10)
    phi = PhiSpec((F(0),) * 10)
    for q in (F(0), F(1, 2), F(-1)):
        bm = beta_moments(q, 8)
        for k in range(1, 9):
            assert inf_correction_moments(psi, phi, q, k) == F(q - 1, 2) * k * bm[k - 1]
        assert inf_correction_moments(psi, phi, q, 0) == 0


def test_leading_regime_is_linear_in_phi():
    psi = PsiSpec((F(0), F(2), F(1), F(0), F(0)))
    phi0 = PhiSpec((F(0),) * 5)
    for q in Q_GRID:
        for k in range(1, 5):
            assert inf_correction_moments(psi, phi0, q, k, "leading") == 0


def test_inf_cumulant_low_orders():
    rng = random.Random(67)
    psi, phi = rng_psi(rng), rng_phi(rng)
    b = phi.b
    for q in Q_GRID:
        _, kp = inf_cumulants(psi, phi, q, 8)
        assert kp[1] == b[1] - F(1 - q, 2)
        assert kp[2] == b[2] + b[1]
        assert kp[3] == F(1, 2) * b[3] + F(3 + q, 2) * b[2] + F(1 + q, 2) * b[1]
        # leading regime drops only the point-mass shift in kappa'_1
        _, kp_lead = inf_cumulants(psi, phi, q, 8, "leading")
        assert kp_lead[1] == kp[1] + F(1 - q, 2)
        assert kp_lead.kappa[1:] == kp.kappa[1:]


def test_inf_cumulants_reconstruct_corrections():
    rng = random.Random(71)
    psi, phi = rng_psi(rng), rng_phi(rng)
    for q in (F(0), F(1, 2), F(-1)):
        pair = inf_moments_from_cumulants(inf_cumulants(psi, phi, q, 8))
        direct = inf_pair_from_profiles(psi, phi, q, 8)
        assert pair.moments.mu == direct.moments.mu
        assert pair.corr == direct.corr


def test_q_transfer_endpoints_and_round_trip():
    uni = beta_moments(0, 8)
    for q in (F(1), F(-1), F(1, 2), F(1, 3)):
        assert q_transfer(beta_moments(q, 8), q, 0).mu == uni.mu
    assert q_transfer(uni, 0, -1).mu == (F(1),) * 9
    rng = random.Random(73)
    m = MomentSeq((F(1),) + tuple(F(rng.randint(-5, 5), 2) for _ in range(8)))
    for q in Q_GRID:
        for qp in Q_GRID:
            assert q_transfer(q_transfer(m, q, qp), qp, q).mu == m.mu


def test_q_transfer_matches_profiles():
    rng = random.Random(79)
    psi = rng_psi(rng)
    for q in Q_GRID:
        mq = MomentSeq(tuple(limit_moments(psi, q, k) for k in range(9)))
        for qp in Q_GRID:
            want = tuple(limit_moments(psi, qp, k) for k in range(9))
            assert q_transfer(mq, q, qp).mu == want


def test_q_transfer_domain():
    with pytest.raises(OutOfDomain):
        q_transfer(beta_moments(0, 4), 0, F(3, 2))


def test_inf_transfer_identity():
    rng = random.Random(83)
    psi, phi = rng_psi(rng), rng_phi(rng)
    m0 = MomentSeq(tuple(limit_moments(psi, 0, k) for k in range(9)))
    c0 = tuple(inf_correction_moments(psi, phi, 0, k) for k in range(1, 9))
    assert inf_transfer(m0, c0, 0) == c0
    for q in (F(1), F(-1), F(1, 2), F(-2, 3)):
        want = tuple(inf_correction_moments(psi, phi, q, k) for k in range(1, 9))
        assert inf_transfer(m0, c0, q) == want


def test_p_q_maps_linearize():
    rng = random.Random(89)
    for q in (F(1, 2), F(-1, 2), F(1, 3)):
        a = MomentSeq((F(1),) + tuple(F(rng.randint(-5, 5), 2) for _ in range(8)))
        b = MomentSeq((F(1),) + tuple(F(rng.randint(-5, 5), 2) for _ in range(8)))
        conv = free_convolve(a, b)
        assert p_map(conv, q).mu == otimes_q(p_map(a, q), p_map(b, q), q).mu
        assert q_map(conv, q).mu == otimes_q(q_map(a, q), q_map(b, q), q).mu


def test_p_q_maps_reject_endpoints():
    m = beta_moments(0, 4)
    for bad in (F(0), F(1), F(-1)):
        with pytest.raises(OutOfDomain):
            p_map(m, bad)
        with pytest.raises(OutOfDomain):
            q_map(m, bad)


def test_p_map_first_moments_consistent():
    # G_mu = w + ... for delta(0): nu solves (1-w) = (1-q G_nu)^(1/q)
    m = MomentSeq.of([1, 0, 0, 0, 0])
    q = F(1, 2)
    nu = p_map(m, q)
    g_nu = Series((F(0),) + nu.mu)
    lhs = (Series.const(1, 5) - g_nu * q).pow_rational(1 / q)
    assert lhs == Series.of([1, -1], order=5)


def test_reflect_moments():
    assert reflect_moments(MomentSeq.of([1, 0, 0])).mu == (F(1), F(1), F(1))
    uni = MomentSeq.of([F(1, k + 1) for k in range(7)])
    assert reflect_moments(uni).mu == uni.mu


def test_reflection_against_mirrored_profile():
    rng = random.Random(97)
    psi = rng_psi(rng)
    for q in Q_GRID:
        mirrored = psi_invert_argument(psi, 8)
        lhs = reflect_moments(
            MomentSeq(tuple(limit_moments(mirrored, -q, k) for k in range(9)))
        )
        assert lhs.mu == tuple(limit_moments(psi, q, k) for k in range(9))


def test_char_presets():
    psi, phi = char_presets("poisson", {"gamma": F(2, 3)}, order=5)
    assert psi.a == (F(0), F(2, 3), F(0), F(0), F(0), F(0))
    assert all(x == 0 for x in phi.b)
    psi, _ = char_presets("inv_poisson", {"gamma": 2}, order=4)
    assert psi.a == (F(0), F(-2), F(4), F(-12), F(48))
    psi, phi = char_presets("poisson_with_corr", {"gamma": F(1, 2)}, order=3)
    assert psi.a == phi.b == (F(0), F(1, 2), F(0), F(0))
    psi, phi = char_presets("rank_one", {"gamma": 1, "alpha": F(1, 4)}, order=4)
    assert phi.b[1] == F(1, 4)
    assert phi.b[2] == F(1, 16) * 1  # (k-1)! alpha^k at k = 2
    with pytest.raises(UnknownPreset):
        char_presets("bogus", {})


def test_psi_spec_warns_on_nonzero_a0():
    with pytest.warns(UserWarning):
        PsiSpec((F(1), F(0)))


def test_inverted_argument_is_involutive():
    rng = random.Random(101)
    psi = rng_psi(rng)
    twice = psi_invert_argument(psi_invert_argument(psi, 8), 8)
    assert twice.a == psi.a
