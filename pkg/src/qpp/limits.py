"""Limit formulas: moments, free cumulants and 1/N corrections of the
limiting measures from the Taylor data (Ψ, Φ) of log Schur generating
functions, plus the non-asymptotic transfer identities between deformation
parameters (Markov-Krein type) and the maps that intertwine free convolution
with the deformed convolution.

All arithmetic in this module is exact; derivatives at u = 1 are coefficient
extractions from series in w = u - 1, and derivatives of u^(k-q) use the
exact falling products Π_j (k - q - j)."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

from .errors import InsufficientOrder, OutOfDomain, UnknownPreset
from .freeprob import (
    CumulantSeq,
    InfPair,
    MomentSeq,
    beta_r_series,
    eq_series,
)
from .series import (
    ONE,
    ZERO,
    RationalLike,
    Series,
    as_rational,
    binomial_series,
    rational_str,
)

REGIMES = ("full", "leading")


@dataclass(frozen=True)
class PsiSpec:
    """Taylor data a_k of Ψ(z) = Σ a_k (z-1)^k / k! at z = 1."""

    a: tuple[Fraction, ...]

    def __post_init__(self):
        if not self.a:
            raise ValueError("need at least a_0")
        if self.a[0] != 0:
            warnings.warn(
                "a_0 != 0: profile not normalized to vanish at 1", stacklevel=3
            )

    @staticmethod
    def of(values) -> "PsiSpec":
        return PsiSpec(tuple(as_rational(v) for v in values))

    @property
    def order(self) -> int:
        return len(self.a) - 1

    def prime_series(self, order: int) -> Series:
        """Ψ'(1+w) = Σ_j a_{j+1} w^j / j! as a w-series of the given order."""
        if self.order < order + 1:
            raise InsufficientOrder(
                f"need a_1..a_{order + 1}, have a up to a_{self.order}"
            )
        return Series(
            tuple(self.a[j + 1] / math.factorial(j) for j in range(order + 1))
        )

    def to_json(self) -> dict:
        return {"a": [rational_str(x) for x in self.a]}

    @staticmethod
    def from_json(obj: dict) -> "PsiSpec":
        return PsiSpec.of(obj["a"])


class PhiSpec(PsiSpec):
    """Taylor data b_k of the first-order correction profile Φ."""

    @property
    def b(self) -> tuple[Fraction, ...]:
        return self.a

    @staticmethod
    def of(values) -> "PhiSpec":
        return PhiSpec(tuple(as_rational(v) for v in values))

    def to_json(self) -> dict:
        return {"b": [rational_str(x) for x in self.a]}

    @staticmethod
    def from_json(obj: dict) -> "PhiSpec":
        return PhiSpec.of(obj["b"])


def _check_q_range(q: Fraction) -> None:
    if not (-1 <= q <= 1):
        raise OutOfDomain("deformation parameter must lie in [-1, 1]")


# ---------------------------------------------------------------------------
# Moments: the u = 1 derivative formula and the deformed-exponential formula.


def limit_moments(psi: PsiSpec, q: RationalLike, k: int) -> Fraction:
    """k-th moment of the limiting measure:
    Σ_{m=0}^k C(k,m)/(m+1)! d^m/du^m [ u^(k-q) (Ψ'(u))^(k-m) ] at u = 1."""
    qq = as_rational(q)
    if k == 0:
        return ONE
    if psi.order < k:
        raise InsufficientOrder(f"moment k={k} needs Taylor data a_1..a_{k}")
    total = ZERO
    for m in range(k + 1):
        u_pow = binomial_series(k - qq, m)
        psi_pow = psi.prime_series(m) ** (k - m) if k - m > 0 else Series.const(1, m)
        coeff = (u_pow * psi_pow).coefficient(m)
        total += Fraction(math.comb(k, m), m + 1) * coeff
    return total


def _f_series(psi: PsiSpec, q: Fraction, order: int) -> Series:
    """F(u) = e_q(u) Ψ'(e_q(u)) + e_q(u)/(e_q(u)-1) - 1/u as a u-series.

    This is the R-transform of the limiting measure; the singular pair is
    combined analytically (beta R-transform) before expansion."""
    e = eq_series(q, order)
    inner = e - 1  # constant term 0: composition argument for Ψ'(e_q(u))
    psi_part = e * psi.prime_series(order).compose(inner)
    return psi_part + beta_r_series(q, order)


def limit_moments_alt(psi: PsiSpec, q: RationalLike, k: int) -> Fraction:
    """k-th limiting moment from the deformed-exponential formula:
    Σ_{m=0}^{k-1} k!/(m!(m+1)!(k-m)!) d^m/du^m F(u)^(k-m) at u = 0,
    with F the R-transform series.  Must agree exactly with
    :func:`limit_moments`."""
    qq = as_rational(q)
    if k == 0:
        return ONE
    if psi.order < k:
        raise InsufficientOrder(f"moment k={k} needs Taylor data a_1..a_{k}")
    f = _f_series(psi, qq, k - 1)
    total = ZERO
    fpow = Series.const(1, k - 1)
    powers = [fpow]
    for _ in range(k):
        fpow = fpow * f
        powers.append(fpow)
    for m in range(k):
        # d^m/du^m at 0 equals m! [u^m]; the m! cancels against 1/m!.
        coeff = powers[k - m].coefficient(m)
        total += Fraction(math.factorial(k), math.factorial(m + 1) * math.factorial(k - m)) * coeff
    return total


def limit_cumulants(psi: PsiSpec, q: RationalLike, K: int) -> CumulantSeq:
    """Free cumulants of the limiting measure: κ_n is the u^(n-1)
    coefficient of e_q(u) Ψ'(e_q(u)) + R_beta(u)."""
    qq = as_rational(q)
    if K == 0:
        return CumulantSeq(())
    if psi.order < K:
        raise InsufficientOrder(f"K={K} cumulants need Taylor data a_1..a_{K}")
    f = _f_series(psi, qq, K - 1)
    return CumulantSeq(f.coeffs)


# ---------------------------------------------------------------------------
# 1/N corrections.


def inf_correction_moments(
    psi: PsiSpec,
    phi: PhiSpec,
    q: RationalLike,
    k: int,
    regime: str = "full",
) -> Fraction:
    """k-th moment of the 1/N correction to the limiting measure.

    full:    Σ_m C(k,m+1)/m! d^m[ u^(k-q) (Φ'(u) - (1-q)/(2u)) Ψ'(u)^(k-m-1) ]
    leading: the same with the (1-q)/(2u) term absent (the 1/N^ε regime
    for 0 < ε < 1, where the beta part contributes no derivative).
    Both derivatives are taken at u = 1.  k = 0 returns 0: mass is preserved.
    """
    if regime not in REGIMES:
        raise ValueError(f"regime must be one of {REGIMES}")
    qq = as_rational(q)
    if k == 0:
        return ZERO
    if psi.order < k or phi.order < k:
        raise InsufficientOrder(f"correction moment k={k} needs data through order {k}")
    total = ZERO
    for m in range(k):
        mid = phi.prime_series(m)
        if regime == "full":
            mid = mid - binomial_series(-1, m) * Fraction(1 - qq, 2)
        u_pow = binomial_series(k - qq, m)
        psi_pow = (
            psi.prime_series(m) ** (k - m - 1) if k - m - 1 > 0 else Series.const(1, m)
        )
        coeff = (u_pow * mid * psi_pow).coefficient(m)
        total += math.comb(k, m + 1) * coeff
    return total


def inf_cumulants(
    psi: PsiSpec,
    phi: PhiSpec,
    q: RationalLike,
    K: int,
    regime: str = "full",
) -> tuple[CumulantSeq, CumulantSeq]:
    """(κ, κ') of the infinitesimal limit.

    κ'_n is the u^(n-1) coefficient of e_q(u) Φ'(e_q(u)), plus -- in the
    full 1/N regime only -- the cumulants of the point mass at (q-1)/2,
    which contribute (q-1)/2 to κ'_1."""
    if regime not in REGIMES:
        raise ValueError(f"regime must be one of {REGIMES}")
    qq = as_rational(q)
    kappa = limit_cumulants(psi, qq, K)
    if K == 0:
        return kappa, CumulantSeq(())
    if phi.order < K:
        raise InsufficientOrder(f"K={K} needs correction data b_1..b_{K}")
    e = eq_series(qq, K - 1)
    phi_part = e * phi.prime_series(K - 1).compose(e - 1)
    corr = list(phi_part.coeffs)
    if regime == "full":
        corr[0] += Fraction(qq - 1, 2)
    return kappa, CumulantSeq(tuple(corr))


def inf_pair_from_profiles(
    psi: PsiSpec,
    phi: PhiSpec,
    q: RationalLike,
    K: int,
    regime: str = "full",
) -> InfPair:
    """(moments, correction moments) computed from the derivative formulas."""
    mu = MomentSeq(tuple(limit_moments(psi, q, k) for k in range(K + 1)))
    corr = tuple(
        inf_correction_moments(psi, phi, q, k, regime) for k in range(1, K + 1)
    )
    return InfPair(mu, corr)


# ---------------------------------------------------------------------------
# Transfer identities between deformation parameters.


def _moment_gf(m: MomentSeq) -> Series:
    """Σ_k μ_k z^(k+1) as a z-series of order K+1."""
    return Series((ZERO,) + m.mu)


def _series_to_moments(s: Series) -> MomentSeq:
    return MomentSeq(s.coeffs[1:])


def q_transfer(m: MomentSeq, q: RationalLike, q_prime: RationalLike) -> MomentSeq:
    """Transfer limiting moments between deformation parameters via
    (1 - q Σ μ_k^(q) z^(k+1))^(1/q) = (1 - q' Σ μ_k^(q') z^(k+1))^(1/q'),
    routed through the exp/log form at the q = 0 endpoint."""
    qq, qp = as_rational(q), as_rational(q_prime)
    _check_q_range(qq)
    _check_q_range(qp)
    if qq == qp:
        return m
    g = _moment_gf(m)
    # to the q = 0 moment series ...
    if qq == 0:
        g0 = g
    else:
        g0 = (Series.const(1, g.order) - g * qq).log() * (-1 / qq)
    # ... and back out at q'.
    if qp == 0:
        return _series_to_moments(g0)
    gp = (Series.const(1, g.order) - (g0 * (-qp)).exp()) * (ONE / qp)
    return _series_to_moments(gp)


def inf_transfer(
    m0: MomentSeq, m0_corr: tuple[Fraction, ...], q: RationalLike
) -> tuple[Fraction, ...]:
    """Transfer correction moments from the q = 0 pipeline to parameter q:
    solves exp(q Σ μ_k^(0) z^(k+1)) Σ μ'^(q) z^(k+1)
         = Σ μ'^(0) z^(k+1) + (q/2) Σ (k+1) μ_k^(0) z^(k+2)
    exactly for the μ'^(q).  Both correction tuples list indices 1..K."""
    qq = as_rational(q)
    K = m0.order
    if len(m0_corr) != K:
        raise InsufficientOrder("corrections must supply μ'_1..μ'_K")
    if qq == 0:
        return tuple(m0_corr)
    order = K + 1
    # Σ μ'_k z^(k+1) with the implicit μ'_0 = 0, at order K+1.
    corr0 = Series((ZERO, ZERO) + tuple(m0_corr))
    shift_terms = [ZERO, ZERO] + [
        (k + 1) * m0[k] for k in range(K)
    ]  # (q/2) Σ (k+1) μ_k z^(k+2), truncated at z^(K+1)
    rhs = corr0 + Series(tuple(shift_terms[: order + 1])) * Fraction(qq, 2)
    lhs_factor = (_moment_gf(m0) * qq).exp()
    solved = rhs * lhs_factor.reciprocal()
    return solved.coeffs[2:]


def reflect_moments(m: MomentSeq) -> MomentSeq:
    """Moments of 1 - X from the moments of X (binomial alternating sum)."""
    out = []
    for k in range(m.order + 1):
        out.append(
            sum(
                (math.comb(k, j) * (-1) ** j * m[j] for j in range(k + 1)),
                start=ZERO,
            )
        )
    return MomentSeq(tuple(out))


# ---------------------------------------------------------------------------
# Markov-Krein style maps linearizing the deformed convolution.


def p_map(m: MomentSeq, q: RationalLike) -> MomentSeq:
    """The map sending μ to ν with 1 - G_μ(z) = (1 - q G_ν(z))^(1/q),
    computed on Stieltjes series in w = 1/z.  Defined for 0 < |q| < 1."""
    qq = as_rational(q)
    if qq == 0 or abs(qq) == 1:
        raise OutOfDomain("the map is defined for q in (-1,0) ∪ (0,1)")
    g_mu = _moment_gf(m)
    one = Series.const(1, g_mu.order)
    g_nu = (one - (one - g_mu).pow_rational(qq)) * (ONE / qq)
    return _series_to_moments(g_nu)


def q_map(m: MomentSeq, q: RationalLike) -> MomentSeq:
    """The companion map sending μ to λ with
    1 + G_μ(z-1) = (1 - q G_λ(z))^(-1/q).  The argument shift z-1 is the
    +1 translation of the measure, i.e. a binomial transform of moments."""
    qq = as_rational(q)
    if qq == 0 or abs(qq) == 1:
        raise OutOfDomain("the map is defined for q in (-1,0) ∪ (0,1)")
    shifted = MomentSeq(
        tuple(
            sum((math.comb(k, j) * m[j] for j in range(k + 1)), start=ZERO)
            for k in range(m.order + 1)
        )
    )
    g_sh = _moment_gf(shifted)
    one = Series.const(1, g_sh.order)
    g_lam = (one - (one + g_sh).pow_rational(-qq)) * (ONE / qq)
    return _series_to_moments(g_lam)


# ---------------------------------------------------------------------------
# Character presets and argument inversion.


def psi_invert_argument(psi: PsiSpec, order: int) -> PsiSpec:
    """Taylor data of u -> Ψ(1/u): recompose the (u-1)-series with the exact
    expansion of 1/u - 1 = -w/(1+w)."""
    if psi.order < order:
        raise InsufficientOrder("inversion needs data through the target order")
    w_series = Series(
        tuple(psi.a[j] / math.factorial(j) for j in range(order + 1))
    )
    inner = Series(
        tuple(ZERO if j == 0 else Fraction((-1) ** j) for j in range(order + 1))
    )
    composed = w_series.compose(inner)
    return PsiSpec(
        tuple(composed.coefficient(j) * math.factorial(j) for j in range(order + 1))
    )


def char_presets(
    name: str, params: dict, order: int = 16
) -> tuple[PsiSpec, PhiSpec]:
    """Ψ/Φ Taylor data of the extreme-character families.

    poisson(γ):            Ψ = γ(u-1),        Φ = 0
    inv_poisson(γ):        Ψ = γ(1/u - 1),    Φ = 0
    poisson_with_corr(γ):  Ψ = Φ = γ(u-1)
    rank_one(γ, α):        Ψ = γ(1/u - 1),    Φ = -log(1 - α(u-1))
    """
    ps = {k: as_rational(v) for k, v in params.items()}
    zero = PhiSpec((ZERO,) * (order + 1))
    if name == "poisson":
        g = ps["gamma"]
        a = [ZERO] * (order + 1)
        if order >= 1:
            a[1] = g
        return PsiSpec(tuple(a)), zero
    if name == "inv_poisson":
        g = ps["gamma"]
        a = [g * (-1) ** k * math.factorial(k) for k in range(order + 1)]
        a[0] = ZERO
        return PsiSpec(tuple(a)), zero
    if name == "poisson_with_corr":
        g = ps["gamma"]
        a = [ZERO] * (order + 1)
        if order >= 1:
            a[1] = g
        return PsiSpec(tuple(a)), PhiSpec(tuple(a))
    if name == "rank_one":
        g, alpha = ps["gamma"], ps["alpha"]
        a = [g * (-1) ** k * math.factorial(k) for k in range(order + 1)]
        a[0] = ZERO
        # -log(1 - α(u-1)) = Σ_{k>=1} α^k (u-1)^k / k, so b_k = (k-1)! α^k
        b = [ZERO] + [
            math.factorial(k - 1) * alpha**k for k in range(1, order + 1)
        ]
        return PsiSpec(tuple(a)), PhiSpec(tuple(b))
    raise UnknownPreset(name)
