"""Free-probability kernel: moment/cumulant conversions, their infinitesimal
(dual-number) analogues, the deformed exponential, beta-measure data, and the
deformed convolution that the quantized R-transform linearizes.

Production conversions use the O(K^3) recursion coming from the functional
equation M(z) = 1 + sum_s k_s z^s M(z)^s; the non-crossing enumeration in
:mod:`qpp.partitions` exists purely as an independent oracle."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import OrderMismatch
from .partitions import NCPartition, nc_partitions
from .series import ONE, ZERO, RationalLike, Series, as_rational, rational_str

__all__ = [
    "MomentSeq",
    "CumulantSeq",
    "InfPair",
    "NCPartition",
    "nc_enumerate",
    "moments_to_cumulants",
    "cumulants_to_moments",
    "moments_from_cumulants_nc",
    "corr_moments_from_cumulants_nc",
    "inf_moments_from_cumulants",
    "inf_cumulants_from_moments",
    "eq_series",
    "beta_moments",
    "beta_r_series",
    "beta_data",
    "r_quant",
    "free_convolve",
    "otimes_q",
    "inf_free_convolve",
]


@dataclass(frozen=True)
class MomentSeq:
    """Moments (μ_0 = 1, μ_1, ..., μ_K)."""

    mu: tuple[Fraction, ...]

    def __post_init__(self):
        if not self.mu or self.mu[0] != 1:
            raise ValueError("moment sequences start with μ_0 = 1")

    @staticmethod
    def of(values) -> "MomentSeq":
        return MomentSeq(tuple(as_rational(v) for v in values))

    @property
    def order(self) -> int:
        return len(self.mu) - 1

    def __getitem__(self, k: int) -> Fraction:
        return self.mu[k]

    def to_json(self) -> dict:
        return {"order": self.order, "mu": [rational_str(m) for m in self.mu]}

    @staticmethod
    def from_json(obj: dict) -> "MomentSeq":
        return MomentSeq.of(obj["mu"])


@dataclass(frozen=True)
class CumulantSeq:
    """Free cumulants (κ_1, ..., κ_K); indexing starts at 1."""

    kappa: tuple[Fraction, ...]

    @staticmethod
    def of(values) -> "CumulantSeq":
        return CumulantSeq(tuple(as_rational(v) for v in values))

    @property
    def order(self) -> int:
        return len(self.kappa)

    def __getitem__(self, n: int) -> Fraction:
        """κ_n for 1 <= n <= K."""
        if n < 1 or n > self.order:
            raise IndexError(f"κ_{n} outside 1..{self.order}")
        return self.kappa[n - 1]

    def r_series(self) -> Series:
        """R(z) = sum κ_{n+1} z^n as a Series of order K-1."""
        return Series(self.kappa)

    def to_json(self) -> dict:
        return {"order": self.order, "kappa": [rational_str(c) for c in self.kappa]}

    @staticmethod
    def from_json(obj: dict) -> "CumulantSeq":
        return CumulantSeq.of(obj["kappa"])


@dataclass(frozen=True)
class InfPair:
    """A moment sequence together with the moments of its 1/N correction.

    corr holds (μ'_1, ..., μ'_K); the implicit μ'_0 is 0 because the
    finite-N measures are probability measures at every N.
    """

    moments: MomentSeq
    corr: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.corr) != self.moments.order:
            raise ValueError("corr must supply μ'_1..μ'_K")


def nc_enumerate(k: int) -> list[NCPartition]:
    """All non-crossing partitions of {1..k} (Catalan(k) of them)."""
    return nc_partitions(k)


# ---------------------------------------------------------------------------
# Dual numbers a + ε a' with ε² = 0: the Leibniz-type infinitesimal sums are
# the ε-parts of the plain sums run over these.


class _Dual:
    __slots__ = ("a", "b")

    def __init__(self, a: Fraction, b: Fraction = ZERO):
        self.a = a
        self.b = b

    def __add__(self, o):
        return _Dual(self.a + o.a, self.b + o.b)

    def __mul__(self, o):
        return _Dual(self.a * o.a, self.a * o.b + self.b * o.a)


def cumulants_to_moments(c: CumulantSeq) -> MomentSeq:
    """Moments from free cumulants via the moment-series recursion.

    μ_n = Σ_{s=1}^n κ_s [z^(n-s)] M(z)^s needs M only up to z^(n-1), so the
    moments resolve triangularly."""
    K = c.order
    mu = [ONE]
    for n in range(1, K + 1):
        total = ZERO
        pw = [ONE] + [ZERO] * max(0, n - 1)  # M^0, truncated at z^(n-1)
        for s in range(1, n + 1):
            new = [ZERO] * n
            for i in range(n):
                if pw[i] == 0:
                    continue
                for j in range(min(len(mu), n - i)):
                    new[i + j] += pw[i] * mu[j]
            pw = new  # now M^s
            total += c[s] * pw[n - s]
        mu.append(total)
    return MomentSeq(tuple(mu))


def moments_to_cumulants(m: MomentSeq) -> CumulantSeq:
    """Free cumulants from moments; triangular inversion of the recursion."""
    K = m.order
    kappa: list[Fraction] = []
    for n in range(1, K + 1):
        partial = cumulants_to_moments(CumulantSeq(tuple(kappa) + (ZERO,) * (n - len(kappa))))
        # μ_n depends on κ_n with coefficient exactly 1.
        kappa.append(m[n] - partial[n])
    return CumulantSeq(tuple(kappa))


def moments_from_cumulants_nc(c: CumulantSeq, k: int) -> Fraction:
    """Oracle: μ_k = Σ_{π∈NC(k)} Π_{V∈π} κ_{|V|} by direct enumeration."""
    if k == 0:
        return ONE
    total = ZERO
    for part in nc_partitions(k):
        term = ONE
        for blk in part:
            term *= c[len(blk)]
        total += term
    return total


def corr_moments_from_cumulants_nc(
    c: CumulantSeq, cprime: CumulantSeq, k: int
) -> Fraction:
    """Oracle: μ'_k = Σ_{π∈NC(k)} Σ_{V∈π} κ'_{|V|} Π_{W≠V} κ_{|W|}."""
    if k == 0:
        return ZERO
    total = ZERO
    for part in nc_partitions(k):
        for v_idx, v in enumerate(part):
            term = cprime[len(v)]
            for w_idx, w in enumerate(part):
                if w_idx != v_idx:
                    term *= c[len(w)]
            total += term
    return total


def inf_moments_from_cumulants(
    pair_cumulants: tuple[CumulantSeq, CumulantSeq],
) -> InfPair:
    """(μ, μ') from (κ, κ'): the plain recursion run over dual numbers."""
    c, cp = pair_cumulants
    if c.order != cp.order:
        raise OrderMismatch("cumulant pair orders differ")
    K = c.order
    duals = [_Dual(c[n], cp[n]) for n in range(1, K + 1)]
    mu = [_Dual(ONE)]
    for n in range(1, K + 1):
        total = _Dual(ZERO)
        pw = [_Dual(ONE)] + [_Dual(ZERO)] * max(0, n - 1)
        for s in range(1, n + 1):
            new = [_Dual(ZERO)] * n
            for i in range(n):
                for j in range(min(len(mu), n - i)):
                    new[i + j] = new[i + j] + pw[i] * mu[j]
            pw = new
            total = total + duals[s - 1] * pw[n - s]
        mu.append(total)
    return InfPair(
        MomentSeq(tuple(d.a for d in mu)), tuple(d.b for d in mu[1:])
    )


def inf_cumulants_from_moments(pair: InfPair) -> tuple[CumulantSeq, CumulantSeq]:
    """(κ, κ') from (μ, μ'); κ' is a triangular solve given κ."""
    c = moments_to_cumulants(pair.moments)
    K = c.order
    cp: list[Fraction] = []
    for n in range(1, K + 1):
        trial = CumulantSeq(tuple(cp) + (ZERO,) * (K - len(cp)))
        predicted = inf_moments_from_cumulants((c, trial)).corr[n - 1]
        # μ'_n depends on κ'_n with coefficient exactly 1.
        cp.append(pair.corr[n - 1] - predicted)
    return c, CumulantSeq(tuple(cp))


# ---------------------------------------------------------------------------
# Deformed exponential and the beta measure it generates.


def eq_series(q: RationalLike, order: int) -> Series:
    """The deformed exponential (1 - qz)^(-1/q), with exp(z) at q = 0.

    The z^n coefficient is Π_{j=0}^{n-1} (1 + jq) / n!, interpolating between
    1/n! (q = 0) and 1 (q = 1)."""
    qq = as_rational(q)
    if qq == 0:
        return Series.identity(order).exp() if order >= 1 else Series.const(1, 0)
    coeffs = [ONE]
    c = ONE
    for n in range(1, order + 1):
        c = c * (1 + (n - 1) * qq) / n
        coeffs.append(c)
    return Series(tuple(coeffs))


def beta_moments(q: RationalLike, K: int) -> MomentSeq:
    """Moments Π_{i=1}^k (i - q) / (k+1)! of the beta(1-q, 1+q) measure."""
    qq = as_rational(q)
    mu = [ONE]
    prod = ONE
    fact = 1
    for k in range(1, K + 1):
        prod *= k - qq
        fact *= k + 1
        mu.append(prod / fact)
    return MomentSeq(tuple(mu))


def beta_r_series(q: RationalLike, order: int) -> Series:
    """R-transform of beta(1-q, 1+q): e_q(z)/(e_q(z)-1) - 1/z.

    The two singular terms are combined before expansion:
    with h = (e_q - 1)/z (unit constant term), R = ((e_q - h)/z) / h."""
    e = eq_series(q, order + 2)
    h = (e - 1).shift_down()          # order+1
    num = (e.truncate(order + 1) - h).shift_down()  # order
    return num * h.truncate(order).reciprocal()


def beta_data(q: RationalLike, K: int) -> tuple[MomentSeq, CumulantSeq]:
    """Moment and cumulant data of beta(1-q, 1+q), computed independently:
    moments from the product formula, cumulants from the R-transform series.
    The two are mutually NC-consistent (tested, never assumed)."""
    r = beta_r_series(q, max(K - 1, 0))
    return beta_moments(q, K), CumulantSeq(r.coeffs[:K])


def r_quant(c: CumulantSeq, q: RationalLike) -> Series:
    """Quantized R-transform: R(z) - R_beta(1-q,1+q)(z), order K-1."""
    return c.r_series() - beta_r_series(q, c.order - 1)


# ---------------------------------------------------------------------------
# Convolutions.


def free_convolve(a: MomentSeq, b: MomentSeq) -> MomentSeq:
    """Free convolution: cumulants add."""
    if a.order != b.order:
        raise OrderMismatch("moment sequence orders differ")
    ca, cb = moments_to_cumulants(a), moments_to_cumulants(b)
    return cumulants_to_moments(
        CumulantSeq(tuple(x + y for x, y in zip(ca.kappa, cb.kappa)))
    )


def otimes_q(a: MomentSeq, b: MomentSeq, q: RationalLike) -> MomentSeq:
    """Deformed convolution: quantized R-transforms add, i.e. cumulants
    combine as κ(a) + κ(b) - κ(beta(1-q,1+q))."""
    if a.order != b.order:
        raise OrderMismatch("moment sequence orders differ")
    ca, cb = moments_to_cumulants(a), moments_to_cumulants(b)
    _, cbeta = beta_data(q, a.order)
    return cumulants_to_moments(
        CumulantSeq(
            tuple(x + y - z for x, y, z in zip(ca.kappa, cb.kappa, cbeta.kappa))
        )
    )


def inf_free_convolve(
    p1: tuple[CumulantSeq, CumulantSeq], p2: tuple[CumulantSeq, CumulantSeq]
) -> tuple[CumulantSeq, CumulantSeq]:
    """Infinitesimal free convolution: both cumulant levels add."""
    (c1, d1), (c2, d2) = p1, p2
    if c1.order != c2.order or d1.order != d2.order:
        raise OrderMismatch("cumulant pair orders differ")
    return (
        CumulantSeq(tuple(x + y for x, y in zip(c1.kappa, c2.kappa))),
        CumulantSeq(tuple(x + y for x, y in zip(d1.kappa, d2.kappa))),
    )
