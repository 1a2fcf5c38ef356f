"""Finite-N objects: signatures, the q-deformed Perelomov-Popov measure,
and its moments by three independent routes (direct atomic sum, generating
function, set-partition sum over power-sum differences)."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import DegenerateInput, QZeroBranch, TooLarge
from .partitions import set_partitions
from .series import (
    ONE,
    ZERO,
    RationalLike,
    Series,
    as_rational,
    power_sum,
    rational_str,
)

# Documented soft bound on |lambda_i|; exact big-integer arithmetic keeps
# larger values safe, the bound only calibrates expectations for runtimes.
PART_SOFT_BOUND = 10**6


@dataclass(frozen=True)
class Signature:
    """Non-increasing integer tuple λ_1 >= ... >= λ_N."""

    parts: tuple[int, ...]

    def __post_init__(self):
        if len(self.parts) < 1:
            raise ValueError("a signature needs at least one part")
        if any(not isinstance(p, int) for p in self.parts):
            raise ValueError("signature parts must be integers")
        if any(a < b for a, b in zip(self.parts, self.parts[1:])):
            raise ValueError("not non-increasing")

    @property
    def n(self) -> int:
        return len(self.parts)

    def shifted_coordinates(self) -> tuple[int, ...]:
        """The strictly decreasing configuration x_i = λ_i + N - i."""
        n = self.n
        return tuple(p + n - (i + 1) for i, p in enumerate(self.parts))

    def to_json(self) -> dict:
        return {"parts": list(self.parts)}

    @staticmethod
    def from_json(obj: dict) -> "Signature":
        return Signature(tuple(int(p) for p in obj["parts"]))


@dataclass(frozen=True)
class AtomicMeasure:
    """Finite list of (position, weight) atoms with exact total mass 1.

    Positions are strictly decreasing.  Weights may be negative when the
    deformation parameter lies outside [-1, 1]; the `signed` flag records
    that the construction left the probability regime.
    """

    atoms: tuple[tuple[Fraction, Fraction], ...]
    signed: bool = field(default=False, compare=False)

    def __post_init__(self):
        positions = [p for p, _ in self.atoms]
        if any(a <= b for a, b in zip(positions, positions[1:])):
            raise ValueError("atom positions must be strictly decreasing")
        if self.total_mass() != 1:
            raise ValueError("atom weights must sum to exactly 1")

    def total_mass(self) -> Fraction:
        return sum((w for _, w in self.atoms), start=ZERO)

    def moment(self, k: int) -> Fraction:
        """Exact integral of t^k against the measure."""
        if k < 0:
            raise ValueError("moment order must be >= 0")
        return sum((w * p**k for p, w in self.atoms), start=ZERO)

    def to_json(self) -> list:
        return [{"pos": rational_str(p), "w": rational_str(w)} for p, w in self.atoms]

    def to_csv(self) -> str:
        lines = ["pos,w"]
        lines += [f"{rational_str(p)},{rational_str(w)}" for p, w in self.atoms]
        return "\n".join(lines) + "\n"

    @staticmethod
    def from_json(obj: list) -> "AtomicMeasure":
        atoms = tuple(
            (as_rational(d["pos"]), as_rational(d["w"])) for d in obj
        )
        return AtomicMeasure(atoms)


def pp_measure(
    sig: Signature, q: RationalLike, offset: RationalLike = 1
) -> AtomicMeasure:
    """The q-deformed Perelomov-Popov measure of a signature.

    Atoms sit at (λ_i + offset*N - i)/N and carry weight
    (1/N) * prod_{j != i} (x_i - x_j - q)/(x_i - x_j) with x_i = λ_i - i.
    offset = 1 is the standard normalization; offset 0, -γ and γ+1 realize
    the shifted variants used for the semicircle limits.

    Total mass is exactly 1 for every rational q.  For q outside [-1, 1]
    the weights may be negative and the result is flagged `signed`.
    """
    qq = as_rational(q)
    c = as_rational(offset)
    n = sig.n
    xs = [Fraction(p - (i + 1)) for i, p in enumerate(sig.parts)]
    atoms = []
    inv_n = Fraction(1, n)
    for i in range(n):
        w = inv_n
        xi = xs[i]
        for j in range(n):
            if j != i:
                d = xi - xs[j]
                w *= (d - qq) / d
        pos = Fraction(sig.parts[i] + n - (i + 1), n) + (c - 1)
        atoms.append((pos, w))
    return AtomicMeasure(tuple(atoms), signed=not (-1 <= qq <= 1))


def pp_moment_direct(
    sig: Signature, q: RationalLike, k: int, offset: RationalLike = 1
) -> Fraction:
    """k-th moment of the q-PP measure, summed directly over the atoms."""
    return pp_measure(sig, q, offset).moment(k)


def gf_moment_series(
    xs: list[Fraction] | tuple[Fraction, ...], q: RationalLike, order: int
) -> Series:
    """Generating function of the deformed moments of a point configuration.

    Returns the z-series whose z^(k+1) coefficient is
    m_k(x) = sum_i (prod_{j != i} (x_i-x_j-q)/(x_i-x_j)) x_i^k,
    computed for q != 0 from the closed product form
    (1/q)(1 - prod_i (1-(x_i+q)z)/(1-x_i z)) and for q = 0 from power sums.
    """
    xs = [as_rational(x) for x in xs]
    if len(set(xs)) != len(xs):
        raise DegenerateInput("configuration points must be pairwise distinct")
    qq = as_rational(q)
    if qq == 0:
        coeffs = [ZERO] + [power_sum(xs, k) for k in range(order)]
        return Series(tuple(coeffs))
    num = Series.const(1, order)
    den = Series.const(1, order)
    for x in xs:
        num = num * Series.of([1, -(x + qq)][: order + 1], order=order)
        den = den * Series.of([1, -x][: order + 1], order=order)
    ratio = num * den.reciprocal()
    return (Series.const(1, order) - ratio) * (ONE / qq)


def newton_partition_sum(
    xs: list[Fraction] | tuple[Fraction, ...], q: RationalLike, k: int
) -> Fraction:
    """(k+1)! * m_k(x) via the set-partition sum over power-sum differences.

    A test oracle only: the sum runs over all partitions of {1..k+1}, so k+1
    is capped at 8 (Bell number 4140).
    """
    qq = as_rational(q)
    if qq == 0:
        raise QZeroBranch("the partition sum carries a 1/q prefactor")
    if k + 1 > 8:
        raise TooLarge("partition sum capped at k+1 <= 8")
    xs = [as_rational(x) for x in xs]
    shifted = [x + qq for x in xs]
    pdiff = {}
    for size in range(1, k + 2):
        pdiff[size] = power_sum(shifted, size) - power_sum(xs, size)
    total = ZERO
    import math

    for blocks in set_partitions(k + 1):
        term = ONE if (len(blocks) - 1) % 2 == 0 else -ONE
        for blk in blocks:
            term *= math.factorial(len(blk) - 1) * pdiff[len(blk)]
        total += term
    return total / qq


def supersym_check(
    xs: list[Fraction] | tuple[Fraction, ...], q: RationalLike, order: int
) -> bool:
    """Verify the supersymmetric complete-homogeneous identity to `order`.

    Left side: 1 - q * (moment generating series), built from the product
    form.  Right side: exp of the supersymmetric power sums
    sum_k (p_k(x) - p_k(x+q))/k z^k.  Both are exact series; returns exact
    equality.
    """
    qq = as_rational(q)
    xs = [as_rational(x) for x in xs]
    lhs = Series.const(1, order) - gf_moment_series(xs, qq, order) * qq
    shifted = [x + qq for x in xs]
    log_coeffs = [ZERO] + [
        (power_sum(xs, k) - power_sum(shifted, k)) / k for k in range(1, order + 1)
    ]
    rhs = Series(tuple(log_coeffs)).exp()
    return lhs == rhs
