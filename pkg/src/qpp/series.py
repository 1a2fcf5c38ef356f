"""Truncated formal power series over exact rationals.

A :class:`Series` holds coefficients of z^0 .. z^K for a fixed truncation
order K.  All arithmetic is exact (``fractions.Fraction`` coefficients) and
all operations are pure; mixing two series of different orders raises
:class:`~qpp.errors.OrderMismatch` rather than truncating silently.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .errors import (
    BadConstantTerm,
    NotInvertible,
    NotRevertible,
    OrderMismatch,
)

Rational = Fraction
RationalLike = Union[Fraction, int, str]

ZERO = Fraction(0)
ONE = Fraction(1)


def as_rational(x: RationalLike) -> Fraction:
    """Coerce an int, Fraction or "p/q" string to an exact Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot interpret {x!r} as a rational")


def rational_str(x: Fraction) -> str:
    """Serialize a rational as "p/q", or "p" when the denominator is 1."""
    return str(x)


def _binom(n: int, k: int) -> int:
    import math

    return math.comb(n, k)


@dataclass(frozen=True)
class Series:
    """Coefficients (c_0, ..., c_K) of a truncated series in z."""

    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        if not self.coeffs:
            raise ValueError("a series needs at least the constant coefficient")

    @staticmethod
    def of(values: Iterable[RationalLike], order: int | None = None) -> "Series":
        """Build a series from coefficients, optionally zero-padded to `order`."""
        cs = [as_rational(v) for v in values]
        if order is not None:
            if len(cs) > order + 1:
                raise ValueError("more coefficients than order+1")
            cs.extend([ZERO] * (order + 1 - len(cs)))
        return Series(tuple(cs))

    @staticmethod
    def zero(order: int) -> "Series":
        return Series((ZERO,) * (order + 1))

    @staticmethod
    def const(c: RationalLike, order: int) -> "Series":
        return Series((as_rational(c),) + (ZERO,) * order)

    @staticmethod
    def identity(order: int) -> "Series":
        """The series z."""
        if order < 1:
            raise ValueError("identity needs order >= 1")
        return Series((ZERO, ONE) + (ZERO,) * (order - 1))

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def coefficient(self, n: int) -> Fraction:
        return self.coeffs[n]

    def _check_order(self, other: "Series") -> None:
        if self.order != other.order:
            raise OrderMismatch(
                f"order {self.order} vs {other.order}; re-truncate explicitly"
            )

    # ---------------------------------------------------------------- ring ops

    def __add__(self, other):
        if isinstance(other, Series):
            self._check_order(other)
            return Series(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))
        if isinstance(other, (int, Fraction)):
            c = as_rational(other)
            return Series((self.coeffs[0] + c,) + self.coeffs[1:])
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return Series(tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        if isinstance(other, (Series, int, Fraction)):
            return self + (-other if isinstance(other, Series) else -as_rational(other))
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Series):
            self._check_order(other)
            n = self.order
            out = [ZERO] * (n + 1)
            for i, a in enumerate(self.coeffs):
                if a == 0:
                    continue
                for j in range(n + 1 - i):
                    b = other.coeffs[j]
                    if b != 0:
                        out[i + j] += a * b
            return Series(tuple(out))
        if isinstance(other, (int, Fraction)):
            c = as_rational(other)
            return Series(tuple(a * c for a in self.coeffs))
        return NotImplemented

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Series":
        if not isinstance(n, int) or n < 0:
            raise ValueError("integer power must be a non-negative int")
        result = Series.const(1, self.order)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # ------------------------------------------------------- inverse / exp/log

    def reciprocal(self) -> "Series":
        """Multiplicative inverse to order K; needs a nonzero constant term."""
        if self.coeffs[0] == 0:
            raise NotInvertible("zero constant term")
        n = self.order
        inv0 = ONE / self.coeffs[0]
        out = [inv0] + [ZERO] * n
        for m in range(1, n + 1):
            acc = ZERO
            for j in range(1, m + 1):
                if self.coeffs[j] != 0:
                    acc += self.coeffs[j] * out[m - j]
            out[m] = -inv0 * acc
        return Series(tuple(out))

    def exp(self) -> "Series":
        """Formal exponential; requires constant term 0."""
        if self.coeffs[0] != 0:
            raise BadConstantTerm("exp needs constant term 0")
        n = self.order
        out = [ONE] + [ZERO] * n
        for m in range(1, n + 1):
            acc = ZERO
            for j in range(1, m + 1):
                if self.coeffs[j] != 0:
                    acc += j * self.coeffs[j] * out[m - j]
            out[m] = acc / m
        return Series(tuple(out))

    def log(self) -> "Series":
        """Formal logarithm; requires constant term 1."""
        if self.coeffs[0] != 1:
            raise BadConstantTerm("log needs constant term 1")
        n = self.order
        out = [ZERO] * (n + 1)
        for m in range(1, n + 1):
            acc = ZERO
            for j in range(1, m):
                if out[j] != 0 and self.coeffs[m - j] != 0:
                    acc += j * out[j] * self.coeffs[m - j]
            out[m] = self.coeffs[m] - acc / m
        return Series(tuple(out))

    def pow_rational(self, alpha: RationalLike) -> "Series":
        """(self)^alpha for rational alpha, defined as exp(alpha*log self).

        Requires constant term 1; agrees with repeated multiplication for
        integer alpha.
        """
        a = as_rational(alpha)
        if self.coeffs[0] != 1:
            raise BadConstantTerm("rational power needs constant term 1")
        return (self.log() * a).exp()

    # ------------------------------------------------------------- composition

    def compose(self, g: "Series") -> "Series":
        """self(g(z)) truncated at order K; g must have constant term 0."""
        self._check_order(g)
        if g.coeffs[0] != 0:
            raise BadConstantTerm("inner series needs constant term 0")
        result = Series.const(self.coeffs[-1], self.order)
        for c in reversed(self.coeffs[:-1]):
            result = result * g + c
        return result

    def revert(self) -> "Series":
        """Compositional inverse g with self(g(z)) = z to order K."""
        if self.coeffs[0] != 0:
            raise BadConstantTerm("reversion needs constant term 0")
        if self.coeffs[1] == 0:
            raise NotRevertible("zero linear coefficient")
        n = self.order
        inv1 = ONE / self.coeffs[1]
        g = [ZERO, inv1] + [ZERO] * (n - 1)
        for m in range(2, n + 1):
            # With g_m unknown (0 so far), the z^m coefficient of f(g) is off
            # by exactly f_1 * g_m.
            cur = self.compose(Series(tuple(g)))
            g[m] = -cur.coeffs[m] * inv1
        return Series(tuple(g))

    # ---------------------------------------------------------------- calculus

    def derivative(self) -> "Series":
        """Formal d/dz.  The top coefficient is re-padded with an explicit
        zero so the truncation order stays K; only coefficients up to
        z^(K-1) are meaningful."""
        n = self.order
        out = [self.coeffs[j] * j for j in range(1, n + 1)] + [ZERO]
        return Series(tuple(out))

    def integral(self) -> "Series":
        """Formal antiderivative with constant term 0; the z^K coefficient
        of the input falls off the truncation."""
        n = self.order
        out = [ZERO] + [self.coeffs[j] / (j + 1) for j in range(n)]
        return Series(tuple(out))

    # -------------------------------------------------------------- utilities

    def truncate(self, order: int) -> "Series":
        """Explicit re-truncation (shorten or zero-pad)."""
        if order < self.order:
            return Series(self.coeffs[: order + 1])
        return Series(self.coeffs + (ZERO,) * (order - self.order))

    def shift_down(self) -> "Series":
        """Divide by z; requires constant term 0.  Order drops by one."""
        if self.coeffs[0] != 0:
            raise BadConstantTerm("shift_down needs constant term 0")
        return Series(self.coeffs[1:])

    def shift_up(self) -> "Series":
        """Multiply by z, keeping every coefficient (order grows by one)."""
        return Series((ZERO,) + self.coeffs)

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def __str__(self):
        return "[" + ", ".join(rational_str(c) for c in self.coeffs) + "]"

    def to_json(self) -> dict:
        return {"order": self.order, "coeffs": [rational_str(c) for c in self.coeffs]}

    @staticmethod
    def from_json(obj: dict) -> "Series":
        s = Series.of(obj["coeffs"])
        if s.order != obj["order"]:
            raise ValueError("order field disagrees with coefficient count")
        return s


def binomial_series(alpha: RationalLike, order: int) -> Series:
    """(1+w)^alpha as a w-series with exact falling-product coefficients."""
    a = as_rational(alpha)
    coeffs = [ONE]
    c = ONE
    for j in range(1, order + 1):
        c = c * (a - (j - 1)) / j
        coeffs.append(c)
    return Series(tuple(coeffs))


def geometric_series(order: int) -> Series:
    """1/(1-z)."""
    return Series((ONE,) * (order + 1))


def power_sum(xs: Sequence[Fraction], k: int) -> Fraction:
    """p_k(x) = sum x_i^k (p_0 = number of points)."""
    if k == 0:
        return Fraction(len(xs))
    return sum((x**k for x in xs), start=ZERO)
