"""Closed-form limiting and correction densities with singularity-aware
quadrature and numeric Stieltjes evaluation.

This is the only module that touches floating point.  Every model is a list
of smooth pieces plus explicit atoms; piece densities receive their exact
distances to the piece endpoints so that algebraic edge singularities
(x^(-q), square-root edges) stay accurate deep into the tanh-sinh tails,
where the node-to-endpoint distance underflows plain subtraction.

Two model conventions deserve a note; both are pinned by cross-checking
quadrature moments against the exact series layer (agreement ~1e-12):

* interp(γ<1): left of the bulk the density is the t-dependent branch
  sin(πq)/(πq) |E(t)|^(-q) with E(t) = (t+γ-1+sqrt((t+γ-1)^2-4γt))/(2γ),
  obtained by Stieltjes inversion; a t-independent plateau would lose
  mass.  The (1-γ) atom at 0 appears at q = +1 (the Marchenko-Pastur
  endpoint) and only there: at q = -1 the bulk already carries full mass.
* corr_rank_one: the outlier weight is (α+1)/α, and the continuous part
  is the infinitesimal Stieltjes transform density
  (1/π) Im[R'(G(t+i0)) / K'(G(t+i0))], an exact algebraic expression.
  The model requires γ > 1: at γ <= 1 the base measure carries an atom
  whose O(1/N) motion adds a dipole that an atomic model cannot express.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .errors import (
    BadParams,
    OutOfDomain,
    QuadratureFailure,
    TooCloseToSupport,
)
from .series import as_rational

PieceFn = Callable[[float, float, float], float]

_EPS = 2.220446049250313e-16


@dataclass(frozen=True)
class Piece:
    lo: float
    hi: float
    fn: PieceFn = field(compare=False)


@dataclass(frozen=True)
class DensityModel:
    """A density given by smooth pieces plus atoms.

    Probability kinds integrate to 1, correction kinds to 0.  `params`
    holds binary64 copies of the defining rationals; `model_id` is a stable
    label used in CSV exports.
    """

    kind: str
    pieces: tuple[Piece, ...]
    atoms: tuple[tuple[float, float], ...]
    params: dict
    is_correction: bool
    model_id: str

    def support_intervals(self) -> list[tuple[float, float]]:
        return [(p.lo, p.hi) for p in self.pieces]


def _num(x) -> float:
    v = float(as_rational(x)) if isinstance(x, (str, Fraction)) else float(x)
    if math.isnan(v) or math.isinf(v):
        raise BadParams("parameters must be finite")
    return v


# ---------------------------------------------------------------------------
# Model constructors.


def _semicircle_pieces(gamma: float, center: float) -> tuple[Piece, ...]:
    r = 2.0 * math.sqrt(gamma)

    def f(x, dlo, dhi):
        return math.sqrt(dlo * dhi) / (2.0 * math.pi * gamma)

    return (Piece(center - r, center + r, f),)


def _mp_bulk(gamma: float) -> Piece:
    sg = math.sqrt(gamma)
    a, b = (1.0 - sg) ** 2, (1.0 + sg) ** 2

    def f(x, dlo, dhi):
        return math.sqrt(dlo * dhi) / (2.0 * math.pi * x)

    return Piece(a, b, f)


def _interp_bulk(gamma: float, q: float) -> Piece:
    sg = math.sqrt(gamma)
    a, b = (1.0 - sg) ** 2, (1.0 + sg) ** 2

    def f(x, dlo, dhi):
        theta = math.atan2(math.sqrt(dlo * dhi), x + gamma - 1.0)
        if q == 0.0:
            return theta / math.pi
        return gamma ** (q / 2) / (q * math.pi * x ** (q / 2)) * math.sin(q * theta)

    return Piece(a, b, f)


def _interp_plateau(gamma: float, q: float) -> Piece:
    # gamma < 1, 0 < |q| < 1.  |E(t)| is rationalized for stability at both
    # endpoints: E = 2t / (s + sqrt(disc)), s = 1-gamma-t,
    # disc = s^2 - 4 gamma t = (a-t)(b-t).
    sg = math.sqrt(gamma)
    a = (1.0 - sg) ** 2
    b = (1.0 + sg) ** 2
    pref = math.sin(math.pi * q) / (math.pi * q)

    def f(x, dlo, dhi):
        s = 1.0 - gamma - x
        disc = dhi * (b - a + dhi)
        e_abs = 2.0 * dlo / (s + math.sqrt(disc))
        return pref * e_abs ** (-q)

    return Piece(0.0, a, f)


def make_model(kind: str, **params) -> DensityModel:
    """Construct a density model by kind.

    Kinds: uniform, beta_q(q), semicircle(gamma[, center]),
    marchenko_pastur(gamma), plancherel(gamma), interp(gamma, q),
    mk_dense(alphas, betas, q), corr_semicircle, corr_semicircle_shifted,
    corr_rank_one(gamma, alpha).
    """
    if kind == "uniform":
        return DensityModel(
            kind, (Piece(0.0, 1.0, lambda x, dl, dh: 1.0),), (), {}, False, "uniform"
        )

    if kind == "beta_q":
        q = _num(params["q"])
        if not -1.0 <= q <= 1.0:
            raise BadParams("beta_q needs q in [-1, 1]")
        mid = {"q": q}
        if q == 1.0:
            return DensityModel(kind, (), ((0.0, 1.0),), mid, False, "beta_q")
        if q == -1.0:
            return DensityModel(kind, (), ((1.0, 1.0),), mid, False, "beta_q")
        if q == 0.0:
            return DensityModel(
                kind, (Piece(0.0, 1.0, lambda x, dl, dh: 1.0),), (), mid, False, "beta_q"
            )
        pref = math.sin(math.pi * q) / (math.pi * q)

        def f(x, dlo, dhi):
            return pref * dlo ** (-q) * dhi**q

        return DensityModel(kind, (Piece(0.0, 1.0, f),), (), mid, False, "beta_q")

    if kind == "semicircle":
        gamma = _num(params["gamma"])
        center = _num(params.get("center", 0))
        if gamma <= 0:
            raise BadParams("semicircle needs gamma > 0")
        return DensityModel(
            kind,
            _semicircle_pieces(gamma, center),
            (),
            {"gamma": gamma, "center": center},
            False,
            f"semicircle(g={gamma:g},c={center:g})",
        )

    if kind == "marchenko_pastur":
        gamma = _num(params["gamma"])
        if gamma <= 0:
            raise BadParams("marchenko_pastur needs gamma > 0")
        atoms = ((0.0, 1.0 - gamma),) if gamma < 1 else ()
        return DensityModel(
            kind,
            (_mp_bulk(gamma),),
            atoms,
            {"gamma": gamma},
            False,
            f"mp(g={gamma:g})",
        )

    if kind == "plancherel":
        gamma = _num(params["gamma"])
        if gamma <= 0 or gamma == 1.0:
            raise BadParams("plancherel needs gamma > 0, gamma != 1")
        pieces = [_interp_bulk(gamma, 0.0)]
        if gamma < 1:
            a = (1.0 - math.sqrt(gamma)) ** 2
            pieces.insert(0, Piece(0.0, a, lambda x, dl, dh: 1.0))
        return DensityModel(
            kind, tuple(pieces), (), {"gamma": gamma}, False, f"plancherel(g={gamma:g})"
        )

    if kind == "interp":
        gamma = _num(params["gamma"])
        q = _num(params["q"])
        if gamma <= 0 or gamma == 1.0:
            raise BadParams("interp needs gamma > 0, gamma != 1")
        if not -1.0 <= q <= 1.0:
            raise BadParams("interp needs q in [-1, 1]")
        pieces = [_interp_bulk(gamma, q)]
        atoms: tuple = ()
        if gamma < 1:
            if q == 0.0:
                a = (1.0 - math.sqrt(gamma)) ** 2
                pieces.insert(0, Piece(0.0, a, lambda x, dl, dh: 1.0))
            elif abs(q) < 1.0:
                pieces.insert(0, _interp_plateau(gamma, q))
            elif q == 1.0:
                atoms = ((0.0, 1.0 - gamma),)
            # q = -1: the bulk (a shifted semicircle) already has full mass
        return DensityModel(
            kind,
            tuple(pieces),
            atoms,
            {"gamma": gamma, "q": q},
            False,
            f"interp(g={gamma:g},q={q:g})",
        )

    if kind == "mk_dense":
        alphas = [as_rational(a) for a in params["alphas"]]
        betas = [as_rational(b) for b in params["betas"]]
        q = _num(params["q"])
        if len(alphas) != len(betas) or not alphas:
            raise BadParams("need matching non-empty alpha/beta lists")
        pts = [p for pair in zip(alphas, betas) for p in pair]
        if any(x >= y for x, y in zip(pts, pts[1:])):
            raise BadParams("need alpha_1 < beta_1 < alpha_2 < ... < beta_r")
        if sum(b - a for a, b in zip(alphas, betas)) != 1:
            raise BadParams("interval lengths must sum to exactly 1")
        if not -1.0 < q < 1.0:
            raise BadParams("mk_dense needs |q| < 1")
        af = [float(a) for a in alphas]
        bf = [float(b) for b in betas]
        pref = math.sin(math.pi * q) / (math.pi * q) if q != 0.0 else 1.0
        pieces = []
        for i, (aa, bb) in enumerate(zip(af, bf)):

            def f(x, dlo, dhi, i=i, aa=aa, bb=bb):
                prod = dlo ** (-q) * dhi**q
                for j in range(len(af)):
                    if j != i:
                        prod *= abs(x - af[j]) ** (-q) * abs(x - bf[j]) ** q
                return pref * prod

            pieces.append(Piece(aa, bb, f))
        return DensityModel(
            kind,
            tuple(pieces),
            (),
            {"alphas": af, "betas": bf, "q": q},
            False,
            f"mk_dense(r={len(af)},q={q:g})",
        )

    if kind == "corr_semicircle":

        def f(x, dlo, dhi):
            return (x * x - 4.0 * x + 2.0) / (2.0 * math.pi * math.sqrt(dlo * dhi))

        return DensityModel(
            kind, (Piece(0.0, 4.0, f),), (), {}, True, "corr_semicircle"
        )

    if kind == "corr_semicircle_shifted":

        def f(x, dlo, dhi):
            return (x * x + x - 2.0) / (2.0 * math.pi * math.sqrt(dlo * dhi))

        return DensityModel(
            kind, (Piece(-3.0, 1.0, f),), (), {}, True, "corr_semicircle_shifted"
        )

    if kind == "corr_rank_one":
        gamma = _num(params["gamma"])
        alpha = _num(params["alpha"])
        if gamma <= 1.0:
            raise BadParams(
                "corr_rank_one needs gamma > 1 (atom-free base measure)"
            )
        if alpha <= 0.0:
            raise BadParams("corr_rank_one needs alpha > 0")
        sg = math.sqrt(gamma)
        lo, hi = -gamma - 2.0 * sg, -gamma + 2.0 * sg

        def f(x, dlo, dhi):
            # G(t+i0) of the base measure, then density of the correction
            # from its infinitesimal Stieltjes transform -R'(G) G_z.
            s = math.sqrt(dlo * dhi)
            g = complex(-(x + gamma - 2.0), s) / (2.0 * (x - 1.0))
            kp = gamma / (1.0 + g) ** 2 - 1.0 / (g * g)
            rp = (2.0 * alpha * g + alpha - 1.0) / (1.0 - alpha * g)
            return (rp / kp).imag / math.pi

        atoms: tuple = ()
        if alpha + 1.0 >= sg:
            pos = gamma / (alpha + 1.0) - gamma + alpha + 1.0
            atoms = ((pos, (alpha + 1.0) / alpha),)
        return DensityModel(
            kind,
            (Piece(lo, hi, f),),
            atoms,
            {"gamma": gamma, "alpha": alpha},
            True,
            f"corr_rank_one(g={gamma:g},a={alpha:g})",
        )

    raise BadParams(f"unknown density kind {kind!r}")


# ---------------------------------------------------------------------------
# Pointwise evaluation.


def eval_density(model: DensityModel, t: float) -> float:
    """Density value at t; 0 outside the support (atoms are not evaluated)."""
    if math.isnan(t):
        raise BadParams("evaluation point is NaN")
    for p in model.pieces:
        if p.lo < t < p.hi:
            return p.fn(t, t - p.lo, p.hi - t)
    return 0.0


# ---------------------------------------------------------------------------
# Tanh-sinh (double-exponential) quadrature with endpoint distances.

_TMAX = 6.0  # sinh argument cutoff; pi/2*sinh(6) ~ 317, weights < 1e-130


def _de_nodes(level: int, h0: float = 1.0):
    """Yield (t, first_level) trapezoid abscissas new at `level`."""
    h = h0 / 2**level
    if level == 0:
        yield 0.0
        j = 1
        while j * h <= _TMAX:
            yield j * h
            yield -j * h
            j += 1
    else:
        j = 1
        while j * h <= _TMAX:
            yield j * h
            yield -j * h
            j += 2


def _integrate_piece(
    fn, lo: float, hi: float, tol: float, max_level: int = 14
):
    """Tanh-sinh integral of fn(x, x-lo, hi-x) over (lo, hi).

    Returns (value, achieved-estimate).  The integrand may return complex.
    Convergence: successive-level difference below max(tol, roundoff floor).
    """
    half = 0.5 * (hi - lo)

    def term(t: float):
        s = math.pi / 2.0 * math.sinh(abs(t))
        if s > 300.0:
            return 0.0
        w = math.pi / 2.0 * math.cosh(abs(t)) / math.cosh(s) ** 2
        em = math.exp(-2.0 * s)
        one_m = 2.0 * em / (1.0 + em)
        one_p = 2.0 / (1.0 + em)
        if t >= 0.0:
            dlo, dhi = half * one_p, half * one_m
        else:
            dlo, dhi = half * one_m, half * one_p
        if dlo == 0.0 or dhi == 0.0:
            return 0.0
        x = lo + dlo if dlo <= dhi else hi - dhi
        return w * fn(x, dlo, dhi)

    h = 1.0
    total = sum(term(t) for t in _de_nodes(0))
    prev = total * h * half
    est = math.inf
    for level in range(1, max_level + 1):
        h /= 2.0
        total += sum(term(t) for t in _de_nodes(level))
        cur = total * h * half
        est = abs(cur - prev)
        floor = 8.0 * _EPS * max(1.0, abs(cur))
        if level >= 3 and est <= max(tol, floor):
            return cur, est
        prev = cur
    raise QuadratureFailure(
        f"refinement stalled at estimate {est:.3e} (target {tol:.1e})",
        value=prev,
        estimate=est,
    )


def quadrature(model: DensityModel, k: int, tol: float = 1e-10) -> float:
    """∫ t^k d(model), atoms added exactly; absolute error target `tol`."""
    if k < 0 or k > 12:
        raise BadParams("moment power must be in 0..12")
    total = 0.0
    for p in model.pieces:
        val, _ = _integrate_piece(
            lambda x, dl, dh: p.fn(x, dl, dh) * x**k, p.lo, p.hi, tol
        )
        total += val
    for pos, w in model.atoms:
        total += w * pos**k
    return total


# ---------------------------------------------------------------------------
# Stieltjes evaluation.


def _support_distance(model: DensityModel, z: complex) -> float:
    d = math.inf
    for p in model.pieces:
        if p.lo <= z.real <= p.hi:
            d = min(d, abs(z.imag))
        else:
            d = min(d, abs(z - complex(p.lo, 0)), abs(z - complex(p.hi, 0)))
    for pos, _ in model.atoms:
        d = min(d, abs(z - complex(pos, 0)))
    return d


def mk_dense_stieltjes_closed(model: DensityModel, z: complex) -> complex:
    """Closed-form Stieltjes transform of an mk_dense model:
    1/q - (1/q) Π ((z-β_i)/(z-α_i))^q, principal powers."""
    if model.kind != "mk_dense":
        raise BadParams("closed form only available for mk_dense")
    q = model.params["q"]
    if q == 0.0:
        # q -> 0 limit: the uniform union, G = Σ log((z-α)/(z-β))
        return sum(
            cmath.log((z - a) / (z - b))
            for a, b in zip(model.params["alphas"], model.params["betas"])
        )
    prod = complex(1.0)
    for a, b in zip(model.params["alphas"], model.params["betas"]):
        prod *= ((z - b) / (z - a)) ** q
    return 1.0 / q - prod / q


def stieltjes_numeric(model: DensityModel, z: complex, tol: float = 1e-10) -> complex:
    """∫ d(model)(t) / (z - t) by quadrature (plus exact atom terms).

    For mk_dense models the closed form is evaluated too and a disagreement
    beyond 1e-7 is reported as a quadrature failure.
    """
    z = complex(z)
    if _support_distance(model, z) < 0.1:
        raise TooCloseToSupport("need distance >= 0.1 from the support")
    total = 0j
    for p in model.pieces:
        val, _ = _integrate_piece(
            lambda x, dl, dh: p.fn(x, dl, dh) / (z - x), p.lo, p.hi, tol
        )
        total += val
    for pos, w in model.atoms:
        total += w / (z - pos)
    if model.kind == "mk_dense":
        closed = mk_dense_stieltjes_closed(model, z)
        if abs(closed - total) > 1e-7:
            raise QuadratureFailure(
                f"quadrature {total} and closed form {closed} disagree",
                value=total,
                estimate=abs(closed - total),
            )
    return total


def verify_p_relation(
    model: DensityModel, q, points: Sequence[float] | None = None, tol: float = 1e-8
) -> bool:
    """Check 1 - G_μ(z) = (1 - q G_ν(z))^(1/q) at real points right of the
    support, where ν is the mk_dense model and μ is the measure the map is
    applied to, whose Stieltjes transform has the closed form
    1 - G_μ(z) = Π (z-β_i)/(z-α_i).

    Every base must be a positive real; a negative base flags branch
    ambiguity instead of silently picking a sheet.
    """
    qq = float(as_rational(q)) if isinstance(q, (str, Fraction)) else float(q)
    if model.kind != "mk_dense":
        raise BadParams("the relation applies to mk_dense models")
    if qq == 0.0 or abs(qq) >= 1.0:
        raise OutOfDomain("the map is defined for q in (-1,0) ∪ (0,1)")
    if abs(qq - model.params["q"]) > 1e-15:
        raise BadParams("q does not match the model parameter")
    hi = max(model.params["betas"])
    width = hi - min(model.params["alphas"])
    if points is None:
        points = [hi + width * s for s in (0.5, 1.0, 2.0, 4.0, 8.0)]
    for z in points:
        bases = [
            (z - b, z - a)
            for a, b in zip(model.params["alphas"], model.params["betas"])
        ]
        if any(x <= 0 or y <= 0 for x, y in bases):
            raise OutOfDomain("branch ambiguity: a power base is not positive")
        g_nu = stieltjes_numeric(model, complex(z, 0.0)).real
        lhs = (1.0 - qq * g_nu) ** (1.0 / qq)
        rhs = math.prod(x / y for x, y in bases)  # = 1 - G_mu(z)
        if abs(lhs - rhs) > tol:
            return False
    return True
