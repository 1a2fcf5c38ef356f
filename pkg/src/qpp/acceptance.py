"""The acceptance suite: ten self-contained criteria, each with a stated
tolerance and runtime budget.  `pytest tests/test_acceptance.py` and the CLI
`selftest` subcommand both run these.

Randomized criteria use fixed seeds, so every run checks the same cases.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass
from fractions import Fraction

from .densities import eval_density, make_model, quadrature, verify_p_relation
from .freeprob import (
    MomentSeq,
    beta_moments,
    beta_r_series,
    corr_moments_from_cumulants_nc,
    cumulants_to_moments,
    free_convolve,
    otimes_q,
)
from .limits import (
    PhiSpec,
    PsiSpec,
    char_presets,
    inf_correction_moments,
    inf_cumulants,
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
from .series import Series
from .signatures import (
    Signature,
    gf_moment_series,
    newton_partition_sum,
    pp_measure,
)

F = Fraction

Q_GRID = (F(0), F(1), F(-1), F(1, 2), F(-1, 2), F(1, 3))


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float
    budget: float

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (
            f"{status} criterion {self.number:2d} [{self.name}] "
            f"{self.seconds:6.1f}s/{self.budget:.0f}s: {self.detail}"
        )


def _random_signature(rng: random.Random, max_n: int = 8, bound: int = 10) -> Signature:
    n = rng.randint(1, max_n)
    parts = sorted((rng.randint(-bound, bound) for _ in range(n)), reverse=True)
    return Signature(tuple(parts))


def _random_rational(rng: random.Random, bound: int = 3) -> Fraction:
    den = rng.choice((1, 2, 3))
    return F(rng.randint(-bound * den, bound * den), den)


def _random_psi(rng: random.Random, order: int = 8) -> PsiSpec:
    return PsiSpec((F(0),) + tuple(_random_rational(rng) for _ in range(order)))


def _random_moments(rng: random.Random, order: int) -> MomentSeq:
    return MomentSeq((F(1),) + tuple(_random_rational(rng) for _ in range(order)))


# ---------------------------------------------------------------------------


def criterion_1() -> CriterionResult:
    """Moments by three routes agree exactly on random signatures."""
    t0 = time.time()
    rng = random.Random(101)
    checked = 0
    for _ in range(100):
        sig = _random_signature(rng)
        xs = [F(x) for x in sig.shifted_coordinates()]
        n = F(sig.n)
        for q in Q_GRID:
            measure = pp_measure(sig, q)
            gf = gf_moment_series(xs, q, 7)
            for k in range(7):
                direct = measure.moment(k)
                via_gf = gf.coefficient(k + 1) / n ** (k + 1)
                if direct != via_gf:
                    return CriterionResult(
                        1, "three-moment-routes", False,
                        f"direct != gf at {sig.parts}, q={q}, k={k}",
                        time.time() - t0, 60,
                    )
                if k <= 5 and q != 0:
                    ps = newton_partition_sum(xs, q, k)
                    if ps != math.factorial(k + 1) * gf.coefficient(k + 1):
                        return CriterionResult(
                            1, "three-moment-routes", False,
                            f"partition sum != gf at {sig.parts}, q={q}, k={k}",
                            time.time() - t0, 60,
                        )
                checked += 1
    dt = time.time() - t0
    return CriterionResult(
        1, "three-moment-routes", dt < 60,
        f"{checked} (signature, q, k) triples, all three routes exactly equal",
        dt, 60,
    )


def criterion_2() -> CriterionResult:
    """Total mass exactly 1 for 1000 random (signature, q), signed included."""
    t0 = time.time()
    rng = random.Random(202)
    for i in range(1000):
        sig = _random_signature(rng)
        q = F(rng.randint(-40, 40), rng.randint(1, 12))  # often outside [-1,1]
        m = pp_measure(sig, q)
        if m.total_mass() != 1:
            return CriterionResult(
                2, "mass-one", False,
                f"mass != 1 at case {i}: {sig.parts}, q={q}",
                time.time() - t0, 10,
            )
    dt = time.time() - t0
    return CriterionResult(
        2, "mass-one", dt < 10, "1000 random measures all have exact mass 1", dt, 10
    )


def criterion_3() -> CriterionResult:
    """The derivative-at-1 and deformed-exponential moment formulas agree."""
    t0 = time.time()
    rng = random.Random(303)
    for trial in range(50):
        psi = _random_psi(rng)
        for q in Q_GRID:
            for k in range(9):
                if limit_moments(psi, q, k) != limit_moments_alt(psi, q, k):
                    return CriterionResult(
                        3, "moment-formula-equivalence", False,
                        f"mismatch at trial {trial}, q={q}, k={k}",
                        time.time() - t0, 60,
                    )
    dt = time.time() - t0
    return CriterionResult(
        3, "moment-formula-equivalence", dt < 60,
        "50 random profiles x 6 q-values x k<=8, exactly equal",
        dt, 60,
    )


def criterion_4() -> CriterionResult:
    """Cumulant route reproduces the moments; q=0 has the exp-form R."""
    t0 = time.time()
    rng = random.Random(404)
    for trial in range(50):
        psi = _random_psi(rng)
        for q in Q_GRID:
            mm = cumulants_to_moments(limit_cumulants(psi, q, 8))
            for k in range(9):
                if mm[k] != limit_moments(psi, q, k):
                    return CriterionResult(
                        4, "r-transform", False,
                        f"NC reconstruction mismatch at trial {trial}, q={q}, k={k}",
                        time.time() - t0, 60,
                    )
        # q = 0: R(u) = e^u Psi'(e^u) + e^u/(e^u - 1) - 1/u
        r = limit_cumulants(psi, 0, 8).r_series()
        eu = Series.identity(7).exp()
        manual = eu * psi.prime_series(7).compose(eu - 1) + beta_r_series(0, 7)
        if r != manual:
            return CriterionResult(
                4, "r-transform", False, f"q=0 R-form mismatch at trial {trial}",
                time.time() - t0, 60,
            )
    dt = time.time() - t0
    return CriterionResult(
        4, "r-transform", dt < 60,
        "cumulant pipeline reproduces moments exactly; q=0 exp-form verified",
        dt, 60,
    )


def criterion_5() -> CriterionResult:
    """LLN correction rate for the empty signature at q = 1/2.

    e_N = moment - beta moment satisfies e_N = c_k/N + O(1/N^2) with
    c_k = (q-1)/2 * k * beta_{k-1}; the residual |e_N - c_k/N| must drop by
    4x (within 10% slack) when N doubles from 160 to 320.
    """
    t0 = time.time()
    q = F(1, 2)
    bm = beta_moments(q, 5)
    resid: dict[tuple[int, int], Fraction] = {}
    for n in (10, 20, 40, 80, 160, 320):
        measure = pp_measure(Signature((0,) * n), q)
        for k in range(6):
            e_n = measure.moment(k) - bm[k]
            c_k = F(q - 1, 2) * k * bm[k - 1] if k >= 1 else F(0)
            resid[(n, k)] = abs(e_n - F(c_k, n))
    for k in range(6):
        r160, r320 = resid[(160, k)], resid[(320, k)]
        if not (r320 * 4 <= r160 * F(11, 10)):
            return CriterionResult(
                5, "lln-rate", False,
                f"k={k}: residual ratio {float(r320 / r160) if r160 else 'inf'} "
                "exceeds 1/4 with 10% slack",
                time.time() - t0, 120,
            )
    dt = time.time() - t0
    detail = (
        "residuals quarter on doubling N (k<=2 vanish exactly; "
        + ", ".join(
            f"k={k}: {float(resid[(320, k)] / resid[(160, k)]):.3f}/4x"
            for k in (3, 4, 5)
        )
        + ")"
    )
    return CriterionResult(5, "lln-rate", dt < 120, detail, dt, 120)


def criterion_6() -> CriterionResult:
    """Transfer identities: round trips, profile consistency, endpoints."""
    t0 = time.time()
    rng = random.Random(606)
    ok = True
    msg = "round trips, profile transfers, beta->uniform, uniform->delta(1)"
    for trial in range(10):
        psi = _random_psi(rng)
        for q in Q_GRID:
            mq = MomentSeq(tuple(limit_moments(psi, q, k) for k in range(9)))
            for qp in Q_GRID:
                moved = q_transfer(mq, q, qp)
                if q_transfer(moved, qp, q).mu != mq.mu:
                    ok, msg = False, f"round trip failed {q}->{qp}"
                    break
                want = tuple(limit_moments(psi, qp, k) for k in range(9))
                if moved.mu != want:
                    ok, msg = False, f"profile transfer failed {q}->{qp}"
                    break
            if not ok:
                break
        if not ok:
            break
    if ok:
        for q in (F(1), F(-1), F(1, 2), F(-1, 2), F(1, 3)):
            if q_transfer(beta_moments(q, 8), q, 0).mu != beta_moments(0, 8).mu:
                ok, msg = False, f"beta({q}) -> uniform failed"
                break
        if ok and any(x != 1 for x in q_transfer(beta_moments(0, 8), 0, -1).mu):
            ok, msg = False, "uniform -> delta(1) failed"
    dt = time.time() - t0
    return CriterionResult(6, "transfer-identities", ok and dt < 30, msg, dt, 30)


def criterion_7() -> CriterionResult:
    """Deformed convolution against the free convolution, and the maps
    that linearize it."""
    t0 = time.time()
    rng = random.Random(707)
    for trial in range(20):
        q = rng.choice((F(1, 2), F(-1, 2), F(1, 3), F(-2, 3)))
        a = _random_moments(rng, 10)
        b = _random_moments(rng, 10)
        beta = beta_moments(q, 10)
        if free_convolve(otimes_q(a, b, q), beta).mu != free_convolve(a, b).mu:
            return CriterionResult(
                7, "deformed-convolution", False,
                f"corollary identity failed at trial {trial}, q={q}",
                time.time() - t0, 30,
            )
    for trial in range(10):
        q = rng.choice((F(1, 2), F(-1, 2), F(1, 3), F(-2, 3)))
        a = _random_moments(rng, 8)
        b = _random_moments(rng, 8)
        conv = free_convolve(a, b)
        if p_map(conv, q).mu != otimes_q(p_map(a, q), p_map(b, q), q).mu:
            return CriterionResult(
                7, "deformed-convolution", False,
                f"p-map linearization failed at trial {trial}, q={q}",
                time.time() - t0, 30,
            )
        if q_map(conv, q).mu != otimes_q(q_map(a, q), q_map(b, q), q).mu:
            return CriterionResult(
                7, "deformed-convolution", False,
                f"q-map linearization failed at trial {trial}, q={q}",
                time.time() - t0, 30,
            )
    dt = time.time() - t0
    return CriterionResult(
        7, "deformed-convolution", dt < 30,
        "20 corollary-identity pairs at K=10; 10 map-linearization pairs at K=8",
        dt, 30,
    )


def criterion_8() -> CriterionResult:
    """Infinitesimal suite: oracle reconstruction, the exact q<->0 series
    identity, and the two correction regimes."""
    t0 = time.time()
    rng = random.Random(808)
    for trial in range(3):
        psi = _random_psi(rng)
        phi = PhiSpec((F(0),) + tuple(_random_rational(rng) for _ in range(8)))
        phi0 = PhiSpec((F(0),) * 9)
        for q in (F(0), F(1, 2), F(-1), F(1), F(-1, 2)):
            kap, kapp = inf_cumulants(psi, phi, q, 8, "full")
            m0 = MomentSeq(tuple(limit_moments(psi, 0, k) for k in range(9)))
            c0 = tuple(
                inf_correction_moments(psi, phi, 0, k, "full") for k in range(1, 9)
            )
            want = tuple(
                inf_correction_moments(psi, phi, q, k, "full") for k in range(1, 9)
            )
            for k in range(1, 9):
                if corr_moments_from_cumulants_nc(kap, kapp, k) != want[k - 1]:
                    return CriterionResult(
                        8, "infinitesimal", False,
                        f"NC-oracle reconstruction failed, trial {trial}, q={q}, k={k}",
                        time.time() - t0, 120,
                    )
            if inf_transfer(m0, c0, q) != want:
                return CriterionResult(
                    8, "infinitesimal", False,
                    f"series transfer identity failed, trial {trial}, q={q}",
                    time.time() - t0, 120,
                )
            for k in range(1, 9):
                full = want[k - 1]
                lead = inf_correction_moments(psi, phi, q, k, "leading")
                beta_part = inf_correction_moments(psi, phi0, q, k, "full")
                if full != lead + beta_part:
                    return CriterionResult(
                        8, "infinitesimal", False,
                        f"regime split failed, trial {trial}, q={q}, k={k}",
                        time.time() - t0, 120,
                    )
    dt = time.time() - t0
    return CriterionResult(
        8, "infinitesimal", dt < 120,
        "NC-oracle reconstruction, exact transfer identity and regime split "
        "hold exactly (3 profiles x 5 q-values, k<=8)",
        dt, 120,
    )


def criterion_9() -> CriterionResult:
    """Quadrature moments of the closed-form densities match the exact
    series layer; masses are exact to 1e-10."""
    t0 = time.time()
    problems = []
    # interpolating family vs exact moments
    for gamma in (F(1, 4), F(4)):
        psi, _ = char_presets("poisson", {"gamma": gamma}, order=8)
        for q in (F(0), F(1, 2), F(-1, 2)):
            model = make_model("interp", gamma=gamma, q=q)
            mass = quadrature(model, 0)
            if abs(mass - 1.0) > 1e-10:
                problems.append(f"interp({gamma},{q}) mass off by {mass - 1:.2e}")
            for k in range(7):
                diff = abs(quadrature(model, k) - float(limit_moments(psi, q, k)))
                if diff > 1e-8:
                    problems.append(f"interp({gamma},{q}) k={k} off by {diff:.2e}")
    # q = +-1 continuity against Marchenko-Pastur / shifted semicircle
    for gamma in (F(1, 4), F(4)):
        g = float(gamma)
        sg = math.sqrt(g)
        grid = [
            (1 - sg) ** 2 + ((1 + sg) ** 2 - (1 - sg) ** 2) * i / 24
            for i in range(1, 24)
        ]
        plus = make_model("interp", gamma=gamma, q=1)
        mp = make_model("marchenko_pastur", gamma=gamma)
        if any(abs(eval_density(plus, t) - eval_density(mp, t)) > 1e-7 for t in grid):
            problems.append(f"interp({gamma}, q=1) != MP on grid")
        if plus.atoms != mp.atoms:
            problems.append(f"interp({gamma}, q=1) atoms != MP atoms")
        minus = make_model("interp", gamma=gamma, q=-1)
        sc = make_model("semicircle", gamma=gamma, center=g + 1)
        if any(abs(eval_density(minus, t) - eval_density(sc, t)) > 1e-7 for t in grid):
            problems.append(f"interp({gamma}, q=-1) != shifted semicircle")
    # correction densities: zero mass and exact-correction moments
    psi1, phi1 = char_presets("poisson_with_corr", {"gamma": 1}, order=8)
    inv = [F(0)] + [F((-1) ** k * math.factorial(k)) for k in range(1, 9)]
    psi2, phi2 = PsiSpec.of(inv), PhiSpec.of(inv)
    psi3, phi3 = char_presets("rank_one", {"gamma": 4, "alpha": F(3, 2)}, order=8)
    cases = [
        (make_model("corr_semicircle"), psi1, phi1, F(-1)),
        (make_model("corr_semicircle_shifted"), psi2, phi2, F(1)),
        (make_model("corr_rank_one", gamma=4, alpha=F(3, 2)), psi3, phi3, F(-1)),
    ]
    for model, ps, ph, q in cases:
        mass = quadrature(model, 0)
        if abs(mass) > 1e-10:
            problems.append(f"{model.model_id} mass {mass:.2e} != 0")
        for k in range(1, 6):
            diff = abs(
                quadrature(model, k) - float(inf_correction_moments(ps, ph, q, k))
            )
            if diff > 1e-7:
                problems.append(f"{model.model_id} k={k} off by {diff:.2e}")
    # dense family: mass and the map relation
    for alphas, betas, q in (
        ((F(0),), (F(1),), F(1, 2)),
        ((F(0), F(3, 4)), (F(1, 2), F(5, 4)), F(1, 3)),
        ((F(-1), F(1)), (F(-1, 2), F(3, 2)), F(-1, 2)),
    ):
        model = make_model("mk_dense", alphas=alphas, betas=betas, q=q)
        mass = quadrature(model, 0)
        if abs(mass - 1.0) > 1e-10:
            problems.append(f"{model.model_id} mass off by {mass - 1:.2e}")
        if not verify_p_relation(model, q, tol=1e-8):
            problems.append(f"{model.model_id} map relation failed")
    dt = time.time() - t0
    if problems:
        return CriterionResult(
            9, "density-cross-checks", False, "; ".join(problems[:4]), dt, 300
        )
    return CriterionResult(
        9, "density-cross-checks", dt < 300,
        "quadrature matches the exact layer: interp (2 rates x 3 q), "
        "endpoint continuity, 3 correction models, 3 dense-family models",
        dt, 300,
    )


def criterion_10() -> CriterionResult:
    """Reflection: moments of 1-X from the mirrored profile at -q."""
    t0 = time.time()
    rng = random.Random(1010)
    for trial in range(20):
        psi = _random_psi(rng)
        for q in Q_GRID:
            mirrored = psi_invert_argument(psi, 8)
            lhs = reflect_moments(
                MomentSeq(tuple(limit_moments(mirrored, -q, k) for k in range(9)))
            )
            rhs = tuple(limit_moments(psi, q, k) for k in range(9))
            if lhs.mu != rhs:
                return CriterionResult(
                    10, "reflection", False,
                    f"mismatch at trial {trial}, q={q}",
                    time.time() - t0, 10,
                )
    dt = time.time() - t0
    return CriterionResult(
        10, "reflection", dt < 10,
        "20 profiles x 6 q-values, k<=8, exactly equal", dt, 10,
    )


ALL_CRITERIA = (
    criterion_1,
    criterion_2,
    criterion_3,
    criterion_4,
    criterion_5,
    criterion_6,
    criterion_7,
    criterion_8,
    criterion_9,
    criterion_10,
)


def run_all(verbose: bool = True) -> list[CriterionResult]:
    results = []
    for fn in ALL_CRITERIA:
        res = fn()
        results.append(res)
        if verbose:
            print(res.line(), flush=True)
    return results
