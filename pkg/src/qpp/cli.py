"""Batch front door: JSON config in, JSON/CSV out, optional figure files.

Subcommands: pp, limit, transfer, density, converge, selftest.
Exit codes: 0 success, 2 input error, 3 order/limit error, 4 quadrature
failure.  Identical configs produce byte-identical outputs; floats are
printed with 17 significant digits in CSV and via repr in JSON.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import acceptance
from .densities import eval_density, make_model, quadrature
from .errors import (
    InsufficientOrder,
    OrderMismatch,
    QppError,
    QuadratureFailure,
    TooLarge,
)
from .freeprob import MomentSeq, beta_moments
from .limits import (
    PhiSpec,
    PsiSpec,
    inf_correction_moments,
    inf_cumulants,
    limit_cumulants,
    limit_moments,
    limit_moments_alt,
    q_transfer,
)
from .series import as_rational, rational_str
from .signatures import Signature, gf_moment_series, pp_measure

MAX_EXACT_ORDER = 16
MAX_QUAD_POWER = 12


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _load_config(path: str | None) -> dict:
    if path is None:
        raise ValueError("this command needs --config (a JSON file, or '-')")
    if path == "-":
        return json.load(sys.stdin)
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json_dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _check_order(k: int, limit: int = MAX_EXACT_ORDER) -> int:
    k = int(k)
    if k < 0 or k > limit:
        raise TooLarge(f"order {k} outside 0..{limit}")
    return k


# ---------------------------------------------------------------------------


def cmd_pp(config: dict, fmt: str) -> str:
    sig = Signature.from_json(config["signature"])
    q = as_rational(config["q"])
    offset = as_rational(config.get("offset", 1))
    order = _check_order(config.get("order", 6))
    measure = pp_measure(sig, q, offset)
    direct = [measure.moment(k) for k in range(order + 1)]
    xs = [Fraction(x) for x in sig.shifted_coordinates()]
    shift = offset - 1
    n = Fraction(sig.n)
    gf = gf_moment_series(xs, q, order + 1)
    # the generating function lives on the unshifted coordinates; translate
    via_gf_measure = [gf.coefficient(k + 1) / n ** (k + 1) for k in range(order + 1)]
    if shift != 0:
        import math as _m

        via_gf = [
            sum(
                _m.comb(k, j) * shift ** (k - j) * via_gf_measure[j]
                for j in range(k + 1)
            )
            for k in range(order + 1)
        ]
    else:
        via_gf = via_gf_measure
    equal = direct == via_gf
    if fmt == "csv":
        lines = ["pos,w"]
        lines += [f"{rational_str(p)},{rational_str(w)}" for p, w in measure.atoms]
        lines.append(f"# moments_equal,{str(equal).lower()}")
        return "\n".join(lines) + "\n"
    return _json_dump(
        {
            "command": "pp",
            "signature": list(sig.parts),
            "q": rational_str(q),
            "offset": rational_str(offset),
            "signed": measure.signed,
            "atoms": measure.to_json(),
            "moments_direct": [rational_str(x) for x in direct],
            "moments_gf": [rational_str(x) for x in via_gf],
            "moments_equal": equal,
        }
    )


def cmd_limit(config: dict, fmt: str) -> str:
    psi = PsiSpec.from_json(config["psi"])
    q = as_rational(config["q"])
    order = _check_order(config.get("order", 8))
    regime = config.get("regime", "full")
    moments = [limit_moments(psi, q, k) for k in range(order + 1)]
    alt_equal = all(
        limit_moments_alt(psi, q, k) == moments[k] for k in range(order + 1)
    )
    kappa = limit_cumulants(psi, q, order)
    result = {
        "command": "limit",
        "q": rational_str(q),
        "order": order,
        "regime": regime,
        "moments": [rational_str(x) for x in moments],
        "moments_alt_equal": alt_equal,
        "cumulants": [rational_str(x) for x in kappa.kappa],
    }
    if "phi" in config:
        phi = PhiSpec.from_json(config["phi"])
        corr = [
            inf_correction_moments(psi, phi, q, k, regime)
            for k in range(1, order + 1)
        ]
        _, kp = inf_cumulants(psi, phi, q, order, regime)
        result["corrections"] = [rational_str(x) for x in corr]
        result["inf_cumulants"] = [rational_str(x) for x in kp.kappa]
    if fmt == "csv":
        lines = ["k,moment,cumulant,correction"]
        corr = result.get("corrections")
        for k in range(order + 1):
            cum = result["cumulants"][k - 1] if k >= 1 else ""
            cor = corr[k - 1] if corr and k >= 1 else ""
            lines.append(f"{k},{result['moments'][k]},{cum},{cor}")
        return "\n".join(lines) + "\n"
    return _json_dump(result)


def cmd_transfer(config: dict, fmt: str) -> str:
    moments = MomentSeq.of(config["moments"])
    _check_order(moments.order)
    q = as_rational(config["q"])
    qp = as_rational(config["q_prime"])
    moved = q_transfer(moments, q, qp)
    back_ok = q_transfer(moved, qp, q).mu == moments.mu
    if fmt == "csv":
        lines = ["k,moment,transferred"]
        lines += [
            f"{k},{rational_str(moments[k])},{rational_str(moved[k])}"
            for k in range(moments.order + 1)
        ]
        return "\n".join(lines) + "\n"
    return _json_dump(
        {
            "command": "transfer",
            "q": rational_str(q),
            "q_prime": rational_str(qp),
            "moments": [rational_str(x) for x in moments.mu],
            "transferred": [rational_str(x) for x in moved.mu],
            "round_trip_exact": back_ok,
        }
    )


def _model_from_config(config: dict):
    spec = dict(config["model"])
    kind = spec.pop("kind")
    return make_model(kind, **spec)


def cmd_density(
    config: dict, fmt: str, plot: str | None = None, grid: int | None = None
) -> str:
    model = _model_from_config(config)
    npts = int(grid if grid is not None else config.get("grid", 1000))
    if npts < 2:
        raise ValueError("grid needs at least 2 points")
    lo = min(p.lo for p in model.pieces) if model.pieces else 0.0
    hi = max(p.hi for p in model.pieces) if model.pieces else 1.0
    if model.atoms:
        lo = min([lo] + [p for p, _ in model.atoms])
        hi = max([hi] + [p for p, _ in model.atoms])
    ts = [lo + (hi - lo) * i / (npts - 1) for i in range(npts)]
    fs = [eval_density(model, t) for t in ts]
    mass = quadrature(model, 0)
    target = 0.0 if model.is_correction else 1.0
    mass_ok = abs(mass - target) <= 1e-10
    report = []
    if "compare_moments" in config:
        exact = [as_rational(s) for s in config["compare_moments"]]
        if len(exact) - 1 > MAX_QUAD_POWER:
            raise TooLarge(f"quadrature powers capped at {MAX_QUAD_POWER}")
        for k, series_val in enumerate(exact):
            quad = quadrature(model, k)
            report.append(
                {
                    "k": k,
                    "series": rational_str(series_val),
                    "quad": quad,
                    "abs_err": abs(quad - float(series_val)),
                }
            )
    if plot:
        from .figures import render_density_figure

        render_density_figure(ts, fs, model.atoms, model.model_id, plot)
    if fmt == "json":
        return _json_dump(
            {
                "command": "density",
                "model": model.model_id,
                "atoms": [[p, w] for p, w in model.atoms],
                "grid": [[t, f] for t, f in zip(ts, fs)],
                "mass": mass,
                "mass_target": target,
                "mass_ok": mass_ok,
                "moment_report": report,
            }
        )
    lines = ["t,f,model"]
    lines += [f"{_fmt(t)},{_fmt(f)},{model.model_id}" for t, f in zip(ts, fs)]
    for pos, w in model.atoms:
        lines.append(f"# atom,{_fmt(pos)},{_fmt(w)}")
    lines.append(
        f"# mass,{_fmt(mass)},target,{_fmt(target)},ok,{str(mass_ok).lower()}"
    )
    for row in report:
        lines.append(
            f"# moment,{row['k']},{row['series']},{_fmt(row['quad'])},{_fmt(row['abs_err'])}"
        )
    return "\n".join(lines) + "\n"


def cmd_converge(config: dict, fmt: str, plot: str | None = None) -> str:
    q = as_rational(config["q"])
    k_max = _check_order(config.get("k_max", 5), 8)
    ns = [int(n) for n in config.get("Ns", (10, 20, 40, 80, 160, 320))]
    if any(n < 1 for n in ns):
        raise ValueError("N values must be positive")
    bm = beta_moments(q, max(k_max, 1))
    rows = []
    for n in ns:
        measure = pp_measure(Signature((0,) * n), q)
        for k in range(k_max + 1):
            mom = measure.moment(k)
            limit = bm[k]
            gap = mom - limit
            pred = Fraction(q - 1, 2) * k * bm[k - 1] if k >= 1 else Fraction(0)
            rows.append(
                {
                    "N": n,
                    "k": k,
                    "moment": mom,
                    "limit": limit,
                    "scaled_gap": n * gap,
                    "predicted": pred,
                    "abs_gap": abs(float(gap)),
                }
            )
    if plot:
        from .figures import render_convergence_figure

        render_convergence_figure(rows, plot)
    if fmt == "json":
        return _json_dump(
            {
                "command": "converge",
                "q": rational_str(q),
                "rows": [
                    {
                        "N": r["N"],
                        "k": r["k"],
                        "moment": rational_str(r["moment"]),
                        "limit": rational_str(r["limit"]),
                        "scaled_gap": rational_str(r["scaled_gap"]),
                        "predicted": rational_str(r["predicted"]),
                    }
                    for r in rows
                ],
            }
        )
    lines = ["N,k,moment,limit,scaled_gap,predicted"]
    lines += [
        f"{r['N']},{r['k']},{_fmt(float(r['moment']))},{_fmt(float(r['limit']))},"
        f"{_fmt(float(r['scaled_gap']))},{_fmt(float(r['predicted']))}"
        for r in rows
    ]
    return "\n".join(lines) + "\n"


def cmd_selftest() -> tuple[str, bool]:
    results = acceptance.run_all(verbose=False)
    lines = [r.line() for r in results]
    ok = all(r.passed for r in results)
    lines.append(f"{'ALL PASS' if ok else 'FAILURES PRESENT'} ({len(results)} criteria)")
    return "\n".join(lines) + "\n", ok


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qpp",
        description="Deformed Perelomov-Popov measures: exact series pipelines "
        "and density cross-checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, needs_plot in (
        ("pp", False),
        ("limit", False),
        ("transfer", False),
        ("density", True),
        ("converge", True),
        ("selftest", False),
    ):
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON config path, or - for stdin")
        p.add_argument("--out", help="output path (default stdout)")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        if needs_plot:
            p.add_argument(
                "--plot",
                nargs="?",
                const="",
                default=None,
                help="also render a PNG (optional path; defaults beside --out)",
            )
        if name == "density":
            p.add_argument(
                "--grid", type=int, default=None, help="grid point count override"
            )
    return parser


def _plot_path(args) -> str | None:
    plot = getattr(args, "plot", None)
    if plot is None:
        return None
    if plot:
        return plot
    if args.out:
        stem = args.out.rsplit(".", 1)[0]
        return stem + ".png"
    return f"{args.command}.png"


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "selftest":
            text, ok = cmd_selftest()
            _emit(text, args.out)
            return 0 if ok else 1
        config = _load_config(args.config)
        if "command" in config and config["command"] != args.command:
            raise ValueError(
                f"config is for {config['command']!r}, invoked as {args.command!r}"
            )
        if args.command == "pp":
            text = cmd_pp(config, args.format)
        elif args.command == "limit":
            text = cmd_limit(config, args.format)
        elif args.command == "transfer":
            text = cmd_transfer(config, args.format)
        elif args.command == "density":
            text = cmd_density(config, args.format, _plot_path(args), args.grid)
        else:
            text = cmd_converge(config, args.format, _plot_path(args))
        _emit(text, args.out)
        return 0
    except QuadratureFailure as exc:
        print(f"quadrature failure: {exc}", file=sys.stderr)
        return 4
    except (InsufficientOrder, TooLarge, OrderMismatch) as exc:
        print(f"order/limit error: {exc}", file=sys.stderr)
        return 3
    except (QppError, ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
