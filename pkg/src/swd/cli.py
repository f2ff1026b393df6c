"""Command-line surface: detection, simulation, and experiment workflows.

Exit codes: 0 = success (detect: accept H0), 1 = detect rejected H0,
2 = usage, data, or parameter error. Reports are single-line JSON.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from importlib.resources import files
from typing import Optional

import numpy as np

from .adaptive import SnrPrior, average_error, optimize_t
from .cheb import AnalyticFn, cheb_coeffs, clt_mean, clt_var, phi_omega
from .entrywise import (
    DensitySpec,
    edge_threshold,
    critical_tilde,
    fisher_functionals,
    statistic_Ltilde,
    theoretical_error_tilde,
    transform,
)
from .harness import read_config, run_detection_experiment, transform_compare, write_csv
from .lsstest import REJECT, TestParams, decide, detect_report, estimate_w2_w4
from .rmt import (
    DataMatrix,
    NoiseSpec,
    Seed,
    SpikePrior,
    assemble,
    matrix_text,
    read_matrix,
    sample_noise,
    sample_spike,
    write_matrix,
)
from .spectral import SIGNAL_CERTAIN, Outcome, eigvals_sym

__all__ = ["main"]


def _emit(report: dict) -> None:
    print(json.dumps(report))


def _noise_spec(name: str) -> NoiseSpec:
    base, _, arg = name.partition(":")
    if base == "goe":
        return NoiseSpec.goe()
    if base == "gue":
        return NoiseSpec.gue()
    if base == "sech":
        return NoiseSpec.sech()
    if base == "rademacher":
        return NoiseSpec.rademacher(float(arg) if arg else 1.0)
    raise ValueError(f"unknown noise family: {name!r}")


def _spike_prior(name: str) -> SpikePrior:
    base, _, arg = name.replace("_", "-").partition(":")
    if base == "rademacher":
        return SpikePrior.rademacher()
    if base == "sphere":
        return SpikePrior.sphere()
    if base == "all-ones":
        return SpikePrior.all_ones()
    if base == "sparse":
        return SpikePrior.sparse(int(arg))
    if base == "biased":
        return SpikePrior.biased(float(arg))
    raise ValueError(f"unknown spike prior: {name!r}")


def _density_spec(name: str) -> DensitySpec:
    if name == "gaussian":
        return DensitySpec.gaussian()
    if name == "sech":
        return DensitySpec.sech()
    raise ValueError(f"unknown density (built-ins: gaussian, sech): {name!r}")


def _snr_prior(name: str) -> SnrPrior:
    base, _, arg = name.partition(":")
    if base == "uniform01":
        return SnrPrior.uniform01()
    if base == "point":
        return SnrPrior.point(float(arg))
    raise ValueError(f"unknown prior (use uniform01 or point:LAM): {name!r}")


def _moments_for_detect(args, data: DataMatrix) -> tuple:
    if args.estimate:
        if args.w2 is not None or args.w4 is not None:
            raise ValueError("pass either --estimate or --w2/--w4, not both")
        return estimate_w2_w4(data)
    if args.w2 is None or args.w4 is None:
        raise ValueError("pass both --w2 and --w4, or --estimate")
    return args.w2, args.w4


def _cmd_detect(args) -> int:
    data = read_matrix(args.matrix)
    if data.complex != args.complex:
        kind = "complex" if data.complex else "real"
        raise ValueError(f"matrix is {kind}; pass --complex to match the data")
    w2, w4 = _moments_for_detect(args, data)
    if args.density is None:
        params = TestParams(args.omega, w2, w4, complex=args.complex)
        rep = detect_report(data, params)
        report = {
            "statistic": rep.statistic,
            "critical": rep.critical,
            "decision": rep.decision,
            "signal_certain": rep.signal_certain,
            "theoretical_error": rep.theoretical_error,
        }
        _emit(report)
        return 1 if rep.decision == REJECT else 0

    density = _density_spec(args.density)
    fi = fisher_functionals(density)
    if not 0.0 < args.omega < 1.0:
        raise ValueError("omega must lie in (0, 1)")
    s = args.omega * fi.F
    tilde = transform(data, density)
    if s >= 1.0:
        top = float(eigvals_sym(tilde).eigvals[0])
        crit = edge_threshold(s)
        decision = decide(top, crit)
        report = {
            "statistic": top,
            "critical": crit,
            "decision": decision,
            "signal_certain": decision == REJECT,
            "theoretical_error": 0.0,
        }
    else:
        stat = statistic_Ltilde(tilde, args.omega, w2, fi)
        crit = critical_tilde(args.omega, w2, fi)
        decision = decide(stat, crit)
        report = {
            "statistic": None if isinstance(stat, Outcome) else float(stat),
            "critical": crit,
            "decision": decision,
            "signal_certain": stat is SIGNAL_CERTAIN,
            "theoretical_error": theoretical_error_tilde(args.omega, w2, fi),
        }
    _emit(report)
    return 1 if report["decision"] == REJECT else 0


def _cmd_simulate(args) -> int:
    if args.n < 2:
        raise ValueError("n must be at least 2")
    if args.omega < 0.0:
        raise ValueError("omega must be nonnegative")
    seed = Seed(args.seed)
    if args.noise == "none":
        h = DataMatrix(n=args.n, entries=np.zeros((args.n, args.n)))
    else:
        h = sample_noise(args.n, _noise_spec(args.noise), seed.child(1))
    if args.omega > 0.0:
        x = sample_spike(args.n, _spike_prior(args.prior), seed.child(0))
        m = assemble(x, args.omega, h)
    else:
        m = h
    if args.out is None:
        sys.stdout.write(matrix_text(m))
    else:
        write_matrix(m, args.out)
    return 0


def _resolve_config(path: str) -> str:
    """Literal path first, then the configs bundled with the package."""
    if os.path.exists(path):
        return path
    bundled = files("swd").joinpath("configs", os.path.basename(path))
    if bundled.is_file():
        return str(bundled)
    raise FileNotFoundError(f"no such config: {path}")


def _cmd_error_curve(args) -> int:
    cfg = read_config(_resolve_config(args.config))
    points = run_detection_experiment(cfg)
    target = args.out if args.out is not None else cfg.emit
    if target is None:
        write_csv(points, sys.stdout)
    else:
        write_csv(points, target)
    return 0


_COMPARE_HEADER = (
    "omega,err_plain,theory_plain,stderr_plain,"
    "err_transformed,theory_transformed,stderr_transformed,tag"
)


def _cmd_transform_compare(args) -> int:
    cfg = read_config(_resolve_config(args.config))
    plain, tilde = transform_compare(cfg)
    lines = [_COMPARE_HEADER]
    for p, q in zip(plain, tilde):
        tag = "ReliablyDetectable" if q.mode == "transformed-edge" else ""
        vals = (p.err_empirical, p.err_theory, p.stderr,
                q.err_empirical, q.err_theory, q.stderr)
        lines.append(f"{p.omega:.9g}," + ",".join(f"{v:.9g}" for v in vals) + f",{tag}")
    text = "\n".join(lines) + "\n"
    target = args.out if args.out is not None else cfg.emit
    if target is None:
        sys.stdout.write(text)
    else:
        with open(target, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    return 0


def _cmd_adaptive(args) -> int:
    if args.w4 == 1.0:
        print(
            "w4 = 1 has no quadratic correction; use the exceptional-case "
            "estimators (exceptional_w4_one) instead of the adaptive test",
            file=sys.stderr,
        )
        return 2
    prior = _snr_prior(args.prior)
    res = optimize_t(prior, args.w2, args.w4, tol=args.tol)
    if args.sweep is not None:
        ts = [(k + 0.5) / 100.0 for k in range(100)]
        lines = ["t,average_error"]
        for t in ts:
            lines.append(f"{t:.9g},{average_error(t, prior, args.w2, args.w4):.9g}")
        with open(args.sweep, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
    _emit({
        "t_star": res.t_star,
        "average_error": res.error,
        "evaluations": res.evaluations,
        "flagged": res.flagged,
    })
    return 0


def _parse_f(spec: str, w2: float, w4: float, is_complex: bool) -> AnalyticFn:
    kind, _, arg = spec.partition(":")
    if kind == "phi":
        return phi_omega(float(arg), w2, w4, complex=is_complex)
    if kind == "poly":
        coeffs = np.array([float(tok) for tok in arg.split(",")])

        def _eval(x):
            return np.polynomial.polynomial.polyval(np.asarray(x, dtype=float), coeffs)

        return AnalyticFn(eval=_eval, label=f"poly[{arg}]")
    raise ValueError(f"--f must be poly:c0,c1,... or phi:omega, got {spec!r}")


def _cmd_clt_check(args) -> int:
    f = _parse_f(args.f, args.w2, args.w4, args.complex)
    taus = cheb_coeffs(f, 8).tau
    _emit({
        "tau": [float(t) for t in taus],
        "mean": clt_mean(f, args.lam, args.w2, args.w4, complex=args.complex),
        "variance": clt_var(f, args.w2, args.w4, complex=args.complex),
    })
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="swd",
        description="Spectral detection of rank-one spikes in Wigner-type noise.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("detect", help="test one matrix file for a spike")
    p.add_argument("--matrix", required=True, help="matrix file path")
    p.add_argument("--omega", required=True, type=float, help="hypothesized SNR")
    p.add_argument("--w2", type=float, help="normalized diagonal variance")
    p.add_argument("--w4", type=float, help="normalized fourth moment")
    p.add_argument("--estimate", action="store_true",
                   help="estimate w2, w4 from the matrix")
    p.add_argument("--complex", action="store_true", help="Hermitian data")
    p.add_argument("--density", help="entrywise transform density (gaussian, sech)")
    p.set_defaults(func=_cmd_detect)

    p = sub.add_parser("simulate", help="write a sampled matrix file")
    p.add_argument("--n", required=True, type=int)
    p.add_argument("--omega", type=float, default=0.0, help="true SNR (0 = noise only)")
    p.add_argument("--noise", required=True,
                   help="goe | gue | sech | rademacher[:w2] | none")
    p.add_argument("--prior", default="rademacher",
                   help="rademacher | sphere | all-ones | sparse:k | biased:c")
    p.add_argument("--seed", required=True, type=int)
    p.add_argument("--out", help="output path (default stdout)")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("error-curve", help="run a config and emit the error CSV")
    p.add_argument("--config", required=True)
    p.add_argument("--out", help="override the config emit path")
    p.set_defaults(func=_cmd_error_curve)

    p = sub.add_parser("adaptive", help="optimize the hypothesized SNR under a prior")
    p.add_argument("--prior", default="uniform01", help="uniform01 | point:LAM")
    p.add_argument("--w2", required=True, type=float)
    p.add_argument("--w4", required=True, type=float)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--sweep", help="also write a 100-point (t, err) CSV here")
    p.set_defaults(func=_cmd_adaptive)

    p = sub.add_parser("transform-compare",
                       help="plain vs transformed error on shared data")
    p.add_argument("--config", required=True)
    p.add_argument("--out", help="override the config emit path")
    p.set_defaults(func=_cmd_transform_compare)

    p = sub.add_parser("clt-check", help="tau table and CLT moments of a function")
    p.add_argument("--f", required=True, help="poly:c0,c1,... | phi:omega")
    p.add_argument("--lambda", dest="lam", type=float, default=0.0)
    p.add_argument("--w2", required=True, type=float)
    p.add_argument("--w4", required=True, type=float)
    p.add_argument("--complex", action="store_true")
    p.set_defaults(func=_cmd_clt_check)

    return parser


def main(argv: Optional[list] = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
