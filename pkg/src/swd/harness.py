"""Monte Carlo harness: error curves, statistic histograms, CSV and config IO.

Every trial derives its own RNG stream from (omega index, hypothesis,
trial index), so results are independent of execution order and thread
count, and a config (including its seed) pins the output bytes exactly.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .adaptive import SnrPrior, optimize_t
from .entrywise import (
    DensitySpec,
    edge_threshold,
    fisher_functionals,
    critical_tilde,
    statistic_Ltilde,
    theoretical_error_tilde,
    transform,
)
from .lsstest import (
    REJECT,
    TestParams,
    critical_value,
    decide,
    statistic_L,
    theoretical_error,
)
from .rmt import DataMatrix, NoiseSpec, Seed, SpikePrior, assemble, sample_noise, sample_spike
from .spectral import Outcome, eigvals_sym

__all__ = [
    "ExperimentConfig",
    "ErrorCurvePoint",
    "HistogramResult",
    "run_detection_experiment",
    "transform_compare",
    "histogram_L",
    "write_csv",
    "read_config",
    "write_config",
]

_MODES = ("plain", "transformed", "adaptive")

CSV_HEADER = "omega,type1,type2,err_empirical,err_theory,stderr,trials,n,seed,mode"


@dataclass(frozen=True)
class ExperimentConfig:
    n: int
    omegas: tuple
    trials: int
    seed: Seed
    noise: NoiseSpec
    prior: SpikePrior
    mode: str = "plain"
    emit: Optional[str] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "omegas", tuple(float(w) for w in self.omegas))
        if self.n < 2:
            raise ValueError("n must be at least 2")
        if self.trials < 100:
            raise ValueError("need at least 100 trials per hypothesis")
        if self.mode not in _MODES:
            raise ValueError(f"mode must be one of {_MODES}")
        for w in self.omegas:
            if not 0.0 <= w < 1.0:
                raise ValueError("omegas must lie in [0, 1); 0 is a degenerate row")


@dataclass(frozen=True)
class ErrorCurvePoint:
    omega: float
    type1: float
    type2: float
    err_empirical: float
    err_theory: float
    stderr: float
    trials: int
    n: int
    seed: int
    mode: str


@dataclass(frozen=True)
class HistogramResult:
    """Raw statistic samples at one omega, with trials that produced a
    distinguished outcome (no numeric value) counted separately."""

    omega: float
    h0: tuple
    h1: tuple
    mean0: float
    var0: float
    mean1: float
    var1: float
    certain0: int
    certain1: int


def _thread_count() -> int:
    raw = os.environ.get("SWD_THREADS", "0")
    try:
        k = int(raw)
    except ValueError as exc:
        raise ValueError(f"SWD_THREADS must be an integer, got {raw!r}") from exc
    if k <= 0:
        k = os.cpu_count() or 1
    return max(1, min(k, 32))


def _density_for(noise: NoiseSpec) -> DensitySpec:
    if noise.family == "sech":
        return DensitySpec.sech()
    if noise.family == "goe":
        return DensitySpec.gaussian()
    raise ValueError(f"no entrywise transform is defined for {noise.family!r} noise")


def _plan(cfg: ExperimentConfig, omega: float, t_star: Optional[float],
          theory_const: Optional[float]):
    """(statistic fn, critical value, theory error, mode tag) at one omega."""
    w2, w4 = cfg.noise.w2, cfg.noise.w4
    if cfg.mode == "plain":
        params = TestParams(omega, w2, w4, complex=cfg.noise.complex)
        crit = critical_value(params)
        return (lambda m: statistic_L(m, params)), crit, theoretical_error(params), "plain"
    if cfg.mode == "adaptive":
        params = TestParams(t_star, w2, w4, complex=cfg.noise.complex)
        crit = critical_value(params)
        return (lambda m: statistic_L(m, params)), crit, theory_const, "adaptive"
    density = _density_for(cfg.noise)
    fi = fisher_functionals(density)
    s = omega * fi.F
    if s < 1.0:
        crit = critical_tilde(omega, w2, fi)
        theory = theoretical_error_tilde(omega, w2, fi)

        def stat(m):
            return statistic_Ltilde(transform(m, density), omega, w2, fi)

        return stat, crit, theory, "transformed"
    # supercritical effective SNR: threshold the top transformed eigenvalue
    crit = edge_threshold(s)

    def stat_edge(m):
        return float(eigvals_sym(transform(m, density)).eigvals[0])

    return stat_edge, crit, 0.0, "transformed-edge"


def _run_trials(cfg: ExperimentConfig, index: int, omega: float, stat, crit):
    """Per-trial rejection flags under H0 and H1, order-independent."""

    def one(trial: int) -> tuple:
        h0 = sample_noise(cfg.n, cfg.noise, cfg.seed.child(index, 0, trial))
        r0 = decide(stat(h0), crit) == REJECT
        x = sample_spike(cfg.n, cfg.prior, cfg.seed.child(index, 1, trial, 0))
        noise = sample_noise(cfg.n, cfg.noise, cfg.seed.child(index, 1, trial, 1))
        r1 = decide(stat(assemble(x, omega, noise)), crit) == REJECT
        return r0, r1

    k = _thread_count()
    if k == 1:
        return [one(t) for t in range(cfg.trials)]
    with ThreadPoolExecutor(max_workers=k) as ex:
        return list(ex.map(one, range(cfg.trials)))


def _degenerate_point(cfg: ExperimentConfig) -> ErrorCurvePoint:
    # omega = 0: H1 equals H0, so type1 + type2 = 1 for any threshold
    return ErrorCurvePoint(
        omega=0.0, type1=0.0, type2=1.0, err_empirical=1.0, err_theory=1.0,
        stderr=0.0, trials=0, n=cfg.n, seed=cfg.seed.root, mode=cfg.mode,
    )


def run_detection_experiment(cfg: ExperimentConfig) -> tuple:
    """Empirical Type-I/Type-II rates against theory at each omega."""
    t_star = None
    theory_const = None
    if cfg.mode == "adaptive":
        res = optimize_t(SnrPrior.uniform01(), cfg.noise.w2, cfg.noise.w4)
        t_star, theory_const = res.t_star, res.error
    points = []
    for index, omega in enumerate(cfg.omegas):
        if omega == 0.0:
            points.append(_degenerate_point(cfg))
            continue
        stat, crit, theory, tag = _plan(cfg, omega, t_star, theory_const)
        flags = _run_trials(cfg, index, omega, stat, crit)
        t = cfg.trials
        type1 = sum(1 for r0, _ in flags if r0) / t
        type2 = sum(1 for _, r1 in flags if not r1) / t
        stderr = math.sqrt(
            type1 * (1.0 - type1) / t + type2 * (1.0 - type2) / t
        )
        points.append(ErrorCurvePoint(
            omega=omega, type1=type1, type2=type2,
            err_empirical=type1 + type2, err_theory=theory, stderr=stderr,
            trials=t, n=cfg.n, seed=cfg.seed.root, mode=tag,
        ))
    return tuple(points)


def transform_compare(cfg: ExperimentConfig) -> tuple:
    """(plain points, transformed points) over the same matrices.

    Both runs derive identical per-trial seeds, so each trial's plain and
    transformed decisions are made on the same data.
    """
    plain = run_detection_experiment(replace(cfg, mode="plain"))
    tilde = run_detection_experiment(replace(cfg, mode="transformed"))
    return plain, tilde


def histogram_L(cfg: ExperimentConfig, omega: float) -> HistogramResult:
    """Raw statistic samples under each hypothesis at one omega.

    Seeded exactly like the matching error-curve row, so the samples are
    the statistics behind that row's rates.
    """
    if not 0.0 < omega < 1.0:
        raise ValueError("omega must lie in (0, 1)")
    index = 0
    for i, w in enumerate(cfg.omegas):
        if abs(w - omega) < 1e-12:
            index = i
            break
    t_star = None
    theory_const = None
    if cfg.mode == "adaptive":
        res = optimize_t(SnrPrior.uniform01(), cfg.noise.w2, cfg.noise.w4)
        t_star, theory_const = res.t_star, res.error
    stat, _, _, _ = _plan(cfg, omega, t_star, theory_const)

    def one(trial: int) -> tuple:
        h0 = sample_noise(cfg.n, cfg.noise, cfg.seed.child(index, 0, trial))
        v0 = stat(h0)
        x = sample_spike(cfg.n, cfg.prior, cfg.seed.child(index, 1, trial, 0))
        noise = sample_noise(cfg.n, cfg.noise, cfg.seed.child(index, 1, trial, 1))
        v1 = stat(assemble(x, omega, noise))
        return v0, v1

    k = _thread_count()
    if k == 1:
        pairs = [one(t) for t in range(cfg.trials)]
    else:
        with ThreadPoolExecutor(max_workers=k) as ex:
            pairs = list(ex.map(one, range(cfg.trials)))

    h0 = [v for v, _ in pairs if not isinstance(v, Outcome)]
    h1 = [v for _, v in pairs if not isinstance(v, Outcome)]
    certain0 = cfg.trials - len(h0)
    certain1 = cfg.trials - len(h1)
    a0 = np.asarray(h0)
    a1 = np.asarray(h1)
    return HistogramResult(
        omega=omega, h0=tuple(h0), h1=tuple(h1),
        mean0=float(a0.mean()) if a0.size else math.nan,
        var0=float(a0.var(ddof=1)) if a0.size > 1 else math.nan,
        mean1=float(a1.mean()) if a1.size else math.nan,
        var1=float(a1.var(ddof=1)) if a1.size > 1 else math.nan,
        certain0=certain0, certain1=certain1,
    )


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.9g}"
    return str(value)


def write_csv(points: Sequence[ErrorCurvePoint], path_or_file) -> None:
    """CSV with the fixed schema, 9 significant digits, LF endings."""
    lines = [CSV_HEADER]
    for p in points:
        lines.append(",".join(_fmt(v) for v in (
            p.omega, p.type1, p.type2, p.err_empirical, p.err_theory,
            p.stderr, p.trials, p.n, p.seed, p.mode,
        )))
    text = "\n".join(lines) + "\n"
    if hasattr(path_or_file, "write"):
        path_or_file.write(text)
        return
    with open(path_or_file, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


_NOISE_NAMES = {"goe", "gue", "sech", "rademacher"}
_CONFIG_KEYS = {"n", "omegas", "trials", "seed", "noise", "prior", "mode", "emit"}


def _parse_noise(text: str) -> NoiseSpec:
    name, _, arg = text.partition(":")
    name = name.strip()
    if name == "goe":
        return NoiseSpec.goe()
    if name == "gue":
        return NoiseSpec.gue()
    if name == "sech":
        return NoiseSpec.sech()
    if name == "rademacher":
        return NoiseSpec.rademacher(float(arg) if arg else 1.0)
    raise ValueError(f"noise must be one of {sorted(_NOISE_NAMES)}, got {name!r}")


def _parse_prior(text: str) -> SpikePrior:
    name, _, arg = text.partition(":")
    name = name.strip().replace("_", "-")
    if name == "rademacher":
        return SpikePrior.rademacher()
    if name == "sphere":
        return SpikePrior.sphere()
    if name == "all-ones":
        return SpikePrior.all_ones()
    if name == "sparse":
        return SpikePrior.sparse(int(arg))
    if name == "biased":
        return SpikePrior.biased(float(arg))
    raise ValueError(f"unknown spike prior: {text!r}")


def _noise_name(spec: NoiseSpec) -> str:
    if spec.family == "rademacher-offdiag":
        return f"rademacher:{spec.w2:g}"
    return spec.family


def _prior_name(prior: SpikePrior) -> str:
    if prior.kind == "rademacher-iid":
        return "rademacher"
    if prior.kind == "unit-sphere-uniform":
        return "sphere"
    if prior.kind == "all-ones":
        return "all-ones"
    if prior.kind == "sparse":
        return f"sparse:{prior.k}"
    if prior.kind == "biased":
        return f"biased:{prior.c:g}"
    raise ValueError(f"prior kind {prior.kind!r} has no config spelling")


def read_config(path) -> ExperimentConfig:
    """key = value lines with # comments; keys beyond the schema are errors."""
    entries = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key = value")
            key, _, value = line.partition("=")
            key = key.strip()
            if key not in _CONFIG_KEYS:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            if key in entries:
                raise ValueError(f"{path}:{lineno}: duplicate key {key!r}")
            entries[key] = value.strip()
    for key in ("n", "omegas", "trials", "seed", "noise"):
        if key not in entries:
            raise ValueError(f"{path}: missing required key {key!r}")
    seed_parts = [int(tok) for tok in entries["seed"].split(",")]
    if len(seed_parts) not in (1, 2):
        raise ValueError(f"{path}: seed must be 'root' or 'root,stream'")
    return ExperimentConfig(
        n=int(entries["n"]),
        omegas=tuple(float(tok) for tok in entries["omegas"].split(",")),
        trials=int(entries["trials"]),
        seed=Seed(*seed_parts),
        noise=_parse_noise(entries["noise"]),
        prior=_parse_prior(entries.get("prior", "rademacher")),
        mode=entries.get("mode", "plain"),
        emit=entries.get("emit"),
    )


def write_config(cfg: ExperimentConfig, path) -> None:
    """Inverse of read_config: read_config(write_config(cfg)) == cfg."""
    seed = str(cfg.seed.root)
    if cfg.seed.stream:
        seed += f",{cfg.seed.stream}"
    lines = [
        f"n = {cfg.n}",
        "omegas = " + ", ".join(f"{w:g}" for w in cfg.omegas),
        f"trials = {cfg.trials}",
        f"seed = {seed}",
        f"noise = {_noise_name(cfg.noise)}",
        f"prior = {_prior_name(cfg.prior)}",
        f"mode = {cfg.mode}",
    ]
    if cfg.emit is not None:
        lines.append(f"emit = {cfg.emit}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
