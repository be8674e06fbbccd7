"""Command-line front end: analytic tables, Monte Carlo campaigns, contention
optimization, and figure-style presets, all emitted as CSV.

Thresholds and noise levels cross this boundary in dB and are converted to
linear once, at the parser.  Exit codes: 0 success, 2 configuration error,
3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, replace

from .analytic import SystemParams, delta_const, gamma_from_beta, outage_cdf, throughput_density
from .contention import BracketViolation, contention_optimum, throughput_grid_max
from .simulate import RECEIVERS, estimate_outage, receiver_label

__all__ = [
    "ConfigError",
    "InternalCheckError",
    "ScenarioConfig",
    "db_to_linear",
    "derive_row_seed",
    "figure_preset",
    "main",
    "run_analytic",
    "run_optimize",
    "run_simulation",
]

ANALYTIC_HEADER = "lambda,L,analytic_outage,throughput_density"
SIMULATE_HEADER = "lambda,L,receiver,analytic_outage,mc_outage,stderr,n_trials,seed"
OPTIMIZE_HEADER = "L,g,lambda_max,t_max,mode"

_MASK64 = (1 << 64) - 1


class ConfigError(ValueError):
    """Bad configuration; reported with the offending field and exit code 2."""


class InternalCheckError(RuntimeError):
    """A should-never-fail consistency check failed; exit code 3."""


def db_to_linear(value_db: float) -> float:
    """10**(dB/10), with a round-trip consistency check at the boundary."""
    linear = 10.0 ** (value_db / 10.0)
    back = 10.0 * math.log10(linear)
    if abs(back - value_db) > 1e-9 * max(1.0, abs(value_db)):
        raise InternalCheckError(f"dB round trip failed: {value_db} -> {linear} -> {back}")
    return linear


@dataclass
class ScenarioConfig:
    """One CLI scenario; `beta` and `sigma2` are stored linear."""

    alpha: float = 3.5
    beta: float = db_to_linear(3.0)
    d_r: float = 10.0
    sigma2: float = 1e-5
    antennas: tuple[int, ...] = (1, 2, 3, 4)
    receivers: tuple[str, ...] = ("oc",)
    pzf_k: int | None = None
    lambda_grid: tuple[float, ...] = ()
    lambda_points: int = 10
    n_trials: int = 100_000
    master_seed: int = 1
    expected_count: int = 100
    output: str = "-"

    def validate(self) -> None:
        checks = (
            (self.alpha > 2.0, f"alpha must be > 2 (got {self.alpha})"),
            (self.beta > 0.0, f"beta must be > 0 linear (got {self.beta})"),
            (self.d_r > 0.0, f"d_r must be > 0 (got {self.d_r})"),
            (self.sigma2 >= 0.0, f"sigma2 must be >= 0 (got {self.sigma2})"),
            (len(self.antennas) > 0, "L must list at least one antenna count"),
            (
                all(isinstance(l, int) and l >= 1 for l in self.antennas),
                f"L values must be integers >= 1 (got {self.antennas})",
            ),
            (len(self.receivers) > 0, "receivers must not be empty"),
            (
                all(r in RECEIVERS for r in self.receivers),
                f"receivers must be among {RECEIVERS} (got {self.receivers})",
            ),
            (
                self.pzf_k is None or (isinstance(self.pzf_k, int) and self.pzf_k >= 0),
                f"pzf_k must be an integer >= 0 (got {self.pzf_k})",
            ),
            (
                all(x > 0.0 for x in self.lambda_grid),
                f"lambda_grid entries must be > 0 (got {self.lambda_grid})",
            ),
            (self.lambda_points >= 2, f"lambda_points must be >= 2 (got {self.lambda_points})"),
            (self.n_trials >= 1, f"n_trials must be >= 1 (got {self.n_trials})"),
            (
                isinstance(self.master_seed, int) and 0 <= self.master_seed <= _MASK64,
                f"master_seed must be a 64-bit unsigned integer (got {self.master_seed})",
            ),
            (self.expected_count >= 1, f"expected_count must be >= 1 (got {self.expected_count})"),
        )
        for ok, message in checks:
            if not ok:
                raise ConfigError(message)

    def params_for(self, lam: float, L: int) -> SystemParams:
        return SystemParams(
            lam=lam, alpha=self.alpha, sigma2=self.sigma2, d_r=self.d_r, L=L, beta=self.beta
        )

    @property
    def gamma(self) -> float:
        return gamma_from_beta(self.beta, self.d_r, self.alpha)


def derive_row_seed(master_seed: int, row_index: int) -> int:
    """Per-row master seed: splitmix64 of the campaign seed and row index."""
    z = (master_seed + (row_index + 1) * 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def _poisson_tail_exponent(L: int, target_outage: float) -> float:
    # x with 1 - P(Poisson(x) < L) = target, bisected on the monotone tail
    from .analytic import _poisson_cdf

    lo, hi = 0.0, 1.0
    while 1.0 - _poisson_cdf(hi, L) < target_outage:
        hi *= 2.0
        if hi > 1e9:  # pragma: no cover
            raise InternalCheckError("outage target unreachable")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if 1.0 - _poisson_cdf(mid, L) < target_outage:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def default_lambda_grid(config: ScenarioConfig) -> tuple[float, ...]:
    """Log grid spanning outage 0.01 (largest L) to 0.99 (smallest L).

    The low target keys off the largest antenna count and the high target off
    the smallest, so every plotted curve is informative somewhere on the
    grid.  When the noise floor alone exceeds the low target the lower
    endpoint falls back to three decades under the upper one.
    """
    gamma = config.gamma
    area = delta_const(config.alpha) * gamma ** (2.0 / config.alpha)
    noise = config.sigma2 * gamma

    def lam_for(L: int, target: float) -> float | None:
        x = _poisson_tail_exponent(L, target)
        lam = (x - noise) / area
        return lam if lam > 0.0 else None

    lo = lam_for(max(config.antennas), 0.01)
    hi = lam_for(min(config.antennas), 0.99)
    if hi is None:
        raise ConfigError("cannot place the lambda grid: outage saturated by noise alone")
    if lo is None or lo >= hi:
        lo = hi / 1000.0
    n = config.lambda_points
    ratio = hi / lo
    return tuple(lo * ratio ** (k / (n - 1)) for k in range(n))


def run_analytic(config: ScenarioConfig) -> list[tuple]:
    """One row per (lambda, L): closed-form outage and throughput density."""
    rows = []
    for lam in config.lambda_grid:
        for L in config.antennas:
            params = config.params_for(lam, L)
            rows.append((lam, L, outage_cdf(params), throughput_density(params)))
    return rows


def run_simulation(config: ScenarioConfig) -> list[tuple]:
    """Monte Carlo rows per (lambda, L, receiver), reproducible per seed.

    Rows sharing a (lambda, L) cell also share their seed, so receivers are
    compared on identical trials (paired estimates).  The analytic column
    carries the optimum-combining closed form; other receivers have no
    closed form here and get nan.
    """
    rows = []
    cell_index = 0
    for lam in config.lambda_grid:
        for L in config.antennas:
            params = config.params_for(lam, L)
            analytic = outage_cdf(params)
            seed = derive_row_seed(config.master_seed, cell_index)
            cell_index += 1
            for receiver in config.receivers:
                estimate = estimate_outage(
                    params,
                    receiver=receiver,
                    n_trials=config.n_trials,
                    master_seed=seed,
                    expected_count=config.expected_count,
                    pzf_k=config.pzf_k,
                )
                rows.append(
                    (
                        lam,
                        L,
                        receiver_label(receiver, L, config.pzf_k),
                        analytic if receiver == "oc" else math.nan,
                        estimate.p_hat,
                        estimate.stderr,
                        estimate.n_trials,
                        estimate.master_seed,
                    )
                )
    return rows


def run_optimize(config: ScenarioConfig) -> list[tuple]:
    """Optimum contention density per antenna count.

    sigma2 = 0 uses the closed form (root of the contention polynomial);
    sigma2 > 0 has no closed form and switches to a labeled grid search.
    """
    gamma = config.gamma
    rows = []
    for L in config.antennas:
        if config.sigma2 == 0.0:
            opt = contention_optimum(L, config.alpha, gamma)
            rows.append((L, opt.g, opt.lambda_max, opt.t_max, "closed-form"))
        else:
            lam_best, t_best = throughput_grid_max(L, config.alpha, gamma, config.sigma2)
            rows.append((L, math.nan, lam_best, t_best, "grid-search"))
    return rows


def figure_preset(number: int) -> tuple[str, ScenarioConfig]:
    """Scenario presets mirroring the four summary figures.

    1: outage vs density, L = 1..4, noise -50 dB (simulate)
    2: receiver comparison at L = 3, no noise (simulate)
    3: throughput density vs density, L = 1..5, noise -57 dB (analytic)
    4: optimum contention density vs L, normalized geometry (optimize)
    """
    if number == 1:
        config = ScenarioConfig(sigma2=db_to_linear(-50.0))
        return "simulate", replace(config, lambda_grid=default_lambda_grid(config))
    if number == 2:
        config = ScenarioConfig(
            sigma2=0.0, antennas=(3,), receivers=("oc", "mrc", "zf", "pzf")
        )
        return "simulate", replace(config, lambda_grid=default_lambda_grid(config))
    if number == 3:
        config = ScenarioConfig(sigma2=db_to_linear(-57.0), antennas=(1, 2, 3, 4, 5))
        optima = [
            throughput_grid_max(L, config.alpha, config.gamma, config.sigma2)[0]
            for L in config.antennas
        ]
        lo, hi, n = 0.2 * min(optima), 5.0 * max(optima), 50
        grid = tuple(lo * (hi / lo) ** (k / (n - 1)) for k in range(n))
        return "analytic", replace(config, lambda_grid=grid)
    if number == 4:
        alpha = 3.5
        beta = delta_const(alpha) ** (-0.5 * alpha)  # makes Delta * gamma**(2/alpha) = 1
        config = ScenarioConfig(
            alpha=alpha, beta=beta, d_r=1.0, sigma2=0.0, antennas=tuple(range(1, 9))
        )
        return "optimize", config
    raise ConfigError(f"figure must be 1, 2, 3 or 4 (got {number})")


def _format_value(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, bool):  # pragma: no cover
        raise TypeError("no boolean CSV columns")
    if isinstance(value, int):
        return str(value)
    return format(float(value), ".17g")


def write_csv(path: str, header: str, rows: list[tuple]) -> None:
    text = header + "\n" + "".join(",".join(_format_value(v) for v in row) + "\n" for row in rows)
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as handle:
            handle.write(text)


def _parse_floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(tok) for tok in text.split(",") if tok.strip())
    except ValueError as exc:
        raise ConfigError(f"expected a comma-separated float list, got {text!r}") from exc


def _parse_ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(tok) for tok in text.split(",") if tok.strip())
    except ValueError as exc:
        raise ConfigError(f"expected a comma-separated integer list, got {text!r}") from exc


def _add_scenario_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="flat JSON config file; flags override file values")
    parser.add_argument("--alpha", type=float, help="path-loss exponent (> 2)")
    parser.add_argument("--beta-db", type=float, help="SINR threshold in dB")
    parser.add_argument("--beta", type=float, help="SINR threshold, linear (overrides --beta-db)")
    parser.add_argument("--d-r", type=float, help="desired-link distance in meters")
    parser.add_argument("--sigma2-db", type=float, help="noise level in dB (e.g. -50)")
    parser.add_argument(
        "--sigma2", type=float, help="noise level, linear; use 0 for the no-noise regime"
    )
    parser.add_argument("--L", help="comma-separated antenna counts, e.g. 1,2,3,4")
    parser.add_argument("--receivers", help=f"comma-separated subset of {','.join(RECEIVERS)}")
    parser.add_argument("--pzf-k", type=int, help="PZF cancellation count (default ceil(L/2))")
    parser.add_argument("--lambda-grid", help="comma-separated densities (overrides min/max)")
    parser.add_argument("--lambda-min", type=float, help="log-grid lower density")
    parser.add_argument("--lambda-max", type=float, help="log-grid upper density")
    parser.add_argument("--lambda-points", type=int, help="log-grid point count (default 10)")
    parser.add_argument("--n-trials", type=int, help="Monte Carlo trials per row")
    parser.add_argument("--seed", type=int, help="campaign master seed (64-bit unsigned)")
    parser.add_argument("--expected-count", type=int, help="mean interferer count in the disk")
    parser.add_argument("--out", help="output CSV path, or - for stdout (default)")


_CONFIG_KEYS = {
    "alpha": float,
    "beta_db": float,
    "beta": float,
    "d_r": float,
    "sigma2_db": float,
    "sigma2": float,
    "L": None,
    "receivers": None,
    "pzf_k": int,
    "lambda_grid": None,
    "lambda_points": int,
    "n_trials": int,
    "master_seed": int,
    "expected_count": int,
    "output": str,
}


def _load_config_file(path: str) -> dict:
    try:
        with open(path) as handle:
            data = json.load(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path} must hold a flat JSON object")
    unknown = sorted(set(data) - set(_CONFIG_KEYS))
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    return data


def build_config(args: argparse.Namespace) -> ScenarioConfig:
    """Defaults, then config-file values, then command-line flags."""
    config = ScenarioConfig()
    file_data = _load_config_file(args.config) if args.config else {}

    def pick(flag, key, fallback):
        if flag is not None:
            return flag
        if key in file_data:
            return file_data[key]
        return fallback

    beta_db = pick(args.beta_db, "beta_db", None)
    beta = pick(args.beta, "beta", None)
    if beta is None:
        beta = db_to_linear(float(beta_db)) if beta_db is not None else config.beta
    sigma2_db = pick(args.sigma2_db, "sigma2_db", None)
    sigma2 = pick(args.sigma2, "sigma2", None)
    if sigma2 is None:
        sigma2 = db_to_linear(float(sigma2_db)) if sigma2_db is not None else config.sigma2

    antennas = pick(args.L, "L", config.antennas)
    if isinstance(antennas, str):
        antennas = _parse_ints(antennas)
    elif isinstance(antennas, int):
        antennas = (antennas,)
    else:
        antennas = tuple(int(v) for v in antennas)

    receivers = pick(args.receivers, "receivers", config.receivers)
    if isinstance(receivers, str):
        receivers = tuple(tok.strip() for tok in receivers.split(",") if tok.strip())
    else:
        receivers = tuple(receivers)

    grid = pick(args.lambda_grid, "lambda_grid", config.lambda_grid)
    if isinstance(grid, str):
        grid = _parse_floats(grid)
    else:
        grid = tuple(float(v) for v in grid)

    config = ScenarioConfig(
        alpha=float(pick(args.alpha, "alpha", config.alpha)),
        beta=float(beta),
        d_r=float(pick(args.d_r, "d_r", config.d_r)),
        sigma2=float(sigma2),
        antennas=antennas,
        receivers=receivers,
        pzf_k=pick(args.pzf_k, "pzf_k", config.pzf_k),
        lambda_grid=grid,
        lambda_points=int(pick(args.lambda_points, "lambda_points", config.lambda_points)),
        n_trials=int(pick(args.n_trials, "n_trials", config.n_trials)),
        master_seed=int(pick(args.seed, "master_seed", config.master_seed)),
        expected_count=int(pick(args.expected_count, "expected_count", config.expected_count)),
        output=pick(args.out, "output", config.output),
    )
    if not config.lambda_grid and args.lambda_min is not None and args.lambda_max is not None:
        lo, hi = args.lambda_min, args.lambda_max
        if not 0.0 < lo < hi:
            raise ConfigError(f"need 0 < lambda-min < lambda-max (got {lo}, {hi})")
        n = config.lambda_points
        config.lambda_grid = tuple(lo * (hi / lo) ** (k / (n - 1)) for k in range(n))
    config.validate()
    return config


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ocfield",
        description="Outage, throughput and contention optimization for optimum "
        "combining in a Poisson interferer field, with a Monte Carlo cross-check.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (
        ("analytic", "closed-form outage and throughput over a density grid"),
        ("simulate", "Monte Carlo outage vs the closed form"),
        ("optimize", "optimum contention density per antenna count"),
    ):
        sp = sub.add_parser(name, help=text)
        _add_scenario_flags(sp)
    fig = sub.add_parser("figure", help="presets reproducing the summary figures (CSV only)")
    fig.add_argument("number", type=int, help="figure number: 1, 2, 3 or 4")
    _add_scenario_flags(fig)
    return parser


def _dispatch(command: str, config: ScenarioConfig) -> tuple[str, list[tuple]]:
    if command in ("analytic", "simulate") and not config.lambda_grid:
        config.lambda_grid = default_lambda_grid(config)
        config.validate()
    if command == "analytic":
        return ANALYTIC_HEADER, run_analytic(config)
    if command == "simulate":
        return SIMULATE_HEADER, run_simulation(config)
    if command == "optimize":
        return OPTIMIZE_HEADER, run_optimize(config)
    raise ConfigError(f"unknown command {command!r}")  # pragma: no cover


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "figure":
            command, config = figure_preset(args.number)
            # explicitly passed flags win over the preset; scenario-defining
            # fields stay fixed so the preset means what it says
            for flag, field_name in (
                ("n_trials", "n_trials"),
                ("seed", "master_seed"),
                ("expected_count", "expected_count"),
                ("pzf_k", "pzf_k"),
                ("out", "output"),
            ):
                value = getattr(args, flag)
                if value is not None:
                    setattr(config, field_name, value)
            if args.lambda_grid is not None:
                config.lambda_grid = _parse_floats(args.lambda_grid)
            config.validate()
        else:
            command, config = args.command, build_config(args)
        header, rows = _dispatch(command, config)
        write_csv(config.output, header, rows)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (BracketViolation, InternalCheckError) as exc:
        print(f"internal invariant violated: {exc}", file=sys.stderr)
        return 3
    return 0


def entry() -> None:  # console-script shim
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
