"""Command-line front end: run an experiment, emit CSV trajectories and an SVG plot."""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass

import numpy as np

from .harness import TrajectoryStats, empirical_epsilon_time, run_experiment
from .sir import POLICIES, ConfigError, SimConfig
from .theory import TheoryParams, epsilon_control_time

CSV_HEADER = "t,alpha_mean,lambda_mean,gamma_mean,theory_lambda"


@dataclass(frozen=True)
class OutputSpec:
    """Where the run's results go; at least one target must be set."""

    csv_path: str | None = None
    svg_path: str | None = None
    include_theory: bool = False

    def validate(self) -> None:
        if not self.csv_path and not self.svg_path:
            raise ConfigError("no output requested: pass --csv and/or --svg")

    def write(self, stats: TrajectoryStats) -> None:
        if self.csv_path:
            write_csv(self.csv_path, stats, self.include_theory)
        if self.svg_path:
            write_svg(self.svg_path, stats, self.include_theory)

SVG_WIDTH = 880
SVG_HEIGHT = 560
SVG_MARGIN = 60

_SERIES_COLORS = {
    "alpha_mean": "#1f77b4",
    "lambda_mean": "#d62728",
    "gamma_mean": "#2ca02c",
    "theory_lambda": "#7f7f7f",
}


def _fmt(x: float) -> str:
    return format(float(x), ".9g")


def write_csv(path: str, stats: TrajectoryStats, include_theory: bool) -> None:
    """One row per step; theory_lambda cells stay empty unless requested."""
    lines = [CSV_HEADER]
    for t in range(stats.config.horizon + 1):
        theory_cell = _fmt(stats.theory.expected_infected[t]) if include_theory else ""
        lines.append(",".join([
            str(t),
            _fmt(stats.mean_susceptible[t]),
            _fmt(stats.mean_infected[t]),
            _fmt(stats.mean_isolated[t]),
            theory_cell,
        ]))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_csv(path: str) -> dict[str, np.ndarray]:
    """Parse a file written by write_csv back into per-column arrays.

    The theory_lambda array is empty when the column was not populated.
    """
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != CSV_HEADER:
            raise ValueError(f"unexpected CSV header: {header!r}")
        columns: dict[str, list[float]] = {name: [] for name in header.split(",")}
        for line in fh:
            cells = line.rstrip("\n").split(",")
            for name, cell in zip(columns, cells):
                if cell != "":
                    columns[name].append(float(cell))
    return {name: np.asarray(values) for name, values in columns.items()}


def _svg_series(stats: TrajectoryStats, include_theory: bool) -> list[tuple[str, np.ndarray]]:
    series = [
        ("alpha_mean", stats.mean_susceptible),
        ("lambda_mean", stats.mean_infected),
        ("gamma_mean", stats.mean_isolated),
    ]
    if include_theory:
        series.append(("theory_lambda", stats.theory.expected_infected))
    return series


def write_svg(path: str, stats: TrajectoryStats, include_theory: bool) -> None:
    """Minimal SVG 1.1 line plot: one polyline per series plus axes and a legend."""
    horizon = stats.config.horizon
    n = stats.config.n
    plot_w = SVG_WIDTH - 2 * SVG_MARGIN
    plot_h = SVG_HEIGHT - 2 * SVG_MARGIN

    def sx(t: float) -> float:
        return SVG_MARGIN + plot_w * (t / max(horizon, 1))

    def sy(v: float) -> float:
        return SVG_MARGIN + plot_h * (1.0 - v / n)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{SVG_WIDTH}" height="{SVG_HEIGHT}" '
        f'viewBox="0 0 {SVG_WIDTH} {SVG_HEIGHT}">',
        f'<rect width="{SVG_WIDTH}" height="{SVG_HEIGHT}" fill="white"/>',
        # axes
        f'<line x1="{SVG_MARGIN}" y1="{sy(0):.2f}" x2="{SVG_WIDTH - SVG_MARGIN}" '
        f'y2="{sy(0):.2f}" stroke="black"/>',
        f'<line x1="{SVG_MARGIN}" y1="{sy(0):.2f}" x2="{SVG_MARGIN}" '
        f'y2="{SVG_MARGIN}" stroke="black"/>',
        f'<text x="{SVG_WIDTH / 2:.0f}" y="{SVG_HEIGHT - 15}" text-anchor="middle" '
        f'font-size="14">time step</text>',
        f'<text x="18" y="{SVG_HEIGHT / 2:.0f}" text-anchor="middle" font-size="14" '
        f'transform="rotate(-90 18 {SVG_HEIGHT / 2:.0f})">individuals</text>',
    ]
    for i in range(6):
        t_tick = horizon * i / 5
        v_tick = n * i / 5
        parts.append(f'<text x="{sx(t_tick):.2f}" y="{sy(0) + 20:.2f}" text-anchor="middle" '
                     f'font-size="12">{t_tick:.0f}</text>')
        parts.append(f'<text x="{SVG_MARGIN - 8}" y="{sy(v_tick) + 4:.2f}" text-anchor="end" '
                     f'font-size="12">{v_tick:.0f}</text>')
    legend_y = SVG_MARGIN + 10
    for name, values in _svg_series(stats, include_theory):
        color = _SERIES_COLORS[name]
        points = " ".join(f"{sx(t):.2f},{sy(v):.2f}" for t, v in enumerate(values))
        parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
                     f'points="{points}"/>')
        parts.append(f'<line x1="{SVG_WIDTH - 220}" y1="{legend_y}" x2="{SVG_WIDTH - 190}" '
                     f'y2="{legend_y}" stroke="{color}" stroke-width="1.5"/>')
        parts.append(f'<text x="{SVG_WIDTH - 182}" y="{legend_y + 4}" font-size="12">'
                     f'{name}</text>')
        legend_y += 18
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(parts) + "\n")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sirpool",
        description="Simulate capacity-limited testing policies on a discrete-time "
                    "susceptible/infected/isolated epidemic and export the averaged "
                    "trajectories.",
    )
    parser.add_argument("--n", type=int, default=1000, help="population size")
    parser.add_argument("--capacity", type=int, default=30, help="tests per time step")
    parser.add_argument("--p", type=float, default=0.2, help="initial infection probability")
    parser.add_argument("--q", type=float, default=1e-5,
                        help="per-pair transmission probability per step")
    parser.add_argument("--horizon", type=int, default=500, help="time steps per trial")
    parser.add_argument("--trials", type=int, default=1000, help="Monte Carlo repetitions")
    parser.add_argument("--seed", type=int, default=0, help="base RNG seed")
    parser.add_argument("--policy", choices=POLICIES, default="individual",
                        help="test planning policy")
    parser.add_argument("--epsilon", type=float, default=1.0,
                        help="infected-count threshold for reported control times")
    parser.add_argument("--csv", metavar="PATH", help="write per-step trajectory CSV here")
    parser.add_argument("--svg", metavar="PATH", help="write an SVG line plot here")
    parser.add_argument("--theory", action="store_true",
                        help="include the expected-trajectory overlay in the outputs")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    outputs = OutputSpec(csv_path=args.csv, svg_path=args.svg, include_theory=args.theory)
    cfg = SimConfig(n=args.n, capacity=args.capacity, p=args.p, q=args.q,
                    horizon=args.horizon, trials=args.trials, seed=args.seed,
                    policy=args.policy, epsilon=args.epsilon)
    try:
        outputs.validate()
        cfg.validate()
    except ConfigError as exc:
        parser.error(str(exc))

    stats = run_experiment(cfg)

    try:
        outputs.write(stats)
    except OSError as exc:
        print(f"error: cannot write output file: {exc}", file=sys.stderr)
        return 1

    reached = empirical_epsilon_time(stats, cfg.epsilon)
    if reached is None:
        print(f"mean infected count stays above epsilon={cfg.epsilon:g} "
              f"within horizon={cfg.horizon}")
    else:
        print(f"mean infected count reaches epsilon={cfg.epsilon:g} at step {reached}")
    if cfg.policy == "individual":
        params = TheoryParams.from_config(cfg)
        try:
            print(f"closed-form epsilon control time: "
                  f"{epsilon_control_time(params, cfg.epsilon):.2f}")
        except ValueError:
            pass
    done = ~stats.control_censored
    if done.any():
        print(f"trials with zero circulating infections by step {cfg.horizon}: "
              f"{int(done.sum())}/{cfg.trials} "
              f"(mean control time {stats.control_time[done].mean():.1f})")
    else:
        print(f"no trial reached zero circulating infections within horizon={cfg.horizon}")
    if args.csv:
        print(f"wrote {args.csv}")
    if args.svg:
        print(f"wrote {args.svg}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
