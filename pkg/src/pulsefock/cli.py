"""Command-line entry point.

    pulsefock single-bs CONFIG [--output-dir DIR]
    pulsefock hom-sweep CONFIG [--output-dir DIR]
    pulsefock verify    CONFIG [--output-dir DIR]

Exit status: 0 on success, 1 for a bad config or bad arguments, 2 when a run
fails (the error class name is printed) or a verification check misses its
tolerance. The output directory is taken from ``--output-dir``, then
``PULSEFOCK_OUT``, then ``output.directory``.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from pathlib import Path

from .config import ScenarioConfig, load_config
from .errors import ConfigError, PulseFockError
from .scenarios import build_setup, run_hom_sweep, run_single_bs, snapshots
from .verify import run_all

ENV_OUT = "PULSEFOCK_OUT"
EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2


def fmt(x: float) -> str:
    return format(float(x), ".17g")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pulsefock", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, help_text in (
        ("single-bs", "one photon through a beam splitter"),
        ("hom-sweep", "two-photon coincidences versus delay"),
        ("verify", "run the numerical self-checks"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("config", type=Path)
        p.add_argument("--output-dir", type=Path, default=None)
    return parser


def _output_dir(args, cfg: ScenarioConfig) -> Path:
    if args.output_dir is not None:
        return args.output_dir
    env = os.environ.get(ENV_OUT)
    if env:
        return Path(env)
    return Path(cfg.output.directory)


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def cmd_single_bs(cfg: ScenarioConfig, out: Path) -> int:
    setup = build_setup(cfg)
    res = run_single_bs(setup)
    _write_csv(
        out / "single_bs.csv",
        ["p_detector_x", "p_detector_y", "comm_RR", "comm_TT", "comm_RT"],
        [[fmt(res.p_detector_x), fmt(res.p_detector_y)]
         + [fmt(v.real) for v in (res.comm_RR, res.comm_TT, res.comm_RT)]],
    )
    x = setup.grid.x
    for (rail, t), samples in snapshots(setup, cfg.output.snapshot_times).items():
        _write_csv(
            out / f"snapshot_{rail}_{fmt(t)}.csv",
            ["x", "re", "im", "abs2"],
            ([fmt(xi), fmt(s.real), fmt(s.imag), fmt(abs(s) ** 2)] for xi, s in zip(x, samples)),
        )
    print(f"p_detector_x={fmt(res.p_detector_x)} p_detector_y={fmt(res.p_detector_y)}")
    return EXIT_OK


def cmd_hom_sweep(cfg: ScenarioConfig, out: Path) -> int:
    delays = cfg.sweep.delays
    if not delays:
        raise ConfigError("sweep.delays: hom-sweep needs at least one delay")
    setup = build_setup(cfg)
    reports = run_hom_sweep(setup, delays)
    rows = [
        [fmt(d), fmt(r.overlap.real), fmt(r.overlap.imag), fmt(r.p_double_x), fmt(r.p_double_y),
         fmt(r.p_coincidence)]
        for d, r in zip(delays, reports)
    ]
    _write_csv(
        out / "hom_sweep.csv",
        ["delay", "overlap_re", "overlap_im", "p_xx", "p_yy", "p_coincidence"],
        rows,
    )
    print(f"{len(rows)} delays written to {out / 'hom_sweep.csv'}")
    return EXIT_OK


def cmd_verify(cfg: ScenarioConfig, out: Path) -> int:
    results = run_all(build_setup(cfg))
    _write_csv(
        out / "verify.csv",
        ["check", "residual", "tolerance", "passed"],
        [[r.name, fmt(r.residual), fmt(r.tolerance), str(r.passed).lower()] for r in results],
    )
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status} {r.name}: residual {r.residual:.3e} (tol {r.tolerance:.0e})")
    return EXIT_OK if all(r.passed for r in results) else EXIT_RUNTIME


COMMANDS = {
    "single-bs": ("single_bs", cmd_single_bs),
    "hom-sweep": ("hom_sweep", cmd_hom_sweep),
    "verify": ("verify", cmd_verify),
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    kind, handler = COMMANDS[args.command]
    try:
        cfg = load_config(args.config)
        if cfg.scenario.kind and cfg.scenario.kind != kind:
            raise ConfigError(
                f"scenario.kind is {cfg.scenario.kind!r} but the subcommand is {args.command!r}"
            )
        out = _output_dir(args, cfg)
        try:
            out.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise ConfigError(f"output.directory: cannot create {out}: {exc}") from None
        return handler(cfg, out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (PulseFockError, ValueError, ArithmeticError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
