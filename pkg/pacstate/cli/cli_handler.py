import argparse
import json
import logging
import math
import sys
from pathlib import Path
from typing import Any, Callable

from .. import (
    correlations,
    fidelity,
    oracle,
    photon_statistics,
    propagation,
    quadratures,
)
from ..errors import ParameterError, UnknownPreset
from ..pulses import PacStateSpec
from .export import FORMATS, GridTable, Table, write_document, write_result
from .sweep import Axis, Quantity, SweepSpec, run_sweep

DEFAULT_ETAS = (1.0, 0.75, 0.5, 0.25, 0.0)
PRESET_ETAS = (0.75, 0.5, 0.25)
EXIT_FAILURE = 1
EXIT_USAGE = 2

Handler = Callable[[argparse.Namespace], Table | GridTable]


def _presets_table(
    args: argparse.Namespace,
) -> dict[str, propagation.LossChannel]:
    if args.presets_config is None:
        return dict(propagation.PRESETS)
    return propagation.load_presets(args.presets_config)


def _state(args: argparse.Namespace) -> PacStateSpec:
    return PacStateSpec(
        n_alpha=args.nalpha,
        omega1=args.omega1,
        tau=args.tau,
        omega0=args.omega0,
        exponent_scale=args.exponent_scale,
    )


def _loss(
    args: argparse.Namespace,
    omega0: float = 0.0,
) -> propagation.EtaResult:
    eta = args.eta[0] if isinstance(args.eta, list) else args.eta
    length = args.L[0] if isinstance(args.L, list) else args.L
    return propagation.resolve_eta(
        eta=eta,
        preset=args.preset,
        length=length,
        table=_presets_table(args),
        omega0=omega0,
    )


def _requested_losses(
    args: argparse.Namespace,
) -> list[tuple[float, float | None]]:
    """(|eta|, L) pairs from --eta values or a preset with --L values."""
    if args.preset is not None:
        if args.eta is not None:
            raise ParameterError("give either --eta or --preset with --L")
        if not args.L:
            raise ParameterError("--preset needs at least one --L")
        channel = propagation.get_preset(args.preset, _presets_table(args))
        return [
            (propagation.eta_of_length(channel, length).magnitude, length)
            for length in args.L
        ]
    etas = args.eta if args.eta is not None else list(DEFAULT_ETAS)
    return [
        (photon_statistics.check_eta(eta), None) for eta in etas
    ]


def pnum_handler(args: argparse.Namespace) -> Table:
    table = Table(
        columns=["eta", "L", "n", "p_n", "mean", "variance"],
        meta={"state": args.state},
    )
    for eta, length in _requested_losses(args):
        if args.state == "pac":
            distribution = photon_statistics.pac_distribution(
                _state(args), eta,
            )
        elif args.state == "coherent":
            distribution = photon_statistics.coherent_distribution(
                args.nalpha, eta,
            )
        else:
            distribution = photon_statistics.fock_distribution(args.m, eta)
        last = distribution.n_max if args.nmax is None else args.nmax
        for n in range(last + 1):
            p_n = (
                float(distribution.probabilities[n])
                if n <= distribution.n_max else 0.0
            )
            table.rows.append((
                eta,
                math.nan if length is None else length,
                n,
                p_n,
                distribution.mean,
                distribution.variance,
            ))
        table.meta.setdefault("tail_bounds", []).append(
            distribution.tail_bound
        )
    return table


def _axes(raw: list[list[str]] | None) -> tuple[Axis, ...]:
    if not raw:
        raise ParameterError("a sweep needs at least one --axis")
    axes = []
    for name, start, stop, step in raw:
        axes.append(Axis(name, float(start), float(stop), float(step)))
    return tuple(axes)


def sweep_handler(args: argparse.Namespace) -> Table:
    eta = args.eta[0] if args.eta else None
    length = args.L[0] if args.L else None
    spec = SweepSpec(
        quantity=Quantity(args.quantity),
        axes=_axes(args.axis),
        n_alpha=args.nalpha,
        tau=args.tau,
        omega1=args.omega1,
        omega0=args.omega0,
        eta=eta,
        preset=args.preset,
        length=length,
        exponent_scale=args.exponent_scale,
        n_max=args.nmax if args.nmax is not None else 12,
        presets=_presets_table(args),
    )
    return run_sweep(spec)


def g2grid_handler(args: argparse.Namespace) -> GridTable:
    state = _state(args)
    assert state.omega0 is not None
    loss = _loss(args, state.omega0) if (args.eta or args.preset) else None
    grid = correlations.g2_grid(
        state, args.t_min, args.t_max, args.resolution, loss,
    )
    return GridTable(
        axis_names=("t1", "t2"),
        first_axis=grid.t1_axis,
        second_axis=grid.t2_axis,
        values=grid.values,
        meta={
            "n_alpha": state.n_alpha,
            "tau": state.tau,
            "omega1": state.omega1,
            "eta": 1.0 if loss is None else loss.magnitude,
            "g2zero": correlations.g2_zero(state),
        },
    )


def _window(
    args: argparse.Namespace,
    state: PacStateSpec,
) -> quadratures.QuadratureWindow:
    choice = quadratures.PhaseChoice(args.phase)
    offset = args.phase_offset
    if offset:
        choice = quadratures.PhaseChoice.CUSTOM
    if args.start is None and args.duration is None:
        return quadratures.default_window(state, choice, offset)
    if args.start is None or args.duration is None:
        raise ParameterError("give both --start and --duration")
    return quadratures.QuadratureWindow(
        args.start, args.duration, choice, offset,
    )


def quad_handler(args: argparse.Namespace) -> Table:
    state = _state(args)
    window = _window(args, state)
    assert state.omega0 is not None
    loss = _loss(args, state.omega0)
    if args.state == "pac":
        result = quadratures.lossy_quadrature(state, window, loss)
    elif args.state == "fock":
        result = quadratures.apply_loss(
            quadratures.fock_quadrature_variance(args.m, state.photon, window),
            loss,
        )
    else:
        result = quadratures.apply_loss(
            quadratures.coherent_quadrature(state.coherent, window), loss,
        )
    return Table(
        columns=[
            "start",
            "duration",
            "phase_offset",
            "eta",
            "mean",
            "variance",
            "baseline",
            "depth",
            "squeezed",
            "lab_start",
            "lo_phase",
        ],
        rows=[(
            window.start,
            window.duration,
            window.offset,
            result.eta,
            result.mean,
            result.variance,
            result.baseline,
            result.squeezing_depth,
            result.squeezed,
            result.lab_start,
            result.lo_phase_offset,
        )],
        meta={"state": args.state},
    )


def fidelity_handler(args: argparse.Namespace) -> Table:
    state = _state(args)
    assert state.omega0 is not None
    loss = _loss(args, state.omega0)
    result = fidelity.fidelity_lossy(state, loss.magnitude)
    return Table(
        columns=["eta", "fidelity", "sigma_sq", "norm", "n_alpha"],
        rows=[(
            result.eta,
            result.value,
            result.sigma_sq,
            result.norm,
            result.n_alpha,
        )],
        meta={"note": result.note} if result.note else {},
    )


def oracle_handler(args: argparse.Namespace) -> Table:
    grid = oracle.OracleGrid(exponent_scale=args.exponent_scale)
    if args.quick:
        grid = oracle.OracleGrid(
            taus=(0.0, 1.0, 5.0),
            omega1s=(0.2, 1.0, 5.0),
            n_alphas=(1.0, 3.0),
            exponent_scale=args.exponent_scale,
        )
    reports = oracle.run_full_suite(grid, args.tolerance)
    if args.report is not None:
        write_document(
            {
                "tolerance": args.tolerance,
                "passed": oracle.suite_passed(reports),
                "reports": [report.as_dict() for report in reports],
            },
            args.report,
        )
    table = Table(
        columns=[
            "label",
            "closed_form",
            "quadrature",
            "abs_error",
            "rel_error",
            "passed",
        ],
        rows=[
            (
                report.label,
                report.closed_form,
                report.quadrature,
                report.abs_error,
                report.rel_error,
                report.passed,
            )
            for report in reports
        ],
        meta={"passed": oracle.suite_passed(reports)},
    )
    return table


def presets_handler(args: argparse.Namespace) -> Table:
    table = Table(
        columns=[
            "label",
            "k_i",
            "k_r",
            "v_g",
            *(f"L_eta_{eta:g}" for eta in PRESET_ETAS),
        ],
    )
    for channel in _presets_table(args).values():
        lengths = []
        for eta in PRESET_ETAS:
            try:
                lengths.append(propagation.length_for_eta(channel, eta))
            except ParameterError:
                lengths.append(math.inf)
        table.rows.append((
            channel.label,
            channel.k_i,
            math.nan if channel.k_r is None else channel.k_r,
            channel.v_g,
            *lengths,
        ))
    return table


def scenario_arguments(scenario: dict[str, Any]) -> list[str]:
    """Command line equivalent of a scenario file."""
    try:
        argv = [str(scenario["command"])]
        options = scenario.get("arguments", {})
    except (KeyError, TypeError):
        raise ParameterError("a scenario needs a command and arguments")
    for name, value in options.items():
        flag = f"--{name.replace('_', '-')}" if name != "L" else "--L"
        if isinstance(value, bool):
            if value:
                argv.append(flag)
        elif isinstance(value, list) and value and isinstance(value[0], list):
            for group in value:
                argv += [flag, *(str(item) for item in group)]
        elif isinstance(value, list):
            argv += [flag, *(str(item) for item in value)]
        else:
            argv += [flag, str(value)]
    return argv


def load_scenario(path: Path | str) -> list[str]:
    with open(path) as stream:
        return scenario_arguments(json.load(stream))


def _add_state_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--nalpha", type=float, default=3.0)
    parser.add_argument("--tau", type=float, default=0.0)
    parser.add_argument("--omega1", type=float, default=1.0)
    parser.add_argument("--omega0", type=float, default=None)
    parser.add_argument("--exponent-scale", type=float, default=1.0)


def _add_loss_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--eta", type=float, nargs="+", default=None)
    parser.add_argument("--preset", default=None)
    parser.add_argument("--L", type=float, nargs="+", default=None)


def build_parser() -> argparse.ArgumentParser:
    output = argparse.ArgumentParser(add_help=False)
    output.add_argument("--output", default=None)
    output.add_argument("--format", choices=FORMATS, default="csv")
    output.add_argument("--presets-config", default=None)

    parser = argparse.ArgumentParser(
        prog="pacstate",
        description="Photon-added coherent state pulse calculator",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    commands = parser.add_subparsers(dest="command", required=True)

    pnum = commands.add_parser("pnum", parents=[output])
    pnum.add_argument(
        "--state", choices=("pac", "coherent", "fock"), default="pac",
    )
    pnum.add_argument("--m", type=int, default=1)
    pnum.add_argument("--nmax", type=int, default=None)
    _add_state_options(pnum)
    _add_loss_options(pnum)
    pnum.set_defaults(handler=pnum_handler)

    sweep = commands.add_parser("sweep", parents=[output])
    sweep.add_argument(
        "--quantity", choices=[q.value for q in Quantity], required=True,
    )
    sweep.add_argument(
        "--axis",
        nargs=4,
        action="append",
        metavar=("NAME", "START", "STOP", "STEP"),
    )
    sweep.add_argument("--nmax", type=int, default=None)
    _add_state_options(sweep)
    _add_loss_options(sweep)
    sweep.set_defaults(handler=sweep_handler)

    g2grid = commands.add_parser("g2grid", parents=[output])
    g2grid.add_argument("--t-min", type=float, default=-5.0)
    g2grid.add_argument("--t-max", type=float, default=8.0)
    g2grid.add_argument("--resolution", type=int, default=201)
    _add_state_options(g2grid)
    _add_loss_options(g2grid)
    g2grid.set_defaults(handler=g2grid_handler)

    quad = commands.add_parser("quad", parents=[output])
    quad.add_argument(
        "--state", choices=("pac", "coherent", "fock"), default="pac",
    )
    quad.add_argument("--m", type=int, default=1)
    quad.add_argument(
        "--phase",
        choices=[
            quadratures.PhaseChoice.THETA.value,
            quadratures.PhaseChoice.THETA_PLUS_HALF_PI.value,
        ],
        default=quadratures.PhaseChoice.THETA.value,
    )
    quad.add_argument("--phase-offset", type=float, default=0.0)
    quad.add_argument("--start", type=float, default=None)
    quad.add_argument("--duration", type=float, default=None)
    _add_state_options(quad)
    _add_loss_options(quad)
    quad.set_defaults(handler=quad_handler)

    fid = commands.add_parser("fidelity", parents=[output])
    _add_state_options(fid)
    _add_loss_options(fid)
    fid.set_defaults(handler=fidelity_handler)

    check = commands.add_parser("oracle", parents=[output])
    check.add_argument(
        "--tolerance", type=float, default=oracle.DEFAULT_TOLERANCE,
    )
    check.add_argument("--report", default=None)
    check.add_argument("--quick", action="store_true")
    check.add_argument("--exponent-scale", type=float, default=1.0)
    check.set_defaults(handler=oracle_handler)

    table = commands.add_parser("presets", parents=[output])
    table.set_defaults(handler=presets_handler)

    scenario = commands.add_parser("scenario")
    scenario.add_argument("path")
    scenario.set_defaults(handler=None)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(format="%(levelname)s %(name)s: %(message)s")
    logging.getLogger("pacstate").setLevel(
        logging.DEBUG if args.verbose else logging.WARNING
    )
    if args.command == "scenario":
        try:
            scenario_argv = load_scenario(args.path)
        except (OSError, ValueError) as err:
            parser.error(str(err))
        if scenario_argv[0] == "scenario":
            parser.error("a scenario cannot run another scenario")
        extra = ["--verbose"] if args.verbose else []
        return main(extra + scenario_argv)
    handler: Handler = args.handler
    try:
        result = handler(args)
    except (ParameterError, UnknownPreset) as err:
        message = err.args[0] if err.args else str(err)
        print(f"{parser.prog}: error: {message}", file=sys.stderr)
        return EXIT_USAGE
    write_result(result, args.output, args.format)
    if args.command == "oracle" and not result.meta.get("passed", False):
        return EXIT_FAILURE
    return 0

