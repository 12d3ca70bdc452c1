"""Parameter sweeps over up to two axes, evaluated in a thread pool."""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable

import numpy as np
import psweep as ps

from .. import correlations, fidelity, photon_statistics, quadratures
from ..errors import ParameterError
from ..propagation import (
    EtaResult,
    LossChannel,
    eta_of_length,
    get_preset,
    resolve_eta,
)
from ..pulses import PacStateSpec, envelope_integral
from ..settings import thread_count
from .export import Table

DEFAULT_NMAX = 12


class Quantity(Enum):
    PN = "pn"
    MEAN_VAR = "mean_var"
    G2GRID = "g2grid"
    G2ZERO = "g2zero"
    QUAD_DEPTH = "quad_depth"
    FIDELITY = "fidelity"
    ETA = "eta"


STATE_AXES = ("tau", "omega1", "n_alpha", "eta", "L")
TIME_AXES = ("t1", "t2")


@dataclass(frozen=True)
class Axis:
    name: str
    start: float
    stop: float
    step: float

    def __post_init__(self) -> None:
        if not self.step > 0:
            raise ParameterError(f"axis {self.name}: step must be positive")
        if self.stop < self.start:
            raise ParameterError(f"axis {self.name}: empty range")

    def values(self) -> list[float]:
        count = int(math.floor((self.stop - self.start) / self.step + 1e-9))
        return [
            float(np.round(self.start + k * self.step, 12))
            for k in range(count + 1)
        ]


@dataclass(frozen=True)
class SweepSpec:
    quantity: Quantity
    axes: tuple[Axis, ...]
    n_alpha: float = 3.0
    tau: float = 0.0
    omega1: float = 1.0
    omega0: float | None = None
    eta: float | None = None
    preset: str | None = None
    length: float | None = None
    exponent_scale: float = 1.0
    n_max: int = DEFAULT_NMAX
    presets: dict[str, LossChannel] | None = field(
        default=None, compare=False,
    )

    def __post_init__(self) -> None:
        names = [axis.name for axis in self.axes]
        if not 1 <= len(names) <= 2:
            raise ParameterError("a sweep takes one or two axes")
        if len(set(names)) != len(names):
            raise ParameterError(f"repeated sweep axis in {names}")
        allowed: tuple[str, ...]
        if self.quantity is Quantity.G2GRID:
            allowed = (*TIME_AXES, *STATE_AXES)
        elif self.quantity is Quantity.ETA:
            allowed = ("L",)
        else:
            allowed = STATE_AXES
        for name in names:
            if name not in allowed:
                raise ParameterError(
                    f"axis {name!r} not allowed for {self.quantity.value}, "
                    f"choose from {list(allowed)}"
                )
        if "L" in names and self.preset is None:
            raise ParameterError("an L axis needs a loss preset")
        if "eta" in names and self.preset is not None:
            raise ParameterError("sweep either eta or a preset length")


Point = dict[str, float]
Row = tuple[Any, ...]


def sweep_points(spec: SweepSpec) -> list[Point]:
    """Grid points, first axis major."""
    plists = [ps.plist(axis.name, axis.values()) for axis in spec.axes]
    return ps.pgrid(plists)


def _state(spec: SweepSpec, point: Point) -> PacStateSpec:
    return PacStateSpec(
        n_alpha=point.get("n_alpha", spec.n_alpha),
        omega1=point.get("omega1", spec.omega1),
        tau=point.get("tau", spec.tau),
        omega0=spec.omega0,
        exponent_scale=spec.exponent_scale,
    )


def _loss(
    spec: SweepSpec,
    point: Point,
    state: PacStateSpec,
) -> EtaResult:
    assert state.omega0 is not None
    return resolve_eta(
        eta=point.get("eta", spec.eta),
        preset=spec.preset,
        length=point.get("L", spec.length),
        table=spec.presets,
        omega0=state.omega0,
    )


def _pn_rows(spec: SweepSpec, point: Point) -> list[Row]:
    state = _state(spec, point)
    eta = _loss(spec, point, state).magnitude
    return [
        (n, photon_statistics.pac_pn_lossy(state, n, eta))
        for n in range(spec.n_max + 1)
    ]


def _mean_var_rows(spec: SweepSpec, point: Point) -> list[Row]:
    state = _state(spec, point)
    eta = _loss(spec, point, state).magnitude
    mean, variance = photon_statistics.pac_mean_variance(state, eta)
    ratio = variance / mean if mean else math.nan
    _, fock_variance = photon_statistics.fock_mean_variance(1, eta)
    fock_ratio = fock_variance / eta if eta else math.nan
    return [(mean, variance, ratio, 1.0, fock_ratio)]


def _g2grid_rows(spec: SweepSpec, point: Point) -> list[Row]:
    state = _state(spec, point)
    loss = _loss(spec, point, state)
    t1 = point.get("t1", 0.0) - loss.retarded_shift
    t2 = point.get("t2", 0.0) - loss.retarded_shift
    return [(float(correlations.pac_g2(state, t1, t2)),)]


def _g2zero_rows(spec: SweepSpec, point: Point) -> list[Row]:
    state = _state(spec, point)
    return [(correlations.g2_zero(state), correlations.coherent_g2(), 0.0)]


def _quad_depth_rows(spec: SweepSpec, point: Point) -> list[Row]:
    state = _state(spec, point)
    loss = _loss(spec, point, state)
    window = quadratures.default_window(state)
    result = quadratures.lossy_quadrature(state, window, loss)
    out_of_phase = quadratures.lossy_quadrature(
        state,
        window.with_phase(quadratures.PhaseChoice.THETA_PLUS_HALF_PI),
        loss,
    )
    photon = envelope_integral(
        state.photon, window.start, window.stop, state.tau,
    )
    single_photon = loss.magnitude * 0.5 * photon**2
    return [(
        result.squeezing_depth,
        result.variance,
        result.baseline,
        out_of_phase.squeezing_depth,
        single_photon,
    )]


def _fidelity_rows(spec: SweepSpec, point: Point) -> list[Row]:
    state = _state(spec, point)
    loss = _loss(spec, point, state)
    eta = loss.magnitude
    value = fidelity.fidelity_lossy(state, eta).value
    depth = quadratures.lossy_quadrature(
        state, quadratures.default_window(state), loss,
    ).squeezing_depth
    return [(
        value,
        photon_statistics.variance_to_mean(state, eta),
        correlations.g2_zero(state),
        depth,
    )]


def _eta_rows(spec: SweepSpec, point: Point) -> list[Row]:
    assert spec.preset is not None
    channel = get_preset(spec.preset, spec.presets)
    result = eta_of_length(channel, point["L"])
    return [(result.magnitude, result.phase, result.retarded_shift)]


Evaluator = Callable[[SweepSpec, Point], list[Row]]

EVALUATORS: dict[Quantity, tuple[list[str], Evaluator]] = {
    Quantity.PN: (["n", "p_n"], _pn_rows),
    Quantity.MEAN_VAR: (
        ["mean", "variance", "ratio", "coherent_ratio", "fock1_ratio"],
        _mean_var_rows,
    ),
    Quantity.G2GRID: (["g2"], _g2grid_rows),
    Quantity.G2ZERO: (
        ["g2zero", "coherent_g2zero", "fock1_g2zero"], _g2zero_rows,
    ),
    Quantity.QUAD_DEPTH: (
        [
            "depth",
            "variance",
            "baseline",
            "out_of_phase_depth",
            "single_photon_depth",
        ],
        _quad_depth_rows,
    ),
    Quantity.FIDELITY: (
        ["fidelity", "ratio", "g2zero", "depth"], _fidelity_rows,
    ),
    Quantity.ETA: (["eta", "phase", "retarded_shift"], _eta_rows),
}


def run_sweep(spec: SweepSpec) -> Table:
    """Evaluate every grid point; rows come out in grid order."""
    logger = logging.getLogger("pacstate.sweep")
    columns, evaluate = EVALUATORS[spec.quantity]
    points = sweep_points(spec)
    logger.info(
        f"Sweeping {spec.quantity.value} over {len(points)} points"
    )
    with ThreadPoolExecutor(max_workers=thread_count()) as pool:
        results = list(pool.map(lambda p: evaluate(spec, p), points))
    names = [axis.name for axis in spec.axes]
    table = Table(
        columns=[*names, *columns],
        meta=sweep_meta(spec),
    )
    for point, rows in zip(points, results):
        prefix = tuple(point[name] for name in names)
        table.rows.extend(prefix + row for row in rows)
    logger.info(f"Sweep finished with {len(table.rows)} rows")
    return table


def sweep_meta(spec: SweepSpec) -> dict[str, Any]:
    return {
        "quantity": spec.quantity.value,
        "axes": [
            [axis.name, axis.start, axis.stop, axis.step]
            for axis in spec.axes
        ],
        "n_alpha": spec.n_alpha,
        "tau": spec.tau,
        "omega1": spec.omega1,
        "omega0": spec.omega0,
        "eta": spec.eta,
        "preset": spec.preset,
        "L": spec.length,
        "exponent_scale": spec.exponent_scale,
    }
