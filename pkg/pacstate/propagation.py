import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from .errors import (
    InfiniteLengthError,
    NoLossError,
    ParameterError,
    UnknownPreset,
)

MICROMETRES_PER_KILOMETRE = 1e9

logger = logging.getLogger("pacstate.propagation")


@dataclass(frozen=True)
class LossChannel:
    """Narrowband travelling-wave loss channel.

    Lengths are in micrometres and ``k_i``/``k_r`` in inverse micrometres.
    ``k_r = None`` stands for a phase-matched guide, for which the loss
    phase vanishes.
    """
    label: str
    k_i: float
    k_r: float | None = None
    v_g: float = 1.0

    def __post_init__(self) -> None:
        if self.k_i < 0:
            raise ParameterError(f"{self.label}: k_i must be >= 0")
        if self.v_g <= 0:
            raise ParameterError(f"{self.label}: v_g must be positive")


@dataclass(frozen=True)
class EtaResult:
    magnitude: float
    phase: float
    retarded_shift: float


PRESETS: dict[str, LossChannel] = {
    "nanowire": LossChannel("nanowire", k_i=1 / 1.2),
    "stripe": LossChannel("stripe", k_i=1 / 15),
    "fibre": LossChannel("fibre", k_i=1e-10),
}


def presets() -> list[LossChannel]:
    return list(PRESETS.values())


def get_preset(
    label: str,
    table: dict[str, LossChannel] | None = None,
) -> LossChannel:
    table = PRESETS if table is None else table
    try:
        return table[label]
    except KeyError:
        raise UnknownPreset(
            f"unknown loss preset {label!r}, choose from {sorted(table)}"
        )


def load_presets(path: Path | str) -> dict[str, LossChannel]:
    """Built-in presets updated with the entries of a JSON file.

    The file holds a list of objects with ``label`` and ``k_i`` and,
    optionally, ``k_r`` and ``v_g``.
    """
    with open(path) as stream:
        entries: Any = json.load(stream)
    if not isinstance(entries, list):
        raise ParameterError(f"{path}: expected a list of preset objects")
    table = dict(PRESETS)
    for entry in entries:
        try:
            channel = LossChannel(
                label=str(entry["label"]),
                k_i=float(entry["k_i"]),
                k_r=None if entry.get("k_r") is None else float(entry["k_r"]),
                v_g=float(entry.get("v_g", 1.0)),
            )
        except (KeyError, TypeError) as err:
            raise ParameterError(f"{path}: malformed preset {entry!r}: {err}")
        if channel.label in table:
            logger.info(f"Overriding preset {channel.label}")
        table[channel.label] = channel
    return table


def eta_of_length(
    channel: LossChannel,
    length: float,
    omega0: float = 0.0,
) -> EtaResult:
    if length < 0:
        raise ParameterError(f"length must be >= 0, got {length}")
    retarded_shift = length / channel.v_g
    if channel.k_r is None:
        phase = 0.0
    else:
        phase = 2 * (channel.k_r * length - omega0 * retarded_shift)
    return EtaResult(
        magnitude=math.exp(-channel.k_i * length),
        phase=phase,
        retarded_shift=retarded_shift,
    )


def length_for_eta(channel: LossChannel, target_eta: float) -> float:
    if not 0 <= target_eta <= 1:
        raise ParameterError(f"eta must lie in [0, 1], got {target_eta}")
    if target_eta == 0:
        raise InfiniteLengthError("eta = 0 needs an infinitely long guide")
    if target_eta == 1:
        return 0.0
    if channel.k_i == 0:
        raise NoLossError(f"{channel.label} has no loss, eta stays at 1")
    return -math.log(target_eta) / channel.k_i


def eta_curve(channel: LossChannel, lengths: Any) -> np.ndarray:
    """|eta| along an array of lengths."""
    lengths = np.asarray(lengths, dtype=float)
    if np.any(lengths < 0):
        raise ParameterError("lengths must be >= 0")
    return np.exp(-channel.k_i * lengths)


def resolve_eta(
    eta: float | None = None,
    preset: str | None = None,
    length: float | None = None,
    table: dict[str, LossChannel] | None = None,
    omega0: float = 0.0,
) -> EtaResult:
    """Loss factor from an explicit |eta| or from a preset and a length."""
    if eta is not None and preset is not None:
        raise ParameterError("give either eta or a preset with a length")
    if preset is not None:
        if length is None:
            raise ParameterError("a preset needs a length")
        return eta_of_length(get_preset(preset, table), length, omega0)
    if eta is None:
        eta = 1.0
    if not 0 <= eta <= 1:
        raise ParameterError(f"eta must lie in [0, 1], got {eta}")
    return EtaResult(magnitude=eta, phase=0.0, retarded_shift=0.0)
