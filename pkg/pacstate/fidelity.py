import logging
import math
from dataclasses import dataclass

from .errors import ParameterError, UndefinedReferenceState
from .pulses import PacStateSpec


@dataclass(frozen=True)
class FidelityResult:
    """Squared overlap with the ideal PAC state.

    The ideal state adds the photon in the profile alpha / sqrt(n_alpha).
    """
    value: float
    eta: float
    sigma_sq: float
    norm: float
    n_alpha: float
    note: str = ""


def _check_reference(spec: PacStateSpec) -> None:
    if spec.n_alpha <= 0:
        raise UndefinedReferenceState(
            "the ideal PAC state needs n_alpha > 0 to define its photon"
        )


def fidelity(spec: PacStateSpec) -> FidelityResult:
    _check_reference(spec)
    n = spec.n_alpha
    value = spec.sigma_sq * (1 + n) / (n * (1 + spec.sigma_sq))
    return FidelityResult(
        value=min(value, 1.0),
        eta=1.0,
        sigma_sq=spec.sigma_sq,
        norm=spec.norm,
        n_alpha=n,
    )


def fidelity_lossy(spec: PacStateSpec, eta: float) -> FidelityResult:
    """Fidelity after loss, the ideal state held fixed in retarded time."""
    _check_reference(spec)
    if not 0 <= eta <= 1:
        raise ParameterError(f"|eta| must lie in [0, 1], got {eta}")
    if eta == 0:
        logging.getLogger("pacstate.fidelity").info(
            "eta = 0 leaves the vacuum, fidelity set to 0"
        )
        return FidelityResult(
            value=0.0,
            eta=0.0,
            sigma_sq=spec.sigma_sq,
            norm=spec.norm,
            n_alpha=spec.n_alpha,
            note="complete loss leaves the vacuum state",
        )
    n = spec.n_alpha
    root = math.sqrt(eta)
    value = (
        eta * math.exp(-2 * n * (1 - root))
        * spec.norm / (1 + n)
        * spec.sigma_sq / n
        * (1 + root * n) ** 2
    )
    return FidelityResult(
        value=min(value, 1.0),
        eta=eta,
        sigma_sq=spec.sigma_sq,
        norm=spec.norm,
        n_alpha=n,
    )
