"""Photon flux, coincidence rate and second-order correlations.

Envelopes are written u(t) = |alpha(t)| and v(t) = |xi(t + tau)|. With
matched central frequencies every phase in the PAC flux and coincidence
rate cancels, so both are real polynomials in u and v.
"""
import logging
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .propagation import EtaResult
from .pulses import PacStateSpec, PulseProfile

DEFAULT_GRID_BOUNDS = (-5.0, 8.0)
DEFAULT_RESOLUTION = 201

logger = logging.getLogger("pacstate.correlations")


@dataclass(frozen=True)
class CorrelationGrid:
    """g2(t1, t2) on a square grid, rows along t1.

    Points where both pulses vanish identically are NaN.
    """
    t1_axis: np.ndarray
    t2_axis: np.ndarray
    values: np.ndarray
    flux: np.ndarray


def _lossy_times(t: np.ndarray, loss: EtaResult | None) -> np.ndarray:
    return t if loss is None else t - loss.retarded_shift


def _envelopes(spec: PacStateSpec, t: np.ndarray) -> tuple[np.ndarray, ...]:
    return spec.coherent.envelope(t), spec.photon.envelope(t + spec.tau)


def _flux_terms(
    spec: PacStateSpec,
    u: np.ndarray,
    v: np.ndarray,
) -> np.ndarray:
    return (
        u**2 + 2 * spec.norm * abs(spec.sigma) * u * v + spec.norm * v**2
    )


def _coincidence_terms(
    spec: PacStateSpec,
    u1: np.ndarray,
    v1: np.ndarray,
    u2: np.ndarray,
    v2: np.ndarray,
) -> np.ndarray:
    cross = v1 * u2 + v2 * u1
    return spec.norm * (
        cross**2 + 2 * abs(spec.sigma) * cross * u1 * u2
    ) + (u1 * u2) ** 2


def pac_flux(
    spec: PacStateSpec,
    t: float | np.ndarray,
    loss: EtaResult | None = None,
) -> np.ndarray:
    """Photon flux f1(t); under loss |eta| f1(t - L / v_g)."""
    t = _lossy_times(np.asarray(t, dtype=float), loss)
    flux = _flux_terms(spec, *_envelopes(spec, t))
    return flux if loss is None else loss.magnitude * flux


def pac_coincidence(
    spec: PacStateSpec,
    t1: float | np.ndarray,
    t2: float | np.ndarray,
    loss: EtaResult | None = None,
) -> np.ndarray:
    t1 = _lossy_times(np.asarray(t1, dtype=float), loss)
    t2 = _lossy_times(np.asarray(t2, dtype=float), loss)
    rate = _coincidence_terms(
        spec, *_envelopes(spec, t1), *_envelopes(spec, t2),
    )
    return rate if loss is None else loss.magnitude**2 * rate


def coherent_flux(profile: PulseProfile, t: float | np.ndarray) -> np.ndarray:
    return profile.envelope(t) ** 2


def coherent_coincidence(
    profile: PulseProfile,
    t1: float | np.ndarray,
    t2: float | np.ndarray,
) -> np.ndarray:
    return coherent_flux(profile, t1) * coherent_flux(profile, t2)


def fock_flux(
    photons: int,
    profile: PulseProfile,
    t: float | np.ndarray,
) -> np.ndarray:
    return photons * profile.envelope(t) ** 2


def fock_coincidence(
    photons: int,
    profile: PulseProfile,
    t1: float | np.ndarray,
    t2: float | np.ndarray,
) -> np.ndarray:
    return (
        photons * (photons - 1)
        * profile.envelope(t1) ** 2 * profile.envelope(t2) ** 2
    )


def fock_g2(photons: int) -> float:
    """Time-independent g2 of an n-photon wavepacket."""
    if photons < 1:
        raise ParameterError("g2 needs at least one photon")
    return 1 - 1 / photons


def coherent_g2() -> float:
    return 1.0


def _scaled_envelopes(
    spec: PacStateSpec,
    t: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """u, v divided by max(u, v) at every time, plus a validity mask.

    Both flux and coincidence rate are homogeneous of degree two in the
    envelopes at each time, so the common factor cancels in g2 and deep
    tails stay finite.
    """
    log_u = spec.coherent.log_envelope(t)
    log_v = spec.photon.log_envelope(t + spec.tau)
    scale = np.maximum(log_u, log_v)
    valid = np.isfinite(scale)
    safe = np.where(valid, scale, 0.0)
    with np.errstate(invalid="ignore"):
        u = np.where(valid, np.exp(log_u - safe), 0.0)
        v = np.where(valid, np.exp(log_v - safe), 0.0)
    return u, v, valid


def pac_g2(
    spec: PacStateSpec,
    t1: float | np.ndarray,
    t2: float | np.ndarray,
) -> np.ndarray:
    """Pointwise g2(t1, t2) = f2(t1, t2) / (f1(t1) f1(t2))."""
    t1, t2 = np.broadcast_arrays(
        np.asarray(t1, dtype=float), np.asarray(t2, dtype=float),
    )
    u1, v1, ok1 = _scaled_envelopes(spec, t1)
    u2, v2, ok2 = _scaled_envelopes(spec, t2)
    numerator = _coincidence_terms(spec, u1, v1, u2, v2)
    denominator = _flux_terms(spec, u1, v1) * _flux_terms(spec, u2, v2)
    with np.errstate(invalid="ignore", divide="ignore"):
        g2 = numerator / denominator
    return np.where(ok1 & ok2, g2, np.nan)


def g2_grid(
    spec: PacStateSpec,
    t_min: float = DEFAULT_GRID_BOUNDS[0],
    t_max: float = DEFAULT_GRID_BOUNDS[1],
    resolution: int = DEFAULT_RESOLUTION,
    loss: EtaResult | None = None,
) -> CorrelationGrid:
    """g2 over [t_min, t_max]^2 in lab time.

    Loss cancels from g2 apart from the retarded-time shift of the grid.
    """
    if resolution < 2:
        raise ParameterError("resolution must be at least 2")
    if not t_max > t_min:
        raise ParameterError("grid bounds must satisfy t_max > t_min")
    axis = np.linspace(t_min, t_max, resolution)
    local = _lossy_times(axis, loss)
    values = pac_g2(spec, local[:, None], local[None, :])
    logger.debug(
        f"g2 grid {resolution}x{resolution} on [{t_min}, {t_max}]"
    )
    return CorrelationGrid(
        t1_axis=axis,
        t2_axis=axis.copy(),
        values=values,
        flux=pac_flux(spec, axis, loss),
    )


def mean_photons(spec: PacStateSpec, eta: float = 1.0) -> float:
    """Integrated flux, |eta| (1 + n_alpha + |N| |sigma|^2)."""
    return eta * (1 + spec.n_alpha + spec.norm * spec.sigma_sq)


def mean_coincidences(spec: PacStateSpec, eta: float = 1.0) -> float:
    """Integrated coincidence rate over both times."""
    n, s2 = spec.n_alpha, spec.sigma_sq
    return eta**2 * (
        spec.norm * (2 * n + 2 * s2 + 4 * s2 * n) + n**2
    )


def g2_zero(spec: PacStateSpec) -> float:
    """Measured (time-integrated) g2[0]; independent of loss."""
    if spec.n_alpha == 0:
        return 0.0
    n_s2 = spec.norm * spec.sigma_sq
    return 1 - (1 + n_s2**2) / (1 + spec.n_alpha + n_s2) ** 2
