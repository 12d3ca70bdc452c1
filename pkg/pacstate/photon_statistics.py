"""Photon-number statistics of PAC, coherent and Fock wavepackets.

Loss acts on any distribution as a Bernoulli (binomial) thinning: each
photon independently survives the guide with probability |eta|.
"""
import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.stats import binom, poisson

from .errors import ParameterError
from .pulses import PacStateSpec

MASS_TOLERANCE = 1e-12
MAX_PHOTONS = 256

PmfFunction = Callable[[np.ndarray], np.ndarray]

logger = logging.getLogger("pacstate.photon_statistics")


@dataclass(frozen=True)
class CoherentState:
    n_alpha: float

    def __post_init__(self) -> None:
        if self.n_alpha < 0:
            raise ParameterError(f"n_alpha must be >= 0, got {self.n_alpha}")


@dataclass(frozen=True)
class FockState:
    photons: int

    def __post_init__(self) -> None:
        if self.photons < 0:
            raise ParameterError(
                f"photon number must be >= 0, got {self.photons}"
            )


@dataclass(frozen=True)
class PhotonDistribution:
    """Truncated photon-number distribution P_0..P_nmax.

    ``mean`` and ``variance`` are the closed-form moments of the untruncated
    state; ``tail_bound`` is the probability mass beyond n_max.
    """
    probabilities: np.ndarray
    tail_bound: float
    mean: float
    variance: float
    eta: float
    state_label: str

    @property
    def n_max(self) -> int:
        return len(self.probabilities) - 1

    @property
    def photon_numbers(self) -> np.ndarray:
        return np.arange(len(self.probabilities))

    def total(self) -> float:
        return float(self.probabilities.sum())

    def vector_mean(self) -> float:
        return float(self.photon_numbers @ self.probabilities)

    def vector_variance(self) -> float:
        n = self.photon_numbers
        mean = self.vector_mean()
        return float(((n - mean) ** 2) @ self.probabilities)


def check_eta(eta: float) -> float:
    if not 0 <= eta <= 1:
        raise ParameterError(f"|eta| must lie in [0, 1], got {eta}")
    return float(eta)


def _truncate(pmf: PmfFunction) -> tuple[np.ndarray, float]:
    probabilities = pmf(np.arange(MAX_PHOTONS + 1))
    cumulative = np.cumsum(probabilities)
    reached = np.nonzero(cumulative >= 1 - MASS_TOLERANCE)[0]
    if len(reached):
        probabilities = probabilities[: reached[0] + 1]
    else:
        logger.warning(
            f"distribution truncated at the {MAX_PHOTONS} photon cap"
        )
    tail_bound = max(0.0, 1.0 - float(probabilities.sum()))
    return probabilities, tail_bound


def pac_pn(spec: PacStateSpec, n: int) -> float:
    if n < 0:
        raise ParameterError(f"photon number must be >= 0, got {n}")
    if n == 0:
        return 0.0
    return float(
        spec.norm * poisson.pmf(n - 1, spec.n_alpha)
        * (1 + (n - 1) * spec.overlap_fraction)
    )


def pac_pn_lossy(spec: PacStateSpec, n: int, eta: float) -> float:
    """P_n after a guide of transmission |eta|.

    Complete loss leaves the vacuum and no loss the lossless distribution.
    """
    eta = check_eta(eta)
    if n < 0:
        raise ParameterError(f"photon number must be >= 0, got {n}")
    if eta == 1:
        logger.debug("|eta| = 1, using the lossless distribution")
        return pac_pn(spec, n)
    if eta == 0:
        logger.debug("|eta| = 0, only the vacuum survives")
        return 1.0 if n == 0 else 0.0
    survived = eta * spec.n_alpha
    lost = 1 - eta
    ratio = spec.overlap_fraction
    return float(spec.norm * (
        lost * poisson.pmf(n, survived)
        * (1 + 2 * n * ratio + lost * spec.sigma_sq)
        + eta * poisson.pmf(n - 1, survived) * (1 + (n - 1) * ratio)
    ))


def coherent_pn(n_alpha: float, n: int, eta: float = 1.0) -> float:
    eta = check_eta(eta)
    CoherentState(n_alpha)
    return float(poisson.pmf(n, eta * n_alpha))


def fock_pn(photons: int, n: int, eta: float = 1.0) -> float:
    eta = check_eta(eta)
    FockState(photons)
    return float(binom.pmf(n, photons, eta))


def pac_mean_variance(
    spec: PacStateSpec,
    eta: float = 1.0,
) -> tuple[float, float]:
    eta = check_eta(eta)
    mean = eta * (1 + spec.n_alpha + spec.sigma_sq * spec.norm)
    variance = mean - (1 + spec.sigma_sq**2 * spec.norm**2) * eta**2
    return mean, variance


def coherent_mean_variance(
    n_alpha: float,
    eta: float = 1.0,
) -> tuple[float, float]:
    eta = check_eta(eta)
    return eta * n_alpha, eta * n_alpha


def fock_mean_variance(photons: int, eta: float = 1.0) -> tuple[float, float]:
    eta = check_eta(eta)
    return photons * eta, photons * eta * (1 - eta)


def variance_to_mean(spec: PacStateSpec, eta: float = 1.0) -> float:
    mean, variance = pac_mean_variance(spec, eta)
    if mean == 0:
        return float("nan")
    return variance / mean


def pac_distribution(
    spec: PacStateSpec,
    eta: float = 1.0,
) -> PhotonDistribution:
    eta = check_eta(eta)
    probabilities, tail_bound = _truncate(
        lambda n: np.array([pac_pn_lossy(spec, int(k), eta) for k in n])
    )
    mean, variance = pac_mean_variance(spec, eta)
    return PhotonDistribution(
        probabilities, tail_bound, mean, variance, eta, "pac",
    )


def coherent_distribution(
    n_alpha: float,
    eta: float = 1.0,
) -> PhotonDistribution:
    eta = check_eta(eta)
    CoherentState(n_alpha)
    probabilities, tail_bound = _truncate(
        lambda n: poisson.pmf(n, eta * n_alpha)
    )
    mean, variance = coherent_mean_variance(n_alpha, eta)
    return PhotonDistribution(
        probabilities, tail_bound, mean, variance, eta, "coherent",
    )


def fock_distribution(photons: int, eta: float = 1.0) -> PhotonDistribution:
    eta = check_eta(eta)
    FockState(photons)
    probabilities = binom.pmf(np.arange(photons + 1), photons, eta)
    mean, variance = fock_mean_variance(photons, eta)
    return PhotonDistribution(
        probabilities, 0.0, mean, variance, eta, "fock",
    )


def bernoulli_transform(
    lossless: PhotonDistribution,
    eta: float,
) -> PhotonDistribution:
    """Thin a distribution by photon loss of transmission |eta|.

    P_n(L) = sum_m C(m, n) |eta|^n (1 - |eta|)^(m - n) P_m. Mass beyond
    the input truncation stays in ``tail_bound``.
    """
    eta = check_eta(eta)
    n = lossless.photon_numbers
    transfer = binom.pmf(n[:, None], n[None, :], eta)
    combined = eta * lossless.eta
    return PhotonDistribution(
        probabilities=transfer @ lossless.probabilities,
        tail_bound=lossless.tail_bound,
        mean=eta * lossless.mean,
        variance=(
            eta**2 * lossless.variance + eta * (1 - eta) * lossless.mean
        ),
        eta=combined,
        state_label=lossless.state_label,
    )
