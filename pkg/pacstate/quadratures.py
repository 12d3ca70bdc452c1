"""Windowed quadrature moments and squeezing.

X_phi(t, T) integrates 1/2 (a e^{i phi} + a^dagger e^{-i phi}) over
[t, t + T]. The local-oscillator phase follows the pulse carrier,
phi(t) = theta(t) + c with theta(t) = omega0 t, so only the constant offset
c enters the results. A coherent pulse gives a variance of exactly T/4.
"""
import logging
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import ParameterError
from .propagation import EtaResult
from .pulses import (
    DEFAULT_INTEGRATION,
    PacStateSpec,
    PulseProfile,
    envelope_integral,
)

NALPHA_SCAN = (0.5, 10.0, 0.01)


class PhaseChoice(Enum):
    THETA = "theta"
    THETA_PLUS_HALF_PI = "theta_plus_half_pi"
    CUSTOM = "custom"


@dataclass(frozen=True)
class QuadratureWindow:
    start: float
    duration: float
    phase_choice: PhaseChoice = PhaseChoice.THETA
    phase_offset: float = 0.0

    def __post_init__(self) -> None:
        if not self.duration > 0:
            raise ParameterError(
                f"window duration must be positive, got {self.duration}"
            )
        if self.phase_choice is not PhaseChoice.CUSTOM and self.phase_offset:
            raise ParameterError("phase_offset needs PhaseChoice.CUSTOM")

    @property
    def stop(self) -> float:
        return self.start + self.duration

    @property
    def offset(self) -> float:
        """Constant c in phi(t) = theta(t) + c."""
        if self.phase_choice is PhaseChoice.THETA_PLUS_HALF_PI:
            return math.pi / 2
        return self.phase_offset

    @property
    def baseline(self) -> float:
        return self.duration / 4

    def with_phase(
        self,
        choice: PhaseChoice,
        offset: float = 0.0,
    ) -> "QuadratureWindow":
        return QuadratureWindow(self.start, self.duration, choice, offset)


@dataclass(frozen=True)
class QuadratureResult:
    mean: float
    variance: float
    baseline: float
    eta: float = 1.0
    window: QuadratureWindow | None = field(default=None, compare=False)
    lab_start: float | None = None
    lo_phase_offset: float = 0.0

    @property
    def squeezing_depth(self) -> float:
        """Variance minus the coherent baseline T/4."""
        return self.variance - self.baseline

    @property
    def squeezed(self) -> bool:
        return self.squeezing_depth < 0


def default_window(
    spec: PacStateSpec,
    choice: PhaseChoice = PhaseChoice.THETA,
    offset: float = 0.0,
) -> QuadratureWindow:
    """Window capturing both pulses in full."""
    width = DEFAULT_INTEGRATION.window_halfwidth / min(spec.omega, spec.omega1)
    return QuadratureWindow(
        start=-width - abs(spec.tau),
        duration=2 * width + 2 * abs(spec.tau),
        phase_choice=choice,
        phase_offset=offset,
    )


def profile_window(
    profile: PulseProfile,
    choice: PhaseChoice = PhaseChoice.THETA,
    offset: float = 0.0,
) -> QuadratureWindow:
    start, stop = profile.support()
    return QuadratureWindow(start, stop - start, choice, offset)


def _photon_integral(spec: PacStateSpec, window: QuadratureWindow) -> float:
    return envelope_integral(spec.photon, window.start, window.stop, spec.tau)


def pac_quadrature_mean(
    spec: PacStateSpec,
    window: QuadratureWindow | None = None,
) -> float:
    window = window or default_window(spec)
    photon = _photon_integral(spec, window)
    coherent = envelope_integral(spec.coherent, window.start, window.stop)
    return math.cos(window.offset) * (
        spec.norm * abs(spec.sigma) * photon + coherent
    )


def pac_quadrature_variance(
    spec: PacStateSpec,
    window: QuadratureWindow | None = None,
) -> QuadratureResult:
    """Variance at phase theta + c.

    T/4 + |N| (1/2 - |N| |sigma|^2) (I cos c)^2 + |N| (I sin c)^2 / 2,
    with I the windowed integral of |xi(t + tau)|. The in-phase quadrature
    is squeezed once |N| |sigma|^2 exceeds 1/2.
    """
    window = window or default_window(spec)
    photon = _photon_integral(spec, window)
    in_phase = math.cos(window.offset) * photon
    out_of_phase = math.sin(window.offset) * photon
    variance = (
        window.baseline
        + spec.norm * (0.5 - spec.norm * spec.sigma_sq) * in_phase**2
        + 0.5 * spec.norm * out_of_phase**2
    )
    return QuadratureResult(
        mean=pac_quadrature_mean(spec, window),
        variance=variance,
        baseline=window.baseline,
        window=window,
        lab_start=window.start,
    )


def fock_quadrature_variance(
    photons: int,
    profile: PulseProfile,
    window: QuadratureWindow | None = None,
) -> QuadratureResult:
    """n-photon wavepacket: zero mean, T/4 + (n/2) I^2 at any phase."""
    if photons < 1:
        raise ParameterError("a Fock wavepacket needs at least one photon")
    window = window or profile_window(profile)
    photon = envelope_integral(profile, window.start, window.stop)
    return QuadratureResult(
        mean=0.0,
        variance=window.baseline + 0.5 * photons * photon**2,
        baseline=window.baseline,
        window=window,
        lab_start=window.start,
    )


def coherent_quadrature(
    profile: PulseProfile,
    window: QuadratureWindow | None = None,
) -> QuadratureResult:
    window = window or profile_window(profile)
    mean = math.cos(window.offset) * envelope_integral(
        profile, window.start, window.stop,
    )
    return QuadratureResult(
        mean=mean,
        variance=window.baseline,
        baseline=window.baseline,
        window=window,
        lab_start=window.start,
    )


def apply_loss(result: QuadratureResult, loss: EtaResult) -> QuadratureResult:
    """Any wavepacket after propagation, window given in retarded time.

    The mean scales with |eta|^(1/2) and the excess variance with |eta|.
    The local oscillator carries the extra phase phi_eta / 2 and the
    window opens L / v_g later in the lab frame.
    """
    eta = loss.magnitude
    if not 0 <= eta <= 1:
        raise ParameterError(f"|eta| must lie in [0, 1], got {eta}")
    assert result.window is not None
    return QuadratureResult(
        mean=math.sqrt(eta) * result.mean,
        variance=result.baseline + eta * result.squeezing_depth,
        baseline=result.baseline,
        eta=eta,
        window=result.window,
        lab_start=result.window.start + loss.retarded_shift,
        lo_phase_offset=loss.phase / 2,
    )


def lossy_quadrature(
    spec: PacStateSpec,
    window: QuadratureWindow | None,
    loss: EtaResult,
) -> QuadratureResult:
    return apply_loss(pac_quadrature_variance(spec, window), loss)


def perfect_overlap_depth(n_alpha: float, photon_integral: float) -> float:
    """In-phase depth with |sigma|^2 = n_alpha."""
    return (1 - n_alpha) / (2 * (1 + n_alpha) ** 2) * photon_integral**2


def optimal_nalpha_scan(
    n_alpha_grid: np.ndarray | None = None,
    tau: float = 0.0,
    omega: float = 1.0,
    omega1: float = 1.0,
) -> tuple[float, np.ndarray]:
    """n_alpha minimising the in-phase variance, and the depth curve."""
    if n_alpha_grid is None:
        low, high, step = NALPHA_SCAN
        n_alpha_grid = np.round(np.arange(low, high + step / 2, step), 10)
    grid = np.asarray(n_alpha_grid, dtype=float)
    if grid.min() > NALPHA_SCAN[0] or grid.max() < NALPHA_SCAN[1]:
        raise ParameterError(
            f"n_alpha grid must span [{NALPHA_SCAN[0]}, {NALPHA_SCAN[1]}]"
        )
    depths = np.array([
        pac_quadrature_variance(
            PacStateSpec(n_alpha=n, omega=omega, omega1=omega1, tau=tau),
        ).squeezing_depth
        for n in grid
    ])
    best = float(grid[int(np.argmin(depths))])
    logging.getLogger("pacstate.quadratures").info(
        f"optimal n_alpha {best} over {len(grid)} points"
    )
    return best, depths
