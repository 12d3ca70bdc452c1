"""Pulse profiles, their overlap and the shared integration engine.

Times are in units of 1/Omega and bandwidths in units of Omega, where Omega
is the coherent-state bandwidth. A complex amplitude is written
f(t) = |f(t)| exp(-i omega0 t).

The Gaussian envelope convention is exp(-Omega^2 (t - t0)^2), so that
|f|^2 falls as exp(-2 Omega^2 (t - t0)^2). It is the width convention
that gives F ~ 0.70 at tau = 1/Omega and a squeezing depth near -0.157 at
n_alpha = 3.
``exponent_scale`` exists so the alternative exp(-Omega^2 t^2 / 2) can be
evaluated as a negative control.
"""
import logging
import math
import warnings
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Any, Callable, Sequence

import numpy as np
from scipy.integrate import quad, trapezoid
from scipy.special import erf

from .errors import (
    ConvergenceError,
    NarrowbandWarning,
    ParameterError,
    UnsupportedConfiguration,
)

NARROWBAND_FACTOR = 10.0
DEFAULT_EXPONENT_SCALE = 1.0
ENERGY_TOLERANCE = 1e-6

Window = tuple[float, float]
Integrand = Callable[..., Any]


class ProfileKind(Enum):
    GAUSSIAN = "gaussian"
    SAMPLED = "sampled"


@dataclass(frozen=True)
class IntegrationConfig:
    window_halfwidth: float = 10.0
    relative_tolerance: float = 1e-10
    absolute_tolerance: float = 0.0
    max_subdivisions: int = 500

    def __post_init__(self) -> None:
        if self.window_halfwidth <= 0:
            raise ParameterError("window_halfwidth must be positive")
        if self.relative_tolerance <= 0:
            raise ParameterError("relative_tolerance must be positive")
        if self.absolute_tolerance < 0:
            raise ParameterError("absolute_tolerance must be non-negative")
        if self.max_subdivisions < 1:
            raise ParameterError("max_subdivisions must be at least 1")


DEFAULT_INTEGRATION = IntegrationConfig()


@dataclass(frozen=True)
class PulseProfile:
    kind: ProfileKind
    bandwidth: float
    center_time: float = 0.0
    omega0: float = 0.0
    amplitude_scale: float = 1.0
    exponent_scale: float = DEFAULT_EXPONENT_SCALE
    times: np.ndarray | None = field(default=None, compare=False, repr=False)
    values: np.ndarray | None = field(
        default=None, compare=False, repr=False,
    )

    @property
    def peak(self) -> float:
        """Envelope maximum of a Gaussian profile."""
        return self.amplitude_scale * (
            2 * self.exponent_scale * self.bandwidth**2 / math.pi
        ) ** 0.25

    def amplitude(self, t: Any) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if self.kind is ProfileKind.SAMPLED:
            assert self.times is not None and self.values is not None
            real = np.interp(
                t, self.times, self.values.real, left=0.0, right=0.0,
            )
            imag = np.interp(
                t, self.times, self.values.imag, left=0.0, right=0.0,
            )
            return real + 1j * imag
        return self.envelope(t) * np.exp(-1j * self.omega0 * t)

    def envelope(self, t: Any) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if self.kind is ProfileKind.SAMPLED:
            return np.abs(self.amplitude(t))
        return self.peak * np.exp(
            -self.exponent_scale * self.bandwidth**2
            * (t - self.center_time) ** 2
        )

    def log_envelope(self, t: Any) -> np.ndarray:
        """log|f(t)|, exact for Gaussians far into the tails."""
        t = np.asarray(t, dtype=float)
        if self.kind is ProfileKind.SAMPLED:
            with np.errstate(divide="ignore"):
                return np.log(self.envelope(t))
        if self.peak == 0.0:
            return np.full(t.shape, -np.inf)
        return math.log(self.peak) - (
            self.exponent_scale * self.bandwidth**2
            * (t - self.center_time) ** 2
        )

    def energy(self) -> float:
        """Integral of |f|^2 over all time."""
        if self.kind is ProfileKind.SAMPLED:
            assert self.times is not None and self.values is not None
            return float(trapezoid(np.abs(self.values) ** 2, self.times))
        return self.amplitude_scale**2

    def support(
        self,
        config: IntegrationConfig = DEFAULT_INTEGRATION,
    ) -> Window:
        if self.kind is ProfileKind.SAMPLED:
            assert self.times is not None
            return float(self.times[0]), float(self.times[-1])
        halfwidth = config.window_halfwidth / self.bandwidth
        return self.center_time - halfwidth, self.center_time + halfwidth


def make_gaussian_profile(
    bandwidth: float,
    center_time: float = 0.0,
    amplitude_scale: float = 1.0,
    omega0: float = 0.0,
    exponent_scale: float = DEFAULT_EXPONENT_SCALE,
) -> PulseProfile:
    if bandwidth <= 0:
        raise ParameterError(f"bandwidth must be positive, got {bandwidth}")
    if amplitude_scale < 0:
        raise ParameterError(
            f"amplitude_scale must be non-negative, got {amplitude_scale}"
        )
    if exponent_scale <= 0:
        raise ParameterError("exponent_scale must be positive")
    return PulseProfile(
        kind=ProfileKind.GAUSSIAN,
        bandwidth=bandwidth,
        center_time=center_time,
        omega0=omega0,
        amplitude_scale=amplitude_scale,
        exponent_scale=exponent_scale,
    )


def make_sampled_profile(
    samples: Sequence[tuple[float, complex]],
    omega0: float = 0.0,
    bandwidth: float | None = None,
) -> PulseProfile:
    """Profile from (time, complex amplitude) pairs on a uniform grid.

    When no bandwidth is given it is estimated from the RMS duration of
    |f|^2, using the Gaussian relation Omega = 1 / (2 sigma_t).
    """
    if len(samples) < 2:
        raise ParameterError("a sampled profile needs at least two samples")
    times = np.array([s[0] for s in samples], dtype=float)
    values = np.array([s[1] for s in samples], dtype=complex)
    steps = np.diff(times)
    if np.any(steps <= 0) or not np.allclose(steps, steps[0], rtol=1e-9):
        raise ParameterError("sample times must form a uniform grid")
    energy = float(trapezoid(np.abs(values) ** 2, times))
    if energy <= 0:
        raise ParameterError("sampled profile carries no energy")
    if bandwidth is None:
        weights = np.abs(values) ** 2 / energy
        mean = trapezoid(weights * times, times)
        spread = math.sqrt(trapezoid(weights * (times - mean) ** 2, times))
        if spread <= 0:
            raise ParameterError("cannot estimate bandwidth of sampled data")
        bandwidth = 1 / (2 * spread)
    elif bandwidth <= 0:
        raise ParameterError(f"bandwidth must be positive, got {bandwidth}")
    return PulseProfile(
        kind=ProfileKind.SAMPLED,
        bandwidth=bandwidth,
        center_time=float(
            trapezoid(np.abs(values) ** 2 * times, times) / energy
        ),
        omega0=omega0,
        amplitude_scale=math.sqrt(energy),
        times=times,
        values=values,
    )


def _quad_points(window: Window, points: Sequence[float] | None) -> Any:
    if not points:
        return None
    inside = sorted({p for p in points if window[0] < p < window[1]})
    return inside or None


def _integrate_real(
    func: Integrand,
    windows: Sequence[Window],
    config: IntegrationConfig,
    points: Sequence[float] | None,
) -> float:
    if len(windows) == 2:
        inner_window = windows[1]

        def inner(t1: float) -> float:
            return _integrate_real(
                lambda t2: func(t1, t2), [inner_window], config, points,
            )

        return _integrate_real(inner, windows[:1], config, points)
    lo, hi = windows[0]
    result = quad(
        func,
        lo,
        hi,
        epsabs=config.absolute_tolerance,
        epsrel=config.relative_tolerance,
        limit=config.max_subdivisions,
        points=_quad_points(windows[0], points),
        full_output=1,
    )
    value, abserr = float(result[0]), float(result[1])
    # quad appends a warning message when ier > 0
    converged = len(result) == 3
    bound = max(
        config.relative_tolerance * abs(value), config.absolute_tolerance,
    )
    if not converged and abserr > bound:
        # cancelling integrands are measured against the integral of |f|
        magnitude = quad(
            lambda t: abs(func(t)),
            lo,
            hi,
            limit=config.max_subdivisions,
            points=_quad_points(windows[0], points),
            full_output=1,
        )[0]
        bound = max(bound, config.relative_tolerance * magnitude)
    if not converged and abserr > bound:
        raise ConvergenceError(
            f"quadrature over ({lo}, {hi}) stopped at error {abserr:.3e}",
            estimate=value,
            error_bound=abserr,
        )
    return value


def integrate(
    func: Integrand,
    window: Window | Sequence[Window],
    config: IntegrationConfig = DEFAULT_INTEGRATION,
    points: Sequence[float] | None = None,
) -> complex | float:
    """Adaptive quadrature of a function of one or two time variables.

    ``window`` is a single (lo, hi) pair for a 1-D integral or a pair of
    such pairs for a 2-D integral. Complex integrands are split into real
    and imaginary parts. ``points`` lists times where the integrand has
    structure (pulse centres) and is handed to each 1-D pass.
    """
    if isinstance(window[0], (int, float)):
        windows: list[Window] = [window]  # type: ignore[list-item]
    else:
        windows = [tuple(w) for w in window]  # type: ignore[misc]
    if len(windows) not in (1, 2):
        raise ParameterError("integrate handles one or two time variables")
    for lo, hi in windows:
        if not hi > lo:
            raise ParameterError(f"empty integration window ({lo}, {hi})")
    middle = [0.5 * (lo + hi) for lo, hi in windows]
    if not np.iscomplexobj(func(*middle)):
        return _integrate_real(
            lambda *t: float(func(*t)), windows, config, points,
        )
    real = _integrate_real(
        lambda *t: float(np.real(func(*t))), windows, config, points,
    )
    imag = _integrate_real(
        lambda *t: float(np.imag(func(*t))), windows, config, points,
    )
    return complex(real, imag)


def integrate_samples(times: np.ndarray, values: np.ndarray) -> complex:
    return complex(trapezoid(values, times))


def _same_gaussian_family(a: PulseProfile, b: PulseProfile) -> bool:
    return (
        a.kind is ProfileKind.GAUSSIAN
        and b.kind is ProfileKind.GAUSSIAN
        and a.exponent_scale == b.exponent_scale
    )


def _check_carriers(photon: PulseProfile, coherent: PulseProfile) -> None:
    if photon.omega0 != coherent.omega0:
        raise UnsupportedConfiguration(
            "photon and coherent pulses must share the central frequency "
            f"({photon.omega0} != {coherent.omega0})"
        )


def default_window(
    photon: PulseProfile,
    coherent: PulseProfile,
    tau: float,
    config: IntegrationConfig = DEFAULT_INTEGRATION,
) -> Window:
    """Window covering both pulses, the photon being evaluated at t + tau."""
    p_lo, p_hi = photon.support(config)
    c_lo, c_hi = coherent.support(config)
    if photon.kind is coherent.kind is ProfileKind.GAUSSIAN:
        halfwidth = config.window_halfwidth / min(
            photon.bandwidth, coherent.bandwidth,
        )
        centers = (photon.center_time - tau, coherent.center_time)
        return min(centers) - halfwidth, max(centers) + halfwidth
    return min(p_lo - tau, c_lo), max(p_hi - tau, c_hi)


def overlap_sigma(
    photon: PulseProfile,
    coherent: PulseProfile,
    tau: float,
    config: IntegrationConfig = DEFAULT_INTEGRATION,
    method: str = "auto",
) -> complex:
    """Cross-correlation sigma(tau) = int xi*(t + tau) alpha(t) dt.

    Two Gaussians of the same convention use the closed form; anything
    else falls back to quadrature (trapezoid on a sampled grid).
    """
    _check_carriers(photon, coherent)
    if method not in ("auto", "quadrature"):
        raise ParameterError(f"unknown overlap method {method!r}")
    if method == "auto" and _same_gaussian_family(photon, coherent):
        w, w1 = coherent.bandwidth, photon.bandwidth
        separation = coherent.center_time - photon.center_time + tau
        magnitude = (
            photon.amplitude_scale * coherent.amplitude_scale
            * math.sqrt(2 * w * w1 / (w**2 + w1**2))
            * math.exp(
                -photon.exponent_scale * w**2 * w1**2 * separation**2
                / (w**2 + w1**2)
            )
        )
        return magnitude * complex(
            math.cos(coherent.omega0 * tau), math.sin(coherent.omega0 * tau),
        )

    def integrand(t: Any) -> Any:
        return np.conj(photon.amplitude(t + tau)) * coherent.amplitude(t)

    if photon.kind is ProfileKind.SAMPLED:
        assert photon.times is not None
        grid = photon.times - tau
        return integrate_samples(grid, integrand(grid))
    if coherent.kind is ProfileKind.SAMPLED:
        assert coherent.times is not None
        return integrate_samples(coherent.times, integrand(coherent.times))
    logging.getLogger("pacstate.pulses").debug(
        f"overlap by quadrature at tau={tau}"
    )
    return complex(integrate(
        integrand,
        default_window(photon, coherent, tau, config),
        config,
        points=_gaussian_points(photon, coherent, tau),
    ))


def _gaussian_points(
    photon: PulseProfile,
    coherent: PulseProfile,
    tau: float,
) -> list[float]:
    a = photon.exponent_scale * photon.bandwidth**2
    b = coherent.exponent_scale * coherent.bandwidth**2
    p, q = photon.center_time - tau, coherent.center_time
    return [p, q, (a * p + b * q) / (a + b)]


def normalization(sigma: complex) -> float:
    """|N(tau)| = 1 / (1 + |sigma|^2)."""
    return 1.0 / (1.0 + abs(sigma) ** 2)


def envelope_integral(
    profile: PulseProfile,
    start: float,
    stop: float,
    shift: float = 0.0,
) -> float:
    """int_start^stop |f(t + shift)| dt."""
    if stop < start:
        raise ParameterError("window must have stop >= start")
    if profile.kind is ProfileKind.GAUSSIAN:
        root = math.sqrt(profile.exponent_scale) * profile.bandwidth
        center = profile.center_time - shift
        return float(
            profile.peak * math.sqrt(math.pi) / (2 * root)
            * (erf(root * (stop - center)) - erf(root * (start - center)))
        )
    assert profile.times is not None
    grid = profile.times - shift
    inside = grid[(grid > start) & (grid < stop)]
    nodes = np.concatenate(([start], inside, [stop]))
    return float(trapezoid(profile.envelope(nodes + shift), nodes))


@dataclass(frozen=True)
class PacStateSpec:
    """Full parameterisation of a photon-added coherent state pulse.

    ``omega0`` defaults to ten times the larger bandwidth. Explicit
    ``photon_profile``/``coherent_profile`` replace the Gaussians, e.g.
    with sampled data; ``n_alpha`` must then match the coherent energy.
    """
    n_alpha: float
    omega: float = 1.0
    omega1: float = 1.0
    tau: float = 0.0
    omega0: float | None = None
    exponent_scale: float = DEFAULT_EXPONENT_SCALE
    photon_profile: PulseProfile | None = field(default=None, repr=False)
    coherent_profile: PulseProfile | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if self.n_alpha < 0:
            raise ParameterError(f"n_alpha must be >= 0, got {self.n_alpha}")
        if self.omega <= 0 or self.omega1 <= 0:
            raise ParameterError("bandwidths must be positive")
        if self.omega0 is None:
            object.__setattr__(
                self,
                "omega0",
                NARROWBAND_FACTOR * max(self.omega, self.omega1),
            )
        assert self.omega0 is not None
        if self.omega0 < NARROWBAND_FACTOR * max(self.omega, self.omega1):
            warnings.warn(
                f"omega0={self.omega0} is below {NARROWBAND_FACTOR:g} times "
                "the pulse bandwidth; the narrowband approximation is weak",
                category=NarrowbandWarning,
            )
        if self.coherent_profile is not None:
            energy = self.coherent_profile.energy()
            if abs(energy - self.n_alpha) > ENERGY_TOLERANCE * max(
                1.0, self.n_alpha
            ):
                raise ParameterError(
                    f"coherent profile energy {energy} != n_alpha "
                    f"{self.n_alpha}"
                )

    @cached_property
    def photon(self) -> PulseProfile:
        if self.photon_profile is not None:
            return self.photon_profile
        assert self.omega0 is not None
        return make_gaussian_profile(
            self.omega1,
            omega0=self.omega0,
            exponent_scale=self.exponent_scale,
        )

    @cached_property
    def coherent(self) -> PulseProfile:
        if self.coherent_profile is not None:
            return self.coherent_profile
        assert self.omega0 is not None
        return make_gaussian_profile(
            self.omega,
            amplitude_scale=math.sqrt(self.n_alpha),
            omega0=self.omega0,
            exponent_scale=self.exponent_scale,
        )

    @cached_property
    def sigma(self) -> complex:
        return overlap_sigma(self.photon, self.coherent, self.tau)

    @property
    def sigma_sq(self) -> float:
        return abs(self.sigma) ** 2

    @property
    def norm(self) -> float:
        """|N(tau)|."""
        return normalization(self.sigma)

    @property
    def overlap_fraction(self) -> float:
        """|sigma|^2 / n_alpha, taken as 0 for a bare single photon."""
        if self.n_alpha == 0:
            return 0.0
        return self.sigma_sq / self.n_alpha

    def window(
        self,
        config: IntegrationConfig = DEFAULT_INTEGRATION,
    ) -> Window:
        return default_window(self.photon, self.coherent, self.tau, config)

    def points(self) -> list[float]:
        if _same_gaussian_family(self.photon, self.coherent):
            return _gaussian_points(self.photon, self.coherent, self.tau)
        return [self.photon.center_time - self.tau, self.coherent.center_time]
