import math

import numpy as np
import pytest  # type: ignore
from scipy.stats import poisson

from pacstate.errors import ParameterError
from pacstate.photon_statistics import (
    bernoulli_transform,
    coherent_distribution,
    coherent_mean_variance,
    coherent_pn,
    fock_distribution,
    fock_mean_variance,
    fock_pn,
    pac_distribution,
    pac_mean_variance,
    pac_pn,
    pac_pn_lossy,
    variance_to_mean,
)
from pacstate.pulses import PacStateSpec


@pytest.mark.parametrize("n, expected", [
    (0, 0.0),
    (1, 0.25 * math.exp(-3)),
    (2, 0.25 * 3 * math.exp(-3) * 2),
    (3, 0.25 * 4.5 * math.exp(-3) * 3),
])
def test_pac_pn_perfect_overlap(n: int, expected: float):
    assert pac_pn(PacStateSpec(3), n) == pytest.approx(expected, rel=1e-12)


def test_pac_pn_without_overlap_is_shifted_poisson():
    spec = PacStateSpec(3, omega1=5, tau=40)
    for n in range(1, 8):
        assert pac_pn(spec, n) == pytest.approx(
            poisson.pmf(n - 1, 3), rel=1e-12,
        )


def test_single_photon_limit():
    spec = PacStateSpec(0)
    assert pac_pn(spec, 1) == pytest.approx(1.0)
    assert pac_pn(spec, 2) == 0.0


@pytest.mark.parametrize("omega0", [10.0, 50.0, 300.0])
def test_pac_pn_independent_of_carrier(omega0: float):
    reference = PacStateSpec(2, tau=0.5)
    spec = PacStateSpec(2, tau=0.5, omega0=omega0)
    for n in range(5):
        assert pac_pn(spec, n) == pytest.approx(pac_pn(reference, n))


def test_pac_pn_rejects_negative_n():
    with pytest.raises(ParameterError):
        pac_pn(PacStateSpec(3), -1)


@pytest.mark.parametrize("tau, omega1", [(0.0, 1.0), (1.0, 2.0), (5.0, 5.0)])
def test_lossless_distribution_sums_to_one(tau: float, omega1: float):
    spec = PacStateSpec(3, omega1=omega1, tau=tau)
    distribution = pac_distribution(spec)
    assert distribution.total() == pytest.approx(1.0, abs=1e-12)
    assert distribution.vector_mean() == pytest.approx(
        distribution.mean, rel=1e-9,
    )
    assert distribution.vector_variance() == pytest.approx(
        distribution.variance, rel=1e-9,
    )


@pytest.mark.parametrize("eta", [0.75, 0.5, 0.25])
def test_lossy_distribution_moments(eta: float):
    spec = PacStateSpec(3, omega1=2, tau=0.6)
    distribution = pac_distribution(spec, eta)
    lossless_mean, _ = pac_mean_variance(spec)
    assert distribution.total() == pytest.approx(1.0, abs=1e-12)
    assert distribution.mean == pytest.approx(eta * lossless_mean)
    assert distribution.vector_mean() == pytest.approx(
        distribution.mean, rel=1e-9,
    )
    assert distribution.vector_variance() == pytest.approx(
        distribution.variance, rel=1e-9,
    )


@pytest.mark.parametrize("eta", [0.9, 0.5, 0.1])
def test_lossy_pn_matches_bernoulli_transform(eta: float):
    spec = PacStateSpec(3, tau=1.0)
    thinned = bernoulli_transform(pac_distribution(spec), eta)
    for n in range(8):
        assert pac_pn_lossy(spec, n, eta) == pytest.approx(
            thinned.probabilities[n], rel=1e-9, abs=1e-13,
        )


def test_lossy_pn_limits():
    spec = PacStateSpec(3, tau=0.5)
    assert pac_pn_lossy(spec, 2, 1.0) == pac_pn(spec, 2)
    assert pac_pn_lossy(spec, 0, 0.0) == 1.0
    assert pac_pn_lossy(spec, 1, 0.0) == 0.0
    assert pac_distribution(spec, 0.0).probabilities.tolist() == [1.0]


@pytest.mark.parametrize("eta", [-0.1, 1.01])
def test_eta_out_of_range(eta: float):
    with pytest.raises(ParameterError):
        pac_pn_lossy(PacStateSpec(3), 1, eta)


def test_mean_and_variance_perfect_overlap():
    spec = PacStateSpec(3)
    mean, variance = pac_mean_variance(spec)
    assert mean == pytest.approx(4.75)
    assert variance == pytest.approx(3.1875)
    distribution = pac_distribution(spec)
    assert distribution.vector_variance() == pytest.approx(3.1875, rel=1e-9)


@pytest.mark.parametrize("n_alpha, tau, omega1", [
    (1.0, 0.0, 1.0),
    (3.0, 0.5, 2.0),
    (5.0, 1.5, 0.5),
])
def test_variance_matches_second_moment(
    n_alpha: float,
    tau: float,
    omega1: float,
):
    spec = PacStateSpec(n_alpha, omega1=omega1, tau=tau)
    distribution = pac_distribution(spec)
    mean, variance = pac_mean_variance(spec)
    assert variance == pytest.approx(
        distribution.vector_variance(), rel=1e-9,
    )
    assert variance < mean


def test_ratio_lowest_at_perfect_overlap():
    overlapping = variance_to_mean(PacStateSpec(3))
    separated = variance_to_mean(PacStateSpec(3, tau=5))
    assert overlapping == pytest.approx(3.1875 / 4.75)
    assert overlapping < separated


def test_ratio_well_separated_pulses():
    spec = PacStateSpec(3, omega1=5, tau=5)
    assert variance_to_mean(spec) == pytest.approx(0.75, abs=0.005)


def test_ratio_empty_pulse():
    assert math.isnan(variance_to_mean(PacStateSpec(3), 0.0))


def test_coherent_statistics():
    assert coherent_pn(3, 2) == pytest.approx(4.5 * math.exp(-3))
    assert coherent_pn(3, 2, 0.5) == pytest.approx(
        poisson.pmf(2, 1.5), rel=1e-12,
    )
    assert coherent_mean_variance(3, 0.5) == (1.5, 1.5)
    distribution = coherent_distribution(3)
    assert distribution.tail_bound < 1e-12
    with pytest.raises(ParameterError):
        coherent_pn(-1, 0)


def test_fock_statistics():
    assert fock_pn(2, 1, 0.5) == pytest.approx(0.5)
    assert fock_mean_variance(1, 0.5) == (0.5, 0.25)
    distribution = fock_distribution(3, 0.5)
    expected = np.array([1, 3, 3, 1]) / 8
    assert np.allclose(distribution.probabilities, expected)
    with pytest.raises(ParameterError):
        fock_pn(-1, 0)


def test_bernoulli_transform_composes():
    distribution = fock_distribution(4, 0.8)
    thinned = bernoulli_transform(distribution, 0.5)
    direct = fock_distribution(4, 0.4)
    assert thinned.eta == pytest.approx(0.4)
    assert np.allclose(thinned.probabilities, direct.probabilities)
    assert thinned.mean == pytest.approx(direct.mean)
    assert thinned.variance == pytest.approx(direct.variance)


@pytest.mark.parametrize("n_alpha", [0.5, 3.0, 12.0])
@pytest.mark.parametrize("eta", [0.9, 0.5, 0.1])
def test_thinned_poisson_stays_poisson(n_alpha: float, eta: float):
    thinned = bernoulli_transform(coherent_distribution(n_alpha), eta)
    expected = poisson.pmf(thinned.photon_numbers, eta * n_alpha)
    assert np.max(np.abs(thinned.probabilities - expected)) < 1e-10


def test_thinned_pac_matches_closed_form_up_to_twenty():
    spec = PacStateSpec(3, omega1=2, tau=0.4)
    thinned = bernoulli_transform(pac_distribution(spec), 0.6)
    for n in range(21):
        closed = pac_pn_lossy(spec, n, 0.6)
        swept = thinned.probabilities[n] if n <= thinned.n_max else 0.0
        assert abs(closed - swept) <= 1e-10


@pytest.mark.parametrize("n_alpha", [0.5, 1.0, 3.0, 10.0])
@pytest.mark.parametrize("eta", [1.0, 0.5, 0.05])
def test_sub_poissonian_everywhere(n_alpha: float, eta: float):
    for tau in np.linspace(0, 5, 11):
        for omega1 in (0.2, 0.5, 1.0, 2.0, 5.0):
            spec = PacStateSpec(n_alpha, omega1=omega1, tau=tau)
            assert variance_to_mean(spec, eta) < 1


def test_ratio_is_affine_in_eta():
    spec = PacStateSpec(3, omega1=2, tau=0.5)
    etas = np.array([0.1, 0.3, 0.55, 0.8, 1.0])
    ratios = np.array([variance_to_mean(spec, eta) for eta in etas])
    slope, intercept = np.polyfit(etas, ratios, 1)
    assert np.allclose(intercept + slope * etas, ratios, atol=1e-12)
    assert intercept == pytest.approx(1.0)
    assert slope < 0


@pytest.mark.parametrize("eta, message", [
    (1.0, "lossless"),
    (0.0, "vacuum"),
])
def test_boundary_eta_is_logged(eta: float, message: str, caplog):
    with caplog.at_level("DEBUG", logger="pacstate.photon_statistics"):
        pac_pn_lossy(PacStateSpec(3), 1, eta)
    assert message in caplog.text
