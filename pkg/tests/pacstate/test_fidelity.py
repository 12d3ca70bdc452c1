import math

import pytest  # type: ignore

from pacstate.errors import ParameterError, UndefinedReferenceState
from pacstate.fidelity import fidelity, fidelity_lossy
from pacstate.pulses import PacStateSpec


def test_fidelity_one_pulse_width_delay():
    result = fidelity(PacStateSpec(3, tau=1))
    assert result.value == pytest.approx(0.70, abs=0.005)
    expected = 3 * math.exp(-1) * 4 / (3 * (1 + 3 * math.exp(-1)))
    assert result.value == pytest.approx(expected, rel=1e-12)
    assert result.eta == 1.0


def test_fidelity_perfect_overlap_is_one():
    assert fidelity(PacStateSpec(3)).value == pytest.approx(1.0)


def test_fidelity_falls_with_delay():
    values = [fidelity(PacStateSpec(3, tau=tau)).value for tau in (0, 1, 2)]
    assert values == sorted(values, reverse=True)


def test_fidelity_needs_coherent_light():
    with pytest.raises(UndefinedReferenceState):
        fidelity(PacStateSpec(0))
    with pytest.raises(UndefinedReferenceState):
        fidelity_lossy(PacStateSpec(0), 0.5)


def test_lossy_fidelity_half_transmission():
    result = fidelity_lossy(PacStateSpec(3), 0.5)
    assert result.value == pytest.approx(0.0525, abs=5e-4)
    assert result.eta == 0.5


def test_lossy_fidelity_without_loss_matches_lossless():
    spec = PacStateSpec(3, tau=0.8, omega1=1.5)
    assert fidelity_lossy(spec, 1.0).value == pytest.approx(
        fidelity(spec).value, rel=1e-12,
    )


def test_lossy_fidelity_complete_loss():
    result = fidelity_lossy(PacStateSpec(3), 0.0)
    assert result.value == 0.0
    assert result.note


@pytest.mark.parametrize("eta", [-0.2, 1.5])
def test_lossy_fidelity_rejects(eta: float):
    with pytest.raises(ParameterError):
        fidelity_lossy(PacStateSpec(3), eta)
