import pytest  # type: ignore

from pacstate.cli.sweep import (
    Axis,
    Quantity,
    SweepSpec,
    run_sweep,
    sweep_points,
)
from pacstate.errors import ParameterError


def test_axis_values():
    assert Axis("tau", 0, 1, 0.25).values() == [0.0, 0.25, 0.5, 0.75, 1.0]
    assert len(Axis("n_alpha", 0.5, 10, 0.01).values()) == 951


@pytest.mark.parametrize("start, stop, step", [(0, 1, 0), (1, 0, 0.1)])
def test_axis_rejects(start: float, stop: float, step: float):
    with pytest.raises(ParameterError):
        Axis("tau", start, stop, step)


def test_points_first_axis_major():
    spec = SweepSpec(
        Quantity.G2ZERO,
        (Axis("tau", 0, 1, 1), Axis("omega1", 1, 3, 2)),
    )
    assert sweep_points(spec) == [
        {"tau": 0.0, "omega1": 1.0},
        {"tau": 0.0, "omega1": 3.0},
        {"tau": 1.0, "omega1": 1.0},
        {"tau": 1.0, "omega1": 3.0},
    ]


@pytest.mark.parametrize("quantity, axes, preset", [
    (Quantity.PN, (Axis("t1", 0, 1, 1),), None),
    (Quantity.ETA, (Axis("tau", 0, 1, 1),), "stripe"),
    (Quantity.FIDELITY, (Axis("L", 0, 1, 1),), None),
    (Quantity.G2ZERO, (Axis("tau", 0, 1, 1), Axis("tau", 0, 2, 1)), None),
    (Quantity.G2ZERO, (), None),
])
def test_sweep_spec_rejects(quantity: Quantity, axes: tuple, preset):
    with pytest.raises(ParameterError):
        SweepSpec(quantity, axes, preset=preset)


def test_g2zero_sweep(monkeypatch):
    monkeypatch.setenv("PACSTATE_THREADS", "2")
    table = run_sweep(SweepSpec(Quantity.G2ZERO, (Axis("tau", 0, 5, 5),)))
    assert table.columns == [
        "tau", "g2zero", "coherent_g2zero", "fock1_g2zero",
    ]
    assert table.column("tau") == [0.0, 5.0]
    assert table.column("g2zero")[0] == pytest.approx(336 / 361)
    assert table.meta["quantity"] == "g2zero"


def test_pn_sweep_rows_per_point():
    spec = SweepSpec(
        Quantity.PN, (Axis("eta", 0.5, 1, 0.5),), n_max=4,
    )
    table = run_sweep(spec)
    assert len(table.rows) == 10
    assert table.column("n")[:5] == [0, 1, 2, 3, 4]


def test_eta_sweep_along_preset():
    spec = SweepSpec(
        Quantity.ETA, (Axis("L", 0, 2.4, 1.2),), preset="nanowire",
    )
    table = run_sweep(spec)
    assert table.column("eta") == pytest.approx([1.0, 0.36787944, 0.13533528])
    assert table.column("retarded_shift") == pytest.approx([0, 1.2, 2.4])


def test_fidelity_sweep_with_preset_length():
    spec = SweepSpec(
        Quantity.FIDELITY,
        (Axis("L", 0, 0.5, 0.5),),
        preset="stripe",
    )
    table = run_sweep(spec)
    fidelity = table.column("fidelity")
    assert fidelity[0] == pytest.approx(1.0)
    assert fidelity[1] < fidelity[0]


def test_quad_depth_sweep():
    table = run_sweep(
        SweepSpec(Quantity.QUAD_DEPTH, (Axis("n_alpha", 1, 3, 2),))
    )
    depth = table.column("depth")
    assert depth[0] == pytest.approx(0.0, abs=1e-12)
    assert depth[1] == pytest.approx(-0.157, abs=0.003)
    assert table.column("out_of_phase_depth")[1] > 0


def test_mean_var_sweep():
    table = run_sweep(
        SweepSpec(Quantity.MEAN_VAR, (Axis("tau", 5, 5, 1),), omega1=5)
    )
    assert table.column("ratio")[0] == pytest.approx(0.75, abs=0.005)
    assert table.column("fock1_ratio")[0] == 0.0


def test_mean_var_ratio_lowest_at_perfect_overlap():
    table = run_sweep(
        SweepSpec(Quantity.MEAN_VAR, (Axis("tau", 0, 5, 5),))
    )
    overlapping, separated = table.column("ratio")
    assert overlapping == pytest.approx(3.1875 / 4.75)
    assert overlapping < separated < 1


def test_points_are_plain_dicts_per_axis_value():
    spec = SweepSpec(Quantity.PN, (Axis("eta", 0.25, 0.75, 0.25),))
    assert sweep_points(spec) == [
        {"eta": 0.25}, {"eta": 0.5}, {"eta": 0.75},
    ]
