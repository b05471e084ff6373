import io
import math

import numpy as np
import pytest

from infofringe import DomainError, Sign, closed_form_fringe, constant_metric_ode_solve
from infofringe.geometry import FringeTable
from infofringe.io import read_fringe_table


def test_plus_branch_reaches_zero_at_pi():
    table = constant_metric_ode_solve(1.0, 1, 2 * math.pi, 1e-3)
    assert table(math.pi) == pytest.approx(0.0, abs=1e-6)
    assert table.xs[-1] == 2 * math.pi


def test_minus_branch_half_at_quarter_period():
    k = 2.0
    table = constant_metric_ode_solve(k, 0, 2 * math.pi, 1e-3)
    assert table(math.pi / (2 * k)) == pytest.approx(0.5, abs=1e-6)


@pytest.mark.parametrize("k", [0.5, 1.0, 2.0, 3.0, 7.3])
@pytest.mark.parametrize("f0", [0, 1])
def test_agrees_with_closed_form(k, f0):
    table = constant_metric_ode_solve(k, f0, 4 * math.pi / k, 1e-3 / k)
    law = closed_form_fringe(k, Sign.from_boundary(f0))
    assert table.sup_deviation(law) <= 1e-6
    xs = np.linspace(0, 4 * math.pi / k, 20_001)
    assert np.max(np.abs(table(xs) - law(xs))) <= 1e-6


@pytest.mark.parametrize("k, f0, step", [(1.0, 1, 1e-2), (3.0, 0, 1e-3), (0.2, 1, 0.05)])
def test_table_invariants(k, f0, step):
    table = constant_metric_ode_solve(k, f0, 10.0, step)
    assert table.fs[0] == f0
    assert np.all((table.fs >= 0) & (table.fs <= 1))
    assert np.all(np.diff(table.xs) > 0)
    assert not table.fs.flags.writeable


def test_turning_points_are_crossed_not_stuck():
    # the constant solution would stay at f0; the integrated one must oscillate
    table = constant_metric_ode_solve(1.0, 1, 6 * math.pi, 1e-3)
    assert table.fs.min() < 1e-6 and table.fs[len(table.fs) // 6] < 0.9
    contacts_at_zero = np.sum((table.fs[1:-1] < table.fs[:-2]) & (table.fs[1:-1] <= table.fs[2:]))
    assert contacts_at_zero == 3


def test_x_max_not_a_multiple_of_step():
    table = constant_metric_ode_solve(1.0, 1, 1.00049, 1e-3)
    assert table.xs[-1] == 1.00049
    assert table.fs[-1] == pytest.approx(0.5 * (1 + math.cos(1.00049)), abs=1e-9)


@pytest.mark.parametrize(
    "args",
    [(0.0, 1, 1.0, 1e-3), (-1.0, 1, 1.0, 1e-3), (1.0, 1, 1.0, 0.0), (1.0, 1, 1e-4, 1e-3), (1.0, 0.5, 1.0, 1e-3)],
)
def test_errors(args):
    with pytest.raises(DomainError):
        constant_metric_ode_solve(*args)


def test_table_validation():
    good = dict(xs=[0.0, 1.0], fs=[1.0, 0.5], k=1.0, f0=1, step=1.0, slopes=[0.0, 0.0])
    FringeTable(**good)
    with pytest.raises(DomainError):
        FringeTable(**{**good, "xs": [1.0, 0.0]})
    with pytest.raises(DomainError):
        FringeTable(**{**good, "fs": [1.0, 1.5]})
    with pytest.raises(DomainError):
        FringeTable(**{**good, "fs": [0.5, 0.5]})


def test_csv_round_trip():
    table = constant_metric_ode_solve(2.0, 0, 3.0, 1e-2)
    buf = io.StringIO()
    table.to_csv(buf)
    text = buf.getvalue()
    assert text.splitlines()[0] == "# k=2.0, f0=0, step=0.01"
    assert text.splitlines()[1] == "x,f"
    back = read_fringe_table(io.StringIO(text))
    assert np.array_equal(back.xs, table.xs) and np.array_equal(back.fs, table.fs)
    assert (back.k, back.f0, back.step) == (2.0, 0, 0.01)
