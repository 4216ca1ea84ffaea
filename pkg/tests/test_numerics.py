import numpy as np
import pytest

from dressedphase.errors import GridError
from dressedphase.numerics import check_monotone_grid, cumulative_simpson


@pytest.mark.parametrize("n", [11, 12, 601, 600])
def test_exact_for_quadratics(n):
    t = np.linspace(-1.0, 2.0, n)
    f = 3.0 * t**2 - 2.0 * t + 0.5
    exact = t**3 - t**2 + 0.5 * t - (-1.0 - 1.0 - 0.5)
    out = cumulative_simpson(f, t)
    assert np.max(np.abs(out - exact)) < 1e-12


def test_fourth_order_convergence():
    def err(n):
        t = np.linspace(0.0, 3.0, n)
        out = cumulative_simpson(np.sin(t), t)
        return np.max(np.abs(out - (1.0 - np.cos(t))))

    assert err(201) / err(401) > 12.0  # ~16 for O(h^4)


def test_complex_integrand():
    t = np.linspace(0.0, 2.0, 501)
    out = cumulative_simpson(np.exp(1j * t), t)
    exact = (np.exp(1j * t) - 1.0) / 1j
    assert np.max(np.abs(out - exact)) < 1e-9


def test_nonuniform_grid():
    rng = np.random.default_rng(7)
    t = np.sort(rng.uniform(0.0, 3.0, 400))
    t[0], t[-1] = 0.0, 3.0
    out = cumulative_simpson(np.cos(t), t)
    assert abs(out[-1] - np.sin(3.0)) < 1e-5


def test_grid_validation():
    with pytest.raises(GridError):
        cumulative_simpson(np.ones(3), np.array([0.0, 1.0, 1.0]))
    with pytest.raises(GridError):
        cumulative_simpson(np.ones(2), np.array([0.0, 1.0]))
    with pytest.raises(GridError):
        cumulative_simpson(np.ones(4), np.array([0.0, 1.0, 2.0]))
    with pytest.raises(GridError):
        check_monotone_grid(np.array([[0.0, 1.0]]))
