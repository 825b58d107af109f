import pytest

from dissdim import fixtures as fx

_RUN_CACHE = {}

STANDING_SHOCK = fx.RiemannDatum(1.0, -1.0)


def standing_shock_run(nu, T=1.0, nt=401, width_factor=30.0, h_factor=0.05):
    """Cached standing-shock viscous runs; grids scale with the shock width."""
    key = (nu, T, nt, width_factor, h_factor)
    if key not in _RUN_CACHE:
        hw = width_factor * nu
        h = h_factor * nu
        nx = int(round(2 * hw / h)) + 1
        _RUN_CACHE[key] = fx.viscous_burgers_run(
            STANDING_SHOCK, nu, -hw, hw, nx, T, nt, initial="viscous_profile"
        )
    return _RUN_CACHE[key]


@pytest.fixture(scope="session")
def shock_runs():
    return standing_shock_run
