"""Analytic and semi-analytic fixtures: power-law divergence fields, Burgers
shock/rarefaction entropy solutions, a viscous Burgers solver, and reference
measures with known dimension.

The inviscid Burgers sampler stores exact cell averages of the entropy
solution (conservative sampling); the viscous solver is a first-order
conservative finite-volume scheme (local Lax-Friedrichs flux plus explicit
centered diffusion).  Robustness beats accuracy here: the solver's role is
to produce vanishing-viscosity dissipation measures whose totals are checked
against the shock entropy-production rate by extrapolation in nu.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from .aniso_measure import AtomicMeasure
from .fields import GriddedField, SpatialVectorField

__all__ = [
    "NumericalError",
    "PowerLawField",
    "RiemannDatum",
    "ViscousRun",
    "power_law_ball_mass",
    "power_law_vector_field",
    "adaptive_interval_quadrature",
    "burgers_entropy_solution",
    "burgers_smooth_solution",
    "burgers_dissipation_measure",
    "viscous_burgers_run",
    "viscous_profile",
    "time_singular_measure_fixture",
    "grid_measure",
    "shear_flow_field",
    "decaying_shear_field",
    "constant_field",
    "shock_entropy_rate",
]


class NumericalError(RuntimeError):
    """A run produced non-finite state or violated its stability condition."""


# ---------------------------------------------------------------------------
# Power-law divergence field (x |x|^(eps - d)).
# ---------------------------------------------------------------------------

def unit_sphere_area(d: int) -> float:
    return 2.0 * math.pi ** (d / 2.0) / math.gamma(d / 2.0)


@dataclass(frozen=True)
class PowerLawField:
    """V(x) = x |x|^(eps-d): integrable divergence eps/|x|^(d-eps), ball
    masses growing exactly like a power of the radius."""

    d: int
    eps: float

    def __post_init__(self):
        if not isinstance(self.d, int) or self.d < 2:
            raise ValueError(f"need integer d >= 2, got {self.d!r}")
        if not 0 < self.eps < self.d:
            raise ValueError(f"eps must lie in (0, d), got {self.eps!r}")

    @property
    def c_d(self) -> float:
        """Surface measure of the unit sphere (2*pi for d=2, 4*pi for d=3)."""
        return unit_sphere_area(self.d)

    def value(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        rho = np.sqrt(np.sum(x ** 2, axis=-1))
        safe = np.where(rho == 0, 1.0, rho)
        return x * np.where(rho == 0, 0.0, safe ** (self.eps - self.d))[..., None]

    def divergence(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        rho = np.sqrt(np.sum(x ** 2, axis=-1))
        safe = np.where(rho == 0, 1.0, rho)
        return np.where(rho == 0, np.inf, self.eps * safe ** (self.eps - self.d))


def adaptive_interval_quadrature(fn, lo: float, hi: float, rel_tol: float = 1e-8,
                                 max_depth: int = 60) -> float:
    """Adaptive Simpson quadrature by interval bisection to a relative tolerance.

    The error budget halves with each bisection, so the accepted panels sum
    to roughly rel_tol times the integral rather than accumulating.
    """

    def simpson(a, b, fa, fm, fb):
        return (b - a) / 6.0 * (fa + 4.0 * fm + fb)

    def recurse(a, b, fa, fm, fb, whole, tol, depth):
        m = 0.5 * (a + b)
        flm = fn(0.5 * (a + m))
        frm = fn(0.5 * (m + b))
        left = simpson(a, m, fa, flm, fm)
        right = simpson(m, b, fm, frm, fb)
        err = left + right - whole
        if depth >= max_depth or abs(err) <= 15.0 * tol:
            return left + right + err / 15.0
        return (recurse(a, m, fa, flm, fm, left, tol / 2.0, depth + 1)
                + recurse(m, b, fm, frm, fb, right, tol / 2.0, depth + 1))

    if hi <= lo:
        return 0.0
    fa, fb = fn(lo), fn(hi)
    fm = fn(0.5 * (lo + hi))
    whole = simpson(lo, hi, fa, fm, fb)
    tol = rel_tol * max(abs(whole), 1e-300)
    return recurse(lo, hi, fa, fm, fb, whole, tol, 0)


def power_law_ball_mass(field: PowerLawField, delta: float, rel_tol: float = 1e-8) -> float:
    """Mass the divergence assigns to the ball of radius delta about the origin.

    Radial reduction plus adaptive quadrature of eps * rho**(eps-1); the
    innermost dyadic slice uses the closed-form antiderivative rho**eps/eps to
    tame the integrable singularity at zero.
    """
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta!r}")
    n_octaves = 24
    inner = field.c_d * (delta * 2.0 ** -n_octaves) ** field.eps
    integrand = lambda rho: rho ** (field.eps - 1.0)
    tail = 0.0
    for k in range(n_octaves):
        a, b = delta * 2.0 ** -(k + 1), delta * 2.0 ** -k
        tail += adaptive_interval_quadrature(integrand, a, b, rel_tol)
    return inner + field.c_d * field.eps * tail


def power_law_vector_field(field: PowerLawField, a: float, b: float, nx: int) -> SpatialVectorField:
    """Grid samples of the power-law field; use an even nx so no node hits 0."""
    h = (b - a) / (nx - 1)
    axis = a + h * np.arange(nx)
    mesh = np.stack(np.meshgrid(*([axis] * field.d), indexing="ij"), axis=-1)
    return SpatialVectorField(field.d, a, b, nx, field.value(mesh))


# ---------------------------------------------------------------------------
# Inviscid Burgers entropy solutions.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RiemannDatum:
    u_l: float
    u_r: float
    x0: float = 0.0

    def __post_init__(self):
        if self.u_l == self.u_r:
            raise ValueError("degenerate datum: u_l must differ from u_r")

    @property
    def is_shock(self) -> bool:
        return self.u_l > self.u_r

    @property
    def shock_speed(self) -> float:
        return 0.5 * (self.u_l + self.u_r)

    @property
    def jump(self) -> float:
        return self.u_l - self.u_r


def shock_entropy_rate(datum: RiemannDatum) -> float:
    """Entropy production per unit time of the shock for the quadratic pair:
    (u_l - u_r)^3 / 12."""
    if not datum.is_shock:
        return 0.0
    return datum.jump ** 3 / 12.0


def _cell_average_shock(xl, xr, xs, ul, ur):
    """Exact average of the piecewise-constant profile over cells [xl, xr]."""
    frac_left = np.clip((xs - xl) / (xr - xl), 0.0, 1.0)
    return ul * frac_left + ur * (1.0 - frac_left)


def _cell_average_fan(xl, xr, t, datum: RiemannDatum):
    """Exact average of the rarefaction profile over cells [xl, xr] at time t > 0."""
    x0, ul, ur = datum.x0, datum.u_l, datum.u_r
    lo, hi = x0 + ul * t, x0 + ur * t

    def antiderivative(x):
        # integral of u(., t) from lo: ul left of lo, (x-x0)/t in the fan,
        # ur right of hi
        x = np.asarray(x, dtype=float)
        out = ul * (np.minimum(x, lo) - lo)
        mid = np.clip(x, lo, hi)
        out = out + ((mid - x0) ** 2 - (lo - x0) ** 2) / (2.0 * t)
        out = out + ur * np.maximum(x - hi, 0.0)
        return out

    return (antiderivative(xr) - antiderivative(xl)) / (xr - xl)


def burgers_entropy_solution(datum: RiemannDatum, a: float, b: float, nx: int,
                             T: float, nt: int) -> GriddedField:
    """Exact entropy solution of the Riemann problem, conservatively sampled.

    Each node carries the exact average of the solution over its cell
    [x - h/2, x + h/2] (clipped at the ends), so sampled column sums track
    the exact mass: for a shock the drift equals the flux imbalance
    f(u_l) - f(u_r) exactly.  Shock at x0 + t*(u_l+u_r)/2; a rarefaction fan
    when u_l < u_r.
    """
    h = (b - a) / (nx - 1)
    xs = a + h * np.arange(nx)
    xl = np.maximum(xs - h / 2.0, a)
    xr = np.minimum(xs + h / 2.0, b)
    t_axis = T / (nt - 1) * np.arange(nt)
    u = np.empty((nt, nx))
    for k, t in enumerate(t_axis):
        if datum.is_shock:
            u[k] = _cell_average_shock(xl, xr, datum.x0 + datum.shock_speed * t,
                                       datum.u_l, datum.u_r)
        elif t == 0:
            u[k] = _cell_average_shock(xl, xr, datum.x0, datum.u_l, datum.u_r)
        else:
            u[k] = _cell_average_fan(xl, xr, t, datum)
    return GriddedField(1, a, b, nx, T, nt, u[..., None], label="burgers_riemann")


def burgers_smooth_solution(a: float, b: float, nx: int, T: float, nt: int,
                            amplitude: float = 0.5, wavenumber: float = 2 * math.pi,
                            newton_steps: int = 60) -> GriddedField:
    """Pre-breaking smooth solution with initial data amplitude*sin(k x),
    evaluated by Newton iteration on the characteristic relation."""
    t_break = 1.0 / (amplitude * wavenumber)
    if T >= 0.8 * t_break:
        raise ValueError(f"T = {T} too close to breaking time {t_break:.4f}")
    h = (b - a) / (nx - 1)
    xs = a + h * np.arange(nx)
    t_axis = T / (nt - 1) * np.arange(nt)
    u = np.empty((nt, nx))
    for k, t in enumerate(t_axis):
        vals = amplitude * np.sin(wavenumber * xs)
        for _ in range(newton_steps):
            f = vals - amplitude * np.sin(wavenumber * (xs - vals * t))
            fp = 1.0 + amplitude * wavenumber * t * np.cos(wavenumber * (xs - vals * t))
            vals = vals - f / fp
        u[k] = vals
    return GriddedField(1, a, b, nx, T, nt, u[..., None], label="burgers_smooth")


def burgers_dissipation_measure(datum: RiemannDatum, T: float, n_atoms: int) -> AtomicMeasure:
    """Atoms along the shock path carrying the entropy-production rate.

    Atoms sit at times (k+1/2)*T/n, each holding rate*T/n, so the total mass
    equals (u_l-u_r)^3/12 * T exactly.  A rarefaction datum yields an empty
    measure labelled as such.
    """
    if not datum.is_shock:
        return AtomicMeasure(np.zeros((0, 1)), np.zeros(0), np.zeros(0), d=1,
                             label="rarefaction_no_shock")
    if n_atoms < 1:
        raise ValueError("need at least one atom")
    dt = T / n_atoms
    t = (np.arange(n_atoms) + 0.5) * dt
    x = datum.x0 + datum.shock_speed * t
    w = np.full(n_atoms, shock_entropy_rate(datum) * dt)
    return AtomicMeasure(x[:, None], t, w, d=1, label="burgers_shock_dissipation")


# ---------------------------------------------------------------------------
# Viscous Burgers solver.
# ---------------------------------------------------------------------------

@dataclass
class ViscousRun:
    nu: float
    datum: RiemannDatum | None
    bc: str
    field: GriddedField
    dissipation: AtomicMeasure | None = dc_field(repr=False, default=None)
    total_dissipation: float = 0.0
    dt_sub: float = 0.0
    steps: int = 0
    steady_time: float | None = None
    stability_margin: float = 0.0

    def manifest(self) -> dict:
        return {
            "nu": self.nu,
            "bc": self.bc,
            "nx": self.field.nx,
            "nt": self.field.nt,
            "a": self.field.a,
            "b": self.field.b,
            "T": self.field.T,
            "dt_sub": self.dt_sub,
            "steps": self.steps,
            "steady_time": self.steady_time,
            "stability_margin": self.stability_margin,
            "total_dissipation": self.total_dissipation,
        }


def viscous_profile(datum: RiemannDatum, nu: float, x, t: float = 0.0) -> np.ndarray:
    """Traveling-wave profile of the viscous shock: speed (u_l+u_r)/2, width ~ nu/jump."""
    s = datum.shock_speed
    half = 0.5 * datum.jump
    arg = half * (np.asarray(x) - datum.x0 - s * t) / (2.0 * nu)
    return s - half * np.tanh(arg)


def viscous_burgers_run(datum: RiemannDatum | None, nu: float, a: float, b: float,
                        nx: int, T: float, nt: int, bc: str = "dirichlet_states",
                        initial: str = "riemann", initial_data=None,
                        steady_tol: float = 1e-9, safety: float = 0.9) -> ViscousRun:
    """Explicit conservative finite-volume run of viscous Burgers.

    Local Lax-Friedrichs flux for u^2/2 plus centered second differences for
    the diffusion; the substep obeys dt <= 0.9*min(h/max|u|, h^2/(2 nu)).
    ``bc='dirichlet_states'`` pins the Riemann states at the ends,
    ``bc='periodic'`` wraps.  ``initial`` selects the sharp jump or the
    viscous traveling-wave profile; ``initial_data`` overrides both.

    Once consecutive states stop changing (max update below ``steady_tol``
    per unit time) the run freezes: remaining samples repeat the steady
    profile and the dissipation total extends linearly.  Standing-shock runs
    reach that state quickly, which is what makes small-nu sweeps affordable.

    Returns the run with its sampled field, the cell dissipation measure
    (atoms weighted nu*u_x^2*h*dt at sample times), and the accumulated
    dissipation total over [0, T].
    """
    if not nu > 0:
        raise ValueError(f"nu must be positive, got {nu!r}")
    if bc not in ("dirichlet_states", "periodic"):
        raise ValueError(f"unknown bc {bc!r}")
    if datum is None and initial_data is None:
        raise ValueError("need a Riemann datum or explicit initial data")
    h = (b - a) / (nx - 1)
    xs = a + h * np.arange(nx)
    if initial_data is not None:
        u = np.array(initial_data, dtype=float)
        if u.shape != (nx,):
            raise ValueError(f"initial data must have shape ({nx},)")
    elif initial == "viscous_profile":
        u = viscous_profile(datum, nu, xs)
    elif initial == "riemann":
        u = np.where(xs < datum.x0, datum.u_l, datum.u_r).astype(float)
        on_jump = xs == datum.x0
        u[on_jump] = 0.5 * (datum.u_l + datum.u_r)
    else:
        raise ValueError(f"unknown initial profile {initial!r}")

    umax = max(float(np.abs(u).max()), 1e-12)
    if datum is not None:
        umax = max(umax, abs(datum.u_l), abs(datum.u_r))
    dt_limit = min(h / umax, h * h / (2.0 * nu))
    dt_sub = safety * dt_limit
    n_sub = max(int(math.ceil(T / dt_sub)), 1)
    dt_sub = T / n_sub

    sample_times = T / (nt - 1) * np.arange(nt)
    snapshots = np.empty((nt, nx))
    snapshots[0] = u
    next_sample = 1

    total = 0.0
    rate = 0.0
    steady_time = None
    check_every = 64
    last_checked = u.copy()

    for step in range(1, n_sub + 1):
        un = _viscous_step(u, h, dt_sub, nu, datum, bc)
        ux = (un[2:] - un[:-2]) / (2.0 * h)
        rate = nu * float(np.dot(ux, ux)) * h
        if bc == "periodic":
            # the wrap-around node (stored twice) enters the sum once
            edge = (un[1] - un[-2]) / (2.0 * h)
            rate += nu * edge * edge * h
        total += rate * dt_sub
        t_now = step * dt_sub
        while next_sample < nt and sample_times[next_sample] <= t_now + 1e-12:
            snapshots[next_sample] = un
            next_sample += 1
        u = un
        if step % check_every == 0:
            if not np.all(np.isfinite(u)):
                raise NumericalError(f"non-finite state at step {step}")
            drift = float(np.abs(u - last_checked).max()) / (check_every * dt_sub)
            if drift < steady_tol:
                steady_time = t_now
                break
            last_checked = u.copy()
    if not np.all(np.isfinite(u)):
        raise NumericalError("non-finite state at the end of the run")

    if steady_time is not None:
        total += rate * (T - steady_time)
    while next_sample < nt:
        snapshots[next_sample] = u
        next_sample += 1

    field = GriddedField(1, a, b, nx, T, nt, snapshots[..., None], label="viscous_burgers")
    dt_sample = T / (nt - 1)
    ux_all = np.gradient(snapshots, h, axis=1)
    weights = nu * ux_all ** 2 * h * dt_sample
    mesh_x = np.broadcast_to(xs, snapshots.shape).ravel()
    mesh_t = np.repeat(sample_times, nx)
    dissipation = AtomicMeasure(mesh_x[:, None], mesh_t, weights.ravel(), d=1,
                                label="viscous_dissipation_cells")
    return ViscousRun(
        nu=nu, datum=datum, bc=bc, field=field, dissipation=dissipation,
        total_dissipation=total, dt_sub=dt_sub,
        steps=step, steady_time=steady_time,
        stability_margin=dt_sub / dt_limit,
    )


def _viscous_step(u, h, dt, nu, datum, bc):
    if bc == "periodic":
        ue = np.concatenate([[u[-2]], u, [u[1]]])
    else:
        ue = np.concatenate([[u[0]], u, [u[-1]]])
    f = 0.5 * ue * ue
    speed = np.maximum(np.abs(ue[:-1]), np.abs(ue[1:]))
    flux = 0.5 * (f[:-1] + f[1:]) - 0.5 * speed * (ue[1:] - ue[:-1])
    un = u - dt / h * (flux[1:] - flux[:-1]) + nu * dt / h ** 2 * (ue[2:] - 2 * u + ue[:-2])
    if bc == "dirichlet_states":
        un[0] = datum.u_l if datum is not None else u[0]
        un[-1] = datum.u_r if datum is not None else u[-1]
    else:
        un[-1] = un[0]
    return un


# ---------------------------------------------------------------------------
# Reference measures and smooth fields.
# ---------------------------------------------------------------------------

def time_singular_measure_fixture(d: int, n_atoms: int, t_star: float = 0.5,
                                  seed: int = 0, lattice: bool = False) -> AtomicMeasure:
    """Uniform atoms on [0,1]^d at the single instant t_star.

    The geometry of a dissipation measure concentrated at one time: its
    isotropic space-time dimension is d.  ``lattice=True`` places
    floor(n**(1/d))**d atoms deterministically on the midpoint lattice.
    """
    if n_atoms < 1:
        raise ValueError("need at least one atom")
    if lattice:
        m = int(round(n_atoms ** (1.0 / d)))
        axes = (np.arange(m) + 0.5) / m
        mesh = np.stack(np.meshgrid(*([axes] * d), indexing="ij"), axis=-1).reshape(-1, d)
        n = mesh.shape[0]
        return AtomicMeasure(mesh, np.full(n, t_star), np.full(n, 1.0 / n), d=d,
                             label="time_singular_lattice")
    rng = np.random.default_rng(seed)
    pos = rng.random((n_atoms, d))
    return AtomicMeasure(pos, np.full(n_atoms, t_star), np.full(n_atoms, 1.0 / n_atoms),
                         d=d, label="time_singular")


def grid_measure(d: int, m_space: int, m_time: int, total_mass: float = 1.0) -> AtomicMeasure:
    """Midpoint-lattice approximation of Lebesgue measure on [0,1]^d x [0,1]."""
    axes_x = (np.arange(m_space) + 0.5) / m_space
    axes_t = (np.arange(m_time) + 0.5) / m_time
    grids = np.meshgrid(*([axes_x] * d + [axes_t]), indexing="ij")
    pts = np.stack(grids, axis=-1).reshape(-1, d + 1)
    n = pts.shape[0]
    return AtomicMeasure(pts[:, :d], pts[:, d], np.full(n, total_mass / n), d=d,
                         label="uniform_grid")


def constant_field(value, d: int, a: float, b: float, nx: int, T: float, nt: int,
                   pressure: float = 0.0) -> GriddedField:
    """Spatially constant velocity with constant pressure: an exact solution."""
    value = np.asarray(value, dtype=float).reshape(d)
    shape = (nt,) + (nx,) * d
    u = np.broadcast_to(value, shape + (d,)).copy()
    p = np.full(shape, float(pressure))
    return GriddedField(d, a, b, nx, T, nt, u, p=p, label="constant")


def shear_flow_field(profile, a: float, b: float, nx: int, T: float, nt: int) -> GriddedField:
    """Steady planar shear u = (f(y), 0), p = 0: an exact inviscid solution."""
    h = (b - a) / (nx - 1)
    ys = a + h * np.arange(nx)
    fy = np.asarray(profile(ys), dtype=float)
    u = np.zeros((nt, nx, nx, 2))
    u[..., 0] = fy[None, None, :]
    p = np.zeros((nt, nx, nx))
    return GriddedField(2, a, b, nx, T, nt, u, p=p, label="shear")


def decaying_shear_field(nu: float, k: float, a: float, b: float, nx: int,
                         T: float, nt: int) -> GriddedField:
    """u = (exp(-nu k^2 t) sin(k y), 0), p = 0: exact viscous shear decay."""
    h = (b - a) / (nx - 1)
    ys = a + h * np.arange(nx)
    ts = T / (nt - 1) * np.arange(nt)
    amp = np.exp(-nu * k * k * ts)
    u = np.zeros((nt, nx, nx, 2))
    u[..., 0] = amp[:, None, None] * np.sin(k * ys)[None, None, :]
    p = np.zeros((nt, nx, nx))
    return GriddedField(2, a, b, nx, T, nt, u, p=p, label="decaying_shear")
