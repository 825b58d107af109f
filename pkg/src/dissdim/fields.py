"""Uniform space-time grids carrying velocity (and optional pressure/scalar) samples."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["GriddedField", "SpatialVectorField"]


@dataclass
class GriddedField:
    """Samples on the node grid x_i = a + i*h (per axis), t_k = k*dt.

    ``u`` has shape (nt, nx, ..., nx, d) with d spatial axes of length nx;
    ``p`` and ``theta`` drop the trailing component axis.  Spacings follow the
    node convention h = (b-a)/(nx-1), dt = T/(nt-1).
    """

    d: int
    a: float
    b: float
    nx: int
    T: float
    nt: int
    u: np.ndarray
    p: np.ndarray | None = None
    theta: np.ndarray | None = None
    alpha_hint: float | None = None
    label: str = ""

    def __post_init__(self):
        if self.d < 1 or self.nx < 2 or self.nt < 2:
            raise ValueError("need d >= 1, nx >= 2, nt >= 2")
        if not (self.b > self.a and self.T > 0):
            raise ValueError("need b > a and T > 0")
        expected = (self.nt,) + (self.nx,) * self.d + (self.d,)
        self.u = np.asarray(self.u, dtype=float)
        if self.u.shape != expected:
            raise ValueError(f"u has shape {self.u.shape}, expected {expected}")
        for name in ("p", "theta"):
            arr = getattr(self, name)
            if arr is not None:
                arr = np.asarray(arr, dtype=float)
                if arr.shape != expected[:-1]:
                    raise ValueError(f"{name} has shape {arr.shape}, expected {expected[:-1]}")
                if not np.all(np.isfinite(arr)):
                    raise ValueError(f"{name} contains non-finite samples")
                setattr(self, name, arr)
        if not np.all(np.isfinite(self.u)):
            raise ValueError("u contains non-finite samples")

    @property
    def h(self) -> float:
        return (self.b - self.a) / (self.nx - 1)

    @property
    def dt(self) -> float:
        return self.T / (self.nt - 1)

    @property
    def x_axis(self) -> np.ndarray:
        return self.a + self.h * np.arange(self.nx)

    @property
    def t_axis(self) -> np.ndarray:
        return self.dt * np.arange(self.nt)

    def spatial_mesh(self) -> np.ndarray:
        """Node coordinates as an array of shape (nx, ..., nx, d)."""
        axes = np.meshgrid(*([self.x_axis] * self.d), indexing="ij")
        return np.stack(axes, axis=-1)

    def axis_weights(self) -> tuple[np.ndarray, np.ndarray]:
        """Trapezoidal node weights (wx per axis, wt), i.e. midpoint weights
        of the node-centred cells clipped to the domain."""
        wx = np.full(self.nx, self.h)
        wx[0] = wx[-1] = self.h / 2
        wt = np.full(self.nt, self.dt)
        wt[0] = wt[-1] = self.dt / 2
        return wx, wt

    def spatial_weights(self) -> np.ndarray:
        """Product quadrature weights over the spatial axes, shape (nx,)*d."""
        wx, _ = self.axis_weights()
        out = wx
        for _ in range(self.d - 1):
            out = np.multiply.outer(out, wx)
        return out

    def speed(self) -> np.ndarray:
        """Euclidean velocity magnitude per node, shape (nt, nx, ..., nx)."""
        return np.sqrt(np.sum(self.u ** 2, axis=-1))

    def grad_squared(self) -> np.ndarray:
        """|grad u|^2 by centered differences (one-sided at the boundary)."""
        out = np.zeros(self.u.shape[:-1])
        for comp in range(self.d):
            for axis in range(self.d):
                g = np.gradient(self.u[..., comp], self.h, axis=1 + axis)
                out += g ** 2
        return out


@dataclass
class SpatialVectorField:
    """A d-dimensional vector field sampled on the node grid of [a, b]^d."""

    d: int
    a: float
    b: float
    nx: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        expected = (self.nx,) * self.d + (self.d,)
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != expected:
            raise ValueError(f"values have shape {self.values.shape}, expected {expected}")

    @property
    def h(self) -> float:
        return (self.b - self.a) / (self.nx - 1)

    @property
    def x_axis(self) -> np.ndarray:
        return self.a + self.h * np.arange(self.nx)

    def mesh(self) -> np.ndarray:
        axes = np.meshgrid(*([self.x_axis] * self.d), indexing="ij")
        return np.stack(axes, axis=-1)

    def weights(self) -> np.ndarray:
        wx = np.full(self.nx, self.h)
        wx[0] = wx[-1] = self.h / 2
        out = wx
        for _ in range(self.d - 1):
            out = np.multiply.outer(out, wx)
        return out

    def divergence(self) -> np.ndarray:
        """Finite-difference divergence on the grid."""
        out = np.zeros(self.values.shape[:-1])
        for axis in range(self.d):
            out += np.gradient(self.values[..., axis], self.h, axis=axis)
        return out
