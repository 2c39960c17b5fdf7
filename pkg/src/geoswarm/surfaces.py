"""Surfaces given as height graphs z = f(x, y) over a 2-D chart.

A surface carries its height function together with first and second
derivatives, from which the induced metric

    g_ij = delta_ij + f_i * f_j

and the Christoffel symbols of the Levi-Civita connection

    Gamma^k_ij = f_k * f_ij / (1 + f_x^2 + f_y^2)

are evaluated pointwise.  Built-in surfaces use hard-coded analytic
derivatives; custom surfaces fall back to central finite differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import EvaluationError

# Step for the central-difference fallbacks on custom surfaces.
FD_STEP = 1e-5


@dataclass(frozen=True)
class MetricTensor:
    """Induced metric components at one chart point (g21 = g12)."""

    g11: float
    g12: float
    g22: float

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.g11, self.g12], [self.g12, self.g22]])

    @property
    def det(self) -> float:
        return self.g11 * self.g22 - self.g12 * self.g12


@dataclass(frozen=True)
class ChristoffelSymbols:
    """Connection coefficients gamma[k][i][j], symmetric in (i, j)."""

    xxx: float
    xxy: float
    xyy: float
    yxx: float
    yxy: float
    yyy: float

    @property
    def array(self) -> np.ndarray:
        """Dense (2, 2, 2) array indexed [upper, lower_i, lower_j]."""
        return np.array(
            [
                [[self.xxx, self.xxy], [self.xxy, self.xyy]],
                [[self.yxx, self.yxy], [self.yxy, self.yyy]],
            ]
        )

    def __getitem__(self, idx):
        return self.array[idx]


def inner(g: MetricTensor, u: Sequence[float], v: Sequence[float]) -> float:
    """Riemannian inner product u^T g v of two tangent vectors."""
    ux, uy = float(u[0]), float(u[1])
    vx, vy = float(v[0]), float(v[1])
    return g.g11 * ux * vx + g.g12 * (ux * vy + uy * vx) + g.g22 * uy * vy


class Surface:
    """A graph surface with pointwise metric and connection evaluation.

    Use the classmethods for the built-in shapes or :meth:`custom` for an
    arbitrary height function.  All evaluation methods are pure and safe
    to call concurrently.
    """

    def __init__(
        self,
        kind: str,
        f: Callable[[float, float], float],
        grad: Optional[Callable[[float, float], tuple]] = None,
        hess: Optional[Callable[[float, float], tuple]] = None,
    ):
        self.kind = kind
        self._f = f
        self._grad = grad if grad is not None else self._fd_grad
        self._hess = hess if hess is not None else self._fd_hess

    def __repr__(self):
        return f"Surface(kind={self.kind!r})"

    # -- constructors -------------------------------------------------

    @classmethod
    def elliptic_paraboloid(cls) -> "Surface":
        """Bowl z = (x^2 + y^2)/30, curved upward everywhere."""
        return cls(
            "type1",
            lambda x, y: (x * x + y * y) / 30.0,
            lambda x, y: (x / 15.0, y / 15.0),
            lambda x, y: (1.0 / 15.0, 0.0, 1.0 / 15.0),
        )

    @classmethod
    def hyperbolic_paraboloid(cls) -> "Surface":
        """Saddle z = (x^2 - y^2)/30."""
        return cls(
            "type2",
            lambda x, y: (x * x - y * y) / 30.0,
            lambda x, y: (x / 15.0, -y / 15.0),
            lambda x, y: (1.0 / 15.0, 0.0, -1.0 / 15.0),
        )

    @classmethod
    def trig_waves(cls) -> "Surface":
        """Egg-carton z = sin(x/3) + cos(y/3), mixed curvature sign."""
        return cls(
            "type3",
            lambda x, y: math.sin(x / 3.0) + math.cos(y / 3.0),
            lambda x, y: (math.cos(x / 3.0) / 3.0, -math.sin(y / 3.0) / 3.0),
            lambda x, y: (-math.sin(x / 3.0) / 9.0, 0.0, -math.cos(y / 3.0) / 9.0),
        )

    @classmethod
    def flat(cls) -> "Surface":
        """The plane z = 0 (identity metric, zero connection)."""
        return cls(
            "flat",
            lambda x, y: 0.0,
            lambda x, y: (0.0, 0.0),
            lambda x, y: (0.0, 0.0, 0.0),
        )

    @classmethod
    def custom(
        cls,
        f: Callable[[float, float], float],
        grad: Optional[Callable[[float, float], tuple]] = None,
        hess: Optional[Callable[[float, float], tuple]] = None,
    ) -> "Surface":
        """Surface from a scalar height function.

        ``grad`` returns (f_x, f_y) and ``hess`` returns (f_xx, f_xy,
        f_yy); either may be omitted, in which case central finite
        differences with step ``FD_STEP`` are used.
        """
        return cls("custom", f, grad, hess)

    @classmethod
    def builtin(cls, kind: str) -> "Surface":
        try:
            return _BUILTINS[kind]()
        except KeyError:
            raise ValueError(f"unknown built-in surface kind {kind!r}") from None

    # -- finite-difference fallbacks ----------------------------------

    def _fd_grad(self, x: float, y: float) -> tuple:
        h = FD_STEP
        fx = (self._f(x + h, y) - self._f(x - h, y)) / (2.0 * h)
        fy = (self._f(x, y + h) - self._f(x, y - h)) / (2.0 * h)
        return fx, fy

    def _fd_hess(self, x: float, y: float) -> tuple:
        # Difference the gradient (analytic when supplied) rather than
        # double-differencing f, which would lose ~half the digits.
        h = FD_STEP
        gxp = self._grad(x + h, y)
        gxm = self._grad(x - h, y)
        gyp = self._grad(x, y + h)
        gym = self._grad(x, y - h)
        fxx = (gxp[0] - gxm[0]) / (2.0 * h)
        fyy = (gyp[1] - gym[1]) / (2.0 * h)
        fxy = 0.5 * ((gyp[0] - gym[0]) / (2.0 * h) + (gxp[1] - gxm[1]) / (2.0 * h))
        return fxx, fxy, fyy

    # -- pointwise evaluation ------------------------------------------

    def height(self, p: Sequence[float]) -> float:
        """Height f(p); raises EvaluationError on a non-finite result."""
        z = float(self._f(float(p[0]), float(p[1])))
        if not math.isfinite(z):
            raise EvaluationError(f"height not finite at {tuple(p)}")
        return z

    def gradient(self, p: Sequence[float]) -> tuple:
        return self._grad(float(p[0]), float(p[1]))

    def hessian(self, p: Sequence[float]) -> tuple:
        """Second derivatives (f_xx, f_xy, f_yy)."""
        return self._hess(float(p[0]), float(p[1]))

    def metric_at(self, p: Sequence[float]) -> MetricTensor:
        """Induced metric g_ij = delta_ij + f_i f_j at p."""
        fx, fy = self._grad(float(p[0]), float(p[1]))
        return MetricTensor(1.0 + fx * fx, fx * fy, 1.0 + fy * fy)

    def christoffel_at(self, p: Sequence[float]) -> ChristoffelSymbols:
        """Connection coefficients at p via the graph closed form."""
        return ChristoffelSymbols(*self.gamma_terms(float(p[0]), float(p[1])))

    def gamma_terms(self, x: float, y: float) -> tuple:
        """Fast path: the six independent Christoffel values as floats.

        Order: (xxx, xxy, xyy, yxx, yxy, yyy) with gamma[k][i][j] =
        f_k f_ij / (1 + |grad f|^2).
        """
        fx, fy = self._grad(x, y)
        fxx, fxy, fyy = self._hess(x, y)
        d = 1.0 + fx * fx + fy * fy
        return (
            fx * fxx / d,
            fx * fxy / d,
            fx * fyy / d,
            fy * fxx / d,
            fy * fxy / d,
            fy * fyy / d,
        )


_BUILTINS = {
    "type1": Surface.elliptic_paraboloid,
    "type2": Surface.hyperbolic_paraboloid,
    "type3": Surface.trig_waves,
    "flat": Surface.flat,
}
