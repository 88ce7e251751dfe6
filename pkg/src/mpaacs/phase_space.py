"""Wigner functions, sections and marginals.

Phase-space points are given either as complex ``beta`` or as quadrature
coordinates ``(x, y)`` with ``beta = (x + i y) / sqrt(2)``.

Three independent evaluators exist:

* :func:`wigner_analytic` -- the Laguerre closed form,
* :func:`wigner_generating` -- derivative extraction of the generating function,
* :func:`wigner_fock_sum` -- displaced parity of a truncated density matrix,
  with the displacement built by matrix exponentiation.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import kernels
from .special import QuadraticExponent, extract_derivative, laguerre
from .state import (
    DensityMatrix,
    MpaacsParams,
    StateClass,
    classify_special_case,
    generating_exponent_norm,
)

SQRT2 = math.sqrt(2.0)
WIGNER_LOWER_BOUND = -2.0 / math.pi


class IntegrationWindowWarning(RuntimeWarning):
    """The y-integration window of a marginal drops a non-negligible share of mass."""


@dataclass(frozen=True)
class PhaseSpaceGrid:
    x_min: float
    x_max: float
    y_min: float
    y_max: float
    nx: int
    ny: int

    def __post_init__(self):
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise ValueError("grid bounds must satisfy x_min < x_max and y_min < y_max")
        if self.nx < 2 or self.ny < 2:
            raise ValueError("grid needs at least two samples per axis")

    @property
    def xs(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.nx)

    @property
    def ys(self) -> np.ndarray:
        return np.linspace(self.y_min, self.y_max, self.ny)

    @classmethod
    def square(cls, half_width: float, n: int) -> "PhaseSpaceGrid":
        return cls(-half_width, half_width, -half_width, half_width, n, n)

    @classmethod
    def default_for(cls, params: MpaacsParams) -> "PhaseSpaceGrid":
        """[-4, 4]^2 at 101 x 101 for |g alpha| <= 2, widened (same spacing) beyond."""
        u = params.amplitude
        if u <= 2:
            return cls.square(4.0, 101)
        half = 2 * SQRT2 * u + 4.0
        return cls.square(half, int(math.ceil(2 * half / 0.08)) + 1)


@dataclass(frozen=True, eq=False)
class WignerField:
    grid: PhaseSpaceGrid
    values: np.ndarray  # values[i, j] = W(xs[i], ys[j])
    integral: float
    min_value: float
    min_location: tuple[float, float]


def beta_from_xy(x, y):
    return (x + 1j * y) / SQRT2


# ---------------------------------------------------------------------------
# closed form
# ---------------------------------------------------------------------------

def wigner_analytic(params: MpaacsParams, beta: complex) -> float:
    """W(beta) = 2 (-1)^m L_m(|2 beta - g alpha|^2) exp(-2|beta - g alpha|^2) / (pi L_m(-|g alpha|^2))."""
    m, ga = params.m, params.amplified
    beta = complex(beta)
    num = laguerre(m, abs(2 * beta - ga) ** 2)
    den = laguerre(m, -abs(ga) ** 2)
    sign = -1.0 if m % 2 else 1.0
    return sign * 2.0 * num / (math.pi * den) * math.exp(-2.0 * abs(beta - ga) ** 2)


def wigner_values(params: MpaacsParams, xs, ys) -> np.ndarray:
    """Closed-form W on the outer-product grid ``xs`` x ``ys``."""
    inv_norm = 1.0 / laguerre(params.m, -params.amplitude ** 2)
    return kernels.wigner_grid(xs, ys, params.amplified, params.m, inv_norm)


def wigner_reduced(params: MpaacsParams, beta: complex) -> float:
    """Textbook Wigner function of the named special case that ``params`` reduces to.

    Raises ``ValueError`` for parameters without a simpler named form.
    """
    kind = classify_special_case(params)
    beta = complex(beta)
    m, a, g = params.m, params.alpha, params.gain
    if kind is StateClass.VACUUM:
        return 2 / math.pi * math.exp(-2 * abs(beta) ** 2)
    if kind is StateClass.COHERENT:
        return 2 / math.pi * math.exp(-2 * abs(beta - a) ** 2)
    if kind is StateClass.AMPLIFIED_COHERENT:
        return 2 / math.pi * math.exp(-2 * abs(beta - g * a) ** 2)
    if kind is StateClass.FOCK:
        return 2 / math.pi * (-1) ** m * math.exp(-2 * abs(beta) ** 2) * laguerre(m, 4 * abs(beta) ** 2)
    if kind is StateClass.PHOTON_ADDED_COHERENT:
        return (2 * (-1) ** m * laguerre(m, abs(2 * beta - a) ** 2)
                / (math.pi * laguerre(m, -abs(a) ** 2)) * math.exp(-2 * abs(beta - a) ** 2))
    raise ValueError(f"{params} has no reduced closed form")


# ---------------------------------------------------------------------------
# generating-function route
# ---------------------------------------------------------------------------

def wigner_generating(params: MpaacsParams, beta: complex, route: str = "B") -> float:
    """W(beta) from the (s^m, t^m) derivative of the phase-space generating function.

    Both the numerator and the normalization are obtained by derivative
    extraction; no Laguerre evaluation is involved.
    """
    m, g, a = params.m, params.gain, params.alpha
    b = complex(beta)
    if route == "A":
        g2 = g * g
        q = QuadraticExponent(
            ("s", "t"),
            linear={"t": -g2 * a + 2 * g * b, "s": -g2 * a.conjugate() + 2 * g * b.conjugate()},
            quadratic={("s", "t"): -g2},
        )
    elif route == "B":
        q = QuadraticExponent(
            ("s", "t"),
            linear={"t": -g * a + 2 * b, "s": -g * a.conjugate() + 2 * b.conjugate()},
            quadratic={("s", "t"): -1.0},
        )
    else:
        raise ValueError(f"route must be 'A' or 'B', got {route!r}")
    # exp(-(g^2+1)|a|^2 - 2|b|^2 + 2g(a b* + a* b)) / exp((g^2-1)|a|^2) = exp(-2|b - g a|^2)
    num = extract_derivative(q, {"s": m, "t": m})
    norm = extract_derivative(generating_exponent_norm(params, route), {"s": m, "t": m})
    w = 2.0 / math.pi * math.exp(-2.0 * abs(b - g * a) ** 2) * num / norm
    return float(w.real)


# ---------------------------------------------------------------------------
# displaced-parity oracle
# ---------------------------------------------------------------------------

def oracle_dimension(rho: DensityMatrix, beta_max: float) -> int:
    """Basis size for the truncated displacement: K + 20 ceil(|beta|) + 40."""
    return rho.dim + 20 * int(math.ceil(beta_max)) + 40


def _lowering(dim):
    return np.diag(np.sqrt(np.arange(1, dim, dtype=np.float64)), 1)


def displacement_matrix(beta: complex, dim: int) -> np.ndarray:
    """expm(beta a^dag - beta* a) in a truncated Fock basis of size ``dim``."""
    a = _lowering(dim)
    beta = complex(beta)
    return scipy.linalg.expm(beta * a.T - beta.conjugate() * a)


def _check_rho(rho: DensityMatrix):
    if rho.trace_defect > 1e-10:
        raise ValueError(f"density matrix trace defect {rho.trace_defect:g} exceeds 1e-10; oracle not certifiable")


def _rho_factors(rho: DensityMatrix):
    """Eigen-decomposition rho = sum_i w_i v_i v_i^dag, keeping w_i > 1e-16."""
    w, v = np.linalg.eigh(rho.entries)
    keep = w > 1e-16
    return w[keep], v[:, keep]


def _pad(vectors, dim):
    out = np.zeros((dim, vectors.shape[1]), dtype=np.complex128)
    out[: vectors.shape[0]] = vectors
    return out


def wigner_fock_sum(rho: DensityMatrix, beta: complex) -> float:
    """(2/pi) sum_n (-1)^n <n| D^dag rho D |n> with D = D(beta) from ``expm``."""
    _check_rho(rho)
    dim = oracle_dimension(rho, abs(beta))
    w, v = _rho_factors(rho)
    d = displacement_matrix(beta, dim)
    amps = d.conj().T @ _pad(v, dim)
    return float(2.0 / math.pi * (kernels.parity_weight(amps) @ w))


def wigner_fock_sum_grid(rho: DensityMatrix, xs, ys) -> np.ndarray:
    """Displaced-parity Wigner function on ``xs`` x ``ys``.

    Uses D(r e^{i phi}) = R(phi) D(r) R(phi)^dag with R(phi) = exp(i phi n) and
    D(r) = expm(r (a^dag - a)) taken from a single eigendecomposition of the
    truncated Hermitian generator i(a^dag - a); per point the cost is one
    matrix-vector product.
    """
    _check_rho(rho)
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    betas = beta_from_xy(xs[:, None], ys[None, :]).ravel()
    dim = oracle_dimension(rho, np.abs(betas).max())
    w, v = _rho_factors(rho)
    v = _pad(v, dim)
    a = _lowering(dim)
    lam, vecs = np.linalg.eigh(1j * (a.T - a))
    n = np.arange(dim)
    out = np.empty(betas.shape)
    for idx, b in enumerate(betas):
        r, phi = abs(b), math.atan2(b.imag, b.real)
        rot = np.exp(1j * phi * n)
        # D^dag v = R D(r)^dag R^dag v, with D(r)^dag = V exp(+i r lam) V^dag
        x = rot.conj()[:, None] * v
        x = vecs @ (np.exp(1j * r * lam)[:, None] * (vecs.conj().T @ x))
        x = rot[:, None] * x
        out[idx] = 2.0 / math.pi * (kernels.parity_weight(x) @ w)
    return out.reshape(len(xs), len(ys))


# ---------------------------------------------------------------------------
# grids, sections, marginals
# ---------------------------------------------------------------------------

def _trapezoid_2d(values, xs, ys):
    return float(np.trapezoid(np.trapezoid(values, ys, axis=1), xs))


def wigner_grid(params: MpaacsParams, grid: PhaseSpaceGrid | None = None) -> WignerField:
    """Sample the closed form on ``grid`` and summarize it.

    ``integral`` is the trapezoid estimate of the integral over d^2 beta =
    dx dy / 2, so it approaches 1 on a support-covering grid.
    """
    grid = PhaseSpaceGrid.default_for(params) if grid is None else grid
    xs, ys = grid.xs, grid.ys
    values = wigner_values(params, xs, ys)
    values.setflags(write=False)
    i, j = np.unravel_index(int(np.argmin(values)), values.shape)
    return WignerField(
        grid=grid,
        values=values,
        integral=0.5 * _trapezoid_2d(values, xs, ys),
        min_value=float(values[i, j]),
        min_location=(float(xs[i]), float(ys[j])),
    )


def section_y0(params: MpaacsParams, x_samples) -> list[tuple[float, float]]:
    xs = np.asarray(x_samples, dtype=np.float64)
    vals = wigner_values(params, xs, np.zeros(1))[:, 0]
    return [(float(x), float(w)) for x, w in zip(xs, vals)]


def clipped_mass(params: MpaacsParams, y_min: float, y_max: float, pad: float = 10.0, step: float = 0.05) -> float:
    """Estimate of |W| mass outside y_min <= y <= y_max (over all x)."""
    cx = SQRT2 * params.amplified.real
    half = pad + 2.0 * math.sqrt(params.m + 1.0)
    nx = int(math.ceil(2 * half / step)) + 1
    xs = np.linspace(cx - half, cx + half, nx)
    total = 0.0
    for lo, hi in ((y_min - pad, y_min), (y_max, y_max + pad)):
        ys = np.linspace(lo, hi, int(math.ceil(pad / step)) + 1)
        total += 0.5 * _trapezoid_2d(np.abs(wigner_values(params, xs, ys)), xs, ys)
    return total


def marginal_x(params: MpaacsParams, x_samples, y_min: float = -8.0, y_max: float = 8.0,
               panels: int = 400) -> list[tuple[float, float]]:
    """Position-quadrature density p(x) = (1/2) int W(x, y) dy.

    The factor 1/2 converts the phase-space measure d^2 beta = dx dy / 2, so
    int p(x) dx = 1. Composite trapezoid with ``panels`` panels; emits
    :class:`IntegrationWindowWarning` when more than 1e-6 of mass lies outside
    the y window.
    """
    if panels < 1:
        raise ValueError("panels must be positive")
    if not y_min < y_max:
        raise ValueError("need y_min < y_max")
    xs = np.asarray(x_samples, dtype=np.float64)
    ys = np.linspace(y_min, y_max, panels + 1)
    vals = wigner_values(params, xs, ys)
    p = 0.5 * np.trapezoid(vals, ys, axis=1)
    lost = clipped_mass(params, y_min, y_max)
    if lost > 1e-6:
        warnings.warn(
            f"y window [{y_min}, {y_max}] clips about {lost:.3g} of the Wigner mass",
            IntegrationWindowWarning,
            stacklevel=2,
        )
    return [(float(x), float(v)) for x, v in zip(xs, p)]
