"""Construction of the state a^{dag m} |g alpha> (normalized) in the Fock basis.

Three independent constructions are provided:

* :func:`fock_coefficients` evaluates the closed-form expansion coefficients,
* :func:`build_adamcs` adds ``m`` photons to |alpha> and then amplifies,
* :func:`build_amadcs` amplifies |alpha> and then adds ``m`` photons.

All coefficient arithmetic is carried out on log-magnitudes and phases so that
``k!`` never overflows; conversion to linear scale happens last.
"""
from __future__ import annotations

import enum
import math
import os
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, logsumexp

from .special import QuadraticExponent, extract_derivative, laguerre, log_factorial

DEFAULT_TOLERANCE = 1e-12


def default_tolerance() -> float:
    """Truncation tolerance, overridable through ``MPAACS_TOLERANCE``."""
    raw = os.environ.get("MPAACS_TOLERANCE")
    if raw is None or raw.strip() == "":
        return DEFAULT_TOLERANCE
    tol = float(raw)
    _check_tolerance(tol)
    return tol


def _check_tolerance(tolerance):
    if not (0.0 < tolerance < 1.0):
        raise ValueError(f"tolerance must lie in (0, 1), got {tolerance}")


@dataclass(frozen=True)
class MpaacsParams:
    """Coherent amplitude ``alpha``, gain ``g >= 1`` and number of added photons ``m``."""

    alpha: complex
    gain: float = 1.0
    added_photons: int = 0

    def __post_init__(self):
        alpha = complex(self.alpha)
        if not (math.isfinite(alpha.real) and math.isfinite(alpha.imag)):
            raise ValueError(f"alpha must be finite, got {alpha}")
        gain = float(self.gain)
        if not math.isfinite(gain) or gain < 1.0:
            raise ValueError(f"gain must be a finite number >= 1, got {self.gain}")
        m = self.added_photons
        if int(m) != m or m < 0:
            raise ValueError(f"added_photons must be a non-negative integer, got {m}")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "gain", gain)
        object.__setattr__(self, "added_photons", int(m))

    @classmethod
    def polar(cls, magnitude: float, gain: float = 1.0, added_photons: int = 0, phase: float = 0.0):
        if magnitude < 0:
            raise ValueError(f"alpha magnitude must be >= 0, got {magnitude}")
        alpha = complex(magnitude) if phase == 0 else magnitude * complex(math.cos(phase), math.sin(phase))
        return cls(alpha, gain, added_photons)

    @property
    def m(self) -> int:
        return self.added_photons

    @property
    def amplified(self) -> complex:
        """g * alpha, the amplitude of the amplified coherent state."""
        return self.gain * self.alpha

    @property
    def amplitude(self) -> float:
        """|g alpha|."""
        return self.gain * abs(self.alpha)

    @property
    def phase(self) -> float:
        return math.atan2(self.alpha.imag, self.alpha.real)


@dataclass(frozen=True)
class NormalizationTriple:
    n_total: float
    n_adamcs: float
    n_amadcs: float


@dataclass(frozen=True, eq=False)
class FockVector:
    """Truncated Fock expansion ``sum_{k=offset}^{cutoff} c_k |k>``.

    ``coefficients[i]`` is c_{offset + i}; components below ``offset`` vanish
    identically. ``tail_bound`` bounds the discarded probability beyond the cutoff.
    """

    params: MpaacsParams
    offset: int
    coefficients: np.ndarray
    truncation_cutoff: int
    tail_bound: float

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.offset, self.truncation_cutoff + 1)

    def dense(self, dim: int | None = None) -> np.ndarray:
        """Coefficients as a vector indexed from |0>, zero padded to ``dim``."""
        dim = self.truncation_cutoff + 1 if dim is None else dim
        if dim < self.truncation_cutoff + 1:
            raise ValueError(f"dim {dim} is smaller than the cutoff {self.truncation_cutoff} + 1")
        out = np.zeros(dim, dtype=np.complex128)
        out[self.offset:self.truncation_cutoff + 1] = self.coefficients
        return out

    def coefficient(self, k: int) -> complex:
        if self.offset <= k <= self.truncation_cutoff:
            return complex(self.coefficients[k - self.offset])
        return 0j


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    dim: int
    entries: np.ndarray
    trace_defect: float


class StateClass(str, enum.Enum):
    VACUUM = "vacuum"
    FOCK = "fock"
    COHERENT = "coherent"
    AMPLIFIED_COHERENT = "amplified-coherent"
    PHOTON_ADDED_COHERENT = "photon-added-coherent"
    GENERAL = "general-mpaacs"


def _readonly(a):
    a.setflags(write=False)
    return a


# ---------------------------------------------------------------------------
# normalization
# ---------------------------------------------------------------------------

def log_normalization(params: MpaacsParams) -> float:
    """ln(m! L_m(-|g alpha|^2))."""
    u2 = params.amplitude ** 2
    return log_factorial(params.m) + math.log(laguerre(params.m, -u2))


def normalization(params: MpaacsParams) -> NormalizationTriple:
    """Normalization constants of the three equivalent constructions.

    ``n_amadcs`` and ``n_adamcs`` carry the factor exp((g^2 - 1)|alpha|^2) and
    overflow to ``inf`` once that exponent passes ~709.
    """
    m, g = params.m, params.gain
    n_total = math.factorial(m) * laguerre(m, -params.amplitude ** 2)
    exponent = (g * g - 1.0) * abs(params.alpha) ** 2
    n_amadcs = math.exp(exponent) * n_total if exponent < 709.0 else math.inf
    return NormalizationTriple(n_total, g ** (2 * m) * n_amadcs, n_amadcs)


def generating_exponent_norm(params: MpaacsParams, route: str = "B") -> QuadraticExponent:
    """Exponent whose (s^m, t^m) derivative equals N * exp(-(g^2 - 1)|alpha|^2).

    Route ``"A"`` adds photons before amplification, route ``"B"`` after.
    """
    g, a = params.gain, params.alpha
    if route == "A":
        g2 = g * g
        return QuadraticExponent(
            ("s", "t"),
            linear={"t": g2 * a, "s": g2 * a.conjugate()},
            quadratic={("s", "t"): g2},
        )
    if route == "B":
        return QuadraticExponent(
            ("s", "t"),
            linear={"t": g * a, "s": g * a.conjugate()},
            quadratic={("s", "t"): 1.0},
        )
    raise ValueError(f"route must be 'A' or 'B', got {route!r}")


def generating_normalization(params: MpaacsParams, route: str = "B") -> float:
    """ln N_1 (route A) or ln N_2 (route B) via derivative extraction."""
    m = params.m
    val = extract_derivative(generating_exponent_norm(params, route), {"s": m, "t": m})
    return (params.gain ** 2 - 1.0) * abs(params.alpha) ** 2 + math.log(val.real)


# ---------------------------------------------------------------------------
# Fock coefficients
# ---------------------------------------------------------------------------

_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def _stirling_error(n):
    """ln(n!) - (n + 1/2) ln n + n - ln(sqrt(2 pi)) for integer n >= 1."""
    n = np.asarray(n, dtype=np.float64)
    small = n <= 15
    ns = np.where(small, n, 16.0)
    exact = gammaln(ns + 1) - (ns + 0.5) * np.log(ns) + ns - _HALF_LOG_2PI
    nn = np.where(small, 16.0, n)
    n2 = nn * nn
    series = (1 / 12 - (1 / 360 - (1 / 1260 - (1 / 1680 - 1 / (1188 * n2)) / n2) / n2) / n2) / nn
    return np.where(small, exact, series)


def _deviance(x, mu):
    """x ln(x / mu) + mu - x, without cancellation near x = mu."""
    x = np.asarray(x, dtype=np.float64)
    d = x - mu
    near = np.abs(d) < 0.1 * (x + mu)
    v = np.where(near, d / (x + mu), 0.0)
    total = d * v
    term = 2.0 * x * v
    for i in range(1, 16):
        term = term * v * v
        total = total + term / (2 * i + 1)
    with np.errstate(divide="ignore"):
        far = x * np.log(np.where(near, 1.0, x / mu)) + mu - x
    return np.where(near, total, far)


def _log_poisson(j, mu):
    """Poisson log-pmf with saddle-point evaluation, accurate for large j and mu."""
    j = np.asarray(j)
    safe = np.maximum(j, 1)
    val = -_HALF_LOG_2PI - 0.5 * np.log(safe) - _stirling_error(safe) - _deviance(safe, mu)
    return np.where(j == 0, -mu, val)


def _log_coefficients(params, cutoff):
    """(log|c_k|, arg c_k) for k = m..cutoff from the closed-form expansion.

    |c_k|^2 = C(k, m) Pois(k - m; |g alpha|^2) / L_m(-|g alpha|^2), with the
    Poisson factor evaluated in saddle-point form so that large k keeps full
    relative precision.
    """
    m, u = params.m, params.amplitude
    k = np.arange(m, cutoff + 1)
    j = k - m
    log_binom = np.zeros(len(k))
    for i in range(1, m + 1):
        log_binom += np.log((j + i) / i)
    if u > 0:
        log_pois = _log_poisson(j, u * u)
    else:
        log_pois = np.where(j == 0, 0.0, -np.inf)
    logmag = 0.5 * (log_binom + log_pois - math.log(laguerre(m, -u * u)))
    phase = j * params.phase
    return logmag, phase


def _term_ratio(k, m, u):
    """|c_{k+1} / c_k|^2."""
    return (k + 1) * u * u / (k + 1 - m) ** 2


def _choose_cutoff(params, tolerance):
    """Smallest cutoff (on a doubling schedule from the initial guess) whose
    certified geometric tail bound is below ``tolerance``."""
    m, u = params.m, params.amplitude
    if u == 0:
        return m, 0.0
    # the tiny offset keeps the start independent of rounding in |g alpha|
    cutoff = m + math.ceil(u * u + 8 * u + 20 - 1e-9)
    while True:
        r = _term_ratio(cutoff, m, u)
        if r <= 0.5:
            logmag, _ = _log_coefficients(params, cutoff)
            last = math.exp(2 * logmag[-1])
            bound = last * r / (1.0 - r)
            if bound <= tolerance:
                return cutoff, bound
        cutoff += max(8, (cutoff - m) // 2)


def _to_linear(logmag, phase):
    mag = np.exp(logmag)
    return mag * np.exp(1j * phase)


def _summation_check(coeffs, geometric_bound, tolerance):
    """Tail bound covering both the analytic tail and the observed norm defect."""
    total = math.fsum(np.abs(coeffs) ** 2)
    slack = 64 * np.finfo(float).eps
    if not (1.0 - geometric_bound - slack <= total <= 1.0 + slack):
        raise ArithmeticError(
            f"truncated norm {total!r} inconsistent with certified tail bound {geometric_bound!r}"
        )
    bound = geometric_bound + max(0.0, 1.0 - total)
    if bound > tolerance:
        raise ValueError(f"tolerance {tolerance:g} is below the attainable floating-point resolution")
    return bound


def fock_coefficients(params: MpaacsParams, tolerance: float | None = None) -> FockVector:
    """Closed-form Fock coefficients c_k, k = m..K, with certified tail bound.

    Examples
    --------
    >>> fv = fock_coefficients(MpaacsParams(1.0, 1.0, 1))
    >>> round(abs(fv.coefficient(1)), 7)
    0.4288819
    """
    tolerance = default_tolerance() if tolerance is None else tolerance
    _check_tolerance(tolerance)
    cutoff, bound = _choose_cutoff(params, tolerance)
    logmag, phase = _log_coefficients(params, cutoff)
    coeffs = _to_linear(logmag, phase)
    bound = _summation_check(coeffs, bound, tolerance)
    return FockVector(params, params.m, _readonly(coeffs), cutoff, bound)


# log-amplitude operator actions used by the two construction routes; a state
# is a triple (offset, logmag, phase) with entries for n = offset, offset+1, ...

def _coherent_state(alpha, length):
    n = np.arange(length)
    r = abs(alpha)
    power = n * math.log(r) if r > 0 else np.where(n == 0, 0.0, -np.inf)
    logmag = -0.5 * r * r + power - 0.5 * gammaln(n + 1)
    phase = n * math.atan2(alpha.imag, alpha.real)
    return 0, logmag, phase


def _add_photons(state, m):
    # a^dag^m |n> = sqrt((n+1)...(n+m)) |n+m>
    offset, logmag, phase = state
    n = np.arange(offset, offset + len(logmag))
    return offset + m, logmag + 0.5 * (gammaln(n + m + 1) - gammaln(n + 1)), phase


def _amplify(state, g):
    # g^n |n> = g^n |n>
    offset, logmag, phase = state
    n = np.arange(offset, offset + len(logmag))
    return offset, logmag + n * math.log(g), phase


def _normalize(state):
    offset, logmag, phase = state
    return offset, logmag - 0.5 * logsumexp(2.0 * logmag), phase


def _finish(params, state, cutoff, bound):
    offset, logmag, phase = _normalize(state)
    coeffs = _to_linear(logmag, phase)[: cutoff - offset + 1]
    return FockVector(params, offset, _readonly(coeffs), cutoff, bound)


def build_adamcs(params: MpaacsParams, tolerance: float | None = None) -> FockVector:
    """g^n a^dag^m |alpha>, normalized."""
    tolerance = default_tolerance() if tolerance is None else tolerance
    _check_tolerance(tolerance)
    cutoff, bound = _choose_cutoff(params, tolerance)
    state = _coherent_state(params.alpha, cutoff - params.m + 1)
    state = _amplify(_add_photons(state, params.m), params.gain)
    return _finish(params, state, cutoff, bound)


def build_amadcs(params: MpaacsParams, tolerance: float | None = None) -> FockVector:
    """a^dag^m g^n |alpha>, normalized."""
    tolerance = default_tolerance() if tolerance is None else tolerance
    _check_tolerance(tolerance)
    cutoff, bound = _choose_cutoff(params, tolerance)
    state = _coherent_state(params.alpha, cutoff - params.m + 1)
    state = _add_photons(_amplify(state, params.gain), params.m)
    return _finish(params, state, cutoff, bound)


# ---------------------------------------------------------------------------
# density matrix and photon statistics
# ---------------------------------------------------------------------------

def density_matrix(fock: FockVector, cross_check: bool = False) -> DensityMatrix:
    """rho_kl = c_k conj(c_l) on indices 0..K.

    With ``cross_check`` every element with k, l <= min(K, m + 8) is recomputed
    by derivative extraction and compared at 1e-9.
    """
    c = fock.dense()
    rho = np.outer(c, c.conj())
    # exact Hermiticity: mirror the upper triangle
    lower = np.tril_indices(len(c), -1)
    rho[lower] = rho.T[lower].conj()
    np.fill_diagonal(rho, np.abs(c) ** 2)
    trace = math.fsum(np.abs(c) ** 2)
    defect = max(fock.tail_bound, abs(1.0 - trace))
    dm = DensityMatrix(len(c), _readonly(rho), defect)
    if cross_check:
        limit = min(fock.truncation_cutoff, fock.params.m + 8)
        for k in range(limit + 1):
            for l in range(limit + 1):
                ref = density_element_generating(fock.params, k, l)
                if abs(ref - rho[k, l]) > 1e-9:
                    raise ArithmeticError(f"rho[{k},{l}] = {rho[k, l]} disagrees with generating value {ref}")
    return dm


def density_element_generating(params: MpaacsParams, k: int, l: int, route: str = "B") -> complex:
    """<k|rho|l> by derivative extraction of the normally ordered generating function."""
    m, g, a = params.m, params.gain, params.alpha
    if route == "A":
        q = QuadraticExponent(
            ("s", "t", "f", "h"),
            linear={"f": g * a, "h": g * a.conjugate()},
            quadratic={("f", "s"): g, ("h", "t"): g},
        )
    elif route == "B":
        q = QuadraticExponent(
            ("s", "t", "f", "h"),
            linear={"f": g * a, "h": g * a.conjugate()},
            quadratic={("f", "s"): 1.0, ("h", "t"): 1.0},
        )
    else:
        raise ValueError(f"route must be 'A' or 'B', got {route!r}")
    log_norm = generating_normalization(params, route)
    const = -abs(a) ** 2 - log_norm - 0.5 * (log_factorial(k) + log_factorial(l))
    return extract_derivative(q.with_constant(const), {"s": m, "t": m, "f": k, "h": l})


def pnd(fock: FockVector) -> list[tuple[int, float]]:
    """Photon-number distribution as (k, |c_k|^2) rows for k = m..K."""
    probs = np.abs(fock.coefficients) ** 2
    return [(int(k), float(p)) for k, p in zip(fock.indices, probs)]


def classify_special_case(params: MpaacsParams) -> StateClass:
    """Named special case of (alpha, g, m), using exact parameter equality."""
    zero_alpha = params.alpha.real == 0 and params.alpha.imag == 0
    if zero_alpha and params.m == 0:
        return StateClass.VACUUM
    if zero_alpha:
        return StateClass.FOCK
    if params.gain == 1 and params.m == 0:
        return StateClass.COHERENT
    if params.m == 0:
        return StateClass.AMPLIFIED_COHERENT
    if params.gain == 1:
        return StateClass.PHOTON_ADDED_COHERENT
    return StateClass.GENERAL
