"""Moments, quadrature statistics and amplifier figures of merit."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .special import QuadraticExponent, extract_derivative
from .state import FockVector, MpaacsParams, fock_coefficients, generating_exponent_norm

MAX_MOMENT_ORDER = 12
MOMENT_TOLERANCE = 1e-14
DISAGREEMENT_LIMIT = 1e-6
COHERENT_VARIANCE = 0.5


class EngineDisagreementError(ArithmeticError):
    """The generating-function and Fock-sum moment engines disagree."""


@dataclass(frozen=True)
class MomentTable:
    params: MpaacsParams
    entries: dict = field(default_factory=dict)  # (k, l) -> <a^dag^k a^l>
    engine_disagreement: float = 0.0

    def __getitem__(self, kl):
        return self.entries[kl]


@dataclass(frozen=True)
class QuadratureStats:
    mean_x: float
    mean_p: float
    var_x: float
    var_p: float


@dataclass(frozen=True)
class AmplifierReport:
    params: MpaacsParams
    g_eff: float
    n_eq: float
    squeezed_x: bool


def _check_order(k, l):
    for name, v in (("k", k), ("l", l)):
        if int(v) != v or v < 0 or v > MAX_MOMENT_ORDER:
            raise ValueError(f"moment order {name}={v} outside 0..{MAX_MOMENT_ORDER}")


def moment_generating(params: MpaacsParams, k: int, l: int) -> complex:
    """<a^dag^k a^l> by derivative extraction (photons added after amplification)."""
    _check_order(k, l)
    m, ga = params.m, params.amplified
    q = QuadraticExponent(
        ("s", "t", "f", "h"),
        linear={"h": ga, "t": ga, "f": ga.conjugate(), "s": ga.conjugate()},
        quadratic={("h", "s"): 1.0, ("f", "t"): 1.0, ("s", "t"): 1.0},
    )
    num = extract_derivative(q, {"s": m, "t": m, "f": k, "h": l})
    # the exp((g^2 - 1)|alpha|^2) prefactor cancels against the normalization
    norm = extract_derivative(generating_exponent_norm(params, "B"), {"s": m, "t": m})
    value = num / norm.real
    # diagonal moments are Hermitian expectations; drop the rounding residue
    return complex(value.real, 0.0) if k == l else value


def moment_fock_sum(fock: FockVector, k: int, l: int) -> complex:
    """<a^dag^k a^l> = sum_j conj(c_{j+k}) c_{j+l} sqrt((j+k)! (j+l)!) / j!."""
    _check_order(k, l)
    c = fock.dense()
    top = len(c) - max(k, l)
    if top <= 0:
        return 0j
    j = np.arange(top)
    logw = 0.5 * (gammaln(j + k + 1) + gammaln(j + l + 1)) - gammaln(j + 1)
    terms = np.conj(c[j + k]) * c[j + l] * np.exp(logw)
    return complex(math.fsum(terms.real), math.fsum(terms.imag))


def _relative_gap(a, b):
    return abs(a - b) / max(1.0, abs(b))


def moment_table(params: MpaacsParams, pairs, fock: FockVector | None = None) -> MomentTable:
    """Both engines for each (k, l) in ``pairs``; the generating values are kept."""
    fock = fock_coefficients(params, MOMENT_TOLERANCE) if fock is None else fock
    entries, worst = {}, 0.0
    for k, l in pairs:
        gen = moment_generating(params, k, l)
        brute = moment_fock_sum(fock, k, l)
        gap = _relative_gap(gen, brute)
        if gap > DISAGREEMENT_LIMIT:
            raise EngineDisagreementError(
                f"<a^dag^{k} a^{l}> engines disagree for {params}: {gen} vs {brute}"
            )
        entries[(k, l)] = gen
        worst = max(worst, gap)
    return MomentTable(params, entries, worst)


def moment(params: MpaacsParams, k: int, l: int) -> complex:
    """<a^dag^k a^l>, cross-checked against a brute-force Fock sum.

    >>> moment(MpaacsParams(1.0, 1.0, 1), 0, 1)
    (1.5+0j)
    """
    return moment_table(params, [(k, l)])[(k, l)]


def quadrature_stats(params: MpaacsParams) -> QuadratureStats:
    t = moment_table(params, [(0, 1), (1, 1), (0, 2)])
    a, n, a2 = t[(0, 1)], t[(1, 1)].real, t[(0, 2)]
    mean_x = math.sqrt(2.0) * a.real
    mean_p = math.sqrt(2.0) * a.imag
    var_x = 0.5 * (1.0 + 2.0 * n + 2.0 * a2.real) - mean_x ** 2
    var_p = 0.5 * (1.0 + 2.0 * n - 2.0 * a2.real) - mean_p ** 2
    return QuadratureStats(mean_x, mean_p, var_x, var_p)


def _require_nonzero_alpha(params):
    if params.alpha == 0:
        raise ValueError("effective gain is undefined for alpha = 0")


def _gain_from_mean(params, mean_a):
    ratio = mean_a / params.alpha
    if params.alpha.imag == 0 and params.alpha.real > 0:
        return ratio.real
    return abs(ratio)


def effective_gain(params: MpaacsParams) -> float:
    """<x>_out / <x>_in for input |alpha>.

    For complex alpha the modulus of <a>_out / alpha is returned.
    """
    _require_nonzero_alpha(params)
    return _gain_from_mean(params, moment(params, 0, 1))


def effective_gain_closed_form(params: MpaacsParams) -> float:
    """Printed closed forms for m = 0, 1, 2."""
    g, m = params.gain, params.m
    x = params.amplitude ** 2
    if m == 0:
        return g
    if m == 1:
        return g * (2 + x) / (1 + x)
    if m == 2:
        return g * (6 + 6 * x + x * x) / (2 + 4 * x + x * x)
    raise ValueError("closed forms are available for m <= 2 only")


def equivalent_input_noise(params: MpaacsParams) -> float:
    """var_x(out) / g_eff^2 - 0.5."""
    return amplifier_report(params).n_eq


def amplifier_report(params: MpaacsParams) -> AmplifierReport:
    _require_nonzero_alpha(params)
    stats = quadrature_stats(params)
    g_eff = _gain_from_mean(params, moment(params, 0, 1))
    return AmplifierReport(
        params=params,
        g_eff=g_eff,
        n_eq=stats.var_x / g_eff ** 2 - COHERENT_VARIANCE,
        squeezed_x=stats.var_x < COHERENT_VARIANCE,
    )


def _var_x_excess(u, m):
    return quadrature_stats(MpaacsParams(u, 1.0, m)).var_x - COHERENT_VARIANCE


def squeezing_threshold(m: int, lo: float = 0.4, hi: float = 1.6, xtol: float = 1e-8) -> float:
    """|g alpha| above which the x quadrature is squeezed, by bisection.

    Only the product g*alpha matters, so g is pinned to 1.
    """
    if int(m) != m or not 1 <= m <= 8:
        raise ValueError(f"squeezing threshold needs 1 <= m <= 8, got {m}")
    f_lo, f_hi = _var_x_excess(lo, m), _var_x_excess(hi, m)
    if f_lo * f_hi > 0:
        raise ArithmeticError(f"no sign change of var_x - 0.5 on [{lo}, {hi}] for m={m}")
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        f_mid = _var_x_excess(mid, m)
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    root = 0.5 * (lo + hi)
    if not _var_x_excess(root + 0.01, m) < 0:
        raise ArithmeticError(f"var_x not below 0.5 just above the threshold for m={m}")
    return root


SWEEP_QUANTITIES = ("g_eff", "var_x", "n_eq")


def sweep(quantity: str, alpha_range: tuple[float, float, int], g: float, m: int) -> list[tuple[float, float]]:
    """Evaluate ``quantity`` on a uniform grid of real, positive alpha."""
    if quantity not in SWEEP_QUANTITIES:
        raise ValueError(f"quantity must be one of {SWEEP_QUANTITIES}, got {quantity!r}")
    lo, hi, count = alpha_range
    if count < 1:
        raise ValueError("count must be positive")
    if quantity != "var_x" and lo <= 0:
        raise ValueError(f"{quantity} needs alpha_lo > 0")
    rows = []
    for a in np.linspace(lo, hi, int(count)):
        params = MpaacsParams(float(a), g, m)
        if quantity == "g_eff":
            value = effective_gain(params)
        elif quantity == "var_x":
            value = quadrature_stats(params).var_x
        else:
            value = equivalent_input_noise(params)
        rows.append((float(a), float(value)))
    return rows
