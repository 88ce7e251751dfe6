"""Acceptance gate: twelve criteria, each at its pinned tolerance.

Every test prints one ``PASS``/``FAIL`` line. Run ``pytest tests/test_acceptance.py -s``
to see them, or ``python3 tests/test_acceptance.py`` for the bare report.

Reference values are computed here from scipy or closed forms written out in
this file, so the package is never checked against itself.
"""
import math
import subprocess
import sys
import time
import warnings

import numpy as np
from scipy.special import eval_laguerre, gammaln

from mpaacs import metrics, phase_space as ps, state as st
from mpaacs.special import QuadraticExponent, extract_derivative

THRESHOLDS = {1: 1.000000, 2: 0.938744, 3: 0.900407, 4: 0.873904, 5: 0.854454}
WIGNER_SETS = ((0.0, 1.0, 0), (0.0, 1.0, 2), (1.0, 1.0, 0), (1.0, 1.0, 2), (1.0, 2.0, 0), (1.0, 2.0, 2))
GAINS = (1.0, 2.0, 3.0)
MS = (0, 1, 2)
MAGS = (0.1, 0.5, 1.0, 2.0, 4.0)
ROUTE_GRID = [
    (mag, theta, g, m)
    for mag in (0.0, 0.5, 1.0, 2.0)
    for theta in (0.0, math.pi / 3)
    for g in (1.0, 1.5, 2.0, 3.0)
    for m in (0, 1, 2, 3, 5)
]


def report(cid, title, ok, detail):
    print(f"{'PASS' if ok else 'FAIL'}  {cid}  {title}: {detail}")
    assert ok, f"{cid} {title}: {detail}"


def amplifier_grid(mags=MAGS):
    for g in GAINS:
        for m in MS:
            for a in mags:
                yield st.MpaacsParams(a, g, m)


def closed_form_gain(u2, g, m):
    return {0: g,
            1: g * (2 + u2) / (1 + u2),
            2: g * (6 + 6 * u2 + u2 * u2) / (2 + 4 * u2 + u2 * u2)}[m]


def closed_form_coefficient(alpha, g, m, k):
    """c_k of a^dag^m |g alpha> from factorials, for k >= m."""
    ga = g * alpha
    u2 = abs(ga) ** 2
    log_mag = (0.5 * gammaln(k + 1) - gammaln(k - m + 1) - 0.5 * u2
               - 0.5 * (gammaln(m + 1) + math.log(eval_laguerre(m, -u2))))
    if ga == 0:
        return 1.0 + 0j if k == m else 0j
    return np.exp(log_mag + (k - m) * (math.log(abs(ga)) + 1j * np.angle(ga)))


# --- C01 -------------------------------------------------------------------

def test_c01_squeezing_thresholds():
    t0 = time.perf_counter()
    got = {m: metrics.squeezing_threshold(m) for m in THRESHOLDS}
    elapsed = time.perf_counter() - t0
    worst = max(abs(got[m] - ref) for m, ref in THRESHOLDS.items())
    report("C01", "squeezing thresholds m=1..5", worst <= 1e-4 and elapsed < 1.0,
           f"max |u* - ref| = {worst:.2e} (tol 1e-4), {elapsed:.2f} s (limit 1 s)")


# --- C02 -------------------------------------------------------------------

def test_c02_effective_gain_limits():
    small = large = 0.0
    for g in GAINS:
        for m in MS:
            small = max(small, abs(metrics.effective_gain(st.MpaacsParams(1e-5, g, m)) - (m + 1) * g))
            large = max(large, abs(metrics.effective_gain(st.MpaacsParams(50.0, g, m)) - g))
    report("C02", "effective gain limits", small <= 1e-3 and large <= 1e-2,
           f"|alpha|=1e-5 dev {small:.2e} (tol 1e-3), |alpha|=50 dev {large:.2e} (tol 1e-2)")


# --- C03 -------------------------------------------------------------------

def test_c03_gain_closed_forms():
    worst = 0.0
    for p in amplifier_grid():
        ref = closed_form_gain(p.amplitude ** 2, p.gain, p.m)
        worst = max(worst, abs(metrics.effective_gain(p) - ref) / ref)
    report("C03", "effective gain vs closed forms m<=2", worst <= 1e-10,
           f"max relative error {worst:.2e} (tol 1e-10)")


# --- C04 -------------------------------------------------------------------

def test_c04_equivalent_input_noise():
    limit = 0.0
    for g in GAINS:
        for m, c in ((0, 0.5), (1, 0.375), (2, 0.277778)):
            n_eq = metrics.equivalent_input_noise(st.MpaacsParams(1e-3, g, m))
            limit = max(limit, abs(n_eq - (c / g ** 2 - 0.5)))
    spread = 0.0
    for g in GAINS:
        vals = [v for _, v in metrics.sweep("n_eq", (0.1, 4.0, 40), g, 0)]
        spread = max(spread, max(vals) - min(vals), abs(vals[0] - (0.5 / g ** 2 - 0.5)))
    sign_ok, identity = True, 0.0
    for p in amplifier_grid():
        n_eq = metrics.equivalent_input_noise(p)
        if p.gain == 1 and p.m == 0:
            identity = max(identity, abs(n_eq))
        elif not n_eq < 0:
            sign_ok = False
    ok = limit <= 1e-3 and spread <= 1e-10 and sign_ok and identity <= 1e-12
    report("C04", "equivalent input noise", ok,
           f"small-alpha dev {limit:.2e} (tol 1e-3), m=0 spread {spread:.1e} (tol 1e-10), "
           f"negative elsewhere: {sign_ok}, g=1 m=0 |n_eq| {identity:.1e} (tol 1e-12)")


# --- C05 -------------------------------------------------------------------

def test_c05_wigner_oracle():
    xs = np.linspace(-4.0, 4.0, 41)
    t0 = time.perf_counter()
    worst = 0.0
    for a, g, m in WIGNER_SETS:
        p = st.MpaacsParams(a, g, m)
        rho = st.density_matrix(st.fock_coefficients(p, 1e-14))
        oracle = ps.wigner_fock_sum_grid(rho, xs, xs)
        closed = np.array([[ps.wigner_analytic(p, complex(x, y) / math.sqrt(2)) for y in xs] for x in xs])
        worst = max(worst, float(np.max(np.abs(closed - oracle))))
    elapsed = time.perf_counter() - t0
    report("C05", "closed-form Wigner vs displaced-parity oracle", worst <= 1e-6 and elapsed < 30.0,
           f"max deviation {worst:.2e} (tol 1e-6), {elapsed:.1f} s (limit 30 s)")


# --- C06 -------------------------------------------------------------------

def _gauss(beta, center):
    return 2 / math.pi * math.exp(-2 * abs(beta - center) ** 2)


REDUCTIONS = {
    "vacuum": (st.MpaacsParams(0.0, 1.0, 0), lambda p, b: _gauss(b, 0)),
    "coherent": (st.MpaacsParams(0.8 - 0.3j, 1.0, 0), lambda p, b: _gauss(b, p.alpha)),
    "amplified coherent": (st.MpaacsParams(0.8 - 0.3j, 2.5, 0), lambda p, b: _gauss(b, p.gain * p.alpha)),
    "Fock": (st.MpaacsParams(0.0, 2.0, 3),
             lambda p, b: (-1) ** p.m * eval_laguerre(p.m, 4 * abs(b) ** 2) * _gauss(b, 0)),
    "photon-added coherent": (
        st.MpaacsParams(0.7 + 0.4j, 1.0, 2),
        lambda p, b: (-1) ** p.m * eval_laguerre(p.m, abs(2 * b - p.alpha) ** 2)
        * _gauss(b, p.alpha) / eval_laguerre(p.m, -abs(p.alpha) ** 2)),
}


def test_c06_wigner_reductions():
    rng = np.random.default_rng(6)
    worst = {}
    for name, (p, reduced) in REDUCTIONS.items():
        pts = rng.uniform(-3, 3, size=(100, 2))
        worst[name] = max(abs(ps.wigner_analytic(p, complex(x, y)) - reduced(p, complex(x, y))) for x, y in pts)
    top = max(worst.values())
    report("C06", "Wigner special-case reductions", top <= 1e-12,
           f"max deviation {top:.2e} over {len(worst)} limits x 100 points (tol 1e-12)")


# --- C07 -------------------------------------------------------------------

def test_c07_normalizations():
    grid = ps.PhaseSpaceGrid.square(7.0, 281)
    xs = np.linspace(-8.0, 8.0, 641)
    w_err = p_err = 0.0
    for a, g, m in WIGNER_SETS:
        p = st.MpaacsParams(a, g, m)
        w_err = max(w_err, abs(ps.wigner_grid(p, grid).integral - 1))
        with warnings.catch_warnings():
            warnings.simplefilter("error", ps.IntegrationWindowWarning)
            px = np.array([v for _, v in ps.marginal_x(p, xs)])
        p_err = max(p_err, abs(float(np.trapezoid(px, xs)) - 1))
    report("C07", "Wigner and marginal normalization", w_err <= 1e-4 and p_err <= 1e-4,
           f"|int W - 1| {w_err:.2e}, |int p - 1| {p_err:.2e} (tol 1e-4)")


# --- C08 -------------------------------------------------------------------

def test_c08_route_equivalence():
    coeff_gap = norm_gap = 0.0
    for mag, theta, g, m in ROUTE_GRID:
        p = st.MpaacsParams.polar(mag, g, m, theta)
        direct = st.fock_coefficients(p)
        ref = np.array([closed_form_coefficient(p.alpha, g, m, k) for k in direct.indices])
        for f in (direct, st.build_adamcs(p), st.build_amadcs(p)):
            assert f.truncation_cutoff == direct.truncation_cutoff
            coeff_gap = max(coeff_gap, float(np.max(np.abs(f.coefficients - ref))))
        n = st.normalization(p)
        norm_gap = max(norm_gap, abs(n.n_adamcs - g ** (2 * m) * n.n_amadcs) / n.n_adamcs)
    report("C08", "route equivalence psi1 = psi2 = closed form", coeff_gap <= 1e-12 and norm_gap <= 1e-12,
           f"{len(ROUTE_GRID)} sets, max coefficient gap {coeff_gap:.2e}, "
           f"N1 vs g^2m N2 relative {norm_gap:.2e} (tol 1e-12)")


# --- C09 -------------------------------------------------------------------

def test_c09_dual_engine_moments():
    pairs = [(k, l) for k in range(7) for l in range(7) if k + l <= 6]
    gap = 0.0
    for p in amplifier_grid():
        fock = st.fock_coefficients(p, 1e-14)
        for k, l in pairs:
            a = metrics.moment_generating(p, k, l)
            b = metrics.moment_fock_sum(fock, k, l)
            gap = max(gap, abs(a - b) / max(1.0, abs(b)))
    lag = 0.0
    for m in range(7):
        for x in (0.3, 1.0, 2.0):
            for y in (0.3, 1.0, 2.0):
                q = QuadraticExponent(("s", "t"), linear={"s": x, "t": y}, quadratic={("s", "t"): -1.0})
                got = extract_derivative(q, {"s": m, "t": m})
                ref = (-1) ** m * math.factorial(m) * eval_laguerre(m, x * y)
                # L_1(1) vanishes, so the scale is max(m!, |ref|)
                lag = max(lag, abs(got - ref) / max(math.factorial(m), abs(ref)))
    report("C09", "dual-engine moments and Laguerre generating identity", gap <= 1e-9 and lag <= 1e-10,
           f"moment gap {gap:.2e} (tol 1e-9), Laguerre identity {lag:.2e} (tol 1e-10)")


# --- C10 -------------------------------------------------------------------

def test_c10_quadrature_facts():
    m0 = 0.0
    var_p_min = math.inf
    for p in amplifier_grid():
        q = metrics.quadrature_stats(p)
        var_p_min = min(var_p_min, q.var_p)
        if p.m == 0:
            m0 = max(m0, abs(q.var_x - 0.5), abs(q.var_p - 0.5))
    large = max(abs(metrics.quadrature_stats(st.MpaacsParams(50.0, g, m)).var_x - 0.5)
                for g in GAINS for m in (1, 2))
    ok = m0 <= 1e-12 and var_p_min >= 0.5 - 1e-12 and large <= 1e-3
    report("C10", "quadrature variance facts", ok,
           f"m=0 |var - 0.5| {m0:.1e} (tol 1e-12), min var_p {var_p_min:.6f} (>= 0.5 - 1e-12), "
           f"|alpha|=50 |var_x - 0.5| {large:.1e} (tol 1e-3)")


# --- C11 -------------------------------------------------------------------

def test_c11_product_invariance():
    grid = ps.PhaseSpaceGrid.square(4.0, 41)
    worst = 0.0
    for mag, theta, g, m in ROUTE_GRID:
        p = st.MpaacsParams.polar(mag, g, m, theta)
        q = st.MpaacsParams(p.gain * p.alpha, 1.0, m)
        f1, f2 = st.fock_coefficients(p), st.fock_coefficients(q)
        assert f1.truncation_cutoff == f2.truncation_cutoff
        pnd1 = np.array([v for _, v in st.pnd(f1)])
        pnd2 = np.array([v for _, v in st.pnd(f2)])
        r1, r2 = st.density_matrix(f1).entries, st.density_matrix(f2).entries
        w1, w2 = ps.wigner_grid(p, grid).values, ps.wigner_grid(q, grid).values
        worst = max(worst, float(np.max(np.abs(pnd1 - pnd2))), float(np.max(np.abs(r1 - r2))),
                    float(np.max(np.abs(w1 - w2))))
    report("C11", "g*alpha product invariance of PND, DME, Wigner", worst <= 1e-12,
           f"max gap {worst:.2e} over {len(ROUTE_GRID)} sets (tol 1e-12)")


# --- C12 -------------------------------------------------------------------

def test_c12_verify_suite_runtime():
    t0 = time.perf_counter()
    proc = subprocess.run([sys.executable, "-m", "mpaacs", "verify"], capture_output=True, text=True)
    elapsed = time.perf_counter() - t0
    summary = proc.stdout.strip().splitlines()[-1] if proc.stdout.strip() else proc.stderr.strip()
    report("C12", "full verify suite", proc.returncode == 0 and elapsed < 120.0,
           f"exit {proc.returncode}, {elapsed:.1f} s (limit 120 s); {summary}")


if __name__ == "__main__":
    failed = 0
    for name, fn in sorted((n, f) for n, f in globals().items() if n.startswith("test_c")):
        try:
            fn()
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)
