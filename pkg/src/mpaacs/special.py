"""Special functions and an exact derivative extractor for exponentials of
quadratic polynomials.

The extractor answers questions of the form

    d^{n_1}/dv_1^{n_1} ... d^{n_k}/dv_k^{n_k} exp(Q(v)) |_{v=0}

where ``Q`` has total degree at most two. This is what every normal-ordered
generating-function identity for displaced/amplified Fock states reduces to.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

_EXACT_LOG_FACTORIAL = tuple(math.log(math.factorial(n)) for n in range(21))


def laguerre(m: int, x: float) -> float:
    """Laguerre polynomial L_m(x) by forward three-term recurrence.

    For ``x <= 0`` every term of the recurrence is non-negative, so there is no
    cancellation in the regime used for normalization constants.
    """
    if m < 0:
        raise ValueError(f"laguerre order must be non-negative, got {m}")
    x = float(x)
    if m == 0:
        return 1.0
    prev, cur = 1.0, 1.0 - x
    for k in range(1, m):
        prev, cur = cur, ((2 * k + 1 - x) * cur - k * prev) / (k + 1)
    return cur


def log_factorial(n: int) -> float:
    """ln(n!), exact table up to 20 and ``math.lgamma`` beyond."""
    if n < 0:
        raise ValueError(f"log_factorial needs n >= 0, got {n}")
    if n <= 20:
        return _EXACT_LOG_FACTORIAL[n]
    return math.lgamma(n + 1)


def _pair_key(variables: tuple[str, ...], a: str, b: str) -> tuple[str, str]:
    ia, ib = variables.index(a), variables.index(b)
    return (a, b) if ia <= ib else (b, a)


@dataclass(frozen=True)
class QuadraticExponent:
    """Formal polynomial ``constant + sum_i linear[v_i] v_i + sum_{i<=j} quadratic[(v_i, v_j)] v_i v_j``.

    Quadratic keys are unordered pairs; pass them in either order, a pair with
    the same name twice stands for a square. Zero coefficients are dropped.
    """

    variables: tuple[str, ...]
    constant: complex = 0.0
    linear: Mapping[str, complex] = field(default_factory=dict)
    quadratic: Mapping[tuple[str, str], complex] = field(default_factory=dict)

    def __post_init__(self):
        variables = tuple(self.variables)
        if len(set(variables)) != len(variables):
            raise ValueError(f"duplicate variable names in {variables}")
        known = set(variables)
        linear = {}
        for v, c in dict(self.linear).items():
            if v not in known:
                raise ValueError(f"linear term names unknown variable {v!r}")
            if c != 0:
                linear[v] = linear.get(v, 0) + complex(c)
        quadratic = {}
        for pair, c in dict(self.quadratic).items():
            a, b = pair
            if a not in known or b not in known:
                raise ValueError(f"quadratic term names unknown variable in {pair!r}")
            key = _pair_key(variables, a, b)
            quadratic[key] = quadratic.get(key, 0) + complex(c)
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "constant", complex(self.constant))
        object.__setattr__(self, "linear", {k: v for k, v in linear.items() if v != 0})
        object.__setattr__(self, "quadratic", {k: v for k, v in quadratic.items() if v != 0})

    def with_constant(self, constant: complex) -> "QuadraticExponent":
        return QuadraticExponent(self.variables, constant, self.linear, self.quadratic)

    def evaluate(self, point: Mapping[str, complex]) -> complex:
        """Value of Q at ``point`` (missing variables are zero)."""
        val = self.constant
        for v, c in self.linear.items():
            val += c * point.get(v, 0)
        for (a, b), c in self.quadratic.items():
            val += c * point.get(a, 0) * point.get(b, 0)
        return val


@dataclass(frozen=True)
class DerivativeOrder:
    """Multi-index of derivative orders, keyed by variable name."""

    orders: Mapping[str, int]

    def __post_init__(self):
        orders = {}
        for v, n in dict(self.orders).items():
            if int(n) != n or n < 0:
                raise ValueError(f"derivative order for {v!r} must be a non-negative integer, got {n}")
            orders[v] = int(n)
        object.__setattr__(self, "orders", orders)

    @property
    def total(self) -> int:
        return sum(self.orders.values())


def extract_derivative(exp: QuadraticExponent, order: DerivativeOrder | Mapping[str, int]) -> complex:
    """Mixed partial derivative of ``exp(Q)`` at the origin.

    exp(Q - constant) is expanded as sum_j P^j / j! in a dense coefficient
    tensor truncated at the requested degree in each variable, so monomials
    that cannot contribute are never formed. The target coefficient times the
    product of factorials is the derivative; no approximation besides
    floating-point rounding is involved.

    Examples
    --------
    >>> q = QuadraticExponent(("s", "t"), linear={"s": 2.0})
    >>> extract_derivative(q, {"s": 3})
    (8+0j)
    """
    if not isinstance(order, DerivativeOrder):
        order = DerivativeOrder(order)
    unknown = set(order.orders) - set(exp.variables)
    if unknown:
        raise ValueError(f"derivative order references unknown variables {sorted(unknown)}")

    idx = {v: i for i, v in enumerate(exp.variables)}
    degs = [order.orders.get(v, 0) for v in exp.variables]
    shape = tuple(d + 1 for d in degs)
    total = sum(degs)

    terms = []
    for v, c in exp.linear.items():
        e = [0] * len(degs)
        e[idx[v]] += 1
        terms.append((e, c))
    for (a, b), c in exp.quadratic.items():
        e = [0] * len(degs)
        e[idx[a]] += 1
        e[idx[b]] += 1
        terms.append((e, c))
    terms = [(e, c) for e, c in terms if all(ei <= di for ei, di in zip(e, degs))]

    acc = np.zeros(shape, dtype=np.complex128)
    acc[(0,) * len(shape)] = 1.0
    power = acc.copy()
    for j in range(1, total + 1):
        nxt = np.zeros(shape, dtype=np.complex128)
        for e, c in terms:
            dst = tuple(slice(ei, None) for ei in e)
            src = tuple(slice(0, n - ei) for n, ei in zip(shape, e))
            nxt[dst] += c * power[src]
        power = nxt / j
        acc += power

    coeff = acc[tuple(degs)]
    weight = math.prod(math.factorial(d) for d in degs)
    return complex(np.exp(exp.constant) * coeff * weight)

