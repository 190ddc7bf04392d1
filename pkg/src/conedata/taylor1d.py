"""Vectorized univariate Taylor-coefficient arithmetic.

A Taylor object holds coefficients c[k] = f^(k)(t)/k! for k <= order at a
batch of base points, so exact derivatives of closed-form radial profiles
(iterated-log weights, smooth cutoffs, power laws) come out of ordinary
expression composition instead of hand-derived chain rules.

The recurrences for exp/log/pow are the standard power-series ones; all
operations broadcast over the trailing batch axis.
"""

from __future__ import annotations

import math

import numpy as np


class Taylor:
    __slots__ = ("c",)

    def __init__(self, c: np.ndarray):
        self.c = c  # (order+1, N)

    @property
    def order(self) -> int:
        return self.c.shape[0] - 1

    @staticmethod
    def variable(t, order: int) -> "Taylor":
        t = np.atleast_1d(np.asarray(t, dtype=np.float64))
        c = np.zeros((order + 1,) + t.shape)
        c[0] = t
        if order >= 1:
            c[1] = 1.0
        return Taylor(c)

    @staticmethod
    def const(v, order: int, shape) -> "Taylor":
        c = np.zeros((order + 1,) + tuple(shape))
        c[0] = v
        return Taylor(c)

    def derivatives(self) -> np.ndarray:
        """Stack f, f', f'', ... (order+1, N)."""
        fact = np.array([math.factorial(k) for k in range(self.order + 1)])
        return self.c * fact.reshape((-1,) + (1,) * (self.c.ndim - 1))

    def __add__(self, other):
        if isinstance(other, Taylor):
            return Taylor(self.c + other.c)
        c = self.c.copy()
        c[0] = c[0] + other
        return Taylor(c)

    __radd__ = __add__

    def __neg__(self):
        return Taylor(-self.c)

    def __sub__(self, other):
        return self + (-other if isinstance(other, Taylor) else -np.asarray(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Taylor):
            return Taylor(self.c * other)
        K = self.order
        out = np.zeros_like(self.c)
        for k in range(K + 1):
            for j in range(k + 1):
                out[k] += self.c[j] * other.c[k - j]
        return Taylor(out)

    __rmul__ = __mul__

    def reciprocal(self) -> "Taylor":
        K = self.order
        out = np.zeros_like(self.c)
        out[0] = 1.0 / self.c[0]
        for k in range(1, K + 1):
            acc = 0.0
            for j in range(1, k + 1):
                acc = acc + self.c[j] * out[k - j]
            out[k] = -out[0] * acc
        return Taylor(out)

    def __truediv__(self, other):
        if isinstance(other, Taylor):
            return self * other.reciprocal()
        return Taylor(self.c / other)

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def exp(self) -> "Taylor":
        K = self.order
        out = np.zeros_like(self.c)
        out[0] = np.exp(self.c[0])
        for k in range(1, K + 1):
            acc = 0.0
            for j in range(1, k + 1):
                acc = acc + j * self.c[j] * out[k - j]
            out[k] = acc / k
        return Taylor(out)

    def log(self) -> "Taylor":
        K = self.order
        out = np.zeros_like(self.c)
        out[0] = np.log(self.c[0])
        for k in range(1, K + 1):
            acc = 0.0
            for j in range(1, k):
                acc = acc + j * out[j] * self.c[k - j]
            out[k] = (self.c[k] - acc / k) / self.c[0]
        return Taylor(out)

    def pow(self, a: float) -> "Taylor":
        if a == 0:
            return Taylor.const(1.0, self.order, self.c.shape[1:])
        if a == 1:
            return Taylor(self.c.copy())
        K = self.order
        out = np.zeros_like(self.c)
        out[0] = np.power(self.c[0], a)
        for k in range(1, K + 1):
            acc = 0.0
            for j in range(1, k + 1):
                acc = acc + (j * (a + 1) - k) * self.c[j] * out[k - j]
            out[k] = acc / (k * self.c[0])
        return Taylor(out)

    def sqrt(self) -> "Taylor":
        return self.pow(0.5)


def smoothstep_derivatives(t, order: int) -> np.ndarray:
    """Derivatives of the flat smooth step built from exp(-1/t).

    step(t) = e(t) / (e(t) + e(1-t)) with e(t) = exp(-1/t) for t > 0, else 0.
    Returns (order+1, N): value and first `order` derivatives.  Exactly 0
    (with zero derivatives) for t <= 0 and exactly 1 for t >= 1.
    """
    t = np.atleast_1d(np.asarray(t, dtype=np.float64))
    out = np.zeros((order + 1,) + t.shape)
    hi = t >= 1.0
    out[0][hi] = 1.0
    # interior lanes; below ~1.3e-3 the numerator underflows to an exact 0,
    # so a hard floor only guards against overflow in 1/t powers
    mid = (t > 1e-40) & (t < 1.0)
    if np.any(mid):
        tm = Taylor.variable(t[mid], order)
        e1 = (-(tm.reciprocal())).exp()
        e2 = (-((1.0 - tm).reciprocal())).exp()
        s = e1 / (e1 + e2)
        out[:, mid] = s.derivatives()
    return out


def smoothstep(t) -> np.ndarray:
    return smoothstep_derivatives(t, 0)[0]


def _polystep_coeffs(smoothness: int) -> np.ndarray:
    # monomial coefficients of the C^N Hermite step on [0,1]:
    # S(t) = t^{N+1} sum_{k<=N} C(N+k,k) C(2N+1,N-k) (-t)^k, degree 2N+1
    n = smoothness
    c = np.zeros(2 * n + 2)
    for k in range(n + 1):
        c[n + 1 + k] = math.comb(n + k, k) * math.comb(2 * n + 1, n - k) * (-1) ** k
    return c


def polystep_derivatives(t, order: int, smoothness: int = 7) -> np.ndarray:
    """Derivatives of the C^N polynomial Hermite step on [0,1].

    Same contract as smoothstep_derivatives (exact 0 below, exact 1 above)
    but with N continuous derivatives and moderate derivative growth, so
    finite-difference checks of fields built from it reach the asymptotic
    regime at coarse grids.  The exp(-1/t) step's high derivatives spike in
    a band ~1/40 of the transition, which keeps 4th-order stencils out of
    the Taylor regime until n is in the several hundreds.
    """
    t = np.atleast_1d(np.asarray(t, dtype=np.float64))
    out = np.zeros((order + 1,) + t.shape)
    hi = t >= 1.0
    out[0][hi] = 1.0
    mid = (t > 0.0) & ~hi
    if np.any(mid):
        tm = t[mid]
        cd = _polystep_coeffs(smoothness)
        for d in range(order + 1):
            out[d][mid] = np.polyval(cd[::-1], tm)
            cd = cd[1:] * np.arange(1, cd.size)
    return out
