"""Borderline radial weights L(r) from the iterated-log family.

L(r) = prod_{j=1..m} (log_(j)(2+r))^beta_j, positive and nondecreasing,
growing slower than any power.  The admissible pattern sets the first
m-1 exponents to 1/2 and the last one above 1/2; that makes the tail
integral of 1/(r L^2) finite while every integral of r^(delta-1)/L^2
still diverges.  A constant weight is also constructible so the
admissibility checker has a known-failing input.

Below R_star the closed form is reused whenever it is itself positive,
smooth and nondecreasing there (always true at depth m=1); deeper
families get a quintic Hermite blend that matches value and two
derivatives at R_star and stays positive and nondecreasing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from .taylor1d import Taylor


def min_r_star(m: int) -> float:
    """Smallest R_star with log_(j)(2+r) >= 2 for all j <= m, r >= R_star."""
    x = 2.0
    for _ in range(m):
        x = math.exp(x)
    return x - 2.0


def _iterlog_taylor(tv: Taylor, beta) -> Taylor:
    """Product of iterated-log powers as a Taylor expansion in r."""
    w = (2.0 + tv).log()
    out = w.pow(beta[0])
    for b in beta[1:]:
        w = w.log()
        out = out * w.pow(b)
    return out


def _iterlog_value(r: np.ndarray, beta) -> np.ndarray:
    w = np.log(2.0 + r)
    out = np.power(w, beta[0])
    for b in beta[1:]:
        w = np.log(w)
        out = out * np.power(w, b)
    return out


@dataclass(frozen=True)
class WeightFunction:
    """Radial weight with exact derivatives of any order.

    kind is "iterlog" or "const".  beta holds the exponents (length m);
    R1 >= 1 is the radius past which seed cutoffs are fully on.
    """

    m: int = 1
    beta: tuple = (1.0,)
    R_star: float = None
    R1: float = None
    kind: str = "iterlog"
    const_value: float = 1.0
    _blend: tuple = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.kind == "const":
            if not self.const_value > 0:
                raise ValueError("constant weight must be positive")
            object.__setattr__(self, "m", 0)
            object.__setattr__(self, "beta", ())
            if self.R_star is None:
                object.__setattr__(self, "R_star", 2.0)
            if self.R1 is None:
                object.__setattr__(self, "R1", max(1.0, self.R_star))
            return
        if self.kind != "iterlog":
            raise ValueError(f"unknown weight kind {self.kind!r}")
        beta = tuple(float(b) for b in np.atleast_1d(self.beta))
        object.__setattr__(self, "beta", beta)
        if self.m != len(beta):
            raise ValueError(f"depth m={self.m} but {len(beta)} exponents given")
        if self.m < 1:
            raise ValueError("iterated-log weight needs depth m >= 1")
        if any(b <= 0 for b in beta):
            raise ValueError("exponents must be positive")
        for b in beta[:-1]:
            if b != 0.5:
                raise ValueError("all exponents before the last must equal 1/2")
        if self.R_star is None:
            object.__setattr__(self, "R_star", max(8.0, math.ceil(min_r_star(self.m))))
        if self.R_star < 2.0 or self.R_star < min_r_star(self.m) - 1e-9:
            raise ValueError(
                f"R_star={self.R_star} too small: need >= {min_r_star(self.m):.4g} "
                f"so every iterated log stays >= 2"
            )
        if self.R1 is None:
            object.__setattr__(self, "R1", float(self.R_star))
        if self.R1 < 1.0:
            raise ValueError("R1 must be >= 1")
        if self.m > 1:
            object.__setattr__(self, "_blend", self._build_blend())

    # ---- inner extension ------------------------------------------------

    def _build_blend(self):
        """Quintic on [0, R_star] matching (value, d1, d2) at R_star, flat at 0."""
        R = float(self.R_star)
        tv = Taylor.variable(np.array([R]), 2)
        d = _iterlog_taylor(tv, self.beta).derivatives()[:, 0]
        v, d1, d2 = float(d[0]), float(d[1]), float(d[2])
        c0 = v - 0.5 * d1 * R
        # p(x) = c0 + sum a_k x^k, k=3..5, in x = r/R
        A = np.array([[1.0, 1.0, 1.0], [3.0, 4.0, 5.0], [6.0, 12.0, 20.0]])
        rhs = np.array([v - c0, d1 * R, d2 * R * R])
        a3, a4, a5 = np.linalg.solve(A, rhs)
        coeffs = (c0, 0.0, 0.0, a3, a4, a5)
        xs = np.linspace(0.0, 1.0, 4001)
        p = sum(c * xs**k for k, c in enumerate(coeffs))
        dp = sum(k * c * xs ** (k - 1) for k, c in enumerate(coeffs) if k >= 1)
        if np.any(p <= 0) or np.any(dp < -1e-12 * max(1.0, abs(d1 * R))):
            raise ValueError("inner extension failed to stay positive nondecreasing")
        return coeffs

    def _blend_derivs(self, r: np.ndarray, kmax: int) -> np.ndarray:
        R = float(self.R_star)
        x = r / R
        out = np.zeros((kmax + 1,) + r.shape)
        for k in range(kmax + 1):
            acc = np.zeros_like(r)
            for p, c in enumerate(self._blend):
                if p >= k:
                    acc += c * math.perm(p, k) * x ** (p - k)
            out[k] = acc / R**k
        return out

    # ---- evaluation ------------------------------------------------------

    def derivs(self, r, kmax: int) -> np.ndarray:
        """L and its first kmax derivatives, shape (kmax+1, N)."""
        r = np.atleast_1d(np.asarray(r, dtype=np.float64))
        if np.any(r < 0):
            raise ValueError("radius must be nonnegative")
        if self.kind == "const":
            out = np.zeros((kmax + 1,) + r.shape)
            out[0] = self.const_value
            return out
        if self.m == 1:
            return _iterlog_taylor(Taylor.variable(r, kmax), self.beta).derivatives()
        out = np.zeros((kmax + 1,) + r.shape)
        outer = r >= self.R_star
        if np.any(outer):
            tv = Taylor.variable(r[outer], kmax)
            out[:, outer] = _iterlog_taylor(tv, self.beta).derivatives()
        if np.any(~outer):
            out[:, ~outer] = self._blend_derivs(r[~outer], kmax)
        return out

    def __call__(self, r) -> np.ndarray:
        return self.derivs(r, 0)[0]

    def inv_derivs(self, r, kmax: int) -> np.ndarray:
        """1/L and its first kmax derivatives."""
        r = np.atleast_1d(np.asarray(r, dtype=np.float64))
        if self.kind == "const":
            out = np.zeros((kmax + 1,) + r.shape)
            out[0] = 1.0 / self.const_value
            return out
        if self.m == 1:
            tv = Taylor.variable(r, kmax)
            return _iterlog_taylor(tv, self.beta).reciprocal().derivatives()
        out = np.zeros((kmax + 1,) + r.shape)
        outer = r >= self.R_star
        if np.any(outer):
            tv = Taylor.variable(r[outer], kmax)
            out[:, outer] = _iterlog_taylor(tv, self.beta).reciprocal().derivatives()
        if np.any(~outer):
            # Leibniz from the blend's own derivatives
            bd = self._blend_derivs(r[~outer], kmax)
            inv = np.zeros_like(bd)
            inv[0] = 1.0 / bd[0]
            for k in range(1, kmax + 1):
                acc = np.zeros_like(bd[0])
                for j in range(1, k + 1):
                    acc += math.comb(k, j) * bd[j] * inv[k - j]
                inv[k] = -acc / bd[0]
            out[:, ~outer] = inv
        return out

    def value_at_log(self, t) -> np.ndarray:
        """L(e^t) computed stably for huge t (radius never materialized)."""
        t = np.atleast_1d(np.asarray(t, dtype=np.float64))
        if self.kind == "const":
            return np.full(t.shape, self.const_value)
        w = t + np.log1p(2.0 * np.exp(-np.minimum(t, 700.0)))
        out = np.power(w, self.beta[0])
        for b in self.beta[1:]:
            w = np.log(w)
            out = out * np.power(w, b)
        return out


@dataclass
class AdmissibilityReport:
    tail_converges: bool
    tail_increments: list
    power_diverges: dict
    power_ok: bool
    symbol_ratios: dict
    symbol_ok: bool
    slow_variation: list
    slow_variation_ok: bool
    thresholds: dict

    @property
    def ok(self) -> bool:
        return self.tail_converges and self.power_ok and self.symbol_ok and self.slow_variation_ok

    def failures(self) -> list:
        out = []
        if not self.tail_converges:
            out.append("tail integral of 1/(r L^2) shows no convergence")
        if not self.power_ok:
            bad = [d for d, v in self.power_diverges.items() if not v]
            out.append(f"integral of r^(delta-1)/L^2 fails to diverge for delta={bad}")
        if not self.symbol_ok:
            bad = [k for k, v in self.symbol_ratios.items() if not v["ok"]]
            out.append(f"symbol bound r^k L |d^k(1/L)| grows at the tail for k={bad}")
        if not self.slow_variation_ok:
            out.append("r L'/L is not decaying")
        return out


def check_admissibility(w: WeightFunction, q: int = 3, deltas=(0.1, 0.5, 1.0)) -> AdmissibilityReport:
    """Numeric proxies for the weight conditions.

    (a) convergence of the tail integral: increments of int dt/L(e^t)^2
        between checkpoints doubling in the deepest iterated log must
        shrink (geometric decay <= 0.95 per doubling on average).
    (b) divergence for every delta > 0: late increments of
        int e^(delta t)/L(e^t)^2 dt must exceed early ones.
    (c) symbol bounds r^k L |d^k (1/L)| for k <= q+3: the maximum over the
        last sampled decade must not exceed 1.1x the overall maximum.
    (d) slow variation: r L'/L decaying, below 1e-1 by r = 1e12.
    """
    thresholds = {"tail_ratio": 0.95, "power_ratio": 10.0, "symbol_tail": 1.1, "slow_var": 1e-1}

    # (a): checkpoints dyadic in the deepest iterated log tau; t = log r
    depth = max(1, w.m)
    taus = 8.0 * 2.0 ** np.arange(0, 8)
    ts = taus.copy()
    for _ in range(depth - 1):
        ts = np.exp(np.minimum(ts, 690.0))
    ts = np.minimum(ts, 1e300)
    increments = []
    for a, b in zip(ts[:-1], ts[1:]):
        if b <= a:
            break
        val, _ = quad(lambda t: 1.0 / w.value_at_log(np.array([t]))[0] ** 2, a, b, limit=200)
        increments.append(val)
    ratios = [b / a for a, b in zip(increments[:-1], increments[1:]) if a > 0]
    tail_converges = len(ratios) >= 3 and max(ratios[-3:]) <= thresholds["tail_ratio"]

    # (b): in t-space out to T = 60/delta, late increments must dominate
    power_diverges = {}
    for d in deltas:
        T = max(80.0, 60.0 / d)
        edges = np.linspace(math.log(10.0), T, 9)
        incs = []
        for a, b in zip(edges[:-1], edges[1:]):
            val, _ = quad(
                lambda t: math.exp(d * t) / w.value_at_log(np.array([t]))[0] ** 2, a, b, limit=200
            )
            incs.append(val)
        power_diverges[d] = incs[-1] > thresholds["power_ratio"] * incs[0]
    power_ok = all(power_diverges.values())

    # (c): sampled symbol ratios
    rs = np.logspace(math.log10(max(w.R1, w.R_star, 2.0)), 12, 121)
    inv = w.inv_derivs(rs, q + 3)
    Lv = w(rs)
    symbol_ratios = {}
    for k in range(1, q + 4):
        ratio = rs**k * Lv * np.abs(inv[k])
        head = float(np.max(ratio[:-10])) if np.any(ratio[:-10]) else 0.0
        tail = float(np.max(ratio[-10:]))
        ok = np.all(np.isfinite(ratio)) and tail <= thresholds["symbol_tail"] * max(head, 1e-300)
        symbol_ratios[k] = {"ok": bool(ok), "max": float(np.max(ratio)), "tail_max": tail}
    symbol_ok = all(v["ok"] for v in symbol_ratios.values())

    # (d): slow variation
    rs_d = np.logspace(math.log10(max(w.R_star, 2.0)), 12, 41)
    dv = w.derivs(rs_d, 1)
    slow = rs_d * dv[1] / dv[0]
    dec = np.all(np.diff(slow[len(slow) // 2 :]) <= 1e-12)
    slow_ok = bool(dec and slow[-1] < thresholds["slow_var"])

    return AdmissibilityReport(
        tail_converges=bool(tail_converges),
        tail_increments=increments,
        power_diverges=power_diverges,
        power_ok=bool(power_ok),
        symbol_ratios=symbol_ratios,
        symbol_ok=bool(symbol_ok),
        slow_variation=[float(x) for x in slow],
        slow_variation_ok=slow_ok,
        thresholds=thresholds,
    )
