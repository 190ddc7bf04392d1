"""Weighted Sobolev norms, decay-rate fits, sharpness scans, support checks.

The discrete b-norm of order k with weight exponent delta is

    ||u||^2 = sum_{i<=k} || <x>^(delta+i) D^i u ||^2,

where <x> = sqrt(1 + |x|^2) and |D^i u|^2 collects every i-th order
stencil derivative with its multinomial multiplicity, so the value does
not depend on how the axes are labeled.  Each extra derivative buys one
extra power of <x>: that trade is what the decay fits below measure
pointwise, and what makes the norm the right stopping gauge for the
fixed-point solver.

Sharpness scans integrate the analytic seed over far shells (no grid is
involved); they exhibit the dichotomy that the squared s-weighted norm
accumulates less and less per shell while the (s+1)-weighted one grows
without bound, which is exactly the borderline behavior the weight L
was picked for.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import roots_legendre

from .errors import ConedataError
from .fields import (
    SYM_WEIGHTS,
    ConeSpec,
    ScalarField,
    SymTensorField,
    VectorField,
    fd_partial,
    pairwise_sum,
)
from .seed import SeedEvaluator, SeedSpec
from .weights import WeightFunction


@dataclass(frozen=True)
class BNormSpec:
    """Order, weight, stencil order, and integration domain of a b-norm."""

    k: int
    delta: float
    order: int = 4
    domain: str = "box"
    cone: ConeSpec | None = None

    def __post_init__(self):
        if self.k < 0:
            raise ValueError(f"derivative count k must be >= 0, got {self.k}")
        if self.order not in (2, 4):
            raise ValueError(f"stencil order must be 2 or 4, got {self.order}")
        if self.domain not in ("box", "cone"):
            raise ValueError(f"domain must be 'box' or 'cone', got {self.domain!r}")
        if self.domain == "cone" and self.cone is None:
            raise ValueError("cone-restricted norm needs a ConeSpec")


def _component_stack(field):
    if isinstance(field, ScalarField):
        return [field.values], [1.0]
    if isinstance(field, VectorField):
        return [field.values[c] for c in range(3)], [1.0] * 3
    if isinstance(field, SymTensorField):
        return [field.values[c] for c in range(6)], [float(w) for w in SYM_WEIGHTS]
    raise TypeError(f"unsupported field type {type(field).__name__}")


def _multiplicity(alpha: tuple) -> float:
    """Number of orderings of the multi-index alpha (given nondecreasing)."""
    counts = [alpha.count(a) for a in set(alpha)]
    num = math.factorial(len(alpha))
    for c in counts:
        num //= math.factorial(c)
    return float(num)


def b_norm(field, spec: BNormSpec) -> float:
    """Discrete H_b^{k,delta} norm of a scalar/vector/tensor field."""
    grid = field.grid
    comps, cws = _component_stack(field)
    one_r2 = 1.0 + grid.radius() ** 2
    mask = None
    if spec.domain == "cone":
        inside = spec.cone.contains(grid.points())
        mask = inside.reshape((grid.n,) * 3, order="F")
    total = 0.0
    sp = grid.spacing
    for cw, comp in zip(cws, comps):
        level = {(): comp}
        for i in range(spec.k + 1):
            w = one_r2 ** (spec.delta + i)  # <x>^{2(delta+i)}
            for alpha, arr in level.items():
                sq = arr * arr * w
                if mask is not None:
                    sq = sq[mask]
                total += cw * _multiplicity(alpha) * pairwise_sum(sq)
            if i < spec.k:
                nxt = {}
                for alpha, arr in level.items():
                    start = alpha[-1] if alpha else 0
                    for a in range(start, 3):
                        nxt[alpha + (a,)] = fd_partial(arr, a, sp, spec.order)
                level = nxt
    return math.sqrt(total * sp**3)


def _magnitude_grid(field) -> np.ndarray:
    """Pointwise |field| as an (n, n, n) array."""
    if isinstance(field, ScalarField):
        return np.abs(field.values)
    if isinstance(field, VectorField):
        return np.sqrt(np.sum(field.values**2, axis=0))
    if isinstance(field, SymTensorField):
        return np.sqrt(field.frobenius_sq())
    raise TypeError(f"unsupported field type {type(field).__name__}")


def embedding_check(field, k: int, delta: float, order: int = 4) -> float:
    """sup |<x>^{3/2+delta} u| over b_norm(u, k, delta); expected O(1) for k >= 2."""
    if k < 2:
        raise ValueError("embedding needs k >= 2 (the estimate requires k > 3/2)")
    mag = _magnitude_grid(field)
    one_r2 = 1.0 + field.grid.radius() ** 2
    sup = float(np.max(mag * one_r2 ** (0.75 + 0.5 * delta)))
    nb = b_norm(field, BNormSpec(k=k, delta=delta, order=order))
    if nb == 0.0:
        return 0.0
    return sup / nb


def product_check(u: ScalarField, v: ScalarField, k: int,
                  delta1: float, delta2: float, order: int = 4) -> float:
    """||uv|| in H_b^{k, delta1+delta2+3/2} over the product of factor norms."""
    if u.grid != v.grid:
        raise ValueError("product factors must share one grid")
    delta = delta1 + delta2 + 1.5
    uv = ScalarField(u.grid, u.values * v.values)
    num = b_norm(uv, BNormSpec(k=k, delta=delta, order=order))
    den = (b_norm(u, BNormSpec(k=k, delta=delta1, order=order))
           * b_norm(v, BNormSpec(k=k, delta=delta2, order=order)))
    if den == 0.0:
        return 0.0
    return num / den


# ---- pointwise decay along rays ---------------------------------------------


def decay_fit(fn, direction, radii, divide_by_L: bool = False,
              weight: WeightFunction | None = None) -> float:
    """Least-squares slope of log fn(r*direction) against log r.

    fn maps an (N, 3) point array to positive magnitudes.  With
    divide_by_L the logarithm of the weight is added first, so a field
    behaving like r^p / L(r) fits the bare exponent p.
    """
    d = np.asarray(direction, dtype=np.float64)
    nd = float(np.linalg.norm(d))
    if nd == 0.0:
        raise ValueError("ray direction must be nonzero")
    d = d / nd
    radii = np.asarray(radii, dtype=np.float64)
    if radii.size < 2 or np.any(np.diff(radii) <= 0):
        raise ValueError("need at least two strictly increasing radii")
    vals = np.asarray(fn(radii[:, None] * d[None, :]), dtype=np.float64)
    floor = np.max(np.abs(vals)) * 1e-300
    if np.any(vals <= floor):
        raise ConedataError("field vanishes along the ray; decay fit undefined")
    y = np.log(vals)
    if divide_by_L:
        if weight is None:
            raise ValueError("divide_by_L needs the weight function")
        y = y + np.log(weight(radii))
    return float(np.polyfit(np.log(radii), y, 1)[0])


def seed_ray_samples(spec: SeedSpec, direction, radii) -> dict:
    """|h0|, |dh0|, |pi0| and L along a ray, for decay tables and fits."""
    d = np.asarray(direction, dtype=np.float64)
    d = d / np.linalg.norm(d)
    radii = np.asarray(radii, dtype=np.float64)
    pts = radii[:, None] * d[None, :]
    ev = SeedEvaluator(spec)
    h0, dh0, pi0, _ = ev.seed_with_grad(pts)
    return {
        "r": radii,
        "h0": np.sqrt(np.sum(h0**2, axis=(1, 2))),
        "dh0": np.sqrt(np.sum(dh0**2, axis=(1, 2, 3))),
        "pi0": np.sqrt(np.sum(pi0**2, axis=(1, 2))),
        "L": spec.weight(radii),
    }


# ---- far-field sharpness scan -----------------------------------------------


@dataclass(frozen=True)
class SharpnessScan:
    """Shell increments of the s'-weighted squared seed norm over the plateau cone."""

    s_prime: float
    radii: np.ndarray
    increments: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.radii, dtype=np.float64)
        inc = np.asarray(self.increments, dtype=np.float64)
        if r.ndim != 1 or r.size < 2 or np.any(np.diff(r) <= 0):
            raise ValueError("shell radii must be strictly increasing")
        if inc.shape != (r.size - 1,):
            raise ValueError("need one increment per consecutive radius pair")
        if np.any(inc < 0):
            raise ValueError("shell increments must be nonnegative")
        object.__setattr__(self, "radii", r)
        object.__setattr__(self, "increments", inc)


def sharpness_scan(spec: SeedSpec, s_prime: float, radii=None,
                   n_theta: int = 8, n_phi: int = 8, n_radial: int = 16) -> SharpnessScan:
    """Integrate <x>^{s'-4} |h0|^2 over far shells of the plateau cone.

    Pure polar quadrature on the analytic evaluator: Gauss-Legendre in
    the cosine of the polar angle over the plateau cap, in the azimuth,
    and in log r per shell.  No grid is involved; the shells default to
    radii far beyond any box.
    """
    if s_prime < spec.s - 1e-12:
        raise ValueError(f"s_prime must be >= s = {spec.s}, got {s_prime}")
    if radii is None:
        radii = np.logspace(3.0, 6.0, 10)
    radii = np.asarray(radii, dtype=np.float64)
    if radii.size < 2 or np.any(np.diff(radii) <= 0):
        raise ValueError("shell radii must be strictly increasing")

    cone = spec.cone
    frame = cone.frame()
    xc, wc = roots_legendre(n_theta)
    cos_lo = math.cos(cone.theta_inner)
    cosu = 0.5 * (xc + 1.0) * (1.0 - cos_lo) + cos_lo
    wcos = wc * 0.5 * (1.0 - cos_lo)
    xp, wp = roots_legendre(n_phi)
    phi = math.pi * (xp + 1.0)
    wphi = wp * math.pi
    sinu = np.sqrt(np.maximum(0.0, 1.0 - cosu**2))
    dirs = (cosu[:, None, None] * frame[0][None, None, :]
            + (sinu[:, None] * np.cos(phi)[None, :])[:, :, None] * frame[1][None, None, :]
            + (sinu[:, None] * np.sin(phi)[None, :])[:, :, None] * frame[2][None, None, :])
    dirs = dirs.reshape(-1, 3)
    wang = (wcos[:, None] * wphi[None, :]).reshape(-1)

    xt, wt = roots_legendre(n_radial)
    ev = SeedEvaluator(spec)
    increments = np.empty(radii.size - 1)
    for sh, (ra, rb) in enumerate(zip(radii[:-1], radii[1:])):
        ta, tb = math.log(ra), math.log(rb)
        ts = 0.5 * (xt + 1.0) * (tb - ta) + ta
        wts = wt * 0.5 * (tb - ta)
        rs = np.exp(ts)
        pts = (rs[:, None, None] * dirs[None, :, :]).reshape(-1, 3)
        h0, _ = ev.seed(pts)
        mag2 = np.sum(h0**2, axis=(1, 2)).reshape(rs.size, dirs.shape[0])
        xw = (1.0 + rs**2) ** (0.5 * (s_prime - 4.0))
        shell = np.einsum("t,t,td,d->", wts * rs**3, xw, mag2, wang)
        increments[sh] = shell
    return SharpnessScan(s_prime=s_prime, radii=radii, increments=increments)


# ---- support ---------------------------------------------------------------


def support_check(field, cone: ConeSpec) -> float:
    """Largest |field| over grid points strictly outside the closed cone."""
    grid = field.grid
    pts = grid.points()
    cosang = cone.cos_angle(pts).reshape((grid.n,) * 3, order="F")
    r = grid.radius()
    outside = (cosang < math.cos(cone.theta)) & (r > 0)
    if not np.any(outside):
        return 0.0
    return float(np.max(_magnitude_grid(field)[outside]))


# ---- solver gauge ----------------------------------------------------------


def hpi_norm(h: SymTensorField, pi: SymTensorField, s: float, q: int,
             order: int = 4) -> float:
    """Product norm H_b^{q+1,(s-4)/2} x H_b^{q,(s-2)/2} on the grid box."""
    nh = b_norm(h, BNormSpec(k=q + 1, delta=0.5 * (s - 4.0), order=order))
    npi = b_norm(pi, BNormSpec(k=q, delta=0.5 * (s - 2.0), order=order))
    return math.sqrt(nh * nh + npi * npi)
