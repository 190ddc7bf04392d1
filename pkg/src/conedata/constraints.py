"""Vacuum constraint operators and the flat-deviation change of variables.

The constraint map is C(g,k) = (R + (tr k)^2 - |k|^2, div(k - (tr k) g)).
In the shifted variables

    h = (g - delta) - delta tr(g - delta),   pi = k - delta tr k,

the linearization of C at flat data is exactly the linear operator
P(h,pi) = (d_i d_j h^ij, d_i pi^ij), so the remainder Phi := P - C is
quadratic with no linear part.  That identity survives discretization
verbatim: every derivative below is a composition of the same commuting
one-dimensional stencils, so the discrete DC(flat) cancels against the
discrete P term by term and Phi carries no stencil-truncation floor at
linear order.  The identity itself is checked symbolically in the test
suite by differentiating the full curvature formula at flat data.

All index work uses flat raising/lowering (upper and lower components
agree numerically); the inverse metric is the closed-form 3x3 adjugate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import PositivityError
from .fields import (
    SYM_COMPONENTS,
    GridSpec,
    ScalarField,
    SymTensorField,
    VectorField,
    fd_partial,
)

_EYE = np.eye(3)


@dataclass(frozen=True)
class MetricData:
    g: SymTensorField
    k: SymTensorField

    def __post_init__(self):
        if self.g.grid is not self.k.grid and self.g.grid != self.k.grid:
            raise ValueError("g and k must share one grid")

    @property
    def grid(self) -> GridSpec:
        return self.g.grid


@dataclass(frozen=True)
class HPiData:
    h: SymTensorField
    pi: SymTensorField

    def __post_init__(self):
        if self.h.grid is not self.pi.grid and self.h.grid != self.pi.grid:
            raise ValueError("h and pi must share one grid")

    @property
    def grid(self) -> GridSpec:
        return self.h.grid


def _shift_trace(values: np.ndarray, coeff: float) -> np.ndarray:
    """values + coeff * trace(values) * delta on (6, ...) component stacks."""
    tr = values[0] + values[3] + values[5]
    out = values.copy()
    for c, (i, j) in enumerate(SYM_COMPONENTS):
        if i == j:
            out[c] += coeff * tr
    return out


def to_hpi(md: MetricData) -> HPiData:
    dev = md.g.values.copy()
    for c, (i, j) in enumerate(SYM_COMPONENTS):
        if i == j:
            dev[c] -= 1.0
    h = _shift_trace(dev, -1.0)
    pi = _shift_trace(md.k.values, -1.0)
    grid = md.grid
    return HPiData(SymTensorField(grid, h), SymTensorField(grid, pi))


def reconstruct_gk(hp: HPiData, margin: float = 0.1) -> MetricData:
    """Invert the variable change; g must keep eigenvalues above `margin`.

    Positivity of g - margin*delta is decided by its Sylvester leading
    minors, which is exact and cheap; on failure the error names the worst
    grid point so diverging iterates are easy to localize.
    """
    g = _shift_trace(hp.h.values, -0.5)
    for c, (i, j) in enumerate(SYM_COMPONENTS):
        if i == j:
            g[c] += 1.0
    k = _shift_trace(hp.pi.values, -0.5)
    a11, a12, a13, a22, a23, a33 = (g[c] - (margin if i == j else 0.0)
                                    for c, (i, j) in enumerate(SYM_COMPONENTS))
    m1 = a11
    m2 = a11 * a22 - a12 * a12
    m3 = (a11 * (a22 * a33 - a23 * a23)
          - a12 * (a12 * a33 - a23 * a13)
          + a13 * (a12 * a23 - a22 * a13))
    worst = np.minimum(np.minimum(m1, m2), m3)
    wmin = worst.min()
    if not wmin > 0.0:
        idx = np.unravel_index(np.argmin(worst), worst.shape)
        raise PositivityError(
            f"reconstructed metric loses the positivity margin {margin} at "
            f"grid index {tuple(int(v) for v in idx)} (worst minor {wmin:.3e})"
        )
    grid = hp.grid
    return MetricData(SymTensorField(grid, g), SymTensorField(grid, k))


def apply_P(hp: HPiData, order: int = 4):
    """(d_i d_j h^ij, d_i pi^ij) by repeated first-derivative stencils."""
    grid = hp.grid
    sp = grid.spacing
    hfull = hp.h.full()
    f = np.zeros((grid.n,) * 3)
    for i in range(3):
        for j in range(3):
            f += fd_partial(fd_partial(hfull[i, j], i, sp, order), j, sp, order)
    pfull = hp.pi.full()
    F = np.stack([sum(fd_partial(pfull[i, j], i, sp, order) for i in range(3))
                  for j in range(3)])
    return ScalarField(grid, f), VectorField(grid, F)


# ---- pointwise constraint algebra ------------------------------------------


def _inverse3(g: np.ndarray) -> np.ndarray:
    """Adjugate inverse of symmetric (3, 3, ...) stacks."""
    a, b, c = g[0, 0], g[0, 1], g[0, 2]
    d, e, f = g[1, 1], g[1, 2], g[2, 2]
    A = d * f - e * e
    B = c * e - b * f
    C = b * e - c * d
    det = a * A + b * B + c * C
    inv = np.empty_like(g)
    inv[0, 0] = A
    inv[0, 1] = inv[1, 0] = B
    inv[0, 2] = inv[2, 0] = C
    inv[1, 1] = a * f - c * c
    inv[1, 2] = inv[2, 1] = b * c - a * e
    inv[2, 2] = a * d - b * b
    inv /= det
    return inv


def constraint_algebra(g, dg, d2g, k, dk):
    """Hamiltonian and momentum residuals from pointwise derivative stacks.

    Shapes: g, k are (3,3,...); dg, dk are (3,3,3,...) with dg[i,j,a] =
    d_a g_ij; d2g is (3,3,3,3,...) with d2g[i,j,a,b] = d_a d_b g_ij.  The
    same algebra serves the grid route (trailing grid axes, derivatives
    from stencils) and the analytic route (trailing point axis,
    derivatives from jets).  Returns (H, M) shaped (...) and (3, ...).
    """
    ginv = _inverse3(g)
    # Gamma^c_ab = 1/2 g^{cd} T_dab, T_dab = d_a g_db + d_b g_da - d_d g_ab
    T = np.einsum("dba...->dab...", dg) + dg - np.einsum("abd...->dab...", dg)
    Gam = 0.5 * np.einsum("cd...,dab...->cab...", ginv, T)
    dginv = -np.einsum("cp...,pqe...,qd...->cde...", ginv, dg, ginv)
    dT = (np.einsum("dbae...->dabe...", d2g)
          + d2g
          - np.einsum("abde...->dabe...", d2g))
    dGam = 0.5 * (np.einsum("cde...,dab...->cabe...", dginv, T)
                  + np.einsum("cd...,dabe...->cabe...", ginv, dT))
    R = (np.einsum("ab...,cabc...->...", ginv, dGam)
         - np.einsum("ab...,ccba...->...", ginv, dGam)
         + np.einsum("ab...,ccd...,dab...->...", ginv, Gam, Gam)
         - np.einsum("ab...,cad...,dcb...->...", ginv, Gam, Gam))
    trk = np.einsum("ab...,ab...->...", ginv, k)
    ksq = np.einsum("ia...,jb...,ij...,ab...->...", ginv, ginv, k, k)
    H = R + trk * trk - ksq
    # momentum: (div_g T)_j with T_ij = k_ij - (tr_g k) g_ij
    dtrk = (np.einsum("ija...,ij...->a...", dginv, k)
            + np.einsum("ij...,ija...->a...", ginv, dk))
    Tm = k - trk * g
    dTm = dk - np.einsum("a...,ij...->ija...", dtrk, g) - trk * dg
    M = (np.einsum("ia...,ija...->j...", ginv, dTm)
         - np.einsum("ia...,bai...,bj...->j...", ginv, Gam, Tm)
         - np.einsum("ia...,baj...,ib...->j...", ginv, Gam, Tm))
    return H, M


def constraints_pointwise(jets: dict):
    """(H, M) from a metric_jets-style dict (points-first arrays)."""
    g = np.moveaxis(jets["g"], 0, -1)
    dg = np.moveaxis(jets["dg"], 0, -1)
    d2g = np.moveaxis(jets["d2g"], 0, -1)
    k = np.moveaxis(jets["k"], 0, -1)
    dk = np.moveaxis(jets["dk"], 0, -1)
    H, M = constraint_algebra(g, dg, d2g, k, dk)
    return H, M.T


def _grid_derivative_stacks(field: SymTensorField, second: bool, order: int = 4):
    grid = field.grid
    sp = grid.spacing
    full = field.full()
    shape = (grid.n,) * 3
    d1 = np.empty((3, 3, 3) + shape)
    for i in range(3):
        for j in range(3):
            for a in range(3):
                d1[i, j, a] = fd_partial(full[i, j], a, sp, order)
    if not second:
        return full, d1, None
    d2 = np.empty((3, 3, 3, 3) + shape)
    for i in range(3):
        for j in range(3):
            for a in range(3):
                d2[i, j, a, a] = fd_partial(d1[i, j, a], a, sp, order)
                for b in range(a + 1, 3):
                    d2[i, j, a, b] = d2[i, j, b, a] = fd_partial(d1[i, j, a], b, sp, order)
    return full, d1, d2


def constraints_grid(md: MetricData, order: int = 4):
    """Full nonlinear (H, M) on the grid via stencil derivatives."""
    gfull, dg, d2g = _grid_derivative_stacks(md.g, second=True, order=order)
    kfull, dk, _ = _grid_derivative_stacks(md.k, second=False, order=order)
    H, M = constraint_algebra(gfull, dg, d2g, kfull, dk)
    grid = md.grid
    return ScalarField(grid, H), VectorField(grid, M)


def hamiltonian_constraint(md: MetricData, order: int = 4) -> ScalarField:
    return constraints_grid(md, order)[0]


def momentum_constraint(md: MetricData, order: int = 4) -> VectorField:
    return constraints_grid(md, order)[1]


def apply_Phi(hp: HPiData, order: int = 4):
    """Quadratic remainder Phi(h,pi) = P(h,pi) - C(reconstruct(h,pi)).

    Solving P(h,pi) = Phi(h,pi) is the constraint system itself, so a
    fixed point of (h1,pi1) -> S Phi(seed + (h1,pi1)) reconstructs to
    constraint-satisfying data.
    """
    f, F = apply_P(hp, order)
    H, M = constraints_grid(reconstruct_gk(hp), order)
    grid = hp.grid
    return (
        ScalarField(grid, f.values - H.values),
        VectorField(grid, F.values - M.values),
    )
