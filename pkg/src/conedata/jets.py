"""Forward-mode multivariate jets up to fourth order.

A Jet carries the value and full (symmetric) derivative tensors of a
scalar function of x in R^3 at a batch of points: f (N,), df (N,3),
d2f (N,3,3), d3f (N,3,3,3), d4f (N,3,3,3,3).  Products follow Leibniz,
outer univariate functions compose via Faa di Bruno; every symmetrized
term is written as an explicit einsum so the index bookkeeping stays
visible.

Fourth order is exactly what evaluating curvature of a metric built from
second derivatives of a scalar potential requires.
"""

from __future__ import annotations

import numpy as np


class Jet:
    __slots__ = ("order", "d")

    def __init__(self, order: int, tensors):
        if not 0 <= order <= 4:
            raise ValueError("jet order must be between 0 and 4")
        self.order = order
        self.d = list(tensors)  # d[k] has shape (N,) + (3,)*k

    @staticmethod
    def coords(points: np.ndarray, order: int):
        """Jets of the three coordinate functions at given points (N,3)."""
        pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
        n = pts.shape[0]
        out = []
        for i in range(3):
            ts = [pts[:, i]]
            if order >= 1:
                g = np.zeros((n, 3))
                g[:, i] = 1.0
                ts.append(g)
            for k in range(2, order + 1):
                ts.append(np.zeros((n,) + (3,) * k))
            out.append(Jet(order, ts))
        return out

    @staticmethod
    def const(value, order: int, n: int):
        ts = [np.full(n, float(value))]
        for k in range(1, order + 1):
            ts.append(np.zeros((n,) + (3,) * k))
        return Jet(order, ts)

    def copy(self) -> "Jet":
        return Jet(self.order, [t.copy() for t in self.d])

    # ---- linear structure -------------------------------------------------

    def __add__(self, other):
        if isinstance(other, Jet):
            return Jet(self.order, [a + b for a, b in zip(self.d, other.d)])
        ts = [t.copy() for t in self.d]
        ts[0] = ts[0] + other
        return Jet(self.order, ts)

    __radd__ = __add__

    def __neg__(self):
        return Jet(self.order, [-t for t in self.d])

    def __sub__(self, other):
        if isinstance(other, Jet):
            return Jet(self.order, [a - b for a, b in zip(self.d, other.d)])
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "Jet":
        return Jet(self.order, [t * c for t in self.d])

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return self.scale(other)
        K = self.order
        f, g = self.d, other.d
        out = [f[0] * g[0]]
        if K >= 1:
            out.append(
                np.einsum("ni,n->ni", f[1], g[0]) + np.einsum("n,ni->ni", f[0], g[1])
            )
        if K >= 2:
            out.append(
                np.einsum("nij,n->nij", f[2], g[0])
                + np.einsum("ni,nj->nij", f[1], g[1])
                + np.einsum("nj,ni->nij", f[1], g[1])
                + np.einsum("n,nij->nij", f[0], g[2])
            )
        if K >= 3:
            out.append(
                np.einsum("nijk,n->nijk", f[3], g[0])
                + np.einsum("nij,nk->nijk", f[2], g[1])
                + np.einsum("nik,nj->nijk", f[2], g[1])
                + np.einsum("njk,ni->nijk", f[2], g[1])
                + np.einsum("nk,nij->nijk", f[1], g[2])
                + np.einsum("nj,nik->nijk", f[1], g[2])
                + np.einsum("ni,njk->nijk", f[1], g[2])
                + np.einsum("n,nijk->nijk", f[0], g[3])
            )
        if K >= 4:
            out.append(
                np.einsum("nijkl,n->nijkl", f[4], g[0])
                + np.einsum("nijk,nl->nijkl", f[3], g[1])
                + np.einsum("nijl,nk->nijkl", f[3], g[1])
                + np.einsum("nikl,nj->nijkl", f[3], g[1])
                + np.einsum("njkl,ni->nijkl", f[3], g[1])
                + np.einsum("nij,nkl->nijkl", f[2], g[2])
                + np.einsum("nik,njl->nijkl", f[2], g[2])
                + np.einsum("nil,njk->nijkl", f[2], g[2])
                + np.einsum("njk,nil->nijkl", f[2], g[2])
                + np.einsum("njl,nik->nijkl", f[2], g[2])
                + np.einsum("nkl,nij->nijkl", f[2], g[2])
                + np.einsum("nl,nijk->nijkl", f[1], g[3])
                + np.einsum("nk,nijl->nijkl", f[1], g[3])
                + np.einsum("nj,nikl->nijkl", f[1], g[3])
                + np.einsum("ni,njkl->nijkl", f[1], g[3])
                + np.einsum("n,nijkl->nijkl", f[0], g[4])
            )
        return Jet(K, out)

    __rmul__ = __mul__

    # ---- composition with a univariate outer function ---------------------

    def apply(self, table: np.ndarray) -> "Jet":
        """Compose with F given as a derivative table (order+1, N) at d[0]."""
        K = self.order
        if table.shape[0] < K + 1:
            raise ValueError("derivative table too short for jet order")
        F = table
        f = self.d
        out = [F[0].copy()]
        if K >= 1:
            out.append(np.einsum("n,ni->ni", F[1], f[1]))
        if K >= 2:
            out.append(
                np.einsum("n,ni,nj->nij", F[2], f[1], f[1])
                + np.einsum("n,nij->nij", F[1], f[2])
            )
        if K >= 3:
            t21 = (
                np.einsum("nij,nk->nijk", f[2], f[1])
                + np.einsum("nik,nj->nijk", f[2], f[1])
                + np.einsum("njk,ni->nijk", f[2], f[1])
            )
            out.append(
                np.einsum("n,ni,nj,nk->nijk", F[3], f[1], f[1], f[1])
                + np.einsum("n,nijk->nijk", F[2], t21)
                + np.einsum("n,nijk->nijk", F[1], f[3])
            )
        if K >= 4:
            t211 = (
                np.einsum("nij,nk,nl->nijkl", f[2], f[1], f[1])
                + np.einsum("nik,nj,nl->nijkl", f[2], f[1], f[1])
                + np.einsum("nil,nj,nk->nijkl", f[2], f[1], f[1])
                + np.einsum("njk,ni,nl->nijkl", f[2], f[1], f[1])
                + np.einsum("njl,ni,nk->nijkl", f[2], f[1], f[1])
                + np.einsum("nkl,ni,nj->nijkl", f[2], f[1], f[1])
            )
            t22 = (
                np.einsum("nij,nkl->nijkl", f[2], f[2])
                + np.einsum("nik,njl->nijkl", f[2], f[2])
                + np.einsum("nil,njk->nijkl", f[2], f[2])
            )
            t31 = (
                np.einsum("nijk,nl->nijkl", f[3], f[1])
                + np.einsum("nijl,nk->nijkl", f[3], f[1])
                + np.einsum("nikl,nj->nijkl", f[3], f[1])
                + np.einsum("njkl,ni->nijkl", f[3], f[1])
            )
            out.append(
                np.einsum("n,ni,nj,nk,nl->nijkl", F[4], f[1], f[1], f[1], f[1])
                + np.einsum("n,nijkl->nijkl", F[3], t211)
                + np.einsum("n,nijkl->nijkl", F[2], t22 + t31)
                + np.einsum("n,nijkl->nijkl", F[1], f[4])
            )
        return Jet(K, out)


def jet_dot(a, b) -> Jet:
    """Dot product of two 3-lists of jets."""
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def jet_linear(coeffs, jets) -> Jet:
    out = jets[0].scale(coeffs[0])
    for c, j in zip(coeffs[1:], jets[1:]):
        out = out + j.scale(c)
    return out
