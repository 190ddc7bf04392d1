"""Compiled inner loops for the grid route of the solution operator.

One output point costs (cap nodes) x (ray nodes) interpolated source
samples, so the triple loop lives here under numba.  Grids are indexed
[a, b, c] for (x_a, y_b, z_c) on [-hw, hw]^3; rays leave each output
point in direction -omega and stop at the box boundary.
"""

import math

import numpy as np
from numba import njit


@njit(cache=True, inline="always")
def _sample_tri(g0, g1, g2, g3, u, v, w, n):
    iu = int(math.floor(u))
    iv = int(math.floor(v))
    iw = int(math.floor(w))
    if iu < 0:
        iu = 0
    elif iu > n - 2:
        iu = n - 2
    if iv < 0:
        iv = 0
    elif iv > n - 2:
        iv = n - 2
    if iw < 0:
        iw = 0
    elif iw > n - 2:
        iw = n - 2
    fu = u - iu
    fv = v - iv
    fw = w - iw
    a0 = a1 = a2 = a3 = 0.0
    for da in range(2):
        wa = fu if da else 1.0 - fu
        for db in range(2):
            wab = wa * (fv if db else 1.0 - fv)
            for dc in range(2):
                wt = wab * (fw if dc else 1.0 - fw)
                ja = iu + da
                jb = iv + db
                jc = iw + dc
                a0 += g0[ja, jb, jc] * wt
                a1 += g1[ja, jb, jc] * wt
                a2 += g2[ja, jb, jc] * wt
                a3 += g3[ja, jb, jc] * wt
    return a0, a1, a2, a3


@njit(cache=True, inline="always")
def _cubic_weights(u, n):
    j = int(math.floor(u)) - 1
    if j < 0:
        j = 0
    elif j > n - 4:
        j = n - 4
    x = u - j
    w0 = -(x - 1.0) * (x - 2.0) * (x - 3.0) / 6.0
    w1 = x * (x - 2.0) * (x - 3.0) / 2.0
    w2 = -x * (x - 1.0) * (x - 3.0) / 2.0
    w3 = x * (x - 1.0) * (x - 2.0) / 6.0
    return j, w0, w1, w2, w3


@njit(cache=True, inline="always")
def _quintic_weights(u, n):
    j = int(math.floor(u)) - 2
    if j < 0:
        j = 0
    elif j > n - 6:
        j = n - 6
    x = u - j
    x1 = x - 1.0
    x2 = x - 2.0
    x3 = x - 3.0
    x4 = x - 4.0
    x5 = x - 5.0
    w0 = -x1 * x2 * x3 * x4 * x5 / 120.0
    w1 = x * x2 * x3 * x4 * x5 / 24.0
    w2 = -x * x1 * x3 * x4 * x5 / 12.0
    w3 = x * x1 * x2 * x4 * x5 / 12.0
    w4 = -x * x1 * x2 * x3 * x5 / 24.0
    w5 = x * x1 * x2 * x3 * x4 / 120.0
    return j, w0, w1, w2, w3, w4, w5


@njit(cache=True, inline="always")
def _sample_quint(g0, g1, g2, g3, u, v, w, n):
    ju, wu0, wu1, wu2, wu3, wu4, wu5 = _quintic_weights(u, n)
    jv, wv0, wv1, wv2, wv3, wv4, wv5 = _quintic_weights(v, n)
    jw, ww0, ww1, ww2, ww3, ww4, ww5 = _quintic_weights(w, n)
    wu = (wu0, wu1, wu2, wu3, wu4, wu5)
    wv = (wv0, wv1, wv2, wv3, wv4, wv5)
    ww = (ww0, ww1, ww2, ww3, ww4, ww5)
    a0 = a1 = a2 = a3 = 0.0
    for da in range(6):
        wa = wu[da]
        ja = ju + da
        for db in range(6):
            wab = wa * wv[db]
            jb = jv + db
            # contract the innermost axis per field before applying wab
            s0 = s1 = s2 = s3 = 0.0
            for dc in range(6):
                wc = ww[dc]
                jc = jw + dc
                s0 += g0[ja, jb, jc] * wc
                s1 += g1[ja, jb, jc] * wc
                s2 += g2[ja, jb, jc] * wc
                s3 += g3[ja, jb, jc] * wc
            a0 += wab * s0
            a1 += wab * s1
            a2 += wab * s2
            a3 += wab * s3
    return a0, a1, a2, a3


@njit(cache=True, inline="always")
def _sample_cub(g0, g1, g2, g3, u, v, w, n):
    ju, wu0, wu1, wu2, wu3 = _cubic_weights(u, n)
    jv, wv0, wv1, wv2, wv3 = _cubic_weights(v, n)
    jw, ww0, ww1, ww2, ww3 = _cubic_weights(w, n)
    wu = (wu0, wu1, wu2, wu3)
    wv = (wv0, wv1, wv2, wv3)
    ww = (ww0, ww1, ww2, ww3)
    a0 = a1 = a2 = a3 = 0.0
    for da in range(4):
        wa = wu[da]
        ja = ju + da
        for db in range(4):
            wab = wa * wv[db]
            jb = jv + db
            for dc in range(4):
                wt = wab * ww[dc]
                jc = jw + dc
                a0 += g0[ja, jb, jc] * wt
                a1 += g1[ja, jb, jc] * wt
                a2 += g2[ja, jb, jc] * wt
                a3 += g3[ja, jb, jc] * wt
    return a0, a1, a2, a3


@njit(cache=True)
def ray_integrate_grid(idx, fv, F0, F1, F2, omx, omy, omz, ah, a0, a1, a2,
                       hw, h, n, panel_len, glx, glw, interp, out_h, out_p):
    """Accumulate S(f, F) at the listed grid indices.

    idx: (P, 3) output grid indices; fv/F0..F2: (n,n,n) sources;
    om*/ah/a0..a2: cap directions and weight*profile products per node;
    glx/glw: Gauss-Legendre rule on [0,1]; panel_len: ray panel length;
    interp: 0 trilinear, 1 tricubic, 2 triquintic.
    out_h/out_p: (6,n,n,n) accumulators for the 11,12,13,22,23,33
    components, overwritten at the listed indices.
    """
    nm = omx.shape[0]
    nq = glx.shape[0]
    for p in range(idx.shape[0]):
        ia = idx[p, 0]
        ib = idx[p, 1]
        ic = idx[p, 2]
        x0 = -hw + ia * h
        y0 = -hw + ib * h
        z0 = -hw + ic * h
        h11 = h12 = h13 = h22 = h23 = h33 = 0.0
        p11 = p12 = p13 = p22 = p23 = p33 = 0.0
        for m in range(nm):
            ox = omx[m]
            oy = omy[m]
            oz = omz[m]
            # backward ray x0 - t*omega stays in the closed box for t <= te
            te = 1.0e300
            if ox > 0.0:
                te = min(te, (x0 + hw) / ox)
            elif ox < 0.0:
                te = min(te, (x0 - hw) / ox)
            if oy > 0.0:
                te = min(te, (y0 + hw) / oy)
            elif oy < 0.0:
                te = min(te, (y0 - hw) / oy)
            if oz > 0.0:
                te = min(te, (z0 + hw) / oz)
            elif oz < 0.0:
                te = min(te, (z0 - hw) / oz)
            if te <= 0.0:
                continue
            npan = int(te / panel_len) + 1
            dt = te / npan
            acc_f = 0.0
            acc_0 = 0.0
            acc_1 = 0.0
            acc_2 = 0.0
            for pan in range(npan):
                tb = pan * dt
                for q in range(nq):
                    t = tb + dt * glx[q]
                    wq = dt * glw[q]
                    u = (x0 - t * ox + hw) / h
                    v = (y0 - t * oy + hw) / h
                    w = (z0 - t * oz + hw) / h
                    if interp == 2:
                        sf, s0, s1, s2 = _sample_quint(fv, F0, F1, F2, u, v, w, n)
                    elif interp == 1:
                        sf, s0, s1, s2 = _sample_cub(fv, F0, F1, F2, u, v, w, n)
                    else:
                        sf, s0, s1, s2 = _sample_tri(fv, F0, F1, F2, u, v, w, n)
                    acc_f += wq * t * sf
                    acc_0 += wq * s0
                    acc_1 += wq * s1
                    acc_2 += wq * s2
            bh = ah[m] * acc_f
            bp = a0[m] * acc_0 + a1[m] * acc_1 + a2[m] * acc_2
            xx = ox * ox
            xy = ox * oy
            xz = ox * oz
            yy = oy * oy
            yz = oy * oz
            zz = oz * oz
            h11 += bh * xx
            h12 += bh * xy
            h13 += bh * xz
            h22 += bh * yy
            h23 += bh * yz
            h33 += bh * zz
            p11 += bp * xx
            p12 += bp * xy
            p13 += bp * xz
            p22 += bp * yy
            p23 += bp * yz
            p33 += bp * zz
        out_h[0, ia, ib, ic] = h11
        out_h[1, ia, ib, ic] = h12
        out_h[2, ia, ib, ic] = h13
        out_h[3, ia, ib, ic] = h22
        out_h[4, ia, ib, ic] = h23
        out_h[5, ia, ib, ic] = h33
        out_p[0, ia, ib, ic] = p11
        out_p[1, ia, ib, ic] = p12
        out_p[2, ia, ib, ic] = p13
        out_p[3, ia, ib, ic] = p22
        out_p[4, ia, ib, ic] = p23
        out_p[5, ia, ib, ic] = p33
