"""Uniform box grids, discrete fields, stencils, and cone geometry.

Fields live on a cube [-half_width, half_width]^3 sampled on n points per
axis (endpoints included).  Scalar fields store values indexed [a, b, c]
for (x_a, y_b, z_c); symmetric 2-tensors store the six independent
components first, in the order 11, 12, 13, 22, 23, 33.

Finite differences use centered stencils of order 2 or 4 in the interior
and one-sided stencils of the same order at the faces, so every grid
point has a defined derivative.  Norm reductions go through a fixed-order
pairwise summation tree so repeated runs produce bit-identical results.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import FormatError, OutOfDomainError

SYM_COMPONENTS = ((0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2))
# multiplicity of each stored component inside the full 3x3 symmetric matrix
SYM_WEIGHTS = np.array([1.0, 2.0, 2.0, 1.0, 2.0, 1.0])


def sym_index(i: int, j: int) -> int:
    """Position of (i, j) within the six stored components."""
    i, j = min(i, j), max(i, j)
    return {(0, 0): 0, (0, 1): 1, (0, 2): 2, (1, 1): 3, (1, 2): 4, (2, 2): 5}[(i, j)]


def pairwise_sum(values) -> float:
    """Sum with a fixed-order pairwise tree (deterministic run to run)."""
    a = np.asarray(values, dtype=np.float64).ravel()
    if a.size == 0:
        return 0.0
    while a.size > 1:
        m = (a.size // 2) * 2
        paired = a[0:m:2] + a[1:m:2]
        if a.size % 2:
            paired = np.concatenate([paired, a[-1:]])
        a = paired
    return float(a[0])


@dataclass(frozen=True)
class GridSpec:
    """Cubic grid on [-half_width, half_width]^3 with n points per axis."""

    n: int
    half_width: float

    def __post_init__(self):
        if self.n < 8:
            raise ValueError(f"grid needs n >= 8, got n={self.n}")
        if not self.half_width > 0:
            raise ValueError(f"half_width must be positive, got {self.half_width}")

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_width / (self.n - 1)

    @property
    def axis_coords(self) -> np.ndarray:
        return np.linspace(-self.half_width, self.half_width, self.n)

    def points(self) -> np.ndarray:
        """All grid points, shape (n^3, 3), index a fastest."""
        c = self.axis_coords
        za, zb, zc = np.meshgrid(c, c, c, indexing="ij")
        return np.stack([za.ravel(order="F"), zb.ravel(order="F"), zc.ravel(order="F")], axis=-1)

    def meshgrid(self):
        c = self.axis_coords
        return np.meshgrid(c, c, c, indexing="ij")

    def radius(self) -> np.ndarray:
        """|x| at every grid point, shape (n, n, n)."""
        xa, xb, xc = self.meshgrid()
        return np.sqrt(xa * xa + xb * xb + xc * xc)

    def interior_mask(self, margin: int) -> np.ndarray:
        """Boolean (n,n,n) mask of points at least margin cells from every face."""
        m = np.zeros((self.n,) * 3, dtype=bool)
        m[margin : self.n - margin, margin : self.n - margin, margin : self.n - margin] = True
        return m


@dataclass
class ScalarField:
    grid: GridSpec
    values: np.ndarray  # (n, n, n)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != (self.grid.n,) * 3:
            raise ValueError(f"scalar values must have shape {(self.grid.n,)*3}")

    def l2(self, mask=None) -> float:
        v = self.values if mask is None else self.values[mask]
        return float(np.sqrt(pairwise_sum(v * v) * self.grid.spacing**3))


@dataclass
class VectorField:
    grid: GridSpec
    values: np.ndarray  # (3, n, n, n)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != (3,) + (self.grid.n,) * 3:
            raise ValueError("vector values must have shape (3, n, n, n)")

    def l2(self, mask=None) -> float:
        total = 0.0
        for c in range(3):
            v = self.values[c] if mask is None else self.values[c][mask]
            total += pairwise_sum(v * v)
        return float(np.sqrt(total * self.grid.spacing**3))


@dataclass
class SymTensorField:
    grid: GridSpec
    values: np.ndarray  # (6, n, n, n), order 11,12,13,22,23,33

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != (6,) + (self.grid.n,) * 3:
            raise ValueError("tensor values must have shape (6, n, n, n)")

    def trace(self) -> np.ndarray:
        return self.values[0] + self.values[3] + self.values[5]

    def frobenius_sq(self) -> np.ndarray:
        """Pointwise |T|^2 with off-diagonal multiplicity two."""
        return np.einsum("c,cabd->abd", SYM_WEIGHTS, self.values * self.values)

    def component(self, i: int, j: int) -> np.ndarray:
        return self.values[sym_index(i, j)]

    def full(self) -> np.ndarray:
        """Expand to (3, 3, n, n, n)."""
        out = np.empty((3, 3) + self.values.shape[1:])
        for c, (i, j) in enumerate(SYM_COMPONENTS):
            out[i, j] = self.values[c]
            out[j, i] = self.values[c]
        return out

    def l2(self, mask=None) -> float:
        total = 0.0
        for c in range(6):
            v = self.values[c] if mask is None else self.values[c][mask]
            total += SYM_WEIGHTS[c] * pairwise_sum(v * v)
        return float(np.sqrt(total * self.grid.spacing**3))

    @staticmethod
    def from_full(grid: GridSpec, full: np.ndarray) -> "SymTensorField":
        vals = np.stack([full[i, j] for (i, j) in SYM_COMPONENTS])
        return SymTensorField(grid, vals)


def _fornberg_weights(nodes: np.ndarray, x0: float, m: int) -> np.ndarray:
    """Finite-difference weights for the m-th derivative at x0 on given nodes."""
    n = len(nodes)
    C = np.zeros((n, m + 1))
    C[0, 0] = 1.0
    c1 = 1.0
    c4 = nodes[0] - x0
    for i in range(1, n):
        mn = min(i, m)
        c2 = 1.0
        c5 = c4
        c4 = nodes[i] - x0
        for j in range(i):
            c3 = nodes[i] - nodes[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    C[i, k] = c1 * (k * C[i - 1, k - 1] - c5 * C[i - 1, k]) / c2
                C[i, 0] = -c1 * c5 * C[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                C[j, k] = (c4 * C[j, k] - k * C[j, k - 1]) / c3
            C[j, 0] = c4 * C[j, 0] / c3
        c1 = c2
    return C[:, m]

_CENTERED = {
    2: np.array([0.5]),
    4: np.array([2.0 / 3.0, -1.0 / 12.0]),
    6: np.array([3.0 / 4.0, -3.0 / 20.0, 1.0 / 60.0]),
}


def _fd_1d(arr: np.ndarray, h: float, order: int) -> np.ndarray:
    """First derivative along the last axis; one-sided rows at both ends.

    Interior uses the antisymmetric pair form sum_k w_k (f_{+k} - f_{-k}),
    which returns exact zeros on constant input.
    """
    if order not in (2, 4, 6):
        raise ValueError(f"stencil order must be 2, 4 or 6, got {order}")
    half = order // 2
    n = arr.shape[-1]
    if n < order + 1:
        raise ValueError(f"need at least {order + 1} points along the axis")
    out = np.empty_like(arr)
    w = _CENTERED[order]
    core = sum(
        w[k - 1] * (arr[..., half + k : n - half + k] - arr[..., half - k : n - half - k])
        for k in range(1, half + 1)
    )
    out[..., half : n - half] = core / h

    # one-sided closures of the same order on the first/last `half` rows
    nodes = np.arange(order + 1, dtype=np.float64)
    for row in range(half):
        wl = _fornberg_weights(nodes, float(row), 1) / h
        out[..., row] = arr[..., : order + 1] @ wl
        out[..., n - 1 - row] = arr[..., n - order - 1 :] @ (-wl[::-1])
    return out


def fd_partial(values: np.ndarray, axis: int, spacing: float, order: int = 4) -> np.ndarray:
    """Discrete d/dx_axis of gridded values; axis in {0,1,2} counts from the
    spatial block (supports leading component axes)."""
    spatial = values.ndim - 3 + axis
    moved = np.moveaxis(values, spatial, -1)
    out = _fd_1d(moved, spacing, order)
    return np.moveaxis(out, -1, spatial)


def sample_trilinear(grid: GridSpec, values: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Trilinear interpolation of gridded values at arbitrary points.

    values may carry leading component axes (..., n, n, n); points is (N, 3).
    Raises OutOfDomainError if any point leaves the closed box.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    w = grid.half_width
    tol = 1e-12 * max(1.0, w)
    if np.any(np.abs(pts) > w + tol):
        bad = pts[np.any(np.abs(pts) > w + tol, axis=1)][0]
        raise OutOfDomainError(f"sample point {bad} outside box of half width {w}")
    h = grid.spacing
    u = (np.clip(pts, -w, w) + w) / h
    i0 = np.minimum(u.astype(np.int64), grid.n - 2)
    f = u - i0
    ia, ib, ic = i0[:, 0], i0[:, 1], i0[:, 2]
    fa, fb, fc = f[:, 0], f[:, 1], f[:, 2]
    out = 0.0
    for da in (0, 1):
        wa = fa if da else 1.0 - fa
        for db in (0, 1):
            wb = fb if db else 1.0 - fb
            for dc in (0, 1):
                wc = fc if dc else 1.0 - fc
                out = out + values[..., ia + da, ib + db, ic + dc] * (wa * wb * wc)
    return out


def sample_scalar(grid: GridSpec, fn, chunk: int = 262144) -> ScalarField:
    """ScalarField from a callable fn(points (N,3)) -> (N,)."""
    pts = grid.points()
    vals = np.empty(pts.shape[0])
    for lo in range(0, pts.shape[0], chunk):
        hi = min(lo + chunk, pts.shape[0])
        vals[lo:hi] = fn(pts[lo:hi])
    return ScalarField(grid, vals.reshape((grid.n,) * 3, order="F"))


def sample_vector(grid: GridSpec, fn, chunk: int = 262144) -> VectorField:
    """VectorField from a callable fn(points (N,3)) -> (N,3)."""
    pts = grid.points()
    vals = np.empty((pts.shape[0], 3))
    for lo in range(0, pts.shape[0], chunk):
        hi = min(lo + chunk, pts.shape[0])
        vals[lo:hi] = fn(pts[lo:hi])
    shape = (grid.n,) * 3
    return VectorField(grid, np.stack([vals[:, c].reshape(shape, order="F") for c in range(3)]))


@dataclass(frozen=True)
class ConeSpec:
    """Closed solid cone about a unit axis with half-opening theta.

    theta_inner < theta marks the plateau subcone used by angular cutoffs.
    The apex sits at the origin, which belongs to the cone.
    """

    axis: tuple
    theta: float
    theta_inner: float = None
    margin: float = 1e-3

    def __post_init__(self):
        a = np.asarray(self.axis, dtype=np.float64)
        norm = float(np.linalg.norm(a))
        if norm == 0.0:
            raise ValueError("cone axis must be nonzero")
        object.__setattr__(self, "axis", tuple(a / norm))
        if self.theta_inner is None:
            object.__setattr__(self, "theta_inner", 0.5 * self.theta)
        if not (0.0 < self.theta < np.pi / 2 - self.margin):
            raise ValueError(f"theta must lie in (0, pi/2 - {self.margin}), got {self.theta}")
        if not (0.0 < self.theta_inner < self.theta):
            raise ValueError("theta_inner must lie in (0, theta)")

    @property
    def axis_array(self) -> np.ndarray:
        return np.asarray(self.axis)

    def frame(self) -> np.ndarray:
        """Orthonormal frame rows (axis, u1, u2), deterministic choice."""
        a = self.axis_array
        pick = int(np.argmin(np.abs(a)))
        e = np.zeros(3)
        e[pick] = 1.0
        u1 = np.cross(e, a)
        u1 /= np.linalg.norm(u1)
        u2 = np.cross(a, u1)
        return np.stack([a, u1, u2])

    def contains(self, points: np.ndarray) -> np.ndarray:
        """Closed membership test; the origin is inside."""
        pts = np.asarray(points, dtype=np.float64)
        dot = pts @ self.axis_array
        r = np.linalg.norm(pts, axis=-1)
        return dot >= r * np.cos(self.theta)

    def cos_angle(self, points: np.ndarray) -> np.ndarray:
        """cos of the angle to the axis; returns 1 at the origin."""
        pts = np.asarray(points, dtype=np.float64)
        dot = pts @ self.axis_array
        r = np.linalg.norm(pts, axis=-1)
        with np.errstate(invalid="ignore", divide="ignore"):
            c = np.where(r > 0, dot / np.where(r > 0, r, 1.0), 1.0)
        return np.clip(c, -1.0, 1.0)


# ---------------------------------------------------------------------------
# CIDF1 dumps: ASCII header + little-endian float64 payload, index a fastest,
# tensor components interleaved per point in the order 11,12,13,22,23,33.
# ---------------------------------------------------------------------------

def write_cidf(path, fld) -> None:
    if isinstance(fld, ScalarField):
        kind = "scalar"
        payload = np.ascontiguousarray(fld.values.transpose(2, 1, 0), dtype="<f8")
    elif isinstance(fld, SymTensorField):
        kind = "symtensor"
        payload = np.ascontiguousarray(fld.values.transpose(3, 2, 1, 0), dtype="<f8")
    else:
        raise TypeError(f"cannot dump {type(fld).__name__} as CIDF1")
    header = f"CIDF1 {kind} {fld.grid.n} {fld.grid.half_width!r}\n"
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        fh.write(payload.tobytes())


def read_cidf(path):
    with open(path, "rb") as fh:
        header = fh.readline().decode("ascii", errors="replace").strip()
        parts = header.split()
        if len(parts) != 4 or parts[0] != "CIDF1":
            raise FormatError(f"not a CIDF1 header: {header!r}")
        kind = parts[1]
        try:
            n = int(parts[2])
            half_width = float(parts[3])
        except ValueError as exc:
            raise FormatError(f"bad CIDF1 header fields: {header!r}") from exc
        if kind not in ("scalar", "symtensor"):
            raise FormatError(f"unknown CIDF1 kind {kind!r}")
        raw = fh.read()
    ncomp = 1 if kind == "scalar" else 6
    expected = n * n * n * ncomp * 8
    if len(raw) != expected:
        raise FormatError(f"CIDF1 payload has {len(raw)} bytes, expected {expected}")
    grid = GridSpec(n=n, half_width=half_width)
    data = np.frombuffer(raw, dtype="<f8")
    if kind == "scalar":
        return ScalarField(grid, data.reshape(n, n, n).transpose(2, 1, 0).copy())
    return SymTensorField(grid, data.reshape(n, n, n, 6).transpose(3, 2, 1, 0).copy())
