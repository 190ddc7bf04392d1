"""Grid geometry, stencils, tensors, sampling, cone geometry, and field I/O."""

import math

import numpy as np
import pytest

from conedata.errors import FormatError, OutOfDomainError
from conedata.fields import (
    SYM_WEIGHTS,
    ConeSpec,
    GridSpec,
    ScalarField,
    SymTensorField,
    VectorField,
    fd_partial,
    pairwise_sum,
    read_cidf,
    sample_trilinear,
    sym_index,
    write_cidf,
)


# ---- grid geometry ----------------------------------------------------------


def test_grid_spacing_and_axis_endpoints():
    g = GridSpec(n=9, half_width=4.0)
    assert g.spacing == 1.0
    assert g.axis_coords[0] == -4.0
    assert g.axis_coords[-1] == 4.0
    assert np.allclose(np.diff(g.axis_coords), 1.0)


def test_grid_points_first_index_fastest():
    g = GridSpec(n=8, half_width=1.0)
    pts = g.points()
    assert pts.shape == (512, 3)
    step = pts[1] - pts[0]
    assert step[0] == pytest.approx(g.spacing)
    assert step[1] == 0.0 and step[2] == 0.0


def test_grid_radius_has_center_zero_for_odd_n():
    g = GridSpec(n=9, half_width=2.0)
    assert g.radius()[4, 4, 4] == 0.0


def test_interior_mask_counts():
    g = GridSpec(n=10, half_width=1.0)
    assert g.interior_mask(2).sum() == 6**3
    assert g.interior_mask(0).all()


def test_grid_rejects_tiny_or_flat():
    with pytest.raises(ValueError):
        GridSpec(n=7, half_width=1.0)
    with pytest.raises(ValueError):
        GridSpec(n=16, half_width=0.0)


# ---- finite differences -----------------------------------------------------


@pytest.mark.parametrize("order", [2, 4, 6])
def test_fd_exact_on_matching_degree_including_faces(order):
    # one-sided closures share the centered order, so degree-`order`
    # polynomials differentiate exactly everywhere on the grid
    g = GridSpec(n=16, half_width=2.0)
    x = g.meshgrid()[1]
    f = x**order
    want = order * x ** (order - 1)
    got = fd_partial(f, 1, g.spacing, order=order)
    assert np.max(np.abs(got - want)) < 1e-10 * np.max(np.abs(want))


@pytest.mark.parametrize("axis", [0, 1, 2])
def test_fd_axis_selection(axis):
    g = GridSpec(n=12, half_width=1.5)
    xs = g.meshgrid()
    f = xs[axis] ** 2
    got = fd_partial(f, axis, g.spacing, order=4)
    assert np.allclose(got, 2.0 * xs[axis], atol=1e-12)


def test_fd_constant_is_exact_zero_in_interior():
    g = GridSpec(n=12, half_width=1.0)
    f = np.full((12, 12, 12), 3.7)
    got = fd_partial(f, 0, g.spacing, order=6)
    # pair form guarantees exact zeros away from one-sided rows
    assert np.all(got[3:-3] == 0.0)
    assert np.max(np.abs(got)) < 1e-12


def test_fd_leading_component_axes_pass_through():
    g = GridSpec(n=8, half_width=1.0)
    x = g.meshgrid()[0]
    stack = np.stack([x, 2.0 * x])
    got = fd_partial(stack, 0, g.spacing, order=2)
    assert np.allclose(got[0], 1.0)
    assert np.allclose(got[1], 2.0)


def test_fd_rejects_bad_order_and_short_axis():
    g = GridSpec(n=8, half_width=1.0)
    with pytest.raises(ValueError):
        fd_partial(np.zeros((8, 8, 8)), 0, g.spacing, order=3)
    with pytest.raises(ValueError):
        fd_partial(np.zeros((4, 4, 4)), 0, 0.1, order=6)


# ---- deterministic reductions -----------------------------------------------


def test_pairwise_sum_matches_fsum():
    rng = np.random.default_rng(11)
    vals = rng.standard_normal(100_000) * np.logspace(-6, 6, 100_000)
    want = math.fsum(vals.tolist())
    assert pairwise_sum(vals) == pytest.approx(want, rel=1e-13)
    assert pairwise_sum(vals) == pairwise_sum(vals.copy())


def test_pairwise_sum_empty():
    assert pairwise_sum(np.array([])) == 0.0


# ---- symmetric tensors ------------------------------------------------------


def test_sym_index_order_insensitive():
    assert sym_index(2, 0) == sym_index(0, 2) == 2
    assert [sym_index(i, i) for i in range(3)] == [0, 3, 5]


def test_sym_weights_count_offdiagonal_twice():
    assert SYM_WEIGHTS.tolist() == [1.0, 2.0, 2.0, 1.0, 2.0, 1.0]


def test_tensor_full_roundtrip_and_trace():
    g = GridSpec(n=8, half_width=1.0)
    rng = np.random.default_rng(0)
    t = SymTensorField(g, rng.standard_normal((6, 8, 8, 8)))
    full = t.full()
    assert np.array_equal(full[0, 1], full[1, 0])
    back = SymTensorField.from_full(g, full)
    assert np.array_equal(back.values, t.values)
    assert np.array_equal(t.trace(), full[0, 0] + full[1, 1] + full[2, 2])


def test_frobenius_matches_full_contraction():
    g = GridSpec(n=8, half_width=1.0)
    rng = np.random.default_rng(1)
    t = SymTensorField(g, rng.standard_normal((6, 8, 8, 8)))
    full = t.full()
    want = np.einsum("ijabc,ijabc->abc", full, full)
    assert np.allclose(t.frobenius_sq(), want, rtol=1e-14)


def test_l2_norm_scaling_and_mask():
    g = GridSpec(n=8, half_width=1.0)
    rng = np.random.default_rng(2)
    u = ScalarField(g, rng.standard_normal((8, 8, 8)))
    two_u = ScalarField(g, 2.0 * u.values)
    assert two_u.l2() == 2.0 * u.l2()
    ones = ScalarField(g, np.ones((8, 8, 8)))
    mask = g.interior_mask(2)
    assert ones.l2(mask) == pytest.approx(math.sqrt(mask.sum() * g.spacing**3))


def test_vector_l2_component_sum():
    g = GridSpec(n=8, half_width=1.0)
    v = np.zeros((3, 8, 8, 8))
    v[1] = 3.0
    assert VectorField(g, v).l2() == pytest.approx(
        3.0 * math.sqrt(8**3 * g.spacing**3)
    )


def test_field_shape_validation():
    g = GridSpec(n=8, half_width=1.0)
    with pytest.raises(ValueError):
        ScalarField(g, np.zeros((7, 8, 8)))
    with pytest.raises(ValueError):
        VectorField(g, np.zeros((8, 8, 8)))
    with pytest.raises(ValueError):
        SymTensorField(g, np.zeros((3, 8, 8, 8)))


# ---- interpolation ----------------------------------------------------------


def test_sample_trilinear_exact_on_trilinear_functions():
    g = GridSpec(n=9, half_width=2.0)
    xa, xb, xc = g.meshgrid()
    f = 2.0 + 3.0 * xa - xb + 0.5 * xc + xa * xb - xb * xc + xa * xb * xc
    rng = np.random.default_rng(5)
    pts = rng.uniform(-2.0, 2.0, size=(200, 3))
    got = sample_trilinear(g, f, pts)
    x, y, z = pts.T
    want = 2.0 + 3.0 * x - y + 0.5 * z + x * y - y * z + x * y * z
    assert np.max(np.abs(got - want)) < 1e-12


def test_sample_trilinear_rejects_outside_box():
    g = GridSpec(n=9, half_width=2.0)
    f = np.zeros((9, 9, 9))
    with pytest.raises(OutOfDomainError):
        sample_trilinear(g, f, np.array([[0.0, 0.0, 2.5]]))


# ---- cone geometry ----------------------------------------------------------


def test_cone_axis_is_normalized():
    c = ConeSpec(axis=(0.0, 0.0, 2.0), theta=0.5)
    assert c.axis == (0.0, 0.0, 1.0)


def test_cone_theta_range_enforced():
    with pytest.raises(ValueError):
        ConeSpec(axis=(0, 0, 1), theta=0.0)
    with pytest.raises(ValueError):
        ConeSpec(axis=(0, 0, 1), theta=math.pi / 2)


def test_cone_inner_angle_defaults_to_half():
    c = ConeSpec(axis=(0, 0, 1), theta=1.2)
    assert c.theta_inner == pytest.approx(0.6)
    with pytest.raises(ValueError):
        ConeSpec(axis=(0, 0, 1), theta=1.2, theta_inner=1.3)


def test_cone_frame_is_orthonormal_right_handed():
    c = ConeSpec(axis=(0.3, -0.4, 0.8), theta=0.9)
    fr = c.frame()
    assert np.allclose(fr @ fr.T, np.eye(3), atol=1e-14)
    assert np.dot(np.cross(fr[0], fr[1]), fr[2]) == pytest.approx(1.0)


def test_cone_contains_is_closed():
    c = ConeSpec(axis=(0, 0, 1), theta=1.2)
    assert c.contains(np.zeros(3))
    inside = 2.0 * np.array([math.sin(1.2 - 1e-9), 0.0, math.cos(1.2 - 1e-9)])
    outside = 2.0 * np.array([math.sin(1.2 + 1e-9), 0.0, math.cos(1.2 + 1e-9)])
    assert c.contains(inside)
    assert not c.contains(outside)
    assert not c.contains(np.array([0.0, 0.0, -1.0]))


def test_cone_cos_angle_origin_and_clip():
    c = ConeSpec(axis=(0, 0, 1), theta=1.0)
    pts = np.array([[0.0, 0.0, 0.0], [0.0, 0.0, 3.0], [1.0, 0.0, 0.0]])
    ca = c.cos_angle(pts)
    assert ca[0] == 1.0
    assert ca[1] == pytest.approx(1.0)
    assert ca[2] == pytest.approx(0.0)


# ---- field files ------------------------------------------------------------


def test_cidf_scalar_roundtrip_bitwise(tmp_path):
    g = GridSpec(n=8, half_width=1.5)
    rng = np.random.default_rng(7)
    fld = ScalarField(g, rng.standard_normal((8, 8, 8)))
    path = tmp_path / "f.cidf"
    write_cidf(path, fld)
    back = read_cidf(path)
    assert isinstance(back, ScalarField)
    assert back.grid == g
    assert np.array_equal(back.values, fld.values)


def test_cidf_tensor_roundtrip_bitwise(tmp_path):
    g = GridSpec(n=8, half_width=2.0)
    rng = np.random.default_rng(8)
    fld = SymTensorField(g, rng.standard_normal((6, 8, 8, 8)))
    path = tmp_path / "t.cidf"
    write_cidf(path, fld)
    back = read_cidf(path)
    assert isinstance(back, SymTensorField)
    assert np.array_equal(back.values, fld.values)


def test_cidf_header_is_single_ascii_line(tmp_path):
    g = GridSpec(n=8, half_width=1.5)
    path = tmp_path / "f.cidf"
    write_cidf(path, ScalarField(g, np.zeros((8, 8, 8))))
    first = path.read_bytes().split(b"\n", 1)[0]
    assert first == b"CIDF1 scalar 8 1.5"


def test_cidf_rejects_corrupt_files(tmp_path):
    p = tmp_path / "bad.cidf"
    p.write_bytes(b"CIDF2 scalar 8 1.5\n")
    with pytest.raises(FormatError):
        read_cidf(p)
    p.write_bytes(b"CIDF1 spinor 8 1.5\n")
    with pytest.raises(FormatError):
        read_cidf(p)
    g = GridSpec(n=8, half_width=1.5)
    good = tmp_path / "good.cidf"
    write_cidf(good, ScalarField(g, np.zeros((8, 8, 8))))
    truncated = good.read_bytes()[:-16]
    p.write_bytes(truncated)
    with pytest.raises(FormatError):
        read_cidf(p)
