import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from qgrad.edges import (
    EdgeConfig,
    GradientField,
    gradient_direction,
    gradient_magnitude,
    qhed_edge_map,
    qhed_responses,
    resolve_tau,
    sobel_direct,
    sobel_from_lag2,
    threshold_edges,
)
from qgrad.exceptions import DegenerateInputError, ShapeError
from qgrad.image import GrayImage, transpose
from qgrad.kernel import DiffMap, lag2_both_axes
from qgrad.metrics import edge_fragments
from qgrad.synthetic import textured, vertical_step


def field(ix, iy):
    ix = np.atleast_2d(np.asarray(ix, dtype=float))
    iy = np.atleast_2d(np.asarray(iy, dtype=float))
    return GradientField(ix, iy, np.ones(ix.shape, dtype=bool))


def sobel_loop(p):
    """Hand-written Sobel: I_x = left - right, I_y = top - bottom, 1-2-1 weights."""
    p = p.astype(float)
    h, w = p.shape
    ix = np.zeros_like(p)
    iy = np.zeros_like(p)
    for i in range(1, h - 1):
        for j in range(1, w - 1):
            ix[i, j] = sum(wt * (p[i + d, j - 1] - p[i + d, j + 1]) for d, wt in ((-1, 1), (0, 2), (1, 1)))
            iy[i, j] = sum(wt * (p[i - 1, j + d] - p[i + 1, j + d]) for d, wt in ((-1, 1), (0, 2), (1, 1)))
    return ix, iy


def test_sobel_from_lag2_3x3_example():
    c = np.arange(9, dtype=float).reshape(3, 3) ** 2
    dxv = np.zeros((3, 3))
    dxv[:, 0] = c[:, 0] - c[:, 2]
    dyv = np.zeros((3, 3))
    dyv[0, :] = c[0, :] - c[2, :]
    mx = np.zeros((3, 3), dtype=bool)
    mx[:, 0] = True
    my = np.zeros((3, 3), dtype=bool)
    my[0, :] = True
    g = sobel_from_lag2(DiffMap(dxv, mx, "x"), DiffMap(dyv, my, "y"))
    c0, c1, c2, c3, c4, c5, c6, c7, c8 = c.ravel()
    assert g.valid_mask[1, 1] and g.valid_mask.sum() == 1
    assert g.ix[1, 1] == (c0 - c2) + 2 * (c3 - c5) + (c6 - c8)
    assert g.iy[1, 1] == (c0 - c6) + 2 * (c1 - c7) + (c2 - c8)
    gd = sobel_direct(GrayImage(c.astype(int)))
    assert gd.ix[1, 1] == g.ix[1, 1] and gd.iy[1, 1] == g.iy[1, 1]


def test_sobel_direct_matches_loop(random_image):
    img = random_image(9, 13)
    g = sobel_direct(img)
    ix, iy = sobel_loop(img.pixels)
    np.testing.assert_allclose(g.ix, ix)
    np.testing.assert_allclose(g.iy, iy)
    assert not g.valid_mask[0].any() and not g.valid_mask[:, -1].any()


def test_sobel_from_lag2_matches_direct(rng):
    for _ in range(20):
        img = GrayImage(rng.integers(0, 256, size=(16, 16)))
        dx, dy = lag2_both_axes(img, "qpie")
        g = sobel_from_lag2(dx, dy)
        d = sobel_direct(img)
        m = g.valid_mask & d.valid_mask
        assert m[1:-1, 1:-1].all()
        assert np.max(np.abs(g.ix - d.ix)[m]) < 1e-9
        assert np.max(np.abs(g.iy - d.iy)[m]) < 1e-9


def test_sobel_from_lag2_shape_mismatch():
    a = DiffMap(np.zeros((4, 4)), np.ones((4, 4), bool), "x")
    b = DiffMap(np.zeros((4, 8)), np.ones((4, 8), bool), "y")
    with pytest.raises(ShapeError):
        sobel_from_lag2(a, b)


def test_constant_image_zero_field():
    img = GrayImage(np.full((8, 8), 40))
    for g in (sobel_direct(img), sobel_from_lag2(*lag2_both_axes(img))):
        assert not g.ix.any() and not g.iy.any()


def test_vertical_step_1020():
    g = sobel_direct(vertical_step(8, 8, at=4))
    inner = g.valid_mask
    assert np.all(np.abs(g.ix[1:-1, 3:5]) == 1020)
    assert not g.iy[inner].any()
    assert not g.ix[:, [1, 2, 5, 6]].any()


def test_horizontal_step_is_transposed_vertical():
    v = vertical_step(8, 8, at=4)
    gv, gh = sobel_direct(v), sobel_direct(transpose(v))
    np.testing.assert_array_equal(gh.iy, gv.ix.T)
    np.testing.assert_array_equal(gh.ix, gv.iy.T)


def test_magnitude_examples():
    assert gradient_magnitude(field([[3.0]], [[4.0]]))[0, 0] == 5.0
    assert not gradient_magnitude(field(np.zeros((2, 2)), np.zeros((2, 2)))).any()
    g = field([[3.0, -1.0]], [[-2.0, 7.0]])
    np.testing.assert_array_equal(gradient_magnitude(g), gradient_magnitude(g.scaled(-1)))


def test_magnitude_invalid_is_zero():
    g = GradientField(np.ones((2, 2)), np.ones((2, 2)), np.array([[True, False], [False, True]]))
    np.testing.assert_array_equal(gradient_magnitude(g) > 0, g.valid_mask)


def test_direction_quadrants():
    d = gradient_direction(field([[1.0, 0.0, -1.0, 0.0, 0.0, 1.0]], [[0.0, 1.0, 0.0, -1.0, 0.0, -1.0]]))
    np.testing.assert_allclose(d[0], [0, np.pi / 2, np.pi, -np.pi / 2, 0, -np.pi / 4])
    # negative zero still maps to +pi, never -pi
    assert gradient_direction(field([[-1.0]], [[-0.0]]))[0, 0] == np.pi


@settings(max_examples=40, deadline=None)
@given(arrays(np.int64, (8, 8), elements=st.integers(0, 255)))
def test_magnitude_bound_and_polar_consistency(px):
    g = sobel_direct(GrayImage(px))
    mag = gradient_magnitude(g)
    assert mag.max() <= 4 * np.sqrt(2) * 255 + 1e-9
    th = gradient_direction(g)
    m = mag > 0
    np.testing.assert_allclose((mag * np.cos(th))[m], g.ix[m], atol=1e-9)
    np.testing.assert_allclose((mag * np.sin(th))[m], g.iy[m], atol=1e-9)


def test_threshold_zero_magnitude_fixed():
    em = threshold_edges(np.zeros((4, 4)), EdgeConfig("fixed", tau=1.0))
    assert not em.bits.any()


def test_threshold_step_band():
    img = vertical_step(16, 16, at=8)
    em = threshold_edges(gradient_magnitude(sobel_direct(img)), EdgeConfig())
    expected = np.zeros((16, 16), dtype=bool)
    expected[1:-1, 7:9] = True
    np.testing.assert_array_equal(em.bits, expected)
    assert em.threshold_used == pytest.approx(0.2 * 1020)


def test_threshold_tau_zero():
    mag = np.array([[0.0, 0.5], [2.0, 0.0]])
    em = threshold_edges(mag, EdgeConfig("fixed", tau=0.0))
    np.testing.assert_array_equal(em.bits, mag > 0)


def test_otsu_mode(random_image):
    mag = gradient_magnitude(sobel_direct(random_image(16, 16)))
    em = threshold_edges(mag, EdgeConfig("otsu"))
    assert 0 < em.bits.sum() < mag.size
    with pytest.raises(DegenerateInputError):
        resolve_tau(np.zeros((4, 4)), EdgeConfig("otsu"))


def test_edge_config_validation():
    with pytest.raises(ValueError):
        EdgeConfig("fraction", fraction=0.0)
    with pytest.raises(ValueError):
        EdgeConfig("fixed")
    with pytest.raises(ValueError):
        EdgeConfig("median")


@settings(max_examples=40, deadline=None)
@given(arrays(np.float64, (6, 6), elements=st.floats(0, 1000, allow_nan=False)),
       st.floats(0, 1000), st.floats(0, 1000))
def test_threshold_monotone(mag, t1, t2):
    lo, hi = sorted((t1, t2))
    a = threshold_edges(mag, EdgeConfig("fixed", tau=lo)).bits
    b = threshold_edges(mag, EdgeConfig("fixed", tau=hi)).bits
    assert not (b & ~a).any()


@pytest.mark.parametrize("encoding", ["qpie", "frqi-linear"])
def test_qhed_constant_empty(encoding):
    assert not qhed_edge_map(GrayImage(np.full((8, 8), 9)), encoding).bits.any()


def test_qhed_vertical_step():
    img = vertical_step(16, 16, at=8)
    ax, ay = qhed_responses(img, "qpie")
    assert not ay.any()
    np.testing.assert_allclose(ax[:, 6:8], 255, atol=1e-9)
    em = qhed_edge_map(img, "qpie")
    cols = np.flatnonzero(em.bits.any(axis=0))
    np.testing.assert_array_equal(cols, [6, 7])


def test_qhed_fragments_exceed_sobel_on_texture():
    q, s = [], []
    for seed in range(5):
        img = textured(64, seed)
        dx, dy = lag2_both_axes(img, "qpie")
        s.append(edge_fragments(threshold_edges(gradient_magnitude(sobel_from_lag2(dx, dy)))))
        q.append(edge_fragments(qhed_edge_map(img, "qpie")))
    assert np.median(q) >= np.median(s)
