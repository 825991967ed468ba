import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from qgrad.corners import (
    Corner,
    CornerSet,
    HarrisConfig,
    StructureTensorField,
    classical_harris,
    classify_region,
    default_flat_band,
    fast_like_filter,
    harris_response,
    nms_and_threshold,
    overlay,
    qhcd,
    qhed_corner_heuristic,
    read_points_csv,
    ring_offsets,
    structure_tensor,
    write_corners_csv,
)
from qgrad.edges import EdgeMap, GradientField, sobel_direct
from qgrad.image import GrayImage
from qgrad.metrics import corner_match
from qgrad.synthetic import rectangle, square, square_vertices, textured, vertical_step

RECT = HarrisConfig(window="rectangular")


def uniform_field(shape, ix, iy):
    return GradientField(np.full(shape, float(ix)), np.full(shape, float(iy)), np.ones(shape, dtype=bool))


def tensor(a, b, c):
    a, b, c = (np.atleast_2d(np.asarray(t, dtype=float)) for t in (a, b, c))
    return StructureTensorField(a, b, c, np.ones(a.shape, dtype=bool))


# -- structure tensor / response -----------------------------------------------


def test_tensor_zero_gradients():
    t = structure_tensor(uniform_field((6, 6), 0, 0))
    assert not t.a.any() and not t.b.any() and not t.c.any()


def test_tensor_rectangular_example():
    t = structure_tensor(uniform_field((7, 7), 1, 0), RECT)
    inner = (slice(1, -1), slice(1, -1))
    np.testing.assert_array_equal(t.a[inner], 9.0)
    assert not t.b.any() and not t.c.any()
    assert t.valid_mask[inner].all() and not t.valid_mask[0].any()


def test_tensor_matches_loop(rng):
    g = GradientField(rng.normal(size=(8, 8)), rng.normal(size=(8, 8)), np.ones((8, 8), dtype=bool))
    cfg = HarrisConfig()
    w = cfg.window_weights()
    t = structure_tensor(g, cfg)
    for i in range(1, 7):
        for j in range(1, 7):
            px = g.ix[i - 1:i + 2, j - 1:j + 2]
            py = g.iy[i - 1:i + 2, j - 1:j + 2]
            assert t.a[i, j] == pytest.approx(np.sum(w * px * px))
            assert t.b[i, j] == pytest.approx(np.sum(w * px * py))
            assert t.c[i, j] == pytest.approx(np.sum(w * py * py))


def test_gaussian_window():
    w = HarrisConfig().window_weights()
    assert w[1, 1] == 1.0 and w[0, 1] == pytest.approx(np.exp(-0.5)) and w[0, 0] == pytest.approx(np.exp(-1))


@settings(max_examples=40, deadline=None)
@given(arrays(np.float64, (2, 7, 7), elements=st.floats(-1e3, 1e3, allow_nan=False)))
def test_tensor_cauchy_schwarz_and_response_bounds(g):
    t = structure_tensor(GradientField(g[0], g[1], np.ones((7, 7), dtype=bool)))
    scale = max(1.0, float(np.max(t.a * t.c)))
    assert (t.a >= 0).all() and (t.c >= 0).all()
    assert (t.b**2 <= t.a * t.c + 1e-9 * scale).all()
    k = 0.05
    r = harris_response(t, k)
    tr = t.a + t.c
    assert (r <= t.a * t.c + 1e-9 * scale).all()
    assert (r <= (tr / 2) ** 2 - k * tr**2 + 1e-9 * scale).all()


def test_harris_examples():
    assert harris_response(tensor(1, 0, 1), 0.05)[0, 0] == pytest.approx(0.8)
    assert harris_response(tensor(1, 0, 0), 0.05)[0, 0] == pytest.approx(-0.05)
    assert harris_response(tensor(0, 0, 0), 0.05)[0, 0] == 0.0


def test_classify_region():
    assert classify_region(0.8, 0.1) == "corner"
    assert classify_region(-0.05, 0.01) == "edge"
    assert classify_region(0.005, 0.01) == "flat"
    assert default_flat_band(np.array([[-2.0, 1.0]])) == pytest.approx(2e-6)
    with pytest.raises(ValueError):
        classify_region(0.0, -1.0)


def test_harris_config_validation():
    for bad in (dict(kappa=0.0), dict(kappa=0.25), dict(window="box"), dict(nms_radius=0),
                dict(window_size=2), dict(response_threshold_fraction=0.0)):
        with pytest.raises(ValueError):
            HarrisConfig(**bad)


# -- NMS ------------------------------------------------------------------------


def test_nms_single_spike():
    r = np.zeros((9, 9))
    r[4, 6] = 3.0
    cs = nms_and_threshold(r)
    assert cs.coords() == [(6, 4)] and cs.corners[0].score == 3.0


def test_nms_plateau_tie():
    r = np.zeros((9, 9))
    r[3:5, 3:5] = 1.0
    assert nms_and_threshold(r).coords() == [(3, 3)]


def test_nms_all_negative():
    assert len(nms_and_threshold(-np.ones((5, 5)))) == 0


def test_nms_threshold_fraction():
    r = np.zeros((12, 12))
    r[2, 2] = 100.0
    r[9, 9] = 0.5  # below 1% of the peak
    r[9, 2] = 2.0
    assert sorted(nms_and_threshold(r).coords()) == [(2, 2), (2, 9)]


def test_nms_radius():
    r = np.zeros((9, 9))
    r[4, 2], r[4, 4] = 2.0, 1.0
    assert nms_and_threshold(r).coords() == [(2, 4)]
    r[4, 5], r[4, 4] = 1.0, 0.0  # three columns away: both survive
    assert sorted(nms_and_threshold(r).coords()) == [(2, 4), (5, 4)]


# -- FAST-like filter ---------------------------------------------------------


def test_ring_offsets_opposite_pairs():
    ring = ring_offsets(2)
    assert len(ring) == 8
    for k in range(4):
        assert ring[k + 4] == (-ring[k][0], -ring[k][1])
    assert all(max(abs(dx), abs(dy)) == 2 for dx, dy in ring)


def _cands(*pts):
    return CornerSet(tuple(Corner(x, y, 1.0) for x, y in pts))


def test_filter_removes_line_candidate():
    bits = np.zeros((11, 11), dtype=bool)
    bits[5, :] = True
    assert len(fast_like_filter(_cands((5, 5)), EdgeMap(bits, 1.0))) == 0


def test_filter_keeps_l_junction():
    bits = np.zeros((11, 11), dtype=bool)
    bits[5, 5:] = True
    bits[5:, 5] = True
    assert fast_like_filter(_cands((5, 5)), EdgeMap(bits, 1.0)).coords() == [(5, 5)]


def test_filter_empty_edges_keeps_all():
    cs = _cands((1, 1), (5, 5), (9, 2))
    assert fast_like_filter(cs, EdgeMap(np.zeros((11, 11), dtype=bool), 0.0)) == cs


@settings(max_examples=50, deadline=None)
@given(arrays(np.bool_, (10, 10)), st.lists(st.tuples(st.integers(0, 9), st.integers(0, 9)), unique=True))
def test_filter_monotone(bits, pts):
    cs = _cands(*pts)
    out = fast_like_filter(cs, EdgeMap(bits, 1.0))
    assert len(out) <= len(cs)
    assert set(out.coords()) <= set(cs.coords())


# -- pipelines ----------------------------------------------------------------


@pytest.mark.parametrize("method", ["qpie", "frqi-linear", "classical"])
def test_square_four_vertices(method):
    img = square()
    cs = classical_harris(img) if method == "classical" else qhcd(img, method)
    m = corner_match(cs, square_vertices())
    assert len(cs) == 4 and m.tp == 4 and m.fpr == 0.0


def test_sources():
    img = square()
    assert qhcd(img).source == "qhcd-sobel"
    assert classical_harris(img).source == "classical-harris"
    assert qhed_corner_heuristic(img).source == "qhed-heuristic"


@pytest.mark.parametrize("fn", [qhcd, classical_harris, qhed_corner_heuristic])
def test_constant_image_empty(fn):
    assert len(fn(GrayImage(np.full((16, 16), 128)))) == 0


@pytest.mark.parametrize("box", [(10, 20, 40, 50), (5, 8, 30, 60), (20, 20, 44, 36)])
def test_qhcd_agrees_with_classical(box):
    img = rectangle(64, 64, *box)
    q = qhcd(img, "qpie")
    c = classical_harris(img)
    assert q.coords() == c.coords()
    np.testing.assert_allclose([k.score for k in q], [k.score for k in c], rtol=1e-9)


@pytest.mark.parametrize("encoding", ["qpie", "frqi-linear"])
def test_rotation_consistency(encoding):
    img = rectangle(64, 64, 10, 20, 40, 50)
    rot = GrayImage(np.rot90(img.pixels))
    w = img.width
    a = sorted((y, w - 1 - x) for x, y in qhcd(img, encoding).coords())
    b = sorted(qhcd(rot, encoding).coords())
    assert a == b and len(a) == 4


@pytest.mark.parametrize("s", [0.5, 3.0, 10.0])
def test_scale_covariance(s, random_image):
    g = sobel_direct(random_image(32, 32))
    r1 = harris_response(structure_tensor(g), 0.05)
    rs = harris_response(structure_tensor(g.scaled(s)), 0.05)
    nz = r1 != 0
    assert np.max(np.abs(rs[nz] / (s**4 * r1[nz]) - 1)) < 1e-9
    assert nms_and_threshold(r1).coords() == nms_and_threshold(rs).coords()


@pytest.mark.parametrize("encoding", ["qpie", "frqi-linear"])
def test_qhed_heuristic_square(encoding):
    cs = qhed_corner_heuristic(square(), encoding)
    m = corner_match(cs, square_vertices())
    assert m.tp == 4 and len(cs) == 4


@pytest.mark.parametrize("encoding", ["qpie", "frqi-linear"])
def test_qhed_heuristic_straight_edge(encoding):
    assert len(qhed_corner_heuristic(vertical_step(64, 64), encoding)) == 0


def test_qhed_heuristic_more_false_positives_on_texture():
    truth = square_vertices()
    fq, fh = [], []
    for seed in range(5):
        img = textured(64, seed)
        fq.append(corner_match(qhcd(img), truth).fp)
        fh.append(corner_match(qhed_corner_heuristic(img), truth).fp)
    assert np.median(fh) > np.median(fq)


def test_corner_csv_roundtrip(tmp_path):
    cs = qhcd(square())
    p = tmp_path / "c.csv"
    write_corners_csv(cs, p)
    assert p.read_text().splitlines()[0] == "x,y,score,source"
    assert read_points_csv(p) == cs.coords()


def test_overlay_marks_crosses():
    cs = _cands((3, 3))
    rgb = overlay(GrayImage(np.zeros((8, 8), dtype=int)), cs)
    assert rgb.shape == (8, 8, 3)
    red = (rgb == [255, 0, 0]).all(axis=-1)
    assert red.sum() == 5 and red[3, 3] and red[2, 3] and red[3, 4]
