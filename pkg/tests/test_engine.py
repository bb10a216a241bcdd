"""Fill engine: weights, confidence, readiness, snapshot semantics, fallbacks."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from guidefill import grid
from guidefill.grid import READABLE, BYSTANDER, INPAINT
from guidefill import engine
from guidefill.engine import FillParams


def _block_labels(H, W, j0, j1, i0, i1):
    labels = np.zeros((H, W), dtype=np.uint8)
    labels[j0:j1, i0:i1] = INPAINT
    return labels


# ---------------------------------------------------------------- weights

def test_weight_frozen_value():
    # [DERIVED] g=(0,1), mu=10, eps=3, delta=(1,-1): g_perp=(-1,0), d=-1,
    # w = exp(-100/18)/sqrt(2), enumerated independently of the engine
    w = engine.weight((0.0, 0.0), (1.0, -1.0), (0.0, 1.0), mu=10.0, eps=3.0)
    assert w == pytest.approx(0.0027336183461468657, rel=1e-15)


def test_weight_zero_guide_is_inverse_distance():
    # [TRIVIAL] g = 0 drops the anisotropic factor entirely
    w = engine.weight((0.0, 0.0), (3.0, 4.0), (0.0, 0.0), mu=50.0, eps=3.0)
    assert w == pytest.approx(1.0 / 5.0, rel=1e-15)


def test_weight_rejects_coincident_points_and_inf_mu():
    with pytest.raises(ValueError):
        engine.weight((1.0, 1.0), (1.0, 1.0), (0.0, 1.0), mu=10.0, eps=3.0)
    with pytest.raises(ValueError):
        engine.weight((0.0, 0.0), (1.0, 0.0), (0.0, 1.0), mu=math.inf, eps=3.0)


@given(
    dx=st.floats(-4, 4), dy=st.floats(-4, 4),
    gx=st.floats(-2, 2), gy=st.floats(-2, 2),
    mu=st.floats(0, 60), eps=st.floats(0.5, 8),
)
def test_weight_scaling_law(dx, dy, gx, gy, mu, eps):
    # eps * w_eps(delta) == w_1(delta / eps): the grid spacing only rescales
    if math.hypot(dx, dy) < 1e-6:
        return
    lhs = eps * engine.weight((0, 0), (dx, dy), (gx, gy), mu, eps)
    rhs = engine.weight((0, 0), (dx / eps, dy / eps), (gx, gy), mu, 1.0)
    assert lhs == pytest.approx(rhs, rel=1e-12)


@given(gx=st.floats(-2, 2), gy=st.floats(-2, 2))
def test_weight_sign_symmetry(gx, gy):
    # the penalty depends on the line through g, not its orientation
    w1 = engine.weight((0, 0), (1.5, -0.5), (gx, gy), 20.0, 3.0)
    w2 = engine.weight((0, 0), (1.5, -0.5), (-gx, -gy), 20.0, 3.0)
    assert w1 == pytest.approx(w2, rel=1e-14)


# ------------------------------------------------------------- confidence

def _flat_front(theta_deg=None):
    """Wide flat horizontal front: rows 0-5 readable, 6-11 inpaint."""
    H, W = 12, 31
    labels = np.zeros((H, W), dtype=np.uint8)
    labels[6:, :] = INPAINT
    image = np.zeros((H, W, 1))
    image[:6, :, 0] = 0.8
    return image, labels


def test_confidence_flat_front_is_half():
    # [DERIVED] r=3, mu=50, g=(0,1): only the dx=0 column carries weight,
    # split evenly between the readable upper and unreadable lower half
    image, labels = _flat_front()
    C = engine.confidence((15, 6), image, labels, (0.0, 1.0), FillParams())
    assert C == pytest.approx(0.5, abs=1e-12)


def test_confidence_low_angle_rotated_front():
    # [DERIVED] rotated ball at 10 degrees: no on-line point clears the
    # front, so the readable mass is the off-line residue ~ 1.5e-61
    image, labels = _flat_front()
    th = math.radians(10.0)
    g = (math.cos(th), math.sin(th))
    C = engine.confidence((15, 6), image, labels, g, FillParams())
    assert C == pytest.approx(1.5113912011802175e-61, rel=1e-9)
    assert not engine.ready(C, g, FillParams())


def test_confidence_low_angle_axis_front():
    # [DERIVED] same angle on the axis ball
    image, labels = _flat_front()
    th = math.radians(10.0)
    g = (math.cos(th), math.sin(th))
    C = engine.confidence(
        (15, 6), image, labels, g, FillParams(neighborhood="axis_ball")
    )
    assert C == pytest.approx(4.503504789933916e-24, rel=1e-9)


def test_ready_predicates():
    p_onion = FillParams(order="onion")
    p_smart = FillParams(order="smart")
    p_data = FillParams(order="smart_with_data_term")
    assert engine.ready(0.0, (0, 0), p_onion)
    assert engine.ready(0.2, (0, 0), p_smart)
    assert not engine.ready(0.04, (0, 0), p_smart)
    assert not engine.ready(0.2, (0.0, 0.0), p_data)          # no data
    assert engine.ready(0.2, (0.0, 0.3), p_data)
    assert engine.ready(0.2, (0.0, 0.0), p_data, data_term_live=False)


def test_fill_color_flat_front_exact():
    # single contributing column -> exact copy of the constant above
    image, labels = _flat_front()
    vals, ok = engine.fill_color((15, 6), image, labels, (0.0, 1.0), FillParams())
    assert ok
    assert vals[0] == pytest.approx(0.8, abs=1e-15)


def test_fill_color_mu_inf_on_line_average():
    # [DERIVED] g=(1,0), mu=inf, r=3 on a single row [R R R I...]: the
    # argmin set is the 6 on-line points, 3 readable on the left, so
    # u = (0*(1/3) + 0.3*(1/2) + 0.9*1) / (1/3 + 1/2 + 1) = 6.3/11
    labels = np.full((1, 7), INPAINT, dtype=np.uint8)
    labels[0, :3] = READABLE
    image = np.zeros((1, 7, 1))
    image[0, :3, 0] = [0.0, 0.3, 0.9]
    vals, ok = engine.fill_color(
        (3, 0), image, labels, (1.0, 0.0), FillParams(mu=math.inf)
    )
    assert ok
    assert vals[0] == pytest.approx(6.3 / 11.0, rel=1e-14)


# ---------------------------------------------------------------- engine

def test_onion_block_fills_in_shells():
    # 10x10 block peels one shell per iteration: 36, 28, 20, 12, 4
    labels = _block_labels(20, 20, 5, 15, 5, 15)
    image = np.full((20, 20, 3), 0.25)
    u, rep = engine.inpaint(image, labels, params=FillParams(order="onion"))
    assert rep.iterations == 5
    assert rep.filled == 100
    assert [row[4] for row in rep.rows] == [36, 28, 20, 12, 4]
    assert not rep.unfillable
    assert np.all(u[5:15, 5:15] == pytest.approx(0.25))


def test_iteration_reads_come_from_snapshot():
    # [R I I R] with r=1: each pixel sees only its readable outer
    # neighbor, never the value written to the other inpaint pixel in the
    # same iteration
    labels = np.array([[READABLE, INPAINT, INPAINT, READABLE]], dtype=np.uint8)
    image = np.zeros((1, 4, 1))
    image[0, 0, 0] = 0.0
    image[0, 3, 0] = 0.9
    u, rep = engine.inpaint(image, labels, params=FillParams(r=1, order="onion"))
    assert rep.iterations == 1
    assert u[0, 1, 0] == 0.0
    assert u[0, 2, 0] == 0.9


def test_rotated_ball_with_zero_guide_matches_axis_ball():
    rng = np.random.default_rng(7)
    image = rng.random((24, 24, 3))
    labels = _block_labels(24, 24, 8, 16, 8, 16)
    image[labels == INPAINT] = 0.0
    u1, _ = engine.inpaint(image, labels, params=FillParams(neighborhood="rotated_ball"))
    u2, _ = engine.inpaint(image, labels, params=FillParams(neighborhood="axis_ball"))
    assert np.array_equal(u1, u2)


def test_inpaint_is_deterministic():
    rng = np.random.default_rng(3)
    image = rng.random((30, 30, 3))
    labels = _block_labels(30, 30, 9, 21, 7, 23)
    image[labels == INPAINT] = 0.0
    guide = np.zeros((30, 30, 2))
    guide[:, :, 0] = 0.7
    u1, _ = engine.inpaint(image, labels, guide)
    u2, _ = engine.inpaint(image, labels, guide)
    assert np.array_equal(u1, u2)


def test_fill_values_stay_in_convex_hull():
    rng = np.random.default_rng(11)
    image = rng.uniform(0.2, 0.6, size=(26, 26, 3))
    labels = _block_labels(26, 26, 6, 20, 6, 20)
    image[labels == INPAINT] = 0.0
    u, rep = engine.inpaint(image, labels, params=FillParams(order="onion"))
    assert rep.filled == 14 * 14
    region = u[labels == INPAINT]
    assert region.min() >= 0.2 - 1e-12
    assert region.max() <= 0.6 + 1e-12


@settings(deadline=None, max_examples=25)
@given(st.data())
def test_random_masks_always_complete(data):
    # any Readable/Inpaint mask with a readable border fills completely,
    # strictly shrinking every iteration
    H = data.draw(st.integers(6, 18))
    W = data.draw(st.integers(6, 18))
    bits = data.draw(st.lists(
        st.booleans(), min_size=(H - 2) * (W - 2), max_size=(H - 2) * (W - 2)
    ))
    labels = np.zeros((H, W), dtype=np.uint8)
    inner = np.array(bits, dtype=bool).reshape(H - 2, W - 2)
    labels[1:-1, 1:-1][inner] = INPAINT
    image = np.full((H, W, 1), 0.4)
    image[labels == INPAINT] = 0.0
    u, rep = engine.inpaint(image, labels, params=FillParams(order="onion"))
    assert not rep.unfillable
    assert rep.filled == int(inner.sum())
    assert all(row[4] >= 1 for row in rep.rows)
    assert np.all(u[labels == INPAINT] == pytest.approx(0.4))


def test_smart_order_completes_flat_front():
    image, labels = _flat_front()
    u, rep = engine.inpaint(image, labels, params=FillParams(order="smart"))
    assert rep.filled == int((labels == INPAINT).sum())
    assert not rep.unfillable
    assert np.all(u[labels == INPAINT] == pytest.approx(0.8))


def test_data_term_latch_matches_smart_when_guide_empty():
    rng = np.random.default_rng(5)
    image = rng.random((20, 20, 1))
    labels = _block_labels(20, 20, 6, 14, 6, 14)
    image[labels == INPAINT] = 0.0
    guide = np.zeros((20, 20, 2))
    u1, r1 = engine.inpaint(image, labels, guide, FillParams(order="smart"))
    u2, r2 = engine.inpaint(
        image, labels, guide, FillParams(order="smart_with_data_term")
    )
    assert np.array_equal(u1, u2)
    assert r1.iterations == r2.iterations


def test_data_term_defers_guideless_half():
    # guided left half fills while the data term is live; the unguided
    # right half only fills after the latch releases
    labels = _block_labels(14, 40, 5, 9, 4, 36)
    image = np.full((14, 40, 1), 0.6)
    image[labels == INPAINT] = 0.0
    guide = np.zeros((14, 40, 2))
    guide[:, :20, 0] = 1.0
    u, rep = engine.inpaint(
        image, labels, guide, FillParams(order="smart_with_data_term")
    )
    assert rep.filled == int((labels == INPAINT).sum())
    assert not rep.unfillable


def test_deadlock_guard_neighbor_mean():
    # diagonal-only contact with r=1: readable ball mass is zero, the
    # guard falls back to the readable 8-neighbor mean
    labels = np.full((7, 7), BYSTANDER, dtype=np.uint8)
    labels[:3, :3] = READABLE
    labels[3, 3] = INPAINT
    image = np.zeros((7, 7, 1))
    image[:3, :3, 0] = 0.45
    u, rep = engine.inpaint(image, labels, params=FillParams(r=1, order="onion"))
    assert rep.deadlock_fills == 1
    assert rep.filled == 1
    assert u[3, 3, 0] == pytest.approx(0.45)


def test_deadlock_guard_fills_single_pixel_per_iteration():
    # rotated low-angle front: nothing is ever ready under smart order,
    # so progress comes from single max-confidence fills
    labels = np.zeros((8, 12), dtype=np.uint8)
    labels[4:, :] = INPAINT
    image = np.full((8, 12, 1), 0.3)
    image[labels == INPAINT] = 0.0
    th = math.radians(10.0)
    guide = np.zeros((8, 12, 2))
    guide[..., 0] = math.cos(th)
    guide[..., 1] = math.sin(th)
    u, rep = engine.inpaint(image, labels, guide, FillParams(order="smart"))
    assert rep.deadlock_fills >= 1
    assert rep.filled == 48
    assert not rep.unfillable


def test_unfillable_pocket_gets_nearest_readable_color():
    # a Bystander moat leaves the core unreachable; it is flagged and
    # painted with the nearest readable color
    labels = np.zeros((11, 11), dtype=np.uint8)
    labels[3:8, 3:8] = BYSTANDER
    labels[4:7, 4:7] = INPAINT
    image = np.full((11, 11, 1), 0.7)
    image[3:8, 3:8] = 0.0
    u, rep = engine.inpaint(image, labels, params=FillParams(order="onion"))
    assert rep.unfillable
    assert rep.unfillable_count == 9
    assert rep.filled == 0
    assert np.all(u[4:7, 4:7, 0] == pytest.approx(0.7))


def test_unfillable_without_any_readable_pixel():
    labels = np.full((5, 5), INPAINT, dtype=np.uint8)
    image = np.zeros((5, 5, 2))
    u, rep = engine.inpaint(image, labels)
    assert rep.unfillable
    assert rep.unfillable_count == 25
    assert np.all(u == 0.5)


def test_dimension_mismatch_raises():
    image = np.zeros((4, 5, 3))
    labels = np.zeros((4, 4), dtype=np.uint8)
    with pytest.raises(ValueError, match="differ"):
        engine.inpaint(image, labels)
    with pytest.raises(ValueError, match="guide"):
        engine.inpaint(np.zeros((4, 4, 3)), labels, np.zeros((4, 5, 2)))


def test_params_validation_and_serialization():
    with pytest.raises(ValueError):
        FillParams(order="random")
    with pytest.raises(ValueError):
        FillParams(r=0)
    with pytest.raises(ValueError):
        FillParams(neighborhood="square")
    d = FillParams(mu=math.inf).to_dict()
    assert d["mu"] == "inf"
    assert FillParams.telea().g_fixed == (0.0, 0.0)
    assert FillParams.coherence_transport().r == 5


# ------------------------------------------------- kinking (small scale)

def _kink_scene(H, W, theta_deg, neighborhood):
    """Lower half inpaint, dark line through the center at theta."""
    th = math.radians(theta_deg)
    image = np.full((H, W, 1), 1.0)
    jj, ii = np.mgrid[0:H, 0:W]
    # signed distance to the line through (W/2, H/2) along (cos th, sin th)
    d = -math.sin(th) * (ii - W / 2) + math.cos(th) * (jj - H / 2)
    image[np.abs(d) <= 2.0, 0] = 0.0
    labels = np.zeros((H, W), dtype=np.uint8)
    labels[H // 2:, :] = INPAINT
    image[labels == INPAINT] = 1.0
    # re-draw the known half of the line
    known = (np.abs(d) <= 2.0) & (labels == READABLE)
    image[known, 0] = 0.0
    guide = np.zeros((H, W, 2))
    guide[..., 0] = math.cos(th)
    guide[..., 1] = math.sin(th)
    return image, labels, guide


def _measure_line_angle(u, labels):
    """Fit the filled line's angle from per-row centroids of darkness."""
    H, W = labels.shape
    rows = []
    cols = []
    for j in range(H // 2 + 1, H - 2):
        dark = 1.0 - u[j, :, 0]
        if dark.sum() < 1e-6:
            continue
        rows.append(j)
        cols.append(float((dark * np.arange(W)).sum() / dark.sum()))
    rows = np.array(rows, dtype=np.float64)
    cols = np.array(cols)
    slope = np.polyfit(rows, cols, 1)[0]  # di/dj
    return math.degrees(math.atan2(1.0, slope))


def test_kinking_axis_ball_snaps_to_vertical():
    image, labels, guide = _kink_scene(80, 120, 73.0, "axis_ball")
    u, _ = engine.inpaint(
        image, labels, guide,
        FillParams(order="onion", neighborhood="axis_ball", mu=50.0),
    )
    angle = _measure_line_angle(u, labels)
    assert abs(angle - 90.0) <= 4.0


def test_kinking_rotated_ball_preserves_angle():
    image, labels, guide = _kink_scene(80, 120, 73.0, "rotated_ball")
    u, _ = engine.inpaint(
        image, labels, guide,
        FillParams(order="onion", neighborhood="rotated_ball", mu=50.0),
    )
    angle = _measure_line_angle(u, labels)
    assert abs(angle - 73.0) <= 2.0
