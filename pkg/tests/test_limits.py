"""Tests for limiting transport directions and the convergence study."""

import math

import numpy as np
import pytest

from guidefill import limits
from guidefill.limits import (
    EmptySetError,
    QuadratureError,
    convergence_study,
    curve_to_csv,
    discrete_lp_error,
    half_ball,
    integral_limit_direction,
    limit_angle_curve,
    limit_direction,
    study_to_csv,
    transport_solution,
)


def _g(theta_deg: float):
    th = math.radians(theta_deg)
    return (math.cos(th), math.sin(th))


# ---------------------------------------------------------------- half balls


def test_axis_half_ball_r3_exact_set():
    hb = half_ball("axis_ball", 3)
    got = {(float(x), float(y)) for x, y in hb.points}
    # [DERIVED] all integer (n, m) with n^2 + m^2 <= 9, m <= -1
    expected = set()
    for m in range(-3, 0):
        for n in range(-3, 4):
            if n * n + m * m <= 9:
                expected.add((float(n), float(m)))
    assert got == expected
    assert len(got) == 11


def test_axis_half_ball_point_order_is_lexicographic():
    hb = half_ball("axis_ball", 2)
    rows = [tuple(p) for p in hb.points]
    assert rows == sorted(rows, key=lambda p: (p[1], p[0]))


def test_rotated_half_ball_vertical_guide_matches_axis():
    a = half_ball("axis_ball", 3)
    b = half_ball("rotated_ball", 3, (0.0, 1.0))
    assert np.array_equal(a.points, b.points)


def test_rotated_half_ball_73deg_membership():
    g = _g(73.0)
    hb = half_ball("rotated_ball", 3, g)
    assert len(hb.points) == 8
    pts = {(round(float(x), 12), round(float(y), 12)) for x, y in hb.points}

    def on_guide(k):
        return (round(-k * g[0], 12), round(-k * g[1], 12))

    # -2g and -3g survive the y <= -1 cut, -g does not (|sin 73| < 1 scaled)
    assert on_guide(2) in pts
    assert on_guide(3) in pts
    assert on_guide(1) not in pts


def test_rotated_half_ball_empty_at_r1_oblique():
    with pytest.raises(EmptySetError):
        half_ball("rotated_ball", 1, _g(73.0))


def test_half_ball_rejects_bad_args():
    with pytest.raises(ValueError):
        half_ball("diamond", 3)
    with pytest.raises(ValueError):
        half_ball("axis_ball", 0)


# ---------------------------------------------------------- limit directions


def test_axis_mu_inf_73deg_snaps_to_vertical():
    pred = limit_direction("axis_ball", 3, math.inf, _g(73.0))
    assert math.degrees(pred.theta_star) == 90.0


def test_rotated_mu_inf_73deg_stays_on_guide():
    pred = limit_direction("rotated_ball", 3, math.inf, _g(73.0))
    assert abs(pred.theta_star - math.radians(73.0)) < 1e-12


def test_rotated_mu50_73deg_stays_on_guide():
    pred = limit_direction("rotated_ball", 3, 50.0, _g(73.0))
    assert abs(pred.theta_star - math.radians(73.0)) < 1e-12


def test_axis_mu50_73deg_close_to_vertical():
    # [DERIVED] frozen from the weighted half-ball average
    pred = limit_direction("axis_ball", 3, 50.0, _g(73.0))
    assert math.degrees(pred.theta_star) == pytest.approx(
        89.98274068135615, abs=1e-9
    )


@pytest.mark.parametrize("kind", ["axis_ball", "rotated_ball"])
@pytest.mark.parametrize("theta,mu", [(57.0, 3.0), (84.0, 20.0), (118.0, 1.0)])
def test_limit_direction_matches_bruteforce_average(kind, theta, mu):
    g = _g(theta)
    hb = half_ball(kind, 3, g)
    sw = sx = sy = 0.0
    for px, py in hb.points:
        dist = math.hypot(px, py)
        d = -g[1] * px + g[0] * py
        w = math.exp(-(mu * mu) / (2.0 * 9.0) * d * d) / dist
        sw += w
        sx += w * px
        sy += w * py
    pred = limit_direction(kind, 3, mu, g)
    assert pred.g_star[0] == pytest.approx(sx / sw, rel=1e-12)
    assert pred.g_star[1] == pytest.approx(sy / sw, rel=1e-12)


def test_limit_direction_guide_magnitude_invariant():
    g = _g(73.0)
    a = limit_direction("rotated_ball", 3, 7.0, g)
    b = limit_direction("rotated_ball", 3, 7.0, (2.0 * g[0], 2.0 * g[1]))
    assert a.g_star == b.g_star


def test_limit_direction_mirror_symmetry():
    for theta in (37.0, 73.0, 112.0):
        for kind in ("axis_ball", "rotated_ball"):
            a = limit_direction(kind, 3, 50.0, _g(theta))
            b = limit_direction(kind, 3, 50.0, _g(180.0 - theta))
            assert abs((math.pi - a.theta_star) - b.theta_star) < 1e-12


def test_limit_direction_rejects_downward_guide():
    with pytest.raises(ValueError):
        limit_direction("axis_ball", 3, 50.0, (0.0, -1.0))


# ----------------------------------------------------------------- curves


def test_axis_mu_inf_curve_is_piecewise_lattice_angles():
    theta_deg, theta_star_deg = limit_angle_curve("axis_ball", 3, math.inf)
    lattice = set()
    for n in range(-3, 4):
        for m in range(-3, 4):
            if (n, m) != (0, 0) and n * n + m * m <= 9:
                lattice.add(round(math.degrees(math.atan2(n, m)) % 180.0, 9))
    got = {round(float(v), 9) for v in theta_star_deg}
    assert got <= lattice
    # piecewise constant: far fewer values than samples
    assert len(got) == 7
    assert 90.0 in got


def test_rotated_curve_reproduces_guide_in_resolved_band():
    theta_deg, theta_star_deg = limit_angle_curve("rotated_ball", 3, 50.0)
    for t, s in zip(theta_deg, theta_star_deg):
        if 3.0 * math.sin(math.radians(float(t))) >= 1.0:
            assert abs(math.radians(float(s)) - math.radians(float(t))) < 1e-9


def test_curve_to_csv_format():
    td = np.array([1.0, 2.5])
    ts = np.array([26.565051177077994, 45.0])
    csv = curve_to_csv(td, ts)
    lines = csv.splitlines()
    assert lines[0] == "theta_deg,theta_star_deg"
    assert lines[1] == "1,26.56505118"
    assert lines[2] == "2.5,45"
    assert csv.endswith("\n")


# ------------------------------------------------------------ integral limit


def test_integral_limit_mu0_is_vertical():
    pred = integral_limit_direction(0.0, _g(73.0), n=400)
    assert math.degrees(pred.theta_star) == pytest.approx(90.0, abs=1e-9)


def test_integral_limit_mu_inf_is_guide():
    g = _g(73.0)
    pred = integral_limit_direction(math.inf, g)
    assert abs(pred.theta_star - math.radians(73.0)) < 1e-12
    assert pred.g_star == pytest.approx((-g[0] / 2.0, -g[1] / 2.0), abs=1e-15)


def test_integral_limit_vertical_guide_stays_vertical():
    pred = integral_limit_direction(50.0, (0.0, 1.0))
    assert math.degrees(pred.theta_star) == pytest.approx(90.0, abs=1e-9)


def test_integral_limit_mu10_frozen_value():
    # [DERIVED] Gauss-Legendre with analytic radial moments, self-checked
    pred = integral_limit_direction(10.0, _g(73.0))
    assert math.degrees(pred.theta_star) == pytest.approx(
        74.50173572376826, rel=1e-9
    )


def test_integral_limit_sharpens_toward_guide_as_mu_grows():
    target = math.radians(73.0)
    errs = [
        abs(integral_limit_direction(mu, _g(73.0)).theta_star - target)
        for mu in (1.0, 10.0, 100.0)
    ]
    assert errs[0] > errs[1] > errs[2]


def test_integral_limit_unsettled_raises():
    with pytest.raises(QuadratureError):
        integral_limit_direction(50.0, _g(73.0), n=8)


# --------------------------------------------------------- transport + norms


def test_transport_vertical_copies_trace():
    x = np.linspace(0.0, 1.0, 7, endpoint=False)
    y = np.full_like(x, -0.4)
    out = transport_solution(lambda s: 10.0 * s, math.pi / 2.0, x, y)
    assert np.allclose(out, 10.0 * x, atol=1e-12)


def test_transport_45deg_shifts_by_depth():
    x = np.array([0.5])
    y = np.array([-0.25])
    out = transport_solution(lambda s: s, math.pi / 4.0, x, y)
    # x - cot(45) * y = 0.5 + 0.25
    assert out[0] == pytest.approx(0.75, abs=1e-12)


def test_transport_wraps_periodically():
    out = transport_solution(lambda s: s, math.pi / 4.0, np.array([0.1]), np.array([-0.95]))
    assert out[0] == pytest.approx(0.05, abs=1e-12)


def test_transport_constant_trace():
    x = np.linspace(0, 1, 5)
    y = -np.ones_like(x)
    out = transport_solution(lambda s: np.full_like(s, 0.3), 1.0, x, y)
    assert np.all(out == 0.3)


def test_transport_rejects_horizontal():
    with pytest.raises(ValueError):
        transport_solution(lambda s: s, 0.0, np.zeros(1), np.zeros(1))


def test_discrete_lp_error_values():
    diff = np.array([[3.0, -4.0], [0.0, 0.0]])
    assert discrete_lp_error(diff, 0.5, 1) == pytest.approx(7.0 * 0.25)
    assert discrete_lp_error(diff, 0.5, 2) == pytest.approx(
        math.sqrt(25.0 * 0.25)
    )
    assert discrete_lp_error(diff, 0.5, math.inf) == 4.0


# ----------------------------------------------------------- small study


def test_convergence_study_small_run():
    study = convergence_study(
        lambda s: np.sin(2.0 * math.pi * np.asarray(s)),
        kind="rotated_ball",
        r=3,
        mu=1.0,
        g=(0.0, 1.0),
        resolutions=(32, 64),
    )
    assert study["resolutions"] == (32, 64)
    assert math.degrees(study["theta_star_rad"]) == pytest.approx(90.0)
    for N in (32, 64):
        for p in (1, 2, math.inf):
            err = study["errors"][N][p]
            assert math.isfinite(err) and err > 0.0
    # halving h must shrink every error for the smooth trace
    for p in (1, 2, math.inf):
        assert study["errors"][64][p] < study["errors"][32][p]
        assert len(study["orders"][p]) == 1
        assert study["orders"][p][0] > 0.0

    csv = study_to_csv(study)
    lines = csv.splitlines()
    assert lines[0] == "N,p,error,order"
    assert len(lines) == 1 + 2 * 3
    assert lines[1].startswith("32,1,") and lines[1].endswith(",")
    assert not lines[4].endswith(",")  # orders present on the second level
